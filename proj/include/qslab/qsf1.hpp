#pragma once

#include <filesystem>
#include <variant>

#include "qslab/grid.hpp"

namespace qslab::qsf1 {

// Layout (little-endian): "QSF1", u32 nx, u32 nt, f64 xlen, f64 tlen, u8 tag, 7 zero bytes,
// then nx*nt (re, im) f64 pairs with space/frequency as the slow index.
// Tags: 0 physical field, 1 spectral field, 2 initial data (nt = 1).
enum class Tag : std::uint8_t { physical_field = 0, spectral_field = 1, initial_data = 2 };

inline constexpr std::size_t kHeaderBytes = 36;

using Payload = std::variant<Field, InitialData>;

void write(const std::filesystem::path& path, const Field& f);
void write(const std::filesystem::path& path, const InitialData& phi);
Payload read(const std::filesystem::path& path);

}  // namespace qslab::qsf1
