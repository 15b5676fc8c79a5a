#include "qslab/qsf1.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "qslab/error.hpp"

namespace qslab::qsf1 {

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw ContractViolation("QSF1: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

void write_impl(const std::filesystem::path& path, const PhaseGrid& g, int nt, Tag tag,
                std::span<const cplx> values) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ContractViolation("QSF1: cannot open " + path.string() + " for writing");
    os.write("QSF1", 4);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(nt));
    put_le<double>(os, g.xlen);
    put_le<double>(os, g.tlen);
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(tag));
    const char pad[7] = {};
    os.write(pad, sizeof pad);
    for (const cplx& z : values) {
        put_le<double>(os, z.real());
        put_le<double>(os, z.imag());
    }
    if (!os) throw ContractViolation("QSF1: write failed for " + path.string());
}

}  // namespace

void write(const std::filesystem::path& path, const Field& f) {
    write_impl(path, f.grid(), f.grid().nt, f.domain() == Domain::physical ? Tag::physical_field : Tag::spectral_field,
               f.values());
}

void write(const std::filesystem::path& path, const InitialData& phi) {
    write_impl(path, phi.grid(), 1, Tag::initial_data, phi.values());
}

Payload read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ContractViolation("QSF1: cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "QSF1", 4) != 0)
        throw ContractViolation("QSF1: bad magic in " + path.string());
    const auto nx = get_le<std::uint32_t>(is);
    const auto nt = get_le<std::uint32_t>(is);
    const double xlen = get_le<double>(is);
    const double tlen = get_le<double>(is);
    const auto tag = get_le<std::uint8_t>(is);
    char pad[7];
    if (!is.read(pad, sizeof pad)) throw ContractViolation("QSF1: truncated header");
    if (tag > 2) throw ContractViolation("QSF1: unknown tag " + std::to_string(tag));
    if (static_cast<Tag>(tag) == Tag::initial_data && nt != 1)
        throw ContractViolation("QSF1: initial data must have nt = 1");

    const std::size_t count = static_cast<std::size_t>(nx) * nt;
    is.seekg(0, std::ios::end);
    const auto total = static_cast<std::size_t>(is.tellg());
    if (total != kHeaderBytes + 16 * count)
        throw ContractViolation("QSF1: payload length " + std::to_string(total - kHeaderBytes) + " does not match " +
                                std::to_string(nx) + "x" + std::to_string(nt));
    is.seekg(static_cast<std::streamoff>(kHeaderBytes));
    std::vector<cplx> values(count);
    for (auto& z : values) {
        const double re = get_le<double>(is);
        const double im = get_le<double>(is);
        z = {re, im};
    }
    if (static_cast<Tag>(tag) == Tag::initial_data)
        return InitialData(PhaseGrid::make(static_cast<int>(nx), 1, xlen, tlen), std::move(values));
    const PhaseGrid g = PhaseGrid::make(static_cast<int>(nx), static_cast<int>(nt), xlen, tlen);
    return Field(g, static_cast<Tag>(tag) == Tag::physical_field ? Domain::physical : Domain::spectral,
                 std::move(values));
}

}  // namespace qslab::qsf1
