#include "fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace qslab::fourier {

namespace {

using PlanKey = std::tuple<int, int, int, int, int>;

std::mutex planner_mutex;

fftw_plan plan_for(int n, int stride, int howmany, int dist, int sign) {
    static std::map<PlanKey, fftw_plan> cache;
    std::lock_guard lock(planner_mutex);
    const PlanKey key{n, stride, howmany, dist, sign};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const std::size_t span = static_cast<std::size_t>(n - 1) * stride + static_cast<std::size_t>(howmany - 1) * dist + 1;
    auto* scratch = fftw_alloc_complex(span);
    fftw_plan p = fftw_plan_many_dft(1, &n, howmany, scratch, nullptr, stride, dist, scratch, nullptr, stride, dist,
                                     sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    cache.emplace(key, p);
    return p;
}

void alternate_signs(cplx* data, int n, int stride, int howmany, int dist) {
    for (int b = 0; b < howmany; ++b) {
        cplx* row = data + static_cast<std::ptrdiff_t>(b) * dist;
        for (int i = 1; i < n; i += 2) row[static_cast<std::ptrdiff_t>(i) * stride] = -row[static_cast<std::ptrdiff_t>(i) * stride];
    }
}

}  // namespace

void dft(cplx* data, int n, int stride, int howmany, int dist, int sign) {
    if (n == 1) return;
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_for(n, stride, howmany, dist, sign), p, p);
}

void centered_axis(cplx* data, int n, int stride, int howmany, int dist, double spacing, Direction dir) {
    if (n == 1) return;
    const double scale = dir == Direction::forward ? spacing / std::sqrt(2.0 * std::numbers::pi)
                                                   : std::sqrt(2.0 * std::numbers::pi) / (n * spacing);
    alternate_signs(data, n, stride, howmany, dist);
    dft(data, n, stride, howmany, dist, dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD);
    alternate_signs(data, n, stride, howmany, dist);
    // (-1)^{n/2} phase from the half-window offset is +1 for n divisible by 4; n = 2 never occurs.
    for (int b = 0; b < howmany; ++b) {
        cplx* row = data + static_cast<std::ptrdiff_t>(b) * dist;
        for (int i = 0; i < n; ++i) row[static_cast<std::ptrdiff_t>(i) * stride] *= scale;
    }
}

void along_x(cplx* data, const PhaseGrid& g, Direction dir) {
    centered_axis(data, g.nx, g.nt, g.nt, 1, g.dx(), dir);
}

void along_t(cplx* data, const PhaseGrid& g, Direction dir) {
    centered_axis(data, g.nt, 1, g.nx, g.nt, g.dt(), dir);
}

}  // namespace qslab::fourier
