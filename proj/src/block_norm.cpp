#include "qslab/block_norm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "qslab/error.hpp"
#include "qslab/parallel.hpp"

namespace qslab {

namespace {

using cplx = std::complex<double>;

struct Interval {
    double lo, hi;
};

std::vector<Interval> frequency_set(int k, Sidedness side, bool reflected) {
    const Interval pos{std::ldexp(1.0, k - 1), std::ldexp(1.0, k + 1)};
    const Interval neg{-pos.hi, -pos.lo};
    if (side == Sidedness::two_sided) return {neg, pos};
    return {reflected ? neg : pos};
}

std::vector<Interval> modulation_set(int j) {
    if (j == 0) return {{-2.0, 2.0}};
    const Interval pos{std::ldexp(1.0, j - 1), std::ldexp(1.0, j + 1)};
    return {{-pos.hi, -pos.lo}, pos};
}

bool overlaps(const Interval& a, const Interval& b) { return a.lo <= b.hi && b.lo <= a.hi; }

// Row-segment layout of one block on the lattice.
struct Layout {
    struct Row {
        long n = 0;
        int nseg = 0;
        long lo[2] = {0, 0};
        long hi[2] = {-1, -1};
        std::size_t off[2] = {0, 0};
    };
    std::vector<Row> rows;
    std::size_t size = 0;
    long n_min = 0;
    std::vector<int> row_of;

    int find(long n) const {
        const long idx = n - n_min;
        if (idx < 0 || idx >= static_cast<long>(row_of.size())) return -1;
        return row_of[idx];
    }
};

Layout make_layout(int k, int j, const BlockLattice& lat, Sidedness side, bool reflected) {
    Layout L;
    const auto mods = modulation_indices(j, lat.delta);
    for (const auto& fi : frequency_indices(k, lat.h, side, reflected))
        for (long n = fi.lo; n <= fi.hi; ++n) {
            Layout::Row r;
            r.n = n;
            for (const auto& mi : mods) {
                if (mi.empty()) continue;
                r.lo[r.nseg] = mi.lo;
                r.hi[r.nseg] = mi.hi;
                r.off[r.nseg] = L.size;
                L.size += static_cast<std::size_t>(mi.size());
                ++r.nseg;
            }
            if (r.nseg) L.rows.push_back(r);
        }
    if (!L.rows.empty()) {
        L.n_min = L.rows.front().n;
        L.row_of.assign(static_cast<std::size_t>(L.rows.back().n - L.n_min + 1), -1);
        for (std::size_t r = 0; r < L.rows.size(); ++r) L.row_of[L.rows[r].n - L.n_min] = static_cast<int>(r);
    }
    return L;
}

// One contiguous piece of the convolution: u-segment x v-segment -> output segment.
struct Task {
    long m1_lo, m1_hi, u_lo;
    std::size_t u_off;
    long v_lo, v_hi;
    std::size_t v_off;
    long o_lo, o_hi;
    std::size_t o_off;
    long shift;
};

struct Problem {
    Layout u, v, out;
    std::vector<Task> tasks;
    double work = 0.0;
};

template <class F>
void for_each_task(const Layout& lu, const Layout& lv, const Layout& lo, const BlockLattice& lat, F&& emit) {
    for (const auto& ru : lu.rows)
        for (const auto& rv : lv.rows) {
            const long n = ru.n + rv.n;
            const int ro_idx = lo.find(n);
            if (ro_idx < 0) continue;
            const auto& ro = lo.rows[ro_idx];
            const long s = resonance_shift(n, rv.n, lat);
            for (int a = 0; a < ru.nseg; ++a)
                for (int b = 0; b < rv.nseg; ++b)
                    for (int c = 0; c < ro.nseg; ++c) {
                        const long m1_lo = std::max(ru.lo[a], ro.lo[c] - s - rv.hi[b]);
                        const long m1_hi = std::min(ru.hi[a], ro.hi[c] - s - rv.lo[b]);
                        if (m1_lo > m1_hi) continue;
                        emit(Task{m1_lo, m1_hi, ru.lo[a], ru.off[a], rv.lo[b], rv.hi[b], rv.off[b], ro.lo[c], ro.hi[c],
                                  ro.off[c], s});
                    }
        }
}

double task_work(const Task& t) {
    double w = 0.0;
    for (long m1 = t.m1_lo; m1 <= t.m1_hi; ++m1) {
        const long lo = std::max(t.v_lo, t.o_lo - m1 - t.shift);
        const long hi = std::min(t.v_hi, t.o_hi - m1 - t.shift);
        if (hi >= lo) w += static_cast<double>(hi - lo + 1);
    }
    return w;
}

void forward(const Problem& P, const std::vector<cplx>& u, const std::vector<cplx>& v, std::vector<cplx>& y) {
    std::fill(y.begin(), y.end(), cplx{});
    for (const auto& t : P.tasks)
        for (long m1 = t.m1_lo; m1 <= t.m1_hi; ++m1) {
            const cplx a = u[t.u_off + (m1 - t.u_lo)];
            const long lo = std::max(t.v_lo, t.o_lo - m1 - t.shift);
            const long hi = std::min(t.v_hi, t.o_hi - m1 - t.shift);
            const cplx* vp = v.data() + t.v_off - t.v_lo;
            cplx* yp = y.data() + t.o_off - t.o_lo + m1 + t.shift;
            for (long m2 = lo; m2 <= hi; ++m2) yp[m2] += a * vp[m2];
        }
}

void adjoint_u(const Problem& P, const std::vector<cplx>& v, const std::vector<cplx>& y, std::vector<cplx>& u) {
    std::fill(u.begin(), u.end(), cplx{});
    for (const auto& t : P.tasks)
        for (long m1 = t.m1_lo; m1 <= t.m1_hi; ++m1) {
            const long lo = std::max(t.v_lo, t.o_lo - m1 - t.shift);
            const long hi = std::min(t.v_hi, t.o_hi - m1 - t.shift);
            const cplx* vp = v.data() + t.v_off - t.v_lo;
            const cplx* yp = y.data() + t.o_off - t.o_lo + m1 + t.shift;
            cplx acc{};
            for (long m2 = lo; m2 <= hi; ++m2) acc += std::conj(vp[m2]) * yp[m2];
            u[t.u_off + (m1 - t.u_lo)] += acc;
        }
}

void adjoint_v(const Problem& P, const std::vector<cplx>& u, const std::vector<cplx>& y, std::vector<cplx>& v) {
    std::fill(v.begin(), v.end(), cplx{});
    for (const auto& t : P.tasks)
        for (long m1 = t.m1_lo; m1 <= t.m1_hi; ++m1) {
            const cplx a = std::conj(u[t.u_off + (m1 - t.u_lo)]);
            const long lo = std::max(t.v_lo, t.o_lo - m1 - t.shift);
            const long hi = std::min(t.v_hi, t.o_hi - m1 - t.shift);
            cplx* vp = v.data() + t.v_off - t.v_lo;
            const cplx* yp = y.data() + t.o_off - t.o_lo + m1 + t.shift;
            for (long m2 = lo; m2 <= hi; ++m2) vp[m2] += a * yp[m2];
        }
}

double norm2(const std::vector<cplx>& a) {
    double s = 0.0;
    for (const cplx& z : a) s += std::norm(z);
    return std::sqrt(s);
}

bool normalize(std::vector<cplx>& a) {
    const double n = norm2(a);
    if (!(n > 0.0)) return false;
    for (cplx& z : a) z /= n;
    return true;
}

void initialize(std::vector<cplx>& a, std::mt19937_64* rng) {
    if (!rng) {
        std::fill(a.begin(), a.end(), cplx{1.0, 0.0});
    } else {
        std::normal_distribution<double> g;
        for (cplx& z : a) z = cplx{1.0 + g(*rng), g(*rng)};
    }
    normalize(a);
}

struct RestartResult {
    double value = 0.0;
    int sweeps = 0;
    bool converged = false;
};

RestartResult ascend(const Problem& P, const MeasureOptions& o, std::mt19937_64* rng, double best_so_far) {
    std::vector<cplx> u(P.u.size), v(P.v.size), y(P.out.size);
    initialize(u, rng);
    initialize(v, rng);
    forward(P, u, v, y);
    RestartResult r;
    r.value = norm2(y);
    if (r.value == 0.0) {
        r.converged = true;
        return r;
    }
    for (r.sweeps = 1; r.sweeps <= o.max_sweeps; ++r.sweeps) {
        for (int it = 0; it < o.inner_iterations; ++it) {
            adjoint_u(P, v, y, u);
            if (!normalize(u)) break;
            forward(P, u, v, y);
        }
        for (int it = 0; it < o.inner_iterations; ++it) {
            adjoint_v(P, u, y, v);
            if (!normalize(v)) break;
            forward(P, u, v, y);
        }
        const double next = norm2(y);
        const bool done = next - r.value <= o.tolerance * next;
        r.value = std::max(r.value, next);
        if (done) {
            r.converged = true;
            break;
        }
        // A start trailing far behind an earlier optimum is abandoned; one creeping into an
        // already-found optimum from below is a duplicate.
        if (r.sweeps >= 25 && r.value < 0.5 * best_so_far) break;
        if (r.sweeps >= 25 && r.value <= best_so_far && r.value >= best_so_far * (1.0 - 1e-7)) break;
    }
    r.sweeps = std::min(r.sweeps, o.max_sweeps);
    return r;
}

}  // namespace

bool structurally_zero(const BlockTriple& t, Sidedness side, const BlockLattice& lattice) {
    const auto F1 = frequency_set(t.k1, side, false);
    const auto F2 = frequency_set(t.k2, side, false);
    const auto F3 = frequency_set(t.k3, side, true);
    const auto M1 = modulation_set(t.j1);
    const auto M2 = modulation_set(t.j2);
    const auto M3 = modulation_set(t.j3);
    const double margin = lattice.delta;
    for (const auto& a : F1)
        for (const auto& c : F3) {
            // xi1 = xi - xi2 must reach the u-shell.
            const Interval x1{a.lo - c.hi, a.hi - c.lo};
            bool reach = false;
            for (const auto& b : F2) reach = reach || overlaps(x1, b);
            if (!reach) continue;
            const double p[4] = {a.lo * c.lo, a.lo * c.hi, a.hi * c.lo, a.hi * c.hi};
            const Interval om{2.0 * *std::min_element(p, p + 4), 2.0 * *std::max_element(p, p + 4)};
            for (const auto& s2 : M2)
                for (const auto& s3 : M3) {
                    const Interval sum{s2.lo + s3.lo + om.lo - margin, s2.hi + s3.hi + om.hi + margin};
                    for (const auto& s1 : M1)
                        if (overlaps(sum, s1)) return false;
                }
        }
    return true;
}

double estimated_work(const BlockTriple& t, double density, Sidedness side) {
    const BlockLattice lat = BlockLattice::for_triple(t, density);
    auto rows = [&](int k) {
        double r = 0.0;
        for (const auto& fi : frequency_indices(k, lat.h, side, false)) r += static_cast<double>(fi.size());
        return r;
    };
    auto cols = [&](int j) {
        double c = 0.0;
        for (const auto& mi : modulation_indices(j, lat.delta)) c += static_cast<double>(mi.size());
        return c;
    };
    const double cu = cols(t.j2), cv = cols(t.j3), co = cols(t.j1);
    const double pairs = rows(t.k2) * rows(t.k3) * std::min(cu * cv, co * std::min(cu, cv));
    return pairs + rows(t.k1) * co + rows(t.k2) * cu + rows(t.k3) * cv;
}

MeasuredNorm measure_block_norm(const BlockTriple& t, const MeasureOptions& o) {
    t.validate();
    if (o.restarts < 1) throw ContractViolation("measure_block_norm: restarts must be >= 1");
    const BlockLattice lat = BlockLattice::for_triple(t, o.density);
    MeasuredNorm res;
    res.density = o.density;
    if (structurally_zero(t, o.sidedness, lat)) {
        res.structural_zero = true;
        return res;
    }
    Problem P;
    P.u = make_layout(t.k2, t.j2, lat, o.sidedness, false);
    P.v = make_layout(t.k3, t.j3, lat, o.sidedness, true);
    P.out = make_layout(t.k1, t.j1, lat, o.sidedness, false);
    if (P.u.size == 0 || P.v.size == 0 || P.out.size == 0) {
        std::ostringstream os;
        os << "measure_block_norm: empty block for " << t.str() << " at density " << o.density << "; use a finer density";
        throw ContractViolation(os.str());
    }
    res.lattice_points = P.u.size + P.v.size + P.out.size;
    if (estimated_work(t, o.density, o.sidedness) > o.max_work * 64.0) {
        std::ostringstream os;
        os << "measure_block_norm: lattice for " << t.str() << " exceeds the work cap";
        throw ContractViolation(os.str());
    }
    for_each_task(P.u, P.v, P.out, lat, [&](const Task& task) {
        P.work += task_work(task);
        P.tasks.push_back(task);
    });
    if (P.work > o.max_work) {
        std::ostringstream os;
        os << "measure_block_norm: workload " << P.work << " for " << t.str() << " exceeds the cap " << o.max_work;
        throw ContractViolation(os.str());
    }
    if (P.tasks.empty()) {
        res.structural_zero = true;
        return res;
    }

    double best = 0.0;
    bool best_converged = false;
    for (int r = 0; r < o.restarts; ++r) {
        std::mt19937_64 rng(derive_seed(o.seed, {t.k1, t.j1, t.k2, t.j2, t.k3, t.j3, r}));
        const RestartResult rr = ascend(P, o, r == 0 ? nullptr : &rng, best);
        res.iterations += rr.sweeps;
        if (rr.value > best) {
            best = rr.value;
            best_converged = rr.converged;
        }
    }
    res.restarts = o.restarts;
    res.converged = best_converged;
    res.value = best * std::sqrt(lat.cell());
    return res;
}

}  // namespace qslab
