#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "qslab/block_norm.hpp"
#include "qslab/error.hpp"
#include "qslab/parallel.hpp"

namespace qslab {

namespace {

using cplx = std::complex<double>;
using Vec = std::vector<cplx>;

constexpr std::size_t kScreenStarts = 128;

struct Point {
    long n, m;
};

// Scans a bounding box and keeps lattice points passing the membership predicates.
std::vector<Point> enumerate(int k, int j, const BlockLattice& lat, Sidedness side, bool reflected) {
    const long nb = static_cast<long>(std::ceil(std::ldexp(1.0, k + 1) / lat.h)) + 1;
    const long mb = static_cast<long>(std::ceil(std::ldexp(1.0, j + 1) / lat.delta)) + 1;
    std::vector<Point> pts;
    for (long n = -nb; n <= nb; ++n) {
        const double xi = n * lat.h;
        if (!in_frequency_shell(reflected ? -xi : xi, k, side)) continue;
        for (long m = -mb; m <= mb; ++m)
            if (in_modulation_shell(m * lat.delta, j)) pts.push_back({n, m});
    }
    return pts;
}

// Incidence list of the trilinear form: u-point a times v-point b lands on output point o.
struct Tensor {
    std::size_t nu = 0, nv = 0, nw = 0;
    std::vector<int> a, b, o;
};

double unit(Vec& a) {
    double s = 0.0;
    for (const cplx& z : a) s += std::norm(z);
    s = std::sqrt(s);
    if (s > 0.0)
        for (cplx& z : a) z /= s;
    return s;
}

double apply(const Tensor& T, const Vec& u, const Vec& v, Vec& w) {
    std::fill(w.begin(), w.end(), cplx{});
    for (std::size_t e = 0; e < T.o.size(); ++e) w[T.o[e]] += u[T.a[e]] * v[T.b[e]];
    return unit(w);
}

// Block-coordinate ascent on |T(u, v, w)|; each factor update is the exact maximizer.
double ascend(const Tensor& T, Vec& u, Vec& v, int max_iter) {
    Vec w(T.nw);
    double value = apply(T, u, v, w);
    for (int it = 0; it < max_iter; ++it) {
        std::fill(u.begin(), u.end(), cplx{});
        for (std::size_t e = 0; e < T.o.size(); ++e) u[T.a[e]] += std::conj(v[T.b[e]]) * w[T.o[e]];
        if (unit(u) == 0.0) return value;
        std::fill(v.begin(), v.end(), cplx{});
        for (std::size_t e = 0; e < T.o.size(); ++e) v[T.b[e]] += std::conj(u[T.a[e]]) * w[T.o[e]];
        if (unit(v) == 0.0) return value;
        const double next = apply(T, u, v, w);
        const bool done = next - value <= 1e-14 * next;
        value = std::max(value, next);
        if (done) break;
    }
    return value;
}

// Largest singular value of the linear map x -> T(x, v) (or T(u, x)) with a dense eigen solve
// restricted to the rows and columns the incidence list touches.
double top_singular(const Tensor& T, const Vec& fixed, bool fix_v, Vec& out) {
    const std::size_t n = fix_v ? T.nu : T.nv;
    const std::vector<int>& col = fix_v ? T.a : T.b;
    std::vector<int> row_of(T.nw, -1), col_of(n, -1), cols;
    int rows = 0;
    for (std::size_t e = 0; e < T.o.size(); ++e) {
        if (row_of[T.o[e]] < 0) row_of[T.o[e]] = rows++;
        if (col_of[col[e]] < 0) {
            col_of[col[e]] = static_cast<int>(cols.size());
            cols.push_back(col[e]);
        }
    }
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(rows, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t e = 0; e < T.o.size(); ++e)
        A(row_of[T.o[e]], col_of[col[e]]) += fix_v ? fixed[T.b[e]] : fixed[T.a[e]];
    const bool wide = A.rows() < A.cols();
    const Eigen::MatrixXcd G = wide ? Eigen::MatrixXcd(A * A.adjoint()) : Eigen::MatrixXcd(A.adjoint() * A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    const Eigen::Index top = G.rows() - 1;
    Eigen::VectorXcd x = es.eigenvectors().col(top);
    if (wide) x = (A.adjoint() * x).normalized();
    out.assign(n, cplx{});
    for (std::size_t i = 0; i < cols.size(); ++i) out[cols[i]] = x(static_cast<Eigen::Index>(i));
    return std::sqrt(std::max(0.0, es.eigenvalues()(top)));
}

}  // namespace

double oracle_block_norm(const BlockTriple& t, const OracleOptions& o) {
    t.validate();
    const BlockLattice lat = BlockLattice::for_triple(t, o.density);
    const auto pu = enumerate(t.k2, t.j2, lat, o.sidedness, false);
    const auto pv = enumerate(t.k3, t.j3, lat, o.sidedness, true);
    const auto pw = enumerate(t.k1, t.j1, lat, o.sidedness, false);
    if (pu.size() + pv.size() > o.max_points) {
        std::ostringstream os;
        os << "oracle_block_norm: " << pu.size() + pv.size() << " input points exceed the cap " << o.max_points;
        throw ContractViolation(os.str());
    }
    if (pu.empty() || pv.empty() || pw.empty()) throw ContractViolation("oracle_block_norm: empty block at this density");

    std::unordered_map<long long, int> out_index;
    const long long stride = 1LL << 32;
    for (std::size_t i = 0; i < pw.size(); ++i) out_index[pw[i].n * stride + pw[i].m] = static_cast<int>(i);

    Tensor T;
    T.nu = pu.size();
    T.nv = pv.size();
    T.nw = pw.size();
    for (std::size_t a = 0; a < T.nu; ++a)
        for (std::size_t b = 0; b < T.nv; ++b) {
            const long m = pu[a].m + pv[b].m + resonance_shift(pu[a].n + pv[b].n, pv[b].n, lat);
            if (auto it = out_index.find((pu[a].n + pv[b].n) * stride + m); it != out_index.end()) {
                T.a.push_back(static_cast<int>(a));
                T.b.push_back(static_cast<int>(b));
                T.o.push_back(it->second);
            }
        }
    if (T.o.empty()) return 0.0;

    struct Candidate {
        double value;
        Vec u, v;
    };
    std::vector<Candidate> pool;
    const Vec flat_u(T.nu, cplx{1.0 / std::sqrt(static_cast<double>(T.nu)), 0.0});
    const std::size_t step = (T.nv + kScreenStarts - 1) / kScreenStarts;
    for (std::size_t q = 0; q < T.nv; q += step) {
        Vec u = flat_u, v(T.nv);
        v[q] = 1.0;
        const double val = ascend(T, u, v, 2);
        pool.push_back({val, std::move(u), std::move(v)});
    }
    std::mt19937_64 rng(derive_seed(o.seed, {t.k1, t.j1, t.k2, t.j2, t.k3, t.j3, -1}));
    std::normal_distribution<double> g;
    for (int r = 0; r < o.random_starts; ++r) {
        Vec u(T.nu), v(T.nv);
        for (auto& z : u) z = {g(rng), g(rng)};
        for (auto& z : v) z = {g(rng), g(rng)};
        unit(u);
        unit(v);
        const double val = ascend(T, u, v, 12);
        pool.push_back({val, std::move(u), std::move(v)});
    }
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    pool.resize(std::min<std::size_t>(pool.size(), 8));

    for (auto& c : pool) c.value = ascend(T, c.u, c.v, 300);
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    pool.front().value = ascend(T, pool.front().u, pool.front().v, 3000);

    // Dense polish of the leader: exact top singular pair on the smaller input side, then ascent.
    double best = pool.front().value;
    {
        auto& c = pool.front();
        const bool fix_v = T.nu <= T.nv;
        for (int it = 0; it < 2; ++it) {
            const double s = top_singular(T, fix_v ? c.v : c.u, fix_v, fix_v ? c.u : c.v);
            const double next = std::max(s, ascend(T, c.u, c.v, 50));
            const bool done = next - best <= 1e-13 * next;
            best = std::max(best, next);
            if (done) break;
        }
    }
    return best * std::sqrt(lat.cell());
}

}  // namespace qslab
