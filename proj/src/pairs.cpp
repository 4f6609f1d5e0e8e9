#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

#include "sepbound/montecarlo.hpp"

namespace sepbound {

namespace {

constexpr int kLanes = 16;
constexpr int kPrefix = 12;
constexpr Eigen::Index kTile = 1024; // columns per tile; keeps all n coordinate rows in L2

// Points sorted by squared norm, so that for j > i the ordered pair (i, j) is the easier one to
// violate and a single per-row threshold alpha*sq_i decides the unordered filter.
struct Prepared {
    Eigen::Index n = 0, m = 0, stride = 0;
    int k = 0;
    Eigen::MatrixXd q;            // centred, sorted columns (double, exact check)
    Eigen::VectorXd sq;           // squared norms, sorted
    std::vector<float> coords;    // n rows of stride floats
    std::vector<float> aos;       // the same values, one point after another
    std::vector<float> tail;      // norm beyond the first k coordinates, rounded up
    std::vector<float> thr1, thr2; // row thresholds for the two filter levels
};

Prepared prepare(const Eigen::MatrixXd &q0, double alpha)
{
    Prepared p;
    p.n = q0.rows();
    p.m = q0.cols();
    p.k = static_cast<int>(std::min<Eigen::Index>(p.n, kPrefix));
    p.stride = (p.m + kLanes - 1) / kLanes * kLanes;

    const Eigen::VectorXd sq0 = q0.colwise().squaredNorm().transpose();
    std::vector<Eigen::Index> order(p.m);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sq0(a) < sq0(b); });
    p.q.resize(p.n, p.m);
    p.sq.resize(p.m);
    for (Eigen::Index j = 0; j < p.m; ++j) {
        p.q.col(j) = q0.col(order[j]);
        p.sq(j) = sq0(order[j]);
    }

    p.coords.assign(static_cast<std::size_t>(p.n * p.stride), 0.0f);
    p.aos.assign(static_cast<std::size_t>(p.n * p.m), 0.0f);
    p.tail.assign(p.stride, 0.0f);
    p.thr1.resize(p.m);
    p.thr2.resize(p.m);
    const double max_sq = p.m ? p.sq(p.m - 1) : 0.0;
    // float rounding of the products and sums stays below these margins
    const double m1 = (p.k + 8) * std::ldexp(1.0, -22) * max_sq;
    const double m2 = (p.n + 8) * std::ldexp(1.0, -22) * max_sq;
    for (Eigen::Index j = 0; j < p.m; ++j) {
        for (Eigen::Index d = 0; d < p.n; ++d)
            p.aos[j * p.n + d] = p.coords[d * p.stride + j] = static_cast<float>(p.q(d, j));
        p.tail[j] = static_cast<float>(p.q.col(j).tail(p.n - p.k).norm() * (1.0 + 1e-5));
        p.thr1[j] = static_cast<float>(alpha * p.sq(j) * (1.0 - 1e-6) - m1);
        p.thr2[j] = static_cast<float>(alpha * p.sq(j) * (1.0 - 1e-6) - m2);
    }
    return p;
}

struct Counter {
    const Prepared &p;
    double alpha;
    std::uint64_t count = 0;

    void exact(Eigen::Index i, Eigen::Index j)
    {
        const double dot = p.q.col(i).dot(p.q.col(j));
        count += (alpha * p.sq(i) <= dot) + (alpha * p.sq(j) <= dot);
    }

    bool level2_scalar(Eigen::Index i, Eigen::Index j) const
    {
        float s = 0.0f;
        for (Eigen::Index d = 0; d < p.n; ++d)
            s += p.coords[d * p.stride + i] * p.coords[d * p.stride + j];
        return s >= p.thr2[i];
    }

    void scalar_row(Eigen::Index i, Eigen::Index j0, Eigen::Index j1)
    {
        for (Eigen::Index j = j0; j < j1; ++j) {
            float s = p.tail[i] * p.tail[j];
            for (int d = 0; d < p.k; ++d) s += p.coords[d * p.stride + i] * p.coords[d * p.stride + j];
            if (s >= p.thr1[i] && level2_scalar(i, j)) exact(i, j);
        }
    }

#if defined(__AVX512F__)
    static __mmask16 lane_mask(Eigen::Index jb, Eigen::Index start, Eigen::Index m)
    {
        unsigned mask = 0xFFFFu;
        if (start > jb) mask = start - jb >= kLanes ? 0u : mask << (start - jb);
        if (jb + kLanes > m) mask &= (1u << (m - jb)) - 1u;
        return static_cast<__mmask16>(mask);
    }

    // R rows i0..i0+R-1 against all later columns; the R rows share every column load
    template <int K, int R>
    void simd_rows(Eigen::Index i0, Eigen::Index jlo, Eigen::Index m)
    {
        const Eigen::Index stride = p.stride;
        const float *c = p.coords.data();
        __m512 xi[R][K], ti[R], th1[R];
        for (int r = 0; r < R; ++r) {
            for (int d = 0; d < K; ++d) xi[r][d] = _mm512_set1_ps(p.aos[(i0 + r) * p.n + d]);
            ti[r] = _mm512_set1_ps(p.tail[i0 + r]);
            th1[r] = _mm512_set1_ps(p.thr1[i0 + r]);
        }
        // hits are queued and rechecked after the sweep so the hot loop makes no calls
        struct Hit {
            Eigen::Index row, jb;
            __mmask16 mask;
        };
        Hit queue[kTile / kLanes * R];
        int queued = 0;
        const Eigen::Index first = std::max(jlo, (i0 + 1) / kLanes * kLanes);
        for (Eigen::Index jb = first; jb < m; jb += kLanes) {
            __m512 y[K];
            for (int d = 0; d < K; ++d) y[d] = _mm512_loadu_ps(c + d * stride + jb);
            const __m512 ty = _mm512_loadu_ps(p.tail.data() + jb);
            const bool edge = jb < i0 + R + 1 || jb + kLanes > m;
            for (int r = 0; r < R; ++r) {
                // two accumulators keep the FMA chains short
                __m512 a = _mm512_mul_ps(ti[r], ty), b = _mm512_mul_ps(xi[r][0], y[0]);
                for (int d = 1; d < K; d += 2) {
                    a = _mm512_fmadd_ps(xi[r][d], y[d], a);
                    if (d + 1 < K) b = _mm512_fmadd_ps(xi[r][d + 1], y[d + 1], b);
                }
                const __mmask16 valid = edge ? lane_mask(jb, i0 + r + 1, m) : static_cast<__mmask16>(0xFFFF);
                const __mmask16 hit = _mm512_mask_cmp_ps_mask(valid, _mm512_add_ps(a, b), th1[r], _CMP_GE_OQ);
                if (hit) queue[queued++] = Hit{i0 + r, jb, hit};
            }
        }
        for (int h = 0; h < queued; ++h) level2(queue[h].row, queue[h].jb, queue[h].mask);
    }

    void level2(Eigen::Index i, Eigen::Index jb, __mmask16 hit)
    {
        const float *c = p.coords.data();
        const float *x = p.aos.data() + i * p.n;
        __m512 f = _mm512_setzero_ps(), g = _mm512_setzero_ps();
        Eigen::Index d = 0;
        for (; d + 1 < p.n; d += 2) {
            f = _mm512_fmadd_ps(_mm512_set1_ps(x[d]), _mm512_loadu_ps(c + d * p.stride + jb), f);
            g = _mm512_fmadd_ps(_mm512_set1_ps(x[d + 1]), _mm512_loadu_ps(c + (d + 1) * p.stride + jb), g);
        }
        if (d < p.n)
            f = _mm512_fmadd_ps(_mm512_set1_ps(x[d]), _mm512_loadu_ps(c + d * p.stride + jb), f);
        hit = _mm512_mask_cmp_ps_mask(hit, _mm512_add_ps(f, g), _mm512_set1_ps(p.thr2[i]), _CMP_GE_OQ);
        while (hit) {
            const int l = __builtin_ctz(hit);
            hit &= static_cast<__mmask16>(hit - 1);
            exact(i, jb + l);
        }
    }

    template <int K>
    void simd_all()
    {
        constexpr int R = 4;
        for (Eigen::Index jt = 0; jt < p.m; jt += kTile) {
            const Eigen::Index jend = std::min(p.m, jt + kTile);
            Eigen::Index i = 0;
            for (; i + R < jend; i += R) simd_rows<K, R>(i, jt, jend);
            for (; i + 1 < jend; ++i) simd_rows<K, 1>(i, jt, jend);
        }
    }
#endif

    void run()
    {
#if defined(__AVX512F__)
        switch (p.k) {
        case 1: simd_all<1>(); return;
        case 2: simd_all<2>(); return;
        case 3: simd_all<3>(); return;
        case 4: simd_all<4>(); return;
        case 5: simd_all<5>(); return;
        case 6: simd_all<6>(); return;
        case 7: simd_all<7>(); return;
        case 8: simd_all<8>(); return;
        case 9: simd_all<9>(); return;
        case 10: simd_all<10>(); return;
        case 11: simd_all<11>(); return;
        default: simd_all<kPrefix>(); return;
        }
#else
        for (Eigen::Index i = 0; i + 1 < p.m; ++i) scalar_row(i, i + 1, p.m);
#endif
    }
};


} // namespace

std::uint64_t count_inseparable_pairs(const Eigen::MatrixXd &points, double alpha, const Eigen::VectorXd &c)
{
    if (points.cols() < 2)
        throw std::invalid_argument("count_inseparable_pairs: need at least two points");
    if (c.size() != 0 && c.size() != points.rows())
        throw std::invalid_argument("count_inseparable_pairs: center dimension mismatch");
    const Eigen::MatrixXd q = c.size() ? Eigen::MatrixXd(points.colwise() - c) : points;
    const Prepared p = prepare(q, alpha);
    Counter counter{p, alpha};
    counter.run();
    return counter.count;
}

std::uint64_t count_perturbed_inseparable_pairs(const Eigen::MatrixXd &points, const Eigen::MatrixXd &bases,
                                                double alpha)
{
    if (points.rows() != bases.rows() || points.cols() != bases.cols())
        throw std::invalid_argument("count_perturbed_inseparable_pairs: shape mismatch");
    std::uint64_t count = 0;
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const Eigen::VectorXd d = points.col(i) - bases.col(i);
        const double lhs = alpha * d.squaredNorm();
        for (Eigen::Index j = 0; j < points.cols(); ++j)
            if (j != i && lhs <= d.dot(points.col(j) - bases.col(i))) ++count;
    }
    return count;
}

} // namespace sepbound
