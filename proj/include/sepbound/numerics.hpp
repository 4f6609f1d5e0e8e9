#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "sepbound/specfun.hpp"

namespace sepbound {

struct QuadratureResult {
    double value = 0.0;          // log of the integral for the log-domain variant
    double abs_error = 0.0;      // same units as value for plain; log of abs error for log-domain
    std::size_t evaluations = 0;
    bool converged = true;
};

struct OptResult {
    double argmax = 0.0;
    double max_value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_floor = 1e-300;
    int initial_panels = 1;
    int max_panels = 4000;
};

namespace detail {

struct Gk15 {
    static constexpr double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

// Kronrod/Gauss pair on [a,b] over already-evaluated samples.
// y[0..14]: nodes ordered as -x0..-x6, center, x6..x0.
inline void gk15_combine(const double *y, double half, double &k15, double &g7)
{
    const double *xg = Gk15::wgk;
    k15 = Gk15::wgk[7] * y[7];
    g7 = Gk15::wg[3] * y[7];
    for (int j = 0; j < 7; ++j) {
        const double pair = y[j] + y[14 - j];
        k15 += xg[j] * pair;
        if (j % 2 == 1)
            g7 += Gk15::wg[j / 2] * pair;
    }
    k15 *= half;
    g7 *= half;
}

inline void gk15_nodes(double a, double b, double *x)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int j = 0; j < 7; ++j) {
        x[j] = c - h * Gk15::xgk[j];
        x[14 - j] = c + h * Gk15::xgk[j];
    }
    x[7] = c;
}

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel &o) const { return err < o.err; }
};

} // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) quadrature.
template <class F>
QuadratureResult integrate_adaptive(F &&f, double a, double b, const QuadratureOptions &opt = {})
{
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("integrate_adaptive: need finite a < b");
    QuadratureResult res;
    auto eval = [&](double lo, double hi) {
        double x[15], y[15];
        detail::gk15_nodes(lo, hi, x);
        for (int j = 0; j < 15; ++j) y[j] = f(x[j]);
        res.evaluations += 15;
        double k, g;
        detail::gk15_combine(y, 0.5 * (hi - lo), k, g);
        return detail::Panel{lo, hi, k, std::fabs(k - g)};
    };

    std::priority_queue<detail::Panel> heap;
    double total = 0.0, err = 0.0;
    const int n0 = std::max(1, opt.initial_panels);
    for (int i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * i / n0;
        const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
        auto p = eval(lo, hi);
        total += p.value;
        err += p.err;
        heap.push(p);
    }
    while (err > std::max(opt.rel_tol * std::fabs(total), opt.abs_floor)) {
        if (static_cast<int>(heap.size()) >= opt.max_panels) {
            res.converged = false;
            break;
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            res.converged = false;
            heap.push(worst);
            break;
        }
        auto l = eval(worst.a, mid), r = eval(mid, worst.b);
        total += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    // recompute sums to shed accumulated cancellation
    total = 0.0;
    err = 0.0;
    for (auto h = heap; !h.empty(); h.pop()) {
        total += h.top().value;
        err += h.top().err;
    }
    res.value = total;
    res.abs_error = err;
    return res;
}

// log of the integral of exp(f_log) over [a,b]; each panel is rescaled by its own maximum.
template <class F>
QuadratureResult integrate_log_domain(F &&f_log, double a, double b,
                                      const QuadratureOptions &opt = {})
{
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("integrate_log_domain: need finite a < b");
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    QuadratureResult res;
    auto eval = [&](double lo, double hi) {
        double x[15], y[15];
        detail::gk15_nodes(lo, hi, x);
        double m = ninf;
        for (int j = 0; j < 15; ++j) {
            y[j] = f_log(x[j]);
            m = std::max(m, y[j]);
        }
        res.evaluations += 15;
        if (std::isinf(m) && m < 0)
            return detail::Panel{lo, hi, ninf, ninf};
        for (int j = 0; j < 15; ++j) y[j] = std::exp(y[j] - m);
        double k, g;
        detail::gk15_combine(y, 0.5 * (hi - lo), k, g);
        const double e = std::fabs(k - g);
        return detail::Panel{lo, hi, m + std::log(k), e > 0 ? m + std::log(e) : ninf};
    };
    auto log_sum = [&](const std::priority_queue<detail::Panel> &h, bool of_err) {
        std::vector<double> v;
        for (auto c = h; !c.empty(); c.pop()) v.push_back(of_err ? c.top().err : c.top().value);
        double m = ninf;
        for (double x : v) m = std::max(m, x);
        if (std::isinf(m)) return m;
        double s = 0.0;
        for (double x : v) s += std::exp(x - m);
        return m + std::log(s);
    };

    std::priority_queue<detail::Panel> heap;
    // running sums of exp(value - ref) and exp(err - ref)
    double ref = ninf, sv = 0.0, se = 0.0;
    auto add = [&](const detail::Panel &p, double sign) {
        const double top = std::max(p.value, p.err);
        if (top > ref) {
            if (!std::isinf(ref)) {
                const double s = std::exp(ref - top);
                sv *= s;
                se *= s;
            }
            ref = top;
        }
        if (std::isinf(ref)) return;
        sv += sign * std::exp(p.value - ref);
        se += sign * std::exp(p.err - ref);
    };
    auto push = [&](const detail::Panel &p) {
        add(p, 1.0);
        heap.push(p);
    };
    const int n0 = std::max(1, opt.initial_panels);
    for (int i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * i / n0;
        const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
        push(eval(lo, hi));
    }
    for (;;) {
        const bool empty = std::isinf(ref);
        if (empty) {
            // nothing found yet; refine a while in case the mass is narrow
            if (static_cast<int>(heap.size()) >= 256) break;
        } else if (se <= opt.rel_tol * sv) {
            break;
        }
        if (static_cast<int>(heap.size()) >= opt.max_panels) {
            res.converged = false;
            break;
        }
        auto worst = heap.top();
        heap.pop();
        if (empty) {
            // all panels empty: split the widest
            std::vector<detail::Panel> all{worst};
            while (!heap.empty()) {
                all.push_back(heap.top());
                heap.pop();
            }
            std::sort(all.begin(), all.end(),
                      [](const auto &p, const auto &q) { return (p.b - p.a) > (q.b - q.a); });
            worst = all.front();
            for (std::size_t i = 1; i < all.size(); ++i) heap.push(all[i]);
        } else {
            add(worst, -1.0);
        }
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            res.converged = false;
            push(worst);
            break;
        }
        push(eval(worst.a, mid));
        push(eval(mid, worst.b));
    }
    res.value = log_sum(heap, false);
    res.abs_error = log_sum(heap, true);
    return res;
}

// Golden-section search for the maximum of a unimodal g on [lo, hi].
template <class G>
OptResult maximize_unimodal(G &&g, double lo, double hi, double tol)
{
    if (!(lo < hi))
        throw std::invalid_argument("maximize_unimodal: invalid bracket");
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double gc = g(c), gd = g(d);
    while (b - a > tol) {
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - invphi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + invphi * (b - a);
            gd = g(d);
        }
        if (b - a <= std::numeric_limits<double>::epsilon() * (std::fabs(a) + std::fabs(b)))
            break;
    }
    OptResult r;
    r.argmax = gc >= gd ? c : d;
    r.max_value = std::max(gc, gd);
    r.lo = a;
    r.hi = b;
    const double glo = g(lo), ghi = g(hi);
    if (glo > r.max_value) {
        r = OptResult{lo, glo, lo, std::min(hi, lo + tol)};
    }
    if (ghi > r.max_value) {
        r = OptResult{hi, ghi, std::max(lo, hi - tol), hi};
    }
    return r;
}

} // namespace sepbound
