#include "valprod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>

#include "valprod/errors.hpp"

namespace valprod::quad
{
namespace
{
// Kronrod abscissae and weights (QUADPACK qk15), symmetric about 0.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
// Gauss weights at xgk[1], xgk[3], xgk[5], xgk[7].
constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Piece
{
    double a;
    double b;
    Values value;
    double error;
    //! max over components of ∫|f| on the piece
    double abs_value;
    bool operator<(Piece const& other) const { return error < other.error; }
};

Piece gk15(VecIntegrand const& f, int n, double a, double b)
{
    double const center = 0.5 * (a + b);
    double const half = 0.5 * (b - a);
    Values fc = f(center);
    Values kron{}, gauss{}, resabs{};
    for (int c = 0; c < n; ++c)
    {
        kron[c] = fc[c] * wgk[7];
        gauss[c] = fc[c] * wg[3];
        resabs[c] = std::abs(kron[c]);
    }
    Values fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j)
    {
        double const dx = half * xgk[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        for (int c = 0; c < n; ++c)
        {
            double const s = fv1[j][c] + fv2[j][c];
            kron[c] += wgk[j] * s;
            resabs[c] += wgk[j] * (std::abs(fv1[j][c]) + std::abs(fv2[j][c]));
            if (j % 2 == 1)
                gauss[c] += wg[j / 2] * s;
        }
    }
    Piece p{a, b, {}, 0.0, 0.0};
    double const eps = std::numeric_limits<double>::epsilon();
    for (int c = 0; c < n; ++c)
    {
        double const mean = kron[c] * 0.5;
        double resasc = wgk[7] * std::abs(fc[c] - mean);
        for (int j = 0; j < 7; ++j)
            resasc += wgk[j]
                      * (std::abs(fv1[j][c] - mean) + std::abs(fv2[j][c] - mean));
        resasc *= std::abs(half);
        double err = std::abs((kron[c] - gauss[c]) * half);
        if (resasc != 0 && err != 0)
            err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
        double const ra = resabs[c] * std::abs(half);
        if (ra > std::numeric_limits<double>::min() / (50 * eps))
            err = std::max(err, 50 * eps * ra);
        p.abs_value = std::max(p.abs_value, ra);
        p.value[c] = kron[c] * half;
        p.error = std::max(p.error, err);
    }
    return p;
}

}  // namespace

void Counter::charge(std::size_t n)
{
    evaluations += n;
    if (budget != 0 && evaluations > budget)
    {
        throw QuadratureBudgetExceeded("quadrature exceeded budget of "
                                       + std::to_string(budget)
                                       + " evaluations");
    }
}

Values integrate(VecIntegrand const& f, int n, double a, double b,
                 Options const& opts, Counter* counter)
{
    Counter local{0, opts.budget};
    Counter& cnt = counter ? *counter : local;
    if (cnt.budget == 0)
        cnt.budget = opts.budget;

    Values total{};
    if (a == b)
        return total;

    std::priority_queue<Piece> heap;
    cnt.charge(15);
    Piece first = gk15(f, n, a, b);
    Values sum = first.value;
    double err = first.error;
    double abs_sum = first.abs_value;
    heap.push(first);
    double const min_width = std::abs(b - a) * 1e-12;
    double frozen_err = 0;

    while (!heap.empty())
    {
        double scale = 0;
        for (int c = 0; c < n; ++c)
            scale = std::max(scale, std::abs(sum[c]));
        // Tolerance is relative to ∫|f|, so cancellation to near zero does
        // not demand accuracy below the integrand's own noise.
        scale = std::max(scale, abs_sum);
        if (err + frozen_err <= std::max(opts.abs_tol, opts.rel_tol * scale))
            break;

        Piece worst = heap.top();
        heap.pop();
        if (std::abs(worst.b - worst.a) < min_width)
        {
            // Cannot refine further; keep its contribution as is.
            err -= worst.error;
            frozen_err += worst.error;
            continue;
        }
        double const mid = 0.5 * (worst.a + worst.b);
        cnt.charge(30);
        Piece left = gk15(f, n, worst.a, mid);
        Piece right = gk15(f, n, mid, worst.b);
        for (int c = 0; c < n; ++c)
            sum[c] += left.value[c] + right.value[c] - worst.value[c];
        err += left.error + right.error - worst.error;
        abs_sum += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }
    total = sum;
    return total;
}

double integrate(ScalarIntegrand const& f, double a, double b,
                 Options const& opts, Counter* counter)
{
    auto wrapped = [&f](double x) {
        Values v{};
        v[0] = f(x);
        return v;
    };
    return integrate(wrapped, 1, a, b, opts, counter)[0];
}

Values integrate_rect(VecIntegrand2 const& f, int n, double a0, double a1,
                      double b0, double b1, Options const& opts,
                      Counter* counter)
{
    Counter local{0, opts.budget};
    Counter& cnt = counter ? *counter : local;
    if (cnt.budget == 0)
        cnt.budget = opts.budget;
    Options inner = opts;
    inner.abs_tol = opts.abs_tol / std::max(1.0, std::abs(a1 - a0));
    auto outer = [&](double u) {
        return integrate([&](double v) { return f(u, v); }, n, b0, b1, inner,
                         &cnt);
    };
    return integrate(outer, n, a0, a1, opts, &cnt);
}

Rule const& gauss_legendre(int n)
{
    static std::mutex mtx;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;

    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1, p1 = 0;
            for (int k = 1; k <= n; ++k)
            {
                double const p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (x * p0 - p1) / (x * x - 1);
            double const dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double const w = 2 / ((1 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace valprod::quad
