#include "valprod/contact.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <numbers>
#include <random>

#include "valprod/bodies.hpp"
#include "valprod/errors.hpp"
#include "valprod/valuations.hpp"

namespace valprod::contact
{
namespace
{
constexpr double two_pi = 2 * std::numbers::pi;
}

ChartPtr plane_chart()
{
    static ChartPtr const chart
        = std::make_shared<Chart const>("R2", std::vector<std::string>{"x", "y"});
    return chart;
}

ChartPtr cosphere_chart()
{
    static ChartPtr const chart = std::make_shared<Chart const>(
        "S(R2)", std::vector<std::string>{"x", "y", "theta"});
    return chart;
}

// Components of a 1-form on (x, y, θ): [dx, dy, dθ].
// Components of a 2-form: [dx∧dy, dx∧dθ, dy∧dθ].
DifferentialForm alpha()
{
    return DifferentialForm(cosphere_chart(), 1, [](Coords const& p) {
        Coefficients c{};
        c[0] = std::cos(p[2]);
        c[1] = std::sin(p[2]);
        return c;
    });
}

DifferentialForm beta()
{
    return DifferentialForm(cosphere_chart(), 1, [](Coords const& p) {
        Coefficients c{};
        c[0] = -std::sin(p[2]);
        c[1] = std::cos(p[2]);
        return c;
    });
}

DifferentialForm gamma()
{
    return DifferentialForm::differential(cosphere_chart(), 2);
}

DifferentialForm d_alpha()
{
    // γ∧β = dθ ∧ (-sinθ dx + cosθ dy) = sinθ dx∧dθ - cosθ dy∧dθ
    return DifferentialForm(cosphere_chart(), 2, [](Coords const& p) {
        Coefficients c{};
        c[1] = std::sin(p[2]);
        c[2] = -std::cos(p[2]);
        return c;
    });
}

DifferentialForm area_form()
{
    Coefficients c{};
    c[0] = 1;
    return DifferentialForm::constant(plane_chart(), 2, c);
}

std::pair<Vector, Vector> contact_frame(Coords const& p)
{
    Vector eb{-std::sin(p[2]), std::cos(p[2]), 0, 0, 0};
    Vector eg{0, 0, 1, 0, 0};
    return {eb, eg};
}

SmoothMap involution()
{
    auto chart = cosphere_chart();
    return SmoothMap(
        chart, chart,
        [](Coords const& p) {
            Coords q = p;
            q[2] += std::numbers::pi;
            return q;
        },
        [](Coords const&) {
            Jacobian j{};
            j[0][0] = j[1][1] = j[2][2] = 1;
            return j;
        });
}

SmoothMap projection()
{
    return SmoothMap(
        cosphere_chart(), plane_chart(),
        [](Coords const& p) { return Coords{p[0], p[1], 0, 0, 0}; },
        [](Coords const&) {
            Jacobian j{};
            j[0][0] = j[1][1] = 1;
            return j;
        });
}

FiberBundle cosphere_fibration(quad::Options const& opts)
{
    FiberBundle b;
    b.total = cosphere_chart();
    b.base = plane_chart();
    b.fiber_dim = 1;
    b.cells = 1;
    b.quadrature = opts;
    b.fixed_nodes = kCircleNodes;
    b.frame = [](Coords const& base, int, std::array<double, 2> const& u) {
        FiberFrame f;
        f.point = {base[0], base[1], two_pi * u[0], 0, 0};
        f.base_lifts[0] = {1, 0, 0, 0, 0};
        f.base_lifts[1] = {0, 1, 0, 0, 0};
        f.fiber[0] = {0, 0, two_pi, 0, 0};
        return f;
    };
    return b;
}

DifferentialForm push_forward(DifferentialForm const& a,
                              quad::Options const& opts)
{
    return fiber_integrate(cosphere_fibration(opts), a);
}

DifferentialForm pull_up(DifferentialForm const& a)
{
    return pullback(projection(), a);
}

VerticalityReport is_vertical(DifferentialForm const& a,
                              std::span<Coords const> samples,
                              std::optional<double> tol)
{
    VerticalityReport report;
    double coeff_scale = 0;
    for (auto const& p : samples)
    {
        Coefficients const c = a.coefficients(p);
        for (int i = 0; i < a.size(); ++i)
            coeff_scale = std::max(coeff_scale, std::abs(c[i]));

        auto const [eb, eg] = contact_frame(p);
        double residual = 0;
        switch (a.degree())
        {
            case 0:
                residual = std::abs(c[0]);
                break;
            case 1: {
                std::array<Vector, 1> const vb{eb}, vg{eg};
                residual = std::max(std::abs(a(p, vb)), std::abs(a(p, vg)));
                break;
            }
            case 2:
                {
                std::array<Vector, 2> const v{eb, eg};
                residual = std::abs(a(p, v));
            }
                break;
            default:
                // ker α is 2-dimensional; higher degrees vanish on it
                break;
        }
        report.max_residual = std::max(report.max_residual, residual);
    }
    report.tolerance = tol ? *tol : std::max(1e-6 * coeff_scale, 1e-300);
    report.vertical = report.max_residual <= report.tolerance;
    return report;
}

DifferentialForm rumin_Q(DifferentialForm const& a, double h)
{
    if (a.chart()->id() != cosphere_chart()->id())
        throw ChartMismatch("rumin_Q expects a form on the cosphere chart");
    if (a.degree() != 1)
        throw DegreeError("rumin_Q is implemented for 1-forms only");
    if (a.is_zero())
        return a;

    DifferentialForm const da = exterior_derivative(a, h);
    DifferentialForm const dal = d_alpha();
    DifferentialForm const al = alpha();
    return DifferentialForm(cosphere_chart(), 1, [a, da, dal, al](Coords const& p) {
        auto const [eb, eg] = contact_frame(p);
        std::array<Vector, 2> const pair{eb, eg};
        double const denom = dal(p, pair);
        if (std::abs(denom) < 1e-12)
            throw ContactDegeneracy("dα vanishes on the contact frame");
        double const f = -da(p, pair) / denom;
        Coefficients c = a.coefficients_unchecked(p);
        Coefficients const ca = al.coefficients_unchecked(p);
        for (int i = 0; i < 3; ++i)
            c[i] += f * ca[i];
        return c;
    });
}

DifferentialForm rumin_D(DifferentialForm const& a, double h)
{
    return exterior_derivative(rumin_Q(a, h), h);
}

DifferentialForm random_form(int degree, std::uint64_t seed)
{
    if (degree != 1 && degree != 2)
        throw DegreeError("random forms have degree 1 or 2");
    // 3 components x 6 monomials x 4 trigonometric factors.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::array<double, 72> c{};
    for (double& v : c)
        v = coef(rng);
    return DifferentialForm(cosphere_chart(), degree, [c](Coords const& p) {
        double const x = p[0], y = p[1], t = p[2];
        std::array<double, 6> const mono{1, x, y, x * x, x * y, y * y};
        std::array<double, 4> const trig{std::cos(t), std::sin(t), std::cos(2 * t),
                                         std::sin(2 * t)};
        Coefficients out{};
        std::size_t n = 0;
        for (int comp = 0; comp < 3; ++comp)
            for (double m : mono)
                for (double g : trig)
                    out[comp] += c[n++] * m * g;
        return out;
    });
}

std::vector<Coords> cosphere_grid(double x0, double x1, double y0, double y1,
                                  int nx, int ny, int ntheta)
{
    std::vector<Coords> pts;
    pts.reserve(static_cast<std::size_t>(nx) * ny * ntheta);
    auto lerp = [](double a, double b, int i, int n) {
        return n == 1 ? 0.5 * (a + b) : a + (b - a) * i / (n - 1);
    };
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < ntheta; ++k)
                pts.push_back({lerp(x0, x1, i, nx), lerp(y0, y1, j, ny),
                               two_pi * k / ntheta, 0, 0});
    return pts;
}

TrivialPairReport check_trivial_pair(DifferentialForm const& omega,
                                     DifferentialForm const& phi,
                                     std::span<PlanarBody const> bodies,
                                     std::span<Coords const> grid, double h)
{
    TrivialPairReport report;
    DifferentialForm const lhs = rumin_D(omega, h) + pull_up(phi);
    DifferentialForm const push = push_forward(omega);
    for (auto const& p : grid)
    {
        Coefficients const c = lhs.coefficients(p);
        for (int i = 0; i < lhs.size(); ++i)
            report.rumin_residual
                = std::max(report.rumin_residual, std::abs(c[i]));
        Coords const base{p[0], p[1], 0, 0, 0};
        report.pushforward_residual
            = std::max(report.pushforward_residual,
                       std::abs(push.coefficients(base)[0]));
    }
    ValuationRep const rep{omega, phi, "pair"};
    for (auto const& body : bodies)
        report.max_evaluation
            = std::max(report.max_evaluation, std::abs(evaluate(rep, body)));
    return report;
}

}  // namespace valprod::contact
