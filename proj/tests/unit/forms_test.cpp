#include <cmath>
#include <numbers>

#include "doctest.h"
#include "valprod/errors.hpp"
#include "valprod/forms.hpp"

using namespace valprod;

namespace
{
ChartPtr r3()
{
    static ChartPtr const c
        = std::make_shared<Chart const>("R3", std::vector<std::string>{"x", "y", "z"});
    return c;
}

ChartPtr half_plane()
{
    static ChartPtr const c = std::make_shared<Chart const>(
        "H", std::vector<std::string>{"x", "y"}, [](Coords const& p) { return p[1] > 0; });
    return c;
}

DifferentialForm smooth_one_form()
{
    return DifferentialForm(r3(), 1, [](Coords const& p) {
        Coefficients c{};
        c[0] = std::sin(p[1]) * p[2];
        c[1] = p[0] * p[0] + std::cos(p[2]);
        c[2] = std::exp(0.3 * p[0]) * p[1];
        return c;
    });
}
}  // namespace

TEST_CASE("multi-index bookkeeping")
{
    CHECK(component_count(3, 0) == 1);
    CHECK(component_count(3, 1) == 3);
    CHECK(component_count(3, 2) == 3);
    CHECK(component_count(5, 2) == 10);
    CHECK(component_count(5, 3) == 10);
    for (int k = 0; k < component_count(5, 2); ++k)
        CHECK(component_index(5, component_mask(5, 2, k)) == k);
    // dx∧dz comes after dx∧dy in lexicographic order.
    CHECK(component_mask(3, 2, 1) == 0b101u);
}

TEST_CASE("wedge is graded commutative")
{
    DifferentialForm const a = smooth_one_form();
    DifferentialForm const b = DifferentialForm::differential(r3(), 2);
    Coords const p{0.3, -0.2, 0.7};
    Coefficients const ab = wedge(a, b).coefficients(p);
    Coefficients const ba = wedge(b, a).coefficients(p);
    for (int k = 0; k < 3; ++k)
        CHECK(ab[k] == doctest::Approx(-ba[k]));
    CHECK(wedge(a, a).coefficients(p)[0] == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("alternating evaluation on vectors")
{
    DifferentialForm const dxdy
        = wedge(DifferentialForm::differential(r3(), 0), DifferentialForm::differential(r3(), 1));
    std::array<Vector, 2> const v{Vector{1, 2, 0}, Vector{3, 4, 5}};
    CHECK(dxdy(Coords{}, v) == doctest::Approx(1 * 4 - 2 * 3));
}

TEST_CASE("exterior derivative squares to zero and matches closed forms")
{
    DifferentialForm const a = smooth_one_form();
    Coords const p{0.4, 0.1, -0.3};
    Coefficients const dda = exterior_derivative(exterior_derivative(a)).coefficients(p);
    CHECK(std::abs(dda[0]) < 1e-6);

    // d(x² dy) = 2x dx∧dy.
    DifferentialForm const f(r3(), 1, [](Coords const& q) {
        Coefficients c{};
        c[1] = q[0] * q[0];
        return c;
    });
    Coefficients const df = exterior_derivative(f).coefficients(p);
    CHECK(df[0] == doctest::Approx(2 * p[0]).epsilon(1e-9));
    CHECK(std::abs(df[1]) < 1e-9);
    CHECK(std::abs(df[2]) < 1e-9);
}

TEST_CASE("pullback by a linear map")
{
    // f(x, y, z) = (2x, y + z, z); f^* dy = dy + dz.
    SmoothMap const f(r3(), r3(), [](Coords const& p) { return Coords{2 * p[0], p[1] + p[2], p[2]}; });
    Coefficients const c = pullback(f, DifferentialForm::differential(r3(), 1)).coefficients(Coords{});
    CHECK(c[0] == doctest::Approx(0).epsilon(1e-9));
    CHECK(c[1] == doctest::Approx(1));
    CHECK(c[2] == doctest::Approx(1));
    CHECK(f.numeric_jacobian(Coords{})[0][0] == doctest::Approx(2));
}

TEST_CASE("charts reject points outside the domain")
{
    DifferentialForm const a = DifferentialForm::differential(half_plane(), 0);
    CHECK_NOTHROW(a.coefficients(Coords{0, 1}));
    CHECK_THROWS_AS(a.coefficients(Coords{0, -1}), DomainError);
    CHECK_THROWS_AS(wedge(a, DifferentialForm::differential(r3(), 0)), ChartMismatch);
}

TEST_CASE("adaptive and fixed quadrature")
{
    quad::Options opts;
    CHECK(quad::integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi, opts)
          == doctest::Approx(2).epsilon(1e-12));
    CHECK(quad::integrate([](double x) { return std::sqrt(x); }, 0, 1, opts)
          == doctest::Approx(2.0 / 3).epsilon(1e-8));

    quad::Rule const& r = quad::gauss_legendre(12);
    double wsum = 0, x8 = 0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k)
    {
        wsum += r.weights[k];
        x8 += r.weights[k] * std::pow(r.nodes[k], 8);
    }
    CHECK(wsum == doctest::Approx(2).epsilon(1e-14));
    CHECK(x8 == doctest::Approx(2.0 / 9).epsilon(1e-14));

    quad::Options tiny;
    tiny.budget = 10;
    CHECK_THROWS_AS(quad::integrate([](double x) { return std::abs(std::sin(50 * x)); }, 0, 3, tiny),
                    QuadratureBudgetExceeded);
}
