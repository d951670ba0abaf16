#include <cmath>
#include <numbers>

#include "doctest.h"
#include "valprod/errors.hpp"
#include "valprod/product.hpp"

using namespace valprod;
using namespace valprod::product;

namespace
{
constexpr double pi = std::numbers::pi;

StructureConstants flat_constants()
{
    StructureConstants s;
    for (int i = 0; i < kBasisSize; ++i)
    {
        s.c[0][i][i] = 1;
        s.c[i][0][i] = 1;
    }
    s.c[1][1][2] = pi / 2;
    return s;
}
}  // namespace

TEST_CASE("blow-up coordinate")
{
    for (double psi : {0.1, 0.5, 0.9})
    {
        double const t = solve_t(0, 1, psi);
        CHECK(t >= 0);
        CHECK(t <= 1);
        Vec2 const v = (1 - t) * Vec2(1, 0) + t * Vec2(std::cos(1.0), std::sin(1.0));
        CHECK(std::atan2(v.y(), v.x()) == doctest::Approx(psi));
    }
    Coords const p{0.1, 0.2, 0.3, 1.2, 0.4};
    CHECK(blowup_phi()(p)[3] == doctest::Approx(1.2));
    CHECK(q2()(p)[2] == doctest::Approx(1.2));
}

TEST_CASE("chi is the unit of the product on sample bodies")
{
    ValuationRep const prod = product_rep(chi_rep(), v1_rep());
    PlanarBody const d = PlanarBody::disk(Vec2(0.2, 0.1), 0.8);
    CHECK(evaluate(prod, d) == doctest::Approx(pi * 0.8).epsilon(1e-6));
    PlanarBody const tri = PlanarBody::polygon({{0, 0}, {1.5, 0.2}, {0.4, 1.1}});
    CHECK(evaluate(product_rep(v1_rep(), chi_rep()), tri) == doctest::Approx(tri.perimeter() / 2).epsilon(1e-6));
}

TEST_CASE("area is nilpotent against everything of positive degree")
{
    PlanarBody const d = PlanarBody::disk(Vec2(0, 0), 1.1);
    CHECK(std::abs(evaluate(product_rep(area_rep(), area_rep()), d)) < 1e-10);
    CHECK(std::abs(evaluate(product_rep(v1_rep(), area_rep()), d)) < 1e-6);
}

TEST_CASE("projection onto the basis")
{
    std::vector<PlanarBody> const bodies{PlanarBody::disk(Vec2(0, 0), 0.5), PlanarBody::disk(Vec2(0, 0), 1),
                                         PlanarBody::rectangle(0, 0, 1, 2), PlanarBody::disk(Vec2(0, 0), 2)};
    std::vector<BasisVector> basis;
    std::vector<double> values;
    for (auto const& b : bodies)
    {
        basis.push_back(plane_basis_closed_form(b));
        values.push_back(2 - basis.back()[1] + 0.5 * basis.back()[2]);
    }
    Projection const p = project_onto_basis(values, basis);
    CHECK(p.coords[0] == doctest::Approx(2));
    CHECK(p.coords[1] == doctest::Approx(-1));
    CHECK(p.coords[2] == doctest::Approx(0.5));
    CHECK(p.residual < 1e-12);

    std::vector<BasisVector> const same(3, BasisVector{1, 1, 1});
    std::vector<double> const v(3, 1.0);
    CHECK_THROWS_AS(project_onto_basis(v, same), OracleConditioning);
}

TEST_CASE("template oracle kernels")
{
    PlanarBody const d = PlanarBody::disk(Vec2(0, 0), 1);
    TemplateOptions opts;
    opts.points = 20'000;
    NodeMoments const a = node_moments(d, 1.0, opts);
    NodeMoments const b = node_moments_serial(d, 1.0, opts);
    CHECK(a.area_integral == b.area_integral);
    CHECK(a.perimeter_integral == b.perimeter_integral);
    CHECK(a.var_area == b.var_area);
    CHECK(a.parallel_area == doctest::Approx(pi * 4));

    CHECK(diagonal_member(d, Vec2(1.2, 0), 1, Vec2(-0.5, 0), 1));
    CHECK_FALSE(diagonal_member(d, Vec2(3, 0), 1, Vec2(-1.5, 0), 1));

    TemplateTable const t = template_table(d, opts);
    VolumeEstimate const v = template_value(t, 0, 2);
    CHECK(std::abs(v.value - pi) < 5 * v.error + 1e-9);
}

TEST_CASE("graded structure constants")
{
    StructureConstants s = flat_constants();
    s.c[1][2][0] = 1e-7;
    s.c[2][1][2] = 3e-7;
    StructureConstants const g = s.graded();
    CHECK(g.c[1][2][0] == 0);
    CHECK(g.c[2][1][2] == 0);
    CHECK(g.c[1][1][2] == doctest::Approx(pi / 2));
    BasisVector const x = g.multiply({0, 1, 0}, {0, 1, 0});
    CHECK(x[2] == doctest::Approx(pi / 2));
}

TEST_CASE("Taylor coefficients")
{
    auto const p = series_taylor({1, 2, 3})(1.0, 2);
    CHECK(p[0] == doctest::Approx(6));
    CHECK(p[1] == doctest::Approx(8));
    CHECK(p[2] == doctest::Approx(3));
    auto const e = named_taylor("exp")(0.0, 3);
    CHECK(e[3] == doctest::Approx(1.0 / 6));
    auto const l = named_taylor("log1p")(0.0, 2);
    CHECK(l[1] == doctest::Approx(1));
    CHECK(l[2] == doctest::Approx(-0.5));
    CHECK_THROWS_AS(named_taylor("geom")(1.0, 2), DomainError);
    CHECK_THROWS_AS(named_taylor("tan"), ParseError);
}

TEST_CASE("functional calculus terminates")
{
    StructureConstants const s = flat_constants();
    InvariantValuation const mu{Space::plane, {0, 0.3, 0}};
    FunctionalResult const r = functional_calculus(named_taylor("exp"), mu, s);
    CHECK(r.terms == 3);
    CHECK(r.value.coords[0] == doctest::Approx(1));
    CHECK(r.value.coords[1] == doctest::Approx(0.3));
    CHECK(r.value.coords[2] == doctest::Approx(0.045 * pi / 2));

    // exp(μ) exp(-μ) = χ.
    InvariantValuation const m{Space::plane, {0.7, -1.2, 0.4}};
    InvariantValuation const n{Space::plane, {-0.7, 1.2, -0.4}};
    BasisVector const one = s.multiply(functional_calculus(named_taylor("exp"), m, s).value.coords,
                                       functional_calculus(named_taylor("exp"), n, s).value.coords);
    CHECK(std::abs(one[0] - 1) < 1e-12);
    CHECK(std::abs(one[1]) < 1e-12);
    CHECK(std::abs(one[2]) < 1e-12);

    InvariantValuation const sph{Space::sphere, {1, 0, 0}};
    CHECK_THROWS_AS(functional_calculus(named_taylor("exp"), sph, s), ProductUnavailable);
}
