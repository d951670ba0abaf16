#include "valprod/product.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "valprod/contact.hpp"
#include "valprod/errors.hpp"

namespace valprod::product
{
namespace
{
constexpr double pi = std::numbers::pi;

Jacobian projection_jacobian(std::initializer_list<std::pair<int, int>> entries)
{
    Jacobian j{};
    for (auto [target, source] : entries)
        j[target][source] = 1;
    return j;
}

}  // namespace

ChartPtr fiber_product_chart()
{
    static ChartPtr const chart = std::make_shared<Chart const>(
        "S(R2)xS(R2)", std::vector<std::string>{"x", "y", "theta1", "theta2"});
    return chart;
}

ChartPtr blowup_chart()
{
    static ChartPtr const chart = std::make_shared<Chart const>(
        "blowup", std::vector<std::string>{"x", "y", "theta1", "theta2", "t"},
        [](Coords const& p) { return p[4] >= 0 && p[4] <= 1; });
    return chart;
}

SmoothMap q1()
{
    return SmoothMap(
        fiber_product_chart(), contact::cosphere_chart(),
        [](Coords const& p) { return Coords{p[0], p[1], p[2], 0, 0}; },
        [](Coords const&) { return projection_jacobian({{0, 0}, {1, 1}, {2, 2}}); });
}

SmoothMap q2()
{
    return SmoothMap(
        fiber_product_chart(), contact::cosphere_chart(),
        [](Coords const& p) { return Coords{p[0], p[1], p[3], 0, 0}; },
        [](Coords const&) { return projection_jacobian({{0, 0}, {1, 1}, {2, 3}}); });
}

SmoothMap blowup_phi()
{
    return SmoothMap(
        blowup_chart(), fiber_product_chart(),
        [](Coords const& p) { return Coords{p[0], p[1], p[2], p[3], 0}; },
        [](Coords const&) {
            return projection_jacobian({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
        });
}

SmoothMap blowup_p()
{
    return SmoothMap(blowup_chart(), contact::cosphere_chart(), [](Coords const& p) {
        double const t = p[4];
        double const wx = (1 - t) * std::cos(p[2]) + t * std::cos(p[3]);
        double const wy = (1 - t) * std::sin(p[2]) + t * std::sin(p[3]);
        return Coords{p[0], p[1], std::atan2(wy, wx), 0, 0};
    });
}

double solve_t(double theta1, double theta2, double psi)
{
    // (1-t) sin(θ₁-ψ) + t sin(θ₂-ψ) = 0
    double const sa = std::sin(theta1 - psi);
    double const sb = std::sin(theta2 - psi);
    double const denom = sa - sb;
    if (std::abs(denom) < 1e-300)
        return 0.5;
    return std::clamp(sa / denom, 0.0, 1.0);
}

FiberBundle blowup_fibration(quad::Options const& opts)
{
    FiberBundle bundle;
    bundle.total = blowup_chart();
    bundle.base = contact::cosphere_chart();
    bundle.fiber_dim = 2;
    bundle.cells = 2;
    bundle.quadrature = opts;
    bundle.fixed_nodes = kBlowupNodes;
    bundle.frame = [](Coords const& base, int cell, std::array<double, 2> const& u) {
        // Cell 0: a = -π u₁(1-u₂), b = π u₁u₂; cell 1 is its mirror image.
        // Both maps have Jacobian determinant -π²u₁ in (a, b); the cells
        // carry opposite orientations, and kOrientation fixes the global sign.
        double const side = cell == 0 ? 1.0 : -1.0;
        double const a = -side * pi * u[0] * (1 - u[1]);
        double const b = side * pi * u[0] * u[1];
        double const psi = base[2];
        double const th1 = psi + a;
        double const th2 = psi + b;
        double const sa = std::sin(a), sb = std::sin(b);
        double const denom = sa - sb;
        double const t = std::abs(denom) < 1e-300 ? 0.5 : std::clamp(sa / denom, 0.0, 1.0);
        double dt_da = 0, dt_db = 0;
        if (std::abs(denom) > 1e-150)
        {
            dt_da = -std::cos(a) * sb / (denom * denom);
            dt_db = sa * std::cos(b) / (denom * denom);
        }

        FiberFrame f;
        f.point = {base[0], base[1], th1, th2, t};
        f.base_lifts[0] = {1, 0, 0, 0, 0};
        f.base_lifts[1] = {0, 1, 0, 0, 0};
        // ∂ψ lifts to a pure t-direction; dψ/dt = <w × (u₂ - u₁)>/|w|².
        double const wx = (1 - t) * std::cos(th1) + t * std::cos(th2);
        double const wy = (1 - t) * std::sin(th1) + t * std::sin(th2);
        double const dx = std::cos(th2) - std::cos(th1);
        double const dy = std::sin(th2) - std::sin(th1);
        double const dpsi_dt = (wx * dy - wy * dx) / (wx * wx + wy * wy);
        f.base_lifts[2] = {0, 0, 0, 0, dpsi_dt != 0 ? 1 / dpsi_dt : 0.0};

        double const da1 = -side * pi * (1 - u[1]), db1 = side * pi * u[1];
        double const da2 = side * pi * u[0], db2 = side * pi * u[0];
        double const cell_sign = -kOrientation * side;
        f.fiber[0] = {0, 0, cell_sign * da1, cell_sign * db1,
                      cell_sign * (dt_da * da1 + dt_db * db1)};
        f.fiber[1] = {0, 0, da2, db2, dt_da * da2 + dt_db * db2};
        return f;
    };
    return bundle;
}

DifferentialForm gelfand_transform(DifferentialForm const& a, quad::Options const& opts)
{
    if (a.chart()->id() != fiber_product_chart()->id())
        throw ChartMismatch("gelfand_transform expects a form on the fiber product");
    if (a.degree() < 2)
        throw DegreeError("gelfand_transform needs degree at least 2");
    return fiber_integrate(blowup_fibration(opts), pullback(blowup_phi(), a));
}

ValuationRep product_rep(ValuationRep const& v1, ValuationRep const& v2,
                             ProductOptions const& opts)
{
    DifferentialForm const d2 = contact::rumin_D(v2.omega, opts.h);
    DifferentialForm const push2 = contact::push_forward(v2.omega, opts.quad);

    DifferentialForm const gt
        = gelfand_transform(wedge(pullback(q1(), v1.omega), pullback(q2(), d2)), opts.quad);
    DifferentialForm const omega = gt + wedge(v1.omega, contact::pull_up(push2));

    DifferentialForm const inner
        = wedge(v1.omega, pullback(contact::involution(), d2 + contact::pull_up(v2.phi)));
    DifferentialForm const phi
        = contact::push_forward(inner, opts.quad) + wedge(v1.phi, push2);
    return {omega, phi, "(" + v1.label + ")*(" + v2.label + ")"};
}

//---------------------------------------------------------------------------//
BasisVector StructureConstants::multiply(BasisVector const& a, BasisVector const& b) const
{
    BasisVector out{};
    for (int i = 0; i < kBasisSize; ++i)
        for (int j = 0; j < kBasisSize; ++j)
            for (int k = 0; k < kBasisSize; ++k)
                out[k] += a[i] * b[j] * c[i][j][k];
    return out;
}

StructureConstants StructureConstants::graded() const
{
    StructureConstants out = *this;
    for (int i = 0; i < kBasisSize; ++i)
    {
        for (int j = 0; j < kBasisSize; ++j)
        {
            for (int k = 0; k < kBasisSize; ++k)
            {
                double const sym = 0.5 * (c[i][j][k] + c[j][i][k]);
                bool const allowed = basis_degree(k) == basis_degree(i) + basis_degree(j);
                out.c[i][j][k] = allowed ? sym : 0.0;
                if (i == 0)
                    out.c[i][j][k] = k == j ? 1.0 : 0.0;
                if (j == 0)
                    out.c[i][j][k] = k == i ? 1.0 : 0.0;
            }
        }
    }
    return out;
}

Projection project_onto_basis(std::span<double const> values,
                              std::span<BasisVector const> basis_values,
                              double max_condition)
{
    if (values.size() != basis_values.size())
        throw DomainError("value and basis tables differ in length");
    Eigen::Index const n = static_cast<Eigen::Index>(values.size());
    Eigen::MatrixXd A(n, kBasisSize);
    Eigen::VectorXd b(n);
    for (Eigen::Index r = 0; r < n; ++r)
    {
        for (int k = 0; k < kBasisSize; ++k)
            A(r, k) = basis_values[r][k];
        b(r) = values[r];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    auto const& s = svd.singularValues();
    Projection out;
    out.condition = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1)
                                        : std::numeric_limits<double>::infinity();
    if (n < kBasisSize || !(out.condition <= max_condition))
        throw OracleConditioning("basis projection is ill-conditioned (condition "
                                 + std::to_string(out.condition) + ")");
    Eigen::VectorXd const x = svd.solve(b);
    for (int k = 0; k < kBasisSize; ++k)
        out.coords[k] = x(k);
    out.residual = std::sqrt((A * x - b).squaredNorm() / static_cast<double>(n));
    return out;
}

std::vector<PlanarBody> reference_suite()
{
    auto regular = [](Vec2 c, double r, int k, double phase) {
        std::vector<Vec2> v;
        for (int i = 0; i < k; ++i)
        {
            double const t = phase + 2 * pi * i / k;
            v.emplace_back(c.x() + r * std::cos(t), c.y() + r * std::sin(t));
        }
        return PlanarBody::polygon(std::move(v));
    };
    return {
        PlanarBody::rectangle(0, 0, 1, 1),
        PlanarBody::rectangle(-0.5, 0, 0.5, 2),
        PlanarBody::polygon({{0, 0}, {1.5, 0.2}, {0.4, 1.1}}),
        PlanarBody::disk({0, 0}, 0.5),
        PlanarBody::disk({0.2, -0.1}, 1.0),
        PlanarBody::disk({-1, 0.5}, 1.7),
        regular({0.3, 0.3}, 0.8, 5, 0.1),
        PlanarBody::polygon({{0, 0}, {2, 0.3}, {1.6, 1.4}, {0.2, 0.9}}),
        regular({0, 0}, 1.2, 6, 0.3),
        PlanarBody::rectangle(0, 0, 3, 0.4),
    };
}

StructureConstants product_structure_constants(std::span<PlanarBody const> suite,
                                               ProductOptions const& opts)
{
    auto const basis = plane_basis();
    std::vector<BasisVector> basis_values;
    for (auto const& body : suite)
        basis_values.push_back(plane_basis_values(body, opts.quad));

    StructureConstants out;
    out.space = Space::plane;
    for (int i = 0; i < kBasisSize; ++i)
    {
        for (int j = 0; j < kBasisSize; ++j)
        {
            ValuationRep const prod = product_rep(basis[i], basis[j], opts);
            std::vector<double> values;
            for (auto const& body : suite)
                values.push_back(evaluate(prod, body, opts.quad));
            Projection const p = project_onto_basis(values, basis_values);
            out.c[i][j] = p.coords;
            out.sigma[i][j].fill(p.residual);
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
PairIdentityReport verify_product_pair(ValuationRep const& v1, ValuationRep const& v2,
                           ValuationRep const& vprod, std::span<Coords const> grid,
                           double h, double h_outer)
{
    using namespace contact;
    DifferentialForm const r1 = rumin_D(v1.omega, h) + pull_up(v1.phi);
    DifferentialForm const r2 = rumin_D(v2.omega, h) + pull_up(v2.phi);
    DifferentialForm const push1 = push_forward(v1.omega);
    DifferentialForm const push2 = push_forward(v2.omega);

    DifferentialForm const lhs = rumin_D(vprod.omega, h_outer) + pull_up(vprod.phi);
    DifferentialForm const rhs
        = gelfand_transform(wedge(pullback(q1(), r1), pullback(q2(), r2)))
          + wedge(pull_up(push1), r2) + wedge(pull_up(push2), r1);
    DifferentialForm const push = push_forward(vprod.omega);

    PairIdentityReport report;
    for (auto const& p : grid)
    {
        Coefficients const a = lhs.coefficients(p);
        Coefficients const b = rhs.coefficients(p);
        for (int i = 0; i < lhs.size(); ++i)
            report.rumin_residual = std::max(report.rumin_residual, std::abs(a[i] - b[i]));
        Coords const base{p[0], p[1], 0, 0, 0};
        double const expected
            = push1.coefficients(base)[0] * push2.coefficients(base)[0];
        report.pushforward_residual
            = std::max(report.pushforward_residual,
                       std::abs(push.coefficients(base)[0] - expected));
    }
    return report;
}

}  // namespace valprod::product
