#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "valprod/bodies.hpp"
#include "valprod/forms.hpp"
#include "valprod/valuations.hpp"

namespace valprod::product
{
//---------------------------------------------------------------------------//
// Fiber product and blow-up charts
//---------------------------------------------------------------------------//
//! (x, y, θ₁, θ₂)
ChartPtr fiber_product_chart();
//! (x, y, θ₁, θ₂, t), t in [0, 1].
ChartPtr blowup_chart();

//! q_i(x, y, θ₁, θ₂) = (x, y, θ_i).
SmoothMap q1();
SmoothMap q2();
//! Φ̄: forget t.
SmoothMap blowup_phi();
//! p̄: (x, y, angle((1-t)u(θ₁) + t u(θ₂))).
SmoothMap blowup_p();

/*!
 * The t with angle((1-t)u(θ₁) + t u(θ₂)) = ψ, for ψ on the minor arc from
 * θ₁ to θ₂.
 */
double solve_t(double theta1, double theta2, double psi);

/*!
 * Global orientation sign of the blow-up. Fixed once by requiring
 * χ·V₁ = V₁ and never adjusted afterwards.
 */
inline constexpr double kOrientation = -1;

/*!
 * The p̄-fibration of the blow-up over the cosphere chart.
 *
 * In (a, b) = (θ₁ - ψ, θ₂ - ψ) the fiber over ψ is two triangles,
 * {a ≤ 0 ≤ b, b - a ≤ π} and {b ≤ 0 ≤ a, a - b ≤ π}, of opposite
 * orientation; each is parametrized by a collapsed square.
 */
//! Gauss-Legendre nodes per axis on each fiber triangle.
inline constexpr int kBlowupNodes = 20;

FiberBundle blowup_fibration(quad::Options const& opts = {});

//! GT = p̄_* Φ̄^*, from forms on the fiber product to forms on the cosphere.
DifferentialForm gelfand_transform(DifferentialForm const& a,
                                   quad::Options const& opts = {});

struct ProductOptions
{
    double h = kDefaultStep;
    quad::Options quad{};
};

/*!
 * Representing pair of μ₁·μ₂:
 * ω = GT(q₁^*ω₁ ∧ q₂^*Dω₂) + ω₁ ∧ π^*π_*ω₂,
 * φ = π_*(ω₁ ∧ s^*(Dω₂ + π^*φ₂)) + φ₁ ∧ π_*ω₂.
 */
ValuationRep product_rep(ValuationRep const& v1, ValuationRep const& v2,
                             ProductOptions const& opts = {});

//---------------------------------------------------------------------------//
/*!
 * Multiplication table of an invariant basis: c[i][j][k] is the k-th
 * coordinate of φ_i·φ_j.
 */
struct StructureConstants
{
    Space space = Space::plane;
    std::array<std::array<BasisVector, kBasisSize>, kBasisSize> c{};
    std::array<std::array<BasisVector, kBasisSize>, kBasisSize> sigma{};

    BasisVector multiply(BasisVector const& a, BasisVector const& b) const;
    /*!
     * Copy with the χ rows set to the identity, entries outside the degree
     * i + j slot set to zero, and symmetrized.
     */
    StructureConstants graded() const;
};

//! Degree of a basis element: χ → 0, V₁/perimeter → 1, V₂/area → 2.
constexpr int basis_degree(int index)
{
    return index;
}

struct Projection
{
    BasisVector coords{};
    //! RMS misfit of the per-body values.
    double residual = 0;
    double condition = 0;
};

/*!
 * Least-squares coordinates of per-body values over the basis values of
 * the same bodies. Throws OracleConditioning above `max_condition`.
 */
Projection project_onto_basis(std::span<double const> values,
                              std::span<BasisVector const> basis_values,
                              double max_condition = 1e6);

/*!
 * Ten convex test bodies (polygons and disks, all supported by the template
 * oracle) whose basis values are well conditioned.
 */
std::vector<PlanarBody> reference_suite();

/*!
 * Structure constants from product_rep, re-projected onto the basis
 * over the suite.
 */
StructureConstants product_structure_constants(std::span<PlanarBody const> suite,
                                               ProductOptions const& opts = {});

//---------------------------------------------------------------------------//
// Template oracle
//---------------------------------------------------------------------------//
struct TemplateOptions
{
    std::size_t points = 1'000'000;
    std::uint64_t seed = 1;
    //! Points per RNG stream, rounded down to a square jittered grid.
    std::size_t batch = 4096;
    bool parallel = true;
};

struct VolumeEstimate
{
    double value = 0;
    double error = 0;
};

//! Steiner nodes r used by the oracle.
inline constexpr std::array<double, 3> kSteinerNodes{0.0, 1.0, 2.0};

/*!
 * Monte Carlo integrals over x of area and perimeter of K ∩ D(x, r). The
 * y-section of ΔK + rB × r'B over x is (K ∩ D(x, r)) + r'B, so these give
 * vol₄ for every r' from one set of x draws.
 */
struct NodeMoments
{
    double r = 0;
    std::size_t samples = 0;
    std::size_t batches = 0;
    //! area(K + rB), by the Steiner formula.
    double parallel_area = 0;
    double area_integral = 0;
    double perimeter_integral = 0;
    //! Estimator variances and covariance.
    double var_area = 0;
    double var_perimeter = 0;
    double cov = 0;
};

//! Convex polygons and disks only. Serial and parallel kernels agree exactly.
NodeMoments node_moments(PlanarBody const& body, double r, TemplateOptions const& opts);
NodeMoments node_moments_serial(PlanarBody const& body, double r,
                                TemplateOptions const& opts);

//! vol₄(ΔK + rB × r'B) by Monte Carlo over x, for r > 0.
VolumeEstimate diagonal_volume(PlanarBody const& body, double r, double rp,
                               TemplateOptions const& opts);

//! K ∩ D(x, r) ∩ D(y, r') ≠ ∅ for convex K.
bool diagonal_member(PlanarBody const& body, Vec2 const& x, double r, Vec2 const& y,
                     double rp);

struct TemplateTable
{
    double area = 0;
    //! Moments at each nonzero node.
    std::array<NodeMoments, 3> nodes{};
    //! vol[a][b] at nodes (kSteinerNodes[a], kSteinerNodes[b]).
    std::array<std::array<VolumeEstimate, 3>, 3> vol{};
};

TemplateTable template_table(PlanarBody const& body, TemplateOptions const& opts);

//! (φ_i·φ_j)(K) from a body's volume table, with its standard error.
VolumeEstimate template_value(TemplateTable const& table, int i, int j);

//! Coordinates of φ_i·φ_j from the template oracle over the suite.
BasisVector template_product(int i, int j, std::span<PlanarBody const> suite,
                             TemplateOptions const& opts);

StructureConstants template_structure_constants(std::span<PlanarBody const> suite,
                                                TemplateOptions const& opts);

//---------------------------------------------------------------------------//
struct PairIdentityReport
{
    //! sup |Dω + π^*φ - (GT(...) + ...)| on the grid.
    double rumin_residual = 0;
    //! sup |π_*ω - π_*ω₁ π_*ω₂| on the base grid.
    double pushforward_residual = 0;
};

/*!
 * Residuals of the identities satisfied by the product pair, on a grid.
 * Derivatives of the product pair use step `h_outer`.
 */
PairIdentityReport verify_product_pair(ValuationRep const& v1, ValuationRep const& v2,
                           ValuationRep const& vprod, std::span<Coords const> grid,
                           double h = kDefaultStep, double h_outer = 1e-2);

//---------------------------------------------------------------------------//
// Functional calculus
//---------------------------------------------------------------------------//
//! Taylor coefficients f^(j)(c)/j!, j = 0..n.
using TaylorFn = std::function<std::vector<double>(double c, int n)>;

//! Taylor coefficients at c of the polynomial Σ a_k x^k.
TaylorFn series_taylor(std::vector<double> coefficients);
//! "exp", "sin", "cos", "geom" (1/(1-x)), "log1p".
TaylorFn named_taylor(std::string const& name);

struct FunctionalResult
{
    InvariantValuation value;
    //! Number of nilpotent powers summed.
    int terms = 0;
    //! |ν^k| in coordinates, k = 0..terms-1.
    std::vector<double> power_norms;
};

/*!
 * f(μ) = Σ_j f^(j)(c)/j! ν^j with μ = cχ + ν; the sum is exact because ν
 * is nilpotent in the graded algebra. Throws ProductUnavailable when the
 * table is for another space.
 */
FunctionalResult functional_calculus(TaylorFn const& f, InvariantValuation const& mu,
                                     StructureConstants const& constants);

}  // namespace valprod::product
