#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "valprod/bodies.hpp"
#include "valprod/product.hpp"
#include "valprod/spherical.hpp"
#include "valprod/valuations.hpp"

namespace valprod::kinematics
{
using Rng = std::mt19937_64;

//---------------------------------------------------------------------------//
// Group elements
//---------------------------------------------------------------------------//
struct Rotation
{
    //! Unit quaternion (w, x, y, z).
    Eigen::Vector4d q;
    sphere::Mat3 matrix;
};

struct RigidMotion
{
    Vec2 translation = Vec2::Zero();
    double angle = 0;
};

//! Haar-uniform rotation from a normalized 4-dimensional Gaussian.
Rotation sample_rotation(Rng& rng);

//! Translation uniform over the window, angle uniform in [0, 2π).
RigidMotion sample_motion(Vec2 const& lo, Vec2 const& hi, Rng& rng);

sphere::Mat3 quaternion_matrix(Eigen::Vector4d const& q);

//---------------------------------------------------------------------------//
// Monte Carlo kinematic integrals of the basis valuations
//---------------------------------------------------------------------------//
struct McOptions
{
    std::size_t samples = 100'000;
    std::uint64_t seed = 1;
    std::size_t batch = 4096;
    bool parallel = true;
    //! Fraction of rejected draws above which SamplingDegeneracy is thrown.
    double max_reject = 0.01;
};

/*!
 * Estimates of ∫ φ_k(P₁ ∩ gP₂) dg for the three basis valuations, from one
 * set of draws, with their covariance.
 */
struct BasisIntegral
{
    BasisVector mean{};
    std::array<BasisVector, kBasisSize> cov{};
    std::size_t samples = 0;
    std::size_t rejected = 0;

    BasisVector error() const;
};

//! Probability Haar measure on SO(3).
BasisIntegral sphere_basis_integral(sphere::SphericalBody const& p1,
                                    sphere::SphericalBody const& p2,
                                    McOptions const& opts);

/*!
 * Measure dx dy dθ over the window bbox(P₁) ⊕ ρ₂, where ρ₂ bounds |p| on
 * P₂; outside it P₁ ∩ gP₂ is empty. χ counts components.
 */
BasisIntegral plane_basis_integral(PlanarBody const& p1, PlanarBody const& p2,
                                   McOptions const& opts);

struct Estimate
{
    double value = 0;
    double error = 0;
    std::size_t samples = 0;
    std::size_t rejected = 0;
};

//! ∫ μ(P₁ ∩ gP₂) dg for an invariant μ of the matching space.
Estimate mc_kinematic_integral(InvariantValuation const& mu,
                               sphere::SphericalBody const& p1,
                               sphere::SphericalBody const& p2, McOptions const& opts);
Estimate mc_kinematic_integral(InvariantValuation const& mu, PlanarBody const& p1,
                               PlanarBody const& p2, McOptions const& opts);

//! Classical closed forms used as oracles.
double cap_chi_oracle(double r1, double r2);
double plane_chi_oracle(double area1, double perimeter1, double area2, double perimeter2);

//---------------------------------------------------------------------------//
// Coefficient fitting
//---------------------------------------------------------------------------//
using Matrix3 = std::array<std::array<double, kBasisSize>, kBasisSize>;

struct KinematicCoefficients
{
    Matrix3 c{};
    Matrix3 sigma{};
    //! Condition number of the column-normalized weighted design.
    double condition = 0;
    //! RMS of the weighted fit residuals (≈ 1 when errors are honest).
    double rms_residual = 0;
};

struct PairData
{
    BasisVector phi1{};
    BasisVector phi2{};
    double value = 0;
    double error = 0;
};

/*!
 * Weighted least squares for ∫ μ(P₁ ∩ gP₂) = Σ c_ij φ_i(P₁) φ_j(P₂).
 * Throws FitConditioning above `max_condition` or with fewer than nine pairs.
 */
KinematicCoefficients fit_coefficients(std::span<PairData const> data,
                                       double max_condition = 1e6);

//---------------------------------------------------------------------------//
// Structure constants from kinematic coefficients on S²
//---------------------------------------------------------------------------//
//! Basis values on the whole sphere: (χ, perimeter, area) = (2, 0, 4π).
BasisVector sphere_whole_values();

/*!
 * g_ij = Σ_k m_ij^k φ_k(S²), with its condition number. Throws PairingSingular.
 */
struct Pairing
{
    Eigen::Matrix3d g;
    double condition = 0;
};
Pairing pairing_matrix(product::StructureConstants const& m);

/*!
 * Kinematic coefficients implied by structure constants:
 * c^a = g⁻¹ H^a g⁻¹ with H^a_kl = Σ_p m_kl^p g_ap.
 */
std::array<Matrix3, kBasisSize> predicted_coefficients(product::StructureConstants const& m);

struct DiagramSolution
{
    product::StructureConstants m;
    //! Weighted residual norm of the training fit.
    double chi2 = 0;
    int iterations = 0;
};

/*!
 * Structure constants from kinematic coefficients: a closed-form start
 * (g = (c^χ)⁻¹, m from g c^a g) refined by Levenberg-Marquardt over the
 * symmetric unknowns. c is unchanged by m → λm, so the χ rows are held at
 * the unit and the nine constants m_kl^p, 1 ≤ k ≤ l, are fitted. sigma holds
 * the linearized standard errors (zero for the held rows).
 */
DiagramSolution solve_structure_constants(std::array<KinematicCoefficients, kBasisSize> const& c);

struct DiagramReport
{
    //! z-scores of c^a_ij(held-out) - c^a_ij(m), a-major then i, j.
    std::vector<double> z;
    double rms_z = 0;
    double max_z = 0;
    //! max_i,a |Σ_j c^a_ij φ_j(S²) - δ_ia| in units of its error.
    double marginal_z = 0;
};

struct Perturbation
{
    int k = 0;
    int l = 0;
    int p = 0;
    double rms_z = 0;
    double max_z = 0;
};

/*!
 * Residuals after scaling each constant m_kl^p (k ≤ l) by 1 + fraction, one
 * at a time. Only held constants (the unit rows) and significant ones
 * (|m| > 10σ) are scanned; the others are zero within error.
 */
std::vector<Perturbation> perturbation_scan(std::array<KinematicCoefficients, kBasisSize> const& held_out,
                                            std::array<KinematicCoefficients, kBasisSize> const& training,
                                            product::StructureConstants const& m,
                                            double fraction = 0.1);

//---------------------------------------------------------------------------//
// Diagram experiment design
//---------------------------------------------------------------------------//
/*!
 * Caps of radii spread over [0.1, 1.4], and polygons of which two thirds are
 * needles (long thin triangles, where the perimeter-perimeter term dominates)
 * and the rest regular polygons. Only cap-cap and polygon-polygon pairs are
 * intersected.
 */
struct DiagramDesign
{
    std::vector<sphere::SphericalBody> caps;
    std::vector<sphere::SphericalBody> polygons;
};

DiagramDesign diagram_design(int caps, int polygons, std::uint64_t seed);

struct DiagramFit
{
    std::array<KinematicCoefficients, kBasisSize> c{};
    std::size_t pairs = 0;
    std::size_t rejected = 0;
};

/*!
 * Basis kinematic integrals over all ordered pairs within each family, with
 * opts.samples draws per pair, fitted per basis valuation. Pair k uses
 * stream k of opts.seed.
 */
DiagramFit diagram_fit(DiagramDesign const& design, McOptions const& opts);

DiagramReport diagram_residual(std::array<KinematicCoefficients, kBasisSize> const& held_out,
                                 std::array<KinematicCoefficients, kBasisSize> const& training,
                                 product::StructureConstants const& m);

}  // namespace valprod::kinematics
