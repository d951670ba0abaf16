#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "valprod/forms.hpp"

namespace valprod
{
class PlanarBody;

namespace contact
{
//---------------------------------------------------------------------------//
// Charts and canonical forms of the cosphere bundle of the plane.
// Coordinates (x, y, θ); θ is the angle of the outward covector, real-valued
// and 2π-periodic in every coefficient used here.
//---------------------------------------------------------------------------//
ChartPtr plane_chart();
ChartPtr cosphere_chart();

//! α = cosθ dx + sinθ dy.
DifferentialForm alpha();
//! β = -sinθ dx + cosθ dy.
DifferentialForm beta();
//! γ = dθ.
DifferentialForm gamma();
//! dα = γ ∧ β, in closed form.
DifferentialForm d_alpha();
//! dx ∧ dy on the base.
DifferentialForm area_form();

//! Frame (e_β, e_γ) of ker α at p: e_β = (-sinθ, cosθ, 0), e_γ = ∂θ.
std::pair<Vector, Vector> contact_frame(Coords const& p);

//! s(x, y, θ) = (x, y, θ + π).
SmoothMap involution();
//! π(x, y, θ) = (x, y).
SmoothMap projection();

//! Gauss-Legendre nodes used on each cosphere fiber.
inline constexpr int kCircleNodes = 48;

//! The circle bundle π, fiber parametrized by θ = 2πu.
FiberBundle cosphere_fibration(quad::Options const& opts = {});

//! π_* a.
DifferentialForm push_forward(DifferentialForm const& a,
                              quad::Options const& opts = {});
//! π^* a.
DifferentialForm pull_up(DifferentialForm const& a);

//---------------------------------------------------------------------------//
// Verticality and the Rumin operator
//---------------------------------------------------------------------------//
struct VerticalityReport
{
    bool vertical = true;
    double max_residual = 0;
    double tolerance = 0;
};

/*!
 * Check that a vanishes on the contact distribution at every sample.
 *
 * Without an explicit tolerance, 1e-6 times the largest coefficient of a
 * on the samples is used.
 */
VerticalityReport is_vertical(DifferentialForm const& a,
                              std::span<Coords const> samples,
                              std::optional<double> tol = std::nullopt);

//! Q a = a + f α with f = -(da)(e_β, e_γ) / (dα)(e_β, e_γ).
DifferentialForm rumin_Q(DifferentialForm const& a, double h = kDefaultStep);

//! D a = d(Q a).
DifferentialForm rumin_D(DifferentialForm const& a, double h = kDefaultStep);

/*!
 * Seeded test form of degree 1 or 2 on the cosphere chart. Each component
 * is Σ c x^p y^q (cos mθ, sin mθ) over p + q ≤ 2, m ∈ {1, 2}, with c
 * uniform in [-1, 1].
 */
DifferentialForm random_form(int degree, std::uint64_t seed);

//! Regular sample grid over [x0,x1] x [y0,y1] x [0, 2π).
std::vector<Coords> cosphere_grid(double x0, double x1, double y0, double y1,
                                  int nx, int ny, int ntheta);

//---------------------------------------------------------------------------//
struct TrivialPairReport
{
    //! sup |Dω + π^*φ| over the grid
    double rumin_residual = 0;
    //! sup |π_* ω| over the base grid
    double pushforward_residual = 0;
    //! max |μ(P)| over the test bodies
    double max_evaluation = 0;
};

/*!
 * Residuals of the two conditions characterizing a trivial pair (ω, φ),
 * alongside the evaluations they should predict.
 */
TrivialPairReport check_trivial_pair(DifferentialForm const& omega,
                                     DifferentialForm const& phi,
                                     std::span<PlanarBody const> bodies,
                                     std::span<Coords const> grid,
                                     double h = kDefaultStep);

}  // namespace contact
}  // namespace valprod
