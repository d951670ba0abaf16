#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "valprod/bodies.hpp"
#include "valprod/forms.hpp"
#include "valprod/spherical.hpp"

namespace valprod
{
//---------------------------------------------------------------------------//
/*!
 * Representing pair (ω, φ): ω a 1-form on the cosphere chart, φ a 2-form on
 * the plane. μ(P) = ∫_N(P) ω + ∫_P φ.
 */
struct ValuationRep
{
    DifferentialForm omega;
    DifferentialForm phi;
    std::string label;
};

ValuationRep operator+(ValuationRep const& a, ValuationRep const& b);
ValuationRep operator*(double s, ValuationRep const& a);

double evaluate(ValuationRep const& v, PlanarBody const& body,
                quad::Options const& opts = {});

//---------------------------------------------------------------------------//
// Invariant bases: (χ, V₁, V₂) on the plane and (χ, perimeter, area) on S².
//---------------------------------------------------------------------------//
enum class Space
{
    plane,
    sphere,
};

inline constexpr int kBasisSize = 3;
using BasisVector = std::array<double, kBasisSize>;

//! (γ/2π, 0)
ValuationRep chi_rep();
//! (β/2, 0), half the perimeter.
ValuationRep v1_rep();
//! (0, dx∧dy)
ValuationRep area_rep();
std::array<ValuationRep, kBasisSize> plane_basis();

std::string_view basis_name(Space space, int index);

//! Basis evaluations by their representing pairs.
BasisVector plane_basis_values(PlanarBody const& body,
                               quad::Options const& opts = {});
//! Closed-form basis evaluations (area, half perimeter, components).
BasisVector plane_basis_closed_form(PlanarBody const& body);
//! (χ, perimeter, area).
BasisVector sphere_basis_values(sphere::SphericalBody const& body);

struct InvariantValuation
{
    Space space = Space::plane;
    BasisVector coords{};
};

double evaluate(InvariantValuation const& v, PlanarBody const& body,
                quad::Options const& opts = {});
double evaluate(InvariantValuation const& v, sphere::SphericalBody const& body);

//! Representing pair of a planar invariant valuation.
ValuationRep to_rep(InvariantValuation const& v);

/*!
 * Parse "chi", "v1", "area" (or "v2"), "sphere-chi", "sphere-perim", "sphere-area" or
 * linear combinations such as "0.5*chi+2*v1-area". Throws ParseError.
 */
InvariantValuation parse_valuation(std::string_view text);

//! (s^*ω, φ); the signs (-1)^n are +1 on the plane.
ValuationRep euler_verdier(ValuationRep const& v);

//---------------------------------------------------------------------------//
//! Rectangle [x0, x1] x [y0, y1] of the plane; θ ranges over the full circle.
struct Window
{
    double x0 = 0;
    double x1 = 1;
    double y0 = 0;
    double y1 = 1;
};

struct SeminormOptions
{
    //! Grid points per base axis; the fiber gets twice as many.
    int grid = 4;
    //! Finite-difference step for derivatives.
    double step = 1e-3;
};

/*!
 * C^m sup-norm of the given representative over the window: the largest
 * |∂^a c| over coefficients c of ω and φ and multi-indices |a| ≤ m.
 */
double seminorm(ValuationRep const& v, Window const& window, int m,
                SeminormOptions const& opts = {});

}  // namespace valprod
