#pragma once

#include <cstdint>
#include <vector>

#include "valprod/bodies.hpp"

namespace valprod::currents
{
//! One point of q₁^*N(P₁) ∩ q₂^*N(P₂): a boundary crossing with both normals.
struct WeightedPoint
{
    Vec2 x = Vec2::Zero();
    double theta1 = 0;
    double theta2 = 0;
    int weight = 1;
};

using WeightedPointSet = std::vector<WeightedPoint>;

//! A normal-cycle-like current whose pieces carry provenance tags.
using PiecewiseCurrent = NormalCycle;

/*!
 * One entry per boundary crossing. The weight is the sign of
 * det(t₁, t₂) for the counterclockwise boundary tangents, which is +1
 * exactly when ∂P₁ leaves P₂ at the crossing. Throws NotTransversal.
 */
WeightedPointSet fiber_intersection(PlanarBody const& p1, PlanarBody const& p2);

/*!
 * Fiber arcs over each point, θ₁ → θ₂ along the minor arc, with the point's
 * weight as orientation. Throws AntipodalCrossing for opposite normals.
 */
std::vector<CyclePiece> gt_arcs(WeightedPointSet const& points);

/*!
 * gt_arcs(fiber_intersection) together with N(P₁) restricted over P₂ and
 * N(P₂) restricted over P₁, split at the crossings. Throws NotTransversal.
 */
PiecewiseCurrent three_term_product(PlanarBody const& p1, PlanarBody const& p2);

//! Normal cycle of P₁ ∩ P₂ built from the intersection bodies.
NormalCycle intersection_cycle(PlanarBody const& p1, PlanarBody const& p2);

/*!
 * max |A(ω) - B(ω)| / (1 + |B(ω)|) over k seeded random 1-forms with
 * polynomial times trigonometric coefficients.
 */
double compare_currents(PiecewiseCurrent const& a, PiecewiseCurrent const& b, int k,
                        std::uint64_t seed);

}  // namespace valprod::currents
