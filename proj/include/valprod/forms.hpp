#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "valprod/quadrature.hpp"

namespace valprod
{
//! Largest chart dimension supported (the blow-up chart is 5-dimensional).
inline constexpr int kMaxDim = 5;
//! Largest number of strictly increasing multi-indices, C(5, 2) = C(5, 3).
inline constexpr int kMaxComponents = quad::kMaxValues;

using Coords = std::array<double, kMaxDim>;
using Vector = std::array<double, kMaxDim>;
using Coefficients = quad::Values;
//! Row-major Jacobian: jac[target_axis][source_axis].
using Jacobian = std::array<std::array<double, kMaxDim>, kMaxDim>;

//! Default central-difference step on unit-scaled charts.
inline constexpr double kDefaultStep = 1e-4;

//---------------------------------------------------------------------------//
/*!
 * A coordinate chart: named axes plus a membership predicate.
 *
 * An empty predicate accepts every point.
 */
class Chart
{
  public:
    using Domain = std::function<bool(Coords const&)>;

    Chart(std::string id, std::vector<std::string> coord_names,
          Domain domain = {});

    std::string const& id() const { return id_; }
    int dim() const { return static_cast<int>(names_.size()); }
    std::vector<std::string> const& coord_names() const { return names_; }

    bool contains(Coords const& p) const { return !domain_ || domain_(p); }
    //! Throw DomainError if the point lies outside the chart.
    void require(Coords const& p) const;

  private:
    std::string id_;
    std::vector<std::string> names_;
    Domain domain_;
};

using ChartPtr = std::shared_ptr<Chart const>;

//! A point together with the chart it is expressed in.
struct ChartPoint
{
    ChartPtr chart;
    Coords coords{};
};

//---------------------------------------------------------------------------//
// Multi-index bookkeeping. Components of a k-form on a d-dimensional chart
// are indexed by strictly increasing k-tuples of axes in lexicographic
// order; a tuple is stored as a bitmask of axes.
//---------------------------------------------------------------------------//
int component_count(int dim, int degree);
unsigned component_mask(int dim, int degree, int index);
int component_index(int dim, unsigned mask);

//! Value of the alternating form with the given coefficients on k vectors.
double evaluate_alternating(int dim, int degree, Coefficients const& coeffs,
                            std::span<Vector const> vectors);

//---------------------------------------------------------------------------//
/*!
 * Smooth map between charts.
 *
 * The Jacobian is analytic when supplied and central-difference otherwise.
 */
class SmoothMap
{
  public:
    using EvalFn = std::function<Coords(Coords const&)>;
    using JacobianFn = std::function<Jacobian(Coords const&)>;

    SmoothMap(ChartPtr source, ChartPtr target, EvalFn eval,
              JacobianFn jacobian = {});

    static SmoothMap identity(ChartPtr chart);

    ChartPtr const& source() const { return source_; }
    ChartPtr const& target() const { return target_; }

    Coords operator()(Coords const& p) const { return eval_(p); }
    Jacobian jacobian(Coords const& p) const;
    Jacobian numeric_jacobian(Coords const& p, double h = 1e-6) const;
    bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }

  private:
    ChartPtr source_;
    ChartPtr target_;
    EvalFn eval_;
    JacobianFn jac_;
};

//! g ∘ f.
SmoothMap compose(SmoothMap const& g, SmoothMap const& f);

//---------------------------------------------------------------------------//
/*!
 * Degree-k differential form on a chart.
 *
 * Coefficients are produced pointwise over increasing multi-indices, so
 * alternation holds by construction. A structurally zero form carries no
 * coefficient function, which lets operators skip work.
 */
class DifferentialForm
{
  public:
    using CoeffFn = std::function<Coefficients(Coords const&)>;

    DifferentialForm(ChartPtr chart, int degree, CoeffFn fn);

    static DifferentialForm zero(ChartPtr chart, int degree);
    static DifferentialForm constant(ChartPtr chart, int degree,
                                     Coefficients coeffs);
    static DifferentialForm
    scalar(ChartPtr chart, std::function<double(Coords const&)> fn);
    //! The coordinate 1-form dx_axis.
    static DifferentialForm differential(ChartPtr chart, int axis);

    ChartPtr const& chart() const { return chart_; }
    int degree() const { return degree_; }
    int size() const { return component_count(chart_->dim(), degree_); }
    bool is_zero() const { return !fn_; }

    //! Coefficients at p; throws DomainError outside the chart.
    Coefficients coefficients(Coords const& p) const;
    //! Coefficients at p without the domain check.
    Coefficients coefficients_unchecked(Coords const& p) const
    {
        return fn_ ? fn_(p) : Coefficients{};
    }
    Coefficients coefficients(ChartPoint const& p) const;

    //! Evaluate on `degree` tangent vectors at p.
    double operator()(Coords const& p, std::span<Vector const> vectors) const;

  private:
    ChartPtr chart_;
    int degree_;
    CoeffFn fn_;
};

DifferentialForm operator+(DifferentialForm const& a, DifferentialForm const& b);
DifferentialForm operator-(DifferentialForm const& a, DifferentialForm const& b);
DifferentialForm operator*(double s, DifferentialForm const& a);
DifferentialForm operator-(DifferentialForm const& a);

//! Exterior product; degree above the chart dimension gives the zero form.
DifferentialForm wedge(DifferentialForm const& a, DifferentialForm const& b);

/*!
 * Exterior derivative by central differences with step h and one level of
 * Richardson extrapolation (step h and h/2).
 */
DifferentialForm exterior_derivative(DifferentialForm const& a,
                                     double h = kDefaultStep);

//! f^* a, where a lives on f's target chart.
DifferentialForm pullback(SmoothMap const& f, DifferentialForm const& a);

//---------------------------------------------------------------------------//
/*!
 * Local frame of a fiber bundle at one fiber parameter.
 *
 * `base_lifts[j]` is a lift of the base coordinate vector ∂_j into the total
 * chart; `fiber[i]` is the derivative of the fiber parametrization with
 * respect to the i-th parameter, already carrying the orientation sign of
 * its parameter cell.
 */
struct FiberFrame
{
    Coords point{};
    std::array<Vector, kMaxDim> base_lifts{};
    std::array<Vector, 2> fiber{};
};

/*!
 * Fiber bundle with compact fibers, described by parametrizations of each
 * fiber over `cells` copies of the unit cube [0,1]^fiber_dim.
 */
struct FiberBundle
{
    ChartPtr total;
    ChartPtr base;
    int fiber_dim = 1;
    int cells = 1;
    std::function<FiberFrame(Coords const& base, int cell,
                             std::array<double, 2> const& u)>
        frame;
    quad::Options quadrature{};
    /*!
     * When positive, a fixed Gauss-Legendre rule with this many nodes per
     * fiber axis replaces adaptive quadrature. The result is then a smooth
     * function of the base point, which nested integrations rely on.
     */
    int fixed_nodes = 0;
};

/*!
 * Integration along the fibers, with the convention
 * ∫_B t ∧ π_* a = ∫_E π^* t ∧ a (fiber vectors are inserted last).
 */
DifferentialForm fiber_integrate(FiberBundle const& bundle,
                                 DifferentialForm const& a);

}  // namespace valprod
