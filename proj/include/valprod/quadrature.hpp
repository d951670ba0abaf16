#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace valprod::quad
{
//! Maximum number of simultaneously integrated components.
inline constexpr int kMaxValues = 10;
using Values = std::array<double, kMaxValues>;

struct Options
{
    double rel_tol = 1e-8;
    double abs_tol = 1e-13;
    //! Integrand evaluations allowed per top-level call.
    std::size_t budget = 100000;
};

//! Running evaluation count shared between nested integrations.
struct Counter
{
    std::size_t evaluations = 0;
    std::size_t budget = 0;
    void charge(std::size_t n);
};

using VecIntegrand = std::function<Values(double)>;
using ScalarIntegrand = std::function<double(double)>;
using VecIntegrand2 = std::function<Values(double, double)>;

/*!
 * Globally adaptive Gauss-Kronrod (7/15) integration of an n-component
 * integrand over [a, b].
 *
 * Intervals with the largest estimated error are bisected until the summed
 * error is below max(abs_tol, rel_tol * ∫|f|), the largest component taken.
 * Throws QuadratureBudgetExceeded when the evaluation budget runs out.
 */
Values integrate(VecIntegrand const& f, int n, double a, double b,
                 Options const& opts, Counter* counter = nullptr);

double integrate(ScalarIntegrand const& f, double a, double b,
                 Options const& opts, Counter* counter = nullptr);

//! Iterated adaptive integration over [a0,a1] x [b0,b1] (outer variable first).
Values integrate_rect(VecIntegrand2 const& f, int n, double a0, double a1,
                      double b0, double b1, Options const& opts,
                      Counter* counter = nullptr);

//! Gauss-Legendre rule on [-1, 1].
struct Rule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

//! Cached n-point Gauss-Legendre rule (nodes by Newton iteration).
Rule const& gauss_legendre(int n);

}  // namespace valprod::quad
