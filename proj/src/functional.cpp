#include <algorithm>
#include <cmath>
#include <numbers>

#include "valprod/errors.hpp"
#include "valprod/product.hpp"

namespace valprod::product
{
TaylorFn series_taylor(std::vector<double> coefficients)
{
    return [a = std::move(coefficients)](double c, int n) {
        // Taylor shift of Σ a_k x^k to the center c, truncated at order n.
        std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            double binom = 1;
            for (std::size_t j = 0; j <= k && j <= static_cast<std::size_t>(n); ++j)
            {
                out[j] += a[k] * binom * std::pow(c, static_cast<double>(k - j));
                binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
            }
        }
        return out;
    };
}

TaylorFn named_taylor(std::string const& name)
{
    auto factorial_scaled = [](auto derivative) {
        return [derivative](double c, int n) {
            std::vector<double> out;
            double fact = 1;
            for (int j = 0; j <= n; ++j)
            {
                if (j > 0)
                    fact *= j;
                out.push_back(derivative(c, j) / fact);
            }
            return out;
        };
    };
    if (name == "exp")
        return factorial_scaled([](double c, int) { return std::exp(c); });
    if (name == "sin")
    {
        return factorial_scaled([](double c, int j) {
            return std::sin(c + j * std::numbers::pi / 2);
        });
    }
    if (name == "cos")
    {
        return factorial_scaled([](double c, int j) {
            return std::cos(c + j * std::numbers::pi / 2);
        });
    }
    if (name == "geom")
    {
        return [](double c, int n) {
            if (c == 1)
                throw DomainError("1/(1-x) is singular at 1");
            std::vector<double> out;
            for (int j = 0; j <= n; ++j)
                out.push_back(std::pow(1 - c, -(j + 1)));
            return out;
        };
    }
    if (name == "log1p")
    {
        return [](double c, int n) {
            if (c <= -1)
                throw DomainError("log(1+x) needs x > -1");
            std::vector<double> out{std::log1p(c)};
            for (int j = 1; j <= n; ++j)
                out.push_back((j % 2 == 1 ? 1.0 : -1.0) / (j * std::pow(1 + c, j)));
            return out;
        };
    }
    throw ParseError("unknown function '" + name + "'");
}

FunctionalResult functional_calculus(TaylorFn const& f, InvariantValuation const& mu,
                                     StructureConstants const& constants)
{
    if (mu.space != constants.space)
        throw ProductUnavailable("no structure constants for this valuation's space");
    StructureConstants const g = constants.graded();

    double const c = mu.coords[0];
    BasisVector nu = mu.coords;
    nu[0] = 0;

    // ν raises the degree, so ν^kBasisSize = 0 and the series is finite.
    std::vector<double> const taylor = f(c, kBasisSize - 1);
    FunctionalResult out;
    out.value.space = mu.space;
    BasisVector power{1.0, 0.0, 0.0};
    for (int j = 0; j < kBasisSize; ++j)
    {
        double norm = 0;
        for (double x : power)
            norm = std::max(norm, std::abs(x));
        if (norm == 0)
            break;
        out.power_norms.push_back(norm);
        for (int k = 0; k < kBasisSize; ++k)
            out.value.coords[k] += taylor[static_cast<std::size_t>(j)] * power[k];
        ++out.terms;
        power = g.multiply(power, nu);
    }
    return out;
}

}  // namespace valprod::product
