#include "valprod/valuations.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>

#include "valprod/contact.hpp"
#include "valprod/errors.hpp"

namespace valprod
{
namespace
{
constexpr double pi = std::numbers::pi;

struct NamedBasis
{
    std::string_view name;
    Space space;
    int index;
};

constexpr NamedBasis kNames[] = {
    {"chi", Space::plane, 0},
    {"v1", Space::plane, 1},
    {"area", Space::plane, 2},
    {"v2", Space::plane, 2},
    {"sphere-chi", Space::sphere, 0},
    {"sphere-perim", Space::sphere, 1},
    {"sphere-area", Space::sphere, 2},
};

}  // namespace

ValuationRep operator+(ValuationRep const& a, ValuationRep const& b)
{
    return {a.omega + b.omega, a.phi + b.phi, a.label + "+" + b.label};
}

ValuationRep operator*(double s, ValuationRep const& a)
{
    return {s * a.omega, s * a.phi, a.label};
}

double evaluate(ValuationRep const& v, PlanarBody const& body,
                quad::Options const& opts)
{
    return integrate_over_cycle(normal_cycle(body), v.omega, opts)
           + integrate_density(body, v.phi, opts);
}

ValuationRep chi_rep()
{
    return {(1 / (2 * pi)) * contact::gamma(),
            DifferentialForm::zero(contact::plane_chart(), 2), "chi"};
}

ValuationRep v1_rep()
{
    return {0.5 * contact::beta(), DifferentialForm::zero(contact::plane_chart(), 2),
            "v1"};
}

ValuationRep area_rep()
{
    return {DifferentialForm::zero(contact::cosphere_chart(), 1), contact::area_form(),
            "area"};
}

std::array<ValuationRep, kBasisSize> plane_basis()
{
    return {chi_rep(), v1_rep(), area_rep()};
}

std::string_view basis_name(Space space, int index)
{
    for (auto const& n : kNames)
        if (n.space == space && n.index == index)
            return n.name;
    throw DomainError("basis index out of range");
}

BasisVector plane_basis_values(PlanarBody const& body, quad::Options const& opts)
{
    BasisVector out{};
    auto const basis = plane_basis();
    NormalCycle const cycle = normal_cycle(body);
    for (int i = 0; i < kBasisSize; ++i)
        out[i] = integrate_over_cycle(cycle, basis[i].omega, opts)
                 + integrate_density(body, basis[i].phi, opts);
    return out;
}

BasisVector plane_basis_closed_form(PlanarBody const& body)
{
    return {1.0, 0.5 * body.perimeter(), body.area()};
}

BasisVector sphere_basis_values(sphere::SphericalBody const& body)
{
    return {body.euler(), body.perimeter(), body.area()};
}

double evaluate(InvariantValuation const& v, PlanarBody const& body,
                quad::Options const& opts)
{
    if (v.space != Space::plane)
        throw ChartMismatch("spherical valuation evaluated on a planar body");
    BasisVector const b = plane_basis_values(body, opts);
    double total = 0;
    for (int i = 0; i < kBasisSize; ++i)
        total += v.coords[i] * b[i];
    return total;
}

double evaluate(InvariantValuation const& v, sphere::SphericalBody const& body)
{
    if (v.space != Space::sphere)
        throw ChartMismatch("planar valuation evaluated on a spherical body");
    BasisVector const b = sphere_basis_values(body);
    double total = 0;
    for (int i = 0; i < kBasisSize; ++i)
        total += v.coords[i] * b[i];
    return total;
}

ValuationRep to_rep(InvariantValuation const& v)
{
    if (v.space != Space::plane)
        throw Unsupported("spherical valuations have no chart representative");
    auto const basis = plane_basis();
    ValuationRep rep{v.coords[0] * basis[0].omega + v.coords[1] * basis[1].omega,
                     v.coords[2] * basis[2].phi, ""};
    for (int i = 0; i < kBasisSize; ++i)
    {
        if (v.coords[i] == 0)
            continue;
        if (!rep.label.empty())
            rep.label += "+";
        rep.label += std::to_string(v.coords[i]) + "*" + basis[i].label;
    }
    return rep;
}

InvariantValuation parse_valuation(std::string_view text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s.empty())
        throw ParseError("empty valuation expression");

    InvariantValuation out;
    bool space_set = false;
    std::size_t pos = 0;
    while (pos < s.size())
    {
        double sign = 1;
        if (s[pos] == '+' || s[pos] == '-')
        {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        }
        else if (pos != 0)
        {
            throw ParseError("expected '+' or '-' at position " + std::to_string(pos));
        }

        double coef = 1;
        if (pos < s.size()
            && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
        {
            auto const* first = s.data() + pos;
            auto const [ptr, ec] = std::from_chars(first, s.data() + s.size(), coef);
            if (ec != std::errc{})
                throw ParseError("bad number at position " + std::to_string(pos));
            pos += static_cast<std::size_t>(ptr - first);
            if (pos >= s.size() || s[pos] != '*')
                throw ParseError("expected '*' after coefficient");
            ++pos;
        }

        std::size_t const start = pos;
        while (pos < s.size()
               && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '-'))
        {
            // A '-' continues a name only inside "sphere-...".
            if (s[pos] == '-' && s.compare(start, pos - start, "sphere") != 0)
                break;
            ++pos;
        }
        std::string_view const name(s.data() + start, pos - start);
        auto const* found = std::find_if(std::begin(kNames), std::end(kNames),
                                         [&](auto const& n) { return n.name == name; });
        if (found == std::end(kNames))
            throw ParseError("unknown valuation '" + std::string(name) + "'");
        if (space_set && out.space != found->space)
            throw ParseError("valuation mixes planar and spherical names");
        out.space = found->space;
        space_set = true;
        out.coords[found->index] += sign * coef;
    }
    return out;
}

ValuationRep euler_verdier(ValuationRep const& v)
{
    return {pullback(contact::involution(), v.omega), v.phi, "sigma(" + v.label + ")"};
}

//---------------------------------------------------------------------------//
namespace
{
using CoeffFn = std::function<Coefficients(Coords const&)>;

// ∂^axes f at p by nested central differences.
Coefficients nested_difference(CoeffFn const& f, Coords p, std::vector<int> const& axes,
                               std::size_t level, double h)
{
    if (level == axes.size())
        return f(p);
    int const ax = axes[level];
    Coords plus = p, minus = p;
    plus[ax] += h;
    minus[ax] -= h;
    Coefficients const a = nested_difference(f, plus, axes, level + 1, h);
    Coefficients const b = nested_difference(f, minus, axes, level + 1, h);
    Coefficients out{};
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (a[i] - b[i]) / (2 * h);
    return out;
}

double cm_norm(DifferentialForm const& form, std::vector<Coords> const& grid, int m,
               double h)
{
    if (form.is_zero())
        return 0;
    int const dim = form.chart()->dim();
    int const ncomp = form.size();
    CoeffFn const fn = [&form](Coords const& p) { return form.coefficients_unchecked(p); };

    // Non-decreasing axis sequences enumerate each mixed partial once.
    std::vector<std::vector<int>> multi{{}};
    std::vector<std::vector<int>> frontier{{}};
    for (int order = 1; order <= m; ++order)
    {
        std::vector<std::vector<int>> next;
        for (auto const& seq : frontier)
        {
            int const lo = seq.empty() ? 0 : seq.back();
            for (int ax = lo; ax < dim; ++ax)
            {
                auto s = seq;
                s.push_back(ax);
                next.push_back(s);
            }
        }
        multi.insert(multi.end(), next.begin(), next.end());
        frontier = std::move(next);
    }

    double best = 0;
    for (auto const& p : grid)
    {
        for (auto const& axes : multi)
        {
            Coefficients const c = nested_difference(fn, p, axes, 0, h);
            for (int i = 0; i < ncomp; ++i)
                best = std::max(best, std::abs(c[i]));
        }
    }
    return best;
}

}  // namespace

double seminorm(ValuationRep const& v, Window const& window, int m,
                SeminormOptions const& opts)
{
    if (m < 0 || m > 3)
        throw DomainError("seminorm order must lie in {0, 1, 2, 3}");
    int const n = std::max(opts.grid, 1);
    std::vector<Coords> const cos_grid = contact::cosphere_grid(
        window.x0, window.x1, window.y0, window.y1, n, n, 2 * n);
    std::vector<Coords> base_grid;
    for (auto const& p : cos_grid)
        if (p[2] == 0)
            base_grid.push_back(p);
    return cm_norm(v.omega, cos_grid, m, opts.step)
           + cm_norm(v.phi, base_grid, m, opts.step);
}

}  // namespace valprod
