#include "valprod/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "valprod/errors.hpp"

namespace valprod
{
namespace
{
//---------------------------------------------------------------------------//
// Multi-index tables
//---------------------------------------------------------------------------//
struct IndexTables
{
    // masks[dim][degree] lists masks in lexicographic tuple order
    std::array<std::array<std::vector<unsigned>, kMaxDim + 1>, kMaxDim + 1>
        masks;
    // index_of[dim][mask]
    std::array<std::array<int, 1u << kMaxDim>, kMaxDim + 1> index_of{};

    IndexTables()
    {
        for (int dim = 0; dim <= kMaxDim; ++dim)
        {
            for (int k = 0; k <= dim; ++k)
            {
                std::vector<int> tuple(k);
                auto& out = masks[dim][k];
                // enumerate combinations in lexicographic order
                auto rec = [&](auto&& self, int pos, int start) -> void {
                    if (pos == k)
                    {
                        unsigned m = 0;
                        for (int i : tuple)
                            m |= 1u << i;
                        out.push_back(m);
                        return;
                    }
                    for (int i = start; i < dim; ++i)
                    {
                        tuple[pos] = i;
                        self(self, pos + 1, i + 1);
                    }
                };
                rec(rec, 0, 0);
                for (std::size_t i = 0; i < out.size(); ++i)
                    index_of[dim][out[i]] = static_cast<int>(i);
            }
        }
    }
};

IndexTables const& tables()
{
    static IndexTables const t;
    return t;
}

//! Sign of the shuffle merging the sorted axes of a then b.
int shuffle_sign(unsigned a, unsigned b)
{
    int inversions = 0;
    for (unsigned rest = a; rest; rest &= rest - 1)
    {
        int i = std::countr_zero(rest);
        // axes of b below i must move past i
        inversions += std::popcount(b & ((1u << i) - 1));
    }
    return (inversions % 2) ? -1 : 1;
}

struct WedgeEntry
{
    int ia;
    int ib;
    int ic;
    double sign;
};

std::vector<WedgeEntry> make_wedge_table(int dim, int p, int q)
{
    std::vector<WedgeEntry> entries;
    if (p + q > dim)
        return entries;
    auto const& t = tables();
    auto const& ma = t.masks[dim][p];
    auto const& mb = t.masks[dim][q];
    for (std::size_t i = 0; i < ma.size(); ++i)
    {
        for (std::size_t j = 0; j < mb.size(); ++j)
        {
            if (ma[i] & mb[j])
                continue;
            entries.push_back({static_cast<int>(i), static_cast<int>(j),
                               t.index_of[dim][ma[i] | mb[j]],
                               static_cast<double>(shuffle_sign(ma[i], mb[j]))});
        }
    }
    return entries;
}

double determinant(std::array<std::array<double, kMaxDim>, kMaxDim> m, int n)
{
    double det = 1;
    for (int c = 0; c < n; ++c)
    {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c]))
                piv = r;
        if (m[piv][c] == 0)
            return 0;
        if (piv != c)
        {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < n; ++r)
        {
            double const f = m[r][c] / m[c][c];
            for (int k = c + 1; k < n; ++k)
                m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

void require_same_chart(DifferentialForm const& a, DifferentialForm const& b,
                        char const* op)
{
    if (a.chart() != b.chart() && a.chart()->id() != b.chart()->id())
    {
        throw ChartMismatch(std::string(op) + ": forms live on charts '"
                            + a.chart()->id() + "' and '" + b.chart()->id()
                            + "'");
    }
}

}  // namespace

//---------------------------------------------------------------------------//
// Chart
//---------------------------------------------------------------------------//
Chart::Chart(std::string id, std::vector<std::string> coord_names,
             Domain domain)
    : id_(std::move(id)), names_(std::move(coord_names)),
      domain_(std::move(domain))
{
    if (names_.empty() || static_cast<int>(names_.size()) > kMaxDim)
        throw Error("chart '" + id_ + "' must have dimension 1.."
                    + std::to_string(kMaxDim));
}

void Chart::require(Coords const& p) const
{
    if (!contains(p))
    {
        std::ostringstream os;
        os << "point (";
        for (int i = 0; i < dim(); ++i)
            os << (i ? ", " : "") << p[i];
        os << ") outside chart '" << id_ << "'";
        throw DomainError(os.str());
    }
}

//---------------------------------------------------------------------------//
// Multi-indices
//---------------------------------------------------------------------------//
int component_count(int dim, int degree)
{
    if (degree < 0 || degree > dim)
        return 0;
    return static_cast<int>(tables().masks[dim][degree].size());
}

unsigned component_mask(int dim, int degree, int index)
{
    return tables().masks[dim][degree][index];
}

int component_index(int dim, unsigned mask)
{
    return tables().index_of[dim][mask];
}

double evaluate_alternating(int dim, int degree, Coefficients const& coeffs,
                            std::span<Vector const> vectors)
{
    if (degree > dim)
        return 0;
    if (degree == 0)
        return coeffs[0];
    auto const& masks = tables().masks[dim][degree];
    double total = 0;
    for (std::size_t c = 0; c < masks.size(); ++c)
    {
        if (coeffs[c] == 0)
            continue;
        std::array<std::array<double, kMaxDim>, kMaxDim> m{};
        int row = 0;
        for (unsigned rest = masks[c]; rest; rest &= rest - 1, ++row)
        {
            int axis = std::countr_zero(rest);
            for (int v = 0; v < degree; ++v)
                m[row][v] = vectors[v][axis];
        }
        total += coeffs[c] * determinant(m, degree);
    }
    return total;
}

//---------------------------------------------------------------------------//
// SmoothMap
//---------------------------------------------------------------------------//
SmoothMap::SmoothMap(ChartPtr source, ChartPtr target, EvalFn eval,
                     JacobianFn jacobian)
    : source_(std::move(source)), target_(std::move(target)),
      eval_(std::move(eval)), jac_(std::move(jacobian))
{
}

SmoothMap SmoothMap::identity(ChartPtr chart)
{
    int const n = chart->dim();
    return SmoothMap(
        chart, chart, [](Coords const& p) { return p; },
        [n](Coords const&) {
            Jacobian j{};
            for (int i = 0; i < n; ++i)
                j[i][i] = 1;
            return j;
        });
}

Jacobian SmoothMap::jacobian(Coords const& p) const
{
    return jac_ ? jac_(p) : numeric_jacobian(p);
}

Jacobian SmoothMap::numeric_jacobian(Coords const& p, double h) const
{
    Jacobian j{};
    int const n = source_->dim();
    int const m = target_->dim();
    for (int c = 0; c < n; ++c)
    {
        Coords lo = p, hi = p;
        lo[c] -= h;
        hi[c] += h;
        Coords const flo = eval_(lo);
        Coords const fhi = eval_(hi);
        for (int r = 0; r < m; ++r)
            j[r][c] = (fhi[r] - flo[r]) / (2 * h);
    }
    return j;
}

SmoothMap compose(SmoothMap const& g, SmoothMap const& f)
{
    if (f.target()->id() != g.source()->id())
        throw ChartMismatch("compose: target '" + f.target()->id()
                            + "' does not match source '" + g.source()->id()
                            + "'");
    int const n = f.source()->dim();
    int const k = f.target()->dim();
    int const m = g.target()->dim();
    return SmoothMap(
        f.source(), g.target(), [f, g](Coords const& p) { return g(f(p)); },
        [f, g, n, k, m](Coords const& p) {
            Jacobian const jf = f.jacobian(p);
            Jacobian const jg = g.jacobian(f(p));
            Jacobian out{};
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c)
                    for (int i = 0; i < k; ++i)
                        out[r][c] += jg[r][i] * jf[i][c];
            return out;
        });
}

//---------------------------------------------------------------------------//
// DifferentialForm
//---------------------------------------------------------------------------//
DifferentialForm::DifferentialForm(ChartPtr chart, int degree, CoeffFn fn)
    : chart_(std::move(chart)), degree_(degree), fn_(std::move(fn))
{
    if (degree_ < 0)
        throw DegreeError("negative form degree");
    if (degree_ > chart_->dim())
        fn_ = nullptr;
}

DifferentialForm DifferentialForm::zero(ChartPtr chart, int degree)
{
    return DifferentialForm(std::move(chart), degree, nullptr);
}

DifferentialForm DifferentialForm::constant(ChartPtr chart, int degree,
                                            Coefficients coeffs)
{
    return DifferentialForm(std::move(chart), degree,
                            [coeffs](Coords const&) { return coeffs; });
}

DifferentialForm
DifferentialForm::scalar(ChartPtr chart, std::function<double(Coords const&)> fn)
{
    return DifferentialForm(std::move(chart), 0,
                            [fn = std::move(fn)](Coords const& p) {
                                Coefficients c{};
                                c[0] = fn(p);
                                return c;
                            });
}

DifferentialForm DifferentialForm::differential(ChartPtr chart, int axis)
{
    Coefficients c{};
    c[component_index(chart->dim(), 1u << axis)] = 1;
    return constant(std::move(chart), 1, c);
}

Coefficients DifferentialForm::coefficients(Coords const& p) const
{
    chart_->require(p);
    return coefficients_unchecked(p);
}

Coefficients DifferentialForm::coefficients(ChartPoint const& p) const
{
    if (p.chart->id() != chart_->id())
        throw ChartMismatch("point on chart '" + p.chart->id()
                            + "' given to form on chart '" + chart_->id()
                            + "'");
    return coefficients(p.coords);
}

double DifferentialForm::operator()(Coords const& p,
                                    std::span<Vector const> vectors) const
{
    if (static_cast<int>(vectors.size()) != degree_)
        throw DegreeError("form of degree " + std::to_string(degree_)
                          + " evaluated on " + std::to_string(vectors.size())
                          + " vectors");
    if (is_zero())
        return 0;
    return evaluate_alternating(chart_->dim(), degree_, coefficients(p),
                                vectors);
}

DifferentialForm operator+(DifferentialForm const& a, DifferentialForm const& b)
{
    require_same_chart(a, b, "add");
    if (a.degree() != b.degree())
        throw DegreeError("cannot add forms of degree "
                          + std::to_string(a.degree()) + " and "
                          + std::to_string(b.degree()));
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    int const n = a.size();
    return DifferentialForm(a.chart(), a.degree(), [a, b, n](Coords const& p) {
        Coefficients ca = a.coefficients_unchecked(p);
        Coefficients const cb = b.coefficients_unchecked(p);
        for (int i = 0; i < n; ++i)
            ca[i] += cb[i];
        return ca;
    });
}

DifferentialForm operator*(double s, DifferentialForm const& a)
{
    if (a.is_zero() || s == 0)
        return DifferentialForm::zero(a.chart(), a.degree());
    int const n = a.size();
    return DifferentialForm(a.chart(), a.degree(), [a, s, n](Coords const& p) {
        Coefficients c = a.coefficients_unchecked(p);
        for (int i = 0; i < n; ++i)
            c[i] *= s;
        return c;
    });
}

DifferentialForm operator-(DifferentialForm const& a)
{
    return -1.0 * a;
}

DifferentialForm operator-(DifferentialForm const& a, DifferentialForm const& b)
{
    return a + (-b);
}

DifferentialForm wedge(DifferentialForm const& a, DifferentialForm const& b)
{
    require_same_chart(a, b, "wedge");
    int const dim = a.chart()->dim();
    int const degree = a.degree() + b.degree();
    if (a.is_zero() || b.is_zero() || degree > dim)
        return DifferentialForm::zero(a.chart(), degree);

    auto table = std::make_shared<std::vector<WedgeEntry> const>(
        make_wedge_table(dim, a.degree(), b.degree()));
    return DifferentialForm(a.chart(), degree, [a, b, table](Coords const& p) {
        Coefficients const ca = a.coefficients_unchecked(p);
        Coefficients const cb = b.coefficients_unchecked(p);
        Coefficients out{};
        for (auto const& e : *table)
            out[e.ic] += e.sign * ca[e.ia] * cb[e.ib];
        return out;
    });
}

DifferentialForm exterior_derivative(DifferentialForm const& a, double h)
{
    int const dim = a.chart()->dim();
    int const degree = a.degree() + 1;
    if (a.is_zero() || degree > dim)
        return DifferentialForm::zero(a.chart(), degree);

    // d(f_I dx^I) = sum_j ∂_j f_I dx^j ∧ dx^I
    auto table = std::make_shared<std::vector<WedgeEntry> const>(
        make_wedge_table(dim, 1, a.degree()));
    int const n_in = a.size();
    ChartPtr chart = a.chart();
    return DifferentialForm(
        chart, degree, [a, table, n_in, dim, h, chart](Coords const& p) {
            std::array<Coefficients, kMaxDim> partial{};
            for (int j = 0; j < dim; ++j)
            {
                auto central = [&](double step) {
                    Coords lo = p, hi = p;
                    lo[j] -= step;
                    hi[j] += step;
                    chart->require(lo);
                    chart->require(hi);
                    Coefficients const flo = a.coefficients_unchecked(lo);
                    Coefficients const fhi = a.coefficients_unchecked(hi);
                    Coefficients out{};
                    for (int c = 0; c < n_in; ++c)
                        out[c] = (fhi[c] - flo[c]) / (2 * step);
                    return out;
                };
                Coefficients const coarse = central(h);
                Coefficients const fine = central(0.5 * h);
                for (int c = 0; c < n_in; ++c)
                    partial[j][c] = (4 * fine[c] - coarse[c]) / 3;
            }
            Coefficients out{};
            // the 1-form dx^j has component index j
            for (auto const& e : *table)
                out[e.ic] += e.sign * partial[e.ia][e.ib];
            return out;
        });
}

DifferentialForm pullback(SmoothMap const& f, DifferentialForm const& a)
{
    if (f.target()->id() != a.chart()->id())
        throw ChartMismatch("pullback: map targets '" + f.target()->id()
                            + "' but form lives on '" + a.chart()->id() + "'");
    int const k = a.degree();
    int const n = f.source()->dim();
    int const m = f.target()->dim();
    if (a.is_zero() || k > n)
        return DifferentialForm::zero(f.source(), k);

    int const n_out = component_count(n, k);
    int const n_in = component_count(m, k);
    return DifferentialForm(
        f.source(), k, [f, a, k, n, m, n_out, n_in](Coords const& p) {
            Coords const q = f(p);
            Coefficients const cq = a.coefficients_unchecked(q);
            Coefficients out{};
            if (k == 0)
            {
                out[0] = cq[0];
                return out;
            }
            Jacobian const jac = f.jacobian(p);
            for (int o = 0; o < n_out; ++o)
            {
                unsigned const src = component_mask(n, k, o);
                double total = 0;
                for (int i = 0; i < n_in; ++i)
                {
                    if (cq[i] == 0)
                        continue;
                    unsigned const tgt = component_mask(m, k, i);
                    std::array<std::array<double, kMaxDim>, kMaxDim> minor{};
                    int r = 0;
                    for (unsigned rt = tgt; rt; rt &= rt - 1, ++r)
                    {
                        int const row = std::countr_zero(rt);
                        int c = 0;
                        for (unsigned rs = src; rs; rs &= rs - 1, ++c)
                            minor[r][c] = jac[row][std::countr_zero(rs)];
                    }
                    total += cq[i] * determinant(minor, k);
                }
                out[o] = total;
            }
            return out;
        });
}

DifferentialForm fiber_integrate(FiberBundle const& bundle,
                                 DifferentialForm const& a)
{
    if (a.chart()->id() != bundle.total->id())
        throw ChartMismatch("fiber_integrate: form on '" + a.chart()->id()
                            + "' but bundle total space is '"
                            + bundle.total->id() + "'");
    int const l = bundle.fiber_dim;
    if (a.degree() < l)
        throw DegreeError("fiber integration of a " + std::to_string(a.degree())
                          + "-form along " + std::to_string(l)
                          + "-dimensional fibers");
    int const k = a.degree() - l;
    int const base_dim = bundle.base->dim();
    if (a.is_zero() || k > base_dim)
        return DifferentialForm::zero(bundle.base, k);

    int const n_out = component_count(base_dim, k);
    int const total_dim = bundle.total->dim();
    int const degree = a.degree();
    return DifferentialForm(
        bundle.base, k,
        [bundle, a, k, l, n_out, base_dim, total_dim,
         degree](Coords const& b) {
            auto integrand = [&](int cell, std::array<double, 2> const& u) {
                FiberFrame const fr = bundle.frame(b, cell, u);
                Coefficients const c = a.coefficients(fr.point);
                Coefficients out{};
                std::array<Vector, kMaxDim> vecs{};
                for (int o = 0; o < n_out; ++o)
                {
                    unsigned const mask = component_mask(base_dim, k, o);
                    int slot = 0;
                    for (unsigned r = mask; r; r &= r - 1)
                        vecs[slot++] = fr.base_lifts[std::countr_zero(r)];
                    for (int i = 0; i < l; ++i)
                        vecs[slot++] = fr.fiber[i];
                    out[o] = evaluate_alternating(
                        total_dim, degree, c,
                        std::span<Vector const>(vecs.data(), degree));
                }
                return out;
            };
            if (bundle.fixed_nodes > 0)
            {
                quad::Rule const& rule = quad::gauss_legendre(bundle.fixed_nodes);
                std::size_t const m = rule.nodes.size();
                Coefficients total{};
                for (int cell = 0; cell < bundle.cells; ++cell)
                {
                    for (std::size_t i = 0; i < m; ++i)
                    {
                        double const ui = 0.5 * (rule.nodes[i] + 1);
                        double const wi = 0.5 * rule.weights[i];
                        for (std::size_t j = 0; j < (l == 2 ? m : 1); ++j)
                        {
                            double const uj = l == 2 ? 0.5 * (rule.nodes[j] + 1) : 0.0;
                            double const w = l == 2 ? wi * 0.5 * rule.weights[j] : wi;
                            Coefficients const v = integrand(cell, {ui, uj});
                            for (int o = 0; o < n_out; ++o)
                                total[o] += w * v[o];
                        }
                    }
                }
                return total;
            }
            quad::Counter counter{0, bundle.quadrature.budget};
            Coefficients total{};
            for (int cell = 0; cell < bundle.cells; ++cell)
            {
                Coefficients part{};
                if (l == 1)
                {
                    part = quad::integrate(
                        [&](double u) { return integrand(cell, {u, 0.0}); },
                        n_out, 0.0, 1.0, bundle.quadrature, &counter);
                }
                else
                {
                    part = quad::integrate_rect(
                        [&](double u, double v) {
                            return integrand(cell, {u, v});
                        },
                        n_out, 0.0, 1.0, 0.0, 1.0, bundle.quadrature,
                        &counter);
                }
                for (int o = 0; o < n_out; ++o)
                    total[o] += part[o];
            }
            return total;
        });
}

}  // namespace valprod
