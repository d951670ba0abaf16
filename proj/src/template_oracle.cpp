#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "valprod/errors.hpp"
#include "valprod/seeding.hpp"
#include "valprod/product.hpp"

namespace valprod::product
{
namespace
{
constexpr double pi = std::numbers::pi;

// Convex body description shared by all samples.
struct ConvexShape
{
    bool is_disk = false;
    Vec2 center = Vec2::Zero();
    double radius = 0;
    std::vector<Vec2> vertices;
};

ConvexShape shape_of(PlanarBody const& body)
{
    ConvexShape s;
    if (body.kind() != PlanarBody::Kind::region)
        throw Unsupported("template oracle needs a two-dimensional body");
    if (body.is_polygon())
    {
        s.vertices = body.polygon_vertices();
        std::size_t const n = s.vertices.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            Vec2 const e1 = s.vertices[(i + 1) % n] - s.vertices[i];
            Vec2 const e2 = s.vertices[(i + 2) % n] - s.vertices[(i + 1) % n];
            if (e1.x() * e2.y() - e1.y() * e2.x() < 0)
                throw Unsupported("template oracle needs a convex body");
        }
        return s;
    }
    auto const& pieces = body.pieces();
    if (pieces.size() == 1 && std::holds_alternative<Arc>(pieces[0]))
    {
        auto const& arc = std::get<Arc>(pieces[0]);
        if (std::abs(arc.end - arc.start - 2 * pi) < 1e-12)
        {
            s.is_disk = true;
            s.center = arc.center;
            s.radius = arc.radius;
            return s;
        }
    }
    throw Unsupported("template oracle supports convex polygons and disks");
}

bool in_polygon(std::vector<Vec2> const& v, Vec2 const& p)
{
    std::size_t const n = v.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        Vec2 const e = v[(i + 1) % n] - v[i];
        Vec2 const d = p - v[i];
        if (e.x() * d.y() - e.y() * d.x() < 0)
            return false;
    }
    return true;
}

bool in_shape(ConvexShape const& s, Vec2 const& p)
{
    if (s.is_disk)
        return (p - s.center).squaredNorm() <= s.radius * s.radius;
    return in_polygon(s.vertices, p);
}

double dist_to_segment(Vec2 const& p, Vec2 const& a, Vec2 const& b)
{
    Vec2 const e = b - a;
    double const len2 = e.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * e - p).norm();
}

// Distance from y to C = K ∩ D(x, r); infinity when C is empty.
double distance_to_cap(ConvexShape const& s, Vec2 const& x, double r, Vec2 const& y)
{
    bool const y_in_disk = (y - x).squaredNorm() <= r * r;
    if (y_in_disk && in_shape(s, y))
        return 0;

    double best = std::numeric_limits<double>::infinity();
    bool nonempty = false;

    // Radial projection of y onto the circle ∂D(x, r).
    double const dy = (y - x).norm();
    if (!y_in_disk && dy > 0)
    {
        Vec2 const q = x + (r / dy) * (y - x);
        if (in_shape(s, q))
        {
            best = std::min(best, dy - r);
            nonempty = true;
        }
    }

    if (s.is_disk)
    {
        Vec2 const d = s.center - x;
        double const dist = d.norm();
        if (dist > s.radius + r)
            return best;
        // Projection of y onto ∂K.
        double const dc = (y - s.center).norm();
        if (dc > 0)
        {
            Vec2 const q = s.center + (s.radius / dc) * (y - s.center);
            if ((q - x).squaredNorm() <= r * r)
            {
                best = std::min(best, std::abs(dc - s.radius));
                nonempty = true;
            }
        }
        // Circle-circle intersections.
        if (dist > 0 && dist >= std::abs(s.radius - r))
        {
            double const a = (r * r - s.radius * s.radius + dist * dist) / (2 * dist);
            double const h = std::sqrt(std::max(0.0, r * r - a * a));
            Vec2 const m = x + (a / dist) * d;
            Vec2 const perp(-d.y() / dist, d.x() / dist);
            best = std::min({best, (m + h * perp - y).norm(), (m - h * perp - y).norm()});
            nonempty = true;
        }
        if (!nonempty)
        {
            // One disk inside the other; C is the smaller one.
            if (s.radius <= r)
                best = std::max(0.0, dc - s.radius);
            else
                best = std::max(0.0, dy - r);
        }
        return best;
    }

    // Polygon edges clipped to the disk chord.
    std::size_t const n = s.vertices.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        Vec2 const a = s.vertices[i];
        Vec2 const e = s.vertices[(i + 1) % n] - a;
        double const A = e.squaredNorm();
        double const B = 2 * e.dot(a - x);
        double const C = (a - x).squaredNorm() - r * r;
        double const disc = B * B - 4 * A * C;
        if (disc < 0)
            continue;
        double const sq = std::sqrt(disc);
        double const t0 = std::max(0.0, (-B - sq) / (2 * A));
        double const t1 = std::min(1.0, (-B + sq) / (2 * A));
        if (t0 > t1)
            continue;
        nonempty = true;
        best = std::min(best, dist_to_segment(y, a + t0 * e, a + t1 * e));
    }
    if (!nonempty && in_shape(s, x))
    {
        // The disk lies inside K.
        best = std::max(0.0, dy - r);
    }
    return best;
}

double distance_to_shape(ConvexShape const& s, Vec2 const& p)
{
    if (s.is_disk)
        return std::max(0.0, (p - s.center).norm() - s.radius);
    if (in_polygon(s.vertices, p))
        return 0;
    double best = std::numeric_limits<double>::infinity();
    std::size_t const n = s.vertices.size();
    for (std::size_t i = 0; i < n; ++i)
        best = std::min(best, dist_to_segment(p, s.vertices[i], s.vertices[(i + 1) % n]));
    return best;
}

// Signed area of T ∩ D(0, r) and signed angle of the arc of ∂D(0, r)
// inside T, for the triangle T = (0, p, q).
struct FanPart
{
    double area = 0;
    double arc_angle = 0;
};

FanPart fan_part(Vec2 const& p, Vec2 const& q, double r)
{
    auto cross = [](Vec2 const& u, Vec2 const& v) { return u.x() * v.y() - u.y() * v.x(); };
    auto angle = [&](Vec2 const& u, Vec2 const& v) { return std::atan2(cross(u, v), u.dot(v)); };
    Vec2 const e = q - p;
    double const A = e.squaredNorm();
    double const B = 2 * e.dot(p);
    double const C = p.squaredNorm() - r * r;
    double const disc = B * B - 4 * A * C;

    FanPart out;
    auto outside = [&](Vec2 const& u, Vec2 const& v) {
        double const t = angle(u, v);
        out.area += 0.5 * r * r * t;
        out.arc_angle += t;
    };
    auto inside = [&](Vec2 const& u, Vec2 const& v) { out.area += 0.5 * cross(u, v); };
    if (A == 0)
        return out;
    if (disc <= 0)
    {
        outside(p, q);
        return out;
    }
    double const sq = std::sqrt(disc);
    double const t0 = (-B - sq) / (2 * A);
    double const t1 = (-B + sq) / (2 * A);
    if (t1 <= 0 || t0 >= 1)
    {
        outside(p, q);
        return out;
    }
    Vec2 const m0 = t0 > 0 ? Vec2(p + t0 * e) : p;
    Vec2 const m1 = t1 < 1 ? Vec2(p + t1 * e) : q;
    if (t0 > 0)
        outside(p, m0);
    inside(m0, m1);
    if (t1 < 1)
        outside(m1, q);
    return out;
}

struct CapMeasure
{
    double area = 0;
    double perimeter = 0;
};

// Area and perimeter of K ∩ D(x, r).
CapMeasure cap_measure(ConvexShape const& s, Vec2 const& x, double r)
{
    CapMeasure m;
    if (s.is_disk)
    {
        double const R = s.radius;
        double const d = (s.center - x).norm();
        if (d >= R + r)
            return m;
        if (d <= std::abs(R - r))
        {
            double const small = std::min(R, r);
            return {pi * small * small, 2 * pi * small};
        }
        double const ax = std::acos(std::clamp((d * d + r * r - R * R) / (2 * d * r), -1.0, 1.0));
        double const ac = std::acos(std::clamp((d * d + R * R - r * r) / (2 * d * R), -1.0, 1.0));
        m.area = r * r * (ax - 0.5 * std::sin(2 * ax)) + R * R * (ac - 0.5 * std::sin(2 * ac));
        m.perimeter = 2 * r * ax + 2 * R * ac;
        return m;
    }
    std::size_t const n = s.vertices.size();
    double arc = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        Vec2 const p = s.vertices[i] - x;
        Vec2 const q = s.vertices[(i + 1) % n] - x;
        FanPart const f = fan_part(p, q, r);
        m.area += f.area;
        arc += f.arc_angle;

        Vec2 const e = q - p;
        double const A = e.squaredNorm();
        double const B = 2 * e.dot(p);
        double const disc = B * B - 4 * A * (p.squaredNorm() - r * r);
        if (disc > 0)
        {
            double const sq = std::sqrt(disc);
            double const t0 = std::max(0.0, (-B - sq) / (2 * A));
            double const t1 = std::min(1.0, (-B + sq) / (2 * A));
            if (t1 > t0)
                m.perimeter += (t1 - t0) * std::sqrt(A);
        }
    }
    m.perimeter += r * std::max(0.0, arc);
    m.area = std::max(0.0, m.area);
    return m;
}

// The y-section of ΔK + rB × r'B over x is C + r'B with C = K ∩ D(x, r),
// whose area the Steiner formula gives exactly, so only x is sampled:
// vol = ∫ area(C) + r' per(C) dx + πr'² area(K + rB). Area and perimeter of
// C are Lipschitz in x, so each batch uses a jittered grid over the box.
struct Sampler
{
    ConvexShape shape;
    Vec2 lo;
    Vec2 hi;
    double r;

    // Box integrals of area(C) and per(C) from one jittered grid.
    std::array<double, 2> run(std::uint64_t seed, std::size_t side) const
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double const wx = (hi.x() - lo.x()) / static_cast<double>(side);
        double const wy = (hi.y() - lo.y()) / static_cast<double>(side);
        std::array<double, 2> sum{};
        for (std::size_t i = 0; i < side; ++i)
        {
            for (std::size_t j = 0; j < side; ++j)
            {
                Vec2 const x(lo.x() + wx * (static_cast<double>(i) + unit(rng)),
                             lo.y() + wy * (static_cast<double>(j) + unit(rng)));
                if (distance_to_shape(shape, x) > r)
                    continue;
                CapMeasure const c = cap_measure(shape, x, r);
                sum[0] += c.area;
                sum[1] += c.perimeter;
            }
        }
        double const cell = wx * wy;
        return {sum[0] * cell, sum[1] * cell};
    }
};

std::uint64_t batch_seed(std::uint64_t seed, std::size_t b)
{
    return stream_seed(seed, static_cast<std::uint64_t>(b));
}

NodeMoments moments(PlanarBody const& body, double r, TemplateOptions const& opts,
                    bool parallel)
{
    if (!(r > 0))
        throw DomainError("diagonal volume needs r > 0");
    Sampler const s{shape_of(body), body.bbox_min().array() - r,
                    body.bbox_max().array() + r, r};
    auto const side = static_cast<std::size_t>(
        std::max(1.0, std::floor(std::sqrt(static_cast<double>(opts.batch)))));
    std::size_t const per_batch = side * side;
    std::size_t const nbatch = std::max<std::size_t>(2, (opts.points + per_batch - 1) / per_batch);

    // Batch results are combined in batch order so the result does not
    // depend on the thread count.
    std::vector<std::array<double, 2>> parts(nbatch);
    if (parallel)
    {
        long long const nb = static_cast<long long>(nbatch);
#pragma omp parallel for schedule(dynamic)
        for (long long b = 0; b < nb; ++b)
        {
            auto const ub = static_cast<std::size_t>(b);
            parts[ub] = s.run(batch_seed(opts.seed, ub), side);
        }
    }
    else
    {
        for (std::size_t b = 0; b < nbatch; ++b)
            parts[b] = s.run(batch_seed(opts.seed, b), side);
    }

    double const n = static_cast<double>(nbatch);
    NodeMoments m;
    m.r = r;
    m.samples = nbatch * per_batch;
    m.batches = nbatch;
    // Steiner formula for the parallel body of a convex K.
    m.parallel_area = body.area() + r * body.perimeter() + pi * r * r;
    for (auto const& p : parts)
    {
        m.area_integral += p[0] / n;
        m.perimeter_integral += p[1] / n;
    }
    // Batches are independent, so the spread of batch estimates gives the
    // variance of their mean.
    for (auto const& p : parts)
    {
        double const da = p[0] - m.area_integral, dp = p[1] - m.perimeter_integral;
        m.var_area += da * da / (n * (n - 1));
        m.var_perimeter += dp * dp / (n * (n - 1));
        m.cov += da * dp / (n * (n - 1));
    }
    return m;
}

// Estimate of u₀ ∫area(C) + u₁ ∫per(C) + u₂ area(K + rB), with its error.
VolumeEstimate combine(NodeMoments const& m, std::array<double, 3> const& u)
{
    double const value
        = u[0] * m.area_integral + u[1] * m.perimeter_integral + u[2] * m.parallel_area;
    double const var = u[0] * u[0] * m.var_area + u[1] * u[1] * m.var_perimeter
                       + 2 * u[0] * u[1] * m.cov;
    return {value, std::sqrt(std::max(0.0, var))};
}

VolumeEstimate volume_of(NodeMoments const& m, double rp)
{
    return combine(m, {1.0, rp, pi * rp * rp});
}

// A[a][i]: coefficient of φ_i in vol(K + r_a B).
Eigen::Matrix3d steiner_inverse()
{
    Eigen::Matrix3d A;
    for (int a = 0; a < 3; ++a)
    {
        double const r = kSteinerNodes[a];
        A(a, 0) = pi * r * r;
        A(a, 1) = 2 * r;
        A(a, 2) = 1;
    }
    return A.inverse();
}

}  // namespace

bool diagonal_member(PlanarBody const& body, Vec2 const& x, double r, Vec2 const& y,
                     double rp)
{
    return distance_to_cap(shape_of(body), x, r, y) <= rp;
}

NodeMoments node_moments(PlanarBody const& body, double r, TemplateOptions const& opts)
{
    return moments(body, r, opts, opts.parallel);
}

NodeMoments node_moments_serial(PlanarBody const& body, double r,
                                TemplateOptions const& opts)
{
    return moments(body, r, opts, false);
}

VolumeEstimate diagonal_volume(PlanarBody const& body, double r, double rp,
                               TemplateOptions const& opts)
{
    return volume_of(node_moments(body, r, opts), rp);
}

TemplateTable template_table(PlanarBody const& body, TemplateOptions const& opts)
{
    TemplateTable t;
    t.area = body.area();
    for (int a = 0; a < 3; ++a)
    {
        double const r = kSteinerNodes[a];
        if (r == 0)
            continue;
        TemplateOptions o = opts;
        o.seed = splitmix64(opts.seed + static_cast<std::uint64_t>(a));
        t.nodes[a] = node_moments(body, r, o);
    }
    for (int a = 0; a < 3; ++a)
    {
        for (int b = 0; b < 3; ++b)
        {
            double const r = kSteinerNodes[a], rp = kSteinerNodes[b];
            if (r == 0)
                t.vol[a][b] = {t.area * pi * rp * rp, 0.0};
            else
                t.vol[a][b] = volume_of(t.nodes[a], rp);
        }
    }
    return t;
}

VolumeEstimate template_value(TemplateTable const& table, int i, int j)
{
    if (i < 0 || i >= kBasisSize || j < 0 || j >= kBasisSize)
        throw DomainError("basis index out of range");
    Eigen::Matrix3d const inv = steiner_inverse();
    // Σ_b inv(j, b) vol(r, r_b) is linear in the node moments at r.
    std::array<double, 3> u{};
    for (int b = 0; b < 3; ++b)
    {
        double const rp = kSteinerNodes[b];
        u[0] += inv(j, b);
        u[1] += inv(j, b) * rp;
        u[2] += inv(j, b) * pi * rp * rp;
    }
    VolumeEstimate out;
    double var = 0;
    for (int a = 0; a < 3; ++a)
    {
        double const w = inv(i, a);
        if (kSteinerNodes[a] == 0)
        {
            for (int b = 0; b < 3; ++b)
                out.value += w * inv(j, b) * table.vol[a][b].value;
            continue;
        }
        VolumeEstimate const v = combine(table.nodes[a], u);
        out.value += w * v.value;
        var += w * w * v.error * v.error;
    }
    out.error = std::sqrt(var);
    return out;
}

namespace
{
struct TemplateFit
{
    BasisVector coords{};
    BasisVector sigma{};
};

TemplateFit fit_template(std::vector<TemplateTable> const& tables,
                         std::span<PlanarBody const> suite, int i, int j)
{
    // Weighted least squares; exact (zero-error) rows get the smallest
    // nonzero error so they stay finite.
    Eigen::Index const n = static_cast<Eigen::Index>(suite.size());
    std::vector<VolumeEstimate> values;
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < suite.size(); ++k)
    {
        values.push_back(template_value(tables[k], i, j));
        if (values.back().error > 0)
            floor = std::min(floor, values.back().error);
    }
    if (!std::isfinite(floor))
        floor = 1;

    std::vector<double> weighted;
    std::vector<BasisVector> basis;
    Eigen::MatrixXd A(n, kBasisSize);
    for (Eigen::Index r = 0; r < n; ++r)
    {
        auto const k = static_cast<std::size_t>(r);
        double const w = 1 / std::max(values[k].error, floor);
        BasisVector b = plane_basis_closed_form(suite[k]);
        for (int c = 0; c < kBasisSize; ++c)
        {
            b[c] *= w;
            A(r, c) = b[c];
        }
        basis.push_back(b);
        weighted.push_back(values[k].value * w);
    }
    Projection const p = project_onto_basis(weighted, basis);

    Eigen::MatrixXd const pinv = A.completeOrthogonalDecomposition().pseudoInverse();
    TemplateFit fit;
    fit.coords = p.coords;
    for (int c = 0; c < kBasisSize; ++c)
    {
        double var = 0;
        for (Eigen::Index r = 0; r < n; ++r)
        {
            auto const k = static_cast<std::size_t>(r);
            double const rel = values[k].error / std::max(values[k].error, floor);
            var += pinv(c, r) * pinv(c, r) * rel * rel;
        }
        fit.sigma[c] = std::sqrt(var);
    }
    return fit;
}

std::vector<TemplateTable> tables_for(std::span<PlanarBody const> suite,
                                      TemplateOptions const& opts)
{
    std::vector<TemplateTable> tables;
    for (std::size_t k = 0; k < suite.size(); ++k)
    {
        TemplateOptions o = opts;
        o.seed = splitmix64(opts.seed + 1000 * (k + 1));
        tables.push_back(template_table(suite[k], o));
    }
    return tables;
}

}  // namespace

namespace
{
// (i, j) and (j, i) estimate the same coordinates with different variance;
// keep the better one.
TemplateFit best_orientation(std::vector<TemplateTable> const& tables,
                             std::span<PlanarBody const> suite, int i, int j)
{
    TemplateFit const a = fit_template(tables, suite, i, j);
    if (i == j)
        return a;
    TemplateFit const b = fit_template(tables, suite, j, i);
    auto worst = [](TemplateFit const& f) {
        return *std::max_element(f.sigma.begin(), f.sigma.end());
    };
    return worst(b) < worst(a) ? b : a;
}

}  // namespace

BasisVector template_product(int i, int j, std::span<PlanarBody const> suite,
                             TemplateOptions const& opts)
{
    return best_orientation(tables_for(suite, opts), suite, i, j).coords;
}

StructureConstants template_structure_constants(std::span<PlanarBody const> suite,
                                                TemplateOptions const& opts)
{
    auto const tables = tables_for(suite, opts);
    StructureConstants out;
    out.space = Space::plane;
    for (int i = 0; i < kBasisSize; ++i)
    {
        for (int j = i; j < kBasisSize; ++j)
        {
            TemplateFit const f = best_orientation(tables, suite, i, j);
            out.c[i][j] = out.c[j][i] = f.coords;
            out.sigma[i][j] = out.sigma[j][i] = f.sigma;
        }
    }
    return out;
}

}  // namespace valprod::product
