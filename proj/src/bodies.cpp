#include "valprod/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "valprod/contact.hpp"
#include "valprod/errors.hpp"

namespace valprod
{
namespace
{
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2 * pi;

double cross(Vec2 const& u, Vec2 const& v)
{
    return u.x() * v.y() - u.y() * v.x();
}

Vec2 unit(double angle)
{
    return {std::cos(angle), std::sin(angle)};
}

Vec2 rotate(Vec2 const& v, double angle)
{
    double const c = std::cos(angle), s = std::sin(angle);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

bool segments_intersect(Vec2 const& a, Vec2 const& b, Vec2 const& c,
                        Vec2 const& d)
{
    double const d1 = cross(b - a, c - a);
    double const d2 = cross(b - a, d - a);
    double const d3 = cross(d - c, a - c);
    double const d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0))
        && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](Vec2 const& p, Vec2 const& q, Vec2 const& r) {
        return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x())
               && std::min(p.y(), q.y()) <= r.y()
               && r.y() <= std::max(p.y(), q.y());
    };
    return (d1 == 0 && on_segment(a, b, c)) || (d2 == 0 && on_segment(a, b, d))
           || (d3 == 0 && on_segment(c, d, a)) || (d4 == 0 && on_segment(c, d, b));
}

// Sub-arcs of [start, end] split at the angles where y is extremal.
template<class F>
void for_each_y_monotone(Arc const& arc, F&& f)
{
    double lo = arc.start;
    double k = std::floor((lo - pi / 2) / pi) + 1;
    double br = pi / 2 + k * pi;
    while (br < arc.end)
    {
        if (br > lo)
        {
            f(lo, br);
            lo = br;
        }
        br += pi;
    }
    f(lo, arc.end);
}

}  // namespace

//---------------------------------------------------------------------------//
double wrap_angle(double a)
{
    a = std::fmod(a, two_pi);
    if (a <= -pi)
        a += two_pi;
    else if (a > pi)
        a -= two_pi;
    return a;
}

Vec2 piece_point(BoundaryPiece const& piece, double s)
{
    if (auto const* seg = std::get_if<Segment>(&piece))
        return seg->a + s * (seg->b - seg->a);
    auto const& arc = std::get<Arc>(piece);
    return arc.center + arc.radius * unit(arc.start + s * (arc.end - arc.start));
}

Vec2 piece_velocity(BoundaryPiece const& piece, double s)
{
    if (auto const* seg = std::get_if<Segment>(&piece))
        return seg->b - seg->a;
    auto const& arc = std::get<Arc>(piece);
    double const phi = arc.start + s * (arc.end - arc.start);
    return arc.radius * (arc.end - arc.start) * Vec2(-std::sin(phi), std::cos(phi));
}

double piece_normal(BoundaryPiece const& piece, double s)
{
    if (auto const* seg = std::get_if<Segment>(&piece))
    {
        Vec2 const d = seg->b - seg->a;
        return std::atan2(-d.x(), d.y());
    }
    auto const& arc = std::get<Arc>(piece);
    return arc.start + s * (arc.end - arc.start);
}

double piece_length(BoundaryPiece const& piece)
{
    if (auto const* seg = std::get_if<Segment>(&piece))
        return (seg->b - seg->a).norm();
    auto const& arc = std::get<Arc>(piece);
    return arc.radius * (arc.end - arc.start);
}

BoundaryPiece piece_restrict(BoundaryPiece const& piece, double s0, double s1)
{
    if (std::holds_alternative<Segment>(piece))
        return Segment{piece_point(piece, s0), piece_point(piece, s1)};
    Arc arc = std::get<Arc>(piece);
    double const span = arc.end - arc.start;
    double const a0 = arc.start + s0 * span;
    arc.end = arc.start + s1 * span;
    arc.start = a0;
    return arc;
}

//---------------------------------------------------------------------------//
PlanarBody PlanarBody::polygon(std::vector<Vec2> vertices)
{
    std::size_t const n = vertices.size();
    if (n < 3)
        throw DegenerateBody("polygon needs at least 3 vertices");

    double scale = 0;
    for (auto const& v : vertices)
        scale = std::max(scale, v.cwiseAbs().maxCoeff());
    scale = std::max(scale, 1.0);

    double twice_area = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        Vec2 const& a = vertices[i];
        Vec2 const& b = vertices[(i + 1) % n];
        if ((b - a).norm() < 1e-12 * scale)
            throw DegenerateBody("polygon edge " + std::to_string(i)
                                 + " has zero length");
        twice_area += cross(a, b);
    }
    if (twice_area <= 0)
        throw InvalidBody("polygon vertices are not counterclockwise");

    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i + 2; j < n; ++j)
        {
            if (i == 0 && j == n - 1)
                continue;
            if (segments_intersect(vertices[i], vertices[(i + 1) % n],
                                   vertices[j], vertices[(j + 1) % n]))
                throw InvalidBody("polygon boundary is not simple (edges "
                                  + std::to_string(i) + " and "
                                  + std::to_string(j) + ")");
        }
    }

    PlanarBody body;
    body.kind_ = Kind::region;
    for (std::size_t i = 0; i < n; ++i)
        body.pieces_.push_back(Segment{vertices[i], vertices[(i + 1) % n]});
    body.build_vertices({});
    if (body.vertices_.size() != n)
        throw InvalidBody("polygon has collinear consecutive edges");
    return body;
}

PlanarBody PlanarBody::rectangle(double x0, double y0, double x1, double y1)
{
    return polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

PlanarBody PlanarBody::disk(Vec2 center, double radius)
{
    if (!(radius > 0))
        throw DegenerateBody("disk radius must be positive");
    PlanarBody body;
    body.kind_ = Kind::region;
    body.pieces_.push_back(Arc{center, radius, 0.0, two_pi});
    body.build_vertices({});
    return body;
}

PlanarBody PlanarBody::point(Vec2 p)
{
    PlanarBody body;
    body.kind_ = Kind::point;
    body.anchor_ = p;
    return body;
}

PlanarBody PlanarBody::segment(Vec2 a, Vec2 b)
{
    if ((b - a).norm() < 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
        throw DegenerateBody("segment has zero length");
    PlanarBody body;
    body.kind_ = Kind::segment;
    body.anchor_ = a;
    body.anchor_b_ = b;
    return body;
}

PlanarBody PlanarBody::from_pieces(std::vector<BoundaryPiece> pieces,
                                   std::vector<VertexKind> join_kinds)
{
    if (pieces.empty())
        throw DegenerateBody("empty boundary");
    double scale = 1;
    for (auto const& p : pieces)
        scale = std::max(scale, piece_point(p, 0).cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < pieces.size(); ++k)
    {
        if (piece_length(pieces[k]) < 1e-14 * scale)
            throw DegenerateBody("boundary piece of zero length");
        Vec2 const end = piece_point(pieces[k], 1);
        Vec2 const next = piece_point(pieces[(k + 1) % pieces.size()], 0);
        if ((end - next).norm() > 1e-8 * scale)
            throw InvalidBody("boundary pieces do not form a closed chain");
    }
    PlanarBody body;
    body.kind_ = Kind::region;
    body.pieces_ = std::move(pieces);
    body.build_vertices(join_kinds);
    if (body.area() <= 0)
        throw InvalidBody("boundary chain is not counterclockwise");
    return body;
}

void PlanarBody::build_vertices(std::vector<VertexKind> const& join_kinds)
{
    vertices_.clear();
    std::size_t const n = pieces_.size();
    for (std::size_t k = 0; k < n; ++k)
    {
        auto const& cur = pieces_[k];
        auto const& next = pieces_[(k + 1) % n];
        double const n_in = piece_normal(cur, 1);
        double const jump = wrap_angle(piece_normal(next, 0) - n_in);
        if (std::abs(jump) < 1e-9)
            continue;
        if (std::abs(jump) > pi - 1e-9)
            throw InvalidBody("boundary has a cusp");
        Vertex v;
        v.position = piece_point(cur, 1);
        v.normal_in = n_in;
        v.jump = jump;
        v.kind = k < join_kinds.size() ? join_kinds[k] : VertexKind::inherited;
        v.after_piece = k;
        vertices_.push_back(v);
    }
}

int PlanarBody::dimension() const
{
    switch (kind_)
    {
        case Kind::region:
            return 2;
        case Kind::segment:
            return 1;
        case Kind::point:
            return 0;
    }
    return 0;
}

bool PlanarBody::is_polygon() const
{
    return kind_ == Kind::region
           && std::all_of(pieces_.begin(), pieces_.end(), [](auto const& p) {
                  return std::holds_alternative<Segment>(p);
              });
}

std::vector<Vec2> PlanarBody::polygon_vertices() const
{
    if (!is_polygon())
        throw Unsupported("body is not a polygon");
    std::vector<Vec2> out;
    for (auto const& v : vertices_)
        out.push_back(v.position);
    // Start from the vertex before piece 0.
    if (!out.empty())
        std::rotate(out.begin(), out.end() - 1, out.end());
    return out;
}

double PlanarBody::area() const
{
    double twice = 0;
    for (auto const& piece : pieces_)
    {
        if (auto const* seg = std::get_if<Segment>(&piece))
        {
            twice += cross(seg->a, seg->b);
            continue;
        }
        auto const& arc = std::get<Arc>(piece);
        double const r = arc.radius;
        twice += r * arc.center.x() * (std::sin(arc.end) - std::sin(arc.start))
                 - r * arc.center.y() * (std::cos(arc.end) - std::cos(arc.start))
                 + r * r * (arc.end - arc.start);
    }
    return 0.5 * twice;
}

double PlanarBody::perimeter() const
{
    switch (kind_)
    {
        case Kind::point:
            return 0;
        case Kind::segment:
            return 2 * (anchor_b_ - anchor_).norm();
        case Kind::region:
            break;
    }
    double total = 0;
    for (auto const& p : pieces_)
        total += piece_length(p);
    return total;
}

bool PlanarBody::contains(Vec2 const& p) const
{
    if (kind_ != Kind::region)
        return false;
    // Horizontal ray towards +x with the half-open crossing rule.
    bool inside = false;
    for (auto const& piece : pieces_)
    {
        if (auto const* seg = std::get_if<Segment>(&piece))
        {
            Vec2 const& a = seg->a;
            Vec2 const& b = seg->b;
            if ((a.y() > p.y()) != (b.y() > p.y()))
            {
                double const x
                    = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
                if (x > p.x())
                    inside = !inside;
            }
            continue;
        }
        auto const& arc = std::get<Arc>(piece);
        for_each_y_monotone(arc, [&](double lo, double hi) {
            double const y0 = arc.center.y() + arc.radius * std::sin(lo);
            double const y1 = arc.center.y() + arc.radius * std::sin(hi);
            if ((y0 > p.y()) == (y1 > p.y()))
                return;
            double const dy = p.y() - arc.center.y();
            double const half
                = std::sqrt(std::max(0.0, arc.radius * arc.radius - dy * dy));
            double const mid = 0.5 * (lo + hi);
            double const x = arc.center.x() + (std::cos(mid) >= 0 ? half : -half);
            if (x > p.x())
                inside = !inside;
        });
    }
    return inside;
}

Vec2 PlanarBody::bbox_min() const
{
    if (kind_ == Kind::point)
        return anchor_;
    if (kind_ == Kind::segment)
        return anchor_.cwiseMin(anchor_b_);
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
    for (auto const& piece : pieces_)
    {
        lo = lo.cwiseMin(piece_point(piece, 0));
        if (auto const* arc = std::get_if<Arc>(&piece))
        {
            // Extreme points at multiples of π/2 inside the arc.
            for (double k = std::ceil(arc->start / (pi / 2)); k * pi / 2 <= arc->end;
                 k += 1)
                lo = lo.cwiseMin(arc->center + arc->radius * unit(k * pi / 2));
        }
    }
    return lo;
}

Vec2 PlanarBody::bbox_max() const
{
    if (kind_ == Kind::point)
        return anchor_;
    if (kind_ == Kind::segment)
        return anchor_.cwiseMax(anchor_b_);
    Vec2 hi = Vec2::Constant(-std::numeric_limits<double>::infinity());
    for (auto const& piece : pieces_)
    {
        hi = hi.cwiseMax(piece_point(piece, 0));
        if (auto const* arc = std::get_if<Arc>(&piece))
        {
            for (double k = std::ceil(arc->start / (pi / 2)); k * pi / 2 <= arc->end;
                 k += 1)
                hi = hi.cwiseMax(arc->center + arc->radius * unit(k * pi / 2));
        }
    }
    return hi;
}

double PlanarBody::diameter() const
{
    return (bbox_max() - bbox_min()).norm();
}

Vec2 PlanarBody::reference_point() const
{
    if (kind_ != Kind::region)
        return anchor_;
    if (pieces_.size() == 1)
        if (auto const* arc = std::get_if<Arc>(&pieces_.front()))
            return arc->center;
    Vec2 sum = Vec2::Zero();
    for (auto const& piece : pieces_)
        sum += piece_point(piece, 0);
    return sum / static_cast<double>(pieces_.size());
}

PlanarBody PlanarBody::translated(Vec2 const& t) const
{
    return moved(0, t);
}

PlanarBody PlanarBody::moved(double angle, Vec2 const& t) const
{
    PlanarBody out = *this;
    out.anchor_ = rotate(anchor_, angle) + t;
    out.anchor_b_ = rotate(anchor_b_, angle) + t;
    for (auto& piece : out.pieces_)
    {
        if (auto* seg = std::get_if<Segment>(&piece))
        {
            seg->a = rotate(seg->a, angle) + t;
            seg->b = rotate(seg->b, angle) + t;
        }
        else
        {
            auto& arc = std::get<Arc>(piece);
            arc.center = rotate(arc.center, angle) + t;
            arc.start += angle;
            arc.end += angle;
        }
    }
    for (auto& v : out.vertices_)
    {
        v.position = rotate(v.position, angle) + t;
        v.normal_in += angle;
    }
    return out;
}

//---------------------------------------------------------------------------//
Coords CyclePiece::point(double s) const
{
    switch (kind)
    {
        case PieceKind::edge_lift: {
            Vec2 const q = a + s * (b - a);
            return {q.x(), q.y(), theta0, 0, 0};
        }
        case PieceKind::fiber_arc:
            return {a.x(), a.y(), theta0 + s * (theta1 - theta0), 0, 0};
        case PieceKind::circle_lift: {
            double const th = theta0 + s * (theta1 - theta0);
            Vec2 const q = a + radius * unit(th);
            return {q.x(), q.y(), th, 0, 0};
        }
    }
    return {};
}

Vector CyclePiece::velocity(double s) const
{
    switch (kind)
    {
        case PieceKind::edge_lift:
            return {b.x() - a.x(), b.y() - a.y(), 0, 0, 0};
        case PieceKind::fiber_arc:
            return {0, 0, theta1 - theta0, 0, 0};
        case PieceKind::circle_lift: {
            double const w = theta1 - theta0;
            double const th = theta0 + s * w;
            return {-radius * w * std::sin(th), radius * w * std::cos(th), w, 0, 0};
        }
    }
    return {};
}

Coords CyclePiece::start() const
{
    return sign > 0 ? point(0) : point(1);
}

Coords CyclePiece::finish() const
{
    return sign > 0 ? point(1) : point(0);
}

NormalCycle normal_cycle(PlanarBody const& body)
{
    NormalCycle cycle;
    auto fiber_arc = [](Vec2 const& at, double from, double jump) {
        CyclePiece p;
        p.kind = PieceKind::fiber_arc;
        p.a = at;
        p.b = at;
        // Reflex corners sweep backwards: store increasing angles and flip.
        p.theta0 = jump > 0 ? from : from + jump;
        p.theta1 = jump > 0 ? from + jump : from;
        p.sign = jump > 0 ? 1 : -1;
        return p;
    };

    if (body.kind() == PlanarBody::Kind::point)
    {
        cycle.pieces.push_back(fiber_arc(body.anchor(), 0, two_pi));
        return cycle;
    }
    if (body.kind() == PlanarBody::Kind::segment)
    {
        // Both sides of the segment, joined by half-circle fibers.
        Vec2 const a = body.anchor();
        Vec2 const b = body.anchor_end();
        double const n = piece_normal(Segment{a, b}, 0);
        CyclePiece lift;
        lift.kind = PieceKind::edge_lift;
        lift.a = a;
        lift.b = b;
        lift.theta0 = lift.theta1 = n;
        cycle.pieces.push_back(lift);
        cycle.pieces.push_back(fiber_arc(b, n, pi));
        lift.a = b;
        lift.b = a;
        lift.theta0 = lift.theta1 = n + pi;
        cycle.pieces.push_back(lift);
        cycle.pieces.push_back(fiber_arc(a, n + pi, pi));
        return cycle;
    }

    std::vector<int> vertex_after(body.pieces().size(), -1);
    for (std::size_t i = 0; i < body.vertices().size(); ++i)
        vertex_after[body.vertices()[i].after_piece] = static_cast<int>(i);

    for (std::size_t k = 0; k < body.pieces().size(); ++k)
    {
        auto const& piece = body.pieces()[k];
        CyclePiece lift;
        if (auto const* seg = std::get_if<Segment>(&piece))
        {
            lift.kind = PieceKind::edge_lift;
            lift.a = seg->a;
            lift.b = seg->b;
            lift.theta0 = lift.theta1 = piece_normal(piece, 0);
        }
        else
        {
            auto const& arc = std::get<Arc>(piece);
            lift.kind = PieceKind::circle_lift;
            lift.a = arc.center;
            lift.radius = arc.radius;
            lift.theta0 = arc.start;
            lift.theta1 = arc.end;
        }
        cycle.pieces.push_back(lift);
        if (vertex_after[k] >= 0)
        {
            auto const& v = body.vertices()[vertex_after[k]];
            cycle.pieces.push_back(fiber_arc(v.position, v.normal_in, v.jump));
        }
    }
    return cycle;
}

NormalCycle reversed(NormalCycle cycle)
{
    for (auto& p : cycle.pieces)
        p.sign = -p.sign;
    return cycle;
}

//---------------------------------------------------------------------------//
double integrate_over_cycle(NormalCycle const& cycle, DifferentialForm const& omega,
                            quad::Options const& opts)
{
    if (omega.chart()->id() != contact::cosphere_chart()->id())
        throw ChartMismatch("cycle integrand must live on the cosphere chart");
    if (omega.degree() != 1)
        throw DegreeError("cycle integrand must be a 1-form");
    if (omega.is_zero())
        return 0;
    double total = 0;
    for (auto const& piece : cycle.pieces)
    {
        quad::Counter counter{0, opts.budget};
        double const value = quad::integrate(
            [&](double s) {
                Coords const p = piece.point(s);
                Vector const v = piece.velocity(s);
                return omega(p, std::span<Vector const>(&v, 1));
            },
            0.0, 1.0, opts, &counter);
        total += piece.sign * piece.multiplicity * value;
    }
    return total;
}

double integrate_density(PlanarBody const& body, DifferentialForm const& phi,
                         quad::Options const& opts)
{
    if (phi.chart()->id() != contact::plane_chart()->id())
        throw ChartMismatch("density must live on the plane chart");
    if (phi.degree() != 2)
        throw DegreeError("density must be a 2-form");
    if (phi.is_zero() || body.dimension() < 2)
        return 0;
    Vec2 const c = body.reference_point();
    double total = 0;
    for (auto const& piece : body.pieces())
    {
        quad::Counter counter{0, opts.budget};
        auto integrand = [&](double s, double rho) {
            Vec2 const p = piece_point(piece, s);
            Vec2 const q = c + rho * (p - c);
            double const jac = rho * cross(p - c, piece_velocity(piece, s));
            quad::Values out{};
            out[0] = phi.coefficients(Coords{q.x(), q.y(), 0, 0, 0})[0] * jac;
            return out;
        };
        total += quad::integrate_rect(integrand, 1, 0, 1, 0, 1, opts, &counter)[0];
    }
    return total;
}

double integrate_over_boundary(PlanarBody const& body, DifferentialForm const& eta,
                               quad::Options const& opts)
{
    if (eta.degree() != 1 || eta.chart()->id() != contact::plane_chart()->id())
        throw DegreeError("boundary integrand must be a 1-form on the plane");
    double total = 0;
    for (auto const& piece : body.pieces())
    {
        quad::Counter counter{0, opts.budget};
        total += quad::integrate(
            [&](double s) {
                Vec2 const p = piece_point(piece, s);
                Vec2 const v = piece_velocity(piece, s);
                Vector const vv{v.x(), v.y(), 0, 0, 0};
                return eta(Coords{p.x(), p.y(), 0, 0, 0},
                           std::span<Vector const>(&vv, 1));
            },
            0.0, 1.0, opts, &counter);
    }
    return total;
}

CycleCheck check_cycle(NormalCycle const& cycle, PlanarBody const* body,
                       int test_forms, std::uint64_t seed)
{
    CycleCheck check;

    // Endpoint clusters in (x, y, θ mod 2π).
    struct Cluster
    {
        Coords at;
        int weight;
    };
    std::vector<Cluster> clusters;
    auto add = [&clusters](Coords const& p, int w) {
        for (auto& c : clusters)
        {
            double const d = std::hypot(c.at[0] - p[0], c.at[1] - p[1])
                             + std::abs(wrap_angle(c.at[2] - p[2]));
            if (d < 1e-8)
            {
                c.weight += w;
                return;
            }
        }
        clusters.push_back({p, w});
    };
    for (auto const& piece : cycle.pieces)
    {
        add(piece.start(), -piece.multiplicity);
        add(piece.finish(), piece.multiplicity);
    }
    for (auto const& c : clusters)
        check.closure_defect
            = std::max(check.closure_defect, static_cast<double>(std::abs(c.weight)));

    DifferentialForm const al = contact::alpha();
    for (auto const& piece : cycle.pieces)
    {
        for (int i = 0; i <= 10; ++i)
        {
            double const s = i / 10.0;
            Vector const v = piece.velocity(s);
            double const norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            if (norm == 0)
                continue;
            double const a = al(piece.point(s), std::span<Vector const>(&v, 1));
            check.legendrian_defect
                = std::max(check.legendrian_defect, std::abs(a) / norm);
        }
    }

    if (body)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> coef(-1, 1);
        for (int f = 0; f < test_forms; ++f)
        {
            std::array<double, 12> k{};
            for (auto& x : k)
                x = coef(rng);
            DifferentialForm const eta(contact::plane_chart(), 1, [k](Coords const& p) {
                double const x = p[0], y = p[1];
                Coefficients c{};
                c[0] = k[0] + k[1] * x + k[2] * y + k[3] * x * x + k[4] * x * y
                       + k[5] * y * y;
                c[1] = k[6] + k[7] * x + k[8] * y + k[9] * x * x + k[10] * x * y
                       + k[11] * y * y;
                return c;
            });
            double const lhs = integrate_over_cycle(cycle, contact::pull_up(eta));
            double const rhs = integrate_over_boundary(*body, eta);
            check.boundary_defect = std::max(check.boundary_defect, std::abs(lhs - rhs));
        }
    }
    return check;
}

}  // namespace valprod
