#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "valprod/bodies.hpp"
#include "valprod/errors.hpp"

namespace valprod
{
namespace
{
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2 * pi;
constexpr double param_slack = 1e-12;

double cross(Vec2 const& u, Vec2 const& v)
{
    return u.x() * v.y() - u.y() * v.x();
}

//! Parameter of angle φ on the arc, if it lies on it.
std::optional<double> arc_param(Arc const& arc, double phi)
{
    double const span = arc.end - arc.start;
    double rel = std::fmod(phi - arc.start, two_pi);
    if (rel < 0)
        rel += two_pi;
    // Points just before the start wrap to ~2π.
    if (rel > two_pi - 1e-12 && span < two_pi - 1e-12)
        rel -= two_pi;
    double const t = rel / span;
    if (t < -param_slack || t > 1 + param_slack)
        return std::nullopt;
    return std::clamp(t, 0.0, 1.0);
}

struct Hit
{
    double s;
    double t;
};

std::vector<Hit> intersect_pieces(BoundaryPiece const& p, BoundaryPiece const& q)
{
    std::vector<Hit> hits;
    auto in_unit = [](double s) {
        return s >= -param_slack && s <= 1 + param_slack;
    };

    auto seg_arc = [&](Segment const& seg, Arc const& arc, bool swap) {
        Vec2 const d = seg.b - seg.a;
        Vec2 const f = seg.a - arc.center;
        double const A = d.squaredNorm();
        double const B = 2 * f.dot(d);
        double const C = f.squaredNorm() - arc.radius * arc.radius;
        double const disc = B * B - 4 * A * C;
        if (disc < 0)
            return;
        double const root = std::sqrt(disc);
        double const sols[2] = {(-B - root) / (2 * A), (-B + root) / (2 * A)};
        for (int i = 0; i < (disc == 0 ? 1 : 2); ++i)
        {
            double const s = sols[i];
            if (!in_unit(s))
                continue;
            Vec2 const x = seg.a + s * d - arc.center;
            auto const t = arc_param(arc, std::atan2(x.y(), x.x()));
            if (!t)
                continue;
            double const sc = std::clamp(s, 0.0, 1.0);
            hits.push_back(swap ? Hit{*t, sc} : Hit{sc, *t});
        }
    };

    if (auto const* s1 = std::get_if<Segment>(&p))
    {
        if (auto const* s2 = std::get_if<Segment>(&q))
        {
            Vec2 const d = s1->b - s1->a;
            Vec2 const e = s2->b - s2->a;
            double const denom = cross(d, e);
            if (std::abs(denom) <= 1e-14 * d.norm() * e.norm())
                return hits;
            Vec2 const w = s2->a - s1->a;
            double const s = cross(w, e) / denom;
            double const t = cross(w, d) / denom;
            if (in_unit(s) && in_unit(t))
                hits.push_back({std::clamp(s, 0.0, 1.0), std::clamp(t, 0.0, 1.0)});
            return hits;
        }
        seg_arc(*s1, std::get<Arc>(q), false);
        return hits;
    }
    auto const& a1 = std::get<Arc>(p);
    if (auto const* s2 = std::get_if<Segment>(&q))
    {
        seg_arc(*s2, a1, true);
        return hits;
    }
    auto const& a2 = std::get<Arc>(q);
    Vec2 const dc = a2.center - a1.center;
    double const dist = dc.norm();
    if (dist < 1e-14 * std::max(a1.radius, a2.radius))
        return hits;
    if (dist > a1.radius + a2.radius || dist < std::abs(a1.radius - a2.radius))
        return hits;
    double const along
        = (dist * dist + a1.radius * a1.radius - a2.radius * a2.radius) / (2 * dist);
    double const h = std::sqrt(std::max(0.0, a1.radius * a1.radius - along * along));
    Vec2 const ex = dc / dist;
    Vec2 const ey(-ex.y(), ex.x());
    for (double sgn : {-1.0, 1.0})
    {
        if (h == 0 && sgn > 0)
            break;
        Vec2 const x = a1.center + along * ex + sgn * h * ey;
        Vec2 const r1 = x - a1.center;
        Vec2 const r2 = x - a2.center;
        auto const s = arc_param(a1, std::atan2(r1.y(), r1.x()));
        auto const t = arc_param(a2, std::atan2(r2.y(), r2.x()));
        if (s && t)
            hits.push_back({*s, *t});
    }
    return hits;
}

double distance_to_piece(Vec2 const& x, BoundaryPiece const& piece)
{
    if (auto const* seg = std::get_if<Segment>(&piece))
    {
        Vec2 const d = seg->b - seg->a;
        double const s = std::clamp((x - seg->a).dot(d) / d.squaredNorm(), 0.0, 1.0);
        return (seg->a + s * d - x).norm();
    }
    auto const& arc = std::get<Arc>(piece);
    Vec2 const r = x - arc.center;
    if (r.norm() > 0 && arc_param(arc, std::atan2(r.y(), r.x())))
        return std::abs(r.norm() - arc.radius);
    return std::min((piece_point(piece, 0) - x).norm(),
                    (piece_point(piece, 1) - x).norm());
}

double distance_to_boundary(Vec2 const& x, PlanarBody const& body)
{
    double best = std::numeric_limits<double>::infinity();
    for (auto const& piece : body.pieces())
        best = std::min(best, distance_to_piece(x, piece));
    return best;
}

void require_region(PlanarBody const& body)
{
    if (body.kind() != PlanarBody::Kind::region)
        throw Unsupported("intersection is implemented for 2-dimensional bodies");
}

double pair_scale(PlanarBody const& p1, PlanarBody const& p2)
{
    Vec2 const lo = p1.bbox_min().cwiseMin(p2.bbox_min());
    Vec2 const hi = p1.bbox_max().cwiseMax(p2.bbox_max());
    return std::max((hi - lo).norm(), std::numeric_limits<double>::min());
}

}  // namespace

std::vector<BoundaryCrossing> boundary_crossings(PlanarBody const& p1,
                                                 PlanarBody const& p2)
{
    require_region(p1);
    require_region(p2);
    double const merge = 1e-12 * pair_scale(p1, p2);
    std::vector<BoundaryCrossing> out;
    for (std::size_t i = 0; i < p1.pieces().size(); ++i)
    {
        for (std::size_t j = 0; j < p2.pieces().size(); ++j)
        {
            for (auto const& hit : intersect_pieces(p1.pieces()[i], p2.pieces()[j]))
            {
                BoundaryCrossing c;
                c.point = piece_point(p1.pieces()[i], hit.s);
                c.piece1 = i;
                c.s1 = hit.s;
                c.piece2 = j;
                c.s2 = hit.t;
                c.normal1 = piece_normal(p1.pieces()[i], hit.s);
                c.normal2 = piece_normal(p2.pieces()[j], hit.t);
                // A hit at a smooth join is reported by both adjacent pieces.
                bool const dup
                    = std::any_of(out.begin(), out.end(), [&](auto const& o) {
                          return (o.point - c.point).norm() <= merge;
                      });
                if (!dup)
                    out.push_back(c);
            }
        }
    }
    return out;
}

TransversalityReport is_transversal(PlanarBody const& p1, PlanarBody const& p2,
                                    TransversalityOptions const& opts)
{
    require_region(p1);
    require_region(p2);
    TransversalityReport report;
    double const scale = pair_scale(p1, p2);
    double const dist_tol = opts.distance * scale;
    report.min_vertex_distance = std::numeric_limits<double>::infinity();
    report.min_crossing_angle = pi / 2;

    auto vertex_check = [&](PlanarBody const& a, PlanarBody const& b, int which) {
        for (std::size_t i = 0; i < a.vertices().size(); ++i)
        {
            double const d = distance_to_boundary(a.vertices()[i].position, b);
            report.min_vertex_distance = std::min(report.min_vertex_distance, d);
            if (d <= dist_tol)
            {
                std::ostringstream os;
                os << "vertex " << i << " of body " << which
                   << " lies on the other boundary (distance " << d << ")";
                report.violations.push_back(os.str());
            }
        }
    };
    vertex_check(p1, p2, 1);
    vertex_check(p2, p1, 2);

    for (std::size_t i = 0; i < p1.pieces().size(); ++i)
    {
        auto const* a1 = std::get_if<Arc>(&p1.pieces()[i]);
        if (!a1)
            continue;
        for (std::size_t j = 0; j < p2.pieces().size(); ++j)
        {
            auto const* a2 = std::get_if<Arc>(&p2.pieces()[j]);
            if (!a2)
                continue;
            if ((a1->center - a2->center).norm() <= dist_tol
                && std::abs(a1->radius - a2->radius) <= dist_tol)
            {
                report.violations.push_back("boundary arcs " + std::to_string(i)
                                            + " and " + std::to_string(j)
                                            + " lie on the same circle");
            }
        }
    }

    for (auto const& c : boundary_crossings(p1, p2))
    {
        Vec2 const t1 = piece_velocity(p1.pieces()[c.piece1], c.s1).normalized();
        Vec2 const t2 = piece_velocity(p2.pieces()[c.piece2], c.s2).normalized();
        double const angle = std::asin(std::min(1.0, std::abs(cross(t1, t2))));
        report.min_crossing_angle = std::min(report.min_crossing_angle, angle);
        if (angle <= opts.angle)
        {
            std::ostringstream os;
            os << "boundaries meet at angle " << angle << " near (" << c.point.x()
               << ", " << c.point.y() << ")";
            report.violations.push_back(os.str());
        }
    }
    report.transversal = report.violations.empty();
    return report;
}

std::vector<PlanarBody> intersect_transversal(PlanarBody const& p1,
                                              PlanarBody const& p2,
                                              TransversalityOptions const& opts)
{
    auto const report = is_transversal(p1, p2, opts);
    if (!report.transversal)
        throw NotTransversal(report.violations.front());

    auto const crossings = boundary_crossings(p1, p2);
    if (crossings.empty())
    {
        if (p2.contains(piece_point(p1.pieces().front(), 0.5)))
            return {p1};
        if (p1.contains(piece_point(p2.pieces().front(), 0.5)))
            return {p2};
        return {};
    }

    struct Sub
    {
        BoundaryPiece piece;
        Vec2 start;
        Vec2 end;
        bool ends_at_crossing;
    };
    std::vector<Sub> kept;

    auto collect = [&](PlanarBody const& body, PlanarBody const& other, bool first) {
        for (std::size_t k = 0; k < body.pieces().size(); ++k)
        {
            std::vector<double> cuts;
            for (auto const& c : crossings)
            {
                if ((first ? c.piece1 : c.piece2) == k)
                    cuts.push_back(first ? c.s1 : c.s2);
            }
            std::sort(cuts.begin(), cuts.end());
            std::vector<double> params{0.0};
            for (double s : cuts)
                if (s > 0 && s < 1)
                    params.push_back(s);
            params.push_back(1.0);
            for (std::size_t m = 0; m + 1 < params.size(); ++m)
            {
                double const s0 = params[m], s1 = params[m + 1];
                if (s1 - s0 <= 0)
                    continue;
                auto const& piece = body.pieces()[k];
                if (!other.contains(piece_point(piece, 0.5 * (s0 + s1))))
                    continue;
                BoundaryPiece sub = piece_restrict(piece, s0, s1);
                kept.push_back({sub, piece_point(sub, 0), piece_point(sub, 1),
                                m + 2 < params.size()});
            }
        }
    };
    collect(p1, p2, true);
    collect(p2, p1, false);

    double const link_tol = 1e-7 * pair_scale(p1, p2);
    std::vector<int> next(kept.size(), -1);
    for (std::size_t i = 0; i < kept.size(); ++i)
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < kept.size(); ++j)
        {
            double const d = (kept[i].end - kept[j].start).norm();
            if (d < best)
            {
                best = d;
                next[i] = static_cast<int>(j);
            }
        }
        if (best > link_tol)
            throw Error("cannot assemble the intersection boundary");
    }

    std::vector<PlanarBody> components;
    std::vector<bool> used(kept.size(), false);
    for (std::size_t s = 0; s < kept.size(); ++s)
    {
        if (used[s])
            continue;
        std::vector<BoundaryPiece> pieces;
        std::vector<VertexKind> kinds;
        int cur = static_cast<int>(s);
        while (!used[cur])
        {
            used[cur] = true;
            pieces.push_back(kept[cur].piece);
            kinds.push_back(kept[cur].ends_at_crossing ? VertexKind::crossing
                                                       : VertexKind::inherited);
            cur = next[cur];
        }
        if (cur != static_cast<int>(s))
            throw Error("intersection boundary does not close up");
        components.push_back(PlanarBody::from_pieces(std::move(pieces), std::move(kinds)));
    }
    return components;
}

}  // namespace valprod
