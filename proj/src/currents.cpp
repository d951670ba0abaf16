#include "valprod/currents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "valprod/contact.hpp"
#include "valprod/errors.hpp"
#include "valprod/seeding.hpp"

namespace valprod::currents
{
namespace
{
constexpr double pi = std::numbers::pi;

void require_transversal(PlanarBody const& p1, PlanarBody const& p2)
{
    TransversalityReport const t = is_transversal(p1, p2);
    if (!t.transversal)
    {
        std::string msg = "bodies are not transversal";
        if (!t.violations.empty())
            msg += ": " + t.violations.front();
        throw NotTransversal(msg);
    }
}

CyclePiece lift_of(BoundaryPiece const& piece, Provenance tag)
{
    CyclePiece lift;
    lift.tag = tag;
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
    return lift;
}

CyclePiece vertex_arc(Vertex const& v, Provenance tag)
{
    CyclePiece p;
    p.kind = PieceKind::fiber_arc;
    p.a = p.b = v.position;
    p.theta0 = v.jump > 0 ? v.normal_in : v.normal_in + v.jump;
    p.theta1 = v.jump > 0 ? v.normal_in + v.jump : v.normal_in;
    p.sign = v.jump > 0 ? 1 : -1;
    p.tag = tag;
    return p;
}

// N(body) restricted over `other`, split at the crossing parameters.
void restrict_over(PlanarBody const& body, PlanarBody const& other,
                   std::vector<std::vector<double>> const& cuts, Provenance tag,
                   std::vector<CyclePiece>& out)
{
    std::vector<int> vertex_after(body.pieces().size(), -1);
    for (std::size_t i = 0; i < body.vertices().size(); ++i)
        vertex_after[body.vertices()[i].after_piece] = static_cast<int>(i);

    for (std::size_t k = 0; k < body.pieces().size(); ++k)
    {
        auto const& piece = body.pieces()[k];
        std::vector<double> params{0.0};
        params.insert(params.end(), cuts[k].begin(), cuts[k].end());
        params.push_back(1.0);
        std::sort(params.begin(), params.end());
        for (std::size_t m = 0; m + 1 < params.size(); ++m)
        {
            double const s0 = params[m], s1 = params[m + 1];
            if (s1 - s0 <= 0)
                continue;
            if (!other.contains(piece_point(piece, 0.5 * (s0 + s1))))
                continue;
            out.push_back(lift_of(piece_restrict(piece, s0, s1), tag));
        }
        if (vertex_after[k] >= 0)
        {
            auto const& v = body.vertices()[static_cast<std::size_t>(vertex_after[k])];
            if (other.contains(v.position))
                out.push_back(vertex_arc(v, tag));
        }
    }
}

}  // namespace

WeightedPointSet fiber_intersection(PlanarBody const& p1, PlanarBody const& p2)
{
    require_transversal(p1, p2);
    WeightedPointSet out;
    for (auto const& c : boundary_crossings(p1, p2))
    {
        double const det = std::sin(c.normal2 - c.normal1);
        out.push_back({c.point, c.normal1, c.normal2, det > 0 ? 1 : -1});
    }
    return out;
}

std::vector<CyclePiece> gt_arcs(WeightedPointSet const& points)
{
    std::vector<CyclePiece> out;
    for (auto const& p : points)
    {
        double const delta = wrap_angle(p.theta2 - p.theta1);
        if (std::abs(std::abs(delta) - pi) < 1e-9)
            throw AntipodalCrossing("crossing with opposite normals");
        CyclePiece arc;
        arc.kind = PieceKind::fiber_arc;
        arc.a = arc.b = p.x;
        arc.theta0 = p.theta1;
        arc.theta1 = p.theta1 + delta;
        arc.sign = p.weight;
        arc.tag = Provenance::gt_arc;
        out.push_back(arc);
    }
    return out;
}

PiecewiseCurrent three_term_product(PlanarBody const& p1, PlanarBody const& p2)
{
    WeightedPointSet const points = fiber_intersection(p1, p2);
    PiecewiseCurrent out;
    out.pieces = gt_arcs(points);

    std::vector<std::vector<double>> cuts1(p1.pieces().size()), cuts2(p2.pieces().size());
    for (auto const& c : boundary_crossings(p1, p2))
    {
        cuts1[c.piece1].push_back(c.s1);
        cuts2[c.piece2].push_back(c.s2);
    }
    restrict_over(p2, p1, cuts2, Provenance::restricted_n2, out.pieces);
    restrict_over(p1, p2, cuts1, Provenance::restricted_n1, out.pieces);
    return out;
}

NormalCycle intersection_cycle(PlanarBody const& p1, PlanarBody const& p2)
{
    NormalCycle out;
    for (auto const& body : intersect_transversal(p1, p2))
    {
        NormalCycle const c = normal_cycle(body);
        out.pieces.insert(out.pieces.end(), c.pieces.begin(), c.pieces.end());
    }
    return out;
}

double compare_currents(PiecewiseCurrent const& a, PiecewiseCurrent const& b, int k,
                        std::uint64_t seed)
{
    double worst = 0;
    for (int f = 0; f < k; ++f)
    {
        DifferentialForm const omega
            = contact::random_form(1, splitmix64(seed + static_cast<std::uint64_t>(f)));
        double const va = integrate_over_cycle(a, omega);
        double const vb = integrate_over_cycle(b, omega);
        worst = std::max(worst, std::abs(va - vb) / (1 + std::abs(vb)));
    }
    return worst;
}

}  // namespace valprod::currents
