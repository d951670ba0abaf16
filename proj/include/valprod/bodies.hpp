#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "valprod/forms.hpp"

namespace valprod
{
using Vec2 = Eigen::Vector2d;

//---------------------------------------------------------------------------//
// Boundary pieces, parametrized over s in [0, 1] in counterclockwise order.
//---------------------------------------------------------------------------//
struct Segment
{
    Vec2 a;
    Vec2 b;
};

//! Counterclockwise circular arc; the outward normal at angle φ is φ.
struct Arc
{
    Vec2 center;
    double radius = 0;
    double start = 0;
    double end = 0;
};

using BoundaryPiece = std::variant<Segment, Arc>;

Vec2 piece_point(BoundaryPiece const& piece, double s);
//! d/ds of piece_point.
Vec2 piece_velocity(BoundaryPiece const& piece, double s);
//! Outward normal angle at parameter s.
double piece_normal(BoundaryPiece const& piece, double s);
double piece_length(BoundaryPiece const& piece);
//! Restriction to the parameter range [s0, s1].
BoundaryPiece piece_restrict(BoundaryPiece const& piece, double s0, double s1);

//! Wrap an angle into (-π, π].
double wrap_angle(double a);

enum class VertexKind
{
    inherited,
    crossing,
};

struct Vertex
{
    Vec2 position;
    //! Outward normal angle on the incoming piece.
    double normal_in = 0;
    //! Signed turn of the normal, in (0, π) at convex and (-π, 0) at reflex
    //! corners.
    double jump = 0;
    VertexKind kind = VertexKind::inherited;
    //! Index of the piece this vertex terminates.
    std::size_t after_piece = 0;
};

//---------------------------------------------------------------------------//
/*!
 * Compact planar body with corners.
 *
 * Two-dimensional bodies are bounded by a simple closed counterclockwise
 * chain of pieces. Points and segments are kept as separate kinds.
 */
class PlanarBody
{
  public:
    enum class Kind
    {
        region,
        segment,
        point,
    };

    //! Counterclockwise vertices; throws InvalidBody or DegenerateBody.
    static PlanarBody polygon(std::vector<Vec2> vertices);
    static PlanarBody disk(Vec2 center, double radius);
    static PlanarBody rectangle(double x0, double y0, double x1, double y1);
    static PlanarBody point(Vec2 p);
    static PlanarBody segment(Vec2 a, Vec2 b);

    /*!
     * Region from a closed chain of pieces. Joins where the normal does
     * not turn are smooth and carry no vertex; `join_kinds[k]` labels the
     * join after piece k.
     */
    static PlanarBody from_pieces(std::vector<BoundaryPiece> pieces,
                                  std::vector<VertexKind> join_kinds = {});

    Kind kind() const { return kind_; }
    int dimension() const;

    std::vector<BoundaryPiece> const& pieces() const { return pieces_; }
    std::vector<Vertex> const& vertices() const { return vertices_; }

    //! True for regions bounded by segments only.
    bool is_polygon() const;
    //! Corner points of a polygon, counterclockwise.
    std::vector<Vec2> polygon_vertices() const;

    double area() const;
    double perimeter() const;
    //! Closed-region membership by ray casting (boundary points unreliable).
    bool contains(Vec2 const& p) const;

    Vec2 bbox_min() const;
    Vec2 bbox_max() const;
    double diameter() const;
    //! A point used as the fan center for area integrals.
    Vec2 reference_point() const;
    //! Location of a point body, or the first endpoint of a segment.
    Vec2 const& anchor() const { return anchor_; }
    //! Second endpoint of a segment body.
    Vec2 const& anchor_end() const { return anchor_b_; }

    PlanarBody translated(Vec2 const& t) const;
    //! Rotation by angle about the origin, then translation.
    PlanarBody moved(double angle, Vec2 const& t) const;

  private:
    PlanarBody() = default;
    void build_vertices(std::vector<VertexKind> const& join_kinds);

    Kind kind_ = Kind::region;
    std::vector<BoundaryPiece> pieces_;
    std::vector<Vertex> vertices_;
    Vec2 anchor_ = Vec2::Zero();
    Vec2 anchor_b_ = Vec2::Zero();
};

//---------------------------------------------------------------------------//
// Normal cycles
//---------------------------------------------------------------------------//
enum class PieceKind
{
    edge_lift,
    fiber_arc,
    circle_lift,
};

enum class Provenance
{
    normal,
    gt_arc,
    restricted_n1,
    restricted_n2,
};

/*!
 * One parametrized piece of a Legendrian 1-current in the cosphere chart.
 *
 * edge_lift: base point moves a → b at constant normal theta0.
 * fiber_arc: base point a fixed, normal sweeps theta0 → theta1.
 * circle_lift: base point a + radius·u(θ), θ sweeping theta0 → theta1.
 */
struct CyclePiece
{
    PieceKind kind = PieceKind::edge_lift;
    Vec2 a = Vec2::Zero();
    Vec2 b = Vec2::Zero();
    double radius = 0;
    double theta0 = 0;
    double theta1 = 0;
    int sign = 1;
    int multiplicity = 1;
    Provenance tag = Provenance::normal;

    Coords point(double s) const;
    Vector velocity(double s) const;
    //! Endpoints in the direction of traversal (sign applied).
    Coords start() const;
    Coords finish() const;
};

struct NormalCycle
{
    std::vector<CyclePiece> pieces;
};

NormalCycle normal_cycle(PlanarBody const& body);

//! Same pieces with every sign flipped.
NormalCycle reversed(NormalCycle cycle);

struct CycleCheck
{
    //! Largest net weight left at any endpoint cluster.
    double closure_defect = 0;
    //! sup |α(velocity)| / |velocity| over sampled parameters.
    double legendrian_defect = 0;
    //! max |∫_N π^*η - ∫_∂P η| over random base 1-forms η.
    double boundary_defect = 0;
};

CycleCheck check_cycle(NormalCycle const& cycle, PlanarBody const* body,
                       int test_forms = 20, std::uint64_t seed = 1);

//! Σ sign · multiplicity · ∫ ω over the pieces.
double integrate_over_cycle(NormalCycle const& cycle, DifferentialForm const& omega,
                            quad::Options const& opts = {});

//! ∫_P φ by a signed fan over the boundary pieces.
double integrate_density(PlanarBody const& body, DifferentialForm const& phi,
                         quad::Options const& opts = {});

//! ∫_∂P η for a 1-form η on the base.
double integrate_over_boundary(PlanarBody const& body, DifferentialForm const& eta,
                               quad::Options const& opts = {});

//---------------------------------------------------------------------------//
// Transversality and intersection
//---------------------------------------------------------------------------//
struct TransversalityOptions
{
    //! Relative to the diameter of the pair.
    double distance = 1e-9;
    //! Minimum crossing angle in radians.
    double angle = 1e-6;
};

struct TransversalityReport
{
    bool transversal = true;
    double min_vertex_distance = 0;
    double min_crossing_angle = 0;
    std::vector<std::string> violations;
};

struct BoundaryCrossing
{
    Vec2 point;
    std::size_t piece1 = 0;
    double s1 = 0;
    std::size_t piece2 = 0;
    double s2 = 0;
    //! Outward normal angles of the two boundaries at the crossing.
    double normal1 = 0;
    double normal2 = 0;
};

std::vector<BoundaryCrossing> boundary_crossings(PlanarBody const& p1,
                                                 PlanarBody const& p2);

TransversalityReport is_transversal(PlanarBody const& p1, PlanarBody const& p2,
                                    TransversalityOptions const& opts = {});

/*!
 * Components of p1 ∩ p2; empty when the bodies are disjoint.
 * Throws NotTransversal.
 */
std::vector<PlanarBody> intersect_transversal(PlanarBody const& p1,
                                              PlanarBody const& p2,
                                              TransversalityOptions const& opts
                                              = {});

}  // namespace valprod
