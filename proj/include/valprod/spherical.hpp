#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace valprod::sphere
{
class SphericalBody;
SphericalBody intersect(SphericalBody const& a, SphericalBody const& b);

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

//---------------------------------------------------------------------------//
/*!
 * Geodesically convex region of the unit sphere.
 *
 * Polygons have counterclockwise vertices (viewed from outside) joined by
 * minor great-circle arcs. A lens is the transversal intersection of two
 * caps.
 */
class SphericalBody
{
  public:
    enum class Kind
    {
        empty,
        polygon,
        cap,
        lens,
        whole,
    };

    static SphericalBody polygon(std::vector<Vec3> vertices);
    //! Cap of angular radius in (0, π) about a unit center.
    static SphericalBody cap(Vec3 center, double radius);
    static SphericalBody whole();
    static SphericalBody empty();

    Kind kind() const { return kind_; }
    bool is_empty() const { return kind_ == Kind::empty; }

    std::vector<Vec3> const& vertices() const { return vertices_; }
    //! Caps making up a cap (one) or lens (two).
    std::vector<Vec3> const& centers() const { return centers_; }
    std::vector<double> const& radii() const { return radii_; }

    //! Euler characteristic.
    double euler() const;
    //! Geodesic boundary length.
    double perimeter() const;
    double area() const;
    bool contains(Vec3 const& x) const;

    SphericalBody rotated(Mat3 const& rotation) const;

  private:
    SphericalBody() = default;
    friend SphericalBody intersect(SphericalBody const&, SphericalBody const&);

    Kind kind_ = Kind::empty;
    std::vector<Vec3> vertices_;
    std::vector<Vec3> centers_;
    std::vector<double> radii_;
};

/*!
 * a ∩ b for the supported pairs: cap-cap, polygon-polygon, and anything
 * with the whole sphere or the empty body. Throws Unsupported otherwise.
 */
SphericalBody intersect(SphericalBody const& a, SphericalBody const& b);

//! Regular k-gon inscribed in the circle of angular radius r about center.
SphericalBody regular_polygon(Vec3 const& center, double radius, int k,
                              double phase = 0);

/*!
 * Thin isosceles triangle: apex at geodesic distance `half_length` from the
 * center along `angle`, base of half-width `half_width` the same distance
 * behind it.
 */
SphericalBody needle(Vec3 const& center, double half_length, double half_width,
                     double angle);

//---------------------------------------------------------------------------//
// Cosphere bundle of S², embedded as {(p, v) : |p| = |v| = 1, <p, v> = 0}.
//---------------------------------------------------------------------------//
struct Covector
{
    Vec3 p;
    Vec3 v;
};

//! Largest violation of the three defining constraints.
double constraint_defect(Covector const& x);

//! Orthogonal projection of (dp, dv) onto the tangent space at x.
std::pair<Vec3, Vec3> project_tangent(Covector const& x, Vec3 const& dp,
                                      Vec3 const& dv);

//! Contact form α(dp, dv) = <v, dp>.
double contact_alpha(Covector const& x, Vec3 const& dp, Vec3 const& dv);

//! (p, v) ↦ (p, -v).
Covector involution(Covector const& x);

}  // namespace valprod::sphere
