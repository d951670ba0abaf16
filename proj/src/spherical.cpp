#include "valprod/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "valprod/errors.hpp"

namespace valprod::sphere
{
namespace
{
constexpr double pi = std::numbers::pi;

double angle_between(Vec3 const& a, Vec3 const& b)
{
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

double clamp_cos(double c)
{
    return std::clamp(c, -1.0, 1.0);
}

// Clips `poly` to {x : <normal, x> ≥ 0} in place; `scratch` is reused storage.
void clip(std::vector<Vec3>& poly, Vec3 const& normal, std::vector<Vec3>& scratch)
{
    std::size_t const n = poly.size();
    if (std::all_of(poly.begin(), poly.end(), [&](Vec3 const& v) { return normal.dot(v) >= 0; }))
        return;
    scratch.clear();
    for (std::size_t i = 0; i < n; ++i)
    {
        Vec3 const& a = poly[i];
        Vec3 const& b = poly[(i + 1) % n];
        double const sa = normal.dot(a);
        double const sb = normal.dot(b);
        if (sa >= 0)
            scratch.push_back(a);
        if ((sa >= 0) != (sb >= 0))
            scratch.push_back((std::abs(sa) * b + std::abs(sb) * a).normalized());
    }
    // Drop coincident neighbours produced by vertices on the clip circle.
    poly.clear();
    for (auto const& v : scratch)
        if (poly.empty() || (v - poly.back()).norm() > 1e-13)
            poly.push_back(v);
    while (poly.size() > 1 && (poly.front() - poly.back()).norm() <= 1e-13)
        poly.pop_back();
}

}  // namespace

SphericalBody SphericalBody::polygon(std::vector<Vec3> vertices)
{
    std::size_t const n = vertices.size();
    if (n < 3)
        throw DegenerateBody("spherical polygon needs at least 3 vertices");
    for (auto& v : vertices)
    {
        double const len = v.norm();
        if (!(len > 0))
            throw InvalidBody("spherical polygon vertex is zero");
        v /= len;
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i + 1; j < n; ++j)
        {
            if ((vertices[i] + vertices[j]).norm() < 1e-9)
                throw InvalidBody("spherical polygon has antipodal vertices");
            if ((vertices[i] - vertices[j]).norm() < 1e-12)
                throw DegenerateBody("spherical polygon has repeated vertices");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        Vec3 const edge_normal = vertices[i].cross(vertices[(i + 1) % n]);
        for (std::size_t j = 0; j < n; ++j)
        {
            if (j == i || j == (i + 1) % n)
                continue;
            if (edge_normal.dot(vertices[j]) <= 0)
                throw InvalidBody("spherical polygon is not convex and counterclockwise");
        }
    }
    SphericalBody body;
    body.kind_ = Kind::polygon;
    body.vertices_ = std::move(vertices);
    return body;
}

SphericalBody SphericalBody::cap(Vec3 center, double radius)
{
    if (!(radius > 0 && radius < pi))
        throw InvalidBody("cap radius must lie in (0, π)");
    SphericalBody body;
    body.kind_ = Kind::cap;
    body.centers_ = {center.normalized()};
    body.radii_ = {radius};
    return body;
}

SphericalBody SphericalBody::whole()
{
    SphericalBody body;
    body.kind_ = Kind::whole;
    return body;
}

SphericalBody SphericalBody::empty()
{
    return SphericalBody{};
}

double SphericalBody::euler() const
{
    switch (kind_)
    {
        case Kind::empty:
            return 0;
        case Kind::whole:
            return 2;
        default:
            return 1;
    }
}

double SphericalBody::perimeter() const
{
    switch (kind_)
    {
        case Kind::empty:
        case Kind::whole:
            return 0;
        case Kind::cap:
            return 2 * pi * std::sin(radii_[0]);
        case Kind::polygon: {
            double total = 0;
            for (std::size_t i = 0; i < vertices_.size(); ++i)
                total += angle_between(vertices_[i],
                                       vertices_[(i + 1) % vertices_.size()]);
            return total;
        }
        case Kind::lens: {
            double const r1 = radii_[0], r2 = radii_[1];
            double const d = angle_between(centers_[0], centers_[1]);
            double const phi1 = std::acos(clamp_cos(
                (std::cos(r2) - std::cos(r1) * std::cos(d)) / (std::sin(r1) * std::sin(d))));
            double const phi2 = std::acos(clamp_cos(
                (std::cos(r1) - std::cos(r2) * std::cos(d)) / (std::sin(r2) * std::sin(d))));
            return 2 * phi1 * std::sin(r1) + 2 * phi2 * std::sin(r2);
        }
    }
    return 0;
}

double SphericalBody::area() const
{
    switch (kind_)
    {
        case Kind::empty:
            return 0;
        case Kind::whole:
            return 4 * pi;
        case Kind::cap:
            return 2 * pi * (1 - std::cos(radii_[0]));
        case Kind::polygon: {
            // Spherical excess.
            std::size_t const n = vertices_.size();
            double sum = 0;
            for (std::size_t i = 0; i < n; ++i)
            {
                Vec3 const& v = vertices_[i];
                Vec3 const& prev = vertices_[(i + n - 1) % n];
                Vec3 const& next = vertices_[(i + 1) % n];
                Vec3 const tp = prev - prev.dot(v) * v;
                Vec3 const tn = next - next.dot(v) * v;
                double angle = std::atan2(v.dot(tn.cross(tp)), tn.dot(tp));
                if (angle < 0)
                    angle += 2 * pi;
                sum += angle;
            }
            return sum - (static_cast<double>(n) - 2) * pi;
        }
        case Kind::lens: {
            // Gauss-Bonnet: two corners plus two circular arcs.
            double const r1 = radii_[0], r2 = radii_[1];
            double const d = angle_between(centers_[0], centers_[1]);
            double const phi1 = std::acos(clamp_cos(
                (std::cos(r2) - std::cos(r1) * std::cos(d)) / (std::sin(r1) * std::sin(d))));
            double const phi2 = std::acos(clamp_cos(
                (std::cos(r1) - std::cos(r2) * std::cos(d)) / (std::sin(r2) * std::sin(d))));
            double const corner = std::acos(clamp_cos(
                (std::cos(d) - std::cos(r1) * std::cos(r2)) / (std::sin(r1) * std::sin(r2))));
            return 2 * pi - 2 * corner - 2 * phi1 * std::cos(r1)
                   - 2 * phi2 * std::cos(r2);
        }
    }
    return 0;
}

bool SphericalBody::contains(Vec3 const& x) const
{
    switch (kind_)
    {
        case Kind::empty:
            return false;
        case Kind::whole:
            return true;
        case Kind::polygon:
            for (std::size_t i = 0; i < vertices_.size(); ++i)
                if (vertices_[i].cross(vertices_[(i + 1) % vertices_.size()]).dot(x) < 0)
                    return false;
            return true;
        case Kind::cap:
        case Kind::lens:
            for (std::size_t i = 0; i < centers_.size(); ++i)
                if (centers_[i].dot(x) < std::cos(radii_[i]) * x.norm())
                    return false;
            return true;
    }
    return false;
}

SphericalBody SphericalBody::rotated(Mat3 const& rotation) const
{
    SphericalBody out = *this;
    for (auto& v : out.vertices_)
        v = rotation * v;
    for (auto& c : out.centers_)
        c = rotation * c;
    return out;
}

SphericalBody intersect(SphericalBody const& a, SphericalBody const& b)
{
    using K = SphericalBody::Kind;
    if (a.kind() == K::empty || b.kind() == K::empty)
        return SphericalBody::empty();
    if (a.kind() == K::whole)
        return b;
    if (b.kind() == K::whole)
        return a;

    if (a.kind() == K::cap && b.kind() == K::cap)
    {
        double const r1 = a.radii()[0], r2 = b.radii()[0];
        double const d = angle_between(a.centers()[0], b.centers()[0]);
        if (d >= r1 + r2)
            return SphericalBody::empty();
        if (r1 >= r2 + d)
            return b;
        if (r2 >= r1 + d)
            return a;
        if (d + r1 + r2 > 2 * pi)
            throw Unsupported("caps covering the sphere meet in an annulus");
        SphericalBody lens = a;
        lens.kind_ = K::lens;
        lens.centers_.push_back(b.centers()[0]);
        lens.radii_.push_back(r2);
        return lens;
    }

    if (a.kind() == K::polygon && b.kind() == K::polygon)
    {
        std::vector<Vec3> poly = a.vertices();
        std::vector<Vec3> scratch;
        poly.reserve(poly.size() + b.vertices().size());
        scratch.reserve(poly.capacity());
        auto const& clipper = b.vertices();
        for (std::size_t i = 0; i < clipper.size() && poly.size() >= 3; ++i)
            clip(poly, clipper[i].cross(clipper[(i + 1) % clipper.size()]), scratch);
        if (poly.size() < 3)
            return SphericalBody::empty();
        SphericalBody out = SphericalBody::empty();
        out.kind_ = K::polygon;
        out.vertices_ = std::move(poly);
        if (out.area() <= 1e-14)
            return SphericalBody::empty();
        return out;
    }
    throw Unsupported("spherical intersection supports cap-cap and "
                      "polygon-polygon pairs only");
}

SphericalBody regular_polygon(Vec3 const& center, double radius, int k, double phase)
{
    Vec3 const c = center.normalized();
    Vec3 helper = std::abs(c.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 const e1 = (helper - helper.dot(c) * c).normalized();
    Vec3 const e2 = c.cross(e1);
    std::vector<Vec3> verts;
    for (int i = 0; i < k; ++i)
    {
        double const t = phase + 2 * pi * i / k;
        verts.push_back(std::cos(radius) * c
                        + std::sin(radius) * (std::cos(t) * e1 + std::sin(t) * e2));
    }
    return SphericalBody::polygon(std::move(verts));
}

SphericalBody needle(Vec3 const& center, double half_length, double half_width,
                     double angle)
{
    Vec3 const c = center.normalized();
    Vec3 helper = std::abs(c.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 const e1 = (helper - helper.dot(c) * c).normalized();
    Vec3 const e2 = c.cross(e1);
    Vec3 const u = std::cos(angle) * e1 + std::sin(angle) * e2;
    Vec3 const v = c.cross(u);
    auto exp_map = [&c](Vec3 const& t) {
        double const n = t.norm();
        return n < 1e-15 ? c : Vec3(std::cos(n) * c + std::sin(n) * t / n);
    };
    std::vector<Vec3> verts{exp_map(half_length * u),
                            exp_map(-half_length * u + half_width * v),
                            exp_map(-half_length * u - half_width * v)};
    if (verts[0].cross(verts[1]).dot(verts[2]) < 0)
        std::swap(verts[1], verts[2]);
    return SphericalBody::polygon(std::move(verts));
}

//---------------------------------------------------------------------------//
double constraint_defect(Covector const& x)
{
    return std::max({std::abs(x.p.norm() - 1), std::abs(x.v.norm() - 1),
                     std::abs(x.p.dot(x.v))});
}

std::pair<Vec3, Vec3> project_tangent(Covector const& x, Vec3 const& dp, Vec3 const& dv)
{
    // Rows are the gradients of |p|²/2, |v|²/2 and <p, v>.
    Eigen::Matrix<double, 3, 6> J = Eigen::Matrix<double, 3, 6>::Zero();
    J.block<1, 3>(0, 0) = x.p.transpose();
    J.block<1, 3>(1, 3) = x.v.transpose();
    J.block<1, 3>(2, 0) = x.v.transpose();
    J.block<1, 3>(2, 3) = x.p.transpose();
    Eigen::Matrix<double, 6, 1> w;
    w << dp, dv;
    Eigen::Vector3d const lambda = (J * J.transpose()).ldlt().solve(J * w);
    w -= J.transpose() * lambda;
    return {w.head<3>(), w.tail<3>()};
}

double contact_alpha(Covector const& x, Vec3 const& dp, Vec3 const&)
{
    return x.v.dot(dp);
}

Covector involution(Covector const& x)
{
    return {x.p, -x.v};
}

}  // namespace valprod::sphere
