#include <cmath>
#include <numbers>

#include "doctest.h"
#include "valprod/errors.hpp"
#include "valprod/kinematics.hpp"
#include "valprod/seeding.hpp"

using namespace valprod;
using namespace valprod::kinematics;
using sphere::SphericalBody;

namespace
{
constexpr double pi = std::numbers::pi;

McOptions small(std::size_t n, std::uint64_t seed = 1)
{
    McOptions o;
    o.samples = n;
    o.seed = seed;
    return o;
}
}  // namespace

TEST_CASE("seed streams")
{
    static_assert(stream_seed(1, 0) != stream_seed(1, 1));
    static_assert(stream_seed(1, 0) != stream_seed(2, 0));
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("random rotations")
{
    Rng rng(3);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    int const n = 20000;
    for (int k = 0; k < n; ++k)
    {
        Rotation const r = sample_rotation(rng);
        CHECK((r.matrix * r.matrix.transpose() - sphere::Mat3::Identity()).norm() < 1e-12);
        CHECK(r.matrix.determinant() == doctest::Approx(1));
        mean += r.matrix.col(2);
    }
    CHECK((mean / n).norm() < 0.02);
    CHECK(quaternion_matrix(Eigen::Vector4d(1, 0, 0, 0)).isIdentity());
}

TEST_CASE("serial and parallel batches agree exactly")
{
    SphericalBody const a = SphericalBody::cap({0, 0, 1}, 0.5);
    SphericalBody const b = sphere::regular_polygon({0, 1, 0}, 0.7, 4);
    McOptions par = small(20'000), ser = small(20'000);
    ser.parallel = false;
    CHECK_THROWS_AS(sphere_basis_integral(a, b, par), Unsupported);

    SphericalBody const c = SphericalBody::cap({1, 0, 0}, 0.7);
    BasisIntegral const x = sphere_basis_integral(a, c, par);
    BasisIntegral const y = sphere_basis_integral(a, c, ser);
    CHECK(x.mean == y.mean);
    CHECK(x.cov == y.cov);
}

TEST_CASE("cap Euler characteristic integral")
{
    InvariantValuation const chi{Space::sphere, {1, 0, 0}};
    SphericalBody const a = SphericalBody::cap({0, 0, 1}, 0.4);
    SphericalBody const b = SphericalBody::cap({0, 1, 0}, 0.7);
    Estimate const e = mc_kinematic_integral(chi, a, b, small(50'000));
    CHECK(std::abs(e.value - cap_chi_oracle(0.4, 0.7)) < 4 * e.error);

    // Rotating both bodies together changes nothing beyond noise.
    sphere::Mat3 const g = Eigen::AngleAxisd(1.1, Eigen::Vector3d(1, 1, 0).normalized()).toRotationMatrix();
    Estimate const f = mc_kinematic_integral(chi, a.rotated(g), b.rotated(g), small(50'000, 2));
    CHECK(std::abs(e.value - f.value) < 4 * std::hypot(e.error, f.error));

    // Standard error scales as N^(-1/2).
    Estimate const half = mc_kinematic_integral(chi, a, b, small(25'000, 3));
    CHECK(half.error / e.error == doctest::Approx(std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("space mismatch and empty sampling")
{
    InvariantValuation const chi{Space::plane, {1, 0, 0}};
    SphericalBody const a = SphericalBody::cap({0, 0, 1}, 0.4);
    CHECK_THROWS_AS(mc_kinematic_integral(chi, a, a, small(100)), ChartMismatch);
    InvariantValuation const schi{Space::sphere, {1, 0, 0}};
    CHECK_THROWS_AS(mc_kinematic_integral(schi, a, a, small(0)), Error);
}

TEST_CASE("planar kinematic formula for disks")
{
    PlanarBody const a = PlanarBody::disk(Vec2(0, 0), 0.5);
    PlanarBody const b = PlanarBody::disk(Vec2(1, 1), 0.8);
    BasisIntegral const r = plane_basis_integral(a, b, small(100'000));
    double const oracle = plane_chi_oracle(a.area(), a.perimeter(), b.area(), b.perimeter());
    CHECK(std::abs(r.mean[0] - oracle) < 4 * r.error()[0]);
    // Fubini: ∫ area(A ∩ gB) = 2π area(A) area(B).
    CHECK(std::abs(r.mean[2] - 2 * pi * a.area() * b.area()) < 4 * r.error()[2]);
    CHECK_THROWS_AS(plane_basis_integral(a, PlanarBody::segment({0, 0}, {1, 0}), small(100)), Unsupported);
}

TEST_CASE("weighted least squares recovers exact coefficients")
{
    Matrix3 truth{};
    truth[0][0] = 0.5;
    truth[1][2] = -1.5;
    truth[2][1] = -1.5;
    truth[1][1] = 0.25;
    Rng rng(9);
    std::uniform_real_distribution<double> u(0.1, 2);
    std::vector<PairData> data;
    for (int k = 0; k < 30; ++k)
    {
        PairData d;
        d.phi1 = {u(rng), u(rng), u(rng)};
        d.phi2 = {u(rng), u(rng), u(rng)};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                d.value += truth[i][j] * d.phi1[i] * d.phi2[j];
        d.error = 1e-3;
        data.push_back(d);
    }
    KinematicCoefficients const fit = fit_coefficients(data);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(fit.c[i][j] == doctest::Approx(truth[i][j]).epsilon(1e-9));
    CHECK(fit.rms_residual < 1e-9);
    data.resize(8);
    CHECK_THROWS_AS(fit_coefficients(data), FitConditioning);
}

TEST_CASE("structure constants round trip through kinematic coefficients")
{
    product::StructureConstants m;
    m.space = Space::sphere;
    for (int i = 0; i < 3; ++i)
    {
        m.c[0][i][i] = 1;
        m.c[i][0][i] = 1;
    }
    m.c[1][1] = {0.3, 0.0, 2 * pi};
    m.c[1][2] = m.c[2][1] = {0.0, 0.5, 0.0};
    Pairing const p = pairing_matrix(m);
    CHECK(p.condition < 1e6);

    auto const c = predicted_coefficients(m);
    std::array<KinematicCoefficients, 3> data{};
    for (int a = 0; a < 3; ++a)
    {
        data[a].c = c[a];
        for (auto& row : data[a].sigma)
            row.fill(1e-3);
    }
    DiagramSolution const s = solve_structure_constants(data);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            for (int q = 0; q < 3; ++q)
                CHECK(s.m.c[k][l][q] == doctest::Approx(m.c[k][l][q]).epsilon(1e-6));

    DiagramReport const r = diagram_residual(data, data, s.m);
    CHECK(r.max_z < 1e-3);

    product::StructureConstants zero;
    CHECK_THROWS_AS(pairing_matrix(zero), PairingSingular);
}

TEST_CASE("diagram design")
{
    DiagramDesign const d = diagram_design(4, 6, 1);
    CHECK(d.caps.size() == 4);
    CHECK(d.polygons.size() == 6);
    for (auto const& c : d.caps)
        CHECK(c.kind() == SphericalBody::Kind::cap);
    DiagramDesign const e = diagram_design(4, 6, 1);
    CHECK(d.polygons[0].vertices()[0] == e.polygons[0].vertices()[0]);
}
