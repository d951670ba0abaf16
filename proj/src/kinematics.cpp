#include "valprod/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "valprod/errors.hpp"
#include "valprod/seeding.hpp"

namespace valprod::kinematics
{
namespace
{
constexpr double pi = std::numbers::pi;

struct BatchSums
{
    BasisVector sum{};
    std::array<BasisVector, kBasisSize> outer{};
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

using Draw = std::function<BasisVector(Rng&)>;

// Runs `draw` over seeded batches; a draw that throws valprod::Error is
// rejected. Batch sums are combined in batch order.
BasisIntegral run_batches(Draw const& draw, double measure, McOptions const& opts)
{
    if (opts.samples == 0)
        throw DomainError("kinematic integral needs at least one sample");
    std::size_t const batch = std::max<std::size_t>(opts.batch, 1);
    std::size_t const nbatch = (opts.samples + batch - 1) / batch;
    std::vector<BatchSums> parts(nbatch);

    auto run = [&](std::size_t b) {
        Rng rng(stream_seed(opts.seed, b));
        std::size_t const count = std::min(batch, opts.samples - b * batch);
        BatchSums s;
        for (std::size_t k = 0; k < count; ++k)
        {
            BasisVector v;
            try
            {
                v = draw(rng);
            }
            catch (Error const&)
            {
                ++s.rejected;
                continue;
            }
            ++s.accepted;
            for (int i = 0; i < kBasisSize; ++i)
            {
                s.sum[i] += v[i];
                for (int j = 0; j < kBasisSize; ++j)
                    s.outer[i][j] += v[i] * v[j];
            }
        }
        return s;
    };
    if (opts.parallel)
    {
        long long const nb = static_cast<long long>(nbatch);
#pragma omp parallel for schedule(dynamic)
        for (long long b = 0; b < nb; ++b)
            parts[static_cast<std::size_t>(b)] = run(static_cast<std::size_t>(b));
    }
    else
    {
        for (std::size_t b = 0; b < nbatch; ++b)
            parts[b] = run(b);
    }

    BatchSums total;
    for (auto const& p : parts)
    {
        total.accepted += p.accepted;
        total.rejected += p.rejected;
        for (int i = 0; i < kBasisSize; ++i)
        {
            total.sum[i] += p.sum[i];
            for (int j = 0; j < kBasisSize; ++j)
                total.outer[i][j] += p.outer[i][j];
        }
    }
    if (static_cast<double>(total.rejected)
        > opts.max_reject * static_cast<double>(opts.samples))
    {
        throw SamplingDegeneracy(std::to_string(total.rejected) + " of "
                                 + std::to_string(opts.samples)
                                 + " draws rejected by the intersection routine");
    }

    BasisIntegral out;
    out.samples = total.accepted;
    out.rejected = total.rejected;
    double const n = static_cast<double>(std::max<std::size_t>(total.accepted, 1));
    for (int i = 0; i < kBasisSize; ++i)
        out.mean[i] = measure * total.sum[i] / n;
    for (int i = 0; i < kBasisSize; ++i)
    {
        for (int j = 0; j < kBasisSize; ++j)
        {
            double const c = total.outer[i][j] / n - (total.sum[i] / n) * (total.sum[j] / n);
            // Covariance of the mean.
            out.cov[i][j] = measure * measure * c / std::max(1.0, n - 1);
        }
    }
    return out;
}

}  // namespace

//---------------------------------------------------------------------------//
sphere::Mat3 quaternion_matrix(Eigen::Vector4d const& q)
{
    return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

Rotation sample_rotation(Rng& rng)
{
    std::normal_distribution<double> normal;
    Eigen::Vector4d q;
    do
    {
        for (int i = 0; i < 4; ++i)
            q[i] = normal(rng);
    } while (q.norm() < 1e-12);
    q.normalize();
    return {q, quaternion_matrix(q)};
}

RigidMotion sample_motion(Vec2 const& lo, Vec2 const& hi, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RigidMotion g;
    g.translation = Vec2(lo.x() + (hi.x() - lo.x()) * unit(rng),
                         lo.y() + (hi.y() - lo.y()) * unit(rng));
    g.angle = 2 * pi * unit(rng);
    return g;
}

BasisVector BasisIntegral::error() const
{
    BasisVector e{};
    for (int i = 0; i < kBasisSize; ++i)
        e[i] = std::sqrt(std::max(0.0, cov[i][i]));
    return e;
}

BasisIntegral sphere_basis_integral(sphere::SphericalBody const& p1,
                                    sphere::SphericalBody const& p2,
                                    McOptions const& opts)
{
    // Unsupported pairs fail for every rotation; report that directly rather
    // than as rejected draws.
    try
    {
        intersect(p1, p2);
    }
    catch (Unsupported const&)
    {
        throw;
    }
    catch (Error const&)
    {
    }
    Draw const draw = [&](Rng& rng) {
        Rotation const g = sample_rotation(rng);
        return sphere_basis_values(intersect(p1, p2.rotated(g.matrix)));
    };
    return run_batches(draw, 1.0, opts);
}

BasisIntegral plane_basis_integral(PlanarBody const& p1, PlanarBody const& p2,
                                   McOptions const& opts)
{
    if (p1.kind() != PlanarBody::Kind::region || p2.kind() != PlanarBody::Kind::region)
        throw Unsupported("plane kinematic integrals need two-dimensional bodies");
    double rho = 0;
    for (Vec2 const& c : {p2.bbox_min(), p2.bbox_max(), Vec2(p2.bbox_min().x(), p2.bbox_max().y()),
                          Vec2(p2.bbox_max().x(), p2.bbox_min().y())})
        rho = std::max(rho, c.norm());
    Vec2 const lo = p1.bbox_min().array() - rho;
    Vec2 const hi = p1.bbox_max().array() + rho;
    double const measure = (hi.x() - lo.x()) * (hi.y() - lo.y()) * 2 * pi;

    Draw const draw = [&](Rng& rng) {
        RigidMotion const g = sample_motion(lo, hi, rng);
        BasisVector v{};
        for (auto const& part : intersect_transversal(p1, p2.moved(g.angle, g.translation)))
        {
            BasisVector const b = plane_basis_closed_form(part);
            for (int i = 0; i < kBasisSize; ++i)
                v[i] += b[i];
        }
        return v;
    };
    return run_batches(draw, measure, opts);
}

namespace
{
Estimate project(InvariantValuation const& mu, BasisIntegral const& b)
{
    Estimate e;
    double var = 0;
    for (int i = 0; i < kBasisSize; ++i)
    {
        e.value += mu.coords[i] * b.mean[i];
        for (int j = 0; j < kBasisSize; ++j)
            var += mu.coords[i] * mu.coords[j] * b.cov[i][j];
    }
    e.error = std::sqrt(std::max(0.0, var));
    e.samples = b.samples;
    e.rejected = b.rejected;
    return e;
}

}  // namespace

Estimate mc_kinematic_integral(InvariantValuation const& mu,
                               sphere::SphericalBody const& p1,
                               sphere::SphericalBody const& p2, McOptions const& opts)
{
    if (mu.space != Space::sphere)
        throw ChartMismatch("planar valuation in a spherical kinematic integral");
    return project(mu, sphere_basis_integral(p1, p2, opts));
}

Estimate mc_kinematic_integral(InvariantValuation const& mu, PlanarBody const& p1,
                               PlanarBody const& p2, McOptions const& opts)
{
    if (mu.space != Space::plane)
        throw ChartMismatch("spherical valuation in a planar kinematic integral");
    return project(mu, plane_basis_integral(p1, p2, opts));
}

double cap_chi_oracle(double r1, double r2)
{
    return (1 - std::cos(std::min(r1 + r2, pi))) / 2;
}

double plane_chi_oracle(double area1, double perimeter1, double area2, double perimeter2)
{
    return 2 * pi * (area1 + area2) + perimeter1 * perimeter2;
}

//---------------------------------------------------------------------------//
KinematicCoefficients fit_coefficients(std::span<PairData const> data, double max_condition)
{
    constexpr int unknowns = kBasisSize * kBasisSize;
    if (data.size() < static_cast<std::size_t>(unknowns))
        throw FitConditioning("kinematic fit needs at least nine body pairs");
    Eigen::Index const n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd A(n, unknowns);
    Eigen::VectorXd b(n);
    for (Eigen::Index r = 0; r < n; ++r)
    {
        auto const& d = data[static_cast<std::size_t>(r)];
        if (!(d.error > 0))
            throw FitConditioning("kinematic fit needs positive errors");
        for (int i = 0; i < kBasisSize; ++i)
            for (int j = 0; j < kBasisSize; ++j)
                A(r, kBasisSize * i + j) = d.phi1[i] * d.phi2[j] / d.error;
        b(r) = d.value / d.error;
    }
    Eigen::VectorXd scale(unknowns);
    for (int k = 0; k < unknowns; ++k)
        scale(k) = std::max(A.col(k).norm(), 1e-300);
    Eigen::MatrixXd const As = A * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
    auto const& s = svd.singularValues();
    KinematicCoefficients out;
    out.condition = s(unknowns - 1) > 0 ? s(0) / s(unknowns - 1)
                                        : std::numeric_limits<double>::infinity();
    if (!(out.condition <= max_condition))
        throw FitConditioning("kinematic design is ill-conditioned (condition "
                              + std::to_string(out.condition) + ")");
    Eigen::VectorXd const xs = svd.solve(b);
    Eigen::VectorXd const x = xs.cwiseQuotient(scale);
    // Covariance (AᵀA)⁻¹ in the unscaled unknowns.
    Eigen::MatrixXd const V = svd.matrixV();
    Eigen::VectorXd const inv_s2 = s.array().square().inverse();
    Eigen::MatrixXd const cov_s = V * inv_s2.asDiagonal() * V.transpose();
    for (int i = 0; i < kBasisSize; ++i)
    {
        for (int j = 0; j < kBasisSize; ++j)
        {
            int const k = kBasisSize * i + j;
            out.c[i][j] = x(k);
            out.sigma[i][j] = std::sqrt(cov_s(k, k)) / scale(k);
        }
    }
    out.rms_residual = std::sqrt((A * x - b).squaredNorm() / static_cast<double>(n));
    return out;
}

}  // namespace valprod::kinematics
