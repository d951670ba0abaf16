#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "valprod/errors.hpp"
#include "valprod/kinematics.hpp"
#include "valprod/seeding.hpp"

namespace valprod::kinematics
{
namespace
{
constexpr double pi = std::numbers::pi;
// c is invariant under m → λm, so the χ rows are held at the unit and only
// m_kl^p with 1 ≤ k ≤ l are fitted.
constexpr int kFreePairs = (kBasisSize - 1) * kBasisSize / 2;
constexpr int kUnknowns = kFreePairs * kBasisSize;

bool is_unit_row(int k, int l)
{
    return k == 0 || l == 0;
}

using product::StructureConstants;

StructureConstants unpack(Eigen::VectorXd const& x)
{
    StructureConstants m;
    m.space = Space::sphere;
    for (int k = 0; k < kBasisSize; ++k)
    {
        m.c[0][k][k] = 1;
        m.c[k][0][k] = 1;
    }
    int idx = 0;
    for (int k = 0; k < kBasisSize; ++k)
    {
        for (int l = k; l < kBasisSize; ++l)
        {
            for (int p = 0; p < kBasisSize; ++p)
            {
                if (is_unit_row(k, l))
                    continue;
                m.c[k][l][p] = x(idx);
                m.c[l][k][p] = x(idx);
                ++idx;
            }
        }
    }
    return m;
}

Eigen::VectorXd pack(StructureConstants const& m)
{
    Eigen::VectorXd x(kUnknowns);
    int idx = 0;
    for (int k = 0; k < kBasisSize; ++k)
        for (int l = k; l < kBasisSize; ++l)
            for (int p = 0; p < kBasisSize; ++p)
                if (!is_unit_row(k, l))
                    x(idx++) = 0.5 * (m.c[k][l][p] + m.c[l][k][p]);
    return x;
}

Eigen::Matrix3d to_eigen(Matrix3 const& a)
{
    Eigen::Matrix3d out;
    for (int i = 0; i < kBasisSize; ++i)
        for (int j = 0; j < kBasisSize; ++j)
            out(i, j) = a[i][j];
    return out;
}

double floor_sigma(double s, double scale)
{
    return std::max(s, 1e-12 * std::max(scale, 1.0));
}

struct DiagramFunctor
{
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum
    {
        InputsAtCompileTime = Eigen::Dynamic,
        ValuesAtCompileTime = Eigen::Dynamic
    };

    std::array<KinematicCoefficients, kBasisSize> const* data;
    double scale;

    int inputs() const { return kUnknowns; }
    int values() const { return kBasisSize * kBasisSize * kBasisSize; }

    int operator()(Eigen::VectorXd const& x, Eigen::VectorXd& r) const
    {
        r.resize(values());
        std::array<Matrix3, kBasisSize> pred;
        try
        {
            pred = predicted_coefficients(unpack(x));
        }
        catch (PairingSingular const&)
        {
            r.setConstant(1e10);
            return 0;
        }
        int idx = 0;
        for (int a = 0; a < kBasisSize; ++a)
        {
            for (int i = 0; i < kBasisSize; ++i)
            {
                for (int j = 0; j < kBasisSize; ++j)
                {
                    auto const& d = (*data)[a];
                    r(idx++) = (pred[a][i][j] - d.c[i][j]) / floor_sigma(d.sigma[i][j], scale);
                }
            }
        }
        return 0;
    }
};

}  // namespace

BasisVector sphere_whole_values()
{
    return sphere_basis_values(sphere::SphericalBody::whole());
}

Pairing pairing_matrix(StructureConstants const& m)
{
    BasisVector const e = sphere_whole_values();
    Pairing out;
    for (int i = 0; i < kBasisSize; ++i)
    {
        for (int j = 0; j < kBasisSize; ++j)
        {
            out.g(i, j) = 0;
            for (int p = 0; p < kBasisSize; ++p)
                out.g(i, j) += m.c[i][j][p] * e[p];
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(out.g);
    auto const& s = svd.singularValues();
    out.condition = s(2) > 0 ? s(0) / s(2) : std::numeric_limits<double>::infinity();
    if (!(out.condition < 1e12))
        throw PairingSingular("Poincaré pairing is singular (condition "
                              + std::to_string(out.condition) + ")");
    return out;
}

std::array<Matrix3, kBasisSize> predicted_coefficients(StructureConstants const& m)
{
    Eigen::Matrix3d const g = pairing_matrix(m).g;
    Eigen::Matrix3d const ginv = g.inverse();
    std::array<Matrix3, kBasisSize> out{};
    for (int a = 0; a < kBasisSize; ++a)
    {
        Eigen::Matrix3d h;
        for (int k = 0; k < kBasisSize; ++k)
        {
            for (int l = 0; l < kBasisSize; ++l)
            {
                h(k, l) = 0;
                for (int p = 0; p < kBasisSize; ++p)
                    h(k, l) += m.c[k][l][p] * g(a, p);
            }
        }
        Eigen::Matrix3d const c = ginv * h * ginv.transpose();
        for (int i = 0; i < kBasisSize; ++i)
            for (int j = 0; j < kBasisSize; ++j)
                out[a][i][j] = c(i, j);
    }
    return out;
}

DiagramSolution solve_structure_constants(std::array<KinematicCoefficients, kBasisSize> const& c)
{
    // Closed form: c^χ = g⁻¹, and H^a = g c^a g gives m through g.
    Eigen::Matrix3d cchi = to_eigen(c[0].c);
    cchi = 0.5 * (cchi + cchi.transpose());
    Eigen::FullPivLU<Eigen::Matrix3d> lu(cchi);
    if (!lu.isInvertible())
        throw PairingSingular("χ kinematic coefficients are singular");
    Eigen::Matrix3d const g = lu.inverse();
    Eigen::Matrix3d const ginv = g.inverse();
    std::array<Eigen::Matrix3d, kBasisSize> h;
    for (int a = 0; a < kBasisSize; ++a)
        h[a] = g * to_eigen(c[a].c) * g;
    StructureConstants start;
    start.space = Space::sphere;
    for (int k = 0; k < kBasisSize; ++k)
        for (int l = 0; l < kBasisSize; ++l)
            for (int p = 0; p < kBasisSize; ++p)
                for (int a = 0; a < kBasisSize; ++a)
                    start.c[k][l][p] += ginv(p, a) * h[a](k, l);

    double scale = 0;
    for (auto const& k : c)
        for (auto const& row : k.c)
            for (double v : row)
                scale = std::max(scale, std::abs(v));

    DiagramFunctor functor{&c, scale};
    Eigen::NumericalDiff<DiagramFunctor, Eigen::Central> numeric(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<DiagramFunctor, Eigen::Central>> lm(numeric);
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 4000;
    Eigen::VectorXd x = pack(start);
    lm.minimize(x);

    DiagramSolution out;
    out.m = unpack(x);
    out.iterations = static_cast<int>(lm.iter);
    Eigen::VectorXd r;
    functor(x, r);
    out.chi2 = r.squaredNorm();

    // Linearized covariance (JᵀJ)⁻¹ of the weighted fit.
    Eigen::MatrixXd jac(functor.values(), kUnknowns);
    numeric.df(x, jac);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinV);
    Eigen::VectorXd inv_s2 = svd.singularValues().array().square().inverse();
    for (Eigen::Index k = 0; k < inv_s2.size(); ++k)
        if (!std::isfinite(inv_s2(k)))
            inv_s2(k) = 0;
    Eigen::MatrixXd const cov = svd.matrixV() * inv_s2.asDiagonal() * svd.matrixV().transpose();
    int idx = 0;
    for (int k = 0; k < kBasisSize; ++k)
    {
        for (int l = k; l < kBasisSize; ++l)
        {
            for (int p = 0; p < kBasisSize; ++p)
            {
                if (is_unit_row(k, l))
                    continue;
                double const s = std::sqrt(std::max(0.0, cov(idx, idx)));
                out.m.sigma[k][l][p] = s;
                out.m.sigma[l][k][p] = s;
                ++idx;
            }
        }
    }
    return out;
}

DiagramReport diagram_residual(std::array<KinematicCoefficients, kBasisSize> const& held_out,
                                 std::array<KinematicCoefficients, kBasisSize> const& training,
                                 StructureConstants const& m)
{
    auto const pred = predicted_coefficients(m);
    BasisVector const e = sphere_whole_values();
    DiagramReport out;
    double sum2 = 0;
    for (int a = 0; a < kBasisSize; ++a)
    {
        for (int i = 0; i < kBasisSize; ++i)
        {
            for (int j = 0; j < kBasisSize; ++j)
            {
                double const s1 = held_out[a].sigma[i][j];
                double const s2 = training[a].sigma[i][j];
                double const s = std::sqrt(s1 * s1 + s2 * s2);
                double const z = (held_out[a].c[i][j] - pred[a][i][j]) / std::max(s, 1e-300);
                out.z.push_back(z);
                sum2 += z * z;
                out.max_z = std::max(out.max_z, std::abs(z));
            }
            // Σ_j c^a_ij φ_j(S²) = δ_ia: integrating over all of gP₂ = S².
            double marginal = a == i ? -1.0 : 0.0;
            double var = 0;
            for (int j = 0; j < kBasisSize; ++j)
            {
                marginal += held_out[a].c[i][j] * e[j];
                var += e[j] * e[j] * held_out[a].sigma[i][j] * held_out[a].sigma[i][j];
            }
            out.marginal_z
                = std::max(out.marginal_z, std::abs(marginal) / std::sqrt(std::max(var, 1e-300)));
        }
    }
    out.rms_z = std::sqrt(sum2 / static_cast<double>(out.z.size()));
    return out;
}

std::vector<Perturbation> perturbation_scan(std::array<KinematicCoefficients, kBasisSize> const& held_out,
                                            std::array<KinematicCoefficients, kBasisSize> const& training,
                                            StructureConstants const& m, double fraction)
{
    std::vector<Perturbation> out;
    for (int k = 0; k < kBasisSize; ++k)
    {
        for (int l = k; l < kBasisSize; ++l)
        {
            for (int p = 0; p < kBasisSize; ++p)
            {
                double const v = m.c[k][l][p];
                bool const held = is_unit_row(k, l) && v != 0;
                bool const significant = std::abs(v) > 10 * m.sigma[k][l][p] && v != 0;
                if (!held && !significant)
                    continue;
                StructureConstants q = m;
                q.c[k][l][p] = v * (1 + fraction);
                q.c[l][k][p] = q.c[k][l][p];
                DiagramReport const r = diagram_residual(held_out, training, q);
                out.push_back({k, l, p, r.rms_z, r.max_z});
            }
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
DiagramDesign diagram_design(int caps, int polygons, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto direction = [&] {
        std::normal_distribution<double> normal;
        sphere::Vec3 c;
        do
        {
            c = sphere::Vec3(normal(rng), normal(rng), normal(rng));
        } while (c.norm() < 1e-12);
        return sphere::Vec3(c.normalized());
    };

    DiagramDesign out;
    // Sizes are stratified so every design spans small and large bodies.
    for (int k = 0; k < caps; ++k)
    {
        double const s = (k + unit(rng)) / caps;
        sphere::Vec3 const c = direction();
        out.caps.push_back(sphere::SphericalBody::cap(c, 0.1 + 1.3 * s));
    }
    for (int k = 0; k < polygons; ++k)
    {
        double const s = (k + unit(rng)) / polygons;
        sphere::Vec3 const c = direction();
        if (k % 3 != 2)
        {
            double const width = 0.02 + 0.05 * unit(rng);
            out.polygons.push_back(
                sphere::needle(c, 0.3 + 1.15 * s, width, 2 * pi * unit(rng)));
        }
        else
        {
            out.polygons.push_back(
                sphere::regular_polygon(c, 0.2 + 1.0 * s, 3 + k % 3, unit(rng)));
        }
    }
    return out;
}

DiagramFit diagram_fit(DiagramDesign const& design, McOptions const& opts)
{
    std::array<std::vector<PairData>, kBasisSize> data;
    DiagramFit out;
    std::uint64_t index = 0;
    for (auto const* family : {&design.caps, &design.polygons})
    {
        for (auto const& a : *family)
        {
            for (auto const& b : *family)
            {
                McOptions o = opts;
                o.seed = stream_seed(opts.seed, index++);
                BasisIntegral const integral = sphere_basis_integral(a, b, o);
                BasisVector const err = integral.error();
                for (int mu = 0; mu < kBasisSize; ++mu)
                {
                    data[mu].push_back({sphere_basis_values(a), sphere_basis_values(b),
                                        integral.mean[mu], err[mu]});
                }
                out.rejected += integral.rejected;
            }
        }
    }
    out.pairs = static_cast<std::size_t>(index);
    for (int mu = 0; mu < kBasisSize; ++mu)
        out.c[mu] = fit_coefficients(data[mu]);
    return out;
}

}  // namespace valprod::kinematics
