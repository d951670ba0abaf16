// Runs the eight acceptance checks and prints one PASS/FAIL line for each.
// Usage: acceptance [criterion ...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "support.hpp"
#include "valprod/contact.hpp"
#include "valprod/currents.hpp"
#include "valprod/kinematics.hpp"
#include "valprod/product.hpp"
#include "valprod/seeding.hpp"
#include "valprod/valuations.hpp"

using namespace valprod;
namespace fs = std::filesystem;

namespace
{
constexpr double pi = std::numbers::pi;

struct Result
{
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, std::string const& what)
    {
        if (!ok)
        {
            pass = false;
            detail << " FAILED[" << what << "]";
        }
    }
};

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double inf_norm(BasisVector const& v)
{
    double out = 0;
    for (double x : v)
        out = std::max(out, std::abs(x));
    return out;
}

double inf_diff(BasisVector const& a, BasisVector const& b)
{
    double out = 0;
    for (int k = 0; k < kBasisSize; ++k)
        out = std::max(out, std::abs(a[k] - b[k]));
    return out;
}

double sup_norm(DifferentialForm const& a, std::span<Coords const> grid)
{
    double out = 0;
    for (auto const& p : grid)
    {
        Coefficients const v = a.coefficients_unchecked(p);
        for (int k = 0; k < a.size(); ++k)
            out = std::max(out, std::abs(v[k]));
    }
    return out;
}

//---------------------------------------------------------------------------//
void intrinsic_volumes(Result& r)
{
    double worst = 0;
    auto compare = [&](PlanarBody const& body, BasisVector const& expected) {
        BasisVector const v = plane_basis_values(body);
        for (int k = 0; k < kBasisSize; ++k)
            worst = std::max(worst, std::abs(v[k] - expected[k]) / std::abs(expected[k]));
    };
    compare(PlanarBody::rectangle(0, 0, 1, 1), {1, 2, 1});
    for (double radius : {0.5, 1.0, 2.0})
        compare(PlanarBody::disk(Vec2(0.3, -0.1), radius), {1, pi * radius, pi * radius * radius});
    r.detail << "max rel err " << sci(worst);
    r.check(worst < 1e-6, "rel err < 1e-6");
}

//---------------------------------------------------------------------------//
// g(x, y, θ) and a scalar family for gauge changes.
DifferentialForm trig_scalar(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1, 1);
    std::array<double, 6> c{};
    for (double& x : c)
        x = u(rng);
    return DifferentialForm::scalar(contact::cosphere_chart(), [c](Coords const& p) {
        return c[0] + c[1] * p[0] * std::cos(p[2]) + c[2] * p[1] * std::sin(2 * p[2])
               + c[3] * std::sin(p[0] + p[1]) + c[4] * p[0] * p[1] + c[5] * std::cos(3 * p[2]);
    });
}

DifferentialForm times_alpha(DifferentialForm const& f)
{
    return DifferentialForm(contact::cosphere_chart(), 1, [f](Coords const& p) {
        double const g = f.coefficients_unchecked(p)[0];
        Coefficients c{};
        c[0] = g * std::cos(p[2]);
        c[1] = g * std::sin(p[2]);
        return c;
    });
}

void rumin_suite(Result& r)
{
    double const h = kDefaultStep;
    double const tol = 100 * h;
    std::vector<Coords> const grid = contact::cosphere_grid(-1, 1, -1, 1, 4, 4, 8);

    std::mt19937_64 rng(7);
    DifferentialForm const g = trig_scalar(rng);
    double const d_galpha = sup_norm(contact::rumin_D(times_alpha(g), h), grid);
    double const d_dg = sup_norm(contact::rumin_D(exterior_derivative(g, h), h), grid);

    double vert = 0, idem = 0;
    for (std::uint64_t k = 0; k < 50; ++k)
    {
        DifferentialForm const w = contact::random_form(1, stream_seed(11, k));
        vert = std::max(vert, contact::is_vertical(contact::rumin_D(w, h), grid, tol).max_residual);
        DifferentialForm const q = contact::rumin_Q(w, h);
        idem = std::max(idem, sup_norm(contact::rumin_Q(q, h) - q, grid));
    }

    // Gauge changes (ω + fα + dψ + π^*η, φ - dη) leave every evaluation fixed.
    ValuationRep base = to_rep({Space::plane, {0.3, 0.7, 1.1}});
    base.omega = base.omega + 0.5 * contact::random_form(1, 99);
    quad::Options q;
    q.rel_tol = 1e-11;
    std::vector<PlanarBody> polygons;
    std::mt19937_64 prng(5);
    for (int k = 0; k < 10; ++k)
        polygons.push_back(testing::random_convex_polygon(prng, Vec2(0.2 * k - 1, 0.1 * k), 0.8));
    double gauge = 0;
    for (int k = 0; k < 5; ++k)
    {
        DifferentialForm const f = trig_scalar(rng);
        DifferentialForm const psi = trig_scalar(rng);
        std::uniform_real_distribution<double> u(-1, 1);
        double const a = u(rng), b = u(rng), c = u(rng);
        DifferentialForm const eta(contact::plane_chart(), 1, [=](Coords const& p) {
            Coefficients e{};
            e[0] = a * p[1] * p[1] + b * std::sin(p[0]);
            e[1] = c * p[0] * p[1] + a;
            return e;
        });
        ValuationRep changed{base.omega + times_alpha(f) + exterior_derivative(psi)
                                 + contact::pull_up(eta),
                             base.phi - exterior_derivative(eta), "gauge"};
        for (auto const& poly : polygons)
        {
            double const v0 = evaluate(base, poly, q);
            double const v1 = evaluate(changed, poly, q);
            gauge = std::max(gauge, std::abs(v1 - v0) / std::abs(v0));
        }
    }

    r.detail << "D(g alpha) " << sci(d_galpha) << ", D(dg) " << sci(d_dg) << ", vertical "
             << sci(vert) << ", Q idempotence " << sci(idem) << " (tol " << sci(tol)
             << "); gauge rel err " << sci(gauge);
    r.check(d_galpha < tol && d_dg < tol && vert < tol && idem < tol, "residuals < 100 h");
    r.check(gauge < 1e-6, "gauge rel err < 1e-6");
}

//---------------------------------------------------------------------------//
std::vector<PlanarBody> const& suite()
{
    static std::vector<PlanarBody> const s = product::reference_suite();
    return s;
}

product::StructureConstants const& constants()
{
    static product::StructureConstants const c = product::product_structure_constants(suite());
    return c;
}

BasisVector unit(int k)
{
    BasisVector e{};
    e[static_cast<std::size_t>(k)] = 1;
    return e;
}

BasisVector project_product(ValuationRep const& a, ValuationRep const& b)
{
    ValuationRep const prod = product::product_rep(a, b);
    std::vector<double> values;
    std::vector<BasisVector> basis;
    for (auto const& body : suite())
    {
        values.push_back(evaluate(prod, body));
        basis.push_back(plane_basis_closed_form(body));
    }
    return product::project_onto_basis(values, basis).coords;
}

void product_suite(Result& r)
{
    auto const& c = constants();
    double scale = 1;
    for (auto const& row : c.c)
        for (auto const& v : row)
            scale = std::max(scale, inf_norm(v));

    double chi = 0, comm = 0, trunc = 0;
    for (int i = 0; i < kBasisSize; ++i)
    {
        chi = std::max({chi, inf_diff(c.c[0][i], unit(i)), inf_diff(c.c[i][0], unit(i))});
        for (int j = 0; j < kBasisSize; ++j)
        {
            double const s = std::max(1.0, inf_norm(c.c[i][j]));
            comm = std::max(comm, inf_diff(c.c[i][j], c.c[j][i]) / s);
            for (int k = 0; k < kBasisSize; ++k)
                if (k != i + j)
                    trunc = std::max(trunc, std::abs(c.c[i][j][k]) / scale);
        }
    }

    // (φ_i φ_j) φ_k against φ_i (φ_j φ_k), each inner product re-projected.
    auto const basis = plane_basis();
    double assoc = 0;
    for (int i = 1; i < kBasisSize; ++i)
    {
        for (int j = 0; j < kBasisSize; ++j)
        {
            for (int k = i; k < kBasisSize; ++k)
            {
                BasisVector const left
                    = project_product(to_rep({Space::plane, c.c[i][j]}), basis[k]);
                BasisVector const right
                    = project_product(basis[i], to_rep({Space::plane, c.c[j][k]}));
                assoc = std::max(assoc, inf_diff(left, right)
                                            / std::max({1.0, inf_norm(left), inf_norm(right)}));
            }
        }
    }

    product::TemplateOptions to;
    to.points = 1'000'000;
    auto const t = product::template_structure_constants(suite(), to);
    double oracle = 0;
    for (int i = 0; i < kBasisSize; ++i)
        for (int j = 0; j < kBasisSize; ++j)
            oracle = std::max(oracle, inf_diff(c.c[i][j], t.c[i][j])
                                          / std::max(1.0, inf_norm(c.c[i][j])));

    std::vector<Coords> const grid = contact::cosphere_grid(-0.5, 0.5, -0.5, 0.5, 2, 2, 4);
    double rumin = 0, push = 0;
    for (int i = 0; i < kBasisSize; ++i)
    {
        for (int j = i; j < kBasisSize; ++j)
        {
            ValuationRep const prod = product::product_rep(basis[i], basis[j]);
            auto const rep = product::verify_product_pair(basis[i], basis[j], prod, grid);
            rumin = std::max(rumin, rep.rumin_residual);
            push = std::max(push, rep.pushforward_residual);
        }
    }

    double const h = kDefaultStep;
    r.detail << "chi id " << sci(chi) << ", comm " << sci(comm) << ", assoc " << sci(assoc)
             << ", trunc " << sci(trunc) << ", oracle " << sci(oracle) << " (V1V1 area "
             << sci(c.c[1][1][2]) << " vs " << sci(t.c[1][1][2]) << "), pair identities "
             << sci(rumin) << "/" << sci(push);
    r.check(chi < 1e-4 && comm < 1e-4 && assoc < 1e-4 && trunc < 1e-4, "algebra < 1e-4");
    r.check(oracle <= 0.01, "oracle within 1%");
    r.check(rumin < 1e3 * h && push < 1e3 * h, "pair identities < 1e3 h");
}

//---------------------------------------------------------------------------//
void currents_suite(Result& r)
{
    std::mt19937_64 rng(2024);
    double worst = 0;
    bool weights = true;
    for (int k = 0; k < 10; ++k)
    {
        auto const [a, b] = testing::random_transversal_pair(rng);
        auto const three = currents::three_term_product(a, b);
        worst = std::max(worst, currents::compare_currents(three, currents::intersection_cycle(a, b),
                                                           50, stream_seed(3, k)));
        for (auto const& p : currents::fiber_intersection(a, b))
            weights = weights && std::abs(p.weight) == 1;
    }

    // Containment and disjointness: no crossings, and both sides agree exactly.
    PlanarBody const outer = PlanarBody::rectangle(0, 0, 2, 2);
    double edge = 0;
    for (auto const& inner : {PlanarBody::disk(Vec2(1, 1), 0.4),
                              PlanarBody::polygon({{0.5, 0.5}, {1.5, 0.6}, {1.0, 1.4}}),
                              PlanarBody::disk(Vec2(4, 4), 0.5)})
    {
        auto const three = currents::three_term_product(outer, inner);
        edge = std::max(edge, currents::compare_currents(three, currents::intersection_cycle(outer, inner),
                                                         50, 17));
    }
    r.detail << "max rel err " << sci(worst) << " over 10 pairs x 50 forms; edge cases "
             << sci(edge);
    r.check(worst < 1e-6, "rel err < 1e-6");
    r.check(weights, "weights +-1");
    r.check(edge == 0, "edge cases exact");
}

//---------------------------------------------------------------------------//
void kinematic_oracles(Result& r)
{
    using namespace kinematics;
    double worst = 0;
    auto z_of = [&](double est, double err, double oracle) {
        double const z = std::abs(est - oracle) / err;
        worst = std::max(worst, z);
        return z;
    };

    McOptions mo;
    mo.samples = 100'000;
    InvariantValuation const chi{Space::sphere, {1, 0, 0}};
    std::array<std::pair<double, double>, 5> const radii{
        {{0.3, 0.4}, {0.5, 0.5}, {0.2, 1.0}, {0.8, 0.6}, {1.2, 0.9}}};
    for (std::size_t k = 0; k < radii.size(); ++k)
    {
        mo.seed = stream_seed(1, k);
        auto const [r1, r2] = radii[k];
        auto const e = mc_kinematic_integral(chi, sphere::SphericalBody::cap({0, 0, 1}, r1),
                                             sphere::SphericalBody::cap({1, 0, 0}, r2), mo);
        r.detail << "cap z " << sci(z_of(e.value, e.error, cap_chi_oracle(r1, r2))) << "; ";
    }

    InvariantValuation const area{Space::sphere, {0, 0, 1}};
    mo.seed = stream_seed(1, 10);
    auto const p1 = sphere::regular_polygon({0, 0, 1}, 0.9, 5);
    auto const p2 = sphere::regular_polygon({0, 1, 0}, 0.6, 3, 0.2);
    auto const e = mc_kinematic_integral(area, p1, p2, mo);
    r.detail << "area z "
             << sci(z_of(e.value, e.error, p1.area() * p2.area() / (4 * pi))) << "; ";

    mo.samples = 1'000'000;
    InvariantValuation const pchi{Space::plane, {1, 0, 0}};
    for (auto const& [r1, r2] : {std::pair{0.5, 1.0}, std::pair{1.2, 0.3}})
    {
        mo.seed = stream_seed(2, static_cast<std::uint64_t>(10 * r1));
        PlanarBody const d1 = PlanarBody::disk(Vec2(0, 0), r1), d2 = PlanarBody::disk(Vec2(0, 0), r2);
        auto const pe = mc_kinematic_integral(pchi, d1, d2, mo);
        double const oracle = plane_chi_oracle(d1.area(), d1.perimeter(), d2.area(), d2.perimeter());
        r.detail << "disk z " << sci(z_of(pe.value, pe.error, oracle)) << "; ";
    }
    r.detail << "max z " << sci(worst);
    r.check(worst <= 3, "within 3 stderr");
}

//---------------------------------------------------------------------------//
void diagram_suite(Result& r)
{
    using namespace kinematics;
    McOptions mo;
    mo.samples = 100'000;
    auto const train_design = diagram_design(12, 40, stream_seed(1, 0));
    auto const held_design = diagram_design(12, 40, stream_seed(1, 1));
    mo.seed = stream_seed(1, 2);
    auto const train = diagram_fit(train_design, mo);
    mo.seed = stream_seed(1, 3);
    auto const held = diagram_fit(held_design, mo);

    auto const sol = solve_structure_constants(train.c);
    auto const res = diagram_residual(held.c, train.c, sol.m);
    auto const scan = perturbation_scan(held.c, train.c, sol.m, 0.1);
    double weakest = 1e300;
    for (auto const& p : scan)
        weakest = std::min(weakest, p.max_z);

    r.detail << train.pairs << "+" << held.pairs << " pairs; held-out max z " << sci(res.max_z)
             << ", rms z " << sci(res.rms_z) << ", marginal z " << sci(res.marginal_z)
             << "; weakest +10% perturbation max z " << sci(weakest) << " over "
             << scan.size() << " constants; m_11^2 " << sci(sol.m.c[1][1][2]) << " +- "
             << sci(sol.m.sigma[1][1][2]);
    r.check(train.pairs >= 20 && held.pairs >= 20, ">= 20 pairs");
    r.check(res.max_z <= 3 && res.marginal_z <= 3, "held-out within 3 sigma");
    r.check(weakest > 30, "perturbations exceed 10x budget");
}

//---------------------------------------------------------------------------//
void functional_suite(Result& r)
{
    product::StructureConstants const g = constants().graded();
    auto const exp = product::named_taylor("exp");
    double worst = 0;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 10; ++k)
    {
        InvariantValuation mu{Space::plane, {u(rng), u(rng), u(rng)}};
        InvariantValuation neg{Space::plane, {-mu.coords[0], -mu.coords[1], -mu.coords[2]}};
        BasisVector const prod = g.multiply(product::functional_calculus(exp, mu, g).value.coords,
                                            product::functional_calculus(exp, neg, g).value.coords);
        worst = std::max(worst, inf_diff(prod, unit(0)));
    }

    // Empirical C in |μ₁μ₂|_m ≤ C |μ₁|_m |μ₂|_{m+2} with m = 0, at two grids.
    Window const w{-0.5, 0.5, -0.5, 0.5};
    auto max_c = [&](int grid) {
        std::mt19937_64 prng(41);
        std::uniform_real_distribution<double> c(-1, 1);
        SeminormOptions so;
        so.grid = grid;
        double out = 0;
        for (int k = 0; k < 20; ++k)
        {
            ValuationRep a = to_rep({Space::plane, {c(prng), c(prng), c(prng)}});
            ValuationRep b = to_rep({Space::plane, {c(prng), c(prng), c(prng)}});
            a.omega = a.omega + 0.2 * contact::random_form(1, stream_seed(43, 2 * k));
            b.omega = b.omega + 0.2 * contact::random_form(1, stream_seed(43, 2 * k + 1));
            double const num = seminorm(product::product_rep(a, b), w, 0, so);
            double const den = seminorm(a, w, 0, so) * seminorm(b, w, 2, so);
            out = std::max(out, num / den);
        }
        return out;
    };
    double const coarse = max_c(3);
    double const fine = max_c(5);
    double const change = std::abs(fine - coarse) / coarse;

    r.detail << "exp(mu)exp(-mu) - chi " << sci(worst) << "; max C " << sci(coarse) << " (grid 3), "
             << sci(fine) << " (grid 5), change " << sci(change);
    r.check(worst < 1e-10, "exp identity < 1e-10");
    r.check(std::isfinite(coarse) && std::isfinite(fine), "C finite");
    r.check(change < 0.2, "C stable under refinement");
}

//---------------------------------------------------------------------------//
std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void determinism(Result& r)
{
    fs::path const dir = fs::temp_directory_path() / "valprod_acceptance";
    fs::create_directories(dir);
    auto write = [&](char const* name, char const* text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    std::string const caps = write(
        "caps.json", R"([{"type":"cap","center":[0,0,1],"radius":0.5},{"type":"cap","center":[1,0,0],"radius":0.5}])");
    std::string const squares = write(
        "squares.json", R"([{"type":"rectangle","min":[0,0],"max":[1,1]},{"type":"rectangle","min":[0.5,0.3],"max":[1.5,1.3]}])");
    std::string const bodies = write(
        "bodies.json", R"({"bodies":[{"type":"rectangle","min":[0,0],"max":[1,1]},{"type":"disk","center":[0,0],"radius":2}]})");

    std::string const exe = VALPROD_CLI;
    std::vector<std::pair<std::string, std::string>> const runs{
        {"intrinsic", "intrinsic --bodies " + bodies},
        {"kinematic", "kinematic --bodies " + caps + " --samples 50000 --seed 9"},
        {"ncycle", "ncycle-intersect --bodies " + squares},
        {"rumin", "rumin-check --form random --samples 10"},
        {"functional", "functional --function sin --mu 0.5*chi+0.2*v1"},
        {"product", "product chi v1 --samples 100000"},
    };
    int identical = 0;
    for (auto const& [name, args] : runs)
    {
        // Both runs write to the same path, which is part of the embedded config.
        fs::path const out = dir / (name + ".csv"), a = dir / (name + ".1.csv"),
                       b = dir / (name + ".2.csv"), c = dir / (name + ".replay.csv");
        int const s1 = std::system(("OMP_NUM_THREADS=1 " + exe + " " + args + " --out " + out.string()).c_str());
        fs::rename(out, a);
        int const s2 = std::system(("OMP_NUM_THREADS=3 " + exe + " " + args + " --out " + out.string()).c_str());
        fs::rename(out, b);
        int const s3 = std::system(("OMP_NUM_THREADS=2 " + exe + " --config " + a.string()
                                    + " --out " + c.string()).c_str());
        std::string const ta = slurp(a);
        bool const same = s1 == 0 && s2 == 0 && s3 == 0 && !ta.empty()
                          && ta.rfind("# config: ", 0) == 0 && slurp(b) == ta && slurp(c) == ta;
        identical += same;
        r.check(same, name);
    }
    r.detail << identical << "/" << runs.size()
             << " commands byte-identical across 1/3 threads and --config replay";
}

struct Criterion
{
    int id;
    char const* name;
    double limit_seconds;
    std::function<void(Result&)> run;
};

}  // namespace

int main(int argc, char** argv)
{
    std::vector<Criterion> const criteria{
        {1, "intrinsic volumes", 5, intrinsic_volumes},
        {2, "Rumin operator and gauge independence", 30, rumin_suite},
        {3, "product algebra and volume oracle", 600, product_suite},
        {4, "three-term product current", 60, currents_suite},
        {5, "kinematic oracles", 300, kinematic_oracles},
        {6, "structure constants from kinematic data", 900, diagram_suite},
        {7, "functional calculus and seminorm bound", 0, functional_suite},
        {8, "CLI determinism", 0, determinism},
    };
    std::set<int> selected;
    for (int k = 1; k < argc; ++k)
        selected.insert(std::atoi(argv[k]));

    bool all = true;
    for (auto const& c : criteria)
    {
        if (!selected.empty() && !selected.count(c.id))
            continue;
        Result r;
        auto const t0 = std::chrono::steady_clock::now();
        try
        {
            c.run(r);
        }
        catch (std::exception const& e)
        {
            r.check(false, std::string("exception: ") + e.what());
        }
        double const secs
            = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0)
            r.check(secs < c.limit_seconds, "runtime < " + sci(c.limit_seconds) + " s");
        all = all && r.pass;
        std::cout << "criterion " << c.id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << c.name
                  << " | " << r.detail.str() << " | " << sci(secs) << " s" << std::endl;
    }
    return all ? 0 : 1;
}
