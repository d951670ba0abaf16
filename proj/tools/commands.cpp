#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "body_io.hpp"
#include "valprod/contact.hpp"
#include "valprod/currents.hpp"
#include "valprod/errors.hpp"
#include "valprod/kinematics.hpp"
#include "valprod/product.hpp"
#include "valprod/seeding.hpp"
#include "valprod/valuations.hpp"

namespace valprod::cli
{
using nlohmann::json;

namespace
{
std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_header(RunConfig const& c)
{
    return "# config: " + config_line(c) + "\n";
}

quad::Options quad_options(RunConfig const& c)
{
    quad::Options q;
    q.rel_tol = c.tolerances.quad_tol;
    return q;
}

json const& arg(RunConfig const& c, char const* key)
{
    if (!c.args.contains(key))
        throw ParseError(std::string("missing argument '") + key + "'");
    return c.args.at(key);
}

std::string arg_string(RunConfig const& c, char const* key, std::string fallback)
{
    return c.args.contains(key) ? c.args.at(key).get<std::string>() : fallback;
}

void require_samples(RunConfig const& c)
{
    if (c.mc.N == 0)
        throw DomainError("--samples must be positive");
    if (c.mc.batch == 0)
        throw DomainError("batch size must be positive");
}

std::vector<PlanarBody> planar_pair(BodySet const& set)
{
    if (set.space != Space::plane || set.size() != 2)
        throw ParseError("expected exactly two planar bodies");
    return set.planar;
}

//---------------------------------------------------------------------------//
Outcome cmd_intrinsic(RunConfig const& c)
{
    json const& bodies = arg(c, "bodies");
    BodySet const set = parse_bodies(bodies);

    std::ostringstream out;
    out << csv_header(c) << "body,type";
    for (int k = 0; k < kBasisSize; ++k)
        out << ',' << basis_name(set.space, k);
    out << '\n';
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        BasisVector const v = set.space == Space::plane
                                  ? plane_basis_values(set.planar[i], quad_options(c))
                                  : sphere_basis_values(set.spherical[i]);
        out << i << ',' << body_type_name(bodies[i]);
        for (double x : v)
            out << ',' << num(x);
        out << '\n';
    }
    Outcome o;
    o.report = out.str();
    return o;
}

//---------------------------------------------------------------------------//
std::vector<PlanarBody> product_suite(RunConfig const& c)
{
    json const suite = c.args.contains("suite") ? c.args.at("suite") : json("reference");
    if (suite.is_string())
    {
        if (suite.get<std::string>() != "reference")
            throw ParseError("unknown suite '" + suite.get<std::string>() + "'");
        return product::reference_suite();
    }
    BodySet set = parse_bodies(suite);
    if (set.space != Space::plane)
        throw ProductUnavailable("the product is implemented on the plane only");
    return set.planar;
}

InvariantValuation planar_valuation(std::string const& name)
{
    InvariantValuation v = parse_valuation(name);
    if (v.space != Space::plane)
        throw ProductUnavailable("no representing pairs for '" + name + "'");
    return v;
}

Outcome cmd_product(RunConfig const& c)
{
    require_samples(c);
    auto const names = arg(c, "names").get<std::vector<std::string>>();
    if (names.size() != 2)
        throw ParseError("product takes exactly two valuation names");
    InvariantValuation const a = planar_valuation(names[0]);
    InvariantValuation const b = planar_valuation(names[1]);
    std::vector<PlanarBody> const suite = product_suite(c);

    product::ProductOptions po;
    po.h = c.tolerances.h;
    po.quad = quad_options(c);
    ValuationRep const prod = product::product_rep(to_rep(a), to_rep(b), po);

    std::vector<double> values;
    std::vector<BasisVector> basis;
    for (auto const& body : suite)
    {
        values.push_back(evaluate(prod, body, po.quad));
        basis.push_back(plane_basis_closed_form(body));
    }
    product::Projection const proj = product::project_onto_basis(values, basis);

    product::TemplateOptions to;
    to.points = c.mc.N;
    to.seed = c.seed;
    to.batch = c.mc.batch;
    product::StructureConstants const t = product::template_structure_constants(suite, to);
    BasisVector const oracle = t.multiply(a.coords, b.coords);
    BasisVector oracle_err{};
    for (int k = 0; k < kBasisSize; ++k)
    {
        double var = 0;
        for (int i = 0; i < kBasisSize; ++i)
            for (int j = 0; j < kBasisSize; ++j)
                var += std::pow(a.coords[i] * b.coords[j] * t.sigma[i][j][k], 2);
        oracle_err[k] = std::sqrt(var);
    }

    double scale = 1;
    for (double x : proj.coords)
        scale = std::max(scale, std::abs(x));
    double const limit = 0.01 * scale;

    Outcome o;
    std::ostringstream out;
    out << csv_header(c) << "basis,coordinate,oracle,oracle_stderr,delta,limit\n";
    for (int k = 0; k < kBasisSize; ++k)
    {
        double const delta = std::abs(proj.coords[k] - oracle[k]);
        o.passed = o.passed && delta <= limit;
        out << basis_name(Space::plane, k) << ',' << num(proj.coords[k]) << ','
            << num(oracle[k]) << ',' << num(oracle_err[k]) << ',' << num(delta) << ','
            << num(limit) << '\n';
    }
    o.report = out.str();
    return o;
}

//---------------------------------------------------------------------------//
kinematics::McOptions mc_options(RunConfig const& c, std::uint64_t seed)
{
    kinematics::McOptions mo;
    mo.samples = c.mc.N;
    mo.seed = seed;
    mo.batch = c.mc.batch;
    return mo;
}

json matrix_json(kinematics::Matrix3 const& m)
{
    json out = json::array();
    for (auto const& row : m)
        out.push_back(row);
    return out;
}

json coefficients_json(std::array<kinematics::KinematicCoefficients, kBasisSize> const& c)
{
    json out = json::array();
    for (auto const& k : c)
    {
        out.push_back({{"c", matrix_json(k.c)},
                       {"sigma", matrix_json(k.sigma)},
                       {"condition", k.condition},
                       {"rms_residual", k.rms_residual}});
    }
    return out;
}

// Residual budget in propagated standard errors, and the factor a +10%
// perturbation must exceed it by.
constexpr double kBudget = 3;
constexpr double kPerturbationFactor = 10;

Outcome cmd_diagram(RunConfig const& c)
{
    json const& d = arg(c, "diagram");
    int const caps = d.value("caps", 12);
    int const polygons = d.value("polygons", 40);

    auto const train_design = kinematics::diagram_design(caps, polygons, stream_seed(c.seed, 0));
    auto const held_design = kinematics::diagram_design(caps, polygons, stream_seed(c.seed, 1));
    auto const train = kinematics::diagram_fit(train_design, mc_options(c, stream_seed(c.seed, 2)));
    auto const held = kinematics::diagram_fit(held_design, mc_options(c, stream_seed(c.seed, 3)));

    auto const sol = kinematics::solve_structure_constants(train.c);
    auto const res = kinematics::diagram_residual(held.c, train.c, sol.m);
    auto const scan = kinematics::perturbation_scan(held.c, train.c, sol.m, 0.1);

    Outcome o;
    o.passed = res.max_z <= kBudget && res.marginal_z <= kBudget;
    json perturbations = json::array();
    for (auto const& p : scan)
    {
        bool const sensitive = p.max_z > kPerturbationFactor * kBudget;
        o.passed = o.passed && sensitive;
        perturbations.push_back({{"k", p.k},
                                 {"l", p.l},
                                 {"p", p.p},
                                 {"rms_z", p.rms_z},
                                 {"max_z", p.max_z},
                                 {"sensitive", sensitive}});
    }

    json m = json::array(), sigma = json::array();
    for (int k = 0; k < kBasisSize; ++k)
    {
        for (int l = 0; l < kBasisSize; ++l)
        {
            m.push_back(sol.m.c[k][l]);
            sigma.push_back(sol.m.sigma[k][l]);
        }
    }

    json report = {
        {"config", json(c)},
        {"pairs", {{"training", train.pairs}, {"held_out", held.pairs}}},
        {"rejected", {{"training", train.rejected}, {"held_out", held.rejected}}},
        {"training_coefficients", coefficients_json(train.c)},
        {"held_out_coefficients", coefficients_json(held.c)},
        {"structure_constants", {{"m", m}, {"sigma", sigma}, {"chi2", sol.chi2},
                                 {"iterations", sol.iterations}}},
        {"residual", {{"rms_z", res.rms_z}, {"max_z", res.max_z},
                      {"marginal_z", res.marginal_z}, {"budget", kBudget}}},
        {"perturbations", perturbations},
        {"passed", o.passed},
    };
    o.report = report.dump(2) + "\n";
    return o;
}

Outcome cmd_kinematic(RunConfig const& c)
{
    require_samples(c);
    if (c.args.contains("diagram"))
        return cmd_diagram(c);

    BodySet const set = parse_bodies(arg(c, "bodies"));
    if (set.size() != 2)
        throw ParseError("kinematic takes exactly two bodies");
    std::string const name
        = arg_string(c, "mu", set.space == Space::plane ? "chi" : "sphere-chi");
    InvariantValuation const mu = parse_valuation(name);
    kinematics::McOptions const mo = mc_options(c, c.seed);

    kinematics::Estimate const e
        = set.space == Space::plane
              ? kinematics::mc_kinematic_integral(mu, set.planar[0], set.planar[1], mo)
              : kinematics::mc_kinematic_integral(mu, set.spherical[0], set.spherical[1], mo);

    std::ostringstream out;
    out << csv_header(c) << "mu,estimate,stderr,N,seed,rejected\n"
        << name << ',' << num(e.value) << ',' << num(e.error) << ',' << e.samples << ','
        << c.seed << ',' << e.rejected << '\n';
    Outcome o;
    o.report = out.str();
    return o;
}

//---------------------------------------------------------------------------//
json pieces_json(NormalCycle const& cycle)
{
    static char const* const kinds[] = {"edge_lift", "fiber_arc", "circle_lift"};
    static char const* const tags[] = {"normal", "gt_arc", "restricted_n1", "restricted_n2"};
    json out = json::array();
    for (auto const& p : cycle.pieces)
    {
        out.push_back({{"kind", kinds[static_cast<int>(p.kind)]},
                       {"tag", tags[static_cast<int>(p.tag)]},
                       {"a", {p.a.x(), p.a.y()}},
                       {"b", {p.b.x(), p.b.y()}},
                       {"radius", p.radius},
                       {"theta0", p.theta0},
                       {"theta1", p.theta1},
                       {"sign", p.sign},
                       {"multiplicity", p.multiplicity}});
    }
    return out;
}

Outcome cmd_ncycle(RunConfig const& c)
{
    require_samples(c);
    auto const pair = planar_pair(parse_bodies(arg(c, "bodies")));
    auto const crossings = currents::fiber_intersection(pair[0], pair[1]);
    auto const three = currents::three_term_product(pair[0], pair[1]);
    auto const inter = currents::intersection_cycle(pair[0], pair[1]);
    double const err = currents::compare_currents(three, inter, static_cast<int>(c.mc.N), c.seed);

    Outcome o;
    o.passed = err <= c.tolerances.tol_eval;
    std::ostringstream out;
    out << csv_header(c)
        << "crossings,three_term_pieces,intersection_pieces,forms,max_rel_error,tolerance,pass\n"
        << crossings.size() << ',' << three.pieces.size() << ',' << inter.pieces.size() << ','
        << c.mc.N << ',' << num(err) << ',' << num(c.tolerances.tol_eval) << ','
        << (o.passed ? "true" : "false") << '\n';
    o.report = out.str();

    std::string const pieces = arg_string(c, "pieces", "");
    if (!pieces.empty())
    {
        json const j = {{"config", json(c)},
                        {"three_term", pieces_json(three)},
                        {"intersection", pieces_json(inter)}};
        o.artifacts.emplace_back(pieces, j.dump(2) + "\n");
    }
    return o;
}

//---------------------------------------------------------------------------//
// g(x, y, θ) = 1 + xy + sin x cos θ + y² sin 2θ, with its gradient.
double test_g(Coords const& p)
{
    return 1 + p[0] * p[1] + std::sin(p[0]) * std::cos(p[2])
           + p[1] * p[1] * std::sin(2 * p[2]);
}

DifferentialForm test_dg()
{
    return DifferentialForm(contact::cosphere_chart(), 1, [](Coords const& p) {
        Coefficients c{};
        c[0] = p[1] + std::cos(p[0]) * std::cos(p[2]);
        c[1] = p[0] + 2 * p[1] * std::sin(2 * p[2]);
        c[2] = -std::sin(p[0]) * std::sin(p[2]) + 2 * p[1] * p[1] * std::cos(2 * p[2]);
        return c;
    });
}

DifferentialForm test_g_alpha()
{
    return DifferentialForm(contact::cosphere_chart(), 1, [](Coords const& p) {
        Coefficients c{};
        c[0] = test_g(p) * std::cos(p[2]);
        c[1] = test_g(p) * std::sin(p[2]);
        return c;
    });
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

Outcome cmd_rumin(RunConfig const& c)
{
    std::string const form = arg_string(c, "form", "g-alpha");
    std::vector<DifferentialForm> forms;
    bool expect_closed = false;
    if (form == "g-alpha" || form == "dg")
    {
        forms.push_back(form == "dg" ? test_dg() : test_g_alpha());
        expect_closed = true;
    }
    else if (form == "beta")
        forms.push_back(contact::beta());
    else if (form == "random")
    {
        require_samples(c);
        for (std::size_t k = 0; k < c.mc.N; ++k)
            forms.push_back(contact::random_form(1, stream_seed(c.seed, k)));
    }
    else
        throw ParseError("unknown form '" + form + "' (g-alpha, dg, beta, random)");

    double const h = c.tolerances.h;
    double const tol = 100 * h;
    std::vector<Coords> const grid = contact::cosphere_grid(-1, 1, -1, 1, 4, 4, 8);
    double d_res = 0, vert = 0, idem = 0;
    for (auto const& a : forms)
    {
        DifferentialForm const q = contact::rumin_Q(a, h);
        DifferentialForm const d = contact::rumin_D(a, h);
        d_res = std::max(d_res, sup_norm(d, grid));
        vert = std::max(vert, contact::is_vertical(d, grid, tol).max_residual);
        idem = std::max(idem, sup_norm(contact::rumin_Q(q, h) - q, grid));
    }

    Outcome o;
    std::ostringstream out;
    out << csv_header(c) << "check,value,tolerance,pass\n";
    auto row = [&](char const* name, double value, bool checked) {
        bool const pass = !checked || value < tol;
        o.passed = o.passed && pass;
        out << name << ',' << num(value) << ',' << (checked ? num(tol) : "") << ','
            << (checked ? (pass ? "true" : "false") : "") << '\n';
    };
    row("D_zero", d_res, expect_closed);
    row("D_vertical", vert, true);
    row("Q_idempotent", idem, true);
    o.report = out.str();
    return o;
}

//---------------------------------------------------------------------------//
std::vector<PlanarBody> disk_suite()
{
    std::vector<PlanarBody> out;
    for (double r : {0.5, 1.0, 1.5, 2.0})
        out.push_back(PlanarBody::disk(Vec2(0.1 * r, -0.2 * r), r));
    return out;
}

json constants_json(product::StructureConstants const& t)
{
    return {{"c", t.c}, {"sigma", t.sigma}};
}

product::StructureConstants disk_constants(RunConfig const& c)
{
    json const key = {{"suite", "disks"},
                      {"h", c.tolerances.h},
                      {"quad_tol", c.tolerances.quad_tol}};
    std::string const cache = arg_string(c, "cache", "");
    if (!cache.empty() && std::filesystem::exists(cache))
    {
        json const j = read_json_file(cache);
        if (j.value("key", json()) == key)
        {
            product::StructureConstants t;
            j.at("constants").at("c").get_to(t.c);
            j.at("constants").at("sigma").get_to(t.sigma);
            return t;
        }
    }
    product::ProductOptions po;
    po.h = c.tolerances.h;
    po.quad = quad_options(c);
    auto const suite = disk_suite();
    product::StructureConstants const t = product::product_structure_constants(suite, po);
    if (!cache.empty())
    {
        std::ofstream f(cache);
        f << json{{"key", key}, {"constants", constants_json(t)}}.dump(2) << '\n';
    }
    return t;
}

Outcome cmd_functional(RunConfig const& c)
{
    InvariantValuation const mu = parse_valuation(arg_string(c, "mu", "0.3*v1"));
    if (mu.space != Space::plane)
        throw ProductUnavailable("the product is implemented on the plane only");
    product::TaylorFn f = c.args.contains("poly")
                              ? product::series_taylor(c.args.at("poly").get<std::vector<double>>())
                              : product::named_taylor(arg_string(c, "function", "exp"));

    product::StructureConstants const t = disk_constants(c);
    product::FunctionalResult const r = product::functional_calculus(f, mu, t);

    std::ostringstream out;
    out << csv_header(c) << "basis,value\n";
    for (int k = 0; k < kBasisSize; ++k)
        out << basis_name(Space::plane, k) << ',' << num(r.value.coords[k]) << '\n';
    out << "# terms: " << r.terms << " (the nilpotent part vanishes from power "
        << r.terms << " on, so the series is exact)\n";
    Outcome o;
    o.report = out.str();
    return o;
}

//---------------------------------------------------------------------------//
json body_list(json const& j)
{
    if (j.is_object() && j.contains("bodies"))
        return j.at("bodies");
    return j;
}

void write_text(std::string const& path, std::string const& text)
{
    if (path.empty() || path == "-")
    {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ParseError("cannot write '" + path + "'");
    f << text;
}

}  // namespace

std::size_t default_samples(std::string const& command)
{
    if (command == "kinematic")
        return 100'000;
    if (command == "product")
        return 1'000'000;
    if (command == "ncycle-intersect" || command == "rumin-check")
        return 50;
    return 0;
}

Outcome run(RunConfig const& config)
{
    std::string const& cmd = config.command;
    if (cmd == "intrinsic")
        return cmd_intrinsic(config);
    if (cmd == "product")
        return cmd_product(config);
    if (cmd == "kinematic")
        return cmd_kinematic(config);
    if (cmd == "ncycle-intersect")
        return cmd_ncycle(config);
    if (cmd == "rumin-check")
        return cmd_rumin(config);
    if (cmd == "functional")
        return cmd_functional(config);
    throw ParseError("unknown command '" + cmd + "'");
}

int main_entry(int argc, char** argv)
{
    CLI::App app{"Products of smooth valuations: evaluation, products, kinematic formulas."};
    app.require_subcommand(0, 1);
    app.fallthrough();

    RunConfig cfg;
    std::optional<std::size_t> samples;
    std::string out_path, config_path;
    app.add_option("--seed", cfg.seed, "Master seed");
    app.add_option("--samples", samples, "Draws, template points or test forms");
    app.add_option("--tol", cfg.tolerances.tol_eval, "Tolerance of the command's check");
    app.add_option("--quad-tol", cfg.tolerances.quad_tol, "Relative quadrature tolerance");
    app.add_option("--step", cfg.tolerances.h, "Finite-difference step");
    app.add_option("--batch", cfg.mc.batch, "Monte Carlo batch size");
    app.add_option("--out", out_path, "Report path (default stdout)");
    app.add_option("--config", config_path, "Replay a config file or report");

    std::string bodies_path, suite_path, mu, fmu, function, form, pieces, cache;
    std::vector<std::string> names;
    std::vector<double> poly;
    bool diagram = false;
    int caps = 12, polygons = 40;

    auto* intrinsic = app.add_subcommand("intrinsic", "Basis values of bodies");
    intrinsic->add_option("--bodies", bodies_path, "Body JSON file")->required();

    auto* product = app.add_subcommand("product", "Product of two invariant valuations");
    product->add_option("names", names, "Two valuation names")->expected(2)->required();
    product->add_option("--suite", suite_path, "Planar body JSON file (default: reference)");

    auto* kinematic = app.add_subcommand("kinematic", "Kinematic integral of a valuation");
    kinematic->add_option("--bodies", bodies_path, "Two-body JSON file");
    kinematic->add_option("--mu", mu, "Valuation name");
    kinematic->add_flag("--diagram", diagram, "Fit and validate S2 structure constants");
    kinematic->add_option("--caps", caps, "Caps per diagram split");
    kinematic->add_option("--polygons", polygons, "Polygons per diagram split");

    auto* ncycle = app.add_subcommand("ncycle-intersect", "Three-term product vs intersection");
    ncycle->add_option("--bodies", bodies_path, "Two-body JSON file")->required();
    ncycle->add_option("--pieces", pieces, "Write both piece lists as JSON");

    auto* rumin = app.add_subcommand("rumin-check", "Rumin operator identities");
    rumin->add_option("--form", form, "g-alpha, dg, beta or random")->default_val("g-alpha");

    auto* functional = app.add_subcommand("functional", "Function of an invariant valuation");
    functional->add_option("--mu", fmu, "Valuation")->default_val("0.3*v1");
    functional->add_option("--function", function, "exp, sin, cos, geom or log1p");
    functional->add_option("--poly", poly, "Polynomial coefficients a0 a1 ...");
    functional->add_option("--cache", cache, "Structure-constant cache file");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (!config_path.empty())
        {
            if (!app.get_subcommands().empty() || app.count("--seed") || samples
                || app.count("--tol") || app.count("--quad-tol") || app.count("--step")
                || app.count("--batch"))
                throw ParseError("--config replays a run and takes no other settings but --out");
            cfg = load_config(config_path);
        }
        else
        {
            if (app.get_subcommands().empty())
            {
                std::cerr << app.help();
                return kExitUsage;
            }
            cfg.command = app.get_subcommands().front()->get_name();
            cfg.mc.N = samples.value_or(default_samples(cfg.command));
            cfg.paths.output = out_path;

            auto inline_bodies = [&](std::string const& path, char const* key) {
                cfg.paths.input = path;
                cfg.args[key] = body_list(read_json_file(path));
            };
            if (cfg.command == "intrinsic" || cfg.command == "ncycle-intersect")
                inline_bodies(bodies_path, "bodies");
            if (cfg.command == "ncycle-intersect" && !pieces.empty())
                cfg.args["pieces"] = pieces;
            if (cfg.command == "product")
            {
                cfg.args["names"] = names;
                if (suite_path.empty())
                    cfg.args["suite"] = "reference";
                else
                    inline_bodies(suite_path, "suite");
            }
            if (cfg.command == "kinematic")
            {
                if (diagram)
                    cfg.args["diagram"] = {{"caps", caps}, {"polygons", polygons}};
                else
                {
                    if (bodies_path.empty())
                        throw ParseError("kinematic needs --bodies or --diagram");
                    inline_bodies(bodies_path, "bodies");
                }
                if (!mu.empty())
                    cfg.args["mu"] = mu;
            }
            if (cfg.command == "rumin-check")
                cfg.args["form"] = form;
            if (cfg.command == "functional")
            {
                cfg.args["mu"] = fmu;
                if (!poly.empty())
                    cfg.args["poly"] = poly;
                else
                    cfg.args["function"] = function.empty() ? "exp" : function;
                if (!cache.empty())
                    cfg.args["cache"] = cache;
            }
        }

        Outcome const o = run(cfg);
        write_text(out_path.empty() ? cfg.paths.output : out_path, o.report);
        for (auto const& [path, text] : o.artifacts)
            write_text(path, text);
        return o.passed ? kExitOk : kExitCheckFailed;
    }
    catch (Error const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (json::exception const& e)
    {
        std::cerr << "error: bad argument: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace valprod::cli
