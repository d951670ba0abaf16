#include <filesystem>
#include <fstream>
#include <sstream>

#include "body_io.hpp"
#include "commands.hpp"
#include "doctest.h"
#include "run_config.hpp"
#include "valprod/errors.hpp"

using namespace valprod;
using namespace valprod::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
fs::path scratch(std::string const& name)
{
    fs::path const dir = fs::temp_directory_path() / "valprod_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string write(std::string const& name, std::string const& text)
{
    fs::path const p = scratch(name);
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(std::string const& path)
{
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int call(std::vector<std::string> args)
{
    args.insert(args.begin(), "valprod");
    std::vector<char*> argv;
    for (auto& a : args)
        argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
}

char const* const kCaps
    = R"([{"type":"cap","center":[0,0,1],"radius":0.5},{"type":"cap","center":[1,0,0],"radius":0.5}])";
}  // namespace

TEST_CASE("config round trip")
{
    RunConfig c;
    c.command = "kinematic";
    c.seed = 42;
    c.mc.N = 1000;
    c.args["mu"] = "sphere-chi";
    RunConfig const d = json::parse(config_line(c)).get<RunConfig>();
    CHECK(config_line(d) == config_line(c));
    CHECK_THROWS_AS(json::parse(R"({"sed": 1})").get<RunConfig>(), ParseError);
    CHECK_THROWS_AS(json::parse(R"({"mc": {"n": 1}})").get<RunConfig>(), ParseError);
}

TEST_CASE("body files")
{
    BodySet const s = parse_bodies(json::parse(R"({"bodies":[{"type":"disk","center":[0,0],"radius":1},
        {"type":"polygon","vertices":[[0,0],[1,0],[0,1]]}]})"));
    CHECK(s.space == Space::plane);
    CHECK(s.size() == 2);
    CHECK(parse_bodies(json::parse(kCaps)).space == Space::sphere);
    CHECK_THROWS_AS(parse_bodies(json::parse(R"([{"type":"disk","center":[0,0],"radius":1},
        {"type":"cap","center":[0,0,1],"radius":0.5}])")), ParseError);
    CHECK_THROWS_AS(parse_bodies(json::parse(R"([{"type":"blob"}])")), ParseError);
    CHECK_THROWS_AS(parse_bodies(json::parse(R"([{"type":"disk","center":[0,0]}])")), ParseError);
    CHECK_THROWS_AS(parse_bodies(json::parse("[]")), ParseError);
}

TEST_CASE("intrinsic report")
{
    std::string const bodies
        = write("square.json", R"([{"type":"rectangle","min":[0,0],"max":[1,1]}])");
    std::string const out = scratch("square.csv").string();
    CHECK(call({"intrinsic", "--bodies", bodies, "--out", out}) == kExitOk);
    std::string const text = slurp(out);
    CHECK(text.rfind("# config: ", 0) == 0);
    CHECK(text.find("body,type,chi,v1,area\n0,rectangle,1,2,1\n") != std::string::npos);
}

TEST_CASE("input and usage errors exit with 2")
{
    std::string const bad = write("bad.json", "{\"bodies\": [");
    CHECK(call({"intrinsic", "--bodies", bad}) == kExitUsage);
    std::string const caps = write("caps.json", kCaps);
    CHECK(call({"kinematic", "--bodies", caps, "--samples", "0"}) == kExitUsage);
    CHECK(call({"product", "chi", "nope"}) == kExitUsage);
    CHECK(call({"product", "sphere-chi", "chi"}) == kExitUsage);
    CHECK(call({"rumin-check", "--form", "nope"}) == kExitUsage);
    CHECK(call({"frobnicate"}) == kExitUsage);
    CHECK(call({}) == kExitUsage);
    CHECK(call({"--config", scratch("missing.csv").string()}) == kExitUsage);
}

TEST_CASE("kinematic runs are reproducible and replayable")
{
    std::string const caps = write("caps.json", kCaps);
    std::string const out = scratch("k.csv").string();
    CHECK(call({"kinematic", "--bodies", caps, "--samples", "20000", "--seed", "5", "--out", out}) == kExitOk);
    std::string const first = slurp(out);
    CHECK(first.find("mu,estimate,stderr,N,seed,rejected\nsphere-chi,") != std::string::npos);

    RunConfig const c = load_config(out);
    CHECK(c.seed == 5);
    CHECK(c.mc.N == 20000);
    CHECK(run(c).report == first);

    std::string const replay = scratch("k2.csv").string();
    CHECK(call({"--config", out, "--out", replay}) == kExitOk);
    CHECK(slurp(replay) == first);
    CHECK(call({"--config", out, "--seed", "3"}) == kExitUsage);
}

TEST_CASE("check failures exit with 1")
{
    std::string const squares = write(
        "squares.json",
        R"([{"type":"rectangle","min":[0,0],"max":[1,1]},{"type":"rectangle","min":[0.5,0.3],"max":[1.5,1.3]}])");
    std::string const out = scratch("n.csv").string();
    CHECK(call({"ncycle-intersect", "--bodies", squares, "--out", out}) == kExitOk);
    CHECK(call({"ncycle-intersect", "--bodies", squares, "--tol", "-1", "--out", out}) == kExitCheckFailed);
}

TEST_CASE("rumin-check and functional")
{
    std::string const out = scratch("r.csv").string();
    CHECK(call({"rumin-check", "--form", "dg", "--out", out}) == kExitOk);
    CHECK(slurp(out).find("D_zero,") != std::string::npos);

    RunConfig c;
    c.command = "functional";
    c.args = {{"mu", "0.3*v1"}, {"poly", {1.0, 1.0}}};
    CHECK_THROWS_AS(([&] {
                        RunConfig s = c;
                        s.args["mu"] = "sphere-area";
                        return run(s);
                    }()),
                    ProductUnavailable);
}
