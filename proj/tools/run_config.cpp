#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include "valprod/errors.hpp"

namespace valprod::cli
{
using nlohmann::json;

void to_json(json& j, RunConfig const& c)
{
    j = json{
        {"command", c.command},
        {"seed", c.seed},
        {"tolerances",
         {{"h", c.tolerances.h},
          {"quad_tol", c.tolerances.quad_tol},
          {"tol_eval", c.tolerances.tol_eval}}},
        {"mc", {{"N", c.mc.N}, {"batch", c.mc.batch}}},
        {"paths", {{"input", c.paths.input}, {"output", c.paths.output}}},
        {"args", c.args},
    };
}

namespace
{
void check_keys(json const& j, std::initializer_list<char const*> allowed, char const* where)
{
    if (!j.is_object())
        throw ParseError(std::string(where) + " must be a JSON object");
    for (auto const& [key, value] : j.items())
    {
        bool ok = false;
        for (char const* a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw ParseError("unknown key '" + key + "' in " + where);
    }
}

template<class T>
void read(json const& j, char const* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

}  // namespace

void from_json(json const& j, RunConfig& c)
{
    check_keys(j, {"command", "seed", "tolerances", "mc", "paths", "args"}, "config");
    try
    {
        read(j, "command", c.command);
        read(j, "seed", c.seed);
        if (j.contains("tolerances"))
        {
            auto const& t = j.at("tolerances");
            check_keys(t, {"h", "quad_tol", "tol_eval"}, "tolerances");
            read(t, "h", c.tolerances.h);
            read(t, "quad_tol", c.tolerances.quad_tol);
            read(t, "tol_eval", c.tolerances.tol_eval);
        }
        if (j.contains("mc"))
        {
            auto const& m = j.at("mc");
            check_keys(m, {"N", "batch"}, "mc");
            read(m, "N", c.mc.N);
            read(m, "batch", c.mc.batch);
        }
        if (j.contains("paths"))
        {
            auto const& p = j.at("paths");
            check_keys(p, {"input", "output"}, "paths");
            read(p, "input", c.paths.input);
            read(p, "output", c.paths.output);
        }
        read(j, "args", c.args);
    }
    catch (json::exception const& e)
    {
        throw ParseError(std::string("bad config value: ") + e.what());
    }
}

std::string config_line(RunConfig const& c)
{
    return json(c).dump();
}

RunConfig load_config(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    std::string const marker = "# config: ";
    if (text.rfind(marker, 0) == 0)
        text = text.substr(marker.size(), text.find('\n') - marker.size());
    try
    {
        json const j = json::parse(text);
        // JSON reports carry their config under "config".
        if (j.is_object() && j.contains("config") && !j.contains("command"))
            return j.at("config").get<RunConfig>();
        return j.get<RunConfig>();
    }
    catch (json::parse_error const& e)
    {
        throw ParseError("config '" + path + "': " + e.what());
    }
}

}  // namespace valprod::cli
