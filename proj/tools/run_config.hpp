#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace valprod::cli
{
/*!
 * Everything a run depends on. Reports embed the resolved config, so a
 * report can be replayed with --config.
 */
struct RunConfig
{
    std::string command;
    std::uint64_t seed = 1;

    struct Tolerances
    {
        //! Finite-difference step.
        double h = 1e-4;
        //! Relative tolerance of adaptive quadrature.
        double quad_tol = 1e-8;
        //! Pass/fail tolerance of the command's own check.
        double tol_eval = 1e-6;
    } tolerances;

    struct Mc
    {
        //! Draws, template points or test forms, by command.
        std::size_t N = 0;
        std::size_t batch = 4096;
    } mc;

    struct Paths
    {
        std::string input;
        std::string output;
    } paths;

    //! Command arguments, with input bodies inlined.
    nlohmann::json args = nlohmann::json::object();
};

void to_json(nlohmann::json& j, RunConfig const& c);
//! Missing keys keep their defaults; unknown keys are a ParseError.
void from_json(nlohmann::json const& j, RunConfig& c);

//! Compact single-line dump (keys sorted).
std::string config_line(RunConfig const& c);

/*!
 * Reads a config from a JSON file, the "config" key of a JSON report, or
 * the "# config: " line of a CSV report. Throws ParseError.
 */
RunConfig load_config(std::string const& path);

}  // namespace valprod::cli
