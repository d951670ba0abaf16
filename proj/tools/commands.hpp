#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace valprod::cli
{
//! Exit codes of the driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct Outcome
{
    std::string report;
    bool passed = true;
    //! Extra files written next to the report (path, contents).
    std::vector<std::pair<std::string, std::string>> artifacts;
};

//! Default draws, points or forms per command when --samples is absent.
std::size_t default_samples(std::string const& command);

/*!
 * Runs a fully resolved config. The report starts with its "# config: "
 * line (or a "config" key for JSON reports), so it can be replayed. Throws
 * valprod::Error for bad input.
 */
Outcome run(RunConfig const& config);

//! Parses argv, runs, writes the report, and returns the exit code.
int main_entry(int argc, char** argv);

}  // namespace valprod::cli
