#pragma once

#include <string>

#include "chemflow/driver.hpp"

namespace chemflow {

/**
 * @file config.hpp
 * @brief Flat dotted-key run configuration (`reaction.chi = 1.0`), chosen so
 * the full parameter provenance of a run lives in one reproducible file.
 *
 * Unknown keys and duplicate keys are errors; every referenced invariant is
 * validated at parse time. serialize() emits the complete key set with full
 * decimal precision, so parse(serialize(cfg)) reproduces cfg losslessly.
 */

struct RunConfig {
    SimParams params;
    std::string output_dir = "out";
    /// cadences in time units; 0 disables the periodic output (the final
    /// state is always written)
    double snapshot_every = 0.0;
    double checkpoint_every = 0.0;
    std::string scenario = "run";
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string serialize(const RunConfig& cfg);

} // namespace chemflow
