#pragma once

#include <edgebench/experiment/sweep.hpp>

#include <string>
#include <vector>

namespace edgebench::experiment {

/// Names accepted by preset().
std::vector<std::string> preset_names();

/// "case-study": 4 ESs on a grid and 40 uniformly placed MDs in a 100 m
/// square, comparing backpressure with the transmission- and
/// computation-based baselines.
/// "case-study-small": a 2-MD, 2-ES instance small enough for the MDP
/// policy, simulated with queue caps equal to the MDP truncation.
/// Throws MalformedConfig for an unknown name.
SweepSpec preset(const std::string& name);

} // namespace edgebench::experiment
