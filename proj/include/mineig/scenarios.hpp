#pragma once

#include <functional>
#include <string>

#include "mineig/config.hpp"
#include "mineig/report.hpp"

namespace mineig {

// BoundsOnly computes the formulas and skips all probability evidence.
// Verify gathers Monte Carlo estimates plus the exact oracle where the
// support fits the enumeration cap. EnumerateOnly demands an exact oracle
// for every claim and runs no trials.
enum class RunMode { BoundsOnly, Verify, EnumerateOnly };

// Builds the scenario's claims, gathers the requested evidence, and assembles
// the report. Validation, oracle-cap, and numeric-domain errors surface with
// the scenario name in the message. Claim k of a run draws from substream
// config.seed.stream_id + k, so reports are reproducible per claim.
Report run_scenario(const ExperimentConfig& config, RunMode mode);

// Runs every *.json config under dir in name order. adjust (when set) edits
// each config before validation, the hook the CLI overrides flow through.
// Per-file errors are collected in the summary, not fatal to siblings.
SuiteSummary run_suite(const std::string& dir, RunMode mode,
                       const std::function<void(ExperimentConfig&)>& adjust = {});

}  // namespace mineig
