// Copyright 2026 The fermishadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FERMISHADOW_EXPERIMENT_HPP
#define FERMISHADOW_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fermishadow/fock.hpp"
#include "fermishadow/shadows.hpp"

namespace fermishadow {

/// Invalid or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class StateSource { kRandomPure, kBasis, kFile };
enum class EstimatorKind { kDense, kFast, kBoth };
enum class TargetKind { kAllKrdm, kList, kSlaterOverlaps };

struct ExperimentConfig {
    int n = 2;
    int eta = 1;
    int k = 1;
    std::uint64_t samples = 1000;
    std::uint64_t seed = 1;
    StateSource state_source = StateSource::kRandomPure;
    std::vector<int> basis;
    std::string state_file;
    /// Seed for the random pure state; defaults to a value derived from `seed`.
    std::optional<std::uint64_t> state_seed;
    EstimatorKind estimator = EstimatorKind::kDense;
    AggregationMode aggregation = AggregationMode::kMean;
    std::size_t batches = 1;
    TargetKind targets = TargetKind::kAllKrdm;
    std::vector<std::pair<std::vector<int>, std::vector<int>>> target_list;
    /// Slater overlaps: requested q sets (empty means all of S_{n,eta}).
    std::vector<std::vector<int>> overlap_list;
    /// Slater overlaps: seed of a Haar rotation w applied to the Slater determinants.
    std::optional<std::uint64_t> rotation_seed;
    std::string out = "estimates.csv";
    std::string format = "csv";
    std::string archive;

    /// Throws ConfigError with a precise message.
    void validate() const;
};

ExperimentConfig config_from_json(const std::string &text);
std::string config_to_json(const ExperimentConfig &c);

FermionState build_state(const ExperimentConfig &c);

struct TargetEstimate {
    OccupationVector p;
    OccupationVector q;
    Aggregate dense;
    Aggregate fast;
    Complex exact;
};

struct EstimateRun {
    std::vector<TargetEstimate> rows;
    bool has_dense = false;
    bool has_fast = false;
    double wall_seconds = 0.0;
};

EstimateRun run_estimate(const ExperimentConfig &c);
void write_estimate_csv(std::ostream &out, const ExperimentConfig &c, const EstimateRun &run);
void write_estimate_json(std::ostream &out, const ExperimentConfig &c, const EstimateRun &run);
std::string run_manifest(const ExperimentConfig &c, double wall_seconds, const std::string &command);

struct SweepRow {
    int n, eta, k;
    Rational q;
    Rational norm_sq;
    Rational bound;
    std::optional<double> empirical;
    std::uint64_t samples = 0;
};

std::vector<SweepRow> run_variance_sweep(std::pair<int, int> n_range, std::pair<int, int> eta_range,
                                         std::pair<int, int> k_range, std::uint64_t samples, std::uint64_t seed);
void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows);

/// Empirical single-shot variance averaged over all k-RDM entries, dense estimator.
double empirical_average_variance(const FermionState &state, int k, std::uint64_t samples, std::uint64_t seed);

struct OverlapRow {
    OccupationVector q;
    Aggregate overlap;
    Complex exact;
    double single_shot_variance;
};

struct SlaterRun {
    std::vector<OverlapRow> rows;
    /// Single-shot variance averaged over all eta-RDM entries on n + eta modes (when computed).
    std::optional<double> average_rdm_variance;
    double wall_seconds = 0.0;
};

/// Estimates <q'|psi> for Slater determinants |q'> = U(w)|q> via the enlarged-state trick.
SlaterRun run_slater_overlap(const ExperimentConfig &c, bool with_average_variance);
void write_slater_csv(std::ostream &out, const SlaterRun &run);

enum class ValidateLevel { kQuick, kFull };

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool pass() const;
    std::string to_json() const;
};

/// Runs the invariant suites. `inject_fault` names a deliberate corruption used as a negative
/// control; "estimation-matrix" perturbs E before the per-shadow sum check.
ValidationReport run_validate(ValidateLevel level, const std::string &inject_fault = "");

std::string git_describe();

}  // namespace fermishadow

#endif
