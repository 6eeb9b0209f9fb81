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

// Command-line runner: estimate, variance-sweep, validate, slater-overlap.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fermishadow/experiment.hpp"

namespace fs = fermishadow;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

struct Overrides {
    std::string config_path;
    std::optional<int> n, eta, k;
    std::optional<std::uint64_t> samples, seed;
    std::optional<std::string> out, format;
    std::string manifest;
};

void add_overrides(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--n", o.n, "number of modes");
    cmd->add_option("--eta", o.eta, "particle number");
    cmd->add_option("--k", o.k, "RDM order");
    cmd->add_option("--samples", o.samples, "number of shadows");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output path");
    cmd->add_option("--format", o.format, "csv or json");
    cmd->add_option("--manifest", o.manifest, "run manifest path (default: <out>.manifest.json)");
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw fs::ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::ExperimentConfig load_config(const Overrides &o) {
    fs::ExperimentConfig c = o.config_path.empty() ? fs::ExperimentConfig{} : fs::config_from_json(read_file(o.config_path));
    if (o.n) c.n = *o.n;
    if (o.eta) c.eta = *o.eta;
    if (o.k) c.k = *o.k;
    if (o.samples) c.samples = *o.samples;
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.out = *o.out;
    if (o.format) c.format = *o.format;
    c.validate();
    return c;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw fs::ConfigError("cannot write '" + path + "'");
    }
    return out;
}

void write_manifest(const Overrides &o, const fs::ExperimentConfig &c, double wall, const std::string &command) {
    const std::string path = o.manifest.empty() ? c.out + ".manifest.json" : o.manifest;
    open_out(path) << fs::run_manifest(c, wall, command) << "\n";
}

std::pair<int, int> parse_range(const std::string &text, const std::string &what) {
    int lo = 0;
    int hi = 0;
    char dash = 0;
    std::istringstream in(text);
    if (in >> lo) {
        if (in >> dash) {
            if (dash != ':' && dash != '-') {
                throw fs::ConfigError(what + " range must look like a:b, got '" + text + "'");
            }
            if (!(in >> hi)) {
                throw fs::ConfigError(what + " range must look like a:b, got '" + text + "'");
            }
        } else {
            hi = lo;
        }
    } else {
        throw fs::ConfigError(what + " range must look like a:b, got '" + text + "'");
    }
    if (lo > hi || lo < 0) {
        throw fs::ConfigError(what + " range is empty or negative: '" + text + "'");
    }
    return {lo, hi};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Fermionic classical shadows: simulation, estimation and validation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fs::git_describe());

    Overrides est_opts;
    auto *estimate = app.add_subcommand("estimate", "collect shadows and estimate RDM entries");
    add_overrides(estimate, est_opts);

    Overrides slater_opts;
    bool slater_avg = false;
    auto *slater = app.add_subcommand("slater-overlap", "estimate overlaps with Slater determinants");
    add_overrides(slater, slater_opts);
    slater->add_flag("--average-variance", slater_avg, "also report the mean single-shot eta-RDM variance");

    std::string n_range = "1:6", eta_range = "0:6", k_range = "0:6", sweep_out = "variance_sweep.csv";
    std::uint64_t sweep_samples = 0, sweep_seed = 1;
    auto *sweep = app.add_subcommand("variance-sweep", "tabulate exact variance quantities");
    sweep->add_option("--n", n_range, "n range a:b");
    sweep->add_option("--eta", eta_range, "eta range a:b");
    sweep->add_option("--k", k_range, "k range a:b");
    sweep->add_option("--samples", sweep_samples, "shadows for the optional empirical column (0 skips it)");
    sweep->add_option("--seed", sweep_seed, "master seed");
    sweep->add_option("--out", sweep_out, "CSV path, '-' for stdout");

    std::string level = "quick", validate_out, fault;
    auto *validate = app.add_subcommand("validate", "run the invariant suites");
    validate->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    validate->add_option("--out", validate_out, "JSON report path (default stdout)");
    validate->add_option("--inject-fault", fault, "negative control: estimation-matrix")
        ->check(CLI::IsMember({"", "estimation-matrix"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*estimate) {
            fs::ExperimentConfig c = load_config(est_opts);
            if (c.targets == fs::TargetKind::kSlaterOverlaps) {
                throw fs::ConfigError("targets 'slater_overlaps' belong to the slater-overlap command");
            }
            fs::EstimateRun run = fs::run_estimate(c);
            {
                auto out = open_out(c.out);
                if (c.format == "json") {
                    fs::write_estimate_json(out, c, run);
                } else {
                    fs::write_estimate_csv(out, c, run);
                }
            }
            write_manifest(est_opts, c, run.wall_seconds, "estimate");
            return 0;
        }
        if (*slater) {
            fs::ExperimentConfig c = load_config(slater_opts);
            fs::SlaterRun run = fs::run_slater_overlap(c, slater_avg);
            {
                auto out = open_out(c.out);
                fs::write_slater_csv(out, run);
            }
            if (run.average_rdm_variance) {
                std::cout << "average single-shot eta-RDM variance " << fs::format_double(*run.average_rdm_variance)
                          << "\n";
            }
            write_manifest(slater_opts, c, run.wall_seconds, "slater-overlap");
            return 0;
        }
        if (*sweep) {
            auto rows = fs::run_variance_sweep(parse_range(n_range, "n"), parse_range(eta_range, "eta"),
                                               parse_range(k_range, "k"), sweep_samples, sweep_seed);
            if (sweep_out == "-") {
                fs::write_sweep_csv(std::cout, rows);
            } else {
                auto out = open_out(sweep_out);
                fs::write_sweep_csv(out, rows);
            }
            return 0;
        }
        if (*validate) {
            fs::ValidationReport report =
                fs::run_validate(level == "full" ? fs::ValidateLevel::kFull : fs::ValidateLevel::kQuick, fault);
            const std::string text = report.to_json();
            if (validate_out.empty()) {
                std::cout << text << "\n";
            } else {
                open_out(validate_out) << text << "\n";
            }
            for (const auto &c : report.checks) {
                std::cerr << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
            }
            return report.pass() ? 0 : kExitValidation;
        }
    } catch (const fs::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
