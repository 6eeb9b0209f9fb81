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

#include "fermishadow/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fermishadow/channel.hpp"
#include "fermishadow/fastpath.hpp"
#include "fermishadow/identities.hpp"
#include "fermishadow/parallel.hpp"
#include "json.hpp"

#ifndef FERMISHADOW_GIT_DESCRIBE
#define FERMISHADOW_GIT_DESCRIBE "unknown"
#endif

namespace fermishadow {

using nlohmann::json;

namespace {

constexpr std::size_t kBlock = 4096;
constexpr std::uint64_t kMaxDim = 200000;

// Computes per-shadow results in parallel blocks, then hands them to `consume` in index order.
template <typename T, typename Compute, typename Consume>
void for_each_shadow(std::uint64_t count, Compute compute, Consume consume) {
    std::vector<T> buf;
    for (std::uint64_t start = 0; start < count; start += kBlock) {
        const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, count - start));
        buf.assign(len, T{});
        parallel_for(len, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; i++) {
                buf[i] = compute(start + i);
            }
        });
        for (std::size_t i = 0; i < len; i++) {
            consume(start + i, buf[i]);
        }
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

OccupationVector occupation_or_throw(int n, const std::vector<int> &modes, const std::string &what) {
    try {
        return OccupationVector(n, modes);
    } catch (const std::invalid_argument &) {
        std::ostringstream msg;
        msg << what << " must be strictly increasing modes in [1, " << n << "]";
        throw ConfigError(msg.str());
    }
}

std::string source_name(StateSource s) {
    switch (s) {
        case StateSource::kRandomPure:
            return "random_pure";
        case StateSource::kBasis:
            return "basis";
        default:
            return "file";
    }
}

std::string estimator_name(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::kDense:
            return "dense";
        case EstimatorKind::kFast:
            return "fast";
        default:
            return "both";
    }
}

std::string csv_field(const OccupationVector &v) {
    return "\"" + v.str() + "\"";
}

UnitaryMatrix extend_rotation(const UnitaryMatrix &w, int total) {
    ComplexMatrix m = ComplexMatrix::Identity(total, total);
    m.topLeftCorner(w.n(), w.n()) = w.matrix();
    return UnitaryMatrix(std::move(m), 1e-10);
}

}  // namespace

std::string git_describe() {
    return FERMISHADOW_GIT_DESCRIBE;
}

void ExperimentConfig::validate() const {
    std::ostringstream msg;
    if (n < 1 || n > kMaxModes) {
        msg << "n must be in [1, " << kMaxModes << "], got " << n;
    } else if (eta < 0 || eta > n) {
        msg << "eta must be in [0, n=" << n << "], got " << eta;
    } else if (k < 0 || k > eta) {
        msg << "k must be in [0, eta=" << eta << "], got " << k;
    } else if (samples < 1) {
        msg << "samples must be at least 1";
    } else if (binom_u64(n, eta) > kMaxDim) {
        msg << "C(n, eta) = " << binom_u64(n, eta) << " exceeds the dense simulator limit " << kMaxDim;
    } else if (aggregation == AggregationMode::kMedianOfMeans && (batches < 1 || samples % batches != 0)) {
        msg << "median_of_means batches (" << batches << ") must divide samples (" << samples << ")";
    } else if (format != "csv" && format != "json") {
        msg << "format must be csv or json, got '" << format << "'";
    } else if (targets == TargetKind::kSlaterOverlaps && n + eta > kMaxModes) {
        msg << "slater overlaps need n + eta <= " << kMaxModes;
    } else if (targets == TargetKind::kSlaterOverlaps && binom_u64(n + eta, eta) > kMaxDim) {
        msg << "C(n + eta, eta) exceeds the dense simulator limit " << kMaxDim;
    }
    if (!msg.str().empty()) {
        throw ConfigError(msg.str());
    }
    if (state_source == StateSource::kBasis) {
        auto z = occupation_or_throw(n, basis, "basis state");
        if (z.size() != eta) {
            throw ConfigError("basis state must list exactly eta = " + std::to_string(eta) + " modes");
        }
    }
    if (state_source == StateSource::kFile && state_file.empty()) {
        throw ConfigError("state source 'file' needs a path");
    }
    if (targets == TargetKind::kList) {
        if (target_list.empty()) {
            throw ConfigError("target list is empty");
        }
        for (const auto &[p, q] : target_list) {
            auto pv = occupation_or_throw(n, p, "target p");
            auto qv = occupation_or_throw(n, q, "target q");
            if (pv.size() != k || qv.size() != k) {
                throw ConfigError("every target leg must have exactly k = " + std::to_string(k) + " modes");
            }
        }
    }
    for (const auto &q : overlap_list) {
        if (occupation_or_throw(n, q, "overlap q").size() != eta) {
            throw ConfigError("every overlap q must have exactly eta = " + std::to_string(eta) + " modes");
        }
    }
}

ExperimentConfig config_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        if (j.contains("n")) c.n = j["n"].get<int>();
        if (j.contains("eta")) c.eta = j["eta"].get<int>();
        if (j.contains("k")) c.k = j["k"].get<int>();
        if (j.contains("samples")) c.samples = j["samples"].get<std::uint64_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("format")) c.format = j["format"].get<std::string>();
        if (j.contains("archive")) c.archive = j["archive"].get<std::string>();
        if (j.contains("rotation_seed")) c.rotation_seed = j["rotation_seed"].get<std::uint64_t>();
        if (j.contains("state")) {
            const auto &s = j["state"];
            std::string type = s.is_string() ? s.get<std::string>() : s.at("type").get<std::string>();
            if (type == "random_pure") {
                c.state_source = StateSource::kRandomPure;
                if (s.is_object() && s.contains("seed")) c.state_seed = s["seed"].get<std::uint64_t>();
            } else if (type == "basis") {
                c.state_source = StateSource::kBasis;
                c.basis = s.at("z").get<std::vector<int>>();
            } else if (type == "file") {
                c.state_source = StateSource::kFile;
                c.state_file = s.at("path").get<std::string>();
            } else {
                throw ConfigError("unknown state type '" + type + "'");
            }
        }
        if (j.contains("estimator")) {
            std::string e = j["estimator"].get<std::string>();
            if (e == "dense") c.estimator = EstimatorKind::kDense;
            else if (e == "fast") c.estimator = EstimatorKind::kFast;
            else if (e == "both") c.estimator = EstimatorKind::kBoth;
            else throw ConfigError("estimator must be dense, fast or both, got '" + e + "'");
        }
        if (j.contains("aggregation")) {
            const auto &a = j["aggregation"];
            if (a.is_string() && a.get<std::string>() == "mean") {
                c.aggregation = AggregationMode::kMean;
            } else if (a.is_object() && a.contains("median_of_means")) {
                c.aggregation = AggregationMode::kMedianOfMeans;
                c.batches = a["median_of_means"].get<std::size_t>();
            } else {
                throw ConfigError("aggregation must be \"mean\" or {\"median_of_means\": batches}");
            }
        }
        if (j.contains("targets")) {
            const auto &t = j["targets"];
            if (t.is_string() && t.get<std::string>() == "all_krdm") {
                c.targets = TargetKind::kAllKrdm;
            } else if (t.is_string() && t.get<std::string>() == "slater_overlaps") {
                c.targets = TargetKind::kSlaterOverlaps;
            } else if (t.is_array()) {
                c.targets = TargetKind::kList;
                for (const auto &pq : t) {
                    c.target_list.emplace_back(pq.at(0).get<std::vector<int>>(), pq.at(1).get<std::vector<int>>());
                }
            } else {
                throw ConfigError("targets must be \"all_krdm\", \"slater_overlaps\" or a list of [p, q] pairs");
            }
        }
        if (j.contains("overlaps")) {
            c.overlap_list = j["overlaps"].get<std::vector<std::vector<int>>>();
        }
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    return c;
}

std::string config_to_json(const ExperimentConfig &c) {
    json j;
    j["n"] = c.n;
    j["eta"] = c.eta;
    j["k"] = c.k;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    json state;
    state["type"] = source_name(c.state_source);
    if (c.state_source == StateSource::kBasis) state["z"] = c.basis;
    if (c.state_source == StateSource::kFile) state["path"] = c.state_file;
    if (c.state_seed) state["seed"] = *c.state_seed;
    j["state"] = state;
    j["estimator"] = estimator_name(c.estimator);
    if (c.aggregation == AggregationMode::kMean) {
        j["aggregation"] = "mean";
    } else {
        j["aggregation"] = {{"median_of_means", c.batches}};
    }
    if (c.targets == TargetKind::kAllKrdm) {
        j["targets"] = "all_krdm";
    } else if (c.targets == TargetKind::kSlaterOverlaps) {
        j["targets"] = "slater_overlaps";
    } else {
        json t = json::array();
        for (const auto &[p, q] : c.target_list) t.push_back({p, q});
        j["targets"] = t;
    }
    if (!c.overlap_list.empty()) j["overlaps"] = c.overlap_list;
    if (c.rotation_seed) j["rotation_seed"] = *c.rotation_seed;
    j["out"] = c.out;
    j["format"] = c.format;
    if (!c.archive.empty()) j["archive"] = c.archive;
    return j.dump(2);
}

FermionState build_state(const ExperimentConfig &c) {
    switch (c.state_source) {
        case StateSource::kBasis:
            return basis_state(OccupationVector(c.n, c.basis));
        case StateSource::kFile: {
            std::ifstream in(c.state_file);
            if (!in) {
                throw ConfigError("cannot open state file '" + c.state_file + "'");
            }
            std::stringstream buf;
            buf << in.rdbuf();
            FermionState s;
            try {
                s = state_from_json(buf.str());
            } catch (const std::exception &e) {
                throw ConfigError("state file '" + c.state_file + "': " + e.what());
            }
            if (s.n() != c.n || s.eta() != c.eta) {
                throw ConfigError("state file has (n, eta) = (" + std::to_string(s.n()) + ", " +
                                  std::to_string(s.eta()) + "), config says (" + std::to_string(c.n) + ", " +
                                  std::to_string(c.eta) + ")");
            }
            return s;
        }
        default: {
            Rng rng = stream_rng(c.state_seed.value_or(splitmix64(c.seed ^ 0x5157a7e5eedULL)), 0);
            return random_state(c.n, c.eta, rng);
        }
    }
}

EstimateRun run_estimate(const ExperimentConfig &c) {
    c.validate();
    const auto t0 = std::chrono::steady_clock::now();
    FermionState state = build_state(c);

    std::vector<std::pair<OccupationVector, OccupationVector>> targets;
    if (c.targets == TargetKind::kAllKrdm) {
        auto sets = all_subsets(c.n, c.k);
        for (const auto &p : sets) {
            for (const auto &q : sets) {
                targets.emplace_back(p, q);
            }
        }
    } else if (c.targets == TargetKind::kList) {
        for (const auto &[p, q] : c.target_list) {
            targets.emplace_back(OccupationVector(c.n, p), OccupationVector(c.n, q));
        }
    } else {
        throw ConfigError("slater_overlaps targets are handled by the slater-overlap command");
    }
    const std::size_t nt = targets.size();

    EstimateRun run;
    run.has_dense = c.estimator != EstimatorKind::kFast;
    run.has_fast = c.estimator != EstimatorKind::kDense;
    DenseEstimator dense(c.n, c.eta, c.k);
    FastEstimator fast(c.n, c.eta, c.k);
    std::vector<RdmDecomposition> decs;
    if (run.has_fast) {
        for (const auto &[p, q] : targets) {
            decs.push_back(decompose_rdm(p, q, c.n));
        }
    }
    std::vector<std::size_t> ranks_p(nt), ranks_q(nt);
    for (std::size_t t = 0; t < nt; t++) {
        ranks_p[t] = rank_subset(targets[t].first);
        ranks_q[t] = rank_subset(targets[t].second);
    }
    const bool use_all = c.targets == TargetKind::kAllKrdm;

    struct PerShadow {
        std::vector<Complex> dense, fast;
        std::string archive_line;
    };
    std::vector<std::vector<Complex>> dense_series(run.has_dense ? nt : 0), fast_series(run.has_fast ? nt : 0);
    std::ofstream archive;
    if (!c.archive.empty()) {
        archive.open(c.archive);
        if (!archive) {
            throw ConfigError("cannot write shadow archive '" + c.archive + "'");
        }
    }
    for_each_shadow<PerShadow>(
        c.samples,
        [&](std::uint64_t i) {
            PerShadow r;
            ClassicalShadow s = sample_shadow(state, c.seed, i);
            if (run.has_dense) {
                if (use_all) {
                    ComplexMatrix all = dense.estimate_all(s);
                    for (std::size_t t = 0; t < nt; t++) {
                        r.dense.push_back(all(static_cast<Eigen::Index>(ranks_p[t]), static_cast<Eigen::Index>(ranks_q[t])));
                    }
                } else {
                    for (const auto &[p, q] : targets) {
                        r.dense.push_back(dense.estimate(s, p, q));
                    }
                }
            }
            if (run.has_fast) {
                for (const auto &d : decs) {
                    r.fast.push_back(fast.estimate(s, d));
                }
            }
            if (archive.is_open()) {
                r.archive_line = shadow_to_json(s);
            }
            return r;
        },
        [&](std::uint64_t, const PerShadow &r) {
            for (std::size_t t = 0; t < r.dense.size(); t++) dense_series[t].push_back(r.dense[t]);
            for (std::size_t t = 0; t < r.fast.size(); t++) fast_series[t].push_back(r.fast[t]);
            if (archive.is_open()) archive << r.archive_line << "\n";
        });

    for (std::size_t t = 0; t < nt; t++) {
        TargetEstimate row{targets[t].first, targets[t].second, {}, {}, 0.0};
        if (run.has_dense) row.dense = aggregate(dense_series[t], c.aggregation, c.batches);
        if (run.has_fast) row.fast = aggregate(fast_series[t], c.aggregation, c.batches);
        row.exact = expectation_rdm(state, row.p, row.q);
        run.rows.push_back(row);
    }
    run.wall_seconds = seconds_since(t0);
    return run;
}

void write_estimate_csv(std::ostream &out, const ExperimentConfig &c, const EstimateRun &run) {
    out << "p,q,k,estimate_re,estimate_im,stderr_re,stderr_im";
    if (run.has_dense && run.has_fast) {
        out << ",fast_estimate_re,fast_estimate_im,fast_stderr_re,fast_stderr_im";
    }
    out << ",exact_re,exact_im\n";
    for (const auto &r : run.rows) {
        const Aggregate &main = run.has_dense ? r.dense : r.fast;
        out << csv_field(r.p) << "," << csv_field(r.q) << "," << c.k << "," << format_double(main.value.real()) << ","
            << format_double(main.value.imag()) << "," << format_double(main.std_error.real()) << ","
            << format_double(main.std_error.imag());
        if (run.has_dense && run.has_fast) {
            out << "," << format_double(r.fast.value.real()) << "," << format_double(r.fast.value.imag()) << ","
                << format_double(r.fast.std_error.real()) << "," << format_double(r.fast.std_error.imag());
        }
        out << "," << format_double(r.exact.real()) << "," << format_double(r.exact.imag()) << "\n";
    }
}

void write_estimate_json(std::ostream &out, const ExperimentConfig &c, const EstimateRun &run) {
    json rows = json::array();
    for (const auto &r : run.rows) {
        const Aggregate &main = run.has_dense ? r.dense : r.fast;
        json row = {{"p", r.p.modes()},
                    {"q", r.q.modes()},
                    {"k", c.k},
                    {"estimate", {main.value.real(), main.value.imag()}},
                    {"stderr", {main.std_error.real(), main.std_error.imag()}},
                    {"exact", {r.exact.real(), r.exact.imag()}}};
        if (run.has_dense && run.has_fast) {
            row["fast_estimate"] = {r.fast.value.real(), r.fast.value.imag()};
            row["fast_stderr"] = {r.fast.std_error.real(), r.fast.std_error.imag()};
        }
        rows.push_back(row);
    }
    out << rows.dump(2) << "\n";
}

std::string run_manifest(const ExperimentConfig &c, double wall_seconds, const std::string &command) {
    json j;
    j["command"] = command;
    j["config"] = json::parse(config_to_json(c));
    j["git_describe"] = git_describe();
    j["wall_time_seconds"] = wall_seconds;
    j["threads"] = thread_count();
    return j.dump(2);
}

double empirical_average_variance(const FermionState &state, int k, std::uint64_t samples, std::uint64_t seed) {
    DenseEstimator est(state.n(), state.eta(), k);
    const auto dim = static_cast<Eigen::Index>(binom_u64(state.n(), k));
    EstimateAccumulator acc(dim, dim);
    for_each_shadow<ComplexMatrix>(
        samples, [&](std::uint64_t i) { return est.estimate_all(sample_shadow(state, seed, i)); },
        [&](std::uint64_t, const ComplexMatrix &m) { acc.add(m); });
    return acc.variance().mean();
}

std::vector<SweepRow> run_variance_sweep(std::pair<int, int> n_range, std::pair<int, int> eta_range,
                                         std::pair<int, int> k_range, std::uint64_t samples, std::uint64_t seed) {
    std::vector<SweepRow> rows;
    for (int n = std::max(1, n_range.first); n <= n_range.second; n++) {
        for (int eta = std::max(0, eta_range.first); eta <= std::min(n, eta_range.second); eta++) {
            for (int k = std::max(0, k_range.first); k <= std::min(eta, k_range.second); k++) {
                SweepRow r{n, eta, k, q_value(n, eta, k), avg_shadow_norm_sq(n, eta, k),
                           variance_bound_exact(n, eta, k), std::nullopt, 0};
                if (samples > 0 && binom_u64(n, eta) <= 2000 && binom_u64(n, k) <= 200) {
                    Rng rng = stream_rng(seed, 0xfeedULL + static_cast<std::uint64_t>(n * 4096 + eta * 64 + k));
                    FermionState psi = random_state(n, eta, rng);
                    r.empirical = empirical_average_variance(psi, k, samples, splitmix64(seed + 17 * n + eta));
                    r.samples = samples;
                }
                rows.push_back(r);
            }
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows) {
    out << "n,eta,k,q_exact,q_value,avg_shadow_norm_sq_exact,avg_shadow_norm_sq,variance_bound_exact,variance_bound,"
           "empirical_avg_variance,samples\n";
    for (const auto &r : rows) {
        out << r.n << "," << r.eta << "," << r.k << "," << r.q.get_str() << "," << format_double(r.q.get_d()) << ","
            << r.norm_sq.get_str() << "," << format_double(r.norm_sq.get_d()) << "," << r.bound.get_str() << ","
            << format_double(r.bound.get_d()) << "," << (r.empirical ? format_double(*r.empirical) : "") << ","
            << r.samples << "\n";
    }
}

SlaterRun run_slater_overlap(const ExperimentConfig &c, bool with_average_variance) {
    c.validate();
    const auto t0 = std::chrono::steady_clock::now();
    FermionState psi = build_state(c);
    FermionState big = slater_superposition(psi);
    const int n = c.n;
    const int eta = c.eta;
    const int total = n + eta;

    UnitaryMatrix w = UnitaryMatrix::identity(n);
    if (c.rotation_seed) {
        Rng rng = stream_rng(*c.rotation_seed, 0);
        w = haar_unitary(n, rng);
    }
    const UnitaryMatrix w_ext = extend_rotation(w, total);
    // <q'|psi> with |q'> = U(w)|q> is (U(w^dagger) psi)_q.
    ComplexVector rotated_psi = compound_matrix(w.matrix().adjoint(), eta) * psi.amplitudes();

    std::vector<OccupationVector> qs;
    if (c.overlap_list.empty()) {
        qs = all_subsets(n, eta);
    } else {
        for (const auto &q : c.overlap_list) qs.emplace_back(n, q);
    }
    std::vector<int> tail(eta);
    for (int j = 0; j < eta; j++) tail[j] = n + 1 + j;
    const OccupationVector p(total, tail);
    std::vector<OccupationVector> qs_big;
    for (const auto &q : qs) qs_big.emplace_back(total, q.modes());

    DenseEstimator dense(total, eta, eta);
    FastEstimator fast(total, eta, eta);
    const bool use_fast = c.estimator == EstimatorKind::kFast;
    std::vector<RdmDecomposition> decs;
    if (use_fast) {
        for (const auto &q : qs_big) decs.push_back(decompose_rdm(p, q, total));
    }
    const auto big_dim = static_cast<Eigen::Index>(binom_u64(total, eta));
    const bool do_avg = with_average_variance && big_dim <= 400;
    EstimateAccumulator acc(do_avg ? big_dim : 0, do_avg ? big_dim : 0);

    struct PerShadow {
        std::vector<Complex> est;
        ComplexMatrix all;
    };
    std::vector<std::vector<Complex>> series(qs.size());
    for_each_shadow<PerShadow>(
        c.samples,
        [&](std::uint64_t i) {
            ClassicalShadow s = sample_shadow(big, c.seed, i);
            s.u = s.u * w_ext;
            PerShadow r;
            for (std::size_t t = 0; t < qs_big.size(); t++) {
                r.est.push_back(use_fast ? fast.estimate(s, decs[t]) : dense.estimate(s, p, qs_big[t]));
            }
            if (do_avg) r.all = dense.estimate_all(s);
            return r;
        },
        [&](std::uint64_t, const PerShadow &r) {
            for (std::size_t t = 0; t < r.est.size(); t++) series[t].push_back(r.est[t]);
            if (do_avg) acc.add(r.all);
        });

    SlaterRun run;
    for (std::size_t t = 0; t < qs.size(); t++) {
        std::vector<Complex> doubled(series[t].size());
        std::transform(series[t].begin(), series[t].end(), doubled.begin(), [](Complex x) { return 2.0 * x; });
        Aggregate a = aggregate(doubled, c.aggregation, c.batches);
        Aggregate single = aggregate(series[t], AggregationMode::kMean);
        double var = (std::norm(single.std_error.real()) + std::norm(single.std_error.imag())) *
                     static_cast<double>(series[t].size());
        run.rows.push_back(
            {qs[t], a, rotated_psi(static_cast<Eigen::Index>(rank_subset(qs[t]))), var});
    }
    if (do_avg) run.average_rdm_variance = acc.variance().mean();
    run.wall_seconds = seconds_since(t0);
    return run;
}

void write_slater_csv(std::ostream &out, const SlaterRun &run) {
    out << "q,overlap_re,overlap_im,stderr_re,stderr_im,exact_re,exact_im,rdm_single_shot_variance\n";
    for (const auto &r : run.rows) {
        out << csv_field(r.q) << "," << format_double(r.overlap.value.real()) << ","
            << format_double(r.overlap.value.imag()) << "," << format_double(r.overlap.std_error.real()) << ","
            << format_double(r.overlap.std_error.imag()) << "," << format_double(r.exact.real()) << ","
            << format_double(r.exact.imag()) << "," << format_double(r.single_shot_variance) << "\n";
    }
}

bool ValidationReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.pass; });
}

std::string ValidationReport::to_json() const {
    json arr = json::array();
    for (const auto &c : checks) {
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    json j;
    j["checks"] = arr;
    j["pass"] = pass();
    j["git_describe"] = git_describe();
    return j.dump(2);
}

ValidationReport run_validate(ValidateLevel level, const std::string &inject_fault) {
    const bool full = level == ValidateLevel::kFull;
    ValidationReport report;
    auto record = [&](const std::string &name, auto &&fn) {
        CheckResult r{name, false, ""};
        try {
            fn(r);
        } catch (const std::exception &e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        report.checks.push_back(r);
    };

    record("projector_identity", [&](CheckResult &r) {
        const int n_max = full ? 12 : 8;
        int bad = 0;
        for (int n = 0; n <= n_max; n++)
            for (int eta = 0; eta <= n; eta++) bad += !projector_identity_holds(n, eta);
        r.pass = bad == 0;
        r.detail = "n <= " + std::to_string(n_max) + ", failures " + std::to_string(bad);
    });

    record("eigenoperator_law", [&](CheckResult &r) {
        const int n_max = full ? 8 : 5;
        int bad = 0;
        long checked = 0;
        for (int n = 1; n <= n_max; n++) {
            for (int eta = 0; eta <= n; eta++) {
                long c = 0;
                bad += eigenoperator_law_failures(n, eta, &c);
                checked += c;
            }
        }
        r.pass = bad == 0;
        r.detail = std::to_string(checked) + " operators, failures " + std::to_string(bad);
    });

    record("closed_form_sums", [&](CheckResult &r) {
        const int n_max = full ? 10 : 7;
        auto a = sweep_trace_nd(n_max);
        auto b = sweep_t_sum(n_max);
        int bad = 0;
        for (const auto &x : a) bad += !x.agree;
        for (const auto &x : b) bad += !x.agree;
        int cv = chu_vandermonde_checks(full ? 15 : 10);
        r.pass = bad == 0 && cv == 0;
        r.detail = std::to_string(a.size() + b.size()) + " sums, failures " + std::to_string(bad) +
                   "; binomial identities failures " + std::to_string(cv);
    });

    record("per_shadow_sum", [&](CheckResult &r) {
        const int n_max = full ? 6 : 5;
        const int shots = full ? 50 : 20;
        double worst = 0.0;
        for (int n = 1; n <= n_max; n++) {
            for (int eta = 0; eta <= n; eta++) {
                Rng rng = stream_rng(91, static_cast<std::uint64_t>(n * 64 + eta));
                FermionState psi = random_state(n, eta, rng);
                for (int k = 0; k <= eta; k++) {
                    EstimationMatrix e = EstimationMatrix::build(n, eta, k);
                    const double want = e.trace_squared().get_d();
                    if (inject_fault == "estimation-matrix") {
                        e.class_values[0] += 1;
                    }
                    DenseEstimator est(e);
                    for (int i = 0; i < shots; i++) {
                        double got = est.estimate_all(sample_shadow(psi, 1234, static_cast<std::uint64_t>(i))).cwiseAbs2().sum();
                        worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
                    }
                }
            }
        }
        r.pass = worst <= 1e-8;
        r.detail = "max relative deviation " + format_double(worst);
    });

    record("fast_vs_dense", [&](CheckResult &r) {
        const int n_max = full ? 8 : 5;
        const int triples = full ? 200 : 20;
        double worst = 0.0;
        long count = 0;
        for (int n = 1; n <= n_max; n++) {
            for (int eta = 0; eta <= n; eta++) {
                for (int k = 0; k <= eta; k++) {
                    DenseEstimator dense(n, eta, k);
                    FastEstimator fast(n, eta, k);
                    for (int t = 0; t < triples; t++) {
                        Rng rng = stream_rng(777, static_cast<std::uint64_t>(((n * 16 + eta) * 16 + k) * 1024 + t));
                        ClassicalShadow s;
                        s.u = haar_unitary(n, rng);
                        s.z = unrank_subset(std::uniform_int_distribution<std::uint64_t>(0, binom_u64(n, eta) - 1)(rng), n, eta);
                        std::uniform_int_distribution<std::uint64_t> pick(0, binom_u64(n, k) - 1);
                        auto p = unrank_subset(pick(rng), n, k);
                        auto q = unrank_subset(pick(rng), n, k);
                        Complex a = dense.estimate(s, p, q);
                        Complex b = fast.estimate(s, p, q);
                        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
                        count++;
                    }
                }
            }
        }
        r.pass = worst <= 1e-8;
        r.detail = std::to_string(count) + " triples, max relative deviation " + format_double(worst);
    });

    record("channel_monte_carlo", [&](CheckResult &r) {
        const int n_max = full ? 4 : 3;
        const std::uint64_t samples = full ? 100000 : 10000;
        double worst = 0.0;
        for (int n = 1; n <= n_max; n++) {
            for (int eta = 0; eta <= n; eta++) {
                ChannelSpec spec(n, eta);
                auto p = OccupationVector::first(eta, n);
                DiagonalOperator pi = DiagonalOperator::zero(n, eta);
                pi.values[0] = 1;
                DiagonalOperator exact = apply_channel_diagonal(spec, pi);
                McDiagonal mc = mc_channel_estimate(spec, p, samples, 4242 + n * 16 + eta);
                for (std::size_t i = 0; i < exact.values.size(); i++) {
                    double dev = std::abs(mc.mean[i] - exact.values[i].get_d());
                    double sigma = std::max(mc.std_error[i], 1e-12);
                    worst = std::max(worst, dev / sigma);
                }
            }
        }
        r.pass = worst <= 5.0;
        r.detail = "max deviation " + format_double(worst) + " standard errors";
    });
    return report;
}

}  // namespace fermishadow
