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

#include "fermishadow/shadows.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "fermishadow/parallel.hpp"
#include "json.hpp"

namespace fermishadow {

ClassicalShadow sample_shadow(const FermionState &state, Rng &rng) {
    ClassicalShadow s;
    s.u = haar_unitary(state.n(), rng);
    s.z = measure_occupation(state, s.u, rng);
    return s;
}

ClassicalShadow sample_shadow(const FermionState &state, std::uint64_t seed, std::uint64_t index) {
    Rng rng = stream_rng(seed, index);
    ClassicalShadow s = sample_shadow(state, rng);
    s.seed = seed;
    s.index = index;
    return s;
}

std::vector<ClassicalShadow> collect_shadows(const FermionState &state, std::uint64_t count, std::uint64_t seed) {
    std::vector<ClassicalShadow> out(count);
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; i++) {
            out[i] = sample_shadow(state, seed, i);
        }
    });
    return out;
}

Rational estimation_entry(int n, int eta, int k, int s_prime) {
    if (k < 0 || k > eta || eta > n || s_prime < 0 || s_prime > k) {
        throw std::domain_error("estimation_entry: need 0 <= s' <= k <= eta <= n");
    }
    Integer num = binom(eta - s_prime, k - s_prime) * binom(n - eta + s_prime, s_prime);
    if (((k + s_prime) & 1) != 0) {
        num = -num;
    }
    Rational r(num, binom(k, s_prime));
    r.canonicalize();
    return r;
}

EstimationMatrix EstimationMatrix::build(int n, int eta, int k) {
    EstimationMatrix e;
    e.n = n;
    e.eta = eta;
    e.k = k;
    for (int s = 0; s <= k; s++) {
        e.class_values.push_back(estimation_entry(n, eta, k, s));
    }
    return e;
}

Integer EstimationMatrix::class_size(int s_prime) const {
    return binom(eta, s_prime) * binom(n - eta, k - s_prime);
}

Rational EstimationMatrix::trace_squared() const {
    Rational acc = 0;
    for (int s = 0; s <= k; s++) {
        acc += Rational(class_size(s)) * class_values[s] * class_values[s];
    }
    return acc;
}

std::vector<double> EstimationMatrix::as_double() const {
    std::vector<double> out;
    for (const auto &v : class_values) {
        out.push_back(v.get_d());
    }
    return out;
}

RdmObservable RdmObservable::zero(int n, int k) {
    auto dim = static_cast<Eigen::Index>(binom_u64(n, k));
    return RdmObservable{n, k, ComplexMatrix::Zero(dim, dim)};
}

RdmObservable RdmObservable::single(const OccupationVector &p, const OccupationVector &q) {
    if (p.size() != q.size() || p.n() != q.n()) {
        throw std::invalid_argument("RdmObservable::single: mismatched legs");
    }
    RdmObservable o = zero(p.n(), p.size());
    o.coeffs(static_cast<Eigen::Index>(rank_subset(p)), static_cast<Eigen::Index>(rank_subset(q))) = 1.0;
    return o;
}

ComplexMatrix permuted_rows(const UnitaryMatrix &u, const PermutationMatrix &v) {
    const int n = u.n();
    if (v.n() != n) {
        throw std::invalid_argument("permuted_rows: size mismatch");
    }
    ComplexMatrix out(n, n);
    for (int j = 1; j <= n; j++) {
        out.row(j - 1) = u.matrix().row(v(j) - 1);
    }
    return out;
}

DenseEstimator::DenseEstimator(int n, int eta, int k) : DenseEstimator(EstimationMatrix::build(n, eta, k)) {
}

DenseEstimator::DenseEstimator(EstimationMatrix e) : e_(std::move(e)) {
    if (e_.n > kMaxModes || static_cast<int>(e_.class_values.size()) != e_.k + 1) {
        throw std::invalid_argument("DenseEstimator: malformed estimation matrix");
    }
    class_d_ = e_.as_double();
    head_mask_ = e_.eta >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << e_.eta) - 1;
}

void DenseEstimator::check(const ClassicalShadow &s) const {
    if (s.n() != e_.n || s.eta() != e_.eta) {
        throw std::invalid_argument("DenseEstimator: shadow has a different (n, eta)");
    }
}

Complex DenseEstimator::estimate(const ClassicalShadow &s, const OccupationVector &p,
                                 const OccupationVector &q) const {
    return estimate(s, canonical_permutation(s.z), p, q);
}

Complex DenseEstimator::estimate(const ClassicalShadow &s, const PermutationMatrix &v, const OccupationVector &p,
                                 const OccupationVector &q) const {
    check(s);
    if (p.size() != e_.k || q.size() != e_.k) {
        throw std::invalid_argument("DenseEstimator: RDM legs must have length k");
    }
    for (int j = 1; j <= e_.eta; j++) {
        if (!s.z.contains(v(j))) {
            throw std::invalid_argument("DenseEstimator: v does not map [eta] onto z");
        }
    }
    ComplexMatrix vu = permuted_rows(s.u, v);
    const std::uint64_t pm = p.mask();
    const std::uint64_t qm = q.mask();
    Complex acc = 0.0;
    for (auto r : all_masks(e_.n, e_.k)) {
        double w = class_d_[std::popcount(r & head_mask_)];
        if (w == 0.0) {
            continue;
        }
        acc += w * std::conj(minor_det_mask(vu, r, qm)) * minor_det_mask(vu, r, pm);
    }
    return acc;
}

ComplexMatrix DenseEstimator::estimate_all(const ClassicalShadow &s) const {
    check(s);
    ComplexMatrix vu = permuted_rows(s.u, canonical_permutation(s.z));
    ComplexMatrix g = compound_matrix(vu, e_.k);
    auto masks = all_masks(e_.n, e_.k);
    Eigen::VectorXd w(static_cast<Eigen::Index>(masks.size()));
    for (std::size_t r = 0; r < masks.size(); r++) {
        w(static_cast<Eigen::Index>(r)) = class_d_[std::popcount(masks[r] & head_mask_)];
    }
    // (p, q) entry: sum_r E_r conj(G[r,q]) G[r,p].
    return g.transpose() * w.asDiagonal() * g.conjugate();
}

Complex DenseEstimator::estimate_observable(const ClassicalShadow &s, const RdmObservable &obs) const {
    if (obs.n != e_.n || obs.k != e_.k) {
        throw std::invalid_argument("estimate_observable: observable lives on a different space");
    }
    std::vector<std::pair<Eigen::Index, Eigen::Index>> nonzero;
    for (Eigen::Index i = 0; i < obs.coeffs.rows(); i++) {
        for (Eigen::Index j = 0; j < obs.coeffs.cols(); j++) {
            if (obs.coeffs(i, j) != Complex(0.0, 0.0)) {
                nonzero.emplace_back(i, j);
            }
        }
    }
    // Sparse observables go entry by entry, which also keeps single entries bit-identical to estimate().
    if (static_cast<Eigen::Index>(nonzero.size()) <= obs.coeffs.rows()) {
        Complex acc = 0.0;
        for (auto [i, j] : nonzero) {
            Complex e = estimate(s, unrank_subset(static_cast<std::uint64_t>(i), e_.n, e_.k),
                                 unrank_subset(static_cast<std::uint64_t>(j), e_.n, e_.k));
            acc += obs.coeffs(i, j) == Complex(1.0, 0.0) ? e : obs.coeffs(i, j) * e;
        }
        return acc;
    }
    ComplexMatrix all = estimate_all(s);
    return (obs.coeffs.array() * all.array()).sum();
}

Complex estimate_rdm(const ClassicalShadow &s, int eta, int k, const OccupationVector &p, const OccupationVector &q) {
    return DenseEstimator(s.n(), eta, k).estimate(s, p, q);
}

Complex estimate_observable(const ClassicalShadow &s, const RdmObservable &obs, int eta) {
    return DenseEstimator(s.n(), eta, obs.k).estimate_observable(s, obs);
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return (v.size() % 2) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Aggregate mean_of(const std::vector<Complex> &x) {
    const double n = static_cast<double>(x.size());
    Complex sum = 0.0;
    for (auto v : x) {
        sum += v;
    }
    Complex mean = sum / n;
    double sre = 0.0, sim = 0.0;
    for (auto v : x) {
        sre += (v.real() - mean.real()) * (v.real() - mean.real());
        sim += (v.imag() - mean.imag()) * (v.imag() - mean.imag());
    }
    if (x.size() < 2) {
        return {mean, 0.0};
    }
    return {mean, Complex(std::sqrt(sre / (n - 1) / n), std::sqrt(sim / (n - 1) / n))};
}

}  // namespace

Aggregate aggregate(const std::vector<Complex> &series, AggregationMode mode, std::size_t batches) {
    if (series.empty()) {
        throw std::invalid_argument("aggregate: empty series");
    }
    if (mode == AggregationMode::kMean) {
        return mean_of(series);
    }
    if (batches == 0 || series.size() % batches != 0) {
        throw std::invalid_argument("aggregate: batch count must divide the series length");
    }
    const std::size_t len = series.size() / batches;
    std::vector<Complex> means;
    std::vector<double> re, im;
    for (std::size_t b = 0; b < batches; b++) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < len; i++) {
            s += series[b * len + i];
        }
        s /= static_cast<double>(len);
        means.push_back(s);
        re.push_back(s.real());
        im.push_back(s.imag());
    }
    return {Complex(median(re), median(im)), mean_of(means).std_error};
}

EstimateAccumulator::EstimateAccumulator(Eigen::Index rows, Eigen::Index cols)
    : sum_(ComplexMatrix::Zero(rows, cols)),
      sum_re2_(Eigen::MatrixXd::Zero(rows, cols)),
      sum_im2_(Eigen::MatrixXd::Zero(rows, cols)) {
}

void EstimateAccumulator::add(const ComplexMatrix &x) {
    sum_ += x;
    sum_re2_ += x.real().cwiseAbs2();
    sum_im2_ += x.imag().cwiseAbs2();
    count_++;
}

ComplexMatrix EstimateAccumulator::mean() const {
    return sum_ / static_cast<double>(count_);
}

ComplexMatrix EstimateAccumulator::std_error() const {
    const double n = static_cast<double>(count_);
    ComplexMatrix m = mean();
    Eigen::MatrixXd vre = (sum_re2_ / n - m.real().cwiseAbs2()) * (n / (n - 1));
    Eigen::MatrixXd vim = (sum_im2_ / n - m.imag().cwiseAbs2()) * (n / (n - 1));
    ComplexMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            out(i, j) = Complex(std::sqrt(std::max(0.0, vre(i, j)) / n), std::sqrt(std::max(0.0, vim(i, j)) / n));
        }
    }
    return out;
}

Eigen::MatrixXd EstimateAccumulator::variance() const {
    const double n = static_cast<double>(count_);
    ComplexMatrix m = mean();
    return ((sum_re2_ + sum_im2_) / n - m.cwiseAbs2()) * (n / (n - 1));
}

Rational avg_shadow_norm_sq(int n, int eta, int k) {
    if (k < 0 || k > eta || eta > n) {
        throw std::domain_error("avg_shadow_norm_sq: need 0 <= k <= eta <= n");
    }
    Rational cnk(binom(n, k));
    Rational head = EstimationMatrix::build(n, eta, k).trace_squared() / (cnk * cnk);
    Rational c = Rational(binom(n - k, eta - k), binom(n, eta));
    Rational r = head - c * c / cnk;
    r.canonicalize();
    return r;
}

Rational variance_bound_exact(int n, int eta, int k) {
    if (k < 0 || k > eta || eta > n || n < 1) {
        throw std::domain_error("variance_bound: need 0 <= k <= eta <= n, n >= 1");
    }
    Rational base(Integer(n - eta + k), Integer(n));
    base.canonicalize();
    Rational p = 1;
    for (int j = 0; j < k; j++) {
        p *= base;
    }
    Rational r = Rational(binom(eta, k)) * p * Rational(Integer(1 + n), Integer(1 + n - k));
    r.canonicalize();
    return r;
}

double variance_bound(int n, int eta, int k) {
    return variance_bound_exact(n, eta, k).get_d();
}

Rational q_value(int n, int eta, int k) {
    if (k < 0 || k > eta || eta > n) {
        throw std::domain_error("q_value: need 0 <= k <= eta <= n");
    }
    Rational acc = 0;
    for (int s = 0; s <= k; s++) {
        if (eta - k + s < 0 || n - eta + k - s < 0) {
            continue;
        }
        Rational prod = 1;
        for (int j = 0; j < k; j++) {
            prod *= Rational(Integer(n - eta + k - s - j), Integer(n - j));
        }
        Rational tail(factorial(eta - k + s) * factorial(n - eta + k - s) * factorial(n - k),
                      factorial(n) * factorial(eta - k) * factorial(n - eta));
        tail.canonicalize();
        acc += Rational(binom(k, s)) * prod * tail;
    }
    Rational r = Rational(binom(eta, k)) * acc;
    r.canonicalize();
    return r;
}

Rational q_slater(int n, int eta) {
    if (eta < 0 || eta > n) {
        throw std::domain_error("q_slater: need 0 <= eta <= n");
    }
    Rational acc = 0;
    for (int s = 0; s <= std::min(eta, n - eta); s++) {
        Rational a(factorial(eta) * factorial(n - eta), factorial(eta - s) * factorial(n - s - eta));
        Rational b(factorial(n - s), factorial(n));
        acc += a * b * b;
    }
    acc.canonicalize();
    return acc;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string shadow_to_json(const ClassicalShadow &s) {
    nlohmann::json j;
    j["seed"] = s.seed;
    j["index"] = s.index;
    j["n"] = s.n();
    auto u = nlohmann::json::array();
    for (int r = 0; r < s.n(); r++) {
        for (int c = 0; c < s.n(); c++) {
            u.push_back({s.u(r, c).real(), s.u(r, c).imag()});
        }
    }
    j["u"] = u;
    j["z"] = s.z.modes();
    return j.dump();
}

ClassicalShadow shadow_from_json(const std::string &line) {
    auto j = nlohmann::json::parse(line);
    const auto &u = j.at("u");
    int n = j.contains("n") ? j.at("n").get<int>() : static_cast<int>(std::lround(std::sqrt(u.size())));
    if (static_cast<std::size_t>(n) * n != u.size()) {
        throw std::invalid_argument("shadow_from_json: u is not n x n");
    }
    ComplexMatrix m(n, n);
    for (int r = 0; r < n; r++) {
        for (int c = 0; c < n; c++) {
            const auto &e = u[static_cast<std::size_t>(r * n + c)];
            m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    ClassicalShadow s;
    s.u = UnitaryMatrix(std::move(m), 1e-10);
    s.z = OccupationVector(n, j.at("z").get<std::vector<int>>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.index = j.at("index").get<std::uint64_t>();
    return s;
}

void write_shadow_archive(std::ostream &out, const std::vector<ClassicalShadow> &shadows) {
    for (const auto &s : shadows) {
        out << shadow_to_json(s) << "\n";
    }
}

std::vector<ClassicalShadow> read_shadow_archive(std::istream &in) {
    std::vector<ClassicalShadow> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            out.push_back(shadow_from_json(line));
        }
    }
    return out;
}

void write_estimates_csv(std::ostream &out, int n, int k, const ComplexMatrix &estimates) {
    out << "p,q,k,estimate_re,estimate_im\n";
    auto sets = all_subsets(n, k);
    for (std::size_t a = 0; a < sets.size(); a++) {
        for (std::size_t b = 0; b < sets.size(); b++) {
            Complex v = estimates(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            out << '"' << sets[a].str() << "\",\"" << sets[b].str() << "\"," << k << "," << format_double(v.real())
                << "," << format_double(v.imag()) << "\n";
        }
    }
}

}  // namespace fermishadow
