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

#include "fermishadow/channel.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fermishadow/parallel.hpp"

namespace fermishadow {

namespace {

std::uint64_t first_mask(int eta) {
    return eta >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << eta) - 1;
}

// h(t) = sum_j C(t,j) / (C(n+1,eta) C(eta,j)): the M[Pi_p] entry on a state sharing t modes with p.
std::vector<Rational> channel_kernel(int n, int eta) {
    std::vector<Rational> h(eta + 1);
    Rational norm(Integer(1), binom(n + 1, eta));
    for (int t = 0; t <= eta; t++) {
        Rational acc = 0;
        for (int j = 0; j <= t; j++) {
            acc += Rational(binom(t, j), binom(eta, j));
        }
        h[t] = acc * norm;
        h[t].canonicalize();
    }
    return h;
}

struct Moments {
    double mean;
    double std_error;
};

Moments moments(const std::vector<double> &x) {
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) {
        sum += v;
    }
    double mean = sum / n;
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    double var = x.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

}  // namespace

ChannelSpec::ChannelSpec(int n_, int eta_) : n(n_), eta(eta_) {
    if (eta < 0 || eta > n || n > kMaxModes) {
        throw std::invalid_argument("ChannelSpec: need 0 <= eta <= n <= 62");
    }
}

Rational structure_factor(int n, int eta, int k) {
    if (k < 0 || k > eta || eta > n) {
        throw std::domain_error("structure_factor: need 0 <= k <= eta <= n");
    }
    Rational r(Integer(eta + 1), Integer(eta + 1 - k) * binom(n + 1, eta) * binom(n, eta));
    r.canonicalize();
    return r;
}

Rational eigenvalue(int n, int d) {
    if (d < 0 || d > n + 1) {
        throw std::domain_error("eigenvalue: need 0 <= d <= n+1");
    }
    return Rational(Integer(1), binom(n + 1, d));
}

Rational a_coeff(int n, int eta, int d) {
    if (d < 0 || d > eta || d > n - eta) {
        throw std::domain_error("a_coeff: need 0 <= d <= min(eta, n-eta)");
    }
    Rational r(Integer(n - 2 * d + 1) * factorial(n - d - eta) * factorial(eta - d), factorial(n - d + 1));
    r.canonicalize();
    return r;
}

Integer symmetrized_difference_value(int n, int eta, int d, int s) {
    if (d < 0 || d > eta || d > n - eta) {
        throw std::domain_error("symmetrized_difference: need 0 <= d <= min(eta, n-eta)");
    }
    // Expand prod_j (n_{x_j} - n_{y_j}) and sum over x in S_{eta,d}, ordered y outside [eta]:
    // j factors pick -n_y. Occupied counts: s inside [eta], eta - s outside.
    Integer acc = 0;
    for (int j = 0; j <= d; j++) {
        Integer term = factorial_ratio(eta - d + j, eta - d) * factorial_ratio(n - eta - j, n - eta - d) *
                       binom(s, d - j) * binom(eta - s, j);
        acc += (j & 1) ? -term : term;
    }
    return acc;
}

DiagonalOperator symmetrized_difference(int n, int eta, int d) {
    DiagonalOperator out = DiagonalOperator::zero(n, eta);
    const std::uint64_t head = first_mask(eta);
    std::vector<Integer> by_class(eta + 1);
    for (int s = 0; s <= eta; s++) {
        by_class[s] = symmetrized_difference_value(n, eta, d, s);
    }
    auto masks = all_masks(n, eta);
    for (std::size_t i = 0; i < masks.size(); i++) {
        out.values[i] = by_class[std::popcount(masks[i] & head)];
    }
    return out;
}

DiagonalOperator difference_product(int n, int eta, const std::vector<int> &x, const std::vector<int> &y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("difference_product: x and y differ in length");
    }
    DiagonalOperator out = DiagonalOperator::zero(n, eta);
    auto masks = all_masks(n, eta);
    for (std::size_t i = 0; i < masks.size(); i++) {
        long v = 1;
        for (std::size_t j = 0; j < x.size() && v != 0; j++) {
            long a = static_cast<long>((masks[i] >> (x[j] - 1)) & 1);
            long b = static_cast<long>((masks[i] >> (y[j] - 1)) & 1);
            v *= a - b;
        }
        out.values[i] = v;
    }
    return out;
}

DiagonalOperator inverse_channel_on_projector(int n, int eta) {
    DiagonalOperator out = DiagonalOperator::zero(n, eta);
    const std::uint64_t head = first_mask(eta);
    std::vector<Rational> by_class(eta + 1, Rational(0));
    for (int d = 0; d <= std::min(eta, n - eta); d++) {
        Rational c = a_coeff(n, eta, d) * Rational(binom(n + 1, d));
        for (int s = 0; s <= eta; s++) {
            by_class[s] += c * Rational(symmetrized_difference_value(n, eta, d, s));
        }
    }
    auto masks = all_masks(n, eta);
    for (std::size_t i = 0; i < masks.size(); i++) {
        out.values[i] = by_class[std::popcount(masks[i] & head)];
    }
    return out;
}

DiagonalOperator apply_channel_diagonal(const ChannelSpec &spec, const DiagonalOperator &d) {
    const int n = spec.n;
    const int eta = spec.eta;
    if (d.n != n || d.eta != eta || d.values.size() != binom_u64(n, eta)) {
        throw std::invalid_argument("apply_channel_diagonal: operator does not live on this space");
    }
    const auto h = channel_kernel(n, eta);
    const auto masks = all_masks(n, eta);
    const std::size_t dim = masks.size();
    DiagonalOperator out = DiagonalOperator::zero(n, eta);

    bool integral = true;
    std::vector<long> ints(dim);
    for (std::size_t i = 0; i < dim && integral; i++) {
        const auto &v = d.values[i];
        if (v.get_den() != 1 || !v.get_num().fits_slong_p() || std::abs(v.get_num().get_si()) > (1L << 40)) {
            integral = false;
        } else {
            ints[i] = v.get_num().get_si();
        }
    }
    std::vector<long> class_int(eta + 1);
    std::vector<Rational> class_q(eta + 1);
    for (std::size_t r = 0; r < dim; r++) {
        if (integral) {
            std::fill(class_int.begin(), class_int.end(), 0);
            for (std::size_t p = 0; p < dim; p++) {
                class_int[std::popcount(masks[p] & masks[r])] += ints[p];
            }
            for (int t = 0; t <= eta; t++) {
                class_q[t] = class_int[t];
            }
        } else {
            std::fill(class_q.begin(), class_q.end(), Rational(0));
            for (std::size_t p = 0; p < dim; p++) {
                class_q[std::popcount(masks[p] & masks[r])] += d.values[p];
            }
        }
        Rational acc = 0;
        for (int t = 0; t <= eta; t++) {
            acc += h[t] * class_q[t];
        }
        out.values[r] = acc;
    }
    return out;
}

McDiagonal mc_channel_estimate(const ChannelSpec &spec, const OccupationVector &p, std::uint64_t samples,
                               std::uint64_t seed) {
    if (samples < 1) {
        throw std::invalid_argument("mc_channel_estimate: need at least one sample");
    }
    if (p.n() != spec.n || p.size() != spec.eta) {
        throw std::invalid_argument("mc_channel_estimate: p does not index the eta-particle space");
    }
    const std::size_t dim = binom_u64(spec.n, spec.eta);
    const auto pi = static_cast<Eigen::Index>(rank_subset(p));
    std::vector<double> per_sample(samples * dim);
    parallel_for(samples, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; i++) {
            Rng rng = stream_rng(seed, i);
            UnitaryMatrix u = haar_unitary(spec.n, rng);
            ComplexMatrix c = compound_matrix(u.matrix(), spec.eta);
            Eigen::MatrixXd w = c.cwiseAbs2();
            for (std::size_t r = 0; r < dim; r++) {
                per_sample[i * dim + r] = w.col(pi).dot(w.col(static_cast<Eigen::Index>(r)));
            }
        }
    });
    McDiagonal out;
    std::vector<double> column(samples);
    for (std::size_t r = 0; r < dim; r++) {
        for (std::size_t i = 0; i < samples; i++) {
            column[i] = per_sample[i * dim + r];
        }
        auto m = moments(column);
        out.mean.push_back(m.mean);
        out.std_error.push_back(m.std_error);
    }
    return out;
}

McScalar mc_twirl_moment(int n, const OccupationVector &p, const OccupationVector &q, std::uint64_t samples,
                         std::uint64_t seed) {
    if (p.size() != q.size() || p.n() != n || q.n() != n) {
        throw std::invalid_argument("mc_twirl_moment: p and q must be eta-sets over n modes");
    }
    const auto head = OccupationVector::first(p.size(), n);
    std::vector<double> x(samples);
    parallel_for(samples, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; i++) {
            Rng rng = stream_rng(seed, i);
            UnitaryMatrix u = haar_unitary(n, rng);
            x[i] = std::norm(minor_det(u.matrix(), p, head)) * std::norm(minor_det(u.matrix(), q, head));
        }
    });
    auto m = moments(x);
    return {m.mean, m.std_error};
}

SimExpansion sim_k_expansion(int eta, int k) {
    if (k < 0 || k > eta) {
        throw std::domain_error("sim_k_expansion: need 0 <= k <= eta");
    }
    SimExpansion out;
    for (int j = 0; j <= eta; j++) {
        Integer c = binom(j, k);
        out.sim_to_e.emplace_back(((j + k) & 1) ? Integer(-c) : c);
        out.e_to_sim.emplace_back(c);
    }
    return out;
}

}  // namespace fermishadow
