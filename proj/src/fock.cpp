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

#include "fermishadow/fock.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace fermishadow {

namespace {

int sign_below(std::uint64_t mask, int bit) {
    return (std::popcount(mask & ((std::uint64_t{1} << bit) - 1)) & 1) ? -1 : 1;
}

void check_rdm_args(const FermionState &s, const OccupationVector &p, const OccupationVector &q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("RDM legs must have equal length");
    }
    if (p.n() != s.n() || q.n() != s.n()) {
        throw std::invalid_argument("RDM legs use a different mode count than the state");
    }
}

}  // namespace

FermionState::FermionState(int n, int eta, ComplexVector amplitudes) : FermionState(unnormalized(n, eta, std::move(amplitudes))) {
    if (std::abs(amps_.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("FermionState: amplitudes are not normalized");
    }
}

FermionState FermionState::unnormalized(int n, int eta, ComplexVector amplitudes) {
    if (n < 0 || n > kMaxModes || eta < 0 || eta > n) {
        throw std::invalid_argument("FermionState: need 0 <= eta <= n <= 62");
    }
    if (static_cast<std::uint64_t>(amplitudes.size()) != binom_u64(n, eta)) {
        throw std::invalid_argument("FermionState: amplitude count must be C(n, eta)");
    }
    FermionState s;
    s.n_ = n;
    s.eta_ = eta;
    s.amps_ = std::move(amplitudes);
    return s;
}

Complex FermionState::amplitude(const OccupationVector &z) const {
    return amps_(static_cast<Eigen::Index>(rank_subset(z)));
}

DiagonalOperator DiagonalOperator::zero(int n, int eta) {
    return DiagonalOperator{n, eta, std::vector<Rational>(binom_u64(n, eta), Rational(0))};
}

FermionState basis_state(const OccupationVector &z) {
    ComplexVector a = ComplexVector::Zero(static_cast<Eigen::Index>(binom_u64(z.n(), z.size())));
    a(static_cast<Eigen::Index>(rank_subset(z))) = 1.0;
    return FermionState(z.n(), z.size(), std::move(a));
}

FermionState random_state(int n, int eta, Rng &rng) {
    std::normal_distribution<double> g;
    ComplexVector a(static_cast<Eigen::Index>(binom_u64(n, eta)));
    for (auto &x : a) {
        double re = g(rng);
        double im = g(rng);
        x = Complex(re, im);
    }
    a /= a.norm();
    return FermionState(n, eta, std::move(a));
}

FermionState apply_rotation(const FermionState &state, const UnitaryMatrix &u) {
    if (u.n() != state.n()) {
        throw std::invalid_argument("apply_rotation: dimension mismatch");
    }
    ComplexVector out = compound_matrix(u.matrix(), state.eta()) * state.amplitudes();
    return FermionState::unnormalized(state.n(), state.eta(), std::move(out));
}

int rdm_on_mask(std::uint64_t mask, const std::vector<int> &p, const std::vector<int> &q, std::uint64_t *out) {
    int sign = 1;
    for (int mode : q) {
        int b = mode - 1;
        if (!((mask >> b) & 1)) {
            return 0;
        }
        sign *= sign_below(mask, b);
        mask ^= std::uint64_t{1} << b;
    }
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        int b = *it - 1;
        if ((mask >> b) & 1) {
            return 0;
        }
        sign *= sign_below(mask, b);
        mask |= std::uint64_t{1} << b;
    }
    *out = mask;
    return sign;
}

FermionState apply_rdm_operator(const FermionState &state, const OccupationVector &p, const OccupationVector &q) {
    check_rdm_args(state, p, q);
    ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(state.dim()));
    if (p.size() <= state.eta()) {
        auto masks = all_masks(state.n(), state.eta());
        for (std::size_t i = 0; i < masks.size(); i++) {
            Complex a = state.amplitudes()(static_cast<Eigen::Index>(i));
            if (a == Complex(0.0)) {
                continue;
            }
            std::uint64_t img;
            int s = rdm_on_mask(masks[i], p.modes(), q.modes(), &img);
            if (s != 0) {
                out(static_cast<Eigen::Index>(rank_mask(img))) += static_cast<double>(s) * a;
            }
        }
    }
    return FermionState::unnormalized(state.n(), state.eta(), std::move(out));
}

Complex expectation_rdm(const FermionState &state, const OccupationVector &p, const OccupationVector &q) {
    return state.amplitudes().dot(apply_rdm_operator(state, p, q).amplitudes());
}

ComplexMatrix rdm_operator_matrix(int n, int eta, const OccupationVector &p, const OccupationVector &q) {
    auto masks = all_masks(n, eta);
    const auto dim = static_cast<Eigen::Index>(masks.size());
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; i++) {
        std::uint64_t img;
        int s = rdm_on_mask(masks[i], p.modes(), q.modes(), &img);
        if (s != 0) {
            m(static_cast<Eigen::Index>(rank_mask(img)), i) = static_cast<double>(s);
        }
    }
    return m;
}

OccupationVector sample_from_amplitudes(const ComplexVector &rotated, int n, int eta, Rng &rng) {
    double total = rotated.squaredNorm();
    if (std::abs(total - 1.0) > 1e-6) {
        throw std::runtime_error("measure_occupation: probability mass defect " + std::to_string(total - 1.0));
    }
    std::uniform_real_distribution<double> uni(0.0, total);
    double x = uni(rng);
    double acc = 0.0;
    Eigen::Index pick = rotated.size() - 1;
    for (Eigen::Index i = 0; i < rotated.size(); i++) {
        acc += std::norm(rotated(i));
        if (x < acc) {
            pick = i;
            break;
        }
    }
    // Guard against landing on a zero-probability tail entry through rounding.
    while (pick > 0 && std::norm(rotated(pick)) == 0.0) {
        pick--;
    }
    return unrank_subset(static_cast<std::uint64_t>(pick), n, eta);
}

OccupationVector measure_occupation(const FermionState &state, const UnitaryMatrix &u, Rng &rng) {
    FermionState rotated = apply_rotation(state, u);
    return sample_from_amplitudes(rotated.amplitudes(), state.n(), state.eta(), rng);
}

FermionState slater_superposition(const FermionState &psi) {
    const int n = psi.n();
    const int eta = psi.eta();
    const int big = n + eta;
    // Colex order puts every subset of [n] before any subset touching modes > n,
    // so psi's amplitudes embed as a prefix.
    ComplexVector a = ComplexVector::Zero(static_cast<Eigen::Index>(binom_u64(big, eta)));
    a.head(psi.amplitudes().size()) = psi.amplitudes() / std::sqrt(2.0);
    std::vector<int> tail(eta);
    for (int j = 0; j < eta; j++) {
        tail[j] = n + 1 + j;
    }
    a(static_cast<Eigen::Index>(rank_subset(OccupationVector(big, tail)))) += 1.0 / std::sqrt(2.0);
    return FermionState(big, eta, std::move(a));
}

std::string state_to_json(const FermionState &state) {
    nlohmann::json j;
    j["n"] = state.n();
    j["eta"] = state.eta();
    auto arr = nlohmann::json::array();
    for (const auto &a : state.amplitudes()) {
        arr.push_back({a.real(), a.imag()});
    }
    j["amplitudes"] = arr;
    return j.dump();
}

FermionState state_from_json(const std::string &text) {
    auto j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    int eta = j.at("eta").get<int>();
    const auto &arr = j.at("amplitudes");
    ComplexVector a(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); i++) {
        a(static_cast<Eigen::Index>(i)) = Complex(arr[i].at(0).get<double>(), arr[i].at(1).get<double>());
    }
    return FermionState(n, eta, std::move(a));
}

}  // namespace fermishadow
