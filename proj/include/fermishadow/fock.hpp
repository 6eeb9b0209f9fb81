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

#ifndef FERMISHADOW_FOCK_HPP
#define FERMISHADOW_FOCK_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fermishadow/combinat.hpp"
#include "fermishadow/linalg.hpp"

namespace fermishadow {

/// Dense state on the eta-particle space of n modes, amplitudes in colex rank order.
/// Basis kets are a^dag_{z1} ... a^dag_{z_eta} |0> with z increasing.
class FermionState {
   public:
    FermionState() = default;
    /// Checks unit norm (1e-10).
    FermionState(int n, int eta, ComplexVector amplitudes);
    /// No norm check; used for operator images such as D^p_q |psi>.
    static FermionState unnormalized(int n, int eta, ComplexVector amplitudes);

    int n() const {
        return n_;
    }
    int eta() const {
        return eta_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(amps_.size());
    }
    const ComplexVector &amplitudes() const {
        return amps_;
    }
    Complex amplitude(const OccupationVector &z) const;
    double norm() const {
        return amps_.norm();
    }

   private:
    int n_ = 0;
    int eta_ = 0;
    ComplexVector amps_;
};

/// Exact rational diagonal operator on the eta-particle space, indexed by colex rank.
struct DiagonalOperator {
    int n = 0;
    int eta = 0;
    std::vector<Rational> values;

    static DiagonalOperator zero(int n, int eta);
    bool operator==(const DiagonalOperator &o) const = default;
};

FermionState basis_state(const OccupationVector &z);
FermionState random_state(int n, int eta, Rng &rng);

/// U_eta(u) |psi>.
FermionState apply_rotation(const FermionState &state, const UnitaryMatrix &u);

/// D^p_q |psi> = a^dag_{p1} ... a^dag_{pk} a_{qk} ... a_{q1} |psi>, unnormalized.
FermionState apply_rdm_operator(const FermionState &state, const OccupationVector &p, const OccupationVector &q);

/// Action of D^p_q on one basis mask; returns the sign (0 if annihilated) and the image.
int rdm_on_mask(std::uint64_t mask, const std::vector<int> &p, const std::vector<int> &q, std::uint64_t *out);

/// <psi| D^p_q |psi>.
Complex expectation_rdm(const FermionState &state, const OccupationVector &p, const OccupationVector &q);

/// Matrix of D^p_q on the eta-particle space (dense, small n only).
ComplexMatrix rdm_operator_matrix(int n, int eta, const OccupationVector &p, const OccupationVector &q);

/// Samples z with probability |<z|U_eta(u)|psi>|^2.
OccupationVector measure_occupation(const FermionState &state, const UnitaryMatrix &u, Rng &rng);

/// Samples from the given rotated amplitudes.
OccupationVector sample_from_amplitudes(const ComplexVector &rotated, int n, int eta, Rng &rng);

/// (|psi> + |n+1, ..., n+eta>)/sqrt(2) on n + eta modes.
FermionState slater_superposition(const FermionState &psi);

std::string state_to_json(const FermionState &state);
FermionState state_from_json(const std::string &text);

}  // namespace fermishadow

#endif
