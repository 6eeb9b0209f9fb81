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

#ifndef FERMISHADOW_CHANNEL_HPP
#define FERMISHADOW_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "fermishadow/combinat.hpp"
#include "fermishadow/fock.hpp"

namespace fermishadow {

/// The measurement channel of the protocol on eta particles in n modes.
struct ChannelSpec {
    int n = 0;
    int eta = 0;
    ChannelSpec(int n_, int eta_);
};

/// Diagonal t=2 twirl coefficient f(k) for two eta-sets sharing k modes.
Rational structure_factor(int n, int eta, int k);

/// 1 / C(n+1, d).
Rational eigenvalue(int n, int d);

/// a_d = (n-2d+1)(n-d-eta)!(eta-d)!/(n-d+1)!.
Rational a_coeff(int n, int eta, int d);

/// Value of n~_d on a basis state with s = |r cap [eta]| occupied modes inside [eta].
Integer symmetrized_difference_value(int n, int eta, int d, int s);

/// n~_d as a dense diagonal over the eta-particle space.
DiagonalOperator symmetrized_difference(int n, int eta, int d);

/// prod_j (n_{x_j} - n_{y_j}) for equal-length disjoint mode lists; pairing is positional.
DiagonalOperator difference_product(int n, int eta, const std::vector<int> &x, const std::vector<int> &y);

/// M^{-1}[Pi_[eta]] = sum_d a_d C(n+1,d) n~_d.
DiagonalOperator inverse_channel_on_projector(int n, int eta);

/// M applied to a diagonal operator.
DiagonalOperator apply_channel_diagonal(const ChannelSpec &spec, const DiagonalOperator &d);

struct McDiagonal {
    std::vector<double> mean;
    std::vector<double> std_error;
};

/// Monte-Carlo estimate of M[Pi_p]: averages sum_z |<z|U|p>|^2 |<z|U|r>|^2 over Haar u.
McDiagonal mc_channel_estimate(const ChannelSpec &spec, const OccupationVector &p, std::uint64_t samples,
                               std::uint64_t seed);

struct McScalar {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of E_u |det u[p,[eta]]|^2 |det u[q,[eta]]|^2.
McScalar mc_twirl_moment(int n, const OccupationVector &p, const OccupationVector &q, std::uint64_t samples,
                         std::uint64_t seed);

/// Coefficients relating Sim_k(Pi_p) and the elementary symmetric polynomials e_j({n}_p).
struct SimExpansion {
    /// Sim_k = sum_j sim_to_e[j] e_j, c_j = (-1)^{j+k} C(j,k).
    std::vector<Rational> sim_to_e;
    /// e_k = sum_j e_to_sim[j] Sim_j, C(j,k).
    std::vector<Rational> e_to_sim;
};
SimExpansion sim_k_expansion(int eta, int k);

}  // namespace fermishadow

#endif
