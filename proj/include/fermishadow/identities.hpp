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

#ifndef FERMISHADOW_IDENTITIES_HPP
#define FERMISHADOW_IDENTITIES_HPP

#include <string>
#include <vector>

#include "fermishadow/combinat.hpp"

namespace fermishadow {

/// One brute-force vs closed-form comparison.
struct SumReport {
    std::string name;
    std::vector<int> params;
    Rational brute_value;
    Rational closed_value;
    bool agree = false;
};

/// Tr[n~_d^2] on the eta-particle space: class-sum brute value vs closed form, also checked
/// against the squared entries of the materialized operator.
SumReport trace_nd_squared(int n, int eta, int d);

/// t_{n,eta,k,s} by the literal quadruple sum vs its closed form; agreement also requires the
/// closed form to equal estimation_entry(n, eta, k, k - s).
SumReport t_sum(int n, int eta, int k, int s);

/// Xi_{n,eta} = 1 / ((eta!)^2 C(n,eta) C(n+1,eta)).
Rational weingarten_xi(int n, int eta);

/// g_eta(k) = (eta!)^2 (eta+1)/(eta+1-k).
Rational weingarten_g(int eta, int k);

/// Chu-Vandermonde, the A(eta,k) sum, and the alternating inverse-binomial sum, exhaustively
/// up to `limit`. Returns the number of failures.
int chu_vandermonde_checks(int limit);

/// sum_d a_d n~_d == Pi_[eta] entrywise on the eta-particle space.
bool projector_identity_holds(int n, int eta);

/// Checks M[n~_{x,y}] = n~_{x,y}/C(n+1,d) exactly for every sorted x and ordered y, disjoint,
/// |x| = |y| = d <= min(eta, n - eta). Returns the number of failures; *checked gets the count.
int eigenoperator_law_failures(int n, int eta, long *checked = nullptr);

/// All trace_nd_squared reports for n <= n_max.
std::vector<SumReport> sweep_trace_nd(int n_max);

/// All t_sum reports for n <= n_max over s <= min(k, n - eta).
std::vector<SumReport> sweep_t_sum(int n_max);

/// JSON: {"reports":[...], "total":N, "failures":F, "pass":bool}.
std::string reports_to_json(const std::vector<SumReport> &reports);

}  // namespace fermishadow

#endif
