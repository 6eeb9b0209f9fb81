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

#include "fermishadow/identities.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "fermishadow/channel.hpp"
#include "fermishadow/shadows.hpp"
#include "json.hpp"

namespace fermishadow {

namespace {

Rational ratio(const Integer &a, const Integer &b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

}  // namespace

SumReport trace_nd_squared(int n, int eta, int d) {
    if (eta < 0 || eta > n || d < 0 || d > std::min(eta, n - eta)) {
        throw std::domain_error("trace_nd_squared: need 0 <= d <= min(eta, n-eta)");
    }
    // s counts occupied modes outside [eta]; the inner sum is the n~_d value on that class
    // times (eta-d)!(n-eta-d)!.
    Integer total = 0;
    for (int s = 0; s <= std::min(eta, n - eta); s++) {
        Integer inner = 0;
        for (int j = std::max(0, s + d - eta); j <= std::min(d, s); j++) {
            Integer t = factorial(eta - d + j) * factorial(n - eta - j) * binom(s, j) * binom(eta - s, d - j);
            inner += (j & 1) ? Integer(-t) : t;
        }
        total += binom(eta, eta - s) * binom(n - eta, s) * inner * inner;
    }
    Integer den = factorial(eta - d) * factorial(n - eta - d);
    SumReport r;
    r.name = "trace_nd_squared";
    r.params = {n, eta, d};
    r.brute_value = ratio(total, den * den);
    r.closed_value = ratio(factorial(eta) * factorial(n - d + 1) * factorial(n - eta),
                           factorial(d) * Integer(n - 2 * d + 1) * factorial(n - eta - d) * factorial(n - eta - d) *
                               factorial(eta - d) * factorial(eta - d));
    Rational dense = 0;
    if (n <= 16) {
        for (const auto &v : symmetrized_difference(n, eta, d).values) {
            dense += v * v;
        }
    } else {
        dense = r.brute_value;
    }
    r.agree = r.brute_value == r.closed_value && dense == r.closed_value;
    return r;
}

SumReport t_sum(int n, int eta, int k, int s) {
    if (s < 0 || s > k || k > eta || eta > n) {
        throw std::domain_error("t_sum: need 0 <= s <= k <= eta <= n");
    }
    Rational total = 0;
    for (int d = 0; d <= std::min(eta, n - eta); d++) {
        Rational head = a_coeff(n, eta, d) * Rational(binom(n + 1, d));
        for (int dp = 0; dp <= d; dp++) {
            Rational mid = head * ratio(factorial(eta - dp) * factorial(n - eta - d + dp),
                                        factorial(eta - d) * factorial(n - eta - d));
            if ((d - dp) & 1) {
                mid = -mid;
            }
            for (int x = 0; x <= k - s; x++) {
                for (int y = 0; y <= s; y++) {
                    Integer c = binom(k - s, x) * binom(eta - k + s, dp - x) * binom(s, y) *
                                binom(n - eta - s, d - dp - y) * binom(n - (d + k - x - y), n - eta);
                    if (c != 0) {
                        total += mid * Rational(c);
                    }
                }
            }
        }
    }
    SumReport r;
    r.name = "t_sum";
    r.params = {n, eta, k, s};
    r.brute_value = total;
    Integer num = binom(eta + s - k, s) * binom(n - eta + k - s, k - s);
    r.closed_value = ratio((s & 1) ? Integer(-num) : num, binom(k, s));
    r.agree = r.brute_value == r.closed_value && r.closed_value == estimation_entry(n, eta, k, k - s);
    return r;
}

Rational weingarten_xi(int n, int eta) {
    if (eta < 0 || eta > n) {
        throw std::domain_error("weingarten_xi: need 0 <= eta <= n");
    }
    Integer f = factorial(eta);
    return ratio(1, f * f * binom(n, eta) * binom(n + 1, eta));
}

Rational weingarten_g(int eta, int k) {
    if (k < 0 || k > eta) {
        throw std::domain_error("weingarten_g: need 0 <= k <= eta");
    }
    Integer f = factorial(eta);
    return ratio(f * f * Integer(eta + 1), Integer(eta + 1 - k));
}

int chu_vandermonde_checks(int limit) {
    if (limit < 1) {
        throw std::invalid_argument("chu_vandermonde_checks: limit must be positive");
    }
    int failures = 0;
    for (int n = 0; n <= limit; n++) {
        for (int m = 0; m <= n; m++) {
            for (int k = 0; k <= n; k++) {
                Integer acc = 0;
                for (int j = 0; j <= k; j++) {
                    acc += binom(m, j) * binom(n - m, k - j);
                }
                failures += acc != binom(n, k);
            }
        }
    }
    for (int eta = 0; eta <= limit; eta++) {
        for (int k = 0; k <= eta; k++) {
            Rational a = 0;
            for (int j = 0; j <= k; j++) {
                a += ratio(factorial(k) * factorial(eta - j), factorial(eta) * factorial(k - j));
            }
            failures += a != ratio(eta + 1, eta - k + 1);
        }
        for (int j = 0; j <= eta; j++) {
            Rational acc = 0;
            for (int k = 0; k <= j; k++) {
                Rational t = ratio(Integer(1 + eta) * binom(j, k), Integer(1 + eta - k));
                acc += ((j + k) & 1) ? Rational(-t) : t;
            }
            failures += acc != ratio(1, binom(eta, j));
        }
    }
    return failures;
}

bool projector_identity_holds(int n, int eta) {
    DiagonalOperator sum = DiagonalOperator::zero(n, eta);
    for (int d = 0; d <= std::min(eta, n - eta); d++) {
        Rational a = a_coeff(n, eta, d);
        DiagonalOperator nd = symmetrized_difference(n, eta, d);
        for (std::size_t i = 0; i < sum.values.size(); i++) {
            sum.values[i] += a * nd.values[i];
        }
    }
    // Pi_[eta] is rank 0 in colex order.
    for (std::size_t i = 0; i < sum.values.size(); i++) {
        if (sum.values[i] != Rational(i == 0 ? 1 : 0)) {
            return false;
        }
    }
    return true;
}

int eigenoperator_law_failures(int n, int eta, long *checked) {
    const ChannelSpec spec(n, eta);
    int failures = 0;
    long count = 0;
    for (int d = 0; d <= std::min(eta, n - eta); d++) {
        const Rational lambda = eigenvalue(n, d);
        for (const auto &x : all_subsets(n, d)) {
            std::vector<int> rest;
            for (int m = 1; m <= n; m++) {
                if (!x.contains(m)) {
                    rest.push_back(m);
                }
            }
            for (const auto &ysub : all_subsets(static_cast<int>(rest.size()), d)) {
                std::vector<int> y;
                for (int i : ysub.modes()) {
                    y.push_back(rest[i - 1]);
                }
                do {
                    DiagonalOperator op = difference_product(n, eta, x.modes(), y);
                    DiagonalOperator image = apply_channel_diagonal(spec, op);
                    bool ok = true;
                    for (std::size_t i = 0; i < op.values.size() && ok; i++) {
                        ok = image.values[i] == lambda * op.values[i];
                    }
                    failures += !ok;
                    count++;
                } while (std::next_permutation(y.begin(), y.end()));
            }
        }
    }
    if (checked) {
        *checked = count;
    }
    return failures;
}

std::vector<SumReport> sweep_trace_nd(int n_max) {
    std::vector<SumReport> out;
    for (int n = 0; n <= n_max; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int d = 0; d <= std::min(eta, n - eta); d++) {
                out.push_back(trace_nd_squared(n, eta, d));
            }
        }
    }
    return out;
}

std::vector<SumReport> sweep_t_sum(int n_max) {
    std::vector<SumReport> out;
    for (int n = 0; n <= n_max; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                for (int s = 0; s <= std::min(k, n - eta); s++) {
                    out.push_back(t_sum(n, eta, k, s));
                }
            }
        }
    }
    return out;
}

std::string reports_to_json(const std::vector<SumReport> &reports) {
    nlohmann::json j;
    auto arr = nlohmann::json::array();
    int failures = 0;
    for (const auto &r : reports) {
        arr.push_back({{"name", r.name},
                       {"params", r.params},
                       {"brute_value", r.brute_value.get_str()},
                       {"closed_value", r.closed_value.get_str()},
                       {"agree", r.agree}});
        failures += !r.agree;
    }
    j["reports"] = arr;
    j["total"] = reports.size();
    j["failures"] = failures;
    j["pass"] = failures == 0;
    return j.dump(2);
}

}  // namespace fermishadow
