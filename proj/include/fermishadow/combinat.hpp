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

#ifndef FERMISHADOW_COMBINAT_HPP
#define FERMISHADOW_COMBINAT_HPP

#include <gmpxx.h>

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace fermishadow {

using Integer = mpz_class;
using Rational = mpq_class;

/// Largest mode count supported by bitmask-backed routines.
inline constexpr int kMaxModes = 62;

/// C(a, b), zero whenever b < 0, a < 0, or b > a.
Integer binom(long a, long b);

/// Machine-word binomial for index arithmetic; same zero convention. a <= 64.
std::uint64_t binom_u64(int a, int b);

Integer factorial(long a);

/// a! / b! for a >= b >= 0 (falling product b+1..a).
Integer factorial_ratio(long a, long b);

double to_double(const Rational &q);
std::string to_string(const Rational &q);

/// A sorted set of occupied modes, 1-based, over n modes.
class OccupationVector {
   public:
    OccupationVector() = default;
    OccupationVector(int n, std::vector<int> modes);
    OccupationVector(int n, std::initializer_list<int> modes) : OccupationVector(n, std::vector<int>(modes)) {
    }

    static OccupationVector from_mask(std::uint64_t mask, int n);
    /// The first d modes (1, ..., d).
    static OccupationVector first(int d, int n);

    int n() const {
        return n_;
    }
    int size() const {
        return static_cast<int>(modes_.size());
    }
    int operator[](int i) const {
        return modes_[i];
    }
    const std::vector<int> &modes() const {
        return modes_;
    }
    std::uint64_t mask() const;
    bool contains(int mode) const;
    std::string str() const;

    bool operator==(const OccupationVector &o) const = default;

   private:
    int n_ = 0;
    std::vector<int> modes_;
};

/// Colexicographic rank in [0, C(n, d)).
std::uint64_t rank_subset(const OccupationVector &z);
std::uint64_t rank_mask(std::uint64_t mask);
OccupationVector unrank_subset(std::uint64_t r, int n, int d);

/// All d-subsets of [n] in rank order.
std::vector<OccupationVector> all_subsets(int n, int d);
std::vector<std::uint64_t> all_masks(int n, int d);

int overlap_count(const OccupationVector &p, const OccupationVector &q);

/// Bijection on [1..n] stored as an image array: image()[j-1] = v(j).
class PermutationMatrix {
   public:
    PermutationMatrix() = default;
    explicit PermutationMatrix(std::vector<int> image);
    static PermutationMatrix identity(int n);

    int n() const {
        return static_cast<int>(image_.size());
    }
    int operator()(int j) const {
        return image_[j - 1];
    }
    const std::vector<int> &image() const {
        return image_;
    }
    PermutationMatrix inverse() const;

   private:
    std::vector<int> image_;
};

/// v_z with v_z(j) = z_j for j <= |z|; the rest of [n] goes to [n] \ z in order.
PermutationMatrix canonical_permutation(const OccupationVector &z);

/// +1 or -1: parity of the permutation that sorts a list of distinct integers.
int sort_sign(const std::vector<int> &values);

}  // namespace fermishadow

#endif
