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

#include "fermishadow/combinat.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace fermishadow {

namespace {

struct BinomTable {
    std::array<std::array<std::uint64_t, 65>, 65> c{};
    BinomTable() {
        for (int a = 0; a <= 64; a++) {
            c[a][0] = 1;
            for (int b = 1; b <= a; b++) {
                c[a][b] = c[a - 1][b - 1] + (b <= a - 1 ? c[a - 1][b] : 0);
            }
        }
    }
};

const BinomTable &table() {
    static const BinomTable t;
    return t;
}

}  // namespace

Integer binom(long a, long b) {
    if (a < 0 || b < 0 || b > a) {
        return 0;
    }
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
    return r;
}

std::uint64_t binom_u64(int a, int b) {
    if (a < 0 || b < 0 || b > a) {
        return 0;
    }
    if (a > 64) {
        throw std::out_of_range("binom_u64: a > 64");
    }
    return table().c[a][b];
}

Integer factorial(long a) {
    if (a < 0) {
        throw std::domain_error("factorial of negative integer");
    }
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(a));
    return r;
}

Integer factorial_ratio(long a, long b) {
    if (b < 0 || a < b) {
        throw std::domain_error("factorial_ratio requires a >= b >= 0");
    }
    Integer r = 1;
    for (long j = b + 1; j <= a; j++) {
        r *= j;
    }
    return r;
}

double to_double(const Rational &q) {
    return q.get_d();
}

std::string to_string(const Rational &q) {
    return q.get_str();
}

OccupationVector::OccupationVector(int n, std::vector<int> modes) : n_(n), modes_(std::move(modes)) {
    if (n < 0) {
        throw std::invalid_argument("OccupationVector: negative mode count");
    }
    for (size_t i = 0; i < modes_.size(); i++) {
        if (modes_[i] < 1 || modes_[i] > n || (i > 0 && modes_[i - 1] >= modes_[i])) {
            throw std::invalid_argument("OccupationVector: modes must be strictly increasing in [1, n]");
        }
    }
}

OccupationVector OccupationVector::from_mask(std::uint64_t mask, int n) {
    std::vector<int> m;
    while (mask) {
        m.push_back(std::countr_zero(mask) + 1);
        mask &= mask - 1;
    }
    return OccupationVector(n, std::move(m));
}

OccupationVector OccupationVector::first(int d, int n) {
    std::vector<int> m(d);
    for (int j = 0; j < d; j++) {
        m[j] = j + 1;
    }
    return OccupationVector(n, std::move(m));
}

std::uint64_t OccupationVector::mask() const {
    if (n_ > kMaxModes) {
        throw std::out_of_range("OccupationVector::mask: too many modes");
    }
    std::uint64_t m = 0;
    for (int v : modes_) {
        m |= std::uint64_t{1} << (v - 1);
    }
    return m;
}

bool OccupationVector::contains(int mode) const {
    return std::binary_search(modes_.begin(), modes_.end(), mode);
}

std::string OccupationVector::str() const {
    std::ostringstream out;
    out << "(";
    for (size_t i = 0; i < modes_.size(); i++) {
        out << (i ? "," : "") << modes_[i];
    }
    out << ")";
    return out.str();
}

std::uint64_t rank_subset(const OccupationVector &z) {
    std::uint64_t r = 0;
    for (int i = 0; i < z.size(); i++) {
        r += binom_u64(z[i] - 1, i + 1);
    }
    return r;
}

std::uint64_t rank_mask(std::uint64_t mask) {
    std::uint64_t r = 0;
    int i = 1;
    while (mask) {
        r += binom_u64(std::countr_zero(mask), i++);
        mask &= mask - 1;
    }
    return r;
}

OccupationVector unrank_subset(std::uint64_t r, int n, int d) {
    if (d < 0 || d > n || r >= binom_u64(n, d)) {
        throw std::out_of_range("unrank_subset: rank out of range");
    }
    std::vector<int> modes(d);
    int c = n - 1;
    for (int i = d; i >= 1; i--) {
        while (binom_u64(c, i) > r) {
            c--;
        }
        modes[i - 1] = c + 1;
        r -= binom_u64(c, i);
        c--;
    }
    return OccupationVector(n, std::move(modes));
}

std::vector<std::uint64_t> all_masks(int n, int d) {
    std::vector<std::uint64_t> out;
    if (d < 0 || d > n) {
        return out;
    }
    out.reserve(binom_u64(n, d));
    if (d == 0) {
        out.push_back(0);
        return out;
    }
    // Gosper's hack enumerates d-subsets in increasing numeric order, which is colex order.
    std::uint64_t m = (std::uint64_t{1} << d) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (m < limit) {
        out.push_back(m);
        std::uint64_t c = m & -m;
        std::uint64_t r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    return out;
}

std::vector<OccupationVector> all_subsets(int n, int d) {
    std::vector<OccupationVector> out;
    for (auto m : all_masks(n, d)) {
        out.push_back(OccupationVector::from_mask(m, n));
    }
    return out;
}

int overlap_count(const OccupationVector &p, const OccupationVector &q) {
    int i = 0, j = 0, c = 0;
    while (i < p.size() && j < q.size()) {
        if (p[i] == q[j]) {
            c++;
            i++;
            j++;
        } else if (p[i] < q[j]) {
            i++;
        } else {
            j++;
        }
    }
    return c;
}

PermutationMatrix::PermutationMatrix(std::vector<int> image) : image_(std::move(image)) {
    std::vector<char> seen(image_.size() + 1, 0);
    for (int v : image_) {
        if (v < 1 || v > static_cast<int>(image_.size()) || seen[v]) {
            throw std::invalid_argument("PermutationMatrix: image is not a permutation");
        }
        seen[v] = 1;
    }
}

PermutationMatrix PermutationMatrix::identity(int n) {
    std::vector<int> im(n);
    for (int j = 0; j < n; j++) {
        im[j] = j + 1;
    }
    return PermutationMatrix(std::move(im));
}

PermutationMatrix PermutationMatrix::inverse() const {
    std::vector<int> inv(image_.size());
    for (size_t j = 0; j < image_.size(); j++) {
        inv[image_[j] - 1] = static_cast<int>(j) + 1;
    }
    return PermutationMatrix(std::move(inv));
}

PermutationMatrix canonical_permutation(const OccupationVector &z) {
    const int n = z.n();
    std::vector<int> im(z.modes());
    im.reserve(n);
    for (int m = 1; m <= n; m++) {
        if (!z.contains(m)) {
            im.push_back(m);
        }
    }
    return PermutationMatrix(std::move(im));
}

int sort_sign(const std::vector<int> &values) {
    int inversions = 0;
    for (size_t i = 0; i < values.size(); i++) {
        for (size_t j = i + 1; j < values.size(); j++) {
            if (values[i] > values[j]) {
                inversions++;
            }
        }
    }
    return (inversions & 1) ? -1 : 1;
}

}  // namespace fermishadow
