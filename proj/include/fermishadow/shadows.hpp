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

#ifndef FERMISHADOW_SHADOWS_HPP
#define FERMISHADOW_SHADOWS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fermishadow/combinat.hpp"
#include "fermishadow/fock.hpp"
#include "fermishadow/linalg.hpp"

namespace fermishadow {

/// One protocol sample: Haar rotation u and the measured occupation z.
struct ClassicalShadow {
    UnitaryMatrix u;
    OccupationVector z;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    int n() const {
        return u.n();
    }
    int eta() const {
        return z.size();
    }
};

/// Draws u from the Haar measure and measures U_eta(u)|psi>.
ClassicalShadow sample_shadow(const FermionState &state, Rng &rng);

/// Shadow `index` of a run with master seed `seed`; independent of how a run is split.
ClassicalShadow sample_shadow(const FermionState &state, std::uint64_t seed, std::uint64_t index);

/// Shadows 0..count-1 in index order, collected in parallel.
std::vector<ClassicalShadow> collect_shadows(const FermionState &state, std::uint64_t count, std::uint64_t seed);

/// <r|E_{eta,k}|r> for a k-set r with s' = |r cap [eta]|.
Rational estimation_entry(int n, int eta, int k, int s_prime);

/// E_{eta,k} stored by overlap class s' = |r cap [eta]|.
struct EstimationMatrix {
    int n = 0;
    int eta = 0;
    int k = 0;
    std::vector<Rational> class_values;

    static EstimationMatrix build(int n, int eta, int k);
    /// Number of k-sets in class s'.
    Integer class_size(int s_prime) const;
    /// Tr[E^2].
    Rational trace_squared() const;
    std::vector<double> as_double() const;
};

/// Coefficient matrix o over S_{n,k} x S_{n,k} (colex rank), O = sum o_{p,q} D^p_q.
struct RdmObservable {
    int n = 0;
    int k = 0;
    ComplexMatrix coeffs;

    static RdmObservable zero(int n, int k);
    static RdmObservable single(const OccupationVector &p, const OccupationVector &q);
};

/// Rows of v^dagger u: row j is u's row v(j).
ComplexMatrix permuted_rows(const UnitaryMatrix &u, const PermutationMatrix &v);

/// Dense single-shot estimator, Tr over U_k^dagger(v_z^dagger u) E U_k(v_z^dagger u).
class DenseEstimator {
   public:
    DenseEstimator(int n, int eta, int k);
    /// Uses the given estimation matrix (used for negative controls).
    explicit DenseEstimator(EstimationMatrix e);

    int n() const {
        return e_.n;
    }
    int eta() const {
        return e_.eta;
    }
    int k() const {
        return e_.k;
    }
    const EstimationMatrix &matrix() const {
        return e_;
    }

    Complex estimate(const ClassicalShadow &s, const OccupationVector &p, const OccupationVector &q) const;
    /// Same with an explicit permutation v mapping [eta] onto z.
    Complex estimate(const ClassicalShadow &s, const PermutationMatrix &v, const OccupationVector &p,
                     const OccupationVector &q) const;
    /// All k-RDM estimates of one shadow; entry (rank p, rank q) estimates D^p_q.
    ComplexMatrix estimate_all(const ClassicalShadow &s) const;
    Complex estimate_observable(const ClassicalShadow &s, const RdmObservable &obs) const;

   private:
    void check(const ClassicalShadow &s) const;
    EstimationMatrix e_;
    std::vector<double> class_d_;
    std::uint64_t head_mask_ = 0;
};

Complex estimate_rdm(const ClassicalShadow &s, int eta, int k, const OccupationVector &p, const OccupationVector &q);
Complex estimate_observable(const ClassicalShadow &s, const RdmObservable &obs, int eta);

enum class AggregationMode { kMean, kMedianOfMeans };

struct Aggregate {
    Complex value;
    /// Real and imaginary standard errors packed as (se_re, se_im).
    Complex std_error;
};

Aggregate aggregate(const std::vector<Complex> &series, AggregationMode mode, std::size_t batches = 1);

/// Streaming per-entry moments of estimate matrices, accumulated in call order.
class EstimateAccumulator {
   public:
    EstimateAccumulator(Eigen::Index rows, Eigen::Index cols);
    void add(const ComplexMatrix &x);
    std::uint64_t count() const {
        return count_;
    }
    ComplexMatrix mean() const;
    /// Standard errors of the mean, real part in .real(), imaginary part in .imag().
    ComplexMatrix std_error() const;
    /// Unbiased per-entry variance E|x - mean|^2.
    Eigen::MatrixXd variance() const;

   private:
    std::uint64_t count_ = 0;
    ComplexMatrix sum_;
    Eigen::MatrixXd sum_re2_;
    Eigen::MatrixXd sum_im2_;
};

/// Tr[E^2]/C(n,k)^2 - C(n-k,eta-k)^2/(C(n,eta)^2 C(n,k)).
Rational avg_shadow_norm_sq(int n, int eta, int k);

/// C(eta,k) (1-(eta-k)/n)^k (1+n)/(1+n-k).
Rational variance_bound_exact(int n, int eta, int k);
double variance_bound(int n, int eta, int k);

/// Q_{n,eta,k} by the explicit s-sum.
Rational q_value(int n, int eta, int k);

/// Q_{n,eta,eta} by the single-sum form used for Slater overlaps.
Rational q_slater(int n, int eta);

std::string shadow_to_json(const ClassicalShadow &s);
ClassicalShadow shadow_from_json(const std::string &line);
void write_shadow_archive(std::ostream &out, const std::vector<ClassicalShadow> &shadows);
std::vector<ClassicalShadow> read_shadow_archive(std::istream &in);

/// CSV rows (p, q, k, estimate_re, estimate_im) for every entry of an estimate matrix.
void write_estimates_csv(std::ostream &out, int n, int k, const ComplexMatrix &estimates);

std::string format_double(double x);

}  // namespace fermishadow

#endif
