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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"

namespace fermishadow {
namespace {

Rational q(long a, long b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

TEST(SampleShadow, FullFillingAlwaysMeasuresEverything) {
    auto psi = basis_state(OccupationVector(3, {1, 2, 3}));
    for (std::uint64_t i = 0; i < 50; i++) EXPECT_EQ(sample_shadow(psi, 3, i).z, OccupationVector(3, {1, 2, 3}));
}

TEST(SampleShadow, DeterministicPerIndex) {
    Rng rng = stream_rng(40, 0);
    auto psi = random_state(4, 2, rng);
    auto a = sample_shadow(psi, 77, 12);
    auto b = sample_shadow(psi, 77, 12);
    EXPECT_EQ(a.u.matrix(), b.u.matrix());
    EXPECT_EQ(a.z, b.z);
    EXPECT_EQ(a.index, 12u);
    auto all = collect_shadows(psi, 20, 77);
    EXPECT_EQ(all[12].u.matrix(), a.u.matrix());
    EXPECT_EQ(all[12].z, a.z);
    EXPECT_NE(all[11].u.matrix(), a.u.matrix());
}

TEST(SampleShadow, DrawsRotationThenOutcomeFromOneStream) {
    Rng rng = stream_rng(41, 0);
    auto psi = random_state(5, 2, rng);
    Rng a = stream_rng(9, 3), b = stream_rng(9, 3);
    auto s = sample_shadow(psi, a);
    auto u = haar_unitary(5, b);
    EXPECT_EQ(s.u.matrix(), u.matrix());
    EXPECT_EQ(s.z, measure_occupation(psi, u, b));
}

TEST(SampleShadowProperty, OutcomeMarginalIsUniformOverHaar) {
    // E_u |<z|U|psi>|^2 = 1/C(n,eta) for every z.
    Rng rng = stream_rng(42, 0);
    auto psi = random_state(3, 1, rng);
    const int draws = 60000;
    std::vector<int> counts(3, 0);
    for (int i = 0; i < draws; i++) counts[rank_subset(sample_shadow(psi, 5, i).z)]++;
    double chi2 = 0;
    for (int c : counts) chi2 += (c - draws / 3.0) * (c - draws / 3.0) / (draws / 3.0);
    EXPECT_LT(chi2, 2 + 5 * std::sqrt(4.0));
}

TEST(EstimationEntry, Examples) {
    EXPECT_EQ(estimation_entry(2, 1, 1, 1), 2);
    EXPECT_EQ(estimation_entry(2, 1, 1, 0), -1);
    EXPECT_EQ(estimation_entry(3, 3, 1, 1), 1);
    EXPECT_EQ(estimation_entry(5, 2, 0, 0), 1);
    EXPECT_THROW(estimation_entry(3, 1, 2, 0), std::domain_error);
}

TEST(EstimationMatrix, TraceSquaredByExplicitSum) {
    for (int n = 0; n <= 10; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                auto e = EstimationMatrix::build(n, eta, k);
                Rational sum = 0;
                Integer count = 0;
                for (const auto &r : all_subsets(n, k)) {
                    Rational v = estimation_entry(n, eta, k, overlap_count(r, OccupationVector::first(eta, n)));
                    sum += v * v;
                    count += 1;
                }
                Integer classes = 0;
                for (int s = 0; s <= k; s++) classes += e.class_size(s);
                ASSERT_EQ(classes, count);
                ASSERT_EQ(e.trace_squared(), sum);
            }
        }
    }
    EXPECT_EQ(EstimationMatrix::build(2, 1, 1).trace_squared(), 5);
}

TEST(DenseEstimator, HandExamples) {
    ClassicalShadow s{UnitaryMatrix::identity(2), OccupationVector(2, {1})};
    DenseEstimator est(2, 1, 1);
    EXPECT_EQ(est.estimate(s, OccupationVector(2, {1}), OccupationVector(2, {1})), Complex(2, 0));
    EXPECT_EQ(est.estimate(s, OccupationVector(2, {2}), OccupationVector(2, {2})), Complex(-1, 0));
    EXPECT_EQ(est.estimate(s, OccupationVector(2, {1}), OccupationVector(2, {2})), Complex(0, 0));
    EXPECT_THROW(est.estimate(s, OccupationVector(2, {1, 2}), OccupationVector(2, {1, 2})), std::invalid_argument);
    ClassicalShadow wrong{UnitaryMatrix::identity(3), OccupationVector(3, {1})};
    EXPECT_THROW(est.estimate(wrong, OccupationVector(3, {1}), OccupationVector(3, {1})), std::invalid_argument);
}

TEST(DenseEstimatorProperty, FullFillingIsExact) {
    Rng rng = stream_rng(43, 0);
    for (int n = 1; n <= 5; n++) {
        for (int k = 0; k <= n; k++) {
            DenseEstimator est(n, n, k);
            ClassicalShadow s = testing::random_shadow(rng, n, n);
            ComplexMatrix all = est.estimate_all(s);
            ASSERT_LT(max_abs(all - ComplexMatrix::Identity(all.rows(), all.cols())), 1e-12);
        }
    }
}

TEST(DenseEstimatorProperty, PerShadowSumOfSquaresIsTraceOfESquared) {
    Rng rng = stream_rng(44, 0);
    for (int n = 1; n <= 6; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                DenseEstimator est(n, eta, k);
                double want = est.matrix().trace_squared().get_d();
                for (int t = 0; t < 5; t++) {
                    double got = est.estimate_all(testing::random_shadow(rng, n, eta)).cwiseAbs2().sum();
                    ASSERT_NEAR(got, want, 1e-10 * want) << n << " " << eta << " " << k;
                }
            }
        }
    }
}

TEST(DenseEstimatorProperty, AllEntriesMatchSingleEntriesAndAreHermitian) {
    Rng rng = stream_rng(45, 0);
    for (int n = 1; n <= 5; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                DenseEstimator est(n, eta, k);
                auto s = testing::random_shadow(rng, n, eta);
                ComplexMatrix all = est.estimate_all(s);
                ASSERT_LT(max_abs(all - all.adjoint()), 1e-13);
                auto sets = all_subsets(n, k);
                for (std::size_t i = 0; i < sets.size(); i++)
                    for (std::size_t j = 0; j < sets.size(); j++)
                        ASSERT_LT(std::abs(all(i, j) - est.estimate(s, sets[i], sets[j])), 1e-13);
            }
        }
    }
}

TEST(DenseEstimatorProperty, DiagonalSumIsConservedPerShadow) {
    // sum_p D^p_p = C(N, k), so every shadow estimates exactly C(eta, k).
    Rng rng = stream_rng(46, 0);
    for (int n = 1; n <= 6; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                DenseEstimator est(n, eta, k);
                auto s = testing::random_shadow(rng, n, eta);
                ASSERT_NEAR(est.estimate_all(s).trace().real(), binom(eta, k).get_d(), 1e-10);
                if (k == 1) {
                    RdmObservable number = RdmObservable::zero(n, 1);
                    number.coeffs.setIdentity();
                    ASSERT_NEAR(est.estimate_observable(s, number).real(), eta, 1e-10);
                }
            }
        }
    }
}

TEST(DenseEstimatorProperty, IndependentOfTheChoiceOfV) {
    Rng rng = stream_rng(47, 0);
    for (int t = 0; t < 100; t++) {
        int n = testing::uniform_int(rng, 1, 7);
        int eta = testing::uniform_int(rng, 0, n);
        int k = testing::uniform_int(rng, 0, eta);
        auto s = testing::random_shadow(rng, n, eta);
        auto canon = canonical_permutation(s.z).image();
        std::shuffle(canon.begin(), canon.begin() + eta, rng);
        std::shuffle(canon.begin() + eta, canon.end(), rng);
        PermutationMatrix v(canon);
        DenseEstimator est(n, eta, k);
        auto p = testing::random_subset(rng, n, k);
        auto qq = testing::random_subset(rng, n, k);
        ASSERT_LT(std::abs(est.estimate(s, v, p, qq) - est.estimate(s, p, qq)), 1e-12);
    }
    DenseEstimator est(3, 1, 1);
    ClassicalShadow s{UnitaryMatrix::identity(3), OccupationVector(3, {2})};
    EXPECT_THROW(est.estimate(s, PermutationMatrix::identity(3), OccupationVector(3, {1}), OccupationVector(3, {1})),
                 std::invalid_argument);
}

TEST(DenseEstimatorProperty, RotatedObservableAbsorbsIntoTheShadow) {
    Rng rng = stream_rng(48, 0);
    for (int n = 2; n <= 5; n++) {
        for (int eta = 1; eta <= n; eta++) {
            for (int k = 1; k <= eta; k++) {
                DenseEstimator est(n, eta, k);
                auto s = testing::random_shadow(rng, n, eta);
                auto w = haar_unitary(n, rng);
                auto d = static_cast<Eigen::Index>(binom_u64(n, k));
                RdmObservable o{n, k, testing::random_complex(rng, d, d)};
                ComplexMatrix c = compound_matrix(w.matrix(), k);
                RdmObservable rotated{n, k, c * o.coeffs * c.adjoint()};
                ClassicalShadow sw = s;
                sw.u = s.u * w;
                Complex lhs = est.estimate_observable(sw, o);
                Complex rhs = est.estimate_observable(s, rotated);
                ASSERT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs)));
            }
        }
    }
}

TEST(DenseEstimator, SingleObservableMatchesEntry) {
    Rng rng = stream_rng(49, 0);
    auto s = testing::random_shadow(rng, 5, 3);
    DenseEstimator est(5, 3, 2);
    OccupationVector p(5, {1, 4}), qq(5, {2, 4});
    EXPECT_EQ(est.estimate_observable(s, RdmObservable::single(p, qq)), est.estimate(s, p, qq));
    EXPECT_EQ(estimate_rdm(s, 3, 2, p, qq), est.estimate(s, p, qq));
}

TEST(DenseEstimatorProperty, UnbiasedOnSmallSystems) {
    Rng rng = stream_rng(50, 0);
    for (auto [n, eta] : {std::pair{3, 1}, std::pair{3, 2}}) {
        auto psi = random_state(n, eta, rng);
        for (int k = 1; k <= eta; k++) {
            DenseEstimator est(n, eta, k);
            auto d = static_cast<Eigen::Index>(binom_u64(n, k));
            EstimateAccumulator acc(d, d);
            for (std::uint64_t i = 0; i < 40000; i++) acc.add(est.estimate_all(sample_shadow(psi, 51, i)));
            auto sets = all_subsets(n, k);
            ComplexMatrix mean = acc.mean(), se = acc.std_error();
            for (Eigen::Index i = 0; i < d; i++) {
                for (Eigen::Index j = 0; j < d; j++) {
                    Complex exact = expectation_rdm(psi, sets[i], sets[j]);
                    EXPECT_LE(std::abs(mean(i, j).real() - exact.real()), 5 * se(i, j).real() + 1e-12);
                    EXPECT_LE(std::abs(mean(i, j).imag() - exact.imag()), 5 * se(i, j).imag() + 1e-12);
                }
            }
        }
    }
}

TEST(Aggregate, Examples) {
    auto c = aggregate({Complex(3, -1), Complex(3, -1), Complex(3, -1)}, AggregationMode::kMean);
    EXPECT_EQ(c.value, Complex(3, -1));
    EXPECT_EQ(c.std_error, Complex(0, 0));
    auto mom = aggregate({0, 0, 0, 100}, AggregationMode::kMedianOfMeans, 4);
    EXPECT_EQ(mom.value, Complex(0, 0));
    auto m = aggregate({1, 2, 3}, AggregationMode::kMean);
    EXPECT_DOUBLE_EQ(m.value.real(), 2.0);
    EXPECT_DOUBLE_EQ(m.std_error.real(), 1.0 / std::sqrt(3.0));
    EXPECT_THROW(aggregate({}, AggregationMode::kMean), std::invalid_argument);
    EXPECT_THROW(aggregate({1, 2, 3}, AggregationMode::kMedianOfMeans, 2), std::invalid_argument);
}

TEST(AggregateProperty, MedianOfMeansIsCoordinateWise) {
    std::vector<Complex> series = {Complex(1, 10), Complex(3, 0), Complex(2, 5), Complex(100, -100),
                                   Complex(5, 1),  Complex(5, 1)};
    // Batch means: (2,5), (51,-47.5), (5,1); medians 5 and 1 come from different batches.
    auto mom = aggregate(series, AggregationMode::kMedianOfMeans, 3);
    EXPECT_EQ(mom.value, Complex(5, 1));
    auto single = aggregate(series, AggregationMode::kMedianOfMeans, 1);
    auto mean = aggregate(series, AggregationMode::kMean);
    EXPECT_LT(std::abs(single.value - mean.value), 1e-12);
}

TEST(EstimateAccumulator, MatchesTwoPassStatistics) {
    Rng rng = stream_rng(52, 0);
    std::vector<ComplexMatrix> xs;
    EstimateAccumulator acc(2, 3);
    for (int i = 0; i < 50; i++) {
        xs.push_back(testing::random_complex(rng, 2, 3));
        acc.add(xs.back());
    }
    EXPECT_EQ(acc.count(), 50u);
    for (int r = 0; r < 2; r++) {
        for (int c = 0; c < 3; c++) {
            std::vector<Complex> series;
            for (const auto &x : xs) series.push_back(x(r, c));
            auto a = aggregate(series, AggregationMode::kMean);
            EXPECT_LT(std::abs(acc.mean()(r, c) - a.value), 1e-12);
            EXPECT_LT(std::abs(acc.std_error()(r, c) - a.std_error), 1e-12);
            double var = 0;
            for (auto v : series) var += std::norm(v - a.value);
            EXPECT_NEAR(acc.variance()(r, c), var / 49, 1e-12);
        }
    }
}

TEST(VarianceFormulas, Examples) {
    EXPECT_EQ(avg_shadow_norm_sq(2, 1, 1), q(9, 8));
    EXPECT_EQ(avg_shadow_norm_sq(3, 3, 3), 0);
    EXPECT_EQ(variance_bound_exact(2, 1, 1), q(3, 2));
    EXPECT_DOUBLE_EQ(variance_bound(2, 1, 1), 1.5);
    EXPECT_EQ(variance_bound_exact(7, 4, 0), 1);
    EXPECT_EQ(q_value(2, 1, 1), q(5, 4));
}

TEST(VarianceFormulasProperty, NormBelowBoundAndQIsTraceRatio) {
    for (int n = 1; n <= 14; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                Rational norm = avg_shadow_norm_sq(n, eta, k);
                ASSERT_LE(norm, variance_bound_exact(n, eta, k)) << n << " " << eta << " " << k;
                ASSERT_GE(norm, 0);
                Rational cnk(binom(n, k));
                ASSERT_EQ(q_value(n, eta, k), EstimationMatrix::build(n, eta, k).trace_squared() / (cnk * cnk));
            }
            ASSERT_EQ(q_slater(n, eta), q_value(n, eta, eta));
        }
    }
}

TEST(VarianceFormulasProperty, SlaterFactorStaysBelowFourThirds) {
    Rational prev = 0;
    for (int eta = 1; eta <= 20; eta++) {
        Rational v = q_slater(2 * eta, eta);
        ASSERT_LE(v, q(4, 3)) << eta;
        ASSERT_GE(v, prev) << eta;
        prev = v;
    }
}

TEST(Serialization, ShadowJsonRoundTripIsExact) {
    Rng rng = stream_rng(53, 0);
    auto s = testing::random_shadow(rng, 6, 3);
    s.seed = 17;
    s.index = 4;
    auto back = shadow_from_json(shadow_to_json(s));
    EXPECT_EQ(back.u.matrix(), s.u.matrix());
    EXPECT_EQ(back.z, s.z);
    EXPECT_EQ(back.seed, 17u);
    EXPECT_EQ(back.index, 4u);

    std::vector<ClassicalShadow> many;
    for (int i = 0; i < 5; i++) many.push_back(testing::random_shadow(rng, 4, 2));
    std::stringstream buf;
    write_shadow_archive(buf, many);
    auto read = read_shadow_archive(buf);
    ASSERT_EQ(read.size(), many.size());
    for (std::size_t i = 0; i < many.size(); i++) {
        EXPECT_EQ(read[i].u.matrix(), many[i].u.matrix());
        EXPECT_EQ(read[i].z, many[i].z);
    }
}

TEST(Serialization, EstimatesCsvParsesBack) {
    Rng rng = stream_rng(54, 0);
    ComplexMatrix m = testing::random_complex(rng, 3, 3);
    std::stringstream buf;
    write_estimates_csv(buf, 3, 1, m);
    std::string line;
    std::getline(buf, line);
    EXPECT_EQ(line, "p,q,k,estimate_re,estimate_im");
    int rows = 0;
    while (std::getline(buf, line)) {
        // "(p)","(q)",k,re,im
        auto last = line.rfind(',');
        auto prev = line.rfind(',', last - 1);
        double re = std::stod(line.substr(prev + 1, last - prev - 1));
        double im = std::stod(line.substr(last + 1));
        EXPECT_EQ(Complex(re, im), m(rows / 3, rows % 3)) << line;
        rows++;
    }
    EXPECT_EQ(rows, 9);
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

}  // namespace
}  // namespace fermishadow
