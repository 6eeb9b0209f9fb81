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


#include "fermishadow/fastpath.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"

namespace fermishadow {
namespace {

Rational q(long a, long b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

// (-1)^{n-k} sum_r |det u[r,[k]]|^2 (1+kappa)^{|r cap [eta]|} (1-kappa)^{eta-|r cap [eta]|}, Taylor coefficients.
std::vector<double> generating_polynomial(const ComplexMatrix &u, int eta, int k) {
    const int n = static_cast<int>(u.rows());
    std::vector<double> c(eta + 1, 0.0);
    const std::uint64_t cols = OccupationVector::first(k, n).mask();
    const std::uint64_t head = OccupationVector::first(eta, n).mask();
    for (auto r : all_masks(n, k)) {
        double w = std::norm(minor_det_mask(u, r, cols));
        int a = std::popcount(r & head);
        int b = eta - a;
        for (int m = 0; m <= eta; m++) {
            double cm = 0;
            for (int i = 0; i <= std::min(a, m); i++) {
                double t = binom(a, i).get_d() * binom(b, m - i).get_d();
                cm += ((m - i) & 1) ? -t : t;
            }
            c[m] += w * cm;
        }
    }
    const double sgn = ((n - k) & 1) ? -1.0 : 1.0;
    for (auto &v : c) v *= sgn;
    return c;
}

TEST(Majorana, ImagesAreOrthogonalAndConsistent) {
    Rng rng = stream_rng(60, 0);
    for (int n = 1; n <= 6; n++) {
        auto u = haar_unitary(n, rng).matrix();
        auto mr = MajoranaRotation::from(u);
        ASSERT_EQ(mr.u_tilde.rows(), 2 * n);
        EXPECT_LT((mr.u_tilde * mr.u_tilde.transpose() - RealMatrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff(), 1e-12);
        auto iu = MajoranaRotation::from(Complex(0, 1) * u).u_tilde;
        EXPECT_LT((iu - mr.iu_tilde).cwiseAbs().maxCoeff(), 1e-15);
        auto prod = MajoranaRotation::from(u * u).u_tilde;
        EXPECT_LT((prod - mr.u_tilde * mr.u_tilde).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(FCoefficient, Examples) {
    for (int eta = 1; eta <= 6; eta++) {
        EXPECT_EQ(f_ks(eta, 1, 0, 0), Rational(1) - q(eta, 2)) << eta;
        EXPECT_EQ(f_ks(eta, 1, 0, 1), q(-1, 2)) << eta;
    }
    EXPECT_EQ(f_ks(4, 2, 1, 3), 0);
    EXPECT_THROW(f_ks(2, 3, 0, 0), std::domain_error);
}

TEST(FCoefficientProperty, SelectsTheOverlapClass) {
    // With beta_i = 2 n_i - 1 on a basis state with t occupied modes of [eta]:
    // sum_j f_{k,s}(j) e_j(beta) = (-1)^s [t == s] whenever t <= k.
    for (int eta = 0; eta <= 9; eta++) {
        for (int t = 0; t <= eta; t++) {
            std::vector<Rational> e(eta + 1);
            for (int j = 0; j <= eta; j++) {
                Integer acc = 0;
                for (int a = 0; a <= j; a++) {
                    Integer term = binom(t, a) * binom(eta - t, j - a);
                    acc += ((j - a) & 1) ? Integer(-term) : term;
                }
                e[j] = acc;
            }
            for (int k = t; k <= eta; k++) {
                for (int s = 0; s <= k; s++) {
                    Rational v = 0;
                    for (int j = 0; j <= eta; j++) v += f_ks(eta, k, s, j) * e[j];
                    ASSERT_EQ(v, t == s ? Rational(s & 1 ? -1 : 1) : Rational(0))
                        << "eta=" << eta << " k=" << k << " s=" << s << " t=" << t;
                }
            }
        }
    }
}

TEST(AlphaCoefficients, ShapeAndSigns) {
    for (int n = 1; n <= 9; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                auto c = alpha_coeffs(n, eta, k);
                ASSERT_EQ(c.f_table.size(), static_cast<std::size_t>(k + 1));
                ASSERT_EQ(c.weights.size(), static_cast<std::size_t>(eta + 1));
                for (int j = k + 1; j <= eta; j++) ASSERT_EQ(c.weights[j], 0.0);
                for (int s = 0; s <= k; s++) {
                    ASSERT_EQ(c.e_prime[s], estimation_entry(n, eta, k, s));
                    if (c.e_prime[s] != 0) ASSERT_EQ(sgn(c.e_prime[s]), ((k - s) & 1) ? -1 : 1);
                }
            }
        }
    }
}

TEST(Decomposition, DiagonalIsOneTerm) {
    auto dec = decompose_rdm(OccupationVector(4, {1, 2}), OccupationVector(4, {1, 2}), 4);
    ASSERT_EQ(dec.terms.size(), 1u);
    EXPECT_EQ(dec.terms[0].coefficient, Complex(1, 0));
    EXPECT_EQ(dec.terms[0].rotation.dense(), ComplexMatrix::Identity(4, 4));
}

// sum_t c_t U(w_t) D^[k]_[k] U(w_t)^dagger on the eta-particle space.
ComplexMatrix reassemble(const RdmDecomposition &dec, int n, int eta, int k) {
    auto d = static_cast<Eigen::Index>(binom_u64(n, eta));
    ComplexMatrix base = rdm_operator_matrix(n, eta, OccupationVector::first(k, n), OccupationVector::first(k, n));
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto &t : dec.terms) {
        ComplexMatrix c = compound_matrix(t.rotation.dense(), eta);
        sum += t.coefficient * c * base * c.adjoint();
    }
    return sum;
}

TEST(Decomposition, HandCases) {
    auto a = decompose_rdm(OccupationVector(2, {1}), OccupationVector(2, {2}), 2);
    EXPECT_EQ(a.terms.size(), 3u);
    EXPECT_LT(max_abs(reassemble(a, 2, 1, 1) -
                      rdm_operator_matrix(2, 1, OccupationVector(2, {1}), OccupationVector(2, {2}))),
              1e-10);
    OccupationVector p(4, {1, 3}), qq(4, {2, 3});
    auto b = decompose_rdm(p, qq, 4);
    EXPECT_LE(b.terms.size(), 4u);
    for (int eta = 2; eta <= 4; eta++)
        EXPECT_LT(max_abs(reassemble(b, 4, eta, 2) - rdm_operator_matrix(4, eta, p, qq)), 1e-10) << eta;
}

TEST(DecompositionProperty, ReassemblesEveryRdmOperator) {
    Rng rng = stream_rng(61, 0);
    for (int n = 1; n <= 6; n++) {
        for (int k = 0; k <= n; k++) {
            for (int t = 0; t < (n <= 4 ? 20 : 4); t++) {
                auto p = testing::random_subset(rng, n, k);
                auto qq = testing::random_subset(rng, n, k);
                auto dec = decompose_rdm(p, qq, n);
                int unshared = k - overlap_count(p, qq);
                ASSERT_EQ(dec.terms.size(), static_cast<std::size_t>(unshared == 0 ? 1 : 2 * unshared + 1));
                for (const auto &term : dec.terms) UnitaryMatrix check(term.rotation.dense(), 1e-12);
                for (int eta = k; eta <= n; eta++) {
                    ASSERT_LT(max_abs(reassemble(dec, n, eta, k) - rdm_operator_matrix(n, eta, p, qq)), 1e-10)
                        << p.str() << " " << qq.str() << " eta=" << eta;
                }
            }
        }
    }
}

TEST(BuildM, IdentityGivesIdentity) {
    for (int eta = 1; eta <= 4; eta++) {
        ComplexMatrix m = build_m(ComplexMatrix::Identity(eta + 2, eta + 2), eta, eta);
        EXPECT_LT(max_abs(m - ComplexMatrix::Identity(2 * eta, 2 * eta)), 1e-15);
    }
}

TEST(BuildMProperty, GramStructure) {
    Rng rng = stream_rng(62, 0);
    for (int t = 0; t < 50; t++) {
        int n = testing::uniform_int(rng, 1, 10);
        int eta = testing::uniform_int(rng, 1, n);
        int k = testing::uniform_int(rng, 1, eta);
        auto u = haar_unitary(n, rng).matrix();
        ComplexMatrix m = build_m(u, k, eta);
        ASSERT_LT(std::abs(m.trace().imag()), 1e-10);
        ASSERT_LT(max_abs(m - m.transpose()), 1e-12);
        RealMatrix small = build_m_from_block(u.topLeftCorner(eta, k));
        double bound = small.squaredNorm();
        for (Complex e : eigenvalues(m)) {
            ASSERT_GT(e.real(), -1e-8);
            ASSERT_LT(e.real(), bound + 1e-8);
            ASSERT_LT(std::abs(e.imag()), 1e-8);
        }
    }
}

TEST(TracePowers, Examples) {
    auto a = trace_powers(ComplexMatrix::Identity(4, 4), 3);
    ASSERT_EQ(a.size(), 3u);
    for (auto v : a) EXPECT_LT(std::abs(v - 4.0), 1e-14);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = 2;
    EXPECT_LT(std::abs(trace_powers(d, 2)[1] - 5.0), 1e-14);
    Rng rng = stream_rng(63, 0);
    ComplexMatrix r = testing::random_complex(rng, 6, 6);
    auto tp = trace_powers(r, 4);
    ComplexMatrix pw = ComplexMatrix::Identity(6, 6);
    for (int y = 1; y <= 4; y++) {
        pw = pw * r;
        EXPECT_LT(std::abs(tp[y - 1] - pw.trace()), 1e-8 * std::max(1.0, std::abs(pw.trace())));
    }
}

TEST(InverseTraceSequence, Examples) {
    std::vector<Complex> tr = {Complex(3, 0), Complex(7, 0)};
    EXPECT_LT(std::abs(inverse_trace_sequence(tr, 1, 4)[0] - Complex(-(8.0 - 6.0), 0)), 1e-15);
    auto zero = inverse_trace_sequence({}, 5, 3);
    for (int j = 1; j <= 5; j++) EXPECT_EQ(zero[j - 1], Complex((j & 1) ? -6.0 : 6.0, 0));
}

TEST(InverseTraceSequenceProperty, MatchesDenseInverse) {
    Rng rng = stream_rng(64, 0);
    for (auto [n, eta, k] : {std::tuple{3, 2, 1}, std::tuple{4, 2, 2}, std::tuple{6, 3, 2}, std::tuple{7, 5, 3}}) {
        auto u = haar_unitary(n, rng).matrix();
        ComplexMatrix a0 = generating_matrix(u, eta, k, 0.0).matrix();
        ComplexMatrix da = generating_matrix(u, eta, k, 1.0).matrix() - a0;
        ComplexMatrix x = a0.inverse() * da;
        auto seq = inverse_trace_sequence(trace_powers(build_m(u, k, eta), eta), eta, eta);
        ComplexMatrix pw = ComplexMatrix::Identity(2 * n, 2 * n);
        for (int j = 1; j <= eta; j++) {
            pw = pw * x;
            EXPECT_LT(std::abs(seq[j - 1] - pw.trace()), 1e-7 * std::max(1.0, std::abs(pw.trace())))
                << n << " " << eta << " " << k << " j=" << j;
        }
    }
}

TEST(GeneratingMatrix, PfaffianAtZeroHasClosedForm) {
    Rng rng = stream_rng(65, 0);
    for (int n = 1; n <= 7; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                auto u = haar_unitary(n, rng).matrix();
                Complex pf = pfaffian(generating_matrix(u, eta, k, 0.0));
                ASSERT_LT(std::abs(pf - generating_pfaffian_at_zero(n, k)), 1e-10);
            }
        }
    }
}

TEST(GeneratingMatrixProperty, PfaffianIsTheClassPolynomial) {
    Rng rng = stream_rng(66, 0);
    for (int n = 1; n <= 6; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                auto u = haar_unitary(n, rng).matrix();
                auto c = generating_polynomial(u, eta, k);
                for (double kappa : {-0.7, 0.3, 1.1}) {
                    double want = 0, pw = 1;
                    for (double cm : c) {
                        want += cm * pw;
                        pw *= kappa;
                    }
                    Complex pf = pfaffian(generating_matrix(u, eta, k, kappa));
                    ASSERT_LT(std::abs(pf - want), 1e-10) << n << " " << eta << " " << k << " kappa=" << kappa;
                }
            }
        }
    }
}

TEST(PfaffianDerivatives, LowOrders) {
    std::vector<Complex> seq = {Complex(0.4, 0), Complex(-1.0, 0)};
    auto d = pfaffian_derivatives(Complex(-1, 0), seq, 2);
    EXPECT_EQ(d[0], Complex(-1, 0));
    EXPECT_LT(std::abs(d[1] - 0.5 * Complex(-1, 0) * seq[0]), 1e-15);
    EXPECT_THROW(pfaffian_derivatives(1.0, seq, 3), std::invalid_argument);
}

TEST(PfaffianDerivatives, FiniteDifferenceOracle) {
    // Central differences with Richardson extrapolation at h = 1e-3, n = 4, eta = 2.
    Rng rng = stream_rng(67, 0);
    const int n = 4, eta = 2;
    for (int k = 0; k <= eta; k++) {
        for (int t = 0; t < 5; t++) {
            auto u = haar_unitary(n, rng).matrix();
            auto f = [&](double kappa) { return pfaffian(generating_matrix(u, eta, k, kappa)); };
            auto seq = inverse_trace_sequence(trace_powers(build_m(u, std::max(k, 0), eta), eta), eta, eta);
            auto d = pfaffian_derivatives(generating_pfaffian_at_zero(n, k), seq, eta);
            auto first = [&](double h) { return (f(h) - f(-h)) / (2 * h); };
            auto second = [&](double h) { return (f(h) - 2.0 * f(0) + f(-h)) / (h * h); };
            const double h = 1e-3;
            Complex d1 = (4.0 * first(h / 2) - first(h)) / 3.0;
            Complex d2 = (4.0 * second(h / 2) - second(h)) / 3.0;
            EXPECT_LT(std::abs(d[1] - d1), 1e-5 * std::max(1.0, std::abs(d1))) << "k=" << k;
            EXPECT_LT(std::abs(d[2] - d2), 1e-5 * std::max(1.0, std::abs(d2))) << "k=" << k;
        }
    }
}

TEST(PfaffianDerivativesProperty, MatchExactPolynomialToFullOrder) {
    Rng rng = stream_rng(68, 0);
    for (int n = 2; n <= 7; n++) {
        for (int eta = 1; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                auto u = haar_unitary(n, rng).matrix();
                auto c = generating_polynomial(u, eta, k);
                auto seq = inverse_trace_sequence(trace_powers(build_m(u, k, eta), eta), eta, eta);
                auto d = pfaffian_derivatives(generating_pfaffian_at_zero(n, k), seq, eta);
                double fact = 1;
                for (int x = 0; x <= eta; x++) {
                    if (x > 0) fact *= x;
                    double want = fact * c[x];
                    ASSERT_LT(std::abs(d[x] - want), 1e-8 * std::max(1.0, std::abs(want)))
                        << n << " " << eta << " " << k << " x=" << x;
                }
            }
        }
    }
}

TEST(FastEstimator, DiagonalValueMatchesDenseClassSum) {
    Rng rng = stream_rng(69, 0);
    for (int n = 1; n <= 7; n++) {
        for (int eta = 0; eta <= n; eta++) {
            for (int k = 0; k <= eta; k++) {
                auto u = haar_unitary(n, rng).matrix();
                FastEstimator fast(n, eta, k);
                const std::uint64_t cols = OccupationVector::first(k, n).mask();
                const std::uint64_t head = OccupationVector::first(eta, n).mask();
                double want = 0;
                for (auto r : all_masks(n, k))
                    want += estimation_entry(n, eta, k, std::popcount(r & head)).get_d() *
                            std::norm(minor_det_mask(u, r, cols));
                double got = fast.diagonal_value(u.topLeftCorner(eta, k));
                ASSERT_LT(std::abs(got - want), 1e-9 * std::max(1.0, std::abs(want))) << n << " " << eta << " " << k;
            }
        }
    }
}

TEST(FastEstimator, EffectiveBlockIsTopLeftOfRotatedShadow) {
    Rng rng = stream_rng(70, 0);
    auto s = testing::random_shadow(rng, 6, 3);
    auto dec = decompose_rdm(OccupationVector(6, {1, 5}), OccupationVector(6, {2, 5}), 6);
    for (const auto &t : dec.terms) {
        ComplexMatrix full = permuted_rows(s.u, canonical_permutation(s.z)) * t.rotation.dense();
        EXPECT_LT(max_abs(effective_block(s, t.rotation, 2) - full.topLeftCorner(3, 2)), 1e-14);
    }
}

TEST(FastEstimator, FullFillingIsExact) {
    Rng rng = stream_rng(71, 0);
    for (int n = 1; n <= 5; n++) {
        for (int k = 0; k <= n; k++) {
            FastEstimator fast(n, n, k);
            auto s = testing::random_shadow(rng, n, n);
            auto p = testing::random_subset(rng, n, k);
            auto qq = testing::random_subset(rng, n, k);
            EXPECT_LT(std::abs(fast.estimate(s, p, qq) - (p == qq ? 1.0 : 0.0)), 1e-10);
        }
    }
}

void expect_matches_dense(int n, int eta, int k, int triples, std::uint64_t seed, double tol) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(n * 100 + eta * 10 + k));
    DenseEstimator dense(n, eta, k);
    FastEstimator fast(n, eta, k);
    for (int t = 0; t < triples; t++) {
        auto s = testing::random_shadow(rng, n, eta);
        auto p = testing::random_subset(rng, n, k);
        auto qq = testing::random_subset(rng, n, k);
        Complex a = dense.estimate(s, p, qq);
        Complex b = fast.estimate(s, p, qq);
        ASSERT_LT(std::abs(a - b), tol * std::max(1.0, std::abs(a)))
            << "n=" << n << " eta=" << eta << " k=" << k << " " << p.str() << " " << qq.str();
    }
}

TEST(FastEstimator, TwoModes) {
    expect_matches_dense(2, 1, 1, 50, 72, 1e-9);
}

TEST(FastEstimator, SixModesThreeParticles) {
    for (int k = 1; k <= 3; k++) expect_matches_dense(6, 3, k, 40, 73, 1e-8);
}

TEST(FastEstimatorProperty, MatchesDenseEverywhereSmall) {
    for (int n = 1; n <= 6; n++)
        for (int eta = 0; eta <= n; eta++)
            for (int k = 0; k <= eta; k++) expect_matches_dense(n, eta, k, 8, 74, 1e-8);
}

TEST(FastEstimator, FreeFunctionAndDecompositionAgree) {
    Rng rng = stream_rng(75, 0);
    auto s = testing::random_shadow(rng, 5, 3);
    OccupationVector p(5, {1, 4}), qq(5, {3, 5});
    FastEstimator fast(5, 3, 2);
    EXPECT_EQ(fast_estimate_rdm(s, 3, 2, p, qq), fast.estimate(s, p, qq));
    EXPECT_EQ(fast.estimate(s, decompose_rdm(p, qq, 5)), fast.estimate(s, p, qq));
    EXPECT_THROW(fast.estimate(s, OccupationVector(5, {1}), OccupationVector(5, {2})), std::invalid_argument);
}

}  // namespace
}  // namespace fermishadow
