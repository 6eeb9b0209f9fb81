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

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fermishadow {

namespace {

const Complex kI(0.0, 1.0);

Complex i_pow(int j) {
    switch (j & 3) {
        case 0:
            return 1.0;
        case 1:
            return kI;
        case 2:
            return -1.0;
        default:
            return -kI;
    }
}

RealMatrix pauli_y() {
    RealMatrix y(2, 2);
    y << 0, -1, 1, 0;
    return y;
}

RealMatrix kron(const RealMatrix &a, const RealMatrix &b) {
    RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

MajoranaRotation MajoranaRotation::from(const ComplexMatrix &u) {
    const RealMatrix y = pauli_y();
    const RealMatrix i2 = RealMatrix::Identity(2, 2);
    RealMatrix re = u.real();
    RealMatrix im = u.imag();
    return MajoranaRotation{kron(re, i2) + kron(im, y), kron(-im, i2) + kron(re, y)};
}

Rational f_ks(int eta, int k, int s, int j) {
    if (s < 0 || s > k || j < 0 || j > eta || k > eta) {
        throw std::domain_error("f_ks: need 0 <= s <= k <= eta and 0 <= j <= eta");
    }
    Rational acc = 0;
    for (int x = j; x <= k; x++) {
        Integer num = binom(x, s) * binom(eta - j, eta - x);
        Integer den = 1;
        den <<= x;
        Rational t(num, den);
        t.canonicalize();
        acc += (x & 1) ? Rational(-t) : t;
    }
    return acc;
}

FastCoefficients alpha_coeffs(int n, int eta, int k) {
    if (k < 0 || k > eta || eta > n) {
        throw std::domain_error("alpha_coeffs: need 0 <= k <= eta <= n");
    }
    FastCoefficients c;
    c.n = n;
    c.eta = eta;
    c.k = k;
    for (int s = 0; s <= k; s++) {
        c.e_prime.push_back(estimation_entry(n, eta, k, s));
        std::vector<Rational> row;
        for (int j = 0; j <= eta; j++) {
            row.push_back(f_ks(eta, k, s, j));
        }
        c.f_table.push_back(std::move(row));
    }
    for (int j = 0; j <= eta; j++) {
        Rational acc = 0;
        for (int s = 0; s <= k; s++) {
            Rational t = c.f_table[s][j] * c.e_prime[s];
            acc += (s & 1) ? Rational(-t) : t;
        }
        c.alpha.push_back(i_pow(j) * acc.get_d());
        Rational w = acc / Rational(factorial(j));
        c.weights.push_back(w.get_d());
    }
    return c;
}

ComplexMatrix SparseRotation::dense() const {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int c = 0; c < n; c++) {
        for (const auto &e : cols[c]) {
            m(e.row, c) += e.value;
        }
    }
    return m;
}

RdmDecomposition decompose_rdm(const OccupationVector &p, const OccupationVector &q, int n) {
    if (p.size() != q.size() || p.n() != n || q.n() != n) {
        throw std::invalid_argument("decompose_rdm: p and q must be equal-size sets over n modes");
    }
    std::vector<int> ponly, qonly, shared;
    for (int m : p.modes()) {
        (q.contains(m) ? shared : ponly).push_back(m);
    }
    for (int m : q.modes()) {
        if (!p.contains(m)) {
            qonly.push_back(m);
        }
    }
    const int kp = static_cast<int>(ponly.size());
    std::vector<int> p_order(ponly), q_order(qonly);
    p_order.insert(p_order.end(), shared.begin(), shared.end());
    q_order.insert(q_order.end(), shared.begin(), shared.end());
    const double sign = static_cast<double>(sort_sign(p_order) * sort_sign(q_order));

    std::vector<int> spectators;
    for (int m = 1; m <= n; m++) {
        if (!p.contains(m) && !q.contains(m)) {
            spectators.push_back(m);
        }
    }

    // Averaging over L > 2k' phases isolates the term that creates on p' and annihilates on q'.
    const int terms = kp == 0 ? 1 : 2 * kp + 1;
    const double h = 1.0 / std::sqrt(2.0);
    RdmDecomposition dec;
    for (int t = 0; t < terms; t++) {
        const double theta = 2.0 * std::numbers::pi * t / terms;
        const Complex phase = std::polar(1.0, theta);
        SparseRotation w;
        w.n = n;
        for (int i = 0; i < kp; i++) {
            w.cols.push_back({{ponly[i] - 1, h}, {qonly[i] - 1, h * phase}});
        }
        for (int m : shared) {
            w.cols.push_back({{m - 1, 1.0}});
        }
        for (int i = 0; i < kp; i++) {
            w.cols.push_back({{ponly[i] - 1, h}, {qonly[i] - 1, -h * phase}});
        }
        for (int m : spectators) {
            w.cols.push_back({{m - 1, 1.0}});
        }
        Complex coeff = sign * std::ldexp(1.0, kp) / terms * std::polar(1.0, kp * theta);
        dec.terms.push_back({coeff, std::move(w)});
    }
    return dec;
}

ComplexMatrix effective_block(const ClassicalShadow &s, const SparseRotation &w, int k) {
    const int eta = s.eta();
    ComplexMatrix b = ComplexMatrix::Zero(eta, k);
    for (int c = 0; c < k; c++) {
        for (const auto &e : w.cols[c]) {
            for (int i = 0; i < eta; i++) {
                b(i, c) += s.u(s.z[i] - 1, e.row) * e.value;
            }
        }
    }
    return b;
}

RealMatrix build_m_from_block(const ComplexMatrix &b) {
    const Eigen::Index eta = b.rows();
    const Eigen::Index k = b.cols();
    RealMatrix m(2 * k, 2 * eta);
    for (Eigen::Index c = 0; c < k; c++) {
        for (Eigen::Index i = 0; i < eta; i++) {
            // X = B^dagger, block -Im X (x) I2 + Re X (x) Y.
            const double re = b(i, c).real();
            const double im = -b(i, c).imag();
            m(2 * c, 2 * i) = -im;
            m(2 * c, 2 * i + 1) = -re;
            m(2 * c + 1, 2 * i) = re;
            m(2 * c + 1, 2 * i + 1) = -im;
        }
    }
    return m;
}

ComplexMatrix build_m(const ComplexMatrix &u_eff, int k, int eta) {
    RealMatrix m = build_m_from_block(u_eff.topLeftCorner(eta, k));
    return (m * m.transpose()).cast<Complex>();
}

std::vector<Complex> trace_powers(const ComplexMatrix &m, int count) {
    std::vector<Complex> out;
    if (count <= 0) {
        return out;
    }
    auto ev = eigenvalues(m);
    std::vector<Complex> pw(ev.size(), Complex(1.0));
    for (int y = 1; y <= count; y++) {
        Complex acc = 0.0;
        for (std::size_t i = 0; i < ev.size(); i++) {
            pw[i] *= ev[i];
            acc += pw[i];
        }
        out.push_back(acc);
    }
    return out;
}

std::vector<Complex> inverse_trace_sequence(const std::vector<Complex> &traces, int j_max, int eta) {
    std::vector<Complex> out;
    for (int j = 1; j <= j_max; j++) {
        Complex acc = 2.0 * eta;
        double pow2 = 1.0;
        for (int y = 1; y <= j; y++) {
            pow2 *= -2.0;
            Complex tr = y <= static_cast<int>(traces.size()) ? traces[y - 1] : Complex(0.0);
            acc += pow2 * binom_u64(j, y) * tr;
        }
        out.push_back((j & 1) ? -acc : acc);
    }
    return out;
}

std::vector<Complex> pfaffian_derivatives(Complex pf0, const std::vector<Complex> &sequence, int x_max) {
    if (x_max > static_cast<int>(sequence.size())) {
        throw std::invalid_argument("pfaffian_derivatives: trace sequence too short");
    }
    std::vector<Complex> d{pf0};
    for (int x = 1; x <= x_max; x++) {
        Complex acc = 0.0;
        double jfact = 1.0;
        for (int j = 0; j < x; j++) {
            if (j > 0) {
                jfact *= j;
            }
            double c = static_cast<double>(binom_u64(x - 1, j)) * jfact * ((j & 1) ? -1.0 : 1.0);
            acc += c * d[x - 1 - j] * sequence[j];
        }
        d.push_back(0.5 * acc);
    }
    return d;
}

AntisymmetricMatrix generating_matrix(const ComplexMatrix &u_eff, int eta, int k, double kappa) {
    const int n = static_cast<int>(u_eff.rows());
    const RealMatrix y = pauli_y();
    RealMatrix r = MajoranaRotation::from(u_eff.adjoint()).u_tilde;
    RealMatrix lam = RealMatrix::Zero(n, n);
    RealMatrix proj = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; i++) {
        lam(i, i) = i < k ? 1.0 : -1.0;
        proj(i, i) = i < eta ? 1.0 : 0.0;
    }
    RealMatrix a = -kappa * kron(proj, y) - r.transpose() * kron(lam, y) * r;
    return AntisymmetricMatrix(a.cast<Complex>(), 1e-10);
}

Complex generating_pfaffian_at_zero(int n, int k) {
    return ((n - k) & 1) ? -1.0 : 1.0;
}

FastEstimator::FastEstimator(int n, int eta, int k) : coeffs_(alpha_coeffs(n, eta, k)) {
}

double FastEstimator::diagonal_value(const ComplexMatrix &b) const {
    const int k = coeffs_.k;
    const int eta = coeffs_.eta;
    const double sgn = ((coeffs_.n - k) & 1) ? -1.0 : 1.0;
    const Complex pf0 = generating_pfaffian_at_zero(coeffs_.n, k);
    std::vector<Complex> d{pf0};
    if (k > 0) {
        RealMatrix m = build_m_from_block(b);
        ComplexMatrix big_m = (m * m.transpose()).cast<Complex>();
        auto traces = trace_powers(big_m, k);
        auto seq = inverse_trace_sequence(traces, k, eta);
        d = pfaffian_derivatives(pf0, seq, k);
    }
    double acc = 0.0;
    for (int j = 0; j <= k; j++) {
        acc += coeffs_.weights[j] * sgn * d[j].real();
    }
    return acc;
}

Complex FastEstimator::estimate(const ClassicalShadow &s, const RdmDecomposition &dec) const {
    if (s.n() != coeffs_.n || s.eta() != coeffs_.eta) {
        throw std::invalid_argument("FastEstimator: shadow has a different (n, eta)");
    }
    Complex acc = 0.0;
    for (const auto &t : dec.terms) {
        acc += t.coefficient * diagonal_value(effective_block(s, t.rotation, coeffs_.k));
    }
    return acc;
}

Complex FastEstimator::estimate(const ClassicalShadow &s, const OccupationVector &p,
                                const OccupationVector &q) const {
    if (p.size() != coeffs_.k || q.size() != coeffs_.k) {
        throw std::invalid_argument("FastEstimator: RDM legs must have length k");
    }
    return estimate(s, decompose_rdm(p, q, s.n()));
}

Complex fast_estimate_rdm(const ClassicalShadow &s, int eta, int k, const OccupationVector &p,
                          const OccupationVector &q) {
    return FastEstimator(s.n(), eta, k).estimate(s, p, q);
}

}  // namespace fermishadow
