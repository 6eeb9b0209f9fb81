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

#include "fermishadow/linalg.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace fermishadow {

double max_abs(const ComplexMatrix &m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw std::invalid_argument("UnitaryMatrix: not square");
    }
    const auto n = m_.rows();
    double err = max_abs(m_ * m_.adjoint() - ComplexMatrix::Identity(n, n));
    if (!(err <= tol)) {
        throw std::invalid_argument("UnitaryMatrix: not unitary (deviation " + std::to_string(err) + ")");
    }
}

UnitaryMatrix UnitaryMatrix::identity(int n) {
    return UnitaryMatrix(ComplexMatrix::Identity(n, n));
}

UnitaryMatrix UnitaryMatrix::from_permutation(const PermutationMatrix &v) {
    const int n = v.n();
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int j = 1; j <= n; j++) {
        m(v(j) - 1, j - 1) = 1.0;
    }
    return UnitaryMatrix(std::move(m));
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
    UnitaryMatrix r;
    r.m_ = m_.adjoint();
    return r;
}

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix &o) const {
    return UnitaryMatrix(m_ * o.m_, 1e-10);
}

AntisymmetricMatrix::AntisymmetricMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || (m_.rows() % 2) != 0) {
        throw std::invalid_argument("AntisymmetricMatrix: dimension must be square and even");
    }
    double scale = std::max(1.0, max_abs(m_));
    if (max_abs(m_ + m_.transpose()) > tol * scale) {
        throw std::invalid_argument("AntisymmetricMatrix: A != -A^T");
    }
}

UnitaryMatrix haar_unitary(int n, Rng &rng) {
    if (n < 1) {
        throw std::invalid_argument("haar_unitary: n must be positive");
    }
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    for (int attempt = 0; attempt < 2; attempt++) {
        ComplexMatrix z(n, n);
        for (int i = 0; i < n; i++) {
            for (int j = 0; j < n; j++) {
                double re = gauss(rng);
                double im = gauss(rng);
                z(i, j) = Complex(re, im);
            }
        }
        Eigen::HouseholderQR<ComplexMatrix> qr(z);
        ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        ComplexMatrix q = qr.householderQ();
        bool singular = false;
        for (int j = 0; j < n; j++) {
            double a = std::abs(r(j, j));
            if (!(a > 1e-300)) {
                singular = true;
                break;
            }
            q.col(j) *= r(j, j) / a;
        }
        if (!singular) {
            return UnitaryMatrix(std::move(q), 1e-12 * std::max(1, n / 8));
        }
    }
    throw std::runtime_error("haar_unitary: singular Gaussian sample twice in a row");
}

Complex small_det(const ComplexMatrix &a) {
    switch (a.rows()) {
        case 0:
            return 1.0;
        case 1:
            return a(0, 0);
        case 2:
            return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        case 3:
            return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                   a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                   a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        default:
            return a.partialPivLu().determinant();
    }
}

Complex minor_det_mask(const ComplexMatrix &u, std::uint64_t rows, std::uint64_t cols) {
    const int d = std::popcount(rows);
    if (std::popcount(cols) != d) {
        throw std::invalid_argument("minor_det: row and column sets differ in size");
    }
    ComplexMatrix sub(d, d);
    int i = 0;
    for (std::uint64_t r = rows; r; r &= r - 1, i++) {
        int ri = std::countr_zero(r);
        int j = 0;
        for (std::uint64_t c = cols; c; c &= c - 1, j++) {
            sub(i, j) = u(ri, std::countr_zero(c));
        }
    }
    return small_det(sub);
}

Complex minor_det(const ComplexMatrix &u, const OccupationVector &rows, const OccupationVector &cols) {
    if (rows.size() != cols.size()) {
        throw std::invalid_argument("minor_det: row and column sets differ in size");
    }
    const int d = rows.size();
    ComplexMatrix sub(d, d);
    for (int i = 0; i < d; i++) {
        for (int j = 0; j < d; j++) {
            sub(i, j) = u(rows[i] - 1, cols[j] - 1);
        }
    }
    return small_det(sub);
}

ComplexMatrix compound_matrix(const ComplexMatrix &u, int k) {
    const int n = static_cast<int>(u.rows());
    if (k < 0 || k > n || u.cols() != n) {
        throw std::invalid_argument("compound_matrix: need square u and 0 <= k <= n");
    }
    auto masks = all_masks(n, k);
    const auto dim = static_cast<Eigen::Index>(masks.size());
    ComplexMatrix c(dim, dim);
    for (Eigen::Index a = 0; a < dim; a++) {
        for (Eigen::Index b = 0; b < dim; b++) {
            c(a, b) = minor_det_mask(u, masks[a], masks[b]);
        }
    }
    return c;
}

Complex pfaffian(const AntisymmetricMatrix &a) {
    return pfaffian(a.matrix());
}

Complex pfaffian(ComplexMatrix a) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || (n % 2) != 0) {
        throw std::invalid_argument("pfaffian: dimension must be square and even");
    }
    Complex result = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        Eigen::Index piv;
        a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&piv);
        piv += k + 1;
        if (piv != k + 1) {
            a.row(k + 1).swap(a.row(piv));
            a.col(k + 1).swap(a.col(piv));
            result = -result;
        }
        if (a(k + 1, k) == Complex(0.0)) {
            return 0.0;
        }
        result *= a(k, k + 1);
        if (k + 2 < n) {
            const Eigen::Index rest = n - k - 2;
            ComplexVector tau = a.row(k).tail(rest).transpose() / a(k, k + 1);
            ComplexVector col = a.col(k + 1).tail(rest);
            a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
        }
    }
    return result;
}

std::vector<Complex> eigenvalues(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eigenvalues: matrix must be square");
    }
    if (m.rows() == 0) {
        return {};
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigenvalues: QR iteration did not converge");
    }
    const auto &ev = solver.eigenvalues();
    return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

}  // namespace fermishadow
