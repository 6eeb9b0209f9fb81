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

#ifndef FERMISHADOW_LINALG_HPP
#define FERMISHADOW_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "fermishadow/combinat.hpp"
#include "fermishadow/parallel.hpp"

namespace fermishadow {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

double max_abs(const ComplexMatrix &m);

/// Square matrix with u u^dagger = I, checked on construction.
class UnitaryMatrix {
   public:
    UnitaryMatrix() = default;
    explicit UnitaryMatrix(ComplexMatrix m, double tol = 1e-12);
    static UnitaryMatrix identity(int n);
    static UnitaryMatrix from_permutation(const PermutationMatrix &v);

    int n() const {
        return static_cast<int>(m_.rows());
    }
    const ComplexMatrix &matrix() const {
        return m_;
    }
    Complex operator()(int i, int j) const {
        return m_(i, j);
    }
    UnitaryMatrix adjoint() const;
    UnitaryMatrix operator*(const UnitaryMatrix &o) const;

   private:
    ComplexMatrix m_;
};

/// Even-dimensional matrix with A = -A^T (transpose, not adjoint), checked on construction.
class AntisymmetricMatrix {
   public:
    AntisymmetricMatrix() = default;
    explicit AntisymmetricMatrix(ComplexMatrix m, double tol = 1e-12);

    int dim() const {
        return static_cast<int>(m_.rows());
    }
    const ComplexMatrix &matrix() const {
        return m_;
    }

   private:
    ComplexMatrix m_;
};

/// Haar-distributed unitary from QR of a complex Ginibre matrix with the diagonal phase fix.
UnitaryMatrix haar_unitary(int n, Rng &rng);

/// det of the minor u[rows, cols]; rows/cols are 1-based mode sets.
Complex minor_det(const ComplexMatrix &u, const OccupationVector &rows, const OccupationVector &cols);

/// det of the minor picked by two mode bitmasks (bit m-1 for mode m).
Complex minor_det_mask(const ComplexMatrix &u, std::uint64_t rows, std::uint64_t cols);

/// Small dense determinant (LU with partial pivoting, closed forms for d <= 3).
Complex small_det(const ComplexMatrix &a);

/// U_k(u), C(n,k) x C(n,k), entry [p', p] = det u[p', p], indexed by colex rank.
ComplexMatrix compound_matrix(const ComplexMatrix &u, int k);

/// Pfaffian by Parlett-Reid skew tridiagonalization with pivoting.
Complex pfaffian(const AntisymmetricMatrix &a);
Complex pfaffian(ComplexMatrix a);

/// All eigenvalues of a general complex square matrix.
std::vector<Complex> eigenvalues(const ComplexMatrix &m);

}  // namespace fermishadow

#endif
