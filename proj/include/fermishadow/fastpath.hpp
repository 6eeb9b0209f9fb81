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

#ifndef FERMISHADOW_FASTPATH_HPP
#define FERMISHADOW_FASTPATH_HPP

#include <array>
#include <vector>

#include "fermishadow/combinat.hpp"
#include "fermishadow/linalg.hpp"
#include "fermishadow/shadows.hpp"

namespace fermishadow {

/// Real 2n x 2n images of a unitary in the Majorana basis:
///   u~ = Re u (x) I2 + Im u (x) Y,  iu~ = -Im u (x) I2 + Re u (x) Y,  Y = [[0,-1],[1,0]].
struct MajoranaRotation {
    RealMatrix u_tilde;
    RealMatrix iu_tilde;

    static MajoranaRotation from(const ComplexMatrix &u);
};

/// f_{k,s}(j) = sum_{x=j}^{k} (-1)^x C(x,s) 2^{-x} C(eta-j, eta-x).
Rational f_ks(int eta, int k, int s, int j);

struct FastCoefficients {
    int n = 0;
    int eta = 0;
    int k = 0;
    /// f_table[s][j], s = 0..k, j = 0..eta.
    std::vector<std::vector<Rational>> f_table;
    /// E'_{eta,k,s}, s = 0..k, the estimation-matrix value on the class |r cap [eta]| = s.
    std::vector<Rational> e_prime;
    /// alpha_{eta,k,j} = i^j sum_s (-1)^s f_{k,s}(j) E'_s, j = 0..eta.
    std::vector<Complex> alpha;
    /// alpha_j / (j! i^j) as reals; zero for j > k.
    std::vector<double> weights;
};

FastCoefficients alpha_coeffs(int n, int eta, int k);

/// Unitary with at most two nonzeros per column, stored column by column.
struct SparseRotation {
    struct Entry {
        int row;
        Complex value;
    };
    int n = 0;
    std::vector<std::vector<Entry>> cols;

    ComplexMatrix dense() const;
};

struct RdmTerm {
    Complex coefficient;
    SparseRotation rotation;
};

/// D^p_q = sum_t c_t U(w_t) D^[k]_[k] U^dagger(w_t).
struct RdmDecomposition {
    std::vector<RdmTerm> terms;
};

RdmDecomposition decompose_rdm(const OccupationVector &p, const OccupationVector &q, int n);

/// Top-left eta x k block of v_z^dagger u w for a shadow and a sparse rotation w.
ComplexMatrix effective_block(const ClassicalShadow &s, const SparseRotation &w, int k);

/// m (2k x 2eta) built from the top-left eta x k block B of the effective rotation: m = iu~(B^dagger).
RealMatrix build_m_from_block(const ComplexMatrix &b);

/// M = m m^T for the effective rotation u_eff.
ComplexMatrix build_m(const ComplexMatrix &u_eff, int k, int eta);

/// Tr[M^y] for y = 1..count.
std::vector<Complex> trace_powers(const ComplexMatrix &m, int count);

/// Tr[(A(0)^{-1} dA)^j], j = 1..j_max, with dA = -(I_[eta] (x) Y).
std::vector<Complex> inverse_trace_sequence(const std::vector<Complex> &traces, int j_max, int eta);

/// d^x Pf A(kappa) at kappa = 0, x = 0..x_max, given Pf A(0) and the trace sequence.
std::vector<Complex> pfaffian_derivatives(Complex pf0, const std::vector<Complex> &sequence, int x_max);

/// Dense A(kappa) = -kappa (I_[eta] (x) Y) - R^T (Lambda (x) Y) R, R = u~(u_eff^dagger),
/// Lambda = diag(+1 on [k], -1 elsewhere). Pf A(kappa) = (-1)^{n-k} sum_r |det u_eff[r,[k]]|^2
/// (1+kappa)^{|r cap [eta]|} (1-kappa)^{eta - |r cap [eta]|}.
AntisymmetricMatrix generating_matrix(const ComplexMatrix &u_eff, int eta, int k, double kappa);

/// Closed value of Pf A(0).
Complex generating_pfaffian_at_zero(int n, int k);

/// Single-shot estimator through the Pfaffian recursion.
class FastEstimator {
   public:
    FastEstimator(int n, int eta, int k);

    const FastCoefficients &coefficients() const {
        return coeffs_;
    }
    /// sum_r E_r |det V[r,[k]]|^2 for the effective block B = V[[eta],[k]].
    double diagonal_value(const ComplexMatrix &b) const;
    Complex estimate(const ClassicalShadow &s, const OccupationVector &p, const OccupationVector &q) const;
    Complex estimate(const ClassicalShadow &s, const RdmDecomposition &dec) const;

   private:
    FastCoefficients coeffs_;
};

Complex fast_estimate_rdm(const ClassicalShadow &s, int eta, int k, const OccupationVector &p,
                          const OccupationVector &q);

}  // namespace fermishadow

#endif
