// Copyright 2026 The dmipt Authors
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

// Dense reference simulators used as test oracles: a state vector for single trajectories and a
// density matrix for measurement-averaged ensembles. Qubit q is bit q of the basis index, and
// Z eigenvalue +1 corresponds to bit value 0.

#ifndef DMIPT_TESTS_STATEVECTOR_H
#define DMIPT_TESTS_STATEVECTOR_H

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dmipt/clifford2q.h"

namespace dmipt::testing {

using cd = std::complex<double>;

class StateVector {
  public:
    explicit StateVector(size_t n, Eigen::Index basis_state = 0)
        : n_(n), amp_(Eigen::VectorXcd::Zero(Eigen::Index(1) << n)) {
        amp_[basis_state] = 1.0;
    }

    size_t num_qubits() const { return n_; }
    const Eigen::VectorXcd &amplitudes() const { return amp_; }

    void h(size_t q) {
        const double s = 1.0 / std::sqrt(2.0);
        for_pairs(q, [&](Eigen::Index i0, Eigen::Index i1) {
            const cd a = amp_[i0], b = amp_[i1];
            amp_[i0] = s * (a + b);
            amp_[i1] = s * (a - b);
        });
    }
    void s(size_t q) {
        for_pairs(q, [&](Eigen::Index, Eigen::Index i1) { amp_[i1] *= cd(0, 1); });
    }
    void cnot(size_t c, size_t t) {
        const Eigen::Index cm = Eigen::Index(1) << c;
        for_pairs(t, [&](Eigen::Index i0, Eigen::Index i1) {
            if (i0 & cm) std::swap(amp_[i0], amp_[i1]);
        });
    }

    void apply(Generator g, size_t qa, size_t qb) {
        switch (g) {
            case Generator::kH0:
                h(qa);
                break;
            case Generator::kH1:
                h(qb);
                break;
            case Generator::kS0:
                s(qa);
                break;
            case Generator::kS1:
                s(qb);
                break;
            case Generator::kCnot01:
                cnot(qa, qb);
                break;
            case Generator::kCnot10:
                cnot(qb, qa);
                break;
        }
    }

    /// Element `index` of the two-qubit group on (qa, qb).
    void apply_group_element(size_t index, size_t qa, size_t qb) {
        for (Generator g : CliffordGroup2Q::instance().word(index)) apply(g, qa, qb);
    }

    /// Probability that measuring Z_q gives -1.
    double prob_one(size_t q) const {
        double p = 0;
        const Eigen::Index m = Eigen::Index(1) << q;
        for (Eigen::Index i = 0; i < amp_.size(); i++) {
            if (i & m) p += std::norm(amp_[i]);
        }
        return p;
    }

    /// Projects Z_q onto `bit` (0 for +1) and renormalizes; returns the outcome's probability.
    double project(size_t q, int bit) {
        const double p1 = prob_one(q);
        const double p = bit ? p1 : 1.0 - p1;
        if (p < 1e-12) throw std::logic_error("projecting onto an outcome of probability zero");
        const Eigen::Index m = Eigen::Index(1) << q;
        const double scale = 1.0 / std::sqrt(p);
        for (Eigen::Index i = 0; i < amp_.size(); i++) amp_[i] = (((i & m) != 0) == (bit != 0)) ? amp_[i] * scale : 0.0;
        return p;
    }

    /// Von Neumann entropy in bits of the qubits in `region`, from the reduced density matrix.
    double entropy_bits(const std::vector<size_t> &region) const {
        std::vector<size_t> rest;
        for (size_t q = 0; q < n_; q++) {
            bool in = false;
            for (size_t r : region) in |= r == q;
            if (!in) rest.push_back(q);
        }
        const Eigen::Index da = Eigen::Index(1) << region.size();
        const Eigen::Index db = Eigen::Index(1) << rest.size();
        Eigen::MatrixXcd psi(da, db);
        for (Eigen::Index i = 0; i < amp_.size(); i++) {
            Eigen::Index a = 0, b = 0;
            for (size_t k = 0; k < region.size(); k++) a |= ((i >> region[k]) & 1) << k;
            for (size_t k = 0; k < rest.size(); k++) b |= ((i >> rest[k]) & 1) << k;
            psi(a, b) = amp_[i];
        }
        const Eigen::MatrixXcd rho = psi * psi.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        double s = 0;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); k++) {
            const double l = es.eigenvalues()[k];
            if (l > 1e-12) s -= l * std::log2(l);
        }
        return s;
    }

    /// <psi| P |psi> for a Hermitian Pauli string given by x / z bit masks and a sign.
    double expectation(uint64_t xmask, uint64_t zmask, bool negative) const {
        cd acc = 0;
        const int y = __builtin_popcountll(xmask & zmask);
        for (Eigen::Index i = 0; i < amp_.size(); i++) {
            const Eigen::Index j = i ^ static_cast<Eigen::Index>(xmask);
            // P|i> = i^y (-1)^{popcount(i & z)} |i ^ x>, with Y = iXZ on each qubit.
            const int zs = __builtin_popcountll(static_cast<uint64_t>(i) & zmask) & 1;
            acc += std::conj(amp_[j]) * amp_[i] * (zs ? -1.0 : 1.0);
        }
        acc *= std::pow(cd(0, 1), y);
        return (negative ? -1.0 : 1.0) * acc.real();
    }

  private:
    template <typename F>
    void for_pairs(size_t q, F f) {
        const Eigen::Index m = Eigen::Index(1) << q;
        for (Eigen::Index i = 0; i < amp_.size(); i++) {
            if (!(i & m)) f(i, i | m);
        }
    }

    size_t n_;
    Eigen::VectorXcd amp_;
};

/// Measurement-averaged state: measurements act as dephasing, so diagonal entries give the exact
/// outcome distribution of the trajectory ensemble.
class DensityMatrix {
  public:
    explicit DensityMatrix(size_t n) : n_(n), rho_(Eigen::MatrixXcd::Zero(Eigen::Index(1) << n, Eigen::Index(1) << n)) {
        rho_(0, 0) = 1.0;
    }

    void apply_group_element(size_t index, size_t qa, size_t qb) {
        // Columns of U from the state-vector oracle, then rho -> U rho U^dagger.
        const Eigen::Index d = rho_.rows();
        Eigen::MatrixXcd U(d, d);
        for (Eigen::Index c = 0; c < d; c++) {
            StateVector sv(n_, c);
            sv.apply_group_element(index, qa, qb);
            U.col(c) = sv.amplitudes();
        }
        rho_ = U * rho_ * U.adjoint();
    }

    double prob_one(size_t q) const {
        double p = 0;
        const Eigen::Index m = Eigen::Index(1) << q;
        for (Eigen::Index i = 0; i < rho_.rows(); i++) {
            if (i & m) p += rho_(i, i).real();
        }
        return p;
    }

    void dephase(size_t q) {
        const Eigen::Index m = Eigen::Index(1) << q;
        for (Eigen::Index i = 0; i < rho_.rows(); i++) {
            for (Eigen::Index j = 0; j < rho_.cols(); j++) {
                if (((i ^ j) & m) != 0) rho_(i, j) = 0;
            }
        }
    }

  private:
    size_t n_;
    Eigen::MatrixXcd rho_;
};

}  // namespace dmipt::testing

#endif
