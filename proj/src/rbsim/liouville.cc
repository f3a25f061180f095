// Copyright 2026 The rbsim Authors
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

#include "rbsim/liouville.h"

#include <cmath>
#include <stdexcept>

namespace rbsim {

namespace {

const std::vector<ComplexMatrix> &normalized_basis(size_t num_qubits) {
    static const auto all = [] {
        std::vector<std::vector<ComplexMatrix>> result(MAX_QUBITS + 1);
        for (size_t n = 0; n <= MAX_QUBITS; n++) {
            for (size_t k = 0; k < liouville_dim(n); k++) {
                result[n].push_back(normalized_pauli_matrix(PauliString::from_index(n, k)));
            }
        }
        return result;
    }();
    if (num_qubits > MAX_QUBITS) {
        throw std::invalid_argument("Too many qubits");
    }
    return all[num_qubits];
}

void require_square(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("Expected a square matrix");
    }
}

}  // namespace

LiouvilleVector::LiouvilleVector(size_t num_qubits, RealVector coeffs) : num_qubits(num_qubits), coeffs(std::move(coeffs)) {
    if ((size_t)this->coeffs.size() != liouville_dim(num_qubits)) {
        throw std::invalid_argument("Liouville vector has the wrong length");
    }
}

LiouvilleVector LiouvilleVector::zero(size_t num_qubits) {
    return LiouvilleVector(num_qubits, RealVector::Zero(liouville_dim(num_qubits)));
}

Ptm::Ptm(size_t num_qubits, RealMatrix mat) : num_qubits(num_qubits), mat(std::move(mat)) {
    size_t n = liouville_dim(num_qubits);
    if ((size_t)this->mat.rows() != n || (size_t)this->mat.cols() != n) {
        throw std::invalid_argument("PTM has the wrong shape");
    }
}

Ptm Ptm::identity(size_t num_qubits) {
    size_t n = liouville_dim(num_qubits);
    return Ptm(num_qubits, RealMatrix::Identity(n, n));
}

bool Ptm::is_trace_preserving(double tol) const {
    for (Eigen::Index j = 0; j < mat.cols(); j++) {
        if (std::abs(mat(0, j) - (j == 0 ? 1.0 : 0.0)) > tol) {
            return false;
        }
    }
    return true;
}

bool Ptm::is_unital(double tol) const {
    for (Eigen::Index i = 1; i < mat.rows(); i++) {
        if (std::abs(mat(i, 0)) > tol) {
            return false;
        }
    }
    return true;
}

LiouvilleVector vectorize(const ComplexMatrix &op) {
    require_square(op);
    size_t n = qubits_for_dim((size_t)op.rows());
    if (!approx_equal(op, ComplexMatrix(op.adjoint()), 1e-10)) {
        throw std::invalid_argument("Only Hermitian operators have a real Pauli-basis vector");
    }
    const auto &basis = normalized_basis(n);
    RealVector v(basis.size());
    for (size_t k = 0; k < basis.size(); k++) {
        v[k] = hs_inner(basis[k], op).real();
    }
    return LiouvilleVector(n, std::move(v));
}

ComplexMatrix devectorize(const LiouvilleVector &v) {
    const auto &basis = normalized_basis(v.num_qubits);
    size_t d = hilbert_dim(v.num_qubits);
    ComplexMatrix result = ComplexMatrix::Zero(d, d);
    for (size_t k = 0; k < basis.size(); k++) {
        result += v.coeffs[k] * basis[k];
    }
    return result;
}

ComplexMatrix basis_state(size_t num_qubits, size_t basis_index) {
    size_t d = hilbert_dim(num_qubits);
    if (basis_index >= d) {
        throw std::invalid_argument("Basis state index out of range");
    }
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    rho(basis_index, basis_index) = 1;
    return rho;
}

ComplexMatrix apply_kraus(std::span<const ComplexMatrix> kraus, const ComplexMatrix &rho) {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto &k : kraus) {
        out += k * rho * k.adjoint();
    }
    return out;
}

Ptm ptm_from_kraus(std::span<const ComplexMatrix> kraus) {
    if (kraus.empty()) {
        throw std::invalid_argument("Empty Kraus list");
    }
    require_square(kraus[0]);
    size_t n = qubits_for_dim((size_t)kraus[0].rows());
    for (const auto &k : kraus) {
        if (k.rows() != kraus[0].rows() || k.cols() != kraus[0].cols()) {
            throw std::invalid_argument("Kraus operators have mismatched shapes");
        }
    }
    const auto &basis = normalized_basis(n);
    size_t m = basis.size();
    RealMatrix r(m, m);
    for (size_t j = 0; j < m; j++) {
        ComplexMatrix image = apply_kraus(kraus, basis[j]);
        for (size_t i = 0; i < m; i++) {
            r(i, j) = hs_inner(basis[i], image).real();
        }
    }
    return Ptm(n, std::move(r));
}

Ptm ptm_from_unitary(const ComplexMatrix &u) {
    ComplexMatrix ops[] = {u};
    return ptm_from_kraus(ops);
}

LiouvilleVector apply(const Ptm &channel, const LiouvilleVector &v) {
    if (channel.num_qubits != v.num_qubits) {
        throw std::invalid_argument("Channel and vector act on different qubit counts");
    }
    return LiouvilleVector(v.num_qubits, channel.mat * v.coeffs);
}

Ptm compose(const Ptm &second, const Ptm &first) {
    if (second.num_qubits != first.num_qubits) {
        throw std::invalid_argument("Cannot compose channels on different qubit counts");
    }
    return Ptm(first.num_qubits, second.mat * first.mat);
}

Ptm tensor(const Ptm &a, const Ptm &b) {
    size_t nb = (size_t)b.mat.rows();
    RealMatrix out(a.mat.rows() * nb, a.mat.cols() * nb);
    for (Eigen::Index r = 0; r < a.mat.rows(); r++) {
        for (Eigen::Index c = 0; c < a.mat.cols(); c++) {
            out.block(r * nb, c * nb, nb, nb) = a.mat(r, c) * b.mat;
        }
    }
    return Ptm(a.num_qubits + b.num_qubits, std::move(out));
}

Ptm adjoint(const Ptm &channel) {
    return Ptm(channel.num_qubits, channel.mat.transpose());
}

double expectation(const LiouvilleVector &effect, const LiouvilleVector &state) {
    if (effect.num_qubits != state.num_qubits) {
        throw std::invalid_argument("Effect and state act on different qubit counts");
    }
    return effect.coeffs.dot(state.coeffs);
}

ComplexMatrix choi_matrix(const Ptm &channel) {
    const auto &basis = normalized_basis(channel.num_qubits);
    size_t d = hilbert_dim(channel.num_qubits);
    ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
    for (size_t i = 0; i < basis.size(); i++) {
        for (size_t j = 0; j < basis.size(); j++) {
            double r = channel.mat(i, j);
            if (r == 0) {
                continue;
            }
            ComplexMatrix conj_j = basis[j].conjugate();
            for (size_t a = 0; a < d; a++) {
                for (size_t b = 0; b < d; b++) {
                    choi.block(a * d, b * d, d, d) += r * basis[i](a, b) * conj_j;
                }
            }
        }
    }
    return choi;
}

double choi_min_eigenvalue(const Ptm &channel) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(choi_matrix(channel), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool is_completely_positive(const Ptm &channel, double tol) {
    return choi_min_eigenvalue(channel) >= -tol;
}

std::complex<double> hs_inner(const ComplexMatrix &a, const ComplexMatrix &b) {
    return (a.adjoint() * b).trace();
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix &m) {
    require_square(m);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    RealVector ev = solver.eigenvalues();
    double floor = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index k = 0; k < ev.size(); k++) {
        ev[k] = ev[k] > floor ? std::sqrt(ev[k]) : 0.0;
    }
    return solver.eigenvectors() * ev.cast<std::complex<double>>().asDiagonal() * solver.eigenvectors().adjoint();
}

double state_fidelity(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix s = hermitian_sqrt(a);
    ComplexMatrix inner = s * b * s;
    inner = (inner + inner.adjoint()).eval() / 2.0;
    double t = hermitian_sqrt(inner).trace().real();
    return t * t;
}

double entanglement_fidelity(const Ptm &channel) {
    double d2 = (double)channel.dim();
    return channel.mat.trace() / d2;
}

double average_gate_fidelity(const Ptm &channel) {
    double d = (double)hilbert_dim(channel.num_qubits);
    return (d * entanglement_fidelity(channel) + 1) / (d + 1);
}

bool approx_equal(const RealMatrix &a, const RealMatrix &b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

bool approx_equal(const ComplexMatrix &a, const ComplexMatrix &b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace rbsim
