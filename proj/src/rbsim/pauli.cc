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

#include "rbsim/pauli.h"

#include <cmath>
#include <stdexcept>

namespace rbsim {

namespace {

ComplexMatrix single_qubit_pauli(uint8_t letter) {
    using C = std::complex<double>;
    ComplexMatrix m(2, 2);
    switch (letter) {
        case 0:
            m << 1, 0, 0, 1;
            break;
        case 1:
            m << 0, 1, 1, 0;
            break;
        case 2:
            m << 0, C(0, -1), C(0, 1), 0;
            break;
        case 3:
            m << 1, 0, 0, -1;
            break;
        default:
            throw std::invalid_argument("Pauli letter out of range");
    }
    return m;
}

}  // namespace

PauliString::PauliString(std::vector<uint8_t> letters) : letters(std::move(letters)) {
    for (auto l : this->letters) {
        if (l > 3) {
            throw std::invalid_argument("Pauli letter out of range");
        }
    }
}

PauliString PauliString::identity(size_t num_qubits) {
    return PauliString(std::vector<uint8_t>(num_qubits, 0));
}

PauliString PauliString::from_index(size_t num_qubits, size_t index) {
    if (index >= liouville_dim(num_qubits)) {
        throw std::invalid_argument("Pauli index out of range");
    }
    std::vector<uint8_t> letters(num_qubits);
    for (size_t q = num_qubits; q-- > 0;) {
        letters[q] = (uint8_t)(index & 3);
        index >>= 2;
    }
    return PauliString(std::move(letters));
}

PauliString PauliString::from_str(std::string_view text) {
    std::vector<uint8_t> letters;
    for (char c : text) {
        switch (c) {
            case 'I':
            case '_':
                letters.push_back(0);
                break;
            case 'X':
                letters.push_back(1);
                break;
            case 'Y':
                letters.push_back(2);
                break;
            case 'Z':
                letters.push_back(3);
                break;
            default:
                throw std::invalid_argument("Unrecognized Pauli character in '" + std::string(text) + "'");
        }
    }
    if (letters.empty() || letters.size() > MAX_QUBITS) {
        throw std::invalid_argument("Pauli string length out of range: '" + std::string(text) + "'");
    }
    return PauliString(std::move(letters));
}

size_t PauliString::index() const {
    size_t result = 0;
    for (auto l : letters) {
        result = (result << 2) | l;
    }
    return result;
}

size_t PauliString::weight() const {
    size_t w = 0;
    for (auto l : letters) {
        w += l != 0;
    }
    return w;
}

uint32_t PauliString::support_mask() const {
    uint32_t mask = 0;
    for (size_t q = 0; q < letters.size(); q++) {
        if (letters[q]) {
            mask |= 1u << q;
        }
    }
    return mask;
}

std::string PauliString::str() const {
    std::string s;
    for (auto l : letters) {
        s.push_back("IXYZ"[l]);
    }
    return s;
}

int anticommute_bit(size_t num_qubits, size_t a, size_t b) {
    int parity = 0;
    for (size_t q = 0; q < num_qubits; q++) {
        size_t la = (a >> (2 * q)) & 3;
        size_t lb = (b >> (2 * q)) & 3;
        parity ^= (la != 0 && lb != 0 && la != lb);
    }
    return parity;
}

bool commutes(const PauliString &a, const PauliString &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("Pauli strings act on different qubit counts");
    }
    return anticommute_bit(a.num_qubits(), a.index(), b.index()) == 0;
}

ComplexMatrix pauli_matrix(const PauliString &p) {
    ComplexMatrix result = ComplexMatrix::Identity(1, 1);
    for (auto l : p.letters) {
        ComplexMatrix factor = single_qubit_pauli(l);
        ComplexMatrix next(result.rows() * 2, result.cols() * 2);
        for (Eigen::Index r = 0; r < result.rows(); r++) {
            for (Eigen::Index c = 0; c < result.cols(); c++) {
                next.block(2 * r, 2 * c, 2, 2) = result(r, c) * factor;
            }
        }
        result = std::move(next);
    }
    return result;
}

ComplexMatrix normalized_pauli_matrix(const PauliString &p) {
    return pauli_matrix(p) / std::sqrt((double)hilbert_dim(p.num_qubits()));
}

size_t hilbert_dim(size_t num_qubits) {
    if (num_qubits > MAX_QUBITS) {
        throw std::invalid_argument("Too many qubits: " + std::to_string(num_qubits));
    }
    return (size_t)1 << num_qubits;
}

size_t liouville_dim(size_t num_qubits) {
    size_t d = hilbert_dim(num_qubits);
    return d * d;
}

size_t qubits_for_dim(size_t dim) {
    for (size_t n = 0; n <= MAX_QUBITS; n++) {
        if (((size_t)1 << n) == dim) {
            return n;
        }
    }
    throw std::invalid_argument("Matrix dimension " + std::to_string(dim) + " is not a supported power of two");
}

}  // namespace rbsim
