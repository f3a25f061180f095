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

#include "rbsim/random.h"

#include <cmath>

namespace rbsim {

uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t seed) : engine_(mix64(seed)) {
}

RngStream::RngStream(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t h = mix64(seed);
    for (auto p : path) {
        h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
    }
    std::seed_seq seq{(uint32_t)h, (uint32_t)(h >> 32), (uint32_t)path.size()};
    engine_.seed(seq);
}

uint64_t RngStream::below(uint64_t bound) {
    std::uniform_int_distribution<uint64_t> dist(0, bound - 1);
    return dist(engine_);
}

double RngStream::uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::normal() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

uint64_t RngStream::binomial(uint64_t trials, double p) {
    p = std::min(1.0, std::max(0.0, p));
    return std::binomial_distribution<uint64_t>(trials, p)(engine_);
}

namespace {

ComplexMatrix ginibre(size_t rows, size_t cols, RngStream &rng) {
    ComplexMatrix g(rows, cols);
    for (size_t r = 0; r < rows; r++) {
        for (size_t c = 0; c < cols; c++) {
            g(r, c) = std::complex<double>(rng.normal(), rng.normal()) / std::sqrt(2.0);
        }
    }
    return g;
}

ComplexMatrix orthonormal_columns(const ComplexMatrix &g) {
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(g.rows(), g.cols());
    ComplexMatrix r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < g.cols(); k++) {
        auto diag = r(k, k);
        if (std::abs(diag) > 0) {
            q.col(k) *= diag / std::abs(diag);
        }
    }
    return q;
}

}  // namespace

ComplexMatrix random_unitary(size_t dim, RngStream &rng) {
    return orthonormal_columns(ginibre(dim, dim, rng));
}

ComplexMatrix random_pure_state(size_t dim, RngStream &rng) {
    Eigen::VectorXcd psi = ginibre(dim, 1, rng).col(0);
    psi.normalize();
    return psi * psi.adjoint();
}

std::vector<ComplexMatrix> random_kraus_channel(size_t dim, size_t num_kraus, RngStream &rng) {
    ComplexMatrix v = orthonormal_columns(ginibre(dim * num_kraus, dim, rng));
    std::vector<ComplexMatrix> kraus;
    for (size_t k = 0; k < num_kraus; k++) {
        kraus.push_back(v.block(k * dim, 0, dim, dim));
    }
    return kraus;
}

}  // namespace rbsim
