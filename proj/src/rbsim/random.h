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

#ifndef RBSIM_RANDOM_H
#define RBSIM_RANDOM_H

#include <cstdint>
#include <random>
#include <vector>

#include "rbsim/pauli.h"

namespace rbsim {

/// Mixes a 64-bit value (splitmix64 finalizer).
uint64_t mix64(uint64_t x);

/// Deterministic random stream derived from a root seed and a path of stream ids.
///
/// Streams with different paths are statistically independent, so every sequence can own
/// its stream and results do not depend on the order or thread in which sequences run.
class RngStream {
   public:
    explicit RngStream(uint64_t seed);
    RngStream(uint64_t seed, std::initializer_list<uint64_t> path);

    std::mt19937_64 &engine() {
        return engine_;
    }
    /// Uniform integer in [0, bound).
    uint64_t below(uint64_t bound);
    double uniform();
    double normal();
    /// Number of successes in `trials` Bernoulli(p) draws.
    uint64_t binomial(uint64_t trials, double p);

   private:
    std::mt19937_64 engine_;
};

/// Haar-random unitary via QR of a complex Ginibre matrix with phase correction.
ComplexMatrix random_unitary(size_t dim, RngStream &rng);
/// Haar-random pure state as a density matrix.
ComplexMatrix random_pure_state(size_t dim, RngStream &rng);
/// Random CPTP channel as `num_kraus` Kraus operators, built from a random isometry.
std::vector<ComplexMatrix> random_kraus_channel(size_t dim, size_t num_kraus, RngStream &rng);

}  // namespace rbsim

#endif
