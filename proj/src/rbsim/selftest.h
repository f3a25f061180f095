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

#ifndef RBSIM_SELFTEST_H
#define RBSIM_SELFTEST_H

#include <string>
#include <vector>

namespace rbsim {

/// Deliberate faults used to show that the embedded checks can fail.
enum class SelftestInjection {
    None,
    /// Builds the two-qubit group without the entangling generator.
    WrongC2Generators,
    /// Perturbs the subspace-depolarizing entries used by the forward weight map.
    TamperedRdepol,
};

SelftestInjection parse_injection(const std::string &name);

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<SelftestCheck> run_selftest(SelftestInjection injection = SelftestInjection::None);

}  // namespace rbsim

#endif
