/*
   Copyright 2026 The gwtheta Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "gwtheta/environment.hpp"
#include "gwtheta/limits.hpp"

namespace gwtheta {

enum class Regime {
    supercritical,
    asymptotically_degenerate,
    critical,
    strictly_subcritical,
    loosely_subcritical,
    infinite_mean,
    defective,
    undetermined,
};

std::string_view to_string(Regime regime);
std::optional<Regime> regime_from_string(std::string_view name);

enum class Confidence { exact_family, numeric };

std::string_view to_string(Confidence c);

struct RegimeLabel {
    Regime regime = Regime::undetermined;
    /// "i".."iv" for infinite_mean; "i"/"ii" for defective; empty otherwise.
    std::string sub_label;
    /// Defective case whose equality condition makes every f_n proper.
    bool proper_subcase = false;
    std::string basis;
    LimitConstants evidence;
    CaseLabel evidence_case = CaseLabel::a;
    Confidence confidence = Confidence::numeric;

    /// Theorem governing the label, e.g. "T1", "T6(iii)", "T7(ii)", "T9-cor(i)".
    /// Empty when undetermined.
    std::string theorem_id() const;
};

/// Pure function of the case label and the limit constants.
RegimeLabel classify(const ThetaModel& model, const LimitConstants& limits);

}  // namespace gwtheta
