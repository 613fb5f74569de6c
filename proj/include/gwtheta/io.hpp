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

// Serialization. Floats are written with 17 significant digits in the C
// locale; non-finite values become the strings "inf", "-inf" and "nan" in
// JSON (plain JSON has no literal for them) and the same tokens in CSV.
//
// Model schema:
//   {"theta": 0.5, "r": 2,
//    "a": {"family": "harmonic", "params": {}},
//    "c": {"family": "proportional_c", "params": {"sigma": 0.85}}}
// A "table" family carries {"values": [...], "tail": "repeat_last" | "error"}.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gwtheta/analytics.hpp"
#include "gwtheta/classifier.hpp"
#include "gwtheta/environment.hpp"
#include "gwtheta/limits.hpp"

namespace gwtheta {

struct EnsembleStats;
struct VerificationReport;
struct Pmf;

using Json = nlohmann::ordered_json;

std::string format_double(double x);

/// A finite number, or the string token for a non-finite one.
Json json_number(double x);
/// Inverse of json_number; accepts numbers and the three tokens.
double number_from_json(const Json& j);

Json to_json(const EnvSequence& seq);
EnvSequence sequence_from_json(const Json& j);

Json to_json(const ThetaModel& model);
/// Throws RejectedParameter on schema or constraint violations.
ThetaModel model_from_json(const Json& j, std::size_t check_horizon = 1000);

Json to_json(const LimitValue& v);
Json to_json(const LimitConstants& limits);
Json to_json(const RegimeLabel& label);
Json to_json(const ConvergenceConditions& cc);
Json to_json(const LimitLawDescriptor& d);
Json to_json(const AbsorptionProbabilities& a);
Json to_json(const EnsembleStats& stats);
Json to_json(const VerificationReport& report);

/// One row per n: n, A_n, C_n, D_n, B_n, F_n(0), F_n(1), restricted and
/// conditional means.
struct AnalyzeRow {
    std::size_t n = 0;
    CompositeConstants constants;
    SurvivalMoments moments;
};

std::vector<AnalyzeRow> analyze_rows(const ThetaModel& model, std::size_t horizon, std::size_t stride);
void write_analyze_csv(std::ostream& out, const std::vector<AnalyzeRow>& rows);
Json to_json(const AnalyzeRow& row);

}  // namespace gwtheta
