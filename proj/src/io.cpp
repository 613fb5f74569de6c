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

#include "gwtheta/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "gwtheta/errors.hpp"
#include "gwtheta/harness.hpp"
#include "gwtheta/series.hpp"
#include "gwtheta/simulator.hpp"

namespace gwtheta {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

Json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double number_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw RejectedParameter("expected a number, got " + j.dump(), 0, "");
}

Json to_json(const EnvSequence& seq) {
    Json j;
    j["family"] = std::string(to_string(seq.family()));
    Json params = Json::object();
    for (const auto& [k, v] : seq.params()) params[k] = json_number(v);
    j["params"] = params;
    if (seq.family() == Family::table) {
        Json values = Json::array();
        for (const double v : seq.table_values()) values.push_back(json_number(v));
        j["values"] = values;
        j["tail"] = seq.tail_rule() == TailRule::error ? "error" : "repeat_last";
    }
    return j;
}

EnvSequence sequence_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw RejectedParameter("sequence must be an object with a string 'family'", 0, "");
    const std::string name = j["family"].get<std::string>();
    const auto family = family_from_string(name);
    if (!family) throw RejectedParameter("unknown sequence family '" + name + "'", 0, "");
    FamilyParams params;
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw RejectedParameter("'params' must be an object", 0, "");
        for (const auto& [k, v] : j["params"].items()) params[k] = number_from_json(v);
    }
    std::vector<double> values;
    TailRule tail = TailRule::repeat_last;
    if (*family == Family::table) {
        if (!j.contains("values") || !j["values"].is_array())
            throw RejectedParameter("table family requires a 'values' array", 0, "");
        for (const auto& v : j["values"]) values.push_back(number_from_json(v));
        if (j.contains("tail")) {
            const std::string t = j["tail"].get<std::string>();
            if (t == "error") tail = TailRule::error;
            else if (t != "repeat_last")
                throw RejectedParameter("table tail must be 'repeat_last' or 'error'", 0, "");
        }
    }
    return EnvSequence::make(*family, std::move(params), std::move(values), tail);
}

Json to_json(const ThetaModel& model) {
    Json j;
    j["theta"] = json_number(model.theta());
    j["r"] = json_number(model.r());
    j["a"] = to_json(model.a_seq());
    j["c"] = to_json(model.c_seq());
    return j;
}

ThetaModel model_from_json(const Json& j, std::size_t check_horizon) {
    if (!j.is_object()) throw RejectedParameter("model must be a JSON object", 0, "");
    for (const char* key : {"theta", "r", "a", "c"})
        if (!j.contains(key)) throw RejectedParameter(std::string("model is missing '") + key + "'", 0, "");
    return ThetaModel::validate(number_from_json(j["theta"]), number_from_json(j["r"]),
                                sequence_from_json(j["a"]), sequence_from_json(j["c"]), check_horizon);
}

Json to_json(const LimitValue& v) {
    Json j;
    j["status"] = std::string(to_string(v.status));
    j["value"] = json_number(v.value);
    Json e;
    e["rule"] = v.evidence.rule;
    e["checkpoint_index"] = v.evidence.checkpoint_index;
    Json vals = Json::array();
    for (const double x : v.evidence.checkpoint_value) vals.push_back(json_number(x));
    e["checkpoint_value"] = vals;
    e["window_liminf"] = json_number(v.evidence.window_liminf);
    e["window_limsup"] = json_number(v.evidence.window_limsup);
    e["monotone"] = v.evidence.monotone;
    e["extrapolated"] = json_number(v.evidence.extrapolated);
    e["extrapolated_prev"] = json_number(v.evidence.extrapolated_prev);
    j["evidence"] = e;
    return j;
}

Json to_json(const LimitConstants& l) {
    Json j;
    j["A"] = to_json(l.A);
    j["C"] = to_json(l.C);
    j["D"] = to_json(l.D);
    j["B"] = to_json(l.B);
    j["A_plus_C"] = to_json(l.sum_AC);
    j["horizon"] = l.horizon_used;
    j["tol"] = json_number(l.tol);
    j["proper_equality"] = l.proper_equality;
    j["exact_family"] = l.exact_family;
    return j;
}

Json to_json(const RegimeLabel& label) {
    Json j;
    j["regime"] = std::string(to_string(label.regime));
    j["sub_label"] = label.sub_label;
    j["theorem"] = label.theorem_id();
    j["proper_subcase"] = label.proper_subcase;
    j["case"] = std::string(to_string(label.evidence_case));
    j["confidence"] = std::string(to_string(label.confidence));
    j["basis"] = label.basis;
    j["evidence"] = to_json(label.evidence);
    return j;
}

Json to_json(const ConvergenceConditions& cc) {
    Json j;
    j["church_lindvall"] = std::string(to_string(cc.church_lindvall));
    j["church_lindvall_sum"] = json_number(cc.church_lindvall_sum);
    j["sum_one_minus_a"] = json_number(cc.sum_one_minus_a);
    j["condition_a0"] = std::string(to_string(cc.condition_a0));
    j["condition_A1"] = std::string(to_string(cc.condition_A1));
    j["sum_A1"] = json_number(cc.sum_A1);
    j["tilde_church_lindvall"] = std::string(to_string(cc.tilde_cl));
    j["tilde_church_lindvall_sum"] = json_number(cc.tilde_cl_sum);
    j["horizon"] = cc.horizon;
    return j;
}

Json to_json(const LimitLawDescriptor& d) {
    Json j;
    j["theorem"] = d.theorem_id;
    j["kind"] = std::string(to_string(d.kind));
    Json p = Json::object();
    for (const auto& [k, v] : d.parameters) p[k] = json_number(v);
    j["parameters"] = p;
    Json s;
    s["kind"] = std::string(to_string(d.scaling.kind));
    s["conditioning"] = std::string(to_string(d.scaling.conditioning));
    s["description"] = d.scaling.description;
    j["scaling"] = s;
    return j;
}

Json to_json(const AbsorptionProbabilities& a) {
    Json j;
    j["q"] = json_number(a.q);
    j["q_delta"] = json_number(a.q_delta);
    j["Q"] = json_number(a.Q);
    return j;
}

namespace {

Json estimate_json(const Estimate& e) {
    Json j;
    j["value"] = json_number(e.value);
    j["se"] = json_number(e.se);
    return j;
}

std::string state_key_name(std::uint64_t key) {
    return key == kDeltaKey ? "Delta" : std::to_string(key);
}

}  // namespace

Json to_json(const EnsembleStats& s) {
    Json j;
    j["replicates"] = s.replicates;
    j["completed"] = s.completed;
    j["horizon"] = s.horizon;
    j["mode"] = std::string(to_string(s.mode));
    j["conditioning"] = std::string(to_string(s.conditioning));
    j["zero_count"] = s.zero_count;
    j["delta_count"] = s.delta_count;
    j["alive_count"] = s.alive_count;
    j["truncated_count"] = s.truncated_count;
    j["zero_freq"] = estimate_json(s.zero_freq);
    j["delta_freq"] = estimate_json(s.delta_freq);
    j["survival_freq"] = estimate_json(s.survival_freq);
    Json pgf = Json::array();
    for (std::size_t i = 0; i < s.pgf_grid.size(); ++i) {
        Json row = estimate_json(s.empirical_pgf[i]);
        row["s"] = json_number(s.pgf_grid[i]);
        pgf.push_back(row);
    }
    j["empirical_pgf"] = pgf;
    if (!s.scaling_description.empty()) {
        j["scaling"] = s.scaling_description;
        j["scale_factor"] = json_number(s.scale_factor);
        j["scaled_count"] = s.scaled_samples.size();
    }
    Json hist = Json::object();
    for (const auto& [k, v] : s.histogram) hist[state_key_name(k)] = v;
    j["histogram"] = hist;
    j["histogram_overflow"] = s.histogram_overflow;
    if (s.stabilized_count > 0 || !s.stabilized.empty()) {
        Json st = Json::object();
        for (const auto& [k, v] : s.stabilized) st[state_key_name(k)] = v;
        j["stabilized"] = st;
        j["stabilized_count"] = s.stabilized_count;
    }
    Json err = Json::object();
    for (const auto& [k, v] : s.errors) err[k] = v;
    j["errors"] = err;
    return j;
}

Json to_json(const VerificationReport& r) {
    Json j;
    j["scenario"] = r.scenario_id;
    j["theorem"] = r.theorem_id;
    j["pass"] = r.pass();
    j["worst_margin"] = json_number(r.worst_margin());
    j["replicates"] = r.replicates;
    j["horizons"] = r.horizons;
    j["seed"] = r.seed;
    j["low_power"] = r.low_power;
    Json checks = Json::array();
    for (const Check& c : r.checks) {
        Json cj;
        cj["name"] = c.name;
        cj["kind"] = c.kind;
        cj["statistic"] = json_number(c.statistic);
        cj["target"] = json_number(c.target);
        cj["tolerance"] = json_number(c.tolerance);
        cj["pass"] = c.pass;
        if (c.informational) cj["informational"] = true;
        cj["note"] = c.note;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    return j;
}

std::vector<AnalyzeRow> analyze_rows(const ThetaModel& model, std::size_t horizon, std::size_t stride) {
    if (stride == 0) stride = 1;
    const ConstantsTable table(model, horizon);
    std::vector<AnalyzeRow> rows;
    for (std::size_t n = stride; n <= horizon; n += stride)
        rows.push_back({n, table[n], survival_and_moments(model, table[n])});
    if (rows.empty() || rows.back().n != horizon)
        rows.push_back({horizon, table[horizon], survival_and_moments(model, table[horizon])});
    return rows;
}

void write_analyze_csv(std::ostream& out, const std::vector<AnalyzeRow>& rows) {
    out << "n,A_n,C_n,D_n,B_n,F_n(0),F_n(1),mean_restricted,mean_conditional\n";
    for (const AnalyzeRow& r : rows) {
        const double f0 = r.moments.p_zero;
        const double f1 = f0 + r.moments.p_alive;
        out << r.n << ',' << format_double(r.constants.A) << ',' << format_double(r.constants.C) << ','
            << format_double(r.constants.D()) << ',' << format_double(r.constants.B) << ','
            << format_double(f0) << ',' << format_double(f1) << ','
            << format_double(r.moments.mean_restricted) << ','
            << format_double(r.moments.mean_conditional) << '\n';
    }
}

Json to_json(const AnalyzeRow& r) {
    Json j;
    j["n"] = r.n;
    j["A_n"] = json_number(r.constants.A);
    j["C_n"] = json_number(r.constants.C);
    j["D_n"] = json_number(r.constants.D());
    j["B_n"] = json_number(r.constants.B);
    j["F_n(0)"] = json_number(r.moments.p_zero);
    j["F_n(1)"] = json_number(r.moments.p_zero + r.moments.p_alive);
    j["P(tau>n)"] = json_number(r.moments.p_alive);
    j["mean_restricted"] = json_number(r.moments.mean_restricted);
    j["mean_conditional"] = json_number(r.moments.mean_conditional);
    return j;
}

}  // namespace gwtheta
