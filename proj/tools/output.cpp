#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace weakrand::cli {

std::string format9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

double round9(double x) {
    if (!std::isfinite(x)) return x;
    const double r = std::strtod(format9(x).c_str(), nullptr);
    return r == 0.0 ? 0.0 : r;  // no negative zero
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::vector<std::string>& keys,
             std::vector<std::string>& values) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, keys, values);
        return;
    }
    keys.push_back(prefix);
    if (j.is_number_float()) {
        values.push_back(format9(j.get<double>()));
    } else if (j.is_string()) {
        values.push_back(j.get<std::string>());
    } else if (j.is_null()) {
        values.emplace_back();
    } else {
        values.push_back(j.dump());
    }
}

Json number(double x) { return round9(x); }

}  // namespace

std::string flatten_to_csv(const Json& object) {
    std::vector<std::string> keys, values;
    flatten(object, "", keys, values);
    std::string header, row;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i) {
            header += ',';
            row += ',';
        }
        header += csv_field(keys[i]);
        row += csv_field(values[i]);
    }
    return header + "\n" + row + "\n";
}

Json to_json(const KeyRateResult& r) {
    Json diag = Json::object();
    for (const auto& [k, v] : r.diagnostics) diag[k] = number(v);
    return {{"rate", number(r.rate)}, {"rate_clamped", number(r.rate_clamped)}, {"diagnostics", diag}};
}

Json to_json(const DeviationParams& dev) { return {{"eps0", number(dev.eps0)}, {"eps1", number(dev.eps1)}}; }

Json to_json(const HiddenVariableModel& hv) {
    return {{"p_lambda0", number(hv.p_lambda0)},
            {"p_lambda1", number(hv.p_lambda1)},
            {"p_x0_given_l0", {number(hv.p_x0_given_l0[0]), number(hv.p_x0_given_l0[1])}},
            {"p_x1_given_l1", {number(hv.p_x1_given_l1[0]), number(hv.p_x1_given_l1[1])}}};
}

Json to_json(const PauliChannel& ch) {
    return {{"q00", number(ch.q00)}, {"q01", number(ch.q01)}, {"q10", number(ch.q10)}, {"q11", number(ch.q11)}};
}

Json to_json(const TwoStepScenario& sc) {
    Json j = {{"hv", to_json(sc.hv)}};
    for (int l = 0; l < 2; ++l) {
        for (int b = 0; b < 2; ++b) {
            const std::string idx = std::to_string(l) + std::to_string(b);
            j["e_b" + idx] = number(sc.bit_error[l][b]);
            j["e_p" + idx] = number(sc.phase_error[l][b]);
        }
    }
    return j;
}

Json to_json(const SolverReport& rep) {
    Json trace = Json::array();
    for (double v : rep.best_trace) trace.push_back(number(v));
    return {{"evaluations", rep.evaluations},
            {"iterations", rep.iterations},
            {"restarts", rep.restarts},
            {"starts", rep.starts},
            {"best_trace", trace}};
}

Json to_json(const OptimizationResult& r) {
    return {{"min_rate", to_json(r.min_rate)},
            {"argmin", to_json(r.argmin)},
            {"solver_report", to_json(r.solver_report)},
            {"feasibility_residual", number(r.feasibility_residual)}};
}

Json to_json(const OracleReport& r) {
    Json loc = to_json(r.max_gap_location.channel);
    loc["p_x0"] = number(r.max_gap_location.p_x0);
    loc["p_z"] = number(r.max_gap_location.p_z);
    return {{"bound", number(r.bound)},
            {"max_difference", number(r.max_difference)},
            {"max_violation", number(r.max_violation)},
            {"tightness_gap", number(r.tightness_gap)},
            {"points_checked", r.points_checked},
            {"max_gap_location", loc},
            {"passed", r.passed()}};
}

Json to_json(const Estimate& e) {
    return {{"value", number(e.value)}, {"std_error", number(e.std_error)}, {"samples", e.samples}};
}

Json to_json(const SimReport& r) {
    Json j = {{"n_pulses", r.n_pulses},
              {"sifted_count", r.sifted_count},
              {"qber_estimate", to_json(r.qber)},
              {"qber_rec", to_json(r.qber_rec)},
              {"qber_dia", to_json(r.qber_dia)},
              {"basis_counts", {{"rec", r.sifted_rec}, {"dia", r.sifted_dia}}},
              {"x0_zero_fraction", to_json(r.x0_zero_fraction)}};
    if (r.eve_agreement) j["eve_agreement"] = to_json(*r.eve_agreement);
    Json rates = Json::object();
    if (r.one_step_rate) rates["one_step"] = to_json(*r.one_step_rate);
    if (r.two_step_rate) rates["two_step"] = to_json(*r.two_step_rate);
    j["derived_rates"] = rates;
    return j;
}

std::string pulse_csv_header() { return "lambda0,lambda1,x0,x1,y,bob_bit,sifted,eve_guess\n"; }

std::string pulse_csv_row(const PulseRecord& r) {
    std::string s;
    s += std::to_string(r.lambda0) + ',' + std::to_string(r.lambda1) + ',' + std::to_string(r.x0) + ',' +
         std::to_string(r.x1) + ',' + std::to_string(r.y) + ',';
    s += r.bob_bit ? std::to_string(*r.bob_bit) : std::string();
    s += r.sifted ? ",1," : ",0,";
    s += r.eve_guess ? std::to_string(*r.eve_guess) : std::string();
    s += '\n';
    return s;
}

}  // namespace weakrand::cli
