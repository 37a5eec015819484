#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "output.hpp"
#include "weakrand/errors.hpp"

#ifndef WEAKRAND_VERSION
#define WEAKRAND_VERSION "0.0.0"
#endif

namespace weakrand::cli {

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Options that choose where output goes rather than what it contains; they
// are left out of run manifests.
const std::set<std::string> kLocationOptions = {"help", "out", "config", "manifest", "dump"};

struct CommonFlags {
    std::string out = "-";
    std::string format;
    std::uint64_t seed = 0;
    std::string config;
    std::string manifest;
    CLI::Option* seed_opt = nullptr;

    bool has_seed() const { return seed_opt && seed_opt->count() > 0; }
};

void add_common(CLI::App* sub, CommonFlags& c, const std::string& default_format) {
    c.format = default_format;
    sub->add_option("--out", c.out, "Output path, '-' for standard output");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    c.seed_opt = sub->add_option("--seed", c.seed, "Seed (required for stochastic and optimizer-backed runs)");
    sub->add_option("--config", c.config, "key=value file (or run manifest) supplying defaults for flags");
    sub->add_option("--manifest", c.manifest, "Write a run manifest to this path");
}

void add_solver_flags(CLI::App* sub, SolverOptions& s) {
    sub->add_option("--solver-grid", s.grid_points, "Grid points per axis");
    sub->add_option("--refine-starts", s.refine_starts, "Best grid points refined locally");
    sub->add_option("--random-starts", s.random_starts, "Seeded random local starts");
    sub->add_option("--restarts", s.max_restarts, "Local restarts per start");
    sub->add_option("--max-iter", s.max_iterations, "Iterations per local run");
    sub->add_option("--ftol", s.f_tol, "Objective tolerance");
    sub->add_option("--xtol", s.x_tol, "Variable tolerance");
}

double parse_double(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw ValidationError(field + ": cannot parse '" + text + "' as a number");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

std::array<double, 2> parse_pair(const std::string& text, const std::string& field) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw ValidationError(field + ": expected two comma-separated values, got '" + text + "'");
    return {parse_double(parts[0], field), parse_double(parts[1], field)};
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& data, std::ostream& out) {
    if (path == "-") {
        out << data;
        out.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << data;
    if (!f) throw IoError("failed while writing '" + path + "'");
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Config files are flat `key=value` text using long flag names; a run
// manifest (JSON with a "parameters" object) is accepted as well. Entries
// become flags inserted ahead of the user's own, skipping any flag the user
// passed explicitly.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;

    std::vector<std::pair<std::string, std::string>> entries;
    const std::string text = read_file(path);
    const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    if (is_json) {
        Json manifest;
        try {
            manifest = Json::parse(text);
        } catch (const Json::exception& e) {
            throw ValidationError("config: '" + path + "' is not valid JSON: " + e.what());
        }
        if (manifest.contains("command") && manifest["command"] != args[0]) {
            throw ValidationError("config: manifest was recorded for '" + manifest["command"].get<std::string>() +
                                  "', not '" + args[0] + "'");
        }
        if (!manifest.contains("parameters") || !manifest["parameters"].is_object()) {
            throw ValidationError("config: manifest '" + path + "' has no parameters object");
        }
        for (const auto& [k, v] : manifest["parameters"].items()) {
            entries.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
        }
    } else {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ValidationError("config: line " + std::to_string(lineno) + " of '" + path +
                                      "' is not key=value");
            }
            entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    std::set<std::string> given;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? a.npos : a.find('=') - 2));
    }
    std::vector<std::string> expanded{args[0]};
    for (const auto& [k, v] : entries) {
        if (k == "config" || given.count(k) || v.empty()) continue;
        expanded.push_back("--" + k + "=" + v);
    }
    expanded.insert(expanded.end(), args.begin() + 1, args.end());
    return expanded;
}

Json resolved_parameters(const CLI::App* sub) {
    Json params = Json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || kLocationOptions.count(name)) continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            for (std::size_t i = 0; i < res.size(); ++i) value += (i ? ";" : "") + res[i];
        } else {
            value = opt->get_default_str();
        }
        if (!value.empty()) params[name] = value;
    }
    return params;
}

void emit(const CLI::App* sub, const CommonFlags& common, const std::string& data, std::ostream& out) {
    write_output(common.out, data, out);
    if (common.manifest.empty()) return;
    Json m = {{"command", sub->get_name()},
              {"parameters", resolved_parameters(sub)},
              {"tool_version", WEAKRAND_VERSION},
              {"timestamp", utc_timestamp()},
              {"checksum_sha256", sha256_hex(data)}};
    if (common.has_seed()) m["seed"] = common.seed;
    write_output(common.manifest, dump_json(m), out);
}

std::string render(const Json& j, const std::string& format) {
    return format == "csv" ? flatten_to_csv(j) : dump_json(j);
}

// ---- rate ------------------------------------------------------------------

struct RateFlags {
    std::string method;
    double qber = 0.0;
    double eps0 = 0.0;
    double eps1 = 0.0;
    StrongRandomnessInputs strong;
    SolverOptions solver;
};

int cmd_rate(const CLI::App* sub, const CommonFlags& common, RateFlags& f, std::ostream& out) {
    Json j = {{"method", f.method}};
    const DeviationParams dev{f.eps0, f.eps1};
    if (f.method == "strong") {
        j["inputs"] = {{"p", round9(f.strong.p_valid)},
                       {"s", round9(f.strong.s_a_given_e)},
                       {"f", round9(f.strong.f_ec)},
                       {"e", round9(f.strong.e_obs)}};
        j["result"] = to_json(strong_randomness_rate(f.strong));
    } else if (f.method == "one-step") {
        j["inputs"] = {{"qber", round9(f.qber)}, {"deviation", to_json(dev)}};
        j["result"] = to_json(one_step_rate(f.qber, dev));
    } else {
        if (!common.has_seed()) throw ValidationError("rate: --seed is required for --method two-step");
        f.solver.seed = common.seed;
        const OptimizationResult r = solve_two_step({f.qber, dev, 0.5}, f.solver);
        j["inputs"] = {{"qber", round9(f.qber)}, {"deviation", to_json(dev)}, {"observed_basis_prob", 0.5}};
        j["result"] = to_json(r.min_rate);
        j["optimization"] = to_json(r);
        j["optimization"].erase("min_rate");
    }
    emit(sub, common, render(j, common.format), out);
    return kOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepFlags {
    std::string qber_range;
    std::string devs = "0,0";
    std::string methods = "one-step";
    SolverOptions solver;
};

struct SweepRow {
    double qber;
    DeviationParams dev;
    std::string method;
};

int cmd_sweep(const CLI::App* sub, const CommonFlags& common, SweepFlags& f, std::ostream& out) {
    const auto parts = split(f.qber_range, ':');
    if (parts.size() != 3) throw ValidationError("sweep: --qber must be start:stop:step, got '" + f.qber_range + "'");
    const double start = parse_double(parts[0], "sweep: qber start");
    const double stop = parse_double(parts[1], "sweep: qber stop");
    const double step = parse_double(parts[2], "sweep: qber step");
    if (!(start >= 0.0 && start < stop && stop <= 0.5)) {
        throw ValidationError("sweep: qber range must satisfy 0 <= start < stop <= 0.5");
    }
    if (!(step > 0.0)) throw ValidationError("sweep: qber step must be positive");
    const auto count = static_cast<std::size_t>(std::ceil((stop - start) / step - 1e-9));

    std::vector<DeviationParams> devs;
    for (const auto& d : split(f.devs, ';')) {
        const auto p = parse_pair(d, "sweep: --dev");
        DeviationParams dev{p[0], p[1]};
        dev.validate();
        devs.push_back(dev);
    }
    const std::vector<std::string> methods = split(f.methods, ';');
    for (const auto& m : methods) {
        if (m != "one-step" && m != "two-step") {
            throw ValidationError("sweep: --method must be one-step or two-step, got '" + m + "'");
        }
        if (m == "two-step" && !common.has_seed()) {
            throw ValidationError("sweep: --seed is required when sweeping two-step");
        }
    }
    f.solver.seed = common.seed;
    f.solver.validate();

    std::vector<SweepRow> rows;
    for (const auto& dev : devs) {
        for (const auto& m : methods) {
            for (std::size_t k = 0; k < count; ++k) rows.push_back({start + static_cast<double>(k) * step, dev, m});
        }
    }

    // Rows are independent; workers fill a buffer that is written in row order.
    std::vector<KeyRateResult> results(rows.size());
    std::vector<std::exception_ptr> failures(rows.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            try {
                const SweepRow& r = rows[i];
                results[i] = r.method == "one-step" ? one_step_rate(r.qber, r.dev)
                                                    : solve_two_step({r.qber, r.dev, 0.5}, f.solver).min_rate;
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8u));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : failures) {
        if (e) std::rethrow_exception(e);
    }

    std::string data;
    if (common.format == "csv") {
        data = "qber,eps0,eps1,method,rate,rate_clamped\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const SweepRow& r = rows[i];
            data += format9(r.qber) + ',' + format9(r.dev.eps0) + ',' + format9(r.dev.eps1) + ',' + r.method + ',' +
                    format9(results[i].rate) + ',' + format9(results[i].rate_clamped) + '\n';
        }
    } else {
        Json arr = Json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const SweepRow& r = rows[i];
            arr.push_back({{"qber", round9(r.qber)},
                           {"eps0", round9(r.dev.eps0)},
                           {"eps1", round9(r.dev.eps1)},
                           {"method", r.method},
                           {"rate", round9(results[i].rate)},
                           {"rate_clamped", round9(results[i].rate_clamped)}});
        }
        data = dump_json(Json{{"rows", arr}});
    }
    emit(sub, common, data, out);
    return kOk;
}

// ---- verify ----------------------------------------------------------------

struct VerifyFlags {
    std::string target;
    double eps0 = 0.0;
    double eps1 = 0.0;
    int grid = 21;
};

int cmd_verify(const CLI::App* sub, const CommonFlags& common, const VerifyFlags& f, std::ostream& out) {
    OracleReport report;
    Json j;
    if (f.target == "one-step") {
        report = verify_one_step_bound({f.eps0, f.eps1}, f.grid);
        j = to_json(report);
    } else {
        report = verify_cross_basis_bound(f.eps0, f.grid);
        j = to_json(report);
        j["relation"] = to_string(report.relation);
    }
    j["target"] = f.target;
    j["deviation"] = to_json(DeviationParams{f.eps0, f.eps1});
    j["grid"] = f.grid;
    emit(sub, common, render(j, common.format), out);
    return report.passed() ? kOk : kInfeasible;
}

// ---- simulate --------------------------------------------------------------

struct SimulateFlags {
    std::uint64_t pulses = 0;
    double p_lambda0 = 0.5;
    double p_lambda1 = 0.5;
    std::string p_x0 = "0.5,0.5";
    std::string p_x1 = "0.5,0.5";
    PauliChannel channel;
    double bob_basis_prob = 0.5;
    std::string attacker = "none";
    std::string dump;
    bool derive_rates = true;
    SolverOptions solver;
};

int cmd_simulate(const CLI::App* sub, const CommonFlags& common, SimulateFlags& f, std::ostream& out) {
    if (!common.has_seed()) throw ValidationError("simulate: --seed is required");
    SimConfig cfg;
    cfg.n_pulses = f.pulses;
    cfg.hv.p_lambda0 = f.p_lambda0;
    cfg.hv.p_lambda1 = f.p_lambda1;
    cfg.hv.p_x0_given_l0 = parse_pair(f.p_x0, "simulate: p-x0");
    cfg.hv.p_x1_given_l1 = parse_pair(f.p_x1, "simulate: p-x1");
    cfg.channel = f.channel;
    cfg.bob_basis_prob = f.bob_basis_prob;
    cfg.attacker = attacker_from_string(f.attacker);
    cfg.seed = common.seed;
    cfg.validate();

    std::ofstream dump;
    PulseSink sink;
    if (!f.dump.empty()) {
        dump.open(f.dump, std::ios::binary | std::ios::trunc);
        if (!dump) throw IoError("cannot write '" + f.dump + "'");
        dump << pulse_csv_header();
        sink = [&dump](std::uint64_t, const PulseRecord& r) { dump << pulse_csv_row(r); };
    }
    SimulateOptions opts;
    opts.derive_rates = f.derive_rates;
    opts.solver = f.solver;
    opts.solver.seed = common.seed;
    const SimReport report = simulate(cfg, sink, opts);
    if (dump.is_open()) {
        dump.close();
        if (!dump) throw IoError("failed while writing '" + f.dump + "'");
    }

    emit(sub, common, render(to_json(report), common.format), out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    try {
        const std::vector<std::string> args = expand_config(raw_args);

        CLI::App app{"Secret key rates for BB84 with weak randomness", "weakrand"};
        app.require_subcommand(1);
        app.set_version_flag("--version", WEAKRAND_VERSION);

        CLI::App* rate = app.add_subcommand("rate", "Key rate at a single operating point");
        CLI::App* sweep = app.add_subcommand("sweep", "Key rate over a QBER range");
        CLI::App* verify = app.add_subcommand("verify", "Brute-force check of the phase-error bounds");
        CLI::App* sim = app.add_subcommand("simulate", "Pulse-level protocol simulation");
        for (CLI::App* sub : {rate, sweep, verify, sim}) sub->option_defaults()->always_capture_default();

        CommonFlags rate_common, sweep_common, verify_common, sim_common;
        add_common(rate, rate_common, "json");
        add_common(sweep, sweep_common, "csv");
        add_common(verify, verify_common, "json");
        add_common(sim, sim_common, "json");

        RateFlags rf;
        rate->add_option("--method", rf.method, "one-step, two-step or strong")
            ->required()
            ->check(CLI::IsMember({"one-step", "two-step", "strong"}));
        rate->add_option("--qber", rf.qber, "Observed quantum bit error rate");
        rate->add_option("--eps0", rf.eps0, "Bit-value deviation bound");
        rate->add_option("--eps1", rf.eps1, "Basis deviation bound");
        rate->add_option("--p", rf.strong.p_valid, "Probability of a valid count (strong)");
        rate->add_option("--s", rf.strong.s_a_given_e, "Conditional entropy S(a|E) (strong)");
        rate->add_option("--f", rf.strong.f_ec, "Error-correction efficiency (strong)");
        rate->add_option("--e", rf.strong.e_obs, "Observed bit error rate (strong)");
        add_solver_flags(rate, rf.solver);

        SweepFlags sf;
        sweep->add_option("--qber", sf.qber_range, "start:stop:step (stop exclusive)")->required();
        sweep->add_option("--dev", sf.devs, "eps0,eps1 pairs separated by ';'");
        sweep->add_option("--method", sf.methods, "one-step and/or two-step, separated by ';'");
        add_solver_flags(sweep, sf.solver);

        VerifyFlags vf;
        verify->add_option("--target", vf.target, "one-step or cross-basis")
            ->required()
            ->check(CLI::IsMember({"one-step", "cross-basis"}));
        verify->add_option("--eps0", vf.eps0, "Bit-value deviation bound");
        verify->add_option("--eps1", vf.eps1, "Basis deviation bound (one-step only)");
        verify->add_option("--grid", vf.grid, "Grid resolution (>= 3)");

        SimulateFlags mf;
        sim->add_option("--pulses", mf.pulses, "Number of pulses")->required();
        sim->add_option("--p-lambda0", mf.p_lambda0, "p(λ0 = 0)");
        sim->add_option("--p-lambda1", mf.p_lambda1, "p(λ1 = 0)");
        sim->add_option("--p-x0", mf.p_x0, "p(x0=0|λ0=0),p(x0=0|λ0=1)");
        sim->add_option("--p-x1", mf.p_x1, "p(x1=0|λ1=0),p(x1=0|λ1=1)");
        sim->add_option("--q00", mf.channel.q00, "Identity weight");
        sim->add_option("--q01", mf.channel.q01, "Z weight");
        sim->add_option("--q10", mf.channel.q10, "X weight");
        sim->add_option("--q11", mf.channel.q11, "XZ weight");
        sim->add_option("--bob-basis-prob", mf.bob_basis_prob, "Probability Bob measures rectilinear");
        sim->add_option("--attacker", mf.attacker, "none or intercept_resend_with_hints")
            ->check(CLI::IsMember({"none", "intercept_resend_with_hints", "intercept-resend"}));
        sim->add_option("--dump", mf.dump, "Write per-pulse CSV here");
        sim->add_option("--derive-rates", mf.derive_rates, "Compute key rates from the estimated QBER");
        add_solver_flags(sim, mf.solver);

        try {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? kOk : kValidation;
        }

        if (rate->parsed()) return cmd_rate(rate, rate_common, rf, out);
        if (sweep->parsed()) return cmd_sweep(sweep, sweep_common, sf, out);
        if (verify->parsed()) return cmd_verify(verify, verify_common, vf, out);
        return cmd_simulate(sim, sim_common, mf, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << "\n";
        out << dump_json(Json{{"error", "infeasible"}, {"message", e.what()}, {"residual", round9(e.residual())}});
        return kInfeasible;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << "\n";
        return kInfeasible;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    }
}

}  // namespace weakrand::cli
