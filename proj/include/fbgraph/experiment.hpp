#pragma once

// Experiment plumbing for the command-line tool: schema-versioned JSON
// configs, config hashing, output directories and the per-command runners.
// Everything here is deterministic given (resolved config, seed, workers).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbgraph/combinatorics.hpp"
#include "fbgraph/errors.hpp"
#include "fbgraph/fbm_sampler.hpp"
#include "fbgraph/moment_lab.hpp"
#include "fbgraph/parallel.hpp"
#include "fbgraph/verification.hpp"

namespace fbgraph {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(4) << x;
    return os.str();
}

inline json default_config() {
    return json{
        {"schema_version", kSchemaVersion},
        {"H", 0.3},
        {"seed", 1},
        {"workers", default_workers()},
        {"out", "fbgraph_out"},
        {"format", "csv"},
        {"sample", {{"grid_steps", 1024}, {"n_paths", 4}, {"method", "exact-cholesky"}}},
        {"verify",
         {{"identity",
           json::array({json{{"q", 1}, {"lambda", {1, 2}}, {"T", {0.5, 1, 2}}, {"tol", 1e-3}},
                        json{{"q", 2}, {"lambda", {1}}, {"T", {1}}, {"tol", 1e-2}}})},
          {"tol_override", nullptr},
          {"identity_max_evaluations", 3e7},
          {"derivatives", {{"trials", 1000}, {"bound_trials", 10000}}},
          {"slnd", {{"n_max", 6}, {"trials", 20000}, {"holdout", 10000}, {"q_max", 3}}},
          {"key_estimate", {{"q", 1}, {"T", {1, 2, 4, 8}}, {"lambda", {4, 8, 16, 32}}}},
          {"traces", {{"q_max", 3}}},
          {"u_growth", false}}},
        {"moments",
         {{"q", {1, 2}},
          {"kind", "graph"},
          {"xi", json::array({{4, 1}, {8, 1}, {0, 1}})},
          {"n_paths", 100000},
          {"grid_steps", 16384},
          {"exact_q_max", 1}}},
        {"decay",
         {{"q", 1},
          {"auto_grid", true},
          {"horizontal", {{"xi1", {4, 8, 16, 32, 64}}, {"xi2", 1}, {"n_paths", 100000}, {"grid_steps", 16384}}},
          {"vertical", {{"xi2", {2, 4, 8, 16}}, {"n_paths", 256}, {"grid_steps", 16384}}}}}};
}

namespace detail {

// Keys present in `user` but not in `ref` are rejected; arrays and nulls are leaves.
inline void check_known_keys(const json& user, const json& ref, const std::string& where) {
    if (!user.is_object() || !ref.is_object()) return;
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = where.empty() ? it.key() : where + "." + it.key();
        require_domain(ref.contains(it.key()), "unknown config key '" + path + "'");
        check_known_keys(it.value(), ref.at(it.key()), path);
    }
}

} // namespace detail

// defaults <- file <- flag overrides (each a merge patch).
inline json resolve_config(const json& file, const json& overrides) {
    json cfg = default_config();
    for (const json* layer : {&file, &overrides}) {
        if (layer->is_null()) continue;
        detail::require_domain(layer->is_object(), "config must be a JSON object");
        detail::check_known_keys(*layer, cfg, "");
        if (layer->contains("schema_version"))
            detail::require_domain(layer->at("schema_version") == kSchemaVersion,
                                   "unsupported config schema_version (expected " + std::to_string(kSchemaVersion) + ")");
        // merge_patch treats null as delete; keep explicit nulls as values.
        json patch = *layer;
        cfg.merge_patch(patch);
        if (layer->contains("verify") && layer->at("verify").contains("tol_override") &&
            layer->at("verify").at("tol_override").is_null())
            cfg["verify"]["tol_override"] = nullptr;
    }
    if (!cfg["verify"].contains("tol_override")) cfg["verify"]["tol_override"] = nullptr;
    detail::check_hurst(cfg.at("H").get<double>());
    detail::require_domain(cfg.at("workers").get<int>() >= 1, "workers must be at least 1");
    const auto fmt = cfg.at("format").get<std::string>();
    detail::require_domain(fmt == "csv" || fmt == "json", "format must be csv or json");
    return cfg;
}

inline json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// The output directory is not part of the experiment, so it is left out of the hash.
inline std::string config_hash(const json& cfg) {
    json c = cfg;
    c.erase("out");
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(c.dump());
    return os.str();
}

class OutputDir {
  public:
    OutputDir(const std::string& dir, std::string hash) : dir_(dir), hash_(std::move(hash)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
            throw IoError("cannot create output directory '" + dir + "'" + (ec ? ": " + ec.message() : ""));
    }

    std::string header() const { return "# fbgraph config_hash=" + hash_ + " schema=" + std::to_string(kSchemaVersion); }
    const std::string& hash() const { return hash_; }

    // Text files get the hash header line; JSON files carry it as a field.
    std::string write_text(const std::string& name, const std::string& body) const {
        return write_raw(name, header() + "\n" + body);
    }
    std::string write_json(const std::string& name, json j) const {
        j["config_hash"] = hash_;
        return write_raw(name, j.dump(2) + "\n");
    }

  private:
    std::string write_raw(const std::string& name, const std::string& content) const {
        const auto p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot write '" + p.string() + "'");
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for '" + p.string() + "'");
        return p.string();
    }

    std::filesystem::path dir_;
    std::string hash_;
};

struct CommandResult {
    Verdict verdict = Verdict::pass;
    std::vector<std::string> files;
    std::string summary;
};

// Exit codes: 0 pass, 1 usage/domain, 2 I/O, 3 inconclusive, 4 a check ran and failed.
inline int exit_code(Verdict v) {
    switch (v) {
    case Verdict::pass: return 0;
    case Verdict::inconclusive: return 3;
    case Verdict::fail: return 4;
    }
    return 4;
}

inline OutputDir open_output(const json& cfg) {
    OutputDir d(cfg.at("out").get<std::string>(), config_hash(cfg));
    d.write_json("config.resolved.json", cfg);
    return d;
}

// ---- sample ---------------------------------------------------------------

inline CommandResult cmd_sample(const json& cfg) {
    const double H = cfg.at("H");
    const auto& s = cfg.at("sample");
    const auto steps = s.at("grid_steps").get<std::size_t>();
    const auto n = s.at("n_paths").get<int>();
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    detail::require_domain(n >= 1, "sample.n_paths must be at least 1");
    SamplerOptions so;
    so.method = parse_sampling_method(s.at("method"));
    FbmSampler sampler(H, TimeGrid::uniform(steps), so);
    std::vector<FbmPath> paths;
    for (int k = 0; k < n; ++k) paths.push_back(sampler.sample(seed, static_cast<std::uint64_t>(k)));

    auto out = open_output(cfg);
    CommandResult r;
    const auto& t = sampler.grid().points();
    if (cfg.at("format") == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "t";
        for (int k = 0; k < n; ++k) os << ",path" << k;
        os << '\n';
        for (std::size_t i = 0; i < t.size(); ++i) {
            os << t[i];
            for (const auto& p : paths) os << ',' << p.values[i];
            os << '\n';
        }
        r.files.push_back(out.write_text("paths.csv", os.str()));
    } else {
        json j{{"t", t}, {"paths", json::array()}};
        for (const auto& p : paths) j["paths"].push_back(p.values);
        r.files.push_back(out.write_json("paths.json", j));
    }
    json manifest{{"command", "sample"},
                  {"H", H},
                  {"seed", seed},
                  {"method", to_string(sampler.method())},
                  {"grid_steps", steps},
                  {"n_paths", n},
                  {"workers", cfg.at("workers")},
                  {"warnings", sampler.warnings()},
                  {"files", r.files}};
    r.files.push_back(out.write_json("manifest.json", manifest));
    r.summary = "sampled " + std::to_string(n) + " paths with " + to_string(sampler.method());
    return r;
}

// ---- verify ---------------------------------------------------------------

inline CommandResult cmd_verify(const json& cfg) {
    const double H = cfg.at("H");
    const auto& v = cfg.at("verify");
    const auto workers = cfg.at("workers").get<unsigned>();
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    json report{{"command", "verify"}, {"H", H}, {"seed", seed}, {"workers", workers}};
    std::ostringstream txt;
    Verdict all = Verdict::pass;
    auto section = [&](const std::string& name, Verdict vd, const std::string& line) {
        all = combine(all, vd);
        txt << std::left << std::setw(14) << name << std::setw(14) << to_string(vd) << line << '\n';
    };

    // Identities.
    QuadratureOptions quad;
    quad.max_evaluations = static_cast<std::int64_t>(v.at("identity_max_evaluations").get<double>());
    json ids = json::array();
    Verdict idv = Verdict::pass;
    double worst_gap = 0;
    int n_id = 0;
    for (const auto& item : v.at("identity")) {
        const int q = item.at("q");
        const double tol = v.at("tol_override").is_null() ? item.at("tol").get<double>()
                                                          : v.at("tol_override").get<double>();
        for (const auto& eps : enumerate_A(std::max(1, std::min(q, kMaxQ))))
            for (double lam : item.at("lambda"))
                for (double T : item.at("T")) {
                    auto rep = check_ibp_identity(q, eps, H, lam, T, tol, quad, workers);
                    idv = combine(idv, rep.verdict);
                    worst_gap = std::max(worst_gap, rep.abs_gap);
                    ++n_id;
                    ids.push_back(to_json(rep));
                }
    }
    report["identity"] = ids;
    section("identity", idv, std::to_string(n_id) + " checks, worst gap " + num(worst_gap));

    // Derivatives.
    const auto& dv = v.at("derivatives");
    const auto der = check_derivative_suite(H, dv.at("trials"), seed, dv.at("bound_trials"));
    report["derivatives"] = to_json(der);
    section("derivatives", der.verdict,
            "grad rel " + num(der.grad_max_rel) + ", hess rel " + num(der.hess_max_rel));

    // SLND calibration and holdout.
    const auto& sv = v.at("slnd");
    const auto cal = calibrate_slnd(H, sv.at("n_max"), sv.at("trials"), seed, sv.at("q_max"));
    const auto hold = validate_slnd(cal, sv.at("holdout"), seed + 1);
    report["slnd"] = {{"calibration", to_json(cal)}, {"holdout", to_json(hold)}};
    section("slnd", hold.verdict,
            "C_H " + num(cal.C_H) + ", K " + num(cal.K) + ", violations " +
                std::to_string(hold.violations_C + hold.violations_K));

    // Key estimate.
    const auto& kv = v.at("key_estimate");
    const auto key = check_key_estimate(kv.at("q"), H, kv.at("T").get<std::vector<double>>(),
                                        kv.at("lambda").get<std::vector<double>>(), {}, workers);
    report["key_estimate"] = to_json(key);
    section("key_estimate", key.verdict,
            "growth slope " + num(key.growth.slope) + ", lambda band " + num(key.lambda_band));

    // Recursion traces.
    const int tq = v.at("traces").at("q_max");
    const auto specs = enumerate_u_specs(tq, H, cal.K);
    json traces = json::array();
    int bad = 0;
    for (const auto& e : specs) {
        try {
            const auto c = trace_U_recursion(e.spec);
            if (c.claimed_T_exponent != e.spec.I - c.ell) ++bad;
            traces.push_back(to_json(c));
        } catch (const StructuralError& err) {
            ++bad;
            traces.push_back({{"config", to_json(e.spec)}, {"error", err.what()}});
        }
    }
    report["traces"] = traces;
    section("traces", bad == 0 ? Verdict::pass : Verdict::fail,
            std::to_string(specs.size()) + " configurations, " + std::to_string(bad) + " bad");

    if (v.at("u_growth").get<bool>()) {
        UGrowthOptions uo;
        uo.u.seed = seed;
        const auto ug = run_u_growth_suite(tq, H, cal.K, uo, workers);
        report["u_growth"] = to_json(ug);
        section("u_growth", ug.verdict,
                std::to_string(ug.growth_failures) + " growth failures of " + std::to_string(ug.records.size()));
    }

    report["verdict"] = to_string(all);
    auto out = open_output(cfg);
    CommandResult r;
    r.verdict = all;
    r.summary = txt.str() + "overall       " + to_string(all) + "\n";
    r.files.push_back(out.write_json("verify.json", report));
    r.files.push_back(out.write_text("verify.txt", r.summary));
    return r;
}

// ---- moments / decay / report ---------------------------------------------

inline MomentRunOptions run_options(const json& cfg) {
    MomentRunOptions o;
    o.workers = cfg.at("workers").get<unsigned>();
    return o;
}

inline CommandResult cmd_moments(const json& cfg) {
    const double H = cfg.at("H");
    const auto& m = cfg.at("moments");
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    std::vector<FrequencyPair> xs;
    for (const auto& x : m.at("xi")) {
        detail::require_domain(x.is_array() && x.size() == 2, "moments.xi entries must be [xi1, xi2]");
        xs.push_back({x[0].get<double>(), x[1].get<double>()});
    }
    detail::require_domain(!xs.empty(), "moments.xi is empty");
    const auto qs = m.at("q").get<std::vector<int>>();
    const auto kind = parse_moment_kind(m.at("kind"));
    const auto est = estimate_moments(H, qs, xs, m.at("n_paths"), m.at("grid_steps"), seed, kind, run_options(cfg));
    json j{{"command", "moments"}, {"estimates", json::array()}, {"exact", json::array()}};
    std::ostringstream csv;
    csv << moments_csv_header() << '\n';
    for (const auto& e : est) {
        csv << moments_csv_row(e) << '\n';
        j["estimates"].push_back(to_json(e));
    }
    Verdict vd = Verdict::pass;
    std::ostringstream txt;
    // q = 2 exact values cost about a minute each and may stop short of 1e-3; opt in.
    const int exact_q = std::min(2, m.at("exact_q_max").get<int>());
    {
        for (const auto& e : est) {
            if (e.q > exact_q || e.xi.xi2 == 0.0 || std::abs(e.xi.xi1) > 64) continue;
            const auto ex = exact_moment(H, e.q, e.xi, std::nullopt, cfg.at("workers").get<unsigned>());
            const double comb = std::sqrt(e.stderr_ * e.stderr_ + ex.error * ex.error);
            Verdict v = !ex.converged ? Verdict::inconclusive
                                      : (std::abs(e.value - ex.value) <= 4 * comb ? Verdict::pass : Verdict::fail);
            vd = combine(vd, v);
            auto jj = to_json(ex);
            jj["mc_value"] = e.value;
            jj["mc_stderr"] = e.stderr_;
            jj["verdict"] = to_string(v);
            j["exact"].push_back(jj);
            txt << "q=" << e.q << " xi=(" << e.xi.xi1 << "," << e.xi.xi2 << ") mc " << e.value << " +- " << e.stderr_
                << " exact " << ex.value << " +- " << ex.error << " " << to_string(v) << '\n';
        }
    }
    j["verdict"] = to_string(vd);
    auto out = open_output(cfg);
    CommandResult r;
    r.verdict = vd;
    r.summary = txt.str();
    if (cfg.at("format") == "csv") r.files.push_back(out.write_text("moments.csv", csv.str()));
    r.files.push_back(out.write_json("moments.json", j));
    return r;
}

inline std::vector<DecayFit> run_decay_fits(const json& cfg) {
    const double H = cfg.at("H");
    const auto& d = cfg.at("decay");
    const int q = d.at("q");
    std::vector<DecayFit> fits;
    for (const std::string dir : {"horizontal", "vertical"}) {
        if (!d.contains(dir) || d.at(dir).is_null()) continue;
        const auto& s = d.at(dir);
        std::vector<FrequencyPair> sched;
        if (dir == "horizontal")
            for (double x : s.at("xi1")) sched.push_back({x, s.at("xi2").get<double>()});
        else
            for (double x : s.at("xi2")) sched.push_back({0.0, x});
        EstimatorParams p;
        p.n_paths = s.at("n_paths");
        p.grid_steps = s.at("grid_steps");
        p.auto_grid = d.at("auto_grid");
        p.seed = cfg.at("seed");
        p.run = run_options(cfg);
        fits.push_back(fit_decay(H, q, dir == "horizontal" ? MomentKind::graph : MomentKind::image, sched, p));
    }
    return fits;
}

inline std::string slope_table(const std::vector<DecayFit>& fits) {
    std::ostringstream os;
    os << std::left << std::setw(12) << "direction" << std::setw(4) << "q" << std::setw(12) << "slope" << std::setw(12)
       << "target" << std::setw(10) << "r2" << std::setw(8) << "points" << "verdict\n";
    for (const auto& f : fits)
        os << std::left << std::setw(12) << to_string(f.direction) << std::setw(4) << f.q << std::setw(12) << f.slope
           << std::setw(12) << f.target << std::setw(10) << f.r_squared << std::setw(8) << f.points.size()
           << to_string(f.verdict) << '\n';
    return os.str();
}

inline void write_decay_outputs(const OutputDir& out, const json& cfg, const std::vector<DecayFit>& fits,
                                CommandResult& r) {
    std::ostringstream csv;
    csv << moments_csv_header() << '\n';
    json j = json::array();
    for (const auto& f : fits) {
        for (const auto& e : f.estimates) csv << moments_csv_row(e) << '\n';
        j.push_back(to_json(f));
        r.files.push_back(out.write_text("decay_" + to_string(f.direction) + ".dat",
                                         "# log|xi| log(moment)\n" + plot_data(f)));
    }
    if (cfg.at("format") == "csv") r.files.push_back(out.write_text("decay_moments.csv", csv.str()));
    r.files.push_back(out.write_json("decay.json", {{"command", "decay"}, {"fits", j}}));
}

inline CommandResult cmd_decay(const json& cfg) {
    const auto fits = run_decay_fits(cfg);
    detail::require_domain(!fits.empty(), "decay needs a horizontal or vertical schedule");
    auto out = open_output(cfg);
    CommandResult r;
    r.verdict = Verdict::pass;
    for (const auto& f : fits) r.verdict = combine(r.verdict, f.verdict);
    write_decay_outputs(out, cfg, fits, r);
    r.summary = slope_table(fits);
    return r;
}

inline CommandResult cmd_report(const json& cfg) {
    const double H = cfg.at("H");
    const auto fits = run_decay_fits(cfg);
    const auto rep = dimension_report(H, fits);
    auto out = open_output(cfg);
    CommandResult r;
    r.verdict = rep.verdict;
    write_decay_outputs(out, cfg, fits, r);
    std::ostringstream txt;
    txt << "Fourier-dimension report, H = " << H << "\n\n" << slope_table(fits) << '\n';
    txt << "gamma1 (horizontal) " << rep.gamma1 << "\n";
    txt << "gamma2 (vertical)   " << rep.gamma2 << "  (gamma2 * H = " << rep.gamma2_times_H << ")\n";
    txt << "implied lower bound " << rep.implied_lower_bound << "  (min{gamma1, gamma2} capped at 1)\n";
    txt << "theoretical value   " << rep.theoretical << "\n";
    for (const auto& n : rep.notes) txt << "note: " << n << '\n';
    txt << "verdict " << to_string(rep.verdict) << '\n';
    r.summary = txt.str();
    r.files.push_back(out.write_text("report.txt", r.summary));
    r.files.push_back(out.write_json("report.json", {{"command", "report"}, {"report", to_json(rep)}}));
    return r;
}

} // namespace fbgraph
