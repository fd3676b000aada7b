// fbgraph: sample / verify / moments / decay / report.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fbgraph/experiment.hpp"

using namespace fbgraph;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out, format;
    std::optional<double> H, tol;
    std::optional<int> identity_q, paths;
    std::optional<std::size_t> grid;
    std::optional<std::string> method;
};

json overrides(const std::string& cmd, const Flags& f) {
    json o = json::object();
    if (f.seed) o["seed"] = *f.seed;
    if (f.workers) o["workers"] = *f.workers;
    if (f.out) o["out"] = *f.out;
    if (f.format) o["format"] = *f.format;
    if (f.H) o["H"] = *f.H;
    if (f.tol) o["verify"]["tol_override"] = *f.tol;
    if (f.identity_q)
        o["verify"]["identity"] = json::array({json{{"q", *f.identity_q}, {"lambda", {1}}, {"T", {1}}, {"tol", 1e-2}}});
    if (cmd == "sample") {
        if (f.paths) o["sample"]["n_paths"] = *f.paths;
        if (f.grid) o["sample"]["grid_steps"] = *f.grid;
        if (f.method) o["sample"]["method"] = *f.method;
    } else if (cmd == "moments") {
        if (f.paths) o["moments"]["n_paths"] = *f.paths;
        if (f.grid) o["moments"]["grid_steps"] = *f.grid;
    } else if (cmd == "decay" || cmd == "report") {
        for (const char* d : {"horizontal", "vertical"}) {
            if (f.paths) o["decay"][d]["n_paths"] = *f.paths;
            if (f.grid) o["decay"][d]["grid_steps"] = *f.grid;
        }
    }
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fBm graph Fourier-dimension laboratory"};
    app.require_subcommand(1);
    Flags f;
    std::string which;
    for (const char* name : {"sample", "verify", "moments", "decay", "report"}) {
        auto* sc = app.add_subcommand(name);
        sc->add_option("--config", f.config, "JSON config file (schema_version 1)");
        sc->add_option("--seed", f.seed, "master seed");
        sc->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
        sc->add_option("--out", f.out, "output directory");
        sc->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sc->add_option("--H", f.H, "Hurst index");
        if (std::string(name) == "verify") {
            sc->add_option("--tol", f.tol, "force one tolerance on every identity check");
            sc->add_option("--identity-q", f.identity_q, "run a single identity request at this q");
        } else {
            sc->add_option("--paths", f.paths, "number of paths");
            sc->add_option("--grid", f.grid, "grid steps on [0,1]");
        }
        if (std::string(name) == "sample") sc->add_option("--method", f.method, "exact-cholesky, circulant-embedding or auto");
        sc->callback([&which, name] { which = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const json file = f.config.empty() ? json(nullptr) : load_config_file(f.config);
        const json cfg = resolve_config(file, overrides(which, f));
        CommandResult r;
        if (which == "sample") r = cmd_sample(cfg);
        else if (which == "verify") r = cmd_verify(cfg);
        else if (which == "moments") r = cmd_moments(cfg);
        else if (which == "decay") r = cmd_decay(cfg);
        else r = cmd_report(cfg);
        std::cout << r.summary;
        if (!r.summary.empty() && r.summary.back() != '\n') std::cout << '\n';
        for (const auto& p : r.files) std::cout << "wrote " << p << '\n';
        std::cout << "config_hash " << config_hash(cfg) << "  verdict " << to_string(r.verdict) << '\n';
        return exit_code(r.verdict);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 1;
    } catch (const StructuralError& e) {
        std::cerr << "structural error: " << e.what() << '\n';
        return 1;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
}
