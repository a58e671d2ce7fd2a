// spincavity — configuration-driven front end for the molecular-spin-qudit
// pipeline.  Subcommands map one experiment description to one CSV table.
//
// Exit codes: 0 success, 2 configuration error, 3 physics-validity error
// (dispersive margin violated; override with --force).

#include "spincavity/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw spincavity::ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int default_threads() {
    if (const char* env = std::getenv("SPINCAVITY_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    return 1;
}

std::string now_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace spincavity;

    CLI::App app{"molecular spin qudits coupled through a cavity: levels, effective "
                 "interactions, resonances, gate dynamics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool force = false;
    bool timestamp = false;
    int threads = default_threads();
    double tol_override = -1.0;
    int fock_override = -1;

    app.add_option("--config", config_path, "experiment description (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "output CSV path (default: stdout)");
    app.add_flag("--force", force, "run even when the dispersive margin is <= 1");
    app.add_flag("--timestamp", timestamp,
                 "include a wall-clock timestamp in the metadata header "
                 "(breaks byte-reproducibility)");
    app.add_option("--tol", tol_override, "override the resonance tolerance (GHz)");
    app.add_option("--fock", fock_override, "override the photon cutoff");
    app.add_option("--threads", threads,
                   "worker threads for sweeps (default: SPINCAVITY_THREADS or 1)");

    std::map<std::string, std::function<ResultTable(const RunContext&)>> commands{
        {"levels", cmd_levels},     {"tensor", cmd_tensor}, {"resonances", cmd_resonances},
        {"evolve", cmd_evolve},     {"gate", cmd_gate},     {"sweep", cmd_sweep}};
    std::map<std::string, const char*> blurbs{
        {"levels", "eigenvalues versus swept field"},
        {"tensor", "flattened effective pair-coupling tensor"},
        {"resonances", "secular transitions with couplings and time estimates"},
        {"evolve", "probability traces from U0 and the exact references"},
        {"gate", "gate classification and timing per resonant transition"},
        {"sweep", "resonance count and best gate time versus field"}};
    for (auto& [name, fn] : commands)
        app.add_subcommand(name, blurbs[name])->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunContext ctx;
        ctx.config_text = read_file(config_path);
        ctx.config = parse_config(ctx.config_text);
        ctx.threads = threads;
        ctx.force = force;
        ctx.with_timestamp = timestamp;
        if (timestamp)
            ctx.timestamp = now_utc();
        if (tol_override > 0.0)
            ctx.config.tolerances.resonance_tol = tol_override;
        if (fock_override >= 1)
            ctx.config.tolerances.fock_cutoff = fock_override;

        const std::string name = app.get_subcommands().front()->get_name();
        const ResultTable table = commands.at(name)(ctx);

        if (out_path.empty()) {
            write_csv(table, std::cout);
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write " << out_path << "\n";
                return 1;
            }
            write_csv(table, out);
        }
        return 0;
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const PhysicsError& err) {
        std::cerr << "physics error: " << err.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
