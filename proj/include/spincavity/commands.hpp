// commands.hpp — the batch operations behind the CLI subcommands.  Each command
// maps an ExperimentConfig to one ResultTable; the CLI binary only parses
// arguments and writes the table out.  Output is deterministic for a fixed
// config, version and thread count (sweeps partition work by row, so the thread
// count never changes the numbers either).

#pragma once

#include "spincavity/config.hpp"
#include "spincavity/dynamics.hpp"
#include "spincavity/table.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace spincavity {

struct RunContext {
    ExperimentConfig config;
    std::string config_text;  // raw file contents, hashed into the metadata
    int threads = 1;
    bool force = false;           // run on even when the dispersive margin is poor
    bool with_timestamp = false;  // timestamps break byte-reproducibility; opt in
    std::string timestamp;        // supplied by the CLI when requested
};

namespace detail {

inline void stamp_metadata(ResultTable& table, const RunContext& ctx) {
    table.metadata.emplace_back("tool", std::string("spincavity ") + kVersion);
    std::ostringstream hash;
    hash << "0x" << std::hex << fnv1a_hash(ctx.config_text);
    table.metadata.emplace_back("config-hash", hash.str());
    if (ctx.with_timestamp)
        table.metadata.emplace_back("timestamp", ctx.timestamp);
}

struct PipelineResult {
    std::vector<MoleculeEigensystem> eigs;
    std::vector<LambdaTensor> lambdas;
    double margin = 0.0;
    EffectiveTerms terms;
    DressedSpectrum dressed;
    ResonantSet set;
};

inline PipelineResult run_pipeline(const ExperimentConfig& cfg, bool force) {
    PipelineResult out;
    for (const Molecule& m : cfg.molecules) {
        out.eigs.push_back(diagonalize_molecule(molecule_hamiltonian(m.spec)));
        out.lambdas.push_back(
            lambda_tensor(out.eigs.back(), m.coupling, m.spec.g_tensor));
    }
    out.margin = dispersive_margin(out.eigs, cfg.cavity.omega, out.lambdas);
    if (out.margin <= 1.0 && !force)
        throw PhysicsError("dispersive margin " + std::to_string(out.margin) +
                           " <= 1: the effective description is invalid here "
                           "(rerun with --force to override)");
    out.terms = effective_terms(out.eigs, out.lambdas, cfg.cavity.omega,
                                cfg.tolerances.denominator_guard);
    out.dressed = dressed_spin_hamiltonian(out.terms, out.eigs, cfg.photon);
    ResonanceOptions opts;
    opts.tolerance = cfg.tolerances.resonance_tol;
    opts.coupling_floor = cfg.tolerances.coupling_floor;
    out.set = find_resonances(out.dressed, opts);
    return out;
}

inline std::vector<double> field_grid(const SweepConfig& sweep) {
    std::vector<double> grid;
    if (sweep.steps == 1) {
        grid.push_back(sweep.start);
        return grid;
    }
    for (int k = 0; k < sweep.steps; ++k)
        grid.push_back(sweep.start +
                       (sweep.stop - sweep.start) * k / (sweep.steps - 1));
    return grid;
}

inline ExperimentConfig at_field(const ExperimentConfig& cfg, const SweepConfig& sweep,
                                 double value) {
    ExperimentConfig out = cfg;
    for (std::size_t m = 0; m < out.molecules.size(); ++m)
        if (sweep.molecule < 0 || sweep.molecule == static_cast<int>(m))
            out.molecules[m].spec.b_field[sweep.axis] = value;
    return out;
}

// Run fn(row_index) over [0, count) on ctx.threads workers; each row slot is
// written exactly once, so the output is independent of scheduling.
template <typename Fn>
inline void parallel_rows(int count, int threads, Fn&& fn) {
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int k = 0; k < count; ++k)
            fn(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                const int k = next.fetch_add(1);
                if (k >= count)
                    return;
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

inline std::vector<double> time_grid(double t_max, int n_points) {
    std::vector<double> out;
    if (n_points == 1 || t_max == 0.0) {
        out.push_back(0.0);
        return out;
    }
    for (int k = 0; k < n_points; ++k)
        out.push_back(t_max * k / (n_points - 1));
    return out;
}

}  // namespace detail

// Eigenvalues of the first swept molecule versus field (columns b, e1..ed).
inline ResultTable cmd_levels(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.config;
    const SweepConfig sweep = cfg.sweep.value_or(SweepConfig{
        2, cfg.molecules[0].spec.b_field[2], cfg.molecules[0].spec.b_field[2], 1, 0});
    const int mol = std::max(0, sweep.molecule);

    ResultTable table;
    detail::stamp_metadata(table, ctx);
    const char axis_name[3] = {'x', 'y', 'z'};
    table.columns.push_back(std::string("b_") + axis_name[sweep.axis] + "_t");
    const int dim = cfg.molecules[mol].spec.spin.dimension();
    for (int a = 1; a <= dim; ++a)
        table.columns.push_back("e" + std::to_string(a) + "_ghz");

    const std::vector<double> grid = detail::field_grid(sweep);
    table.rows.resize(grid.size());
    detail::parallel_rows(static_cast<int>(grid.size()), ctx.threads, [&](int k) {
        MoleculeSpec spec = cfg.molecules[mol].spec;
        spec.b_field[sweep.axis] = grid[k];
        const MoleculeEigensystem eig = diagonalize_molecule(molecule_hamiltonian(spec));
        std::vector<double> row{grid[k]};
        for (int a = 0; a < dim; ++a)
            row.push_back(eig.energies(a));
        table.rows[k] = std::move(row);
    });
    return table;
}

// Flattened raw pair-coupling tensor (1-based level labels, exact zeros kept).
inline ResultTable cmd_tensor(const RunContext& ctx) {
    const detail::PipelineResult p = detail::run_pipeline(ctx.config, ctx.force);
    ResultTable table;
    detail::stamp_metadata(table, ctx);
    table.columns = {"i", "j", "alpha1", "alpha2", "beta1", "beta2", "re_j_ghz", "im_j_ghz"};
    for (const auto& [key, tensor] : p.terms.j_tensor) {
        const auto [i, j] = key;
        for (int a1 = 0; a1 < tensor.alpha_dim(); ++a1)
            for (int a2 = 0; a2 < tensor.alpha_dim(); ++a2)
                for (int b1 = 0; b1 < tensor.beta_dim(); ++b1)
                    for (int b2 = 0; b2 < tensor.beta_dim(); ++b2) {
                        const Complex v = tensor(a1, a2, b1, b2);
                        table.add_row({double(i + 1), double(j + 1), double(a1 + 1),
                                       double(a2 + 1), double(b1 + 1), double(b2 + 1),
                                       v.real(), v.imag()});
                    }
    }
    return table;
}

// Physical resonant transitions with detunings, couplings and time estimates.
inline ResultTable cmd_resonances(const RunContext& ctx) {
    const detail::PipelineResult p = detail::run_pipeline(ctx.config, ctx.force);
    ResultTable table;
    detail::stamp_metadata(table, ctx);
    table.columns = {"i",  "j",  "alpha1", "alpha2",        "beta1",
                     "beta2", "detuning_ghz", "re_v_ghz", "im_v_ghz", "abs_v_ghz",
                     "t_estimate_s"};
    for (const TransitionPair& pair : physical_transitions(p.set)) {
        const double v = std::abs(pair.coupling);
        table.add_row({double(pair.i + 1), double(pair.j + 1), double(pair.alpha[0] + 1),
                       double(pair.alpha[1] + 1), double(pair.beta[0] + 1),
                       double(pair.beta[1] + 1), pair.detuning, pair.coupling.real(),
                       pair.coupling.imag(), v,
                       internal_to_seconds(std::numbers::pi / (2.0 * v))});
    }
    return table;
}

// U0 probability trace, optionally alongside the exact effective-model and the
// exact full spin-cavity references.
inline ResultTable cmd_evolve(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.config;
    if (!cfg.dynamics)
        throw ConfigError("evolve: the config needs a 'dynamics' block");
    const DynamicsConfig& dyn = *cfg.dynamics;
    const detail::PipelineResult p = detail::run_pipeline(cfg, ctx.force);
    const std::vector<int> dims = p.dressed.dimensions();

    const std::vector<double> times = detail::time_grid(dyn.t_max, dyn.n_points);
    const Matrix h_sec = secular_generator(p.set, dims);
    const ProbabilityTrace trace =
        u0_probability_trace(p.dressed, h_sec, dyn.initial, dyn.final, times);

    ResultTable table;
    detail::stamp_metadata(table, ctx);
    table.columns = {"t_s", "p_u0"};

    std::vector<double> p_eff, p_full;
    if (dyn.exact_effective) {
        table.columns.push_back("p_exact_effective");
        Eigen::Index total = 1;
        for (int d : dims)
            total *= d;
        Matrix h_eff = Matrix(dressed_free_diagonal(p.dressed).cast<Complex>().asDiagonal());
        for (const auto& [key, tensor] : p.dressed.interaction) {
            const auto [i, j] = key;
            for (int a1 = 0; a1 < tensor.alpha_dim(); ++a1)
                for (int a2 = 0; a2 < tensor.alpha_dim(); ++a2)
                    for (int b1 = 0; b1 < tensor.beta_dim(); ++b1)
                        for (int b2 = 0; b2 < tensor.beta_dim(); ++b2) {
                            std::vector<Matrix> ops(dims.size());
                            ops[i] = Matrix::Zero(dims[i], dims[i]);
                            ops[i](a1, a2) = 1.0;
                            ops[j] = Matrix::Zero(dims[j], dims[j]);
                            ops[j](b1, b2) = 1.0;
                            h_eff += tensor(a1, a2, b1, b2) * embed_product(ops, dims);
                        }
        }
        Vector initial = Vector::Zero(total);
        initial(product_index(dyn.initial, dims)) = 1.0;
        const auto states = exact_evolution(h_eff, initial, times);
        const Eigen::Index row = product_index(dyn.final, dims);
        for (const Vector& psi : states)
            p_eff.push_back(std::norm(psi(row)));
    }
    if (dyn.exact_full) {
        table.columns.push_back("p_exact_full");
        CavitySpec cavity = cfg.cavity;
        cavity.fock_cutoff = cfg.fock_cutoff();
        const Matrix h_full = full_model_hamiltonian(cfg.molecules, cavity);
        const int npho = cavity.fock_cutoff + 1;
        Vector vac = Vector::Zero(npho);
        vac(0) = 1.0;
        Vector spin_i = Vector::Ones(1), spin_f = Vector::Ones(1);
        for (std::size_t m = 0; m < cfg.molecules.size(); ++m) {
            spin_i = kron(Matrix(spin_i), Matrix(eigenstate_vector(p.eigs[m], dyn.initial[m])));
            spin_f = kron(Matrix(spin_f), Matrix(eigenstate_vector(p.eigs[m], dyn.final[m])));
        }
        const Vector initial = kron(Matrix(vac), Matrix(spin_i));
        const Vector final_state = kron(Matrix(vac), Matrix(spin_f));
        const auto states = exact_evolution(h_full, initial, times);
        for (const Vector& psi : states)
            p_full.push_back(std::norm(final_state.dot(psi)));
    }

    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<double> row{times[k], trace.values[k]};
        if (!p_eff.empty())
            row.push_back(p_eff[k]);
        if (!p_full.empty())
            row.push_back(p_full[k]);
        table.add_row(std::move(row));
    }
    return table;
}

// Gate reports for every physical resonant transition (or the one selected by
// the dynamics block).
inline ResultTable cmd_gate(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.config;
    const detail::PipelineResult p = detail::run_pipeline(cfg, ctx.force);
    const std::vector<int> dims = p.dressed.dimensions();

    std::vector<TransitionPair> targets = physical_transitions(p.set);
    if (cfg.dynamics && !cfg.dynamics->initial.empty()) {
        const DynamicsConfig& dyn = *cfg.dynamics;
        std::vector<TransitionPair> filtered;
        for (const TransitionPair& t : targets) {
            std::vector<int> from(dims.size(), -1), to(dims.size(), -1);
            for (std::size_t m = 0; m < dims.size(); ++m)
                from[m] = to[m] = dyn.initial[m];
            from[t.i] = t.alpha[1];
            from[t.j] = t.beta[1];
            to[t.i] = t.alpha[0];
            to[t.j] = t.beta[0];
            const bool forward = from == dyn.initial && to == dyn.final;
            const bool backward = from == dyn.final && to == dyn.initial;
            if (forward || backward)
                filtered.push_back(t);
        }
        targets = filtered;
    }

    ResultTable table;
    detail::stamp_metadata(table, ctx);
    table.columns = {"i", "j", "alpha1", "alpha2", "beta1", "beta2",
                     "v_eff_ghz", "t_estimate_s", "t_peak_s", "peak_probability",
                     "peak_found", "iswap_like", "offdiag_phase_rad"};
    const int n_points = cfg.dynamics ? cfg.dynamics->n_points : 2000;
    table.rows.resize(targets.size());
    detail::parallel_rows(static_cast<int>(targets.size()), ctx.threads, [&](int k) {
        const TransitionPair& t = targets[k];
        const double v = std::abs(t.coupling);
        const double window = internal_to_seconds(1.5 * std::numbers::pi / (2.0 * v));
        const std::vector<double> times = detail::time_grid(window, n_points);
        const GateReport report = gate_report(t, p.dressed, p.set, times);
        table.rows[k] = {double(t.i + 1), double(t.j + 1), double(t.alpha[0] + 1),
                         double(t.alpha[1] + 1), double(t.beta[0] + 1),
                         double(t.beta[1] + 1), report.v_eff, report.estimated_time,
                         report.peak_found ? report.measured_peak_time : -1.0,
                         report.peak_probability, report.peak_found ? 1.0 : 0.0,
                         report.iswap_like ? 1.0 : 0.0, report.off_diagonal_phase};
    });
    return table;
}

// Resonance count and fastest gate estimate across a field sweep.
inline ResultTable cmd_sweep(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.config;
    if (!cfg.sweep)
        throw ConfigError("sweep: the config needs a 'sweep' block");
    const SweepConfig& sweep = *cfg.sweep;
    const std::vector<double> grid = detail::field_grid(sweep);

    ResultTable table;
    detail::stamp_metadata(table, ctx);
    const char axis_name[3] = {'x', 'y', 'z'};
    table.columns = {std::string("b_") + axis_name[sweep.axis] + "_t", "n_resonant",
                     "margin", "best_v_ghz", "best_gate_time_s"};
    table.rows.resize(grid.size());
    detail::parallel_rows(static_cast<int>(grid.size()), ctx.threads, [&](int k) {
        const ExperimentConfig local = detail::at_field(cfg, sweep, grid[k]);
        const detail::PipelineResult p = detail::run_pipeline(local, ctx.force);
        double best_v = 0.0;
        for (const TransitionPair& t : p.set.pairs)
            best_v = std::max(best_v, std::abs(t.coupling));
        const double best_time =
            best_v > 0.0 ? internal_to_seconds(std::numbers::pi / (2.0 * best_v))
                         : std::numeric_limits<double>::infinity();
        table.rows[k] = {grid[k], double(physical_transition_count(p.set)), p.margin,
                        best_v, best_time};
    });
    return table;
}

}  // namespace spincavity
