// dynamics.hpp — renormalized multiple-scales propagator U0, the first-order
// non-secular correction U1, exact reference evolutions, probability traces and
// gate identification.
//
// All Hamiltonians are time independent, so every evolution is evaluated from a
// single eigendecomposition; there is no time stepping anywhere.  Public times
// are in seconds, phases are accumulated as E[GHz] * t[ns].

#pragma once

#include "spincavity/constants.hpp"
#include "spincavity/effective.hpp"
#include "spincavity/linalg.hpp"
#include "spincavity/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace spincavity {

struct Propagator {
    std::vector<double> times;     // seconds
    std::vector<Matrix> matrices;  // unitary, one per time
};

struct PropagatorCorrection {
    std::vector<double> times;     // seconds
    std::vector<Matrix> matrices;  // additive first-order corrections (not unitary)
};

struct ProbabilityTrace {
    std::vector<double> times;  // seconds
    std::vector<double> values;
    std::vector<int> initial;   // per-molecule dressed level labels
    std::vector<int> final;
};

inline Eigen::Index product_index(const std::vector<int>& labels, const std::vector<int>& dims) {
    if (labels.size() != dims.size())
        throw std::invalid_argument("product_index: label count does not match molecule count");
    Eigen::Index idx = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (labels[k] < 0 || labels[k] >= dims[k])
            throw std::invalid_argument("product_index: level label out of range");
        idx = idx * dims[k] + labels[k];
    }
    return idx;
}

// Diagonal of the dressed free Hamiltonian on the spin product space.
inline RealVector dressed_free_diagonal(const DressedSpectrum& dressed) {
    const std::vector<int> dims = dressed.dimensions();
    Eigen::Index total = 1;
    for (int d : dims)
        total *= d;
    RealVector diag = RealVector::Zero(total);
    for (Eigen::Index idx = 0; idx < total; ++idx) {
        Eigen::Index rest = idx;
        for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
            const int level = static_cast<int>(rest % dims[k]);
            rest /= dims[k];
            diag(idx) += dressed.energies[k](level);
        }
    }
    return diag;
}

// U0(t) = exp(-i t H0_dressed) exp(-i t H_sec), both scales evaluated at the
// physical time (epsilon -> 1, tau0 = tau1 = t).
inline Propagator evolve_u0(const DressedSpectrum& dressed, const Matrix& h_sec,
                            std::span<const double> times_s) {
    const RealVector h0 = dressed_free_diagonal(dressed);
    if (h_sec.rows() != h0.size() || h_sec.cols() != h0.size())
        throw std::invalid_argument("evolve_u0: generator dimension mismatch");
    if (hermiticity_error(h_sec) > 1e-12 * std::max(1.0, h_sec.norm()))
        throw std::invalid_argument("evolve_u0: secular generator must be Hermitian");
    const HermitianEigen sec(h_sec);

    Propagator out;
    for (double ts : times_s) {
        const double t = seconds_to_internal(ts);
        Matrix u = sec.unitary(t);
        for (Eigen::Index r = 0; r < h0.size(); ++r)
            u.row(r) *= std::exp(Complex(0.0, -h0(r) * t));
        out.times.push_back(ts);
        out.matrices.push_back(std::move(u));
    }
    return out;
}

namespace detail {

struct NonSecularTerm {
    Eigen::Index row, col;   // maps |...a2...b2...> to |...a1...b1...>
    Complex coupling;
    double e_top, e_bottom;  // E_{a1}+E_{b1} and E_{a2}+E_{b2}
    double detuning;
};

// Expand the non-secular part of the dressed interaction into product-space
// matrix entries, one per spectator configuration.
inline std::vector<NonSecularTerm> non_secular_terms(const DressedSpectrum& dressed,
                                                     const ResonantSet& set) {
    std::set<std::tuple<int, int, int, int, int, int>> secular_keys;
    for (const TransitionPair& p : set.pairs)
        secular_keys.insert(p.key());
    for (const TransitionPair& p : set.static_shifts)
        secular_keys.insert(p.key());

    const std::vector<int> dims = dressed.dimensions();
    const int n = dressed.molecule_count();
    std::vector<NonSecularTerm> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const PairTensor& v = dressed.v(i, j);
            for (int a1 = 0; a1 < v.alpha_dim(); ++a1)
                for (int a2 = 0; a2 < v.alpha_dim(); ++a2)
                    for (int b1 = 0; b1 < v.beta_dim(); ++b1)
                        for (int b2 = 0; b2 < v.beta_dim(); ++b2) {
                            if (a1 == a2 && b1 == b2)
                                continue;
                            const Complex val = v(a1, a2, b1, b2);
                            if (std::abs(val) <= set.coupling_floor)
                                continue;
                            if (secular_keys.count({i, j, a1, a2, b1, b2}))
                                continue;
                            const double det =
                                (dressed.energies[i](a1) - dressed.energies[i](a2)) +
                                (dressed.energies[j](b1) - dressed.energies[j](b2));
                            if (std::abs(det) <= set.tolerance)
                                throw std::runtime_error(
                                    "evolve_u1: non-secular sum hit a zero detuning on "
                                    "molecules (" + std::to_string(i) + "," +
                                    std::to_string(j) + "); the transition belongs in the "
                                    "resonant set");
                            const double etop =
                                dressed.energies[i](a1) + dressed.energies[j](b1);
                            const double ebot =
                                dressed.energies[i](a2) + dressed.energies[j](b2);
                            std::vector<int> spect(dims.size(), 0);
                            while (true) {
                                std::vector<int> lr = spect, lc = spect;
                                lr[i] = a1; lr[j] = b1;
                                lc[i] = a2; lc[j] = b2;
                                out.push_back({product_index(lr, dims),
                                               product_index(lc, dims), val, etop, ebot, det});
                                int k = static_cast<int>(dims.size()) - 1;
                                for (; k >= 0; --k) {
                                    if (k == i || k == j)
                                        continue;
                                    if (++spect[k] < dims[k])
                                        break;
                                    spect[k] = 0;
                                }
                                if (k < 0)
                                    break;
                            }
                        }
        }
    }
    return out;
}

}  // namespace detail

// First-order multiple-scales correction
//   U1(t) = sum_{non-secular} V^{ab} K_{ab}(t) X_i^{abar} X_j^{bbar} u0(t),
//   K_{ab}(t) = [e^{-i(E_{a1}+E_{b1})t} - e^{-i(E_{a2}+E_{b2})t}] / (E_{abar}+E_{bbar}),
// bounded in operator norm by sum 2|V|/|detuning| uniformly in t.  Couplings at
// or below the set's floor are treated as exactly zero; a surviving term with
// |detuning| <= tolerance indicates a misclassified resonance and is an error.
inline PropagatorCorrection evolve_u1(const DressedSpectrum& dressed, const ResonantSet& set,
                                      std::span<const double> times_s) {
    const std::vector<int> dims = dressed.dimensions();
    Eigen::Index total = 1;
    for (int d : dims)
        total *= d;
    const std::vector<detail::NonSecularTerm> terms = detail::non_secular_terms(dressed, set);
    const HermitianEigen sec(secular_generator(set, dims));

    PropagatorCorrection out;
    for (double ts : times_s) {
        const double t = seconds_to_internal(ts);
        Matrix m = Matrix::Zero(total, total);
        for (const detail::NonSecularTerm& term : terms)
            m(term.row, term.col) += term.coupling *
                                     (std::exp(Complex(0.0, -term.e_top * t)) -
                                      std::exp(Complex(0.0, -term.e_bottom * t))) /
                                     term.detuning;
        out.times.push_back(ts);
        out.matrices.push_back(m * sec.unitary(t));
    }
    return out;
}

// Analytic uniform-in-time bound on ||U1||.
inline double u1_norm_bound(const DressedSpectrum& dressed, const ResonantSet& set) {
    double bound = 0.0;
    std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
    for (const detail::NonSecularTerm& term : detail::non_secular_terms(dressed, set)) {
        // count each tensor component once, not once per spectator configuration
        if (!seen.insert({term.row, term.col}).second)
            continue;
        bound += 2.0 * std::abs(term.coupling) / std::abs(term.detuning);
    }
    return bound;
}

// |psi(t)> = U exp(-i diag(E) t) U† |psi(0)> from one eigendecomposition.
inline std::vector<Vector> exact_evolution(const Matrix& h, const Vector& initial,
                                           std::span<const double> times_s) {
    if (h.rows() != initial.size())
        throw std::invalid_argument("exact_evolution: state dimension mismatch");
    if (hermiticity_error(h) > 1e-10 * std::max(1.0, h.norm()))
        throw std::invalid_argument("exact_evolution: Hamiltonian must be Hermitian");
    const HermitianEigen eig(h);
    const Vector coeffs = eig.vectors.adjoint() * initial;
    std::vector<Vector> out;
    out.reserve(times_s.size());
    for (double ts : times_s) {
        const double t = seconds_to_internal(ts);
        Vector phased(coeffs.size());
        for (Eigen::Index k = 0; k < coeffs.size(); ++k)
            phased(k) = coeffs(k) * std::exp(Complex(0.0, -eig.values(k) * t));
        out.push_back(eig.vectors * phased);
    }
    return out;
}

// P(t) = |<final| U(t) |initial>|^2 on the dressed product basis.
inline ProbabilityTrace transition_probability(const Propagator& prop,
                                               const std::vector<int>& initial,
                                               const std::vector<int>& final_,
                                               const std::vector<int>& dims) {
    const Eigen::Index col = product_index(initial, dims);
    const Eigen::Index row = product_index(final_, dims);
    ProbabilityTrace out;
    out.times = prop.times;
    out.initial = initial;
    out.final = final_;
    for (const Matrix& u : prop.matrices)
        out.values.push_back(std::norm(u(row, col)));
    return out;
}

// U0 probability trace evaluated element-wise from the eigendecomposition,
// without materializing the propagator (O(dim) per sample).
inline ProbabilityTrace u0_probability_trace(const DressedSpectrum& dressed,
                                             const Matrix& h_sec,
                                             const std::vector<int>& initial,
                                             const std::vector<int>& final_,
                                             std::span<const double> times_s) {
    const std::vector<int> dims = dressed.dimensions();
    const Eigen::Index col = product_index(initial, dims);
    const Eigen::Index row = product_index(final_, dims);
    const RealVector h0 = dressed_free_diagonal(dressed);
    const HermitianEigen sec(h_sec);

    ProbabilityTrace out;
    out.initial = initial;
    out.final = final_;
    Vector weights(sec.values.size());
    for (Eigen::Index k = 0; k < weights.size(); ++k)
        weights(k) = sec.vectors(row, k) * std::conj(sec.vectors(col, k));
    for (double ts : times_s) {
        const double t = seconds_to_internal(ts);
        out.times.push_back(ts);
        if (t == 0.0) {  // U0(0) is the identity exactly
            out.values.push_back(row == col ? 1.0 : 0.0);
            continue;
        }
        Complex amp = 0.0;
        for (Eigen::Index k = 0; k < weights.size(); ++k)
            amp += weights(k) * std::exp(Complex(0.0, -sec.values(k) * t));
        out.values.push_back(std::norm(amp));
    }
    return out;
}

// P(t) = |<final|psi(t)>|^2 for a state trajectory.
inline ProbabilityTrace transition_probability(std::span<const double> times_s,
                                               const std::vector<Vector>& states,
                                               const Vector& final_state) {
    if (times_s.size() != states.size())
        throw std::invalid_argument("transition_probability: time/state count mismatch");
    ProbabilityTrace out;
    out.times.assign(times_s.begin(), times_s.end());
    for (const Vector& psi : states)
        out.values.push_back(std::norm(final_state.dot(psi)));
    return out;
}

struct GateReport {
    TransitionPair transition;
    double v_eff = 0.0;               // |coefficient| of the resonant 2x2 block (GHz)
    double estimated_time = 0.0;      // pi / (2 v_eff), seconds
    double measured_peak_time = 0.0;  // seconds
    double peak_probability = 0.0;
    bool peak_found = false;
    bool iswap_like = false;
    double off_diagonal_phase = 0.0;  // arg of the block coupling
};

namespace detail {

// Matrix element <row| U0(t) |col> evaluated per time in O(dim).
class U0Element {
  public:
    U0Element(const RealVector& h0, const HermitianEigen& sec, Eigen::Index row,
              Eigen::Index col)
        : sec_(sec), phase0_(h0(row)) {
        weights_ = Vector(sec.values.size());
        for (Eigen::Index k = 0; k < weights_.size(); ++k)
            weights_(k) = sec.vectors(row, k) * std::conj(sec.vectors(col, k));
    }

    Complex operator()(double t_internal) const {
        Complex acc = 0.0;
        for (Eigen::Index k = 0; k < weights_.size(); ++k)
            acc += weights_(k) * std::exp(Complex(0.0, -sec_.values(k) * t_internal));
        return acc * std::exp(Complex(0.0, -phase0_ * t_internal));
    }

  private:
    const HermitianEigen& sec_;
    double phase0_;
    Vector weights_;
};

inline double parabolic_peak(double tm, double t0, double tp, double pm, double p0, double pp) {
    const double denom = pm - 2.0 * p0 + pp;
    if (std::abs(denom) < 1e-300)
        return t0;
    const double shift = 0.5 * (pm - pp) / denom;
    return t0 + std::clamp(shift, -1.0, 1.0) * 0.5 * (tp - tm);
}

}  // namespace detail

// Gate characterization for one entry of a resonant set.  The time estimate is
// pi/(2 |V_eff|) with V_eff the coefficient of the transition's 2x2 block in the
// secular generator; the measured peak comes from the U0 probability trace over
// the supplied window, refined locally around the first maximum.
inline GateReport gate_report(const TransitionPair& entry, const DressedSpectrum& dressed,
                              const ResonantSet& set, std::span<const double> times_s) {
    const std::vector<int> dims = dressed.dimensions();
    const Matrix h_sec = secular_generator(set, dims);

    std::vector<int> from(dims.size(), 0), to(dims.size(), 0);
    from[entry.i] = entry.alpha[1];
    from[entry.j] = entry.beta[1];
    to[entry.i] = entry.alpha[0];
    to[entry.j] = entry.beta[0];
    const Eigen::Index col = product_index(from, dims);
    const Eigen::Index row = product_index(to, dims);

    GateReport report;
    report.transition = entry;
    const Complex block = h_sec(row, col);
    report.v_eff = std::abs(block);
    report.off_diagonal_phase = report.v_eff > 0.0 ? std::arg(block) : 0.0;
    report.estimated_time = report.v_eff > 0.0
                                ? internal_to_seconds(std::numbers::pi / (2.0 * report.v_eff))
                                : std::numeric_limits<double>::infinity();

    const RealVector h0 = dressed_free_diagonal(dressed);
    const HermitianEigen sec(h_sec);
    detail::U0Element amp(h0, sec, row, col);

    std::vector<double> probs;
    probs.reserve(times_s.size());
    for (double ts : times_s)
        probs.push_back(std::norm(amp(seconds_to_internal(ts))));
    double global_max = 0.0;
    for (double p : probs)
        global_max = std::max(global_max, p);
    std::size_t peak_idx = 0;
    for (std::size_t k = 1; k + 1 < probs.size(); ++k) {
        if (probs[k] >= probs[k - 1] && probs[k] >= probs[k + 1] &&
            probs[k] >= 0.5 * global_max) {
            peak_idx = k;
            break;
        }
    }
    if (peak_idx == 0)
        return report;  // peak flagged absent

    double lo = times_s[peak_idx - 1], hi = times_s[peak_idx + 1];
    constexpr int kRefine = 64;
    std::vector<double> ft(kRefine), fp(kRefine);
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < kRefine; ++k) {
            ft[k] = lo + (hi - lo) * k / (kRefine - 1);
            fp[k] = std::norm(amp(seconds_to_internal(ft[k])));
        }
        std::size_t best =
            std::distance(fp.begin(), std::max_element(fp.begin(), fp.end()));
        best = std::clamp<std::size_t>(best, 1, kRefine - 2);
        report.measured_peak_time = detail::parabolic_peak(
            ft[best - 1], ft[best], ft[best + 1], fp[best - 1], fp[best], fp[best + 1]);
        report.peak_probability = std::norm(amp(seconds_to_internal(report.measured_peak_time)));
        lo = ft[best - 1];
        hi = ft[best + 1];
    }
    report.peak_found = true;

    // iSWAP classification: with the exact free phases stripped, the block of U0
    // must equal [[cos, -i e^{-i phi} sin], [-i e^{i phi} sin, cos]] in the
    // (from, to) basis with phi = arg(V_eff), at sampled rotation angles.
    if (report.v_eff > 0.0) {
        detail::U0Element acc_cc(h0, sec, col, col);
        detail::U0Element acc_rr(h0, sec, row, row);
        detail::U0Element acc_rc(h0, sec, row, col);
        detail::U0Element acc_cr(h0, sec, col, row);
        const Complex phase(std::cos(report.off_diagonal_phase),
                            std::sin(report.off_diagonal_phase));
        bool ok = true;
        for (double theta : {std::numbers::pi / 6.0, std::numbers::pi / 4.0,
                             std::numbers::pi / 3.0}) {
            const double t = theta / report.v_eff;
            const Complex strip_c = std::exp(Complex(0.0, h0(col) * t));
            const Complex strip_r = std::exp(Complex(0.0, h0(row) * t));
            const Complex c0 = acc_cc(t) * strip_c;
            const Complex c1 = acc_rr(t) * strip_r;
            const Complex s_rc = acc_rc(t) * strip_r;
            const Complex s_cr = acc_cr(t) * strip_c;
            ok = ok && std::abs(c0 - std::cos(theta)) < 1e-6 &&
                 std::abs(c1 - std::cos(theta)) < 1e-6 &&
                 std::abs(s_rc - Complex(0.0, -1.0) * phase * std::sin(theta)) < 1e-6 &&
                 std::abs(s_cr - Complex(0.0, -1.0) * std::conj(phase) * std::sin(theta)) < 1e-6;
            if (!ok)
                break;
        }
        report.iswap_like = ok;
    }
    return report;
}

}  // namespace spincavity
