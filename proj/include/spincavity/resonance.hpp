// resonance.hpp — secular (resonant) transition search, the secular generator
// for the renormalized propagator, and the analytic qutrit resonance oracle.

#pragma once

#include "spincavity/effective.hpp"
#include "spincavity/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace spincavity {

struct TransitionPair {
    int i = 0, j = 1;             // molecule indices, i < j
    std::array<int, 2> alpha{0, 0};  // (a1, a2) level pair on molecule i
    std::array<int, 2> beta{0, 0};   // (b1, b2) level pair on molecule j
    double detuning = 0.0;        // E_{i,abar} + E_{j,bbar} (GHz)
    Complex coupling = 0.0;       // dressed V value (GHz)
    bool quasi = false;           // matched via the physical |detuning| < f|V| rule

    std::tuple<int, int, int, int, int, int> key() const {
        return {i, j, alpha[0], alpha[1], beta[0], beta[1]};
    }
    std::tuple<int, int, int, int, int, int> conjugate_key() const {
        return {i, j, alpha[1], alpha[0], beta[1], beta[0]};
    }
    bool canonical() const { return key() <= conjugate_key(); }
};

struct ResonanceOptions {
    double tolerance = 1e-9;       // GHz; strict secular condition
    double coupling_floor = 1e-9;  // GHz; treat couplings below this as zero
    bool physical_mode = false;    // also flag |detuning| < factor * |coupling|
    double physical_factor = 1.0;
};

struct ResonantSet {
    std::vector<TransitionPair> pairs;          // closed under conjugation, i < j
    std::vector<TransitionPair> static_shifts;  // fully diagonal (a1==a2, b1==b2) terms
    double tolerance = 1e-9;
    double coupling_floor = 1e-9;
};

inline ResonantSet find_resonances(const DressedSpectrum& dressed,
                                   const ResonanceOptions& opts = {}) {
    if (!(opts.tolerance > 0.0))
        throw std::invalid_argument("find_resonances: tolerance must be positive");
    ResonantSet out;
    out.tolerance = opts.tolerance;
    out.coupling_floor = opts.coupling_floor;

    const int n = dressed.molecule_count();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const PairTensor& v = dressed.v(i, j);
            const RealVector& ei = dressed.energies[i];
            const RealVector& ej = dressed.energies[j];
            for (int a1 = 0; a1 < v.alpha_dim(); ++a1)
                for (int a2 = 0; a2 < v.alpha_dim(); ++a2)
                    for (int b1 = 0; b1 < v.beta_dim(); ++b1)
                        for (int b2 = 0; b2 < v.beta_dim(); ++b2) {
                            TransitionPair p;
                            p.i = i;
                            p.j = j;
                            p.alpha = {a1, a2};
                            p.beta = {b1, b2};
                            p.detuning = (ei(a1) - ei(a2)) + (ej(b1) - ej(b2));
                            p.coupling = v(a1, a2, b1, b2);
                            if (std::abs(p.coupling) <= opts.coupling_floor)
                                continue;
                            bool secular = std::abs(p.detuning) <= opts.tolerance;
                            if (!secular && opts.physical_mode &&
                                std::abs(p.detuning) <
                                    opts.physical_factor * std::abs(p.coupling)) {
                                secular = true;
                                p.quasi = true;
                            }
                            if (!secular)
                                continue;
                            if (a1 == a2 && b1 == b2)
                                out.static_shifts.push_back(p);
                            else
                                out.pairs.push_back(p);
                        }
        }
    }
    return out;
}

inline ResonantSet find_resonances(const DressedSpectrum& dressed, double tol,
                                   double coupling_floor) {
    ResonanceOptions opts;
    opts.tolerance = tol;
    opts.coupling_floor = coupling_floor;
    return find_resonances(dressed, opts);
}

// Unordered physical transitions: conjugate partners count once.
inline std::size_t physical_transition_count(const ResonantSet& set) {
    std::set<std::tuple<int, int, int, int, int, int>> keys;
    for (const TransitionPair& p : set.pairs)
        keys.insert(std::min(p.key(), p.conjugate_key()));
    return keys.size();
}

// Canonical (lexicographically smaller) representative of each conjugate pair.
inline std::vector<TransitionPair> physical_transitions(const ResonantSet& set) {
    std::vector<TransitionPair> out;
    for (const TransitionPair& p : set.pairs)
        if (p.canonical())
            out.push_back(p);
    return out;
}

// H_sec = sum over the set of V X_i^{abar} X_j^{bbar}, on the spin product space.
// Static-shift terms with couplings above the floor participate as well.
inline Matrix secular_generator(const ResonantSet& set, const std::vector<int>& dims) {
    Eigen::Index total = 1;
    for (int d : dims)
        total *= d;
    Matrix h = Matrix::Zero(total, total);
    auto add = [&](const TransitionPair& p) {
        std::vector<Matrix> ops(dims.size());
        ops[p.i] = Matrix::Zero(dims[p.i], dims[p.i]);
        ops[p.i](p.alpha[0], p.alpha[1]) = 1.0;
        ops[p.j] = Matrix::Zero(dims[p.j], dims[p.j]);
        ops[p.j](p.beta[0], p.beta[1]) = 1.0;
        h += p.coupling * embed_product(ops, dims);
    };
    for (const TransitionPair& p : set.pairs)
        add(p);
    for (const TransitionPair& p : set.static_shifts)
        add(p);
    const double scale = std::max(1.0, h.norm());
    if (hermiticity_error(h) > 1e-12 * scale)
        throw std::invalid_argument("secular_generator: resonant set is not closed under "
                                    "conjugation (non-Hermitian generator)");
    return h;
}

// Analytic resonance families for the S=1 toy model with quadratic longitudinal
// anisotropy: operators X_L^{M_L, M_L+a} X_R^{M_R, M_R+b} with a,b = ±1.
struct QutritResonanceFamily {
    int a = 1, b = 1;
    bool independent_of_m = false;              // D = 0 branch: condition holds for all M
    std::vector<std::pair<int, int>> m_pairs;   // admissible (M_L, M_R)
};

inline std::vector<QutritResonanceFamily> qutrit_resonance_conditions(double d_coeff,
                                                                      double delta_l,
                                                                      double delta_r,
                                                                      double tol = 1e-9) {
    constexpr int s = 1;
    std::vector<QutritResonanceFamily> out;
    for (int a : {+1, -1}) {
        for (int b : {+1, -1}) {
            QutritResonanceFamily fam;
            fam.a = a;
            fam.b = b;
            if (std::abs(d_coeff) > tol) {
                if (a == b) {
                    // M_L + M_R = -(delta_L + delta_R)/(2D) - b
                    const double rhs = -(delta_l + delta_r) / (2.0 * d_coeff) - b;
                    for (int ml = -s; ml <= s; ++ml) {
                        const double mr = rhs - ml;
                        const int mri = static_cast<int>(std::lround(mr));
                        if (std::abs(mr - mri) > 1e-7)
                            continue;
                        if (mri < -s || mri > s || ml + a < -s || ml + a > s ||
                            mri + b < -s || mri + b > s)
                            continue;
                        fam.m_pairs.emplace_back(ml, mri);
                    }
                } else {
                    // M_L - M_R = -(delta_L - delta_R)/(2D) + b
                    const double rhs = -(delta_l - delta_r) / (2.0 * d_coeff) + b;
                    for (int mr = -s; mr <= s; ++mr) {
                        const double ml = rhs + mr;
                        const int mli = static_cast<int>(std::lround(ml));
                        if (std::abs(ml - mli) > 1e-7)
                            continue;
                        if (mli < -s || mli > s || mli + a < -s || mli + a > s ||
                            mr + b < -s || mr + b > s)
                            continue;
                        fam.m_pairs.emplace_back(mli, mr);
                    }
                }
            } else {
                // equally spaced levels: delta_L a = -delta_R b, independent of M
                if (std::abs(delta_l * a + delta_r * b) <= tol) {
                    fam.independent_of_m = true;
                    for (int ml = -s; ml <= s; ++ml)
                        for (int mr = -s; mr <= s; ++mr) {
                            if (ml + a < -s || ml + a > s || mr + b < -s || mr + b > s)
                                continue;
                            fam.m_pairs.emplace_back(ml, mr);
                        }
                }
            }
            if (!fam.m_pairs.empty())
                out.push_back(std::move(fam));
        }
    }
    return out;
}

}  // namespace spincavity
