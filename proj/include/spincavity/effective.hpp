// effective.hpp — Schrieffer-Wolff coefficient tensors, photon trace, and the
// photon-dressed spin spectrum and interaction.
//
// Index conventions for the pair coupling follow the effective-Hamiltonian term
//   sum_{i, j != i} sum_{abar, bbar} J_{i,j}^{abar,bbar} X_i^{bbar} X_j^{abar},
// i.e. in the raw tensor J(i,j) the alpha pair lives on molecule j and the beta
// pair on molecule i, and the denominator involves molecule j's transition.
// The symmetrized accessor used by the dynamics re-keys to the coefficient of
// X_i^{abar} X_j^{bbar}:  V_{i,j}^{abar,bbar} = J_{i,j}^{bbar,abar} + J_{j,i}^{abar,bbar}.

#pragma once

#include "spincavity/coupling.hpp"
#include "spincavity/errors.hpp"
#include "spincavity/linalg.hpp"
#include "spincavity/spin.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spincavity {

// Rank-4 coefficient tensor over ((a1,a2),(b1,b2)) level pairs.
class PairTensor {
  public:
    PairTensor() = default;
    PairTensor(int alpha_dim, int beta_dim)
        : da_(alpha_dim), db_(beta_dim),
          data_(static_cast<std::size_t>(alpha_dim) * alpha_dim * beta_dim * beta_dim) {}

    int alpha_dim() const { return da_; }
    int beta_dim() const { return db_; }

    Complex& operator()(int a1, int a2, int b1, int b2) {
        return data_[index(a1, a2, b1, b2)];
    }
    const Complex& operator()(int a1, int a2, int b1, int b2) const {
        return data_[index(a1, a2, b1, b2)];
    }

  private:
    std::size_t index(int a1, int a2, int b1, int b2) const {
        return ((static_cast<std::size_t>(a1) * da_ + a2) * db_ + b1) * db_ + b2;
    }
    int da_ = 0, db_ = 0;
    std::vector<Complex> data_;
};

struct PhotonState {
    double p0 = 1.0;
    double p1 = 0.0;

    void validate() const {
        if (p0 < 0.0 || p1 < 0.0 || std::abs(p0 + p1 - 1.0) > 1e-12)
            throw std::invalid_argument("PhotonState: need p0,p1 >= 0 with p0+p1 = 1");
    }
    double mean_occupation() const { return p1; }
};

struct EffectiveTerms {
    std::vector<Matrix> delta_e;      // per molecule, Hermitian (GHz)
    std::vector<Matrix> delta_omega;  // per molecule, Hermitian (GHz)
    std::vector<Matrix> t_plus;       // per molecule, two-photon a†a† coefficients
    std::vector<Matrix> t_minus;      // per molecule, two-photon aa coefficients
    std::map<std::pair<int, int>, PairTensor> j_tensor;  // raw ordered-pair tensors

    int molecule_count() const { return static_cast<int>(delta_e.size()); }

    const PairTensor& j(int i, int j_) const { return j_tensor.at({i, j_}); }

    // Coefficient of X_i^{abar} X_j^{bbar} after summing both ordered pairs.
    PairTensor symmetrized(int i, int j_) const {
        const PairTensor& ij = j_tensor.at({i, j_});
        const PairTensor& ji = j_tensor.at({j_, i});
        const int di = ij.beta_dim();
        const int dj = ij.alpha_dim();
        PairTensor out(di, dj);
        for (int a1 = 0; a1 < di; ++a1)
            for (int a2 = 0; a2 < di; ++a2)
                for (int b1 = 0; b1 < dj; ++b1)
                    for (int b2 = 0; b2 < dj; ++b2)
                        out(a1, a2, b1, b2) = ij(b1, b2, a1, a2) + ji(a1, a2, b1, b2);
        return out;
    }
};

// min over molecules and transitions (a1 != a2) of ||E_{abar}| - Omega| / max|Lambda|.
// Values well above 1 indicate valid dispersive operation; +inf when all couplings vanish.
inline double dispersive_margin(const std::vector<MoleculeEigensystem>& eigs,
                                double omega,
                                const std::vector<LambdaTensor>& lambdas) {
    if (eigs.size() != lambdas.size())
        throw std::invalid_argument("dispersive_margin: molecule count mismatch");
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        const double lam_max = lambdas[i].entries.cwiseAbs().maxCoeff();
        if (lam_max == 0.0)
            continue;
        const int d = eigs[i].dimension();
        for (int a1 = 0; a1 < d; ++a1)
            for (int a2 = 0; a2 < d; ++a2) {
                if (a1 == a2)
                    continue;
                const double e = std::abs(eigs[i].energies(a1) - eigs[i].energies(a2));
                margin = std::min(margin, std::abs(e - omega) / lam_max);
            }
    }
    return margin;
}

// All second-order Schrieffer-Wolff coefficients.  Throws when a transition is
// near-resonant with the cavity (|{|E|} - Omega| below the denominator guard),
// where the expansion is invalid.
inline EffectiveTerms effective_terms(const std::vector<MoleculeEigensystem>& eigs,
                                      const std::vector<LambdaTensor>& lambdas,
                                      double omega,
                                      double denominator_guard = 1e-9) {
    if (eigs.size() != lambdas.size())
        throw std::invalid_argument("effective_terms: molecule count mismatch");
    const int n = static_cast<int>(eigs.size());

    for (int i = 0; i < n; ++i) {
        const int d = eigs[i].dimension();
        if (lambdas[i].dimension() != d)
            throw std::invalid_argument("effective_terms: tensor dimension mismatch");
        for (int a1 = 0; a1 < d; ++a1)
            for (int a2 = 0; a2 < d; ++a2) {
                if (a1 == a2)
                    continue;
                const double e = std::abs(eigs[i].energies(a1) - eigs[i].energies(a2));
                if (std::abs(e - omega) < denominator_guard)
                    throw PhysicsError(
                        "effective_terms: transition (" + std::to_string(a1 + 1) + "," +
                        std::to_string(a2 + 1) + ") of molecule " + std::to_string(i + 1) +
                        " is resonant with the cavity; the dispersive expansion is invalid");
            }
    }

    EffectiveTerms out;
    for (int i = 0; i < n; ++i) {
        const int d = eigs[i].dimension();
        const Matrix& lam = lambdas[i].entries;
        const RealVector& e = eigs[i].energies;
        Matrix de = Matrix::Zero(d, d);
        Matrix dw = Matrix::Zero(d, d);
        Matrix tp = Matrix::Zero(d, d);
        Matrix tm = Matrix::Zero(d, d);
        for (int a1 = 0; a1 < d; ++a1) {
            for (int a2 = 0; a2 < d; ++a2) {
                Complex se = 0.0, sw = 0.0, stp = 0.0, stm = 0.0;
                for (int b = 0; b < d; ++b) {
                    const Complex w = lam(a1, b) * lam(b, a2);
                    const double e1 = e(a1) - e(b);
                    const double e2 = e(a2) - e(b);
                    se += w * (1.0 / (e2 - omega) + 1.0 / (e1 - omega));
                    sw += w * (e1 / (e1 * e1 - omega * omega) + e2 / (e2 * e2 - omega * omega));
                    stp += w * (1.0 / (e1 + omega) + 1.0 / (e2 - omega));
                    stm += w * (1.0 / (e2 + omega) + 1.0 / (e1 - omega));
                }
                de(a1, a2) = 0.5 * se;
                dw(a1, a2) = sw;
                tp(a1, a2) = 0.5 * stp;
                tm(a1, a2) = 0.5 * stm;
            }
        }
        out.delta_e.push_back(std::move(de));
        out.delta_omega.push_back(std::move(dw));
        out.t_plus.push_back(std::move(tp));
        out.t_minus.push_back(std::move(tm));
    }

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const int di = eigs[i].dimension();
            const int dj = eigs[j].dimension();
            PairTensor t(dj, di);  // alpha on molecule j, beta on molecule i
            for (int a1 = 0; a1 < dj; ++a1)
                for (int a2 = 0; a2 < dj; ++a2) {
                    const double ej = eigs[j].energies(a1) - eigs[j].energies(a2);
                    const double den = ej * ej - omega * omega;
                    for (int b1 = 0; b1 < di; ++b1)
                        for (int b2 = 0; b2 < di; ++b2)
                            t(a1, a2, b1, b2) = omega * lambdas[i].entries(b1, b2) *
                                                lambdas[j].entries(a1, a2) / den;
                }
            out.j_tensor.emplace(std::make_pair(i, j), std::move(t));
        }
    }
    return out;
}

struct DressedSpectrum {
    std::vector<RealVector> energies;  // per molecule, ascending (GHz)
    std::vector<Matrix> rotation;      // W per molecule; columns are dressed states
                                       // in the bare Hubbard basis
    std::map<std::pair<int, int>, PairTensor> interaction;  // V for pairs i < j
                                                            // (abar on i, bbar on j)

    int molecule_count() const { return static_cast<int>(energies.size()); }
    std::vector<int> dimensions() const {
        std::vector<int> dims;
        for (const auto& e : energies)
            dims.push_back(static_cast<int>(e.size()));
        return dims;
    }
    const PairTensor& v(int i, int j) const { return interaction.at({i, j}); }
};

namespace detail {

inline void fix_column_phases(Matrix& u) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::Index jmax = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            const double mag = std::abs(u(r, c));
            if (mag > best) {
                best = mag;
                jmax = r;
            }
        }
        const Complex pivot = u(jmax, c);
        if (std::abs(pivot) > 0.0)
            u.col(c) *= std::abs(pivot) / pivot;
    }
}

// Conjugate the pair tensor into the dressed bases of both molecules.
inline PairTensor rotate_pair_tensor(const PairTensor& t, const Matrix& wi, const Matrix& wj) {
    const int di = t.alpha_dim();
    const int dj = t.beta_dim();
    PairTensor half(di, dj);
    // rotate the alpha indices: half(e,f,b1,b2) = sum_{a1,a2} conj(wi(a1,e)) wi(a2,f) t(a1,a2,..)
    for (int e = 0; e < di; ++e)
        for (int f = 0; f < di; ++f)
            for (int b1 = 0; b1 < dj; ++b1)
                for (int b2 = 0; b2 < dj; ++b2) {
                    Complex sum = 0.0;
                    for (int a1 = 0; a1 < di; ++a1)
                        for (int a2 = 0; a2 < di; ++a2)
                            sum += std::conj(wi(a1, e)) * wi(a2, f) * t(a1, a2, b1, b2);
                    half(e, f, b1, b2) = sum;
                }
    PairTensor out(di, dj);
    for (int e = 0; e < di; ++e)
        for (int f = 0; f < di; ++f)
            for (int g = 0; g < dj; ++g)
                for (int h = 0; h < dj; ++h) {
                    Complex sum = 0.0;
                    for (int b1 = 0; b1 < dj; ++b1)
                        for (int b2 = 0; b2 < dj; ++b2)
                            sum += std::conj(wj(b1, g)) * wj(b2, h) * half(e, f, b1, b2);
                    out(e, f, g, h) = sum;
                }
    return out;
}

}  // namespace detail

// Diagonalize E + deltaE + n_mean * deltaOmega per molecule and rotate the
// symmetrized interaction into the dressed basis.  The two-photon terms drop
// out of the number-state photon trace and are not propagated.
inline DressedSpectrum dressed_spin_hamiltonian(const EffectiveTerms& terms,
                                                const std::vector<MoleculeEigensystem>& bare,
                                                const PhotonState& photon) {
    photon.validate();
    const int n = terms.molecule_count();
    if (static_cast<int>(bare.size()) != n)
        throw std::invalid_argument("dressed_spin_hamiltonian: molecule count mismatch");

    DressedSpectrum out;
    const double nbar = photon.mean_occupation();
    for (int i = 0; i < n; ++i) {
        Matrix m = Matrix(bare[i].energies.asDiagonal());
        m += terms.delta_e[i] + nbar * terms.delta_omega[i];
        m = 0.5 * (m + m.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("dressed_spin_hamiltonian: eigensolver failed");
        Matrix w = solver.eigenvectors();
        detail::fix_column_phases(w);
        out.energies.push_back(solver.eigenvalues());
        out.rotation.push_back(std::move(w));
    }

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            out.interaction.emplace(
                std::make_pair(i, j),
                detail::rotate_pair_tensor(terms.symmetrized(i, j), out.rotation[i],
                                           out.rotation[j]));
    return out;
}

}  // namespace spincavity
