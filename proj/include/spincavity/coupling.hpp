// coupling.hpp — spin-photon coupling in the molecular eigenbasis and the full
// spin-cavity model on a truncated photon space.

#pragma once

#include "spincavity/linalg.hpp"
#include "spincavity/spin.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace spincavity {

// Spin-photon coupling amplitudes (lambda^x, lambda^y, lambda^z) in GHz.
// These are the full prefactors entering the computation: the 1/sqrt(N)
// normalization and the mu_B * B_rms factors are already absorbed.
struct CouplingVector {
    std::array<double, 3> lambda{0.0, 0.0, 0.0};

    void validate() const {
        for (double v : lambda)
            if (!std::isfinite(v))
                throw std::invalid_argument("CouplingVector: entries must be finite");
    }
};

// Coupling operator lambda.g.S projected onto the molecular eigenbasis.
struct LambdaTensor {
    Matrix entries;  // d x d, Hermitian

    int dimension() const { return static_cast<int>(entries.rows()); }
};

struct CavitySpec {
    double omega = 1.0;   // GHz
    int fock_cutoff = 6;  // photon states 0..fock_cutoff

    void validate() const {
        if (!(omega > 0.0))
            throw std::invalid_argument("CavitySpec: omega must be positive");
        if (fock_cutoff < 1)
            throw std::invalid_argument("CavitySpec: fock_cutoff must be >= 1");
    }
};

struct Molecule {
    MoleculeSpec spec;
    CouplingVector coupling;
};

// Lambda^{a1,a2} = lambda^z g_z sum_M M c_{a1,M} c*_{a2,M}
//                + sum_M gamma_{S,M} (lambda^x g_x - i lambda^y g_y)/2 c_{a1,M+1} c*_{a2,M}
//                + sum_M gamma_{S,M} (lambda^x g_x + i lambda^y g_y)/2 c_{a1,M} c*_{a2,M+1}
// which equals the eigenbasis matrix of lambda.g.S.
inline LambdaTensor lambda_tensor(const MoleculeEigensystem& eig,
                                  const CouplingVector& coupling,
                                  const std::array<double, 3>& g_tensor) {
    coupling.validate();
    const int d = eig.dimension();
    const double s = eig.spin_value();
    const Complex lower(0.5 * coupling.lambda[0] * g_tensor[0],
                        -0.5 * coupling.lambda[1] * g_tensor[1]);
    const Complex raise = std::conj(lower);
    const double axial = coupling.lambda[2] * g_tensor[2];

    LambdaTensor out;
    out.entries = Matrix::Zero(d, d);
    // fill the upper triangle and mirror: the tensor is Hermitian by construction,
    // which keeps every downstream conjugation identity exact at the bit level
    for (int a1 = 0; a1 < d; ++a1) {
        for (int a2 = a1; a2 < d; ++a2) {
            Complex sum = 0.0;
            for (int m = 0; m < d; ++m) {
                const double mval = -s + m;
                sum += axial * mval * eig.coeff(a1, m) * std::conj(eig.coeff(a2, m));
                if (m + 1 < d) {
                    const double gamma = ladder_factor(s, mval);
                    sum += gamma * lower * eig.coeff(a1, m + 1) * std::conj(eig.coeff(a2, m));
                    sum += gamma * raise * eig.coeff(a1, m) * std::conj(eig.coeff(a2, m + 1));
                }
            }
            if (a1 == a2) {
                out.entries(a1, a1) = sum.real();
            } else {
                out.entries(a1, a2) = sum;
                out.entries(a2, a1) = std::conj(sum);
            }
        }
    }
    return out;
}

inline Matrix photon_annihilation(int fock_cutoff) {
    const int n = fock_cutoff + 1;
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k)
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

struct FullModelOptions {
    int max_molecules = 3;
    Eigen::Index max_dimension = 1 << 14;
};

// H = Omega a†a + sum_i H_S(i) + (a† + a) sum_i lambda_i.g_i.S_i on the product
// basis photon ⊗ spin_1 ⊗ ... ⊗ spin_N (photon index slowest).
inline Matrix full_model_hamiltonian(const std::vector<Molecule>& molecules,
                                     const CavitySpec& cavity,
                                     const FullModelOptions& opts = {}) {
    cavity.validate();
    if (molecules.empty())
        throw std::invalid_argument("full_model_hamiltonian: need at least one molecule");
    if (static_cast<int>(molecules.size()) > opts.max_molecules)
        throw std::invalid_argument("full_model_hamiltonian: molecule count exceeds limit");

    const int npho = cavity.fock_cutoff + 1;
    Eigen::Index dim = npho;
    std::vector<int> dims;
    for (const Molecule& m : molecules) {
        m.spec.validate();
        dims.push_back(m.spec.spin.dimension());
        dim *= dims.back();
        if (dim > opts.max_dimension)
            throw std::invalid_argument("full_model_hamiltonian: product dimension exceeds limit");
    }

    const Matrix a = photon_annihilation(cavity.fock_cutoff);
    const Matrix number = a.adjoint() * a;
    const Matrix field = a.adjoint() + a;

    const std::size_t n = molecules.size();
    std::vector<Matrix> blanks(n);  // identities
    Matrix h = kron(cavity.omega * number, embed_product(blanks, dims));

    const Matrix ipho = Matrix::Identity(npho, npho);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Matrix> ops(n);
        ops[i] = molecule_hamiltonian(molecules[i].spec);
        h += kron(ipho, embed_product(ops, dims));

        const SpinMatrices s = spin_matrices(molecules[i].spec.spin);
        const auto& g = molecules[i].spec.g_tensor;
        const auto& lam = molecules[i].coupling.lambda;
        ops[i] = lam[0] * g[0] * s.sx + lam[1] * g[1] * s.sy + lam[2] * g[2] * s.sz;
        h += kron(field, embed_product(ops, dims));
    }
    return h;
}

}  // namespace spincavity
