// spin.hpp — spin operators, extended Stevens operators, single-molecule
// Hamiltonians and their eigensystems.
//
// Basis conventions, fixed across the library:
//   * spin matrices act on the |S,M> basis ordered M = S, S-1, ..., -S
//     (so sz = diag(S, ..., -S));
//   * eigensystem coefficient matrices c(alpha, m) use rows alpha ordered by
//     ascending energy and columns m = M + S ordered by ascending M;
//   * eigenvector phases are fixed by making the largest-magnitude coefficient
//     of each eigenstate real and positive.

#pragma once

#include "spincavity/constants.hpp"
#include "spincavity/linalg.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spincavity {

struct SpinMagnitude {
    int two_s = 1;  // 2S; dimension is two_s + 1

    int dimension() const { return two_s + 1; }
    double value() const { return 0.5 * two_s; }

    void validate() const {
        if (two_s < 1)
            throw std::invalid_argument("SpinMagnitude: two_s must be >= 1 "
                                        "(a trivial spin carries no transitions)");
    }
};

struct SpinMatrices {
    Matrix sx, sy, sz, s_plus, s_minus;
};

// Ladder factor gamma_{S,M} = sqrt(S(S+1) - M(M+1)) for S+|S,M> = gamma |S,M+1>
inline double ladder_factor(double s, double m) {
    return std::sqrt(s * (s + 1.0) - m * (m + 1.0));
}

inline SpinMatrices spin_matrices(SpinMagnitude spin) {
    spin.validate();
    const int d = spin.dimension();
    const double s = spin.value();
    SpinMatrices out;
    out.sz = Matrix::Zero(d, d);
    out.s_plus = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k)
        out.sz(k, k) = s - k;
    for (int k = 1; k < d; ++k) {
        const double m = s - k;  // column state |S,M=m>, raised to row k-1
        out.s_plus(k - 1, k) = ladder_factor(s, m);
    }
    out.s_minus = out.s_plus.adjoint();
    out.sx = 0.5 * (out.s_plus + out.s_minus);
    out.sy = Complex(0.0, -0.5) * (out.s_plus - out.s_minus);
    return out;
}

namespace detail {

// Diagonal polynomials p_{k,|q|}(Sz) of the extended Stevens operators in the
// Abragam-Bleaney normalization, X = S(S+1).
inline Matrix stevens_axial_poly(int k, int aq, const Matrix& sz, double x) {
    const Matrix id = Matrix::Identity(sz.rows(), sz.cols());
    const Matrix z2 = sz * sz;
    const Matrix z3 = z2 * sz;
    const Matrix z4 = z2 * z2;
    const Matrix z5 = z4 * sz;
    const Matrix z6 = z4 * z2;
    if (k == 2) {
        switch (aq) {
            case 0: return 3.0 * z2 - x * id;
            case 1: return sz;
            case 2: return id;
        }
    } else if (k == 4) {
        switch (aq) {
            case 0: return 35.0 * z4 - (30.0 * x - 25.0) * z2 + (3.0 * x * x - 6.0 * x) * id;
            case 1: return 7.0 * z3 - (3.0 * x + 1.0) * sz;
            case 2: return 7.0 * z2 - (x + 5.0) * id;
            case 3: return sz;
            case 4: return id;
        }
    } else if (k == 6) {
        switch (aq) {
            case 0:
                return 231.0 * z6 - (315.0 * x - 735.0) * z4 +
                       (105.0 * x * x - 525.0 * x + 294.0) * z2 +
                       (-5.0 * x * x * x + 40.0 * x * x - 60.0 * x) * id;
            case 1: return 33.0 * z5 - (30.0 * x - 15.0) * z3 + (5.0 * x * x - 10.0 * x + 12.0) * sz;
            case 2: return 33.0 * z4 - (18.0 * x + 123.0) * z2 + (x * x + 10.0 * x + 102.0) * id;
            case 3: return 11.0 * z3 - (3.0 * x + 59.0) * sz;
            case 4: return 11.0 * z2 - (x + 38.0) * id;
            case 5: return sz;
            case 6: return id;
        }
    }
    throw std::invalid_argument("stevens_operator: unsupported (k,q) = (" +
                                std::to_string(k) + "," + std::to_string(aq) + ")");
}

inline Matrix matrix_power(const Matrix& m, int n) {
    Matrix out = Matrix::Identity(m.rows(), m.cols());
    for (int i = 0; i < n; ++i)
        out = out * m;
    return out;
}

}  // namespace detail

// Extended Stevens operator O_k^q for k in {2,4,6}, |q| <= k.  For q > 0 the
// operator is the anticommutator (1/4){S+^q + S-^q, p_{k,q}(Sz)}, for q < 0 the
// corresponding -i/4 combination with S+^q - S-^q, and for q = 0 the axial
// polynomial itself.
inline Matrix stevens_operator(int k, int q, SpinMagnitude spin) {
    if (k != 2 && k != 4 && k != 6)
        throw std::invalid_argument("stevens_operator: k must be one of {2,4,6}");
    if (std::abs(q) > k)
        throw std::invalid_argument("stevens_operator: |q| must not exceed k");
    const SpinMatrices s = spin_matrices(spin);
    const double x = spin.value() * (spin.value() + 1.0);
    const int aq = std::abs(q);
    const Matrix p = detail::stevens_axial_poly(k, aq, s.sz, x);
    if (q == 0)
        return p;
    const Matrix sp = detail::matrix_power(s.s_plus, aq);
    const Matrix sm = detail::matrix_power(s.s_minus, aq);
    if (q > 0) {
        const Matrix a = sp + sm;
        return 0.25 * (a * p + p * a);
    }
    const Matrix a = sp - sm;
    return Complex(0.0, -0.25) * (a * p + p * a);
}

struct StevensTerm {
    int k = 2;
    int q = 0;
    double coefficient = 0.0;  // B_k^q in GHz
};

struct MoleculeSpec {
    SpinMagnitude spin;
    std::vector<StevensTerm> stevens;
    std::array<double, 3> g_tensor{2.0, 2.0, 2.0};
    double zeeman_sign = 1.0;             // +1 or -1; both conventions occur in practice
    std::array<double, 3> b_field{0.0, 0.0, 0.0};  // Tesla

    void validate() const {
        spin.validate();
        if (zeeman_sign != 1.0 && zeeman_sign != -1.0)
            throw std::invalid_argument("MoleculeSpec: zeeman_sign must be +1 or -1");
        for (double g : g_tensor)
            if (!std::isfinite(g))
                throw std::invalid_argument("MoleculeSpec: g-tensor entries must be finite");
        for (double b : b_field)
            if (!std::isfinite(b))
                throw std::invalid_argument("MoleculeSpec: field entries must be finite");
        for (std::size_t a = 0; a < stevens.size(); ++a)
            for (std::size_t b = a + 1; b < stevens.size(); ++b)
                if (stevens[a].k == stevens[b].k && stevens[a].q == stevens[b].q)
                    throw std::invalid_argument("MoleculeSpec: duplicate Stevens term (k,q)");
    }
};

// H = sum_kq B_k^q O_k^q + zeeman_sign * mu_B * sum_a g_a B_a S_a   (GHz)
inline Matrix molecule_hamiltonian(const MoleculeSpec& spec) {
    spec.validate();
    const int d = spec.spin.dimension();
    const SpinMatrices s = spin_matrices(spec.spin);
    Matrix h = Matrix::Zero(d, d);
    for (const StevensTerm& term : spec.stevens)
        h += term.coefficient * stevens_operator(term.k, term.q, spec.spin);
    const std::array<const Matrix*, 3> ops{&s.sx, &s.sy, &s.sz};
    for (int a = 0; a < 3; ++a)
        h += spec.zeeman_sign * kMuB * spec.g_tensor[a] * spec.b_field[a] * (*ops[a]);
    return h;
}

struct MoleculeEigensystem {
    RealVector energies;  // ascending, GHz
    Matrix coefficients;  // c(alpha, m), rows: states ascending, cols: M = -S..S
    double min_gap = 0.0;
    std::vector<std::pair<int, int>> degenerate_pairs;  // adjacent levels below the gap threshold

    int dimension() const { return static_cast<int>(energies.size()); }
    double spin_value() const { return 0.5 * (dimension() - 1); }

    // c_{alpha,M} with m = M + S in [0, d)
    Complex coeff(int alpha, int m) const { return coefficients(alpha, m); }

    bool degenerate() const { return !degenerate_pairs.empty(); }
};

inline MoleculeEigensystem diagonalize_molecule(const Matrix& h, double gap_threshold = 1e-9) {
    if (h.rows() != h.cols())
        throw std::invalid_argument("diagonalize_molecule: matrix must be square");
    const double scale = std::max(1e-300, h.norm());
    if (hermiticity_error(h) > 1e-10 * scale)
        throw std::invalid_argument("diagonalize_molecule: input is not Hermitian "
                                    "within 1e-10 relative tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("diagonalize_molecule: eigensolver failed");

    const int d = static_cast<int>(h.rows());
    MoleculeEigensystem out;
    out.energies = solver.eigenvalues();

    // c(alpha, m) = conj(U(row, alpha)) with basis row (d-1) - m (rows are M-descending)
    out.coefficients = Matrix(d, d);
    for (int alpha = 0; alpha < d; ++alpha)
        for (int m = 0; m < d; ++m)
            out.coefficients(alpha, m) = std::conj(solver.eigenvectors()((d - 1) - m, alpha));

    // phase convention: per state, largest-magnitude coefficient real and positive
    for (int alpha = 0; alpha < d; ++alpha) {
        int jmax = 0;
        double best = -1.0;
        for (int m = 0; m < d; ++m) {
            const double mag = std::abs(out.coefficients(alpha, m));
            if (mag > best) {
                best = mag;
                jmax = m;
            }
        }
        const Complex pivot = out.coefficients(alpha, jmax);
        if (std::abs(pivot) > 0.0)
            out.coefficients.row(alpha) *= std::abs(pivot) / pivot;
    }

    out.min_gap = std::numeric_limits<double>::infinity();
    for (int alpha = 0; alpha + 1 < d; ++alpha) {
        const double gap = out.energies(alpha + 1) - out.energies(alpha);
        out.min_gap = std::min(out.min_gap, gap);
        if (gap < gap_threshold)
            out.degenerate_pairs.emplace_back(alpha, alpha + 1);
    }
    return out;
}

// Reconstruct the eigenstate |alpha> as a vector in the M-descending spin basis.
inline Vector eigenstate_vector(const MoleculeEigensystem& eig, int alpha) {
    const int d = eig.dimension();
    if (alpha < 0 || alpha >= d)
        throw std::invalid_argument("eigenstate_vector: level index out of range");
    Vector v(d);
    for (int m = 0; m < d; ++m)
        v((d - 1) - m) = std::conj(eig.coefficients(alpha, m));
    return v;
}

}  // namespace spincavity
