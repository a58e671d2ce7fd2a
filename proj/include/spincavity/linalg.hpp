// linalg.hpp — shared dense-matrix helpers (Kronecker products, Hermitian checks,
// eigendecomposition-based unitaries)

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace spincavity {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline double hermiticity_error(const Matrix& m) {
    return (m - m.adjoint()).norm();
}

inline bool is_hermitian(const Matrix& m, double tol = 1e-12) {
    return m.rows() == m.cols() && hermiticity_error(m) <= tol * std::max(1.0, m.norm());
}

// Eigendecomposition of a Hermitian matrix, kept around so that exp(-iHt) can be
// evaluated at many times from a single factorization.
struct HermitianEigen {
    RealVector values;   // ascending
    Matrix vectors;      // columns

    HermitianEigen() = default;

    explicit HermitianEigen(const Matrix& h) {
        if (h.rows() != h.cols())
            throw std::invalid_argument("HermitianEigen: matrix must be square");
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("HermitianEigen: eigensolver failed");
        values = solver.eigenvalues();
        vectors = solver.eigenvectors();
    }

    // exp(-i H t), with t in the inverse units of H's entries
    Matrix unitary(double t) const {
        if (t == 0.0)
            return Matrix::Identity(values.size(), values.size());
        Vector ph(values.size());
        for (Eigen::Index k = 0; k < values.size(); ++k)
            ph(k) = std::exp(Complex(0.0, -values(k) * t));
        return vectors * ph.asDiagonal() * vectors.adjoint();
    }
};

// Embed per-molecule operators into the spin product space (molecule 0 slowest).
// ops[i] may be empty, meaning identity on that factor.
inline Matrix embed_product(const std::vector<Matrix>& ops, const std::vector<int>& dims) {
    Matrix out = Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (ops[i].size() == 0)
            out = kron(out, Matrix::Identity(dims[i], dims[i]));
        else
            out = kron(out, ops[i]);
    }
    return out;
}

}  // namespace spincavity
