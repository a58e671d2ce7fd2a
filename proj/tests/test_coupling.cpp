#include "spincavity/coupling.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

using namespace spincavity;

namespace {

MoleculeSpec random_spec(std::mt19937& rng, int two_s) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    MoleculeSpec spec;
    spec.spin = {two_s};
    spec.stevens = {{2, 0, 0.5 * coeff(rng)}, {2, 2, 0.3 * coeff(rng)}, {2, 1, 0.2 * coeff(rng)}};
    spec.g_tensor = {1.5 + coeff(rng), 1.5 + coeff(rng), 1.5 + coeff(rng)};
    spec.b_field = {0.1 * coeff(rng), 0.1 * coeff(rng), 0.2 + 0.1 * coeff(rng)};
    return spec;
}

// Independent construction: rotate lambda.g.S into the eigenbasis with the
// explicit eigenstate vectors.
Matrix rotated_coupling(const MoleculeEigensystem& eig, const CouplingVector& cv,
                        const std::array<double, 3>& g) {
    const int d = eig.dimension();
    SpinMagnitude spin{d - 1};
    const SpinMatrices s = spin_matrices(spin);
    const Matrix op = cv.lambda[0] * g[0] * s.sx + cv.lambda[1] * g[1] * s.sy +
                      cv.lambda[2] * g[2] * s.sz;
    Matrix out(d, d);
    for (int a1 = 0; a1 < d; ++a1)
        for (int a2 = 0; a2 < d; ++a2)
            out(a1, a2) = eigenstate_vector(eig, a1).adjoint() * op * eigenstate_vector(eig, a2);
    return out;
}

}  // namespace

TEST_CASE("lambda tensor equals the eigenbasis rotation of lambda.g.S", "[coupling]") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const MoleculeSpec spec = random_spec(rng, 1 + trial % 7);
        const MoleculeEigensystem eig = diagonalize_molecule(molecule_hamiltonian(spec));
        CouplingVector cv;
        cv.lambda = {0.02 * coeff(rng), 0.02 * coeff(rng), 0.02 * coeff(rng)};
        const LambdaTensor lam = lambda_tensor(eig, cv, spec.g_tensor);
        const Matrix expected = rotated_coupling(eig, cv, spec.g_tensor);
        CHECK((lam.entries - expected).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(hermiticity_error(lam.entries) < 1e-12);
    }
}

TEST_CASE("zero coupling gives the zero tensor", "[coupling]") {
    const MoleculeSpec spec = [] {
        MoleculeSpec s;
        s.spin = {3};
        s.b_field = {0, 0, 0.1};
        return s;
    }();
    const MoleculeEigensystem eig = diagonalize_molecule(molecule_hamiltonian(spec));
    const LambdaTensor lam = lambda_tensor(eig, CouplingVector{}, spec.g_tensor);
    CHECK(lam.entries.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transverse coupling of a bare qubit is g_x lambda_x / 2", "[coupling]") {
    MoleculeSpec spec;
    spec.spin = {1};
    spec.b_field = {0, 0, 0.05};
    spec.g_tensor = {1.8, 1.8, 1.8};
    const MoleculeEigensystem eig = diagonalize_molecule(molecule_hamiltonian(spec));
    CouplingVector cv;
    cv.lambda = {0.01, 0.0, 0.0};
    const LambdaTensor lam = lambda_tensor(eig, cv, spec.g_tensor);
    CHECK(std::abs(lam.entries(0, 1) - 0.5 * 1.8 * 0.01) < 1e-14);
    CHECK(std::abs(lam.entries(0, 0)) < 1e-14);
}

TEST_CASE("NV toy couples only the M=0 to M=+-1 transitions", "[coupling]") {
    MoleculeSpec spec;
    spec.spin = {2};
    spec.stevens = {{2, 0, 2.87 / 3.0}};
    spec.g_tensor = {1.0, 1.0, 2.0};
    spec.b_field = {0.0, 0.0, 0.007};
    const MoleculeEigensystem eig = diagonalize_molecule(molecule_hamiltonian(spec));
    CouplingVector cv;
    cv.lambda = {0.01, 0.0, 0.0};
    const LambdaTensor lam = lambda_tensor(eig, cv, spec.g_tensor);
    const double expected = 0.01 / std::sqrt(2.0);  // xi <0|Sx|+-1>
    // level 0 is M=0; levels 1,2 are M=-1,+1
    CHECK(std::abs(std::abs(lam.entries(0, 1)) - expected) < 1e-12);
    CHECK(std::abs(std::abs(lam.entries(0, 2)) - expected) < 1e-12);
    CHECK(std::abs(lam.entries(1, 2)) < 1e-12);
    CHECK(std::abs(lam.entries(0, 0)) < 1e-12);
}

namespace {

std::vector<Molecule> qubit_pair(double bz, double lambda_x) {
    MoleculeSpec spec;
    spec.spin = {1};
    spec.b_field = {0, 0, bz};
    spec.g_tensor = {2, 2, 2};
    Molecule m;
    m.spec = spec;
    m.coupling.lambda = {lambda_x, 0, 0};
    return {m, m};
}

}  // namespace

TEST_CASE("smallest full model is the 4x4 Rabi block matrix", "[coupling]") {
    MoleculeSpec spec;
    spec.spin = {1};
    spec.b_field = {0, 0, 0.05};
    spec.g_tensor = {2, 2, 2};
    Molecule m{spec, CouplingVector{{0.01, 0, 0}}};
    CavitySpec cavity{1.0, 1};
    const Matrix h = full_model_hamiltonian({m}, cavity);
    REQUIRE(h.rows() == 4);

    const double delta = 2.0 * kMuB * 0.05;
    const double xi = 2.0 * 0.01;
    Matrix expected = Matrix::Zero(4, 4);
    // basis: |n=0,up>, |n=0,dn>, |n=1,up>, |n=1,dn>
    expected(0, 0) = 0.5 * delta;
    expected(1, 1) = -0.5 * delta;
    expected(2, 2) = 1.0 + 0.5 * delta;
    expected(3, 3) = 1.0 - 0.5 * delta;
    expected(0, 3) = expected(3, 0) = 0.5 * xi;
    expected(1, 2) = expected(2, 1) = 0.5 * xi;
    CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("NV pair full model is 45-dimensional and Hermitian", "[coupling]") {
    MoleculeSpec spec;
    spec.spin = {2};
    spec.stevens = {{2, 0, 2.87 / 3.0}};
    spec.g_tensor = {1.0, 1.0, 2.0};
    spec.b_field = {0.0, 0.0, 0.007};
    Molecule m{spec, CouplingVector{{0.01, 0, 0}}};
    const Matrix h = full_model_hamiltonian({m, m}, CavitySpec{5.0, 4});
    REQUIRE(h.rows() == 45);
    CHECK(hermiticity_error(h) < 1e-12 * h.norm());
}

TEST_CASE("decoupled full model spectrum is the tensor sum of parts", "[coupling]") {
    std::vector<Molecule> mols = qubit_pair(0.05, 0.0);
    mols[1].spec.b_field[2] = 0.08;
    const CavitySpec cavity{2.0, 3};
    const Matrix h = full_model_hamiltonian(mols, cavity);

    std::vector<double> expected;
    const MoleculeEigensystem e0 =
        diagonalize_molecule(molecule_hamiltonian(mols[0].spec));
    const MoleculeEigensystem e1 =
        diagonalize_molecule(molecule_hamiltonian(mols[1].spec));
    for (int n = 0; n <= 3; ++n)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                expected.push_back(cavity.omega * n + e0.energies(a) + e1.energies(b));
    std::sort(expected.begin(), expected.end());

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    for (std::size_t k = 0; k < expected.size(); ++k)
        CHECK(std::abs(solver.eigenvalues()(k) - expected[k]) < 1e-10);
}

TEST_CASE("dimension limits are enforced", "[coupling]") {
    Molecule tiny;
    tiny.spec.spin = {1};
    const std::vector<Molecule> four(4, tiny);
    CHECK_THROWS_AS(full_model_hamiltonian(four, CavitySpec{1.0, 2}), std::invalid_argument);

    FullModelOptions opts;
    opts.max_dimension = 8;
    const std::vector<Molecule> pair = qubit_pair(0.05, 0.0);
    CHECK_THROWS_AS(full_model_hamiltonian(pair, CavitySpec{1.0, 4}, opts),
                    std::invalid_argument);
}

TEST_CASE("fock cutoff is converged in the dispersive test regime", "[coupling]") {
    MoleculeSpec spec;
    spec.spin = {2};
    spec.stevens = {{2, 0, 2.87 / 3.0}};
    spec.g_tensor = {1.0, 1.0, 2.0};
    spec.b_field = {0.0, 0.0, 0.007};
    Molecule m{spec, CouplingVector{{0.01, 0, 0}}};

    const Matrix h4 = full_model_hamiltonian({m, m}, CavitySpec{5.0, 4});
    const Matrix h6 = full_model_hamiltonian({m, m}, CavitySpec{5.0, 6});
    Eigen::SelfAdjointEigenSolver<Matrix> s4(h4), s6(h6);
    for (int k = 0; k < 9; ++k)
        CHECK(std::abs(s4.eigenvalues()(k) - s6.eigenvalues()(k)) < 1e-8);
}
