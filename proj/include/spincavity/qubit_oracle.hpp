// qubit_oracle.hpp — closed-form two-qubit reference: effective parameters from
// the microscopic couplings and the exact 4x4 propagator for
//   H = (Delta_L/2) sigma_L^z + (Delta_R/2) sigma_R^z + V sigma_L^x sigma_R^x
// in the basis |++>, |+->, |-+>, |-->.  Used as an independent analytic oracle
// for the general pipeline.

#pragma once

#include "spincavity/constants.hpp"
#include "spincavity/errors.hpp"
#include "spincavity/linalg.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace spincavity {

struct QubitEffectiveParams {
    double v_tilde = 0.0;        // GHz, sign carries the detuning side
    double delta_tilde_l = 0.0;  // GHz
    double delta_tilde_r = 0.0;  // GHz
};

// Second-order effective interaction and dressed splittings for two qubits with
// transverse coupling xi_i = lambda_i g_x to a common mode:
//   V = (Omega g^2 lambda_L lambda_R / 4) [1/(Delta_R^2-Omega^2) + 1/(Delta_L^2-Omega^2)]
//   Delta_i' = Delta_i [1 + (1+2p1)/2 (lambda_i g)^2/(Delta_i^2-Omega^2)]
// The 1/4 is the Hubbard-projection prefactor (each sigma^x matrix element is
// xi/2); with it the formulas agree with the general pipeline identically.
inline QubitEffectiveParams qubit_effective(double delta_l, double delta_r, double omega,
                                            double lambda_l, double lambda_r, double g_x,
                                            double p1) {
    if (std::abs(std::abs(delta_l) - omega) < 1e-9 || std::abs(std::abs(delta_r) - omega) < 1e-9)
        throw PhysicsError("qubit_effective: qubit transition resonant with the cavity");
    const double den_l = delta_l * delta_l - omega * omega;
    const double den_r = delta_r * delta_r - omega * omega;
    QubitEffectiveParams out;
    out.v_tilde = 0.25 * omega * g_x * g_x * lambda_l * lambda_r * (1.0 / den_r + 1.0 / den_l);
    const double shift = 0.5 * (1.0 + 2.0 * p1);
    out.delta_tilde_l = delta_l * (1.0 + shift * (lambda_l * g_x) * (lambda_l * g_x) / den_l);
    out.delta_tilde_r = delta_r * (1.0 + shift * (lambda_r * g_x) * (lambda_r * g_x) / den_r);
    return out;
}

// Exact propagator, from the closed form with
//   omega_pm = (1/2) sqrt(Delta_pm^2 + 4 V^2),  Delta_pm = Delta_L' +- Delta_R'.
// The outer block couples |++> and |-->, the inner block |+-> and |-+>.
inline Matrix qubit_exact_u(const QubitEffectiveParams& params, double t_seconds) {
    const double t = seconds_to_internal(t_seconds);
    const double v = params.v_tilde;
    const double dp = params.delta_tilde_l + params.delta_tilde_r;
    const double dm = params.delta_tilde_l - params.delta_tilde_r;
    const double wp = 0.5 * std::sqrt(dp * dp + 4.0 * v * v);
    const double wm = 0.5 * std::sqrt(dm * dm + 4.0 * v * v);

    auto block = [&](double w, double d) {
        Complex diag_m, diag_p, off;
        if (w == 0.0) {
            diag_m = diag_p = 1.0;
            off = Complex(0.0, -v * t);  // limit of sin(wt)/w -> t
        } else {
            const double c = std::cos(w * t);
            const double s = std::sin(w * t);
            diag_m = Complex(c, -0.5 * d * s / w);
            diag_p = Complex(c, +0.5 * d * s / w);
            off = Complex(0.0, -v * s / w);
        }
        return std::array<Complex, 3>{diag_m, diag_p, off};
    };
    const auto outer = block(wp, dp);
    const auto inner = block(wm, dm);

    Matrix u = Matrix::Zero(4, 4);
    u(0, 0) = outer[0];
    u(3, 3) = outer[1];
    u(0, 3) = u(3, 0) = outer[2];
    u(1, 1) = inner[0];
    u(2, 2) = inner[1];
    u(1, 2) = u(2, 1) = inner[2];
    return u;
}

// Slow-scale factor u0(t) = exp(-i (V/2)(sx sx + sy sy) t) for resonant qubits:
// identity on |++>, |-->; cos / -i sin rotation within |+->, |-+>.
inline Matrix qubit_resonant_u0(double v_tilde, double t_seconds) {
    const double theta = v_tilde * seconds_to_internal(t_seconds);
    Matrix u = Matrix::Identity(4, 4);
    u(1, 1) = u(2, 2) = std::cos(theta);
    u(1, 2) = u(2, 1) = Complex(0.0, -std::sin(theta));
    return u;
}

// The 4x4 Hamiltonian itself, for numerical cross-checks of the closed form.
inline Matrix qubit_effective_hamiltonian(const QubitEffectiveParams& params) {
    Matrix h = Matrix::Zero(4, 4);
    const double dp = params.delta_tilde_l + params.delta_tilde_r;
    const double dm = params.delta_tilde_l - params.delta_tilde_r;
    h(0, 0) = 0.5 * dp;
    h(1, 1) = 0.5 * dm;
    h(2, 2) = -0.5 * dm;
    h(3, 3) = -0.5 * dp;
    h(0, 3) = h(3, 0) = params.v_tilde;
    h(1, 2) = h(2, 1) = params.v_tilde;
    return h;
}

}  // namespace spincavity
