#pragma once

#include "qpa/circuit_model.hpp"

namespace qpa {

/// Mode parameters in a frame rotating at `omega_frame`, with every rate
/// divided by `rate_unit` (hbar = 1). With the defaults used by the harness
/// (frame = unit = omega_ref) time is measured in units of 1/omega_ref.
struct FrameParameters {
    double Omega_1 = 0.0;  // omega_1 - omega_frame
    double Omega_2 = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double g_q1q2 = 0.0;
    double g_q1p2 = 0.0;
    double g_q2p2 = 0.0;
    double gamma_q1 = 0.0;
    double gamma_q2 = 0.0;
    double gamma_phi1 = 0.0;
    double gamma_phi2 = 0.0;
    double n_bar_1 = 0.0;
    double n_bar_2 = 0.0;
};

inline FrameParameters to_frame(const CoefficientSet& c, const EnvironmentParams& e,
                                double omega_frame, double rate_unit) {
    const HamiltonianCoefficients& h = c.hamiltonian;
    FrameParameters f;
    f.Omega_1 = (h.omega_1 - omega_frame) / rate_unit;
    f.Omega_2 = (h.omega_2 - omega_frame) / rate_unit;
    f.kappa1 = e.kappa1 / rate_unit;
    f.kappa2 = e.kappa2 / rate_unit;
    f.g_q1q2 = h.g_q1q2 / rate_unit;
    f.g_q1p2 = h.g_q1p2 / rate_unit;
    f.g_q2p2 = h.g_q2p2 / rate_unit;
    f.gamma_q1 = h.gamma_q1 / rate_unit;
    f.gamma_q2 = h.gamma_q2 / rate_unit;
    f.gamma_phi1 = h.gamma_phi1 / rate_unit;
    f.gamma_phi2 = h.gamma_phi2 / rate_unit;
    f.n_bar_1 = c.noise.n_bar_1;
    f.n_bar_2 = c.noise.n_bar_2;
    return f;
}

/// The harness convention: frame and unit both at omega_ref.
inline FrameParameters to_reference_frame(const CoefficientSet& c, const EnvironmentParams& e) {
    return to_frame(c, e, e.omega_ref, e.omega_ref);
}

}  // namespace qpa
