#pragma once

// Circuit-to-Hamiltonian coefficient pipeline for two LC oscillators coupled
// through the small-signal equivalent circuit of an nMOS transistor.
//
// SI units throughout: farads, henries, ohms, siemens, kelvin, rad/s.

namespace qpa {

struct TransistorParams {
    double width_um = 0.0;
    // Pad parasitics. Stored for fidelity with the device table; no
    // coefficient depends on them.
    double C_pg = 0.0;
    double C_pd = 0.0;
    double L_g = 0.0;
    double L_d = 0.0;
    double L_s = 0.0;  // unused, see C_pg
    double R_g = 0.0;
    double R_d = 0.0;
    double R_s = 0.0;  // unused, see C_pg
    double C_gs = 0.0;
    double C_gd = 0.0;  // may be exactly 0 (no feedback capacitance)
    double C_ds = 0.0;
    double g_m = 0.0;
    double gamma_noise = 0.0;

    /// Throws UnitError naming the offending `transistor.<field>`.
    void validate() const;
    /// Same, minus C_ds, which matching calibration may still supply.
    void validate_without_matching() const;
};

struct EnvironmentParams {
    double T_em = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double V_RF = 0.0;
    double C_in = 0.0;
    double omega_ref = 0.0;

    double kappa_loss() const { return kappa1 + kappa2; }

    /// Checks everything except the decay rates, which the harness may still
    /// have to default from the derived resonance frequencies.
    void validate_without_kappa() const;
    void validate() const;
};

struct PartialCaps {
    double C_p1 = 0.0;
    double C_p2 = 0.0;
    double D_M = 0.0;  // C_p1 C_p2 - C_gd^2, units F^2
};

/// The eight auxiliary quantities, with C_M read as D_M and |C_M|^2 as D_M^2.
struct AppendixCoeffs {
    double inv2C_1p = 0.0;  // 1 / (2 C_1p)   [1/F]
    double inv2C_2p = 0.0;  // 1 / (2 C_2p)   [1/F]
    double invC_12p = 0.0;  // 1 / C_12p      [1/F]
    double g_12p = 0.0;     // [1/s]
    double g_22p = 0.0;     // [1/s]
    double V_q1p = 0.0;     // dimensionless
    double V_q2p = 0.0;     // dimensionless
    double G_1 = 0.0;       // [S]
};

struct HamiltonianCoefficients {
    double C_1 = 0.0;
    double C_2 = 0.0;
    double invC_12 = 0.0;  // 1 / C_12, finite even when C_12 is not
    double g_12 = 0.0;
    double g_22 = 0.0;
    double V_q1 = 0.0;
    double V_q2 = 0.0;
    double Z_1 = 0.0;
    double Z_2 = 0.0;
    double omega_1 = 0.0;
    double omega_2 = 0.0;
    // Charge-charge, charge-flux and self charge-flux couplings [rad/s].
    double g_q1q2 = 0.0;
    double g_q1p2 = 0.0;
    double g_q2p2 = 0.0;
    // Linear drive rates [1/s].
    double gamma_q1 = 0.0;
    double gamma_q2 = 0.0;
    double gamma_phi1 = 0.0;
    double gamma_phi2 = 0.0;
};

struct NoisePSDs {
    double i_g_sq = 0.0;   // A^2/Hz
    double i_d_sq = 0.0;
    double i_ds_sq = 0.0;
    double n_bar_1 = 0.0;
    double n_bar_2 = 0.0;
};

/// Everything the downstream modules need, derived in one pass.
struct CoefficientSet {
    PartialCaps partial;
    AppendixCoeffs appendix;
    HamiltonianCoefficients hamiltonian;
    NoisePSDs noise;
};

PartialCaps derive_partial_caps(const TransistorParams& t, const EnvironmentParams& e);

AppendixCoeffs derive_appendix_coeffs(const PartialCaps& p, const TransistorParams& t,
                                      const EnvironmentParams& e);

HamiltonianCoefficients derive_hamiltonian_coeffs(const PartialCaps& p,
                                                  const AppendixCoeffs& a,
                                                  const TransistorParams& t,
                                                  const EnvironmentParams& e);

/// Resistor and channel current-noise PSDs only (no resonance frequencies).
NoisePSDs noise_currents(const TransistorParams& t, const EnvironmentParams& e);

/// Current-noise PSDs plus bath occupations at the derived resonances.
NoisePSDs thermal_noise_psds(const TransistorParams& t, const EnvironmentParams& e);

CoefficientSet derive_coefficients(const TransistorParams& t, const EnvironmentParams& e);

/// Bose-Einstein occupation 1/(exp(hbar w / k_B T) - 1); 0 in the T -> 0 limit.
double bose_occupation(double omega, double T);

/// C such that 1/sqrt(L C) = omega_target.
double calibrate_capacitance(double L, double omega_target);

struct MatchingCaps {
    double C_in = 0.0;
    double C_ds = 0.0;
};

/// Solves for the gate-side input capacitance and the drain-side capacitance
/// that place the *derived* resonances omega_1, omega_2 at the targets, given
/// the intrinsic C_gs, C_gd and the inductors in `t`. Closed form: with
/// C_k* = calibrate_capacitance(L_k, target_k),
///   C_p1 = C_1* (1 + sqrt(1 + 4 C_gd^2 / (C_1* C_2*))) / 2,  C_p2 = C_2* C_p1 / C_1*.
MatchingCaps calibrate_matching(const TransistorParams& t, double omega_1_target,
                                double omega_2_target);

}  // namespace qpa
