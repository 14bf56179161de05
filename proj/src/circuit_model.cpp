#include "qpa/circuit_model.hpp"

#include <cmath>
#include <string>

#include "qpa/constants.hpp"
#include "qpa/errors.hpp"

namespace qpa {

namespace {

void require_positive(double value, const char* key) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw UnitError(std::string(key) + " must be strictly positive, got " +
                        std::to_string(value));
    }
}

void require_non_negative(double value, const char* key) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw UnitError(std::string(key) + " must be non-negative, got " +
                        std::to_string(value));
    }
}

}  // namespace

void TransistorParams::validate() const {
    validate_without_matching();
    require_positive(C_ds, "transistor.C_ds");
}

void TransistorParams::validate_without_matching() const {
    require_positive(width_um, "transistor.width");
    require_positive(C_pg, "transistor.C_pg");
    require_positive(C_pd, "transistor.C_pd");
    require_positive(L_g, "transistor.L_g");
    require_positive(L_d, "transistor.L_d");
    require_positive(L_s, "transistor.L_s");
    require_positive(R_g, "transistor.R_g");
    require_positive(R_d, "transistor.R_d");
    require_positive(R_s, "transistor.R_s");
    require_positive(C_gs, "transistor.C_gs");
    require_non_negative(C_gd, "transistor.C_gd");
    require_non_negative(g_m, "transistor.g_m");
    require_positive(gamma_noise, "transistor.gamma_noise");
}

void EnvironmentParams::validate_without_kappa() const {
    require_non_negative(T_em, "environment.T_em");
    require_non_negative(V_RF, "environment.V_RF");
    require_positive(C_in, "environment.C_in");
    require_positive(omega_ref, "environment.omega_ref");
}

void EnvironmentParams::validate() const {
    validate_without_kappa();
    require_positive(kappa1, "environment.kappa1");
    require_positive(kappa2, "environment.kappa2");
}

PartialCaps derive_partial_caps(const TransistorParams& t, const EnvironmentParams& e) {
    PartialCaps p;
    p.C_p1 = e.C_in + t.C_gs + t.C_gd;
    p.C_p2 = t.C_gd + t.C_ds;
    p.D_M = p.C_p1 * p.C_p2 - t.C_gd * t.C_gd;
    if (!(p.D_M > 0.0)) {
        throw DegenerateCoupling("D_M = C_p1 C_p2 - C_gd^2 is not positive (" +
                                 std::to_string(p.D_M) + " F^2)");
    }
    return p;
}

AppendixCoeffs derive_appendix_coeffs(const PartialCaps& p, const TransistorParams& t,
                                      const EnvironmentParams& e) {
    const double Cp1 = p.C_p1;
    const double Cp2 = p.C_p2;
    const double Cgd = t.C_gd;
    const double Cin = e.C_in;
    const double gm = t.g_m;
    const double D = p.D_M;
    const double D2 = D * D;

    AppendixCoeffs a;
    a.inv2C_1p = (Cp1 * Cp2 * Cp2 - Cgd * Cgd * Cp2) / (2.0 * D2);
    a.inv2C_2p = (Cp1 * Cp1 * Cp2 - Cp1 * Cgd * Cgd) / (2.0 * D2);
    a.invC_12p = (-Cgd * (Cp1 * Cp2 + Cgd * Cgd) + 2.0 * Cp1 * Cgd * Cp2) / D2;
    a.g_12p = (-gm * Cgd * Cp1 * Cp2 + 2.0 * gm * Cp1 * Cp1 * Cp2) / D2 - gm * Cp2 / D;
    a.g_22p = (gm * Cgd * Cgd * Cp1 - gm * Cgd * (Cp1 * Cp2 + Cgd * Cgd)) / D2 - gm * Cgd / D;
    a.V_q1p = (Cin * Cp1 * Cp2 * Cp2 - Cgd * Cgd * Cin * Cp2) / D2;
    a.V_q2p = (2.0 * Cin * Cp1 * Cp1 * Cgd - Cgd * (Cgd * Cgd * Cin + Cin * Cp1 * Cp2)) / D2;
    a.G_1 = (2.0 * gm * Cin * Cp1 * Cp1 * Cgd - gm * Cgd * (Cgd * Cgd * Cin + Cin * Cp1 * Cp2)) / D2 -
            gm * Cin * Cp2 / D;
    return a;
}

NoisePSDs noise_currents(const TransistorParams& t, const EnvironmentParams& e) {
    const double four_kT = 4.0 * constants::k_B * e.T_em;
    NoisePSDs n;
    n.i_g_sq = four_kT / t.R_g;
    n.i_d_sq = four_kT / t.R_d;
    n.i_ds_sq = four_kT * t.gamma_noise * t.g_m;
    return n;
}

HamiltonianCoefficients derive_hamiltonian_coeffs(const PartialCaps& p,
                                                  const AppendixCoeffs& a,
                                                  const TransistorParams& t,
                                                  const EnvironmentParams& e) {
    HamiltonianCoefficients h;
    const double inv_C1_half = p.C_p2 / p.D_M - a.inv2C_1p;
    const double inv_C2_half = p.C_p1 / p.D_M - a.inv2C_2p;
    if (!(inv_C1_half > 0.0) || !(inv_C2_half > 0.0)) {
        throw DegenerateCoupling("derived effective capacitance C_1 or C_2 is not positive");
    }
    h.C_1 = 0.5 / inv_C1_half;
    h.C_2 = 0.5 / inv_C2_half;
    h.invC_12 = 2.0 * (2.0 * t.C_gd / p.D_M - 0.5 * a.invC_12p);
    h.g_12 = t.g_m * t.C_gd / p.D_M - a.g_12p;
    h.g_22 = t.g_m * p.C_p1 / p.D_M - a.g_22p;
    h.V_q1 = e.V_RF * (e.C_in * p.C_p2 / p.D_M - a.V_q1p);
    h.V_q2 = e.V_RF * (e.C_in * t.C_gd / p.D_M - a.V_q2p);

    h.Z_1 = std::sqrt(t.L_g / h.C_1);
    h.Z_2 = std::sqrt(t.L_d / h.C_2);
    h.omega_1 = 1.0 / std::sqrt(t.L_g * h.C_1);
    h.omega_2 = 1.0 / std::sqrt(t.L_d * h.C_2);

    h.g_q1q2 = -0.5 * h.invC_12 / std::sqrt(h.Z_1 * h.Z_2);
    h.g_q1p2 = -0.5 * h.g_12 * std::sqrt(h.Z_2 / h.Z_1);
    h.g_q2p2 = -0.5 * h.g_22;

    const NoisePSDs noise = noise_currents(t, e);
    const double hbar = constants::hbar;
    h.gamma_q1 = -h.V_q1 * std::sqrt(1.0 / (2.0 * hbar * h.Z_1));
    h.gamma_q2 = -h.V_q2 * std::sqrt(1.0 / (2.0 * hbar * h.Z_2));
    h.gamma_phi1 = -noise.i_g_sq * std::sqrt(h.Z_1 / (2.0 * hbar));
    h.gamma_phi2 = -(a.G_1 * e.V_RF + noise.i_ds_sq + noise.i_d_sq) * std::sqrt(h.Z_2 / (2.0 * hbar));
    return h;
}

NoisePSDs thermal_noise_psds(const TransistorParams& t, const EnvironmentParams& e) {
    const PartialCaps p = derive_partial_caps(t, e);
    const HamiltonianCoefficients h =
        derive_hamiltonian_coeffs(p, derive_appendix_coeffs(p, t, e), t, e);
    NoisePSDs n = noise_currents(t, e);
    n.n_bar_1 = bose_occupation(h.omega_1, e.T_em);
    n.n_bar_2 = bose_occupation(h.omega_2, e.T_em);
    return n;
}

CoefficientSet derive_coefficients(const TransistorParams& t, const EnvironmentParams& e) {
    CoefficientSet s;
    s.partial = derive_partial_caps(t, e);
    s.appendix = derive_appendix_coeffs(s.partial, t, e);
    s.hamiltonian = derive_hamiltonian_coeffs(s.partial, s.appendix, t, e);
    s.noise = noise_currents(t, e);
    s.noise.n_bar_1 = bose_occupation(s.hamiltonian.omega_1, e.T_em);
    s.noise.n_bar_2 = bose_occupation(s.hamiltonian.omega_2, e.T_em);
    return s;
}

double bose_occupation(double omega, double T) {
    if (T <= 0.0) return 0.0;
    const double x = constants::hbar * omega / (constants::k_B * T);
    // expm1 keeps precision for x << 1; exp overflow gives the correct 0.
    return 1.0 / std::expm1(x);
}

double calibrate_capacitance(double L, double omega_target) {
    return 1.0 / (L * omega_target * omega_target);
}

MatchingCaps calibrate_matching(const TransistorParams& t, double omega_1_target,
                                double omega_2_target) {
    const double C1 = calibrate_capacitance(t.L_g, omega_1_target);
    const double C2 = calibrate_capacitance(t.L_d, omega_2_target);
    const double Cgd = t.C_gd;
    const double Cp1 = 0.5 * C1 * (1.0 + std::sqrt(1.0 + 4.0 * Cgd * Cgd / (C1 * C2)));
    const double Cp2 = C2 * Cp1 / C1;
    MatchingCaps m;
    m.C_in = Cp1 - t.C_gs - Cgd;
    m.C_ds = Cp2 - Cgd;
    if (!(m.C_in > 0.0) || !(m.C_ds > 0.0)) {
        throw DegenerateCoupling("matching targets need a negative C_in or C_ds");
    }
    return m;
}

}  // namespace qpa
