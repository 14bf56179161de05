#include "qpa/correlations.hpp"

namespace qpa {

double purity_fock(const DensityMatrix& rho) {
    // Tr(rho rho) = sum_ij rho_ij rho_ji
    return rho.cwiseProduct(rho.transpose()).sum().real();
}

CorrelationReport correlation_report(const CovarianceMatrix& cm, FormulaMode mode) {
    const StandardFormCM<double> sf = standard_form(cm);
    const SymplecticPair<double> nu = symplectic_eigenvalues(cm);
    const PartialTransposeResult<double> pt = pt_smallest_symplectic(cm);
    const DiscordValue<double> d = quantum_discord(sf, mode);
    const ClassicalValue<double> c = classical_discord(sf, mode);

    CorrelationReport r;
    r.nu_plus = nu.nu_plus;
    r.nu_minus = nu.nu_minus;
    r.nu_tilde_minus = pt.nu_tilde_minus;
    r.entangled = pt.entangled;
    r.discord = d.value;
    r.discord_raw = d.raw;
    r.classical_corr = c.reported(mode);
    r.classical_corr_literal = c.literal;
    r.purity = purity_gaussian(cm);
    r.mode = mode;
    return r;
}

}  // namespace qpa
