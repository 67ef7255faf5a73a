#pragma once

#include <string>

#include "gkls/jc.hpp"

namespace gkls {

// ħ = k_B = 1.
enum class SpectralModel {
    ohmic,  // η ω e^{−ω/ω_cut}
    cubic,  // η ω³ e^{−ω/ω_cut}
    flat,   // η on [0, ω_cut]
    band,   // η on [band_lo, band_hi], zero elsewhere
};

SpectralModel spectral_model_from_string(const std::string& name);
const char* to_string(SpectralModel m);

struct BathSpec {
    double temperature = 0.0;
    SpectralModel model = SpectralModel::ohmic;
    double eta = 1.0;
    double cutoff = 10.0;
    double band_lo = 0.0;
    double band_hi = 0.0;

    // Defined for ω ≥ 0.
    double spectral_density(double omega) const;
    void validate() const;
};

double bose_einstein(double omega, double temperature);

// J(ν)(N(ν)+1) for ν > 0, J(|ν|)N(|ν|) for ν < 0; the principal part is not
// evaluated, so the imaginary component is zero.
cplx gamma_one_sided(double nu, const BathSpec& bath);

struct KineticCoefficients {
    double gamma0 = 0.0;
    double gamma_minus = 0.0;  // rate of the lowering operator F_−
    double gamma_plus = 0.0;   // rate of the raising operator F_+
    double s_plus = 0.0;       // side-band weight at ω_c + Ω
    double s_minus = 0.0;      // side-band weight at ω_c − Ω
    double omega = 0.0;
};

// s_± = (Δ(Δ±Ω) + 2g²|α|²)/(2Ω²);
// γ_− = s_+Γ(ω_c+Ω) + s_−Γ(−(ω_c−Ω)), γ_+ = s_−Γ(ω_c−Ω) + s_+Γ(−(ω_c+Ω)),
// γ_0 = (2g²|α|²/Ω²) J(ω_c)(2N(ω_c)+1).
KineticCoefficients jc_kinetic_coefficients(const JCParams& p, const BathSpec& bath);

}  // namespace gkls
