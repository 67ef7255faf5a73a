#include "gkls/bath.hpp"

#include <cmath>

namespace gkls {

SpectralModel spectral_model_from_string(const std::string& name)
{
    if (name == "ohmic") return SpectralModel::ohmic;
    if (name == "cubic") return SpectralModel::cubic;
    if (name == "flat") return SpectralModel::flat;
    if (name == "band") return SpectralModel::band;
    throw Error(ErrorCode::config, "unknown spectral density model '" + name + "'");
}

const char* to_string(SpectralModel m)
{
    switch (m) {
    case SpectralModel::ohmic: return "ohmic";
    case SpectralModel::cubic: return "cubic";
    case SpectralModel::flat: return "flat";
    case SpectralModel::band: return "band";
    }
    return "unknown";
}

void BathSpec::validate() const
{
    if (!std::isfinite(temperature) || temperature < 0.0)
        throw Error(ErrorCode::domain, "bath temperature must be finite and non-negative");
    if (!std::isfinite(eta) || eta < 0.0)
        throw Error(ErrorCode::domain, "spectral density strength must be non-negative");
    if (model == SpectralModel::band) {
        if (!(band_hi >= band_lo) || band_lo < 0.0)
            throw Error(ErrorCode::domain, "band edges must satisfy 0 <= lo <= hi");
    } else if (!(cutoff > 0.0)) {
        throw Error(ErrorCode::domain, "spectral cutoff must be positive");
    }
}

double BathSpec::spectral_density(double omega) const
{
    if (omega < 0.0) throw Error(ErrorCode::domain, "spectral density evaluated at negative frequency");
    switch (model) {
    case SpectralModel::ohmic: return eta * omega * std::exp(-omega / cutoff);
    case SpectralModel::cubic: return eta * omega * omega * omega * std::exp(-omega / cutoff);
    case SpectralModel::flat: return omega <= cutoff ? eta : 0.0;
    case SpectralModel::band: return (omega >= band_lo && omega <= band_hi) ? eta : 0.0;
    }
    return 0.0;
}

double bose_einstein(double omega, double temperature)
{
    if (!(omega > 0.0)) throw Error(ErrorCode::domain, "Bose-Einstein occupation needs omega > 0");
    if (temperature < 0.0) throw Error(ErrorCode::domain, "temperature must be non-negative");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

cplx gamma_one_sided(double nu, const BathSpec& bath)
{
    if (nu == 0.0 || !std::isfinite(nu))
        throw Error(ErrorCode::domain, "one-sided bath transform needs a finite nonzero frequency");
    const double w = std::abs(nu);
    const double j = bath.spectral_density(w);
    const double n = bose_einstein(w, bath.temperature);
    return nu > 0.0 ? j * (n + 1.0) : j * n;
}

KineticCoefficients jc_kinetic_coefficients(const JCParams& p, const BathSpec& bath)
{
    bath.validate();
    KineticCoefficients k;
    k.omega = p.rabi();
    if (!(k.omega > 0.0)) throw Error(ErrorCode::degeneracy, "drive is degenerate: Omega = 0");
    const double d = p.detuning();
    const double om2 = k.omega * k.omega;
    const double ga2 = p.g * p.g * p.mean_photons();
    k.s_plus = (d * (d + k.omega) + 2.0 * ga2) / (2.0 * om2);
    k.s_minus = (d * (d - k.omega) + 2.0 * ga2) / (2.0 * om2);
    const double wc = p.omega_c;
    auto gam = [&](double nu) { return gamma_one_sided(nu, bath).real(); };
    const double upper = wc + k.omega;
    const double lower = wc - k.omega;
    k.gamma_minus = k.s_plus * gam(upper);
    k.gamma_plus = k.s_plus * gam(-upper);
    if (lower != 0.0) {
        k.gamma_minus += k.s_minus * gam(-lower);
        k.gamma_plus += k.s_minus * gam(lower);
    } else if (k.s_minus != 0.0 && bath.spectral_density(0.0) != 0.0) {
        throw Error(ErrorCode::domain, "lower side band sits at zero frequency");
    }
    const double jc = bath.spectral_density(std::abs(wc));
    const double nc = bose_einstein(std::abs(wc), bath.temperature);
    k.gamma0 = (2.0 * ga2 / om2) * (jc * (nc + 1.0) + jc * nc);
    return k;
}

}  // namespace gkls
