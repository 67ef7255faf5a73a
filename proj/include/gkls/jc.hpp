#pragma once

#include <vector>

#include "gkls/eigenops.hpp"
#include "gkls/operator.hpp"

namespace gkls {

// Qubit basis {|g⟩, |e⟩}; full space |q⟩⊗|n⟩ with index q·(n_max+1) + n.
struct JCParams {
    double omega_c = 1.0;
    double omega_eg = 1.0;
    double g = 0.0;
    cplx alpha = 0.0;

    double detuning() const { return omega_eg - omega_c; }
    double mean_photons() const { return std::norm(alpha); }
    double rabi(double n) const;
    double rabi() const { return rabi(mean_photons()); }

    // Chooses g so that rabi() equals the requested value; alpha ≠ 0.
    static JCParams from_rabi(double omega_c, double detuning, double rabi, cplx alpha);
};

Operator jc_hamiltonian(const JCParams& p, int n_max);

// Block n in {|g,n⟩, |e,n−1⟩}: nω_c − (Δ/2)σ_z + g√n σ_x with σ_z = +1 on |g,n⟩.
Matrix jc_block_hamiltonian(int n, const JCParams& p);
// Closed form of exp(−i H^(n) t); n = 0 is the 1×1 block of |g,0⟩.
Matrix jc_block_propagator(int n, double t, const JCParams& p);

struct KrausWindow {
    int m_lo = 0;
    int m_hi = 0;
};
KrausWindow jc_kraus_window(const JCParams& p);

// χ_m = ⟨m|U(t)|α⟩ as 2×2 qubit maps, m over the window.
std::vector<Matrix> jc_kraus_operators(const JCParams& p, double t);
// Σ χ_m ρ χ_m†, summed with a fixed pairwise tree.
DensityMatrix jc_kraus_reduce(const DensityMatrix& rho_s0, const JCParams& p, double t);

// (ω_eg/2)σ_z + g(α*σ_− e^{iω_c t} + α σ_+ e^{−iω_c t}).
Operator jc_semiclassical_hamiltonian(double t, const JCParams& p);
// (Δ/2)σ_z + g(α*σ_− + ασ_+), the generator in the frame rotating at ω_c.
Operator jc_rotating_hamiltonian(const JCParams& p);
Matrix jc_rotating_propagator(double t, const JCParams& p);
// e^{−iω_cσ_z t/2} · rotating propagator.
Matrix jc_semiclassical_propagator(double t, const JCParams& p);
// Period 2π/ω_c, frame ω_cσ_z/2.
DrivenGenerator jc_semiclassical_generator(const JCParams& p);

// Raising F_+ (frequency +Ω) and lowering F_− (−Ω) of the Rabi dynamics,
// the constant of motion W and its normalized form F_0 = √2 W/Ω.
class JCEigenoperators {
public:
    explicit JCEigenoperators(const JCParams& p);

    Operator f_plus(double t) const;
    Operator f_minus(double t) const;
    Operator w(double t) const;
    Operator f0(double t) const;

    double omega() const { return omega_; }
    double normalization() const { return norm_; }

private:
    Operator build(cplx a, cplx b, double t) const;

    JCParams p_;
    double omega_;
    double norm_;
    cplx a_plus_, b_plus_, a_minus_, b_minus_;
};

struct DressedStates {
    Vector plus;   // in {|g,n⟩, |e,n−1⟩}
    Vector minus;
    double e_plus = 0.0;
    double e_minus = 0.0;
    double mixing_angle = 0.0;  // atan2(2g√n, Δ)
    double residual = 0.0;      // max eigen-equation residual
};
DressedStates jc_dressed_states(int n, const JCParams& p);
Vector embed_block_state(int n, const Vector& v, int n_max);

double collapse_envelope(double t, const JCParams& p);

// x^{−j} T_j(x), summed around the Poisson mode.
double touchard_scaled(int j, double x);
double touchard(int j, double x);
double touchard_asymptotic(int j, double x);

}  // namespace gkls
