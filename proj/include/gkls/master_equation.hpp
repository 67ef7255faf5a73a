#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkls/eigenops.hpp"
#include "gkls/operator.hpp"

namespace gkls {

// rate·(F•F† − ½{F†F,•}) + reverse_rate·(F†•F − ½{FF†,•}).
struct Channel {
    Operator jump;
    double rate = 0.0;
    double reverse_rate = 0.0;
};

// −Σ λ_j [V_j,[V_j,•]], V_j Hermitian, λ_j ≥ 0.
struct AutonomousDephasing {
    std::vector<Operator> ops;
    std::vector<double> weights;
};

// Σ χ_ij (W_i•W_j† − ½{W_j†W_i,•}), χ positive semidefinite.
struct InvariantDephasing {
    std::vector<Operator> ops;
    Matrix chi;
};

struct DissipatorSpec {
    std::vector<Channel> channels;
    std::optional<AutonomousDephasing> dephasing;
    std::optional<InvariantDephasing> invariant_dephasing;
    std::optional<Operator> lamb_shift;
};

struct AttractorResult {
    DensityMatrix state;
    Operator effective_hamiltonian;
    std::vector<double> deltas;
    double residual = 0.0;
    std::vector<std::string> warnings;
};

Superoperator lindblad_term(const Operator& l, double rate);
Superoperator build_dissipator(const DissipatorSpec& spec, int dim = -1);

// One pair (γ_nm, γ_mn) per Bohr frequency ω_nm = ε_m − ε_n; the channel
// with ω > 0 lowers the energy and carries the base rate. beta may be +inf.
std::vector<std::pair<double, double>> detailed_balance_rates(const std::vector<double>& freqs,
                                                              double beta,
                                                              const std::vector<double>& base);

// Z⁻¹exp(−H̄), H̄ = Σ (η/2)(F†F − FF†), η = ln(rate/reverse_rate). When the
// eigenset carries energies and projectors the residual includes −i[H_D,•].
AttractorResult fixed_point(const DissipatorSpec& spec,
                            const EigenoperatorSet* eigenset = nullptr);

// Channels must satisfy F² = 0 and tr(F_k†F_l) = δ_kl; dephasing blocks in
// spec enter the residual only.
AttractorResult instantaneous_attractor(const DissipatorSpec& spec);
AttractorResult instantaneous_attractor(const std::vector<Channel>& channels);

// −i↔H + D; D must annihilate the trace.
Superoperator liouvillian(const Operator& h_eff, const Superoperator& d);

// ‖e^{Lt}U(s) − U(s)e^{Lt}‖_max with U(s) = exp(−i↔H_D s).
double check_time_translation(const Superoperator& l, const Operator& h_d, double t, double s);

// Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|), ordered so the first factor is the input index.
Matrix choi_matrix(const Superoperator& map);

// Null vector of the Liouvillian as a state (SVD).
DensityMatrix null_state(const Superoperator& l);

}  // namespace gkls
