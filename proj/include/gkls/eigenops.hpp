#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkls/operator.hpp"
#include "gkls/time_grid.hpp"

namespace gkls {

// bohr: ω_nm = ε_m − ε_n for G_nm = |ψ_n⟩⟨ψ_m|.
// heisenberg: U†(t) P(t) U(t) = e^{iλt} P(0), so λ = −ω_nm for static H.
enum class FrequencyConvention { bohr, heisenberg };

struct EigenoperatorSet {
    std::vector<Operator> ops;
    std::vector<double> freqs;
    std::vector<bool> invariant;
    std::vector<Operator> projectors;
    RealVector energies;
    FrequencyConvention convention = FrequencyConvention::bohr;
    // Index pairs into ops whose non-zero frequencies coincide.
    std::vector<std::pair<int, int>> collisions;
    std::vector<std::string> warnings;

    std::size_t size() const { return ops.size(); }
};

struct DrivenGenerator {
    std::function<Operator(double)> hamiltonian;
    std::optional<double> period;
    // Static K such that eigenoperators evolve as e^{−iKt} P e^{iKt} in the
    // Schrödinger picture; absent means K = 0.
    std::optional<Operator> frame;

    int dim() const { return hamiltonian(0.0).dim(); }
};

DrivenGenerator static_generator(const Operator& h, std::optional<double> period = {});

EigenoperatorSet static_eigenoperators(const Operator& h);

// Spectral projectors grouped by degenerate eigenvalue.
std::vector<Operator> energy_projectors(const Operator& h);

struct BohrCheck {
    bool nondegenerate = true;
    // ((n,m),(k,l)) with ω_nm = ω_kl.
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> collisions;
};
BohrCheck bohr_nondegenerate(const Operator& h);

// Matrix of X ↦ i[H(t), X].
Superoperator heisenberg_generator(const DrivenGenerator& gen, double t);

// U(t1) U(t0)^{-1} from i dU/dt = H U, adaptive, unitarity projected every 100 steps.
Matrix schrodinger_propagator(const DrivenGenerator& gen, double t0, double t1,
                              const Matrix& u0);
std::vector<Matrix> propagator_series(const DrivenGenerator& gen,
                                      const std::vector<double>& times);

// Floquet eigenoperators |u_a⟩⟨u_b| of the one-period map, frequencies in
// the Heisenberg convention. Quasi-phases are unwrapped continuously along
// e^{iKt}U(t), which fixes the branch of θ/T.
EigenoperatorSet monodromy_eigenoperators(const DrivenGenerator& gen);

struct FrequencyEigenpairs {
    RealVector values;  // eigenvalues of I⊗H − Hᵀ⊗I − ω, equal to −λ
    std::vector<Operator> ops;
};
FrequencyEigenpairs frequency_eigenoperators(const Operator& h, double omega);

// max_t ‖U†(t) P(t) U(t) − e^{iλt} P(0)‖_max over the grid.
double verify_eigenoperator(const Operator& p, double lambda, const DrivenGenerator& gen,
                            const TimeGrid& grid);

// Largest-modulus entry made real-positive.
Operator fix_phase_largest(const Operator& p);

}  // namespace gkls
