#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gkls/error.hpp"

namespace gkls {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;

// Dense d×d matrix tagged with a tensor-product structure; prod(dims) == d.
class Operator {
public:
    Operator() = default;
    explicit Operator(Matrix data);
    Operator(Matrix data, std::vector<int> dims);

    static Operator identity(int d);
    static Operator zero(int d);

    const Matrix& data() const { return data_; }
    const std::vector<int>& dims() const { return dims_; }
    int dim() const { return static_cast<int>(data_.rows()); }

    cplx operator()(int r, int c) const { return data_(r, c); }

    Operator adjoint() const;
    cplx trace() const { return data_.trace(); }
    bool is_hermitian(double tol = kHermitianTol) const;
    double max_abs() const;

    Operator& operator+=(const Operator& o);
    Operator& operator-=(const Operator& o);
    Operator& operator*=(cplx s);

private:
    Matrix data_;
    std::vector<int> dims_;
};

Operator operator+(Operator a, const Operator& b);
Operator operator-(Operator a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(cplx s, Operator a);
Operator operator*(Operator a, cplx s);

// Tolerances applied when a matrix is admitted as a state.
struct StateTolerance {
    double trace = 1e-10;
    double hermitian = 1e-12;
    double min_eigenvalue = -1e-10;

    static StateTolerance strict() { return {}; }
    static StateTolerance trajectory() { return {1e-8, 1e-9, -1e-7}; }
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    // Validates against tol and stores the Hermitian part.
    explicit DensityMatrix(const Operator& op,
                           StateTolerance tol = StateTolerance::strict());

    static DensityMatrix pure(const Vector& psi, std::vector<int> dims = {});

    const Operator& op() const { return op_; }
    const Matrix& data() const { return op_.data(); }
    int dim() const { return op_.dim(); }

private:
    Operator op_;
};

// d²×d² matrix acting on column-stacked operators.
class Superoperator {
public:
    Superoperator() = default;
    Superoperator(Matrix data, int source_dim);

    static Superoperator zero(int d);
    static Superoperator identity(int d);

    const Matrix& data() const { return data_; }
    int source_dim() const { return source_dim_; }

    Operator apply(const Operator& x) const;

    Superoperator& operator+=(const Superoperator& o);

private:
    Matrix data_;
    int source_dim_ = 0;
};

Superoperator operator+(Superoperator a, const Superoperator& b);
Superoperator operator*(double s, Superoperator a);
Superoperator operator*(cplx s, Superoperator a);
Superoperator operator*(const Superoperator& a, const Superoperator& b);

Operator kron(const Operator& a, const Operator& b);

// Entry (a,b) of an M×M operator lands at index b*M + a (zero-based).
Vector vec(const Operator& a);
Operator unvec(const Vector& v, int d = -1);

// I⊗H − Hᵀ⊗I, the matrix of X ↦ [H, X].
Superoperator commutator_super(const Operator& h);
// Bᵀ⊗A, the matrix of X ↦ A X B.
Superoperator sandwich_super(const Operator& a, const Operator& b);

struct Eigensystem {
    RealVector values;  // ascending
    Matrix vectors;     // columns, unitary
};

// Ties within 1e-9·max(1,|ε|) are ordered by the phase-fixed leading entry.
Eigensystem hermitian_eig(const Operator& h, double tol = 1e-10);
// Fixes the first entry with modulus > 1e-8 to be real-positive.
void fix_phase_first(Eigen::Ref<Vector> v);

Matrix matrix_exp(const Matrix& a);
Operator matrix_exp(const Operator& a);

// keep indexes dims(); the other subsystems are traced out.
DensityMatrix partial_trace(const DensityMatrix& rho, int keep);
Operator partial_trace(const Operator& op, int keep);

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double von_neumann_entropy(const DensityMatrix& rho);

// S(Δ(ρ)) − S(ρ) with Δ the dephasing in the columns of basis.
double coherence_rel_entropy(const DensityMatrix& rho, const Matrix& basis);
// Same with Δ(ρ) = Σ Π ρ Π for orthogonal projectors that sum to I.
double coherence_rel_entropy(const DensityMatrix& rho,
                             std::span<const Operator> projectors);

int default_fock_cutoff(cplx alpha);
// Amplitudes on |0..n_max⟩; a tail heavier than 1e-12 is a truncation error.
Vector coherent_state(cplx alpha, int n_max = -1);
// log|c_n| and arg c_n of the untruncated coherent amplitudes.
double log_poisson_amplitude(double abs_alpha, int n);

Operator destroy(int n_levels);

namespace qubit {
// Basis order {|g⟩, |e⟩}; σ_z|e⟩ = |e⟩.
Operator id();
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();
Operator sigma_minus();
Operator sigma_plus();
Vector ground();
Vector excited();
}  // namespace qubit

}  // namespace gkls
