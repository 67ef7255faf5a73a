#include "gkls/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace gkls {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::contract: return "contract";
    case ErrorCode::domain: return "domain";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::degeneracy: return "degeneracy";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    }
    return "unknown";
}

namespace {

int product(const std::vector<int>& dims)
{
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

void require_square(const Matrix& m)
{
    if (m.rows() != m.cols())
        throw Error(ErrorCode::dimension, "operator must be square, got " +
                                              std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
}

Matrix hermitian_function(const Matrix& h, double (*f)(double))
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    RealVector v = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
}

double entropy_of(const RealVector& p)
{
    double s = 0.0;
    for (double x : p)
        if (x > 1e-300) s -= x * std::log(x);
    return s;
}

}  // namespace

Operator::Operator(Matrix data) : data_(std::move(data))
{
    require_square(data_);
    dims_ = {static_cast<int>(data_.rows())};
}

Operator::Operator(Matrix data, std::vector<int> dims)
    : data_(std::move(data)), dims_(std::move(dims))
{
    require_square(data_);
    if (dims_.empty()) dims_ = {static_cast<int>(data_.rows())};
    if (product(dims_) != data_.rows())
        throw Error(ErrorCode::dimension,
                    "subsystem dims do not multiply to the matrix dimension");
}

Operator Operator::identity(int d) { return Operator(Matrix::Identity(d, d)); }
Operator Operator::zero(int d) { return Operator(Matrix::Zero(d, d)); }

Operator Operator::adjoint() const { return Operator(data_.adjoint(), dims_); }

bool Operator::is_hermitian(double tol) const
{
    return (data_ - data_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double Operator::max_abs() const
{
    return data_.size() == 0 ? 0.0 : data_.cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& o)
{
    if (o.dim() != dim()) throw Error(ErrorCode::dimension, "operator sum dims differ");
    data_ += o.data_;
    return *this;
}

Operator& Operator::operator-=(const Operator& o)
{
    if (o.dim() != dim()) throw Error(ErrorCode::dimension, "operator difference dims differ");
    data_ -= o.data_;
    return *this;
}

Operator& Operator::operator*=(cplx s)
{
    data_ *= s;
    return *this;
}

Operator operator+(Operator a, const Operator& b) { return a += b; }
Operator operator-(Operator a, const Operator& b) { return a -= b; }
Operator operator*(cplx s, Operator a) { return a *= s; }
Operator operator*(Operator a, cplx s) { return a *= s; }

Operator operator*(const Operator& a, const Operator& b)
{
    if (a.dim() != b.dim()) throw Error(ErrorCode::dimension, "operator product dims differ");
    return Operator(a.data() * b.data(), a.dims());
}

DensityMatrix::DensityMatrix(const Operator& op, StateTolerance tol)
{
    const Matrix& m = op.data();
    double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.hermitian)
        throw Error(ErrorCode::contract, "state is not Hermitian", herm);
    cplx tr = m.trace();
    if (std::abs(tr - 1.0) > tol.trace)
        throw Error(ErrorCode::contract, "state trace differs from 1", std::abs(tr - 1.0));
    Matrix h = 0.5 * (m + m.adjoint());
    double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly)
                      .eigenvalues()(0);
    if (lmin < tol.min_eigenvalue)
        throw Error(ErrorCode::contract, "state has a negative eigenvalue", lmin);
    op_ = Operator(std::move(h), op.dims());
}

DensityMatrix DensityMatrix::pure(const Vector& psi, std::vector<int> dims)
{
    Vector u = psi / psi.norm();
    return DensityMatrix(Operator(u * u.adjoint(), std::move(dims)));
}

Superoperator::Superoperator(Matrix data, int source_dim)
    : data_(std::move(data)), source_dim_(source_dim)
{
    if (data_.rows() != data_.cols() ||
        data_.rows() != static_cast<Eigen::Index>(source_dim) * source_dim)
        throw Error(ErrorCode::dimension, "superoperator must be d^2 x d^2");
}

Superoperator Superoperator::zero(int d) { return {Matrix::Zero(d * d, d * d), d}; }
Superoperator Superoperator::identity(int d) { return {Matrix::Identity(d * d, d * d), d}; }

Operator Superoperator::apply(const Operator& x) const
{
    if (x.dim() != source_dim_)
        throw Error(ErrorCode::dimension, "superoperator applied to operator of wrong size");
    return Operator(unvec(data_ * vec(x), source_dim_).data(), x.dims());
}

Superoperator& Superoperator::operator+=(const Superoperator& o)
{
    if (o.source_dim_ != source_dim_)
        throw Error(ErrorCode::dimension, "superoperator sum dims differ");
    data_ += o.data_;
    return *this;
}

Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
Superoperator operator*(double s, Superoperator a) { return {a.data() * s, a.source_dim()}; }
Superoperator operator*(cplx s, Superoperator a) { return {a.data() * s, a.source_dim()}; }

Superoperator operator*(const Superoperator& a, const Superoperator& b)
{
    if (a.source_dim() != b.source_dim())
        throw Error(ErrorCode::dimension, "superoperator product dims differ");
    return {a.data() * b.data(), a.source_dim()};
}

Operator kron(const Operator& a, const Operator& b)
{
    const Matrix& x = a.data();
    const Matrix& y = b.data();
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    std::vector<int> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return Operator(std::move(out), std::move(dims));
}

Vector vec(const Operator& a)
{
    return Eigen::Map<const Vector>(a.data().data(), a.data().size());
}

Operator unvec(const Vector& v, int d)
{
    auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    if (static_cast<Eigen::Index>(n) * n != v.size())
        throw Error(ErrorCode::dimension,
                    "vector length " + std::to_string(v.size()) + " is not a perfect square");
    if (d >= 0 && d != n)
        throw Error(ErrorCode::dimension, "vector length does not match requested dimension");
    return Operator(Eigen::Map<const Matrix>(v.data(), n, n));
}

Superoperator commutator_super(const Operator& h)
{
    int d = h.dim();
    Operator id = Operator::identity(d);
    Operator ht(h.data().transpose());
    return {kron(id, h).data() - kron(ht, id).data(), d};
}

Superoperator sandwich_super(const Operator& a, const Operator& b)
{
    if (a.dim() != b.dim())
        throw Error(ErrorCode::dimension, "sandwich operands have different dims");
    return {kron(Operator(b.data().transpose()), a).data(), a.dim()};
}

void fix_phase_first(Eigen::Ref<Vector> v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double m = std::abs(v(i));
        if (m > 1e-8) {
            v *= std::conj(v(i)) / m;
            v(i) = cplx(m, 0.0);
            return;
        }
    }
}

Eigensystem hermitian_eig(const Operator& h, double tol)
{
    const Matrix& m = h.data();
    double herm = m.size() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0;
    if (herm > tol)
        throw Error(ErrorCode::contract, "hermitian_eig on non-Hermitian input", herm);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::numerical, "Hermitian eigensolver did not converge");
    Eigensystem out{es.eigenvalues(), es.eigenvectors()};
    const Eigen::Index n = out.values.size();
    for (Eigen::Index k = 0; k < n; ++k) fix_phase_first(out.vectors.col(k));

    // Order each degenerate cluster by leading-entry position, then its real value.
    auto key_less = [&](Eigen::Index a, Eigen::Index b) {
        auto lead = [&](Eigen::Index c) {
            for (Eigen::Index i = 0; i < n; ++i)
                if (std::abs(out.vectors(i, c)) > 1e-8) return i;
            return n;
        };
        Eigen::Index la = lead(a), lb = lead(b);
        if (la != lb) return la < lb;
        return out.vectors(la, a).real() > out.vectors(lb, b).real();
    };
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && out.values(stop) - out.values(start) <
                               1e-9 * std::max(1.0, std::abs(out.values(start))))
            ++stop;
        if (stop - start > 1) {
            std::vector<Eigen::Index> idx(stop - start);
            std::iota(idx.begin(), idx.end(), start);
            std::stable_sort(idx.begin(), idx.end(), key_less);
            Matrix block(n, stop - start);
            for (std::size_t j = 0; j < idx.size(); ++j) block.col(j) = out.vectors.col(idx[j]);
            out.vectors.middleCols(start, stop - start) = block;
        }
        start = stop;
    }
    return out;
}

Matrix matrix_exp(const Matrix& a)
{
    if (!a.allFinite()) throw Error(ErrorCode::domain, "matrix_exp of non-finite matrix");
    return a.exp();
}

Operator matrix_exp(const Operator& a) { return Operator(matrix_exp(a.data()), a.dims()); }

Operator partial_trace(const Operator& op, int keep)
{
    const auto& dims = op.dims();
    if (dims.size() < 2)
        throw Error(ErrorCode::dimension, "partial trace needs at least two subsystems");
    if (keep < 0 || keep >= static_cast<int>(dims.size()))
        throw Error(ErrorCode::dimension, "partial trace index out of range");
    int before = 1, after = 1;
    for (int i = 0; i < keep; ++i) before *= dims[i];
    for (std::size_t i = keep + 1; i < dims.size(); ++i) after *= dims[i];
    const int dk = dims[keep];
    const Matrix& m = op.data();
    Matrix out = Matrix::Zero(dk, dk);
    for (int a = 0; a < before; ++a)
        for (int i = 0; i < dk; ++i)
            for (int j = 0; j < dk; ++j)
                for (int b = 0; b < after; ++b)
                    out(i, j) += m((a * dk + i) * after + b, (a * dk + j) * after + b);
    return Operator(std::move(out), {dk});
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep)
{
    return DensityMatrix(partial_trace(rho.op(), keep), StateTolerance::trajectory());
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma)
{
    if (rho.dim() != sigma.dim())
        throw Error(ErrorCode::dimension, "fidelity of states with different dims");
    Matrix sr = hermitian_function(rho.data(), [](double x) { return std::sqrt(std::max(x, 0.0)); });
    Matrix m = sr * sigma.data() * sr;
    RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.adjoint()),
                                                          Eigen::EigenvaluesOnly)
                        .eigenvalues();
    double s = 0.0;
    for (double x : ev) s += std::sqrt(std::max(x, 0.0));
    return std::clamp(s * s, 0.0, 1.0);
}

double von_neumann_entropy(const DensityMatrix& rho)
{
    return entropy_of(Eigen::SelfAdjointEigenSolver<Matrix>(rho.data(), Eigen::EigenvaluesOnly)
                          .eigenvalues());
}

double coherence_rel_entropy(const DensityMatrix& rho, const Matrix& basis)
{
    if (basis.rows() != rho.dim() || basis.cols() != rho.dim())
        throw Error(ErrorCode::dimension, "basis does not match state dimension");
    Matrix r = basis.adjoint() * rho.data() * basis;
    RealVector p = r.diagonal().real();
    return entropy_of(p) - von_neumann_entropy(rho);
}

double coherence_rel_entropy(const DensityMatrix& rho, std::span<const Operator> projectors)
{
    Matrix dephased = Matrix::Zero(rho.dim(), rho.dim());
    for (const auto& p : projectors) {
        if (p.dim() != rho.dim())
            throw Error(ErrorCode::dimension, "projector does not match state dimension");
        dephased += p.data() * rho.data() * p.data();
    }
    Matrix h = 0.5 * (dephased + dephased.adjoint());
    RealVector p = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
    return entropy_of(p) - von_neumann_entropy(rho);
}

int default_fock_cutoff(cplx alpha)
{
    double a = std::abs(alpha);
    return static_cast<int>(std::ceil(a * a + 10.0 * a + 20.0));
}

double log_poisson_amplitude(double abs_alpha, int n)
{
    if (abs_alpha == 0.0) return n == 0 ? 0.0 : -INFINITY;
    return n * std::log(abs_alpha) - 0.5 * abs_alpha * abs_alpha -
           0.5 * std::lgamma(n + 1.0);
}

Vector coherent_state(cplx alpha, int n_max)
{
    if (n_max < 0) n_max = default_fock_cutoff(alpha);
    const double a = std::abs(alpha);
    const double phi = std::arg(alpha);
    Vector psi(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        psi(n) = std::polar(std::exp(log_poisson_amplitude(a, n)), n * phi);
    double weight = psi.squaredNorm();
    if (1.0 - weight > 1e-12)
        throw Error(ErrorCode::truncation,
                    "Fock cutoff " + std::to_string(n_max) + " keeps weight " +
                        std::to_string(weight),
                    weight);
    return psi / std::sqrt(weight);
}

Operator destroy(int n_levels)
{
    Matrix a = Matrix::Zero(n_levels, n_levels);
    for (int n = 1; n < n_levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return Operator(std::move(a));
}

namespace qubit {

Operator id() { return Operator::identity(2); }

Operator sigma_minus()
{
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return Operator(std::move(m));
}

Operator sigma_plus() { return sigma_minus().adjoint(); }
Operator sigma_x() { return sigma_plus() + sigma_minus(); }
Operator sigma_y() { return cplx(0, -1) * (sigma_plus() - sigma_minus()); }

Operator sigma_z()
{
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return Operator(std::move(m));
}

Vector ground() { return Vector::Unit(2, 0); }
Vector excited() { return Vector::Unit(2, 1); }

}  // namespace qubit

}  // namespace gkls
