#include "gkls/jc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gkls {

namespace {

constexpr cplx I1{0.0, 1.0};

// sin(Ωt/2)/Ω with the Ω → 0 limit t/2.
double sin_over(double omega, double t)
{
    if (omega * std::abs(t) < 1e-8) return 0.5 * t;
    return std::sin(0.5 * omega * t) / omega;
}

cplx coherent_amp(double abs_alpha, double phase, int n)
{
    if (n < 0) return 0.0;
    return std::polar(std::exp(log_poisson_amplitude(abs_alpha, n)), n * phase);
}

Matrix tree_sum(std::vector<Matrix>& terms)
{
    if (terms.empty()) return Matrix::Zero(2, 2);
    std::size_t n = terms.size();
    while (n > 1) {
        std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i < n / 2; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (n % 2) terms[n / 2] = terms[n - 1];
        n = half;
    }
    return terms[0];
}

}  // namespace

double JCParams::rabi(double n) const
{
    double d = detuning();
    return std::sqrt(d * d + 4.0 * g * g * n);
}

JCParams JCParams::from_rabi(double omega_c, double detuning, double rabi, cplx alpha)
{
    if (std::abs(alpha) == 0.0)
        throw Error(ErrorCode::domain, "Rabi frequency cannot be set with alpha = 0");
    if (!(rabi > std::abs(detuning)))
        throw Error(ErrorCode::domain, "Rabi frequency must exceed |detuning|");
    JCParams p;
    p.omega_c = omega_c;
    p.omega_eg = omega_c + detuning;
    p.alpha = alpha;
    p.g = std::sqrt(rabi * rabi - detuning * detuning) / (2.0 * std::abs(alpha));
    return p;
}

Operator jc_hamiltonian(const JCParams& p, int n_max)
{
    if (n_max < 1) throw Error(ErrorCode::domain, "JC Hamiltonian needs n_max >= 1");
    const int nf = n_max + 1;
    Operator id_q = qubit::id();
    Operator id_f = Operator::identity(nf);
    Operator a = destroy(nf);
    Operator num = a.adjoint() * a;
    Matrix h = p.omega_c * kron(id_q, num + cplx(0.5) * id_f).data() +
               (0.5 * p.omega_eg) * kron(qubit::sigma_z(), id_f).data() +
               p.g * (kron(qubit::sigma_minus(), a.adjoint()).data() +
                      kron(qubit::sigma_plus(), a).data());
    return Operator(std::move(h), {2, nf});
}

Matrix jc_block_hamiltonian(int n, const JCParams& p)
{
    const double d = p.detuning();
    if (n == 0) return Matrix::Constant(1, 1, cplx(-0.5 * d));
    Matrix h(2, 2);
    double c = p.g * std::sqrt(static_cast<double>(n));
    h << n * p.omega_c - 0.5 * d, c, c, n * p.omega_c + 0.5 * d;
    return h;
}

Matrix jc_block_propagator(int n, double t, const JCParams& p)
{
    const double d = p.detuning();
    if (n == 0) return Matrix::Constant(1, 1, std::exp(I1 * (0.5 * d * t)));
    if (n < 0) throw Error(ErrorCode::domain, "block index must be non-negative");
    const double om = p.rabi(n);
    const double c = std::cos(0.5 * om * t);
    const double so = sin_over(om, t);
    const double k = 2.0 * p.g * std::sqrt(static_cast<double>(n));
    const cplx ph = std::exp(-I1 * (n * p.omega_c * t));
    Matrix u(2, 2);
    u << ph * cplx(c, d * so), ph * cplx(0.0, -k * so),
         ph * cplx(0.0, -k * so), ph * cplx(c, -d * so);
    return u;
}

KrausWindow jc_kraus_window(const JCParams& p)
{
    const double a = std::abs(p.alpha);
    const double nbar = a * a;
    return {std::max(0, static_cast<int>(std::floor(nbar - 10.0 * a))),
            static_cast<int>(std::ceil(nbar + 10.0 * a + 20.0))};
}

std::vector<Matrix> jc_kraus_operators(const JCParams& p, double t)
{
    const KrausWindow w = jc_kraus_window(p);
    const double a = std::abs(p.alpha);
    const double phase = std::arg(p.alpha);
    // amp[i] = c_{m_lo − 1 + i}
    std::vector<cplx> amp(w.m_hi - w.m_lo + 3);
    for (std::size_t i = 0; i < amp.size(); ++i)
        amp[i] = coherent_amp(a, phase, w.m_lo - 1 + static_cast<int>(i));
    std::vector<Matrix> out;
    out.reserve(w.m_hi - w.m_lo + 1);
    Matrix next = jc_block_propagator(w.m_lo, t, p);
    for (int m = w.m_lo; m <= w.m_hi; ++m) {
        const std::size_t i = m - w.m_lo + 1;
        Matrix cur = std::move(next);
        next = jc_block_propagator(m + 1, t, p);
        Matrix chi(2, 2);
        chi(0, 0) = cur(0, 0) * amp[i];
        chi(0, 1) = m == 0 ? cplx(0.0) : cur(0, 1) * amp[i - 1];
        chi(1, 0) = next(1, 0) * amp[i + 1];
        chi(1, 1) = next(1, 1) * amp[i];
        out.push_back(std::move(chi));
    }
    return out;
}

DensityMatrix jc_kraus_reduce(const DensityMatrix& rho_s0, const JCParams& p, double t)
{
    if (rho_s0.dim() != 2) throw Error(ErrorCode::dimension, "Kraus reduction acts on a qubit");
    std::vector<Matrix> chis = jc_kraus_operators(p, t);
    std::vector<Matrix> terms;
    std::vector<Matrix> gram;
    terms.reserve(chis.size());
    gram.reserve(chis.size());
    for (const auto& chi : chis) {
        terms.push_back(chi * rho_s0.data() * chi.adjoint());
        gram.push_back(chi.adjoint() * chi);
    }
    Matrix completeness = tree_sum(gram);
    double deficit = (completeness - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff();
    if (deficit > 1e-6)
        throw Error(ErrorCode::truncation, "Kraus completeness deficit too large", deficit);
    Matrix rho = tree_sum(terms);
    return DensityMatrix(Operator(rho), StateTolerance::trajectory());
}

Operator jc_semiclassical_hamiltonian(double t, const JCParams& p)
{
    const cplx e = std::exp(I1 * (p.omega_c * t));
    Matrix h(2, 2);
    h << -0.5 * p.omega_eg, p.g * std::conj(p.alpha) * e,
         p.g * p.alpha * std::conj(e), 0.5 * p.omega_eg;
    return Operator(std::move(h));
}

Operator jc_rotating_hamiltonian(const JCParams& p)
{
    const double d = p.detuning();
    Matrix h(2, 2);
    h << -0.5 * d, p.g * std::conj(p.alpha), p.g * p.alpha, 0.5 * d;
    return Operator(std::move(h));
}

Matrix jc_rotating_propagator(double t, const JCParams& p)
{
    const double d = p.detuning();
    const double om = p.rabi();
    const double c = std::cos(0.5 * om * t);
    const double so = sin_over(om, t);
    Matrix u(2, 2);
    u << cplx(c, d * so), -I1 * (2.0 * p.g * std::conj(p.alpha) * so),
         -I1 * (2.0 * p.g * p.alpha * so), cplx(c, -d * so);
    return u;
}

Matrix jc_semiclassical_propagator(double t, const JCParams& p)
{
    Matrix u = jc_rotating_propagator(t, p);
    const cplx v = std::exp(I1 * (0.5 * p.omega_c * t));
    u.row(0) *= v;
    u.row(1) *= std::conj(v);
    return u;
}

DrivenGenerator jc_semiclassical_generator(const JCParams& p)
{
    return DrivenGenerator{[p](double t) { return jc_semiclassical_hamiltonian(t, p); },
                           2.0 * std::numbers::pi / p.omega_c,
                           cplx(0.5 * p.omega_c) * qubit::sigma_z()};
}

JCEigenoperators::JCEigenoperators(const JCParams& p) : p_(p), omega_(p.rabi())
{
    const double ga = p.g * std::abs(p.alpha);
    if (!(ga > 0.0))
        throw Error(ErrorCode::domain, "eigenoperators need g|alpha| > 0");
    const double d = p.detuning();
    const double s2 = std::numbers::sqrt2;
    const cplx ga_c = p.g * p.alpha;
    norm_ = s2 * ga / omega_;
    a_plus_ = s2 * std::conj(ga_c) / (d - omega_) + omega_ / (s2 * ga_c);
    b_plus_ = s2 * ga_c / (d - omega_);
    a_minus_ = s2 * std::conj(ga_c) / (d + omega_) - omega_ / (s2 * ga_c);
    b_minus_ = s2 * ga_c / (d + omega_);
}

Operator JCEigenoperators::build(cplx a, cplx b, double t) const
{
    const cplx e = std::exp(I1 * (p_.omega_c * t));
    Matrix f(2, 2);
    f << -1.0 / std::numbers::sqrt2, a * e, b * std::conj(e), 1.0 / std::numbers::sqrt2;
    return Operator(norm_ * f);
}

Operator JCEigenoperators::f_plus(double t) const { return build(a_plus_, b_plus_, t); }
Operator JCEigenoperators::f_minus(double t) const { return build(a_minus_, b_minus_, t); }

Operator JCEigenoperators::w(double t) const
{
    const cplx e = std::exp(I1 * (p_.omega_c * t));
    const double d = p_.detuning();
    Matrix m(2, 2);
    m << -0.5 * d, p_.g * std::conj(p_.alpha) * e, p_.g * p_.alpha * std::conj(e), 0.5 * d;
    return Operator(std::move(m));
}

Operator JCEigenoperators::f0(double t) const
{
    return cplx(std::numbers::sqrt2 / omega_) * w(t);
}

DressedStates jc_dressed_states(int n, const JCParams& p)
{
    if (n < 1) throw Error(ErrorCode::domain, "dressed states need n >= 1");
    DressedStates out;
    const double d = p.detuning();
    out.mixing_angle = std::atan2(2.0 * p.g * std::sqrt(static_cast<double>(n)), d);
    const double sh = std::sin(0.5 * out.mixing_angle);
    const double ch = std::cos(0.5 * out.mixing_angle);
    out.plus = Vector(2);
    out.plus << sh, ch;
    out.minus = Vector(2);
    out.minus << -ch, sh;
    const double om = p.rabi(n);
    out.e_plus = n * p.omega_c + 0.5 * om;
    out.e_minus = n * p.omega_c - 0.5 * om;
    Matrix h = jc_block_hamiltonian(n, p);
    out.residual = std::max((h * out.plus - out.e_plus * out.plus).cwiseAbs().maxCoeff(),
                            (h * out.minus - out.e_minus * out.minus).cwiseAbs().maxCoeff());
    return out;
}

Vector embed_block_state(int n, const Vector& v, int n_max)
{
    if (n < 1 || n > n_max) throw Error(ErrorCode::domain, "block index outside the Fock cutoff");
    Vector out = Vector::Zero(2 * (n_max + 1));
    out(n) = v(0);
    out((n_max + 1) + n - 1) = v(1);
    return out;
}

double collapse_envelope(double t, const JCParams& p)
{
    const double nbar = p.mean_photons();
    const double d = p.detuning();
    const double denom = d * d + 4.0 * nbar * p.g * p.g;
    if (denom == 0.0) return 1.0;
    const double gt = p.g * t;
    return std::exp(-(2.0 * nbar * p.g * p.g / denom) * gt * gt);
}

double touchard_scaled(int j, double x)
{
    if (j < 0 || j > 12) throw Error(ErrorCode::domain, "Touchard order must be in [0, 12]");
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::domain, "Touchard argument must be positive");
    const int mode = static_cast<int>(std::floor(x));
    const double p_mode = std::exp(mode * std::log(x) - x - std::lgamma(mode + 1.0));
    auto moment = [&](int k) { return std::pow(k / x, j); };
    double norm = p_mode;
    double sum = p_mode * moment(mode);
    double p = p_mode;
    for (int k = mode + 1;; ++k) {
        p *= x / k;
        double term = p * moment(k);
        sum += term;
        norm += p;
        if (term < 1e-18 * sum && p < 1e-18 * norm) break;
    }
    p = p_mode;
    for (int k = mode - 1; k >= 0; --k) {
        p *= (k + 1) / x;
        double term = p * moment(k);
        sum += term;
        norm += p;
        if (term < 1e-18 * sum && p < 1e-18 * norm) break;
    }
    return sum / norm;
}

double touchard(int j, double x) { return std::pow(x, j) * touchard_scaled(j, x); }

double touchard_asymptotic(int j, double x)
{
    if (j < 0 || j > 12) throw Error(ErrorCode::domain, "Touchard order must be in [0, 12]");
    return std::pow(x, j) * (1.0 + j * (j - 1) / (2.0 * x));
}

}  // namespace gkls
