#include "gkls/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace gkls {

namespace {

constexpr double kRankOneTol = 1e-8;

int spec_dim(const DissipatorSpec& spec, int dim)
{
    auto take = [&dim](const Operator& op) {
        if (dim < 0) dim = op.dim();
        else if (op.dim() != dim)
            throw Error(ErrorCode::dimension, "dissipator operators have mixed dimensions");
    };
    for (const auto& c : spec.channels) take(c.jump);
    if (spec.dephasing)
        for (const auto& v : spec.dephasing->ops) take(v);
    if (spec.invariant_dephasing)
        for (const auto& w : spec.invariant_dephasing->ops) take(w);
    if (spec.lamb_shift) take(*spec.lamb_shift);
    if (dim < 0) throw Error(ErrorCode::dimension, "empty dissipator needs an explicit dimension");
    return dim;
}

void require_rate(double r, const char* what)
{
    if (!std::isfinite(r)) throw Error(ErrorCode::domain, std::string(what) + " is not finite");
    if (r < 0.0) throw Error(ErrorCode::contract, std::string(what) + " is negative", r);
}

Superoperator anticommutator_half(const Operator& a)
{
    Operator id = Operator::identity(a.dim());
    return 0.5 * (sandwich_super(a, id) + sandwich_super(id, a));
}

double vec_max(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct Transition {
    Vector source;
    Vector target;
};

// For F ∝ |n⟩⟨m| returns (|m⟩, |n⟩).
std::optional<Transition> as_transition(const Operator& f)
{
    double nrm = f.data().norm();
    if (nrm == 0.0) return std::nullopt;
    Matrix g = f.data() / nrm;
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (std::abs(s(0) - 1.0) > kRankOneTol || (s.size() > 1 && s(1) > kRankOneTol))
        return std::nullopt;
    Vector tgt = svd.matrixU().col(0);
    Vector src = svd.matrixV().col(0);
    if (std::abs(src.dot(tgt)) > kRankOneTol) return std::nullopt;
    return Transition{src, tgt};
}

int find_level(std::vector<Vector>& levels, const Vector& v)
{
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (std::abs(levels[i].dot(v)) > 1.0 - kRankOneTol) return static_cast<int>(i);
    levels.push_back(v);
    return static_cast<int>(levels.size()) - 1;
}

// Effective Hamiltonian for finite η per channel. Transition-type channels are
// solved as level potentials f with f_source − f_target = η; otherwise the
// single-channel form (η/2)(F†F − FF†)/‖F‖² is summed.
Operator effective_hamiltonian(const std::vector<Channel>& channels,
                               const std::vector<double>& etas, int d,
                               std::vector<std::string>& warnings)
{
    std::vector<Transition> trans;
    for (const auto& c : channels) {
        auto t = as_transition(c.jump);
        if (!t) break;
        trans.push_back(*t);
    }
    if (trans.size() != channels.size()) {
        Matrix h = Matrix::Zero(d, d);
        for (std::size_t k = 0; k < channels.size(); ++k) {
            const Matrix& f = channels[k].jump.data();
            h += (etas[k] / 2.0) * (f.adjoint() * f - f * f.adjoint()) / f.squaredNorm();
        }
        return Operator(h, channels.empty() ? std::vector<int>{d} : channels[0].jump.dims());
    }

    std::vector<Vector> levels;
    std::vector<std::pair<int, int>> edges;
    for (const auto& t : trans) edges.push_back({find_level(levels, t.source), find_level(levels, t.target)});
    const int nl = static_cast<int>(levels.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<int>(edges.size()) + 1, nl);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<int>(edges.size()) + 1);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        a(k, edges[k].first) += 1.0;
        a(k, edges[k].second) -= 1.0;
        b(k) = etas[k];
    }
    a.row(edges.size()).setOnes();
    Eigen::VectorXd f = a.completeOrthogonalDecomposition().solve(b);
    double mismatch = (a * f - b).cwiseAbs().maxCoeff();
    if (mismatch > 1e-9)
        warnings.push_back("channel log-ratios are not consistent around cycles");
    Matrix basis(d, nl);
    for (int i = 0; i < nl; ++i) basis.col(i) = levels[i];
    if (nl < d)
        warnings.push_back("channels do not connect every level; fixed point is not unique");
    Matrix h = basis * f.cast<cplx>().asDiagonal() * basis.adjoint();
    return Operator(h, channels[0].jump.dims());
}

void check_orthogonal(const std::vector<Channel>& channels, bool require_unit)
{
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const Matrix& fk = channels[k].jump.data();
        if (require_unit && std::abs(fk.squaredNorm() - 1.0) > 1e-10)
            throw Error(ErrorCode::contract, "jump operator is not normalized");
        for (std::size_t l = k + 1; l < channels.size(); ++l) {
            const Matrix& fl = channels[l].jump.data();
            double ov = std::abs((fk.adjoint() * fl).trace());
            if (ov > 1e-8 * fk.norm() * fl.norm())
                throw Error(ErrorCode::contract, "jump operators are not orthogonal", ov);
        }
    }
}

AttractorResult attractor_from(const DissipatorSpec& spec, const Superoperator& l, int d,
                               bool with_commutation_check)
{
    AttractorResult out;
    std::vector<double> etas;
    bool zero_temperature = false;
    std::vector<Channel> live;
    for (const auto& c : spec.channels) {
        if (c.rate == 0.0 && c.reverse_rate == 0.0) continue;
        if (c.rate == 0.0 || c.reverse_rate == 0.0) {
            zero_temperature = true;
            out.deltas.push_back(c.rate == 0.0 ? -INFINITY : INFINITY);
            continue;
        }
        double eta = std::log(c.rate / c.reverse_rate);
        out.deltas.push_back(eta);
        etas.push_back(eta);
        live.push_back(c);
    }
    if (zero_temperature) {
        out.warnings.push_back("zero reverse rate: log-ratio undefined, using the Liouvillian null space");
        out.state = null_state(l);
        out.effective_hamiltonian = Operator::zero(d);
    } else {
        out.effective_hamiltonian = effective_hamiltonian(live, etas, d, out.warnings);
        Matrix e = matrix_exp(Matrix(-out.effective_hamiltonian.data()));
        e /= e.trace();
        out.state = DensityMatrix(Operator(0.5 * (e + e.adjoint()), out.effective_hamiltonian.dims()));
        if (with_commutation_check) {
            const Matrix& hb = out.effective_hamiltonian.data();
            double worst = 0.0;
            for (std::size_t k = 0; k < live.size(); ++k) {
                const Matrix& f = live[k].jump.data();
                worst = std::max(worst, (hb * f - f * hb + etas[k] * f).cwiseAbs().maxCoeff());
            }
            if (worst > 1e-10)
                out.warnings.push_back("effective Hamiltonian fails [H, F] = -delta F by " +
                                       std::to_string(worst));
        }
    }
    out.residual = vec_max(l.data() * vec(out.state.op()));
    return out;
}

}  // namespace

Superoperator lindblad_term(const Operator& l, double rate)
{
    Operator ld = l.adjoint();
    Superoperator s = sandwich_super(l, ld);
    s += -1.0 * anticommutator_half(ld * l);
    return rate * s;
}

Superoperator build_dissipator(const DissipatorSpec& spec, int dim)
{
    const int d = spec_dim(spec, dim);
    Superoperator out = Superoperator::zero(d);
    for (const auto& c : spec.channels) {
        require_rate(c.rate, "channel rate");
        require_rate(c.reverse_rate, "reverse channel rate");
        if (c.rate != 0.0) out += lindblad_term(c.jump, c.rate);
        if (c.reverse_rate != 0.0) out += lindblad_term(c.jump.adjoint(), c.reverse_rate);
    }
    if (spec.dephasing) {
        const auto& dp = *spec.dephasing;
        if (dp.ops.size() != dp.weights.size())
            throw Error(ErrorCode::dimension, "dephasing operators and weights differ in count");
        for (std::size_t j = 0; j < dp.ops.size(); ++j) {
            require_rate(dp.weights[j], "dephasing weight");
            const Operator& v = dp.ops[j];
            if (!v.is_hermitian(1e-10))
                throw Error(ErrorCode::contract, "dephasing operator is not Hermitian");
            Operator id = Operator::identity(d);
            Operator v2 = v * v;
            Superoperator dc = sandwich_super(v2, id) + sandwich_super(id, v2) +
                               (-2.0) * sandwich_super(v, v);
            out += (-dp.weights[j]) * dc;
        }
    }
    if (spec.invariant_dephasing) {
        const auto& ip = *spec.invariant_dephasing;
        const auto n = static_cast<Eigen::Index>(ip.ops.size());
        if (ip.chi.rows() != n || ip.chi.cols() != n)
            throw Error(ErrorCode::dimension, "chi matrix does not match invariant operators");
        if (n > 0) {
            double herm = (ip.chi - ip.chi.adjoint()).cwiseAbs().maxCoeff();
            double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (ip.chi + ip.chi.adjoint()),
                                                                Eigen::EigenvaluesOnly)
                              .eigenvalues()(0);
            if (herm > 1e-10 || lmin < -1e-10)
                throw Error(ErrorCode::contract, "chi matrix is not positive semidefinite", lmin);
        }
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                cplx c = ip.chi(i, j);
                if (c == cplx(0.0)) continue;
                const Operator& wi = ip.ops[i];
                Operator wjd = ip.ops[j].adjoint();
                Superoperator t = sandwich_super(wi, wjd);
                t += -1.0 * anticommutator_half(wjd * wi);
                out += c * t;
            }
    }
    return out;
}

std::vector<std::pair<double, double>> detailed_balance_rates(const std::vector<double>& freqs,
                                                              double beta,
                                                              const std::vector<double>& base)
{
    if (freqs.size() != base.size())
        throw Error(ErrorCode::dimension, "frequencies and base rates differ in count");
    if (std::isnan(beta) || beta < 0.0)
        throw Error(ErrorCode::domain, "inverse temperature must be non-negative");
    std::vector<std::pair<double, double>> out;
    out.reserve(freqs.size());
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        require_rate(base[k], "base rate");
        double w = std::abs(freqs[k]);
        double boltz = w == 0.0 ? 1.0 : std::exp(-beta * w);
        double down = base[k], up = base[k] * boltz;
        out.push_back(freqs[k] >= 0.0 ? std::pair{down, up} : std::pair{up, down});
    }
    return out;
}

AttractorResult fixed_point(const DissipatorSpec& spec, const EigenoperatorSet* eigenset)
{
    const int d = spec_dim(spec, -1);
    check_orthogonal(spec.channels, false);
    Superoperator l = build_dissipator(spec, d);
    if (spec.lamb_shift) l += cplx(0, -1) * commutator_super(*spec.lamb_shift);
    if (eigenset) {
        for (const auto& c : spec.channels) {
            const Matrix& f = c.jump.data();
            bool found = false;
            for (std::size_t k = 0; k < eigenset->size() && !found; ++k) {
                const Matrix& p = eigenset->ops[k].data();
                found = std::abs((p.adjoint() * f).trace()) >= (1.0 - 1e-8) * p.norm() * f.norm();
            }
            if (!found)
                throw Error(ErrorCode::contract, "channel jump operator is not in the eigenoperator set");
        }
        if (!eigenset->projectors.empty() &&
            eigenset->energies.size() == static_cast<Eigen::Index>(eigenset->projectors.size())) {
            Matrix h = Matrix::Zero(d, d);
            for (std::size_t j = 0; j < eigenset->projectors.size(); ++j)
                h += eigenset->energies(j) * eigenset->projectors[j].data();
            l += cplx(0, -1) * commutator_super(Operator(h));
        }
    }
    return attractor_from(spec, l, d, false);
}

AttractorResult instantaneous_attractor(const DissipatorSpec& spec)
{
    const int d = spec_dim(spec, -1);
    for (const auto& c : spec.channels) {
        double sq = (c.jump.data() * c.jump.data()).cwiseAbs().maxCoeff();
        if (sq > 1e-10) throw Error(ErrorCode::contract, "jump operator violates F^2 = 0", sq);
    }
    check_orthogonal(spec.channels, true);
    Superoperator l = build_dissipator(spec, d);
    return attractor_from(spec, l, d, true);
}

AttractorResult instantaneous_attractor(const std::vector<Channel>& channels)
{
    DissipatorSpec spec;
    spec.channels = channels;
    return instantaneous_attractor(spec);
}

Superoperator liouvillian(const Operator& h_eff, const Superoperator& d)
{
    if (!h_eff.is_hermitian(1e-10))
        throw Error(ErrorCode::contract, "effective Hamiltonian is not Hermitian");
    Superoperator l = cplx(0, -1) * commutator_super(h_eff) + d;
    Vector id = vec(Operator::identity(h_eff.dim()));
    double leak = vec_max(l.data().adjoint() * id);
    if (leak > 1e-10) throw Error(ErrorCode::contract, "generator does not preserve trace", leak);
    return l;
}

double check_time_translation(const Superoperator& l, const Operator& h_d, double t, double s)
{
    Matrix el = matrix_exp(Matrix(t * l.data()));
    Matrix u = matrix_exp(Matrix(cplx(0, -s) * commutator_super(h_d).data()));
    return (el * u - u * el).cwiseAbs().maxCoeff();
}

Matrix choi_matrix(const Superoperator& map)
{
    const int d = map.source_dim();
    Matrix c = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Matrix eij = Matrix::Zero(d, d);
            eij(i, j) = 1.0;
            c.block(i * d, j * d, d, d) = map.apply(Operator(eij)).data();
        }
    return c;
}

DensityMatrix null_state(const Superoperator& l)
{
    Eigen::JacobiSVD<Matrix> svd(l.data(), Eigen::ComputeFullV);
    Vector v = svd.matrixV().col(svd.matrixV().cols() - 1);
    Matrix r = unvec(v, l.source_dim()).data();
    cplx tr = r.trace();
    if (std::abs(tr) < 1e-12)
        throw Error(ErrorCode::numerical, "Liouvillian null vector is traceless");
    r /= tr;
    r = 0.5 * (r + r.adjoint());
    return DensityMatrix(Operator(r), StateTolerance::trajectory());
}

}  // namespace gkls
