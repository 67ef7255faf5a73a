#include "gkls/eigenops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ode.hpp"

namespace gkls {

namespace {

constexpr double kDegenerateRel = 1e-9;
constexpr double kUnitarityTol = 1e-8;
constexpr int kRenormalizeEvery = 100;

double principal(double x)
{
    return std::remainder(x, 2.0 * std::numbers::pi);
}

Operator outer(const Vector& a, const Vector& b) { return Operator(a * b.adjoint()); }

Matrix frame_of(const DrivenGenerator& gen, int d)
{
    return gen.frame ? gen.frame->data() : Matrix::Zero(d, d);
}

// Inside a cluster of (near-)equal eigenvalues the solver basis is arbitrary;
// replace it by the polar factor of the tracked vectors projected onto the cluster.
void resolve_clusters(const Eigen::VectorXcd& evals, const Matrix& tracked, Matrix& nv)
{
    constexpr double kClusterTol = 1e-6;
    const int d = static_cast<int>(evals.size());
    std::vector<bool> done(d, false);
    for (int i = 0; i < d; ++i) {
        if (done[i]) continue;
        std::vector<int> members{i};
        for (int j = i + 1; j < d; ++j)
            if (!done[j] && std::abs(evals(j) - evals(i)) < kClusterTol) members.push_back(j);
        for (int m : members) done[m] = true;
        const int m = static_cast<int>(members.size());
        if (m == 1) continue;
        Matrix cols(d, m);
        for (int c = 0; c < m; ++c) cols.col(c) = nv.col(members[c]);
        Eigen::HouseholderQR<Matrix> qr(cols);
        Matrix q = qr.householderQ() * Matrix::Identity(d, m);
        Matrix proj = q.adjoint() * tracked;
        std::vector<int> order(d);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return proj.col(a).norm() > proj.col(b).norm(); });
        Matrix c(m, m);
        for (int k = 0; k < m; ++k) c.col(k) = proj.col(order[k]);
        Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Matrix resolved = q * svd.matrixU() * svd.matrixV().adjoint();
        for (int k = 0; k < m; ++k) nv.col(members[k]) = resolved.col(k);
    }
}

}  // namespace

DrivenGenerator static_generator(const Operator& h, std::optional<double> period)
{
    return DrivenGenerator{[h](double) { return h; }, period, std::nullopt};
}

Operator fix_phase_largest(const Operator& p)
{
    const Matrix& m = p.data();
    double big = p.max_abs();
    if (big == 0.0) return p;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (std::abs(m(r, c)) >= big * (1.0 - 1e-6))
                return Operator(m * (std::conj(m(r, c)) / std::abs(m(r, c))), p.dims());
    return p;
}

EigenoperatorSet static_eigenoperators(const Operator& h)
{
    Eigensystem es = hermitian_eig(h);
    const int d = h.dim();
    const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    EigenoperatorSet out;
    out.energies = es.values;
    out.convention = FrequencyConvention::bohr;
    bool degenerate = false;
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) {
            if (n == m) continue;
            double w = es.values(m) - es.values(n);
            bool inv = std::abs(w) < kDegenerateRel * scale;
            degenerate |= inv;
            out.ops.push_back(outer(es.vectors.col(n), es.vectors.col(m)));
            out.freqs.push_back(inv ? 0.0 : w);
            out.invariant.push_back(inv);
        }
    for (int j = 0; j < d; ++j) {
        Operator p = outer(es.vectors.col(j), es.vectors.col(j));
        out.projectors.push_back(p);
        out.ops.push_back(p);
        out.freqs.push_back(0.0);
        out.invariant.push_back(true);
    }
    if (degenerate)
        out.warnings.push_back("degenerate energy levels: some transition operators are invariant");

    // U†GU = e^{−iωt}G at one time.
    const double t = 1.0 / scale;
    Matrix u = matrix_exp(Matrix(cplx(0, -t) * h.data()));
    double worst = 0.0;
    for (std::size_t k = 0; k < out.ops.size(); ++k) {
        Matrix lhs = u.adjoint() * out.ops[k].data() * u;
        Matrix rhs = std::exp(cplx(0, -out.freqs[k] * t)) * out.ops[k].data();
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    if (worst > 1e-8)
        throw Error(ErrorCode::numerical, "transition operators fail the propagation check", worst);
    return out;
}

std::vector<Operator> energy_projectors(const Operator& h)
{
    Eigensystem es = hermitian_eig(h);
    const int d = h.dim();
    std::vector<Operator> out;
    int start = 0;
    while (start < d) {
        int stop = start + 1;
        while (stop < d && es.values(stop) - es.values(start) <
                               kDegenerateRel * std::max(1.0, std::abs(es.values(start))))
            ++stop;
        Matrix v = es.vectors.middleCols(start, stop - start);
        out.emplace_back(Matrix(v * v.adjoint()), h.dims());
        start = stop;
    }
    return out;
}

BohrCheck bohr_nondegenerate(const Operator& h)
{
    Eigensystem es = hermitian_eig(h);
    const int d = h.dim();
    const double tol = kDegenerateRel * std::max(1.0, es.values.cwiseAbs().maxCoeff());
    struct Entry {
        double w;
        int n, m;
    };
    std::vector<Entry> ws;
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m)
            if (n != m) ws.push_back({es.values(m) - es.values(n), n, m});
    std::sort(ws.begin(), ws.end(), [](const Entry& a, const Entry& b) { return a.w < b.w; });
    BohrCheck out;
    for (std::size_t i = 0; i < ws.size(); ++i)
        for (std::size_t j = i + 1; j < ws.size() && ws[j].w - ws[i].w < tol; ++j)
            out.collisions.push_back({{ws[i].n, ws[i].m}, {ws[j].n, ws[j].m}});
    out.nondegenerate = out.collisions.empty();
    return out;
}

Superoperator heisenberg_generator(const DrivenGenerator& gen, double t)
{
    return cplx(0, 1) * commutator_super(gen.hamiltonian(t));
}

Matrix schrodinger_propagator(const DrivenGenerator& gen, double t0, double t1,
                              const Matrix& u0)
{
    detail::MatrixRhs rhs = [&gen](double t, const Matrix& u) -> Matrix {
        return cplx(0, -1) * (gen.hamiltonian(t).data() * u);
    };
    detail::AdaptiveOptions opt;
    double hn = std::max(1e-12, gen.hamiltonian(t0).data().norm());
    opt.h_init = std::min(std::abs(t1 - t0), 0.05 / hn);
    opt.on_step = [](double, Matrix& u, long step) {
        if (step % kRenormalizeEvery != 0) return;
        double defect = detail::unitarity_defect(u);
        if (defect > kUnitarityTol)
            throw Error(ErrorCode::numerical, "propagator lost unitarity", defect);
        u = detail::nearest_unitary(u);
    };
    Matrix u = detail::integrate_dp45(rhs, t0, t1, u0, opt);
    double defect = detail::unitarity_defect(u);
    if (defect > kUnitarityTol)
        throw Error(ErrorCode::numerical, "propagator lost unitarity", defect);
    return u;
}

std::vector<Matrix> propagator_series(const DrivenGenerator& gen,
                                      const std::vector<double>& times)
{
    std::vector<Matrix> out;
    out.reserve(times.size());
    const int d = gen.dim();
    Matrix u = Matrix::Identity(d, d);
    double t = 0.0;
    for (double tk : times) {
        u = schrodinger_propagator(gen, t, tk, u);
        t = tk;
        out.push_back(u);
    }
    return out;
}

EigenoperatorSet monodromy_eigenoperators(const DrivenGenerator& gen)
{
    if (!gen.period || !(*gen.period > 0))
        throw Error(ErrorCode::domain, "monodromy needs a positive period");
    const double period = *gen.period;
    const int d = gen.dim();
    if (d > 32) throw Error(ErrorCode::dimension, "monodromy is limited to dimension 32");
    const Matrix k = frame_of(gen, d);

    double hmax = 0.0;
    for (int i = 0; i < 64; ++i)
        hmax = std::max(hmax, gen.hamiltonian(period * i / 64.0).data().norm());
    const int checkpoints = std::max(
        32, static_cast<int>(std::ceil(8.0 * period * (hmax + k.norm()) / std::numbers::pi)));

    Matrix u = Matrix::Identity(d, d);
    Matrix vecs = Matrix::Identity(d, d);
    RealVector phase = RealVector::Zero(d);
    double t = 0.0;
    for (int c = 1; c <= checkpoints; ++c) {
        double tc = c == checkpoints ? period : period * c / checkpoints;
        u = schrodinger_propagator(gen, t, tc, u);
        t = tc;
        Matrix w = matrix_exp(Matrix(cplx(0, tc) * k)) * u;
        Eigen::ComplexEigenSolver<Matrix> es(w);
        if (es.info() != Eigen::Success)
            throw Error(ErrorCode::numerical, "eigensolver failed on the monodromy");
        Matrix nv = es.eigenvectors();
        for (int a = 0; a < d; ++a) nv.col(a).normalize();
        resolve_clusters(es.eigenvalues(), vecs, nv);

        // Greedy maximum-overlap assignment of new eigenvectors to tracked ones.
        Eigen::MatrixXd ov = (vecs.adjoint() * nv).cwiseAbs();
        std::vector<int> assign(d, -1);
        std::vector<bool> used_old(d, false), used_new(d, false);
        for (int step = 0; step < d; ++step) {
            double best = -1.0;
            int bo = 0, bn = 0;
            for (int o = 0; o < d; ++o)
                for (int n = 0; n < d; ++n)
                    if (!used_old[o] && !used_new[n] && ov(o, n) > best) {
                        best = ov(o, n);
                        bo = o;
                        bn = n;
                    }
            used_old[bo] = used_new[bn] = true;
            assign[bo] = bn;
        }
        Matrix next(d, d);
        RealVector next_phase(d);
        for (int o = 0; o < d; ++o) {
            int n = assign[o];
            next.col(o) = nv.col(n);
            double arg = std::arg(es.eigenvalues()(n));
            next_phase(o) = phase(o) + principal(arg - phase(o));
        }
        vecs = std::move(next);
        phase = std::move(next_phase);
    }

    for (int a = 0; a < d; ++a) fix_phase_first(vecs.col(a));
    EigenoperatorSet out;
    int wrapped = 0;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            if (std::abs(principal(phase(b) - phase(a))) < 1e-8 &&
                std::abs(phase(b) - phase(a)) >= 1e-8)
                ++wrapped;
    if (wrapped > 0)
        out.warnings.push_back("degenerate monodromy eigenvalues (" + std::to_string(wrapped) +
                               " pairs) separated by continuity of the tracked phases");
    out.convention = FrequencyConvention::heisenberg;
    out.energies = -phase / period;
    std::vector<int> transition_idx;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (a == b) continue;
            double theta = phase(b) - phase(a);
            bool inv = std::abs(theta) < 1e-8;
            out.ops.push_back(fix_phase_largest(outer(vecs.col(a), vecs.col(b))));
            out.freqs.push_back(inv ? 0.0 : theta / period);
            out.invariant.push_back(inv);
            if (!inv) transition_idx.push_back(static_cast<int>(out.ops.size()) - 1);
        }
    for (int a = 0; a < d; ++a) {
        Operator p = outer(vecs.col(a), vecs.col(a));
        out.projectors.push_back(p);
        out.ops.push_back(p);
        out.freqs.push_back(0.0);
        out.invariant.push_back(true);
    }
    for (std::size_t i = 0; i < transition_idx.size(); ++i)
        for (std::size_t j = i + 1; j < transition_idx.size(); ++j) {
            int a = transition_idx[i], b = transition_idx[j];
            if (std::abs(out.freqs[a] - out.freqs[b]) * period < 1e-8)
                out.collisions.push_back({a, b});
        }
    if (!out.collisions.empty())
        out.warnings.push_back("monodromy eigenvalue collisions: " +
                               std::to_string(out.collisions.size()) + " pairs");
    return out;
}

FrequencyEigenpairs frequency_eigenoperators(const Operator& h, double omega)
{
    if (!h.is_hermitian(1e-10))
        throw Error(ErrorCode::contract, "frequency kernel needs a Hermitian Hamiltonian");
    const int d = h.dim();
    Matrix m = commutator_super(h).data() - omega * Matrix::Identity(d * d, d * d);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    FrequencyEigenpairs out;
    out.values = es.eigenvalues();
    for (int k = 0; k < d * d; ++k)
        out.ops.push_back(fix_phase_largest(unvec(es.eigenvectors().col(k), d)));
    return out;
}

double verify_eigenoperator(const Operator& p, double lambda, const DrivenGenerator& gen,
                            const TimeGrid& grid)
{
    grid.validate();
    const int d = p.dim();
    const Matrix k = frame_of(gen, d);
    std::vector<double> times = grid.points();
    std::vector<Matrix> us = propagator_series(gen, times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double t = times[i];
        Matrix r = matrix_exp(Matrix(cplx(0, -t) * k));
        Matrix pt = r * p.data() * r.adjoint();
        Matrix heis = us[i].adjoint() * pt * us[i];
        Matrix expect = std::exp(cplx(0, lambda * t)) * p.data();
        worst = std::max(worst, (heis - expect).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace gkls
