// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gkls/bath.hpp"
#include "gkls/eigenops.hpp"
#include "gkls/experiments.hpp"
#include "gkls/jc.hpp"
#include "gkls/master_equation.hpp"
#include "support.hpp"

using namespace gkls;
using namespace gkls::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<double> golden_fidelity(double alpha)
{
    std::string path = std::string(GKLS_GOLDEN_DIR) + "/fig2_alpha_" +
                       std::to_string(static_cast<int>(alpha)) + ".csv";
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "missing golden file " + path);
    std::string line;
    std::getline(in, line);
    std::vector<double> out;
    while (std::getline(in, line)) out.push_back(std::stod(line.substr(line.find(',') + 1)));
    return out;
}

Outcome fig2_convergence()
{
    ExperimentConfig cfg = default_config("fig2");
    std::vector<std::future<Fig2Series>> jobs;
    for (cplx a : cfg.alphas)
        jobs.push_back(std::async(std::launch::async, [&cfg, a] {
            return fig2_series(cfg.jc.resolve(a), cfg.initial_state, cfg.grid);
        }));
    std::vector<double> mins;
    double golden_dev = 0.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        Fig2Series s = jobs[i].get();
        mins.push_back(s.min_fidelity());
        std::vector<double> g = golden_fidelity(s.alpha);
        if (g.size() * 10 != s.fidelity.size() + 9)
            throw Error(ErrorCode::dimension, "golden grid does not match the default grid");
        for (std::size_t r = 0; r < g.size(); ++r)
            golden_dev = std::max(golden_dev, std::abs(g[r] - s.fidelity[10 * r]));
    }
    bool increasing = true;
    for (std::size_t i = 1; i < mins.size(); ++i) increasing &= mins[i] > mins[i - 1];
    Outcome o;
    o.pass = increasing && mins.back() >= 0.99 && mins.front() <= 0.98 && golden_dev <= 1e-8;
    o.detail = "min F(alpha=5,25,50,100) = " + fmt("%.6f", mins[0]) + ", " + fmt("%.6f", mins[1]) +
               ", " + fmt("%.6f", mins[2]) + ", " + fmt("%.6f", mins[3]) +
               "; max |F - golden| = " + fmt("%.2e", golden_dev);
    return o;
}

Outcome envelope_scaling()
{
    std::vector<double> scaled;
    std::string d;
    for (double a : {5.0, 10.0, 20.0}) {
        JCParams p{1.0, 1.0, 1.0 / a, a};
        EnvelopeFit f = collapse_fit(p);
        scaled.push_back(f.kappa * a * a);
        d += "kappa*alpha^2(" + fmt("%g", a) + ") = " + fmt("%.4f", f.kappa * a * a) + "; ";
    }
    double lo = *std::min_element(scaled.begin(), scaled.end());
    double hi = *std::max_element(scaled.begin(), scaled.end());
    Outcome o;
    o.pass = lo > 0.0 && hi / lo - 1.0 <= 0.15;
    o.detail = d + "spread " + fmt("%.2f%%", 100.0 * (hi / lo - 1.0)) + " (predicted 0.5)";
    return o;
}

Outcome eigenoperator_suite()
{
    double worst_freq = 0.0, worst_dev = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        JCParams p{1.0, 1.0 + uniform(-0.4, 0.4), uniform(0.02, 0.15),
                   std::polar(uniform(1.0, 4.0), uniform(-3.1, 3.1))};
        EigenoperatorSet m = monodromy_eigenoperators(jc_semiclassical_generator(p));
        JCEigenoperators ref(p);
        const double om = std::sqrt(4.0 * std::norm(p.alpha) * p.g * p.g + std::pow(p.detuning(), 2));
        for (double sign : {1.0, -1.0}) {
            double best = INFINITY;
            int at = -1;
            for (std::size_t k = 0; k < m.size(); ++k)
                if (!m.invariant[k] && std::abs(m.freqs[k] - sign * om) < best) {
                    best = std::abs(m.freqs[k] - sign * om);
                    at = static_cast<int>(k);
                }
            if (at < 0) return {false, "missing transition eigenoperator"};
            worst_freq = std::max(worst_freq, best);
            Operator f = sign > 0 ? ref.f_plus(0.0) : ref.f_minus(0.0);
            worst_dev = std::max(worst_dev, phase_distance(m.ops[at].data(), f.data()));
        }
    }
    Outcome o;
    o.pass = worst_freq <= 1e-6 && worst_dev <= 1e-6;
    o.detail = "max |lambda - (+/-Omega)| = " + fmt("%.2e", worst_freq) +
               ", max deviation from F+/- = " + fmt("%.2e", worst_dev);
    return o;
}

Matrix gibbs(const Operator& h, double beta)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.data());
    Eigen::VectorXd w = (-beta * (es.eigenvalues().array() - es.eigenvalues()(0))).exp();
    Matrix r = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    return r / r.trace();
}

Outcome gkls_properties()
{
    double trace_leak = 0.0, choi_min = INFINITY, tt = 0.0, control = INFINITY, gibbs_dev = 0.0;
    for (int d = 2; d <= 6; ++d)
        for (int rep = 0; rep < 3; ++rep) {
            Operator h = random_hermitian(d);
            const double beta = uniform(0.1, 2.0);
            EigenoperatorSet set = static_eigenoperators(h);
            DissipatorSpec spec;
            for (std::size_t k = 0; k < set.size(); ++k) {
                if (set.invariant[k] || set.freqs[k] <= 0.0) continue;
                double down = uniform(0.1, 1.0);
                spec.channels.push_back({set.ops[k], down, down * std::exp(-beta * set.freqs[k])});
            }
            Matrix v = Matrix::Zero(d, d), ls = Matrix::Zero(d, d);
            for (const auto& p : set.projectors) {
                v += uniform(-1, 1) * p.data();
                ls += uniform(-0.2, 0.2) * p.data();
            }
            spec.dephasing = AutonomousDephasing{{Operator(v)}, {uniform(0.0, 0.5)}};
            Superoperator l = liouvillian(h + Operator(ls), build_dissipator(spec));
            trace_leak = std::max(trace_leak, (l.data().adjoint() * vec(Operator::identity(d)))
                                                  .cwiseAbs().maxCoeff());
            const double scale = l.data().norm();
            for (double t : {0.1, 1.0, 10.0}) {
                Superoperator m(matrix_exp(Matrix((t / scale) * l.data())), d);
                Matrix c = choi_matrix(m);
                choi_min = std::min(choi_min,
                                    Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (c + c.adjoint()))
                                        .eigenvalues()(0));
            }
            tt = std::max(tt, check_time_translation(l, h, uniform(0.1, 3.0), uniform(0.1, 3.0)));

            DissipatorSpec ctrl;
            Matrix x = Matrix::Zero(d, d);
            x(0, d - 1) = x(d - 1, 0) = 1.0;  // couples bare basis states, not energy levels
            ctrl.channels.push_back({Operator(x), 1.0, 0.0});
            Superoperator lc = liouvillian(h, build_dissipator(ctrl));
            control = std::min(control, check_time_translation(lc, h, 1.0, 1.0));

            spec.dephasing.reset();
            AttractorResult fp = fixed_point(spec, &set);
            gibbs_dev = std::max(gibbs_dev, max_abs(fp.state.data() - gibbs(h, beta)));
        }
    Outcome o;
    o.pass = trace_leak <= 1e-10 && choi_min >= -1e-8 && tt <= 1e-9 && control >= 1e-2 &&
             gibbs_dev <= 1e-9;
    o.detail = "trace leak " + fmt("%.1e", trace_leak) + ", min Choi eig " + fmt("%.1e", choi_min) +
               ", time-translation " + fmt("%.1e", tt) + " (control " + fmt("%.2f", control) +
               "), |fixed point - Gibbs| " + fmt("%.1e", gibbs_dev);
    return o;
}

Outcome attractor_grid()
{
    double worst = 0.0, worst_delta = 0.0;
    int cases = 0;
    for (double delta : {-0.3, -0.15, 0.0, 0.15, 0.3})
        for (double temp : {0.1, 0.3, 1.0, 3.0, 10.0}) {
            JCParams p{1.0, 1.0 + delta, 0.05, 4.0};
            BathSpec b;
            b.temperature = temp;
            b.eta = 0.05;
            b.cutoff = 10.0;
            SemiclassicalDissipator sd = jc_semiclassical_dissipator(p, b, 0.0);
            AttractorResult ia = instantaneous_attractor(sd.spec);
            worst = std::max(worst, ia.residual);
            double expect = std::log(sd.coefficients.gamma_minus / sd.coefficients.gamma_plus);
            worst_delta = std::max(worst_delta, std::abs(ia.deltas.at(0) - expect));
            ++cases;
        }
    Outcome o;
    o.pass = worst <= 1e-9 && worst_delta <= 1e-12;
    o.detail = std::to_string(cases) + " (Delta, T) points, max residual " + fmt("%.2e", worst) +
               ", max |delta - ln(G-/G+)| " + fmt("%.1e", worst_delta);
    return o;
}

Outcome touchard_asymptotics()
{
    const std::vector<double> xs{1e2, 1e3, 1e4};
    bool ok = true;
    std::string d;
    for (int j = 2; j <= 6; ++j) {
        std::vector<double> lx, lr;
        double worst = 0.0;
        for (double x : xs) {
            double r = std::abs(touchard_scaled(j, x) - 1.0 - j * (j - 1) / (2.0 * x));
            worst = std::max(worst, r);
            lx.push_back(std::log(x));
            lr.push_back(std::log(r));
        }
        // x^{-2}T_2(x) = 1 + 1/x exactly: nothing left to decay.
        if (worst <= 1e-13) {
            d += "j=" + std::to_string(j) + " identically zero; ";
            continue;
        }
        double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (lr[0] + lr[1] + lr[2]) / 3, sxy = 0, sxx = 0;
        for (int i = 0; i < 3; ++i) {
            sxy += (lx[i] - mx) * (lr[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        double slope = sxy / sxx;
        ok &= std::abs(slope + 2.0) <= 0.1;
        d += "j=" + std::to_string(j) + " slope " + fmt("%.3f", slope) + "; ";
    }
    return {ok, d};
}

// Weights of σ_x at Heisenberg frequencies λ_k + nω_c, from the numerical
// Floquet decomposition over one drive period.
struct SidebandWeights {
    double upper = 0.0;  // at ω_c + Ω
    double lower = 0.0;  // at ω_c − Ω
    double total = 0.0;
};

SidebandWeights decompose_sigma_x(const JCParams& p)
{
    const int samples = 64, sub = 400;
    const double period = 2.0 * std::numbers::pi / p.omega_c;
    const double h = period / (samples * sub);
    auto rhs = [&](double t, const Matrix& u) -> Matrix {
        return cplx(0, -1) * (jc_semiclassical_hamiltonian(t, p).data() * u);
    };
    std::vector<Matrix> us;
    Matrix u = Matrix::Identity(2, 2);
    for (int k = 0; k < samples * sub; ++k) {
        if (k % sub == 0) us.push_back(u);
        double t = k * h;
        Matrix k1 = rhs(t, u), k2 = rhs(t + h / 2, u + (h / 2) * k1);
        Matrix k3 = rhs(t + h / 2, u + (h / 2) * k2), k4 = rhs(t + h, u + h * k3);
        u += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Eigen::ComplexEigenSolver<Matrix> es(u);
    Matrix v = es.eigenvectors();
    for (int a = 0; a < 2; ++a) v.col(a).normalize();
    std::vector<Matrix> p0;
    std::vector<double> lam;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            p0.push_back(v.col(a) * v.col(b).adjoint());
            lam.push_back((std::arg(es.eigenvalues()(b)) - std::arg(es.eigenvalues()(a))) / period);
        }
    const Matrix sx = qubit::sigma_x().data();
    const double om = p.rabi();
    SidebandWeights w;
    for (std::size_t k = 0; k < p0.size(); ++k) {
        std::vector<cplx> a(samples);
        for (int j = 0; j < samples; ++j) {
            double t = j * period / samples;
            Matrix pk = std::exp(cplx(0, lam[k] * t)) * us[j] * p0[k] * us[j].adjoint();
            a[j] = (pk.adjoint() * sx).trace();
        }
        for (int n = -samples / 2; n < samples / 2; ++n) {
            cplx c = 0.0;
            for (int j = 0; j < samples; ++j)
                c += a[j] * std::exp(cplx(0, -2.0 * std::numbers::pi * n * j / samples));
            c /= static_cast<double>(samples);
            double weight = std::norm(c);
            double nu = lam[k] + n * p.omega_c;
            w.total += weight;
            if (std::abs(nu - (p.omega_c + om)) < 1e-6) w.upper += weight;
            if (std::abs(nu - (p.omega_c - om)) < 1e-6) w.lower += weight;
        }
    }
    return w;
}

Outcome kinetic_oracle()
{
    BathSpec b;
    b.temperature = 0.7;
    b.eta = 0.05;
    double worst = 0.0, parseval = 0.0;
    int done = 0;
    while (done < 10) {
        JCParams p{1.0, 1.0 + uniform(-0.3, 0.3), uniform(0.02, 0.12),
                   std::polar(uniform(1.0, 5.0), uniform(-3.1, 3.1))};
        const double om = p.rabi();
        // Keep the three frequency families and the monodromy spectrum well separated.
        double phase = std::remainder(om * 2.0 * std::numbers::pi / p.omega_c, 2.0 * std::numbers::pi);
        if (om < 0.1 || om > 0.9 || std::abs(om - 0.5) < 0.02 || std::abs(phase) < 1e-2) continue;
        SidebandWeights w = decompose_sigma_x(p);
        KineticCoefficients k = jc_kinetic_coefficients(p, b);
        worst = std::max({worst, std::abs(w.upper - k.s_plus), std::abs(w.lower - k.s_minus)});
        parseval = std::max(parseval, std::abs(w.total - 2.0));
        ++done;
    }
    Outcome o;
    o.pass = worst <= 1e-8;
    o.detail = "10 parameter sets, max |s_closed - s_oracle| = " + fmt("%.2e", worst) +
               ", Parseval defect " + fmt("%.1e", parseval);
    return o;
}

Outcome coherence_conservation()
{
    const double w = 1.0, g = 0.3;
    Operator b = destroy(4);
    Matrix ladder = Matrix::Zero(4, 4);
    for (int n = 0; n < 4; ++n) ladder(n, n) = w * n;
    Operator h0 = kron(cplx(0.5 * w) * qubit::sigma_z(), Operator::identity(4)) +
                  kron(qubit::id(), Operator(ladder));
    Operator v = cplx(g) * (kron(qubit::sigma_plus(), b) + kron(qubit::sigma_minus(), b.adjoint()));
    Operator h = h0 + v;
    double commute = (v.data() * h0.data() - h0.data() * v.data()).cwiseAbs().maxCoeff();
    std::vector<Operator> projs = energy_projectors(h0);
    DensityMatrix r0 = random_state(8, {2, 4});
    const double c0 = coherence_rel_entropy(r0, projs);
    double drift = 0.0;
    for (int k = 1; k <= 200; ++k) {
        double t = 0.25 * k;
        Matrix u = matrix_exp(Matrix(cplx(0, -t) * h.data()));
        DensityMatrix rt(Operator(Matrix(u * r0.data() * u.adjoint()), {2, 4}), StateTolerance::trajectory());
        drift = std::max(drift, std::abs(coherence_rel_entropy(rt, projs) - c0));
    }
    Outcome o;
    o.pass = commute <= 1e-12 && drift <= 1e-8;
    o.detail = "[V, H0] = " + fmt("%.1e", commute) + ", D(rho||rho_d) = " + fmt("%.6f", c0) +
               ", max drift " + fmt("%.2e", drift);
    return o;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "fig2 fidelity convergence", 60.0, fig2_convergence},
        {2, "envelope scaling", 30.0, envelope_scaling},
        {3, "eigenoperator suite", 10.0, eigenoperator_suite},
        {4, "GKLS property suite", 20.0, gkls_properties},
        {5, "instantaneous attractor", 10.0, attractor_grid},
        {6, "Touchard asymptotics", 1.0, touchard_asymptotics},
        {7, "kinetic coefficient oracle", 10.0, kinetic_oracle},
        {8, "coherence conservation", 5.0, coherence_conservation},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = secs <= c.budget_s;
        bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s criterion %d (%s): %s | %.2f s of %.0f s%s\n", pass ? "PASS" : "FAIL", c.id,
                    c.name, o.detail.c_str(), secs, c.budget_s, in_time ? "" : " (over budget)");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
