#include "gkls/propagate.hpp"

#include <cmath>

namespace gkls {

namespace {

constexpr double kTraceDrift = 1e-8;
constexpr double kPositivityBreach = -1e-6;

DensityMatrix admit(const Vector& v, int d, const std::vector<int>& dims, double t)
{
    Operator op(unvec(v, d).data(), dims);
    double drift = std::abs(op.trace() - 1.0);
    if (drift > kTraceDrift)
        throw Error(ErrorCode::numerical,
                    "trace drift " + std::to_string(drift) + " at t = " + std::to_string(t), drift);
    try {
        return DensityMatrix(op, {kTraceDrift, 1e-9, kPositivityBreach});
    } catch (const Error& e) {
        throw Error(ErrorCode::numerical,
                    std::string("state left the simplex at t = ") + std::to_string(t) + ": " +
                        e.what(),
                    e.value());
    }
}

void require_trace_annihilating(const Matrix& l, int d)
{
    Vector id = vec(Operator::identity(d));
    double leak = (l.adjoint() * id).cwiseAbs().maxCoeff();
    if (leak > 1e-10) throw Error(ErrorCode::contract, "generator does not annihilate the trace", leak);
}

Vector integrate(const LiouvillianFn& l_of_t, Vector v, const TimeGrid& grid, TimedepMethod method,
                 const std::function<void(int, const Vector&)>& emit)
{
    const double h = grid.dt();
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    Matrix l0 = l_of_t(grid.t0).data();
    require_trace_annihilating(l0, d);
    if (emit) emit(0, v);
    for (int k = 0; k < grid.steps; ++k) {
        const double t = grid.at(k);
        Matrix lm = l_of_t(t + 0.5 * h).data();
        if (method == TimedepMethod::piecewise_exponential) {
            v = matrix_exp(Matrix(h * lm)) * v;
        } else {
            Matrix l1 = l_of_t(grid.at(k + 1)).data();
            Vector k1 = l0 * v;
            Vector k2 = lm * (v + 0.5 * h * k1);
            Vector k3 = lm * (v + 0.5 * h * k2);
            Vector k4 = l1 * (v + h * k3);
            v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            l0 = std::move(l1);
        }
        if (method == TimedepMethod::piecewise_exponential) l0 = l_of_t(grid.at(k + 1)).data();
        if (emit) emit(k + 1, v);
    }
    return v;
}

}  // namespace

Trajectory evolve_static(const Superoperator& l, const DensityMatrix& rho0, const TimeGrid& grid)
{
    grid.validate();
    const int d = rho0.dim();
    if (l.source_dim() != d) throw Error(ErrorCode::dimension, "generator and state dims differ");
    require_trace_annihilating(l.data(), d);
    const Matrix step = matrix_exp(Matrix(grid.dt() * l.data()));
    Trajectory out;
    out.times = grid.points();
    out.states.reserve(out.times.size());
    out.states.push_back(rho0);
    Vector v = vec(rho0.op());
    for (int k = 1; k <= grid.steps; ++k) {
        v = step * v;
        out.states.push_back(admit(v, d, rho0.op().dims(), out.times[k]));
    }
    return out;
}

Trajectory evolve_timedep(const LiouvillianFn& l_of_t, const DensityMatrix& rho0,
                          const TimeGrid& grid, TimedepOptions opt)
{
    grid.validate();
    const int d = rho0.dim();
    Trajectory out;
    out.times = grid.points();
    out.states.reserve(out.times.size());
    Vector end = integrate(l_of_t, vec(rho0.op()), grid, opt.method, [&](int k, const Vector& v) {
        out.states.push_back(k == 0 ? rho0 : admit(v, d, rho0.op().dims(), out.times[k]));
    });
    if (opt.estimate_error) {
        TimeGrid fine{grid.t0, grid.t1, 2 * grid.steps};
        Vector end_fine = integrate(l_of_t, vec(rho0.op()), fine, opt.method, nullptr);
        const double order = opt.method == TimedepMethod::rk4 ? 4.0 : 2.0;
        out.error_estimate = (end - end_fine).cwiseAbs().maxCoeff() / (std::pow(2.0, order) - 1.0);
    }
    return out;
}

std::vector<cplx> expectation_values(const Trajectory& traj, const Operator& op)
{
    std::vector<cplx> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        if (s.dim() != op.dim()) throw Error(ErrorCode::dimension, "observable does not match state");
        out.push_back((op.data() * s.data()).trace());
    }
    return out;
}

std::vector<std::vector<double>> expectation_series(const Trajectory& traj,
                                                    const std::vector<Operator>& ops)
{
    std::vector<std::vector<double>> out;
    for (const auto& op : ops) {
        if (!op.is_hermitian(1e-10))
            throw Error(ErrorCode::contract, "real expectation series needs Hermitian observables");
        std::vector<double> series;
        for (cplx v : expectation_values(traj, op)) {
            if (std::abs(v.imag()) > 1e-10)
                throw Error(ErrorCode::numerical, "Hermitian expectation has an imaginary part", v.imag());
            series.push_back(v.real());
        }
        out.push_back(std::move(series));
    }
    return out;
}

std::vector<double> fidelity_series(const Trajectory& a, const Trajectory& b)
{
    if (a.times.size() != b.times.size() || a.states.size() != b.states.size())
        throw Error(ErrorCode::dimension, "trajectories have different lengths");
    std::vector<double> out;
    out.reserve(a.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        if (std::abs(a.times[k] - b.times[k]) > 1e-12 * std::max(1.0, std::abs(a.times[k])))
            throw Error(ErrorCode::dimension, "trajectories are on different grids");
        out.push_back(uhlmann_fidelity(a.states[k], b.states[k]));
    }
    return out;
}

}  // namespace gkls
