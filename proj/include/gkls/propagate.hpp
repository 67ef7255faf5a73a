#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gkls/operator.hpp"
#include "gkls/time_grid.hpp"

namespace gkls {

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::map<std::string, std::string> metadata;
    // Step-halving endpoint estimate; negative when not computed.
    double error_estimate = -1.0;
};

// One exp(LΔt) reused over the uniform grid.
Trajectory evolve_static(const Superoperator& l, const DensityMatrix& rho0, const TimeGrid& grid);

using LiouvillianFn = std::function<Superoperator(double)>;

enum class TimedepMethod { rk4, piecewise_exponential };

struct TimedepOptions {
    TimedepMethod method = TimedepMethod::rk4;
    bool estimate_error = true;
};

Trajectory evolve_timedep(const LiouvillianFn& l_of_t, const DensityMatrix& rho0,
                          const TimeGrid& grid, TimedepOptions opt = {});

// tr(Oρ(t)) for each state.
std::vector<cplx> expectation_values(const Trajectory& traj, const Operator& op);
// One real series per Hermitian operator.
std::vector<std::vector<double>> expectation_series(const Trajectory& traj,
                                                    const std::vector<Operator>& ops);

std::vector<double> fidelity_series(const Trajectory& a, const Trajectory& b);

}  // namespace gkls
