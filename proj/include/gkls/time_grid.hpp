#pragma once

#include <vector>

#include "gkls/error.hpp"

namespace gkls {

// steps intervals, steps + 1 points, t1 > t0.
struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 1;

    double dt() const { return (t1 - t0) / steps; }
    double at(int k) const { return k == steps ? t1 : t0 + k * dt(); }
    std::vector<double> points() const
    {
        std::vector<double> out(steps + 1);
        for (int k = 0; k <= steps; ++k) out[k] = at(k);
        return out;
    }
    void validate() const
    {
        if (!(t1 > t0) || steps < 1)
            throw Error(ErrorCode::domain, "time grid needs t1 > t0 and steps >= 1");
    }
};

}  // namespace gkls
