#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "gkls/operator.hpp"

namespace gkls::detail {

using MatrixRhs = std::function<Matrix(double, const Matrix&)>;

struct AdaptiveOptions {
    double rtol = 1e-12;
    double atol = 1e-13;
    double h_init = 1e-3;
    double h_max = 0.0;  // 0: unbounded
    // Called after every accepted step; may rewrite the state.
    std::function<void(double, Matrix&, long)> on_step;
};

// Dormand–Prince 5(4) from t0 to t1, landing exactly on t1.
inline Matrix integrate_dp45(const MatrixRhs& f, double t0, double t1, Matrix y,
                             const AdaptiveOptions& opt = {})
{
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (t1 == t0) return y;
    const double span = t1 - t0;
    const double dir = span > 0 ? 1.0 : -1.0;
    double h = std::min(std::abs(opt.h_init), std::abs(span));
    double t = t0;
    long accepted = 0;
    Matrix k1 = f(t, y);
    int rejects_in_row = 0;
    while (dir * (t1 - t) > 0) {
        if (opt.h_max > 0) h = std::min(h, opt.h_max);
        bool last = h >= std::abs(t1 - t);
        double hs = last ? (t1 - t) : dir * h;
        Matrix k2 = f(t + c2 * hs, y + hs * (a21 * k1));
        Matrix k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        Matrix k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        Matrix k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Matrix k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Matrix yn = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Matrix k7 = f(t + hs, yn);
        Matrix err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double scale = opt.atol + opt.rtol * std::max(y.cwiseAbs().maxCoeff(),
                                                      yn.cwiseAbs().maxCoeff());
        double en = err.cwiseAbs().maxCoeff() / scale;
        if (en <= 1.0 || std::abs(hs) < 1e-14 * std::max(1.0, std::abs(t))) {
            t = last ? t1 : t + hs;
            y = std::move(yn);
            k1 = std::move(k7);
            ++accepted;
            if (opt.on_step) {
                Matrix before = y;
                opt.on_step(t, y, accepted);
                if (before != y) k1 = f(t, y);
            }
            rejects_in_row = 0;
            double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
            h = std::abs(hs) * std::clamp(fac, 0.2, 5.0);
        } else {
            if (++rejects_in_row > 200)
                throw Error(ErrorCode::numerical, "adaptive integrator failed to converge");
            h = std::abs(hs) * std::max(0.2, 0.9 * std::pow(en, -0.2));
        }
    }
    return y;
}

// Nearest unitary to u (polar factor).
inline Matrix nearest_unitary(const Matrix& u)
{
    Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline double unitarity_defect(const Matrix& u)
{
    return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace gkls::detail
