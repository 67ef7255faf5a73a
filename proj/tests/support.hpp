#pragma once

#include <random>

#include "gkls/operator.hpp"

namespace gkls::testing {

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20260417);
    return gen;
}

inline Matrix random_matrix(int d)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = cplx(n(rng()), n(rng()));
    return m;
}

inline Operator random_hermitian(int d)
{
    Matrix m = random_matrix(d);
    return Operator(0.5 * (m + m.adjoint()));
}

inline DensityMatrix random_state(int d, std::vector<int> dims = {})
{
    Matrix m = random_matrix(d);
    Matrix r = m * m.adjoint();
    r /= r.trace();
    return DensityMatrix(Operator(0.5 * (r + r.adjoint()), std::move(dims)));
}

inline Matrix random_unitary(int d)
{
    Eigen::HouseholderQR<Matrix> qr(random_matrix(d));
    return qr.householderQ() * Matrix::Identity(d, d);
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace gkls::testing

namespace gkls::testing {

// max |a − e^{iφ}b| with φ chosen to align the two operators.
inline double phase_distance(const Matrix& a, const Matrix& b)
{
    cplx ov = (b.adjoint() * a).trace();
    cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0);
    return (a - ph * b).cwiseAbs().maxCoeff();
}

}  // namespace gkls::testing
