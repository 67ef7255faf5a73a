#include <doctest.h>

#include <cmath>
#include <limits>

#include "gkls/eigenops.hpp"
#include "gkls/jc.hpp"
#include "gkls/master_equation.hpp"
#include "support.hpp"

using namespace gkls;
using namespace gkls::testing;

namespace {

Matrix proj(const Vector& v) { return v * v.adjoint(); }

// Thermal channels on every downward transition of H at inverse temperature beta.
DissipatorSpec thermal_spec(const Operator& h, double beta, EigenoperatorSet& set)
{
    set = static_eigenoperators(h);
    DissipatorSpec spec;
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (set.invariant[k] || set.freqs[k] <= 0.0) continue;
        double down = uniform(0.2, 1.5);
        spec.channels.push_back({set.ops[k], down, down * std::exp(-beta * set.freqs[k])});
    }
    return spec;
}

Matrix gibbs(const Operator& h, double beta)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.data());
    Eigen::VectorXd w = (-beta * es.eigenvalues().array()).exp();
    Matrix r = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    return r / r.trace();
}

}  // namespace

TEST_CASE("amplitude damping dissipator")
{
    DissipatorSpec spec;
    spec.channels.push_back({qubit::sigma_minus(), 1.0, 0.0});
    Superoperator d = build_dissipator(spec);
    Matrix e = proj(qubit::excited()), g = proj(qubit::ground());
    CHECK(max_abs(d.apply(Operator(e)).data() - (g - e)) < 1e-15);
    Vector id = vec(Operator::identity(2));
    CHECK((d.data().adjoint() * id).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pure dephasing dissipator")
{
    DissipatorSpec spec;
    spec.dephasing = AutonomousDephasing{{qubit::sigma_z()}, {1.0}};
    Superoperator d = build_dissipator(spec);
    Matrix z = qubit::sigma_z().data(), x = qubit::sigma_x().data();
    Matrix inner = z * x - x * z;
    Matrix oracle = -(z * inner - inner * z);
    CHECK(max_abs(d.apply(qubit::sigma_x()).data() - oracle) < 1e-14);
    CHECK(max_abs(oracle + 4.0 * x) < 1e-14);
}

TEST_CASE("empty and invalid dissipators")
{
    CHECK(max_abs(build_dissipator(DissipatorSpec{}, 3).data()) == 0.0);
    CHECK_THROWS_AS(build_dissipator(DissipatorSpec{}), Error);
    DissipatorSpec neg;
    neg.channels.push_back({qubit::sigma_minus(), -0.1, 0.0});
    try {
        build_dissipator(neg);
        FAIL("negative rate accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::contract);
    }
    DissipatorSpec bad_chi;
    bad_chi.invariant_dephasing = InvariantDephasing{{qubit::sigma_z()}, Matrix::Constant(1, 1, -1.0)};
    CHECK_THROWS_AS(build_dissipator(bad_chi), Error);
}

TEST_CASE("detailed balance rates")
{
    auto inf = detailed_balance_rates({1.0}, 0.0, {0.7});
    CHECK(inf[0].first == inf[0].second);
    auto two = detailed_balance_rates({std::log(2.0)}, 1.0, {0.7});
    CHECK(two[0].first / two[0].second == doctest::Approx(2.0).epsilon(1e-14));
    auto flip = detailed_balance_rates({-std::log(2.0)}, 1.0, {0.7});
    CHECK(flip[0].second / flip[0].first == doctest::Approx(2.0).epsilon(1e-14));
    auto zero_t = detailed_balance_rates({1.0}, std::numeric_limits<double>::infinity(), {0.7});
    CHECK(zero_t[0].first == 0.7);
    CHECK(zero_t[0].second == 0.0);
    CHECK_THROWS_AS(detailed_balance_rates({1.0}, -1.0, {0.7}), Error);
}

TEST_CASE("qubit fixed point is the Gibbs state")
{
    DissipatorSpec spec;
    const double down = 0.8, up = down * std::exp(-1.0);
    spec.channels.push_back({qubit::sigma_minus(), down, up});
    AttractorResult r = fixed_point(spec);
    // Rate balance p_e·down = p_g·up.
    double pg = down / (down + up), pe = up / (down + up);
    CHECK(r.state.data()(0, 0).real() == doctest::Approx(pg).epsilon(1e-14));
    CHECK(r.state.data()(1, 1).real() == doctest::Approx(pe).epsilon(1e-14));
    CHECK(std::abs(r.state.data()(0, 1)) < 1e-15);
    CHECK(r.residual < 1e-12);
    REQUIRE(r.deltas.size() == 1);
    CHECK(r.deltas[0] == doctest::Approx(1.0));

    DissipatorSpec eq;
    eq.channels.push_back({qubit::sigma_minus(), 0.4, 0.4});
    CHECK(max_abs(fixed_point(eq).state.data() - 0.5 * Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("fixed point equals Gibbs for random Hamiltonians")
{
    for (int d = 2; d <= 6; ++d) {
        Operator h = random_hermitian(d);
        const double beta = uniform(0.2, 1.5);
        EigenoperatorSet set;
        DissipatorSpec spec = thermal_spec(h, beta, set);
        AttractorResult r = fixed_point(spec, &set);
        CHECK(max_abs(r.state.data() - gibbs(h, beta)) < 1e-9);
        CHECK(r.residual < 1e-9);
        CHECK(r.warnings.empty());

        // Each channel annihilates the composite fixed point on its own.
        for (const auto& c : spec.channels) {
            DissipatorSpec one;
            one.channels.push_back(c);
            Superoperator dk = build_dissipator(one);
            CHECK(dk.apply(r.state.op()).max_abs() < 1e-9);
        }
    }
}

TEST_CASE("fixed point of a dressed JC toy against the Liouvillian kernel")
{
    JCParams p{1.0, 1.15, 0.2, 0.0};
    DressedStates ds = jc_dressed_states(1, p);
    // Levels |g,0⟩, |1,−⟩, |1,+⟩ in a 3-dimensional space.
    Vector g0 = Vector::Zero(3), minus = Vector::Zero(3), plus = Vector::Zero(3);
    g0(0) = 1.0;
    minus.tail(2) = ds.minus;
    plus.tail(2) = ds.plus;
    Matrix h = -0.5 * p.detuning() * proj(g0) + ds.e_minus * proj(minus) + ds.e_plus * proj(plus);
    const double beta = 0.9;
    DissipatorSpec spec;
    spec.channels.push_back({Operator(Matrix(g0 * minus.adjoint())), 0.3,
                             0.3 * std::exp(-beta * (ds.e_minus + 0.5 * p.detuning()))});
    spec.channels.push_back({Operator(Matrix(g0 * plus.adjoint())), 0.5,
                             0.5 * std::exp(-beta * (ds.e_plus + 0.5 * p.detuning()))});
    AttractorResult r = fixed_point(spec);
    CHECK(r.residual < 1e-10);

    Superoperator l = liouvillian(Operator(h), build_dissipator(spec));
    Eigen::FullPivLU<Matrix> lu(l.data());
    lu.setThreshold(1e-10);
    Matrix ker = lu.kernel();
    REQUIRE(ker.cols() == 1);
    Matrix k = unvec(Vector(ker.col(0)), 3).data();
    k /= k.trace();
    CHECK(max_abs(k - r.state.data()) < 1e-10);
    CHECK(max_abs(r.state.data() - gibbs(Operator(h), beta)) < 1e-10);
}

TEST_CASE("zero reverse rate takes the zero-temperature branch")
{
    DissipatorSpec spec;
    spec.channels.push_back({qubit::sigma_minus(), 1.0, 0.0});
    AttractorResult r = fixed_point(spec);
    CHECK_FALSE(r.warnings.empty());
    CHECK(max_abs(r.state.data() - proj(qubit::ground())) < 1e-10);
}

TEST_CASE("instantaneous attractor")
{
    AttractorResult eq = instantaneous_attractor({{qubit::sigma_minus(), 0.3, 0.3}});
    CHECK(max_abs(eq.state.data() - 0.5 * Matrix::Identity(2, 2)) < 1e-14);

    const double gk = 0.3 * std::exp(1.0);
    AttractorResult r = instantaneous_attractor({{qubit::sigma_minus(), gk, 0.3}});
    const double z = 1.0 + std::exp(-1.0);
    // F†F = |e⟩⟨e|: the excited population carries the Boltzmann factor.
    CHECK(r.state.data()(0, 0).real() == doctest::Approx(1.0 / z).epsilon(1e-13));
    CHECK(r.state.data()(1, 1).real() == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-13));
    CHECK(r.residual < 1e-12);
    CHECK(r.warnings.empty());

    CHECK_THROWS_AS(instantaneous_attractor({{qubit::sigma_x(), 1.0, 1.0}}), Error);

    // Rotated transition pair on a random basis of a qutrit.
    Matrix u = random_unitary(3);
    Operator f1(Matrix(u.col(0) * u.col(1).adjoint())), f2(Matrix(u.col(1) * u.col(2).adjoint()));
    AttractorResult t = instantaneous_attractor({{f1, 0.9, 0.4}, {f2, 0.6, 0.2}});
    CHECK(t.residual < 1e-12);
    CHECK(t.warnings.empty());
    const Matrix& hb = t.effective_hamiltonian.data();
    CHECK(max_abs(hb * f1.data() - f1.data() * hb + t.deltas[0] * f1.data()) < 1e-10);
}

TEST_CASE("Liouvillian assembly")
{
    Operator h = random_hermitian(3);
    Superoperator zero = Superoperator::zero(3);
    CHECK(max_abs(liouvillian(h, zero).data() - cplx(0, -1) * commutator_super(h).data()) < 1e-15);

    DissipatorSpec spec;
    spec.channels.push_back({qubit::sigma_minus(), 0.7, 0.0});
    Superoperator l = liouvillian(cplx(0.6) * qubit::sigma_z(), build_dissipator(spec));
    Eigen::ComplexEigenSolver<Matrix> es(l.data());
    Eigen::Index imin = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&imin);
    CHECK(std::abs(es.eigenvalues()(imin)) < 1e-12);
    Matrix nv = unvec(Vector(es.eigenvectors().col(imin)), 2).data();
    nv /= nv.trace();
    CHECK(max_abs(nv - proj(qubit::ground())) < 1e-12);

    Operator hr = random_hermitian(4);
    DissipatorSpec rs;
    for (int k = 0; k < 3; ++k) rs.channels.push_back({Operator(random_matrix(4)), uniform(0, 1), uniform(0, 1)});
    Superoperator lr = liouvillian(hr, build_dissipator(rs));
    CHECK((lr.data().adjoint() * vec(Operator::identity(4))).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(liouvillian(Operator(random_matrix(2)), Superoperator::zero(2)), Error);
}

TEST_CASE("time-translation symmetry")
{
    const int d = 4;
    Operator h = random_hermitian(d);
    EigenoperatorSet set;
    DissipatorSpec spec = thermal_spec(h, 0.7, set);
    Matrix v = Matrix::Zero(d, d);
    for (const auto& p : set.projectors) v += uniform(-1, 1) * p.data();
    spec.dephasing = AutonomousDephasing{{Operator(v)}, {0.3}};
    Superoperator l = liouvillian(h, build_dissipator(spec));
    CHECK(check_time_translation(l, h, 0.8, 1.7) < 1e-9);

    DissipatorSpec ctrl;
    ctrl.channels.push_back({qubit::sigma_x(), 1.0, 0.0});
    Superoperator lc = liouvillian(qubit::sigma_z(), build_dissipator(ctrl));
    CHECK(check_time_translation(lc, qubit::sigma_z(), 1.0, 0.5) > 0.1);

    CHECK(check_time_translation(Superoperator::zero(3), random_hermitian(3), 1.0, 2.0) == 0.0);
}

TEST_CASE("semigroups built from random specs are CPTP")
{
    for (int d = 2; d <= 4; ++d) {
        DissipatorSpec spec;
        for (int k = 0; k < 3; ++k) spec.channels.push_back({Operator(random_matrix(d)), uniform(0, 1), uniform(0, 1)});
        spec.lamb_shift = random_hermitian(d);
        Superoperator l = liouvillian(random_hermitian(d), build_dissipator(spec));
        const double scale = l.data().norm();
        for (double t : {0.1, 1.0, 10.0}) {
            Superoperator m(matrix_exp(Matrix((t / scale) * l.data())), d);
            Matrix c = choi_matrix(m);
            double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (c + c.adjoint())).eigenvalues()(0);
            CHECK(lmin >= -1e-8);
            DensityMatrix r = random_state(d);
            Matrix out = m.apply(r.op()).data();
            CHECK(std::abs(out.trace() - 1.0) < 1e-10);
            CHECK(max_abs(out - out.adjoint()) < 1e-10);
        }
    }
}

TEST_CASE("Choi matrix of the identity map")
{
    Matrix c = choi_matrix(Superoperator::identity(2));
    Vector omega = vec(Operator::identity(2));
    CHECK(max_abs(c - omega * omega.adjoint()) < 1e-15);
}
