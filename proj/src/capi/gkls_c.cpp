#include "gkls/gkls.h"

#include <cmath>
#include <cstring>
#include <string>

#include "gkls/bath.hpp"
#include "gkls/experiments.hpp"
#include "gkls/master_equation.hpp"

struct gkls_operator {
    gkls::Operator op;
};

struct gkls_superop {
    gkls::Superoperator s;
};

namespace {

thread_local std::string last_error;

gkls_status map_code(gkls::ErrorCode c)
{
    using gkls::ErrorCode;
    switch (c) {
    case ErrorCode::dimension: return GKLS_ERR_DIMENSION;
    case ErrorCode::contract: return GKLS_ERR_CONTRACT;
    case ErrorCode::domain: return GKLS_ERR_DOMAIN;
    case ErrorCode::numerical: return GKLS_ERR_NUMERICAL;
    case ErrorCode::truncation: return GKLS_ERR_TRUNCATION;
    case ErrorCode::degeneracy: return GKLS_ERR_DEGENERACY;
    case ErrorCode::config: return GKLS_ERR_CONFIG;
    case ErrorCode::io: return GKLS_ERR_IO;
    }
    return GKLS_ERR_INTERNAL;
}

template <class F>
gkls_status guarded(F&& f)
{
    try {
        f();
        last_error.clear();
        return GKLS_OK;
    } catch (const gkls::Error& e) {
        last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        last_error = e.what();
        return GKLS_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return GKLS_ERR_INTERNAL;
    }
}

gkls_status invalid(const char* msg)
{
    last_error = msg;
    return GKLS_ERR_INVALID_ARGUMENT;
}

gkls::Matrix read_matrix(const double* data, std::size_t dim)
{
    gkls::Matrix m(dim, dim);
    for (std::size_t k = 0; k < dim * dim; ++k)
        m.data()[k] = gkls::cplx(data[2 * k], data[2 * k + 1]);
    return m;
}

gkls::JCParams to_params(const gkls_jc_params& p)
{
    gkls::JCParams out;
    out.omega_c = p.omega_c;
    out.omega_eg = p.omega_eg;
    out.g = p.g;
    out.alpha = {p.alpha_re, p.alpha_im};
    return out;
}

gkls::DissipatorSpec to_spec(const gkls_operator* const* jumps, const double* rates,
                             const double* reverse_rates, std::size_t n)
{
    gkls::DissipatorSpec spec;
    for (std::size_t k = 0; k < n; ++k) {
        if (!jumps[k]) throw gkls::Error(gkls::ErrorCode::contract, "null jump operator");
        spec.channels.push_back({jumps[k]->op, rates[k], reverse_rates ? reverse_rates[k] : 0.0});
    }
    return spec;
}

}  // namespace

extern "C" {

const char* gkls_version(void) { return gkls::version(); }
const char* gkls_last_error(void) { return last_error.c_str(); }

const char* gkls_status_name(gkls_status status)
{
    switch (status) {
    case GKLS_OK: return "ok";
    case GKLS_ERR_DIMENSION: return "dimension";
    case GKLS_ERR_CONTRACT: return "contract";
    case GKLS_ERR_DOMAIN: return "domain";
    case GKLS_ERR_NUMERICAL: return "numerical";
    case GKLS_ERR_TRUNCATION: return "truncation";
    case GKLS_ERR_DEGENERACY: return "degeneracy";
    case GKLS_ERR_CONFIG: return "config";
    case GKLS_ERR_IO: return "io";
    case GKLS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GKLS_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

gkls_status gkls_operator_create(const double* data, size_t dim, gkls_operator** out)
{
    if (!data || !out || dim == 0) return invalid("operator_create: null pointer or zero dimension");
    return guarded([&] { *out = new gkls_operator{gkls::Operator(read_matrix(data, dim))}; });
}

gkls_status gkls_operator_create_with_dims(const double* data, const int* dims, size_t ndims,
                                           gkls_operator** out)
{
    if (!data || !dims || !out || ndims == 0) return invalid("operator_create_with_dims: bad arguments");
    return guarded([&] {
        std::vector<int> d(dims, dims + ndims);
        std::size_t n = 1;
        for (int x : d) {
            if (x <= 0) throw gkls::Error(gkls::ErrorCode::dimension, "subsystem dims must be positive");
            n *= static_cast<std::size_t>(x);
        }
        *out = new gkls_operator{gkls::Operator(read_matrix(data, n), d)};
    });
}

void gkls_operator_destroy(gkls_operator* op) { delete op; }

size_t gkls_operator_dim(const gkls_operator* op) { return op ? op->op.dim() : 0; }

gkls_status gkls_operator_data(const gkls_operator* op, double* out, size_t len)
{
    if (!op || !out) return invalid("operator_data: null pointer");
    const auto& m = op->op.data();
    if (len < 2 * static_cast<size_t>(m.size())) return invalid("operator_data: buffer too small");
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        out[2 * k] = m.data()[k].real();
        out[2 * k + 1] = m.data()[k].imag();
    }
    last_error.clear();
    return GKLS_OK;
}

gkls_status gkls_kron(const gkls_operator* a, const gkls_operator* b, gkls_operator** out)
{
    if (!a || !b || !out) return invalid("kron: null pointer");
    return guarded([&] { *out = new gkls_operator{gkls::kron(a->op, b->op)}; });
}

gkls_status gkls_partial_trace(const gkls_operator* rho, int keep, gkls_operator** out)
{
    if (!rho || !out) return invalid("partial_trace: null pointer");
    return guarded([&] {
        gkls::DensityMatrix r(rho->op);
        *out = new gkls_operator{gkls::partial_trace(r, keep).op()};
    });
}

gkls_status gkls_fidelity(const gkls_operator* rho, const gkls_operator* sigma, double* out)
{
    if (!rho || !sigma || !out) return invalid("fidelity: null pointer");
    return guarded([&] {
        *out = gkls::uhlmann_fidelity(gkls::DensityMatrix(rho->op), gkls::DensityMatrix(sigma->op));
    });
}

gkls_status gkls_superop_commutator(const gkls_operator* h, gkls_superop** out)
{
    if (!h || !out) return invalid("superop_commutator: null pointer");
    return guarded([&] { *out = new gkls_superop{gkls::commutator_super(h->op)}; });
}

gkls_status gkls_superop_dissipator(const gkls_operator* const* jumps, const double* rates,
                                    const double* reverse_rates, size_t n, gkls_superop** out)
{
    if (!out || (n > 0 && (!jumps || !rates))) return invalid("superop_dissipator: null pointer");
    if (n == 0) return invalid("superop_dissipator: needs at least one channel");
    return guarded([&] {
        *out = new gkls_superop{gkls::build_dissipator(to_spec(jumps, rates, reverse_rates, n))};
    });
}

gkls_status gkls_superop_liouvillian(const gkls_operator* h, const gkls_superop* d, gkls_superop** out)
{
    if (!h || !d || !out) return invalid("superop_liouvillian: null pointer");
    return guarded([&] { *out = new gkls_superop{gkls::liouvillian(h->op, d->s)}; });
}

gkls_status gkls_superop_apply(const gkls_superop* s, const gkls_operator* x, gkls_operator** out)
{
    if (!s || !x || !out) return invalid("superop_apply: null pointer");
    return guarded([&] { *out = new gkls_operator{s->s.apply(x->op)}; });
}

size_t gkls_superop_source_dim(const gkls_superop* s) { return s ? s->s.source_dim() : 0; }

void gkls_superop_destroy(gkls_superop* s) { delete s; }

gkls_status gkls_fixed_point(const gkls_operator* const* jumps, const double* rates,
                             const double* reverse_rates, size_t n, gkls_operator** state,
                             double* residual)
{
    if (!jumps || !rates || !reverse_rates || !state || n == 0)
        return invalid("fixed_point: bad arguments");
    return guarded([&] {
        gkls::AttractorResult r = gkls::fixed_point(to_spec(jumps, rates, reverse_rates, n));
        *state = new gkls_operator{r.state.op()};
        if (residual) *residual = r.residual;
    });
}

gkls_status gkls_jc_kinetic_coefficients(const gkls_jc_params* p, const gkls_bath_params* bath,
                                         gkls_kinetic* out)
{
    if (!p || !bath || !out) return invalid("jc_kinetic_coefficients: null pointer");
    if (bath->model < GKLS_BATH_OHMIC || bath->model > GKLS_BATH_BAND)
        return invalid("jc_kinetic_coefficients: unknown bath model");
    return guarded([&] {
        gkls::BathSpec b;
        b.temperature = bath->temperature;
        b.model = static_cast<gkls::SpectralModel>(bath->model);
        b.eta = bath->eta;
        b.cutoff = bath->cutoff;
        b.band_lo = bath->band_lo;
        b.band_hi = bath->band_hi;
        gkls::KineticCoefficients k = gkls::jc_kinetic_coefficients(to_params(*p), b);
        *out = {k.gamma0, k.gamma_minus, k.gamma_plus, k.s_plus, k.s_minus, k.omega};
    });
}

gkls_status gkls_jc_kraus_reduce(const gkls_operator* rho, const gkls_jc_params* p, double t,
                                 gkls_operator** out)
{
    if (!rho || !p || !out) return invalid("jc_kraus_reduce: null pointer");
    return guarded([&] {
        gkls::DensityMatrix r(rho->op);
        *out = new gkls_operator{gkls::jc_kraus_reduce(r, to_params(*p), t).op()};
    });
}

gkls_status gkls_touchard(int j, double x, double* out)
{
    if (!out) return invalid("touchard: null pointer");
    return guarded([&] { *out = gkls::touchard(j, x); });
}

gkls_status gkls_run_experiment(const char* name, const char* config_path,
                                const gkls_overrides* overrides, char** summary_json)
{
    if (!name) return invalid("run_experiment: null experiment name");
    return guarded([&] {
        gkls::ExperimentConfig cfg = config_path ? gkls::load_config(config_path, name)
                                                 : gkls::default_config(name);
        if (overrides) {
            gkls::Overrides o;
            if (overrides->out_dir) o.out = std::string(overrides->out_dir);
            if (overrides->n_alphas > 0) {
                if (!overrides->alphas)
                    throw gkls::Error(gkls::ErrorCode::config, "alpha override list is null");
                o.alphas = std::vector<gkls::cplx>(overrides->alphas,
                                                   overrides->alphas + overrides->n_alphas);
            }
            if (!std::isnan(overrides->tmax)) o.tmax = overrides->tmax;
            if (overrides->steps != 0) o.steps = overrides->steps;
            gkls::apply_overrides(cfg, o);
        }
        gkls::RunResult res = gkls::run_experiment(cfg);
        if (summary_json) {
            nlohmann::json j = res.summary;
            j["files"] = res.files;
            std::string s = j.dump(2);
            char* buf = new char[s.size() + 1];
            std::memcpy(buf, s.c_str(), s.size() + 1);
            *summary_json = buf;
        }
    });
}

void gkls_string_free(char* s) { delete[] s; }

}  // extern "C"
