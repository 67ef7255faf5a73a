/*
 * Copyright 2026 The gkls Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GKLS_GKLS_H
#define GKLS_GKLS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(GKLS_BUILDING_LIBRARY)
#define GKLS_API __attribute__((visibility("default")))
#else
#define GKLS_API
#endif

typedef enum gkls_status {
    GKLS_OK = 0,
    GKLS_ERR_DIMENSION = 1,
    GKLS_ERR_CONTRACT = 2,
    GKLS_ERR_DOMAIN = 3,
    GKLS_ERR_NUMERICAL = 4,
    GKLS_ERR_TRUNCATION = 5,
    GKLS_ERR_DEGENERACY = 6,
    GKLS_ERR_CONFIG = 7,
    GKLS_ERR_IO = 8,
    GKLS_ERR_INVALID_ARGUMENT = 9,
    GKLS_ERR_INTERNAL = 10
} gkls_status;

typedef struct gkls_operator gkls_operator;
typedef struct gkls_superop gkls_superop;

GKLS_API const char* gkls_version(void);
/* Message of the last failure on the calling thread; empty after success. */
GKLS_API const char* gkls_last_error(void);
GKLS_API const char* gkls_status_name(gkls_status status);

/* Matrices cross the boundary column-major with interleaved (re, im) pairs,
 * 2*dim*dim doubles. */
GKLS_API gkls_status gkls_operator_create(const double* data, size_t dim, gkls_operator** out);
GKLS_API gkls_status gkls_operator_create_with_dims(const double* data, const int* dims,
                                                    size_t ndims, gkls_operator** out);
GKLS_API void gkls_operator_destroy(gkls_operator* op);
GKLS_API size_t gkls_operator_dim(const gkls_operator* op);
GKLS_API gkls_status gkls_operator_data(const gkls_operator* op, double* out, size_t len);

GKLS_API gkls_status gkls_kron(const gkls_operator* a, const gkls_operator* b, gkls_operator** out);
GKLS_API gkls_status gkls_partial_trace(const gkls_operator* rho, int keep, gkls_operator** out);
GKLS_API gkls_status gkls_fidelity(const gkls_operator* rho, const gkls_operator* sigma, double* out);

GKLS_API gkls_status gkls_superop_commutator(const gkls_operator* h, gkls_superop** out);
/* rates[k] drives jumps[k], reverse_rates[k] drives its adjoint. */
GKLS_API gkls_status gkls_superop_dissipator(const gkls_operator* const* jumps, const double* rates,
                                             const double* reverse_rates, size_t n,
                                             gkls_superop** out);
GKLS_API gkls_status gkls_superop_liouvillian(const gkls_operator* h, const gkls_superop* d,
                                              gkls_superop** out);
GKLS_API gkls_status gkls_superop_apply(const gkls_superop* s, const gkls_operator* x,
                                        gkls_operator** out);
GKLS_API size_t gkls_superop_source_dim(const gkls_superop* s);
GKLS_API void gkls_superop_destroy(gkls_superop* s);

GKLS_API gkls_status gkls_fixed_point(const gkls_operator* const* jumps, const double* rates,
                                      const double* reverse_rates, size_t n,
                                      gkls_operator** state, double* residual);

typedef struct gkls_jc_params {
    double omega_c;
    double omega_eg;
    double g;
    double alpha_re;
    double alpha_im;
} gkls_jc_params;

typedef enum gkls_bath_model {
    GKLS_BATH_OHMIC = 0,
    GKLS_BATH_CUBIC = 1,
    GKLS_BATH_FLAT = 2,
    GKLS_BATH_BAND = 3
} gkls_bath_model;

typedef struct gkls_bath_params {
    double temperature;
    gkls_bath_model model;
    double eta;
    double cutoff;
    double band_lo;
    double band_hi;
} gkls_bath_params;

typedef struct gkls_kinetic {
    double gamma0;
    double gamma_minus;
    double gamma_plus;
    double s_plus;
    double s_minus;
    double omega;
} gkls_kinetic;

GKLS_API gkls_status gkls_jc_kinetic_coefficients(const gkls_jc_params* p,
                                                  const gkls_bath_params* bath, gkls_kinetic* out);
GKLS_API gkls_status gkls_jc_kraus_reduce(const gkls_operator* rho, const gkls_jc_params* p,
                                          double t, gkls_operator** out);
GKLS_API gkls_status gkls_touchard(int j, double x, double* out);

/* Unset fields: NULL out_dir, n_alphas 0, NaN tmax, steps 0. */
typedef struct gkls_overrides {
    const char* out_dir;
    const double* alphas;
    size_t n_alphas;
    double tmax;
    int steps;
} gkls_overrides;

/* config_path may be NULL for built-in defaults. On success *summary_json
 * receives a string to release with gkls_string_free. */
GKLS_API gkls_status gkls_run_experiment(const char* name, const char* config_path,
                                         const gkls_overrides* overrides, char** summary_json);
GKLS_API void gkls_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
