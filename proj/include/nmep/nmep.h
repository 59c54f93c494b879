/* nmep: delay dynamics, pole spectra and exceptional points of waveguide-QED
 * emitters. Plain C interface over the C++ library.
 *
 * Every fallible call returns nmep_status; on failure nmep_last_error()
 * describes the problem for the calling thread. Objects returned through
 * pointer arguments are owned by the caller and released with the matching
 * *_destroy function.
 */
#ifndef NMEP_H
#define NMEP_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(NMEP_BUILDING_LIBRARY)
#    define NMEP_API __declspec(dllexport)
#  else
#    define NMEP_API __declspec(dllimport)
#  endif
#else
#  define NMEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nmep_status {
    NMEP_OK = 0,
    NMEP_ERR_INVALID_ARGUMENT = 1,
    NMEP_ERR_DOMAIN = 2,
    NMEP_ERR_NO_CONVERGENCE = 3,
    NMEP_ERR_UNSUPPORTED = 4,
    NMEP_ERR_INCOMPLETE_SPECTRUM = 5,
    NMEP_ERR_CONTOUR = 6,
    NMEP_ERR_INFEASIBLE = 7,
    NMEP_ERR_OVERFLOW = 8,
    NMEP_ERR_IO = 9,
    NMEP_ERR_INTERNAL = 10
} nmep_status;

typedef struct nmep_complex {
    double re;
    double im;
} nmep_complex;

typedef struct nmep_pole {
    nmep_complex s;
    nmep_complex residue; /* 1/D'(s), zero for a multiple pole */
    int has_branch;
    int branch;
    int multiplicity;
} nmep_pole;

typedef struct nmep_system nmep_system;       /* da/dt = sum_m c_m a(t - m tau) */
typedef struct nmep_series nmep_series;       /* uniformly sampled amplitude */
typedef struct nmep_poles nmep_poles;         /* sorted pole set */
typedef struct nmep_ep_report nmep_ep_report; /* EP location and design */

NMEP_API const char* nmep_version(void);
NMEP_API const char* nmep_last_error(void);
NMEP_API const char* nmep_status_name(nmep_status status);

NMEP_API nmep_status nmep_lambert_w(int branch, nmep_complex z, nmep_complex* out);

/* systems */
NMEP_API nmep_status nmep_system_create(double delay, const nmep_complex* coeffs, size_t n, nmep_system** out);
NMEP_API nmep_status nmep_system_from_giant_atom(const double* couplings, size_t n, double group_velocity,
                                                 double tau, double phi, nmep_system** out);
NMEP_API nmep_status nmep_system_from_collective(double gamma, double beta, double phi_p, double tau,
                                                 nmep_system** out);
NMEP_API void nmep_system_destroy(nmep_system* system);
NMEP_API size_t nmep_system_classes(const nmep_system* system);
NMEP_API double nmep_system_delay(const nmep_system* system);
NMEP_API nmep_status nmep_system_coeff(const nmep_system* system, size_t m, nmep_complex* out);
NMEP_API nmep_status nmep_kappa_weights(const double* couplings, size_t n, double group_velocity, double* kappa_out);
NMEP_API nmep_status nmep_char_function(const nmep_system* system, nmep_complex s, int order, nmep_complex* out);

/* time domain */
NMEP_API nmep_status nmep_integrate(const nmep_system* system, nmep_complex a0, double t_max, double dt,
                                    nmep_series** out);
NMEP_API nmep_status nmep_series_amplitude(double gamma, double phi, double tau, double t, nmep_complex* out);
NMEP_API nmep_status nmep_integrate_two_atom(double gamma, double beta, double phi_p, double tau, nmep_complex c1_0,
                                             nmep_complex c2_0, double t_max, double dt, nmep_series** c1_out,
                                             nmep_series** c2_out);
/* omega0 = 0 and k_max = 0 select the defaults. max_norm_drift may be NULL.
 * An under-resolved run still returns NMEP_OK and leaves a warning in
 * nmep_last_error(). */
NMEP_API nmep_status nmep_field_oracle(const double* couplings, size_t n, double group_velocity, double tau,
                                       double phi, nmep_complex a0, double t_max, double dt, size_t modes,
                                       double omega0, double k_max, nmep_series** out, double* max_norm_drift);
NMEP_API nmep_status nmep_markovian_embedding(const nmep_complex* rates, const nmep_complex* weights, size_t n,
                                              nmep_complex x0, double t_max, double dt, nmep_series** out);
NMEP_API nmep_status nmep_pseudomode_two_pole(nmep_complex s1, nmep_complex s2, nmep_complex a0,
                                              nmep_complex initial_slope, double t_max, double dt,
                                              nmep_series** out);

NMEP_API void nmep_series_destroy(nmep_series* series);
NMEP_API size_t nmep_series_size(const nmep_series* series);
NMEP_API double nmep_series_t0(const nmep_series* series);
NMEP_API double nmep_series_dt(const nmep_series* series);
NMEP_API nmep_status nmep_series_sample(const nmep_series* series, size_t k, nmep_complex* out);
/* Copies min(capacity, size) samples. */
NMEP_API size_t nmep_series_copy(const nmep_series* series, nmep_complex* buffer, size_t capacity);
/* period is NaN when fewer than two minima exist. */
NMEP_API nmep_status nmep_series_oscillation(const nmep_series* series, int* zero_count, size_t* minima,
                                             double* period);
NMEP_API nmep_status nmep_series_write_csv(const nmep_series* series, const char* path);

/* spectrum */
NMEP_API nmep_status nmep_poles_closed_form(const nmep_system* system, int first, int last, nmep_poles** out);
NMEP_API nmep_status nmep_poles_search(const nmep_system* system, double re_min, double re_max, double im_min,
                                       double im_max, size_t max_poles, nmep_poles** out);
NMEP_API nmep_status nmep_argument_principle_count(const nmep_system* system, double re_min, double re_max,
                                                   double im_min, double im_max, int* out);
NMEP_API nmep_status nmep_residue_sum(const nmep_system* system, const nmep_poles* poles, nmep_complex a0, double t,
                                      int tail_correction, nmep_complex* out);
NMEP_API nmep_status nmep_scaling_fit(const double* taus, const double* omegas, size_t n, double tau_ep,
                                      double* exponent, double* r_squared);
NMEP_API void nmep_poles_destroy(nmep_poles* poles);
NMEP_API size_t nmep_poles_size(const nmep_poles* poles);
NMEP_API nmep_status nmep_poles_get(const nmep_poles* poles, size_t i, nmep_pole* out);
NMEP_API nmep_status nmep_poles_write_csv(const nmep_poles* poles, const char* path);

/* Closed-form poles of c = (-gamma, -gamma e^{i phi}) at each gamma*tau,
 * written as one CSV with a leading gamma_tau column. threads = 0 uses
 * every hardware thread. */
NMEP_API nmep_status nmep_poles_sweep_csv(double gamma, double phi, const double* gamma_taus, size_t n, int first,
                                          int last, unsigned threads, const char* path);

/* exceptional points */
NMEP_API nmep_status nmep_ep_residuals(const nmep_system* system, nmep_complex s, int order, double* out);
NMEP_API nmep_status nmep_find_ep2_single_delay(double gamma, double phi, nmep_ep_report** out);
NMEP_API nmep_status nmep_find_ep3_symmetric(double g1, double g2, double phi, double group_velocity,
                                             nmep_ep_report** out);
NMEP_API nmep_status nmep_design_epn(int n, double s_ep, double tau, double phi, double group_velocity,
                                     nmep_ep_report** out);
NMEP_API nmep_status nmep_hankel_invert(const double* k, size_t n, double* g_out);
NMEP_API nmep_status nmep_collective_critical_distance(double beta, double* eta_c);
NMEP_API nmep_status nmep_find_ep2_collective(double gamma, double beta, double phi_p, nmep_ep_report** out);

NMEP_API void nmep_ep_report_destroy(nmep_ep_report* report);
NMEP_API int nmep_ep_report_order(const nmep_ep_report* report);
NMEP_API int nmep_ep_report_found(const nmep_ep_report* report);
NMEP_API int nmep_ep_report_physical(const nmep_ep_report* report);
NMEP_API nmep_complex nmep_ep_report_s_ep(const nmep_ep_report* report);
NMEP_API double nmep_ep_report_tau_ep(const nmep_ep_report* report);
NMEP_API size_t nmep_ep_report_parameter_count(const nmep_ep_report* report);
NMEP_API nmep_status nmep_ep_report_parameter(const nmep_ep_report* report, size_t i, const char** name,
                                              double* value);
/* NMEP_ERR_INVALID_ARGUMENT when the name is absent. */
NMEP_API nmep_status nmep_ep_report_find_parameter(const nmep_ep_report* report, const char* name, double* value);
NMEP_API size_t nmep_ep_report_residual_count(const nmep_ep_report* report);
NMEP_API double nmep_ep_report_residual(const nmep_ep_report* report, size_t i);
NMEP_API size_t nmep_ep_report_note_count(const nmep_ep_report* report);
NMEP_API const char* nmep_ep_report_note(const nmep_ep_report* report, size_t i);
/* Valid until the report is destroyed. */
NMEP_API const char* nmep_ep_report_json(const nmep_ep_report* report);
NMEP_API nmep_status nmep_ep_report_write_json(const nmep_ep_report* report, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* NMEP_H */
