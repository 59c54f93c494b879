/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "nmep/nmep.h"

static int failures = 0;

#define EXPECT(cond)                                                        \
    do {                                                                    \
        if (!(cond)) {                                                      \
            fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                     \
        }                                                                   \
    } while (0)

static void test_lambert(void) {
    nmep_complex z = {0.36787944117144233, 0.0};
    nmep_complex w;
    EXPECT(nmep_lambert_w(0, z, &w) == NMEP_OK);
    EXPECT(fabs(w.re - 0.2784645427610738) < 1e-15);
    z.re = 0.0;
    EXPECT(nmep_lambert_w(1, z, &w) == NMEP_ERR_DOMAIN);
    EXPECT(strlen(nmep_last_error()) > 0);
    EXPECT(strcmp(nmep_status_name(NMEP_ERR_DOMAIN), "domain error") == 0);
    EXPECT(nmep_lambert_w(0, z, NULL) == NMEP_ERR_INVALID_ARGUMENT);
}

static void test_system_and_integrate(void) {
    nmep_complex c[2] = {{-1.0, 0.0}, {-1.0, 0.0}};
    nmep_system* sys = NULL;
    nmep_series* ts = NULL;
    nmep_complex a0 = {1.0, 0.0};
    nmep_complex x, ref;
    int zeros = -1;
    size_t minima = 99;
    double period = 0.0;

    EXPECT(nmep_system_create(0.5, c, 2, &sys) == NMEP_OK);
    EXPECT(nmep_system_classes(sys) == 2);
    EXPECT(nmep_system_delay(sys) == 0.5);
    EXPECT(nmep_system_create(-1.0, c, 2, &sys) == NMEP_ERR_INVALID_ARGUMENT);

    EXPECT(nmep_integrate(sys, a0, 1.5, 0.5 / 64.0, &ts) == NMEP_OK);
    EXPECT(nmep_series_size(ts) == 193);
    EXPECT(nmep_series_sample(ts, 192, &x) == NMEP_OK);
    EXPECT(nmep_series_amplitude(1.0, 0.0, 0.5, 1.5, &ref) == NMEP_OK);
    EXPECT(fabs(x.re - ref.re) < 1e-8 && fabs(x.im - ref.im) < 1e-8);
    EXPECT(nmep_series_sample(ts, 1000, &x) == NMEP_ERR_INVALID_ARGUMENT);
    EXPECT(nmep_integrate(sys, a0, 1.0, 0.3, &ts) == NMEP_ERR_INVALID_ARGUMENT);
    nmep_series_destroy(ts);

    /* 2 e^{-t} - e^{-2t} never changes sign */
    {
        nmep_complex s1 = {-1.0, 0.0}, s2 = {-2.0, 0.0}, slope = {0.0, 0.0};
        EXPECT(nmep_pseudomode_two_pole(s1, s2, a0, slope, 5.0, 0.01, &ts) == NMEP_OK);
        EXPECT(nmep_series_oscillation(ts, &zeros, &minima, &period) == NMEP_OK);
        EXPECT(zeros == 0);
        EXPECT(minima == 0);
        EXPECT(isnan(period));
        nmep_series_destroy(ts);
    }
    nmep_system_destroy(sys);
    nmep_series_destroy(NULL);
    nmep_system_destroy(NULL);
}

static void test_poles(void) {
    double g[2];
    nmep_system* sys = NULL;
    nmep_poles* poles = NULL;
    nmep_pole p;
    int count = -1;
    g[0] = g[1] = sqrt(1.0 / (2.0 * 3.141592653589793));
    EXPECT(nmep_system_from_giant_atom(g, 2, 1.0, 0.2784645427610738, 0.0, &sys) == NMEP_OK);
    EXPECT(nmep_poles_closed_form(sys, -2, 2, &poles) == NMEP_OK);
    EXPECT(nmep_poles_size(poles) == 4);
    EXPECT(nmep_poles_get(poles, 0, &p) == NMEP_OK);
    EXPECT(p.multiplicity == 2);
    EXPECT(p.has_branch && p.branch == 0);
    nmep_poles_destroy(poles);
    EXPECT(nmep_argument_principle_count(sys, -5.0, -4.0, -0.5, 0.5, &count) == NMEP_OK);
    EXPECT(count == 2);
    EXPECT(nmep_poles_search(sys, -6.0, 1.0, -3.0, 3.0, 8, &poles) == NMEP_OK);
    EXPECT(nmep_poles_size(poles) == 1);
    nmep_poles_destroy(poles);
    nmep_system_destroy(sys);
}

static void test_ep(void) {
    nmep_ep_report* r = NULL;
    double value = 0.0;
    double eta = 0.0;
    double k[3] = {0.5, 0.2, -0.01};
    double out[3];
    const char* name = NULL;

    EXPECT(nmep_find_ep2_single_delay(1.0, 0.0, &r) == NMEP_OK);
    EXPECT(nmep_ep_report_found(r) == 1);
    EXPECT(fabs(nmep_ep_report_tau_ep(r) - 0.2784645427610738) < 1e-14);
    EXPECT(nmep_ep_report_residual_count(r) == 2);
    EXPECT(nmep_ep_report_parameter(r, 0, &name, &value) == NMEP_OK);
    EXPECT(strcmp(name, "gamma") == 0);
    EXPECT(strstr(nmep_ep_report_json(r), "\"tau_ep\"") != NULL);
    nmep_ep_report_destroy(r);

    EXPECT(nmep_design_epn(3, -2.0, 1.0, 0.0, 1.0, &r) == NMEP_OK);
    EXPECT(nmep_ep_report_physical(r) == 1);
    EXPECT(nmep_ep_report_find_parameter(r, "g1", &value) == NMEP_OK);
    EXPECT(fabs(value - 0.38234696) < 1e-7);
    EXPECT(nmep_ep_report_find_parameter(r, "nope", &value) == NMEP_ERR_INVALID_ARGUMENT);
    nmep_ep_report_destroy(r);

    r = NULL;
    EXPECT(nmep_design_epn(3, -2.0, 0.7, 0.0, 1.0, &r) == NMEP_ERR_INFEASIBLE);
    EXPECT(r == NULL);
    EXPECT(strstr(nmep_last_error(), "0.75") != NULL);

    EXPECT(nmep_collective_critical_distance(1.0, &eta) == NMEP_OK);
    EXPECT(fabs(eta - 0.556929086) < 1e-9);
    EXPECT(nmep_collective_critical_distance(0.0, &eta) == NMEP_ERR_DOMAIN);

    EXPECT(nmep_hankel_invert(k, 3, out) == NMEP_OK);
    EXPECT(out[0] > 0.0);
}

int main(void) {
    test_lambert();
    test_system_and_integrate();
    test_poles();
    test_ep();
    if (failures) {
        fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
    }
    printf("all C API checks passed (%s)\n", nmep_version());
    return 0;
}
