#include "nmep/nmep.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <new>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nmep/dynamics.hpp"
#include "nmep/ep_engine.hpp"
#include "nmep/io.hpp"
#include "nmep/models.hpp"
#include "nmep/special_functions.hpp"
#include "nmep/spectral.hpp"

struct nmep_system {
    nmep::DelaySystem value;
};

struct nmep_series {
    nmep::TimeSeries value;
};

struct nmep_poles {
    nmep::PoleSet value;
};

struct nmep_ep_report {
    nmep::EPReport value;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

nmep_status status_of(nmep::ErrorKind kind) {
    using nmep::ErrorKind;
    switch (kind) {
        case ErrorKind::invalid_argument: return NMEP_ERR_INVALID_ARGUMENT;
        case ErrorKind::domain: return NMEP_ERR_DOMAIN;
        case ErrorKind::no_convergence: return NMEP_ERR_NO_CONVERGENCE;
        case ErrorKind::unsupported: return NMEP_ERR_UNSUPPORTED;
        case ErrorKind::incomplete_spectrum: return NMEP_ERR_INCOMPLETE_SPECTRUM;
        case ErrorKind::contour: return NMEP_ERR_CONTOUR;
        case ErrorKind::infeasible: return NMEP_ERR_INFEASIBLE;
        case ErrorKind::overflow: return NMEP_ERR_OVERFLOW;
        case ErrorKind::io: return NMEP_ERR_IO;
    }
    return NMEP_ERR_INTERNAL;
}

nmep_status fail(nmep_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <class F>
nmep_status guard(F&& body) {
    try {
        g_last_error.clear();
        body();
        return NMEP_OK;
    } catch (const nmep::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(NMEP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NMEP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(NMEP_ERR_INTERNAL, "unknown failure");
    }
}

nmep::cplx to_cpp(nmep_complex c) { return {c.re, c.im}; }
nmep_complex to_c(nmep::cplx c) { return {c.real(), c.imag()}; }

void need(const void* p, const char* what) {
    if (!p) throw nmep::Error(nmep::ErrorKind::invalid_argument, std::string(what) + " must not be NULL");
}

// Runs `write` against the file at `path`, or stdout for "-".
template <class W>
void with_output(const char* path, W&& write) {
    need(path, "path");
    if (std::strcmp(path, "-") == 0) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nmep::Error(nmep::ErrorKind::io, std::string("cannot open ") + path + " for writing");
    write(out);
    out.flush();
    if (!out) throw nmep::Error(nmep::ErrorKind::io, std::string("write to ") + path + " failed");
}

std::vector<double> copy_doubles(const double* p, size_t n, const char* what) {
    if (n > 0) need(p, what);
    return std::vector<double>(p, p + n);
}

void emit_series(nmep::TimeSeries ts, nmep_series** out) {
    need(out, "out");
    *out = new nmep_series{std::move(ts)};
}

void emit_report(nmep::EPReport report, nmep_ep_report** out) {
    need(out, "out");
    auto* r = new nmep_ep_report{std::move(report), {}};
    r->json = nmep::to_json(r->value);
    *out = r;
}

}  // namespace

extern "C" {

const char* nmep_version(void) { return "1.0.0"; }

const char* nmep_last_error(void) { return g_last_error.c_str(); }

const char* nmep_status_name(nmep_status status) {
    switch (status) {
        case NMEP_OK: return "ok";
        case NMEP_ERR_INVALID_ARGUMENT: return "invalid argument";
        case NMEP_ERR_DOMAIN: return "domain error";
        case NMEP_ERR_NO_CONVERGENCE: return "no convergence";
        case NMEP_ERR_UNSUPPORTED: return "unsupported";
        case NMEP_ERR_INCOMPLETE_SPECTRUM: return "incomplete spectrum";
        case NMEP_ERR_CONTOUR: return "zero near contour";
        case NMEP_ERR_INFEASIBLE: return "infeasible";
        case NMEP_ERR_OVERFLOW: return "overflow";
        case NMEP_ERR_IO: return "i/o error";
        case NMEP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

nmep_status nmep_lambert_w(int branch, nmep_complex z, nmep_complex* out) {
    return guard([&] {
        need(out, "out");
        *out = to_c(nmep::lambert_w(branch, to_cpp(z)));
    });
}

nmep_status nmep_system_create(double delay, const nmep_complex* coeffs, size_t n, nmep_system** out) {
    return guard([&] {
        need(out, "out");
        need(coeffs, "coeffs");
        nmep::DelaySystem sys{delay, {}};
        for (size_t i = 0; i < n; ++i) sys.coeffs.push_back(to_cpp(coeffs[i]));
        sys.validate();
        *out = new nmep_system{std::move(sys)};
    });
}

nmep_status nmep_system_from_giant_atom(const double* couplings, size_t n, double group_velocity, double tau,
                                        double phi, nmep_system** out) {
    return guard([&] {
        need(out, "out");
        nmep::GiantAtomModel m{copy_doubles(couplings, n, "couplings"), group_velocity, tau, phi};
        *out = new nmep_system{nmep::giant_atom_to_delay_system(m)};
    });
}

nmep_status nmep_system_from_collective(double gamma, double beta, double phi_p, double tau, nmep_system** out) {
    return guard([&] {
        need(out, "out");
        *out = new nmep_system{nmep::collective_to_delay_system(nmep::CollectiveModel{gamma, beta, phi_p, tau})};
    });
}

void nmep_system_destroy(nmep_system* system) { delete system; }

size_t nmep_system_classes(const nmep_system* system) { return system ? system->value.classes() : 0; }

double nmep_system_delay(const nmep_system* system) {
    return system ? system->value.delay : std::numeric_limits<double>::quiet_NaN();
}

nmep_status nmep_system_coeff(const nmep_system* system, size_t m, nmep_complex* out) {
    return guard([&] {
        need(system, "system");
        need(out, "out");
        nmep::require(m < system->value.classes(), "nmep_system_coeff: class index out of range");
        *out = to_c(system->value.coeffs[m]);
    });
}

nmep_status nmep_kappa_weights(const double* couplings, size_t n, double group_velocity, double* kappa_out) {
    return guard([&] {
        need(kappa_out, "kappa_out");
        nmep::GiantAtomModel m{copy_doubles(couplings, n, "couplings"), group_velocity, 1.0, 0.0};
        const auto k = nmep::kappa_weights(m);
        std::copy(k.begin(), k.end(), kappa_out);
    });
}

nmep_status nmep_char_function(const nmep_system* system, nmep_complex s, int order, nmep_complex* out) {
    return guard([&] {
        need(system, "system");
        need(out, "out");
        *out = to_c(nmep::char_function(system->value, to_cpp(s), order));
    });
}

nmep_status nmep_integrate(const nmep_system* system, nmep_complex a0, double t_max, double dt, nmep_series** out) {
    return guard([&] {
        need(system, "system");
        emit_series(nmep::integrate(system->value, to_cpp(a0), t_max, dt), out);
    });
}

nmep_status nmep_series_amplitude(double gamma, double phi, double tau, double t, nmep_complex* out) {
    return guard([&] {
        need(out, "out");
        *out = to_c(nmep::series_amplitude(gamma, phi, tau, t));
    });
}

nmep_status nmep_integrate_two_atom(double gamma, double beta, double phi_p, double tau, nmep_complex c1_0,
                                    nmep_complex c2_0, double t_max, double dt, nmep_series** c1_out,
                                    nmep_series** c2_out) {
    return guard([&] {
        need(c1_out, "c1_out");
        need(c2_out, "c2_out");
        auto [a, b] = nmep::integrate_two_atom(nmep::CollectiveModel{gamma, beta, phi_p, tau}, to_cpp(c1_0),
                                               to_cpp(c2_0), t_max, dt);
        auto* first = new nmep_series{std::move(a)};
        *c2_out = new nmep_series{std::move(b)};
        *c1_out = first;
    });
}

nmep_status nmep_field_oracle(const double* couplings, size_t n, double group_velocity, double tau, double phi,
                              nmep_complex a0, double t_max, double dt, size_t modes, double omega0, double k_max,
                              nmep_series** out, double* max_norm_drift) {
    return guard([&] {
        need(out, "out");
        nmep::GiantAtomModel m{copy_doubles(couplings, n, "couplings"), group_velocity, tau, phi};
        nmep::FieldOracleOptions opt;
        opt.modes = modes;
        opt.omega0 = omega0;
        opt.k_max = k_max;
        auto res = nmep::field_oracle(m, to_cpp(a0), t_max, dt, opt);
        if (max_norm_drift) *max_norm_drift = res.max_norm_drift;
        if (!res.warnings.empty()) g_last_error = "warning: " + res.warnings.back();
        emit_series(std::move(res.amplitude), out);
    });
}

nmep_status nmep_markovian_embedding(const nmep_complex* rates, const nmep_complex* weights, size_t n,
                                     nmep_complex x0, double t_max, double dt, nmep_series** out) {
    return guard([&] {
        need(rates, "rates");
        need(weights, "weights");
        std::vector<nmep::cplx> r(n), w(n);
        for (size_t i = 0; i < n; ++i) {
            r[i] = to_cpp(rates[i]);
            w[i] = to_cpp(weights[i]);
        }
        emit_series(nmep::markovian_embedding(r, w, to_cpp(x0), t_max, dt), out);
    });
}

nmep_status nmep_pseudomode_two_pole(nmep_complex s1, nmep_complex s2, nmep_complex a0, nmep_complex initial_slope,
                                     double t_max, double dt, nmep_series** out) {
    return guard([&] {
        emit_series(nmep::pseudomode_two_pole(to_cpp(s1), to_cpp(s2), to_cpp(a0), to_cpp(initial_slope), t_max, dt),
                    out);
    });
}

void nmep_series_destroy(nmep_series* series) { delete series; }

size_t nmep_series_size(const nmep_series* series) { return series ? series->value.size() : 0; }

double nmep_series_t0(const nmep_series* series) {
    return series ? series->value.t0 : std::numeric_limits<double>::quiet_NaN();
}

double nmep_series_dt(const nmep_series* series) {
    return series ? series->value.dt : std::numeric_limits<double>::quiet_NaN();
}

nmep_status nmep_series_sample(const nmep_series* series, size_t k, nmep_complex* out) {
    return guard([&] {
        need(series, "series");
        need(out, "out");
        nmep::require(k < series->value.size(), "nmep_series_sample: index out of range");
        *out = to_c(series->value.samples[k]);
    });
}

size_t nmep_series_copy(const nmep_series* series, nmep_complex* buffer, size_t capacity) {
    if (!series || !buffer) return 0;
    const size_t n = std::min(capacity, series->value.size());
    for (size_t i = 0; i < n; ++i) buffer[i] = to_c(series->value.samples[i]);
    return n;
}

nmep_status nmep_series_oscillation(const nmep_series* series, int* zero_count, size_t* minima, double* period) {
    return guard([&] {
        need(series, "series");
        const auto m = nmep::oscillation_metrics(series->value);
        if (zero_count) *zero_count = m.zero_count;
        if (minima) *minima = m.minima_times.size();
        if (period) *period = m.fitted_period.value_or(std::numeric_limits<double>::quiet_NaN());
    });
}

nmep_status nmep_series_write_csv(const nmep_series* series, const char* path) {
    return guard([&] {
        need(series, "series");
        with_output(path, [&](std::ostream& out) { nmep::write_csv(out, series->value); });
    });
}

nmep_status nmep_poles_closed_form(const nmep_system* system, int first, int last, nmep_poles** out) {
    return guard([&] {
        need(system, "system");
        need(out, "out");
        *out = new nmep_poles{nmep::poles_closed_form(system->value, first, last)};
    });
}

nmep_status nmep_poles_search(const nmep_system* system, double re_min, double re_max, double im_min, double im_max,
                              size_t max_poles, nmep_poles** out) {
    return guard([&] {
        need(system, "system");
        need(out, "out");
        *out = new nmep_poles{nmep::poles_search(system->value, nmep::Rect{re_min, re_max, im_min, im_max}, max_poles)};
    });
}

nmep_status nmep_argument_principle_count(const nmep_system* system, double re_min, double re_max, double im_min,
                                          double im_max, int* out) {
    return guard([&] {
        need(system, "system");
        need(out, "out");
        *out = nmep::argument_principle_count(system->value, nmep::Rect{re_min, re_max, im_min, im_max});
    });
}

nmep_status nmep_residue_sum(const nmep_system* system, const nmep_poles* poles, nmep_complex a0, double t,
                             int tail_correction, nmep_complex* out) {
    return guard([&] {
        need(system, "system");
        need(poles, "poles");
        need(out, "out");
        nmep::ResidueOptions opt;
        opt.a0 = to_cpp(a0);
        opt.tail_correction = tail_correction != 0;
        *out = to_c(nmep::residue_sum(system->value, poles->value, t, opt));
    });
}

nmep_status nmep_scaling_fit(const double* taus, const double* omegas, size_t n, double tau_ep, double* exponent,
                             double* r_squared) {
    return guard([&] {
        const auto fit = nmep::scaling_fit(copy_doubles(taus, n, "taus"), copy_doubles(omegas, n, "omegas"), tau_ep);
        if (exponent) *exponent = fit.exponent;
        if (r_squared) *r_squared = fit.r_squared;
    });
}

void nmep_poles_destroy(nmep_poles* poles) { delete poles; }

size_t nmep_poles_size(const nmep_poles* poles) { return poles ? poles->value.size() : 0; }

nmep_status nmep_poles_get(const nmep_poles* poles, size_t i, nmep_pole* out) {
    return guard([&] {
        need(poles, "poles");
        need(out, "out");
        nmep::require(i < poles->value.size(), "nmep_poles_get: index out of range");
        const auto& p = poles->value.poles[i];
        out->s = to_c(p.s);
        out->residue = to_c(p.residue_weight);
        out->has_branch = p.branch.has_value() ? 1 : 0;
        out->branch = p.branch.value_or(0);
        out->multiplicity = p.multiplicity;
    });
}

nmep_status nmep_poles_write_csv(const nmep_poles* poles, const char* path) {
    return guard([&] {
        need(poles, "poles");
        with_output(path, [&](std::ostream& out) { nmep::write_poles_csv(out, poles->value); });
    });
}

nmep_status nmep_poles_sweep_csv(double gamma, double phi, const double* gamma_taus, size_t n, int first, int last,
                                 unsigned threads, const char* path) {
    return guard([&] {
        const auto points = copy_doubles(gamma_taus, n, "gamma_taus");
        nmep::require(std::isfinite(gamma) && gamma > 0.0, "nmep_poles_sweep_csv: gamma must be positive");
        // Each sweep point renders into its own buffer; output order is fixed.
        std::vector<std::string> chunks(points.size());
        std::vector<std::string> errors(points.size());
        std::atomic<size_t> next{0};
        auto work = [&] {
            for (size_t i = next++; i < points.size(); i = next++) {
                try {
                    const double tau = points[i] / gamma;
                    nmep::DelaySystem sys{tau, {-gamma, -gamma * std::polar(1.0, phi)}};
                    std::ostringstream out;
                    nmep::write_poles_csv_rows(out, nmep::poles_closed_form(sys, first, last), &points[i]);
                    chunks[i] = out.str();
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        };
        unsigned count = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
        count = static_cast<unsigned>(std::min<size_t>(count, std::max<size_t>(1, points.size())));
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < count; ++t) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();
        for (size_t i = 0; i < errors.size(); ++i) {
            if (!errors[i].empty()) {
                throw nmep::Error(nmep::ErrorKind::invalid_argument,
                                  "sweep point gamma_tau = " + nmep::format_double(points[i]) + ": " + errors[i]);
            }
        }
        with_output(path, [&](std::ostream& out) {
            nmep::write_poles_csv_header(out, true);
            for (const auto& c : chunks) out << c;
        });
    });
}

nmep_status nmep_ep_residuals(const nmep_system* system, nmep_complex s, int order, double* out) {
    return guard([&] {
        need(system, "system");
        need(out, "out");
        const auto r = nmep::ep_residuals(system->value, to_cpp(s), order);
        std::copy(r.begin(), r.end(), out);
    });
}

nmep_status nmep_find_ep2_single_delay(double gamma, double phi, nmep_ep_report** out) {
    return guard([&] { emit_report(nmep::find_ep2_single_delay(gamma, phi), out); });
}

nmep_status nmep_find_ep3_symmetric(double g1, double g2, double phi, double group_velocity, nmep_ep_report** out) {
    return guard([&] { emit_report(nmep::find_ep3_symmetric(g1, g2, phi, group_velocity), out); });
}

nmep_status nmep_design_epn(int n, double s_ep, double tau, double phi, double group_velocity, nmep_ep_report** out) {
    return guard([&] { emit_report(nmep::design_epN(n, s_ep, tau, phi, group_velocity), out); });
}

nmep_status nmep_hankel_invert(const double* k, size_t n, double* g_out) {
    return guard([&] {
        need(g_out, "g_out");
        const auto g = nmep::hankel_invert(copy_doubles(k, n, "k"));
        std::copy(g.begin(), g.end(), g_out);
    });
}

nmep_status nmep_collective_critical_distance(double beta, double* eta_c) {
    return guard([&] {
        need(eta_c, "eta_c");
        *eta_c = nmep::collective_critical_distance(beta);
    });
}

nmep_status nmep_find_ep2_collective(double gamma, double beta, double phi_p, nmep_ep_report** out) {
    return guard([&] { emit_report(nmep::find_ep2_collective(gamma, beta, phi_p), out); });
}

void nmep_ep_report_destroy(nmep_ep_report* report) { delete report; }

int nmep_ep_report_order(const nmep_ep_report* report) { return report ? report->value.order : 0; }

int nmep_ep_report_found(const nmep_ep_report* report) { return report && report->value.found ? 1 : 0; }

int nmep_ep_report_physical(const nmep_ep_report* report) { return report && report->value.physical ? 1 : 0; }

nmep_complex nmep_ep_report_s_ep(const nmep_ep_report* report) {
    return report ? to_c(report->value.s_ep) : nmep_complex{0.0, 0.0};
}

double nmep_ep_report_tau_ep(const nmep_ep_report* report) { return report ? report->value.tau_ep : 0.0; }

size_t nmep_ep_report_parameter_count(const nmep_ep_report* report) {
    return report ? report->value.parameters.size() : 0;
}

nmep_status nmep_ep_report_parameter(const nmep_ep_report* report, size_t i, const char** name, double* value) {
    return guard([&] {
        need(report, "report");
        nmep::require(i < report->value.parameters.size(), "nmep_ep_report_parameter: index out of range");
        if (name) *name = report->value.parameters[i].first.c_str();
        if (value) *value = report->value.parameters[i].second;
    });
}

nmep_status nmep_ep_report_find_parameter(const nmep_ep_report* report, const char* name, double* value) {
    return guard([&] {
        need(report, "report");
        need(name, "name");
        const auto v = report->value.parameter(name);
        nmep::require(v.has_value(), std::string("no parameter named ") + name);
        if (value) *value = *v;
    });
}

size_t nmep_ep_report_residual_count(const nmep_ep_report* report) {
    return report ? report->value.residuals.size() : 0;
}

double nmep_ep_report_residual(const nmep_ep_report* report, size_t i) {
    if (!report || i >= report->value.residuals.size()) return std::numeric_limits<double>::quiet_NaN();
    return report->value.residuals[i];
}

size_t nmep_ep_report_note_count(const nmep_ep_report* report) { return report ? report->value.notes.size() : 0; }

const char* nmep_ep_report_note(const nmep_ep_report* report, size_t i) {
    if (!report || i >= report->value.notes.size()) return nullptr;
    return report->value.notes[i].c_str();
}

const char* nmep_ep_report_json(const nmep_ep_report* report) { return report ? report->json.c_str() : nullptr; }

nmep_status nmep_ep_report_write_json(const nmep_ep_report* report, const char* path) {
    return guard([&] {
        need(report, "report");
        with_output(path, [&](std::ostream& out) { out << report->json << '\n'; });
    });
}

}  // extern "C"
