#pragma once

#include <iosfwd>
#include <string>

#include "nmep/dynamics.hpp"
#include "nmep/ep_engine.hpp"
#include "nmep/spectral.hpp"

namespace nmep {

// `t,re_a,im_a,abs2`, 17 significant digits.
void write_csv(std::ostream& out, const TimeSeries& ts);

// `branch,re_s,im_s,re_residue,im_residue,multiplicity`. Rows of a sweep
// carry a leading gamma_tau column when `gamma_tau` is given.
void write_poles_csv_header(std::ostream& out, bool with_gamma_tau);
void write_poles_csv_rows(std::ostream& out, const PoleSet& poles, const double* gamma_tau = nullptr);
void write_poles_csv(std::ostream& out, const PoleSet& poles);

// Keys order, s_ep {re, im}, tau_ep, parameters, residuals, notes.
std::string to_json(const EPReport& report, int indent = 2);

// printf("%.17g") without locale dependence.
std::string format_double(double v);

}  // namespace nmep
