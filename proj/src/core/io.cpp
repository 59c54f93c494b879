#include "nmep/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace nmep {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const TimeSeries& ts) {
    out << "t,re_a,im_a,abs2\n";
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const cplx a = ts.samples[k];
        out << format_double(ts.time(k)) << ',' << format_double(a.real()) << ',' << format_double(a.imag()) << ','
            << format_double(std::norm(a)) << '\n';
    }
}

void write_poles_csv_header(std::ostream& out, bool with_gamma_tau) {
    if (with_gamma_tau) out << "gamma_tau,";
    out << "branch,re_s,im_s,re_residue,im_residue,multiplicity\n";
}

void write_poles_csv_rows(std::ostream& out, const PoleSet& poles, const double* gamma_tau) {
    for (const Pole& p : poles.poles) {
        if (gamma_tau) out << format_double(*gamma_tau) << ',';
        if (p.branch) out << *p.branch;
        out << ',' << format_double(p.s.real()) << ',' << format_double(p.s.imag()) << ','
            << format_double(p.residue_weight.real()) << ',' << format_double(p.residue_weight.imag()) << ','
            << p.multiplicity << '\n';
    }
}

void write_poles_csv(std::ostream& out, const PoleSet& poles) {
    write_poles_csv_header(out, false);
    write_poles_csv_rows(out, poles);
}

std::string to_json(const EPReport& report, int indent) {
    nlohmann::ordered_json j;
    j["order"] = report.order;
    j["found"] = report.found;
    j["physical"] = report.physical;
    j["s_ep"] = {{"re", report.s_ep.real()}, {"im", report.s_ep.imag()}};
    j["tau_ep"] = report.tau_ep;
    auto params = nlohmann::ordered_json::object();
    for (const auto& [name, value] : report.parameters) params[name] = value;
    j["parameters"] = params;
    j["residuals"] = report.residuals;
    j["notes"] = report.notes;
    if (!report.scan.empty()) {
        auto scan = nlohmann::ordered_json::array();
        for (const auto& [x, y] : report.scan) scan.push_back({x, std::isfinite(y) ? nlohmann::ordered_json(y) : nullptr});
        j["scan"] = scan;
    }
    return j.dump(indent);
}

}  // namespace nmep
