// nmep_cli: decay curves, pole tables and EP reports for waveguide delay systems.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nmep/nmep.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoEp = 2;
constexpr int kExitUsage = 64;
constexpr double kPi = 3.14159265358979323846;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Library failure with its status already captured.
struct LibraryError : std::runtime_error {
    nmep_status status;
    LibraryError(nmep_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(nmep_status status, const char* what) {
    if (status != NMEP_OK) throw LibraryError(status, std::string(what) + ": " + nmep_last_error());
}

struct SeriesDeleter {
    void operator()(nmep_series* s) const { nmep_series_destroy(s); }
};
struct SystemDeleter {
    void operator()(nmep_system* s) const { nmep_system_destroy(s); }
};
struct PolesDeleter {
    void operator()(nmep_poles* p) const { nmep_poles_destroy(p); }
};
struct ReportDeleter {
    void operator()(nmep_ep_report* r) const { nmep_ep_report_destroy(r); }
};
using SeriesPtr = std::unique_ptr<nmep_series, SeriesDeleter>;
using SystemPtr = std::unique_ptr<nmep_system, SystemDeleter>;
using PolesPtr = std::unique_ptr<nmep_poles, PolesDeleter>;
using ReportPtr = std::unique_ptr<nmep_ep_report, ReportDeleter>;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("malformed ") + what + " list: '" + text + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
    return out;
}

// "a:b" or "a:b:c" split on colons.
std::vector<double> parse_colon(const std::string& text, std::size_t parts, const char* what) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError(std::string("malformed ") + what + ": '" + text + "'");
        }
    }
    if (out.size() != parts) throw UsageError(std::string("malformed ") + what + ": '" + text + "'");
    return out;
}

std::vector<double> expand_range(const std::string& text) {
    const auto r = parse_colon(text, 3, "--tau-range");
    if (!(r[2] > 0.0) || r[1] < r[0]) throw UsageError("--tau-range needs start <= stop and a positive step");
    const auto n = static_cast<long>(std::floor((r[1] - r[0]) / r[2] + 1e-9));
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) out.push_back(r[0] + static_cast<double>(i) * r[2]);
    return out;
}

unsigned thread_cap() {
    const char* env = std::getenv("NMEP_THREADS");
    if (!env || !*env) return 0;
    try {
        const long v = std::stol(env);
        return v > 0 ? static_cast<unsigned>(v) : 0;
    } catch (const std::exception&) {
        throw UsageError(std::string("NMEP_THREADS must be a positive integer, got '") + env + "'");
    }
}

struct Options {
    std::string output = "-";
    std::string format;
    std::string seed_figure;

    double gamma = 1.0;
    double phi = 0.0;
    std::string gamma_tau;
    std::string couplings;
    double v_g = 1.0;
    double t_max = 10.0;
    double dt = 0.0;
    double a0 = 1.0;
    std::string method = "integrate";

    std::string tau_range;
    std::string branches = "-3:3";
    std::string rect;
    int max_poles = 64;

    double g1 = 1.0;
    double g2 = 1.0;

    int order = 3;
    double s_ep = -2.0;
    double tau = 1.0;

    double beta = 1.0;
    double phi_p = 0.0;

    int modes = 4000;
    double omega0 = 0.0;
    double k_max = 0.0;
};

void apply_preset(const std::string& command, Options& o, const std::set<std::string>& given) {
    if (o.seed_figure.empty()) return;
    const std::string& f = o.seed_figure;
    auto set = [&](const std::string& flag, auto& field, auto value) {
        if (!given.count(flag)) field = value;
    };
    const std::map<std::string, double> fig2_phase = {
        {"2a", 0.0}, {"2b", kPi / 3.0}, {"2c", 2.0 * kPi / 3.0}, {"2d", kPi}};
    if (fig2_phase.count(f)) {
        if (command != "poles") throw UsageError("--seed-figure " + f + " applies to 'poles'");
        set("--gamma", o.gamma, 1.0);
        set("--phi", o.phi, fig2_phase.at(f));
        set("--tau-range", o.tau_range, std::string("0.05:1.0:0.005"));
        set("--branches", o.branches, std::string("-3:3"));
        return;
    }
    if (f == "3") {
        if (command != "decay") throw UsageError("--seed-figure 3 applies to 'decay'");
        set("--gamma", o.gamma, 1.0);
        set("--phi", o.phi, 0.0);
        set("--gamma-tau", o.gamma_tau, std::string("0.1,0.27846454276107380,0.5,1.0"));
        set("--t-max", o.t_max, 10.0);
        return;
    }
    if (f == "4") {
        if (command == "decay") {
            set("--couplings", o.couplings, std::string("1,1,-0.03846"));
            set("--phi", o.phi, 0.0);
            set("--gamma-tau", o.gamma_tau, std::string("0.1,0.1332,0.1665,0.1998,0.25"));
            set("--t-max", o.t_max, 1.5);
            return;
        }
        if (command == "ep3") {
            set("--g1", o.g1, 1.0);
            set("--g2", o.g2, 1.0);
            set("--phi", o.phi, 0.0);
            return;
        }
        throw UsageError("--seed-figure 4 applies to 'decay' and 'ep3'");
    }
    throw UsageError("unknown --seed-figure '" + f + "' (expected 2a, 2b, 2c, 2d, 3 or 4)");
}

void require_format(const Options& o, const char* expected) {
    if (!o.format.empty() && o.format != expected) {
        throw UsageError("this command writes " + std::string(expected) + ", not " + o.format);
    }
}

// Giant atom from --couplings (gamma = pi g1^2 / v_g) or the two-point
// system c = (-gamma, -gamma e^{i phi}).
struct Model {
    std::vector<double> couplings;
    double gamma;
};

Model model_of(const Options& o) {
    if (!o.couplings.empty()) {
        auto g = parse_list(o.couplings, "--couplings");
        if (g[0] == 0.0) throw UsageError("--couplings: g1 must be nonzero to fix the rate unit");
        return {g, kPi * g[0] * g[0] / o.v_g};
    }
    if (!(o.gamma > 0.0)) throw UsageError("--gamma must be positive");
    return {{}, o.gamma};
}

SystemPtr system_of(const Options& o, const Model& m, double tau) {
    nmep_system* sys = nullptr;
    if (!m.couplings.empty()) {
        check(nmep_system_from_giant_atom(m.couplings.data(), m.couplings.size(), o.v_g, tau, o.phi, &sys), "model");
    } else {
        const nmep_complex c[2] = {{-o.gamma, 0.0}, {-o.gamma * std::cos(o.phi), -o.gamma * std::sin(o.phi)}};
        check(nmep_system_create(tau, c, 2, &sys), "model");
    }
    return SystemPtr(sys);
}

std::vector<nmep_complex> samples_of(const nmep_series* s) {
    std::vector<nmep_complex> out(nmep_series_size(s));
    nmep_series_copy(s, out.data(), out.size());
    return out;
}

struct Curve {
    double dt = 0.0;
    std::vector<nmep_complex> values;
};

// Amplitude on the grid k*dt, k = 0..t_max/dt, by the selected method.
Curve decay_curve(const Options& o, const Model& m, double gamma_tau) {
    const double tau = gamma_tau / m.gamma;
    const double dt = o.dt > 0.0 ? o.dt : tau / 64.0;
    auto sys = system_of(o, m, tau);
    nmep_series* raw = nullptr;
    check(nmep_integrate(sys.get(), {o.a0, 0.0}, o.t_max, dt, &raw), "integrate");
    SeriesPtr series(raw);
    Curve c{dt, samples_of(series.get())};
    if (o.method == "integrate") return c;
    if (!m.couplings.empty()) throw UsageError("--method " + o.method + " applies to the two-point system only");
    if (o.method == "series") {
        for (std::size_t k = 0; k < c.values.size(); ++k) {
            nmep_complex v;
            check(nmep_series_amplitude(o.gamma, o.phi, tau, static_cast<double>(k) * dt, &v), "series");
            c.values[k] = {o.a0 * v.re, o.a0 * v.im};
        }
    } else if (o.method == "residue") {
        const auto b = parse_colon(o.branches, 2, "--branches");
        nmep_poles* poles = nullptr;
        check(nmep_poles_closed_form(sys.get(), static_cast<int>(b[0]), static_cast<int>(b[1]), &poles), "poles");
        PolesPtr hold(poles);
        for (std::size_t k = 1; k < c.values.size(); ++k) {
            check(nmep_residue_sum(sys.get(), poles, {o.a0, 0.0}, static_cast<double>(k) * dt, 1, &c.values[k]),
                  "residue sum");
        }
    } else {
        throw UsageError("--method must be integrate, series or residue");
    }
    return c;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw LibraryError(NMEP_ERR_IO, "cannot open " + path + " for writing");
    f << text;
}

int run_decay(const Options& o) {
    require_format(o, "csv");
    if (o.gamma_tau.empty()) throw UsageError("decay needs --gamma-tau");
    const Model m = model_of(o);
    const auto taus = parse_list(o.gamma_tau, "--gamma-tau");
    const bool family = taus.size() > 1;
    std::ostringstream out;
    out << (family ? "gamma_tau," : "") << "t,re_a,im_a,abs2\n";
    for (double gt : taus) {
        const Curve c = decay_curve(o, m, gt);
        for (std::size_t k = 0; k < c.values.size(); ++k) {
            const nmep_complex v = c.values[k];
            if (family) out << num(gt) << ',';
            out << num(static_cast<double>(k) * c.dt) << ',' << num(v.re) << ',' << num(v.im) << ','
                << num(v.re * v.re + v.im * v.im) << '\n';
        }
    }
    write_text(o.output, out.str());
    return kExitOk;
}

int run_poles(const Options& o) {
    require_format(o, "csv");
    const auto b = parse_colon(o.branches, 2, "--branches");
    const int first = static_cast<int>(b[0]);
    const int last = static_cast<int>(b[1]);
    if (!o.rect.empty() || !o.couplings.empty()) {
        if (o.gamma_tau.empty()) throw UsageError("a pole search needs a single --gamma-tau");
        const Model m = model_of(o);
        const auto gt = parse_list(o.gamma_tau, "--gamma-tau");
        if (gt.size() != 1) throw UsageError("a pole search needs a single --gamma-tau");
        const double tau = gt[0] / m.gamma;
        auto sys = system_of(o, m, tau);
        std::vector<double> r;
        if (o.rect.empty()) {
            // Default: the band of dominant poles.
            r = {-10.0 / tau, 0.5 / tau, -12.0 / tau, 12.0 / tau};
        } else {
            r = parse_colon(o.rect, 4, "--rect");
        }
        nmep_poles* poles = nullptr;
        check(nmep_poles_search(sys.get(), r[0], r[1], r[2], r[3], static_cast<std::size_t>(o.max_poles), &poles),
              "pole search");
        PolesPtr hold(poles);
        check(nmep_poles_write_csv(poles, o.output.c_str()), "write");
        return kExitOk;
    }
    std::vector<double> taus;
    if (!o.tau_range.empty()) {
        taus = expand_range(o.tau_range);
    } else if (!o.gamma_tau.empty()) {
        taus = parse_list(o.gamma_tau, "--gamma-tau");
    } else {
        throw UsageError("poles needs --tau-range or --gamma-tau");
    }
    if (taus.size() == 1 && o.tau_range.empty()) {
        auto sys = system_of(o, model_of(o), taus[0] / o.gamma);
        nmep_poles* poles = nullptr;
        check(nmep_poles_closed_form(sys.get(), first, last, &poles), "poles");
        PolesPtr hold(poles);
        check(nmep_poles_write_csv(poles, o.output.c_str()), "write");
        return kExitOk;
    }
    check(nmep_poles_sweep_csv(o.gamma, o.phi, taus.data(), taus.size(), first, last, thread_cap(), o.output.c_str()),
          "pole sweep");
    return kExitOk;
}

int emit_report(const Options& o, nmep_status status, nmep_ep_report* raw, const char* what) {
    if (status == NMEP_ERR_INFEASIBLE) {
        std::cerr << "nmep_cli: " << what << ": " << nmep_last_error() << '\n';
        return kExitNoEp;
    }
    check(status, what);
    ReportPtr report(raw);
    check(nmep_ep_report_write_json(report.get(), o.output.c_str()), "write");
    if (!nmep_ep_report_found(report.get()) || !nmep_ep_report_physical(report.get())) {
        for (std::size_t i = 0; i < nmep_ep_report_note_count(report.get()); ++i) {
            std::cerr << "nmep_cli: " << nmep_ep_report_note(report.get(), i) << '\n';
        }
        return kExitNoEp;
    }
    return kExitOk;
}

int run_oracle(const Options& o) {
    require_format(o, "csv");
    Model m;
    if (o.couplings.empty()) {
        // Two equal points with kappa_0 = kappa_1 = gamma.
        if (!(o.gamma > 0.0)) throw UsageError("--gamma must be positive");
        const double g = std::sqrt(o.gamma * o.v_g / (2.0 * kPi));
        m = {{g, g}, o.gamma};
    } else {
        m = model_of(o);
    }
    const auto gt = parse_list(o.gamma_tau.empty() ? std::string("0.2") : o.gamma_tau, "--gamma-tau");
    if (gt.size() != 1) throw UsageError("oracle needs a single --gamma-tau");
    const double tau = gt[0] / m.gamma;
    const double dt = o.dt > 0.0 ? o.dt : tau / 16.0;
    const double t_max = o.t_max;

    nmep_system* sys_raw = nullptr;
    check(nmep_system_from_giant_atom(m.couplings.data(), m.couplings.size(), o.v_g, tau, o.phi, &sys_raw), "model");
    SystemPtr sys(sys_raw);
    nmep_series* dde_raw = nullptr;
    check(nmep_integrate(sys.get(), {o.a0, 0.0}, t_max, dt, &dde_raw), "integrate");
    SeriesPtr dde(dde_raw);
    nmep_series* field_raw = nullptr;
    double drift = 0.0;
    check(nmep_field_oracle(m.couplings.data(), m.couplings.size(), o.v_g, tau, o.phi, {o.a0, 0.0}, t_max, dt,
                            static_cast<std::size_t>(o.modes), o.omega0, o.k_max, &field_raw, &drift),
          "field oracle");
    const std::string warning = nmep_last_error();
    SeriesPtr field(field_raw);

    const auto a = samples_of(dde.get());
    const auto b = samples_of(field.get());
    std::ostringstream out;
    out << "t,re_dde,im_dde,re_oracle,im_oracle,abs_dev\n";
    double max_dev = 0.0;
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
        const double dev = std::abs(std::hypot(a[k].re, a[k].im) - std::hypot(b[k].re, b[k].im));
        max_dev = std::max(max_dev, dev);
        out << num(static_cast<double>(k) * dt) << ',' << num(a[k].re) << ',' << num(a[k].im) << ',' << num(b[k].re) << ','
            << num(b[k].im) << ',' << num(dev) << '\n';
    }
    nlohmann::ordered_json summary;
    summary["gamma_tau"] = gt[0];
    summary["modes"] = o.modes;
    summary["max_abs_deviation"] = max_dev;
    summary["max_norm_drift"] = drift;
    summary["warnings"] = warning.empty() ? nlohmann::ordered_json::array() : nlohmann::ordered_json::array({warning});
    write_text(o.output, out.str());
    (o.output == "-" ? std::cerr : std::cout) << summary.dump(2) << '\n';
    return kExitOk;
}

// Flat JSON config -> argv tokens; keys use underscores for dashes.
std::vector<std::string> config_tokens(const std::string& path, std::string& command) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed config " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config " + path + " must hold a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command") {
            if (!value.is_string()) throw UsageError("config key 'command' must be a string");
            command = value.get<std::string>();
            continue;
        }
        std::string flag = "--" + key;
        for (char& c : flag) {
            if (c == '_') c = '-';
        }
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_number_integer()) {
            text = std::to_string(value.get<long long>());
        } else if (value.is_number()) {
            text = num(value.get<double>());
        } else if (value.is_array()) {
            for (const auto& item : value) {
                if (!item.is_number()) throw UsageError("config list '" + key + "' must hold numbers");
                if (!text.empty()) text += ',';
                text += num(item.get<double>());
            }
        } else {
            throw UsageError("config key '" + key + "' has an unsupported value type");
        }
        tokens.push_back(flag + "=" + text);
    }
    return tokens;
}

const std::vector<std::string> kCommands = {"decay", "poles", "ep2", "ep3", "design", "collective", "oracle"};

int run(int argc, char** argv) {
    // Pull --config out first so that file values come before every flag.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> config;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a path");
            config = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    std::vector<std::string> merged;
    if (config) {
        std::string file_command;
        auto tokens = config_tokens(*config, file_command);
        std::string command = file_command;
        if (!rest.empty() && std::find(kCommands.begin(), kCommands.end(), rest.front()) != kCommands.end()) {
            command = rest.front();
            rest.erase(rest.begin());
        }
        if (command.empty()) throw UsageError("no command given on the command line or in the config");
        merged.push_back(command);
        merged.insert(merged.end(), tokens.begin(), tokens.end());
        merged.insert(merged.end(), rest.begin(), rest.end());
    } else {
        merged = rest;
    }

    CLI::App app{"Delay dynamics, pole spectra and exceptional points of waveguide-QED emitters", "nmep_cli"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(nmep_version()));
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-o,--output", o.output, "Output path, '-' for stdout");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed-figure", o.seed_figure, "Preset: 2a, 2b, 2c, 2d, 3 or 4");
    };
    auto decay = app.add_subcommand("decay", "Time-domain amplitude a(t) as CSV");
    common(decay);
    decay->add_option("--gamma", o.gamma, "Rate gamma = kappa_0 = kappa_1 of the two-point system");
    decay->add_option("--phi", o.phi, "Phase omega_0 tau");
    decay->add_option("--gamma-tau", o.gamma_tau, "gamma*tau, or a comma list for a family");
    decay->add_option("--couplings", o.couplings, "Comma list g_1..g_N; rate unit pi g_1^2 / v_g");
    decay->add_option("--v-g", o.v_g, "Group velocity");
    decay->add_option("--t-max", o.t_max, "Final time");
    decay->add_option("--dt", o.dt, "Step; tau/dt must be an integer (default tau/64)");
    decay->add_option("--a0", o.a0, "Initial amplitude");
    decay->add_option("--method", o.method, "integrate, series or residue");
    decay->add_option("--branches", o.branches, "Branch range a:b for --method residue");

    auto poles = app.add_subcommand("poles", "Pole table as CSV, optionally swept over gamma*tau");
    common(poles);
    poles->add_option("--gamma", o.gamma, "Rate gamma");
    poles->add_option("--phi", o.phi, "Phase omega_0 tau");
    poles->add_option("--tau-range", o.tau_range, "gamma*tau sweep start:stop:step");
    poles->add_option("--gamma-tau", o.gamma_tau, "Single gamma*tau (or comma list)");
    poles->add_option("--branches", o.branches, "Lambert branch range a:b");
    poles->add_option("--couplings", o.couplings, "Comma list g_1..g_N; switches to the contour search");
    poles->add_option("--v-g", o.v_g, "Group velocity");
    poles->add_option("--rect", o.rect, "Search rectangle re_min:re_max:im_min:im_max");
    poles->add_option("--max-poles", o.max_poles, "Upper bound on zeros in the rectangle");

    auto ep2 = app.add_subcommand("ep2", "Second-order EP of the two-point giant atom");
    common(ep2);
    ep2->add_option("--gamma", o.gamma, "Rate gamma");
    ep2->add_option("--phi", o.phi, "Phase omega_0 tau");

    auto ep3 = app.add_subcommand("ep3", "Third-order EP of the three-point giant atom");
    common(ep3);
    ep3->add_option("--g1", o.g1, "Coupling g_1");
    ep3->add_option("--g2", o.g2, "Coupling g_2");
    ep3->add_option("--phi", o.phi, "Phase omega_0 tau");
    ep3->add_option("--v-g", o.v_g, "Group velocity");

    auto design = app.add_subcommand("design", "Place an order-N EP and recover the couplings");
    common(design);
    design->add_option("--order", o.order, "EP order N (2..6)");
    design->add_option("--s-ep", o.s_ep, "Target EP location (negative)");
    design->add_option("--tau", o.tau, "Delay tau");
    design->add_option("--phi", o.phi, "Phase (must be 0 mod 2 pi)");
    design->add_option("--v-g", o.v_g, "Group velocity");

    auto collective = app.add_subcommand("collective", "Critical distance and EP of two emitters");
    common(collective);
    collective->add_option("--beta", o.beta, "Waveguide coupling efficiency");
    collective->add_option("--gamma", o.gamma, "Single-emitter rate");
    collective->add_option("--phi-p", o.phi_p, "Propagation phase");

    auto oracle = app.add_subcommand("oracle", "Delay equation against the discretized field model");
    common(oracle);
    oracle->add_option("--gamma", o.gamma, "Rate gamma = kappa_0 of the default two-point atom");
    oracle->add_option("--gamma-tau", o.gamma_tau, "gamma*tau");
    oracle->add_option("--phi", o.phi, "Phase omega_0 tau");
    oracle->add_option("--couplings", o.couplings, "Comma list g_1..g_N");
    oracle->add_option("--v-g", o.v_g, "Group velocity");
    oracle->add_option("--t-max", o.t_max, "Final time");
    oracle->add_option("--dt", o.dt, "Output step (default tau/16)");
    oracle->add_option("--a0", o.a0, "Initial amplitude");
    oracle->add_option("--modes", o.modes, "Number of k-modes");
    oracle->add_option("--omega0", o.omega0, "Carrier frequency (0: automatic)");
    oracle->add_option("--k-max", o.k_max, "Mode cutoff (0: 3 omega0 / v_g)");

    std::reverse(merged.begin(), merged.end());
    try {
        app.parse(merged);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    std::set<std::string> given;
    for (const CLI::Option* opt : chosen->get_options()) {
        if (opt->count() > 0) given.insert(opt->get_name());
    }
    apply_preset(command, o, given);

    if (command == "decay") return run_decay(o);
    if (command == "poles") return run_poles(o);
    if (command == "oracle") return run_oracle(o);
    require_format(o, "json");
    nmep_ep_report* report = nullptr;
    nmep_status status;
    if (command == "ep2") {
        status = nmep_find_ep2_single_delay(o.gamma, o.phi, &report);
    } else if (command == "ep3") {
        status = nmep_find_ep3_symmetric(o.g1, o.g2, o.phi, o.v_g, &report);
    } else if (command == "design") {
        status = nmep_design_epn(o.order, o.s_ep, o.tau, o.phi, o.v_g, &report);
    } else {
        status = nmep_find_ep2_collective(o.gamma, o.beta, o.phi_p, &report);
    }
    return emit_report(o, status, report, command.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "nmep_cli: " << e.what() << "\nRun 'nmep_cli --help' for usage.\n";
        return kExitUsage;
    } catch (const LibraryError& e) {
        std::cerr << "nmep_cli: " << e.what() << '\n';
        return e.status == NMEP_ERR_INFEASIBLE ? kExitNoEp : kExitError;
    } catch (const std::exception& e) {
        std::cerr << "nmep_cli: " << e.what() << '\n';
        return kExitError;
    }
}
