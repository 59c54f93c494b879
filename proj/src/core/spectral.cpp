#include "nmep/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nmep/special_functions.hpp"

namespace nmep {

namespace {

const cplx kI{0.0, 1.0};

constexpr double kPoleResidual = 1e-10;
constexpr double kDedupTolerance = 1e-8;
constexpr double kClusterTolerance = 1e-5;
constexpr double kContourProximity = 1e-9;

bool finite(cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

void require_single_delay(const DelaySystem& system) {
    system.validate();
    if (system.classes() != 2) {
        throw Error(ErrorKind::unsupported,
                    "closed-form poles need exactly two delay classes (m = 0, 1); use poles_search");
    }
}

// W_n(z) for large |n| from the de Bruijn expansion in L1 = log z + 2 pi i n.
cplx lambert_w_asymptotic(int n, cplx z) {
    const cplx l1 = std::log(z) + 2.0 * kPi * static_cast<double>(n) * kI;
    const cplx l2 = std::log(l1);
    const cplx r = 1.0 / l1;
    return l1 - l2 + l2 * r + l2 * (l2 - 2.0) * 0.5 * r * r +
           l2 * (2.0 * l2 * l2 - 9.0 * l2 + 6.0) / 6.0 * r * r * r;
}

}  // namespace

int PoleSet::total_multiplicity() const noexcept {
    return std::accumulate(poles.begin(), poles.end(), 0, [](int acc, const Pole& p) { return acc + p.multiplicity; });
}

void Rect::validate() const {
    require(std::isfinite(re_min) && std::isfinite(re_max) && std::isfinite(im_min) && std::isfinite(im_max),
            "Rect: bounds must be finite");
    require(re_min < re_max && im_min < im_max, "Rect: empty rectangle");
}

cplx char_function(const DelaySystem& system, cplx s, int order) {
    require(order >= 0 && order <= 6, "char_function: order must lie in [0, 6]");
    cplx acc = order == 0 ? s : (order == 1 ? cplx(1.0) : cplx(0.0));
    for (std::size_t m = 0; m < system.classes(); ++m) {
        if (system.coeffs[m] == 0.0) continue;
        const double lag = static_cast<double>(m) * system.delay;
        if (m == 0 && order > 0) continue;
        const cplx factor = order == 0 ? cplx(1.0) : std::pow(-lag, order);
        acc -= system.coeffs[m] * factor * std::exp(-s * lag);
    }
    return acc;
}

void sort_poles(std::vector<Pole>& poles) {
    std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) {
        if (a.s.real() != b.s.real()) return a.s.real() > b.s.real();
        if (std::abs(a.s.imag()) != std::abs(b.s.imag())) return std::abs(a.s.imag()) < std::abs(b.s.imag());
        return a.s.imag() < b.s.imag();
    });
}

Pole closed_form_pole(const DelaySystem& system, int branch) {
    require_single_delay(system);
    const double tau = system.delay;
    const cplx c0 = system.coeffs[0];
    const cplx c1 = system.coeffs[1];
    if (c1 == 0.0) {
        if (branch != 0) throw Error(ErrorKind::domain, "closed_form_pole: c_1 = 0 leaves only branch 0");
        return {c0, 0, 1.0, 1};
    }
    const cplx z = c1 * tau * std::exp(-c0 * tau);
    const cplx w = lambert_w(branch, z);
    return {c0 + w / tau, branch, 1.0 / (1.0 + w), 1};
}

PoleSet poles_closed_form(const DelaySystem& system, int first, int last) {
    require_single_delay(system);
    require(first <= last, "poles_closed_form: empty branch range");
    PoleSet set;
    if (system.coeffs[1] == 0.0) {
        if (first <= 0 && last >= 0) set.poles.push_back(closed_form_pole(system, 0));
        return set;
    }
    std::vector<Pole> raw;
    raw.reserve(static_cast<std::size_t>(last - first + 1));
    for (int n = first; n <= last; ++n) raw.push_back(closed_form_pole(system, n));

    // Branches 0 and -1 (or 0 and 1 below the cut) meet at the branch point.
    std::vector<bool> merged(raw.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (merged[i]) continue;
        Pole p = raw[i];
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (merged[j]) continue;
            const double scale = 1.0 + std::abs(p.s);
            const bool close = std::abs(raw[j].s - p.s) < 1e-6 * scale;
            const bool flat = std::abs(char_function(system, p.s, 1)) < 1e-6 * scale;
            if (close && flat) {
                merged[j] = true;
                p.multiplicity += 1;
                if (std::abs(*raw[j].branch) < std::abs(*p.branch)) p.branch = raw[j].branch;
                p.s = 0.5 * (p.s + raw[j].s);
                p.residue_weight = 0.0;
            }
        }
        set.poles.push_back(p);
    }
    sort_poles(set.poles);
    set.branches = BranchRange{first, last};
    return set;
}

namespace {

struct ContourSample {
    cplx s;
    cplx d;
    cplx f;  // D'/D
};

class ContourIntegrator {
public:
    ContourIntegrator(const DelaySystem& system, double tol) : system_(system), tol_(tol) {}

    ContourSample sample(cplx s) const {
        const cplx d = char_function(system_, s, 0);
        if (!(std::abs(d) >= kContourProximity * (1.0 + std::abs(s)))) {
            std::ostringstream msg;
            msg.precision(10);
            msg << "argument_principle_count: zero of D(s) too close to the contour near s = " << s.real()
                << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag())
                << "i; perturb the rectangle bounds";
            throw Error(ErrorKind::contour, msg.str());
        }
        return {s, d, char_function(system_, s, 1) / d};
    }

    // Integral of D'/D along the straight segment a -> b, plus the summed
    // principal-value argument increments of D.
    void segment(const ContourSample& a, const ContourSample& b, double tol, int depth) {
        const ContourSample m = sample(0.5 * (a.s + b.s));
        const cplx h = b.s - a.s;
        const cplx t1 = 0.5 * h * (a.f + b.f);
        const cplx t2 = 0.25 * h * (a.f + 2.0 * m.f + b.f);
        const double arg_am = std::abs(std::arg(m.d / a.d));
        const double arg_mb = std::abs(std::arg(b.d / m.d));
        const bool smooth = arg_am < kPi / 4.0 && arg_mb < kPi / 4.0;
        if (depth >= 48 || (smooth && std::abs(t2 - t1) < tol)) {
            integral_ += t2 + (t2 - t1) / 3.0;
            winding_ += std::arg(m.d / a.d) + std::arg(b.d / m.d);
            return;
        }
        segment(a, m, 0.5 * tol, depth + 1);
        segment(m, b, 0.5 * tol, depth + 1);
    }

    void edge(cplx from, cplx to) {
        constexpr int pieces = 32;
        ContourSample prev = sample(from);
        for (int i = 1; i <= pieces; ++i) {
            const cplx s = i == pieces ? to : from + (to - from) * (static_cast<double>(i) / pieces);
            ContourSample next = sample(s);
            segment(prev, next, tol_ / pieces, 0);
            prev = next;
        }
    }

    cplx integral() const { return integral_; }
    double winding() const { return winding_; }

private:
    const DelaySystem& system_;
    double tol_;
    cplx integral_{};
    double winding_ = 0.0;
};

}  // namespace

int argument_principle_count(const DelaySystem& system, const Rect& rect) {
    system.validate();
    rect.validate();
    const cplx c00(rect.re_min, rect.im_min), c10(rect.re_max, rect.im_min);
    const cplx c11(rect.re_max, rect.im_max), c01(rect.re_min, rect.im_max);
    double last_value = 0.0;
    for (double tol : {1e-6, 1e-8, 1e-10, 1e-12}) {
        ContourIntegrator integ(system, tol);
        integ.edge(c00, c10);
        integ.edge(c10, c11);
        integ.edge(c11, c01);
        integ.edge(c01, c00);
        const cplx value = integ.integral() / (2.0 * kPi * kI);
        const double rounded = std::round(value.real());
        const auto from_args = static_cast<int>(std::lround(integ.winding() / (2.0 * kPi)));
        last_value = value.real();
        if (std::abs(value.real() - rounded) <= 1e-3 && std::abs(value.imag()) <= 1e-3 &&
            static_cast<int>(rounded) == from_args) {
            return from_args;
        }
    }
    std::ostringstream msg;
    msg << "argument_principle_count: winding integral " << last_value << " did not settle on an integer";
    throw Error(ErrorKind::no_convergence, msg.str());
}

namespace {

struct Root {
    cplx s;
    double d_abs;
    double dp_abs;
};

std::optional<Root> newton_root(const DelaySystem& system, cplx s, const Rect& rect) {
    const double span = std::max(rect.re_max - rect.re_min, rect.im_max - rect.im_min);
    const double re_lo = rect.re_min - span, re_hi = rect.re_max + span;
    const double im_lo = rect.im_min - span, im_hi = rect.im_max + span;
    for (int it = 0; it < 100; ++it) {
        const cplx d = char_function(system, s, 0);
        const cplx dp = char_function(system, s, 1);
        if (dp == 0.0) break;
        cplx step = d / dp;
        if (std::abs(step) > span) step *= span / std::abs(step);
        s -= step;
        if (!finite(s) || s.real() < re_lo || s.real() > re_hi || s.imag() < im_lo || s.imag() > im_hi) {
            return std::nullopt;
        }
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(s))) break;
    }
    // Schroder polish: quadratic for roots of any multiplicity.
    if (std::abs(char_function(system, s, 1)) < 1e-4 * (1.0 + std::abs(s))) {
        for (int it = 0; it < 12; ++it) {
            const cplx d = char_function(system, s, 0);
            const cplx dp = char_function(system, s, 1);
            const cplx dpp = char_function(system, s, 2);
            const cplx denom = dp * dp - d * dpp;
            if (denom == 0.0) break;
            const cplx step = d * dp / denom;
            if (!finite(step)) break;
            const cplx trial = s - step;
            if (std::abs(char_function(system, trial, 0)) > std::abs(d)) break;
            s = trial;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(s))) break;
        }
    }
    const double d_abs = std::abs(char_function(system, s, 0));
    if (!(d_abs <= kPoleResidual * (1.0 + std::abs(s)))) return std::nullopt;
    return Root{s, d_abs, std::abs(char_function(system, s, 1))};
}

std::vector<Root> newton_sweep(const DelaySystem& system, const Rect& rect, int refinement) {
    const double height = rect.im_max - rect.im_min;
    const double width = rect.re_max - rect.re_min;
    double dy = height / 4.0;
    if (system.classes() > 1) {
        dy = std::min(dy, kPi / (2.0 * static_cast<double>(system.classes() - 1) * system.delay));
    }
    const double density = std::pow(2.0, refinement);
    const auto ny = static_cast<std::size_t>(std::ceil(height / dy * density));
    const auto nx = static_cast<std::size_t>(
        std::clamp(std::ceil(width / dy), 3.0, 48.0) * density);
    std::vector<Root> roots;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double y = rect.im_min + height * (static_cast<double>(iy) + 0.5) / static_cast<double>(ny);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = rect.re_min + width * (static_cast<double>(ix) + 0.5) / static_cast<double>(nx);
            auto r = newton_root(system, cplx(x, y), rect);
            if (r && rect.contains(r->s)) roots.push_back(*r);
        }
    }
    return roots;
}

std::vector<Root> dedup(std::vector<Root> roots) {
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        return a.s.real() != b.s.real() ? a.s.real() < b.s.real() : a.s.imag() < b.s.imag();
    });
    std::vector<Root> out;
    for (const Root& r : roots) {
        bool dup = false;
        for (Root& o : out) {
            if (std::abs(o.s - r.s) < kDedupTolerance * (1.0 + std::abs(r.s))) {
                if (r.d_abs < o.d_abs) o = r;
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(r);
    }
    return out;
}

// Group numerically coalesced roots and count the multiplicity of each group
// with a small contour.
std::vector<Pole> cluster(const DelaySystem& system, const std::vector<Root>& roots) {
    const std::size_t n = roots.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double scale = 1.0 + std::abs(roots[i].s);
            if (std::abs(roots[i].s - roots[j].s) < kClusterTolerance * scale &&
                roots[i].dp_abs < kClusterTolerance * scale && roots[j].dp_abs < kClusterTolerance * scale) {
                parent[find(j)] = find(i);
            }
        }
    }
    std::vector<Pole> poles;
    std::vector<bool> done(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (done[root]) continue;
        done[root] = true;
        std::vector<std::size_t> members;
        for (std::size_t j = 0; j < n; ++j) {
            if (find(j) == root) members.push_back(j);
        }
        const Root* best = &roots[members.front()];
        for (std::size_t j : members) {
            if (roots[j].d_abs < best->d_abs) best = &roots[j];
        }
        Pole p;
        p.s = best->s;
        if (members.size() == 1 && best->dp_abs >= kClusterTolerance * (1.0 + std::abs(best->s))) {
            p.residue_weight = 1.0 / char_function(system, p.s, 1);
            poles.push_back(p);
            continue;
        }
        // Isolate the cluster from the other roots before counting.
        double gap = 1e-2 * (1.0 + std::abs(p.s));
        for (std::size_t j = 0; j < n; ++j) {
            if (find(j) != root) gap = std::min(gap, 0.4 * std::abs(roots[j].s - p.s));
        }
        int count = 0;
        for (double half = gap;; half *= 0.7) {
            try {
                count = argument_principle_count(
                    system, Rect{p.s.real() - half, p.s.real() + half, p.s.imag() - half, p.s.imag() + half});
                break;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::contour || half < 1e-8) throw;
            }
        }
        p.multiplicity = std::max(1, count);
        p.residue_weight = p.multiplicity == 1 ? 1.0 / char_function(system, p.s, 1) : cplx(0.0);
        poles.push_back(p);
    }
    return poles;
}

}  // namespace

PoleSet poles_search(const DelaySystem& system, const Rect& rect, std::size_t max_poles) {
    system.validate();
    rect.validate();
    require(max_poles >= 1, "poles_search: max_poles must be at least 1");
    const int expected = argument_principle_count(system, rect);
    if (static_cast<std::size_t>(expected) > max_poles) {
        std::ostringstream msg;
        msg << "poles_search: the rectangle holds " << expected << " zeros, more than max_poles = " << max_poles;
        throw Error(ErrorKind::invalid_argument, msg.str());
    }
    PoleSet set;
    if (expected == 0) return set;
    std::vector<Root> roots;
    for (int refinement = 0; refinement <= 3; ++refinement) {
        auto found = newton_sweep(system, rect, refinement);
        roots.insert(roots.end(), found.begin(), found.end());
        roots = dedup(std::move(roots));
        set.poles = cluster(system, roots);
        if (set.total_multiplicity() == expected) {
            sort_poles(set.poles);
            return set;
        }
    }
    std::vector<cplx> located;
    for (const Pole& p : set.poles) located.push_back(p.s);
    std::ostringstream msg;
    msg << "poles_search: located " << set.total_multiplicity() << " zeros but the contour count is " << expected;
    throw IncompleteSpectrumError(msg.str(), std::move(located), expected);
}

std::vector<cplx> residue_sum(const DelaySystem& system, const PoleSet& poles, const std::vector<double>& times,
                              const ResidueOptions& options) {
    system.validate();
    require(finite(options.a0), "residue_sum: a0 must be finite");
    for (const Pole& p : poles.poles) {
        if (p.multiplicity != 1) {
            throw Error(ErrorKind::unsupported,
                        "residue_sum: the pole set contains a coalesced (multiple) pole; use "
                        "pseudomode_two_pole or integrate at an exceptional point");
        }
    }
    for (double t : times) require(std::isfinite(t) && t > 0.0, "residue_sum: t must be positive");

    // Far branches for the closed-form single-delay case.
    std::vector<std::pair<cplx, cplx>> tail;
    const double tau = system.delay;
    const bool wants_tail = options.tail_correction && poles.branches && system.classes() == 2 &&
                            system.coeffs[1] != 0.0 &&
                            std::any_of(times.begin(), times.end(), [&](double t) { return t < 3.0 * tau; });
    if (wants_tail) {
        const cplx c0 = system.coeffs[0];
        const cplx z = system.coeffs[1] * tau * std::exp(-c0 * tau);
        const int width = poles.branches->last - poles.branches->first + 1;
        const int extra = std::min(64 * width, 200000);
        auto add = [&](int n) {
            const cplx w = lambert_w_asymptotic(n, z);
            tail.emplace_back(c0 + w / tau, 1.0 / (1.0 + w));
        };
        for (int n = poles.branches->last + 1; n <= poles.branches->last + extra; ++n) add(n);
        for (int n = poles.branches->first - 1; n >= poles.branches->first - extra; --n) add(n);
    }

    std::vector<cplx> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        cplx acc{};
        for (const Pole& p : poles.poles) acc += std::exp(p.s * t) * p.residue_weight;
        if (t < 3.0 * tau) {
            cplx far{};
            for (const auto& [s, weight] : tail) far += std::exp(s * t) * weight;
            acc += far;
        }
        out[i] = options.a0 * acc;
    }
    return out;
}

cplx residue_sum(const DelaySystem& system, const PoleSet& poles, double t, const ResidueOptions& options) {
    return residue_sum(system, poles, std::vector<double>{t}, options).front();
}

ScalingFit scaling_fit(const std::vector<double>& taus, const std::vector<double>& omegas, double tau_ep) {
    require(taus.size() == omegas.size(), "scaling_fit: taus and omegas must have equal length");
    require(taus.size() >= 4, "scaling_fit: at least four points are required");
    const std::size_t n = taus.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(taus[i] > tau_ep, "scaling_fit: every tau must lie above tau_ep");
        require(omegas[i] > 0.0, "scaling_fit: omegas must be positive");
        x[i] = std::log(taus[i] - tau_ep);
        y[i] = std::log(omegas[i]);
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0, "scaling_fit: taus must not all coincide");
    ScalingFit fit;
    fit.exponent = sxy / sxx;
    fit.prefactor = std::exp(my - fit.exponent * mx);
    fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace nmep
