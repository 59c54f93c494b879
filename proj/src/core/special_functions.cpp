#include "nmep/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nmep {

namespace {

constexpr int kMaxIterations = 64;
constexpr double kStepTolerance = 1e-15;
constexpr double kResidualTolerance = 1e-12;
constexpr double kBranchPointDirect = 1e-10;
constexpr double kBranchPointSeed = 0.3;

const cplx kI{0.0, 1.0};

// Puiseux expansion of W about z = -1/e in p = ±sqrt(2(ez + 1)).
cplx branch_point_series(cplx p) {
    static constexpr std::array<double, 7> c = {
        -1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0, 769.0 / 17280.0, -221.0 / 8505.0};
    cplx acc = c.back();
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = acc * p + *it;
    return acc;
}

// Signed distance parameter p for the branch point expansion. z + 1/e is
// formed first so that the cancellation happens in a single subtraction.
cplx branch_point_p(cplx z) { return std::sqrt(2.0 * kE * (z + kInvE)); }

// Does branch `k` touch the branch point from the side z lies on?
std::optional<int> branch_point_sign(int k, cplx z) {
    if (k == 0) return 1;
    if (k == -1 && z.imag() >= 0.0) return -1;
    if (k == 1 && z.imag() < 0.0) return -1;
    return std::nullopt;
}

cplx asymptotic_seed(int k, cplx z) {
    const cplx l1 = std::log(z) + 2.0 * kPi * k * kI;
    const cplx l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
}

struct Iterate {
    cplx w;
    double residual;
    bool converged;
};

double identity_residual(cplx w, cplx z) {
    if (std::abs(w.real()) < 600.0) return std::abs(w * std::exp(w) - z);
    // w e^w overflows long before z does; compare in log form instead.
    const cplx rel = std::exp(std::log(w) + w - std::log(z)) - 1.0;
    return std::abs(rel) * std::abs(z);
}

// Halley iteration on h(w) = w - z e^{-w}, which keeps the iterate bounded
// for large |w| where w e^w would overflow.
Iterate halley(cplx w, cplx z) {
    const cplx log_z = std::log(z);
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxIterations; ++it) {
        const cplx u = std::abs(w.real()) < 600.0 ? z * std::exp(-w) : std::exp(log_z - w);
        const cplx h = w - u;
        const cplx dh = 1.0 + u;
        const cplx denom = 2.0 * dh * dh + h * u;
        if (denom == 0.0) break;
        const cplx step = 2.0 * h * dh / denom;
        w -= step;
        const double size = std::abs(step);
        if (!std::isfinite(size)) break;
        if (size <= kStepTolerance * (1.0 + std::abs(w))) {
            return {w, identity_residual(w, z), true};
        }
        // Stagnation at rounding level counts as converged.
        if (size >= last_step && size < 1e-12 * (1.0 + std::abs(w))) {
            return {w, identity_residual(w, z), true};
        }
        last_step = size;
    }
    return {w, identity_residual(w, z), false};
}

int classify_upper(double x, double y, bool tie_to_lower) {
    const double two_pi = 2.0 * kPi;
    const double m = std::floor(y / two_pi);
    const double r = y - two_pi * m;
    const int mi = static_cast<int>(m);
    if (r == 0.0) return mi;
    if (r < kPi) {
        const double xc = -y * std::cos(y) / std::sin(y);
        if (x > xc || (tie_to_lower && x == xc)) return mi;
        return mi + 1;
    }
    return mi + 1;
}

bool on_branch(int k, cplx w, cplx z) {
    // On the negative real axis the value must be continuous from above, so
    // classify a point nudged along the image of z + i*eps.
    if (z.imag() == 0.0 && z.real() < 0.0 && std::abs(1.0 + w) > 1e-6) {
        const double eps = 1e-7 * std::abs(z);
        const cplx dw = w / (z * (1.0 + w)) * cplx(0.0, eps);
        return detail::lambert_branch_of(w + dw) == k;
    }
    return detail::lambert_branch_of(w) == k;
}

}  // namespace

namespace detail {

int lambert_branch_of(cplx w) {
    const double x = w.real();
    const double y = w.imag();
    if (y == 0.0) return x >= -1.0 ? 0 : -1;
    if (y > 0.0) return classify_upper(x, y, true);
    return -classify_upper(x, -y, false);
}

}  // namespace detail

namespace {

cplx lambert_w_complex(int branch, cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw Error(ErrorKind::domain, "lambert_w: non-finite argument");
    }
    if (z.imag() == 0.0) z = cplx(z.real(), 0.0);  // drop a negative zero
    if (z == 0.0) {
        if (branch == 0) return 0.0;
        throw Error(ErrorKind::domain,
                    "lambert_w: z = 0 lies on the singularity of branch " + std::to_string(branch));
    }

    const double bp_distance = std::abs(z + kInvE);
    const auto bp_sign = branch_point_sign(branch, z);
    if (bp_sign && bp_distance < kBranchPointDirect) {
        return branch_point_series(static_cast<double>(*bp_sign) * branch_point_p(z));
    }

    std::vector<cplx> seeds;
    if (bp_sign && bp_distance < kBranchPointSeed) seeds.push_back(branch_point_series(static_cast<double>(*bp_sign) * branch_point_p(z)));
    if (branch == 0) {
        const double r = std::abs(z);
        if (r < 0.5) seeds.push_back(z * (1.0 - z));
        if (r < 3.0) seeds.push_back(std::log(1.0 + z));
        if (r > 0.5) seeds.push_back(asymptotic_seed(0, z));
        seeds.push_back(cplx(0.5, z.imag() >= 0.0 ? 0.5 : -0.5));
    } else {
        seeds.push_back(asymptotic_seed(branch, z));
        if (branch == -1 && z.imag() == 0.0 && z.real() < 0.0 && z.real() > -kInvE) {
            const double l = std::log(-z.real());
            seeds.push_back(l - std::log(-l));
        }
        seeds.push_back(std::log(z) + 2.0 * kPi * branch * kI);
    }

    Iterate best{seeds.front(), std::numeric_limits<double>::infinity(), false};
    for (const cplx& seed : seeds) {
        Iterate r = halley(seed, z);
        if (r.converged && r.residual <= kResidualTolerance * (1.0 + std::abs(z)) &&
            on_branch(branch, r.w, z)) {
            return r.w;
        }
        if (r.residual < best.residual) best = r;
    }
    throw ConvergenceError("lambert_w: no convergence on branch " + std::to_string(branch), best.w,
                           best.residual);
}

}  // namespace

cplx lambert_w(int branch, cplx z) {
    const cplx w = lambert_w_complex(branch, z);
    // W_0 on [-1/e, inf) and W_-1 on [-1/e, 0) are real.
    const bool real_axis = z.imag() == 0.0 && z.real() >= -kInvE;
    if (real_axis && (branch == 0 || (branch == -1 && z.real() < 0.0))) return cplx(w.real(), 0.0);
    return w;
}

}  // namespace nmep
