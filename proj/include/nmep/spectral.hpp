#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nmep/models.hpp"

namespace nmep {

struct Pole {
    cplx s;
    std::optional<int> branch;  // Lambert branch for closed-form poles
    cplx residue_weight;        // 1 / D'(s); zero for a multiple pole
    int multiplicity = 1;
};

struct BranchRange {
    int first = 0;
    int last = 0;
};

// Sorted by descending Re s, then ascending |Im s|.
struct PoleSet {
    std::vector<Pole> poles;
    std::optional<BranchRange> branches;  // set when every branch in range was evaluated

    std::size_t size() const noexcept { return poles.size(); }
    int total_multiplicity() const noexcept;
};

struct Rect {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;

    bool contains(cplx s) const noexcept {
        return s.real() > re_min && s.real() < re_max && s.imag() > im_min && s.imag() < im_max;
    }
    void validate() const;
};

// D^{(order)}(s) for D(s) = s - sum_m c_m e^{-s m tau}, 0 <= order <= 6.
cplx char_function(const DelaySystem& system, cplx s, int order = 0);

// s_n = c_0 + W_n(c_1 tau e^{-c_0 tau}) / tau for a system with classes {0, 1}.
Pole closed_form_pole(const DelaySystem& system, int branch);

// Every branch in [first, last]. Branches that coincide at a Lambert branch
// point are merged into one pole of multiplicity 2.
PoleSet poles_closed_form(const DelaySystem& system, int first, int last);

// Newton search on a seed grid inside `rect`, certified against the
// argument-principle count. Throws IncompleteSpectrumError when the two
// disagree after seed refinement.
PoleSet poles_search(const DelaySystem& system, const Rect& rect, std::size_t max_poles);

// Number of zeros of D inside `rect`, with multiplicity.
int argument_principle_count(const DelaySystem& system, const Rect& rect);

struct ResidueOptions {
    cplx a0 = 1.0;
    // For a closed-form contiguous branch range, add the far branches from
    // the large-|n| form of W_n. Only affects t < 3 tau.
    bool tail_correction = true;
};

// sum_n a0 e^{s_n t} / D'(s_n).
cplx residue_sum(const DelaySystem& system, const PoleSet& poles, double t, const ResidueOptions& options = {});
std::vector<cplx> residue_sum(const DelaySystem& system, const PoleSet& poles, const std::vector<double>& times,
                              const ResidueOptions& options = {});

struct ScalingFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
};

// Least squares of log omega against log(tau - tau_ep).
ScalingFit scaling_fit(const std::vector<double>& taus, const std::vector<double>& omegas, double tau_ep);

void sort_poles(std::vector<Pole>& poles);

}  // namespace nmep
