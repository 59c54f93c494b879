#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmep {

using cplx = std::complex<double>;

// Error categories shared by the C++ core and the C API status codes.
enum class ErrorKind {
    invalid_argument,     // violated precondition
    domain,               // argument outside the function's domain
    no_convergence,       // iteration cap reached
    unsupported,          // operation does not apply to this input
    incomplete_spectrum,  // pole search could not certify completeness
    contour,              // zero too close to an integration contour
    infeasible,           // EP design has no physical realization
    overflow,             // series too long for double precision
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Raised when Halley iteration exhausts its cap; carries the last iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, cplx last_iterate, double residual)
        : Error(ErrorKind::no_convergence, what), last_(last_iterate), residual_(residual) {}
    cplx last_iterate() const noexcept { return last_; }
    double residual() const noexcept { return residual_; }

private:
    cplx last_;
    double residual_;
};

class IncompleteSpectrumError : public Error {
public:
    IncompleteSpectrumError(const std::string& what, std::vector<cplx> found, int contour_count)
        : Error(ErrorKind::incomplete_spectrum, what), found_(std::move(found)), count_(contour_count) {}
    const std::vector<cplx>& found() const noexcept { return found_; }
    int contour_count() const noexcept { return count_; }

private:
    std::vector<cplx> found_;
    int count_;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorKind::invalid_argument, what);
}

}  // namespace nmep
