#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfsim {

using cplx = std::complex<double>;

/// Standard inner product on C identified with R^2: <z,w> = Re(z * conj(w)).
inline double dot(cplx z, cplx w) {
    return z.real() * w.real() + z.imag() * w.imag();
}

/// Finite word over the alphabet {0, ..., map_count-1}.
using Word = std::vector<int>;

// Absolute tolerance for algebraic identities (unit modulus, probability sums, ...).
inline constexpr double kAlgebraTol = 1e-12;

enum class Errc {
    modulus_out_of_range,
    bad_probability_vector,
    degenerate_translations,
    index_out_of_range,
    q_out_of_range,
    atom_budget_exceeded,
    no_zero_translation,
    degenerate_scales,
    too_few_points,
    support_out_of_range,
    grid_mismatch,
    insufficient_rungs,
    cutoff_outside_trusted_band,
    not_in_attractor_neighborhood,
    depth_exhausted,
    density_floor_hit,
    empty_window,
    line_misses_attractor,
    invalid_argument,
    io_failure,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

/// Compensated (Kahan) accumulator; keeps reductions stable and reproducible.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}  // namespace selfsim
