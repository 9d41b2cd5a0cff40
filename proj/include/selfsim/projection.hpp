#pragma once

#include <vector>

#include "selfsim/measure.hpp"
#include "selfsim/types.hpp"

namespace selfsim {

/// Unit direction z on the circle; P_z(w) = <z,w>.
struct Direction {
    cplx z;

    explicit Direction(cplx value) : z(value) {
        if (std::abs(std::abs(value) - 1.0) > kAlgebraTol)
            raise(Errc::invalid_argument, "direction must have unit modulus");
    }
    static Direction from_angle(double angle) { return Direction(std::polar(1.0, angle)); }

    double project(cplx w) const { return dot(z, w); }
    Direction rotated(cplx unit) const { return Direction(z * unit); }
};

struct AtomicMeasure1D {
    std::vector<double> positions;
    std::vector<double> weights;

    std::size_t size() const { return positions.size(); }
};

/// Pushforward of a planar atomic measure along direction z; weights unchanged.
AtomicMeasure1D project(const AtomicMeasure2D& m, Direction z);

/// Histogram density on half-open bins [x0 + j h, x0 + (j+1) h); values are
/// bin mass / h. An atom exactly at the right edge is folded into the last bin.
struct DensityGrid {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<double> values;

    int bins() const { return static_cast<int>(values.size()); }
    double x_max() const { return x0 + h * bins(); }
    double center(int j) const { return x0 + (j + 0.5) * h; }
    double mass() const;
    /// Piecewise-constant read; zero outside the grid.
    double value_at(double x) const;
};

DensityGrid density(const AtomicMeasure1D& m, double x_min, double x_max, double h);

/// Density over the projected invariant disk [P_z(c0) - R, P_z(c0) + R].
DensityGrid density_for(const IfsSystem& sys, const AtomicMeasure2D& atoms, Direction z, double h);

/// Default bin width r^(depth/2): balances bin count against per-bin atoms.
double default_bin_width(const IfsSystem& sys, int depth);

/// (h * sum v^q)^(1/q).
double lq_norm(const DensityGrid& g, double q);

/// L1 distance between the depth-`depth` density of P_z nu and the
/// self-similarity mixture sum_{|i|=k} p_i r^-k g_{a^-k z}(r^-k (x - b_i))
/// with b_i = P_z f_i(0) and g_{a^-k z} estimated at the same depth.
double selfsim_density_residual(const IfsSystem& sys, Direction z, int k, int depth, double h,
                                std::size_t atom_budget = kDefaultAtomBudget);

/// Gaussian bump test functions with precomputed Lipschitz constants,
/// spanning the projected support of the system.
struct BumpFunction {
    double center = 0.0;
    double sigma = 1.0;
    double lipschitz = 0.0;

    double operator()(double x) const {
        double u = (x - center) / sigma;
        return std::exp(-0.5 * u * u);
    }
};

std::vector<BumpFunction> test_function_family(const IfsSystem& sys, int count = 8);

struct SweepRow {
    double angle = 0.0;
    cplx z;
    double mass = 0.0;
    double lq = 0.0;
    std::vector<double> test_integrals;
};

/// Sweeps z_j = e^{2 pi i j / n}: per direction the L^q density norm and the
/// atomic-level integrals of the test family. Rows are emitted in index order
/// regardless of scheduling.
std::vector<SweepRow> direction_sweep(const IfsSystem& sys, const AtomicMeasure2D& atoms,
                                      int n_directions, double h, double q);

}  // namespace selfsim
