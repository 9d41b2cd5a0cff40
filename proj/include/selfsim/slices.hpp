#pragma once

#include <optional>
#include <vector>

#include "selfsim/projection.hpp"

namespace selfsim {

/// Point of (a neighborhood of) the attractor together with its coding word
/// i_k(w): the unique word whose cylinder contains w when the SSC holds.
struct CodedPoint {
    cplx w;
    Word word;
    int depth = 0;
    double min_gap_margin = 0.0;  // distance to the nearest non-selected sibling disk
};

/// Greedy cylinder-disk descent. Throws not_in_attractor_neighborhood when w
/// falls outside every child disk at some level (beyond the gap tolerance).
CodedPoint code_point(const IfsSystem& sys, cplx w, int depth);

/// Shift T w = f_{i_1(w)}^{-1}(w) = (w - a_{i_1}) / lambda; drops the first
/// coding symbol.
CodedPoint shift_T(const IfsSystem& sys, const CodedPoint& p);

inline constexpr double kDensityFloor = 1e-4;

/// Densities g_{alpha^-k z} for k = 0..k_max, shared read-only across slice
/// computations along one direction.
struct DensityStack {
    std::vector<DensityGrid> grids;  // grids[k] is the density along alpha^-k z
    std::vector<cplx> dirs;          // dirs[k] = alpha^-k z
    int depth = 0;
    double h = 0.0;
};

DensityStack build_density_stack(const IfsSystem& sys, const AtomicMeasure2D& atoms, Direction z,
                                 int k_max, double h);

/// Slice cylinder mass by the density formula:
///   nu_{z,w}(K_{i_k(w)}) = g_{a^-k z}(P_{a^-k z} T^k w) / g_z(P_z w) * p_{i_k(w)} r^-k.
/// Density reads below `floor` raise density_floor_hit.
double slice_mass_formula(const IfsSystem& sys, const DensityStack& stack, const CodedPoint& point,
                          int k, double floor = kDensityFloor);

/// Convenience form matching the one-off call shape: builds the stack internally.
double slice_mass_formula(const IfsSystem& sys, Direction z, const CodedPoint& point, int k,
                          int density_depth, double h,
                          std::size_t atom_budget = kDefaultAtomBudget);

/// Empirical window estimate of the same mass:
///   nu(K_word and P_z^-1 B(P_z w, delta)) / nu(P_z^-1 B(P_z w, delta))
/// with cylinder membership decided by code_point at the word's depth.
double slice_mass_empirical(const IfsSystem& sys, const SampleSet& samples, Direction z, cplx w,
                            const Word& word, double delta);

struct LocalDimFit {
    double slope = 0.0;          // regression of log mass(k) on k log r, k in {2..k_max}
    double weight_slope = 0.0;   // contribution of log(p_{i_k} r^-k)
    double density_slope = 0.0;  // contribution of the density ratio (o(1) term)
};

/// Slice local dimension along the coding of w; the limit is dim_H nu - 1.
LocalDimFit slice_local_dim(const IfsSystem& sys, const DensityStack& stack, const CodedPoint& point,
                            int k_max);

struct ConservePoint {
    cplx w;
    double local_dim = 0.0;
    double weight_part = 0.0;
    double density_part = 0.0;
    bool floor_hit = false;
};

struct ConserveReport {
    cplx z;
    double median_local_dim = 0.0;
    double dim_projection = 1.0;  // density-based projections have dimension 1
    double dim_sum = 0.0;         // dim_projection + median slice dimension
    double closed_dim_measure = 0.0;
    bool hypothesis_ok = true;  // closed-form dimension exceeds 1
    int floor_hits = 0;
    int coding_failures = 0;
    std::vector<ConservePoint> points;
};

/// Dimension-conservation verdict for one direction: codes n_points sampled
/// w's to depth k_max + 2, fits slice local dimensions, reports the median
/// against dim_H nu - 1.
ConserveReport dimension_conservation_report(const IfsSystem& sys, const AtomicMeasure2D& atoms,
                                             const SampleSet& samples, Direction z, int n_points,
                                             int k_max, double h);

}  // namespace selfsim
