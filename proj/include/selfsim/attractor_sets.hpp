#pragma once

#include <utility>
#include <vector>

#include "selfsim/projection.hpp"

namespace selfsim {

struct IntervalUnion {
    std::vector<std::pair<double, double>> intervals;  // sorted, pairwise disjoint
    double total_length = 0.0;
};

/// Sorts, merges overlaps, recomputes total_length.
IntervalUnion merge_intervals(std::vector<std::pair<double, double>> raw);

/// Length of the overlap between two merged unions.
double intersection_length(const IntervalUnion& a, const IntervalUnion& b);

bool contains(const IntervalUnion& u, double x);

/// Outer estimate of P_z(K): the projection of the depth-d cylinder disk
/// cover, one interval [P_z f_i(c0) +- r^d R] per word, merged. Computed by
/// the exact per-level recursion U_d(z) = union_m (<z,a_m> + r U_{d-1}(a^-1 z)),
/// which avoids enumerating |Lambda|^d disks. Nonincreasing in depth.
IntervalUnion project_attractor(const IfsSystem& sys, Direction z, int depth);

/// Same recursion seeded at the barycenter: intervals [P_z f_i(b) +- r^d R]
/// around the depth-d atoms. Emitted alongside the outer estimate to bracket
/// the projected length.
IntervalUnion project_attractor_inner(const IfsSystem& sys, Direction z, int depth);

struct CoverageReport {
    double cov_a = 0.0;  // fraction of the projected-attractor length where density >= eps
    double cov_b = 0.0;  // fraction of the {density >= eps} length inside the projection
    double length_outer = 0.0;
    double length_inner = 0.0;
    double length_dense = 0.0;
    double epsilon = 0.0;
};

/// Two-sided coverage check of the equivalence P_z nu ~ L|_{P_z K}.
/// epsilon <= 0 selects the default 1e-3 * (median positive density).
CoverageReport equivalence_check(const IfsSystem& sys, const AtomicMeasure2D& atoms, Direction z,
                                 double h, double epsilon = 0.0, int depth = -1);

struct BoxDimFit {
    double slope = 0.0;
    std::vector<std::size_t> counts;  // N(d), d = 1..depth
};

/// Box dimension of the slice K intersect P_z^-1{x}: counts depth-d cylinder
/// disks meeting the line and fits log N(d) against d (-log r). Children
/// outside an intersecting parent are pruned exactly.
BoxDimFit slice_set_boxdim(const IfsSystem& sys, Direction z, double x, int depth);

}  // namespace selfsim
