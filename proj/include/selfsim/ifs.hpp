#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "selfsim/types.hpp"

namespace selfsim {

struct Disk {
    cplx center;
    double radius = 0.0;
};

/// Smallest circle enclosing the given points (exact for the small point sets
/// that occur as translation vectors).
Disk smallest_enclosing_disk(std::span<const cplx> pts);

/// Validated homogeneous planar IFS {w -> lambda*w + a_i} with probability
/// vector p. lambda = r*alpha with r = |lambda| in (0,1) and |alpha| = 1.
struct IfsSystem {
    cplx lambda;
    double r = 0.0;
    cplx alpha;
    std::vector<cplx> translations;
    std::vector<double> probs;

    // Derived constants.
    cplx barycenter;    // mean of the invariant measure: (sum p_i a_i) / (1 - lambda)
    Disk invariant_disk;  // disk B(c0, R) with f_i(B) inside B for all i

    int map_count() const { return static_cast<int>(translations.size()); }
};

/// Checks all invariants and splits lambda into modulus and rotation.
/// Throws: modulus_out_of_range, bad_probability_vector, degenerate_translations.
IfsSystem validate_system(cplx lambda, std::vector<cplx> translations, std::vector<double> probs);

/// Composite map f_word = f_{i_1} o ... o f_{i_k}: w -> scale*w + offset.
struct CylinderMap {
    cplx scale;     // lambda^k
    cplx offset;    // sum_{j=1..k} lambda^{j-1} a_{i_j}
    double weight;  // prod p_{i_j}
    Word word;

    cplx apply(cplx w) const { return scale * w + offset; }
};

CylinderMap cylinder_map(const IfsSystem& sys, const Word& word);

enum class SscStatus { proven, refuted, unknown };
const char* to_string(SscStatus s);

struct SscVerdict {
    SscStatus status = SscStatus::unknown;
    int depth_used = 0;
    double min_gap = 0.0;  // smallest gap between separated cylinder disks; > 0 when proven
};

/// Hierarchical disk-separation test. The test is sufficient, not necessary,
/// so `unknown` is a first-class outcome. Refutation requires an exact
/// witness: two cylinders from distinct top-level branches whose maps
/// coincide numerically (<= 1e-12), which pins shared attractor points.
SscVerdict check_ssc(const IfsSystem& sys, int max_depth);

struct DimReport {
    double q = 0.0;
    double dq = 0.0;           // L^q dimension of the measure
    double dim_measure = 0.0;  // Hausdorff dimension of the measure
    double dim_set = 0.0;      // Hausdorff dimension of the attractor
    bool ssc_assumed = true;   // false when the caller could not prove the SSC
};

/// Closed forms, valid under the SSC:
///   D_q   = log(sum p_i^q) / ((q-1) log r)
///   dim nu = (sum p_i log p_i) / log r
///   dim K = log |Lambda| / (-log r)
DimReport closed_form_dims(const IfsSystem& sys, double q, bool ssc_proven = true);

struct RotationCheck {
    bool rational = false;
    long long p = 0;  // arg(lambda)/pi ~ p/q when rational
    long long q = 1;
    double theta = 0.0;  // arg(lambda)/pi
    long long denominator_bound = 0;
};

/// Heuristic test of the dense-rotation hypothesis arg(lambda) not in pi*Q.
/// Scans continued-fraction convergents p/q of theta = arg(lambda)/pi with
/// q <= denominator_bound and reports a rational multiple when the scaled
/// residual |q*theta - p| is below 1e-12.
RotationCheck check_irrational_rotation(const IfsSystem& sys, long long denominator_bound);

}  // namespace selfsim
