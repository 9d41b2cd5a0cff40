#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "selfsim/ifs.hpp"
#include "selfsim/types.hpp"

namespace selfsim {

inline constexpr std::size_t kDefaultAtomBudget = 2'000'000;

/// Depth-k atomic approximation of the self-similar measure: one atom per
/// word i in Lambda^k at f_i(base), weight p_i. Atoms are stored in
/// lexicographic word order, so the word of atom `idx` is the base-|Lambda|
/// expansion of idx (most significant digit first).
struct AtomicMeasure2D {
    std::vector<cplx> points;
    std::vector<double> weights;
    int depth = 0;
    cplx base_point;

    std::size_t size() const { return points.size(); }
    Word word_of(std::size_t idx, int map_count) const;
};

/// Builds the canonical depth-k approximation with the barycenter as base
/// point. Throws atom_budget_exceeded when |Lambda|^depth > atom_budget.
AtomicMeasure2D atomic_approx(const IfsSystem& sys, int depth,
                              std::size_t atom_budget = kDefaultAtomBudget);

/// Chaos-game sample of the measure: n points f_{i_1...i_L}(barycenter) with
/// i.i.d. symbols. Reproducible for fixed (seed, word_length, n) and
/// independent of the thread count.
struct SampleSet {
    std::vector<cplx> points;
    std::uint64_t seed = 0;
    int word_length = 0;
};

SampleSet sample_measure(const IfsSystem& sys, std::size_t n, int word_length, std::uint64_t seed);

/// Smallest L with r^L < 1e-9 (residual cylinder diameter below reporting noise).
int default_word_length(const IfsSystem& sys);

/// The factor pair of nu = mu * nu_{lambda^k, a}: mu is the self-similar
/// measure of the maps g_i(w) = lambda^k w + sum_{j=1..k-1} a_{i_j} lambda^j
/// over Lambda^{k-1}, and nu_{lambda^k, a} reuses the original translations
/// with contraction lambda^k. Requires some a_i = 0; with auto_conjugate the
/// system is first translated so that a_{i0} = 0 (i0 = argmin |a_i|) and the
/// reported shift beta satisfies conjugated = original + beta pointwise.
struct ConvolutionSplit {
    IfsSystem mu;
    IfsSystem nu_k;
    bool conjugated = false;
    cplx shift;  // beta with h(w) = w + beta applied to the original system
};

ConvolutionSplit convolution_split(const IfsSystem& sys, int k, bool auto_conjugate = true);

/// Box-moment estimate of the L^q dimension. Boxes are half-open squares of
/// side delta anchored at the lower-left corner of the invariant disk; the
/// moment sum S(delta) = sum_box mass(box)^q is fitted as
/// log S ~ (q-1) D_q log delta over n_scales geometric scales.
/// For unweighted samples and integer q, box masses use the factorial-moment
/// (bias-corrected) count statistic; weighted atoms use exact masses.
struct DqEstimate {
    double value = 0.0;
    double ci = 0.0;  // 95% jackknife-over-scales interval half-width
    std::vector<double> scales;
    std::vector<double> log_moments;
};

DqEstimate empirical_dq(std::span<const cplx> points, std::span<const double> weights, double q,
                        double delta_min, double delta_max, int n_scales, cplx anchor);

DqEstimate empirical_dq(const IfsSystem& sys, const SampleSet& samples, double q,
                        double delta_min, double delta_max, int n_scales);
DqEstimate empirical_dq(const IfsSystem& sys, const AtomicMeasure2D& atoms, double q,
                        double delta_min, double delta_max, int n_scales);

/// Grassberger-Procaccia correlation-sum estimate of D_2: fraction of pairs
/// within delta, slope of log C(delta) vs log delta. Cross-check path for
/// empirical_dq at q = 2. Points beyond max_points are thinned by a
/// deterministic stride.
DqEstimate correlation_dim_gp(std::span<const cplx> points, double delta_min, double delta_max,
                              int n_scales, std::size_t max_points = 32768);

}  // namespace selfsim
