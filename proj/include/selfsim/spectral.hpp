#pragma once

#include <functional>
#include <span>
#include <vector>

#include "selfsim/projection.hpp"

namespace selfsim {

struct Spectrum2D {
    std::vector<cplx> frequencies;
    std::vector<cplx> values;
};

struct Spectrum1D {
    std::vector<double> frequencies;
    std::vector<cplx> values;
};

/// nu_hat(xi) = sum_k w_k exp(i <xi, p_k>), exact for atomic measures.
/// Direct summation; the reference path.
cplx ft_point_2d(const AtomicMeasure2D& m, cplx xi);
Spectrum2D ft_2d(const AtomicMeasure2D& m, std::span<const cplx> xi);

/// FT of the projected measure on the 1-D atoms. Satisfies the identity
/// ft_projection(m, z)(t) = ft_2d(m)(t z) at atomic level.
cplx ft_point_projection(const AtomicMeasure1D& m, double t);
Spectrum1D ft_projection(const AtomicMeasure2D& m, Direction z, std::span<const double> t);

/// Fast path: the depth-d atomic measure is the law of an independent digit
/// sum, so its transform factors exactly into d per-level terms:
///   nu_hat_d(xi) = e^{i<xi, lambda^d b>} prod_j sum_m p_m e^{i<xi, lambda^{j-1} a_m>}.
/// Must match the direct sum to 1e-9 (tested); used where #freqs x #atoms is large.
cplx ft_system_2d(const IfsSystem& sys, int depth, cplx xi);
cplx ft_system_projection(const IfsSystem& sys, int depth, Direction z, double t);

/// Frequencies above r^-(depth-2) are dominated by atomic discreteness.
double trusted_band(const IfsSystem& sys, int depth);

struct DecayFit {
    double gamma_hat = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double freq_min = 0.0;
    double freq_max = 0.0;
    int rungs = 0;
    int samples_per_annulus = 0;
};

/// Fits |nu_hat(xi)| <= C |xi|^-gamma: on each annulus [T, 2T] of a geometric
/// ladder takes the max of |nu_hat| over >= 64 direction/modulus samples and
/// regresses log(max) on log T. gamma_hat = -slope, intercept = log C.
DecayFit fit_decay(const std::function<cplx(cplx)>& spectrum, double t_min, double t_max,
                   int rungs, int samples_per_annulus = 64);

struct SobolevEstimate {
    double gamma = 0.0;
    double norm = 0.0;
    double cutoff = 0.0;
    double step = 0.0;
    bool tail_flag = false;  // last decade contributes > 10% of the integral
};

/// Sobolev norm of the projected density from its transform ghat = P_z nu hat:
///   norm^2 = (1/2pi) step-sum of |ghat(xi)|^2 (1 + xi^2)^gamma over |xi| <= cutoff.
/// The 1/2pi factor makes gamma = 0 coincide with the L2 norm of the density
/// under the e^{i xi x} transform convention.
SobolevEstimate sobolev_from_spectrum(const std::function<cplx(double)>& ghat, double gamma,
                                      double cutoff, double step);

/// Plancherel route for P_z nu at the given depth; cutoff must stay within the
/// trusted band.
SobolevEstimate sobolev_norm(const IfsSystem& sys, Direction z, double gamma, int depth,
                             double cutoff, double step);

}  // namespace selfsim
