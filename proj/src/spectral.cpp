#include "selfsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selfsim/parallel.hpp"

namespace selfsim {

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= n; my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    f.r2 = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

cplx chunked_cplx_sum(std::size_t n, const std::function<cplx(std::size_t)>& term) {
    int chunks = static_cast<int>(std::min<std::size_t>(par::kChunkGrid, n));
    std::vector<cplx> partial(std::max(chunks, 1), cplx{0, 0});
    par::for_chunks(n, [&](const par::ChunkRange& r) {
        KahanSum re, im;
        for (std::size_t i = r.begin; i < r.end; ++i) {
            cplx v = term(i);
            re.add(v.real());
            im.add(v.imag());
        }
        partial[r.index] = {re.value(), im.value()};
    });
    KahanSum re, im;
    for (cplx v : partial) { re.add(v.real()); im.add(v.imag()); }
    return {re.value(), im.value()};
}

}  // namespace

cplx ft_point_2d(const AtomicMeasure2D& m, cplx xi) {
    return chunked_cplx_sum(m.size(), [&](std::size_t i) {
        double phase = dot(xi, m.points[i]);
        return m.weights[i] * cplx{std::cos(phase), std::sin(phase)};
    });
}

Spectrum2D ft_2d(const AtomicMeasure2D& m, std::span<const cplx> xi) {
    Spectrum2D s;
    s.frequencies.assign(xi.begin(), xi.end());
    s.values.reserve(xi.size());
    for (cplx f : xi) s.values.push_back(ft_point_2d(m, f));
    return s;
}

cplx ft_point_projection(const AtomicMeasure1D& m, double t) {
    return chunked_cplx_sum(m.size(), [&](std::size_t i) {
        double phase = t * m.positions[i];
        return m.weights[i] * cplx{std::cos(phase), std::sin(phase)};
    });
}

Spectrum1D ft_projection(const AtomicMeasure2D& m, Direction z, std::span<const double> t) {
    AtomicMeasure1D proj = project(m, z);
    Spectrum1D s;
    s.frequencies.assign(t.begin(), t.end());
    s.values.reserve(t.size());
    for (double f : t) s.values.push_back(ft_point_projection(proj, f));
    return s;
}

cplx ft_system_2d(const IfsSystem& sys, int depth, cplx xi) {
    cplx base = sys.barycenter;
    cplx power{1, 0};  // lambda^{j-1}
    cplx prod{1, 0};
    for (int j = 1; j <= depth; ++j) {
        cplx level{0, 0};
        for (int m = 0; m < sys.map_count(); ++m) {
            double phase = dot(xi, power * sys.translations[m]);
            level += sys.probs[m] * cplx{std::cos(phase), std::sin(phase)};
        }
        prod *= level;
        power *= sys.lambda;
    }
    double base_phase = dot(xi, power * base);  // power = lambda^depth here
    return prod * cplx{std::cos(base_phase), std::sin(base_phase)};
}

cplx ft_system_projection(const IfsSystem& sys, int depth, Direction z, double t) {
    return ft_system_2d(sys, depth, t * z.z);
}

double trusted_band(const IfsSystem& sys, int depth) {
    return std::pow(sys.r, -(depth - 2));
}

DecayFit fit_decay(const std::function<cplx(cplx)>& spectrum, double t_min, double t_max,
                   int rungs, int samples_per_annulus) {
    if (rungs < 6) raise(Errc::insufficient_rungs, "need at least 6 ladder rungs");
    if (!(t_min > 0.0) || !(2.0 * t_min < t_max))
        raise(Errc::degenerate_scales, "need 0 < t_min and 2 t_min < t_max");
    samples_per_annulus = std::max(samples_per_annulus, 64);

    // Deterministic annulus sampling: directions x moduli covering [T, 2T].
    int n_dir = samples_per_annulus / 4;
    int n_mod = (samples_per_annulus + n_dir - 1) / n_dir;

    std::vector<double> log_t(rungs), log_max(rungs);
    par::for_chunks(static_cast<std::size_t>(rungs), [&](const par::ChunkRange& rg) {
        for (std::size_t l = rg.begin; l < rg.end; ++l) {
            double t = t_min * std::pow(t_max / (2.0 * t_min),
                                        static_cast<double>(l) / (rungs - 1));
            double peak = 0.0;
            for (int d = 0; d < n_dir; ++d) {
                // Golden-angle spread avoids locking onto lattice directions.
                double angle = 2.39996322972865332 * d;
                for (int mi = 0; mi < n_mod; ++mi) {
                    double modulus = t * std::pow(2.0, (mi + 0.5) / n_mod);
                    cplx xi = std::polar(modulus, angle);
                    peak = std::max(peak, std::abs(spectrum(xi)));
                }
            }
            log_t[l] = std::log(t);
            log_max[l] = std::log(std::max(peak, 1e-300));
        }
    });

    LineFit f = fit_line(log_t, log_max);
    DecayFit fit;
    fit.gamma_hat = -f.slope;
    fit.intercept = f.intercept;
    fit.r2 = f.r2;
    fit.freq_min = t_min;
    fit.freq_max = t_max;
    fit.rungs = rungs;
    fit.samples_per_annulus = n_dir * n_mod;
    return fit;
}

SobolevEstimate sobolev_from_spectrum(const std::function<cplx(double)>& ghat, double gamma,
                                      double cutoff, double step) {
    if (!(gamma >= 0.0)) raise(Errc::invalid_argument, "gamma must be >= 0");
    if (!(step > 0.0) || !(cutoff > step)) raise(Errc::invalid_argument, "bad cutoff/step");

    auto n = static_cast<std::size_t>(cutoff / step);
    // Midpoint rule over [-cutoff, cutoff], symmetric in the sign of xi.
    double decade_start = cutoff / 10.0;
    std::vector<double> total_part(par::kChunkGrid, 0.0), tail_part(par::kChunkGrid, 0.0);
    par::for_chunks(n, [&](const par::ChunkRange& r) {
        KahanSum tot, tail;
        for (std::size_t i = r.begin; i < r.end; ++i) {
            double xi = (static_cast<double>(i) + 0.5) * step;
            cplx v = ghat(xi);
            double term = 2.0 * std::norm(v) * std::pow(1.0 + xi * xi, gamma);
            tot.add(term);
            if (xi >= decade_start) tail.add(term);
        }
        total_part[r.index] = tot.value();
        tail_part[r.index] = tail.value();
    });
    KahanSum tot, tail;
    for (double v : total_part) tot.add(v);
    for (double v : tail_part) tail.add(v);

    double integral = tot.value() * step / (2.0 * std::numbers::pi);
    double tail_integral = tail.value() * step / (2.0 * std::numbers::pi);

    SobolevEstimate est;
    est.gamma = gamma;
    est.norm = std::sqrt(integral);
    est.cutoff = cutoff;
    est.step = step;
    est.tail_flag = integral > 0.0 && tail_integral > 0.1 * integral;
    return est;
}

SobolevEstimate sobolev_norm(const IfsSystem& sys, Direction z, double gamma, int depth,
                             double cutoff, double step) {
    if (cutoff > trusted_band(sys, depth) * (1.0 + 1e-9))
        raise(Errc::cutoff_outside_trusted_band,
              "cutoff " + std::to_string(cutoff) + " beyond r^-(depth-2)");
    return sobolev_from_spectrum(
        [&](double t) { return ft_system_projection(sys, depth, z, t); }, gamma, cutoff, step);
}

}  // namespace selfsim
