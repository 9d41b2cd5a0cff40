#include "selfsim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "selfsim/parallel.hpp"

namespace selfsim {

namespace {

std::size_t checked_atom_count(int map_count, int depth, std::size_t budget) {
    std::size_t n = 1;
    for (int d = 0; d < depth; ++d) {
        if (n > budget / static_cast<std::size_t>(map_count))
            raise(Errc::atom_budget_exceeded,
                  "|Lambda|^depth exceeds atom budget " + std::to_string(budget));
        n *= static_cast<std::size_t>(map_count);
    }
    return n;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
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

// 95% jackknife-over-rungs half-width for the slope.
double jackknife_slope_ci(std::span<const double> x, std::span<const double> y) {
    std::size_t n = x.size();
    if (n < 3) return 0.0;
    std::vector<double> slopes;
    std::vector<double> xs, ys;
    for (std::size_t drop = 0; drop < n; ++drop) {
        xs.clear(); ys.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (i != drop) { xs.push_back(x[i]); ys.push_back(y[i]); }
        slopes.push_back(fit_line(xs, ys).slope);
    }
    double mean = 0;
    for (double s : slopes) mean += s;
    mean /= n;
    double var = 0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    var *= static_cast<double>(n - 1) / n;
    return 1.96 * std::sqrt(var);
}

}  // namespace

Word AtomicMeasure2D::word_of(std::size_t idx, int map_count) const {
    Word w(depth);
    for (int j = depth - 1; j >= 0; --j) {
        w[j] = static_cast<int>(idx % map_count);
        idx /= map_count;
    }
    return w;
}

AtomicMeasure2D atomic_approx(const IfsSystem& sys, int depth, std::size_t atom_budget) {
    if (depth < 0) raise(Errc::invalid_argument, "depth must be >= 0");
    const int n = sys.map_count();
    checked_atom_count(n, depth, atom_budget);

    AtomicMeasure2D m;
    m.depth = depth;
    m.base_point = sys.barycenter;
    m.points = {sys.barycenter};
    m.weights = {1.0};

    for (int level = 1; level <= depth; ++level) {
        std::size_t prev = m.points.size();
        std::vector<cplx> pts(prev * n);
        std::vector<double> wts(prev * n);
        // Lexicographic order: block i1 holds f_{i1} applied to the previous level.
        par::for_chunks(prev * n, [&](const par::ChunkRange& r) {
            for (std::size_t idx = r.begin; idx < r.end; ++idx) {
                std::size_t i1 = idx / prev;
                std::size_t j = idx % prev;
                pts[idx] = sys.lambda * m.points[j] + sys.translations[i1];
                wts[idx] = sys.probs[i1] * m.weights[j];
            }
        });
        m.points = std::move(pts);
        m.weights = std::move(wts);
    }
    return m;
}

SampleSet sample_measure(const IfsSystem& sys, std::size_t n, int word_length, std::uint64_t seed) {
    if (n < 1) raise(Errc::invalid_argument, "need n >= 1 samples");
    if (word_length < 1) raise(Errc::invalid_argument, "word_length must be >= 1");

    SampleSet s;
    s.seed = seed;
    s.word_length = word_length;
    s.points.resize(n);

    std::vector<double> cum(sys.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < sys.probs.size(); ++i) {
        acc += sys.probs[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;

    // Chunk-indexed rng streams: the partition is fixed by n alone, so results
    // do not depend on the worker count.
    par::for_chunks(n, [&](const par::ChunkRange& r) {
        std::mt19937_64 rng(splitmix64(seed ^ (0x5e1f51 + static_cast<std::uint64_t>(r.index))));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (std::size_t i = r.begin; i < r.end; ++i) {
            cplx w = sys.barycenter;
            for (int j = 0; j < word_length; ++j) {
                double u = uni(rng);
                std::size_t idx = 0;
                while (idx + 1 < cum.size() && u >= cum[idx]) ++idx;
                w = sys.lambda * w + sys.translations[idx];
            }
            s.points[i] = w;
        }
    });
    return s;
}

int default_word_length(const IfsSystem& sys) {
    return static_cast<int>(std::floor(9.0 / -std::log10(sys.r))) + 1;
}

ConvolutionSplit convolution_split(const IfsSystem& sys, int k, bool auto_conjugate) {
    if (k < 2) raise(Errc::invalid_argument, "convolution split needs k >= 2");
    const int n = sys.map_count();

    ConvolutionSplit out;
    std::vector<cplx> a = sys.translations;
    bool has_zero = std::any_of(a.begin(), a.end(), [](cplx v) { return v == cplx{0, 0}; });
    if (!has_zero) {
        if (!auto_conjugate)
            raise(Errc::no_zero_translation, "no translation equals zero; enable auto conjugation");
        std::size_t i0 = 0;
        for (std::size_t i = 1; i < a.size(); ++i)
            if (std::abs(a[i]) < std::abs(a[i0])) i0 = i;
        cplx shift_a = a[i0];
        for (auto& v : a) v -= shift_a;
        out.conjugated = true;
        out.shift = -shift_a / (cplx{1, 0} - sys.lambda);
    }

    cplx lambda_k = std::pow(sys.lambda, k);

    // mu: one map per word in Lambda^{k-1}, g_i(w) = lambda^k w + sum a_{i_j} lambda^j.
    std::size_t words = 1;
    for (int j = 0; j < k - 1; ++j) words *= static_cast<std::size_t>(n);
    std::vector<cplx> mu_a(words);
    std::vector<double> mu_p(words);
    for (std::size_t idx = 0; idx < words; ++idx) {
        std::size_t rem = idx;
        cplx off{0, 0};
        double wt = 1.0;
        cplx pw = sys.lambda;  // lambda^j, j = 1..k-1
        for (int j = 0; j < k - 1; ++j) {
            std::size_t digit = rem;
            for (int t = j + 1; t < k - 1; ++t) digit /= static_cast<std::size_t>(n);
            digit %= static_cast<std::size_t>(n);
            off += a[digit] * pw;
            wt *= sys.probs[digit];
            pw *= sys.lambda;
        }
        mu_a[idx] = off;
        mu_p[idx] = wt;
    }

    out.mu = validate_system(lambda_k, std::move(mu_a), std::move(mu_p));
    out.nu_k = validate_system(lambda_k, a, sys.probs);
    return out;
}

namespace {

DqEstimate dq_from_masses(std::span<const cplx> points, std::span<const double> weights, double q,
                          double delta_min, double delta_max, int n_scales, cplx anchor) {
    if (!(delta_min > 0.0) || !(delta_min < delta_max))
        raise(Errc::degenerate_scales, "need 0 < delta_min < delta_max");
    if (n_scales < 2) raise(Errc::degenerate_scales, "need at least 2 scales");
    if (points.empty()) raise(Errc::too_few_points, "no points");
    if (!weights.empty() && weights.size() != points.size())
        raise(Errc::invalid_argument, "weight count does not match points");

    const std::size_t n = points.size();
    const bool weighted = !weights.empty();
    const bool integer_q = std::abs(q - std::round(q)) < 1e-9 && q >= 2.0 && q <= 8.0;
    const int qi = static_cast<int>(std::round(q));

    std::vector<double> log_delta, log_moment, scales;
    for (int l = 0; l < n_scales; ++l) {
        double delta = delta_max * std::pow(delta_min / delta_max, n_scales == 1 ? 0.0
                                            : static_cast<double>(l) / (n_scales - 1));
        // Key boxes by half-open grid coordinates anchored at `anchor`.
        std::vector<std::uint64_t> keys(n);
        par::for_chunks(n, [&](const par::ChunkRange& r) {
            for (std::size_t i = r.begin; i < r.end; ++i) {
                auto kx = static_cast<std::int64_t>(std::floor((points[i].real() - anchor.real()) / delta));
                auto ky = static_cast<std::int64_t>(std::floor((points[i].imag() - anchor.imag()) / delta));
                keys[i] = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(kx)) << 32) |
                          static_cast<std::uint64_t>(static_cast<std::uint32_t>(ky));
            }
        });
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

        KahanSum moment;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            double mass = 0.0;
            std::size_t count = 0;
            while (j < n && keys[order[j]] == keys[order[i]]) {
                mass += weighted ? weights[order[j]] : 1.0;
                ++count;
                ++j;
            }
            if (weighted) {
                moment.add(std::pow(mass, q));
            } else if (integer_q && n >= static_cast<std::size_t>(qi)) {
                // Factorial-moment estimator: unbiased for sum_box mu(box)^q.
                double prod = 1.0;
                for (int t = 0; t < qi; ++t) prod *= static_cast<double>(count) - t;
                moment.add(prod);
            } else {
                moment.add(std::pow(static_cast<double>(count) / n, q));
            }
            i = j;
        }
        double s = moment.value();
        if (!weighted && integer_q && n >= static_cast<std::size_t>(qi)) {
            double denom = 1.0;
            for (int t = 0; t < qi; ++t) denom *= static_cast<double>(n) - t;
            s /= denom;
        }
        if (!(s > 0.0)) continue;  // undersampled rung carries no information
        scales.push_back(delta);
        log_delta.push_back(std::log(delta));
        log_moment.push_back(std::log(s));
    }
    if (log_delta.size() < 2) raise(Errc::too_few_points, "all scales undersampled");

    LineFit f = fit_line(log_delta, log_moment);
    DqEstimate est;
    est.value = f.slope / (q - 1.0);
    est.ci = jackknife_slope_ci(log_delta, log_moment) / (q - 1.0);
    est.scales = std::move(scales);
    est.log_moments = std::move(log_moment);
    return est;
}

}  // namespace

DqEstimate empirical_dq(std::span<const cplx> points, std::span<const double> weights, double q,
                        double delta_min, double delta_max, int n_scales, cplx anchor) {
    if (!(q > 1.0)) raise(Errc::q_out_of_range, "q must exceed 1");
    return dq_from_masses(points, weights, q, delta_min, delta_max, n_scales, anchor);
}

DqEstimate empirical_dq(const IfsSystem& sys, const SampleSet& samples, double q,
                        double delta_min, double delta_max, int n_scales) {
    cplx anchor = sys.invariant_disk.center -
                  cplx{sys.invariant_disk.radius, sys.invariant_disk.radius};
    return empirical_dq(samples.points, {}, q, delta_min, delta_max, n_scales, anchor);
}

DqEstimate empirical_dq(const IfsSystem& sys, const AtomicMeasure2D& atoms, double q,
                        double delta_min, double delta_max, int n_scales) {
    cplx anchor = sys.invariant_disk.center -
                  cplx{sys.invariant_disk.radius, sys.invariant_disk.radius};
    return empirical_dq(atoms.points, atoms.weights, q, delta_min, delta_max, n_scales, anchor);
}

DqEstimate correlation_dim_gp(std::span<const cplx> points, double delta_min, double delta_max,
                              int n_scales, std::size_t max_points) {
    if (!(delta_min > 0.0) || !(delta_min < delta_max))
        raise(Errc::degenerate_scales, "need 0 < delta_min < delta_max");
    if (n_scales < 2) raise(Errc::degenerate_scales, "need at least 2 scales");
    if (points.size() < 2) raise(Errc::too_few_points, "need at least 2 points");

    std::vector<cplx> pts;
    if (points.size() > max_points) {
        std::size_t stride = (points.size() + max_points - 1) / max_points;
        for (std::size_t i = 0; i < points.size(); i += stride) pts.push_back(points[i]);
    } else {
        pts.assign(points.begin(), points.end());
    }
    const std::size_t n = pts.size();

    std::vector<double> log_delta, log_corr, scales;
    for (int l = 0; l < n_scales; ++l) {
        double delta = delta_max * std::pow(delta_min / delta_max,
                                            static_cast<double>(l) / (n_scales - 1));
        // Cell hashing at pitch delta; only the 3x3 neighborhood can contain pairs.
        auto cell_key = [&](cplx p) {
            auto kx = static_cast<std::int64_t>(std::floor(p.real() / delta));
            auto ky = static_cast<std::int64_t>(std::floor(p.imag() / delta));
            return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(kx)) << 32) |
                   static_cast<std::uint64_t>(static_cast<std::uint32_t>(ky));
        };
        std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells;
        cells.reserve(n);
        for (std::size_t i = 0; i < n; ++i) cells[cell_key(pts[i])].push_back(static_cast<std::uint32_t>(i));

        std::uint64_t pairs = 0;
        double d2 = delta * delta;
        for (std::size_t i = 0; i < n; ++i) {
            auto kx = static_cast<std::int64_t>(std::floor(pts[i].real() / delta));
            auto ky = static_cast<std::int64_t>(std::floor(pts[i].imag() / delta));
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                for (std::int64_t dy = -1; dy <= 1; ++dy) {
                    std::uint64_t key =
                        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(kx + dx)) << 32) |
                        static_cast<std::uint64_t>(static_cast<std::uint32_t>(ky + dy));
                    auto it = cells.find(key);
                    if (it == cells.end()) continue;
                    for (std::uint32_t j : it->second) {
                        if (j <= i) continue;
                        cplx diff = pts[i] - pts[j];
                        if (diff.real() * diff.real() + diff.imag() * diff.imag() <= d2) ++pairs;
                    }
                }
            }
        }
        if (pairs == 0) continue;
        double corr = 2.0 * static_cast<double>(pairs) / (static_cast<double>(n) * (n - 1));
        scales.push_back(delta);
        log_delta.push_back(std::log(delta));
        log_corr.push_back(std::log(corr));
    }
    if (log_delta.size() < 2) raise(Errc::too_few_points, "no pairs at any scale");

    LineFit f = fit_line(log_delta, log_corr);
    DqEstimate est;
    est.value = f.slope;
    est.ci = jackknife_slope_ci(log_delta, log_corr);
    est.scales = std::move(scales);
    est.log_moments = std::move(log_corr);
    return est;
}

}  // namespace selfsim
