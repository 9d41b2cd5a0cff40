#include "selfsim/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace selfsim {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool contains_all(const Disk& d, std::span<const cplx> pts, double tol) {
    for (cplx p : pts)
        if (std::abs(p - d.center) > d.radius + tol) return false;
    return true;
}

Disk circumdisk(cplx a, cplx b, cplx c) {
    // Degenerate (collinear) triples return an infinite radius so they lose.
    double ax = a.real(), ay = a.imag();
    double bx = b.real(), by = b.imag();
    double cx = c.real(), cy = c.imag();
    double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if (std::abs(d) < 1e-14) return {cplx{0, 0}, std::numeric_limits<double>::infinity()};
    double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    double ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    double uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    cplx center{ux, uy};
    return {center, std::abs(a - center)};
}

}  // namespace

Disk smallest_enclosing_disk(std::span<const cplx> pts) {
    if (pts.empty()) raise(Errc::invalid_argument, "no points for enclosing disk");
    if (pts.size() == 1) return {pts[0], 0.0};

    const double tol = 1e-12;
    Disk best{cplx{0, 0}, std::numeric_limits<double>::infinity()};

    // Small point sets only (translation vectors): scan pair and triple supports.
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            Disk d{0.5 * (pts[i] + pts[j]), 0.5 * std::abs(pts[i] - pts[j])};
            if (d.radius < best.radius && contains_all(d, pts, tol)) best = d;
        }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            for (std::size_t k = j + 1; k < pts.size(); ++k) {
                Disk d = circumdisk(pts[i], pts[j], pts[k]);
                if (d.radius < best.radius && contains_all(d, pts, tol)) best = d;
            }
        }
    }
    return best;
}

IfsSystem validate_system(cplx lambda, std::vector<cplx> translations, std::vector<double> probs) {
    if (!finite(lambda)) raise(Errc::modulus_out_of_range, "lambda has non-finite components");
    double r = std::abs(lambda);
    if (!(r > 0.0 && r < 1.0))
        raise(Errc::modulus_out_of_range, "|lambda| must lie in (0,1), got " + std::to_string(r));

    if (probs.size() != translations.size())
        raise(Errc::bad_probability_vector, "probability vector length does not match map count");
    if (translations.size() < 2)
        raise(Errc::degenerate_translations, "need at least two maps");
    for (cplx a : translations)
        if (!finite(a)) raise(Errc::degenerate_translations, "translation has non-finite components");

    KahanSum psum;
    for (double p : probs) {
        if (!(p > 0.0) || !std::isfinite(p))
            raise(Errc::bad_probability_vector, "probabilities must be strictly positive");
        psum.add(p);
    }
    if (std::abs(psum.value() - 1.0) > kAlgebraTol)
        raise(Errc::bad_probability_vector,
              "probabilities sum to " + std::to_string(psum.value()) + ", expected 1");

    bool all_equal = true;
    for (cplx a : translations)
        if (a != translations[0]) { all_equal = false; break; }
    if (all_equal) raise(Errc::degenerate_translations, "all translations equal");

    IfsSystem sys;
    sys.lambda = lambda;
    sys.r = r;
    sys.alpha = lambda / r;
    sys.translations = std::move(translations);
    sys.probs = std::move(probs);

    cplx mean{0, 0};
    for (int i = 0; i < sys.map_count(); ++i) mean += sys.probs[i] * sys.translations[i];
    sys.barycenter = mean / (cplx{1, 0} - lambda);

    Disk sec = smallest_enclosing_disk(sys.translations);
    sys.invariant_disk.center = sec.center / (cplx{1, 0} - lambda);
    sys.invariant_disk.radius = sec.radius / (1.0 - r);
    return sys;
}

CylinderMap cylinder_map(const IfsSystem& sys, const Word& word) {
    CylinderMap m;
    m.scale = cplx{1, 0};
    m.offset = cplx{0, 0};
    m.weight = 1.0;
    m.word = word;
    // f_word(w) = a_{i_1} + lambda*(a_{i_2} + lambda*(... )) + lambda^k w
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        int i = *it;
        if (i < 0 || i >= sys.map_count())
            raise(Errc::index_out_of_range, "word index " + std::to_string(i));
        m.offset = sys.lambda * m.offset + sys.translations[i];
        m.scale *= sys.lambda;
        m.weight *= sys.probs[i];
    }
    return m;
}

const char* to_string(SscStatus s) {
    switch (s) {
        case SscStatus::proven: return "Proven";
        case SscStatus::refuted: return "Refuted";
        case SscStatus::unknown: return "Unknown";
    }
    return "?";
}

SscVerdict check_ssc(const IfsSystem& sys, int max_depth) {
    if (max_depth < 1) raise(Errc::invalid_argument, "max_depth must be >= 1");
    const int n = sys.map_count();
    const double radius = sys.invariant_disk.radius;
    const double coincidence_tol = 1e-12;
    // Frontier entries are center differences between cylinder disks that
    // descend from distinct depth-1 branches. Both disks share radius r^d R,
    // so the pair separates once |diff| > 2 r^d R. By homogeneity only
    // cross-branch pairs matter; same-parent pairs are scaled copies.
    const std::size_t expansion_budget = 200000;

    std::vector<cplx> frontier;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) frontier.push_back(sys.translations[i] - sys.translations[j]);

    auto canonical = [](cplx d) {
        if (d.real() < 0 || (d.real() == 0 && d.imag() < 0)) return -d;
        return d;
    };
    auto dedupe = [&](std::vector<cplx>& v) {
        for (auto& d : v) d = canonical(d);
        std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(frontier);

    SscVerdict verdict;
    verdict.min_gap = std::numeric_limits<double>::infinity();
    double scale = sys.r;   // r^depth
    cplx power = sys.lambda;  // lambda^depth
    bool any_separated = false;

    for (int depth = 1; depth <= max_depth; ++depth) {
        verdict.depth_used = depth;
        double disk_diam = 2.0 * scale * radius;
        std::vector<cplx> unresolved;
        for (cplx diff : frontier) {
            double dist = std::abs(diff);
            if (dist <= coincidence_tol) {
                // Numerically identical cylinder maps from distinct branches:
                // their attractor pieces share points.
                verdict.status = SscStatus::refuted;
                verdict.min_gap = dist - disk_diam;
                return verdict;
            }
            double gap = dist - disk_diam;
            if (gap > 0.0) {
                any_separated = true;
                verdict.min_gap = std::min(verdict.min_gap, gap);
            } else {
                unresolved.push_back(diff);
            }
        }
        if (unresolved.empty()) {
            verdict.status = SscStatus::proven;
            return verdict;
        }
        if (depth == max_depth || unresolved.size() * n * n > expansion_budget) {
            verdict.status = SscStatus::unknown;
            double worst = 0.0;
            for (cplx diff : unresolved) worst = std::min(worst, std::abs(diff) - disk_diam);
            verdict.min_gap = any_separated ? std::min(verdict.min_gap, worst) : worst;
            return verdict;
        }
        std::vector<cplx> next;
        next.reserve(unresolved.size() * n * n);
        for (cplx diff : unresolved)
            for (int m = 0; m < n; ++m)
                for (int mm = 0; mm < n; ++mm)
                    next.push_back(diff + power * (sys.translations[m] - sys.translations[mm]));
        dedupe(next);
        frontier = std::move(next);
        scale *= sys.r;
        power *= sys.lambda;
    }
    verdict.status = SscStatus::unknown;
    return verdict;
}

DimReport closed_form_dims(const IfsSystem& sys, double q, bool ssc_proven) {
    if (!(q > 1.0)) raise(Errc::q_out_of_range, "q must exceed 1");
    double logr = std::log(sys.r);
    KahanSum moment, entropy;
    for (double p : sys.probs) {
        moment.add(std::pow(p, q));
        entropy.add(p * std::log(p));
    }
    DimReport rep;
    rep.q = q;
    rep.dq = std::log(moment.value()) / ((q - 1.0) * logr);
    rep.dim_measure = entropy.value() / logr;
    rep.dim_set = std::log(static_cast<double>(sys.map_count())) / (-logr);
    rep.ssc_assumed = ssc_proven;
    return rep;
}

RotationCheck check_irrational_rotation(const IfsSystem& sys, long long denominator_bound) {
    if (denominator_bound < 1) raise(Errc::invalid_argument, "denominator bound must be >= 1");
    RotationCheck res;
    res.denominator_bound = denominator_bound;
    res.theta = std::atan2(sys.lambda.imag(), sys.lambda.real()) / std::numbers::pi;

    // Continued-fraction convergents p/q of theta; a convergent counts as a
    // match when the scaled residual |q*theta - p| is within 1e-12.
    double x = res.theta;
    long long hm2 = 0, hm1 = 1, km2 = 1, km1 = 0;
    for (int iter = 0; iter < 64; ++iter) {
        double fa = std::floor(x);
        if (!(std::abs(fa) < 4.0e18)) break;
        long long a = static_cast<long long>(fa);
        if (iter > 0 && km1 > 0 && a > (4000000000000000000LL - km2) / std::max<long long>(km1, 1))
            break;  // overflow guard
        long long h = a * hm1 + hm2;
        long long k = a * km1 + km2;
        hm2 = hm1; hm1 = h;
        km2 = km1; km1 = k;
        if (k > denominator_bound) break;
        double residual = std::abs(static_cast<double>(k) * res.theta - static_cast<double>(h));
        if (residual <= 1e-12) {
            res.rational = true;
            res.p = h;
            res.q = k;
            return res;
        }
        double frac = x - fa;
        if (frac <= 0.0) break;
        x = 1.0 / frac;
        if (!std::isfinite(x)) break;
    }
    return res;
}

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::modulus_out_of_range: return "ModulusOutOfRange";
        case Errc::bad_probability_vector: return "BadProbabilityVector";
        case Errc::degenerate_translations: return "DegenerateTranslations";
        case Errc::index_out_of_range: return "IndexOutOfRange";
        case Errc::q_out_of_range: return "QOutOfRange";
        case Errc::atom_budget_exceeded: return "AtomBudgetExceeded";
        case Errc::no_zero_translation: return "NoZeroTranslation";
        case Errc::degenerate_scales: return "DegenerateScales";
        case Errc::too_few_points: return "TooFewPoints";
        case Errc::support_out_of_range: return "SupportOutOfRange";
        case Errc::grid_mismatch: return "GridMismatch";
        case Errc::insufficient_rungs: return "InsufficientRungs";
        case Errc::cutoff_outside_trusted_band: return "CutoffOutsideTrustedBand";
        case Errc::not_in_attractor_neighborhood: return "NotInAttractorNeighborhood";
        case Errc::depth_exhausted: return "DepthExhausted";
        case Errc::density_floor_hit: return "DensityFloorHit";
        case Errc::empty_window: return "EmptyWindow";
        case Errc::line_misses_attractor: return "LineMissesAttractor";
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::io_failure: return "IoFailure";
    }
    return "UnknownError";
}

}  // namespace selfsim
