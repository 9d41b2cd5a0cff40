#include "selfsim/slices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selfsim/parallel.hpp"

namespace selfsim {

namespace {

// Tolerance for "inside a cylinder disk" decisions: floating slack only.
constexpr double kDiskSlack = 1e-9;

double level_margins(const IfsSystem& sys, cplx w, const Word& word, double* out_margin) {
    // Walks a known word, returning the min over levels of the distance to the
    // nearest non-selected sibling disk. Also validates containment loosely.
    const double child_radius = sys.r * sys.invariant_disk.radius;
    double margin = std::numeric_limits<double>::infinity();
    cplx v = w;
    for (int m_sel : word) {
        for (int m = 0; m < sys.map_count(); ++m) {
            cplx center = sys.lambda * sys.invariant_disk.center + sys.translations[m];
            double dist = std::abs(v - center);
            if (m == m_sel) continue;
            margin = std::min(margin, dist - child_radius);
        }
        v = (v - sys.translations[m_sel]) / sys.lambda;
    }
    if (out_margin) *out_margin = margin;
    return margin;
}

}  // namespace

CodedPoint code_point(const IfsSystem& sys, cplx w, int depth) {
    if (depth < 0) raise(Errc::invalid_argument, "depth must be >= 0");
    if (std::abs(w - sys.invariant_disk.center) > sys.invariant_disk.radius * (1.0 + kDiskSlack))
        raise(Errc::not_in_attractor_neighborhood, "point outside the bounding disk");

    CodedPoint p;
    p.w = w;
    p.depth = depth;
    p.word.reserve(depth);
    p.min_gap_margin = std::numeric_limits<double>::infinity();

    const double child_radius = sys.r * sys.invariant_disk.radius;
    cplx v = w;
    for (int level = 0; level < depth; ++level) {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int m = 0; m < sys.map_count(); ++m) {
            cplx center = sys.lambda * sys.invariant_disk.center + sys.translations[m];
            double dist = std::abs(v - center);
            if (dist < best_dist) { best_dist = dist; best = m; }
        }
        if (best_dist > child_radius + kDiskSlack)
            raise(Errc::not_in_attractor_neighborhood,
                  "point escapes every child disk at level " + std::to_string(level + 1));
        for (int m = 0; m < sys.map_count(); ++m) {
            if (m == best) continue;
            cplx center = sys.lambda * sys.invariant_disk.center + sys.translations[m];
            p.min_gap_margin = std::min(p.min_gap_margin, std::abs(v - center) - child_radius);
        }
        p.word.push_back(best);
        v = (v - sys.translations[best]) / sys.lambda;
    }
    if (depth == 0) p.min_gap_margin = sys.invariant_disk.radius;
    return p;
}

CodedPoint shift_T(const IfsSystem& sys, const CodedPoint& p) {
    if (p.depth < 1) raise(Errc::depth_exhausted, "coded point has no symbols left");
    CodedPoint out;
    out.w = (p.w - sys.translations[p.word.front()]) / sys.lambda;
    out.word.assign(p.word.begin() + 1, p.word.end());
    out.depth = p.depth - 1;
    if (out.depth == 0)
        out.min_gap_margin = sys.invariant_disk.radius;
    else
        level_margins(sys, out.w, out.word, &out.min_gap_margin);
    return out;
}

DensityStack build_density_stack(const IfsSystem& sys, const AtomicMeasure2D& atoms, Direction z,
                                 int k_max, double h) {
    DensityStack stack;
    stack.depth = atoms.depth;
    stack.h = h;
    stack.grids.resize(k_max + 1);
    stack.dirs.resize(k_max + 1);
    cplx dir = z.z;
    cplx inv_alpha = std::conj(sys.alpha);
    for (int k = 0; k <= k_max; ++k) {
        dir /= std::abs(dir);
        stack.dirs[k] = dir;
        dir *= inv_alpha;
    }
    par::for_chunks(static_cast<std::size_t>(k_max + 1), [&](const par::ChunkRange& r) {
        for (std::size_t k = r.begin; k < r.end; ++k)
            stack.grids[k] = density_for(sys, atoms, Direction(stack.dirs[k]), h);
    });
    return stack;
}

double slice_mass_formula(const IfsSystem& sys, const DensityStack& stack, const CodedPoint& point,
                          int k, double floor) {
    if (k < 0) raise(Errc::invalid_argument, "k must be >= 0");
    if (k == 0) return 1.0;  // the empty-word cylinder is everything
    if (k > point.depth) raise(Errc::depth_exhausted, "point coded shallower than k");
    if (k >= static_cast<int>(stack.grids.size()))
        raise(Errc::invalid_argument, "density stack shallower than k");

    cplx v = point.w;
    double weight = 1.0;
    for (int j = 0; j < k; ++j) {
        weight *= sys.probs[point.word[j]];
        v = (v - sys.translations[point.word[j]]) / sys.lambda;
    }

    double g_num = stack.grids[k].value_at(dot(stack.dirs[k], v));
    double g_den = stack.grids[0].value_at(dot(stack.dirs[0], point.w));
    if (g_den < floor)
        raise(Errc::density_floor_hit, "g_z(P_z w) = " + std::to_string(g_den) + " below floor");
    if (g_num < floor)
        raise(Errc::density_floor_hit,
              "orbit density read g_{a^-k z} = " + std::to_string(g_num) + " below floor");
    return (g_num / g_den) * weight * std::pow(sys.r, -k);
}

double slice_mass_formula(const IfsSystem& sys, Direction z, const CodedPoint& point, int k,
                          int density_depth, double h, std::size_t atom_budget) {
    AtomicMeasure2D atoms = atomic_approx(sys, density_depth, atom_budget);
    DensityStack stack = build_density_stack(sys, atoms, z, std::max(k, 1), h);
    return slice_mass_formula(sys, stack, point, k);
}

double slice_mass_empirical(const IfsSystem& sys, const SampleSet& samples, Direction z, cplx w,
                            const Word& word, double delta) {
    if (samples.points.size() < 10000)
        raise(Errc::too_few_points, "need at least 1e4 samples for window estimates");
    if (!(delta > 0.0)) raise(Errc::invalid_argument, "delta must be positive");

    const double x0 = z.project(w);
    const std::size_t n = samples.points.size();
    const int depth = static_cast<int>(word.size());

    int chunks = static_cast<int>(std::min<std::size_t>(par::kChunkGrid, n));
    std::vector<std::size_t> in_window(chunks, 0), in_cylinder(chunks, 0);
    par::for_chunks(n, [&](const par::ChunkRange& r) {
        std::size_t window = 0, cyl = 0;
        for (std::size_t i = r.begin; i < r.end; ++i) {
            if (std::abs(z.project(samples.points[i]) - x0) > delta) continue;
            ++window;
            if (depth == 0) { ++cyl; continue; }
            try {
                CodedPoint c = code_point(sys, samples.points[i], depth);
                if (c.word == word) ++cyl;
            } catch (const Error&) {
                // a window sample outside the coded neighborhood is a non-member
            }
        }
        in_window[r.index] = window;
        in_cylinder[r.index] = cyl;
    });
    std::size_t window = 0, cyl = 0;
    for (int c = 0; c < chunks; ++c) { window += in_window[c]; cyl += in_cylinder[c]; }
    if (window == 0) raise(Errc::empty_window, "no samples project into the window");
    return static_cast<double>(cyl) / static_cast<double>(window);
}

LocalDimFit slice_local_dim(const IfsSystem& sys, const DensityStack& stack, const CodedPoint& point,
                            int k_max) {
    if (k_max < 4) raise(Errc::invalid_argument, "k_max must be >= 4");
    if (point.depth < k_max) raise(Errc::depth_exhausted, "point coded shallower than k_max");

    const double logr = std::log(sys.r);
    // k = 1 is discarded: the depth-1 cylinders are too coarse for the fit.
    std::vector<double> x, y_total, y_weight;
    for (int k = 2; k <= k_max; ++k) {
        double mass = slice_mass_formula(sys, stack, point, k);
        double weight = 1.0;
        for (int j = 0; j < k; ++j) weight *= sys.probs[point.word[j]];
        x.push_back(k * logr);
        y_total.push_back(std::log(mass));
        y_weight.push_back(std::log(weight * std::pow(sys.r, -k)));
    }

    auto slope = [&](const std::vector<double>& y) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
        mx /= x.size(); my /= x.size();
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        return sxx > 0 ? sxy / sxx : 0.0;
    };

    LocalDimFit fit;
    fit.slope = slope(y_total);
    fit.weight_slope = slope(y_weight);
    fit.density_slope = fit.slope - fit.weight_slope;
    return fit;
}

ConserveReport dimension_conservation_report(const IfsSystem& sys, const AtomicMeasure2D& atoms,
                                             const SampleSet& samples, Direction z, int n_points,
                                             int k_max, double h) {
    if (n_points < 1) raise(Errc::invalid_argument, "need at least one point");

    ConserveReport rep;
    rep.z = z.z;
    DimReport dims = closed_form_dims(sys, 2.0);
    rep.closed_dim_measure = dims.dim_measure;
    rep.hypothesis_ok = dims.dim_measure > 1.0;

    DensityStack stack = build_density_stack(sys, atoms, z, k_max, h);
    const int code_depth = k_max + 2;  // guarantees word availability for every k

    std::size_t available = samples.points.size();
    std::size_t take = std::min<std::size_t>(n_points, available);
    rep.points.resize(take);
    std::vector<int> status(take, 0);  // 0 ok, 1 coding failure, 2 floor hit
    par::for_chunks(take, [&](const par::ChunkRange& r) {
        for (std::size_t i = r.begin; i < r.end; ++i) {
            ConservePoint cp;
            cp.w = samples.points[i];
            try {
                CodedPoint coded = code_point(sys, cp.w, code_depth);
                LocalDimFit fit = slice_local_dim(sys, stack, coded, k_max);
                cp.local_dim = fit.slope;
                cp.weight_part = fit.weight_slope;
                cp.density_part = fit.density_slope;
            } catch (const Error& e) {
                if (e.code() == Errc::density_floor_hit) {
                    cp.floor_hit = true;
                    status[i] = 2;
                } else {
                    status[i] = 1;
                }
            }
            rep.points[i] = cp;
        }
    });

    std::vector<double> dims_ok;
    for (std::size_t i = 0; i < take; ++i) {
        if (status[i] == 1) ++rep.coding_failures;
        else if (status[i] == 2) ++rep.floor_hits;
        else dims_ok.push_back(rep.points[i].local_dim);
    }
    if (!dims_ok.empty()) {
        std::sort(dims_ok.begin(), dims_ok.end());
        std::size_t mid = dims_ok.size() / 2;
        rep.median_local_dim = dims_ok.size() % 2 ? dims_ok[mid]
                                                  : 0.5 * (dims_ok[mid - 1] + dims_ok[mid]);
    }
    rep.dim_projection = 1.0;
    rep.dim_sum = rep.dim_projection + rep.median_local_dim;
    return rep;
}

}  // namespace selfsim
