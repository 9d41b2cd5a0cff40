#include "selfsim/attractor_sets.hpp"

#include <algorithm>
#include <cmath>

namespace selfsim {

IntervalUnion merge_intervals(std::vector<std::pair<double, double>> raw) {
    IntervalUnion u;
    if (raw.empty()) return u;
    std::sort(raw.begin(), raw.end());
    u.intervals.reserve(raw.size());
    auto [lo, hi] = raw.front();
    for (std::size_t i = 1; i < raw.size(); ++i) {
        if (raw[i].first <= hi) {
            hi = std::max(hi, raw[i].second);
        } else {
            u.intervals.emplace_back(lo, hi);
            lo = raw[i].first;
            hi = raw[i].second;
        }
    }
    u.intervals.emplace_back(lo, hi);
    KahanSum len;
    for (auto [a, b] : u.intervals) len.add(b - a);
    u.total_length = len.value();
    return u;
}

double intersection_length(const IntervalUnion& a, const IntervalUnion& b) {
    KahanSum len;
    std::size_t i = 0, j = 0;
    while (i < a.intervals.size() && j < b.intervals.size()) {
        double lo = std::max(a.intervals[i].first, b.intervals[j].first);
        double hi = std::min(a.intervals[i].second, b.intervals[j].second);
        if (hi > lo) len.add(hi - lo);
        if (a.intervals[i].second < b.intervals[j].second) ++i;
        else ++j;
    }
    return len.value();
}

bool contains(const IntervalUnion& u, double x) {
    auto it = std::upper_bound(u.intervals.begin(), u.intervals.end(), x,
                               [](double v, const std::pair<double, double>& iv) { return v < iv.first; });
    if (it == u.intervals.begin()) return false;
    --it;
    return x >= it->first && x <= it->second;
}

namespace {

IntervalUnion projected_cover(const IfsSystem& sys, Direction z, int depth, cplx seed_center) {
    if (depth < 0) raise(Errc::invalid_argument, "depth must be >= 0");
    // U_0(zeta) = [<zeta, seed> +- R];
    // U_l(zeta) = union_m (<zeta, a_m> + r * U_{l-1}(alpha^-1 zeta)).
    // Unwinds from the innermost direction alpha^-depth z outward.
    std::vector<cplx> dirs(depth + 1);
    cplx dir = z.z;
    for (int l = 0; l <= depth; ++l) {
        dir /= std::abs(dir);
        dirs[l] = dir;
        dir *= std::conj(sys.alpha);
    }

    IntervalUnion u;
    double c = dot(dirs[depth], seed_center);
    u.intervals = {{c - sys.invariant_disk.radius, c + sys.invariant_disk.radius}};
    u.total_length = 2.0 * sys.invariant_disk.radius;

    std::vector<std::pair<double, double>> next;
    for (int l = depth - 1; l >= 0; --l) {
        next.clear();
        next.reserve(u.intervals.size() * sys.map_count());
        for (int m = 0; m < sys.map_count(); ++m) {
            double shift = dot(dirs[l], sys.translations[m]);
            for (auto [a, b] : u.intervals)
                next.emplace_back(shift + sys.r * a, shift + sys.r * b);
        }
        u = merge_intervals(std::move(next));
        next = {};
    }
    return u;
}

}  // namespace

IntervalUnion project_attractor(const IfsSystem& sys, Direction z, int depth) {
    return projected_cover(sys, z, depth, sys.invariant_disk.center);
}

IntervalUnion project_attractor_inner(const IfsSystem& sys, Direction z, int depth) {
    return projected_cover(sys, z, depth, sys.barycenter);
}

CoverageReport equivalence_check(const IfsSystem& sys, const AtomicMeasure2D& atoms, Direction z,
                                 double h, double epsilon, int depth) {
    if (depth < 0) depth = atoms.depth;
    DensityGrid g = density_for(sys, atoms, z, h);

    if (epsilon <= 0.0) {
        std::vector<double> positive;
        for (double v : g.values)
            if (v > 0.0) positive.push_back(v);
        if (positive.empty()) raise(Errc::invalid_argument, "density is identically zero");
        std::sort(positive.begin(), positive.end());
        double median = positive[positive.size() / 2];
        epsilon = 1e-3 * median;
    }

    std::vector<std::pair<double, double>> dense_bins;
    for (int j = 0; j < g.bins(); ++j)
        if (g.values[j] >= epsilon) dense_bins.emplace_back(g.x0 + j * g.h, g.x0 + (j + 1) * g.h);
    IntervalUnion dense = merge_intervals(std::move(dense_bins));

    IntervalUnion outer = project_attractor(sys, z, depth);
    IntervalUnion inner = project_attractor_inner(sys, z, depth);
    double overlap = intersection_length(outer, dense);

    CoverageReport rep;
    rep.epsilon = epsilon;
    rep.length_outer = outer.total_length;
    rep.length_inner = inner.total_length;
    rep.length_dense = dense.total_length;
    rep.cov_a = outer.total_length > 0 ? overlap / outer.total_length : 0.0;
    rep.cov_b = dense.total_length > 0 ? overlap / dense.total_length : 0.0;
    return rep;
}

BoxDimFit slice_set_boxdim(const IfsSystem& sys, Direction z, double x, int depth) {
    if (depth < 1) raise(Errc::invalid_argument, "depth must be >= 1");

    // dirs[l] = alpha^-l z, radii[l] = r^l R.
    std::vector<cplx> dirs(depth + 1);
    cplx dir = z.z;
    for (int l = 0; l <= depth; ++l) {
        dir /= std::abs(dir);
        dirs[l] = dir;
        dir *= std::conj(sys.alpha);
    }

    BoxDimFit fit;
    fit.counts.assign(depth, 0);

    // DFS over cylinders meeting the line <z, .> = x. A cylinder at level l is
    // tracked through its local frame point u = f_word^-1-image of the line
    // offset: the disk f_word(B) meets the line iff |<dirs[l], c0> + x_l| <= R
    // where x_l is the line coordinate pulled back to the local frame.
    struct Node {
        double x_local;  // line offset in the local frame (along dirs[l])
        int level;
    };
    std::vector<Node> stack;
    stack.push_back({x, 0});
    const double R = sys.invariant_disk.radius;

    while (!stack.empty()) {
        Node node = stack.back();
        stack.pop_back();
        if (node.level == depth) continue;
        int l = node.level + 1;
        for (int m = 0; m < sys.map_count(); ++m) {
            // Child disk center in the parent frame: lambda*c0 + a_m; pull the
            // line into the child frame: x' = (x - <dir, a_m>) / r along dirs[l].
            double xc = (node.x_local - dot(dirs[node.level], sys.translations[m])) / sys.r;
            double dist = std::abs(xc - dot(dirs[l], sys.invariant_disk.center));
            if (dist <= R) {
                ++fit.counts[l - 1];
                stack.push_back({xc, l});
            }
        }
    }

    for (int d = 1; d <= depth; ++d)
        if (fit.counts[d - 1] == 0)
            raise(Errc::line_misses_attractor,
                  "line misses the depth-" + std::to_string(d) + " cylinder cover");

    std::vector<double> xv, yv;
    for (int d = 1; d <= depth; ++d) {
        xv.push_back(d * -std::log(sys.r));
        yv.push_back(std::log(static_cast<double>(fit.counts[d - 1])));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xv.size(); ++i) { mx += xv[i]; my += yv[i]; }
    mx /= xv.size(); my /= xv.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
        sxx += (xv[i] - mx) * (xv[i] - mx);
        sxy += (xv[i] - mx) * (yv[i] - my);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    return fit;
}

}  // namespace selfsim
