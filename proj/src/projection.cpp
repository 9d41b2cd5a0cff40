#include "selfsim/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selfsim/parallel.hpp"

namespace selfsim {

AtomicMeasure1D project(const AtomicMeasure2D& m, Direction z) {
    AtomicMeasure1D out;
    out.positions.resize(m.size());
    out.weights = m.weights;
    par::for_chunks(m.size(), [&](const par::ChunkRange& r) {
        for (std::size_t i = r.begin; i < r.end; ++i) out.positions[i] = z.project(m.points[i]);
    });
    return out;
}

double DensityGrid::mass() const {
    KahanSum s;
    for (double v : values) s.add(v);
    return s.value() * h;
}

double DensityGrid::value_at(double x) const {
    double t = (x - x0) / h;
    if (t < 0.0) return 0.0;
    auto j = static_cast<std::size_t>(t);
    if (j >= values.size()) return 0.0;
    return values[j];
}

DensityGrid density(const AtomicMeasure1D& m, double x_min, double x_max, double h) {
    if (!(h > 0.0)) raise(Errc::invalid_argument, "bin width must be positive");
    if (!(x_max > x_min)) raise(Errc::invalid_argument, "empty density range");
    int bins = static_cast<int>(std::ceil((x_max - x_min) / h - 1e-9));
    bins = std::max(bins, 1);

    DensityGrid g;
    g.x0 = x_min;
    g.h = h;
    g.values.assign(bins, 0.0);

    // Per-chunk local histograms merged in chunk order keep the reduction
    // deterministic for any thread count.
    const int chunk_grid = static_cast<int>(std::min<std::size_t>(par::kChunkGrid, m.size()));
    std::vector<std::vector<double>> local(chunk_grid);
    par::for_chunks(m.size(), [&](const par::ChunkRange& r) {
        std::vector<double>& hist = local[r.index];
        hist.assign(bins, 0.0);
        for (std::size_t i = r.begin; i < r.end; ++i) {
            double x = m.positions[i];
            if (x < x_min || x > x_max)
                raise(Errc::support_out_of_range,
                      "position " + std::to_string(x) + " outside density range");
            auto j = static_cast<int>((x - x_min) / h);
            if (j >= bins) j = bins - 1;  // right edge folds into the last bin
            hist[j] += m.weights[i];
        }
    });
    for (const auto& hist : local)
        for (int j = 0; j < bins && !hist.empty(); ++j) g.values[j] += hist[j];
    for (double& v : g.values) v /= h;
    return g;
}

DensityGrid density_for(const IfsSystem& sys, const AtomicMeasure2D& atoms, Direction z, double h) {
    double center = z.project(sys.invariant_disk.center);
    double radius = sys.invariant_disk.radius;
    return density(project(atoms, z), center - radius, center + radius, h);
}

double default_bin_width(const IfsSystem& sys, int depth) {
    return std::pow(sys.r, depth / 2.0);
}

double lq_norm(const DensityGrid& g, double q) {
    if (!(q >= 1.0)) raise(Errc::q_out_of_range, "q must be >= 1");
    KahanSum s;
    for (double v : g.values) s.add(std::pow(v, q));
    return std::pow(g.h * s.value(), 1.0 / q);
}

double selfsim_density_residual(const IfsSystem& sys, Direction z, int k, int depth, double h,
                                std::size_t atom_budget) {
    if (k < 0) raise(Errc::invalid_argument, "k must be >= 0");
    AtomicMeasure2D atoms = atomic_approx(sys, depth, atom_budget);
    DensityGrid lhs = density_for(sys, atoms, z, h);

    cplx alpha_mk = std::pow(sys.alpha, -k);
    Direction z_rot = z.rotated(alpha_mk);
    DensityGrid g_rot = density_for(sys, atoms, z_rot, h);

    double rk = std::pow(sys.r, k);
    double inv_rk = 1.0 / rk;
    // One LHS bin must not step across the whole rotated grid.
    if (h * inv_rk > 2.0 * sys.invariant_disk.radius)
        raise(Errc::grid_mismatch, "r^-k h exceeds the rotated grid span; increase depth or lower k");

    // b_i = P_z f_i(0), enumerated over Lambda^k.
    std::size_t words = 1;
    for (int j = 0; j < k; ++j) words *= static_cast<std::size_t>(sys.map_count());
    std::vector<double> b(words);
    Word w(k);
    for (std::size_t idx = 0; idx < words; ++idx) {
        std::size_t rem = idx;
        for (int j = k - 1; j >= 0; --j) {
            w[j] = static_cast<int>(rem % sys.map_count());
            rem /= static_cast<std::size_t>(sys.map_count());
        }
        b[idx] = z.project(cylinder_map(sys, w).offset);
    }
    std::vector<double> p(words, 1.0);
    for (std::size_t idx = 0; idx < words; ++idx) {
        std::size_t rem = idx;
        for (int j = 0; j < k; ++j) {
            p[idx] *= sys.probs[rem % sys.map_count()];
            rem /= static_cast<std::size_t>(sys.map_count());
        }
    }

    KahanSum l1;
    for (int j = 0; j < lhs.bins(); ++j) {
        double x = lhs.center(j);
        KahanSum rhs;
        for (std::size_t idx = 0; idx < words; ++idx)
            rhs.add(p[idx] * inv_rk * g_rot.value_at(inv_rk * (x - b[idx])));
        l1.add(std::abs(lhs.values[j] - rhs.value()) * h);
    }
    return l1.value();
}

std::vector<BumpFunction> test_function_family(const IfsSystem& sys, int count) {
    double center = std::abs(sys.invariant_disk.center);
    double span = center + sys.invariant_disk.radius;  // |P_z w| <= span for every z
    std::vector<BumpFunction> fam;
    fam.reserve(count);
    double sigma = 2.0 * span / (2.0 * count);
    for (int m = 0; m < count; ++m) {
        BumpFunction b;
        b.center = -span + (m + 0.5) * (2.0 * span / count);
        b.sigma = sigma;
        b.lipschitz = std::exp(-0.5) / sigma;  // max |h'| of the Gaussian bump
        fam.push_back(b);
    }
    return fam;
}

std::vector<SweepRow> direction_sweep(const IfsSystem& sys, const AtomicMeasure2D& atoms,
                                      int n_directions, double h, double q) {
    if (n_directions < 8) raise(Errc::invalid_argument, "need at least 8 directions");
    auto family = test_function_family(sys);
    std::vector<SweepRow> rows(n_directions);

    par::for_chunks(static_cast<std::size_t>(n_directions), [&](const par::ChunkRange& r) {
        for (std::size_t j = r.begin; j < r.end; ++j) {
            double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / n_directions;
            Direction z = Direction::from_angle(angle);
            AtomicMeasure1D proj = project(atoms, z);
            DensityGrid g = density(proj,
                                    z.project(sys.invariant_disk.center) - sys.invariant_disk.radius,
                                    z.project(sys.invariant_disk.center) + sys.invariant_disk.radius,
                                    h);
            SweepRow row;
            row.angle = angle;
            row.z = z.z;
            row.mass = g.mass();
            row.lq = lq_norm(g, q);
            row.test_integrals.reserve(family.size());
            for (const auto& bump : family) {
                KahanSum acc;
                for (std::size_t i = 0; i < proj.size(); ++i)
                    acc.add(proj.weights[i] * bump(proj.positions[i]));
                row.test_integrals.push_back(acc.value());
            }
            rows[j] = std::move(row);
        }
    });
    return rows;
}

}  // namespace selfsim
