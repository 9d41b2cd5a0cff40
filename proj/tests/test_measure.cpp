#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "selfsim/measure.hpp"
#include "test_helpers.hpp"

using namespace selfsim;
using selfsim::testing::sys_a;
using selfsim::testing::sys_b;

TEST_SUITE_BEGIN("measure");

TEST_CASE("atomic_approx at small depths") {
    IfsSystem s = sys_a();

    AtomicMeasure2D d0 = atomic_approx(s, 0);
    REQUIRE(d0.size() == 1);
    CHECK(std::abs(d0.points[0]) < 1e-14);  // barycenter of the symmetric system
    CHECK(d0.weights[0] == 1.0);

    AtomicMeasure2D d1 = atomic_approx(s, 1);
    REQUIRE(d1.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(d1.points[i] - s.translations[i]) < 1e-14);
        CHECK(d1.weights[i] == doctest::Approx(0.25));
    }

    // SYS-B word (0,0): f_00(b) = a_0 + lambda a_0 + lambda^2 b, weight 0.16.
    IfsSystem b = sys_b();
    AtomicMeasure2D d2 = atomic_approx(b, 2);
    REQUIRE(d2.size() == 16);
    cplx expected = cplx{1, 1} + b.lambda * cplx{1, 1} + b.lambda * b.lambda * b.barycenter;
    CHECK(std::abs(d2.points[0] - expected) < 1e-14);
    CHECK(d2.weights[0] == doctest::Approx(0.16).epsilon(1e-12));
}

TEST_CASE("atomic refinement identity is exact") {
    IfsSystem s = sys_b();
    for (int depth = 0; depth <= 5; ++depth) {
        AtomicMeasure2D coarse = atomic_approx(s, depth);
        AtomicMeasure2D fine = atomic_approx(s, depth + 1);
        std::size_t block = coarse.size();
        for (std::size_t i1 = 0; i1 < 4; ++i1) {
            for (std::size_t j = 0; j < block; ++j) {
                CHECK(fine.points[i1 * block + j] ==
                      s.lambda * coarse.points[j] + s.translations[i1]);
                CHECK(fine.weights[i1 * block + j] == s.probs[i1] * coarse.weights[j]);
            }
        }
    }
}

TEST_CASE("atoms stay in the invariant disk and words invert") {
    IfsSystem s = sys_b();
    AtomicMeasure2D m = atomic_approx(s, 5);
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(std::abs(m.points[i] - s.invariant_disk.center) <=
              s.invariant_disk.radius + 1e-12);
    }
    // word_of reproduces the construction through cylinder_map.
    for (std::size_t idx : {std::size_t{0}, std::size_t{137}, std::size_t{555}, m.size() - 1}) {
        Word w = m.word_of(idx, s.map_count());
        CylinderMap cm = cylinder_map(s, w);
        CHECK(std::abs(cm.apply(s.barycenter) - m.points[idx]) < 1e-12);
        CHECK(cm.weight == doctest::Approx(m.weights[idx]).epsilon(1e-12));
    }
}

TEST_CASE("atomic weights stay normalized at depth") {
    IfsSystem s = sys_b();
    AtomicMeasure2D m = atomic_approx(s, 10);  // 4^10 atoms
    KahanSum total;
    for (double w : m.weights) total.add(w);
    CHECK(std::abs(total.value() - 1.0) < 1e-9);

    CHECK_THROWS_AS(atomic_approx(s, 11), Error);  // 4^11 > default budget
}

TEST_CASE("sample_measure is deterministic and unbiased") {
    IfsSystem s = sys_a();

    SampleSet one = sample_measure(s, 1, 1, 99);
    bool hit = false;
    for (cplx a : s.translations)
        if (std::abs(one.points[0] - (s.lambda * s.barycenter + a)) < 1e-14) hit = true;
    CHECK(hit);

    SampleSet x = sample_measure(s, 20000, 30, 42);
    SampleSet y = sample_measure(s, 20000, 30, 42);
    CHECK(x.points == y.points);
    SampleSet z = sample_measure(s, 20000, 30, 43);
    CHECK(x.points != z.points);

    // CLT bound: empirical mean within 3 sigma of the barycenter.
    SampleSet big = sample_measure(s, 100000, 30, 42);
    cplx mean{0, 0};
    for (cplx p : big.points) mean += p;
    mean /= static_cast<double>(big.points.size());
    double var = 0.0;
    for (cplx p : big.points) var += std::norm(p - mean);
    var /= static_cast<double>(big.points.size());
    CHECK(std::abs(mean - s.barycenter) <= 3.0 * std::sqrt(var / big.points.size()));
}

TEST_CASE("default word length reaches the 1e-9 residual") {
    IfsSystem s = sys_a();
    int L = default_word_length(s);
    CHECK(std::pow(s.r, L) < 1e-9);
    CHECK(std::pow(s.r, L - 1) >= 1e-9);
}

TEST_CASE("convolution_split structure") {
    IfsSystem s = sys_a();
    ConvolutionSplit split = convolution_split(s, 2);
    CHECK(split.conjugated);  // SYS-A has no zero translation
    REQUIRE(split.mu.map_count() == 4);
    CHECK(std::abs(split.mu.lambda - s.lambda * s.lambda) < 1e-14);
    CHECK(std::abs(split.nu_k.lambda - s.lambda * s.lambda) < 1e-14);
    // Conjugated translations a'_i = a_i - a_0; mu offsets are lambda a'_i.
    for (int i = 0; i < 4; ++i) {
        cplx shifted = s.translations[i] - s.translations[0];
        CHECK(std::abs(split.mu.translations[i] - s.lambda * shifted) < 1e-14);
        CHECK(std::abs(split.nu_k.translations[i] - shifted) < 1e-14);
        CHECK(split.mu.probs[i] == doctest::Approx(s.probs[i]));
    }

    IfsSystem with_zero = validate_system(s.lambda, {{0, 0}, {1, 0}, {0, 1}},
                                          {0.5, 0.25, 0.25});
    ConvolutionSplit plain = convolution_split(with_zero, 3);
    CHECK_FALSE(plain.conjugated);
    CHECK(plain.mu.map_count() == 9);

    CHECK_THROWS_AS(convolution_split(s, 2, false), Error);
    CHECK_THROWS_AS(convolution_split(s, 1), Error);
}

namespace {

// 2-D histogram total-variation distance on a fixed grid.
double tv_distance(const std::vector<cplx>& xs, const std::vector<double>& xw,
                   const std::vector<cplx>& ys, const std::vector<double>& yw, cplx anchor,
                   double delta) {
    std::map<std::pair<long long, long long>, double> bins;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto kx = static_cast<long long>(std::floor((xs[i].real() - anchor.real()) / delta));
        auto ky = static_cast<long long>(std::floor((xs[i].imag() - anchor.imag()) / delta));
        bins[{kx, ky}] += xw[i];
    }
    for (std::size_t i = 0; i < ys.size(); ++i) {
        auto kx = static_cast<long long>(std::floor((ys[i].real() - anchor.real()) / delta));
        auto ky = static_cast<long long>(std::floor((ys[i].imag() - anchor.imag()) / delta));
        bins[{kx, ky}] -= yw[i];
    }
    double tv = 0.0;
    for (const auto& [key, v] : bins) tv += std::abs(v);
    return 0.5 * tv;
}

}  // namespace

TEST_CASE("convolution of the split factors reproduces the measure") {
    IfsSystem s = sys_a();
    for (int k : {2, 3}) {
        ConvolutionSplit split = convolution_split(s, k);
        // Conjugated original: translations a_i - a_0.
        std::vector<cplx> shifted;
        for (cplx a : s.translations) shifted.push_back(a - s.translations[0]);
        IfsSystem conj = validate_system(s.lambda, shifted, s.probs);

        AtomicMeasure2D direct = atomic_approx(conj, k);  // depth k*1
        AtomicMeasure2D mu_atoms = atomic_approx(split.mu, 1);
        AtomicMeasure2D nuk_atoms = atomic_approx(split.nu_k, 1);

        // Exact atomic convolution: all pairwise sums.
        std::vector<cplx> conv_pts;
        std::vector<double> conv_wts;
        for (std::size_t i = 0; i < mu_atoms.size(); ++i) {
            for (std::size_t j = 0; j < nuk_atoms.size(); ++j) {
                conv_pts.push_back(mu_atoms.points[i] + nuk_atoms.points[j]);
                conv_wts.push_back(mu_atoms.weights[i] * nuk_atoms.weights[j]);
            }
        }
        REQUIRE(conv_pts.size() == direct.size());
        cplx anchor = conj.invariant_disk.center -
                      cplx{conj.invariant_disk.radius, conj.invariant_disk.radius};
        double tv = tv_distance(conv_pts, conv_wts, direct.points, direct.weights, anchor, 0.25);
        CHECK(tv < 1e-9);
    }
}

TEST_CASE("empirical_dq trivial and error cases") {
    std::vector<cplx> point = {cplx{0.3, 0.4}};
    std::vector<double> weight = {1.0};
    DqEstimate est = empirical_dq(point, weight, 2.0, 0.01, 0.5, 6, cplx{-1, -1});
    CHECK(est.value == doctest::Approx(0.0));

    CHECK_THROWS_AS(empirical_dq(point, weight, 0.9, 0.01, 0.5, 6, cplx{-1, -1}), Error);
    CHECK_THROWS_AS(empirical_dq(point, weight, 2.0, 0.5, 0.01, 6, cplx{-1, -1}), Error);
    CHECK_THROWS_AS(empirical_dq({}, {}, 2.0, 0.01, 0.5, 6, cplx{-1, -1}), Error);
}

TEST_CASE("empirical_dq recovers the closed-form dimension") {
    IfsSystem a = sys_a();
    double dmin = std::pow(0.35, 8), dmax = std::pow(0.35, 2);

    SampleSet samples = sample_measure(a, 100000, 30, 42);
    DqEstimate box = empirical_dq(a, samples, 2.0, dmin, dmax, 7);
    CHECK(std::abs(box.value - 1.3205040442273864) < 0.1);

    DqEstimate gp = correlation_dim_gp(samples.points, dmin, dmax, 7);
    CHECK(std::abs(gp.value - 1.3205040442273864) < 0.1);
    CHECK(std::abs(box.value - gp.value) <= box.ci + gp.ci);

    IfsSystem b = sys_b();
    SampleSet samples_b = sample_measure(b, 100000, 30, 42);
    DqEstimate box_b = empirical_dq(b, samples_b, 2.0, dmin, dmax, 7);
    CHECK(std::abs(box_b.value - 1.1468350458901502) < 0.1);
}

TEST_CASE("empirical_dq invariances") {
    IfsSystem a = sys_a();
    SampleSet samples = sample_measure(a, 50000, 25, 7);
    double dmin = std::pow(0.35, 7), dmax = std::pow(0.35, 2);
    DqEstimate base = empirical_dq(a, samples, 2.0, dmin, dmax, 6);

    std::vector<cplx> shuffled = samples.points;
    std::mt19937_64 rng(123);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    cplx anchor = a.invariant_disk.center -
                  cplx{a.invariant_disk.radius, a.invariant_disk.radius};
    DqEstimate resh = empirical_dq(shuffled, {}, 2.0, dmin, dmax, 6, anchor);
    CHECK(std::abs(resh.value - base.value) <= base.ci + resh.ci + 1e-9);

    cplx rot = std::polar(1.0, 0.37);
    std::vector<cplx> rotated;
    for (cplx p : samples.points) rotated.push_back(rot * p);
    DqEstimate rotest = empirical_dq(rotated, {}, 2.0, dmin, dmax, 6, anchor);
    CHECK(std::abs(rotest.value - base.value) <= base.ci + rotest.ci + 0.05);
}

TEST_SUITE_END();
