#include <cmath>
#include <numbers>

#include "doctest.h"
#include "selfsim/ifs.hpp"
#include "test_helpers.hpp"

using namespace selfsim;
using selfsim::testing::sys_a;
using selfsim::testing::sys_b;

TEST_SUITE_BEGIN("ifs");

TEST_CASE("validate_system splits modulus and rotation") {
    IfsSystem s = sys_a();
    CHECK(s.r == doctest::Approx(0.35).epsilon(1e-14));
    CHECK(std::abs(s.alpha - std::polar(1.0, 1.0)) < 1e-14);
    CHECK(std::abs(s.lambda - s.r * s.alpha) < 1e-12);
    CHECK(std::abs(s.barycenter) < 1e-14);  // symmetric translations
    CHECK(std::abs(s.invariant_disk.center) < 1e-14);
    CHECK(s.invariant_disk.radius == doctest::Approx(std::sqrt(2.0) / 0.65).epsilon(1e-12));
}

TEST_CASE("validate_system rejects bad input") {
    std::vector<cplx> a = {{1, 1}, {1, -1}};
    CHECK_THROWS_AS(validate_system(cplx{1.1, 0}, a, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(validate_system(cplx{0, 0}, a, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(validate_system(cplx{0.5, 0}, a, {0.5, 0.6}), Error);
    CHECK_THROWS_AS(validate_system(cplx{0.5, 0}, a, {-0.5, 1.5}), Error);
    CHECK_THROWS_AS(validate_system(cplx{0.5, 0}, {{1, 1}, {1, 1}}, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(validate_system(cplx{0.5, 0}, {{1, 1}}, {1.0}), Error);

    try {
        validate_system(cplx{1.1, 0}, a, {0.5, 0.5});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::modulus_out_of_range);
    }
    try {
        validate_system(cplx{0.5, 0}, a, {0.5, 0.6});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::bad_probability_vector);
    }
}

TEST_CASE("smallest enclosing disk") {
    std::vector<cplx> square = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    Disk d = smallest_enclosing_disk(square);
    CHECK(std::abs(d.center) < 1e-12);
    CHECK(d.radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    std::vector<cplx> pair = {{0, 0}, {2, 0}};
    d = smallest_enclosing_disk(pair);
    CHECK(std::abs(d.center - cplx{1, 0}) < 1e-12);
    CHECK(d.radius == doctest::Approx(1.0).epsilon(1e-12));

    // Obtuse triangle: the two far points determine the disk.
    std::vector<cplx> obtuse = {{0, 0}, {2, 0}, {1, 0.1}};
    d = smallest_enclosing_disk(obtuse);
    CHECK(std::abs(d.center - cplx{1, 0}) < 1e-12);
    CHECK(d.radius == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cylinder_map basics") {
    IfsSystem s = sys_a();

    CylinderMap id = cylinder_map(s, {});
    CHECK(id.scale == cplx{1, 0});
    CHECK(id.offset == cplx{0, 0});
    CHECK(id.weight == 1.0);

    CylinderMap one = cylinder_map(s, {0});
    CHECK(std::abs(one.scale - s.lambda) < 1e-15);
    CHECK(std::abs(one.offset - cplx{1, 1}) < 1e-15);
    CHECK(one.weight == doctest::Approx(0.25));

    // Hand expansion of f_0(f_1(w)) = lambda^2 w + a_0 + lambda a_1.
    CylinderMap two = cylinder_map(s, {0, 1});
    CHECK(std::abs(two.offset - (cplx{1, 1} + s.lambda * cplx{1, -1})) < 1e-15);
    CHECK(std::abs(two.scale - s.lambda * s.lambda) < 1e-15);
    CHECK(two.weight == doctest::Approx(0.0625));

    CHECK_THROWS_AS(cylinder_map(s, {0, 7}), Error);
}

TEST_CASE("cylinder_map composes along concatenation") {
    // Exhaustive over a 2-map system for |w1| + |w2| <= 8.
    IfsSystem s = validate_system(std::polar(0.45, 0.8), {{0, 0}, {1, 0.5}}, {0.6, 0.4});
    auto words_of_length = [](int len) {
        std::vector<Word> out;
        for (int bits = 0; bits < (1 << len); ++bits) {
            Word w(len);
            for (int j = 0; j < len; ++j) w[j] = (bits >> j) & 1;
            out.push_back(w);
        }
        return out;
    };
    for (int l1 = 0; l1 <= 4; ++l1) {
        for (int l2 = 0; l2 <= 4; ++l2) {
            for (const Word& w1 : words_of_length(l1)) {
                for (const Word& w2 : words_of_length(l2)) {
                    Word cat = w1;
                    cat.insert(cat.end(), w2.begin(), w2.end());
                    CylinderMap c1 = cylinder_map(s, w1);
                    CylinderMap c2 = cylinder_map(s, w2);
                    CylinderMap cc = cylinder_map(s, cat);
                    CHECK(std::abs(cc.scale - c1.scale * c2.scale) < 1e-12);
                    CHECK(std::abs(cc.offset - (c1.offset + c1.scale * c2.offset)) < 1e-12);
                    CHECK(cc.weight == doctest::Approx(c1.weight * c2.weight).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("check_ssc proves the reference system at depth 1") {
    SscVerdict v = check_ssc(sys_a(), 1);
    CHECK(v.status == SscStatus::proven);
    CHECK(v.depth_used == 1);
    // Disk arithmetic oracle: centers 2 apart, image radius 0.35 * sqrt(2)/0.65.
    CHECK(v.min_gap == doctest::Approx(2.0 - 2.0 * 0.35 * std::sqrt(2.0) / 0.65).epsilon(1e-12));
    CHECK(v.min_gap > 0.0);
}

TEST_CASE("check_ssc detects overlap and refuses to guess") {
    // Heavily overlapping pair: disks never separate, no exact witness.
    IfsSystem overlapping = validate_system(cplx{0.9, 0}, {{0, 0}, {0.1, 0}}, {0.5, 0.5});
    SscVerdict v = check_ssc(overlapping, 6);
    CHECK(v.status != SscStatus::proven);

    // Exact coincidence witness: f_{02} = f_{10} for lambda = 1/2, a = (0,1,2).
    IfsSystem coincident =
        validate_system(cplx{0.5, 0}, {{0, 0}, {1, 0}, {2, 0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    v = check_ssc(coincident, 4);
    CHECK(v.status == SscStatus::refuted);

    // Duplicate translations refute at depth 1.
    IfsSystem duplicate =
        validate_system(cplx{0.4, 0}, {{0, 0}, {1, 0}, {1, 0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    v = check_ssc(duplicate, 3);
    CHECK(v.status == SscStatus::refuted);
}

TEST_CASE("ssc min_gap shrinks under depth refinement") {
    IfsSystem s = sys_a();
    double prev = check_ssc(s, 1).min_gap;
    // Rerunning with a larger budget must never loosen the reported gap.
    for (int depth = 2; depth <= 4; ++depth) {
        double gap = check_ssc(s, depth).min_gap;
        CHECK(gap <= prev + 1e-12);
        prev = gap;
    }
}

TEST_CASE("closed_form_dims matches the closed forms") {
    DimReport a = closed_form_dims(sys_a(), 2.0);
    CHECK(a.dq == doctest::Approx(1.3205040442273864).epsilon(1e-12));
    CHECK(a.dim_measure == doctest::Approx(1.3205040442273864).epsilon(1e-12));
    CHECK(a.dim_set == doctest::Approx(1.3205040442273864).epsilon(1e-12));

    DimReport b = closed_form_dims(sys_b(), 2.0);
    CHECK(b.dq == doctest::Approx(1.1468350458901502).epsilon(1e-12));
    CHECK(b.dim_measure == doctest::Approx(1.2191153110293205).epsilon(1e-12));
    CHECK(b.dim_set == doctest::Approx(1.3205040442273864).epsilon(1e-12));

    CHECK_THROWS_AS(closed_form_dims(sys_a(), 1.0), Error);
    CHECK_THROWS_AS(closed_form_dims(sys_a(), 0.5), Error);
}

TEST_CASE("D_q is monotone and bounded by the measure dimension") {
    IfsSystem s = sys_b();
    double qs[] = {1.1, 1.5, 2.0, 3.0, 5.0};
    double prev = 1e9;
    for (double q : qs) {
        DimReport rep = closed_form_dims(s, q);
        CHECK(rep.dq <= prev + 1e-12);
        CHECK(rep.dq <= rep.dim_measure + 1e-12);
        CHECK(rep.dim_measure <= rep.dim_set + 1e-12);
        prev = rep.dq;
    }
    // q -> 1+ limit reaches the entropy dimension.
    CHECK(std::abs(closed_form_dims(s, 1.001).dq - 1.2191153110293205) < 1e-3);

    // Uniform weights collapse all three dimensions for every q.
    for (double q : qs) {
        DimReport rep = closed_form_dims(sys_a(), q);
        CHECK(rep.dq == doctest::Approx(rep.dim_set).epsilon(1e-12));
        CHECK(rep.dim_measure == doctest::Approx(rep.dim_set).epsilon(1e-12));
    }
}

TEST_CASE("irrational rotation heuristic") {
    // arg lambda = 1 rad: theta = 1/pi, no convergent with q <= 1e6 matches.
    RotationCheck rc = check_irrational_rotation(sys_a(), 1000000);
    CHECK_FALSE(rc.rational);

    IfsSystem third = validate_system(std::polar(0.5, std::numbers::pi / 3.0),
                                      {{0, 0}, {1, 0}}, {0.5, 0.5});
    rc = check_irrational_rotation(third, 1000);
    CHECK(rc.rational);
    CHECK(rc.p == 1);
    CHECK(rc.q == 3);

    IfsSystem real_pos = validate_system(cplx{0.5, 0}, {{0, 0}, {1, 0}}, {0.5, 0.5});
    rc = check_irrational_rotation(real_pos, 10);
    CHECK(rc.rational);
    CHECK(rc.p == 0);
    CHECK(rc.q == 1);

    IfsSystem real_neg = validate_system(cplx{-0.5, 0}, {{0, 0}, {1, 0}}, {0.5, 0.5});
    rc = check_irrational_rotation(real_neg, 10);
    CHECK(rc.rational);
    CHECK(rc.p == 1);
    CHECK(rc.q == 1);

    IfsSystem neg_third = validate_system(std::polar(0.5, -std::numbers::pi / 3.0),
                                          {{0, 0}, {1, 0}}, {0.5, 0.5});
    rc = check_irrational_rotation(neg_third, 1000);
    CHECK(rc.rational);
    CHECK(rc.p == -1);
    CHECK(rc.q == 3);
}

TEST_SUITE_END();
