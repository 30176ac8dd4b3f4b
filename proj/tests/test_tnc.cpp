#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "xmrsa/tnc.hpp"

using namespace xmrsa;
using testutil::random_mat;

TEST_CASE("tnc arithmetic on hand cases") {
    CHECK(tnc_from_rhos(1, 1, 1) == 1.0);
    CHECK(tnc_from_rhos(0, 0, 0) == 0.0);
    CHECK(tnc_from_rhos(0.6, 0.3, 0.9) == doctest::Approx(0.42).epsilon(1e-15));
    CHECK_THROWS_AS(tnc_from_rhos(1.5, 0, 0), OutOfRange);
}

TEST_CASE("frobenius route agrees to machine precision") {
    CHECK(tnc_frobenius_check(0.6, 0.3, 0.9) ==
          doctest::Approx(0.42).epsilon(1e-15));
    CHECK(tnc_frobenius_check(0, 0, 0) == 0.0);
    CHECK(tnc_frobenius_check(-1, -1, -1) == doctest::Approx(1.0).epsilon(1e-15));

    CounterRng rng(1, {1});
    for (int i = 0; i < 10000; ++i) {
        const double r1 = rng.next_double() * 2.0 - 1.0;
        const double r2 = rng.next_double() * 2.0 - 1.0;
        const double r3 = rng.next_double() * 2.0 - 1.0;
        CHECK(std::abs(tnc_from_rhos(r1, r2, r3) -
                       tnc_frobenius_check(r1, r2, r3)) < 1e-12);
    }
}

TEST_CASE("tnc range and exact sign invariance") {
    CounterRng rng(2, {2});
    for (int i = 0; i < 10000; ++i) {
        const double r1 = rng.next_double() * 2.0 - 1.0;
        const double r2 = rng.next_double() * 2.0 - 1.0;
        const double r3 = rng.next_double() * 2.0 - 1.0;
        const double t = tnc_from_rhos(r1, r2, r3);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
        CHECK(t == tnc_from_rhos(-r1, r2, r3));
        CHECK(t == tnc_from_rhos(r1, -r2, r3));
        CHECK(t == tnc_from_rhos(r1, r2, -r3));
    }
}

TEST_CASE("near-1 tnc forces every pairwise rho near 1") {
    CounterRng rng(3, {3});
    for (const double delta : {0.01, 0.05}) {
        // samples concentrated within 3*delta of |rho| = 1 probe both
        // sides of the acceptance bar
        const double scale = 3.0 * delta;
        int accepted = 0;
        for (int i = 0; i < 20000; ++i) {
            const double r1 = (rng.next_below(2) ? 1 : -1) *
                              (1.0 - scale * rng.next_double());
            const double r2 = (rng.next_below(2) ? 1 : -1) *
                              (1.0 - scale * rng.next_double());
            const double r3 = (rng.next_below(2) ? 1 : -1) *
                              (1.0 - scale * rng.next_double());
            if (tnc_from_rhos(r1, r2, r3) < 1.0 - delta) continue;
            ++accepted;
            CHECK(r1 * r1 >= 1.0 - 3.0 * delta);
            CHECK(r2 * r2 >= 1.0 - 3.0 * delta);
            CHECK(r3 * r3 >= 1.0 - 3.0 * delta);
        }
        CHECK(accepted > 100);
    }
}

TEST_CASE("identical matrices give tnc 1") {
    CounterRng rng(4, {4});
    const Mat m = random_mat(25, 5, rng);
    const TriModalResult r = tnc_sentence(m, m, m);
    CHECK(r.complete);
    CHECK(r.rho_ac_eeg == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.rho_eeg_llm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.rho_ac_llm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.tnc == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("independent noise gives tnc near 0") {
    int below = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        CounterRng rng(s, {5});
        const Mat ac = random_mat(100, 4, rng);
        const Mat eeg = random_mat(100, 4, rng);
        const Mat llm = random_mat(100, 4, rng);
        if (tnc_sentence(ac, eeg, llm).tnc < 0.05) ++below;
    }
    CHECK(below >= 19);
}

TEST_CASE("one perfect pair among noise lands near one third") {
    double sum = 0.0;
    constexpr int reps = 10;
    for (std::uint64_t s = 0; s < reps; ++s) {
        CounterRng rng(s, {6});
        const Mat ac = random_mat(100, 4, rng);
        const Mat llm = random_mat(100, 4, rng);
        sum += tnc_sentence(ac, ac, llm).tnc;  // eeg = ac
    }
    CHECK(sum / reps == doctest::Approx(1.0 / 3.0).epsilon(0.15));
    CHECK(std::abs(sum / reps - 1.0 / 3.0) < 0.05);
}

TEST_CASE("failed pair marks the result incomplete") {
    CounterRng rng(7, {7});
    const Mat ok = random_mat(10, 3, rng);
    const Mat flat(10, 3, 1.0);  // constant rows -> constant RDM vector
    Warnings w;
    const TriModalResult r = tnc_sentence(flat, ok, ok);
    CHECK(!r.complete);
    CHECK(std::isnan(r.tnc));
    CHECK(std::isnan(r.rho_ac_eeg));
    CHECK(r.rho_eeg_llm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("row mismatch is rejected") {
    CounterRng rng(8, {8});
    CHECK_THROWS_AS(tnc_sentence(random_mat(9, 3, rng), random_mat(10, 3, rng),
                                 random_mat(10, 3, rng)),
                    ShapeMismatch);
}
