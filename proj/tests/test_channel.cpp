#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "ehdet/channel.hpp"
#include "test_helpers.hpp"

using namespace ehdet;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("interval probabilities for a binary quantizer") {
    const auto probs = interval_probs({0.0, 1.0, kInf}, 2.0);
    REQUIRE(probs.size() == 2);
    CHECK(probs[0] == doctest::Approx(0.3935).epsilon(2e-4));
    CHECK(probs[1] == doctest::Approx(0.6065).epsilon(2e-4));
    CHECK(probs[0] + probs[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interval probabilities telescope to one") {
    ehdet_test::TestRand rand(8);
    for (int i = 0; i < 30; ++i) {
        std::vector<double> thresholds{0.0};
        double mu = 0.0;
        const int m = rand.uniform_int(1, 5);
        for (int l = 0; l + 1 < m; ++l) {
            mu += rand.uniform(0.1, 1.5);
            thresholds.push_back(mu);
        }
        thresholds.push_back(kInf);
        const auto probs = interval_probs(thresholds, rand.uniform(0.5, 4.0));
        CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("nearly equal thresholds give a vanishing interval") {
    const auto probs = interval_probs({0.0, 1.0, 1.0 + 1e-14, kInf}, 2.0);
    CHECK(probs[1] < 1e-12);
    CHECK_THROWS_AS(interval_probs({0.0, 1.0, 1.0, kInf}, 2.0), ConfigError);
}

TEST_CASE("thresholds_from_probs inverts interval_probs") {
    const auto thr = thresholds_from_probs({0.3935, 0.6065}, 2.0);
    REQUIRE(thr.size() == 3);
    CHECK(thr[1] == doctest::Approx(1.0).epsilon(1e-3));

    const auto degenerate = thresholds_from_probs({1.0}, 2.0);
    CHECK(degenerate.size() == 2);  // only 0 and +inf

    ehdet_test::TestRand rand(9);
    for (int i = 0; i < 30; ++i) {
        const int m = rand.uniform_int(2, 4);
        std::vector<double> probs(m);
        double sum = 0.0;
        for (int l = 0; l < m; ++l) {
            probs[l] = rand.uniform(0.05, 1.0);
            sum += probs[l];
        }
        for (double& p : probs) {
            p /= sum;
        }
        const double gamma = rand.uniform(0.5, 4.0);
        const auto t = thresholds_from_probs(probs, gamma);
        const auto back = interval_probs(t, gamma);
        for (int l = 0; l < m; ++l) {
            CHECK(back[l] == doctest::Approx(probs[l]).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(thresholds_from_probs({0.5, 0.0, 0.5}, 2.0), ConfigError);
}

TEST_CASE("quantize_gain boundary convention") {
    const std::vector<double> thr{0.0, 1.0, kInf};
    CHECK(quantize_gain(0.5, thr) == 1);
    CHECK(quantize_gain(1.0, thr) == 2);  // boundary goes up
    CHECK(quantize_gain(7.0, thr) == 2);
}

TEST_CASE("gain sampling is reproducible and has the right second moment") {
    RngStream a(123, 5, 2, Draw::gain);
    RngStream b(123, 5, 2, Draw::gain);
    for (int i = 0; i < 10; ++i) {
        CHECK(sample_gain(2.0, a) == sample_gain(2.0, b));
    }

    const long n = 1'000'000;
    RngStream stream(99, 0, 0, Draw::gain);
    double sum_sq = 0.0;
    std::vector<long> counts(2, 0);
    const std::vector<double> thr{0.0, 1.0, kInf};
    for (long i = 0; i < n; ++i) {
        const double g = sample_gain(2.0, stream);
        sum_sq += g * g;
        counts[quantize_gain(g, thr) - 1] += 1;
    }
    // exponential mean estimate: sd = mean, so se = 2/sqrt(n)
    CHECK(std::abs(sum_sq / n - 2.0) < 3.0 * 2.0 / std::sqrt(static_cast<double>(n)));

    const auto probs = interval_probs(thr, 2.0);
    double tv = 0.0;
    for (int l = 0; l < 2; ++l) {
        tv += std::abs(static_cast<double>(counts[l]) / n - probs[l]);
    }
    CHECK(tv / 2.0 < 0.005);
}
