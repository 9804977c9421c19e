#include <doctest.h>

#include <cmath>
#include <limits>

#include "ehdet/channel.hpp"
#include "ehdet/divergence.hpp"
#include "test_helpers.hpp"

using namespace ehdet;

namespace {

BatteryChain chain_with_steady(std::vector<double> steady) {
    BatteryChain chain;
    chain.steady = Eigen::Map<Eigen::VectorXd>(steady.data(), steady.size());
    chain.mean_energy = mean_battery(chain.steady);
    return chain;
}

SensorModel model_with(double gamma, double ch_var) {
    SensorModel m;
    m.signal_amplitude = 1.0;
    m.obs_noise_var = 1.0;
    m.ch_noise_var = ch_var;
    m.mean_sq_gain = gamma;
    return m;
}

}  // namespace

TEST_CASE("moment matching") {
    const auto det = moment_match(1.0, 1.0, ehdet_test::op_from_rates(0.0, 1.0), 1.0);
    CHECK(det.mean0 == 0.0);
    CHECK(det.mean1 == 1.0);
    CHECK(det.var0 == 1.0);
    CHECK(det.var1 == 1.0);

    const auto silent = moment_match(1.7, 0.0, ehdet_test::op_from_rates(0.2, 0.8), 1.0);
    CHECK(silent.mean0 == 0.0);
    CHECK(silent.mean1 == 0.0);
    CHECK(silent.var0 == 1.0);
    CHECK(silent.var1 == 1.0);

    const auto mixed = moment_match(1.0, 1.0, ehdet_test::op_from_rates(0.1, 0.9), 1.0);
    CHECK(mixed.mean0 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(mixed.mean1 == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(mixed.var0 == doctest::Approx(1.09).epsilon(1e-14));
    CHECK(mixed.var1 == doctest::Approx(1.09).epsilon(1e-14));

    // unit_energy scales the amplitude as sqrt(units * unit_energy)
    const auto scaled = moment_match(1.0, 2.0, ehdet_test::op_from_rates(0.0, 1.0), 1.0, 2.0);
    CHECK(scaled.mean1 == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gaussian divergence closed form") {
    CHECK(jdiv_gaussian({0.0, 1.0, 0.0, 1.0}) == 2.0);
    CHECK(jdiv_gaussian({0.0, 1.0, 1.0, 1.0}) == 4.0);
    CHECK(jdiv_gaussian({0.0, 1.0, 0.0, 2.0}) == 2.5);
}

TEST_CASE("per-sensor divergence") {
    const auto op = ehdet_test::op_from_rates(0.1, 0.9);
    CHECK(j_n(0.0, op, 1.0) == 2.0);
    CHECK(j_n(5.0, ehdet_test::op_from_rates(0.3, 0.3), 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(j_n(1.0, op, 1.0) == doctest::Approx(3.1743).epsilon(1e-4));

    const auto k = jn_coefficients(op);
    CHECK(k.a == doctest::Approx(0.73).epsilon(1e-12));
    CHECK(k.c == doctest::Approx(0.73).epsilon(1e-12));
    CHECK(k.b == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(k.d == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("divergence routes agree") {
    ehdet_test::TestRand rand(14);
    for (int i = 0; i < 100; ++i) {
        const double pf = rand.uniform(0.0, 1.0);
        const double pd = rand.uniform(0.0, 1.0);
        const double g = rand.uniform(0.0, 3.0);
        const double units = rand.uniform_int(0, 5);
        const double ch_var = rand.uniform(0.3, 3.0);
        const auto op = ehdet_test::op_from_rates(pf, pd);
        const double via_moments = jdiv_gaussian(moment_match(g, units, op, ch_var));
        const double via_rational = j_n(g * g * units, op, ch_var);
        CHECK(via_rational == doctest::Approx(via_moments).epsilon(1e-12));
        CHECK(via_rational >= 2.0 - 1e-12);
    }
}

TEST_CASE("divergence is monotone in signal energy when pd > pf") {
    const auto op = ehdet_test::op_from_rates(0.15, 0.75);
    double prev = 0.0;
    for (double x = 0.0; x <= 20.0; x += 0.5) {
        const double j = j_n(x, op, 1.0);
        CHECK(j >= prev - 1e-12);
        prev = j;
    }
}

TEST_CASE("conditional divergence: silent policy gives the baseline mass") {
    PowerPolicy policy;
    policy.capacity = 1;
    policy.coeffs = {0.3, 0.6};  // floor(c*1) = 0 for both intervals
    const auto model = model_with(2.0, 1.0);
    const auto quant = make_quantizer_from_finite({1.0}, 2.0);
    const auto chain = chain_with_steady({0.25, 0.75});
    const auto op = ehdet_test::op_from_rates(0.1, 0.9);
    for (int i = 1; i <= 2; ++i) {
        CHECK(conditional_j(i, chain, policy, quant, op, model) ==
              doctest::Approx(2.0 * quant.probs[i - 1]).epsilon(1e-12));
        CHECK(quadrature_conditional_j(i, chain, policy, quant, op, model) ==
              doctest::Approx(2.0 * quant.probs[i - 1]).epsilon(1e-9));
    }
}

TEST_CASE("single interval covering the line equals the unconditional mean") {
    PowerPolicy policy;
    policy.capacity = 2;
    policy.coeffs = {1.0};
    const auto model = model_with(2.0, 1.0);
    const auto quant = make_quantizer_from_finite({}, 2.0);
    const auto chain = chain_with_steady({0.2, 0.3, 0.5});
    const auto op = ehdet_test::op_from_rates(0.1, 0.8);
    const double closed = conditional_j(1, chain, policy, quant, op, model);
    const double quad = quadrature_conditional_j(1, chain, policy, quant, op, model);
    CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("worked closed-form vs quadrature example") {
    PowerPolicy policy;
    policy.capacity = 2;
    policy.coeffs = {0.5, 1.0};
    const auto model = model_with(2.0, 1.0);
    const auto quant = make_quantizer_from_finite({1.0}, 2.0);
    const auto chain = chain_with_steady({0.3, 0.4, 0.3});
    const auto op = ehdet_test::op_from_rates(0.1, 0.9);
    for (int i = 1; i <= 2; ++i) {
        const double closed = conditional_j(i, chain, policy, quant, op, model);
        const double quad = quadrature_conditional_j(i, chain, policy, quant, op, model);
        CHECK(std::abs(closed - quad) <= 1e-6 * std::abs(quad));
    }
}

TEST_CASE("closed form tracks quadrature across random parameters") {
    ehdet_test::TestRand rand(15);
    for (int it = 0; it < 25; ++it) {
        PowerPolicy policy;
        policy.capacity = rand.uniform_int(1, 6);
        const int m = rand.uniform_int(1, 3);
        policy.coeffs.clear();
        double c = 0.0;
        for (int l = 0; l < m; ++l) {
            c += rand.uniform(0.1, 0.9 / m);
            policy.coeffs.push_back(c);
        }
        policy.unit_energy = rand.uniform(0.5, 2.0);
        const auto model = model_with(rand.uniform(0.5, 4.0), rand.uniform(0.3, 3.0));
        std::vector<double> finite;
        double mu = 0.0;
        for (int l = 0; l + 1 < m; ++l) {
            mu += rand.uniform(0.3, 1.5);
            finite.push_back(mu);
        }
        const auto quant = make_quantizer_from_finite(finite, model.mean_sq_gain);
        std::vector<double> steady(policy.capacity + 1);
        double sum = 0.0;
        for (double& s : steady) {
            s = rand.uniform(0.01, 1.0);
            sum += s;
        }
        for (double& s : steady) {
            s /= sum;
        }
        const auto chain = chain_with_steady(steady);
        const double pf = rand.uniform(0.02, 0.6);
        const auto op = ehdet_test::op_from_rates(pf, rand.uniform(pf + 0.05, 0.98));

        for (int i = 1; i <= m; ++i) {
            const double closed = conditional_j(i, chain, policy, quant, op, model);
            const double quad = quadrature_conditional_j(i, chain, policy, quant, op, model);
            CHECK(std::abs(closed - quad) <= 1e-6 * std::max(std::abs(quad), 1e-12));
        }
    }
}

TEST_CASE("partition refinement preserves the total") {
    PowerPolicy coarse_policy;
    coarse_policy.capacity = 3;
    coarse_policy.coeffs = {0.7};
    PowerPolicy fine_policy = coarse_policy;
    fine_policy.coeffs = {0.7, 0.7 + 1e-9, 0.7 + 2e-9};  // same spend on each piece

    const auto model = model_with(2.0, 1.0);
    const auto chain = chain_with_steady({0.1, 0.2, 0.3, 0.4});
    const auto op = ehdet_test::op_from_rates(0.2, 0.85);

    const auto one = make_quantizer_from_finite({}, 2.0);
    const double total_one = conditional_j(1, chain, coarse_policy, one, op, model);

    const auto three = make_quantizer_from_finite({0.8, 1.7}, 2.0);
    double total_three = 0.0;
    for (int i = 1; i <= 3; ++i) {
        total_three += conditional_j(i, chain, fine_policy, three, op, model);
    }
    CHECK(total_three == doctest::Approx(total_one).epsilon(1e-8));
}

TEST_CASE("conditional transmit energy") {
    PowerPolicy policy;
    policy.capacity = 2;
    policy.coeffs = {0.5, 1.0};
    const auto quant_probs_04 = Quantizer{{0.0, 1.0, std::numeric_limits<double>::infinity()},
                                          {0.4, 0.6}};
    const auto priors = Priors::from_pi0(0.5);

    // always-empty battery
    auto empty = chain_with_steady({1.0, 0.0, 0.0});
    CHECK(conditional_alpha(1, empty, policy, quant_probs_04, ehdet_test::op_from_rates(0.5, 0.5),
                            priors) == 0.0);

    // never transmits
    auto full = chain_with_steady({0.0, 0.0, 1.0});
    CHECK(conditional_alpha(1, full, policy, quant_probs_04, ehdet_test::op_from_rates(0.0, 0.0),
                            priors) == 0.0);

    // hand-evaluated sum: 0.5 * 1.0 * 0.4 * floor(0.5*2) = 0.2
    CHECK(conditional_alpha(1, full, policy, quant_probs_04, ehdet_test::op_from_rates(0.5, 0.5),
                            priors) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("total transmit energy is bounded by the available scale") {
    ehdet_test::TestRand rand(16);
    for (int it = 0; it < 20; ++it) {
        PowerPolicy policy;
        policy.capacity = rand.uniform_int(1, 10);
        const double c1 = rand.uniform(0.1, 0.8);
        policy.coeffs = {c1, rand.uniform(c1 + 0.05, 1.0)};
        const auto quant = make_quantizer_from_finite({rand.uniform(0.3, 2.0)}, 2.0);
        std::vector<double> steady(policy.capacity + 1);
        double sum = 0.0;
        for (double& s : steady) {
            s = rand.uniform(0.0, 1.0);
            sum += s;
        }
        for (double& s : steady) {
            s /= sum;
        }
        const auto chain = chain_with_steady(steady);
        const double pf = rand.uniform(0.0, 0.6);
        const auto op = ehdet_test::op_from_rates(pf, rand.uniform(pf, 1.0));
        const auto priors = Priors::from_pi0(rand.uniform(0.2, 0.8));

        double total = 0.0;
        for (int i = 1; i <= 2; ++i) {
            total += conditional_alpha(i, chain, policy, quant, op, priors);
        }
        const double bound =
            transmit_prob(op, priors) * chain.mean_energy * policy.coeffs.back();
        CHECK(total <= bound + 1e-12);
    }
}
