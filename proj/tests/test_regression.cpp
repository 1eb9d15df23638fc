#include <doctest.h>

#include <cmath>
#include <random>

#include "rem/regression.hpp"

using namespace rem;

namespace {

std::vector<EmpiricalMeasure> four_unit_measures() {
    // Sizes 1, 2, 5, 10 paired with covariates 2, 4, 6, 8.
    std::mt19937_64 eng(42);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<EmpiricalMeasure> measures;
    const int sizes[4] = {1, 2, 5, 10};
    const double scale[4] = {2.0, 4.0, 6.0, 8.0};
    for (int i = 0; i < 4; ++i) {
        std::vector<double> obs(static_cast<std::size_t>(sizes[i]));
        for (double& y : obs) y = scale[i] * nd(eng);
        measures.emplace_back(std::move(obs));
    }
    return measures;
}

}  // namespace

TEST_CASE("global weights on the four-unit design") {
    const CovariateSample c({{2.0}, {4.0}, {6.0}, {8.0}});
    const auto w3 = global_weights(c, {3.0});
    REQUIRE(w3.size() == 4);
    CHECK(w3[0] == doctest::Approx(11.0 / 5.0).epsilon(1e-13));
    CHECK(w3[1] == doctest::Approx(7.0 / 5.0).epsilon(1e-13));
    CHECK(w3[2] == doctest::Approx(3.0 / 5.0).epsilon(1e-13));
    CHECK(w3[3] == doctest::Approx(-1.0 / 5.0).epsilon(1e-13));

    const auto w5 = global_weights(c, {5.0});
    for (double w : w5) CHECK(w == 1.0);
}

TEST_CASE("global weights are exactly 1 at the covariate mean") {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<std::vector<double>> z(12, std::vector<double>(2));
    for (auto& row : z) {
        row[0] = u(eng);
        row[1] = u(eng) + 0.3 * row[0];
    }
    const CovariateSample c(z);
    const auto w = global_weights(c, c.mean());
    for (double wi : w) CHECK(wi == 1.0);

    // Cached moments recompute from the raw matrix.
    for (int j = 0; j < 2; ++j) {
        double m = 0.0;
        for (const auto& row : z) m += row[j];
        CHECK(std::abs(c.mean()[j] - m / 12.0) <= 1e-12);
        for (int k = 0; k < 2; ++k) {
            double cov = 0.0;
            for (const auto& row : z) cov += (row[j] - c.mean()[j]) * (row[k] - c.mean()[k]);
            CHECK(std::abs(c.covariance()[j * 2 + k] - cov / 12.0) <= 1e-12);
        }
    }
    CHECK(c.covariance()[1] == c.covariance()[2]);  // symmetry
}

TEST_CASE("weight normalization at random queries") {
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::vector<double>> z(30, std::vector<double>(1));
    for (auto& row : z) row[0] = u(eng);
    const CovariateSample c(z);
    for (int rep = 0; rep < 20; ++rep) {
        const double q = u(eng);
        const auto gw = global_weights(c, {q});
        double gsum = 0.0;
        for (double w : gw) gsum += w;
        CHECK(std::abs(gsum / 30.0 - 1.0) <= 1e-10);

        const auto lw = local_weights(c, q * 0.4, 0.8, KernelSpec{});
        double lsum = 0.0;
        for (double w : lw) lsum += w;
        CHECK(std::abs(lsum / 30.0 - 1.0) <= 1e-10);
    }
}

TEST_CASE("local weights at a symmetric design") {
    const CovariateSample c({{-0.5}, {0.0}, {0.5}});
    const auto w = local_weights(c, 0.0, 1.0, KernelSpec{});
    REQUIRE(w.size() == 3);
    CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-13));
    CHECK(w[1] == doctest::Approx(1.2).epsilon(1e-13));
    CHECK(w[2] == doctest::Approx(0.9).epsilon(1e-13));
    CHECK(w[0] == doctest::Approx(w[2]).epsilon(1e-13));
}

TEST_CASE("local weights reject degenerate windows") {
    // A constant design never reaches the weight computation: the covariance
    // check already rejects it.
    CHECK_THROWS_AS(CovariateSample({{1.0}, {1.0}, {1.0}}), DegenerateDesignError);

    const CovariateSample spread({{-1.0}, {0.0}, {1.0}});
    CHECK_THROWS_AS(local_weights(spread, 10.0, 0.5, KernelSpec{}),
                    InsufficientLocalDataError);  // empty window
    CHECK_THROWS_AS(local_weights(spread, -1.0, 0.5, KernelSpec{}),
                    InsufficientLocalDataError);  // single point carries no spread
}

TEST_CASE("kernel families integrate to one and are symmetric") {
    for (KernelFamily fam :
         {KernelFamily::epanechnikov, KernelFamily::triangular, KernelFamily::quartic}) {
        const KernelSpec k{fam};
        double integral = 0.0;
        const int steps = 20000;
        for (int i = 0; i < steps; ++i) {
            const double u = -1.0 + 2.0 * (i + 0.5) / steps;
            integral += k(u) * (2.0 / steps);
            CHECK(k(u) == doctest::Approx(k(-u)).epsilon(1e-13));
        }
        CHECK(std::abs(integral - 1.0) <= 1e-6);
        CHECK(k(1.5) == 0.0);
    }
}

TEST_CASE("fit validates the design") {
    auto measures = four_unit_measures();
    const RemModel model = fit(std::vector<double>{2.0, 4.0, 6.0, 8.0}, measures);
    CHECK(model.grid_size() == 10);  // lcm(1, 2, 5, 10)

    CHECK_THROWS_AS(fit(std::vector<double>{1.0}, {measures[0]}), DegenerateDesignError);

    // Duplicated covariate column makes the covariance singular.
    std::vector<std::vector<double>> dup{{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}, {4.0, 4.0}};
    CHECK_THROWS_AS(fit(dup, measures), DegenerateDesignError);

    RemConfig local_cfg;
    local_cfg.mode = Mode::local;
    std::vector<std::vector<double>> two_cols{{1.0, 0.0}, {2.0, 1.0}, {3.0, -1.0}, {4.0, 2.0}};
    CHECK_THROWS_AS(fit(two_cols, measures, local_cfg), InvalidArgumentError);
}

TEST_CASE("predict at the covariate mean equals the barycenter exactly") {
    const auto measures = four_unit_measures();
    const RemModel model = fit(std::vector<double>{2.0, 4.0, 6.0, 8.0}, measures);
    const Prediction at_mean = model.predict(5.0);
    const QuantileGrid bary = barycenter(measures, 5000);
    CHECK(at_mean.quantiles == bary);
    CHECK(wasserstein_distance(at_mean.quantiles, bary) == 0.0);
}

TEST_CASE("prediction on identical measures returns that measure") {
    const EmpiricalMeasure m({-1.0, 0.5, 2.0});
    const std::vector<EmpiricalMeasure> measures(5, m);
    const RemModel model = fit(std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0}, measures);
    const auto expected = empirical_quantile(m, model.grid_size());
    for (double z : {1.2, 3.0, 4.9}) {
        const Prediction pred = model.predict(z);
        REQUIRE(pred.quantiles.grid_size() == expected.grid_size());
        for (int i = 0; i < expected.grid_size(); ++i) {
            CHECK(pred.quantiles[i] == doctest::Approx(expected[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("negative-weight queries still produce monotone predictions") {
    const auto measures = four_unit_measures();
    const RemModel model = fit(std::vector<double>{2.0, 4.0, 6.0, 8.0}, measures);
    const Prediction pred = model.predict(3.0);
    CHECK(pred.weights[3] == doctest::Approx(-0.2).epsilon(1e-12));
    for (int i = 1; i < pred.quantiles.grid_size(); ++i) {
        CHECK(pred.quantiles[i] >= pred.quantiles[i - 1]);
    }
}

TEST_CASE("affine reparameterization of covariates leaves global weights invariant") {
    std::mt19937_64 eng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> z(25, std::vector<double>(2));
    for (auto& row : z) {
        row[0] = u(eng);
        row[1] = u(eng);
    }
    // A = [[2, 1], [0.5, -1]], b = (3, -2).
    auto transform = [](const std::vector<double>& v) {
        return std::vector<double>{2.0 * v[0] + 1.0 * v[1] + 3.0,
                                   0.5 * v[0] - 1.0 * v[1] - 2.0};
    };
    std::vector<std::vector<double>> zt(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zt[i] = transform(z[i]);

    const CovariateSample c(z), ct(zt);
    for (int rep = 0; rep < 10; ++rep) {
        const std::vector<double> q{u(eng), u(eng)};
        const auto w = global_weights(c, q);
        const auto wt = global_weights(ct, transform(q));
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(std::abs(w[i] - wt[i]) <= 1e-9);
        }
    }
}

TEST_CASE("predict_batch collects per-query errors without aborting") {
    std::vector<EmpiricalMeasure> measures;
    std::vector<double> z;
    std::mt19937_64 eng(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        z.push_back(-1.0 + 2.0 * i / 19.0);
        std::vector<double> obs(4);
        for (double& y : obs) y = nd(eng);
        measures.emplace_back(std::move(obs));
    }
    RemConfig cfg;
    cfg.mode = Mode::local;
    cfg.bandwidth = 0.25;
    const RemModel model = fit(z, measures, cfg);

    // Far-outside query has an empty kernel window; the in-range ones succeed.
    const auto outcomes = model.predict_batch(std::vector<double>{0.0, 50.0, -0.5});
    REQUIRE(outcomes.size() == 3);
    CHECK(outcomes[0].ok());
    CHECK_FALSE(outcomes[1].ok());
    CHECK(outcomes[1].error_code == "E_INSUFFICIENT_LOCAL_DATA");
    CHECK(outcomes[2].ok());

    CHECK(model.predict_batch(std::vector<double>{}).empty());

    // Batch and single-query paths are bitwise identical.
    const Prediction single = model.predict(0.0);
    CHECK(single.quantiles == outcomes[0].prediction->quantiles);
}

TEST_CASE("extrapolation flag fires on far queries") {
    const auto measures = four_unit_measures();
    const RemModel model = fit(std::vector<double>{2.0, 4.0, 6.0, 8.0}, measures);
    CHECK_FALSE(model.predict(5.0).extrapolation);
    CHECK(model.predict(40.0).extrapolation);
}

TEST_CASE("local agrees with global when the window covers everything") {
    std::mt19937_64 eng(31);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> z;
    std::vector<EmpiricalMeasure> measures;
    for (int i = 0; i < 40; ++i) {
        const double zi = -1.0 + 2.0 * i / 39.0;
        z.push_back(zi);
        std::vector<double> obs(20);
        for (double& y : obs) y = 2.0 * zi + 0.3 * nd(eng);
        measures.emplace_back(std::move(obs));
    }
    const RemModel global_model = fit(z, measures);
    RemConfig cfg;
    cfg.mode = Mode::local;
    cfg.bandwidth = 1e4;
    const RemModel local_model = fit(z, measures, cfg);
    for (double q : {-0.5, 0.0, 0.4}) {
        const double d = wasserstein_distance(global_model.predict(q).quantiles,
                                              local_model.predict(q).quantiles);
        CHECK(d < 0.02);
    }
}
