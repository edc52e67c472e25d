#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include <boost/math/distributions/beta.hpp>

#include "batchrisk/mcmc.hpp"
#include "batchrisk/synth.hpp"
#include "support.hpp"

using namespace batchrisk;

TEST_CASE("certain contamination and full prevalence fill the survey") {
    GroundTruth t = calibrated_default();
    t.params.q = 1.0;
    t.params.alpha = 1e14;
    t.n_baseline_batches = 200;
    const auto out = generate(t, 3);
    CHECK(out.baseline.n_positive == 200);
    for (const auto& b : out.summaries.batches)
        CHECK(b.n_positive == b.n_sampled);
}

TEST_CASE("zero between-batch spread pins every batch mean") {
    GroundTruth t = calibrated_default();
    t.params.sigma_b = 0.0;
    t.params.sigma_w = 0.0;
    t.params.q = 1.0;
    t.params.alpha = 1e14;
    t.n_baseline_batches = 50;
    const auto out = generate(t, 5);
    for (double y : out.baseline.log_concentrations)
        CHECK(y == t.params.mu);
    for (const auto& b : out.summaries.batches) {
        CHECK(b.mean_log == doctest::Approx(t.params.mu).epsilon(1e-12));
        if (b.sd_log) CHECK(*b.sd_log == doctest::Approx(0.0));
    }
}

TEST_CASE("baseline positive count matches its expectation") {
    // E[J'] = N' q alpha/(alpha+2) = 617 * 0.15 * 85/87 = 90.4
    const GroundTruth t = calibrated_default();
    double total = 0.0;
    const int reps = 60;
    for (int r = 0; r < reps; ++r)
        total += double(generate(t, std::uint64_t(r)).baseline.n_positive);
    const double mean = total / reps;
    const double expect = 617.0 * 0.15 * 85.0 / 87.0;
    const double se = std::sqrt(617.0 * 0.1466 * 0.8534 / reps);
    CHECK(std::fabs(mean - expect) < 3.0 * se);
}

TEST_CASE("summaries batches are positive by construction") {
    GroundTruth t = calibrated_default();
    t.params.alpha = 1.0;  // low prevalence forces regeneration
    t.params.q = 0.5;
    const auto out = generate(t, 9);
    for (const auto& b : out.summaries.batches) CHECK(b.n_positive >= 1);
    CHECK(out.regenerated_batches > 0);
    CHECK(out.summaries.n_batches() ==
          std::int64_t(calibrated_default().batch_plan.size()));
}

TEST_CASE("generation is deterministic in the seed") {
    const GroundTruth t = calibrated_default();
    const auto a = generate(t, 42);
    const auto b = generate(t, 42);
    CHECK(a.baseline.n_positive == b.baseline.n_positive);
    CHECK(a.baseline.log_concentrations == b.baseline.log_concentrations);
    REQUIRE(a.summaries.batches.size() == b.summaries.batches.size());
    for (std::size_t i = 0; i < a.summaries.batches.size(); ++i)
        CHECK(a.summaries.batches[i].mean_log ==
              b.summaries.batches[i].mean_log);
    const auto c = generate(t, 43);
    CHECK(a.baseline.log_concentrations != c.baseline.log_concentrations);
}

TEST_CASE("grid oracle recovers the conjugate Beta(89,530) q-marginal") {
    BaselineSurvey data;
    data.n_batches = 617;
    data.n_positive = 88;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(2.1, 0.9);
    for (int i = 0; i < 88; ++i) data.log_concentrations.push_back(z(rng));
    SurveyData sd;
    sd.baseline = data;

    GridSpec grid;
    grid.axes = {{"q", 0.05, 0.30, 1000},
                 {"mu", 1.6, 2.6, 7},
                 {"sigma_b", 0.1, 1.6, 7},
                 {"sigma_w", 0.1, 1.6, 7}};
    const auto post =
        grid_posterior_oracle(ModelKind::baseline_only, sd, PriorSpec{}, grid);

    const auto pts = post.axis_points(0);
    const auto dens = post.marginal_density(0);
    boost::math::beta_distribution<double> ref(89.0, 530.0);
    double sup = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        sup = std::max(sup,
                       std::fabs(dens[i] - boost::math::pdf(ref, pts[i])));
    CHECK(sup < 1e-3);
}

TEST_CASE("grid oracle with empty data returns the prior") {
    PriorSpec priors;
    priors.variance_prior = VariancePrior::uniform_on_sd;
    GridSpec grid;
    grid.axes = {{"q", 0.01, 0.99, 25},
                 {"mu", -150.0, 150.0, 25},
                 {"sigma_b", 1.0, 99.0, 25},
                 {"sigma_w", 1.0, 99.0, 25}};
    const auto post = grid_posterior_oracle(ModelKind::baseline_only,
                                            SurveyData{}, priors, grid);
    // flat marginals normalize to 1/width of the truncated axis
    const auto dens = post.marginal_density(0);
    for (double d : dens) CHECK(d == doctest::Approx(1.0 / 0.98).epsilon(1e-6));
    const auto sb = post.marginal_density(2);  // sigma flat under uniform-sd
    for (double d : sb) CHECK(d == doctest::Approx(1.0 / 98.0).epsilon(1e-6));
}

TEST_CASE("grid oracle rejects oversized or mismatched grids") {
    GridSpec huge;
    huge.axes = {{"q", 0.0, 1.0, 101},
                 {"mu", 0.0, 1.0, 101},
                 {"sigma_b", 0.1, 1.0, 101},
                 {"sigma_w", 0.1, 1.0, 2}};
    CHECK_THROWS_AS(grid_posterior_oracle(ModelKind::baseline_only,
                                          SurveyData{}, PriorSpec{}, huge),
                    std::invalid_argument);
    GridSpec wrong;
    wrong.axes = {{"q", 0.0, 1.0, 5}, {"mu", 0.0, 1.0, 5}};
    CHECK_THROWS_AS(grid_posterior_oracle(ModelKind::baseline_only,
                                          SurveyData{}, PriorSpec{}, wrong),
                    std::invalid_argument);
}

TEST_CASE("toy 2-batch summaries: sampler marginals match the grid oracle") {
    // Quick version of the acceptance check: loose KS threshold.
    PositiveBatchSummaries data;
    data.batches.push_back({6, 5, 2.1, 0.5});
    data.batches.push_back({8, 8, 2.9, 0.7});
    SurveyData sd;
    sd.summaries = data;

    PriorSpec priors;
    priors.variance_prior = VariancePrior::uniform_on_sd;
    priors.sigma_upper = 4.0;  // keep the toy posterior on a compact box
    priors.alpha_upper = 400.0;

    McmcConfig cfg;
    cfg.n_iterations = 30000;
    cfg.n_burnin = 6000;
    cfg.thin = 4;
    cfg.n_chains = 2;
    cfg.seed = 8;
    const auto sample = fit(ModelKind::positives_only, sd, priors, cfg);

    // Summaries-only data factorize as A(alpha) * B(mu, sigma_b, sigma_w);
    // a 2-point alpha axis cancels from the other marginals, buying
    // resolution for the narrow mu ridge at small sigma_b. A second grid
    // with a fine alpha axis covers alpha itself.
    GridSpec grid;
    grid.axes = {{"mu", -7.0, 12.0, 101},
                 {"sigma_b", 1e-4, 4.0, 41},
                 {"sigma_w", 0.25, 2.6, 31},
                 {"alpha", 1.0, 399.0, 2}};
    const auto oracle =
        grid_posterior_oracle(ModelKind::positives_only, sd, priors, grid);
    GridSpec alpha_grid;
    alpha_grid.axes = {{"mu", 0.0, 5.0, 5},
                       {"sigma_b", 0.3, 3.0, 5},
                       {"sigma_w", 0.5, 1.2, 5},
                       {"alpha", 1e-3, 400.0, 2000}};
    const auto oracle_alpha = grid_posterior_oracle(ModelKind::positives_only,
                                                    sd, priors, alpha_grid);

    const std::vector<std::string> names{"mu", "sigma_b", "sigma_w"};
    for (std::size_t a = 0; a < names.size(); ++a) {
        const auto [pts, cdf] = oracle.marginal_cdf(a);
        const double ks =
            testsupport::ks_distance_grid(sample.pooled(names[a]), pts, cdf);
        INFO("axis ", names[a], " ks=", ks);
        CHECK(ks < 0.05);
    }
    const auto [apts, acdf] = oracle_alpha.marginal_cdf(3);
    CHECK(testsupport::ks_distance_grid(sample.pooled("alpha"), apts, acdf) <
          0.05);
}

TEST_CASE("round-trip: a large synthetic survey recovers the truth") {
    GroundTruth t = calibrated_default();
    t.n_baseline_batches = 10000;
    t.batch_plan.clear();
    for (int i = 0; i < 200; ++i)
        t.batch_plan.push_back(5 + (i * 21) / 200);
    const auto data = generate(t, 31);
    SurveyData sd;
    sd.baseline = data.baseline;
    sd.summaries = data.summaries;

    McmcConfig cfg;
    cfg.n_iterations = 16000;
    cfg.n_burnin = 4000;
    cfg.thin = 4;
    cfg.n_chains = 4;
    cfg.seed = 7;
    cfg.n_threads = 4;
    const auto sample = fit(ModelKind::combined, sd, PriorSpec{}, cfg);
    CHECK(sample.converged);
    const auto table = summarize(sample);
    const std::map<std::string, double> truth{{"q", t.params.q},
                                              {"mu", t.params.mu},
                                              {"sigma_b", t.params.sigma_b},
                                              {"sigma_w", t.params.sigma_w},
                                              {"alpha", t.params.alpha}};
    for (const auto& row : table) {
        const auto it = truth.find(row.name);
        if (it == truth.end()) continue;
        INFO(row.name, " CI (", row.q025, ", ", row.q975, ") truth ",
             it->second);
        CHECK(row.q025 <= it->second);
        CHECK(it->second <= row.q975);
    }
}
