#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "batchrisk/mcmc.hpp"
#include "batchrisk/types.hpp"

// Ground-truth data generator (for users lacking the original survey
// files and for calibration tests) and a direct-quadrature posterior
// oracle used to verify the sampler on small data sets.

namespace batchrisk {

struct GroundTruth {
    CountryParams params;
    std::int64_t n_baseline_batches = 617;
    /// Per-batch sample sizes of the positives-only survey.
    std::vector<std::int64_t> batch_plan;

    void require_valid() const;
};

/// Calibration defaults: the combined-evidence posterior means with a
/// survey frame of 617 baseline batches and twenty positive batches of
/// 5 to 25 samples.
GroundTruth calibrated_default();

struct BaselineRow {
    std::int64_t batch_id = 0;
    bool positive = false;
    double log10_adjusted = 0.0;  // meaningful only when positive
};

struct SynthResult {
    BaselineSurvey baseline;
    PositiveBatchSummaries summaries;
    std::vector<BaselineRow> baseline_rows;
    /// Summaries batches redrawn because they produced zero positives
    /// (the survey frame contains positive batches only).
    std::int64_t regenerated_batches = 0;
};

SynthResult generate(const GroundTruth& truth, std::uint64_t seed);

struct GridAxis {
    std::string name;  // one of q, mu, sigma_b, sigma_w, alpha
    double lo = 0.0;
    double hi = 1.0;
    std::int64_t n = 2;
};

struct GridSpec {
    std::vector<GridAxis> axes;
    std::int64_t n_cells() const;
};

/// Posterior evaluated by quadrature on a dense grid, with the batch
/// latents integrated out in closed form (Beta-Binomial for p_j,
/// Gaussian marginal for mu_j). Usable for tiny data sets only.
struct GridPosterior {
    GridSpec spec;
    std::vector<double> log_density;  // unnormalized, row-major
    double log_norm = 0.0;            // trapezoid normalizer

    std::vector<double> axis_points(std::size_t axis) const;
    /// Marginal density on an axis (trapezoid-integrated over the other
    /// axes, normalized to integrate to 1).
    std::vector<double> marginal_density(std::size_t axis) const;
    /// Marginal CDF at the axis points (starts at 0, ends at 1).
    std::pair<std::vector<double>, std::vector<double>> marginal_cdf(
        std::size_t axis) const;
};

/// Direct quadrature of the unnormalized posterior. The grid must span
/// exactly the parameters of the chosen model: (q, mu, sigma_b, sigma_w)
/// for baseline_only, (mu, sigma_b, sigma_w, alpha) for positives_only,
/// all five for combined. Throws when the grid exceeds 1e6 cells.
GridPosterior grid_posterior_oracle(ModelKind model, const SurveyData& data,
                                    const PriorSpec& priors,
                                    const GridSpec& grid);

}  // namespace batchrisk
