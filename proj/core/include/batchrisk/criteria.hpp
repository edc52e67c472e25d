#pragma once

#include <cstdint>
#include <vector>

#include "batchrisk/mcmc.hpp"
#include "batchrisk/types.hpp"

// Compliance model for the n/c/m criterion and criterion-status
// conditional inference on new batches (importance weighting over batch
// simulations from the posterior).

namespace batchrisk {

/// Probability that one sampled carcass from the batch exceeds m cfu/g:
/// 0 for a clean batch, else p_j * (1 - Phi((log10 m - mu_j)/sigma_w)).
/// A sampled negative carcass cannot exceed the threshold.
double p_sample_exceeds(const BatchParams& batch, double sigma_w, double m);

/// Probability the batch complies: 1 for a clean batch (no false
/// positives), else BinomialCDF(c; n, p_sample_exceeds). The n samples
/// are treated as independent draws; batches are much larger than n.
double p_mc_met(const BatchParams& batch, double sigma_w,
                const Criterion& crit);

/// Batch simulations from the posterior, importance-weighted by
/// compliance status. For status = met the weight is p_mc_met, for
/// not_met 1 - p_mc_met, for not_applied 1.
struct WeightedBatchDraws {
    std::vector<BatchParams> draws;
    std::vector<double> weights;
    std::vector<double> met_prob;  // per-batch closed-form compliance
    McStatus status = McStatus::not_applied;
    double weight_ess = 0.0;  // (sum w)^2 / sum w^2

    void require_normalizable() const;
};

/// Simulate n_batches_per_draw batches from pi(theta_j | params) for
/// every retained posterior draw and attach status weights. Throws
/// DegenerateConditioning when every weight is zero.
WeightedBatchDraws conditional_batch_draws(const PosteriorSample& posterior,
                                           McStatus status,
                                           const Criterion& crit,
                                           std::int64_t n_batches_per_draw,
                                           std::uint64_t seed);

struct ConditionalReport {
    McStatus status;
    double p_contaminated;            // P(I_j = 1 | status)
    double e_mu;                      // E(mu_j | status)
    double e_mu_given_contaminated;   // E(mu_j | status, I_j = 1)
    double e_p_within_contaminated;   // E(p_j | status, I_j = 1)
    double p_met;                     // P(MC met), status-independent
    double weight_ess;
    bool low_ess_warning;  // effective weight sample size < 50
};

ConditionalReport conditional_summaries(const WeightedBatchDraws& draws);

}  // namespace batchrisk
