#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "batchrisk/types.hpp"

// Adaptive Metropolis-within-Gibbs over the country parameters plus the
// per-batch latents of the summaries block. Scalar blocks use Gaussian
// random walks on transformed scales (logit q, identity mu, log sigma,
// log alpha); latent batch means are conjugate and drawn exactly.

namespace batchrisk {

enum class ModelKind { baseline_only, positives_only, combined };

std::string to_string(ModelKind m);
ModelKind model_kind_from_string(const std::string& s);

struct McmcConfig {
    std::int64_t n_iterations = 16000;
    std::int64_t n_burnin = 4000;
    std::int64_t thin = 4;
    std::int64_t n_chains = 4;
    std::uint64_t seed = 0;
    std::int64_t adapt_window = 50;
    double target_accept = 0.44;
    /// Sample the baseline batch means as explicit latents instead of
    /// marginalizing them analytically (cross-validation mode).
    bool baseline_latent_means = false;
    int n_threads = 1;

    std::int64_t n_retained_per_chain() const {
        return (n_iterations - n_burnin) / thin;
    }
    void require_valid() const;
};

/// One chain's retained draws. Latent vectors are empty when the fitted
/// model has no corresponding latent block.
struct ChainDraws {
    std::vector<CountryParams> params;
    std::vector<std::vector<double>> mu_batch;     // summaries latents
    std::vector<std::vector<double>> p_within;     // summaries latents
    std::vector<std::vector<double>> baseline_mu;  // latent-means mode only
};

/// Per-chain sampler bookkeeping: post-burn-in acceptance rates and the
/// proposal scales at the end of burn-in and at the end of the run
/// (equal by construction; adaptation freezes after burn-in).
struct ChainStats {
    std::vector<double> accept_rate;
    std::vector<double> scale_at_burnin_end;
    std::vector<double> scale_at_end;
};

struct ParamDiagnostic {
    std::string name;
    double rhat;  // NaN with a single chain
    double ess;
};

struct PosteriorSample {
    std::vector<ChainDraws> chains;
    std::vector<std::string> block_names;
    std::vector<ChainStats> chain_stats;
    std::vector<ParamDiagnostic> diag;
    bool converged = true;  // false when any split R-hat exceeds 1.05
    ModelKind model = ModelKind::combined;
    McmcConfig config;

    std::int64_t n_draws() const;
    std::int64_t draws_per_chain() const;
    const CountryParams& draw(std::int64_t pooled_index) const;
    /// Pooled series of one of q, mu, sigma_b, sigma_w, alpha, phi.
    std::vector<double> pooled(const std::string& param) const;
};

inline const std::vector<std::string>& param_names() {
    static const std::vector<std::string> names{"q",       "mu",    "sigma_b",
                                                "sigma_w", "alpha", "phi"};
    return names;
}

/// Run the sampler. The data shape must match the model choice: combined
/// requires both sets, the single-set models exactly their own set. A
/// fully empty SurveyData is allowed for any model and samples the prior.
PosteriorSample fit(ModelKind model, const SurveyData& data,
                    const PriorSpec& priors, const McmcConfig& cfg);

struct ParamSummary {
    std::string name;
    double mean;
    double q025;
    double q975;
};

/// Posterior means and central 95% intervals (type-7 quantiles) for the
/// five parameters plus derived phi.
std::vector<ParamSummary> summarize(const PosteriorSample& sample);

/// Split R-hat and autocorrelation ESS per parameter. R-hat is NaN with
/// a single chain; ESS is summed over chains.
std::vector<ParamDiagnostic> diagnostics(const PosteriorSample& sample);

/// Split R-hat / Geyer initial-positive-sequence ESS on raw series;
/// exposed for reuse and testing.
double split_rhat(const std::vector<std::vector<double>>& chains);
double ess_autocorr(const std::vector<double>& series);

}  // namespace batchrisk
