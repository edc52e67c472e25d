#pragma once

#include <span>
#include <utility>
#include <vector>

#include "batchrisk/types.hpp"

// Unit transformations, prior and likelihood evaluation for the three
// model variants, and the Q-Q screening helper. All functions are pure;
// off-support parameters evaluate to -infinity.

namespace batchrisk {

/// Whole-carcass log10 counts to log10 cfu per gram of skin (skin mass
/// taken as 100 g): subtract log10(100).
double transform_baseline(double raw_log10_per_carcass);

/// log10 cfu per ml of rinse water (400 ml) to log10 cfu/g: the per-ml
/// value is first scaled to the whole carcass (+log10 400) and then to
/// per gram (-log10 100), a net shift of +log10(4).
double transform_rinse(double raw_log10_per_ml);

/// Log-likelihood of the baseline ("1/batch") survey with batch means
/// marginalized analytically, y ~ N(mu, sigma_b^2 + sigma_w^2); exact
/// because each batch contributes a single observation.
///
/// With assume_full_within_prevalence the binomial factor is
/// Binomial(J' | N', q) (every contaminated batch fully prevalent);
/// otherwise the success probability is q*alpha/(alpha+2) as in the
/// combined model.
double loglik_baseline(const CountryParams& params, const BaselineSurvey& data,
                       bool assume_full_within_prevalence);

/// Log-likelihood of the positive-batch summaries given the per-batch
/// latents. For batch j: Binomial(x | N, p_j), the sufficient-statistic
/// factorization of a normal sample (mean ~ N(mu_j, precision x*tau_w);
/// (x-1)*SD^2 ~ Gamma((x-1)/2, tau_w/2), absent when x = 1), and the
/// latent priors N(mu_j | mu, tau_b) and Beta(p_j | alpha, 2).
/// A reported SD of 0 with x >= 2 evaluates to -infinity.
double loglik_summaries(const CountryParams& params,
                        std::span<const double> batch_mus,
                        std::span<const double> p_within,
                        const PositiveBatchSummaries& data);

/// Joint log prior density of the parameter vector in natural units
/// (q, mu, sigma_b, sigma_w, alpha); the precision-Gamma variant includes
/// the tau -> sigma change of variables.
double log_prior(const CountryParams& params, const PriorSpec& spec);

/// Normality screening pairs: standardized sample quantiles against
/// standard-normal quantiles at plotting positions (i - 0.5)/n.
/// Requires at least 3 values.
std::vector<std::pair<double, double>> qq_points(std::span<const double> values);

}  // namespace batchrisk
