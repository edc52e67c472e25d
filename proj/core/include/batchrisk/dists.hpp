#pragma once

#include <cstdint>
#include <limits>

// Log-densities and distribution helpers shared by the likelihood,
// sampler, and risk code. Off-support arguments yield -infinity rather
// than throwing, so rejection can be encoded in log space.

namespace batchrisk {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log C(n, k)
double log_choose(std::int64_t n, std::int64_t k);

/// log Binomial(k | n, p); p in [0,1]
double log_binomial_pmf(std::int64_t k, std::int64_t n, double p);

/// log N(x | mean, sd)
double log_normal_pdf(double x, double mean, double sd);

/// log Beta(x | a, b)
double log_beta_pdf(double x, double a, double b);

/// log Gamma(x | shape, rate)
double log_gamma_pdf(double x, double shape, double rate);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (Wichura's AS 241, double precision).
double normal_quantile(double p);

/// P(X <= c) for X ~ Binomial(n, p). Exact multiplicative recurrence;
/// returns exactly 1 when c >= n.
double binomial_cdf(std::int64_t c, std::int64_t n, double p);

/// Type-7 empirical quantile (linear interpolation, R default) of a
/// pre-sorted sample.
double quantile_type7_sorted(const double* sorted, std::size_t n, double p);

}  // namespace batchrisk
