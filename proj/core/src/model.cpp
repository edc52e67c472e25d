#include "batchrisk/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "batchrisk/dists.hpp"

namespace batchrisk {

namespace {
const double kLog10Of4 = std::log10(4.0);

double require_finite(double x, const char* what) {
    if (!std::isfinite(x))
        throw std::invalid_argument(std::string(what) + ": non-finite input");
    return x;
}
}  // namespace

double transform_baseline(double raw_log10_per_carcass) {
    return require_finite(raw_log10_per_carcass, "transform_baseline") - 2.0;
}

double transform_rinse(double raw_log10_per_ml) {
    return require_finite(raw_log10_per_ml, "transform_rinse") + kLog10Of4;
}

double loglik_baseline(const CountryParams& params, const BaselineSurvey& data,
                       bool assume_full_within_prevalence) {
    data.require_valid();
    if (!params.in_support()) return kNegInf;

    const double carcass_positive_prob =
        assume_full_within_prevalence
            ? params.q
            : params.q * params.alpha / (params.alpha + 2.0);
    double ll = log_binomial_pmf(data.n_positive, data.n_batches,
                                 carcass_positive_prob);
    const double total_sd = std::sqrt(params.sigma_b * params.sigma_b +
                                      params.sigma_w * params.sigma_w);
    for (double y : data.log_concentrations)
        ll += log_normal_pdf(y, params.mu, total_sd);
    return ll;
}

double loglik_summaries(const CountryParams& params,
                        std::span<const double> batch_mus,
                        std::span<const double> p_within,
                        const PositiveBatchSummaries& data) {
    data.require_valid();
    const std::size_t nb = data.batches.size();
    if (batch_mus.size() != nb || p_within.size() != nb)
        throw std::invalid_argument(
            "loglik_summaries: latent vectors must have one entry per batch");
    if (!params.in_support()) return kNegInf;

    const double tau_w = params.tau_w();
    double ll = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
        const BatchSummary& b = data.batches[j];
        const double mu_j = batch_mus[j];
        const double p_j = p_within[j];

        ll += log_binomial_pmf(b.n_positive, b.n_sampled, p_j);
        ll += log_normal_pdf(b.mean_log, mu_j,
                             params.sigma_w / std::sqrt(double(b.n_positive)));
        if (b.n_positive >= 2) {
            // (x-1)*SD^2 ~ Gamma((x-1)/2, tau_w/2); a reported SD of 0 sits
            // on the boundary and is rejected (finite only as tau_w -> inf).
            const double dof = double(b.n_positive - 1);
            const double scatter = dof * (*b.sd_log) * (*b.sd_log);
            ll += log_gamma_pdf(scatter, 0.5 * dof, 0.5 * tau_w);
        }
        ll += log_normal_pdf(mu_j, params.mu, params.sigma_b);
        ll += log_beta_pdf(p_j, params.alpha, 2.0);
        if (ll == kNegInf) return kNegInf;
    }
    return ll;
}

double log_prior(const CountryParams& params, const PriorSpec& spec) {
    spec.require_valid();
    if (!params.in_support()) return kNegInf;
    if (params.alpha >= spec.alpha_upper) return kNegInf;

    // q ~ U(0,1) contributes 0.
    double lp = -std::log(spec.alpha_upper);
    lp += log_normal_pdf(params.mu, 0.0, 1.0 / std::sqrt(spec.mu_precision));

    for (double sigma : {params.sigma_b, params.sigma_w}) {
        if (spec.variance_prior == VariancePrior::gamma_on_precision) {
            // density over sigma: Gamma(sigma^-2 | a, b) * |d tau / d sigma|
            const double tau = 1.0 / (sigma * sigma);
            lp += log_gamma_pdf(tau, PriorSpec::kGammaShape,
                                PriorSpec::kGammaRate) +
                  std::log(2.0) - 3.0 * std::log(sigma);
        } else {
            if (sigma >= spec.sigma_upper) return kNegInf;
            lp -= std::log(spec.sigma_upper);
        }
    }
    return lp;
}

std::vector<std::pair<double, double>> qq_points(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3)
        throw std::invalid_argument("qq_points: need at least 3 values");

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= double(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / double(n - 1));
    if (!(sd > 0.0))
        throw std::invalid_argument("qq_points: zero sample variance");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pp = (double(i) + 0.5) / double(n);
        out.emplace_back(normal_quantile(pp), (sorted[i] - mean) / sd);
    }
    return out;
}

}  // namespace batchrisk
