#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace batchrisk {

/// Country-level parameter vector describing carcass contamination:
/// q        prevalence of contaminated batches
/// mu       mean log10 cfu/g over all contaminated carcasses
/// sigma_b  between-batch SD of batch means (log10 cfu/g)
/// sigma_w  within-batch SD of carcass concentrations (log10 cfu/g)
/// alpha    hyperparameter of the within-batch prevalence Beta(alpha, 2)
struct CountryParams {
    double q = 0.5;
    double mu = 0.0;
    double sigma_b = 1.0;
    double sigma_w = 1.0;
    double alpha = 100.0;

    double tau_b() const { return 1.0 / (sigma_b * sigma_b); }
    double tau_w() const { return 1.0 / (sigma_w * sigma_w); }
    /// phi = sigma_w^2 / (sigma_w^2 + sigma_b^2), the within share of
    /// total variance.
    double phi() const {
        const double w2 = sigma_w * sigma_w;
        return w2 / (w2 + sigma_b * sigma_b);
    }
    bool in_support() const {
        return q >= 0.0 && q <= 1.0 && sigma_b > 0.0 && sigma_w > 0.0 &&
               alpha > 0.0;
    }
    void require_valid() const {
        if (!in_support())
            throw std::invalid_argument("CountryParams outside support");
    }
};

/// Per-batch latent state for prediction and criterion conditioning.
/// mu_batch and p_within are defined by the hierarchy whether or not the
/// batch is contaminated; risk and exceedance are exactly zero when it
/// is not.
struct BatchParams {
    bool contaminated = false;
    double p_within = 0.0;
    double mu_batch = 0.0;
};

/// Baseline survey: one carcass sampled from each of n_batches batches
/// ("1/batch" data). log_concentrations holds the adjusted log10 cfu/g
/// values of the n_positive positive carcasses.
struct BaselineSurvey {
    std::int64_t n_batches = 0;
    std::int64_t n_positive = 0;
    std::vector<double> log_concentrations;

    void require_valid() const {
        if (n_positive < 0 || n_positive > n_batches)
            throw std::invalid_argument("BaselineSurvey: need 0 <= J' <= N'");
        if (static_cast<std::int64_t>(log_concentrations.size()) != n_positive)
            throw std::invalid_argument(
                "BaselineSurvey: concentration list length must equal J'");
    }
};

/// One positive batch in the multi-sample survey ("N/batch+" data):
/// counts plus the sample mean and SD of the positives' adjusted log10
/// concentrations. sd_log is absent when n_positive == 1.
struct BatchSummary {
    std::int64_t n_sampled = 0;
    std::int64_t n_positive = 0;
    double mean_log = 0.0;
    std::optional<double> sd_log;
};

struct PositiveBatchSummaries {
    std::vector<BatchSummary> batches;

    std::int64_t n_batches() const {
        return static_cast<std::int64_t>(batches.size());
    }
    void require_valid() const {
        for (const auto& b : batches) {
            if (b.n_positive < 1 || b.n_positive > b.n_sampled)
                throw std::invalid_argument(
                    "BatchSummary: need 1 <= x <= N (positives-only data)");
            if (b.n_positive >= 2 && !b.sd_log.has_value())
                throw std::invalid_argument(
                    "BatchSummary: sd required when x >= 2");
            if (b.n_positive == 1 && b.sd_log.has_value())
                throw std::invalid_argument(
                    "BatchSummary: sd undefined for a single positive");
            if (b.sd_log && *b.sd_log < 0.0)
                throw std::invalid_argument("BatchSummary: negative sd");
        }
    }
};

/// Carrier for whichever of the two data sets a fit uses.
struct SurveyData {
    std::optional<BaselineSurvey> baseline;
    std::optional<PositiveBatchSummaries> summaries;

    bool empty() const { return !baseline && !summaries; }
};

enum class VariancePrior {
    gamma_on_precision,  // tau_b, tau_w ~ Gamma(0.001, 0.001)
    uniform_on_sd,       // sigma_b, sigma_w ~ Uniform(0, sigma_upper)
};

/// Prior specification. Defaults: q ~ U(0,1), mu ~ N(0, precision 1e-4),
/// tau ~ Gamma(0.001, 0.001), alpha ~ U(0, 1e4).
struct PriorSpec {
    VariancePrior variance_prior = VariancePrior::gamma_on_precision;
    double alpha_upper = 1e4;
    double mu_precision = 1e-4;
    double sigma_upper = 100.0;  // range of the uniform-on-sd variant
    static constexpr double kGammaShape = 0.001;
    static constexpr double kGammaRate = 0.001;

    void require_valid() const {
        if (!(alpha_upper > 0.0) || !(mu_precision > 0.0) ||
            !(sigma_upper > 0.0))
            throw std::invalid_argument("PriorSpec: bounds must be positive");
    }
};

/// Acceptance-sampling criterion: reject the batch when more than c of n
/// sampled carcasses exceed m cfu/g.
struct Criterion {
    std::int64_t n = 5;
    std::int64_t c = 1;
    double m = 1000.0;

    double log10_m() const;
    std::string str() const;  // "n/c/m"
    /// Parse "n/c/m", e.g. "5/1/1000". Throws std::invalid_argument on
    /// malformed input or c > n.
    static Criterion parse(const std::string& text);

    void require_valid() const {
        if (n < 1 || c < 0 || c > n || !(m > 0.0))
            throw std::invalid_argument(
                "Criterion: need n >= 1, 0 <= c <= n, m > 0");
    }
};

/// Compliance status a batch can be conditioned on.
enum class McStatus { met, not_met, not_applied };

std::string to_string(McStatus s);
McStatus mc_status_from_string(const std::string& s);

/// Raised when conditioning on a status no batch can attain (for example
/// status = not_met under a criterion with c = n).
class DegenerateConditioning : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace batchrisk
