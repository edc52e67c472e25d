#pragma once

#include <cstdint>
#include <string>

#include "batchrisk/rng.hpp"
#include "batchrisk/types.hpp"

// Pluggable serving-level QMRA template: batch parameters -> probability
// of illness per serving. The chain structure (carcass draw -> serving
// weight -> cell count -> transfer -> dose -> dose-response) is fixed;
// every distribution and the dose-response curve are configurable, so an
// alternative predictive model can be substituted via configuration.

namespace batchrisk {

struct DistSpec {
    enum class Kind { fixed, uniform, log_uniform };
    Kind kind = Kind::fixed;
    double lo = 0.0;
    double hi = 0.0;  // ignored for fixed

    double sample(Rng& rng) const;
    void require_valid() const;
};

struct DoseResponse {
    enum class Kind { beta_poisson, step };
    Kind kind = Kind::beta_poisson;
    // Approximate Beta-Poisson: P(ill | d) = scale * (1 - (1 + d/b)^-a)
    double a = 0.145;
    double b = 7.59;
    // Step: P(ill | d) = scale * [d >= threshold]
    std::int64_t threshold = 1;
    double scale = 1.0;

    double p_ill(std::int64_t dose) const;
    void require_valid() const;
};

/// Serving-chain configuration. Defaults are calibration placeholders
/// for the unavailable production model; relative measures (RR, RPR,
/// MRRR) are ratios and are insensitive to the absolute scale of the
/// dose-response curve.
struct QmraSpec {
    int version = 1;
    DistSpec serving_weight{DistSpec::Kind::uniform, 50.0, 300.0};  // grams
    DistSpec transfer{DistSpec::Kind::log_uniform, 1e-6, 3e-4};
    DoseResponse dose_response{};
    /// Expected-cell cap; larger serving loads are saturated and flagged.
    double max_expected_cells = 1e12;
    /// Exact binomial thinning below this cell count, normal
    /// approximation above.
    std::int64_t binomial_exact_limit = 1000000;

    void require_valid() const;
};

/// Serving-specific draw: carcass concentration, serving weight, raw
/// cell count, transfer probability, ingested dose.
struct ServingParams {
    double y_c = 0.0;
    double w = 0.0;
    std::int64_t n_c = 0;
    double r = 0.0;
    std::int64_t d = 0;
    bool saturated = false;
};

/// Draw one serving from a contaminated batch:
/// y_c ~ N(mu_batch, sigma_w), w ~ weight dist, n_c ~ Poisson(w 10^y_c),
/// r ~ transfer dist, d ~ Binomial(n_c, r).
ServingParams draw_serving(const BatchParams& batch, double sigma_w,
                           const QmraSpec& spec, Rng& rng);

double p_ill_given_dose(std::int64_t dose, const QmraSpec& spec);

/// I_j * p_j * mean over M serving draws of P(ill | dose). Returns
/// exactly 0 without consuming the stream when the batch is clean or
/// within-batch prevalence is 0.
double p_ill_serving_mc(const BatchParams& batch, double sigma_w,
                        const QmraSpec& spec, std::int64_t n_servings,
                        Rng& rng);

/// JSON (de)serialization of the spec; see docs for the schema.
QmraSpec qmra_spec_from_json_text(const std::string& text);
QmraSpec load_qmra_spec(const std::string& path);
std::string qmra_spec_to_json_text(const QmraSpec& spec);

}  // namespace batchrisk
