#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "batchrisk/mcmc.hpp"
#include "batchrisk/qmra.hpp"
#include "batchrisk/rng.hpp"
#include "batchrisk/types.hpp"

// Relative-risk measures (RR, RPR, MRRR) and their nested Monte Carlo
// estimators. One batch/serving sweep is shared across numerator,
// denominator, and every criterion in a grid (common random numbers), so
// the c = n identity and the MRRR = RR * P(met) identity hold exactly.

namespace batchrisk {

struct MonteCarloPlan {
    std::int64_t n_batches = 40;    // batch draws per posterior draw (L)
    std::int64_t n_servings = 10;   // serving draws per batch (M)

    void require_valid() const {
        if (n_batches < 1 || n_servings < 1)
            throw std::invalid_argument("MonteCarloPlan: need L, M >= 1");
    }
};

class UndefinedRatio : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// All four probabilities of one inner 2D Monte Carlo pass at fixed
/// country parameters, evaluated from a single set of batch and serving
/// draws. The compliance indicator is replaced by its closed-form
/// conditional expectation (same mean, lower variance).
struct ParamRiskEval {
    double p_ill = 0.0;          // q * mean_l(p_l * inner_l)
    double p_ill_prefactor = 0.0;  // q * alpha/(alpha+2) * mean_l(inner_l)
    double p_met = 1.0;          // q * mean_l(met_l) + (1 - q)
    double p_ill_and_met = 0.0;  // q * mean_l(p_l * inner_l * met_l)
    std::int64_t n_saturated = 0;
};

ParamRiskEval eval_param_risk(const CountryParams& params,
                              const Criterion& crit,
                              const MonteCarloPlan& plan, const QmraSpec& spec,
                              Rng& rng,
                              std::optional<double> p_fixed = std::nullopt);

/// P(ill | params), the nested average with the analytic E(p | alpha)
/// prefactor: q * alpha/(alpha+2) * (1/L) sum_l (1/M) sum_m P0.
double p_ill_unconditional(const CountryParams& params,
                           const MonteCarloPlan& plan, const QmraSpec& spec,
                           Rng& rng);

/// P(MC met | params) = q * (1/L) sum_l p_mc_met(theta_l) + (1 - q).
double p_mc_met_param(const CountryParams& params, const Criterion& crit,
                      const MonteCarloPlan& plan, Rng& rng);

/// P(ill and MC met | params).
double p_ill_and_met(const CountryParams& params, const Criterion& crit,
                     const MonteCarloPlan& plan, const QmraSpec& spec,
                     Rng& rng);

/// RR(params) = [P(ill and met)/P(met)] / P(ill) under shared draws.
/// Throws UndefinedRatio when the batch draws carry no risk.
double rr_param(const CountryParams& params, const Criterion& crit,
                const MonteCarloPlan& plan, const QmraSpec& spec, Rng& rng);

/// MRRR(params) = P(ill and met)/P(ill) = RR * P(met) under shared
/// draws. p_fixed replaces the Beta(alpha,2) within-batch prevalence
/// draws by a constant (p_fixed = 1 reproduces the fully-prevalent
/// implementation).
double mrrr_param(const CountryParams& params, const Criterion& crit,
                  std::optional<double> p_fixed, const MonteCarloPlan& plan,
                  const QmraSpec& spec, Rng& rng);

struct RrResult {
    double mean = 0.0;
    double lo = 0.0;   // 2.5% of the per-draw RR series
    double hi = 0.0;   // 97.5%
    double se = 0.0;   // MC standard error of the mean
    double reject_mean = 0.0;
    std::vector<double> rr_series;      // per included draw
    std::vector<double> reject_series;  // aligned with rr_series
    std::vector<std::int64_t> draw_index;
    std::int64_t n_excluded = 0;  // undefined-ratio draws
    std::int64_t n_saturated = 0;
};

/// E(RR | data) by 2D Monte Carlo: rr_param and 1 - p_mc_met_param per
/// retained posterior draw, with a per-draw RNG substream.
RrResult posterior_rr(const PosteriorSample& sample, const Criterion& crit,
                      const MonteCarloPlan& plan, const QmraSpec& spec,
                      std::uint64_t seed, int n_threads = 1);

struct RprResult {
    double rpr = 0.0;
    double p_ill_given_met = 0.0;
    double p_ill = 0.0;
    double p_met = 0.0;
};

/// RPR = P(ill | met, data) / P(ill | data): both probabilities are
/// integrated over all uncertainty before the ratio is taken. Collapsed
/// integration order: one batch draw and plan.n_servings servings per
/// retained posterior draw, which is why this is much cheaper than
/// posterior_rr at matched draw counts.
RprResult rpr(const PosteriorSample& sample, const Criterion& crit,
              const MonteCarloPlan& plan, const QmraSpec& spec,
              std::uint64_t seed);

struct RiskGridCell {
    Criterion criterion;
    double rr_mean = 0.0;
    double rr_lo = 0.0;
    double rr_hi = 0.0;
    double rpr = 0.0;
    double mrrr_mean = 0.0;
    double reject_pct_mean = 0.0;
    double mc_se = 0.0;
    std::int64_t n_excluded = 0;
    std::int64_t n_saturated = 0;
};

struct RiskGrid {
    std::vector<RiskGridCell> cells;
    // Per criterion, per retained draw; NaN marks excluded draws.
    std::vector<std::vector<double>> rr_series;
    std::vector<std::vector<double>> reject_series;
};

/// Evaluate every criterion over the posterior with one shared batch and
/// serving sweep per draw. Per-cell undefined ratios are recorded and
/// the grid completes.
RiskGrid rr_grid(const PosteriorSample& sample,
                 const std::vector<Criterion>& criteria,
                 const MonteCarloPlan& plan, const QmraSpec& spec,
                 std::uint64_t seed, int n_threads = 1);

/// The Table-style default grid: n in {5,10} x c in 0..4 x m in
/// {1000,100}.
std::vector<Criterion> default_criteria_grid();

}  // namespace batchrisk
