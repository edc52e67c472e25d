#include "batchrisk/risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "batchrisk/criteria.hpp"
#include "batchrisk/dists.hpp"

namespace batchrisk {

namespace {

// One batch draw and its serving-averaged illness intensity.
struct BatchDraw {
    double p = 0.0;
    double mu = 0.0;
    double inner = 0.0;  // (1/M) sum_m P0(ill | dose_m)
};

// Draw L batches with M servings each; everything downstream (per
// criterion compliance, all four probabilities) is closed-form given
// these draws. Batch and serving draws consume two independent
// substreams, so estimators that skip the serving chain (P(MC met))
// still see bit-identical batch draws at matched seeds.
std::vector<BatchDraw> draw_batches(const CountryParams& params,
                                    const MonteCarloPlan& plan,
                                    const QmraSpec& spec, Rng& rng,
                                    std::optional<double> p_fixed,
                                    std::int64_t& n_saturated,
                                    bool with_servings = true) {
    Rng batch_rng(rng());
    Rng serving_rng(rng());
    std::normal_distribution<double> z(0.0, 1.0);
    std::gamma_distribution<double> ga(params.alpha, 1.0);
    std::gamma_distribution<double> gb(2.0, 1.0);

    std::vector<BatchDraw> out(std::size_t(plan.n_batches));
    for (auto& bd : out) {
        if (p_fixed) {
            bd.p = *p_fixed;
        } else {
            const double x = ga(batch_rng);
            bd.p = x / (x + gb(batch_rng));
        }
        bd.mu = params.mu + params.sigma_b * z(batch_rng);
        if (!with_servings) continue;
        BatchParams batch{true, bd.p, bd.mu};
        double acc = 0.0;
        for (std::int64_t m = 0; m < plan.n_servings; ++m) {
            const ServingParams s =
                draw_serving(batch, params.sigma_w, spec, serving_rng);
            if (s.saturated) ++n_saturated;
            acc += p_ill_given_dose(s.d, spec);
        }
        bd.inner = acc / double(plan.n_servings);
    }
    return out;
}

ParamRiskEval eval_from_batches(const CountryParams& params,
                                const Criterion& crit,
                                const std::vector<BatchDraw>& batches,
                                std::int64_t n_saturated) {
    double s_ill = 0.0, s_inner = 0.0, s_met = 0.0, s_joint = 0.0;
    for (const auto& bd : batches) {
        const BatchParams batch{true, bd.p, bd.mu};
        const double met = p_mc_met(batch, params.sigma_w, crit);
        const double ill = bd.p * bd.inner;
        s_ill += ill;
        s_inner += bd.inner;
        s_met += met;
        s_joint += ill * met;
    }
    const double L = double(batches.size());
    ParamRiskEval ev;
    ev.p_ill = params.q * s_ill / L;
    ev.p_ill_prefactor =
        params.q * params.alpha / (params.alpha + 2.0) * s_inner / L;
    ev.p_met = params.q * s_met / L + (1.0 - params.q);
    ev.p_ill_and_met = params.q * s_joint / L;
    ev.n_saturated = n_saturated;
    return ev;
}

}  // namespace

ParamRiskEval eval_param_risk(const CountryParams& params,
                              const Criterion& crit,
                              const MonteCarloPlan& plan, const QmraSpec& spec,
                              Rng& rng, std::optional<double> p_fixed) {
    params.require_valid();
    crit.require_valid();
    plan.require_valid();
    std::int64_t n_sat = 0;
    const auto batches = draw_batches(params, plan, spec, rng, p_fixed, n_sat);
    return eval_from_batches(params, crit, batches, n_sat);
}

double p_ill_unconditional(const CountryParams& params,
                           const MonteCarloPlan& plan, const QmraSpec& spec,
                           Rng& rng) {
    // Criterion is irrelevant here; any valid one works.
    return eval_param_risk(params, Criterion{1, 1, 1000.0}, plan, spec, rng)
        .p_ill_prefactor;
}

double p_mc_met_param(const CountryParams& params, const Criterion& crit,
                      const MonteCarloPlan& plan, Rng& rng) {
    params.require_valid();
    crit.require_valid();
    plan.require_valid();
    // Compliance needs the batch draws only; the serving substream is
    // left untouched so the batch draws match eval_param_risk at a
    // matched seed.
    std::int64_t n_sat = 0;
    const auto batches = draw_batches(params, plan, QmraSpec{}, rng,
                                      std::nullopt, n_sat, false);
    return eval_from_batches(params, crit, batches, n_sat).p_met;
}

double p_ill_and_met(const CountryParams& params, const Criterion& crit,
                     const MonteCarloPlan& plan, const QmraSpec& spec,
                     Rng& rng) {
    return eval_param_risk(params, crit, plan, spec, rng).p_ill_and_met;
}

double rr_param(const CountryParams& params, const Criterion& crit,
                const MonteCarloPlan& plan, const QmraSpec& spec, Rng& rng) {
    const ParamRiskEval ev = eval_param_risk(params, crit, plan, spec, rng);
    if (!(ev.p_ill > 0.0) || !(ev.p_met > 0.0))
        throw UndefinedRatio("rr_param: zero illness or acceptance mass");
    return (ev.p_ill_and_met / ev.p_met) / ev.p_ill;
}

double mrrr_param(const CountryParams& params, const Criterion& crit,
                  std::optional<double> p_fixed, const MonteCarloPlan& plan,
                  const QmraSpec& spec, Rng& rng) {
    const ParamRiskEval ev =
        eval_param_risk(params, crit, plan, spec, rng, p_fixed);
    if (!(ev.p_ill > 0.0))
        throw UndefinedRatio("mrrr_param: zero illness mass");
    return ev.p_ill_and_met / ev.p_ill;
}

namespace {

// Shared sweep behind posterior_rr and rr_grid: per posterior draw, one
// set of batch/serving draws evaluated under every criterion.
struct SweepResult {
    // [criterion][draw]
    std::vector<std::vector<double>> rr;
    std::vector<std::vector<double>> reject;
    std::vector<std::vector<double>> mrrr;
    std::vector<std::vector<double>> p_met;
    std::vector<std::vector<double>> p_joint;
    std::vector<double> p_ill;  // [draw]
    std::vector<std::int64_t> saturated;  // [draw]
};

SweepResult sweep_posterior(const PosteriorSample& sample,
                            const std::vector<Criterion>& criteria,
                            const MonteCarloPlan& plan, const QmraSpec& spec,
                            std::uint64_t seed, int n_threads) {
    plan.require_valid();
    spec.require_valid();
    for (const auto& crit : criteria) crit.require_valid();
    const std::int64_t n = sample.n_draws();
    if (n == 0) throw std::invalid_argument("empty posterior");
    const std::size_t k = criteria.size();

    SweepResult sw;
    sw.rr.assign(k, std::vector<double>(std::size_t(n)));
    sw.reject.assign(k, std::vector<double>(std::size_t(n)));
    sw.mrrr.assign(k, std::vector<double>(std::size_t(n)));
    sw.p_met.assign(k, std::vector<double>(std::size_t(n)));
    sw.p_joint.assign(k, std::vector<double>(std::size_t(n)));
    sw.p_ill.assign(std::size_t(n), 0.0);
    sw.saturated.assign(std::size_t(n), 0);

    auto eval_draw = [&](std::int64_t i) {
        const CountryParams& cp = sample.draw(i);
        Rng rng = make_rng(seed, {kStreamRisk, std::uint64_t(i)});
        std::int64_t n_sat = 0;
        const auto batches =
            draw_batches(cp, plan, spec, rng, std::nullopt, n_sat);
        sw.saturated[std::size_t(i)] = n_sat;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const ParamRiskEval ev =
                eval_from_batches(cp, criteria[kk], batches, n_sat);
            if (kk == 0) sw.p_ill[std::size_t(i)] = ev.p_ill;
            sw.p_met[kk][std::size_t(i)] = ev.p_met;
            sw.p_joint[kk][std::size_t(i)] = ev.p_ill_and_met;
            sw.reject[kk][std::size_t(i)] = 1.0 - ev.p_met;
            if (ev.p_ill > 0.0 && ev.p_met > 0.0) {
                sw.rr[kk][std::size_t(i)] =
                    (ev.p_ill_and_met / ev.p_met) / ev.p_ill;
                sw.mrrr[kk][std::size_t(i)] = ev.p_ill_and_met / ev.p_ill;
            } else {
                sw.rr[kk][std::size_t(i)] = std::nan("");
                sw.mrrr[kk][std::size_t(i)] = std::nan("");
            }
        }
    };

    const int workers =
        std::max(1, std::min<int>(n_threads, int(std::min<std::int64_t>(
                                      n, std::int64_t(64)))));
    if (workers > 1) {
        std::vector<std::thread> pool;
        std::atomic<std::int64_t> next{0};
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const std::int64_t i = next.fetch_add(1);
                    if (i >= n) return;
                    eval_draw(i);
                }
            });
        for (auto& th : pool) th.join();
    } else {
        for (std::int64_t i = 0; i < n; ++i) eval_draw(i);
    }
    return sw;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? std::nan("")
                     : std::accumulate(v.begin(), v.end(), 0.0) /
                           double(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / double(v.size() - 1));
}

}  // namespace

RrResult posterior_rr(const PosteriorSample& sample, const Criterion& crit,
                      const MonteCarloPlan& plan, const QmraSpec& spec,
                      std::uint64_t seed, int n_threads) {
    const SweepResult sw =
        sweep_posterior(sample, {crit}, plan, spec, seed, n_threads);
    RrResult out;
    const std::int64_t n = sample.n_draws();
    for (std::int64_t i = 0; i < n; ++i) {
        const double rr = sw.rr[0][std::size_t(i)];
        if (std::isnan(rr)) {
            ++out.n_excluded;
            continue;
        }
        out.rr_series.push_back(rr);
        out.reject_series.push_back(sw.reject[0][std::size_t(i)]);
        out.draw_index.push_back(i);
    }
    out.n_saturated =
        std::accumulate(sw.saturated.begin(), sw.saturated.end(),
                        std::int64_t(0));
    if (out.rr_series.empty())
        throw UndefinedRatio("posterior_rr: every draw had zero risk mass");
    out.mean = mean_of(out.rr_series);
    out.reject_mean = mean_of(out.reject_series);
    out.se = sd_of(out.rr_series, out.mean) /
             std::sqrt(double(out.rr_series.size()));
    std::vector<double> sorted = out.rr_series;
    std::sort(sorted.begin(), sorted.end());
    out.lo = quantile_type7_sorted(sorted.data(), sorted.size(), 0.025);
    out.hi = quantile_type7_sorted(sorted.data(), sorted.size(), 0.975);
    return out;
}

RprResult rpr(const PosteriorSample& sample, const Criterion& crit,
              const MonteCarloPlan& plan, const QmraSpec& spec,
              std::uint64_t seed) {
    crit.require_valid();
    plan.require_valid();
    spec.require_valid();
    const std::int64_t n = sample.n_draws();
    if (n == 0) throw std::invalid_argument("rpr: empty posterior");

    // Collapsed integration order: all unknowns are averaged in the end,
    // so a single batch per posterior draw suffices.
    const MonteCarloPlan one_batch{1, plan.n_servings};
    double s_joint = 0.0, s_met = 0.0, s_ill = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const CountryParams& cp = sample.draw(i);
        Rng rng = make_rng(seed, {kStreamRpr, std::uint64_t(i)});
        std::int64_t n_sat = 0;
        const auto batches =
            draw_batches(cp, one_batch, spec, rng, std::nullopt, n_sat);
        const ParamRiskEval ev = eval_from_batches(cp, crit, batches, n_sat);
        s_joint += ev.p_ill_and_met;
        s_met += ev.p_met;
        s_ill += ev.p_ill;
    }
    RprResult out;
    out.p_ill = s_ill / double(n);
    out.p_met = s_met / double(n);
    out.p_ill_given_met =
        out.p_met > 0.0 ? (s_joint / double(n)) / out.p_met : 0.0;
    if (!(out.p_ill > 0.0) || !(out.p_met > 0.0))
        throw UndefinedRatio("rpr: zero illness or acceptance mass");
    out.rpr = out.p_ill_given_met / out.p_ill;
    return out;
}

RiskGrid rr_grid(const PosteriorSample& sample,
                 const std::vector<Criterion>& criteria,
                 const MonteCarloPlan& plan, const QmraSpec& spec,
                 std::uint64_t seed, int n_threads) {
    if (criteria.empty())
        throw std::invalid_argument("rr_grid: empty criteria list");
    const SweepResult sw =
        sweep_posterior(sample, criteria, plan, spec, seed, n_threads);

    RiskGrid grid;
    grid.rr_series = sw.rr;
    grid.reject_series = sw.reject;
    const std::int64_t n_sat_total = std::accumulate(
        sw.saturated.begin(), sw.saturated.end(), std::int64_t(0));

    for (std::size_t k = 0; k < criteria.size(); ++k) {
        RiskGridCell cell;
        cell.criterion = criteria[k];
        std::vector<double> rr_ok;
        std::vector<double> mrrr_ok;
        for (std::size_t i = 0; i < sw.rr[k].size(); ++i) {
            if (std::isnan(sw.rr[k][i])) {
                ++cell.n_excluded;
                continue;
            }
            rr_ok.push_back(sw.rr[k][i]);
            mrrr_ok.push_back(sw.mrrr[k][i]);
        }
        cell.reject_pct_mean = 100.0 * mean_of(sw.reject[k]);
        cell.n_saturated = n_sat_total;
        if (!rr_ok.empty()) {
            cell.rr_mean = mean_of(rr_ok);
            cell.mrrr_mean = mean_of(mrrr_ok);
            cell.mc_se = sd_of(rr_ok, cell.rr_mean) /
                         std::sqrt(double(rr_ok.size()));
            std::vector<double> sorted = rr_ok;
            std::sort(sorted.begin(), sorted.end());
            cell.rr_lo =
                quantile_type7_sorted(sorted.data(), sorted.size(), 0.025);
            cell.rr_hi =
                quantile_type7_sorted(sorted.data(), sorted.size(), 0.975);
        } else {
            cell.rr_mean = cell.rr_lo = cell.rr_hi = std::nan("");
            cell.mrrr_mean = cell.mc_se = std::nan("");
        }
        // Integrated-then-ratioed measure from the same sweep.
        const double a = mean_of(sw.p_joint[k]);
        const double b = mean_of(sw.p_met[k]);
        const double c = mean_of(sw.p_ill);
        cell.rpr = (b > 0.0 && c > 0.0) ? (a / b) / c : std::nan("");
        grid.cells.push_back(std::move(cell));
    }
    return grid;
}

std::vector<Criterion> default_criteria_grid() {
    std::vector<Criterion> out;
    for (double m : {1000.0, 100.0})
        for (std::int64_t n : {std::int64_t(5), std::int64_t(10)})
            for (std::int64_t c = 0; c <= 4; ++c)
                out.push_back(Criterion{n, c, m});
    return out;
}

}  // namespace batchrisk
