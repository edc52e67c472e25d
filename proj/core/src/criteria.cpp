#include "batchrisk/criteria.hpp"

#include <cmath>
#include <stdexcept>

#include "batchrisk/dists.hpp"
#include "batchrisk/rng.hpp"

namespace batchrisk {

double p_sample_exceeds(const BatchParams& batch, double sigma_w, double m) {
    if (!(sigma_w > 0.0))
        throw std::invalid_argument("p_sample_exceeds: sigma_w > 0 required");
    if (!(m > 0.0))
        throw std::invalid_argument("p_sample_exceeds: m > 0 required");
    if (!batch.contaminated) return 0.0;
    const double z = (std::log10(m) - batch.mu_batch) / sigma_w;
    return batch.p_within * (1.0 - normal_cdf(z));
}

double p_mc_met(const BatchParams& batch, double sigma_w,
                const Criterion& crit) {
    crit.require_valid();
    if (!batch.contaminated) return 1.0;
    return binomial_cdf(crit.c, crit.n, p_sample_exceeds(batch, sigma_w, crit.m));
}

void WeightedBatchDraws::require_normalizable() const {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0))
        throw DegenerateConditioning(
            "conditioning weights are identically zero for status " +
            to_string(status));
}

WeightedBatchDraws conditional_batch_draws(const PosteriorSample& posterior,
                                           McStatus status,
                                           const Criterion& crit,
                                           std::int64_t n_batches_per_draw,
                                           std::uint64_t seed) {
    crit.require_valid();
    if (n_batches_per_draw < 1)
        throw std::invalid_argument("conditional_batch_draws: need L >= 1");
    const std::int64_t n = posterior.n_draws();
    if (n == 0)
        throw std::invalid_argument("conditional_batch_draws: empty posterior");

    WeightedBatchDraws out;
    out.status = status;
    out.draws.reserve(std::size_t(n * n_batches_per_draw));
    out.weights.reserve(out.draws.capacity());
    out.met_prob.reserve(out.draws.capacity());

    for (std::int64_t i = 0; i < n; ++i) {
        const CountryParams& cp = posterior.draw(i);
        Rng rng = make_rng(seed, {kStreamConditional, std::uint64_t(i)});
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> z(0.0, 1.0);
        std::gamma_distribution<double> ga(cp.alpha, 1.0);
        std::gamma_distribution<double> gb(2.0, 1.0);
        for (std::int64_t l = 0; l < n_batches_per_draw; ++l) {
            BatchParams b;
            b.contaminated = unif(rng) < cp.q;
            const double x = ga(rng);
            b.p_within = x / (x + gb(rng));
            b.mu_batch = cp.mu + cp.sigma_b * z(rng);
            const double met = p_mc_met(b, cp.sigma_w, crit);
            double w = 1.0;
            if (status == McStatus::met)
                w = met;
            else if (status == McStatus::not_met)
                w = 1.0 - met;
            out.draws.push_back(b);
            out.weights.push_back(w);
            out.met_prob.push_back(met);
        }
    }
    out.require_normalizable();

    double sw = 0.0, sw2 = 0.0;
    for (double w : out.weights) {
        sw += w;
        sw2 += w * w;
    }
    out.weight_ess = sw * sw / sw2;
    return out;
}

ConditionalReport conditional_summaries(const WeightedBatchDraws& draws) {
    draws.require_normalizable();
    double sw = 0.0, s_contam = 0.0, s_mu = 0.0;
    double sw_contam = 0.0, s_mu_contam = 0.0, s_p_contam = 0.0;
    double s_met = 0.0;
    const std::size_t n = draws.draws.size();
    for (std::size_t i = 0; i < n; ++i) {
        const BatchParams& b = draws.draws[i];
        const double w = draws.weights[i];
        sw += w;
        s_mu += w * b.mu_batch;
        s_met += draws.met_prob[i];
        if (b.contaminated) {
            s_contam += w;
            sw_contam += w;
            s_mu_contam += w * b.mu_batch;
            s_p_contam += w * b.p_within;
        }
    }
    ConditionalReport rep;
    rep.status = draws.status;
    rep.p_contaminated = s_contam / sw;
    rep.e_mu = s_mu / sw;
    rep.e_mu_given_contaminated =
        sw_contam > 0.0 ? s_mu_contam / sw_contam : std::nan("");
    rep.e_p_within_contaminated =
        sw_contam > 0.0 ? s_p_contam / sw_contam : std::nan("");
    rep.p_met = s_met / double(n);
    rep.weight_ess = draws.weight_ess;
    rep.low_ess_warning = draws.weight_ess < 50.0;
    return rep;
}

}  // namespace batchrisk
