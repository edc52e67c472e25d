#include "batchrisk/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "batchrisk/dists.hpp"
#include "batchrisk/model.hpp"
#include "batchrisk/rng.hpp"

namespace batchrisk {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727417803297;

double logit(double p) { return std::log(p / (1.0 - p)); }
double inv_logit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Scalar blocks updated by random-walk Metropolis, in update order.
enum Block : int {
    kQ = 0,
    kMu = 1,
    kSigmaB = 2,
    kSigmaW = 3,
    kAlpha = 4,
    kPWithin = 5,    // shared scale across the latent p_j updates
    kMuBatch = 6,    // exact Gibbs; reported with acceptance 1
    kBaselineMu = 7  // exact Gibbs (latent-means mode)
};

struct SummariesCache {
    // Per batch: constants of the scatter term and the mean term.
    std::vector<double> dof;       // x - 1 (0 when x == 1)
    std::vector<double> scatter;   // (x-1) * sd^2
    std::vector<double> sqrt_x;
    std::vector<double> lgamma_half_dof;
    std::vector<double> log_scatter;
};

struct Problem {
    ModelKind model;
    bool assume_full_prevalence;
    bool baseline_latent;
    const BaselineSurvey* baseline = nullptr;
    const PositiveBatchSummaries* summaries = nullptr;
    PriorSpec priors;

    // Baseline sufficient statistics for the marginalized likelihood.
    double sum_y = 0.0;
    double ss_y = 0.0;  // sum of (y - ybar)^2
    double ybar = 0.0;
    SummariesCache sc;

    std::int64_t n_summary_batches() const {
        return summaries ? summaries->n_batches() : 0;
    }
};

struct State {
    CountryParams cp;
    std::vector<double> mu_b;     // summaries batch means
    std::vector<double> p;        // summaries within-batch prevalences
    std::vector<double> base_mu;  // baseline batch means (latent mode)
};

Problem make_problem(ModelKind model, const SurveyData& data,
                     const PriorSpec& priors, const McmcConfig& cfg) {
    Problem pb;
    pb.model = model;
    pb.priors = priors;
    pb.assume_full_prevalence = (model == ModelKind::baseline_only);
    pb.baseline_latent = cfg.baseline_latent_means;

    const bool want_baseline = model != ModelKind::positives_only;
    const bool want_summaries = model != ModelKind::baseline_only;
    if (!data.empty()) {
        if (want_baseline != data.baseline.has_value() ||
            want_summaries != data.summaries.has_value())
            throw std::invalid_argument(
                "fit: data shape does not match the model choice");
    }
    if (data.baseline) {
        data.baseline->require_valid();
        pb.baseline = &*data.baseline;
        const auto& ys = pb.baseline->log_concentrations;
        pb.sum_y = std::accumulate(ys.begin(), ys.end(), 0.0);
        pb.ybar = ys.empty() ? 0.0 : pb.sum_y / double(ys.size());
        for (double y : ys) pb.ss_y += (y - pb.ybar) * (y - pb.ybar);
    }
    if (data.summaries) {
        data.summaries->require_valid();
        pb.summaries = &*data.summaries;
        for (const auto& b : pb.summaries->batches) {
            const double dof = double(b.n_positive - 1);
            const double sd = b.sd_log.value_or(0.0);
            pb.sc.dof.push_back(dof);
            pb.sc.scatter.push_back(dof * sd * sd);
            pb.sc.sqrt_x.push_back(std::sqrt(double(b.n_positive)));
            pb.sc.lgamma_half_dof.push_back(
                dof > 0.0 ? std::lgamma(0.5 * dof) : 0.0);
            pb.sc.log_scatter.push_back(
                pb.sc.scatter.back() > 0.0 ? std::log(pb.sc.scatter.back())
                                           : kNegInf);
        }
    }
    return pb;
}

// Log target over the country parameters with latents held fixed.
// Transform Jacobians are handled per block in the Metropolis step.
double country_log_target(const Problem& pb, const State& st) {
    const CountryParams& cp = st.cp;
    double lp = log_prior(cp, pb.priors);
    if (lp == kNegInf) return kNegInf;

    if (pb.baseline) {
        const double theta = pb.assume_full_prevalence
                                 ? cp.q
                                 : cp.q * cp.alpha / (cp.alpha + 2.0);
        lp += log_binomial_pmf(pb.baseline->n_positive, pb.baseline->n_batches,
                               theta);
        const double np = double(pb.baseline->n_positive);
        if (!pb.baseline_latent) {
            const double var_tot =
                cp.sigma_b * cp.sigma_b + cp.sigma_w * cp.sigma_w;
            const double dev = pb.ybar - cp.mu;
            lp += -np * (kHalfLog2Pi + 0.5 * std::log(var_tot)) -
                  (pb.ss_y + np * dev * dev) / (2.0 * var_tot);
        } else {
            const auto& ys = pb.baseline->log_concentrations;
            for (std::size_t k = 0; k < ys.size(); ++k) {
                lp += log_normal_pdf(ys[k], st.base_mu[k], cp.sigma_w);
                lp += log_normal_pdf(st.base_mu[k], cp.mu, cp.sigma_b);
            }
        }
    }
    if (pb.summaries) {
        const double tau_w = cp.tau_w();
        const double log_tau_w = std::log(tau_w);
        for (std::size_t j = 0; j < pb.summaries->batches.size(); ++j) {
            const BatchSummary& b = pb.summaries->batches[j];
            lp += log_normal_pdf(b.mean_log, st.mu_b[j],
                                 cp.sigma_w / pb.sc.sqrt_x[j]);
            if (pb.sc.dof[j] > 0.0) {
                if (pb.sc.scatter[j] <= 0.0) return kNegInf;
                const double half_dof = 0.5 * pb.sc.dof[j];
                lp += half_dof * (log_tau_w - std::log(2.0)) -
                      pb.sc.lgamma_half_dof[j] +
                      (half_dof - 1.0) * pb.sc.log_scatter[j] -
                      0.5 * tau_w * pb.sc.scatter[j];
            }
            lp += log_normal_pdf(st.mu_b[j], cp.mu, cp.sigma_b);
            lp += log_beta_pdf(st.p[j], cp.alpha, 2.0);
            lp += log_binomial_pmf(b.n_positive, b.n_sampled, st.p[j]);
            if (lp == kNegInf) return kNegInf;
        }
    }
    return lp;
}

double block_jacobian(int block, const CountryParams& cp) {
    switch (block) {
        case kQ:
            return std::log(cp.q) + std::log1p(-cp.q);
        case kSigmaB:
            return std::log(cp.sigma_b);
        case kSigmaW:
            return std::log(cp.sigma_w);
        case kAlpha:
            return std::log(cp.alpha);
        default:
            return 0.0;
    }
}

double get_transformed(int block, const CountryParams& cp) {
    switch (block) {
        case kQ:
            return logit(cp.q);
        case kMu:
            return cp.mu;
        case kSigmaB:
            return std::log(cp.sigma_b);
        case kSigmaW:
            return std::log(cp.sigma_w);
        case kAlpha:
            return std::log(cp.alpha);
    }
    throw std::logic_error("bad block");
}

CountryParams with_transformed(int block, const CountryParams& cp, double t) {
    CountryParams out = cp;
    switch (block) {
        case kQ:
            out.q = inv_logit(t);
            break;
        case kMu:
            out.mu = t;
            break;
        case kSigmaB:
            out.sigma_b = std::exp(t);
            break;
        case kSigmaW:
            out.sigma_w = std::exp(t);
            break;
        case kAlpha:
            out.alpha = std::exp(t);
            break;
    }
    return out;
}

struct BlockAdapt {
    double log_scale = std::log(0.5);
    std::int64_t window_proposals = 0;
    std::int64_t window_accepts = 0;
    std::int64_t windows_done = 0;
    std::int64_t post_proposals = 0;
    std::int64_t post_accepts = 0;

    double scale() const { return std::exp(log_scale); }
    void adapt(double target) {
        if (window_proposals == 0) return;
        const double rate =
            double(window_accepts) / double(window_proposals);
        ++windows_done;
        const double step = std::min(1.0, 3.0 / std::sqrt(double(windows_done)));
        log_scale += step * (rate - target);
        log_scale = std::clamp(log_scale, -12.0, 12.0);
        window_proposals = window_accepts = 0;
    }
};

struct ChainResult {
    ChainDraws draws;
    ChainStats stats;
};

bool is_gibbs_block(int b) { return b == kMuBatch || b == kBaselineMu; }

State initial_state(const Problem& pb, Rng& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    State st;

    double q0 = 0.5, mu0 = 0.0, sd0 = 0.7, alpha0 = 30.0;
    std::vector<double> concs;
    if (pb.baseline) {
        q0 = (double(pb.baseline->n_positive) + 0.5) /
             (double(pb.baseline->n_batches) + 1.0);
        concs.insert(concs.end(), pb.baseline->log_concentrations.begin(),
                     pb.baseline->log_concentrations.end());
    }
    if (pb.summaries)
        for (const auto& b : pb.summaries->batches)
            concs.push_back(b.mean_log);
    if (concs.size() >= 3) {
        double m = std::accumulate(concs.begin(), concs.end(), 0.0) /
                   double(concs.size());
        double ss = 0.0;
        for (double y : concs) ss += (y - m) * (y - m);
        mu0 = m;
        sd0 = std::max(0.1, std::sqrt(ss / double(concs.size() - 1) / 2.0));
    }

    st.cp.q = inv_logit(logit(q0) + 0.5 * z(rng));
    st.cp.mu = mu0 + 0.5 * z(rng);
    st.cp.sigma_b = sd0 * std::exp(0.3 * z(rng));
    st.cp.sigma_w = sd0 * std::exp(0.3 * z(rng));
    st.cp.alpha = std::min(alpha0 * std::exp(0.5 * z(rng)),
                           0.9 * pb.priors.alpha_upper);
    if (pb.priors.variance_prior == VariancePrior::uniform_on_sd) {
        st.cp.sigma_b = std::min(st.cp.sigma_b, 0.9 * pb.priors.sigma_upper);
        st.cp.sigma_w = std::min(st.cp.sigma_w, 0.9 * pb.priors.sigma_upper);
    }

    if (pb.summaries) {
        for (const auto& b : pb.summaries->batches) {
            const double ph = (double(b.n_positive) + 1.0) /
                              (double(b.n_sampled) + 2.0);
            st.p.push_back(inv_logit(logit(ph) + 0.3 * z(rng)));
            st.mu_b.push_back(b.mean_log + 0.3 * z(rng));
        }
    }
    if (pb.baseline && pb.baseline_latent)
        for (double y : pb.baseline->log_concentrations)
            st.base_mu.push_back(y + 0.3 * z(rng));
    return st;
}

ChainResult run_chain(const Problem& pb, const McmcConfig& cfg,
                      std::int64_t chain_index,
                      const std::vector<int>& blocks) {
    Rng rng = make_rng(cfg.seed, {kStreamFit, std::uint64_t(chain_index)});
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    State st = initial_state(pb, rng);
    double lt = country_log_target(pb, st);
    if (lt == kNegInf)
        throw std::runtime_error("fit: initial state has zero density");

    std::vector<BlockAdapt> adapt(8);
    const std::int64_t nj = pb.n_summary_batches();
    const std::int64_t retain = cfg.n_retained_per_chain();

    ChainResult res;
    res.draws.params.reserve(retain);

    auto metropolis_country = [&](int block, bool burnin) {
        BlockAdapt& ba = adapt[block];
        const double t_cur = get_transformed(block, st.cp);
        const double t_prop = t_cur + ba.scale() * z(rng);
        State prop = st;
        prop.cp = with_transformed(block, st.cp, t_prop);
        const double lt_prop = country_log_target(pb, prop);
        const double delta = (lt_prop + block_jacobian(block, prop.cp)) -
                             (lt + block_jacobian(block, st.cp));
        ++ba.window_proposals;
        if (!burnin) ++ba.post_proposals;
        if (delta >= 0.0 || std::log(unif(rng)) < delta) {
            st.cp = prop.cp;
            lt = lt_prop;
            ++ba.window_accepts;
            if (!burnin) ++ba.post_accepts;
        }
    };

    // Latent p_j: only the batch-local binomial and Beta terms move.
    auto update_p_within = [&](bool burnin) {
        BlockAdapt& ba = adapt[kPWithin];
        for (std::int64_t j = 0; j < nj; ++j) {
            const BatchSummary& b = pb.summaries->batches[std::size_t(j)];
            const double p_cur = st.p[std::size_t(j)];
            const double t_prop = logit(p_cur) + ba.scale() * z(rng);
            const double p_prop = inv_logit(t_prop);
            double delta =
                log_binomial_pmf(b.n_positive, b.n_sampled, p_prop) -
                log_binomial_pmf(b.n_positive, b.n_sampled, p_cur) +
                log_beta_pdf(p_prop, st.cp.alpha, 2.0) -
                log_beta_pdf(p_cur, st.cp.alpha, 2.0) +
                std::log(p_prop) + std::log1p(-p_prop) - std::log(p_cur) -
                std::log1p(-p_cur);
            ++ba.window_proposals;
            if (!burnin) ++ba.post_proposals;
            if (delta >= 0.0 || std::log(unif(rng)) < delta) {
                st.p[std::size_t(j)] = p_prop;
                ++ba.window_accepts;
                if (!burnin) ++ba.post_accepts;
            }
        }
    };

    // Latent mu_j is conditionally normal given everything else.
    auto gibbs_mu_batch = [&]() {
        const double tau_b = st.cp.tau_b();
        const double tau_w = st.cp.tau_w();
        for (std::int64_t j = 0; j < nj; ++j) {
            const BatchSummary& b = pb.summaries->batches[std::size_t(j)];
            const double prec = tau_b + double(b.n_positive) * tau_w;
            const double mean = (tau_b * st.cp.mu +
                                 double(b.n_positive) * tau_w * b.mean_log) /
                                prec;
            st.mu_b[std::size_t(j)] = mean + z(rng) / std::sqrt(prec);
        }
    };

    auto gibbs_baseline_mu = [&]() {
        const double tau_b = st.cp.tau_b();
        const double tau_w = st.cp.tau_w();
        const double prec = tau_b + tau_w;
        const auto& ys = pb.baseline->log_concentrations;
        for (std::size_t k = 0; k < ys.size(); ++k) {
            const double mean = (tau_b * st.cp.mu + tau_w * ys[k]) / prec;
            st.base_mu[k] = mean + z(rng) / std::sqrt(prec);
        }
    };

    auto record_scales = [&](std::vector<double>& dst) {
        dst.clear();
        for (int block : blocks)
            dst.push_back(is_gibbs_block(block) ? std::nan("")
                                                : adapt[block].scale());
    };
    if (cfg.n_burnin == 0) record_scales(res.stats.scale_at_burnin_end);

    bool latents_dirty = false;
    for (std::int64_t t = 1; t <= cfg.n_iterations; ++t) {
        const bool burnin = t <= cfg.n_burnin;
        for (int block : blocks) {
            switch (block) {
                case kPWithin:
                    update_p_within(burnin);
                    latents_dirty = true;
                    break;
                case kMuBatch:
                    gibbs_mu_batch();
                    latents_dirty = true;
                    break;
                case kBaselineMu:
                    gibbs_baseline_mu();
                    latents_dirty = true;
                    break;
                default:
                    metropolis_country(block, burnin);
            }
        }
        if (latents_dirty) {
            lt = country_log_target(pb, st);
            latents_dirty = false;
        }

        if (burnin && t % cfg.adapt_window == 0)
            for (int block : blocks)
                if (!is_gibbs_block(block))
                    adapt[block].adapt(cfg.target_accept);

        if (t == cfg.n_burnin) record_scales(res.stats.scale_at_burnin_end);

        if (!burnin && (t - cfg.n_burnin) % cfg.thin == 0 &&
            std::int64_t(res.draws.params.size()) < retain) {
            res.draws.params.push_back(st.cp);
            if (pb.summaries) {
                res.draws.mu_batch.push_back(st.mu_b);
                res.draws.p_within.push_back(st.p);
            }
            if (pb.baseline && pb.baseline_latent)
                res.draws.baseline_mu.push_back(st.base_mu);
        }
    }

    record_scales(res.stats.scale_at_end);
    for (int block : blocks) {
        if (is_gibbs_block(block)) {
            res.stats.accept_rate.push_back(1.0);
            continue;
        }
        const BlockAdapt& ba = adapt[block];
        res.stats.accept_rate.push_back(
            ba.post_proposals > 0
                ? double(ba.post_accepts) / double(ba.post_proposals)
                : 0.0);
    }
    return res;
}

}  // namespace

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::baseline_only:
            return "baseline_only";
        case ModelKind::positives_only:
            return "positives_only";
        case ModelKind::combined:
            return "combined";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "baseline" || s == "baseline_only") return ModelKind::baseline_only;
    if (s == "positives" || s == "positives_only")
        return ModelKind::positives_only;
    if (s == "combined") return ModelKind::combined;
    throw std::invalid_argument("unknown model kind: " + s);
}

void McmcConfig::require_valid() const {
    if (n_burnin < 0 || n_burnin >= n_iterations)
        throw std::invalid_argument("McmcConfig: need 0 <= burnin < iterations");
    if (thin < 1 || n_chains < 1 || adapt_window < 1)
        throw std::invalid_argument("McmcConfig: thin/chains/window >= 1");
    if (!(target_accept > 0.0 && target_accept < 1.0))
        throw std::invalid_argument("McmcConfig: target_accept in (0,1)");
}

std::int64_t PosteriorSample::n_draws() const {
    std::int64_t n = 0;
    for (const auto& c : chains) n += std::int64_t(c.params.size());
    return n;
}

std::int64_t PosteriorSample::draws_per_chain() const {
    return chains.empty() ? 0 : std::int64_t(chains.front().params.size());
}

const CountryParams& PosteriorSample::draw(std::int64_t pooled_index) const {
    for (const auto& c : chains) {
        if (pooled_index < std::int64_t(c.params.size()))
            return c.params[std::size_t(pooled_index)];
        pooled_index -= std::int64_t(c.params.size());
    }
    throw std::out_of_range("PosteriorSample::draw");
}

std::vector<double> PosteriorSample::pooled(const std::string& param) const {
    std::vector<double> out;
    out.reserve(std::size_t(n_draws()));
    for (const auto& c : chains) {
        for (const auto& cp : c.params) {
            if (param == "q")
                out.push_back(cp.q);
            else if (param == "mu")
                out.push_back(cp.mu);
            else if (param == "sigma_b")
                out.push_back(cp.sigma_b);
            else if (param == "sigma_w")
                out.push_back(cp.sigma_w);
            else if (param == "alpha")
                out.push_back(cp.alpha);
            else if (param == "phi")
                out.push_back(cp.phi());
            else
                throw std::invalid_argument("unknown parameter: " + param);
        }
    }
    return out;
}

PosteriorSample fit(ModelKind model, const SurveyData& data,
                    const PriorSpec& priors, const McmcConfig& cfg) {
    cfg.require_valid();
    priors.require_valid();
    const Problem pb = make_problem(model, data, priors, cfg);

    std::vector<int> blocks{kQ, kMu, kSigmaB, kSigmaW, kAlpha};
    if (pb.summaries) {
        blocks.push_back(kPWithin);
        blocks.push_back(kMuBatch);
    }
    if (pb.baseline && pb.baseline_latent) blocks.push_back(kBaselineMu);

    PosteriorSample out;
    out.model = model;
    out.config = cfg;
    for (int b : blocks) {
        static const char* names[] = {"q",       "mu",      "sigma_b",
                                      "sigma_w", "alpha",   "p_within",
                                      "mu_batch", "baseline_mu"};
        out.block_names.push_back(names[b]);
    }

    std::vector<ChainResult> results(std::size_t(cfg.n_chains));
    auto worker = [&](std::int64_t chain) {
        results[std::size_t(chain)] = run_chain(pb, cfg, chain, blocks);
    };
    if (cfg.n_threads > 1 && cfg.n_chains > 1) {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(std::size_t(cfg.n_chains));
        for (std::int64_t c = 0; c < cfg.n_chains; ++c)
            pool.emplace_back([&, c] {
                try {
                    worker(c);
                } catch (...) {
                    errs[std::size_t(c)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::int64_t c = 0; c < cfg.n_chains; ++c) worker(c);
    }

    for (auto& r : results) {
        out.chains.push_back(std::move(r.draws));
        out.chain_stats.push_back(std::move(r.stats));
    }
    out.diag = diagnostics(out);
    out.converged = true;
    for (const auto& d : out.diag)
        if (std::isfinite(d.rhat) && d.rhat > 1.05) out.converged = false;
    return out;
}

std::vector<ParamSummary> summarize(const PosteriorSample& sample) {
    if (sample.n_draws() == 0)
        throw std::invalid_argument("summarize: empty posterior");
    std::vector<ParamSummary> out;
    for (const auto& name : param_names()) {
        std::vector<double> v = sample.pooled(name);
        const double mean =
            std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
        std::sort(v.begin(), v.end());
        out.push_back({name, mean,
                       quantile_type7_sorted(v.data(), v.size(), 0.025),
                       quantile_type7_sorted(v.data(), v.size(), 0.975)});
    }
    return out;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
    if (chains.size() < 2) return std::nan("");
    std::vector<std::vector<double>> halves;
    for (const auto& c : chains) {
        const std::size_t h = c.size() / 2;
        if (h < 2) return std::nan("");
        halves.emplace_back(c.begin(), c.begin() + std::ptrdiff_t(h));
        halves.emplace_back(c.begin() + std::ptrdiff_t(h),
                            c.begin() + std::ptrdiff_t(2 * h));
    }
    const double m = double(halves.size());
    const double n = double(halves.front().size());
    std::vector<double> means;
    double w = 0.0;
    for (const auto& seq : halves) {
        double mu = std::accumulate(seq.begin(), seq.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : seq) ss += (x - mu) * (x - mu);
        means.push_back(mu);
        w += ss / (n - 1.0);
    }
    w /= m;
    const double grand =
        std::accumulate(means.begin(), means.end(), 0.0) / m;
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= n / (m - 1.0);
    if (w <= 0.0) return 1.0;
    const double var_plus = (n - 1.0) / n * w + b / n;
    return std::sqrt(var_plus / w);
}

double ess_autocorr(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 4) return double(n);
    const double mean =
        std::accumulate(series.begin(), series.end(), 0.0) / double(n);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;
    double gamma0 = 0.0;
    for (double x : centered) gamma0 += x * x;
    gamma0 /= double(n);
    if (gamma0 <= 0.0) return double(n);

    auto rho = [&](std::size_t lag) {
        double g = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i)
            g += centered[i] * centered[i + lag];
        return g / double(n) / gamma0;
    };

    // Geyer initial positive + monotone sequence over lag pairs.
    double tau = -1.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        double pair = rho(2 * k) + rho(2 * k + 1);
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        prev_pair = pair;
        tau += 2.0 * pair;
        if (2 * k + 1 >= n / 2) break;
    }
    tau = std::max(tau, 1e-12);
    return double(n) / tau;
}

std::vector<ParamDiagnostic> diagnostics(const PosteriorSample& sample) {
    std::vector<ParamDiagnostic> out;
    for (const auto& name : param_names()) {
        std::vector<std::vector<double>> per_chain;
        for (const auto& chain : sample.chains) {
            std::vector<double> v;
            v.reserve(chain.params.size());
            for (const auto& cp : chain.params) {
                if (name == "q")
                    v.push_back(cp.q);
                else if (name == "mu")
                    v.push_back(cp.mu);
                else if (name == "sigma_b")
                    v.push_back(cp.sigma_b);
                else if (name == "sigma_w")
                    v.push_back(cp.sigma_w);
                else if (name == "alpha")
                    v.push_back(cp.alpha);
                else
                    v.push_back(cp.phi());
            }
            per_chain.push_back(std::move(v));
        }
        double ess = 0.0;
        for (const auto& v : per_chain) ess += ess_autocorr(v);
        out.push_back({name, split_rhat(per_chain), ess});
    }
    return out;
}

}  // namespace batchrisk
