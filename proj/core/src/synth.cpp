#include "batchrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "batchrisk/dists.hpp"
#include "batchrisk/model.hpp"
#include "batchrisk/rng.hpp"

namespace batchrisk {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727417803297;

double draw_normal(Rng& rng, double mean, double sd) {
    if (!(sd > 0.0)) return mean;
    return std::normal_distribution<double>(mean, sd)(rng);
}

double draw_beta(Rng& rng, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    return x / (x + gb(rng));
}

}  // namespace

void GroundTruth::require_valid() const {
    const CountryParams& p = params;
    if (!(p.q >= 0.0 && p.q <= 1.0 && p.sigma_b >= 0.0 && p.sigma_w >= 0.0 &&
          p.alpha > 0.0))
        throw std::invalid_argument("GroundTruth: parameters outside support");
    if (n_baseline_batches < 0)
        throw std::invalid_argument("GroundTruth: negative batch count");
    for (std::int64_t s : batch_plan)
        if (s < 1)
            throw std::invalid_argument("GroundTruth: batch sizes must be >= 1");
}

GroundTruth calibrated_default() {
    GroundTruth t;
    t.params = CountryParams{0.15, 2.4, 0.66, 0.74, 85.0};
    t.n_baseline_batches = 617;
    t.batch_plan = {5,  6,  7,  8,  9,  10, 11, 12, 13, 14,
                    16, 17, 18, 19, 20, 21, 22, 23, 24, 25};
    return t;
}

SynthResult generate(const GroundTruth& truth, std::uint64_t seed) {
    truth.require_valid();
    const CountryParams& tp = truth.params;
    SynthResult out;

    Rng rng = make_rng(seed, {kStreamSynthBaseline});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    out.baseline.n_batches = truth.n_baseline_batches;
    for (std::int64_t j = 0; j < truth.n_baseline_batches; ++j) {
        BaselineRow row;
        row.batch_id = j + 1;
        if (unif(rng) < tp.q) {
            const double p = draw_beta(rng, tp.alpha, 2.0);
            const double mu_j = draw_normal(rng, tp.mu, tp.sigma_b);
            if (unif(rng) < p) {
                row.positive = true;
                row.log10_adjusted = draw_normal(rng, mu_j, tp.sigma_w);
            }
        }
        if (row.positive) {
            ++out.baseline.n_positive;
            out.baseline.log_concentrations.push_back(row.log10_adjusted);
        }
        out.baseline_rows.push_back(row);
    }

    Rng srng = make_rng(seed, {kStreamSynthSummaries});
    for (std::int64_t size : truth.batch_plan) {
        BatchSummary b;
        b.n_sampled = size;
        for (;;) {
            const double p = draw_beta(srng, tp.alpha, 2.0);
            const double mu_j = draw_normal(srng, tp.mu, tp.sigma_b);
            const std::int64_t x =
                std::binomial_distribution<std::int64_t>(size, p)(srng);
            if (x == 0) {
                ++out.regenerated_batches;
                continue;
            }
            std::vector<double> ys(static_cast<std::size_t>(x));
            for (auto& y : ys) y = draw_normal(srng, mu_j, tp.sigma_w);
            const double mean =
                std::accumulate(ys.begin(), ys.end(), 0.0) / double(x);
            b.n_positive = x;
            b.mean_log = mean;
            if (x >= 2) {
                double ss = 0.0;
                for (double y : ys) ss += (y - mean) * (y - mean);
                b.sd_log = std::sqrt(ss / double(x - 1));
            }
            break;
        }
        out.summaries.batches.push_back(b);
    }
    return out;
}

std::int64_t GridSpec::n_cells() const {
    std::int64_t total = 1;
    for (const auto& ax : axes) total *= ax.n;
    return total;
}

std::vector<double> GridPosterior::axis_points(std::size_t axis) const {
    const GridAxis& ax = spec.axes.at(axis);
    std::vector<double> pts(std::size_t(ax.n));
    for (std::int64_t i = 0; i < ax.n; ++i)
        pts[std::size_t(i)] =
            ax.lo + (ax.hi - ax.lo) * double(i) / double(ax.n - 1);
    return pts;
}

namespace {

// Trapezoid weight along one axis.
double trap_weight(const GridAxis& ax, std::int64_t i) {
    const double h = (ax.hi - ax.lo) / double(ax.n - 1);
    return (i == 0 || i == ax.n - 1) ? 0.5 * h : h;
}

}  // namespace

std::vector<double> GridPosterior::marginal_density(std::size_t axis) const {
    const auto& axes = spec.axes;
    const std::size_t na = axes.size();
    std::vector<double> acc(std::size_t(axes[axis].n), 0.0);

    const double max_ld =
        *std::max_element(log_density.begin(), log_density.end());
    std::vector<std::int64_t> idx(na, 0);
    for (std::size_t cell = 0; cell < log_density.size(); ++cell) {
        double w = 1.0;
        for (std::size_t a = 0; a < na; ++a)
            if (a != axis) w *= trap_weight(axes[a], idx[a]);
        acc[std::size_t(idx[axis])] += w * std::exp(log_density[cell] - max_ld);
        for (std::size_t a = na; a-- > 0;) {
            if (++idx[a] < axes[a].n) break;
            idx[a] = 0;
        }
    }
    // Normalize so the marginal integrates to 1 along its own axis.
    double z = 0.0;
    for (std::int64_t i = 0; i < axes[axis].n; ++i)
        z += trap_weight(axes[axis], i) * acc[std::size_t(i)];
    for (auto& v : acc) v /= z;
    return acc;
}

std::pair<std::vector<double>, std::vector<double>> GridPosterior::marginal_cdf(
    std::size_t axis) const {
    const std::vector<double> pts = axis_points(axis);
    const std::vector<double> dens = marginal_density(axis);
    std::vector<double> cdf(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        cdf[i] = cdf[i - 1] +
                 0.5 * (dens[i] + dens[i - 1]) * (pts[i] - pts[i - 1]);
    const double total = cdf.back();
    for (auto& v : cdf) v /= total;
    return {pts, cdf};
}

namespace {

struct OracleProblem {
    ModelKind model;
    const BaselineSurvey* baseline = nullptr;
    const PositiveBatchSummaries* summaries = nullptr;
    PriorSpec priors;
    double sum_y = 0.0, ss_y = 0.0, ybar = 0.0;

    // Latent-marginalized log posterior at a full parameter point.
    double log_post(const CountryParams& cp) const {
        double lp = log_prior(cp, priors);
        if (lp == kNegInf) return kNegInf;
        if (baseline) {
            const double theta = model == ModelKind::baseline_only
                                     ? cp.q
                                     : cp.q * cp.alpha / (cp.alpha + 2.0);
            lp += log_binomial_pmf(baseline->n_positive, baseline->n_batches,
                                   theta);
            const double np = double(baseline->n_positive);
            const double var_tot =
                cp.sigma_b * cp.sigma_b + cp.sigma_w * cp.sigma_w;
            const double dev = ybar - cp.mu;
            lp += -np * (kHalfLog2Pi + 0.5 * std::log(var_tot)) -
                  (ss_y + np * dev * dev) / (2.0 * var_tot);
        }
        if (summaries) {
            const double tau_w = cp.tau_w();
            const double log_beta_a2 =
                -std::log(cp.alpha) - std::log(cp.alpha + 1.0);
            for (const auto& b : summaries->batches) {
                // p_j integrated: Beta-Binomial(x | N, alpha, 2).
                const double lbeta_post =
                    std::lgamma(double(b.n_positive) + cp.alpha) +
                    std::lgamma(double(b.n_sampled - b.n_positive) + 2.0) -
                    std::lgamma(double(b.n_sampled) + cp.alpha + 2.0);
                lp += log_choose(b.n_sampled, b.n_positive) + lbeta_post -
                      log_beta_a2;
                // mu_j integrated: ybar_j ~ N(mu, sigma_b^2 + sigma_w^2/x).
                const double sd = std::sqrt(cp.sigma_b * cp.sigma_b +
                                            cp.sigma_w * cp.sigma_w /
                                                double(b.n_positive));
                lp += log_normal_pdf(b.mean_log, cp.mu, sd);
                if (b.n_positive >= 2) {
                    const double dof = double(b.n_positive - 1);
                    const double scatter = dof * (*b.sd_log) * (*b.sd_log);
                    lp += log_gamma_pdf(scatter, 0.5 * dof, 0.5 * tau_w);
                }
                if (lp == kNegInf) return kNegInf;
            }
        }
        return lp;
    }
};

}  // namespace

GridPosterior grid_posterior_oracle(ModelKind model, const SurveyData& data,
                                    const PriorSpec& priors,
                                    const GridSpec& grid) {
    priors.require_valid();
    for (const auto& ax : grid.axes) {
        if (ax.n < 2 || !(ax.lo < ax.hi))
            throw std::invalid_argument("grid axis needs n >= 2 and lo < hi");
    }
    if (grid.n_cells() > 1000000)
        throw std::invalid_argument("grid too large (> 1e6 cells)");

    std::vector<std::string> required;
    switch (model) {
        case ModelKind::baseline_only:
            required = {"q", "mu", "sigma_b", "sigma_w"};
            break;
        case ModelKind::positives_only:
            required = {"mu", "sigma_b", "sigma_w", "alpha"};
            break;
        case ModelKind::combined:
            required = {"q", "mu", "sigma_b", "sigma_w", "alpha"};
            break;
    }
    if (grid.axes.size() != required.size())
        throw std::invalid_argument("grid must span the model's parameters");
    for (const auto& name : required) {
        bool found = false;
        for (const auto& ax : grid.axes) found |= ax.name == name;
        if (!found)
            throw std::invalid_argument("grid is missing axis " + name);
    }

    OracleProblem pb;
    pb.model = model;
    pb.priors = priors;
    if (!data.empty()) {
        const bool want_baseline = model != ModelKind::positives_only;
        const bool want_summaries = model != ModelKind::baseline_only;
        if (want_baseline != data.baseline.has_value() ||
            want_summaries != data.summaries.has_value())
            throw std::invalid_argument(
                "grid_posterior_oracle: data shape does not match model");
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
    }

    GridPosterior out;
    out.spec = grid;
    out.log_density.resize(std::size_t(grid.n_cells()));

    const std::size_t na = grid.axes.size();
    std::vector<std::vector<double>> pts(na);
    for (std::size_t a = 0; a < na; ++a) pts[a] = out.axis_points(a);

    std::vector<std::int64_t> idx(na, 0);
    for (std::size_t cell = 0; cell < out.log_density.size(); ++cell) {
        CountryParams cp;
        cp.q = 0.5;
        cp.alpha = 0.5 * priors.alpha_upper;
        for (std::size_t a = 0; a < na; ++a) {
            const double v = pts[a][std::size_t(idx[a])];
            const std::string& name = grid.axes[a].name;
            if (name == "q")
                cp.q = v;
            else if (name == "mu")
                cp.mu = v;
            else if (name == "sigma_b")
                cp.sigma_b = v;
            else if (name == "sigma_w")
                cp.sigma_w = v;
            else if (name == "alpha")
                cp.alpha = v;
            else
                throw std::invalid_argument("unknown grid axis " + name);
        }
        out.log_density[cell] = pb.log_post(cp);
        for (std::size_t a = na; a-- > 0;) {
            if (++idx[a] < grid.axes[a].n) break;
            idx[a] = 0;
        }
    }

    const double max_ld =
        *std::max_element(out.log_density.begin(), out.log_density.end());
    if (!std::isfinite(max_ld))
        throw std::runtime_error("grid posterior has zero density everywhere");
    double z = 0.0;
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t cell = 0; cell < out.log_density.size(); ++cell) {
        double w = 1.0;
        for (std::size_t a = 0; a < na; ++a) w *= trap_weight(grid.axes[a], idx[a]);
        z += w * std::exp(out.log_density[cell] - max_ld);
        for (std::size_t a = na; a-- > 0;) {
            if (++idx[a] < grid.axes[a].n) break;
            idx[a] = 0;
        }
    }
    out.log_norm = std::log(z) + max_ld;
    return out;
}

}  // namespace batchrisk
