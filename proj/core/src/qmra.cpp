#include "batchrisk/qmra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace batchrisk {

double DistSpec::sample(Rng& rng) const {
    switch (kind) {
        case Kind::fixed:
            return lo;
        case Kind::uniform:
            return std::uniform_real_distribution<double>(lo, hi)(rng);
        case Kind::log_uniform: {
            std::uniform_real_distribution<double> u(std::log(lo),
                                                     std::log(hi));
            return std::exp(u(rng));
        }
    }
    throw std::logic_error("DistSpec: bad kind");
}

void DistSpec::require_valid() const {
    switch (kind) {
        case Kind::fixed:
            return;
        case Kind::uniform:
            if (!(lo <= hi))
                throw std::invalid_argument("DistSpec: need lo <= hi");
            return;
        case Kind::log_uniform:
            if (!(lo > 0.0 && lo <= hi))
                throw std::invalid_argument(
                    "DistSpec: log_uniform needs 0 < lo <= hi");
            return;
    }
}

double DoseResponse::p_ill(std::int64_t dose) const {
    if (dose <= 0) return 0.0;
    switch (kind) {
        case Kind::beta_poisson:
            return scale * (1.0 - std::pow(1.0 + double(dose) / b, -a));
        case Kind::step:
            return dose >= threshold ? scale : 0.0;
    }
    throw std::logic_error("DoseResponse: bad kind");
}

void DoseResponse::require_valid() const {
    if (!(scale > 0.0 && scale <= 1.0))
        throw std::invalid_argument("DoseResponse: scale in (0,1]");
    if (kind == Kind::beta_poisson && !(a > 0.0 && b > 0.0))
        throw std::invalid_argument("DoseResponse: need a, b > 0");
    if (kind == Kind::step && threshold < 1)
        throw std::invalid_argument("DoseResponse: threshold >= 1");
}

void QmraSpec::require_valid() const {
    serving_weight.require_valid();
    transfer.require_valid();
    dose_response.require_valid();
    if (!(max_expected_cells > 0.0) || binomial_exact_limit < 1)
        throw std::invalid_argument("QmraSpec: bad limits");
}

ServingParams draw_serving(const BatchParams& batch, double sigma_w,
                           const QmraSpec& spec, Rng& rng) {
    if (!batch.contaminated)
        throw std::invalid_argument(
            "draw_serving: servings from clean batches carry zero risk and "
            "are short-circuited by callers");
    ServingParams s;
    s.y_c = std::normal_distribution<double>(batch.mu_batch, sigma_w)(rng);
    s.w = spec.serving_weight.sample(rng);

    double expected = s.w * std::pow(10.0, s.y_c);
    if (!(expected >= 0.0)) expected = 0.0;
    if (expected > spec.max_expected_cells) {
        expected = spec.max_expected_cells;
        s.saturated = true;
    }
    s.n_c = std::poisson_distribution<std::int64_t>(expected)(rng);

    s.r = spec.transfer.sample(rng);
    if (s.r <= 0.0) {
        s.d = 0;
    } else if (s.r >= 1.0) {
        s.d = s.n_c;
    } else if (s.n_c <= spec.binomial_exact_limit) {
        s.d = std::binomial_distribution<std::int64_t>(s.n_c, s.r)(rng);
    } else {
        const double mean = double(s.n_c) * s.r;
        const double sd = std::sqrt(mean * (1.0 - s.r));
        const double approx =
            std::round(std::normal_distribution<double>(mean, sd)(rng));
        s.d = std::clamp<std::int64_t>(std::int64_t(approx), 0, s.n_c);
    }
    return s;
}

double p_ill_given_dose(std::int64_t dose, const QmraSpec& spec) {
    return spec.dose_response.p_ill(dose);
}

double p_ill_serving_mc(const BatchParams& batch, double sigma_w,
                        const QmraSpec& spec, std::int64_t n_servings,
                        Rng& rng) {
    if (n_servings < 1)
        throw std::invalid_argument("p_ill_serving_mc: need M >= 1");
    if (!batch.contaminated || batch.p_within <= 0.0) return 0.0;
    double acc = 0.0;
    for (std::int64_t m = 0; m < n_servings; ++m)
        acc += p_ill_given_dose(draw_serving(batch, sigma_w, spec, rng).d, spec);
    return batch.p_within * acc / double(n_servings);
}

namespace {

using nlohmann::json;

json dist_to_json(const DistSpec& d) {
    switch (d.kind) {
        case DistSpec::Kind::fixed:
            return json{{"kind", "fixed"}, {"value", d.lo}};
        case DistSpec::Kind::uniform:
            return json{{"kind", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
        case DistSpec::Kind::log_uniform:
            return json{{"kind", "log_uniform"}, {"lo", d.lo}, {"hi", d.hi}};
    }
    throw std::logic_error("DistSpec: bad kind");
}

DistSpec dist_from_json(const json& j) {
    DistSpec d;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "fixed") {
        d.kind = DistSpec::Kind::fixed;
        d.lo = d.hi = j.at("value").get<double>();
    } else if (kind == "uniform" || kind == "log_uniform") {
        d.kind = kind == "uniform" ? DistSpec::Kind::uniform
                                   : DistSpec::Kind::log_uniform;
        d.lo = j.at("lo").get<double>();
        d.hi = j.at("hi").get<double>();
    } else {
        throw std::invalid_argument("DistSpec: unknown kind " + kind);
    }
    return d;
}

}  // namespace

std::string qmra_spec_to_json_text(const QmraSpec& spec) {
    json dr;
    if (spec.dose_response.kind == DoseResponse::Kind::beta_poisson)
        dr = json{{"kind", "beta_poisson"},
                  {"a", spec.dose_response.a},
                  {"b", spec.dose_response.b},
                  {"scale", spec.dose_response.scale}};
    else
        dr = json{{"kind", "step"},
                  {"threshold", spec.dose_response.threshold},
                  {"scale", spec.dose_response.scale}};
    json j{{"version", spec.version},
           {"serving_weight_g", dist_to_json(spec.serving_weight)},
           {"transfer_probability", dist_to_json(spec.transfer)},
           {"dose_response", dr},
           {"max_expected_cells", spec.max_expected_cells},
           {"binomial_exact_limit", spec.binomial_exact_limit}};
    return j.dump(2) + "\n";
}

QmraSpec qmra_spec_from_json_text(const std::string& text) {
    json j = json::parse(text);
    QmraSpec spec;
    if (j.contains("version")) spec.version = j["version"].get<int>();
    if (j.contains("serving_weight_g"))
        spec.serving_weight = dist_from_json(j["serving_weight_g"]);
    if (j.contains("transfer_probability"))
        spec.transfer = dist_from_json(j["transfer_probability"]);
    if (j.contains("dose_response")) {
        const json& dr = j["dose_response"];
        const std::string kind = dr.at("kind").get<std::string>();
        if (kind == "beta_poisson") {
            spec.dose_response.kind = DoseResponse::Kind::beta_poisson;
            spec.dose_response.a = dr.at("a").get<double>();
            spec.dose_response.b = dr.at("b").get<double>();
        } else if (kind == "step") {
            spec.dose_response.kind = DoseResponse::Kind::step;
            spec.dose_response.threshold =
                dr.at("threshold").get<std::int64_t>();
        } else {
            throw std::invalid_argument("DoseResponse: unknown kind " + kind);
        }
        if (dr.contains("scale"))
            spec.dose_response.scale = dr["scale"].get<double>();
    }
    if (j.contains("max_expected_cells"))
        spec.max_expected_cells = j["max_expected_cells"].get<double>();
    if (j.contains("binomial_exact_limit"))
        spec.binomial_exact_limit =
            j["binomial_exact_limit"].get<std::int64_t>();
    spec.require_valid();
    return spec;
}

QmraSpec load_qmra_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open QMRA spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return qmra_spec_from_json_text(ss.str());
}

}  // namespace batchrisk
