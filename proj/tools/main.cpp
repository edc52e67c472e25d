// Command-line front end: fit, mc-eval, rr-grid, synth, qq.
// Exit codes: 0 ok, 1 numerical failure, 2 input error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "batchrisk/criteria.hpp"
#include "batchrisk/io.hpp"
#include "batchrisk/mcmc.hpp"
#include "batchrisk/model.hpp"
#include "batchrisk/qmra.hpp"
#include "batchrisk/risk.hpp"
#include "batchrisk/synth.hpp"
#include "batchrisk/types.hpp"
#include "batchrisk/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace batchrisk;

namespace {

int default_threads() {
    if (const char* env = std::getenv("BATCHRISK_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out.push_back(' ');
        out += argv[i];
    }
    return out;
}

// Collects outputs and timing for the per-directory manifest.
struct Run {
    std::string out_dir;
    RunManifest manifest;
    std::chrono::steady_clock::time_point started =
        std::chrono::steady_clock::now();
    bool dry_run = false;

    void note_input(const std::string& path) {
        manifest.input_digests[path] = sha256_file(path);
    }
    void emit(const std::string& name, const std::string& content) {
        write_text_file((fs::path(out_dir) / name).string(), content);
        manifest.outputs.push_back(name);
    }
    void finish() {
        manifest.tool_version = kVersion;
        manifest.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          started)
                .count();
        std::sort(manifest.outputs.begin(), manifest.outputs.end());
        write_manifest(out_dir, manifest);
    }
};

Run make_run(const std::string& out_dir, const std::string& command,
             std::uint64_t seed, bool dry_run) {
    Run run;
    run.out_dir = out_dir;
    run.manifest.command = command;
    run.manifest.seed = seed;
    run.dry_run = dry_run;
    if (!dry_run) fs::create_directories(out_dir);
    return run;
}

GroundTruth truth_from_json_file(const std::string& path) {
    const json j = json::parse(read_text_file(path));
    GroundTruth t = calibrated_default();
    if (j.contains("q")) t.params.q = j["q"].get<double>();
    if (j.contains("mu")) t.params.mu = j["mu"].get<double>();
    if (j.contains("sigma_b")) t.params.sigma_b = j["sigma_b"].get<double>();
    if (j.contains("sigma_w")) t.params.sigma_w = j["sigma_w"].get<double>();
    if (j.contains("alpha")) t.params.alpha = j["alpha"].get<double>();
    if (j.contains("n_baseline_batches"))
        t.n_baseline_batches = j["n_baseline_batches"].get<std::int64_t>();
    if (j.contains("batch_plan"))
        t.batch_plan = j["batch_plan"].get<std::vector<std::int64_t>>();
    t.require_valid();
    return t;
}

int cmd_fit(const std::string& command, const std::string& model_name,
            const std::string& baseline_path, const std::string& summaries_path,
            const std::string& out_dir, std::uint64_t seed,
            std::int64_t iterations, std::int64_t burnin, std::int64_t thin,
            std::int64_t chains, const std::string& prior_variance,
            double alpha_upper, double sigma_upper, bool latent_means,
            int threads, bool dry_run) {
    const ModelKind model = model_kind_from_string(model_name);

    SurveyData data;
    Run run = make_run(out_dir, command, seed, dry_run);
    std::vector<std::string> warnings;
    if (!baseline_path.empty()) {
        data.baseline = read_baseline_csv(baseline_path, &warnings);
        if (!dry_run) run.note_input(baseline_path);
    }
    if (!summaries_path.empty()) {
        data.summaries = read_summaries_csv(summaries_path, &warnings);
        if (!dry_run) run.note_input(summaries_path);
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    PriorSpec priors;
    priors.alpha_upper = alpha_upper;
    priors.sigma_upper = sigma_upper;
    if (prior_variance == "uniform-sd")
        priors.variance_prior = VariancePrior::uniform_on_sd;
    else if (prior_variance != "gamma-precision")
        throw std::invalid_argument(
            "--prior-variance must be gamma-precision or uniform-sd");

    McmcConfig cfg;
    cfg.n_iterations = iterations;
    cfg.n_burnin = burnin;
    cfg.thin = thin;
    cfg.n_chains = chains;
    cfg.seed = seed;
    cfg.baseline_latent_means = latent_means;
    cfg.n_threads = threads;
    cfg.require_valid();

    if (dry_run) return 0;

    run.manifest.config = {{"model", model_name},
                           {"iterations", std::to_string(iterations)},
                           {"burnin", std::to_string(burnin)},
                           {"thin", std::to_string(thin)},
                           {"chains", std::to_string(chains)},
                           {"prior_variance", prior_variance},
                           {"alpha_upper", format_double(alpha_upper)},
                           {"baseline_latent_means",
                            latent_means ? "true" : "false"}};

    const PosteriorSample sample = fit(model, data, priors, cfg);
    if (!sample.converged)
        std::cerr << "warning: split R-hat above 1.05 on at least one "
                     "parameter; draws returned anyway\n";

    write_draws_csv((fs::path(out_dir) / "draws.csv").string(), sample);
    run.manifest.outputs.push_back("draws.csv");
    run.emit("summary.json", summary_to_json(sample));
    run.emit("diagnostics.json", diagnostics_to_json(sample));
    run.finish();
    return 0;
}

int cmd_mc_eval(const std::string& command, const std::string& draws_path,
                const std::string& criterion_text, const std::string& status_text,
                const std::string& out_dir, std::int64_t batches_per_draw,
                std::uint64_t seed, bool dry_run) {
    const Criterion crit = Criterion::parse(criterion_text);
    const McStatus status = mc_status_from_string(status_text);
    Run run = make_run(out_dir, command, seed, dry_run);
    const PosteriorSample sample = read_draws_csv(draws_path);
    if (dry_run) return 0;
    run.note_input(draws_path);
    run.manifest.config = {{"criterion", crit.str()},
                           {"status", to_string(status)},
                           {"batches_per_draw",
                            std::to_string(batches_per_draw)}};

    const WeightedBatchDraws draws =
        conditional_batch_draws(sample, status, crit, batches_per_draw, seed);
    const ConditionalReport report = conditional_summaries(draws);
    if (report.low_ess_warning)
        std::cerr << "warning: effective weight sample size "
                  << report.weight_ess << " < 50; estimates are imprecise\n";

    run.emit("conditional.json", conditional_report_to_json(report, crit));
    run.finish();
    return 0;
}

int cmd_rr_grid(const std::string& command, const std::string& draws_path,
                std::vector<std::string> criterion_texts,
                const std::string& qmra_path, const std::string& measure,
                const std::string& out_dir, std::int64_t batches,
                std::int64_t servings, std::uint64_t seed, int threads,
                bool dry_run) {
    std::vector<Criterion> criteria;
    for (const auto& text : criterion_texts)
        criteria.push_back(Criterion::parse(text));
    if (criteria.empty()) criteria = default_criteria_grid();
    if (measure != "all" && measure != "rpr")
        throw std::invalid_argument("--measure must be all or rpr");

    Run run = make_run(out_dir, command, seed, dry_run);
    const PosteriorSample sample = read_draws_csv(draws_path);
    QmraSpec spec;
    if (!qmra_path.empty()) spec = load_qmra_spec(qmra_path);
    spec.require_valid();
    if (dry_run) return 0;

    run.note_input(draws_path);
    if (!qmra_path.empty()) run.note_input(qmra_path);
    run.manifest.config = {{"measure", measure},
                           {"batches", std::to_string(batches)},
                           {"servings", std::to_string(servings)},
                           {"qmra", qmra_path.empty() ? "default" : qmra_path}};

    const MonteCarloPlan plan{batches, servings};

    if (measure == "rpr") {
        RiskGrid grid;
        for (const auto& crit : criteria) {
            RiskGridCell cell;
            cell.criterion = crit;
            cell.rpr = rpr(sample, crit, plan, spec, seed).rpr;
            grid.cells.push_back(cell);
        }
        write_rpr_csv((fs::path(out_dir) / "rpr.csv").string(), grid);
        run.manifest.outputs.push_back("rpr.csv");
        run.finish();
        return 0;
    }

    const RiskGrid grid = rr_grid(sample, criteria, plan, spec, seed, threads);
    std::int64_t excluded = 0;
    for (const auto& cell : grid.cells) excluded += cell.n_excluded;
    if (excluded > 0)
        std::cerr << "warning: " << excluded
                  << " draw/criterion evaluations had zero risk mass and "
                     "were excluded\n";

    write_grid_csv((fs::path(out_dir) / "grid.csv").string(), grid);
    run.manifest.outputs.push_back("grid.csv");
    write_series_csv((fs::path(out_dir) / "series.csv").string(), grid);
    run.manifest.outputs.push_back("series.csv");
    run.emit("scatter.svg", svg_scatter(grid));
    run.finish();
    return 0;
}

int cmd_synth(const std::string& command, bool calibrated_flag,
              const std::string& truth_path, const std::string& out_dir,
              std::uint64_t seed, std::int64_t n_baseline,
              const std::string& baseline_unit,
              const std::string& summaries_unit, bool dry_run) {
    GroundTruth truth;
    if (!truth_path.empty()) {
        truth = truth_from_json_file(truth_path);
    } else if (calibrated_flag) {
        truth = calibrated_default();
    } else {
        throw std::invalid_argument(
            "synth needs --calibrated-default or --truth FILE");
    }
    if (n_baseline > 0) truth.n_baseline_batches = n_baseline;
    truth.require_valid();

    Run run = make_run(out_dir, command, seed, dry_run);
    if (dry_run) return 0;
    if (!truth_path.empty()) run.note_input(truth_path);
    run.manifest.config = {{"baseline_unit", baseline_unit},
                           {"summaries_unit", summaries_unit}};

    const SynthResult result = generate(truth, seed);

    write_baseline_csv((fs::path(out_dir) / "baseline.csv").string(),
                       result.baseline_rows, baseline_unit);
    run.manifest.outputs.push_back("baseline.csv");
    write_summaries_csv((fs::path(out_dir) / "summaries.csv").string(),
                        result.summaries, summaries_unit);
    run.manifest.outputs.push_back("summaries.csv");

    json truth_json{{"q", truth.params.q},
                    {"mu", truth.params.mu},
                    {"sigma_b", truth.params.sigma_b},
                    {"sigma_w", truth.params.sigma_w},
                    {"alpha", truth.params.alpha},
                    {"n_baseline_batches", truth.n_baseline_batches},
                    {"batch_plan", truth.batch_plan},
                    {"realized_baseline_positives", result.baseline.n_positive},
                    {"regenerated_summary_batches", result.regenerated_batches}};
    run.emit("truth.json", truth_json.dump(2) + "\n");
    run.finish();
    return 0;
}

int cmd_qq(const std::string& command, const std::string& input_path,
           const std::string& schema, const std::string& out_dir,
           bool dry_run) {
    std::vector<double> values;
    if (schema == "baseline") {
        const BaselineSurvey survey = read_baseline_csv(input_path);
        values = survey.log_concentrations;
    } else if (schema == "summaries") {
        const PositiveBatchSummaries s = read_summaries_csv(input_path);
        for (const auto& b : s.batches) values.push_back(b.mean_log);
    } else if (schema == "values") {
        std::istringstream in(read_text_file(input_path));
        std::string line;
        std::int64_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            try {
                std::size_t used = 0;
                const double v = std::stod(line, &used);
                if (used != line.size()) throw std::invalid_argument(line);
                values.push_back(v);
            } catch (const std::exception&) {
                throw CsvError(input_path, lineno,
                               "expected one number per line");
            }
        }
    } else {
        throw std::invalid_argument(
            "--schema must be baseline, summaries, or values");
    }

    Run run = make_run(out_dir, command, 0, dry_run);
    const auto points = qq_points(values);
    if (dry_run) return 0;
    run.note_input(input_path);
    run.manifest.config = {{"schema", schema},
                           {"n_values", std::to_string(values.size())}};
    write_qq_csv((fs::path(out_dir) / "qq.csv").string(), points);
    run.manifest.outputs.push_back("qq.csv");
    run.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian evidence synthesis and microbiological-criterion "
                 "risk evaluation for carcass survey data"};
    app.require_subcommand(1);
    const std::string command = join_args(argc, argv);

    // fit
    auto* fit_cmd = app.add_subcommand(
        "fit", "Run MCMC evidence synthesis and write posterior draws");
    std::string model_name, baseline_path, summaries_path, out_dir;
    std::string prior_variance = "gamma-precision";
    std::uint64_t seed = 0;
    std::int64_t iterations = 16000, burnin = 4000, thin = 4, chains = 4;
    double alpha_upper = 1e4, sigma_upper = 100.0;
    bool latent_means = false, dry_run = false;
    int threads = default_threads();
    fit_cmd->add_option("--model", model_name,
                        "baseline | positives | combined")
        ->required();
    fit_cmd->add_option("--baseline", baseline_path, "schema A CSV");
    fit_cmd->add_option("--summaries", summaries_path, "schema B CSV");
    fit_cmd->add_option("--out", out_dir, "output directory")->required();
    fit_cmd->add_option("--seed", seed);
    fit_cmd->add_option("--iterations", iterations);
    fit_cmd->add_option("--burnin", burnin);
    fit_cmd->add_option("--thin", thin);
    fit_cmd->add_option("--chains", chains);
    fit_cmd->add_option("--prior-variance", prior_variance,
                        "gamma-precision | uniform-sd");
    fit_cmd->add_option("--alpha-upper", alpha_upper);
    fit_cmd->add_option("--sigma-upper", sigma_upper);
    fit_cmd->add_flag("--baseline-latent-means", latent_means,
                      "sample baseline batch means explicitly");
    fit_cmd->add_option("--threads", threads);
    fit_cmd->add_flag("--dry-run", dry_run);

    // mc-eval
    auto* mc_cmd = app.add_subcommand(
        "mc-eval", "Batch inference conditional on a criterion status");
    std::string draws_path, criterion_text = "5/1/1000",
                status_text = "not_applied";
    std::int64_t batches_per_draw = 40;
    mc_cmd->add_option("--draws", draws_path, "posterior draws CSV")
        ->required();
    mc_cmd->add_option("--criterion", criterion_text, "n/c/m");
    mc_cmd->add_option("--status", status_text, "met | not-met | not-applied");
    mc_cmd->add_option("--out", out_dir, "output directory")->required();
    mc_cmd->add_option("--batches-per-draw", batches_per_draw);
    mc_cmd->add_option("--seed", seed);
    mc_cmd->add_flag("--dry-run", dry_run);

    // rr-grid
    auto* grid_cmd = app.add_subcommand(
        "rr-grid", "Relative-risk measures over a criteria grid");
    std::vector<std::string> criterion_texts;
    std::string qmra_path, measure = "all";
    std::int64_t batches = 40, servings = 10;
    grid_cmd->add_option("--draws", draws_path, "posterior draws CSV")
        ->required();
    grid_cmd->add_option("--criterion", criterion_texts,
                         "n/c/m (repeatable; default grid when omitted)");
    grid_cmd->add_option("--qmra", qmra_path, "QMRA spec JSON");
    grid_cmd->add_option("--measure", measure, "all | rpr");
    grid_cmd->add_option("--out", out_dir, "output directory")->required();
    grid_cmd->add_option("--batches", batches, "batch draws per iteration (L)");
    grid_cmd->add_option("--servings", servings,
                         "serving draws per batch (M)");
    grid_cmd->add_option("--seed", seed);
    grid_cmd->add_option("--threads", threads);
    grid_cmd->add_flag("--dry-run", dry_run);

    // synth
    auto* synth_cmd = app.add_subcommand(
        "synth", "Generate survey CSVs from a ground truth");
    bool calibrated_flag = false;
    std::string truth_path, baseline_unit = "per_carcass",
                summaries_unit = "per_ml_rinse400";
    std::int64_t n_baseline = 0;
    synth_cmd->add_flag("--calibrated-default", calibrated_flag,
                        "use the calibrated default ground truth");
    synth_cmd->add_option("--truth", truth_path, "ground truth JSON");
    synth_cmd->add_option("--out", out_dir, "output directory")->required();
    synth_cmd->add_option("--seed", seed);
    synth_cmd->add_option("--n-baseline", n_baseline,
                          "override baseline batch count");
    synth_cmd->add_option("--baseline-unit", baseline_unit,
                          "per_carcass | cfu_per_g");
    synth_cmd->add_option("--summaries-unit", summaries_unit,
                          "per_ml_rinse400 | cfu_per_g");
    synth_cmd->add_flag("--dry-run", dry_run);

    // qq
    auto* qq_cmd = app.add_subcommand(
        "qq", "Normal quantile-quantile pairs for concentration values");
    std::string qq_input, qq_schema = "baseline";
    qq_cmd->add_option("--input", qq_input, "input file")->required();
    qq_cmd->add_option("--schema", qq_schema, "baseline | summaries | values");
    qq_cmd->add_option("--out", out_dir, "output directory")->required();
    qq_cmd->add_flag("--dry-run", dry_run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fit_cmd)
            return cmd_fit(command, model_name, baseline_path, summaries_path,
                           out_dir, seed, iterations, burnin, thin, chains,
                           prior_variance, alpha_upper, sigma_upper,
                           latent_means, threads, dry_run);
        if (*mc_cmd)
            return cmd_mc_eval(command, draws_path, criterion_text,
                               status_text, out_dir, batches_per_draw, seed,
                               dry_run);
        if (*grid_cmd)
            return cmd_rr_grid(command, draws_path, criterion_texts, qmra_path,
                               measure, out_dir, batches, servings, seed,
                               threads, dry_run);
        if (*synth_cmd)
            return cmd_synth(command, calibrated_flag, truth_path, out_dir,
                             seed, n_baseline, baseline_unit, summaries_unit,
                             dry_run);
        if (*qq_cmd)
            return cmd_qq(command, qq_input, qq_schema, out_dir, dry_run);
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
