#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "batchrisk/criteria.hpp"
#include "batchrisk/mcmc.hpp"
#include "batchrisk/risk.hpp"
#include "batchrisk/synth.hpp"
#include "batchrisk/types.hpp"

// File formats: the two survey CSV schemas, posterior draw CSV, summary
// and report JSON, run manifests, and the SVG scatter. All numeric
// output uses shortest round-trip formatting, so byte-identical reruns
// follow from identical inputs and seeds.

namespace batchrisk {

class CsvError : public std::runtime_error {
  public:
    CsvError(const std::string& path, std::int64_t line,
             const std::string& what);
    std::int64_t line() const { return line_; }

  private:
    std::int64_t line_;
};

/// Shortest round-trip decimal representation.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Schema A: header "batch_id,positive,log10_raw,unit",
// unit in {per_carcass, cfu_per_g}; log10_raw empty iff positive = 0.
// Values are transformed to adjusted log10 cfu/g on ingestion.
BaselineSurvey read_baseline_csv(const std::string& path,
                                 std::vector<std::string>* warnings = nullptr);
void write_baseline_csv(const std::string& path,
                        const std::vector<BaselineRow>& rows,
                        const std::string& unit);

// Schema B: header
// "batch_id,n_sampled,n_positive,mean_log10_raw,sd_log10_raw,unit",
// unit in {per_ml_rinse400, cfu_per_g}; sd empty iff n_positive = 1.
// An sd of exactly 0 with n_positive >= 2 is accepted with a warning.
PositiveBatchSummaries read_summaries_csv(
    const std::string& path, std::vector<std::string>* warnings = nullptr);
void write_summaries_csv(const std::string& path,
                         const PositiveBatchSummaries& summaries,
                         const std::string& unit);

// Posterior draws: "chain,iteration,q,mu,sigma_b,sigma_w,alpha".
void write_draws_csv(const std::string& path, const PosteriorSample& sample);
PosteriorSample read_draws_csv(const std::string& path);

std::string summary_to_json(const PosteriorSample& sample);
std::string diagnostics_to_json(const PosteriorSample& sample);

struct RunManifest {
    std::string tool_version;
    std::string command;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> input_digests;  // path -> sha256
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;
};

/// Write manifest.json into dir (exactly one manifest per output
/// directory).
void write_manifest(const std::string& dir, const RunManifest& manifest);

std::string sha256_file(const std::string& path);

// Risk grid outputs.
void write_grid_csv(const std::string& path, const RiskGrid& grid);
void write_series_csv(const std::string& path, const RiskGrid& grid);
void write_rpr_csv(const std::string& path, const RiskGrid& grid);

/// Scatter of (P(MC not met), RR) per posterior draw, one marker group
/// per criterion, posterior means annotated.
std::string svg_scatter(const RiskGrid& grid);

void write_qq_csv(const std::string& path,
                  const std::vector<std::pair<double, double>>& points);

std::string conditional_report_to_json(const ConditionalReport& report,
                                       const Criterion& crit);

}  // namespace batchrisk
