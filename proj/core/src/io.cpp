#include "batchrisk/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "batchrisk/model.hpp"
#include "batchrisk/version.hpp"

namespace batchrisk {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double_field(const std::string& field, const std::string& path,
                          std::int64_t line, const char* what) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        throw CsvError(path, line,
                       std::string(what) + ": expected a finite number, got \"" +
                           field + "\"");
    return v;
}

std::int64_t parse_int_field(const std::string& field, const std::string& path,
                             std::int64_t line, const char* what) {
    std::int64_t v = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw CsvError(path, line, std::string(what) +
                                       ": expected an integer, got \"" + field +
                                       "\"");
    return v;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(path, 0, "cannot open file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

CsvError::CsvError(const std::string& path, std::int64_t line,
                   const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
      line_(line) {}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

BaselineSurvey read_baseline_csv(const std::string& path,
                                 std::vector<std::string>* warnings) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "batch_id,positive,log10_raw,unit")
        throw CsvError(path, 1,
                       "expected header \"batch_id,positive,log10_raw,unit\"");
    BaselineSurvey survey;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::int64_t lineno = std::int64_t(i) + 1;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 4)
            throw CsvError(path, lineno, "expected 4 fields");
        const std::int64_t positive =
            parse_int_field(fields[1], path, lineno, "positive");
        if (positive != 0 && positive != 1)
            throw CsvError(path, lineno, "positive must be 0 or 1");
        ++survey.n_batches;
        if (positive == 0) {
            if (!fields[2].empty())
                throw CsvError(path, lineno,
                               "log10_raw must be empty for a negative sample");
            continue;
        }
        const double raw =
            parse_double_field(fields[2], path, lineno, "log10_raw");
        double adjusted;
        if (fields[3] == "per_carcass")
            adjusted = transform_baseline(raw);
        else if (fields[3] == "cfu_per_g")
            adjusted = raw;
        else
            throw CsvError(path, lineno,
                           "unit must be per_carcass or cfu_per_g, got \"" +
                               fields[3] + "\"");
        ++survey.n_positive;
        survey.log_concentrations.push_back(adjusted);
    }
    survey.require_valid();
    (void)warnings;
    return survey;
}

void write_baseline_csv(const std::string& path,
                        const std::vector<BaselineRow>& rows,
                        const std::string& unit) {
    if (unit != "per_carcass" && unit != "cfu_per_g")
        throw std::invalid_argument("baseline unit must be per_carcass or cfu_per_g");
    std::ostringstream out;
    out << "batch_id,positive,log10_raw,unit\n";
    for (const auto& row : rows) {
        out << row.batch_id << ',' << (row.positive ? 1 : 0) << ',';
        if (row.positive) {
            const double raw = unit == "per_carcass" ? row.log10_adjusted + 2.0
                                                     : row.log10_adjusted;
            out << format_double(raw);
        }
        out << ',' << unit << '\n';
    }
    write_text_file(path, out.str());
}

PositiveBatchSummaries read_summaries_csv(const std::string& path,
                                          std::vector<std::string>* warnings) {
    const auto lines = read_lines(path);
    const std::string header =
        "batch_id,n_sampled,n_positive,mean_log10_raw,sd_log10_raw,unit";
    if (lines.empty() || lines[0] != header)
        throw CsvError(path, 1, "expected header \"" + header + "\"");
    PositiveBatchSummaries out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::int64_t lineno = std::int64_t(i) + 1;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 6)
            throw CsvError(path, lineno, "expected 6 fields");
        BatchSummary b;
        b.n_sampled = parse_int_field(fields[1], path, lineno, "n_sampled");
        b.n_positive = parse_int_field(fields[2], path, lineno, "n_positive");
        if (b.n_positive < 1 || b.n_positive > b.n_sampled)
            throw CsvError(path, lineno,
                           "need 1 <= n_positive <= n_sampled "
                           "(positives-only data)");
        const double raw_mean =
            parse_double_field(fields[3], path, lineno, "mean_log10_raw");
        if (fields[5] == "per_ml_rinse400")
            b.mean_log = transform_rinse(raw_mean);
        else if (fields[5] == "cfu_per_g")
            b.mean_log = raw_mean;
        else
            throw CsvError(path, lineno,
                           "unit must be per_ml_rinse400 or cfu_per_g, got \"" +
                               fields[5] + "\"");
        if (b.n_positive == 1) {
            if (!fields[4].empty())
                throw CsvError(path, lineno,
                               "sd_log10_raw must be empty when n_positive = 1");
        } else {
            const double sd =
                parse_double_field(fields[4], path, lineno, "sd_log10_raw");
            if (sd < 0.0)
                throw CsvError(path, lineno, "sd_log10_raw must be >= 0");
            if (sd == 0.0 && warnings)
                warnings->push_back(
                    path + ":" + std::to_string(lineno) +
                    ": sd of exactly 0 with multiple positives is physically "
                    "implausible and evaluates to zero likelihood");
            b.sd_log = sd;  // a +log10 shift leaves the SD unchanged
        }
        out.batches.push_back(b);
    }
    out.require_valid();
    return out;
}

void write_summaries_csv(const std::string& path,
                         const PositiveBatchSummaries& summaries,
                         const std::string& unit) {
    if (unit != "per_ml_rinse400" && unit != "cfu_per_g")
        throw std::invalid_argument(
            "summaries unit must be per_ml_rinse400 or cfu_per_g");
    const double shift = unit == "per_ml_rinse400" ? std::log10(4.0) : 0.0;
    std::ostringstream out;
    out << "batch_id,n_sampled,n_positive,mean_log10_raw,sd_log10_raw,unit\n";
    std::int64_t id = 1;
    for (const auto& b : summaries.batches) {
        out << id++ << ',' << b.n_sampled << ',' << b.n_positive << ','
            << format_double(b.mean_log - shift) << ',';
        if (b.sd_log) out << format_double(*b.sd_log);
        out << ',' << unit << '\n';
    }
    write_text_file(path, out.str());
}

void write_draws_csv(const std::string& path, const PosteriorSample& sample) {
    std::ostringstream out;
    out << "chain,iteration,q,mu,sigma_b,sigma_w,alpha\n";
    for (std::size_t c = 0; c < sample.chains.size(); ++c) {
        const auto& chain = sample.chains[c];
        for (std::size_t i = 0; i < chain.params.size(); ++i) {
            const CountryParams& p = chain.params[i];
            out << c << ',' << i << ',' << format_double(p.q) << ','
                << format_double(p.mu) << ',' << format_double(p.sigma_b)
                << ',' << format_double(p.sigma_w) << ','
                << format_double(p.alpha) << '\n';
        }
    }
    write_text_file(path, out.str());
}

PosteriorSample read_draws_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "chain,iteration,q,mu,sigma_b,sigma_w,alpha")
        throw CsvError(path, 1, "expected posterior draws header");
    std::map<std::int64_t, ChainDraws> by_chain;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::int64_t lineno = std::int64_t(i) + 1;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 7)
            throw CsvError(path, lineno, "expected 7 fields");
        const std::int64_t chain =
            parse_int_field(fields[0], path, lineno, "chain");
        CountryParams p;
        p.q = parse_double_field(fields[2], path, lineno, "q");
        p.mu = parse_double_field(fields[3], path, lineno, "mu");
        p.sigma_b = parse_double_field(fields[4], path, lineno, "sigma_b");
        p.sigma_w = parse_double_field(fields[5], path, lineno, "sigma_w");
        p.alpha = parse_double_field(fields[6], path, lineno, "alpha");
        if (!p.in_support())
            throw CsvError(path, lineno, "draw outside parameter support");
        by_chain[chain].params.push_back(p);
    }
    PosteriorSample sample;
    for (auto& [id, draws] : by_chain)
        sample.chains.push_back(std::move(draws));
    if (sample.n_draws() == 0)
        throw CsvError(path, 1, "no draws in file");
    return sample;
}

std::string summary_to_json(const PosteriorSample& sample) {
    json params = json::array();
    for (const auto& s : summarize(sample))
        params.push_back(json{{"name", s.name},
                              {"mean", s.mean},
                              {"q2.5", s.q025},
                              {"q97.5", s.q975}});
    json j{{"model", to_string(sample.model)},
           {"n_draws", sample.n_draws()},
           {"converged", sample.converged},
           {"parameters", params}};
    return j.dump(2) + "\n";
}

std::string diagnostics_to_json(const PosteriorSample& sample) {
    json params = json::array();
    for (const auto& d : sample.diag) {
        json entry{{"name", d.name}, {"ess", d.ess}};
        if (std::isfinite(d.rhat))
            entry["rhat"] = d.rhat;
        else
            entry["rhat"] = nullptr;
        params.push_back(entry);
    }
    json chains = json::array();
    for (const auto& cs : sample.chain_stats) {
        json acc = json::object();
        for (std::size_t b = 0; b < sample.block_names.size() &&
                                b < cs.accept_rate.size();
             ++b)
            acc[sample.block_names[b]] = cs.accept_rate[b];
        bool frozen = cs.scale_at_burnin_end.size() == cs.scale_at_end.size();
        for (std::size_t b = 0; frozen && b < cs.scale_at_end.size(); ++b) {
            const double s0 = cs.scale_at_burnin_end[b];
            const double s1 = cs.scale_at_end[b];
            if (std::isnan(s0) && std::isnan(s1)) continue;
            frozen = s0 == s1;
        }
        chains.push_back(json{{"acceptance", acc}, {"scales_frozen", frozen}});
    }
    json j{{"converged", sample.converged},
           {"parameters", params},
           {"chains", chains}};
    return j.dump(2) + "\n";
}

void write_manifest(const std::string& dir, const RunManifest& manifest) {
    json digests = json::object();
    for (const auto& [path, digest] : manifest.input_digests)
        digests[path] = digest;
    json config = json::object();
    for (const auto& [key, value] : manifest.config) config[key] = value;
    json j{{"tool_version", manifest.tool_version},
           {"command", manifest.command},
           {"seed", manifest.seed},
           {"config", config},
           {"input_digests", digests},
           {"outputs", manifest.outputs},
           {"wall_clock_seconds", manifest.wall_clock_seconds}};
    write_text_file((std::filesystem::path(dir) / "manifest.json").string(),
                    j.dump(2) + "\n");
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(path, 0, "cannot open file");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("EVP_DigestInit failed");
    }
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        const auto got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx, buf, std::size_t(got)) != 1) {
            EVP_MD_CTX_free(ctx);
            throw std::runtime_error("EVP_DigestUpdate failed");
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void write_grid_csv(const std::string& path, const RiskGrid& grid) {
    std::ostringstream out;
    out << "n,c,m,rr_mean,rr_lo,rr_hi,rpr,mrrr_mean,reject_pct_mean,mc_se\n";
    for (const auto& cell : grid.cells) {
        out << cell.criterion.n << ',' << cell.criterion.c << ','
            << format_double(cell.criterion.m) << ','
            << format_double(cell.rr_mean) << ',' << format_double(cell.rr_lo)
            << ',' << format_double(cell.rr_hi) << ','
            << format_double(cell.rpr) << ',' << format_double(cell.mrrr_mean)
            << ',' << format_double(cell.reject_pct_mean) << ','
            << format_double(cell.mc_se) << '\n';
    }
    write_text_file(path, out.str());
}

void write_series_csv(const std::string& path, const RiskGrid& grid) {
    std::ostringstream out;
    out << "criterion,draw,reject,rr\n";
    for (std::size_t k = 0; k < grid.cells.size(); ++k) {
        const std::string label = grid.cells[k].criterion.str();
        for (std::size_t i = 0; i < grid.rr_series[k].size(); ++i) {
            if (std::isnan(grid.rr_series[k][i])) continue;
            out << label << ',' << i << ','
                << format_double(grid.reject_series[k][i]) << ','
                << format_double(grid.rr_series[k][i]) << '\n';
        }
    }
    write_text_file(path, out.str());
}

void write_rpr_csv(const std::string& path, const RiskGrid& grid) {
    std::ostringstream out;
    out << "n,c,m,rpr\n";
    for (const auto& cell : grid.cells)
        out << cell.criterion.n << ',' << cell.criterion.c << ','
            << format_double(cell.criterion.m) << ','
            << format_double(cell.rpr) << '\n';
    write_text_file(path, out.str());
}

namespace {

std::string fixed2(double v) {
    char buf[32];
    auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

const char* kPalette[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

// Fig-style marker shapes cycling per criterion: x, o, +, triangle,
// square, diamond.
std::string marker(std::size_t kind, double x, double y, const char* color,
                   bool filled) {
    std::ostringstream s;
    const std::string fill = filled ? color : "none";
    switch (kind % 6) {
        case 0:
            s << "<path d=\"M" << fixed2(x - 3) << ' ' << fixed2(y - 3) << 'L'
              << fixed2(x + 3) << ' ' << fixed2(y + 3) << 'M' << fixed2(x - 3)
              << ' ' << fixed2(y + 3) << 'L' << fixed2(x + 3) << ' '
              << fixed2(y - 3) << "\" stroke=\"" << color << "\"/>";
            break;
        case 1:
            s << "<circle cx=\"" << fixed2(x) << "\" cy=\"" << fixed2(y)
              << "\" r=\"3\" stroke=\"" << color << "\" fill=\"" << fill
              << "\"/>";
            break;
        case 2:
            s << "<path d=\"M" << fixed2(x - 3.5) << ' ' << fixed2(y) << 'H'
              << fixed2(x + 3.5) << 'M' << fixed2(x) << ' ' << fixed2(y - 3.5)
              << 'V' << fixed2(y + 3.5) << "\" stroke=\"" << color << "\"/>";
            break;
        case 3:
            s << "<path d=\"M" << fixed2(x) << ' ' << fixed2(y - 3.5) << 'L'
              << fixed2(x + 3) << ' ' << fixed2(y + 2.5) << 'L'
              << fixed2(x - 3) << ' ' << fixed2(y + 2.5)
              << "Z\" stroke=\"" << color << "\" fill=\"" << fill << "\"/>";
            break;
        case 4:
            s << "<rect x=\"" << fixed2(x - 2.5) << "\" y=\"" << fixed2(y - 2.5)
              << "\" width=\"5\" height=\"5\" stroke=\"" << color
              << "\" fill=\"" << fill << "\"/>";
            break;
        default:
            s << "<path d=\"M" << fixed2(x) << ' ' << fixed2(y - 3.5) << 'L'
              << fixed2(x + 3.5) << ' ' << fixed2(y) << 'L' << fixed2(x) << ' '
              << fixed2(y + 3.5) << 'L' << fixed2(x - 3.5) << ' ' << fixed2(y)
              << "Z\" stroke=\"" << color << "\" fill=\"" << fill << "\"/>";
    }
    return s.str();
}

}  // namespace

std::string svg_scatter(const RiskGrid& grid) {
    const double width = 700, height = 500;
    const double ml = 70, mr = 180, mt = 30, mb = 60;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmax = 0.0, ymax = 1.0;
    for (std::size_t k = 0; k < grid.cells.size(); ++k)
        for (std::size_t i = 0; i < grid.rr_series[k].size(); ++i) {
            if (std::isnan(grid.rr_series[k][i])) continue;
            xmax = std::max(xmax, grid.reject_series[k][i]);
            ymax = std::max(ymax, grid.rr_series[k][i]);
        }
    xmax = std::max(xmax * 1.05, 0.01);
    ymax = std::max(ymax * 1.05, 0.1);

    auto px = [&](double x) { return ml + x / xmax * pw; };
    auto py = [&](double y) { return mt + (1.0 - y / ymax) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
    s << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

    // Axes with 6 ticks each.
    s << "<g class=\"axes\" stroke=\"black\" fill=\"black\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<line x1=\"" << fixed2(ml) << "\" y1=\"" << fixed2(mt + ph)
      << "\" x2=\"" << fixed2(ml + pw) << "\" y2=\"" << fixed2(mt + ph)
      << "\"/>\n";
    s << "<line x1=\"" << fixed2(ml) << "\" y1=\"" << fixed2(mt) << "\" x2=\""
      << fixed2(ml) << "\" y2=\"" << fixed2(mt + ph) << "\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double fx = xmax * t / 5.0, fy = ymax * t / 5.0;
        s << "<line x1=\"" << fixed2(px(fx)) << "\" y1=\"" << fixed2(mt + ph)
          << "\" x2=\"" << fixed2(px(fx)) << "\" y2=\"" << fixed2(mt + ph + 5)
          << "\"/>\n";
        s << "<text x=\"" << fixed2(px(fx)) << "\" y=\"" << fixed2(mt + ph + 18)
          << "\" text-anchor=\"middle\" stroke=\"none\">" << fixed2(fx)
          << "</text>\n";
        s << "<line x1=\"" << fixed2(ml - 5) << "\" y1=\"" << fixed2(py(fy))
          << "\" x2=\"" << fixed2(ml) << "\" y2=\"" << fixed2(py(fy))
          << "\"/>\n";
        s << "<text x=\"" << fixed2(ml - 8) << "\" y=\"" << fixed2(py(fy) + 4)
          << "\" text-anchor=\"end\" stroke=\"none\">" << fixed2(fy)
          << "</text>\n";
    }
    s << "<text x=\"" << fixed2(ml + pw / 2) << "\" y=\""
      << fixed2(height - 15)
      << "\" text-anchor=\"middle\" stroke=\"none\">P(MC not met)</text>\n";
    s << "<text x=\"18\" y=\"" << fixed2(mt + ph / 2)
      << "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 18 "
      << fixed2(mt + ph / 2) << ")\">RR</text>\n";
    s << "</g>\n";

    for (std::size_t k = 0; k < grid.cells.size(); ++k) {
        const char* color = kPalette[k % 8];
        const std::string label = grid.cells[k].criterion.str();
        s << "<g class=\"series\" data-criterion=\"" << label
          << "\" fill=\"none\">\n";
        double sx = 0.0, sy = 0.0;
        std::int64_t cnt = 0;
        for (std::size_t i = 0; i < grid.rr_series[k].size(); ++i) {
            const double rr = grid.rr_series[k][i];
            if (std::isnan(rr)) continue;
            const double rej = grid.reject_series[k][i];
            s << marker(k, px(rej), py(rr), color, false) << '\n';
            sx += rej;
            sy += rr;
            ++cnt;
        }
        if (cnt > 0) {
            const double mx = sx / double(cnt), my = sy / double(cnt);
            s << marker(k, px(mx), py(my), color, true) << '\n';
            s << "<text x=\"" << fixed2(px(mx) + 6) << "\" y=\""
              << fixed2(py(my) - 6) << "\" fill=\"" << color
              << "\" font-family=\"sans-serif\" font-size=\"11\">("
              << fixed2(mx) << "," << fixed2(my) << ")</text>\n";
        }
        s << "</g>\n";
    }

    s << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t k = 0; k < grid.cells.size(); ++k) {
        const double ly = mt + 12 + 16.0 * double(k);
        const double lx = ml + pw + 20;
        s << marker(k, lx, ly - 4, kPalette[k % 8], false) << '\n';
        s << "<text x=\"" << fixed2(lx + 10) << "\" y=\"" << fixed2(ly)
          << "\">" << grid.cells[k].criterion.str() << "</text>\n";
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

void write_qq_csv(const std::string& path,
                  const std::vector<std::pair<double, double>>& points) {
    std::ostringstream out;
    out << "theoretical_quantile,sample_quantile\n";
    for (const auto& [t, q] : points)
        out << format_double(t) << ',' << format_double(q) << '\n';
    write_text_file(path, out.str());
}

std::string conditional_report_to_json(const ConditionalReport& report,
                                       const Criterion& crit) {
    auto num_or_null = [](double v) {
        return std::isnan(v) ? json(nullptr) : json(v);
    };
    json j{{"criterion", crit.str()},
           {"status", to_string(report.status)},
           {"p_contaminated", report.p_contaminated},
           {"e_mu", report.e_mu},
           {"e_mu_given_contaminated",
            num_or_null(report.e_mu_given_contaminated)},
           {"e_p_within_given_contaminated",
            num_or_null(report.e_p_within_contaminated)},
           {"p_met", report.p_met},
           {"weight_ess", report.weight_ess},
           {"low_ess_warning", report.low_ess_warning}};
    return j.dump(2) + "\n";
}

}  // namespace batchrisk
