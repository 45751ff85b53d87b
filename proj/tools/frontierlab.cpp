#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "flab/backtest.hpp"
#include "flab/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

struct RunManifest {
    std::string config_path;
    std::string data_path;  // exactly one of data_path / url is set
    std::string url;
    std::uint64_t seed = 0;
    std::size_t sample_count = 10000;
    double risk_free_rate = 0.01;
    double pca_threshold = 0.80;
    int pca_portfolio_count = 5;
    double capital = 100000.0;
    std::string output_dir = "out";
    bool long_only = false;
    bool integer_shares = false;
};

flab::PricePanel load_source(const RunManifest& m, const flab::UniverseConfig& config) {
    if (!m.url.empty()) {
        auto fetched = flab::fetch_remote(m.url, config);
        std::cerr << "fetched " << m.url << " (cached at " << fetched.cache_path << ")\n";
        return std::move(fetched.panel);
    }
    return flab::load_csv(m.data_path, config);
}

flab::SectorReport run_sector(const RunManifest& m, const flab::UniverseConfig& config) {
    flab::FrontierParams frontier_params{m.sample_count, m.seed, m.risk_free_rate};
    flab::EigenParams eigen_params{m.pca_threshold, m.pca_portfolio_count};
    flab::BacktestOptions options{m.long_only, m.integer_shares};
    auto panel = load_source(m, config);
    return flab::build_sector_report(config, panel, frontier_params, eigen_params, m.capital,
                                     options);
}

void print_sector_summary(const flab::SectorReport& r, const fs::path& bundle_dir) {
    std::printf("sector: %s\n", r.sector_name.c_str());
    std::printf("tickers: %zu retained, %zu dropped", r.tickers.size(), r.dropped.size());
    for (const auto& d : r.dropped) {
        std::printf(" [%s %.0f%% missing]", d.ticker.c_str(), d.missing_fraction * 100.0);
    }
    std::printf("\n\n");

    std::printf("%-22s %9s %9s %9s\n", "portfolio", "return%", "risk%", "sharpe");
    auto row = [](const char* name, double ret, double vol, double sharpe) {
        std::printf("%-22s %9.2f %9.2f %9.2f\n", name, ret * 100.0, vol * 100.0, sharpe);
    };
    row("min-risk", r.min_risk.annual_return, r.min_risk.annual_volatility, r.min_risk.sharpe);
    row("opt-risk", r.opt_risk.annual_return, r.opt_risk.annual_volatility, r.opt_risk.sharpe);
    char eigen_name[32];
    std::snprintf(eigen_name, sizeof(eigen_name), "eigen[%d]", r.best_eigen.component_index);
    row(eigen_name, r.best_eigen.in_sample_return, r.best_eigen.in_sample_volatility,
        r.best_eigen.sharpe);

    std::printf("\ncomponents: %d of %zu reach %.0f%% (cumulative %.2f%%)\n",
                r.selected_components, r.tickers.size(), r.eigen_params.threshold * 100.0,
                r.eigen_model.cumulative_explained(r.selected_components - 1) * 100.0);

    std::printf("backtest %s .. %s on %.2f:\n", r.test_entry_date.to_string().c_str(),
                r.test_exit_date.to_string().c_str(), r.capital);
    std::printf("  opt-risk  terminal %12.2f  return %7.2f%%\n", r.backtest_opt.total_terminal,
                r.backtest_opt.total_return * 100.0);
    std::printf("  %-9s terminal %12.2f  return %7.2f%%\n", eigen_name,
                r.backtest_eigen.total_terminal, r.backtest_eigen.total_return * 100.0);
    if (r.backtest_eigen.has_short_positions()) {
        std::printf("  note: eigen portfolio holds short positions\n");
    }
    std::printf("bundle: %s\n", bundle_dir.string().c_str());
}

int cmd_analyze(const RunManifest& m) {
    auto config = flab::UniverseConfig::from_json_file(m.config_path);
    auto report = run_sector(m, config);
    fs::path bundle_dir = fs::path(m.output_dir) / config.sector_name;
    flab::write_bundle(report, bundle_dir);
    print_sector_summary(report, bundle_dir);
    return kExitOk;
}

int cmd_compare(const std::vector<RunManifest>& manifests) {
    std::vector<flab::UniverseConfig> configs;
    std::unordered_set<std::string> names;
    for (const auto& m : manifests) {
        configs.push_back(flab::UniverseConfig::from_json_file(m.config_path));
        if (!names.insert(configs.back().sector_name).second) {
            std::cerr << "error: duplicate sector name '" << configs.back().sector_name << "'\n";
            return kExitUsage;
        }
    }

    std::vector<flab::SectorReport> reports;
    for (std::size_t i = 0; i < manifests.size(); ++i) {
        try {
            reports.push_back(run_sector(manifests[i], configs[i]));
        } catch (const std::exception& e) {
            std::cerr << "error: sector '" << configs[i].sector_name << "': " << e.what() << "\n";
            return kExitPipeline;
        }
        fs::path bundle_dir = fs::path(manifests[i].output_dir) / configs[i].sector_name;
        flab::write_bundle(reports.back(), bundle_dir);
    }

    auto summary = flab::build_comparison(reports);
    fs::path out = fs::path(manifests.front().output_dir) / "comparison.csv";
    fs::create_directories(out.parent_path());
    std::ofstream csv(out);
    flab::write_comparison_csv(summary, csv);

    std::printf("%-20s %9s %9s  %s\n", "sector", "opt%", "eigen%", "winner");
    for (const auto& row : summary.rows) {
        const char* winner = row.winner == flab::Winner::opt     ? "opt"
                             : row.winner == flab::Winner::eigen ? "eigen"
                                                                 : "tie";
        std::printf("%-20s %9.2f %9.2f  %s\n", row.sector.c_str(), row.opt_return * 100.0,
                    row.eigen_return * 100.0, winner);
    }
    std::printf("opt wins %d, eigen wins %d, ties %d\n", summary.opt_wins, summary.eigen_wins,
                summary.ties);
    std::printf("comparison: %s\n", out.string().c_str());
    return kExitOk;
}

flab::WeightVector read_weights_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw flab::Error("cannot open weights CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw flab::Error("weights CSV is empty: " + path);

    flab::WeightVector wv;
    std::vector<double> values;
    long line_num = 1;
    while (std::getline(in, line)) {
        ++line_num;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw flab::MalformedRow(line_num, "expected 'ticker,weight'");
        }
        std::string ticker = line.substr(0, comma);
        try {
            values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw flab::MalformedRow(line_num, "weight is not a number");
        }
        wv.tickers.push_back(std::move(ticker));
    }
    flab::validate_tickers(wv.tickers);
    wv.weights = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return wv;
}

int cmd_backtest(const RunManifest& m, const std::string& weights_path, const std::string& from,
                 const std::string& to, const std::string& ledger_out) {
    auto wv = read_weights_csv(weights_path);
    if (std::abs(wv.sum() - 1.0) > 1e-6) {
        throw flab::WeightsNotNormalized("weights sum to " + std::to_string(wv.sum()) +
                                         ", expected 1 within 1e-6");
    }

    auto window_start = flab::Date::parse(from);
    auto window_end = flab::Date::parse(to);
    flab::PricePanel panel;
    if (!m.url.empty()) {
        auto fetched = flab::fetch_remote(m.url, wv.tickers, window_start, window_end);
        std::cerr << "fetched " << m.url << " (cached at " << fetched.cache_path << ")\n";
        panel = std::move(fetched.panel);
    } else {
        panel = flab::load_csv(m.data_path, wv.tickers, window_start, window_end);
    }

    // No imputation here: a standalone backtest needs the actual close on the
    // snapped dates, so a missing price is surfaced as an error instead.
    flab::BacktestOptions options{m.long_only, m.integer_shares};
    auto ledger = flab::run_backtest(panel, wv, m.capital, window_start, window_end, options);

    std::ofstream out(ledger_out);
    if (!out) throw flab::Error("cannot open for writing: " + ledger_out);
    flab::write_ledger_csv(ledger, out);

    std::printf("capital %.2f -> terminal %.2f\n", ledger.capital, ledger.total_terminal);
    std::printf("total return: %.2f%%\n", ledger.total_return * 100.0);
    std::printf("ledger: %s\n", ledger_out.c_str());
    return kExitOk;
}

void add_common_options(CLI::App* cmd, RunManifest& m, bool with_sampling) {
    cmd->add_option("--capital", m.capital, "capital to deploy")->capture_default_str();
    cmd->add_flag("--long-only", m.long_only, "reject negative (short) weights");
    cmd->add_flag("--integer-shares", m.integer_shares,
                  "whole shares only; leftover cash stays uninvested");
    if (with_sampling) {
        cmd->add_option("--seed", m.seed, "RNG seed (required for reproducible runs)")
            ->required();
        cmd->add_option("--samples", m.sample_count, "number of random portfolios")
            ->capture_default_str();
        cmd->add_option("--risk-free", m.risk_free_rate, "annual risk-free rate")
            ->capture_default_str();
        cmd->add_option("--pca-threshold", m.pca_threshold,
                        "cumulative explained-variance threshold")
            ->capture_default_str();
        cmd->add_option("--pca-count", m.pca_portfolio_count, "eigen portfolios to build")
            ->capture_default_str();
        cmd->add_option("--out", m.output_dir, "output directory")->capture_default_str();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"portfolio construction and evaluation: efficient-frontier sampling, "
                 "eigen portfolios, and holdout backtests over close-price panels"};
    app.require_subcommand(1);

    RunManifest manifest;

    auto* analyze = app.add_subcommand("analyze", "run the full pipeline for one sector");
    analyze->add_option("--config", manifest.config_path, "universe config JSON")->required();
    auto* data_opt = analyze->add_option("--data", manifest.data_path, "close-price CSV");
    auto* url_opt = analyze->add_option("--url", manifest.url, "HTTP endpoint serving the CSV");
    data_opt->excludes(url_opt);
    add_common_options(analyze, manifest, true);

    std::vector<std::string> cmp_configs;
    std::vector<std::string> cmp_datas;
    std::vector<std::string> cmp_urls;
    auto* compare = app.add_subcommand("compare", "analyze several sectors and rank the "
                                                  "opt-risk vs eigen holdout returns");
    compare->add_option("--config", cmp_configs, "universe config JSON (repeatable)")->required();
    auto* cmp_data_opt = compare->add_option("--data", cmp_datas, "close-price CSV (repeatable)");
    auto* cmp_url_opt = compare->add_option("--url", cmp_urls, "HTTP endpoint (repeatable)");
    cmp_data_opt->excludes(cmp_url_opt);
    add_common_options(compare, manifest, true);

    std::string weights_path;
    std::string from_date;
    std::string to_date;
    std::string ledger_out = "ledger.csv";
    auto* backtest = app.add_subcommand("backtest", "value a weights CSV over a holdout window");
    backtest->add_option("--weights", weights_path, "CSV with ticker,weight rows")->required();
    auto* bt_data_opt = backtest->add_option("--data", manifest.data_path, "close-price CSV");
    auto* bt_url_opt = backtest->add_option("--url", manifest.url, "HTTP endpoint");
    bt_data_opt->excludes(bt_url_opt);
    backtest->add_option("--from", from_date, "window start (YYYY-MM-DD)")->required();
    backtest->add_option("--to", to_date, "window end (YYYY-MM-DD)")->required();
    backtest->add_option("--out", ledger_out, "ledger CSV path")->capture_default_str();
    add_common_options(backtest, manifest, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analyze->parsed()) {
            if (manifest.data_path.empty() && manifest.url.empty()) {
                std::cerr << "error: one of --data or --url is required\n";
                return kExitUsage;
            }
            return cmd_analyze(manifest);
        }
        if (compare->parsed()) {
            const auto& sources = cmp_urls.empty() ? cmp_datas : cmp_urls;
            if (sources.empty()) {
                std::cerr << "error: one of --data or --url is required\n";
                return kExitUsage;
            }
            if (sources.size() != cmp_configs.size()) {
                std::cerr << "error: need one --data/--url per --config (" << cmp_configs.size()
                          << " configs, " << sources.size() << " sources)\n";
                return kExitUsage;
            }
            std::vector<RunManifest> manifests;
            for (std::size_t i = 0; i < cmp_configs.size(); ++i) {
                RunManifest m = manifest;
                m.config_path = cmp_configs[i];
                if (cmp_urls.empty()) {
                    m.data_path = sources[i];
                } else {
                    m.url = sources[i];
                }
                manifests.push_back(std::move(m));
            }
            return cmd_compare(manifests);
        }
        if (backtest->parsed()) {
            if (manifest.data_path.empty() && manifest.url.empty()) {
                std::cerr << "error: one of --data or --url is required\n";
                return kExitUsage;
            }
            return cmd_backtest(manifest, weights_path, from_date, to_date, ledger_out);
        }
    } catch (const flab::WeightsNotNormalized& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
    return kExitUsage;
}
