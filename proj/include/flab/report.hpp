#pragma once

#include <filesystem>
#include <iosfwd>

#include "flab/backtest.hpp"
#include "flab/frontier.hpp"
#include "flab/ingest.hpp"
#include "flab/pca.hpp"

#include <json.hpp>

namespace flab {

struct FrontierParams {
    std::size_t sample_count = 10000;
    std::uint64_t seed = 0;
    double risk_free_rate = 0.01;
};

struct EigenParams {
    double threshold = 0.80;
    int portfolio_count = 5;
};

/// Everything computed for one sector: per-ticker stats, the three portfolio
/// weightings, frontier selection, eigen diagnostics, and the two holdout
/// ledgers (the minimum-risk portfolio is reported but never backtested).
struct SectorReport {
    std::string sector_name;
    std::vector<TickerId> tickers;  // survivors after cleaning
    std::vector<ColumnDrop> dropped;

    AnnualStats stats;
    CovCorr matrices;

    FrontierSample frontier;  // full scatter; serialized separately as CSV
    std::string frontier_csv;  // bundle-relative scatter filename
    FrontierPoint min_risk;
    FrontierPoint opt_risk;

    EigenModel eigen_model;
    int selected_components = 0;
    std::vector<EigenPortfolio> eigen_candidates;
    EigenPortfolio best_eigen;

    BacktestLedger backtest_opt;
    BacktestLedger backtest_eigen;

    // run parameters, kept for reproducibility
    FrontierParams frontier_params;
    EigenParams eigen_params;
    double capital = 0.0;
    BacktestOptions backtest_options;
    Date test_entry_date;
    Date test_exit_date;
};

enum class Winner { opt, eigen, tie };

struct SectorOutcome {
    std::string sector;
    double opt_return = 0.0;
    double eigen_return = 0.0;
    Winner winner = Winner::tie;
};

struct ComparisonSummary {
    std::vector<SectorOutcome> rows;
    int opt_wins = 0;
    int eigen_wins = 0;
    int ties = 0;
};

/// Run the whole pipeline for one sector: clean -> returns -> stats ->
/// cov/corr -> frontier -> min/opt selection -> PCA -> eigen portfolios ->
/// best eigen -> two backtests. Errors are rethrown as PipelineError tagged
/// with the failing stage.
SectorReport build_sector_report(const UniverseConfig& config, const PricePanel& panel,
                                 const FrontierParams& frontier_params,
                                 const EigenParams& eigen_params, double capital,
                                 const BacktestOptions& options = {});

/// Per-sector winner by holdout return; ties within 1e-9.
ComparisonSummary build_comparison(const std::vector<SectorReport>& reports);

/// Full-precision JSON form of the report (scatter points excluded; those
/// live in the frontier CSV referenced by `frontier_csv`).
nlohmann::json report_json(const SectorReport& report);
SectorReport report_from_json(const nlohmann::json& j);

/// Write the sector bundle: stats.csv, weights.csv, frontier.csv, scree.csv,
/// eigen_weights.csv, corr.csv, backtest_opt.csv, backtest_eigen.csv,
/// report.json.
void write_bundle(const SectorReport& report, const std::filesystem::path& dir);

/// `sector,opt_return,eigen_return,winner` rows.
void write_comparison_csv(const ComparisonSummary& summary, std::ostream& out);

}  // namespace flab
