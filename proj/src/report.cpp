#include "flab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "text_util.hpp"

namespace flab {

namespace {

/// Run one pipeline stage; any failure is rethrown tagged with the stage name.
template <typename Fn>
auto run_stage(const std::string& stage, Fn&& fn) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = static_cast<Eigen::Index>(j.at("rows").size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.at("rows")[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k)
            m(i, k) = j.at("rows")[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]
                          .get<double>();
    return m;
}

nlohmann::json eigen_portfolio_json(const EigenPortfolio& p) {
    nlohmann::json weights = nlohmann::json::object();
    for (Eigen::Index i = 0; i < p.weights.weights.size(); ++i) {
        weights[p.weights.tickers[static_cast<std::size_t>(i)]] = p.weights.weights(i);
    }
    return {{"component_index", p.component_index},
            {"tickers", p.weights.tickers},
            {"weights", weights},
            {"in_sample_return", p.in_sample_return},
            {"in_sample_volatility", p.in_sample_volatility},
            {"sharpe", p.sharpe}};
}

EigenPortfolio eigen_portfolio_from_json(const nlohmann::json& j) {
    EigenPortfolio p;
    p.component_index = j.at("component_index").get<int>();
    p.weights.tickers = j.at("tickers").get<std::vector<TickerId>>();
    p.weights.weights.resize(static_cast<Eigen::Index>(p.weights.tickers.size()));
    for (std::size_t i = 0; i < p.weights.tickers.size(); ++i) {
        p.weights.weights(static_cast<Eigen::Index>(i)) =
            j.at("weights").at(p.weights.tickers[i]).get<double>();
    }
    p.in_sample_return = j.at("in_sample_return").get<double>();
    p.in_sample_volatility = j.at("in_sample_volatility").get<double>();
    p.sharpe = j.at("sharpe").get<double>();
    return p;
}

}  // namespace

SectorReport build_sector_report(const UniverseConfig& config, const PricePanel& panel,
                                 const FrontierParams& frontier_params,
                                 const EigenParams& eigen_params, double capital,
                                 const BacktestOptions& options) {
    SectorReport report;
    report.sector_name = config.sector_name;
    report.frontier_params = frontier_params;
    report.eigen_params = eigen_params;
    report.capital = capital;
    report.backtest_options = options;
    report.frontier_csv = "frontier.csv";

    // Cleaning runs on the full loaded window; training stats use the slice.
    CleanResult cleaned = run_stage("clean", [&] { return clean_panel(panel); });
    report.dropped = cleaned.dropped;
    report.tickers = cleaned.panel.tickers;

    PricePanel train = run_stage("clean", [&] {
        return cleaned.panel.slice(config.train_start, config.train_end);
    });

    ReturnPanel returns = run_stage("returns", [&] { return compute_returns(train); });
    report.stats = run_stage("stats", [&] { return annualize(returns); });
    report.matrices = run_stage("cov_corr", [&] { return cov_corr(returns); });

    report.frontier = run_stage("frontier", [&] {
        return sample_frontier(report.stats, report.matrices, frontier_params.sample_count,
                               frontier_params.seed, frontier_params.risk_free_rate);
    });
    report.min_risk = run_stage("frontier", [&] { return min_risk_portfolio(report.frontier); });
    report.opt_risk = run_stage("frontier", [&] { return opt_risk_portfolio(report.frontier); });

    report.eigen_model = run_stage("pca", [&] { return eigen_decompose(standardize(returns)); });
    report.selected_components =
        run_stage("pca", [&] { return select_components(report.eigen_model, eigen_params.threshold); });
    // A small universe cannot fill the requested number of eigen portfolios,
    // and a component whose loadings sum to zero has no defined weights
    // (the difference mode of a 2-asset universe, for example). Keep the
    // components ahead of the first degenerate one.
    report.eigen_candidates = run_stage("eigen_portfolios", [&] {
        int count = std::min<int>(eigen_params.portfolio_count,
                                  static_cast<int>(report.tickers.size()));
        while (true) {
            try {
                return eigen_portfolios(report.eigen_model, count, report.stats, report.matrices,
                                        frontier_params.risk_free_rate);
            } catch (const DegenerateComponent& e) {
                if (e.component() == 0) throw;
                count = e.component();
            }
        }
    });
    report.best_eigen =
        run_stage("eigen_portfolios", [&] { return best_eigen_portfolio(report.eigen_candidates); });

    report.backtest_opt = run_stage("backtest_opt", [&] {
        return run_backtest(cleaned.panel, report.opt_risk.weights, capital, config, options);
    });
    report.backtest_eigen = run_stage("backtest_eigen", [&] {
        return run_backtest(cleaned.panel, report.best_eigen.weights, capital, config, options);
    });

    // Record the snapped holdout dates for the report consumer.
    auto entry_it =
        std::lower_bound(cleaned.panel.dates.begin(), cleaned.panel.dates.end(), config.test_start);
    auto exit_it =
        std::upper_bound(cleaned.panel.dates.begin(), cleaned.panel.dates.end(), config.test_end);
    report.test_entry_date = *entry_it;
    report.test_exit_date = *(exit_it - 1);
    return report;
}

ComparisonSummary build_comparison(const std::vector<SectorReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("build_comparison needs at least one report");
    ComparisonSummary summary;
    for (const auto& r : reports) {
        SectorOutcome row;
        row.sector = r.sector_name;
        row.opt_return = r.backtest_opt.total_return;
        row.eigen_return = r.backtest_eigen.total_return;
        double diff = row.opt_return - row.eigen_return;
        if (std::abs(diff) <= 1e-9) {
            row.winner = Winner::tie;
            ++summary.ties;
        } else if (diff > 0.0) {
            row.winner = Winner::opt;
            ++summary.opt_wins;
        } else {
            row.winner = Winner::eigen;
            ++summary.eigen_wins;
        }
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

nlohmann::json report_json(const SectorReport& r) {
    nlohmann::json drops = nlohmann::json::array();
    for (const auto& d : r.dropped) {
        drops.push_back({{"ticker", d.ticker}, {"missing_fraction", d.missing_fraction}});
    }

    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& p : r.eigen_candidates) candidates.push_back(eigen_portfolio_json(p));

    nlohmann::json eigen_rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.eigen_model.eigenvectors.rows(); ++i) {
        eigen_rows.push_back(vector_json(r.eigen_model.eigenvectors.row(i)));
    }

    return {
        {"sector_name", r.sector_name},
        {"tickers", r.tickers},
        {"dropped", drops},
        {"stats",
         {{"tickers", r.stats.tickers},
          {"annual_return", vector_json(r.stats.annual_return)},
          {"annual_volatility", vector_json(r.stats.annual_volatility)},
          {"trading_days", r.stats.trading_days}}},
        {"covariance", matrix_json(r.matrices.covariance, r.matrices.tickers)},
        {"correlation", matrix_json(r.matrices.correlation, r.matrices.tickers)},
        {"frontier",
         {{"csv", r.frontier_csv},
          {"sample_count", r.frontier_params.sample_count},
          {"seed", r.frontier_params.seed},
          {"risk_free_rate", r.frontier_params.risk_free_rate},
          {"min_risk", frontier_point_json(r.min_risk)},
          {"opt_risk", frontier_point_json(r.opt_risk)}}},
        {"pca",
         {{"eigenvalues", vector_json(r.eigen_model.eigenvalues)},
          {"eigenvectors", eigen_rows},
          {"explained_variance_ratio", vector_json(r.eigen_model.explained_variance_ratio)},
          {"cumulative_explained", vector_json(r.eigen_model.cumulative_explained)},
          {"threshold", r.eigen_params.threshold},
          {"selected_components", r.selected_components},
          {"portfolio_count", r.eigen_params.portfolio_count},
          {"candidates", candidates},
          {"best", eigen_portfolio_json(r.best_eigen)}}},
        {"backtest",
         {{"capital", r.capital},
          {"long_only", r.backtest_options.long_only},
          {"integer_shares", r.backtest_options.integer_shares},
          {"entry_date", r.test_entry_date.to_string()},
          {"exit_date", r.test_exit_date.to_string()},
          {"opt_risk", ledger_json(r.backtest_opt)},
          {"eigen", ledger_json(r.backtest_eigen)}}},
    };
}

SectorReport report_from_json(const nlohmann::json& j) {
    SectorReport r;
    r.sector_name = j.at("sector_name").get<std::string>();
    r.tickers = j.at("tickers").get<std::vector<TickerId>>();
    for (const auto& d : j.at("dropped")) {
        r.dropped.push_back(
            {d.at("ticker").get<std::string>(), d.at("missing_fraction").get<double>()});
    }

    const auto& stats = j.at("stats");
    r.stats.tickers = stats.at("tickers").get<std::vector<TickerId>>();
    r.stats.annual_return = vector_from_json(stats.at("annual_return"));
    r.stats.annual_volatility = vector_from_json(stats.at("annual_volatility"));
    r.stats.trading_days = stats.at("trading_days").get<int>();

    r.matrices.tickers = j.at("covariance").at("tickers").get<std::vector<TickerId>>();
    r.matrices.covariance = matrix_from_json(j.at("covariance"));
    r.matrices.correlation = matrix_from_json(j.at("correlation"));

    const auto& frontier = j.at("frontier");
    r.frontier_csv = frontier.at("csv").get<std::string>();
    r.frontier_params.sample_count = frontier.at("sample_count").get<std::size_t>();
    r.frontier_params.seed = frontier.at("seed").get<std::uint64_t>();
    r.frontier_params.risk_free_rate = frontier.at("risk_free_rate").get<double>();
    r.frontier.seed = r.frontier_params.seed;
    r.frontier.risk_free_rate = r.frontier_params.risk_free_rate;
    r.min_risk = frontier_point_from_json(frontier.at("min_risk"));
    r.opt_risk = frontier_point_from_json(frontier.at("opt_risk"));

    const auto& pca = j.at("pca");
    r.eigen_model.tickers = r.tickers;
    r.eigen_model.eigenvalues = vector_from_json(pca.at("eigenvalues"));
    r.eigen_model.explained_variance_ratio = vector_from_json(pca.at("explained_variance_ratio"));
    r.eigen_model.cumulative_explained = vector_from_json(pca.at("cumulative_explained"));
    const auto& eigen_rows = pca.at("eigenvectors");
    const auto n = static_cast<Eigen::Index>(eigen_rows.size());
    r.eigen_model.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r.eigen_model.eigenvectors.row(i) =
            vector_from_json(eigen_rows[static_cast<std::size_t>(i)]).transpose();
    }
    r.eigen_params.threshold = pca.at("threshold").get<double>();
    r.selected_components = pca.at("selected_components").get<int>();
    r.eigen_params.portfolio_count = pca.at("portfolio_count").get<int>();
    for (const auto& c : pca.at("candidates")) {
        r.eigen_candidates.push_back(eigen_portfolio_from_json(c));
    }
    r.best_eigen = eigen_portfolio_from_json(pca.at("best"));

    const auto& backtest = j.at("backtest");
    r.capital = backtest.at("capital").get<double>();
    r.backtest_options.long_only = backtest.at("long_only").get<bool>();
    r.backtest_options.integer_shares = backtest.at("integer_shares").get<bool>();
    r.test_entry_date = Date::parse(backtest.at("entry_date").get<std::string>());
    r.test_exit_date = Date::parse(backtest.at("exit_date").get<std::string>());
    r.backtest_opt = ledger_from_json(backtest.at("opt_risk"));
    r.backtest_eigen = ledger_from_json(backtest.at("eigen"));
    return r;
}

namespace {

void write_file(const std::filesystem::path& path, const auto& writer) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    writer(out);
}

}  // namespace

void write_bundle(const SectorReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    write_file(dir / "stats.csv", [&](std::ostream& out) {
        out << "ticker,annual_return,annual_volatility\n";
        for (Eigen::Index i = 0; i < report.stats.annual_return.size(); ++i) {
            out << report.stats.tickers[static_cast<std::size_t>(i)] << ','
                << detail::format_double(report.stats.annual_return(i)) << ','
                << detail::format_double(report.stats.annual_volatility(i)) << '\n';
        }
    });

    write_file(dir / "weights.csv", [&](std::ostream& out) {
        out << "ticker,min_risk,opt_risk,eigen\n";
        for (std::size_t i = 0; i < report.tickers.size(); ++i) {
            auto idx = static_cast<Eigen::Index>(i);
            out << report.tickers[i] << ','
                << detail::format_double(report.min_risk.weights.weights(idx)) << ','
                << detail::format_double(report.opt_risk.weights.weights(idx)) << ','
                << detail::format_double(report.best_eigen.weights.weights(idx)) << '\n';
        }
    });

    write_file(dir / report.frontier_csv,
               [&](std::ostream& out) { write_frontier_csv(report.frontier, out); });
    write_file(dir / "scree.csv",
               [&](std::ostream& out) { write_scree_csv(report.eigen_model, out); });
    write_file(dir / "eigen_weights.csv",
               [&](std::ostream& out) { write_eigen_weights_csv(report.eigen_candidates, out); });
    write_file(dir / "corr.csv", [&](std::ostream& out) {
        write_matrix_csv(report.matrices.correlation, report.matrices.tickers, out);
    });
    write_file(dir / "backtest_opt.csv",
               [&](std::ostream& out) { write_ledger_csv(report.backtest_opt, out); });
    write_file(dir / "backtest_eigen.csv",
               [&](std::ostream& out) { write_ledger_csv(report.backtest_eigen, out); });
    write_file(dir / "report.json",
               [&](std::ostream& out) { out << report_json(report).dump(2) << '\n'; });
}

void write_comparison_csv(const ComparisonSummary& summary, std::ostream& out) {
    out << "sector,opt_return,eigen_return,winner\n";
    for (const auto& row : summary.rows) {
        const char* winner = row.winner == Winner::opt     ? "opt"
                             : row.winner == Winner::eigen ? "eigen"
                                                           : "tie";
        out << row.sector << ',' << detail::format_double(row.opt_return) << ','
            << detail::format_double(row.eigen_return) << ',' << winner << '\n';
    }
}

}  // namespace flab
