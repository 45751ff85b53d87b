#pragma once

#include <Eigen/Core>
#include <iosfwd>

#include "flab/ingest.hpp"

#include <json.hpp>

namespace flab {

inline constexpr int kDefaultTradingDays = 250;

/// Daily simple and log returns of a price panel. Row t holds the change
/// from panel date t to t+1; `dates` carries the end-of-period date.
struct ReturnPanel {
    std::vector<Date> dates;  // length = panel rows - 1
    std::vector<TickerId> tickers;
    Eigen::MatrixXd simple_returns;  // [T x n]
    Eigen::MatrixXd log_returns;     // [T x n]

    Eigen::Index num_periods() const { return simple_returns.rows(); }
    Eigen::Index num_assets() const { return simple_returns.cols(); }
};

/// Per-ticker annualized return and volatility.
struct AnnualStats {
    std::vector<TickerId> tickers;
    Eigen::VectorXd annual_return;      // mean daily simple return x trading_days
    Eigen::VectorXd annual_volatility;  // sample stdev x sqrt(trading_days)
    int trading_days = kDefaultTradingDays;
};

/// Sample covariance (T-1 denominator) and correlation of daily simple returns.
struct CovCorr {
    std::vector<TickerId> tickers;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd correlation;  // unit diagonal
};

/// Differencing of a cleaned panel into daily returns.
/// simple[t][i] = closes[t+1][i]/closes[t][i] - 1, log[t][i] = ln(1+simple).
ReturnPanel compute_returns(const PricePanel& panel);

AnnualStats annualize(const ReturnPanel& returns, int trading_days = kDefaultTradingDays);

/// Throws DegenerateColumn if any ticker's returns have zero variance.
CovCorr cov_corr(const ReturnPanel& returns);

/// Square matrix as CSV with ticker row/column headers.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::vector<TickerId>& tickers,
                      std::ostream& out);

/// JSON block `{tickers, rows}` used by external heatmap renderers.
nlohmann::json matrix_json(const Eigen::MatrixXd& m, const std::vector<TickerId>& tickers);

}  // namespace flab
