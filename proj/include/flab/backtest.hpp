#pragma once

#include <iosfwd>

#include "flab/frontier.hpp"
#include "flab/ingest.hpp"

#include <json.hpp>

namespace flab {

struct PositionEntry {
    TickerId ticker;
    double entry_price = 0.0;
    double amount_invested = 0.0;  // capital x weight, full precision
    double share_count = 0.0;      // fractional by default; negative = short
    double exit_price = 0.0;
    double terminal_value = 0.0;
};

struct BacktestOptions {
    bool long_only = false;      // reject negative weights
    bool integer_shares = false; // truncate share counts toward zero
};

/// Entry/exit bookkeeping for one buy-and-hold window.
struct BacktestLedger {
    double capital = 0.0;
    std::vector<PositionEntry> entries;
    double residual_cash = 0.0;  // nonzero only in integer-shares mode
    bool closed = false;
    double total_terminal = 0.0;
    double total_return = 0.0;

    bool has_short_positions() const;
};

/// Allocate `capital` across tickers at the entry prices:
/// amount_i = capital * w_i, shares_i = amount_i / entry_price_i.
BacktestLedger open_positions(const WeightVector& weights, double capital,
                              const Eigen::VectorXd& entry_prices,
                              const BacktestOptions& options = {});

/// Value every position at its exit price and fill the totals. A NaN exit
/// price raises MissingExitPrice for that ticker.
BacktestLedger close_positions(BacktestLedger ledger, const Eigen::VectorXd& exit_prices);

/// Snap the holdout window to the panel: entry prices from the first date
/// >= test_start, exit prices from the last date <= test_end.
BacktestLedger run_backtest(const PricePanel& panel, const WeightVector& weights,
                            double capital, const UniverseConfig& config,
                            const BacktestOptions& options = {});
BacktestLedger run_backtest(const PricePanel& panel, const WeightVector& weights,
                            double capital, const Date& test_start, const Date& test_end,
                            const BacktestOptions& options = {});

/// `ticker,entry_price,amount_invested,share_count,exit_price,terminal_value`
/// plus a TOTAL summary row.
void write_ledger_csv(const BacktestLedger& ledger, std::ostream& out);

nlohmann::json ledger_json(const BacktestLedger& ledger);
BacktestLedger ledger_from_json(const nlohmann::json& j);

}  // namespace flab
