#include "flab/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "text_util.hpp"

namespace flab {

namespace {

/// Truncate toward zero, so shorts are also floored in magnitude.
double whole_shares(double shares) {
    return std::trunc(shares);
}

}  // namespace

bool BacktestLedger::has_short_positions() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const PositionEntry& e) { return e.share_count < 0.0; });
}

BacktestLedger open_positions(const WeightVector& weights, double capital,
                              const Eigen::VectorXd& entry_prices,
                              const BacktestOptions& options) {
    const auto n = weights.weights.size();
    if (entry_prices.size() != n) {
        throw DimensionMismatch("open_positions: " + std::to_string(entry_prices.size()) +
                                " entry prices for " + std::to_string(n) + " weights");
    }
    if (!(capital > 0.0)) throw std::invalid_argument("capital must be positive");

    BacktestLedger ledger;
    ledger.capital = capital;
    ledger.entries.reserve(static_cast<std::size_t>(n));

    double deployed = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ticker = weights.tickers[static_cast<std::size_t>(i)];
        double w = weights.weights(i);
        double price = entry_prices(i);
        if (!(price > 0.0) || std::isnan(price)) {
            throw std::invalid_argument("entry price for '" + ticker + "' must be positive");
        }
        if (w < 0.0 && options.long_only) throw NegativeWeightNotAllowed(ticker);

        PositionEntry e;
        e.ticker = ticker;
        e.entry_price = price;
        e.amount_invested = capital * w;
        e.share_count = e.amount_invested / price;
        if (options.integer_shares) e.share_count = whole_shares(e.share_count);
        e.exit_price = std::numeric_limits<double>::quiet_NaN();
        e.terminal_value = std::numeric_limits<double>::quiet_NaN();
        deployed += e.share_count * price;
        ledger.entries.push_back(std::move(e));
    }
    ledger.residual_cash = options.integer_shares ? capital - deployed : 0.0;
    return ledger;
}

BacktestLedger close_positions(BacktestLedger ledger, const Eigen::VectorXd& exit_prices) {
    if (exit_prices.size() != static_cast<Eigen::Index>(ledger.entries.size())) {
        throw DimensionMismatch("close_positions: " + std::to_string(exit_prices.size()) +
                                " exit prices for " + std::to_string(ledger.entries.size()) +
                                " positions");
    }
    double total = ledger.residual_cash;
    for (std::size_t i = 0; i < ledger.entries.size(); ++i) {
        auto& e = ledger.entries[i];
        double price = exit_prices(static_cast<Eigen::Index>(i));
        if (std::isnan(price)) throw MissingExitPrice(e.ticker);
        if (!(price > 0.0)) {
            throw std::invalid_argument("exit price for '" + e.ticker + "' must be positive");
        }
        e.exit_price = price;
        e.terminal_value = e.share_count * price;
        total += e.terminal_value;
    }
    ledger.total_terminal = total;
    ledger.total_return = total / ledger.capital - 1.0;
    ledger.closed = true;
    return ledger;
}

BacktestLedger run_backtest(const PricePanel& panel, const WeightVector& weights, double capital,
                            const UniverseConfig& config, const BacktestOptions& options) {
    return run_backtest(panel, weights, capital, config.test_start, config.test_end, options);
}

BacktestLedger run_backtest(const PricePanel& panel, const WeightVector& weights, double capital,
                            const Date& test_start, const Date& test_end,
                            const BacktestOptions& options) {
    auto entry_it = std::lower_bound(panel.dates.begin(), panel.dates.end(), test_start);
    if (entry_it == panel.dates.end()) {
        throw WindowNotCovered("no trading date at or after " + test_start.to_string());
    }
    auto exit_it = std::upper_bound(panel.dates.begin(), panel.dates.end(), test_end);
    if (exit_it == panel.dates.begin()) {
        throw WindowNotCovered("no trading date at or before " + test_end.to_string());
    }
    --exit_it;
    if (*exit_it < *entry_it) {
        throw WindowNotCovered("test window [" + test_start.to_string() + ", " +
                               test_end.to_string() + "] contains no trading dates");
    }
    auto entry_row = static_cast<Eigen::Index>(entry_it - panel.dates.begin());
    auto exit_row = static_cast<Eigen::Index>(exit_it - panel.dates.begin());

    // Align panel columns to the weight vector's ticker order.
    const auto n = static_cast<Eigen::Index>(weights.tickers.size());
    Eigen::VectorXd entry_prices(n);
    Eigen::VectorXd exit_prices(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ticker = weights.tickers[static_cast<std::size_t>(i)];
        auto it = std::find(panel.tickers.begin(), panel.tickers.end(), ticker);
        if (it == panel.tickers.end()) throw MissingColumn(ticker);
        auto col = static_cast<Eigen::Index>(it - panel.tickers.begin());
        entry_prices(i) = panel.closes(entry_row, col);
        exit_prices(i) = panel.closes(exit_row, col);
    }

    return close_positions(open_positions(weights, capital, entry_prices, options), exit_prices);
}

void write_ledger_csv(const BacktestLedger& ledger, std::ostream& out) {
    out << "ticker,entry_price,amount_invested,share_count,exit_price,terminal_value\n";
    double invested = 0.0;
    for (const auto& e : ledger.entries) {
        out << e.ticker << ',' << detail::format_double(e.entry_price) << ','
            << detail::format_double(e.amount_invested) << ','
            << detail::format_double(e.share_count) << ',';
        if (!std::isnan(e.exit_price)) out << detail::format_double(e.exit_price);
        out << ',';
        if (!std::isnan(e.terminal_value)) out << detail::format_double(e.terminal_value);
        out << '\n';
        invested += e.amount_invested;
    }
    out << "TOTAL,," << detail::format_double(invested) << ",,,";
    if (ledger.closed) out << detail::format_double(ledger.total_terminal);
    out << '\n';
}

nlohmann::json ledger_json(const BacktestLedger& ledger) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : ledger.entries) {
        entries.push_back({{"ticker", e.ticker},
                           {"entry_price", e.entry_price},
                           {"amount_invested", e.amount_invested},
                           {"share_count", e.share_count},
                           {"exit_price", e.exit_price},
                           {"terminal_value", e.terminal_value}});
    }
    return {{"capital", ledger.capital},
            {"entries", entries},
            {"residual_cash", ledger.residual_cash},
            {"closed", ledger.closed},
            {"total_terminal", ledger.total_terminal},
            {"total_return", ledger.total_return},
            {"has_short_positions", ledger.has_short_positions()}};
}

namespace {

/// NaN serializes as JSON null; map it back when reading.
double number_or_nan(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

BacktestLedger ledger_from_json(const nlohmann::json& j) {
    BacktestLedger ledger;
    ledger.capital = j.at("capital").get<double>();
    ledger.residual_cash = j.at("residual_cash").get<double>();
    ledger.closed = j.at("closed").get<bool>();
    ledger.total_terminal = number_or_nan(j.at("total_terminal"));
    ledger.total_return = number_or_nan(j.at("total_return"));
    for (const auto& je : j.at("entries")) {
        PositionEntry e;
        e.ticker = je.at("ticker").get<std::string>();
        e.entry_price = je.at("entry_price").get<double>();
        e.amount_invested = je.at("amount_invested").get<double>();
        e.share_count = je.at("share_count").get<double>();
        e.exit_price = number_or_nan(je.at("exit_price"));
        e.terminal_value = number_or_nan(je.at("terminal_value"));
        ledger.entries.push_back(std::move(e));
    }
    return ledger;
}

}  // namespace flab
