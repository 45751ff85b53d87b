#include <doctest.h>

#include <cmath>
#include <limits>

#include "flab/backtest.hpp"
#include "test_helpers.hpp"

using namespace flab;
using namespace flab::testutil;

namespace {

WeightVector weights_of(std::vector<std::pair<std::string, double>> entries) {
    WeightVector wv;
    wv.weights.resize(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        wv.tickers.push_back(entries[i].first);
        wv.weights(static_cast<Eigen::Index>(i)) = entries[i].second;
    }
    return wv;
}

Eigen::VectorXd prices_of(std::vector<double> v) {
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

PricePanel two_ticker_panel(const std::vector<std::pair<const char*, std::array<double, 2>>>& rows) {
    PricePanel panel;
    panel.tickers = {"A", "B"};
    panel.closes.resize(static_cast<Eigen::Index>(rows.size()), 2);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        panel.dates.push_back(Date::parse(rows[r].first));
        panel.closes(static_cast<Eigen::Index>(r), 0) = rows[r].second[0];
        panel.closes(static_cast<Eigen::Index>(r), 1) = rows[r].second[1];
    }
    return panel;
}

}  // namespace

TEST_CASE("open_positions: published share count for the largest auto holding") {
    // 3580 invested at 7691 entry -> 0.4655 shares (published rounded 0.47)
    auto ledger = open_positions(weights_of({{"MARUTI", 1.0}}), 3580.0, prices_of({7691.0}));
    CHECK(ledger.entries[0].share_count == doctest::Approx(0.46548).epsilon(1e-4));
    CHECK(ledger.entries[0].amount_invested == doctest::Approx(3580.0).epsilon(1e-12));
}

TEST_CASE("open_positions: simple allocations") {
    auto ledger = open_positions(weights_of({{"X", 1.0}}), 100000.0, prices_of({100.0}));
    CHECK(ledger.entries[0].share_count == doctest::Approx(1000.0).epsilon(1e-12));

    auto two = open_positions(weights_of({{"X", 1.0}, {"Y", 0.0}}), 50000.0,
                              prices_of({100.0, 200.0}));
    CHECK(two.entries[1].share_count == 0.0);
    CHECK(two.entries[1].amount_invested == 0.0);

    CHECK_THROWS_AS(open_positions(weights_of({{"X", 1.0}}), 0.0, prices_of({100.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(open_positions(weights_of({{"X", 1.0}}), 1000.0, prices_of({-5.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(open_positions(weights_of({{"X", 1.0}, {"Y", 0.5}}), 1000.0,
                                   prices_of({100.0})),
                    DimensionMismatch);
}

TEST_CASE("open_positions: long-only mode rejects shorts, default allows them") {
    auto wv = weights_of({{"X", 1.25}, {"Y", -0.25}});
    auto shorts = open_positions(wv, 10000.0, prices_of({50.0, 80.0}));
    CHECK(shorts.entries[1].share_count == doctest::Approx(-31.25).epsilon(1e-12));
    CHECK(shorts.has_short_positions());

    BacktestOptions long_only;
    long_only.long_only = true;
    try {
        open_positions(wv, 10000.0, prices_of({50.0, 80.0}), long_only);
        FAIL("expected NegativeWeightNotAllowed");
    } catch (const NegativeWeightNotAllowed& e) {
        CHECK(e.ticker() == "Y");
    }
}

TEST_CASE("open_positions: integer-shares mode floors counts and reports residual cash") {
    BacktestOptions opts;
    opts.integer_shares = true;
    auto ledger = open_positions(weights_of({{"X", 0.6}, {"Y", 0.4}}), 10000.0,
                                 prices_of({70.0, 90.0}), opts);
    CHECK(ledger.entries[0].share_count == 85.0);  // 6000/70 = 85.71 -> 85
    CHECK(ledger.entries[1].share_count == 44.0);  // 4000/90 = 44.44 -> 44
    double deployed = 85.0 * 70.0 + 44.0 * 90.0;
    CHECK(ledger.residual_cash == doctest::Approx(10000.0 - deployed).epsilon(1e-12));

    auto closed = close_positions(ledger, prices_of({70.0, 90.0}));
    CHECK(closed.total_return == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("close_positions: identity and doubling cases") {
    auto wv = weights_of({{"X", 0.5}, {"Y", 0.5}});
    auto ledger = open_positions(wv, 10000.0, prices_of({100.0, 50.0}));

    auto flat = close_positions(ledger, prices_of({100.0, 50.0}));
    CHECK(flat.total_return == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(flat.closed);

    auto one = open_positions(weights_of({{"X", 1.0}}), 5000.0, prices_of({20.0}));
    auto doubled = close_positions(one, prices_of({40.0}));
    CHECK(doubled.total_return == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("close_positions: missing exit price raises with the ticker name") {
    auto ledger = open_positions(weights_of({{"X", 0.5}, {"Y", 0.5}}), 10000.0,
                                 prices_of({100.0, 50.0}));
    Eigen::VectorXd exits(2);
    exits << 110.0, std::numeric_limits<double>::quiet_NaN();
    try {
        close_positions(ledger, exits);
        FAIL("expected MissingExitPrice");
    } catch (const MissingExitPrice& e) {
        CHECK(e.ticker() == "Y");
    }
}

TEST_CASE("close_positions: auto-sector ledger reproduces the published return") {
    const auto& table = testdata::ledger_tables()[0];  // auto/opt
    auto in = ledger_inputs(table);
    auto ledger = close_positions(open_positions(in.weights, in.capital, in.entry), in.exit);
    CHECK(ledger.total_return ==
          doctest::Approx(table.expected_return).epsilon(0.007 / table.expected_return));
    CHECK(std::abs(ledger.total_return - table.expected_return) < 0.007);
}

TEST_CASE("ledger invariants on all published tables") {
    for (const auto& table : testdata::ledger_tables()) {
        auto in = ledger_inputs(table);
        auto ledger = close_positions(open_positions(in.weights, in.capital, in.entry), in.exit);

        double invested = 0.0;
        double terminal = 0.0;
        for (const auto& e : ledger.entries) {
            invested += e.amount_invested;
            terminal += e.terminal_value;
        }
        CHECK(invested == doctest::Approx(in.capital).epsilon(1e-9));
        CHECK(ledger.total_terminal == doctest::Approx(terminal).epsilon(1e-9));

        // scale invariance
        auto scaled =
            close_positions(open_positions(in.weights, in.capital * 10.0, in.entry), in.exit);
        CHECK(std::abs(scaled.total_return - ledger.total_return) < 1e-12);
    }
}

TEST_CASE("close_positions: raising one exit price raises the total") {
    auto in = ledger_inputs(testdata::ledger_tables()[0]);
    auto base = close_positions(open_positions(in.weights, in.capital, in.entry), in.exit);
    Eigen::VectorXd bumped = in.exit;
    bumped(4) += 50.0;
    auto more = close_positions(open_positions(in.weights, in.capital, in.entry), bumped);
    CHECK(more.total_terminal > base.total_terminal);
}

TEST_CASE("run_backtest: exact window hit") {
    auto panel = two_ticker_panel({{"2021-01-01", {100.0, 50.0}},
                                   {"2021-03-01", {105.0, 55.0}},
                                   {"2021-07-01", {120.0, 40.0}}});
    UniverseConfig config;
    config.sector_name = "t";
    config.tickers = {"A", "B"};
    config.train_start = Date::parse("2020-01-01");
    config.train_end = Date::parse("2020-12-31");
    config.test_start = Date::parse("2021-01-01");
    config.test_end = Date::parse("2021-07-01");

    auto ledger = run_backtest(panel, weights_of({{"A", 0.5}, {"B", 0.5}}), 1000.0, config);
    // A: 500/100*120 = 600; B: 500/50*40 = 400
    CHECK(ledger.total_terminal == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(ledger.total_return == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("run_backtest: weekend start snaps to the next trading date") {
    auto panel = two_ticker_panel({{"2021-01-04", {100.0, 50.0}},   // Monday
                                   {"2021-06-30", {110.0, 60.0}}});
    auto ledger = run_backtest(panel, weights_of({{"A", 1.0}, {"B", 0.0}}), 1000.0,
                               Date::parse("2021-01-02"),  // Saturday
                               Date::parse("2021-07-01"));
    CHECK(ledger.entries[0].entry_price == 100.0);
    CHECK(ledger.entries[0].exit_price == 110.0);
    CHECK(ledger.total_return == doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("run_backtest: window and column errors") {
    auto panel = two_ticker_panel({{"2021-01-04", {100.0, 50.0}}});
    auto wv = weights_of({{"A", 1.0}, {"B", 0.0}});
    CHECK_THROWS_AS(
        run_backtest(panel, wv, 1000.0, Date::parse("2021-02-01"), Date::parse("2021-03-01")),
        WindowNotCovered);
    CHECK_THROWS_AS(
        run_backtest(panel, wv, 1000.0, Date::parse("2020-01-01"), Date::parse("2020-06-01")),
        WindowNotCovered);

    auto missing = weights_of({{"A", 0.5}, {"Z", 0.5}});
    CHECK_THROWS_AS(
        run_backtest(panel, missing, 1000.0, Date::parse("2021-01-01"), Date::parse("2021-12-31")),
        MissingColumn);
}

TEST_CASE("ledger CSV and JSON exports") {
    auto in = ledger_inputs(testdata::ledger_tables()[0]);
    auto ledger = close_positions(open_positions(in.weights, in.capital, in.entry), in.exit);

    std::ostringstream out;
    write_ledger_csv(ledger, out);
    auto text = out.str();
    CHECK(text.rfind("ticker,entry_price,amount_invested,share_count,exit_price,terminal_value\n",
                     0) == 0);
    CHECK(text.find("\nTOTAL,,") != std::string::npos);
    CHECK(text.find("MARUTI,7691,") != std::string::npos);

    auto j = ledger_json(ledger);
    auto decoded = ledger_from_json(j);
    CHECK(decoded.capital == ledger.capital);
    CHECK(decoded.total_return == ledger.total_return);
    REQUIRE(decoded.entries.size() == ledger.entries.size());
    for (std::size_t i = 0; i < decoded.entries.size(); ++i) {
        CHECK(decoded.entries[i].share_count == ledger.entries[i].share_count);
        CHECK(decoded.entries[i].terminal_value == ledger.entries[i].terminal_value);
    }
}
