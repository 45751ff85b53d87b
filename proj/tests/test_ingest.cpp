#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "flab/ingest.hpp"
#include "flab/rng.hpp"
#include "test_helpers.hpp"

// keep httplib after Eigen: resolv.h (via httplib) defines a `_res` macro
// that corrupts Eigen's internals when included first
#include <httplib.h>

using namespace flab;

namespace {

UniverseConfig small_config() {
    UniverseConfig c;
    c.sector_name = "test";
    c.tickers = {"A", "B"};
    c.train_start = Date::parse("2020-01-01");
    c.train_end = Date::parse("2020-01-31");
    c.test_start = Date::parse("2020-02-01");
    c.test_end = Date::parse("2020-02-28");
    return c;
}

PricePanel parse(const std::string& csv, const UniverseConfig& config) {
    std::istringstream in(csv);
    return parse_price_csv(in, config);
}

}  // namespace

TEST_CASE("date parsing accepts ISO and rejects junk") {
    auto d = Date::parse("2021-07-01");
    CHECK(d.year == 2021);
    CHECK(d.month == 7);
    CHECK(d.day == 1);
    CHECK(d.to_string() == "2021-07-01");
    CHECK(Date::parse("2020-02-29") == Date{2020, 2, 29});  // leap day
    CHECK_THROWS_AS(Date::parse("2021-02-29"), std::invalid_argument);
    CHECK_THROWS_AS(Date::parse("2021-13-01"), std::invalid_argument);
    CHECK_THROWS_AS(Date::parse("2021-1-01"), std::invalid_argument);
    CHECK_THROWS_AS(Date::parse("01-01-2021"), std::invalid_argument);
    CHECK(Date{2020, 12, 31} < Date{2021, 1, 1});
}

TEST_CASE("config validation") {
    auto c = small_config();
    CHECK_NOTHROW(c.validate());

    auto dup = c;
    dup.tickers = {"A", "A"};
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    auto bad_window = c;
    bad_window.test_start = Date::parse("2020-01-15");  // before train_end
    CHECK_THROWS_AS(bad_window.validate(), std::invalid_argument);

    auto ws = c;
    ws.tickers = {"A", "B C"};
    CHECK_THROWS_AS(ws.validate(), std::invalid_argument);

    auto j = c.to_json();
    auto parsed = UniverseConfig::from_json(j);
    CHECK(parsed.sector_name == c.sector_name);
    CHECK(parsed.tickers == c.tickers);
    CHECK(parsed.test_end == c.test_end);
}

TEST_CASE("load_csv: fully populated 3-row file") {
    auto panel = parse(
        "date,A,B\n"
        "2020-01-01,10,20\n"
        "2020-01-02,11,21\n"
        "2020-01-03,12,22\n",
        small_config());
    CHECK(panel.rows() == 3);
    CHECK(panel.cols() == 2);
    CHECK(panel.missing_count() == 0);
    CHECK(panel.closes(0, 0) == 10.0);
    CHECK(panel.closes(2, 1) == 22.0);
}

TEST_CASE("load_csv: empty cell and non-numeric cell become missing") {
    auto panel = parse(
        "date,A,B\n"
        "2020-01-01,,20\n"
        "2020-01-02,n/a,21\n"
        "2020-01-03,-5,22\n"  // non-positive is a data error -> missing
        "2020-01-04,12,23\n",
        small_config());
    CHECK(panel.missing_count() == 3);
    CHECK(std::isnan(panel.closes(0, 0)));
    CHECK(std::isnan(panel.closes(1, 0)));
    CHECK(std::isnan(panel.closes(2, 0)));
    CHECK(panel.closes(3, 0) == 12.0);
}

TEST_CASE("load_csv: out-of-order rows are sorted, duplicates rejected") {
    auto panel = parse(
        "date,A,B\n"
        "2020-01-03,12,22\n"
        "2020-01-01,10,20\n"
        "2020-01-02,11,21\n",
        small_config());
    REQUIRE(panel.rows() == 3);
    CHECK(panel.dates.front() == Date{2020, 1, 1});
    CHECK(panel.dates.back() == Date{2020, 1, 3});
    CHECK(panel.closes(0, 0) == 10.0);
    CHECK(panel.closes(2, 0) == 12.0);

    CHECK_THROWS_AS(parse(
                        "date,A,B\n"
                        "2020-01-01,10,20\n"
                        "2020-01-01,11,21\n",
                        small_config()),
                    MalformedRow);
}

TEST_CASE("load_csv: structural errors") {
    CHECK_THROWS_AS(parse("date,A,B\n2020-01-01,10\n", small_config()), MalformedRow);
    CHECK_THROWS_AS(parse("date,A,B\nnot-a-date,10,20\n", small_config()), MalformedRow);
    CHECK_THROWS_AS(parse("day,A,B\n2020-01-01,10,20\n", small_config()), MalformedRow);
    CHECK_THROWS_AS(parse("date,A\n2020-01-01,10\n", small_config()), MissingColumn);
    // all rows outside the window
    CHECK_THROWS_AS(parse("date,A,B\n2019-01-01,10,20\n", small_config()), EmptyWindow);
    CHECK_THROWS_AS(load_csv("/nonexistent/prices.csv", small_config()), Error);

    try {
        parse("date,A\n2020-01-01,10\n", small_config());
        FAIL("expected MissingColumn");
    } catch (const MissingColumn& e) {
        CHECK(e.ticker() == "B");
    }
}

TEST_CASE("load_csv: window restriction and extra columns") {
    auto config = small_config();
    auto panel = parse(
        "date,A,IGNORED,B\n"
        "2019-12-31,1,9,2\n"
        "2020-01-02,11,9,21\n"
        "2020-03-01,99,9,99\n",
        config);
    REQUIRE(panel.rows() == 1);  // only 2020-01-02 is inside [train_start, test_end]
    CHECK(panel.closes(0, 0) == 11.0);
    CHECK(panel.closes(0, 1) == 21.0);
    CHECK(panel.tickers == std::vector<TickerId>{"A", "B"});
}

TEST_CASE("clean_panel: drop rule is strictly greater than 25%") {
    auto config = small_config();
    config.tickers = {"A", "B", "C"};
    // 10 rows; A has 3 missing (30% -> dropped), B has 2 (20% -> kept), C has 0.
    std::ostringstream csv;
    csv << "date,A,B,C\n";
    for (int day = 1; day <= 10; ++day) {
        csv << "2020-01-" << (day < 10 ? "0" : "") << day << ',';
        csv << (day <= 3 ? "" : "10") << ',' << (day <= 2 ? "" : "20") << ",30\n";
    }
    auto raw = parse(csv.str(), config);
    auto cleaned = clean_panel(raw);
    REQUIRE(cleaned.dropped.size() == 1);
    CHECK(cleaned.dropped[0].ticker == "A");
    CHECK(cleaned.dropped[0].missing_fraction == doctest::Approx(0.3));
    CHECK(cleaned.panel.tickers == std::vector<TickerId>{"B", "C"});
    CHECK(cleaned.panel.missing_count() == 0);

    // Exactly 25% stays.
    std::ostringstream csv2;
    csv2 << "date,A,B\n";
    for (int day = 1; day <= 4; ++day) {
        csv2 << "2020-01-0" << day << ',' << (day == 1 ? "" : "10") << ",20\n";
    }
    auto cleaned2 = clean_panel(parse(csv2.str(), small_config()));
    CHECK(cleaned2.dropped.empty());
    CHECK(cleaned2.panel.cols() == 2);
}

TEST_CASE("clean_panel: gaps take the mean of the column's non-missing cells") {
    // Column A alternates 10/20 with two gaps (25% missing, so it is kept);
    // the non-missing mean is 15, so the run [10, _, 20] becomes [10, 15, 20].
    auto panel = parse(
        "date,A,B\n"
        "2020-01-01,10,1\n"
        "2020-01-02,,1\n"
        "2020-01-03,20,1\n"
        "2020-01-04,10,1\n"
        "2020-01-05,,1\n"
        "2020-01-06,20,1\n"
        "2020-01-07,10,1\n"
        "2020-01-08,20,1\n",
        small_config());
    auto cleaned = clean_panel(panel);
    CHECK(cleaned.dropped.empty());
    CHECK(cleaned.panel.closes(0, 0) == 10.0);
    CHECK(cleaned.panel.closes(1, 0) == 15.0);
    CHECK(cleaned.panel.closes(2, 0) == 20.0);
    CHECK(cleaned.panel.closes(4, 0) == 15.0);
}

TEST_CASE("clean_panel: no missing cells is an identity, and cleaning is idempotent") {
    SplitMix64 gen(11);
    auto config = small_config();
    config.tickers = {"A", "B", "C", "D"};

    std::ostringstream csv;
    csv << "date,A,B,C,D\n";
    for (int day = 1; day <= 20; ++day) {
        csv << "2020-01-" << (day < 10 ? "0" : "") << day;
        for (int c = 0; c < 4; ++c) {
            csv << ',';
            // roughly 15% missing in two columns
            if (c < 2 && gen.next_open_unit() < 0.15) continue;
            csv << 50.0 + 10.0 * gen.next_open_unit();
        }
        csv << '\n';
    }
    auto raw = parse(csv.str(), config);
    auto once = clean_panel(raw);
    auto twice = clean_panel(once.panel);
    CHECK(twice.dropped.empty());
    CHECK(once.panel.tickers == twice.panel.tickers);
    CHECK(once.panel.closes == twice.panel.closes);

    // Non-missing cells never change.
    for (Eigen::Index r = 0; r < raw.rows(); ++r) {
        for (std::size_t c = 0; c < once.panel.tickers.size(); ++c) {
            auto raw_col = std::find(raw.tickers.begin(), raw.tickers.end(),
                                     once.panel.tickers[c]) -
                           raw.tickers.begin();
            double orig = raw.closes(r, raw_col);
            if (!std::isnan(orig)) {
                CHECK(once.panel.closes(r, static_cast<Eigen::Index>(c)) == orig);
            }
        }
    }

    auto clean_of_clean = clean_panel(clean_panel(raw).panel);
    CHECK(clean_of_clean.panel.closes == once.panel.closes);
}

TEST_CASE("clean_panel: UniverseTooSmall when fewer than 2 columns survive") {
    auto panel = parse(
        "date,A,B\n"
        "2020-01-01,,20\n"
        "2020-01-02,,21\n"
        "2020-01-03,12,\n"
        "2020-01-04,13,\n",
        small_config());
    // A 50% missing, B 50% missing -> both dropped
    CHECK_THROWS_AS(clean_panel(panel), UniverseTooSmall);
}

TEST_CASE("write_csv round-trips every retained cell exactly") {
    SplitMix64 gen(23);
    auto config = small_config();
    config.tickers = {"A", "B", "C"};
    std::ostringstream csv;
    csv << "date,A,B,C\n";
    for (int day = 1; day <= 15; ++day) {
        csv << "2020-01-" << (day < 10 ? "0" : "") << day;
        for (int c = 0; c < 3; ++c) {
            if (day == 7 && c == 1) {
                csv << ',';  // one missing cell survives the round trip as missing
            } else {
                csv << ',' << 100.0 * gen.next_open_unit();
            }
        }
        csv << '\n';
    }
    auto panel = parse(csv.str(), config);

    std::ostringstream out;
    write_csv(panel, out);
    auto reloaded = parse(out.str(), config);

    REQUIRE(reloaded.rows() == panel.rows());
    CHECK(reloaded.dates == panel.dates);
    for (Eigen::Index r = 0; r < panel.rows(); ++r) {
        for (Eigen::Index c = 0; c < panel.cols(); ++c) {
            if (std::isnan(panel.closes(r, c))) {
                CHECK(std::isnan(reloaded.closes(r, c)));
            } else {
                CHECK(reloaded.closes(r, c) == panel.closes(r, c));  // bitwise
            }
        }
    }
}

TEST_CASE("slice selects an inclusive date range") {
    auto panel = parse(
        "date,A,B\n"
        "2020-01-01,10,20\n"
        "2020-01-02,11,21\n"
        "2020-01-03,12,22\n"
        "2020-01-06,13,23\n",
        small_config());
    auto mid = panel.slice(Date::parse("2020-01-02"), Date::parse("2020-01-03"));
    CHECK(mid.rows() == 2);
    CHECK(mid.closes(0, 0) == 11.0);
    // bounds that fall between trading days
    auto snapped = panel.slice(Date::parse("2020-01-04"), Date::parse("2020-01-31"));
    CHECK(snapped.rows() == 1);
    CHECK(snapped.closes(0, 0) == 13.0);
}

TEST_CASE("fetch_remote matches load_csv and maps HTTP errors") {
    const std::string body =
        "date,A,B\n"
        "2020-01-01,10,20\n"
        "2020-01-02,11,21\n"
        "2020-01-03,12,22\n";
    const std::string body_missing_b =
        "date,A\n"
        "2020-01-01,10\n";

    httplib::Server server;
    server.Get("/prices.csv", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(body, "text/csv");
    });
    server.Get("/missing.csv", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(body_missing_b, "text/csv");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    auto cache_dir = std::filesystem::temp_directory_path() / "flab-test-cache";
    setenv("FRONTIER_LAB_CACHE", cache_dir.c_str(), 1);

    auto config = small_config();
    std::string base = "http://127.0.0.1:" + std::to_string(port);

    SUBCASE("stub endpoint equals loading the same bytes from disk") {
        auto fetched = fetch_remote(base + "/prices.csv", config);
        std::istringstream in(body);
        auto from_file = parse_price_csv(in, config);
        CHECK(fetched.panel.dates == from_file.dates);
        CHECK(fetched.panel.tickers == from_file.tickers);
        CHECK(fetched.panel.closes == from_file.closes);
        CHECK(std::filesystem::exists(fetched.cache_path));
        CHECK(fetched.cache_path.find(cache_dir.string()) == 0);
    }

    SUBCASE("404 maps to HttpStatus") {
        try {
            fetch_remote(base + "/absent.csv", config);
            FAIL("expected HttpStatus");
        } catch (const HttpStatus& e) {
            CHECK(e.status() == 404);
        }
    }

    SUBCASE("body without a configured ticker maps to MissingColumn") {
        CHECK_THROWS_AS(fetch_remote(base + "/missing.csv", config), MissingColumn);
    }

    server.stop();
    server_thread.join();

    SUBCASE("connection failure maps to NetworkUnavailable") {
        CHECK_THROWS_AS(fetch_remote("http://127.0.0.1:1/none.csv", config),
                        NetworkUnavailable);
        CHECK_THROWS_AS(fetch_remote("https://127.0.0.1/none.csv", config),
                        NetworkUnavailable);
    }
}
