#include "flab/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <httplib.h>

#include "text_util.hpp"

namespace flab {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Positive finite decimal, or NaN. Anything else (text, negatives, zero,
/// partial parses) counts as a missing cell per the ingestion contract.
double parse_close_cell(std::string_view cell) {
    cell = detail::trim(cell);
    if (cell.empty()) return kMissing;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return kMissing;
    if (!std::isfinite(value) || value <= 0.0) return kMissing;
    return value;
}

void strip_bom(std::string& s) {
    if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
        static_cast<unsigned char>(s[1]) == 0xBB && static_cast<unsigned char>(s[2]) == 0xBF) {
        s.erase(0, 3);
    }
}

struct RawRow {
    Date date;
    long line;
    std::vector<double> values;  // one per configured ticker
};

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

void validate_tickers(const std::vector<TickerId>& tickers) {
    std::unordered_set<std::string> seen;
    for (const auto& t : tickers) {
        if (t.empty()) throw std::invalid_argument("empty ticker symbol");
        if (t.find_first_of(" \t\r\n") != std::string::npos) {
            throw std::invalid_argument("ticker '" + t + "' contains whitespace");
        }
        if (!seen.insert(t).second) {
            throw std::invalid_argument("duplicate ticker '" + t + "'");
        }
    }
}

void UniverseConfig::validate() const {
    if (tickers.size() < 2) {
        throw std::invalid_argument("universe needs at least 2 tickers");
    }
    validate_tickers(tickers);
    if (!(train_start < train_end && train_end <= test_start && test_start < test_end)) {
        throw std::invalid_argument(
            "window must satisfy train_start < train_end <= test_start < test_end");
    }
}

UniverseConfig UniverseConfig::from_json(const nlohmann::json& j) {
    UniverseConfig c;
    c.sector_name = j.at("sector_name").get<std::string>();
    for (const auto& t : j.at("tickers")) c.tickers.push_back(t.get<std::string>());
    c.train_start = Date::parse(j.at("train_start").get<std::string>());
    c.train_end = Date::parse(j.at("train_end").get<std::string>());
    c.test_start = Date::parse(j.at("test_start").get<std::string>());
    c.test_end = Date::parse(j.at("test_end").get<std::string>());
    c.validate();
    return c;
}

UniverseConfig UniverseConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

nlohmann::json UniverseConfig::to_json() const {
    return {{"sector_name", sector_name},
            {"tickers", tickers},
            {"train_start", train_start.to_string()},
            {"train_end", train_end.to_string()},
            {"test_start", test_start.to_string()},
            {"test_end", test_end.to_string()}};
}

std::size_t PricePanel::missing_count() const {
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < closes.rows(); ++i)
        for (Eigen::Index j = 0; j < closes.cols(); ++j)
            if (std::isnan(closes(i, j))) ++n;
    return n;
}

PricePanel PricePanel::slice(const Date& from, const Date& to) const {
    auto lo = std::lower_bound(dates.begin(), dates.end(), from);
    auto hi = std::upper_bound(dates.begin(), dates.end(), to);
    auto first = static_cast<Eigen::Index>(lo - dates.begin());
    auto count = static_cast<Eigen::Index>(hi - lo);

    PricePanel out;
    out.tickers = tickers;
    out.dates.assign(lo, hi);
    out.closes = closes.middleRows(first, count);
    return out;
}

PricePanel parse_price_csv(std::istream& in, const std::vector<TickerId>& tickers,
                           const Date& window_start, const Date& window_end) {
    validate_tickers(tickers);

    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw MalformedRow(1, "empty input, no header row");
    }
    strip_bom(header_line);
    auto header = detail::split(header_line, ',');
    if (header.empty() || detail::trim(header[0]) != "date") {
        throw MalformedRow(1, "first header column must be 'date'");
    }

    // Column index per configured ticker; header order is irrelevant, the
    // panel keeps the config's ticker order.
    std::vector<std::size_t> col_of_ticker;
    for (const auto& ticker : tickers) {
        std::size_t found = 0;
        bool ok = false;
        for (std::size_t c = 1; c < header.size(); ++c) {
            if (detail::trim(header[c]) == ticker) {
                found = c;
                ok = true;
                break;
            }
        }
        if (!ok) throw MissingColumn(ticker);
        col_of_ticker.push_back(found);
    }

    std::vector<RawRow> rows;
    std::string line;
    long line_num = 1;
    while (std::getline(in, line)) {
        ++line_num;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split(line, ',');
        if (cells.size() != header.size()) {
            throw MalformedRow(line_num, "expected " + std::to_string(header.size()) +
                                             " cells, got " + std::to_string(cells.size()));
        }
        Date date;
        try {
            date = Date::parse(detail::trim(cells[0]));
        } catch (const std::invalid_argument& e) {
            throw MalformedRow(line_num, e.what());
        }
        if (date < window_start || window_end < date) continue;

        RawRow row;
        row.date = date;
        row.line = line_num;
        row.values.reserve(col_of_ticker.size());
        for (std::size_t c : col_of_ticker) row.values.push_back(parse_close_cell(cells[c]));
        rows.push_back(std::move(row));
    }

    if (rows.empty()) {
        throw EmptyWindow("no rows between " + window_start.to_string() + " and " +
                          window_end.to_string());
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw MalformedRow(rows[i].line, "duplicate date " + rows[i].date.to_string());
        }
    }

    PricePanel panel;
    panel.tickers = tickers;
    panel.dates.reserve(rows.size());
    panel.closes.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(tickers.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        panel.dates.push_back(rows[r].date);
        for (std::size_t c = 0; c < rows[r].values.size(); ++c) {
            panel.closes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r].values[c];
        }
    }
    return panel;
}

PricePanel parse_price_csv(std::istream& in, const UniverseConfig& config) {
    config.validate();
    return parse_price_csv(in, config.tickers, config.train_start, config.test_end);
}

PricePanel load_csv(const std::string& path, const UniverseConfig& config) {
    config.validate();
    return load_csv(path, config.tickers, config.train_start, config.test_end);
}

PricePanel load_csv(const std::string& path, const std::vector<TickerId>& tickers,
                    const Date& window_start, const Date& window_end) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open price CSV: " + path);
    return parse_price_csv(in, tickers, window_start, window_end);
}

FetchResult fetch_remote(const std::string& url, const UniverseConfig& config) {
    config.validate();
    return fetch_remote(url, config.tickers, config.train_start, config.test_end);
}

FetchResult fetch_remote(const std::string& url, const std::vector<TickerId>& tickers,
                         const Date& window_start, const Date& window_end) {
    // Minimal URL split: http://host[:port][/path?query]
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme.data(), 0) != 0) {
        throw NetworkUnavailable("only http:// endpoints are supported, got: " + url);
    }
    auto rest = url.substr(scheme.size());
    auto slash = rest.find('/');
    std::string hostport = rest.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);
    std::string host = hostport;
    int port = 80;
    if (auto colon = hostport.find(':'); colon != std::string::npos) {
        host = hostport.substr(0, colon);
        port = std::atoi(hostport.c_str() + colon + 1);
    }

    httplib::Client client(host, port);
    client.set_follow_location(true);
    auto res = client.Get(path);
    if (!res) {
        throw NetworkUnavailable("GET " + url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status / 100 != 2) {
        throw HttpStatus(res->status);
    }

    namespace fs = std::filesystem;
    fs::path cache_dir;
    if (const char* env = std::getenv("FRONTIER_LAB_CACHE"); env && *env) {
        cache_dir = env;
    } else {
        cache_dir = fs::temp_directory_path() / "frontierlab-cache";
    }
    fs::create_directories(cache_dir);
    char name[32];
    std::snprintf(name, sizeof(name), "%016llx.csv",
                  static_cast<unsigned long long>(fnv1a64(url)));
    fs::path cache_path = cache_dir / name;
    {
        std::ofstream out(cache_path, std::ios::binary);
        if (!out) throw Error("cannot write fetch cache file: " + cache_path.string());
        out << res->body;
    }

    std::istringstream body(res->body);
    return FetchResult{parse_price_csv(body, tickers, window_start, window_end),
                       cache_path.string()};
}

CleanResult clean_panel(const PricePanel& raw) {
    if (raw.rows() < 2) {
        throw std::invalid_argument("clean_panel needs a panel with at least 2 rows");
    }
    const auto rows = raw.rows();
    const auto cols = raw.cols();

    CleanResult result;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < cols; ++c) {
        Eigen::Index missing = 0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (std::isnan(raw.closes(r, c))) ++missing;
        }
        double fraction = static_cast<double>(missing) / static_cast<double>(rows);
        if (fraction > 0.25) {
            result.dropped.push_back({raw.tickers[static_cast<std::size_t>(c)], fraction});
        } else {
            keep.push_back(c);
        }
    }
    if (keep.size() < 2) {
        throw UniverseTooSmall("only " + std::to_string(keep.size()) +
                               " columns survive the 25% missing-data cut");
    }

    PricePanel& panel = result.panel;
    panel.dates = raw.dates;
    panel.closes.resize(rows, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        panel.tickers.push_back(raw.tickers[static_cast<std::size_t>(keep[k])]);
        panel.closes.col(static_cast<Eigen::Index>(k)) = raw.closes.col(keep[k]);
    }

    for (Eigen::Index c = 0; c < panel.cols(); ++c) {
        double sum = 0.0;
        Eigen::Index present = 0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            double v = panel.closes(r, c);
            if (!std::isnan(v)) {
                sum += v;
                ++present;
            }
        }
        if (present == rows) continue;  // nothing to impute
        double mean = sum / static_cast<double>(present);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (std::isnan(panel.closes(r, c))) panel.closes(r, c) = mean;
        }
    }
    return result;
}

void write_csv(const PricePanel& panel, std::ostream& out) {
    out << "date";
    for (const auto& t : panel.tickers) out << ',' << t;
    out << '\n';
    for (Eigen::Index r = 0; r < panel.rows(); ++r) {
        out << panel.dates[static_cast<std::size_t>(r)].to_string();
        for (Eigen::Index c = 0; c < panel.cols(); ++c) {
            out << ',';
            double v = panel.closes(r, c);
            if (!std::isnan(v)) out << detail::format_double(v);
        }
        out << '\n';
    }
}

void write_csv(const PricePanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    write_csv(panel, out);
}

}  // namespace flab
