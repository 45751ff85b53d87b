#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "flab/date.hpp"
#include "flab/errors.hpp"

#include <json.hpp>

namespace flab {

using TickerId = std::string;

/// A sector universe: which tickers to load and the training/holdout windows.
struct UniverseConfig {
    std::string sector_name;
    std::vector<TickerId> tickers;
    Date train_start;
    Date train_end;
    Date test_start;
    Date test_end;

    /// Enforce the structural invariants: >= 2 distinct whitespace-free
    /// tickers, train_start < train_end <= test_start < test_end.
    /// Throws std::invalid_argument.
    void validate() const;

    static UniverseConfig from_json(const nlohmann::json& j);
    static UniverseConfig from_json_file(const std::string& path);
    nlohmann::json to_json() const;
};

/// Date-aligned close-price matrix. Missing cells are stored as NaN;
/// a cleaned panel has none.
struct PricePanel {
    std::vector<Date> dates;        // strictly increasing
    std::vector<TickerId> tickers;  // column order
    Eigen::MatrixXd closes;         // [dates.size() x tickers.size()]

    Eigen::Index rows() const { return closes.rows(); }
    Eigen::Index cols() const { return closes.cols(); }
    std::size_t missing_count() const;
    bool has_missing() const { return missing_count() > 0; }

    /// Rows with `from <= date <= to` (both inclusive).
    PricePanel slice(const Date& from, const Date& to) const;
};

/// Reject empty/whitespace/duplicate ticker symbols.
void validate_tickers(const std::vector<TickerId>& tickers);

/// Load a close-price CSV (header `date,<ticker>,...`) restricted to
/// [train_start, test_end]. Cells that do not parse as positive decimals are
/// recorded as missing. Rows are sorted by date; duplicate dates are rejected.
PricePanel load_csv(const std::string& path, const UniverseConfig& config);

/// Same contract with an explicit window instead of a universe config.
PricePanel load_csv(const std::string& path, const std::vector<TickerId>& tickers,
                    const Date& window_start, const Date& window_end);

/// Same contract as load_csv, applied to an already-opened stream.
PricePanel parse_price_csv(std::istream& in, const UniverseConfig& config);
PricePanel parse_price_csv(std::istream& in, const std::vector<TickerId>& tickers,
                           const Date& window_start, const Date& window_end);

struct FetchResult {
    PricePanel panel;
    std::string cache_path;  // local copy of the response body
};

/// HTTP GET a CSV body and ingest it with the load_csv contract. The body is
/// cached under $FRONTIER_LAB_CACHE (or the system temp directory).
FetchResult fetch_remote(const std::string& url, const UniverseConfig& config);
FetchResult fetch_remote(const std::string& url, const std::vector<TickerId>& tickers,
                         const Date& window_start, const Date& window_end);

struct ColumnDrop {
    TickerId ticker;
    double missing_fraction;
};

struct CleanResult {
    PricePanel panel;
    std::vector<ColumnDrop> dropped;
};

/// Drop columns with strictly more than 25% missing cells, then impute the
/// remaining gaps with the column mean of the non-missing cells. The result
/// has zero missing cells. Idempotent; never alters a non-missing cell.
CleanResult clean_panel(const PricePanel& raw);

/// Serialize a panel back to the input CSV schema. Non-missing cells are
/// written with shortest round-trip precision, missing cells as empty.
void write_csv(const PricePanel& panel, std::ostream& out);
void write_csv(const PricePanel& panel, const std::string& path);

}  // namespace flab
