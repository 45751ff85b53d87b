#include "flab/stats.hpp"

#include <cmath>
#include <ostream>

#include "text_util.hpp"

namespace flab {

namespace {

/// Column means and the centered matrix, shared by annualize and cov_corr so
/// both use the identical arithmetic.
struct Centered {
    Eigen::VectorXd means;
    Eigen::MatrixXd values;  // returns minus column means
};

Centered center_columns(const Eigen::MatrixXd& m) {
    Centered c;
    c.means = m.colwise().mean();
    c.values = m.rowwise() - c.means.transpose();
    return c;
}

Eigen::VectorXd sample_stdevs(const Centered& c) {
    const double denom = static_cast<double>(c.values.rows() - 1);
    return (c.values.colwise().squaredNorm() / denom).cwiseSqrt();
}

}  // namespace

ReturnPanel compute_returns(const PricePanel& panel) {
    if (panel.rows() < 2) {
        throw InsufficientData("need at least 2 price rows, got " + std::to_string(panel.rows()));
    }
    if (panel.has_missing()) {
        throw std::invalid_argument("compute_returns requires a cleaned panel (no missing cells)");
    }

    const auto T = panel.rows() - 1;
    const auto n = panel.cols();

    ReturnPanel out;
    out.tickers = panel.tickers;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.simple_returns.resize(T, n);
    out.log_returns.resize(T, n);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double simple = panel.closes(t + 1, i) / panel.closes(t, i) - 1.0;
            out.simple_returns(t, i) = simple;
            out.log_returns(t, i) = std::log1p(simple);
        }
    }
    return out;
}

AnnualStats annualize(const ReturnPanel& returns, int trading_days) {
    if (returns.num_periods() < 2) {
        throw InsufficientData("annualize needs at least 2 return rows, got " +
                               std::to_string(returns.num_periods()));
    }
    if (trading_days < 1) {
        throw std::invalid_argument("trading_days must be positive");
    }
    auto centered = center_columns(returns.simple_returns);

    AnnualStats stats;
    stats.tickers = returns.tickers;
    stats.trading_days = trading_days;
    stats.annual_return = centered.means * static_cast<double>(trading_days);
    stats.annual_volatility = sample_stdevs(centered) * std::sqrt(static_cast<double>(trading_days));
    return stats;
}

CovCorr cov_corr(const ReturnPanel& returns) {
    if (returns.num_periods() < 2) {
        throw InsufficientData("cov_corr needs at least 2 return rows, got " +
                               std::to_string(returns.num_periods()));
    }
    auto centered = center_columns(returns.simple_returns);
    const double denom = static_cast<double>(returns.num_periods() - 1);

    CovCorr out;
    out.tickers = returns.tickers;
    out.covariance = centered.values.transpose() * centered.values / denom;

    Eigen::VectorXd stdev = sample_stdevs(centered);
    for (Eigen::Index i = 0; i < stdev.size(); ++i) {
        if (stdev(i) == 0.0) {
            throw DegenerateColumn(returns.tickers[static_cast<std::size_t>(i)]);
        }
    }

    const auto n = out.covariance.rows();
    out.correlation.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.correlation(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double r = out.covariance(i, j) / (stdev(i) * stdev(j));
            out.correlation(i, j) = r;
            out.correlation(j, i) = r;
        }
    }
    return out;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::vector<TickerId>& tickers,
                      std::ostream& out) {
    out << "ticker";
    for (const auto& t : tickers) out << ',' << t;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << tickers[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << ',' << detail::format_double(m(i, j));
        }
        out << '\n';
    }
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m, const std::vector<TickerId>& tickers) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return {{"tickers", tickers}, {"rows", rows}};
}

}  // namespace flab
