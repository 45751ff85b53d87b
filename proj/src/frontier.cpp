#include "flab/frontier.hpp"

#include <cmath>
#include <ostream>

#include "flab/rng.hpp"
#include "text_util.hpp"

namespace flab {

namespace {

void check_dimensions(const WeightVector& weights, Eigen::Index expected, const char* op) {
    if (weights.weights.size() != expected) {
        throw DimensionMismatch(std::string(op) + ": weight vector has " +
                                std::to_string(weights.weights.size()) + " entries, expected " +
                                std::to_string(expected));
    }
}

FrontierPoint evaluate_point(WeightVector weights, const AnnualStats& stats, const CovCorr& cov,
                             double risk_free_rate) {
    FrontierPoint p;
    p.annual_return = portfolio_return(weights, stats);
    double daily_variance = portfolio_variance(weights, cov);
    p.annual_volatility =
        std::sqrt(daily_variance) * std::sqrt(static_cast<double>(stats.trading_days));
    p.sharpe = sharpe_ratio(p.annual_return, p.annual_volatility, risk_free_rate);
    p.weights = std::move(weights);
    return p;
}

}  // namespace

double portfolio_return(const WeightVector& weights, const AnnualStats& stats) {
    check_dimensions(weights, stats.annual_return.size(), "portfolio_return");
    return weights.weights.dot(stats.annual_return);
}

double portfolio_variance(const WeightVector& weights, const CovCorr& cov) {
    check_dimensions(weights, cov.covariance.rows(), "portfolio_variance");
    return weights.weights.dot(cov.covariance * weights.weights);
}

double sharpe_ratio(double annual_return, double annual_volatility, double risk_free_rate) {
    if (!(annual_volatility > 0.0)) {
        throw ZeroVolatility("sharpe ratio undefined at zero volatility");
    }
    return (annual_return - risk_free_rate) / annual_volatility;
}

FrontierSample sample_frontier(const AnnualStats& stats, const CovCorr& cov,
                               std::size_t sample_count, std::uint64_t seed,
                               double risk_free_rate) {
    const auto n = stats.annual_return.size();
    if (n < 2) throw std::invalid_argument("sample_frontier needs at least 2 assets");
    if (sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");

    FrontierSample sample;
    sample.seed = seed;
    sample.risk_free_rate = risk_free_rate;
    sample.points.reserve(sample_count);

    for (std::size_t k = 0; k < sample_count; ++k) {
        SplitMix64 gen(SplitMix64::substream_seed(seed, k));
        WeightVector wv;
        wv.tickers = stats.tickers;
        wv.weights.resize(n);
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double u = gen.next_open_unit();
            wv.weights(i) = u;
            total += u;
        }
        wv.weights /= total;
        sample.points.push_back(evaluate_point(std::move(wv), stats, cov, risk_free_rate));
    }
    return sample;
}

FrontierPoint min_risk_portfolio(const FrontierSample& sample) {
    if (sample.points.empty()) throw EmptySample("min_risk_portfolio: empty frontier sample");
    std::size_t best = 0;
    for (std::size_t i = 1; i < sample.points.size(); ++i) {
        const auto& p = sample.points[i];
        const auto& b = sample.points[best];
        if (p.annual_volatility < b.annual_volatility ||
            (p.annual_volatility == b.annual_volatility && p.annual_return > b.annual_return)) {
            best = i;
        }
    }
    return sample.points[best];
}

FrontierPoint opt_risk_portfolio(const FrontierSample& sample) {
    if (sample.points.empty()) throw EmptySample("opt_risk_portfolio: empty frontier sample");
    std::size_t best = 0;
    for (std::size_t i = 1; i < sample.points.size(); ++i) {
        const auto& p = sample.points[i];
        const auto& b = sample.points[best];
        if (p.sharpe > b.sharpe ||
            (p.sharpe == b.sharpe && p.annual_volatility < b.annual_volatility)) {
            best = i;
        }
    }
    return sample.points[best];
}

FrontierPoint equal_weight_portfolio(const AnnualStats& stats, const CovCorr& cov,
                                     double risk_free_rate) {
    const auto n = stats.annual_return.size();
    if (n < 1) throw std::invalid_argument("equal_weight_portfolio needs at least 1 asset");
    WeightVector wv;
    wv.tickers = stats.tickers;
    wv.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    return evaluate_point(std::move(wv), stats, cov, risk_free_rate);
}

void write_frontier_csv(const FrontierSample& sample, std::ostream& out) {
    out << "index,volatility,return,sharpe\n";
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
        const auto& p = sample.points[i];
        out << i << ',' << detail::format_double(p.annual_volatility) << ','
            << detail::format_double(p.annual_return) << ',' << detail::format_double(p.sharpe)
            << '\n';
    }
}

nlohmann::json frontier_point_json(const FrontierPoint& point) {
    nlohmann::json weights = nlohmann::json::object();
    for (Eigen::Index i = 0; i < point.weights.weights.size(); ++i) {
        weights[point.weights.tickers[static_cast<std::size_t>(i)]] = point.weights.weights(i);
    }
    return {{"annual_return", point.annual_return},
            {"annual_volatility", point.annual_volatility},
            {"sharpe", point.sharpe},
            {"tickers", point.weights.tickers},
            {"weights", weights}};
}

FrontierPoint frontier_point_from_json(const nlohmann::json& j) {
    FrontierPoint p;
    p.annual_return = j.at("annual_return").get<double>();
    p.annual_volatility = j.at("annual_volatility").get<double>();
    p.sharpe = j.at("sharpe").get<double>();
    p.weights.tickers = j.at("tickers").get<std::vector<TickerId>>();
    p.weights.weights.resize(static_cast<Eigen::Index>(p.weights.tickers.size()));
    const auto& weights = j.at("weights");
    for (std::size_t i = 0; i < p.weights.tickers.size(); ++i) {
        p.weights.weights(static_cast<Eigen::Index>(i)) =
            weights.at(p.weights.tickers[i]).get<double>();
    }
    return p;
}

}  // namespace flab
