#pragma once

#include <cstdint>
#include <iosfwd>

#include "flab/stats.hpp"

#include <json.hpp>

namespace flab {

/// Named allocation across tickers. Frontier-sampled and equal-weight vectors
/// are non-negative; eigen-portfolio vectors may hold short (negative) legs.
/// Either way the entries sum to 1.
struct WeightVector {
    std::vector<TickerId> tickers;
    Eigen::VectorXd weights;

    double sum() const { return weights.sum(); }
};

struct FrontierPoint {
    WeightVector weights;
    double annual_return = 0.0;
    double annual_volatility = 0.0;
    double sharpe = 0.0;
};

/// One Monte Carlo sweep over the weight simplex.
struct FrontierSample {
    std::vector<FrontierPoint> points;  // generation order
    std::uint64_t seed = 0;
    double risk_free_rate = 0.0;
};

/// Weighted sum of per-ticker annual returns.
double portfolio_return(const WeightVector& weights, const AnnualStats& stats);

/// Daily portfolio variance w' Sigma w.
double portfolio_variance(const WeightVector& weights, const CovCorr& cov);

/// (annual_return - risk_free_rate) / annual_volatility.
/// Throws ZeroVolatility when annual_volatility <= 0.
double sharpe_ratio(double annual_return, double annual_volatility, double risk_free_rate);

/// Draw `sample_count` random portfolios: n uniforms in (0,1] normalized by
/// their sum. Sample k consumes SplitMix64 sub-stream k of `seed`, so the
/// result is reproducible and independent of evaluation order.
FrontierSample sample_frontier(const AnnualStats& stats, const CovCorr& cov,
                               std::size_t sample_count, std::uint64_t seed,
                               double risk_free_rate);

/// Leftmost point of the scatter: minimum volatility, ties broken by higher
/// return, then by earlier generation index.
FrontierPoint min_risk_portfolio(const FrontierSample& sample);

/// Maximum Sharpe ratio, ties broken by lower volatility, then earlier index.
FrontierPoint opt_risk_portfolio(const FrontierSample& sample);

/// The 1/n baseline evaluated with the same formulas as sampled points.
FrontierPoint equal_weight_portfolio(const AnnualStats& stats, const CovCorr& cov,
                                     double risk_free_rate);

/// Scatter export: `index,volatility,return,sharpe`, one row per point.
void write_frontier_csv(const FrontierSample& sample, std::ostream& out);

nlohmann::json frontier_point_json(const FrontierPoint& point);
FrontierPoint frontier_point_from_json(const nlohmann::json& j);

}  // namespace flab
