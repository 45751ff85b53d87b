#pragma once

#include <iosfwd>

#include "flab/frontier.hpp"
#include "flab/stats.hpp"

namespace flab {

/// Returns transformed column-wise to zero mean and unit sample stdev.
struct StandardizedPanel {
    std::vector<TickerId> tickers;
    Eigen::MatrixXd z_scores;     // [T x n]
    Eigen::VectorXd column_means;
    Eigen::VectorXd column_stdevs;
};

/// Eigen decomposition of the standardized-return correlation structure,
/// ranked by descending eigenvalue. Column k of `eigenvectors` pairs with
/// eigenvalue k; each column is unit-norm with its entry sum made positive.
struct EigenModel {
    std::vector<TickerId> tickers;
    Eigen::VectorXd eigenvalues;               // descending, >= 0
    Eigen::MatrixXd eigenvectors;              // [n x n]
    Eigen::VectorXd explained_variance_ratio;  // eigenvalue / n
    Eigen::VectorXd cumulative_explained;      // prefix sums
};

/// A portfolio whose weights are one principal component's loadings
/// normalized to sum to 1 (entries may be negative).
struct EigenPortfolio {
    int component_index = 0;
    WeightVector weights;
    double in_sample_return = 0.0;
    double in_sample_volatility = 0.0;
    double sharpe = 0.0;
};

/// z[t][i] = (r[t][i] - mean_i) / stdev_i with sample (T-1) stdev.
/// Throws DegenerateColumn for zero-variance columns.
StandardizedPanel standardize(const ReturnPanel& returns);

/// Symmetric eigen decomposition of the sample correlation matrix of the
/// standardized data. Warns on stderr when T < n.
EigenModel eigen_decompose(const StandardizedPanel& std_panel);

/// Smallest k whose cumulative explained variance reaches `threshold`.
int select_components(const EigenModel& model, double threshold);

/// Portfolios for components 0..count-1: weights are the eigenvector divided
/// by its entry sum; return/volatility/Sharpe evaluated like frontier points.
std::vector<EigenPortfolio> eigen_portfolios(const EigenModel& model, int count,
                                             const AnnualStats& stats, const CovCorr& cov,
                                             double risk_free_rate);

/// Argmax of annualized return / volatility (risk-free rate 0 by convention
/// for eigen selection); ties go to the lowest component index.
EigenPortfolio best_eigen_portfolio(const std::vector<EigenPortfolio>& portfolios);

/// Scree export: `component,explained_ratio,cumulative`.
void write_scree_csv(const EigenModel& model, std::ostream& out);

/// Weights export: `component,ticker,weight` for the given portfolios.
void write_eigen_weights_csv(const std::vector<EigenPortfolio>& portfolios, std::ostream& out);

}  // namespace flab
