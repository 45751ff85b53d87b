#include "flab/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <ostream>

#include "text_util.hpp"

namespace flab {

StandardizedPanel standardize(const ReturnPanel& returns) {
    if (returns.num_periods() < 2) {
        throw InsufficientData("standardize needs at least 2 return rows");
    }
    StandardizedPanel out;
    out.tickers = returns.tickers;
    out.column_means = returns.simple_returns.colwise().mean();

    Eigen::MatrixXd centered = returns.simple_returns.rowwise() - out.column_means.transpose();
    const double denom = static_cast<double>(returns.num_periods() - 1);
    out.column_stdevs = (centered.colwise().squaredNorm() / denom).cwiseSqrt();

    for (Eigen::Index i = 0; i < out.column_stdevs.size(); ++i) {
        if (out.column_stdevs(i) == 0.0) {
            throw DegenerateColumn(returns.tickers[static_cast<std::size_t>(i)]);
        }
    }
    out.z_scores = centered.array().rowwise() / out.column_stdevs.transpose().array();
    return out;
}

EigenModel eigen_decompose(const StandardizedPanel& std_panel) {
    const auto T = std_panel.z_scores.rows();
    const auto n = std_panel.z_scores.cols();
    if (n < 2) throw std::invalid_argument("eigen_decompose needs at least 2 assets");
    if (T < n) {
        std::cerr << "frontierlab: warning: only " << T << " observations for " << n
                  << " assets; the correlation matrix is rank-deficient\n";
    }

    // Covariance of standardized data == correlation of the raw returns.
    Eigen::MatrixXd corr =
        std_panel.z_scores.transpose() * std_panel.z_scores / static_cast<double>(T - 1);
    corr.diagonal().setOnes();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("symmetric eigen solver did not converge");
    }

    EigenModel model;
    model.tickers = std_panel.tickers;
    model.eigenvalues.resize(n);
    model.eigenvectors.resize(n, n);
    model.explained_variance_ratio.resize(n);
    model.cumulative_explained.resize(n);

    // Solver returns ascending order; re-rank descending and fix signs so
    // each eigenvector's entry sum is positive (largest-magnitude entry
    // breaks an exact-zero sum).
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index src = n - 1 - k;
        double lambda = solver.eigenvalues()(src);
        model.eigenvalues(k) = lambda < 0.0 ? 0.0 : lambda;

        Eigen::VectorXd v = solver.eigenvectors().col(src);
        double sum = v.sum();
        if (sum < 0.0) {
            v = -v;
        } else if (sum == 0.0) {
            Eigen::Index arg = 0;
            v.cwiseAbs().maxCoeff(&arg);
            if (v(arg) < 0.0) v = -v;
        }
        model.eigenvectors.col(k) = v;
    }

    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        model.explained_variance_ratio(k) = model.eigenvalues(k) / static_cast<double>(n);
        cumulative += model.explained_variance_ratio(k);
        model.cumulative_explained(k) = cumulative;
    }
    return model;
}

int select_components(const EigenModel& model, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("threshold must be in (0, 1]");
    }
    const auto n = model.cumulative_explained.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        if (model.cumulative_explained(k) >= threshold) return static_cast<int>(k) + 1;
    }
    return static_cast<int>(n);  // cumulative sum may round to just below 1
}

std::vector<EigenPortfolio> eigen_portfolios(const EigenModel& model, int count,
                                             const AnnualStats& stats, const CovCorr& cov,
                                             double risk_free_rate) {
    const auto n = model.eigenvectors.rows();
    if (count < 1 || count > n) {
        throw std::invalid_argument("component count must be in [1, n]");
    }

    std::vector<EigenPortfolio> portfolios;
    portfolios.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd v = model.eigenvectors.col(k);
        double sum = v.sum();
        if (std::abs(sum) < 1e-10) throw DegenerateComponent(k);

        EigenPortfolio p;
        p.component_index = k;
        p.weights.tickers = model.tickers;
        p.weights.weights = v / sum;
        p.in_sample_return = portfolio_return(p.weights, stats);
        p.in_sample_volatility = std::sqrt(portfolio_variance(p.weights, cov)) *
                                 std::sqrt(static_cast<double>(stats.trading_days));
        p.sharpe = sharpe_ratio(p.in_sample_return, p.in_sample_volatility, risk_free_rate);
        portfolios.push_back(std::move(p));
    }
    return portfolios;
}

EigenPortfolio best_eigen_portfolio(const std::vector<EigenPortfolio>& portfolios) {
    if (portfolios.empty()) throw EmptyList("best_eigen_portfolio: no candidates");
    std::size_t best = 0;
    // Selection Sharpe is plain return / volatility (risk-free rate 0).
    double best_score = sharpe_ratio(portfolios[0].in_sample_return,
                                     portfolios[0].in_sample_volatility, 0.0);
    for (std::size_t i = 1; i < portfolios.size(); ++i) {
        double score = sharpe_ratio(portfolios[i].in_sample_return,
                                    portfolios[i].in_sample_volatility, 0.0);
        if (score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return portfolios[best];
}

void write_scree_csv(const EigenModel& model, std::ostream& out) {
    out << "component,explained_ratio,cumulative\n";
    for (Eigen::Index k = 0; k < model.eigenvalues.size(); ++k) {
        out << k << ',' << detail::format_double(model.explained_variance_ratio(k)) << ','
            << detail::format_double(model.cumulative_explained(k)) << '\n';
    }
}

void write_eigen_weights_csv(const std::vector<EigenPortfolio>& portfolios, std::ostream& out) {
    out << "component,ticker,weight\n";
    for (const auto& p : portfolios) {
        for (Eigen::Index i = 0; i < p.weights.weights.size(); ++i) {
            out << p.component_index << ',' << p.weights.tickers[static_cast<std::size_t>(i)]
                << ',' << detail::format_double(p.weights.weights(i)) << '\n';
        }
    }
}

}  // namespace flab
