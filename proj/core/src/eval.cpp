#include "curvecast/eval.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace curvecast {

AccuracyReport mafe_msfe(const Eigen::MatrixXd& actuals, const Eigen::MatrixXd& forecasts,
                         const std::string& method) {
    if (actuals.rows() != forecasts.rows() || actuals.cols() != forecasts.cols()) {
        throw std::invalid_argument("mafe_msfe: actuals are " + std::to_string(actuals.rows()) +
                                    "x" + std::to_string(actuals.cols()) + ", forecasts " +
                                    std::to_string(forecasts.rows()) + "x" +
                                    std::to_string(forecasts.cols()));
    }
    if (actuals.rows() < 1) throw std::invalid_argument("mafe_msfe: empty holdout");

    AccuracyReport report;
    report.method = method;
    report.q = static_cast<int>(actuals.rows());
    const Eigen::MatrixXd err = actuals - forecasts;
    report.mafe = err.cwiseAbs().colwise().mean();
    report.msfe = err.array().square().matrix().colwise().mean();
    report.avg_mafe = report.mafe.mean();
    report.avg_msfe = report.msfe.mean();
    return report;
}

double interval_score(double lower, double upper, double actual, double alpha) {
    if (lower > upper) {
        throw std::invalid_argument("interval_score: lower bound exceeds upper bound");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("interval_score: alpha must lie in (0,1)");
    }
    double score = upper - lower;
    if (actual < lower) score += 2.0 / alpha * (lower - actual);
    if (actual > upper) score += 2.0 / alpha * (actual - upper);
    return score;
}

Eigen::VectorXd mean_interval_score(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper,
                                    const Eigen::MatrixXd& actuals, double alpha) {
    if (lower.rows() != actuals.rows() || lower.cols() != actuals.cols() ||
        upper.rows() != actuals.rows() || upper.cols() != actuals.cols()) {
        throw std::invalid_argument("mean_interval_score: shape mismatch");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(actuals.cols());
    for (Eigen::Index j = 0; j < actuals.cols(); ++j) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < actuals.rows(); ++k) {
            acc += interval_score(lower(k, j), upper(k, j), actuals(k, j), alpha);
        }
        out[j] = acc / static_cast<double>(actuals.rows());
    }
    return out;
}

FunctionalAcf functional_acf(const FunctionalTimeSeries& residuals, int max_lag) {
    residuals.validate();
    const int n = residuals.n();
    if (max_lag < 1) throw std::invalid_argument("functional_acf: max_lag must be >= 1");
    if (max_lag >= n) {
        throw std::invalid_argument("functional_acf: max_lag " + std::to_string(max_lag) +
                                    " must be below n=" + std::to_string(n));
    }

    const Eigen::RowVectorXd mean = residuals.curves.colwise().mean();
    const Eigen::MatrixXd centered = residuals.curves.rowwise() - mean;
    const double dt = residuals.grid.dt;

    const Eigen::MatrixXd gamma0 =
        centered.transpose() * centered / static_cast<double>(n);
    const double denom = dt * gamma0.trace();
    if (!(denom > 0.0)) {
        throw std::invalid_argument("functional_acf: residuals have zero variance");
    }

    FunctionalAcf acf;
    acf.rho.resize(max_lag);
    for (int lag = 1; lag <= max_lag; ++lag) {
        const Eigen::MatrixXd gamma =
            centered.topRows(n - lag).transpose() * centered.bottomRows(n - lag) /
            static_cast<double>(n);
        acf.rho[lag - 1] = dt * gamma.norm() / denom;
    }
    acf.critical_value = 1.96 / std::sqrt(static_cast<double>(n));
    return acf;
}

}  // namespace curvecast
