#pragma once

#include <string>

#include <Eigen/Dense>

#include "curvecast/series.hpp"

namespace curvecast {

/// Per-grid-point forecast accuracy over a holdout block of q curves, plus
/// the averages over grid points.
struct AccuracyReport {
    std::string method;
    int q = 0;
    Eigen::VectorXd mafe;                 // length p
    Eigen::VectorXd msfe;                 // length p
    Eigen::VectorXd mean_interval_score;  // length p, empty when no intervals
    double avg_mafe = 0.0;
    double avg_msfe = 0.0;
    double avg_interval_score = 0.0;
};

/// Norm-based residual autocorrelation diagnostic with its critical value.
struct FunctionalAcf {
    Eigen::VectorXd rho;  // lags 1..L
    double critical_value = 0.0;
};

/// Pointwise mean absolute and squared errors over the holdout curves.
AccuracyReport mafe_msfe(const Eigen::MatrixXd& actuals, const Eigen::MatrixXd& forecasts,
                         const std::string& method = "");

/// Interval score at one point: width plus (2/alpha)-weighted breach
/// penalties; equals the width exactly when the actual falls inside.
double interval_score(double lower, double upper, double actual, double alpha);

/// Mean interval score per grid point over the holdout curves.
Eigen::VectorXd mean_interval_score(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper,
                                    const Eigen::MatrixXd& actuals, double alpha);

/// rho_i = ||gamma_i|| / int gamma_0(t,t) dt for lags 1..L, where gamma_i is
/// the empirical lag-i autocovariance kernel (divisor n) and the norm is the
/// quadrature L2 norm over (s,t). Critical value 1.96/sqrt(n).
FunctionalAcf functional_acf(const FunctionalTimeSeries& residuals, int max_lag);

}  // namespace curvecast
