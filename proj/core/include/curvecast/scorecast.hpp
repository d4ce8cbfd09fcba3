#pragma once

#include <string>

#include <Eigen/Dense>

#include "curvecast/fpca.hpp"

namespace curvecast {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;
};

/// ARIMA(p,d,q) with intercept, fitted by conditional sum of squares on the
/// (possibly differenced) series:
///   y_t = alpha + phi_1 y_{t-1} + ... + phi_p y_{t-p}
///               + e_t + theta_1 e_{t-1} + ... + theta_q e_{t-q},
/// with pre-sample residuals set to zero. Residuals exist for
/// t = p+1 .. len(series)-d, i.e. len(series) - d - p of them.
struct ArimaModel {
    ArimaOrder order;
    double intercept = 0.0;
    Eigen::VectorXd ar;
    Eigen::VectorXd ma;
    double sigma2 = 0.0;
    double aicc = 0.0;
    Eigen::VectorXd series;  // original, undifferenced training series
};

struct ArimaForecast {
    Eigen::VectorXd point;     // length h
    Eigen::VectorXd variance;  // forecast-error variance per step
};

/// Order search over d in {0,1} (variance-of-differences heuristic) and
/// p,q in 0..5 with p+q <= 5; candidates estimated by CSS (exact OLS for
/// pure AR, Hannan-Rissanen start plus Nelder-Mead refinement otherwise);
/// the winner minimizes AICc, ties broken by fewer parameters then lower p.
ArimaModel fit_auto_arima(const Eigen::VectorXd& series);

/// CSS fit at a fixed order.
ArimaModel fit_arima(const Eigen::VectorXd& series, const ArimaOrder& order);

/// Linear-recursion point forecasts with psi-weight error variances;
/// d=1 models forecast differences and integrate from the last level.
ArimaForecast forecast_arima(const ArimaModel& model, int h);

/// In-sample CSS residuals (length len(series) - d - p).
Eigen::VectorXd arima_residuals(const ArimaModel& model);

/// VAR(order) over score rows, estimated by OLS on the stacked regression
/// with design rows (1, beta_{i-1}, ..., beta_{i-order}).
struct VarModel {
    int order = 1;
    Eigen::MatrixXd coef;       // (1 + K*order) x K
    Eigen::MatrixXd resid_cov;  // K x K, divisor n - order
    double aic = 0.0;
    Eigen::MatrixXd scores;  // training rows
};

/// Fits VAR(theta) for theta = 1..max_order (capped to what the sample
/// supports) and keeps the AIC minimizer,
/// AIC = log det(Sigma_res) + 2(K + K^2 theta)/(n - theta).
VarModel fit_var(const Eigen::MatrixXd& scores, int max_order = 5);

/// OLS fit at a fixed order.
VarModel fit_var_fixed(const Eigen::MatrixXd& scores, int order);

/// Recursive h-step forecasts; step one uses observed lags, later steps
/// substitute forecasts.
Eigen::MatrixXd forecast_var(const VarModel& model, int h);

enum class Forecaster { arima, var };

struct ForecasterConfig {
    Forecaster kind = Forecaster::var;
    int var_max_order = 5;
};

/// h x K score forecasts: independent ARIMA per column or a joint VAR.
Eigen::MatrixXd forecast_scores(const Eigen::MatrixXd& scores, const ForecasterConfig& config,
                                int h);

/// mean + sum_k score_k * phi_k on the full support.
Eigen::VectorXd ts_forecast_curve(const FpcaModel& model, const Eigen::VectorXd& score_forecast);

/// Same curve restricted to the remaining support (m0, p].
Eigen::VectorXd ts_forecast_curve_tail(const FpcaModel& model,
                                       const Eigen::VectorXd& score_forecast, int m0);

/// Shared checked least squares: solves min ||Y - X B|| columnwise, raising
/// `context` on exactly rank-deficient designs instead of pseudo-inverting.
Eigen::MatrixXd ols_solve(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          const std::string& context);

std::string arima_to_json(const ArimaModel& model);
std::string var_to_json(const VarModel& model);

}  // namespace curvecast
