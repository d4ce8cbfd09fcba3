#include "curvecast/scorecast.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace curvecast {

namespace {

struct StackedRegression {
    Eigen::MatrixXd X;  // (n - order) x (1 + K*order)
    Eigen::MatrixXd Y;  // (n - order) x K
};

StackedRegression stack(const Eigen::MatrixXd& scores, int order) {
    const int n = static_cast<int>(scores.rows());
    const int K = static_cast<int>(scores.cols());
    StackedRegression reg;
    reg.X.resize(n - order, 1 + K * order);
    reg.Y.resize(n - order, K);
    for (int i = order; i < n; ++i) {
        const int r = i - order;
        reg.X(r, 0) = 1.0;
        for (int lag = 1; lag <= order; ++lag) {
            reg.X.block(r, 1 + K * (lag - 1), 1, K) = scores.row(i - lag);
        }
        reg.Y.row(r) = scores.row(i);
    }
    return reg;
}

double log_det_psd(const Eigen::MatrixXd& m) {
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        return -std::numeric_limits<double>::infinity();
    }
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double d = llt.matrixL()(i, i);
        if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
        log_det += 2.0 * std::log(d);
    }
    return log_det;
}

VarModel fit_var_at(const Eigen::MatrixXd& scores, int order) {
    const int n = static_cast<int>(scores.rows());
    const int K = static_cast<int>(scores.cols());
    const StackedRegression reg = stack(scores, order);

    VarModel model;
    model.order = order;
    model.coef = ols_solve(reg.X, reg.Y, "fit_var: collinear design");
    const Eigen::MatrixXd resid = reg.Y - reg.X * model.coef;
    model.resid_cov = resid.transpose() * resid / static_cast<double>(n - order);
    const double penalty =
        2.0 * (K + static_cast<double>(K) * K * order) / static_cast<double>(n - order);
    model.aic = log_det_psd(model.resid_cov) + penalty;
    model.scores = scores;
    return model;
}

void check_var_input(const Eigen::MatrixXd& scores, int order) {
    const int n = static_cast<int>(scores.rows());
    const int K = static_cast<int>(scores.cols());
    if (K < 1) throw std::invalid_argument("fit_var: need at least one component");
    if (!scores.allFinite()) throw std::invalid_argument("fit_var: non-finite scores");
    if (order < 1) throw std::invalid_argument("fit_var: order must be >= 1");
    if (n - order < 1 + K * order + 1) {
        throw std::invalid_argument("fit_var: " + std::to_string(n) +
                                    " rows cannot support order " + std::to_string(order) +
                                    " with K=" + std::to_string(K));
    }
}

}  // namespace

Eigen::MatrixXd ols_solve(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          const std::string& context) {
    if (X.rows() != Y.rows()) throw std::invalid_argument(context + " (row mismatch)");
    if (X.cols() == 0) return Eigen::MatrixXd::Zero(0, Y.cols());
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) {
        throw std::runtime_error(context + " (rank " + std::to_string(qr.rank()) + " < " +
                                 std::to_string(X.cols()) + " columns)");
    }
    return qr.solve(Y);
}

VarModel fit_var_fixed(const Eigen::MatrixXd& scores, int order) {
    check_var_input(scores, order);
    return fit_var_at(scores, order);
}

VarModel fit_var(const Eigen::MatrixXd& scores, int max_order) {
    const int n = static_cast<int>(scores.rows());
    const int K = static_cast<int>(scores.cols());
    if (max_order < 1) throw std::invalid_argument("fit_var: max_order must be >= 1");
    check_var_input(scores, 1);

    int feasible_max = 0;
    for (int order = 1; order <= max_order; ++order) {
        if (n - order >= 1 + K * order + 1) feasible_max = order;
    }

    VarModel best;
    bool have_best = false;
    for (int order = 1; order <= feasible_max; ++order) {
        VarModel cand = fit_var_at(scores, order);
        if (!have_best || cand.aic < best.aic - 1e-12) {
            best = std::move(cand);
            have_best = true;
        }
    }
    if (!have_best) throw std::invalid_argument("fit_var: no feasible order");
    return best;
}

Eigen::MatrixXd forecast_var(const VarModel& model, int h) {
    if (h < 1) throw std::invalid_argument("forecast_var: h must be >= 1");
    const int K = static_cast<int>(model.scores.cols());
    const int n = static_cast<int>(model.scores.rows());
    const int order = model.order;

    // rolling window of the most recent `order` rows, newest first
    std::vector<Eigen::RowVectorXd> recent(static_cast<std::size_t>(order));
    for (int lag = 1; lag <= order; ++lag) {
        recent[static_cast<std::size_t>(lag - 1)] = model.scores.row(n - lag);
    }

    Eigen::MatrixXd out(h, K);
    Eigen::RowVectorXd x(1 + K * order);
    for (int step = 0; step < h; ++step) {
        x(0) = 1.0;
        for (int lag = 1; lag <= order; ++lag) {
            x.segment(1 + K * (lag - 1), K) = recent[static_cast<std::size_t>(lag - 1)];
        }
        const Eigen::RowVectorXd forecast = x * model.coef;
        out.row(step) = forecast;
        for (int lag = order - 1; lag >= 1; --lag) {
            recent[static_cast<std::size_t>(lag)] = recent[static_cast<std::size_t>(lag - 1)];
        }
        recent[0] = forecast;
    }
    return out;
}

Eigen::MatrixXd forecast_scores(const Eigen::MatrixXd& scores, const ForecasterConfig& config,
                                int h) {
    const int K = static_cast<int>(scores.cols());
    if (K == 0) return Eigen::MatrixXd::Zero(h, 0);
    if (config.kind == Forecaster::var) {
        return forecast_var(fit_var(scores, config.var_max_order), h);
    }
    Eigen::MatrixXd out(h, K);
    for (int k = 0; k < K; ++k) {
        const ArimaModel model = fit_auto_arima(scores.col(k));
        out.col(k) = forecast_arima(model, h).point;
    }
    return out;
}

Eigen::VectorXd ts_forecast_curve(const FpcaModel& model, const Eigen::VectorXd& score_forecast) {
    if (score_forecast.size() != model.K) {
        throw std::invalid_argument("ts_forecast_curve: score vector length " +
                                    std::to_string(score_forecast.size()) +
                                    " does not match K=" + std::to_string(model.K));
    }
    return model.mean + model.eigenfunctions * score_forecast;
}

Eigen::VectorXd ts_forecast_curve_tail(const FpcaModel& model,
                                       const Eigen::VectorXd& score_forecast, int m0) {
    if (m0 < 0 || m0 >= model.grid.p) {
        throw std::invalid_argument("ts_forecast_curve_tail: m0 out of range");
    }
    const Eigen::VectorXd full = ts_forecast_curve(model, score_forecast);
    return full.tail(model.grid.p - m0);
}

std::string var_to_json(const VarModel& model) {
    nlohmann::json j;
    j["order"] = model.order;
    j["aic"] = model.aic;
    std::vector<std::vector<double>> coef(static_cast<std::size_t>(model.coef.rows()),
                                          std::vector<double>(static_cast<std::size_t>(model.coef.cols())));
    for (Eigen::Index r = 0; r < model.coef.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.coef.cols(); ++c) {
            coef[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = model.coef(r, c);
        }
    }
    j["coefficients"] = coef;
    std::vector<std::vector<double>> cov(static_cast<std::size_t>(model.resid_cov.rows()),
                                         std::vector<double>(static_cast<std::size_t>(model.resid_cov.cols())));
    for (Eigen::Index r = 0; r < model.resid_cov.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.resid_cov.cols(); ++c) {
            cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = model.resid_cov(r, c);
        }
    }
    j["residual_covariance"] = cov;
    return j.dump(2);
}

}  // namespace curvecast
