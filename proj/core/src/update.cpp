#include "curvecast/update.hpp"

#include <stdexcept>
#include <string>

namespace curvecast {

namespace {

FunctionalTimeSeries block(const FunctionalTimeSeries& fts, const Grid& grid, int col0,
                           int width) {
    FunctionalTimeSeries out;
    out.grid = grid;
    out.curves = fts.curves.middleCols(col0, width);
    return out;
}

FlrModel flr_fit_impl(const FunctionalTimeSeries& fts, int m0, double delta,
                      const FpcaOptions& base_options, int fixed_K, int fixed_M) {
    fts.validate();
    const int p = fts.p();
    if (m0 < 1 || m0 >= p) {
        throw std::invalid_argument("flr_fit: m0 must lie in [1, p-1], got " +
                                    std::to_string(m0));
    }

    FpcaOptions early_options = base_options;
    early_options.delta = delta;
    early_options.fixed_K = fixed_K;
    FpcaOptions late_options = early_options;
    late_options.fixed_K = fixed_M;

    FlrModel model;
    model.m0 = m0;
    model.delta = delta;
    model.fpca_options = base_options;
    model.fpca_options.delta = delta;
    model.early = fit_fpca(block(fts, fts.grid.head(m0), 0, m0), early_options);
    model.late = fit_fpca(block(fts, fts.grid.tail(m0), m0, p - m0), late_options);

    const int n = fts.n();
    if (n < model.early.K + model.late.K + 2) {
        throw std::invalid_argument("flr_fit: need n >= K + M + 2 curves (n=" +
                                    std::to_string(n) + ", K=" + std::to_string(model.early.K) +
                                    ", M=" + std::to_string(model.late.K) + ")");
    }

    model.coef = ols_solve(model.early.scores, model.late.scores, "flr_fit: collinear scores");

    const Eigen::MatrixXd fitted_late =
        (model.early.scores * model.coef) * model.late.eigenfunctions.transpose();
    model.late_residuals = fts.curves.middleCols(m0, p - m0);
    model.late_residuals.rowwise() -= model.late.mean.transpose();
    model.late_residuals -= fitted_late;
    return model;
}

}  // namespace

RotatedSeries bm_rotate(const FunctionalTimeSeries& fts, const PartialCurve& partial) {
    fts.validate();
    partial.validate();
    if (!fts.grid.same_shape(partial.grid)) {
        throw std::invalid_argument("bm_rotate: partial curve grid does not match the series");
    }
    if (fts.n() < 2) {
        throw std::invalid_argument("bm_rotate: need at least 2 curves");
    }
    const int p = fts.p();
    const int m0 = partial.m0;
    const int n = fts.n();

    RotatedSeries rotated;
    rotated.m0 = m0;
    rotated.original_n = n;
    rotated.series.grid = fts.grid;
    rotated.series.curves.resize(n, p);
    for (int i = 0; i < n; ++i) {
        rotated.series.curves.row(i).head(p - m0) = fts.curves.row(i).tail(p - m0);
        if (i + 1 < n) {
            rotated.series.curves.row(i).tail(m0) = fts.curves.row(i + 1).head(m0);
        } else {
            rotated.series.curves.row(i).tail(m0) = partial.values.transpose();
        }
    }
    return rotated;
}

Eigen::VectorXd bm_forecast(const RotatedSeries& rotated, const FpcaOptions& fpca_options,
                            const ForecasterConfig& forecaster) {
    const FpcaModel model = fit_fpca(rotated.series, fpca_options);
    if (model.K == 0) return model.mean;
    const Eigen::MatrixXd score_forecast = forecast_scores(model.scores, forecaster, 1);
    return ts_forecast_curve(model, score_forecast.row(0).transpose());
}

FlrModel flr_fit(const FunctionalTimeSeries& fts, int m0, double delta,
                 const FpcaOptions& fpca_options) {
    return flr_fit_impl(fts, m0, delta, fpca_options, 0, 0);
}

FlrModel flr_fit_fixed(const FunctionalTimeSeries& fts, int m0, int K, int M) {
    if (K < 1 || M < 1) throw std::invalid_argument("flr_fit_fixed: K and M must be >= 1");
    return flr_fit_impl(fts, m0, 1.0, FpcaOptions{}, K, M);
}

Eigen::VectorXd flr_predict(const FlrModel& model, const PartialCurve& partial) {
    partial.validate();
    if (partial.m0 != model.m0) {
        throw std::invalid_argument("flr_predict: partial curve has m0=" +
                                    std::to_string(partial.m0) + ", model expects " +
                                    std::to_string(model.m0));
    }
    const Eigen::VectorXd centered = partial.values - model.early.mean;
    const Eigen::VectorXd xi =
        model.early.eigenfunctions.transpose() * centered * model.early.grid.dt;
    return model.late.mean + model.late.eigenfunctions * (model.coef.transpose() * xi);
}

Eigen::MatrixXd flr_kernel(const FlrModel& model) {
    return model.early.eigenfunctions * model.coef * model.late.eigenfunctions.transpose();
}

}  // namespace curvecast
