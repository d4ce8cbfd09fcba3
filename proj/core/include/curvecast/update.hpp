#pragma once

#include <Eigen/Dense>

#include "curvecast/fpca.hpp"
#include "curvecast/scorecast.hpp"
#include "curvecast/series.hpp"

namespace curvecast {

/// Functional time series on the rotated support (m0,p] followed by (0,m0]:
/// rotated curve i = [X_i(t_{m0+1..p}), X_{i+1}(t_{1..m0})], with the partial
/// observations completing the last curve and the head of day 1 discarded.
struct RotatedSeries {
    FunctionalTimeSeries series;
    int m0 = 0;
    int original_n = 0;
};

RotatedSeries bm_rotate(const FunctionalTimeSeries& fts, const PartialCurve& partial);

/// One-step forecast of the full rotated day via FPCA plus a score model.
/// The leading p-m0 entries are the updated forecast for the remaining
/// support of day n+1; the trailing m0 entries belong to day n+2 and are not
/// scored.
Eigen::VectorXd bm_forecast(const RotatedSeries& rotated, const FpcaOptions& fpca_options,
                            const ForecasterConfig& forecaster);

/// Function-on-function regression of the late block on the early block,
/// estimated through the two blockwise FPCA score sets:
/// zeta ~= xi * coef, coef = (xi^T xi)^{-1} xi^T zeta (scores are centered,
/// so no intercept).
struct FlrModel {
    int m0 = 0;
    double delta = 0.9;
    FpcaOptions fpca_options;
    FpcaModel early;                 // basis phi^e, scores xi
    FpcaModel late;                  // basis psi^l, scores zeta
    Eigen::MatrixXd coef;            // K x M
    Eigen::MatrixXd late_residuals;  // n x (p-m0), curve - fitted late block
};

FlrModel flr_fit(const FunctionalTimeSeries& fts, int m0, double delta,
                 const FpcaOptions& fpca_options = {});

/// Variant with caller-fixed component counts for both blocks.
FlrModel flr_fit_fixed(const FunctionalTimeSeries& fts, int m0, int K, int M);

/// Projects the observed partial curve onto the early basis and maps the
/// scores through the regression onto the late-block expansion.
Eigen::VectorXd flr_predict(const FlrModel& model, const PartialCurve& partial);

/// Materialized regression kernel tau(s,t) on the m0 x (p-m0) sub-grid.
Eigen::MatrixXd flr_kernel(const FlrModel& model);

}  // namespace curvecast
