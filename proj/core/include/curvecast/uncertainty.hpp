#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "curvecast/fpca.hpp"
#include "curvecast/rng.hpp"
#include "curvecast/scorecast.hpp"
#include "curvecast/update.hpp"

namespace curvecast {

/// Pointwise lower/upper forecast quantiles at level 1-alpha.
struct PointwiseInterval {
    double alpha = 0.2;
    double level = 0.8;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    int B = 0;
    Eigen::MatrixXd replicates;  // B x p when retained, else empty
};

/// Uniform band: point forecast +- xi * gamma(t), with xi calibrated so the
/// requested fraction of whole residual curves stays inside.
struct UniformBand {
    double coverage = 0.8;
    double xi = 0.0;
    Eigen::VectorXd gamma;
    Eigen::VectorXd center;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

/// One-step-ahead in-sample score forecast errors from rolling refits on an
/// expanding window: for each origin o >= min_train the forecaster is refit
/// on rows 0..o-1 and the error against row o recorded. Returns an
/// (n - min_train) x K matrix.
Eigen::MatrixXd insample_score_errors(const Eigen::MatrixXd& scores,
                                      const ForecasterConfig& config, int min_train = 20);

Eigen::MatrixXd insample_score_errors(const FpcaModel& model, const ForecasterConfig& config,
                                      int min_train = 20);

/// Same rolling protocol with a caller-supplied one-step forecaster
/// (history rows in, one forecast row out).
Eigen::MatrixXd insample_score_errors_with(
    const Eigen::MatrixXd& scores, int min_train,
    const std::function<Eigen::RowVectorXd(const Eigen::MatrixXd&)>& one_step);

/// Nonparametric bootstrap interval for the next curve: score forecasts are
/// perturbed by resampled in-sample score errors (independently per
/// component), a resampled residual function is added, and pointwise
/// empirical quantiles are taken over B assembled curves. Deterministic for
/// a fixed seed: replicate b draws from a sub-seed derived from (seed, b).
PointwiseInterval bootstrap_pointwise_pi(const FpcaModel& model, const ForecasterConfig& config,
                                         const Eigen::MatrixXd& score_errors, double alpha,
                                         int B, std::uint64_t seed,
                                         bool keep_replicates = false);

/// Maximum entropy bootstrap replicate (rank-preserving, mean-preserving):
/// piecewise-linear quantile through interval midpoints of the sorted
/// sample, tails widened by the trimmed mean absolute consecutive gap, with
/// edge intervals shifted to meet the mean constraint; T uniform draws are
/// mapped through it, sorted, and reordered to the source ranks.
Eigen::VectorXd meboot(const Eigen::VectorXd& series, std::uint64_t seed);
Eigen::VectorXd meboot_replicate(const Eigen::VectorXd& series, Rng& rng);

/// Interval update for a partially observed day: per replicate, every score
/// column of the full-curve FPCA is meboot-resampled, curves are rebuilt,
/// the regression is refit, the observed partial curve is mapped through it,
/// and a resampled historical late-block residual function is added.
PointwiseInterval flr_bootstrap_pi(const FlrModel& flr, const FunctionalTimeSeries& fts,
                                   const PartialCurve& partial, double alpha, int B,
                                   std::uint64_t seed, bool keep_replicates = false);

/// Uniform prediction band from residual curves: gamma(t) is the pointwise
/// standard deviation (floored), xi the smallest order statistic of the
/// standardized sup-ratios covering at least `coverage` of the curves.
UniformBand prediction_band(const Eigen::VectorXd& point_forecast,
                            const Eigen::MatrixXd& residual_curves, double coverage);

}  // namespace curvecast
