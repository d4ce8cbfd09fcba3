#include "curvecast/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvecast {

namespace {

int quantile_index(int B, double prob) {
    // 1-based ceil(B*prob)-th order statistic, clamped to [1, B]
    int idx = static_cast<int>(std::ceil(static_cast<double>(B) * prob - 1e-9));
    idx = std::max(1, std::min(B, idx));
    return idx - 1;
}

PointwiseInterval quantile_interval(Eigen::MatrixXd& replicates, double alpha, int B,
                                    bool keep_replicates) {
    PointwiseInterval interval;
    interval.alpha = alpha;
    interval.level = 1.0 - alpha;
    interval.B = B;
    const int p = static_cast<int>(replicates.cols());
    interval.lower.resize(p);
    interval.upper.resize(p);
    const int lo = quantile_index(B, alpha / 2.0);
    const int hi = quantile_index(B, 1.0 - alpha / 2.0);
    std::vector<double> column(static_cast<std::size_t>(B));
    for (int j = 0; j < p; ++j) {
        for (int b = 0; b < B; ++b) column[static_cast<std::size_t>(b)] = replicates(b, j);
        std::sort(column.begin(), column.end());
        interval.lower[j] = column[static_cast<std::size_t>(lo)];
        interval.upper[j] = column[static_cast<std::size_t>(hi)];
    }
    if (keep_replicates) interval.replicates = std::move(replicates);
    return interval;
}

void check_interval_args(double alpha, int B) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("bootstrap interval: alpha must lie in (0,1)");
    }
    if (B < 100) {
        throw std::invalid_argument("bootstrap interval: need B >= 100, got " +
                                    std::to_string(B));
    }
}

double trimmed_mean(std::vector<double> values, double trim) {
    std::sort(values.begin(), values.end());
    const std::size_t cut = static_cast<std::size_t>(
        std::floor(trim * static_cast<double>(values.size())));
    const std::size_t lo = cut;
    const std::size_t hi = values.size() - cut;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += values[i];
    return sum / static_cast<double>(hi - lo);
}

}  // namespace

Eigen::MatrixXd insample_score_errors_with(
    const Eigen::MatrixXd& scores, int min_train,
    const std::function<Eigen::RowVectorXd(const Eigen::MatrixXd&)>& one_step) {
    const int n = static_cast<int>(scores.rows());
    if (min_train < 1) throw std::invalid_argument("insample_score_errors: min_train must be >= 1");
    if (n <= min_train) {
        throw std::invalid_argument("insample_score_errors: history of " + std::to_string(n) +
                                    " rows is shorter than min_train=" +
                                    std::to_string(min_train) + " + 1");
    }
    Eigen::MatrixXd errors(n - min_train, scores.cols());
    for (int origin = min_train; origin < n; ++origin) {
        const Eigen::RowVectorXd forecast = one_step(scores.topRows(origin));
        errors.row(origin - min_train) = scores.row(origin) - forecast;
    }
    return errors;
}

Eigen::MatrixXd insample_score_errors(const Eigen::MatrixXd& scores,
                                      const ForecasterConfig& config, int min_train) {
    return insample_score_errors_with(
        scores, min_train, [&config](const Eigen::MatrixXd& history) -> Eigen::RowVectorXd {
            return forecast_scores(history, config, 1).row(0);
        });
}

Eigen::MatrixXd insample_score_errors(const FpcaModel& model, const ForecasterConfig& config,
                                      int min_train) {
    return insample_score_errors(model.scores, config, min_train);
}

PointwiseInterval bootstrap_pointwise_pi(const FpcaModel& model, const ForecasterConfig& config,
                                         const Eigen::MatrixXd& score_errors, double alpha,
                                         int B, std::uint64_t seed, bool keep_replicates) {
    check_interval_args(alpha, B);
    const int K = model.K;
    const int n_errors = static_cast<int>(score_errors.rows());
    if (K > 0 && n_errors < 1) {
        throw std::invalid_argument("bootstrap_pointwise_pi: empty score-error matrix");
    }
    if (K > 0 && score_errors.cols() != K) {
        throw std::invalid_argument("bootstrap_pointwise_pi: error matrix has " +
                                    std::to_string(score_errors.cols()) +
                                    " columns, model has K=" + std::to_string(K));
    }

    Eigen::RowVectorXd point_scores = Eigen::RowVectorXd::Zero(K);
    if (K > 0) point_scores = forecast_scores(model.scores, config, 1).row(0);

    const int n = model.n();
    Eigen::MatrixXd replicates(B, model.grid.p);
    for (int b = 0; b < B; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        Eigen::VectorXd scores_b(K);
        for (int k = 0; k < K; ++k) {
            scores_b[k] = point_scores[k] + score_errors(rng.uniform_int(n_errors), k);
        }
        const int resid_row = rng.uniform_int(n);
        replicates.row(b) = (model.mean + model.eigenfunctions * scores_b).transpose() +
                            model.residuals.row(resid_row);
    }
    return quantile_interval(replicates, alpha, B, keep_replicates);
}

Eigen::VectorXd meboot_replicate(const Eigen::VectorXd& series, Rng& rng) {
    const int T = static_cast<int>(series.size());
    if (T < 3) throw std::invalid_argument("meboot: need at least 3 observations");
    if (!series.allFinite()) throw std::invalid_argument("meboot: non-finite values");

    // ranks: order[r] = index of the r-th smallest source value (stable)
    std::vector<int> order(static_cast<std::size_t>(T));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return series[a] < series[b]; });
    Eigen::VectorXd sorted(T);
    for (int r = 0; r < T; ++r) sorted[r] = series[order[static_cast<std::size_t>(r)]];

    if (sorted[T - 1] == sorted[0]) {
        return series;  // constant series has zero spread
    }

    std::vector<double> gaps(static_cast<std::size_t>(T - 1));
    for (int r = 0; r + 1 < T; ++r) {
        gaps[static_cast<std::size_t>(r)] = std::abs(sorted[r + 1] - sorted[r]);
    }
    const double m_trm = trimmed_mean(gaps, 0.10);

    // quantile grid z_0..z_T
    Eigen::VectorXd z(T + 1);
    z[0] = sorted[0] - m_trm;
    for (int r = 1; r < T; ++r) z[r] = 0.5 * (sorted[r - 1] + sorted[r]);
    z[T] = sorted[T - 1] + m_trm;

    // desired interval means (the mean-preserving constraint); interior
    // intervals already have them at their midpoints, the edge intervals
    // need an additive shift
    const double mean_first = 0.75 * sorted[0] + 0.25 * sorted[1];
    const double mean_last = 0.25 * sorted[T - 2] + 0.75 * sorted[T - 1];
    const double shift_first = mean_first - 0.5 * (z[0] + z[1]);
    const double shift_last = mean_last - 0.5 * (z[T - 1] + z[T]);

    std::vector<double> draws(static_cast<std::size_t>(T));
    for (int i = 0; i < T; ++i) {
        const double u = rng.uniform();
        const double pos = u * static_cast<double>(T);
        int interval = std::min(T - 1, static_cast<int>(pos));
        const double frac = pos - static_cast<double>(interval);
        double value = z[interval] + frac * (z[interval + 1] - z[interval]);
        if (interval == 0) value += shift_first;
        if (interval == T - 1) value += shift_last;
        draws[static_cast<std::size_t>(i)] = value;
    }
    std::sort(draws.begin(), draws.end());

    Eigen::VectorXd replicate(T);
    for (int r = 0; r < T; ++r) {
        replicate[order[static_cast<std::size_t>(r)]] = draws[static_cast<std::size_t>(r)];
    }
    return replicate;
}

Eigen::VectorXd meboot(const Eigen::VectorXd& series, std::uint64_t seed) {
    Rng rng(seed);
    return meboot_replicate(series, rng);
}

PointwiseInterval flr_bootstrap_pi(const FlrModel& flr, const FunctionalTimeSeries& fts,
                                   const PartialCurve& partial, double alpha, int B,
                                   std::uint64_t seed, bool keep_replicates) {
    check_interval_args(alpha, B);
    if (partial.m0 != flr.m0) {
        throw std::invalid_argument("flr_bootstrap_pi: partial curve m0 mismatch");
    }
    const FpcaModel full = fit_fpca(fts, flr.fpca_options);
    const int n = fts.n();
    const int tail = fts.p() - flr.m0;

    Eigen::MatrixXd replicates(B, tail);
    for (int b = 0; b < B; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        try {
            FunctionalTimeSeries rebuilt;
            rebuilt.grid = fts.grid;
            if (full.K > 0) {
                Eigen::MatrixXd scores_b(n, full.K);
                for (int k = 0; k < full.K; ++k) {
                    scores_b.col(k) = meboot_replicate(full.scores.col(k), rng);
                }
                rebuilt.curves = scores_b * full.eigenfunctions.transpose();
                rebuilt.curves.rowwise() += full.mean.transpose();
            } else {
                rebuilt.curves = Eigen::MatrixXd::Zero(n, fts.p());
                rebuilt.curves.rowwise() += full.mean.transpose();
            }
            const FlrModel flr_b =
                flr_fit(rebuilt, flr.m0, flr.delta, flr.fpca_options);
            const int resid_row = rng.uniform_int(n);
            replicates.row(b) = flr_predict(flr_b, partial).transpose() +
                                flr.late_residuals.row(resid_row);
        } catch (const std::exception& e) {
            throw std::runtime_error("flr_bootstrap_pi: replicate " + std::to_string(b + 1) +
                                     " failed: " + e.what());
        }
    }
    return quantile_interval(replicates, alpha, B, keep_replicates);
}

UniformBand prediction_band(const Eigen::VectorXd& point_forecast,
                            const Eigen::MatrixXd& residual_curves, double coverage) {
    if (!(coverage > 0.0 && coverage < 1.0)) {
        throw std::invalid_argument("prediction_band: coverage must lie in (0,1)");
    }
    const int n = static_cast<int>(residual_curves.rows());
    const int p = static_cast<int>(residual_curves.cols());
    if (n < 10) {
        throw std::invalid_argument("prediction_band: need at least 10 residual curves, got " +
                                    std::to_string(n));
    }
    if (point_forecast.size() != p) {
        throw std::invalid_argument("prediction_band: forecast length mismatch");
    }

    constexpr double kGammaFloor = 1e-8;
    UniformBand band;
    band.coverage = coverage;
    band.gamma.resize(p);
    const Eigen::RowVectorXd mean = residual_curves.colwise().mean();
    for (int j = 0; j < p; ++j) {
        const double var =
            (residual_curves.col(j).array() - mean[j]).square().sum() / static_cast<double>(n - 1);
        band.gamma[j] = std::max(std::sqrt(var), kGammaFloor);
    }

    std::vector<double> sup_ratio(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        sup_ratio[static_cast<std::size_t>(i)] =
            (residual_curves.row(i).transpose().cwiseQuotient(band.gamma))
                .cwiseAbs()
                .maxCoeff();
    }
    std::sort(sup_ratio.begin(), sup_ratio.end());
    const int idx = quantile_index(n, coverage);
    band.xi = sup_ratio[static_cast<std::size_t>(idx)];

    band.center = point_forecast;
    band.lower = point_forecast - band.xi * band.gamma;
    band.upper = point_forecast + band.xi * band.gamma;
    return band;
}

}  // namespace curvecast
