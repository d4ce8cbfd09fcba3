#include <cstdio>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvecast/eval.hpp"
#include "curvecast/io.hpp"
#include "curvecast/parallel.hpp"
#include "curvecast/pipeline.hpp"
#include "pipeline_detail.hpp"

namespace curvecast {

namespace {

struct DayResult {
    Eigen::VectorXd forecast;
    PointwiseInterval interval;
};

}  // namespace

RunResult run_forecast(const RunConfig& config) {
    config.validate_common();
    const FunctionalTimeSeries all = detail::load_curves(config);
    const int n = all.n();
    const int p = all.p();
    const int q = config.q;
    if (q >= n) {
        throw std::invalid_argument("forecast: holdout q=" + std::to_string(q) +
                                    " must be smaller than n=" + std::to_string(n));
    }
    const int first_train = n - q;
    if (config.intervals && first_train <= config.min_train + 1) {
        throw std::invalid_argument(
            "forecast: training window too short for in-sample score errors (need > " +
            std::to_string(config.min_train + 1) + " curves before the holdout)");
    }

    const FpcaOptions fpca_options = config.fpca_options();
    const ForecasterConfig forecaster = config.forecaster_config();

    std::vector<DayResult> days(static_cast<std::size_t>(q));
    parallel_for(static_cast<std::size_t>(q), config.threads, [&](std::size_t kappa) {
        try {
            FunctionalTimeSeries train;
            train.grid = all.grid;
            train.curves = all.curves.topRows(first_train + static_cast<int>(kappa));
            const FpcaModel model = fit_fpca(train, fpca_options);

            DayResult& day = days[kappa];
            if (model.K == 0) {
                day.forecast = model.mean;
            } else {
                const Eigen::MatrixXd score_forecast =
                    forecast_scores(model.scores, forecaster, 1);
                day.forecast = ts_forecast_curve(model, score_forecast.row(0).transpose());
            }
            if (config.intervals) {
                const Eigen::MatrixXd errors =
                    model.K == 0
                        ? Eigen::MatrixXd::Zero(1, 0)
                        : detail::rolling_score_errors(model.scores, forecaster,
                                                       config.min_train);
                day.interval = bootstrap_pointwise_pi(model, forecaster, errors, config.alpha,
                                                      config.B, derive_seed(config.seed, kappa));
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("forecast: holdout day " + std::to_string(kappa + 1) +
                                     ": " + e.what());
        }
    });

    const Eigen::MatrixXd actuals = all.curves.bottomRows(q);
    Eigen::MatrixXd forecasts(q, p);
    for (int kappa = 0; kappa < q; ++kappa) {
        forecasts.row(kappa) = days[static_cast<std::size_t>(kappa)].forecast;
    }

    const std::string label =
        std::string(config.robust ? "robust-" : "") + detail::method_label("ts", config.forecaster);
    AccuracyReport report = mafe_msfe(actuals, forecasts, label);
    if (config.intervals) {
        Eigen::MatrixXd lower(q, p), upper(q, p);
        for (int kappa = 0; kappa < q; ++kappa) {
            lower.row(kappa) = days[static_cast<std::size_t>(kappa)].interval.lower;
            upper.row(kappa) = days[static_cast<std::size_t>(kappa)].interval.upper;
        }
        report.mean_interval_score = mean_interval_score(lower, upper, actuals, config.alpha);
        report.avg_interval_score = report.mean_interval_score.mean();
    }

    // diagnostics from the final fit on the full sample
    const FpcaModel final_model = fit_fpca(all, fpca_options);
    FunctionalTimeSeries residual_fts;
    residual_fts.grid = all.grid;
    residual_fts.curves = final_model.residuals;
    const int max_lag = std::min(config.max_lag, n - 1);
    const FunctionalAcf acf = functional_acf(residual_fts, max_lag);

    detail::OutputTracker tracker(resolve_output_dir(config));

    std::vector<detail::TidyRow> rows;
    for (int j = 0; j < p; ++j) {
        rows.push_back({report.method, "mafe", j + 1, report.mafe[j]});
        rows.push_back({report.method, "msfe", j + 1, report.msfe[j]});
        if (config.intervals) {
            rows.push_back({report.method, "interval_score", j + 1,
                            report.mean_interval_score[j]});
        }
    }
    const std::string report_path = tracker.path("forecast_report.csv");
    detail::write_tidy_csv(report_path, "j", rows);
    tracker.note(report_path);

    const std::string forecast_path = tracker.path("forecast_curves.csv");
    write_matrix_csv(forecast_path, forecasts);
    tracker.note(forecast_path);
    const std::string actual_path = tracker.path("holdout_actuals.csv");
    write_matrix_csv(actual_path, actuals);
    tracker.note(actual_path);

    if (config.intervals) {
        char name[64];
        for (int kappa = 0; kappa < q; ++kappa) {
            std::snprintf(name, sizeof(name), "intervals/day_%03d.csv", kappa + 1);
            const std::string path = tracker.path(name);
            detail::write_interval_csv(path, all.grid.points,
                                       days[static_cast<std::size_t>(kappa)].forecast,
                                       days[static_cast<std::size_t>(kappa)].interval);
            tracker.note(path);
        }
    }

    {
        std::string facf = "lag,rho,critical_value\n";
        for (int lag = 1; lag <= max_lag; ++lag) {
            facf += std::to_string(lag) + ',' + format_double(acf.rho[lag - 1]) + ',' +
                    format_double(acf.critical_value) + '\n';
        }
        const std::string path = tracker.path("facf.csv");
        detail::write_text(path, facf);
        tracker.note(path);
    }

    {
        const std::string path = tracker.path("fpca_model.json");
        detail::write_text(path, fpca_to_json(final_model) + "\n");
        tracker.note(path);
    }

    {
        nlohmann::json summary;
        summary["method"] = report.method;
        summary["fpca"] = config.robust ? "robust" : "standard";
        summary["n"] = n;
        summary["q"] = q;
        summary["delta"] = config.delta;
        summary["alpha"] = config.alpha;
        summary["B"] = config.B;
        summary["seed"] = config.seed;
        summary["avg_mafe"] = report.avg_mafe;
        summary["avg_msfe"] = report.avg_msfe;
        if (config.intervals) summary["avg_interval_score"] = report.avg_interval_score;
        const std::string path = tracker.path("forecast_summary.json");
        detail::write_text(path, summary.dump(2) + "\n");
        tracker.note(path);
    }

    RunResult result;
    result.written = tracker.commit();
    return result;
}

}  // namespace curvecast
