#include <algorithm>
#include <set>
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

struct UpdateMethod {
    std::string family;  // ts | bm | flr
    Forecaster forecaster = Forecaster::var;
    std::string label;
};

std::vector<UpdateMethod> expand_methods(const RunConfig& config) {
    std::vector<UpdateMethod> methods;
    auto add = [&](const std::string& family, Forecaster forecaster) {
        UpdateMethod m{family, forecaster, detail::method_label(family, forecaster)};
        for (const auto& existing : methods) {
            if (existing.label == m.label) return;
        }
        methods.push_back(std::move(m));
    };
    for (const auto& name : config.methods) {
        if (name == "all") {
            add("ts", Forecaster::arima);
            add("ts", Forecaster::var);
            add("bm", Forecaster::arima);
            add("bm", Forecaster::var);
            add("flr", Forecaster::var);
        } else if (name == "ts" || name == "bm") {
            add(name, config.forecaster);
        } else if (name == "flr") {
            add("flr", Forecaster::var);
        } else if (name == "ts-arima") {
            add("ts", Forecaster::arima);
        } else if (name == "ts-var") {
            add("ts", Forecaster::var);
        } else if (name == "bm-arima") {
            add("bm", Forecaster::arima);
        } else if (name == "bm-var") {
            add("bm", Forecaster::var);
        } else {
            throw std::invalid_argument("update: unknown method '" + name + "'");
        }
    }
    if (methods.empty()) throw std::invalid_argument("update: no methods selected");
    return methods;
}

/// Forecasts and interval bounds for one (method, m0) cell over the holdout.
struct Cell {
    Eigen::MatrixXd forecast;  // q x (p - m0)
    Eigen::MatrixXd lower;
    Eigen::MatrixXd upper;
};

}  // namespace

RunResult run_update(const RunConfig& config) {
    config.validate_common();
    const FunctionalTimeSeries all = detail::load_curves(config);
    const int n = all.n();
    const int p = all.p();
    const int q = config.q;
    if (q >= n) {
        throw std::invalid_argument("update: holdout q=" + std::to_string(q) +
                                    " must be smaller than n=" + std::to_string(n));
    }

    std::vector<int> schedule = config.m0_schedule;
    if (schedule.empty()) {
        for (int m0 = 2; m0 <= p - 1; ++m0) schedule.push_back(m0);
    }
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
    for (int m0 : schedule) {
        if (m0 < 1 || m0 > p - 1) {
            throw std::invalid_argument("update: m0=" + std::to_string(m0) +
                                        " outside 1..p-1 (p=" + std::to_string(p) + ")");
        }
    }

    const std::vector<UpdateMethod> methods = expand_methods(config);
    const FpcaOptions fpca_options = config.fpca_options();
    const int first_train = n - q;
    if (config.intervals && first_train <= config.min_train + 1) {
        throw std::invalid_argument(
            "update: training window too short for in-sample score errors");
    }

    std::vector<std::vector<Cell>> cells(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        cells[m].resize(schedule.size());
        for (std::size_t s = 0; s < schedule.size(); ++s) {
            const int tail = p - schedule[s];
            cells[m][s].forecast.resize(q, tail);
            if (config.intervals) {
                cells[m][s].lower.resize(q, tail);
                cells[m][s].upper.resize(q, tail);
            }
        }
    }

    parallel_for(static_cast<std::size_t>(q), config.threads, [&](std::size_t kappa) {
        try {
            const int day_row = first_train + static_cast<int>(kappa);
            FunctionalTimeSeries history;
            history.grid = all.grid;
            history.curves = all.curves.topRows(day_row);
            const Eigen::VectorXd actual_day = all.curves.row(day_row).transpose();
            const std::uint64_t day_seed = derive_seed(config.seed, kappa);

            for (std::size_t m = 0; m < methods.size(); ++m) {
                const UpdateMethod& method = methods[m];
                const ForecasterConfig forecaster{method.forecaster, 5};
                const std::uint64_t method_seed = derive_seed(day_seed, m);

                if (method.family == "ts") {
                    const FpcaModel model = fit_fpca(history, fpca_options);
                    Eigen::VectorXd full;
                    PointwiseInterval interval;
                    if (model.K == 0) {
                        full = model.mean;
                    } else {
                        full = ts_forecast_curve(
                            model, forecast_scores(model.scores, forecaster, 1).row(0).transpose());
                    }
                    if (config.intervals) {
                        const Eigen::MatrixXd errors =
                            model.K == 0 ? Eigen::MatrixXd::Zero(1, 0)
                                         : detail::rolling_score_errors(model.scores, forecaster,
                                                                        config.min_train);
                        interval = bootstrap_pointwise_pi(model, forecaster, errors, config.alpha,
                                                          config.B, method_seed);
                    }
                    for (std::size_t s = 0; s < schedule.size(); ++s) {
                        const int m0 = schedule[s];
                        cells[m][s].forecast.row(static_cast<int>(kappa)) =
                            full.tail(p - m0).transpose();
                        if (config.intervals) {
                            cells[m][s].lower.row(static_cast<int>(kappa)) =
                                interval.lower.tail(p - m0).transpose();
                            cells[m][s].upper.row(static_cast<int>(kappa)) =
                                interval.upper.tail(p - m0).transpose();
                        }
                    }
                    continue;
                }

                for (std::size_t s = 0; s < schedule.size(); ++s) {
                    const int m0 = schedule[s];
                    const std::uint64_t cell_seed = derive_seed(method_seed, s);
                    PartialCurve partial;
                    partial.grid = all.grid;
                    partial.m0 = m0;
                    partial.values = actual_day.head(m0);

                    if (method.family == "bm") {
                        const RotatedSeries rotated = bm_rotate(history, partial);
                        const FpcaModel model = fit_fpca(rotated.series, fpca_options);
                        Eigen::VectorXd full;
                        if (model.K == 0) {
                            full = model.mean;
                        } else {
                            full = ts_forecast_curve(
                                model,
                                forecast_scores(model.scores, forecaster, 1).row(0).transpose());
                        }
                        cells[m][s].forecast.row(static_cast<int>(kappa)) =
                            full.head(p - m0).transpose();
                        if (config.intervals) {
                            const Eigen::MatrixXd errors =
                                model.K == 0
                                    ? Eigen::MatrixXd::Zero(1, 0)
                                    : detail::rolling_score_errors(model.scores, forecaster,
                                                                   config.min_train);
                            const PointwiseInterval interval = bootstrap_pointwise_pi(
                                model, forecaster, errors, config.alpha, config.B, cell_seed);
                            cells[m][s].lower.row(static_cast<int>(kappa)) =
                                interval.lower.head(p - m0).transpose();
                            cells[m][s].upper.row(static_cast<int>(kappa)) =
                                interval.upper.head(p - m0).transpose();
                        }
                    } else {  // flr
                        const FlrModel model = flr_fit(history, m0, config.delta, fpca_options);
                        cells[m][s].forecast.row(static_cast<int>(kappa)) =
                            flr_predict(model, partial).transpose();
                        if (config.intervals) {
                            const PointwiseInterval interval =
                                flr_bootstrap_pi(model, history, partial, config.alpha, config.B,
                                                 cell_seed);
                            cells[m][s].lower.row(static_cast<int>(kappa)) =
                                interval.lower.transpose();
                            cells[m][s].upper.row(static_cast<int>(kappa)) =
                                interval.upper.transpose();
                        }
                    }
                }
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("update: holdout day " + std::to_string(kappa + 1) + ": " +
                                     e.what());
        }
    });

    const Eigen::MatrixXd actuals = all.curves.bottomRows(q);

    // per-m0 table: averages over the remaining support and the holdout days
    std::vector<detail::TidyRow> per_m0_rows;
    struct Summary {
        double mafe_m0 = 0.0, msfe_m0 = 0.0, is_m0 = 0.0;
        double mafe_j = 0.0, msfe_j = 0.0, is_j = 0.0;
    };
    std::vector<Summary> summaries(methods.size());

    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t s = 0; s < schedule.size(); ++s) {
            const int m0 = schedule[s];
            const Eigen::MatrixXd actual_tail = actuals.rightCols(p - m0);
            const Eigen::MatrixXd err = actual_tail - cells[m][s].forecast;
            const double mafe = err.cwiseAbs().mean();
            const double msfe = err.array().square().mean();
            per_m0_rows.push_back({methods[m].label, "mafe", m0, mafe});
            per_m0_rows.push_back({methods[m].label, "msfe", m0, msfe});
            summaries[m].mafe_m0 += mafe / static_cast<double>(schedule.size());
            summaries[m].msfe_m0 += msfe / static_cast<double>(schedule.size());
            if (config.intervals) {
                const double is = mean_interval_score(cells[m][s].lower, cells[m][s].upper,
                                                      actual_tail, config.alpha)
                                      .mean();
                per_m0_rows.push_back({methods[m].label, "interval_score", m0, is});
                summaries[m].is_m0 += is / static_cast<double>(schedule.size());
            }
        }
    }

    // per-j table: each grid point is scored with the most recent update,
    // i.e. the largest scheduled m0 below j
    std::vector<detail::TidyRow> per_j_rows;
    const int min_m0 = schedule.front();
    int per_j_count = 0;
    for (int j = min_m0 + 1; j <= p; ++j) {
        int s_used = -1;
        for (std::size_t s = 0; s < schedule.size(); ++s) {
            if (schedule[s] < j) s_used = static_cast<int>(s);
        }
        if (s_used < 0) continue;
        ++per_j_count;
        const int m0 = schedule[static_cast<std::size_t>(s_used)];
        const int col = j - m0 - 1;  // position of j inside the remaining block
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const Cell& cell = cells[m][static_cast<std::size_t>(s_used)];
            const Eigen::VectorXd err =
                actuals.col(j - 1) - cell.forecast.col(col);
            const double mafe_j = err.cwiseAbs().mean();
            const double msfe_j = err.array().square().mean();
            per_j_rows.push_back({methods[m].label, "mafe", j, mafe_j});
            per_j_rows.push_back({methods[m].label, "msfe", j, msfe_j});
            summaries[m].mafe_j += mafe_j;
            summaries[m].msfe_j += msfe_j;
            if (config.intervals) {
                double is = 0.0;
                for (int kappa = 0; kappa < q; ++kappa) {
                    is += interval_score(cell.lower(kappa, col), cell.upper(kappa, col),
                                         actuals(kappa, j - 1), config.alpha);
                }
                is /= static_cast<double>(q);
                per_j_rows.push_back({methods[m].label, "interval_score", j, is});
                summaries[m].is_j += is;
            }
        }
    }
    if (per_j_count > 0) {
        for (auto& s : summaries) {
            s.mafe_j /= per_j_count;
            s.msfe_j /= per_j_count;
            s.is_j /= per_j_count;
        }
    }

    detail::OutputTracker tracker(resolve_output_dir(config));
    const std::string per_m0_path = tracker.path("update_per_m0.csv");
    detail::write_tidy_csv(per_m0_path, "m0", per_m0_rows);
    tracker.note(per_m0_path);
    const std::string per_j_path = tracker.path("update_per_j.csv");
    detail::write_tidy_csv(per_j_path, "j", per_j_rows);
    tracker.note(per_j_path);

    nlohmann::json summary;
    summary["fpca"] = config.robust ? "robust" : "standard";
    summary["n"] = n;
    summary["q"] = q;
    summary["m0_schedule"] = schedule;
    summary["alpha"] = config.alpha;
    summary["B"] = config.B;
    summary["seed"] = config.seed;
    summary["intervals"] = config.intervals;
    nlohmann::json per_method = nlohmann::json::array();
    for (std::size_t m = 0; m < methods.size(); ++m) {
        nlohmann::json entry;
        entry["method"] = methods[m].label;
        entry["avg_mafe_over_m0"] = summaries[m].mafe_m0;
        entry["avg_msfe_over_m0"] = summaries[m].msfe_m0;
        entry["avg_mafe_over_j"] = summaries[m].mafe_j;
        entry["avg_msfe_over_j"] = summaries[m].msfe_j;
        if (config.intervals) {
            entry["avg_interval_score_over_m0"] = summaries[m].is_m0;
            entry["avg_interval_score_over_j"] = summaries[m].is_j;
        }
        per_method.push_back(entry);
    }
    summary["methods"] = per_method;
    const std::string summary_path = tracker.path("update_summary.json");
    detail::write_text(summary_path, summary.dump(2) + "\n");
    tracker.note(summary_path);

    RunResult result;
    result.written = tracker.commit();
    return result;
}

}  // namespace curvecast
