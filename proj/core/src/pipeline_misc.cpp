#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvecast/eval.hpp"
#include "curvecast/io.hpp"
#include "curvecast/pipeline.hpp"
#include "pipeline_detail.hpp"

namespace curvecast {

namespace detail {

OutputTracker::OutputTracker(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    }
}

OutputTracker::~OutputTracker() {
    if (committed_) return;
    for (const auto& f : written_) {
        std::error_code ec;
        std::filesystem::remove(f, ec);
    }
}

std::string OutputTracker::path(const std::string& name) {
    const std::filesystem::path full = dir_ / name;
    std::error_code ec;
    std::filesystem::create_directories(full.parent_path(), ec);
    return full.string();
}

void OutputTracker::note(const std::string& full_path) { written_.push_back(full_path); }

std::vector<std::string> OutputTracker::commit() {
    committed_ = true;
    return written_;
}

FunctionalTimeSeries load_curves(const RunConfig& config) {
    if (config.input.empty()) throw std::invalid_argument("no input file configured");
    const Grid grid = Grid::equispaced(config.p, config.support_start, config.support_end);

    // peek at the first non-blank line to decide between wide and long form
    std::ifstream in(config.input);
    if (!in) throw std::runtime_error("cannot open input '" + config.input + "'");
    std::string line;
    int fields = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        fields = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
        break;
    }
    in.close();

    FunctionalTimeSeries fts;
    if (fields == config.p && config.p >= 3) {
        fts = read_fts_csv(config.input, grid);
    } else {
        fts = segment(ingest_series(config.input), grid);
    }
    if (config.sqrt_transform) fts = sqrt_transform(fts);
    return fts;
}

Eigen::MatrixXd rolling_score_errors(const Eigen::MatrixXd& scores,
                                     const ForecasterConfig& config, int min_train) {
    if (config.kind == Forecaster::var) {
        return insample_score_errors(scores, config, min_train);
    }
    // orders per component from the full history, coefficients refit per origin
    const int K = static_cast<int>(scores.cols());
    std::vector<ArimaOrder> orders(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        orders[static_cast<std::size_t>(k)] = fit_auto_arima(scores.col(k)).order;
    }
    return insample_score_errors_with(
        scores, min_train, [&](const Eigen::MatrixXd& history) -> Eigen::RowVectorXd {
            Eigen::RowVectorXd forecast(K);
            for (int k = 0; k < K; ++k) {
                const ArimaModel model =
                    fit_arima(history.col(k), orders[static_cast<std::size_t>(k)]);
                forecast[k] = forecast_arima(model, 1).point[0];
            }
            return forecast;
        });
}

void write_tidy_csv(const std::string& path, const std::string& index_name,
                    const std::vector<TidyRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "method,metric," << index_name << ",value\n";
    for (const auto& row : rows) {
        out << row.method << ',' << row.metric << ',' << row.index << ','
            << format_double(row.value) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_interval_csv(const std::string& path, const Eigen::VectorXd& t,
                        const Eigen::VectorXd& point, const PointwiseInterval& interval) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "t,point,lower,upper,level\n";
    for (Eigen::Index j = 0; j < t.size(); ++j) {
        out << format_double(t[j]) << ',' << format_double(point[j]) << ','
            << format_double(interval.lower[j]) << ',' << format_double(interval.upper[j]) << ','
            << format_double(interval.level) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string method_label(const std::string& family, Forecaster forecaster) {
    if (family == "flr") return "flr";
    return family + (forecaster == Forecaster::var ? "-var" : "-arima");
}

}  // namespace detail

RunResult run_evaluate(const RunConfig& config) {
    config.validate_common();
    if (config.actual_path.empty() || config.forecast_path.empty()) {
        throw std::invalid_argument("evaluate: both actual and forecast paths are required");
    }
    const Eigen::MatrixXd actuals = read_matrix_csv(config.actual_path);
    const Eigen::MatrixXd forecasts = read_matrix_csv(config.forecast_path);
    AccuracyReport report = mafe_msfe(actuals, forecasts, "external");

    const bool with_intervals = !config.lower_path.empty() && !config.upper_path.empty();
    if (with_intervals) {
        const Eigen::MatrixXd lower = read_matrix_csv(config.lower_path);
        const Eigen::MatrixXd upper = read_matrix_csv(config.upper_path);
        report.mean_interval_score = mean_interval_score(lower, upper, actuals, config.alpha);
        report.avg_interval_score = report.mean_interval_score.mean();
    }

    detail::OutputTracker tracker(resolve_output_dir(config));
    std::vector<detail::TidyRow> rows;
    for (Eigen::Index j = 0; j < report.mafe.size(); ++j) {
        rows.push_back({report.method, "mafe", static_cast<int>(j + 1), report.mafe[j]});
        rows.push_back({report.method, "msfe", static_cast<int>(j + 1), report.msfe[j]});
        if (with_intervals) {
            rows.push_back({report.method, "interval_score", static_cast<int>(j + 1),
                            report.mean_interval_score[j]});
        }
    }
    const std::string csv_path = tracker.path("evaluation_report.csv");
    detail::write_tidy_csv(csv_path, "j", rows);
    tracker.note(csv_path);

    nlohmann::json j;
    j["method"] = report.method;
    j["q"] = report.q;
    j["avg_mafe"] = report.avg_mafe;
    j["avg_msfe"] = report.avg_msfe;
    if (with_intervals) j["avg_interval_score"] = report.avg_interval_score;
    const std::string json_path = tracker.path("evaluation_report.json");
    detail::write_text(json_path, j.dump(2) + "\n");
    tracker.note(json_path);

    RunResult result;
    result.written = tracker.commit();
    return result;
}

RunResult run_acf(const RunConfig& config) {
    config.validate_common();
    if (config.input.empty()) throw std::invalid_argument("acf: input path is required");
    const Eigen::MatrixXd curves = read_matrix_csv(config.input);

    FunctionalTimeSeries fts;
    fts.grid = Grid::equispaced(static_cast<int>(curves.cols()), 0.0,
                                static_cast<double>(curves.cols()));
    fts.curves = curves;

    const int max_lag = std::min(config.max_lag, fts.n() - 1);
    if (max_lag < 1) throw std::invalid_argument("acf: need at least 2 curves");
    const FunctionalAcf acf = functional_acf(fts, max_lag);

    detail::OutputTracker tracker(resolve_output_dir(config));
    std::ostringstream out;
    out << "lag,rho,critical_value\n";
    for (int lag = 1; lag <= max_lag; ++lag) {
        out << lag << ',' << format_double(acf.rho[lag - 1]) << ','
            << format_double(acf.critical_value) << '\n';
    }
    const std::string path = tracker.path("facf.csv");
    detail::write_text(path, out.str());
    tracker.note(path);

    RunResult result;
    result.written = tracker.commit();
    return result;
}

}  // namespace curvecast
