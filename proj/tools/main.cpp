#include <deque>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "curvecast/pipeline.hpp"

namespace {

using curvecast::RunConfig;
using curvecast::RunResult;

/// Binds CLI flags to config-file keys; flags the user actually passed
/// override the file.
class ConfigBinder {
public:
    explicit ConfigBinder(CLI::App* cmd) : cmd_(cmd) {
        cmd_->add_option("--config", config_path_, "flat key = value config file");
    }

    void bind(const std::string& flag, const std::string& key, const std::string& help) {
        entries_.push_back({key, "", nullptr});
        auto& entry = entries_.back();
        entry.option = cmd_->add_option(flag, entry.value, help);
    }

    void bind_flag(const std::string& flag, const std::string& key, const std::string& set_to,
                   const std::string& help) {
        entries_.push_back({key, set_to, nullptr});
        auto& entry = entries_.back();
        entry.option = cmd_->add_flag(flag, help);
    }

    RunConfig build() const {
        RunConfig config;
        if (!config_path_.empty()) config = RunConfig::from_file(config_path_);
        for (const auto& entry : entries_) {
            if (entry.option->count() > 0) config.set(entry.key, entry.value);
        }
        return config;
    }

private:
    struct Entry {
        std::string key;
        std::string value;
        CLI::Option* option;
    };
    CLI::App* cmd_;
    std::string config_path_;
    // deque-like stability: entries are only appended and each holds its value
    mutable std::deque<Entry> entries_;
};

void bind_common(ConfigBinder& binder) {
    binder.bind("--out", "output_dir", "output directory (default $CURVECAST_OUTDIR)");
    binder.bind("--seed", "seed", "master seed");
    binder.bind("--threads", "threads", "worker pool size");
    binder.bind("--delta", "delta", "explained-variance level for choosing K (default 0.9)");
    binder.bind("--alpha", "alpha", "interval miss level (default 0.2)");
    binder.bind("--B", "B", "bootstrap replications (default 1000)");
}

void bind_data(ConfigBinder& binder) {
    binder.bind("--input", "input", "input CSV (long value/timestamp,value or wide n x p)");
    binder.bind("--p", "p", "points per curve (default 48)");
    binder.bind("--support-start", "support_start", "support start (default 0)");
    binder.bind("--support-end", "support_end", "support end (default 24)");
    binder.bind_flag("--no-sqrt", "sqrt_transform", "false",
                     "skip the square-root variance stabilization");
    binder.bind("--q", "q", "holdout length (default 72)");
    binder.bind("--forecaster", "forecaster", "score model: arima | var (default var)");
    binder.bind_flag("--robust", "robust", "true", "robust FPCA");
    binder.bind("--robust-lambda", "robust_lambda", "robust down-weighting tuning (default 2.33)");
    binder.bind("--min-train", "min_train",
                "minimum window for rolling in-sample score errors (default 20)");
    binder.bind_flag("--no-intervals", "intervals", "false", "point forecasts only");
}

int dispatch(const std::string& stage, const std::function<RunResult(const RunConfig&)>& runner,
             const RunConfig& config) {
    try {
        const RunResult result = runner(config);
        for (const auto& file : result.written) std::cout << file << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "{\"stage\":\"" << stage << "\",\"error\":\"" << e.what() << "\"}\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvecast: forecasting and intraday updating for daily curves"};
    app.require_subcommand(1);

    auto* forecast_cmd =
        app.add_subcommand("forecast", "rolling one-step whole-day forecasts over a holdout");
    ConfigBinder forecast_binder(forecast_cmd);
    bind_common(forecast_binder);
    bind_data(forecast_binder);
    forecast_binder.bind("--max-lag", "max_lag", "residual ACF lags (default 20)");

    auto* update_cmd =
        app.add_subcommand("update", "intraday updating of remaining-day forecasts");
    ConfigBinder update_binder(update_cmd);
    bind_common(update_binder);
    bind_data(update_binder);
    update_binder.bind("--method", "method",
                       "comma list of ts | bm | flr | ts-arima | ts-var | bm-arima | bm-var | all");
    update_binder.bind("--m0", "m0", "m0 schedule, e.g. 12,24,36 or 2:47 (default 2:p-1)");

    auto* simulate_cmd = app.add_subcommand("simulate", "replication study tables");
    ConfigBinder simulate_binder(simulate_cmd);
    bind_common(simulate_binder);
    simulate_binder.bind("--reps", "reps", "replications (default 1000)");
    simulate_binder.bind("--n", "sim_n", "training curves per replication (default 500)");
    simulate_binder.bind("--levels", "levels", "contamination counts (default 0,...,25)");
    simulate_binder.bind("--contamination-mode", "contamination_mode",
                         "scores | curves | none (default scores)");

    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "score external forecast matrices against actuals");
    ConfigBinder evaluate_binder(evaluate_cmd);
    bind_common(evaluate_binder);
    evaluate_binder.bind("--actual", "actual", "actual curves CSV (q x p)");
    evaluate_binder.bind("--forecast", "forecast", "forecast curves CSV (q x p)");
    evaluate_binder.bind("--lower", "lower", "interval lower bounds CSV");
    evaluate_binder.bind("--upper", "upper", "interval upper bounds CSV");

    auto* acf_cmd = app.add_subcommand("acf", "functional autocorrelation of a curve matrix");
    ConfigBinder acf_binder(acf_cmd);
    bind_common(acf_binder);
    acf_binder.bind("--input", "input", "curve matrix CSV");
    acf_binder.bind("--max-lag", "max_lag", "number of lags (default 20)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (forecast_cmd->parsed()) {
            return dispatch("forecast", curvecast::run_forecast, forecast_binder.build());
        }
        if (update_cmd->parsed()) {
            return dispatch("update", curvecast::run_update, update_binder.build());
        }
        if (simulate_cmd->parsed()) {
            return dispatch("simulate", curvecast::run_simulation, simulate_binder.build());
        }
        if (evaluate_cmd->parsed()) {
            return dispatch("evaluate", curvecast::run_evaluate, evaluate_binder.build());
        }
        if (acf_cmd->parsed()) {
            return dispatch("acf", curvecast::run_acf, acf_binder.build());
        }
    } catch (const std::exception& e) {
        std::cerr << "{\"stage\":\"config\",\"error\":\"" << e.what() << "\"}\n";
        return 1;
    }
    return 1;
}
