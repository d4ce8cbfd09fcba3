#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvecast/scorecast.hpp"
#include "curvecast/sim.hpp"

namespace curvecast {

/// Every knob of a run, loadable from a flat key=value file with
/// command-line overrides applied on top (flags win). One config plus one
/// seed fully determines every emitted byte.
struct RunConfig {
    // input / output
    std::string input;
    std::string output_dir;

    // grid of one day
    int p = 48;
    double support_start = 0.0;
    double support_end = 24.0;

    // variance-stabilizing transform
    bool sqrt_transform = true;

    // decomposition and score model
    double delta = 0.9;
    bool robust = false;
    double robust_lambda = 2.33;
    Forecaster forecaster = Forecaster::var;

    // updating
    std::vector<std::string> methods{"ts", "bm", "flr"};
    std::vector<int> m0_schedule;  // empty: 2..p-1

    // intervals and evaluation
    double alpha = 0.2;
    int B = 1000;
    int q = 72;
    bool intervals = true;
    int min_train = 20;
    int max_lag = 20;

    // simulation study
    int reps = 1000;
    int sim_n = 500;
    std::vector<int> levels{0, 1, 2, 3, 4, 5, 10, 15, 20, 25};
    ContaminationMode contamination_mode = ContaminationMode::scores;

    // evaluate subcommand inputs
    std::string actual_path;
    std::string forecast_path;
    std::string lower_path;
    std::string upper_path;

    std::uint64_t seed = 42;
    int threads = 1;

    /// Parses `key = value` lines; '#' starts a comment; unknown keys are an
    /// error.
    static RunConfig from_file(const std::string& path);

    /// Applies one key/value pair (same keys as the config file).
    void set(const std::string& key, const std::string& value);

    FpcaOptions fpca_options() const;
    ForecasterConfig forecaster_config() const;

    void validate_common() const;
};

std::vector<int> parse_int_list(const std::string& text);
Forecaster parse_forecaster(const std::string& text);
ContaminationMode parse_contamination_mode(const std::string& text);

/// Output directory resolution: explicit config value, else the
/// CURVECAST_OUTDIR environment variable, else "./curvecast_out".
std::string resolve_output_dir(const RunConfig& config);

}  // namespace curvecast
