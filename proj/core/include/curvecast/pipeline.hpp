#pragma once

#include <string>
#include <vector>

#include "curvecast/config.hpp"

namespace curvecast {

struct RunResult {
    std::vector<std::string> written;
};

/// Rolling-origin one-step evaluation of the whole-day forecaster over the
/// last q curves: accuracy report, per-day interval files, functional-ACF
/// diagnostic of the final fit's residual functions. Partially written
/// output is removed when a stage fails.
RunResult run_forecast(const RunConfig& config);

/// Intraday updating experiment: for each holdout day and each m0 in the
/// schedule, point (and optionally interval) forecasts of the remaining
/// support per method, aggregated per grid point and per m0.
RunResult run_update(const RunConfig& config);

/// Replication study producing the contamination and forecaster comparison
/// tables.
RunResult run_simulation(const RunConfig& config);

/// Scores externally produced forecast (and interval) matrices against an
/// actuals matrix.
RunResult run_evaluate(const RunConfig& config);

/// Functional autocorrelation of a curve matrix.
RunResult run_acf(const RunConfig& config);

}  // namespace curvecast
