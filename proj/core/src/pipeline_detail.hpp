#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "curvecast/config.hpp"
#include "curvecast/series.hpp"
#include "curvecast/uncertainty.hpp"

namespace curvecast::detail {

/// Collects the files a runner writes; unless commit() is reached, the
/// destructor removes them so failed runs leave no partial output behind.
class OutputTracker {
public:
    explicit OutputTracker(const std::string& dir);
    ~OutputTracker();

    OutputTracker(const OutputTracker&) = delete;
    OutputTracker& operator=(const OutputTracker&) = delete;

    std::string path(const std::string& name);
    void note(const std::string& full_path);
    std::vector<std::string> commit();

private:
    std::filesystem::path dir_;
    std::vector<std::string> written_;
    bool committed_ = false;
};

/// Loads the input as curves: wide matrices (p columns) directly, long
/// univariate files segmented on the configured grid; applies the square
/// root transform when configured.
FunctionalTimeSeries load_curves(const RunConfig& config);

/// One-step score forecaster for the rolling in-sample error protocol. The
/// VAR variant refits (including order choice) at every origin; the ARIMA
/// variant fixes per-component orders chosen on the full history and
/// re-estimates coefficients per origin.
Eigen::MatrixXd rolling_score_errors(const Eigen::MatrixXd& scores,
                                     const ForecasterConfig& config, int min_train);

struct TidyRow {
    std::string method;
    std::string metric;
    int index = 0;  // grid point j, m0, or lag depending on the table
    double value = 0.0;
};

void write_tidy_csv(const std::string& path, const std::string& index_name,
                    const std::vector<TidyRow>& rows);

void write_interval_csv(const std::string& path, const Eigen::VectorXd& t,
                        const Eigen::VectorXd& point, const PointwiseInterval& interval);

void write_text(const std::string& path, const std::string& text);

std::string method_label(const std::string& family, Forecaster forecaster);

}  // namespace curvecast::detail
