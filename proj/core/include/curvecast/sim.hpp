#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvecast/rng.hpp"
#include "curvecast/scorecast.hpp"
#include "curvecast/series.hpp"

namespace curvecast {

/// Two-dimensional VAR(2) score generator used by the replication studies.
/// Defaults are the study process; stationarity (companion spectral radius
/// below one) is checked by validate().
struct Var2Spec {
    Eigen::Vector2d intercept{10.0, 5.0};
    Eigen::Matrix2d lag1{{0.5, 0.2}, {-0.2, -0.5}};
    Eigen::Matrix2d lag2{{-0.3, -0.7}, {-0.1, 0.3}};
    Eigen::Matrix2d noise_cov{{1.0, 0.2}, {0.2, 1.0}};
    int n = 500;
    int burn_in = 200;

    void validate() const;
    Eigen::Vector2d stationary_mean() const;
    double companion_spectral_radius() const;
};

/// Simulates spec.n rows of the process, Gaussian innovations through a
/// Cholesky factor of the covariance, burn-in discarded, deterministic for a
/// fixed seed.
Eigen::MatrixXd simulate_var2(const Var2Spec& spec, std::uint64_t seed);
Eigen::MatrixXd simulate_var2(const Var2Spec& spec, Rng& rng);

enum class ContaminationMode { none, scores, curves };

struct ContaminationSpec {
    ContaminationMode mode = ContaminationMode::none;
    int count = 0;
    double offset = 10.0;
};

/// 51 equispaced points covering [-1, 1].
Grid sim_grid();

/// Curves beta_1 * sin(2*pi*t) + beta_2 * cos(2*pi*t) on the sim grid.
FunctionalTimeSeries synthesize_curves(const Eigen::MatrixXd& scores);

/// Same, with additive +offset contamination of `count` randomly chosen
/// observations, applied to score rows before synthesis or to whole curves
/// after it depending on the mode.
FunctionalTimeSeries synthesize_curves(const Eigen::MatrixXd& scores,
                                       const ContaminationSpec& contamination, Rng& rng);

/// Adds `offset` to both components of the first `count` rows named by
/// `order` (a permutation), so growing counts give nested outlier sets.
void contaminate_scores(Eigen::MatrixXd& scores, const std::vector<int>& order, int count,
                        double offset);
void contaminate_curves(FunctionalTimeSeries& fts, const std::vector<int>& order, int count,
                        double offset);

struct SimMethod {
    std::string label;
    bool robust = false;
    Forecaster forecaster = Forecaster::var;
    std::vector<int> levels;  // contamination counts this method is run at
};

struct ReplicationConfig {
    int reps = 1000;
    int n = 500;  // training curves; one extra clean curve is the test sample
    ContaminationMode mode = ContaminationMode::scores;
    double offset = 10.0;
    double delta = 0.9;
    std::uint64_t seed = 42;
    int threads = 1;
    Var2Spec process;
    std::vector<SimMethod> methods;  // defaults filled when empty
};

/// Default method set: standard and robust FPCA with the VAR forecaster over
/// `levels`, plus standard FPCA with the ARIMA forecaster at level 0.
std::vector<SimMethod> default_sim_methods(const std::vector<int>& levels);

struct SimCell {
    double median_mafe = 0.0;
    double median_msfe = 0.0;
    double mean_mafe = 0.0;
    double mean_msfe = 0.0;
    bool present = false;
};

struct SimTable {
    std::vector<int> levels;
    std::vector<SimMethod> methods;
    std::vector<std::vector<SimCell>> cells;  // [method][level index]

    const SimCell& cell(const std::string& label, int level) const;
};

/// Per replication: simulate n+1 curves, contaminate only the first n,
/// fit each method on those, one-step forecast, score against the clean
/// held-out curve over the grid. Replications share data across levels and
/// methods (common random numbers, nested outlier sets); medians and means
/// are reported per cell. A failed replication aborts the study with its
/// index.
SimTable replication_study(const ReplicationConfig& config);

}  // namespace curvecast
