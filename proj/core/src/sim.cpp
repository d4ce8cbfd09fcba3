#include "curvecast/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "curvecast/parallel.hpp"

namespace curvecast {

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

double Var2Spec::companion_spectral_radius() const {
    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion.block<2, 2>(0, 0) = lag1;
    companion.block<2, 2>(0, 2) = lag2;
    companion.block<2, 2>(2, 0) = Eigen::Matrix2d::Identity();
    return companion.eigenvalues().cwiseAbs().maxCoeff();
}

void Var2Spec::validate() const {
    if (n < 1) throw std::invalid_argument("Var2Spec: n must be >= 1");
    if (burn_in < 0) throw std::invalid_argument("Var2Spec: burn_in must be >= 0");
    const double radius = companion_spectral_radius();
    if (!(radius < 1.0)) {
        throw std::invalid_argument("Var2Spec: process is not stationary (spectral radius " +
                                    std::to_string(radius) + ")");
    }
    const Eigen::LLT<Eigen::Matrix2d> llt(noise_cov);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("Var2Spec: innovation covariance is not positive definite");
    }
}

Eigen::Vector2d Var2Spec::stationary_mean() const {
    return (Eigen::Matrix2d::Identity() - lag1 - lag2).lu().solve(intercept);
}

Eigen::MatrixXd simulate_var2(const Var2Spec& spec, Rng& rng) {
    spec.validate();
    const Eigen::Matrix2d factor = Eigen::LLT<Eigen::Matrix2d>(spec.noise_cov).matrixL();
    Eigen::Vector2d prev1 = spec.stationary_mean();
    Eigen::Vector2d prev2 = prev1;

    Eigen::MatrixXd out(spec.n, 2);
    for (int i = -spec.burn_in; i < spec.n; ++i) {
        const Eigen::Vector2d noise =
            factor * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
        const Eigen::Vector2d value = spec.intercept + spec.lag1 * prev1 + spec.lag2 * prev2 + noise;
        prev2 = prev1;
        prev1 = value;
        if (i >= 0) out.row(i) = value.transpose();
    }
    return out;
}

Eigen::MatrixXd simulate_var2(const Var2Spec& spec, std::uint64_t seed) {
    Rng rng(seed);
    return simulate_var2(spec, rng);
}

Grid sim_grid() {
    // 51 equispaced points covering [-1,1]; on this right-closed grid the
    // two basis functions are exactly orthogonal with equal quadrature norms
    return Grid::equispaced(51, -1.0, 1.0);
}

FunctionalTimeSeries synthesize_curves(const Eigen::MatrixXd& scores) {
    if (scores.cols() != 2) {
        throw std::invalid_argument("synthesize_curves: scores must have 2 columns");
    }
    FunctionalTimeSeries fts;
    fts.grid = sim_grid();
    Eigen::MatrixXd basis(2, fts.grid.p);
    for (int j = 0; j < fts.grid.p; ++j) {
        basis(0, j) = std::sin(2.0 * std::numbers::pi * fts.grid.points[j]);
        basis(1, j) = std::cos(2.0 * std::numbers::pi * fts.grid.points[j]);
    }
    fts.curves = scores * basis;
    return fts;
}

void contaminate_scores(Eigen::MatrixXd& scores, const std::vector<int>& order, int count,
                        double offset) {
    if (count < 0 || count > static_cast<int>(order.size())) {
        throw std::invalid_argument("contaminate_scores: count out of range");
    }
    for (int i = 0; i < count; ++i) {
        scores.row(order[static_cast<std::size_t>(i)]).array() += offset;
    }
}

void contaminate_curves(FunctionalTimeSeries& fts, const std::vector<int>& order, int count,
                        double offset) {
    if (count < 0 || count > static_cast<int>(order.size())) {
        throw std::invalid_argument("contaminate_curves: count out of range");
    }
    for (int i = 0; i < count; ++i) {
        fts.curves.row(order[static_cast<std::size_t>(i)]).array() += offset;
    }
}

FunctionalTimeSeries synthesize_curves(const Eigen::MatrixXd& scores,
                                       const ContaminationSpec& contamination, Rng& rng) {
    const int n = static_cast<int>(scores.rows());
    if (contamination.count > n) {
        throw std::invalid_argument("synthesize_curves: contamination count " +
                                    std::to_string(contamination.count) + " exceeds n=" +
                                    std::to_string(n));
    }
    if (contamination.mode == ContaminationMode::none || contamination.count == 0) {
        return synthesize_curves(scores);
    }
    const std::vector<int> order = rng.permutation(n);
    if (contamination.mode == ContaminationMode::scores) {
        Eigen::MatrixXd contaminated = scores;
        contaminate_scores(contaminated, order, contamination.count, contamination.offset);
        return synthesize_curves(contaminated);
    }
    FunctionalTimeSeries fts = synthesize_curves(scores);
    contaminate_curves(fts, order, contamination.count, contamination.offset);
    return fts;
}

std::vector<SimMethod> default_sim_methods(const std::vector<int>& levels) {
    return {
        SimMethod{"fpca_var", false, Forecaster::var, levels},
        SimMethod{"robust_var", true, Forecaster::var, levels},
        SimMethod{"fpca_arima", false, Forecaster::arima, {0}},
    };
}

const SimCell& SimTable::cell(const std::string& label, int level) const {
    for (std::size_t m = 0; m < methods.size(); ++m) {
        if (methods[m].label != label) continue;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (levels[l] == level && cells[m][l].present) return cells[m][l];
        }
    }
    throw std::invalid_argument("SimTable: no cell for method '" + label + "' at level " +
                                std::to_string(level));
}

SimTable replication_study(const ReplicationConfig& config) {
    if (config.reps < 1) throw std::invalid_argument("replication_study: reps must be >= 1");
    if (config.n < 10) throw std::invalid_argument("replication_study: n must be >= 10");

    SimTable table;
    table.methods = config.methods.empty()
                        ? default_sim_methods({0, 1, 2, 3, 4, 5, 10, 15, 20, 25})
                        : config.methods;

    std::set<int> level_set;
    for (const auto& method : table.methods) {
        for (int level : method.levels) {
            if (level < 0 || level > config.n) {
                throw std::invalid_argument("replication_study: contamination count " +
                                            std::to_string(level) + " outside [0, n=" +
                                            std::to_string(config.n) + "]");
            }
            level_set.insert(level);
        }
    }
    table.levels.assign(level_set.begin(), level_set.end());

    const std::size_t n_methods = table.methods.size();
    const std::size_t n_levels = table.levels.size();
    // per (method, level): one mafe and msfe slot per replication
    std::vector<std::vector<Eigen::VectorXd>> mafe(n_methods), msfe(n_methods);
    for (std::size_t m = 0; m < n_methods; ++m) {
        mafe[m].assign(n_levels, Eigen::VectorXd::Constant(config.reps,
                                                           std::numeric_limits<double>::quiet_NaN()));
        msfe[m] = mafe[m];
    }

    Var2Spec process = config.process;
    process.n = config.n + 1;

    parallel_for(static_cast<std::size_t>(config.reps), config.threads, [&](std::size_t rep) {
        try {
            Rng data_rng(derive_seed(config.seed, 2 * rep));
            Rng contam_rng(derive_seed(config.seed, 2 * rep + 1));

            const Eigen::MatrixXd scores = simulate_var2(process, data_rng);
            const FunctionalTimeSeries clean = synthesize_curves(scores);
            const Eigen::VectorXd test_curve = clean.curves.row(config.n).transpose();
            const std::vector<int> order = contam_rng.permutation(config.n);

            for (std::size_t l = 0; l < n_levels; ++l) {
                const int count = table.levels[l];

                FunctionalTimeSeries train;
                train.grid = clean.grid;
                if (config.mode == ContaminationMode::scores && count > 0) {
                    Eigen::MatrixXd contaminated = scores.topRows(config.n);
                    contaminate_scores(contaminated, order, count, config.offset);
                    train = synthesize_curves(contaminated);
                } else {
                    train.curves = clean.curves.topRows(config.n);
                    if (config.mode == ContaminationMode::curves && count > 0) {
                        contaminate_curves(train, order, count, config.offset);
                    }
                }

                for (std::size_t m = 0; m < n_methods; ++m) {
                    const SimMethod& method = table.methods[m];
                    if (std::find(method.levels.begin(), method.levels.end(), count) ==
                        method.levels.end()) {
                        continue;
                    }
                    FpcaOptions options;
                    options.delta = config.delta;
                    options.robust = method.robust;
                    const FpcaModel model = fit_fpca(train, options);
                    Eigen::VectorXd forecast;
                    if (model.K == 0) {
                        forecast = model.mean;
                    } else {
                        const Eigen::MatrixXd score_forecast = forecast_scores(
                            model.scores, ForecasterConfig{method.forecaster, 5}, 1);
                        forecast = ts_forecast_curve(model, score_forecast.row(0).transpose());
                    }
                    const Eigen::VectorXd err = test_curve - forecast;
                    mafe[m][l][static_cast<Eigen::Index>(rep)] = err.cwiseAbs().mean();
                    msfe[m][l][static_cast<Eigen::Index>(rep)] = err.array().square().mean();
                }
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("replication " + std::to_string(rep + 1) +
                                     " failed: " + e.what());
        }
    });

    table.cells.assign(n_methods, std::vector<SimCell>(n_levels));
    for (std::size_t m = 0; m < n_methods; ++m) {
        for (std::size_t l = 0; l < n_levels; ++l) {
            const SimMethod& method = table.methods[m];
            if (std::find(method.levels.begin(), method.levels.end(), table.levels[l]) ==
                method.levels.end()) {
                continue;
            }
            std::vector<double> ma(mafe[m][l].data(), mafe[m][l].data() + config.reps);
            std::vector<double> ms(msfe[m][l].data(), msfe[m][l].data() + config.reps);
            SimCell& cell = table.cells[m][l];
            cell.median_mafe = median_of(ma);
            cell.median_msfe = median_of(ms);
            cell.mean_mafe = mafe[m][l].mean();
            cell.mean_msfe = msfe[m][l].mean();
            cell.present = true;
        }
    }
    return table;
}

}  // namespace curvecast
