#include "curvecast/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvecast/io.hpp"

namespace curvecast {

namespace {

struct Spectrum {
    Eigen::VectorXd eigenvalues;     // length p, descending, clamped at 0
    Eigen::MatrixXd eigenfunctions;  // p x p, quadrature-orthonormal columns
};

/// Eigendecomposition of dt * C for a p x p covariance matrix C. Columns are
/// rescaled by 1/sqrt(dt) so they are orthonormal under <x,y> = dt*x.y, and
/// signed so each column's entry of largest magnitude is positive.
Spectrum decompose(const Eigen::MatrixXd& covariance, const Grid& grid) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance * grid.dt);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("fpca: eigendecomposition failed");
    }
    const int p = grid.p;
    Spectrum s;
    s.eigenvalues.resize(p);
    s.eigenfunctions.resize(p, p);
    const double scale = 1.0 / std::sqrt(grid.dt);
    for (int k = 0; k < p; ++k) {
        const int src = p - 1 - k;  // solver returns ascending order
        s.eigenvalues[k] = std::max(solver.eigenvalues()[src], 0.0);
        Eigen::VectorXd phi = solver.eigenvectors().col(src) * scale;
        int arg = 0;
        phi.cwiseAbs().maxCoeff(&arg);
        if (phi[arg] < 0.0) phi = -phi;
        s.eigenfunctions.col(k) = phi;
    }
    // eigenvalues at floating-noise level are zero rank directions; keeping
    // them out of K stops zero-variance score columns reaching the
    // regressions downstream
    const double floor = 1e-12 * s.eigenvalues[0];
    for (int k = 0; k < p; ++k) {
        if (s.eigenvalues[k] < floor) s.eigenvalues[k] = 0.0;
    }
    return s;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& centered) {
    return centered.transpose() * centered / static_cast<double>(centered.rows());
}

FpcaModel assemble(const FunctionalTimeSeries& fts, const Eigen::VectorXd& mean,
                   const Spectrum& spectrum, int K, const Eigen::VectorXd& weights) {
    FpcaModel model;
    model.grid = fts.grid;
    model.mean = mean;
    model.eigenvalues = spectrum.eigenvalues;
    model.K = K;
    model.eigenfunctions = spectrum.eigenfunctions.leftCols(K);
    const Eigen::MatrixXd centered = fts.curves.rowwise() - mean.transpose();
    model.scores = centered * model.eigenfunctions * fts.grid.dt;
    model.residuals = centered - model.scores * model.eigenfunctions.transpose();
    model.weights = weights;
    return model;
}

FpcaModel standard_fit(const FunctionalTimeSeries& fts, double delta, int fixed_K) {
    fts.validate();
    if (fts.n() < 2) {
        throw std::invalid_argument("empirical_fpca: need at least 2 curves, got " +
                                    std::to_string(fts.n()));
    }
    const Eigen::VectorXd mean = mean_function(fts);
    const Eigen::MatrixXd centered = fts.curves.rowwise() - mean.transpose();
    const Spectrum spectrum = decompose(sample_covariance(centered), fts.grid);

    int K = fixed_K > 0 ? fixed_K : select_K(spectrum.eigenvalues, delta);
    if (K > fts.grid.p) {
        throw std::invalid_argument("empirical_fpca: K exceeds grid size");
    }
    return assemble(fts, mean, spectrum, K, Eigen::VectorXd::Ones(fts.n()));
}

}  // namespace

int select_K(const Eigen::VectorXd& eigenvalues, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("select_K: delta must lie in (0,1]");
    }
    double total = 0.0;
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
        if (eigenvalues[k] > 0.0) total += eigenvalues[k];
    }
    if (total <= 0.0) return 0;
    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
        cumulative += std::max(eigenvalues[k], 0.0);
        if (cumulative >= delta * total - 1e-12 * total) {
            return static_cast<int>(k + 1);
        }
    }
    return static_cast<int>(eigenvalues.size());
}

FpcaModel empirical_fpca(const FunctionalTimeSeries& fts, double delta) {
    return standard_fit(fts, delta, 0);
}

FpcaModel empirical_fpca_fixed(const FunctionalTimeSeries& fts, int K) {
    if (K < 0) throw std::invalid_argument("empirical_fpca_fixed: K must be >= 0");
    FpcaModel model = standard_fit(fts, 1.0, K);
    if (K == 0) {
        // select_K path is bypassed; force the empty basis explicitly
        model.K = 0;
        model.eigenfunctions.resize(fts.grid.p, 0);
        model.scores.resize(fts.n(), 0);
        model.residuals = fts.curves.rowwise() - model.mean.transpose();
    }
    return model;
}

Eigen::VectorXd robust_weights(const Eigen::VectorXd& v, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("robust_weights: lambda must be > 0");
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n == 0) throw std::invalid_argument("robust_weights: empty input");
    const double s = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    Eigen::VectorXd w(v.size());
    if (s == 0.0) {
        // exact-rank data: every curve reproduced perfectly is kept
        for (Eigen::Index i = 0; i < v.size(); ++i) w[i] = v[i] <= 0.0 ? 1.0 : 0.0;
        return w;
    }
    const double threshold = s + lambda * std::sqrt(s);
    for (Eigen::Index i = 0; i < v.size(); ++i) w[i] = v[i] < threshold ? 1.0 : 0.0;
    return w;
}

Eigen::VectorXd l1_median(const FunctionalTimeSeries& fts) {
    fts.validate();
    const Eigen::MatrixXd& X = fts.curves;
    const int n = fts.n();

    // start from the coordinatewise median
    Eigen::VectorXd m(fts.p());
    std::vector<double> column(static_cast<std::size_t>(n));
    for (int j = 0; j < fts.p(); ++j) {
        for (int i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = X(i, j);
        std::nth_element(column.begin(), column.begin() + n / 2, column.end());
        double med = column[static_cast<std::size_t>(n / 2)];
        if (n % 2 == 0) {
            std::nth_element(column.begin(), column.begin() + n / 2 - 1, column.end());
            med = 0.5 * (med + column[static_cast<std::size_t>(n / 2 - 1)]);
        }
        m[j] = med;
    }

    const double eps = 1e-12;
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::VectorXd numerator = Eigen::VectorXd::Zero(fts.p());
        double denominator = 0.0;
        for (int i = 0; i < n; ++i) {
            const double dist = std::max(fts.grid.norm(X.row(i).transpose() - m), eps);
            const double w = 1.0 / dist;
            numerator += w * X.row(i).transpose();
            denominator += w;
        }
        const Eigen::VectorXd next = numerator / denominator;
        const double step = fts.grid.norm(next - m);
        m = next;
        if (step <= 1e-10) break;
    }
    return m;
}

FpcaModel robust_fpca(const FunctionalTimeSeries& fts, double delta, const RobustConfig& cfg) {
    fts.validate();
    if (fts.n() < 3) {
        throw std::invalid_argument("robust_fpca: need at least 3 curves, got " +
                                    std::to_string(fts.n()));
    }

    // Step 1: bounded-influence initial components.
    Eigen::VectorXd center;
    Spectrum initial;
    if (cfg.init == RobustConfig::Init::spherical) {
        center = l1_median(fts);
        Eigen::MatrixXd projected(fts.n(), fts.p());
        for (int i = 0; i < fts.n(); ++i) {
            Eigen::VectorXd d = fts.curves.row(i).transpose() - center;
            const double norm = fts.grid.norm(d);
            if (norm > 1e-14) d /= norm;
            projected.row(i) = d.transpose();
        }
        initial = decompose(sample_covariance(projected), fts.grid);
    } else {
        center = mean_function(fts);
        const Eigen::MatrixXd centered = fts.curves.rowwise() - center.transpose();
        initial = decompose(sample_covariance(centered), fts.grid);
    }
    const int K_init = select_K(initial.eigenvalues, delta);

    // Step 2: integrated squared error of each curve against the initial fit.
    Eigen::VectorXd v(fts.n());
    const Eigen::MatrixXd basis = initial.eigenfunctions.leftCols(K_init);
    for (int i = 0; i < fts.n(); ++i) {
        const Eigen::VectorXd d = fts.curves.row(i).transpose() - center;
        const Eigen::VectorXd fitted = basis * (basis.transpose() * d * fts.grid.dt);
        v[i] = fts.grid.squared_norm(d - fitted);
    }
    const Eigen::VectorXd w = robust_weights(v, cfg.lambda);

    const int kept = static_cast<int>(w.sum());
    if (kept < 2) {
        throw std::runtime_error("robust_fpca: robust fit degenerate (" + std::to_string(kept) +
                                 " curves kept)");
    }

    // Step 3: standard FPCA on the retained subset.
    FunctionalTimeSeries subset;
    subset.grid = fts.grid;
    subset.curves.resize(kept, fts.p());
    for (int i = 0, r = 0; i < fts.n(); ++i) {
        if (w[i] == 1.0) subset.curves.row(r++) = fts.curves.row(i);
    }
    const FpcaModel subset_model = empirical_fpca(subset, delta);

    // Scores and residuals for all curves against the final basis.
    FpcaModel model;
    model.grid = fts.grid;
    model.mean = subset_model.mean;
    model.eigenvalues = subset_model.eigenvalues;
    model.eigenfunctions = subset_model.eigenfunctions;
    model.K = subset_model.K;
    const Eigen::MatrixXd centered = fts.curves.rowwise() - model.mean.transpose();
    model.scores = centered * model.eigenfunctions * fts.grid.dt;
    model.residuals = centered - model.scores * model.eigenfunctions.transpose();
    model.weights = w;
    return model;
}

FpcaModel fit_fpca(const FunctionalTimeSeries& fts, const FpcaOptions& options) {
    if (options.robust) {
        return robust_fpca(fts, options.delta, options.robust_cfg);
    }
    if (options.fixed_K > 0) {
        return empirical_fpca_fixed(fts, options.fixed_K);
    }
    return empirical_fpca(fts, options.delta);
}

FunctionalTimeSeries reconstruct(const FpcaModel& model, int K_prime) {
    if (K_prime < 0 || K_prime > model.K) {
        throw std::invalid_argument("reconstruct: K' must lie in [0, " +
                                    std::to_string(model.K) + "], got " +
                                    std::to_string(K_prime));
    }
    FunctionalTimeSeries out;
    out.grid = model.grid;
    out.curves = model.scores.leftCols(K_prime) *
                     model.eigenfunctions.leftCols(K_prime).transpose();
    out.curves.rowwise() += model.mean.transpose();
    return out;
}

std::string fpca_to_json(const FpcaModel& model, bool include_scores,
                         bool include_residuals) {
    nlohmann::json j;
    j["grid"] = {{"p", model.grid.p},
                 {"support_start", model.grid.support_start},
                 {"support_end", model.grid.support_end},
                 {"dt", model.grid.dt}};
    j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
    j["eigenvalues"] = std::vector<double>(model.eigenvalues.data(),
                                           model.eigenvalues.data() + model.eigenvalues.size());
    j["K"] = model.K;
    auto matrix_rows = [](const Eigen::MatrixXd& m) {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()),
                                              std::vector<double>(static_cast<std::size_t>(m.cols())));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = m(i, c);
            }
        }
        return rows;
    };
    // eigenfunctions serialized one row per component
    j["eigenfunctions"] = matrix_rows(model.eigenfunctions.transpose());
    j["weights"] = std::vector<double>(model.weights.data(),
                                       model.weights.data() + model.weights.size());
    if (include_scores) j["scores"] = matrix_rows(model.scores);
    if (include_residuals) j["residuals"] = matrix_rows(model.residuals);
    return j.dump(2);
}

}  // namespace curvecast
