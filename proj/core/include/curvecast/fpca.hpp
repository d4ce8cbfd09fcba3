#pragma once

#include <string>

#include <Eigen/Dense>

#include "curvecast/series.hpp"

namespace curvecast {

/// Truncated Karhunen-Loeve decomposition of a functional time series.
///
/// For every curve i, mean + scores.row(i) * eigenfunctions^T + residuals.row(i)
/// reproduces the curve exactly. Eigenfunctions are orthonormal under the
/// grid quadrature inner product; eigenvalues carry the full spectrum
/// (clamped at zero) so truncation identities can be checked at any order.
struct FpcaModel {
    Grid grid;
    Eigen::VectorXd mean;            // length p
    Eigen::VectorXd eigenvalues;     // length p, nonincreasing, >= 0
    Eigen::MatrixXd eigenfunctions;  // p x K
    int K = 0;
    Eigen::MatrixXd scores;     // n x K
    Eigen::MatrixXd residuals;  // n x p
    Eigen::VectorXd weights;    // n, in {0,1}; all ones for the standard fit

    int n() const { return static_cast<int>(scores.rows()); }
};

/// Tuning for the two-step robust fit.
struct RobustConfig {
    double lambda = 2.33;
    enum class Init { spherical, standard } init = Init::spherical;
};

struct FpcaOptions {
    double delta = 0.9;  // explained-variance target for choosing K
    int fixed_K = 0;     // > 0 overrides delta
    bool robust = false;
    RobustConfig robust_cfg;
};

/// Smallest K whose leading eigenvalues explain at least fraction delta of
/// the positive spectrum. Zero when nothing is positive.
int select_K(const Eigen::VectorXd& eigenvalues, double delta);

/// Standard FPCA with K picked by select_K at level delta.
FpcaModel empirical_fpca(const FunctionalTimeSeries& fts, double delta);

/// Standard FPCA with a caller-fixed component count.
FpcaModel empirical_fpca_fixed(const FunctionalTimeSeries& fts, int K);

/// Two-step robust FPCA: a bounded-influence initial fit (spherical PCA
/// around the L1-median) flags curves whose integrated squared error exceeds
/// s + lambda*sqrt(s), s the median; the final fit is standard FPCA on the
/// retained curves. Scores and residuals are computed for all n curves
/// against the final basis.
FpcaModel robust_fpca(const FunctionalTimeSeries& fts, double delta,
                      const RobustConfig& cfg = {});

/// Dispatch on options (standard / robust / fixed K).
FpcaModel fit_fpca(const FunctionalTimeSeries& fts, const FpcaOptions& options);

/// Rows mean + sum_{k<=K'} score_k * phi_k, for 0 <= K' <= model.K.
FunctionalTimeSeries reconstruct(const FpcaModel& model, int K_prime);

/// Binary down-weighting rule: weight 1 iff v_i < s + lambda*sqrt(s) with s
/// the median of v (curves at exactly v=0 are kept when s=0).
Eigen::VectorXd robust_weights(const Eigen::VectorXd& v, double lambda);

/// Coordinatewise curve minimizing the sum of quadrature-norm distances
/// (Weiszfeld iteration, tolerance 1e-10, at most 500 iterations).
Eigen::VectorXd l1_median(const FunctionalTimeSeries& fts);

/// JSON export (grid, mean, spectrum, basis, K, weights; scores and
/// residuals behind a flag).
std::string fpca_to_json(const FpcaModel& model, bool include_scores = false,
                         bool include_residuals = false);

}  // namespace curvecast
