#include "curvecast/scorecast.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace curvecast {

namespace {

constexpr int kMaxArOrder = 5;
constexpr int kMaxMaOrder = 5;
constexpr int kMaxTotalOrder = 5;

// Difference if var(diff)/var(series) drops below this. Unit-root series land
// around 2/T, persistent-but-stationary ones well above (2(1-phi) for AR(1)),
// so the cut sits between the two regimes at the series lengths handled here.
constexpr double kDifferenceVarianceRatio = 0.05;

double sample_variance(const Eigen::VectorXd& x) {
    if (x.size() < 2) return 0.0;
    const double mean = x.mean();
    return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

Eigen::VectorXd difference(const Eigen::VectorXd& x) {
    return x.tail(x.size() - 1) - x.head(x.size() - 1);
}

/// Spectral radius of the companion matrix of z^m + c_1 z^{m-1} + ... + c_m.
double companion_radius(const Eigen::VectorXd& c) {
    const int m = static_cast<int>(c.size());
    if (m == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    companion.row(0) = -c.transpose();
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    return companion.eigenvalues().cwiseAbs().maxCoeff();
}

/// True when the AR polynomial 1 - sum phi_i z^i has all roots outside the
/// unit circle (same check serves MA invertibility with theta negated).
bool stable_poly(const Eigen::VectorXd& coef, double margin) {
    if (coef.size() == 0) return true;
    if (coef.cwiseAbs().sum() < margin) return true;  // cheap sufficient bound
    return companion_radius(-coef) < margin;
}

struct CssFit {
    double ssr = std::numeric_limits<double>::infinity();
    Eigen::VectorXd residuals;  // full length, zeros before t = p
};

CssFit css_pass(const Eigen::VectorXd& w, int p, int q, double alpha,
                const Eigen::VectorXd& ar, const Eigen::VectorXd& ma) {
    const int T = static_cast<int>(w.size());
    CssFit fit;
    fit.residuals = Eigen::VectorXd::Zero(T);
    double ssr = 0.0;
    for (int t = p; t < T; ++t) {
        double pred = alpha;
        for (int i = 1; i <= p; ++i) pred += ar[i - 1] * w[t - i];
        for (int j = 1; j <= q; ++j) {
            if (t - j >= 0) pred += ma[j - 1] * fit.residuals[t - j];
        }
        const double e = w[t] - pred;
        fit.residuals[t] = e;
        ssr += e * e;
    }
    fit.ssr = ssr;
    return fit;
}

double css_objective(const Eigen::VectorXd& w, int p, int q, const Eigen::VectorXd& params) {
    const double alpha = params[0];
    const Eigen::VectorXd ar = params.segment(1, p);
    const Eigen::VectorXd ma = params.segment(1 + p, q);
    constexpr double kStabilityMargin = 0.9999;
    if (!stable_poly(ar, kStabilityMargin)) return 1e12 * (1.0 + ar.cwiseAbs().sum());
    Eigen::VectorXd neg_ma = -ma;
    if (!stable_poly(neg_ma, kStabilityMargin)) return 1e12 * (1.0 + ma.cwiseAbs().sum());
    return css_pass(w, p, q, alpha, ar, ma).ssr;
}

/// Compact Nelder-Mead, deterministic, for the CSS surface.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& start) {
    const int dim = static_cast<int>(start.size());
    const int max_iter = 200 + 80 * dim;

    std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(dim + 1));
    std::vector<double> fx(static_cast<std::size_t>(dim + 1));
    x[0] = start;
    fx[0] = f(start);
    for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd v = start;
        v[i] += std::max(0.1, 0.1 * std::abs(start[i]));
        x[static_cast<std::size_t>(i + 1)] = v;
        fx[static_cast<std::size_t>(i + 1)] = f(v);
    }

    auto order = [&]() {
        std::vector<int> idx(x.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return fx[static_cast<std::size_t>(a)] < fx[static_cast<std::size_t>(b)];
        });
        std::vector<Eigen::VectorXd> xs(x.size());
        std::vector<double> fs(x.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            xs[i] = x[static_cast<std::size_t>(idx[i])];
            fs[i] = fx[static_cast<std::size_t>(idx[i])];
        }
        x = std::move(xs);
        fx = std::move(fs);
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        order();
        if (std::abs(fx.back() - fx.front()) <=
            1e-12 * (std::abs(fx.front()) + 1e-12)) {
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < dim; ++i) centroid += x[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(dim);

        const Eigen::VectorXd reflected = centroid + (centroid - x.back());
        const double fr = f(reflected);
        if (fr < fx.front()) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - x.back());
            const double fe = f(expanded);
            if (fe < fr) {
                x.back() = expanded;
                fx.back() = fe;
            } else {
                x.back() = reflected;
                fx.back() = fr;
            }
        } else if (fr < fx[static_cast<std::size_t>(dim - 1)]) {
            x.back() = reflected;
            fx.back() = fr;
        } else {
            const Eigen::VectorXd contracted = centroid + 0.5 * (x.back() - centroid);
            const double fc = f(contracted);
            if (fc < fx.back()) {
                x.back() = contracted;
                fx.back() = fc;
            } else {
                for (std::size_t i = 1; i < x.size(); ++i) {
                    x[i] = x[0] + 0.5 * (x[i] - x[0]);
                    fx[i] = f(x[i]);
                }
            }
        }
    }
    order();
    return x.front();
}

/// OLS regression of w_t on an intercept and its own p lags; this is the
/// exact CSS minimizer for pure AR models.
bool ar_ols(const Eigen::VectorXd& w, int p, double& alpha, Eigen::VectorXd& ar) {
    const int T = static_cast<int>(w.size());
    const int rows = T - p;
    if (rows < p + 2) return false;
    Eigen::MatrixXd X(rows, p + 1);
    Eigen::VectorXd y(rows);
    for (int t = p; t < T; ++t) {
        X(t - p, 0) = 1.0;
        for (int i = 1; i <= p; ++i) X(t - p, i) = w[t - i];
        y[t - p] = w[t];
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    alpha = beta[0];
    ar = beta.segment(1, p);
    return beta.allFinite();
}

/// Hannan-Rissanen starting values: residuals of a long AR regression stand
/// in for the unobserved innovations in a second OLS pass.
Eigen::VectorXd hannan_rissanen_start(const Eigen::VectorXd& w, int p, int q) {
    const int T = static_cast<int>(w.size());
    Eigen::VectorXd start = Eigen::VectorXd::Zero(1 + p + q);
    start[0] = w.mean();

    int h = std::min({std::max(10, p + q + 5), (T - 1) / 2, 20});
    if (h < 1) return start;
    double a0 = 0.0;
    Eigen::VectorXd phi0;
    if (!ar_ols(w, h, a0, phi0)) return start;

    Eigen::VectorXd eps = Eigen::VectorXd::Zero(T);
    for (int t = h; t < T; ++t) {
        double pred = a0;
        for (int i = 1; i <= h; ++i) pred += phi0[i - 1] * w[t - i];
        eps[t] = w[t] - pred;
    }

    const int first = std::max(p, h + q);
    const int rows = T - first;
    if (rows < p + q + 2) return start;
    Eigen::MatrixXd X(rows, 1 + p + q);
    Eigen::VectorXd y(rows);
    for (int t = first; t < T; ++t) {
        const int r = t - first;
        X(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i) X(r, i) = w[t - i];
        for (int j = 1; j <= q; ++j) X(r, p + j) = eps[t - j];
        y[r] = w[t];
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    if (beta.allFinite()) start = beta;

    // keep the start inside the stable region the optimizer enforces
    if (!stable_poly(start.segment(1, p), 0.999)) start.segment(1, p) *= 0.5;
    Eigen::VectorXd neg_ma = -start.segment(1 + p, q);
    if (!stable_poly(neg_ma, 0.999)) start.segment(1 + p, q) *= 0.5;
    return start;
}

struct Candidate {
    ArimaModel model;
    bool valid = false;
};

Candidate fit_candidate(const Eigen::VectorXd& series, const Eigen::VectorXd& w, int p, int d,
                        int q) {
    const int T = static_cast<int>(w.size());
    const int n_eff = T - p;
    const int m = p + q + 1;
    Candidate cand;
    if (n_eff < m + 2) return cand;

    double alpha = w.size() > 0 ? w.mean() : 0.0;
    Eigen::VectorXd ar = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd ma = Eigen::VectorXd::Zero(q);

    if (q == 0) {
        if (p > 0 && !ar_ols(w, p, alpha, ar)) return cand;
    } else {
        const Eigen::VectorXd start = hannan_rissanen_start(w, p, q);
        const Eigen::VectorXd best = nelder_mead(
            [&](const Eigen::VectorXd& params) { return css_objective(w, p, q, params); },
            start);
        alpha = best[0];
        ar = best.segment(1, p);
        ma = best.segment(1 + p, q);
    }

    const CssFit fit = css_pass(w, p, q, alpha, ar, ma);
    if (!std::isfinite(fit.ssr)) return cand;
    const double sigma2 = fit.ssr / static_cast<double>(n_eff);
    const double log_sigma2 = std::log(std::max(sigma2, 1e-300));
    const double aicc = static_cast<double>(n_eff) * log_sigma2 + 2.0 * m +
                        2.0 * m * (m + 1) / static_cast<double>(n_eff - m - 1);

    cand.model.order = {p, d, q};
    cand.model.intercept = alpha;
    cand.model.ar = ar;
    cand.model.ma = ma;
    cand.model.sigma2 = sigma2;
    cand.model.aicc = aicc;
    cand.model.series = series;
    cand.valid = true;
    return cand;
}

}  // namespace

ArimaModel fit_arima(const Eigen::VectorXd& series, const ArimaOrder& order) {
    if (!series.allFinite()) throw std::invalid_argument("fit_arima: non-finite values");
    if (order.d < 0 || order.d > 1) throw std::invalid_argument("fit_arima: d must be 0 or 1");
    if (order.p < 0 || order.p > kMaxArOrder || order.q < 0 || order.q > kMaxMaOrder) {
        throw std::invalid_argument("fit_arima: orders must lie in 0..5");
    }
    const Eigen::VectorXd w = order.d == 1 ? difference(series) : series;
    const Candidate cand = fit_candidate(series, w, order.p, order.d, order.q);
    if (!cand.valid) {
        throw std::invalid_argument("fit_arima: series too short for the requested order");
    }
    return cand.model;
}

namespace {

/// Strictly better, or equal AICc with fewer parameters, then lower p.
bool improves_on(const Candidate& cand, const Candidate& best) {
    if (!cand.valid) return false;
    if (!best.valid) return true;
    const double diff = cand.model.aicc - best.model.aicc;
    if (std::abs(diff) > 1e-9) return diff < 0.0;
    const int m_cand = cand.model.order.p + cand.model.order.q + 1;
    const int m_best = best.model.order.p + best.model.order.q + 1;
    if (m_cand != m_best) return m_cand < m_best;
    return cand.model.order.p < best.model.order.p;
}

}  // namespace

ArimaModel fit_auto_arima(const Eigen::VectorXd& series) {
    if (series.size() < 10) {
        throw std::invalid_argument("fit_auto_arima: need at least 10 observations, got " +
                                    std::to_string(series.size()));
    }
    if (!series.allFinite()) throw std::invalid_argument("fit_auto_arima: non-finite values");

    int d = 0;
    const double var_level = sample_variance(series);
    if (var_level > 0.0) {
        const double ratio = sample_variance(difference(series)) / var_level;
        if (ratio < kDifferenceVarianceRatio) d = 1;
    }
    const Eigen::VectorXd w = d == 1 ? difference(series) : series;

    // stepwise traversal of the (p,q) grid: start from the four canonical
    // models, then move to the best admissible +-1 neighbour until no
    // improvement is left
    std::vector<std::vector<char>> tried(kMaxArOrder + 1,
                                         std::vector<char>(kMaxMaOrder + 1, 0));
    auto admissible = [](int p, int q) {
        return p >= 0 && q >= 0 && p <= kMaxArOrder && q <= kMaxMaOrder &&
               p + q <= kMaxTotalOrder;
    };

    Candidate best;
    auto consider = [&](int p, int q) {
        if (!admissible(p, q) || tried[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]) {
            return;
        }
        tried[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = 1;
        Candidate cand = fit_candidate(series, w, p, d, q);
        if (improves_on(cand, best)) best = std::move(cand);
    };

    consider(2, 2);
    consider(0, 0);
    consider(1, 0);
    consider(0, 1);

    bool moved = best.valid;
    while (moved) {
        moved = false;
        const int p0 = best.model.order.p;
        const int q0 = best.model.order.q;
        for (int dp = -1; dp <= 1; ++dp) {
            for (int dq = -1; dq <= 1; ++dq) {
                if (dp == 0 && dq == 0) continue;
                consider(p0 + dp, q0 + dq);
            }
        }
        moved = best.model.order.p != p0 || best.model.order.q != q0;
    }

    if (!best.valid) {
        throw std::invalid_argument("fit_auto_arima: no admissible model for length " +
                                    std::to_string(series.size()));
    }
    return best.model;
}

Eigen::VectorXd arima_residuals(const ArimaModel& model) {
    const Eigen::VectorXd w =
        model.order.d == 1 ? difference(model.series) : model.series;
    const CssFit fit =
        css_pass(w, model.order.p, model.order.q, model.intercept, model.ar, model.ma);
    return fit.residuals.tail(w.size() - model.order.p);
}

ArimaForecast forecast_arima(const ArimaModel& model, int h) {
    if (h < 1) throw std::invalid_argument("forecast_arima: h must be >= 1");
    const int p = model.order.p;
    const int q = model.order.q;
    const Eigen::VectorXd w =
        model.order.d == 1 ? difference(model.series) : model.series;
    const int T = static_cast<int>(w.size());
    const CssFit fit = css_pass(w, p, q, model.intercept, model.ar, model.ma);

    Eigen::VectorXd w_forecast(h);
    auto value_at = [&](int idx) { return idx < T ? w[idx] : w_forecast[idx - T]; };
    for (int step = 0; step < h; ++step) {
        const int t = T + step;
        double pred = model.intercept;
        for (int i = 1; i <= p; ++i) pred += model.ar[i - 1] * value_at(t - i);
        for (int j = 1; j <= q; ++j) {
            if (t - j < T && t - j >= 0) pred += model.ma[j - 1] * fit.residuals[t - j];
        }
        w_forecast[step] = pred;
    }

    ArimaForecast out;
    out.point.resize(h);
    if (model.order.d == 0) {
        out.point = w_forecast;
    } else {
        double level = model.series[model.series.size() - 1];
        for (int step = 0; step < h; ++step) {
            level += w_forecast[step];
            out.point[step] = level;
        }
    }

    // psi weights of the ARMA part; integrated models accumulate them
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(h);
    psi[0] = 1.0;
    for (int k = 1; k < h; ++k) {
        double v = k <= q ? model.ma[k - 1] : 0.0;
        for (int i = 1; i <= std::min(k, p); ++i) v += model.ar[i - 1] * psi[k - i];
        psi[k] = v;
    }
    if (model.order.d == 1) {
        for (int k = 1; k < h; ++k) psi[k] += psi[k - 1];
    }
    out.variance.resize(h);
    double acc = 0.0;
    for (int step = 0; step < h; ++step) {
        acc += psi[step] * psi[step];
        out.variance[step] = model.sigma2 * acc;
    }
    return out;
}

std::string arima_to_json(const ArimaModel& model) {
    nlohmann::json j;
    j["order"] = {{"p", model.order.p}, {"d", model.order.d}, {"q", model.order.q}};
    j["intercept"] = model.intercept;
    j["ar"] = std::vector<double>(model.ar.data(), model.ar.data() + model.ar.size());
    j["ma"] = std::vector<double>(model.ma.data(), model.ma.data() + model.ma.size());
    j["sigma2"] = model.sigma2;
    j["aicc"] = model.aicc;
    return j.dump(2);
}

}  // namespace curvecast
