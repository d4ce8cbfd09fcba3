#include "curvecast/series.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace curvecast {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": values must be finite");
    }
}

Eigen::MatrixXd sqrt_block(const Eigen::MatrixXd& block, const char* what) {
    for (int i = 0; i < block.rows(); ++i) {
        for (int j = 0; j < block.cols(); ++j) {
            if (block(i, j) < 0.0) {
                throw std::domain_error(std::string(what) + ": negative value " +
                                        std::to_string(block(i, j)) + " at curve " +
                                        std::to_string(i + 1) + ", point " +
                                        std::to_string(j + 1));
            }
        }
    }
    return block.array().sqrt().matrix();
}

}  // namespace

void UnivariateSeries::validate() const {
    if (values.size() < 1) throw std::invalid_argument("UnivariateSeries: N must be >= 1");
    if (!values.allFinite()) {
        throw std::invalid_argument("UnivariateSeries: values must be finite");
    }
    if (!timestamps.empty() && static_cast<int>(timestamps.size()) != size()) {
        throw std::invalid_argument("UnivariateSeries: timestamp count mismatch");
    }
}

void FunctionalTimeSeries::validate() const {
    grid.validate();
    if (curves.rows() < 1) throw std::invalid_argument("FunctionalTimeSeries: n must be >= 1");
    if (curves.cols() != grid.p) {
        throw std::invalid_argument("FunctionalTimeSeries: curve length " +
                                    std::to_string(curves.cols()) + " does not match grid p=" +
                                    std::to_string(grid.p));
    }
    check_finite(curves, "FunctionalTimeSeries");
}

void PartialCurve::validate() const {
    grid.validate();
    if (m0 < 1 || m0 >= grid.p) {
        throw std::invalid_argument("PartialCurve: m0 must lie in [1, p-1], got " +
                                    std::to_string(m0));
    }
    if (values.size() != m0) {
        throw std::invalid_argument("PartialCurve: expected " + std::to_string(m0) +
                                    " observed values, got " + std::to_string(values.size()));
    }
    check_finite(values, "PartialCurve");
}

FunctionalTimeSeries segment(const UnivariateSeries& series, const Grid& grid) {
    series.validate();
    grid.validate();
    const int N = series.size();
    const int p = grid.p;
    if (N % p != 0) {
        throw std::invalid_argument("segment: series length " + std::to_string(N) +
                                    " is not divisible by p=" + std::to_string(p) +
                                    " (remainder " + std::to_string(N % p) + ")");
    }
    FunctionalTimeSeries fts;
    fts.grid = grid;
    const int n = N / p;
    fts.curves.resize(n, p);
    for (int i = 0; i < n; ++i) {
        fts.curves.row(i) = series.values.segment(static_cast<Eigen::Index>(i) * p, p);
    }
    return fts;
}

Eigen::VectorXd flatten(const FunctionalTimeSeries& fts) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(fts.n()) * fts.p());
    for (int i = 0; i < fts.n(); ++i) {
        out.segment(static_cast<Eigen::Index>(i) * fts.p(), fts.p()) = fts.curves.row(i);
    }
    return out;
}

FunctionalTimeSeries sqrt_transform(const FunctionalTimeSeries& fts) {
    fts.validate();
    FunctionalTimeSeries out = fts;
    out.curves = sqrt_block(fts.curves, "sqrt_transform");
    return out;
}

PartialCurve sqrt_transform(const PartialCurve& partial) {
    partial.validate();
    PartialCurve out = partial;
    out.values = sqrt_block(partial.values, "sqrt_transform").col(0);
    return out;
}

FunctionalTimeSeries square_back(const FunctionalTimeSeries& fts) {
    fts.validate();
    FunctionalTimeSeries out = fts;
    out.curves = fts.curves.array().square().matrix();
    return out;
}

PartialCurve square_back(const PartialCurve& partial) {
    partial.validate();
    PartialCurve out = partial;
    out.values = partial.values.array().square().matrix();
    return out;
}

Eigen::VectorXd mean_function(const FunctionalTimeSeries& fts) {
    fts.validate();
    return fts.curves.colwise().mean();
}

}  // namespace curvecast
