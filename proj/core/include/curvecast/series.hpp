#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvecast/grid.hpp"

namespace curvecast {

/// A long univariate series Z_1..Z_N, as read from disk. Timestamps, when
/// present in the input file, are carried along but never enter the math.
struct UnivariateSeries {
    Eigen::VectorXd values;
    std::vector<std::string> timestamps;  // empty or one per value

    int size() const { return static_cast<int>(values.size()); }
    void validate() const;
};

/// n curves discretized on a common grid; row i holds curve i at t_1..t_p.
struct FunctionalTimeSeries {
    Grid grid;
    Eigen::MatrixXd curves;  // n x p

    int n() const { return static_cast<int>(curves.rows()); }
    int p() const { return grid.p; }
    void validate() const;
};

/// First m0 observed points of the most recent, still incomplete curve.
struct PartialCurve {
    Grid grid;  // grid of the full day
    int m0 = 0;
    Eigen::VectorXd values;  // length m0

    void validate() const;
};

/// Cuts a series of length N into N/p curves of p points, in file order.
/// N not divisible by p is an error (no silent truncation).
FunctionalTimeSeries segment(const UnivariateSeries& series, const Grid& grid);

/// Row-major flattening; inverse of segment.
Eigen::VectorXd flatten(const FunctionalTimeSeries& fts);

/// Elementwise square root (variance stabilization). Negative entries are a
/// domain error reported with curve and point index.
FunctionalTimeSeries sqrt_transform(const FunctionalTimeSeries& fts);
PartialCurve sqrt_transform(const PartialCurve& partial);

/// Elementwise square, the exact inverse of sqrt_transform on nonnegative data.
FunctionalTimeSeries square_back(const FunctionalTimeSeries& fts);
PartialCurve square_back(const PartialCurve& partial);

/// Pointwise arithmetic mean across curves.
Eigen::VectorXd mean_function(const FunctionalTimeSeries& fts);

}  // namespace curvecast
