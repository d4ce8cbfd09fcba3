#pragma once

#include <Eigen/Dense>

namespace curvecast {

/// Discretization of the function support: p points on a right-closed
/// interval, with a uniform quadrature weight dt so that
/// <x,y> = dt * sum_j x(t_j) y(t_j) approximates the L2 inner product.
struct Grid {
    int p = 0;
    double support_start = 0.0;
    double support_end = 0.0;
    Eigen::VectorXd points;  // t_1..t_p, strictly increasing in (start, end]
    double dt = 0.0;

    /// Equispaced grid with t_j = start + j*dt, dt = (end-start)/p.
    static Grid equispaced(int p, double support_start, double support_end);

    /// Leading sub-grid t_1..t_m0 (same dt).
    Grid head(int m0) const;

    /// Trailing sub-grid t_{m0+1}..t_p (same dt).
    Grid tail(int m0) const;

    double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
        return dt * x.dot(y);
    }
    double squared_norm(const Eigen::VectorXd& x) const { return dt * x.squaredNorm(); }
    double norm(const Eigen::VectorXd& x) const;

    bool same_shape(const Grid& other) const;
    void validate() const;
};

}  // namespace curvecast
