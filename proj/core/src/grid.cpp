#include "curvecast/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace curvecast {

Grid Grid::equispaced(int p, double support_start, double support_end) {
    if (p < 2) {
        throw std::invalid_argument("Grid: p must be >= 2, got " + std::to_string(p));
    }
    if (!(support_end > support_start)) {
        throw std::invalid_argument("Grid: support_end must exceed support_start");
    }
    Grid g;
    g.p = p;
    g.support_start = support_start;
    g.support_end = support_end;
    g.dt = (support_end - support_start) / static_cast<double>(p);
    g.points.resize(p);
    for (int j = 0; j < p; ++j) {
        g.points[j] = support_start + static_cast<double>(j + 1) * g.dt;
    }
    g.validate();
    return g;
}

Grid Grid::head(int m0) const {
    if (m0 < 1 || m0 >= p) {
        throw std::invalid_argument("Grid::head: m0 must lie in [1, p-1], got " +
                                    std::to_string(m0));
    }
    Grid g;
    g.p = m0;
    g.support_start = support_start;
    g.support_end = points[m0 - 1];
    g.dt = dt;
    g.points = points.head(m0);
    return g;
}

Grid Grid::tail(int m0) const {
    if (m0 < 1 || m0 >= p) {
        throw std::invalid_argument("Grid::tail: m0 must lie in [1, p-1], got " +
                                    std::to_string(m0));
    }
    Grid g;
    g.p = p - m0;
    g.support_start = points[m0 - 1];
    g.support_end = support_end;
    g.dt = dt;
    g.points = points.tail(p - m0);
    return g;
}

double Grid::norm(const Eigen::VectorXd& x) const { return std::sqrt(squared_norm(x)); }

bool Grid::same_shape(const Grid& other) const {
    return p == other.p && dt == other.dt;
}

void Grid::validate() const {
    if (p < 2) throw std::invalid_argument("Grid: p must be >= 2");
    if (points.size() != p) throw std::invalid_argument("Grid: points size mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("Grid: dt must be positive");
    for (int j = 1; j < p; ++j) {
        if (!(points[j] > points[j - 1])) {
            throw std::invalid_argument("Grid: points must be strictly increasing");
        }
    }
}

}  // namespace curvecast
