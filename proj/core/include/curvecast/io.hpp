#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvecast/series.hpp"

namespace curvecast {

/// Reads a long univariate series from CSV. Accepted layouts, header
/// optional: a single `value` column, or `timestamp,value` where the
/// timestamp is kept verbatim and ignored by the math. Non-numeric values
/// are an error reported with the file line number.
UnivariateSeries ingest_series(const std::string& path);

/// Reads a wide numeric matrix (n rows x p comma-separated values, header
/// optional). Used for curve matrices and report round-trips.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Writes a matrix as CSV with an optional header line.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});

/// Reads a wide matrix as a functional time series on the given grid.
FunctionalTimeSeries read_fts_csv(const std::string& path, const Grid& grid);

/// Fixed-width numeric formatting used for every emitted file, so repeated
/// runs with the same seed produce byte-identical output.
std::string format_double(double v);

}  // namespace curvecast
