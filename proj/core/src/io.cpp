#include "curvecast/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace curvecast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos ? std::string()
                                                    : field.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* endp = nullptr;
    out = std::strtod(s.c_str(), &endp);
    return endp == s.c_str() + s.size();
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

UnivariateSeries ingest_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("ingest_series: cannot open file '" + path + "'");
    }

    std::vector<double> values;
    std::vector<std::string> timestamps;
    bool saw_two_columns = false;

    std::string line;
    int line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_csv_line(line);

        const std::string& value_field = fields.size() >= 2 ? fields[1] : fields[0];
        double v = 0.0;
        if (!parse_number(value_field, v)) {
            if (first_content) {
                // header row
                first_content = false;
                continue;
            }
            throw std::runtime_error("ingest_series: non-numeric value '" + value_field +
                                     "' at row " + std::to_string(line_no) + " of '" + path +
                                     "'");
        }
        first_content = false;
        if (fields.size() >= 2) {
            saw_two_columns = true;
            timestamps.push_back(fields[0]);
        } else {
            timestamps.emplace_back();
        }
        values.push_back(v);
    }

    if (values.empty()) {
        throw std::runtime_error("ingest_series: no data rows in '" + path + "'");
    }

    UnivariateSeries series;
    series.values = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                      static_cast<Eigen::Index>(values.size()));
    if (saw_two_columns) series.timestamps = std::move(timestamps);
    series.validate();
    return series;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_matrix_csv: cannot open file '" + path + "'");
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    bool first_content = true;
    Eigen::Index width = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        bool ok = true;
        for (const auto& f : fields) {
            double v = 0.0;
            if (!parse_number(f, v)) {
                ok = false;
                break;
            }
            row.push_back(v);
        }
        if (!ok) {
            if (first_content) {
                first_content = false;
                continue;  // header
            }
            throw std::runtime_error("read_matrix_csv: non-numeric row " +
                                     std::to_string(line_no) + " in '" + path + "'");
        }
        first_content = false;
        if (width < 0) {
            width = static_cast<Eigen::Index>(row.size());
        } else if (width != static_cast<Eigen::Index>(row.size())) {
            throw std::runtime_error("read_matrix_csv: ragged row " + std::to_string(line_no) +
                                     " in '" + path + "' (expected " + std::to_string(width) +
                                     " values, got " + std::to_string(row.size()) + ")");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error("read_matrix_csv: no data rows in '" + path + "'");
    }

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), width);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < width; ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_matrix_csv: cannot open '" + path + "' for writing");
    }
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j) out << ',';
            out << header[j];
        }
        out << '\n';
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("write_matrix_csv: write failed for '" + path + "'");
    }
}

FunctionalTimeSeries read_fts_csv(const std::string& path, const Grid& grid) {
    FunctionalTimeSeries fts;
    fts.grid = grid;
    fts.curves = read_matrix_csv(path);
    fts.validate();
    return fts;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace curvecast
