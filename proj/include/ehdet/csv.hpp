#ifndef EHDET_CSV_HPP
#define EHDET_CSV_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ehdet {

// Shortest decimal form that round-trips the double (17 significant digits).
std::string format_full(double value);

std::string join_full(const std::vector<double>& values, char sep = ';');

// Row-major CSV of a matrix, full precision.
std::string matrix_csv(const Eigen::MatrixXd& m);
std::string vector_csv(const Eigen::VectorXd& v);

void write_file(const std::string& path, const std::string& contents);

}  // namespace ehdet

#endif
