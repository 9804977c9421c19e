#include "ehdet/csv.hpp"

#include <cstdio>
#include <fstream>

#include "ehdet/types.hpp"

namespace ehdet {

std::string format_full(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string join_full(const std::vector<double>& values, char sep) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += sep;
        }
        out += format_full(values[i]);
    }
    return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) {
                out += ',';
            }
            out += format_full(m(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string vector_csv(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += format_full(v(i));
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write file: " + path);
    }
    out << contents;
}

}  // namespace ehdet
