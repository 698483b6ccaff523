#include "cri/matrix_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "cri/error.hpp"

namespace cri::io {

namespace {

double parse_number(const std::string& token, std::size_t line_no) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (end == begin || *end != '\0' || errno == ERANGE) {
        throw FormatError("line " + std::to_string(line_no) + ": cannot parse number '" + token + "'");
    }
    return value;
}

}  // namespace

std::string format_decimal(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_matrix_csv(std::ostream& out, const ColumnMatrix& x, std::uint64_t seed) {
    out << "# n=" << x.rows() << " p=" << x.cols() << " seed=" << seed << '\n';
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j) out << ',';
            out << format_decimal(x.matrix()(i, j));
        }
        out << '\n';
    }
}

std::string matrix_csv(const ColumnMatrix& x, std::uint64_t seed) {
    std::ostringstream out;
    write_matrix_csv(out, x, seed);
    return out.str();
}

ColumnMatrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream fields(line);
        std::string token;
        while (std::getline(fields, token, ',')) row.push_back(parse_number(token, line_no));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw FormatError("line " + std::to_string(line_no) + ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw FormatError("matrix file has no entries");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    try {
        return ColumnMatrix(std::move(m));
    } catch (const InvalidInput& e) {
        throw FormatError(e.what());
    }
}

ColumnMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_matrix_csv(in);
}

Vector read_vector(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        for (char& c : line) {
            if (c == ',') c = ' ';
        }
        std::stringstream fields(line);
        std::string token;
        while (fields >> token) values.push_back(parse_number(token, line_no));
    }
    if (values.empty()) throw FormatError("vector file has no entries");
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Vector load_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_vector(in);
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace cri::io
