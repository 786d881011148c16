#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wishmom/covariance.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/matrix.hpp"

namespace wishmom {

namespace detail {

inline bool has_json_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return false;
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return ext == "json";
}

inline Matrix parse_csv_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;  // blank line

        std::vector<double> row;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            std::size_t first = pos;
            while (first < end && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
            std::size_t last = end;
            while (last > first && std::isspace(static_cast<unsigned char>(line[last - 1]))) --last;

            double value = 0.0;
            const char* begin_ptr = line.data() + first;
            const char* end_ptr = line.data() + last;
            const auto [ptr, ec] = std::from_chars(begin_ptr, end_ptr, value);
            if (ec != std::errc{} || ptr != end_ptr || first == last) {
                throw ParseError("cannot parse '" + line.substr(first, last - first) +
                                     "' as a number at line " + std::to_string(line_no) + ", column " +
                                     std::to_string(first + 1),
                                 line_no, first + 1);
            }
            row.push_back(value);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }

        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("row of length " + std::to_string(row.size()) + " at line " +
                                 std::to_string(line_no) + " (expected " +
                                 std::to_string(rows.front().size()) + ")",
                             line_no, 1);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("file contains no matrix rows", 1, 1);

    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

inline Matrix parse_json_matrix(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), 0, 0);
    }
    if (!doc.is_object() || !doc.contains("matrix") || !doc["matrix"].is_array()) {
        throw InvalidInputError("JSON covariance must be an object {\"matrix\": [[...], ...]}");
    }
    const auto& arr = doc["matrix"];
    const std::size_t n_rows = arr.size();
    if (n_rows == 0) throw InvalidInputError("JSON covariance: \"matrix\" is empty");
    std::size_t n_cols = 0;
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (!arr[i].is_array()) throw InvalidInputError("JSON covariance: row " + std::to_string(i + 1) + " is not an array");
        if (i == 0) n_cols = arr[i].size();
        if (arr[i].size() != n_cols) {
            throw InvalidInputError("JSON covariance: row " + std::to_string(i + 1) + " has length " +
                                    std::to_string(arr[i].size()) + " (expected " + std::to_string(n_cols) + ")");
        }
    }
    Matrix m(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (!arr[i][j].is_number()) {
                throw InvalidInputError("JSON covariance: entry (" + std::to_string(i + 1) + ", " +
                                        std::to_string(j + 1) + ") is not a number");
            }
            m(i, j) = arr[i][j].get<double>();
        }
    }
    return m;
}

}  // namespace detail

// Reads a covariance matrix from a CSV file (r lines of r comma-separated
// numbers) or a JSON file ({"matrix": [[...], ...]}), chosen by extension.
// Validates squareness, symmetry to 1e-8 relative (then symmetrizes), and
// positive definiteness.
inline CovarianceMatrix load_covariance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open covariance file '" + path + "'");

    Matrix m = detail::has_json_extension(path) ? detail::parse_json_matrix(in)
                                                : detail::parse_csv_matrix(in);

    if (!m.is_square()) {
        throw InvalidInputError("covariance matrix must be square (got " + std::to_string(m.rows()) +
                                " x " + std::to_string(m.cols()) + ")");
    }
    if (!m.all_finite()) throw InvalidInputError("covariance matrix has non-finite entries");
    const double asym = m.max_abs_diff(m.transpose());
    if (asym > 1e-8 * std::max(1.0, m.max_abs())) {
        throw InvalidInputError("covariance matrix is asymmetric (max asymmetry " +
                                std::to_string(asym) + ")");
    }
    m.symmetrize();
    return CovarianceMatrix(std::move(m));
}

}  // namespace wishmom
