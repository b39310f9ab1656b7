#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "lqe/dataset.hpp"
#include "lqe/errors.hpp"
#include "lqe/parse.hpp"

namespace lqe {

namespace detail {

inline std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace detail

/// Comma-separated samples: a header row naming each sample, then one row
/// per observation vector. Decimal point, no thousands separators, no
/// missing values. Blank lines are skipped. Errors cite the 1-based line.
inline CSampleDataset read_csv_dataset(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> names;
    while (names.empty() && std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
        if (trim(line).empty()) continue;
        names = detail::split_commas(line);
    }
    if (names.empty()) throw DataError("no header row");
    if (names.size() < 2) throw DataError("need at least two sample columns", line_no);

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != names.size())
            throw DataError("expected " + std::to_string(names.size()) + " cells, found " +
                                std::to_string(cells.size()),
                            line_no);
        for (std::size_t l = 0; l < cells.size(); ++l) {
            double v = 0.0;
            try {
                v = parse_double(cells[l], "column '" + names[l] + "'");
            } catch (const DomainError& e) {
                throw DataError(e.what(), line_no);
            }
            if (!std::isfinite(v)) throw DataError("non-finite value in column '" + names[l] + "'", line_no);
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw DataError("no data rows", line_no);
    CSampleDataset data(rows, names.size(), std::move(values));
    data.set_names(std::move(names));
    return data;
}

inline CSampleDataset read_csv_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_csv_dataset(in);
}

}  // namespace lqe
