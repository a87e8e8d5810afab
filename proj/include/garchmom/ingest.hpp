#ifndef GARCHMOM_INGEST_HPP
#define GARCHMOM_INGEST_HPP

#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "garchmom/common.hpp"

namespace garchmom {

struct IngestResult {
    std::vector<double> returns;
    std::vector<std::size_t> rejected_lines;  // 1-based lines with non-finite values
    bool from_prices = false;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim spaces and a trailing CR
        std::size_t b = cell.find_first_not_of(" \t\r");
        std::size_t e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

/// Reads a return series from CSV. The header must name either a `return`
/// column (used as-is) or a `price` column (log-differenced); a `date`
/// column, if present, is ignored. Malformed numeric cells raise ParseError
/// with the offending line; rows with non-finite values are skipped and
/// recorded in rejected_lines.
inline IngestResult ingest_returns(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("input is empty");
    const auto header = detail::split_csv_line(line);
    std::ptrdiff_t col = -1;
    bool from_prices = false;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = detail::lower(header[i]);
        if (name == "return" || name == "returns") {
            col = static_cast<std::ptrdiff_t>(i);
            from_prices = false;
            break;
        }
        if (name == "price" || name == "prices" || name == "close") {
            col = static_cast<std::ptrdiff_t>(i);
            from_prices = true;
        }
    }
    if (col < 0)
        throw ParseError("header must contain a 'return' or 'price' column", 1);

    IngestResult out;
    out.from_prices = from_prices;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = detail::split_csv_line(line);
        if (static_cast<std::size_t>(col) >= cells.size())
            throw ParseError("row has too few columns", line_no);
        const std::string& cell = cells[static_cast<std::size_t>(col)];
        try {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used != cell.size()) throw ParseError("malformed numeric cell", line_no);
            if (!std::isfinite(v)) {
                out.rejected_lines.push_back(line_no);
                continue;
            }
            values.push_back(v);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("malformed numeric cell", line_no);
        }
    }
    if (values.empty()) throw EmptyInputError("no data rows");

    if (!from_prices) {
        out.returns = std::move(values);
        return out;
    }
    if (values.size() < 2) throw EmptyInputError("need at least two prices");
    out.returns.reserve(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i - 1] > 0.0 && values[i] > 0.0))
            throw ParseError("prices must be positive for log returns", i + 1);
        out.returns.push_back(std::log(values[i] / values[i - 1]));
    }
    return out;
}

}  // namespace garchmom

#endif  // GARCHMOM_INGEST_HPP
