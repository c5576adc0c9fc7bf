#include "fracfb/csv.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "fracfb/report.hpp"

namespace fracfb {

std::string field_to_csv(const ScalarField& field) {
    const GridSpec& g = field.grid;
    std::string out = g.dimension == 1 ? "x,value\n" : "x,y,value\n";
    for (long i = 0; i < g.point_count(); ++i) {
        const Point p = g.point(i);
        out += format_double(p[0]);
        if (g.dimension == 2) {
            out += ',';
            out += format_double(p[1]);
        }
        out += ',';
        out += format_double(field[i]);
        out += '\n';
    }
    return out;
}

ScalarField field_from_csv(const std::string& text, const GridSpec& grid) {
    std::istringstream iss(text);
    std::string line;
    if (!std::getline(iss, line)) {
        throw std::invalid_argument("field_from_csv: empty input");
    }
    const std::string expected_header = grid.dimension == 1 ? "x,value" : "x,y,value";
    // tolerate trailing carriage returns
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != expected_header) {
        throw std::invalid_argument("field_from_csv: header '" + line + "' does not match grid (expected '" +
                                    expected_header + "')");
    }
    ScalarField out(grid);
    long row = 0;
    const int cols = grid.dimension == 1 ? 2 : 3;
    while (std::getline(iss, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        if (row >= grid.point_count()) {
            throw std::invalid_argument("field_from_csv: more rows than grid points");
        }
        std::istringstream ls(line);
        std::string tok;
        double value = 0.0;
        for (int c = 0; c < cols; ++c) {
            if (!std::getline(ls, tok, ',')) {
                throw std::invalid_argument("field_from_csv: short row " + std::to_string(row + 2));
            }
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str()) {
                throw std::invalid_argument("field_from_csv: bad number in row " +
                                            std::to_string(row + 2));
            }
            if (c == cols - 1) value = v;
        }
        out[row] = value;
        ++row;
    }
    if (row != grid.point_count()) {
        throw std::invalid_argument("field_from_csv: expected " +
                                    std::to_string(grid.point_count()) + " rows, got " +
                                    std::to_string(row));
    }
    return out;
}

} // namespace fracfb
