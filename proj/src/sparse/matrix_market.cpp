#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "minipgas/sparse/io.hpp"

namespace minipgas::sparse {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

} // namespace

CooMatrix read_matrix_market(std::istream& in) {
    std::string line;
    long lineno = 0;

    if (!std::getline(in, line))
        throw ParseError("empty input, expected %%MatrixMarket header", 1);
    ++lineno;
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
        throw ParseError("missing %%MatrixMarket banner", lineno);
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix" || format != "coordinate")
        throw ParseError("only 'matrix coordinate' files are supported", lineno);
    if (field != "real" && field != "double" && field != "integer")
        throw ParseError("unsupported field '" + field + "' (real only)", lineno);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);
    const bool symmetric = symmetry == "symmetric";

    long long rows = -1, cols = -1, nnz = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line))
            continue;
        std::istringstream ss(line);
        if (!(ss >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
            throw ParseError("malformed size line '" + line + "'", lineno);
        break;
    }
    if (rows < 0)
        throw ParseError("missing size line", lineno);
    if (rows != cols)
        throw StructureError("matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                             ", expected square");

    CooMatrix coo;
    coo.n = rows;
    coo.entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
    long long seen = 0;
    while (seen < nnz && std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line))
            continue;
        std::istringstream ss(line);
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(ss >> i >> j >> v))
            throw ParseError("malformed entry '" + line + "'", lineno);
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") outside declared size",
                             lineno);
        coo.entries.push_back({i - 1, j - 1, v});
        if (symmetric && i != j)
            coo.entries.push_back({j - 1, i - 1, v});
        ++seen;
    }
    if (seen < nnz)
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen),
                         lineno);
    return coo;
}

CooMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ArgumentError("cannot open matrix file '" + path.string() + "'");
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CooMatrix& coo) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << coo.n << ' ' << coo.n << ' ' << coo.entries.size() << '\n';
    char buf[64];
    for (const auto& e : coo.sorted_entries()) {
        std::snprintf(buf, sizeof buf, "%.17g", e.value);
        out << e.row + 1 << ' ' << e.col + 1 << ' ' << buf << '\n';
    }
}

void write_matrix_market(const std::filesystem::path& path, const CooMatrix& coo) {
    std::ofstream out(path);
    if (!out)
        throw ArgumentError("cannot write matrix file '" + path.string() + "'");
    write_matrix_market(out, coo);
}

} // namespace minipgas::sparse
