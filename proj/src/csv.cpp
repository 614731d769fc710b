#include "spse/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "spse/errors.hpp"

namespace spse {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("emit_csv: cannot write '" + path + "'");
    for (const auto& c : table.comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << table.header[i] << (i + 1 < table.header.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        if (!table.row_suffix.empty()) out << "," << table.row_suffix;
        out << "\n";
    }
    if (!out) throw InvalidInput("emit_csv: write failed for '" + path + "'");
}

namespace {

void write_meta(std::ofstream& out, const std::map<std::string, double>& meta) {
    for (const auto& [k, v] : meta) out << "# " << k << "=" << format_double(v) << "\n";
}

}  // namespace

void save_field(const ScalarField3D& f, const std::string& path,
                const std::map<std::string, double>& meta) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("save_field: cannot write '" + path + "'");
    out << "# grid L=" << format_double(f.grid.L) << " n=" << f.grid.n << "\n";
    write_meta(out, meta);
    for (double v : f.values) out << format_double(v) << "\n";
    if (!out) throw InvalidInput("save_field: write failed for '" + path + "'");
}

void save_field(const RadialField& f, const std::string& path,
                const std::map<std::string, double>& meta) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("save_field: cannot write '" + path + "'");
    out << "# grid L=" << format_double(f.grid.r_max) << " n=" << f.grid.n_nodes << "\n";
    write_meta(out, meta);
    for (std::size_t i = 0; i < f.grid.n_nodes; ++i)
        out << format_double(f.grid.r(i)) << "," << format_double(f.values[i]) << "\n";
    if (!out) throw InvalidInput("save_field: write failed for '" + path + "'");
}

LoadedField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("load_field: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("load_field: empty file '" + path + "'");
    double L = 0.0;
    std::size_t n = 0;
    if (std::sscanf(line.c_str(), "# grid L=%lf n=%zu", &L, &n) != 2)
        throw InvalidInput("load_field: bad grid header in '" + path + "'");

    LoadedField out;
    std::vector<double> vals;
    bool radial = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                const auto a = key.find_first_not_of(' ');
                const auto b = key.find_last_not_of(' ');
                key = key.substr(a, b - a + 1);
                out.meta[key] = std::stod(line.substr(eq + 1));
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma != std::string::npos) {
            radial = true;
            vals.push_back(std::stod(line.substr(comma + 1)));
        } else {
            vals.push_back(std::stod(line));
        }
    }
    out.is_radial = radial;
    if (radial) {
        if (vals.size() != n) throw InvalidInput("load_field: node count mismatch in '" + path + "'");
        out.radial = RadialField(RadialGrid(L, n), std::move(vals));
    } else {
        if (vals.size() != n * n * n)
            throw InvalidInput("load_field: node count mismatch in '" + path + "'");
        out.box = ScalarField3D(Grid3D(L, n), std::move(vals));
    }
    return out;
}

}  // namespace spse
