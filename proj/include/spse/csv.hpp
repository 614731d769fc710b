#pragma once

#include <map>
#include <string>
#include <vector>

#include "spse/grid.hpp"

namespace spse {

/// One CSV table: a header row and numeric rows, written with full precision
/// so identical inputs give byte-identical files. `row_suffix`, when set, is
/// appended verbatim as the last column of every row (provenance hash).
struct CsvTable {
    std::vector<std::string> comments;  // emitted as leading '# ' lines
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string row_suffix;
};

std::string format_double(double v);
void emit_csv(const CsvTable& table, const std::string& path);

/// Field serialization. Header line `# grid L=<L> n=<n>`, optional `# key=value`
/// metadata lines, then one value per line (3D, x-fastest) or `r,value` rows.
void save_field(const ScalarField3D& f, const std::string& path,
                const std::map<std::string, double>& meta = {});
void save_field(const RadialField& f, const std::string& path,
                const std::map<std::string, double>& meta = {});

struct LoadedField {
    bool is_radial = false;
    RadialField radial;
    ScalarField3D box;
    std::map<std::string, double> meta;
};

LoadedField load_field(const std::string& path);

}  // namespace spse
