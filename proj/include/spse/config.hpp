#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spse/grid.hpp"
#include "spse/potentials.hpp"

namespace spse {

/// Plain-text `key = value` configuration with '#' comments. Keys are kept in
/// a sorted map so emission is canonical and the hash is stable.
class LabConfig {
  public:
    LabConfig() = default;

    static LabConfig load(const std::string& path);
    static LabConfig parse(const std::string& text);
    void save(const std::string& path) const;
    std::string canonical_text() const;

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
    std::vector<double> get_list(const std::string& key) const;

    Potential potential() const;
    Grid3D box() const;

    /// Cross-field validation; throws ConfigError naming the offending key.
    void validate() const;

    /// FNV-1a hash of the canonical text, hex string.
    std::string hash() const;

    bool operator==(const LabConfig& other) const { return entries_ == other.entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

}  // namespace spse
