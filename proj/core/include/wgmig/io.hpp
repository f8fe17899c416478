#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "wgmig/imaging.hpp"

namespace wgmig {

/// Floating-point serialization with 17 significant digits: values survive
/// a text round trip bit-exactly.
std::string format_double(double v);

/// FNV-1a 64-bit digest, hex encoded; used to stamp outputs with the
/// configuration they came from.
std::string fnv1a_hex(const std::string& payload);

/// Writes "# key=value" comment headers followed by CSV rows.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::pair<std::string, std::string>> headers,
              std::vector<std::string> columns);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

private:
    std::ostream& out_;
    std::size_t columns_ = 0;
};

/// One verification line of a report. `expected_fail` marks checks whose
/// stated target is known to disagree with the exact theory (documented
/// limit-table approximations); they are reported but do not gate the suite.
struct CheckLine {
    std::string quantity;
    double estimate = 0.0;
    double stderr_value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
    bool expected_fail = false;
};

struct Report {
    std::string name;
    std::vector<CheckLine> lines;
    double seconds = 0.0;

    bool pass() const;  ///< all lines pass, expected failures aside
};

/// Serializes one report as NDJSON (one object per line, fields
/// quantity/estimate/stderr/target/tolerance/pass).
void write_report_ndjson(std::ostream& out, const Report& report,
                         const std::string& config_hash, std::uint64_t seed);

/// Image CSV (columns x, z, value, magnitude) plus an NDJSON metadata line.
void write_image_csv(const std::filesystem::path& path, const ImageGrid& image,
                     const std::string& config_hash, std::uint64_t seed);
void write_image_metadata(const std::filesystem::path& path, const ImageGrid& image,
                          const std::string& functional, const std::string& config_hash,
                          std::uint64_t seed);

} // namespace wgmig
