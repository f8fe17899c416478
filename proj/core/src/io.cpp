#include "wgmig/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace wgmig {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& payload) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : payload) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::pair<std::string, std::string>> headers,
                     std::vector<std::string> columns)
    : out_(out), columns_(columns.size()) {
    for (const auto& [key, value] : headers) out_ << "# " << key << "=" << value << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::invalid_argument("CsvWriter: column mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != columns_) throw std::invalid_argument("CsvWriter: column mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
}

bool Report::pass() const {
    for (const auto& line : lines)
        if (!line.pass && !line.expected_fail) return false;
    return true;
}

void write_report_ndjson(std::ostream& out, const Report& report,
                         const std::string& config_hash, std::uint64_t seed) {
    for (const auto& line : report.lines) {
        nlohmann::ordered_json j;
        j["report"] = report.name;
        j["quantity"] = line.quantity;
        j["estimate"] = line.estimate;
        j["stderr"] = line.stderr_value;
        j["target"] = line.target;
        j["tolerance"] = line.tolerance;
        j["pass"] = line.pass;
        if (line.expected_fail) j["expected_fail"] = true;
        if (!line.note.empty()) j["note"] = line.note;
        j["config_hash"] = config_hash;
        j["seed"] = seed;
        out << j.dump() << "\n";
    }
}

void write_image_csv(const std::filesystem::path& path, const ImageGrid& image,
                     const std::string& config_hash, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    CsvWriter csv(out,
                  {{"functional", image.tag},
                   {"config_hash", config_hash},
                   {"seed", std::to_string(seed)}},
                  {"x", "z", "value", "magnitude"});
    for (std::size_t ix = 0; ix < image.grid.x.size(); ++ix)
        for (std::size_t iz = 0; iz < image.grid.z.size(); ++iz)
            csv.row({image.grid.x[ix], image.grid.z[iz],
                     image.values(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iz)),
                     image.magnitude(static_cast<Eigen::Index>(ix),
                                     static_cast<Eigen::Index>(iz))});
}

void write_image_metadata(const std::filesystem::path& path, const ImageGrid& image,
                          const std::string& functional, const std::string& config_hash,
                          std::uint64_t seed) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    nlohmann::ordered_json j;
    j["functional"] = functional;
    j["nx"] = image.grid.x.size();
    j["nz"] = image.grid.z.size();
    j["x_min"] = image.grid.x.front();
    j["x_max"] = image.grid.x.back();
    j["z_min"] = image.grid.z.front();
    j["z_max"] = image.grid.z.back();
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    out << j.dump() << "\n";
}

} // namespace wgmig
