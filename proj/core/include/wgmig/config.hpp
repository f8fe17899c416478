#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wgmig/montecarlo.hpp"

namespace wgmig {

/// Run configuration loaded from JSON. Schema-validated: unknown keys are
/// rejected and format_version must match exactly.
struct RunConfig {
    static constexpr int kFormatVersion = 1;

    EnsembleConfig ensemble;
    ImageGridSpec grid;
    std::vector<std::string> functionals;  ///< subset of {"KM", "FA", "LA"}
    std::string image_mode = "mean";       ///< "single" or "mean"
    std::filesystem::path output_dir = "out";

    std::string canonical;  ///< canonical JSON text (sorted keys)
    std::string hash;       ///< digest of `canonical`

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_file(const std::filesystem::path& path);
};

} // namespace wgmig
