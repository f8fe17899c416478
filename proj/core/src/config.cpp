#include "wgmig/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "wgmig/errors.hpp"
#include "wgmig/io.hpp"

namespace wgmig {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& required, const std::set<std::string>& optional) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!required.contains(key) && !optional.contains(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
    for (const auto& key : required)
        if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

std::vector<double> linear_axis(const json& j, const std::string& where) {
    require_keys(j, where, {"min", "max", "count"}, {});
    const double lo = number(j.at("min"), where + ".min");
    const double hi = number(j.at("max"), where + ".max");
    const auto count = j.at("count").get<std::size_t>();
    if (count < 1 || hi < lo) throw ConfigError(where + ": bad axis");
    std::vector<double> axis(count);
    if (count == 1) {
        axis[0] = 0.5 * (lo + hi);
        return axis;
    }
    const double h = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) axis[i] = lo + h * static_cast<double>(i);
    axis.back() = hi;
    return axis;
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    require_keys(j, "config",
                 {"format_version", "waveguide", "medium", "source", "reflector", "array",
                  "ensemble"},
                 {"propagation", "grid", "image", "output_dir"});
    if (!j.at("format_version").is_number_integer() ||
        j.at("format_version").get<int>() != kFormatVersion)
        throw ConfigError("config: format_version must be exactly " +
                          std::to_string(kFormatVersion));

    RunConfig config;
    Scenario& sc = config.ensemble.scenario;

    {
        const json& w = j.at("waveguide");
        require_keys(w, "waveguide", {"width", "sound_speed", "omega0"}, {});
        sc.waveguide.width = number(w.at("width"), "waveguide.width");
        sc.waveguide.sound_speed = number(w.at("sound_speed"), "waveguide.sound_speed");
        sc.waveguide.omega0 = number(w.at("omega0"), "waveguide.omega0");
    }
    {
        const json& m = j.at("medium");
        require_keys(m, "medium", {"epsilon", "ell_z", "ell_x", "sigma_nu"}, {"kernel"});
        sc.medium.epsilon = number(m.at("epsilon"), "medium.epsilon");
        sc.medium.ell_z = number(m.at("ell_z"), "medium.ell_z");
        sc.medium.ell_x = number(m.at("ell_x"), "medium.ell_x");
        sc.medium.sigma_nu = number(m.at("sigma_nu"), "medium.sigma_nu");
        if (m.contains("kernel")) {
            const std::string kernel = m.at("kernel").get<std::string>();
            if (kernel == "gaussian")
                sc.medium.kernel = CorrelationKernel::gaussian;
            else if (kernel == "exponential-z-gaussian-x")
                sc.medium.kernel = CorrelationKernel::exponential_axial;
            else
                throw ConfigError("medium.kernel: unknown kernel '" + kernel + "'");
        }
    }
    {
        const json& s = j.at("source");
        require_keys(s, "source", {"position", "kind"}, {"alpha", "bandwidth"});
        sc.source.position = number(s.at("position"), "source.position");
        const std::string kind = s.at("kind").get<std::string>();
        if (kind == "time-harmonic")
            sc.source.kind = SourceSpec::Kind::time_harmonic;
        else if (kind == "broadband")
            sc.source.kind = SourceSpec::Kind::broadband;
        else
            throw ConfigError("source.kind: expected 'time-harmonic' or 'broadband'");
        if (s.contains("alpha")) sc.source.alpha = number(s.at("alpha"), "source.alpha");
        if (s.contains("bandwidth"))
            sc.source.bandwidth = number(s.at("bandwidth"), "source.bandwidth");
    }
    {
        const json& r = j.at("reflector");
        require_keys(r, "reflector", {"position", "range", "strength"}, {});
        sc.reflector.position = number(r.at("position"), "reflector.position");
        sc.reflector.range = number(r.at("range"), "reflector.range");
        sc.reflector.strength = number(r.at("strength"), "reflector.strength");
    }
    {
        const json& a = j.at("array");
        require_keys(a, "array", {"lo", "hi", "spacing"}, {});
        config.ensemble.scenario.array = ArrayGeometry::interval(
            number(a.at("lo"), "array.lo"), number(a.at("hi"), "array.hi"),
            number(a.at("spacing"), "array.spacing"));
    }
    if (j.contains("propagation")) {
        const json& p = j.at("propagation");
        require_keys(p, "propagation", {}, {"distance", "equip_multiple", "step"});
        if (p.contains("distance")) sc.distance = number(p.at("distance"), "propagation.distance");
        if (p.contains("equip_multiple"))
            sc.equip_multiple = number(p.at("equip_multiple"), "propagation.equip_multiple");
        if (p.contains("step")) sc.step = number(p.at("step"), "propagation.step");
    }
    {
        const json& e = j.at("ensemble");
        require_keys(e, "ensemble", {"realizations", "seed"},
                     {"workers", "waive_regime_checks", "checkpoints", "probes",
                      "collect_kirchhoff", "snapshots"});
        config.ensemble.realizations = e.at("realizations").get<std::size_t>();
        config.ensemble.seed = e.at("seed").get<std::uint64_t>();
        if (e.contains("workers")) config.ensemble.workers = e.at("workers").get<unsigned>();
        if (e.contains("waive_regime_checks"))
            config.ensemble.waive_regime_checks = e.at("waive_regime_checks").get<bool>();
        if (e.contains("checkpoints"))
            config.ensemble.checkpoints = e.at("checkpoints").get<std::vector<double>>();
        if (e.contains("snapshots"))
            config.ensemble.snapshots = e.at("snapshots").get<std::vector<std::size_t>>();
        if (e.contains("probes")) {
            for (const auto& p : e.at("probes")) {
                if (!p.is_array() || p.size() != 2)
                    throw ConfigError("ensemble.probes: expected [x, z] pairs");
                config.ensemble.probes.push_back(
                    ProbePoint{p[0].get<double>(), p[1].get<double>()});
            }
        }
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        require_keys(g, "grid", {"x", "z"}, {});
        config.grid.x = linear_axis(g.at("x"), "grid.x");
        config.grid.z = linear_axis(g.at("z"), "grid.z");
    }
    if (j.at("ensemble").contains("collect_kirchhoff") &&
        j.at("ensemble").at("collect_kirchhoff").get<bool>()) {
        if (config.grid.x.empty()) throw ConfigError("collect_kirchhoff requires a grid");
        config.ensemble.kirchhoff_grid = config.grid;
    }
    if (j.contains("image")) {
        const json& im = j.at("image");
        require_keys(im, "image", {}, {"functionals", "mode"});
        if (im.contains("functionals"))
            config.functionals = im.at("functionals").get<std::vector<std::string>>();
        if (im.contains("mode")) config.image_mode = im.at("mode").get<std::string>();
        for (const auto& f : config.functionals)
            if (f != "KM" && f != "FA" && f != "LA")
                throw ConfigError("image.functionals: unknown functional '" + f + "'");
        if (config.image_mode != "single" && config.image_mode != "mean")
            throw ConfigError("image.mode: expected 'single' or 'mean'");
    }
    if (config.functionals.empty()) config.functionals = {"FA"};
    if (j.contains("output_dir"))
        config.output_dir = j.at("output_dir").get<std::string>();

    config.canonical = json(j).dump();  // nlohmann objects iterate sorted by key
    config.hash = fnv1a_hex(config.canonical);
    return config;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

} // namespace wgmig
