// wgmig: waveguide correlation-imaging simulator.
//
// Subcommands
//   modes     dispersion table of the propagating modes
//   moments   coupled-power curves and the equipartition distance
//   image     single-realization or ensemble-mean images (KM / FA / LA)
//   psf       tabulated point spread profiles
//   ensemble  full ensemble statistics with NDJSON report
//   validate  acceptance suite, NDJSON output, nonzero exit on failure
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 runtime error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "wgmig/acceptance.hpp"
#include "wgmig/config.hpp"
#include "wgmig/errors.hpp"
#include "wgmig/io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wgmig;

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out_dir;
};

RunConfig load_config(const GlobalArgs& args) {
    if (args.config_path.empty()) throw ConfigError("missing --config");
    RunConfig config = RunConfig::from_file(args.config_path);
    if (args.seed) config.ensemble.seed = *args.seed;
    if (args.workers) config.ensemble.workers = *args.workers;
    if (args.out_dir) config.output_dir = *args.out_dir;
    return config;
}

std::ofstream open_output(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.output_dir);
    std::ofstream out(config.output_dir / name);
    if (!out) throw std::runtime_error("cannot open output file " + name);
    return out;
}

int cmd_modes(const GlobalArgs& args) {
    RunConfig config = load_config(args);
    const ModeBasis basis(config.ensemble.scenario.waveguide);
    auto out = open_output(config, "modes.csv");
    CsvWriter csv(out,
                  {{"config_hash", config.hash},
                   {"seed", std::to_string(config.ensemble.seed)},
                   {"mode_count", std::to_string(basis.count())}},
                  {"j", "eigenvalue", "wavenumber", "wavenumber_derivative"});
    for (int j = 1; j <= basis.count(); ++j)
        csv.row({static_cast<double>(j), basis.eigenvalue(j), basis.wavenumber(j),
                 basis.wavenumber_derivative(j)});
    std::cout << "modes: N=" << basis.count() << " -> " << (config.output_dir / "modes.csv")
              << "\n";
    return 0;
}

int cmd_moments(const GlobalArgs& args) {
    RunConfig config = load_config(args);
    const Scenario& sc = config.ensemble.scenario;
    const MomentModel model = sc.moment_model();
    const double distance = sc.resolved_distance(model);

    auto out = open_output(config, "coupled_power.csv");
    CsvWriter csv(out,
                  {{"config_hash", config.hash},
                   {"seed", std::to_string(config.ensemble.seed)},
                   {"equip_distance", format_double(model.equip_distance)}},
                  {"z", "j", "value"});
    const int n = static_cast<int>(model.gamma.rows());
    const int samples = 200;
    for (int i = 0; i <= samples; ++i) {
        const double z = distance * static_cast<double>(i) / samples;
        const Eigen::VectorXd p = coupled_power_solve(model, z, 1);
        for (int j = 1; j <= n; ++j) csv.row({z, static_cast<double>(j), p(j - 1)});
    }

    auto report_out = open_output(config, "moments.ndjson");
    Report report;
    report.name = "moments";
    report.lines.push_back({"equip_distance", model.equip_distance, 0.0, 0.0, 0.0,
                            model.equip_distance > 0.0, ""});
    report.lines.push_back({"resolved_distance", distance, 0.0, 0.0, 0.0, true, ""});
    write_report_ndjson(report_out, report, config.hash, config.ensemble.seed);
    std::cout << "moments: L_equip=" << format_double(model.equip_distance) << "\n";
    return 0;
}

int cmd_psf(const GlobalArgs& args) {
    RunConfig config = args.config_path.empty() ? RunConfig{} : load_config(args);
    if (args.out_dir) config.output_dir = *args.out_dir;
    auto out = open_output(config, "psf.csv");
    CsvWriter csv(out, {{"config_hash", config.hash}}, {"offset", "cross_range", "range"});
    for (int i = -400; i <= 400; ++i) {
        const double u = 0.025 * i;
        csv.row({u, cross_range_psf(u), range_psf(u)});
    }
    std::cout << "psf: wrote " << (config.output_dir / "psf.csv") << "\n";
    return 0;
}

void write_images(const RunConfig& config, const std::vector<std::pair<std::string, ImageGrid>>&
                                               images) {
    fs::create_directories(config.output_dir);
    for (const auto& [name, image] : images) {
        write_image_csv(config.output_dir / (name + ".csv"), image, config.hash,
                        config.ensemble.seed);
        write_image_metadata(config.output_dir / "images.ndjson", image, image.tag, config.hash,
                             config.ensemble.seed);
    }
}

// Single-realization pipeline: medium -> propagator -> fields -> covariance.
ModalCorrelation single_realization(const Scenario& scenario, std::uint64_t seed,
                                    Eigen::VectorXcd* total_modal) {
    Scenario sc = scenario;
    sc.medium.seed = seed;
    const ModeBasis basis = sc.make_basis();
    const MomentModel model = sc.moment_model();
    const double distance = sc.resolved_distance(model);
    const double step = sc.resolved_step(basis);
    const double eps = sc.medium.epsilon;
    const MediumSampler sampler(sc.medium, basis, distance / (eps * eps));
    const CouplingProcess coupling = sampler.sample(0);

    if (sc.source.kind == SourceSpec::Kind::time_harmonic) {
        const PropagatorMatrix t = propagate(basis.omega(), coupling, distance, eps, step);
        const ModalField primary = primary_modal_data(t, sc.source, basis);
        const ModalField secondary = secondary_modal_data(t, sc.source, sc.reflector, basis);
        if (total_modal) *total_modal = primary.amplitude + secondary.amplitude;
        return make_modal_correlation(primary, secondary);
    }
    const BroadbandSpec bb =
        BroadbandSpec::gaussian(sc.source, eps, sc.broadband_nodes, sc.broadband_span);
    const ModalDataFactory factory = [&](double omega) {
        const PropagatorMatrix t = propagate(omega, coupling, distance, eps, step);
        const ModeBasis basis_h(sc.waveguide, omega);
        return std::make_pair(primary_modal_data(t, sc.source, basis_h),
                              secondary_modal_data(t, sc.source, sc.reflector, basis_h));
    };
    return broadband_modal_correlation(bb, basis.omega(), factory);
}

int cmd_image(const GlobalArgs& args) {
    RunConfig config = load_config(args);
    if (config.grid.x.empty()) throw ConfigError("image: config needs a grid");
    const Scenario& sc = config.ensemble.scenario;
    const ModeBasis basis = sc.make_basis();
    const bool want_km =
        std::find(config.functionals.begin(), config.functionals.end(), "KM") !=
        config.functionals.end();
    const bool time_harmonic = sc.source.kind == SourceSpec::Kind::time_harmonic;

    std::vector<std::pair<std::string, ImageGrid>> images;
    if (config.image_mode == "single") {
        Eigen::VectorXcd total;
        const ModalCorrelation corr =
            single_realization(sc, config.ensemble.seed, time_harmonic ? &total : nullptr);
        for (const auto& f : config.functionals) {
            if (f == "FA")
                images.emplace_back(
                    "image_fa", CorrelationImager::full_aperture(corr, basis).image(config.grid));
            else if (f == "LA")
                images.emplace_back("image_la",
                                    CorrelationImager::limited_aperture(corr, sc.array, basis)
                                        .image(config.grid));
            else if (f == "KM" && time_harmonic)
                images.emplace_back("image_km", kirchhoff_image(total, basis, config.grid));
        }
    } else {
        EnsembleConfig ensemble = config.ensemble;
        if (want_km && time_harmonic) ensemble.kirchhoff_grid = config.grid;
        ensemble.snapshots.clear();
        const EnsembleStats stats = run_ensemble(ensemble);
        const ModalCorrelation* corr =
            stats.mean_correlation ? &*stats.mean_correlation : nullptr;
        for (const auto& f : config.functionals) {
            if (f == "FA" && corr)
                images.emplace_back(
                    "image_fa", CorrelationImager::full_aperture(*corr, basis).image(config.grid));
            else if (f == "LA" && corr)
                images.emplace_back("image_la",
                                    CorrelationImager::limited_aperture(*corr, sc.array, basis)
                                        .image(config.grid));
            else if (f == "KM" && stats.kirchhoff) {
                ImageGrid km;
                km.grid = stats.kirchhoff->grid;
                km.tag = "KM";
                km.values = stats.kirchhoff->mean.real();
                km.magnitude = stats.kirchhoff->mean.cwiseAbs();
                images.emplace_back("image_km_mean", km);
            }
        }
    }
    write_images(config, images);
    std::cout << "image: wrote " << images.size() << " grids to " << config.output_dir << "\n";
    return 0;
}

int cmd_ensemble(const GlobalArgs& args) {
    RunConfig config = load_config(args);
    const EnsembleStats stats = run_ensemble(config.ensemble);

    auto out = open_output(config, "ensemble.ndjson");
    Report report;
    report.name = "ensemble";
    report.lines.push_back({"realizations", static_cast<double>(stats.realizations), 0.0, 0.0,
                            0.0, true, ""});
    report.lines.push_back({"distance", stats.distance, 0.0, 0.0, 0.0, true, ""});
    report.lines.push_back({"equip_distance", stats.equip_distance, 0.0, 0.0, 0.0, true, ""});
    report.lines.push_back({"max_unitarity_defect", stats.max_unitarity_defect, 0.0, 0.0, 1e-8,
                            stats.max_unitarity_defect <= 1e-8, ""});
    report.lines.push_back({"mean_born_ratio", stats.mean_born_ratio, 0.0, 0.0, 0.1,
                            stats.mean_born_ratio <= 0.1, ""});
    for (std::size_t p = 0; p < stats.probes.size(); ++p) {
        const auto& probe = stats.probes[p];
        report.lines.push_back({"probe_" + std::to_string(p) + "_mean", probe.mean(),
                                probe.stderr_of_mean(), 0.0, 0.0, true, ""});
        report.lines.push_back({"probe_" + std::to_string(p) + "_variance", probe.variance(), 0.0,
                                0.0, 0.0, true, ""});
    }
    for (const auto& w : stats.warnings)
        report.lines.push_back({"warning", 0.0, 0.0, 0.0, 0.0, true, w});
    write_report_ndjson(out, report, config.hash, config.ensemble.seed);

    if (!stats.moments.empty()) {
        auto csv_out = open_output(config, "transmission_power.csv");
        CsvWriter csv(csv_out,
                      {{"config_hash", config.hash}, {"seed", std::to_string(config.ensemble.seed)}},
                      {"distance", "j", "l", "mean_power", "stderr"});
        for (const auto& table : stats.moments)
            for (Eigen::Index j = 0; j < table.mean_power.rows(); ++j)
                for (Eigen::Index l = 0; l < table.mean_power.cols(); ++l)
                    csv.row({table.distance, static_cast<double>(j + 1),
                             static_cast<double>(l + 1), table.mean_power(j, l),
                             table.stderr_power(j, l)});
    }
    std::cout << "ensemble: M=" << stats.realizations << " L=" << format_double(stats.distance)
              << " -> " << config.output_dir << "\n";
    return 0;
}

int cmd_validate(const GlobalArgs& args) {
    acceptance::Options options;
    if (args.workers) options.workers = *args.workers;
    fs::path out_dir = args.out_dir ? fs::path(*args.out_dir) : fs::path("out");
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "validate.ndjson");

    const std::vector<Report> reports = acceptance::run(options);
    bool all_pass = true;
    for (const auto& report : reports) {
        write_report_ndjson(out, report, "acceptance", 0);
        for (const auto& line : report.lines) {
            std::cout << (line.pass ? "PASS" : "FAIL") << "  " << report.name << ": "
                      << line.quantity << " = " << format_double(line.estimate) << "\n";
            all_pass = all_pass && line.pass;
        }
    }
    std::cout << (all_pass ? "validate: all criteria passed" : "validate: FAILURES") << "\n";
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"waveguide correlation-imaging simulator"};
    app.require_subcommand(1);

    GlobalArgs args;
    app.add_option("--config", args.config_path, "JSON run configuration");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the master seed");
    unsigned workers_value = 0;
    auto* workers_opt = app.add_option("--workers", workers_value, "worker thread cap");
    std::string out_value;
    auto* out_opt = app.add_option("--out", out_value, "output directory");

    auto* modes = app.add_subcommand("modes", "dispersion table");
    auto* moments = app.add_subcommand("moments", "coupled-power curves");
    auto* image = app.add_subcommand("image", "migration images");
    auto* psf = app.add_subcommand("psf", "point spread profiles");
    auto* ensemble = app.add_subcommand("ensemble", "ensemble statistics");
    auto* validate = app.add_subcommand("validate", "acceptance suite");

    try {
        app.parse(argc, argv);
        if (*seed_opt) args.seed = seed_value;
        if (*workers_opt) args.workers = workers_value;
        if (*out_opt) args.out_dir = out_value;

        if (modes->parsed()) return cmd_modes(args);
        if (moments->parsed()) return cmd_moments(args);
        if (image->parsed()) return cmd_image(args);
        if (psf->parsed()) return cmd_psf(args);
        if (ensemble->parsed()) return cmd_ensemble(args);
        if (validate->parsed()) return cmd_validate(args);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
