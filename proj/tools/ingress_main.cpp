#include <CLI11.hpp>
#include <optional>
#include <string>

#include "ingress/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Monocular window detection, relative pose estimation, and "
                 "simulated window-ingress navigation"};
    app.require_subcommand(1);

    std::string config_path, input_path, output_path;
    std::uint64_t seed = 0;

    auto* detect = app.add_subcommand("detect", "Detect the window in one PPM frame");
    detect->add_option("--input", input_path, "Input frame (binary PPM)")->required();
    detect->add_option("--config", config_path, "Configuration file");
    detect->add_option("--output", output_path, "Annotated output PPM");

    auto* pose = app.add_subcommand("pose", "Print the relative pose for one PPM frame");
    pose->add_option("--input", input_path, "Input frame (binary PPM)")->required();
    pose->add_option("--config", config_path, "Configuration file");

    std::string dump_dir;
    int dump_every = 25;
    auto* simulate = app.add_subcommand("simulate", "Run the closed-loop ingress mission");
    simulate->add_option("--config", config_path, "Configuration file");
    simulate->add_option("--output", output_path, "Mission trace CSV")->required();
    auto* seed_opt = simulate->add_option("--seed", seed, "Override the configured seed");
    simulate->add_option("--dump-frames", dump_dir, "Directory for periodic camera-frame PPM dumps");
    simulate->add_option("--dump-every", dump_every, "Dump every Nth frame (default 25)");

    auto* plot = app.add_subcommand("plot", "Render mission charts from a trace CSV");
    plot->add_option("--input", input_path, "Mission trace CSV")->required();
    plot->add_option("--output", output_path, "Output SVG")->required();

    CLI11_PARSE(app, argc, argv);

    auto opt = [](const std::string& s) {
        return s.empty() ? std::optional<std::string>{} : std::optional<std::string>{s};
    };

    try {
        if (detect->parsed())
            return ingress::cli::cmd_detect({input_path, opt(config_path), opt(output_path)});
        if (pose->parsed()) return ingress::cli::cmd_pose({input_path, opt(config_path)});
        if (simulate->parsed()) {
            std::optional<std::uint64_t> seed_override;
            if (seed_opt->count() > 0) seed_override = seed;
            return ingress::cli::cmd_simulate(
                {opt(config_path), output_path, seed_override, opt(dump_dir), dump_every});
        }
        if (plot->parsed()) return ingress::cli::cmd_plot({input_path, output_path});
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return ingress::cli::kInputError;
    }
    return 0;
}
