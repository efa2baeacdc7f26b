#include "ingress/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "ingress/annotate.hpp"
#include "ingress/config.hpp"
#include "ingress/pnm.hpp"
#include "ingress/svgplot.hpp"

namespace ingress::cli {
namespace {

RunConfig config_or_default(const std::optional<std::string>& path) {
    return path ? load_config(*path) : default_config();
}

int report_config_error(const ConfigError& e) {
    std::cerr << "error: invalid configuration:\n";
    for (const std::string& p : e.problems()) std::cerr << "  - " << p << "\n";
    return kConfigError;
}

// When the input frame differs from the configured camera size, keep the
// relative area window rather than the absolute pixel bounds.
DetectParams params_for_frame(const RunConfig& cfg, const RgbImage& frame) {
    DetectParams params = cfg.detect;
    if (!cfg.area_explicit &&
        (frame.width != cfg.frame_width || frame.height != cfg.frame_height)) {
        const DetectParams derived = DetectParams::defaults_for(frame.width, frame.height);
        params.area_min = derived.area_min;
        params.area_max = derived.area_max;
    }
    return params;
}

}  // namespace

int cmd_detect(const DetectArgs& args) {
    RunConfig cfg;
    try {
        cfg = config_or_default(args.config_path);
    } catch (const ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    RgbImage frame;
    Histogram reference;
    try {
        frame = read_ppm(args.input_path);
        reference = cfg.reference_histogram();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    const std::optional<WindowCandidate> det =
        detect_window(frame, reference, params_for_frame(cfg, frame));
    if (!det) {
        std::cout << "0\n";
        return kNoWindow;
    }

    if (args.output_path) {
        RgbImage annotated = frame;
        annotate_detection(annotated, *det);
        try {
            write_ppm(annotated, *args.output_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kInputError;
        }
    }

    char line[512];
    std::snprintf(line, sizeof(line),
                  "1,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.4f",
                  det->corners[0].x, det->corners[0].y, det->corners[1].x, det->corners[1].y,
                  det->corners[2].x, det->corners[2].y, det->corners[3].x, det->corners[3].y,
                  det->centroid.x, det->centroid.y, det->area, det->hist_distance);
    std::cout << line << "\n";
    return kOk;
}

int cmd_pose(const PoseArgs& args) {
    RunConfig cfg;
    try {
        cfg = config_or_default(args.config_path);
    } catch (const ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    RgbImage frame;
    Histogram reference;
    try {
        frame = read_ppm(args.input_path);
        reference = cfg.reference_histogram();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    const std::optional<WindowCandidate> det =
        detect_window(frame, reference, params_for_frame(cfg, frame));
    if (!det) {
        std::cout << "0\n";
        return kNoWindow;
    }

    try {
        const WindowPoseResult result = window_pose(*det, cfg.geometry, cfg.camera);
        const double rad2deg = 180.0 / M_PI;
        char line[256];
        std::snprintf(line, sizeof(line), "%.4f,%.4f,%.4f,%.4f,%.4f,%.4f",
                      result.angles.theta * rad2deg, result.angles.phi * rad2deg,
                      result.angles.psi * rad2deg, result.pose.translation.x(),
                      result.pose.translation.y(), result.pose.translation.z());
        std::cout << line << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoWindow;
    }
}

int cmd_simulate(const SimulateArgs& args) {
    RunConfig cfg;
    try {
        cfg = config_or_default(args.config_path);
    } catch (const ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    if (args.seed_override) cfg.seed = *args.seed_override;

    MissionSetup setup = cfg.mission_setup();
    if (args.dump_dir) {
        const std::string dir = *args.dump_dir;
        const int every = std::max(1, args.dump_every);
        setup.frame_sink = [dir, every](int step, const RgbImage& frame) {
            if (step % every != 0) return;
            char name[64];
            std::snprintf(name, sizeof(name), "/frame_%04d.ppm", step);
            write_ppm(frame, dir + name);
        };
    }

    const MissionLog log = run_mission(setup);

    std::ofstream out(args.output_path);
    if (!out) {
        std::cerr << "error: cannot open " << args.output_path << " for writing\n";
        return kInputError;
    }
    out << mission_csv(log);
    out.close();

    std::cerr << "mission: " << (log.ingressed ? "ingressed" : "not ingressed") << " after "
              << log.steps_used << " step(s)\n";
    return log.ingressed ? kOk : kNotIngressed;
}

int cmd_plot(const PlotArgs& args) {
    std::ifstream in(args.input_path);
    if (!in) {
        std::cerr << "error: cannot open " << args.input_path << "\n";
        return kInputError;
    }
    std::string csv((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    try {
        write_mission_charts(csv, args.output_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}

}  // namespace ingress::cli
