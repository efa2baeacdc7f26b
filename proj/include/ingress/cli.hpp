#pragma once

#include <optional>
#include <string>

namespace ingress::cli {

// Exit codes shared by all subcommands.
enum ExitCode {
    kOk = 0,
    kNoWindow = 2,     // detect: pipeline ran but found no window
    kInputError = 3,   // unreadable/malformed input file
    kConfigError = 4,  // configuration failed validation
    kNotIngressed = 5  // simulate: step budget exhausted before ingress
};

struct DetectArgs {
    std::string input_path;                 // PPM frame
    std::optional<std::string> config_path;
    std::optional<std::string> output_path;  // annotated PPM
};

struct PoseArgs {
    std::string input_path;  // PPM frame
    std::optional<std::string> config_path;
};

struct SimulateArgs {
    std::optional<std::string> config_path;
    std::string output_path;  // mission CSV
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> dump_dir;  // write every Nth camera frame as PPM
    int dump_every = 25;
};

struct PlotArgs {
    std::string input_path;   // mission CSV
    std::string output_path;  // SVG
};

/// Runs detection on one frame. On success writes the annotated image (when
/// requested) and prints one record line:
///   1,x0,y0,x1,y1,x2,y2,x3,y3,cx,cy,area,hist_distance
/// Prints "0" and returns kNoWindow when nothing is found.
int cmd_detect(const DetectArgs& args);

/// Detects the window and prints the relative pose as one line:
///   theta_deg,phi_deg,psi_deg,tx,ty,tz
int cmd_pose(const PoseArgs& args);

/// Runs the closed-loop mission and writes the trace CSV. Returns kOk only
/// when the vehicle ingressed within the step budget.
int cmd_simulate(const SimulateArgs& args);

/// Renders the two mission charts from a trace CSV into one SVG file.
int cmd_plot(const PlotArgs& args);

}  // namespace ingress::cli
