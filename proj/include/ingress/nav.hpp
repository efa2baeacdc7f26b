#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ingress/detect.hpp"
#include "ingress/pose.hpp"
#include "ingress/simworld.hpp"

namespace ingress {

// Iterative visual navigation: search for the window by yawing, reduce the
// relative yaw with lateral motion while holding the window centered, then
// approach; back away when detection is lost. Translation commands are never
// issued while the measured |psi| exceeds the validity bound.

enum class NavPhase { Search, Align, Approach, Recover, Ingressed };

const char* nav_phase_name(NavPhase phase);

struct NavParams {
    double yaw_step = 2.0 * M_PI / 180.0;       // Search yaw increment, also caps centering yaw
    double lateral_step = 0.05;                 // world units; also caps the vertical command
    double forward_step = 0.1;                  // world units
    double vertical_gain = 0.002;               // world units per pixel of row error
    double align_tolerance = 2.0 * M_PI / 180.0;
    double validity_bound = 60.0 * M_PI / 180.0;
    int max_recover_steps = 50;
    double centering_px_tol = 25.0;

    CommandLimits limits() const {
        return {forward_step, lateral_step, lateral_step, yaw_step};
    }
    void validate() const;
};

struct NavObservation {
    std::optional<WindowCandidate> detection;
    std::optional<EulerAngles> angles;  // present only when detection is present
    std::optional<double> distance;     // estimated range to the window plane (world units)
    int frame_width = 0;
    int frame_height = 0;
};

/// Phase plus controller memory: the Recover budget already spent and the
/// remaining blind-forward budget banked for the final approach (the window
/// outgrows the frame shortly before the crossing, so the last stretch is
/// flown on the most recent range estimate).
struct NavState {
    NavPhase phase = NavPhase::Search;
    int recover_count = 0;
    int blind_steps = 0;
};

struct NavDecision {
    NavCommand command;
    NavState state;
};

/// One controller tick. Phase transitions:
///   Search   -> Search | Align
///   Align    -> Align | Approach | Recover
///   Approach -> Approach | Align | Recover
///   Recover  -> Recover | Align | Search
///   Ingressed is terminal and entered only by the mission harness.
NavDecision nav_step(const NavState& state, const NavObservation& obs, const NavParams& params);

struct OpeningWidth {
    double total = 0.0;  // px, distance between the vertical edge midpoints
    double left = 0.0;   // px, length of the left vertical edge
    double right = 0.0;  // px, length of the right vertical edge
};

OpeningWidth opening_width(const WindowCandidate& candidate);

struct MissionRecord {
    int step = 0;
    NavPhase phase = NavPhase::Search;  // phase after this step's transition
    double x = 0.0, y = 0.0, z = 0.0, yaw = 0.0;
    double est_psi_deg = 0.0;  // NaN when no pose was available
    double true_psi_deg = 0.0;
    double opening_total_px = 0.0;  // NaN when not detected
    double opening_left_px = 0.0;
    double opening_right_px = 0.0;
    bool detected = false;
    NavCommand command;  // not serialized; used for log replay checks
};

struct MissionLog {
    std::vector<MissionRecord> records;
    bool ingressed = false;
    int steps_used = 0;
};

struct MissionSetup {
    WorldModel world;
    UavState initial_state;
    CameraIntrinsics intrinsics;
    int frame_width = 640;
    int frame_height = 480;
    DetectParams detect;
    NavParams nav;
    WindowGeometry geometry;
    int max_steps = 500;
    std::uint64_t seed = 1;
    /// Optional tap on the camera feed (frame dumps, debugging).
    std::function<void(int step, const RgbImage& frame)> frame_sink;
};

/// Reference histogram for the mission's target: the window interior color.
Histogram reference_from_color(const Color& color);

/// Closed loop: render, detect, estimate pose, decide, move; repeats until
/// the ground-truth crossing flag fires (phase becomes Ingressed) or the
/// step budget runs out.
MissionLog run_mission(const MissionSetup& setup);

/// CSV with header:
/// step,phase,x,y,z,yaw,est_psi_deg,true_psi_deg,opening_total_px,
/// opening_left_px,opening_right_px,detected
std::string mission_csv(const MissionLog& log);

}  // namespace ingress
