#include "ingress/nav.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace ingress {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

inline double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Yaw command keeping the window centroid near the frame's center column.
// Yaw, like the translations, moves in fixed steps: one step whenever the
// centroid drifts outside the centering tolerance.
double centering_yaw(const WindowCandidate& det, int frame_width, const NavParams& p) {
    const double du = det.centroid.x - frame_width / 2.0;
    if (std::fabs(du) <= p.centering_px_tol) return 0.0;
    return du > 0.0 ? p.yaw_step : -p.yaw_step;
}

// Vertical command driving the centroid row toward the frame center row
// (positive = down), capped at the lateral step size.
double centering_vertical(const WindowCandidate& det, int frame_height, const NavParams& p) {
    const double dv = det.centroid.y - frame_height / 2.0;
    return std::clamp(p.vertical_gain * dv, -p.lateral_step, p.lateral_step);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t step) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (step + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

const char* nav_phase_name(NavPhase phase) {
    switch (phase) {
        case NavPhase::Search: return "Search";
        case NavPhase::Align: return "Align";
        case NavPhase::Approach: return "Approach";
        case NavPhase::Recover: return "Recover";
        case NavPhase::Ingressed: return "Ingressed";
    }
    return "?";
}

void NavParams::validate() const {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("NavParams: " + msg); };
    if (!(yaw_step > 0.0)) bad("yaw_step must be positive");
    if (!(lateral_step > 0.0)) bad("lateral_step must be positive");
    if (!(forward_step > 0.0)) bad("forward_step must be positive");
    if (!(vertical_gain > 0.0)) bad("vertical_gain must be positive");
    if (!(align_tolerance > 0.0)) bad("align_tolerance must be positive");
    if (!(validity_bound > align_tolerance)) bad("validity_bound must exceed align_tolerance");
    if (max_recover_steps < 1) bad("max_recover_steps must be >= 1");
    if (!(centering_px_tol > 0.0)) bad("centering_px_tol must be positive");
}

NavDecision nav_step(const NavState& state, const NavObservation& obs, const NavParams& params) {
    if (obs.angles && !obs.detection)
        throw std::invalid_argument("nav_step: angles present without a detection");

    NavDecision d;
    d.state = state;

    switch (state.phase) {
        case NavPhase::Search: {
            if (!obs.detection) {
                d.command.yaw = params.yaw_step;
                return d;
            }
            d.state.phase = NavPhase::Align;
            return d;
        }

        case NavPhase::Align: {
            if (!obs.detection) {
                d.command.forward = -params.forward_step;
                d.state.phase = NavPhase::Recover;
                d.state.recover_count = 1;
                return d;
            }
            const WindowCandidate& det = *obs.detection;
            const double yaw_cmd = centering_yaw(det, obs.frame_width, params);

            if (!obs.angles || std::fabs(obs.angles->psi) > params.validity_bound) {
                // Invalid relative angle: yaw only, no translation.
                d.command.yaw = yaw_cmd;
                return d;
            }
            const double psi = obs.angles->psi;
            if (std::fabs(psi) > params.align_tolerance) {
                d.command.lateral = -sign_of(psi) * params.lateral_step;
                d.command.vertical = centering_vertical(det, obs.frame_height, params);
                d.command.yaw = yaw_cmd;
                return d;
            }
            const bool centered =
                std::fabs(det.centroid.x - obs.frame_width / 2.0) <= params.centering_px_tol &&
                std::fabs(det.centroid.y - obs.frame_height / 2.0) <= params.centering_px_tol;
            if (!centered) {
                d.command.vertical = centering_vertical(det, obs.frame_height, params);
                d.command.yaw = yaw_cmd;
                return d;
            }
            d.state.phase = NavPhase::Approach;
            return d;
        }

        case NavPhase::Approach: {
            if (!obs.detection) {
                if (state.blind_steps > 0) {
                    // Terminal stretch: the window has outgrown the frame;
                    // spend the banked range estimate flying straight in.
                    d.command.forward = params.forward_step;
                    d.state.blind_steps = state.blind_steps - 1;
                    return d;
                }
                d.command.forward = -params.forward_step;
                d.state.phase = NavPhase::Recover;
                d.state.recover_count = 1;
                return d;
            }
            const WindowCandidate& det = *obs.detection;
            const double yaw_cmd = centering_yaw(det, obs.frame_width, params);

            // Bank a blind-forward budget once the opening dominates the
            // frame and a range estimate is available.
            d.state.blind_steps = 0;
            if (obs.distance && opening_width(det).total >= 0.4 * obs.frame_width) {
                d.state.blind_steps =
                    static_cast<int>(std::ceil(*obs.distance / params.forward_step)) + 5;
            }

            if (!obs.angles || std::fabs(obs.angles->psi) > params.validity_bound) {
                d.command.yaw = yaw_cmd;
                return d;
            }
            if (std::fabs(obs.angles->psi) > params.align_tolerance) {
                d.command.yaw = yaw_cmd;
                d.state.phase = NavPhase::Align;
                return d;
            }
            d.command.forward = params.forward_step;
            d.command.vertical = centering_vertical(det, obs.frame_height, params);
            d.command.yaw = yaw_cmd;
            return d;
        }

        case NavPhase::Recover: {
            if (obs.detection) {
                d.state.phase = NavPhase::Align;
                d.state.recover_count = 0;
                return d;
            }
            if (state.recover_count >= params.max_recover_steps) {
                d.state.phase = NavPhase::Search;
                d.state.recover_count = 0;
                return d;
            }
            d.command.forward = -params.forward_step;
            d.state.recover_count = state.recover_count + 1;
            return d;
        }

        case NavPhase::Ingressed:
            return d;
    }
    return d;
}

OpeningWidth opening_width(const WindowCandidate& candidate) {
    const Vec2 tl = candidate.corners[0];
    const Vec2 tr = candidate.corners[1];
    const Vec2 br = candidate.corners[2];
    const Vec2 bl = candidate.corners[3];

    OpeningWidth w;
    w.left = std::hypot(bl.x - tl.x, bl.y - tl.y);
    w.right = std::hypot(br.x - tr.x, br.y - tr.y);
    const Vec2 mid_left{(tl.x + bl.x) / 2.0, (tl.y + bl.y) / 2.0};
    const Vec2 mid_right{(tr.x + br.x) / 2.0, (tr.y + br.y) / 2.0};
    w.total = std::hypot(mid_right.x - mid_left.x, mid_right.y - mid_left.y);
    return w;
}

Histogram reference_from_color(const Color& color) {
    Histogram h;
    h.bins[Histogram::bin_index(color[0], color[1], color[2])] = 1.0;
    return h;
}

MissionLog run_mission(const MissionSetup& setup) {
    setup.world.validate();
    setup.intrinsics.validate();
    setup.detect.validate();
    setup.nav.validate();
    setup.geometry.validate();

    const Histogram reference = reference_from_color(setup.world.interior_color);
    const CommandLimits limits = setup.nav.limits();

    MissionLog log;
    UavState uav = setup.initial_state;
    NavState nav_state;

    for (int i = 0; i < setup.max_steps; ++i) {
        // A vehicle on or past the wall plane outside the opening has
        // collided; the run ends without ingress.
        if ((uav.position - setup.world.wall_point).dot(setup.world.wall_normal) < 1e-9) break;

        const RgbImage frame = render(setup.world, uav, setup.intrinsics, setup.frame_width,
                                      setup.frame_height, mix_seed(setup.seed, i));
        if (setup.frame_sink) setup.frame_sink(i, frame);
        const std::optional<WindowCandidate> det =
            detect_window(frame, reference, setup.detect);

        NavObservation obs;
        obs.detection = det;
        obs.frame_width = setup.frame_width;
        obs.frame_height = setup.frame_height;
        if (det) {
            try {
                const WindowPoseResult wp = window_pose(*det, setup.geometry, setup.intrinsics);
                obs.angles = wp.angles;
                obs.distance = wp.pose.translation.z();
            } catch (const std::exception&) {
                // degenerate correspondence; navigate without angles
            }
        }

        const NavDecision decision = nav_step(nav_state, obs, setup.nav);
        nav_state = decision.state;
        uav = step(uav, decision.command, limits);

        const GroundTruth gt = ground_truth(setup.world, uav, setup.intrinsics);
        if (gt.crossed_inside) {
            log.ingressed = true;
            nav_state.phase = NavPhase::Ingressed;
        }

        MissionRecord rec;
        rec.step = i;
        rec.phase = nav_state.phase;
        rec.x = uav.position.x();
        rec.y = uav.position.y();
        rec.z = uav.position.z();
        rec.yaw = uav.yaw;
        rec.est_psi_deg = obs.angles ? obs.angles->psi * 180.0 / M_PI : kNan;
        rec.true_psi_deg = gt.relative_yaw * 180.0 / M_PI;
        if (det) {
            const OpeningWidth w = opening_width(*det);
            rec.opening_total_px = w.total;
            rec.opening_left_px = w.left;
            rec.opening_right_px = w.right;
        } else {
            rec.opening_total_px = kNan;
            rec.opening_left_px = kNan;
            rec.opening_right_px = kNan;
        }
        rec.detected = det.has_value();
        rec.command = decision.command;
        log.records.push_back(rec);
        log.steps_used = i + 1;

        if (log.ingressed) break;
    }
    return log;
}

std::string mission_csv(const MissionLog& log) {
    std::string out =
        "step,phase,x,y,z,yaw,est_psi_deg,true_psi_deg,opening_total_px,"
        "opening_left_px,opening_right_px,detected\n";
    char line[512];
    for (const MissionRecord& r : log.records) {
        std::snprintf(line, sizeof(line),
                      "%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", r.step,
                      nav_phase_name(r.phase), r.x, r.y, r.z, r.yaw, r.est_psi_deg,
                      r.true_psi_deg, r.opening_total_px, r.opening_left_px, r.opening_right_px,
                      r.detected ? 1 : 0);
        out += line;
    }
    return out;
}

}  // namespace ingress
