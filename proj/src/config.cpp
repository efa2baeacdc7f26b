#include "ingress/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ingress/pnm.hpp"

namespace ingress {
namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& v, double& out) {
    char* end = nullptr;
    out = std::strtod(v.c_str(), &end);
    return end && *end == '\0' && !v.empty() && std::isfinite(out);
}

bool parse_int(const std::string& v, int& out) {
    double d;
    if (!parse_double(v, d) || d != std::floor(d)) return false;
    out = static_cast<int>(d);
    return true;
}

bool parse_u64(const std::string& v, std::uint64_t& out) {
    if (v.empty()) return false;
    char* end = nullptr;
    out = std::strtoull(v.c_str(), &end, 10);
    return end && *end == '\0';
}

bool parse_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "on") {
        out = true;
        return true;
    }
    if (v == "false" || v == "0" || v == "off") {
        out = false;
        return true;
    }
    return false;
}

std::vector<std::string> split_commas(const std::string& v) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

bool parse_color(const std::string& v, Color& out) {
    const auto parts = split_commas(v);
    if (parts.size() != 3) return false;
    for (int i = 0; i < 3; ++i) {
        int c;
        if (!parse_int(parts[i], c) || c < 0 || c > 255) return false;
        out[i] = static_cast<std::uint8_t>(c);
    }
    return true;
}

bool parse_vec3(const std::string& v, Eigen::Vector3d& out) {
    const auto parts = split_commas(v);
    if (parts.size() != 3) return false;
    for (int i = 0; i < 3; ++i)
        if (!parse_double(parts[i], out[i])) return false;
    return true;
}

bool parse_vec2(const std::string& v, Eigen::Vector2d& out) {
    const auto parts = split_commas(v);
    if (parts.size() != 2) return false;
    for (int i = 0; i < 2; ++i)
        if (!parse_double(parts[i], out[i])) return false;
    return true;
}

constexpr double kDegToRad = M_PI / 180.0;

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("configuration invalid (" + std::to_string(problems.size()) +
                         " problem(s)); first: " + (problems.empty() ? "?" : problems.front())),
      problems_(std::move(problems)) {}

RunConfig::RunConfig() {
    // Default scene: two mid-gray decoys flanking the window.
    WorldModel::Decoy d1;
    d1.offset = {-1.6, 0.0};
    d1.width = 1.2;
    d1.height = 0.9;
    d1.color = {120, 120, 120};
    WorldModel::Decoy d2;
    d2.offset = {1.4, 0.3};
    d2.width = 0.8;
    d2.height = 0.6;
    d2.color = {165, 165, 165};
    world.decoys = {d1, d2};

    // Default mission: 8 units out, 1 unit right of the window axis, at the
    // window center height, with a 15 degree initial yaw error.
    start.position = {2.0, 1.0, -1.5};
    start.yaw = 15.0 * kDegToRad;
}

std::string RunConfig::apply(const std::string& key, const std::string& value) {
    auto num = [&](double& field) {
        return parse_double(value, field) ? "" : "expected a number";
    };
    auto integer = [&](int& field) {
        return parse_int(value, field) ? "" : "expected an integer";
    };
    auto angle_deg = [&](double& field_rad) {
        double deg;
        if (!parse_double(value, deg)) return "expected a number (degrees)";
        field_rad = deg * kDegToRad;
        return "";
    };

    if (key == "camera.fx") return num(camera.fx);
    if (key == "camera.fy") return num(camera.fy);
    if (key == "camera.cx") return num(camera.cx);
    if (key == "camera.cy") return num(camera.cy);
    if (key == "camera.width") return integer(frame_width);
    if (key == "camera.height") return integer(frame_height);

    if (key == "detect.canny_low") return num(detect.canny_low);
    if (key == "detect.canny_high") return num(detect.canny_high);
    if (key == "detect.blur_kernel") return integer(detect.blur_kernel);
    if (key == "detect.blur_sigma") return num(detect.blur_sigma);
    if (key == "detect.pyramid_depth") return integer(detect.pyramid_depth);
    if (key == "detect.hough_rho") return num(detect.hough.rho_res);
    if (key == "detect.hough_theta_deg") return angle_deg(detect.hough.theta_res);
    if (key == "detect.hough_votes") return integer(detect.hough.votes);
    if (key == "detect.hough_min_line_length") return num(detect.hough.min_line_length);
    if (key == "detect.hough_max_line_gap") return num(detect.hough.max_line_gap);
    if (key == "detect.dilation_radius") return integer(detect.dilation_radius);
    if (key == "detect.approx_epsilon_frac") return num(detect.approx_epsilon_frac);
    if (key == "detect.area_min") {
        area_explicit = true;
        return num(detect.area_min);
    }
    if (key == "detect.area_max") {
        area_explicit = true;
        return num(detect.area_max);
    }
    if (key == "detect.aspect_min") return num(detect.aspect_min);
    if (key == "detect.aspect_max") return num(detect.aspect_max);
    if (key == "detect.hull_ratio_min") return num(detect.hull_ratio_min);
    if (key == "detect.angle_tolerance_deg") return num(detect.angle_tolerance_deg);
    if (key == "detect.bhattacharyya_threshold") return num(detect.bhattacharyya_threshold);
    if (key == "detect.use_histogram_filter")
        return parse_bool(value, detect.use_histogram_filter) ? "" : "expected true/false";
    if (key == "detect.seed") return parse_u64(value, detect.seed) ? "" : "expected an integer";
    if (key == "detect.reference_color") {
        Color c;
        if (!parse_color(value, c)) return "expected r,g,b in 0..255";
        reference_color = c;
        return "";
    }
    if (key == "detect.reference_image") {
        reference_image = value;
        return "";
    }

    if (key == "world.wall_point")
        return parse_vec3(value, world.wall_point) ? "" : "expected x,y,z";
    if (key == "world.wall_normal")
        return parse_vec3(value, world.wall_normal) ? "" : "expected x,y,z";
    if (key == "world.window_center")
        return parse_vec3(value, world.window_center) ? "" : "expected x,y,z";
    if (key == "world.window_width") return num(world.window_width);
    if (key == "world.window_height") return num(world.window_height);
    if (key == "world.wall_color")
        return parse_color(value, world.wall_color) ? "" : "expected r,g,b";
    if (key == "world.interior_color")
        return parse_color(value, world.interior_color) ? "" : "expected r,g,b";
    if (key == "world.background_color")
        return parse_color(value, world.background_color) ? "" : "expected r,g,b";
    if (key == "world.noise_sigma") return num(world.noise_sigma);
    if (key == "world.decoys") {
        if (trim(value) == "none") {
            world.decoys.clear();
            return "";
        }
        return "only 'none' is accepted (use world.decoyN_* keys to define decoys)";
    }
    for (int n = 1; n <= 4; ++n) {
        const std::string prefix = "world.decoy" + std::to_string(n) + "_";
        if (key.rfind(prefix, 0) != 0) continue;
        while (static_cast<int>(world.decoys.size()) < n) world.decoys.emplace_back();
        WorldModel::Decoy& d = world.decoys[n - 1];
        const std::string field = key.substr(prefix.size());
        if (field == "offset") return parse_vec2(value, d.offset) ? "" : "expected u,v";
        if (field == "width") return num(d.width);
        if (field == "height") return num(d.height);
        if (field == "color") return parse_color(value, d.color) ? "" : "expected r,g,b";
        return "unknown decoy field";
    }

    if (key == "nav.yaw_step_deg") return angle_deg(nav.yaw_step);
    if (key == "nav.lateral_step") return num(nav.lateral_step);
    if (key == "nav.forward_step") return num(nav.forward_step);
    if (key == "nav.vertical_gain") return num(nav.vertical_gain);
    if (key == "nav.align_tolerance_deg") return angle_deg(nav.align_tolerance);
    if (key == "nav.validity_bound_deg") return angle_deg(nav.validity_bound);
    if (key == "nav.max_recover_steps") return integer(nav.max_recover_steps);
    if (key == "nav.centering_px_tol") return num(nav.centering_px_tol);

    if (key == "sim.start_x") return num(start.position.x());
    if (key == "sim.start_y") return num(start.position.y());
    if (key == "sim.start_z") return num(start.position.z());
    if (key == "sim.start_yaw_deg") return angle_deg(start.yaw);
    if (key == "sim.max_steps") return integer(max_steps);
    if (key == "sim.seed") return parse_u64(value, seed) ? "" : "expected an integer";

    return "unknown key";
}

void RunConfig::finalize() {
    std::vector<std::string> problems;

    if (frame_width < 16 || frame_height < 16)
        problems.push_back("camera.width/height: frame must be at least 16x16");
    if (!(camera.fx > 0.0) || !(camera.fy > 0.0))
        problems.push_back("camera.fx/fy: focal lengths must be positive");

    if (!area_explicit && frame_width >= 16 && frame_height >= 16) {
        const DetectParams derived = DetectParams::defaults_for(frame_width, frame_height);
        detect.area_min = derived.area_min;
        detect.area_max = derived.area_max;
    }
    try {
        detect.validate();
    } catch (const std::exception& e) {
        problems.push_back(std::string("detect: ") + e.what());
    }

    if (world.wall_normal.norm() > 1e-12) world.wall_normal.normalize();
    try {
        world.validate();
    } catch (const std::exception& e) {
        problems.push_back(std::string("world: ") + e.what());
    }

    try {
        nav.validate();
    } catch (const std::exception& e) {
        problems.push_back(std::string("nav: ") + e.what());
    }

    geometry.width = world.window_width;
    geometry.height = world.window_height;

    if (max_steps < 1) problems.push_back("sim.max_steps: must be >= 1");
    if ((start.position - world.wall_point).dot(world.wall_normal) <= 0.0)
        problems.push_back("sim.start: must begin on the approach side of the wall");
    start.yaw = wrap_angle(start.yaw);

    if (!problems.empty()) throw ConfigError(std::move(problems));
}

Histogram RunConfig::reference_histogram() const {
    if (reference_image) {
        const RgbImage ref = read_ppm(*reference_image);
        Histogram h;
        for (std::size_t i = 0; i + 2 < ref.data.size(); i += 3)
            h.bins[Histogram::bin_index(ref.data[i], ref.data[i + 1], ref.data[i + 2])] += 1.0;
        const double n = static_cast<double>(ref.data.size() / 3);
        for (double& b : h.bins) b /= n;
        return h;
    }
    return reference_from_color(reference_color.value_or(world.interior_color));
}

MissionSetup RunConfig::mission_setup() const {
    MissionSetup s;
    s.world = world;
    s.initial_state = start;
    s.intrinsics = camera;
    s.frame_width = frame_width;
    s.frame_height = frame_height;
    s.detect = detect;
    s.nav = nav;
    s.geometry = geometry;
    s.max_steps = max_steps;
    s.seed = seed;
    return s;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);

    RunConfig cfg;
    std::vector<std::string> problems;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string err = cfg.apply(key, value);
        if (!err.empty())
            problems.push_back(key + " (line " + std::to_string(lineno) + "): " + err);
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    cfg.finalize();
    return cfg;
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.finalize();
    return cfg;
}

}  // namespace ingress
