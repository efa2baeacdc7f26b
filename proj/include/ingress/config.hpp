#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ingress/nav.hpp"

namespace ingress {

/// Config validation failure carrying one message per offending field.
class ConfigError : public std::runtime_error {
 public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

 private:
    std::vector<std::string> problems_;
};

/// Merged run configuration. File format is flat `key = value` text with
/// dotted section prefixes (e.g. `detect.canny_low = 50`); `#` starts a
/// comment line and blank lines are ignored. Keys not listed in the file
/// keep the built-in default scene (wall 10 units out, 1.0 x 0.8 window,
/// two decoys, mission start 8 units out with 1 unit lateral offset and a
/// 15 degree yaw error).
struct RunConfig {
    CameraIntrinsics camera{585.0, 585.0, 480.0, 360.0};
    int frame_width = 960;
    int frame_height = 720;

    DetectParams detect = DetectParams::defaults_for(960, 720);
    bool area_explicit = false;  // area bounds given in the file (px^2)

    WorldModel world;
    NavParams nav;
    WindowGeometry geometry{1.0, 0.8};

    UavState start;
    int max_steps = 500;
    std::uint64_t seed = 1;

    std::optional<Color> reference_color;      // defaults to world interior
    std::optional<std::string> reference_image;  // whole-image reference histogram

    RunConfig();

    /// Applies one key/value pair; unknown keys or malformed values are
    /// reported through the returned message (empty string on success).
    std::string apply(const std::string& key, const std::string& value);

    /// Re-derives dependent defaults (detect area window from the frame,
    /// window geometry from the world) and validates every field, throwing
    /// ConfigError with one message per problem.
    void finalize();

    /// Reference histogram for detection, honoring reference_image then
    /// reference_color then the world interior color.
    Histogram reference_histogram() const;

    MissionSetup mission_setup() const;
};

/// Parses a config file into `cfg`, then finalizes it. I/O problems raise
/// std::runtime_error; content problems raise ConfigError.
RunConfig load_config(const std::string& path);

/// Finalized built-in defaults.
RunConfig default_config();

}  // namespace ingress
