#include "ingress/cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ingress/config.hpp"
#include "ingress/pnm.hpp"

namespace ingress {
namespace {

std::string tmp(const std::string& name) { return testing::TempDir() + name; }

// Reduced-resolution scene so CLI round trips stay fast.
const char* kQuickConfig = R"(
camera.width = 480
camera.height = 360
camera.fx = 292.5
camera.fy = 292.5
camera.cx = 240
camera.cy = 180
sim.start_x = 6
sim.start_y = 0.2
sim.start_yaw_deg = 4
sim.max_steps = 150
)";

std::string quick_config_path() {
    static std::string path = [] {
        const std::string p = tmp("quick.cfg");
        std::ofstream(p) << kQuickConfig;
        return p;
    }();
    return path;
}

RunConfig quick_config() { return load_config(quick_config_path()); }

std::string render_frame(const std::string& name, double x, double y, double yaw_deg) {
    const RunConfig cfg = quick_config();
    UavState state;
    state.position = {x, y, -1.5};
    state.yaw = yaw_deg * M_PI / 180.0;
    const RgbImage frame =
        render(cfg.world, state, cfg.camera, cfg.frame_width, cfg.frame_height, 31);
    const std::string path = tmp(name);
    write_ppm(frame, path);
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(CliDetect, FindsWindowAndWritesArtifacts) {
    const std::string input = render_frame("head_on.ppm", 5.0, 0.0, 0.0);
    const std::string annotated = tmp("annotated.ppm");

    testing::internal::CaptureStdout();
    const int rc = cli::cmd_detect({input, quick_config_path(), annotated});
    const std::string record = testing::internal::GetCapturedStdout();

    EXPECT_EQ(rc, cli::kOk);
    EXPECT_EQ(record.rfind("1,", 0), 0u) << record;
    // The annotated image must exist, parse, and differ from the input.
    const RgbImage out = read_ppm(annotated);
    EXPECT_NE(out.data, read_ppm(input).data);

    // Record centroid within 3 px of the projected ground-truth center.
    const RunConfig cfg = quick_config();
    UavState state;
    state.position = {5.0, 0.0, -1.5};
    const GroundTruth gt = ground_truth(cfg.world, state, cfg.camera);
    double cx = 0, cy = 0;
    for (const Vec2& c : gt.corner_px) {
        cx += c.x / 4;
        cy += c.y / 4;
    }
    std::stringstream ss(record);
    std::string field;
    std::vector<double> fields;
    while (std::getline(ss, field, ',')) fields.push_back(std::atof(field.c_str()));
    ASSERT_EQ(fields.size(), 13u);
    EXPECT_NEAR(fields[9], cx, 3.0);
    EXPECT_NEAR(fields[10], cy, 3.0);
}

TEST(CliDetect, BlankWallReportsNoWindow) {
    // Camera facing away: the frame is all background.
    const std::string input = render_frame("away.ppm", 5.0, 0.0, 180.0);
    testing::internal::CaptureStdout();
    const int rc = cli::cmd_detect({input, quick_config_path(), std::nullopt});
    testing::internal::GetCapturedStdout();
    EXPECT_EQ(rc, cli::kNoWindow);
}

TEST(CliDetect, TruncatedInputReportsError) {
    const std::string path = tmp("broken.ppm");
    std::ofstream(path, std::ios::binary) << "P6\n100 100\n255\nxx";
    EXPECT_EQ(cli::cmd_detect({path, quick_config_path(), std::nullopt}), cli::kInputError);
}

TEST(CliPose, PrintsAnglesForHeadOnFrame) {
    const std::string input = render_frame("pose.ppm", 5.0, 0.0, 0.0);
    testing::internal::CaptureStdout();
    const int rc = cli::cmd_pose({input, quick_config_path()});
    const std::string line = testing::internal::GetCapturedStdout();
    EXPECT_EQ(rc, cli::kOk);

    std::stringstream ss(line);
    std::string field;
    std::vector<double> v;
    while (std::getline(ss, field, ',')) v.push_back(std::atof(field.c_str()));
    ASSERT_EQ(v.size(), 6u);
    EXPECT_NEAR(v[2], 0.0, 2.0);  // psi degrees
    EXPECT_NEAR(v[5], 5.0, 0.5);  // tz ~ distance to the plane
}

TEST(CliSimulate, IngressesAndStepBudgetRespected) {
    const std::string csv = tmp("mission.csv");
    const int rc = cli::cmd_simulate({quick_config_path(), csv, std::nullopt});
    EXPECT_EQ(rc, cli::kOk);
    const std::string text = slurp(csv);
    EXPECT_NE(text.find("Ingressed"), std::string::npos);

    // A one-step budget cannot ingress: distinct status, one data row.
    const std::string tiny_cfg = tmp("tiny.cfg");
    std::ofstream(tiny_cfg) << kQuickConfig << "sim.max_steps = 1\n";
    const std::string tiny_csv = tmp("tiny.csv");
    EXPECT_EQ(cli::cmd_simulate({tiny_cfg, tiny_csv, std::nullopt}), cli::kNotIngressed);
    const std::string tiny_text = slurp(tiny_csv);
    EXPECT_EQ(std::count(tiny_text.begin(), tiny_text.end(), '\n'), 2);
}

TEST(CliSimulate, InvalidConfigValidationFails) {
    const std::string bad = tmp("bad_sim.cfg");
    std::ofstream(bad) << "world.window_width = -1\n";
    EXPECT_EQ(cli::cmd_simulate({bad, tmp("never.csv"), std::nullopt}), cli::kConfigError);
}

TEST(CliSimulate, FrameDumpsWritten) {
    const std::string cfg = tmp("dump.cfg");
    std::ofstream(cfg) << kQuickConfig << "sim.max_steps = 7\n";
    const std::string dir = testing::TempDir();
    cli::SimulateArgs args{cfg, tmp("dump.csv"), std::nullopt, dir, 3};
    cli::cmd_simulate(args);
    // steps 0, 3, 6 dumped
    for (int step : {0, 3, 6}) {
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%04d.ppm", step);
        const RgbImage frame = read_ppm(dir + name);
        EXPECT_EQ(frame.width, 480);
        EXPECT_EQ(frame.height, 360);
    }
}

TEST(CliSimulate, ByteIdenticalReruns) {
    const std::string cfg = tmp("det_seed.cfg");
    std::ofstream(cfg) << kQuickConfig << "sim.max_steps = 25\nsim.seed = 5\n";
    const std::string a = tmp("runA.csv"), b = tmp("runB.csv");
    cli::cmd_simulate({cfg, a, std::nullopt});
    cli::cmd_simulate({cfg, b, std::nullopt});
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_FALSE(slurp(a).empty());
}

TEST(CliPlot, ChartsFromMissionCsv) {
    const std::string csv = tmp("plot_mission.csv");
    cli::cmd_simulate({quick_config_path(), csv, std::nullopt});
    const std::string svg = tmp("mission.svg");
    EXPECT_EQ(cli::cmd_plot({csv, svg}), cli::kOk);
    const std::string doc = slurp(svg);
    EXPECT_NE(doc.find("<svg"), std::string::npos);
    EXPECT_NE(doc.find("polyline"), std::string::npos);
    EXPECT_NE(doc.find("Opening width"), std::string::npos);
}

TEST(CliPlot, SingleRowCsvStillRenders) {
    const std::string csv = tmp("single.csv");
    std::ofstream(csv) << "step,phase,x,y,z,yaw,est_psi_deg,true_psi_deg,opening_total_px,"
                          "opening_left_px,opening_right_px,detected\n"
                          "0,Align,2,1,-1.5,0.1,3.0,2.5,100,50,49,1\n";
    const std::string svg = tmp("single.svg");
    EXPECT_EQ(cli::cmd_plot({csv, svg}), cli::kOk);
    EXPECT_NE(slurp(svg).find("<svg"), std::string::npos);
}

TEST(CliPlot, MissingColumnsNamed) {
    const std::string csv = tmp("missing.csv");
    std::ofstream(csv) << "step,phase,x\n0,Align,2\n";
    testing::internal::CaptureStderr();
    EXPECT_EQ(cli::cmd_plot({csv, tmp("missing.svg")}), cli::kInputError);
    const std::string err = testing::internal::GetCapturedStderr();
    EXPECT_NE(err.find("est_psi_deg"), std::string::npos);
    EXPECT_NE(err.find("opening_total_px"), std::string::npos);
}

TEST(CliPlot, EmptyFileIsColumnError) {
    const std::string csv = tmp("empty.csv");
    std::ofstream(csv) << "";
    EXPECT_EQ(cli::cmd_plot({csv, tmp("empty.svg")}), cli::kInputError);
}

}  // namespace
}  // namespace ingress
