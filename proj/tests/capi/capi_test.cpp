#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "dsketch/dsketch.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

// Box with a diagonal, 400x400 canvas, as exchange-format JSON text.
std::string box_json(const char* group, double dx, double dy) {
  nlohmann::json strokes = nlohmann::json::array();
  const double c[5][2] = {{100, 100}, {300, 100}, {300, 300}, {100, 300}, {100, 100}};
  double t = 0;
  for (int s = 0; s < 4; ++s) {
    nlohmann::json pts = nlohmann::json::array();
    for (int i = 0; i <= 20; ++i) {
      const double u = i / 20.0;
      const double x = c[s][0] + (c[s + 1][0] - c[s][0]) * u + dx * std::sin(3 * u);
      const double y = c[s][1] + (c[s + 1][1] - c[s][1]) * u + dy * std::cos(2 * u);
      pts.push_back({x, y, t, 0.5});
      t += 10;
    }
    strokes.push_back({{"kind", "content"}, {"width", 1.0}, {"points", pts}});
  }
  return nlohmann::json{{"prompt_id", "box"}, {"user_id", "u"}, {"group", group}, {"canvas", {400, 400}},
                        {"strokes", strokes}}
      .dump();
}

struct SketchPtr {
  ds_sketch* p = nullptr;
  ~SketchPtr() { ds_sketch_free(p); }
};

TEST(CApi, VersionsAndStatusNames) {
  EXPECT_STREQ(ds_version(), "1.0.0");
  EXPECT_EQ(ds_format_version(), 1);
  EXPECT_STREQ(ds_status_name(DS_ERR_IO), "io");
  EXPECT_EQ(ds_status_exit_code(DS_OK), 0);
  EXPECT_EQ(ds_status_exit_code(DS_ERR_IO), 2);
  EXPECT_EQ(ds_status_exit_code(DS_ERR_VALIDATION), 1);
  EXPECT_EQ(ds_status_exit_code(DS_ERR_FORMAT), 1);
}

TEST(CApi, NullArgumentsAndLastError) {
  EXPECT_EQ(ds_sketch_load(nullptr, nullptr), DS_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(ds_last_error()).find("NULL"), std::string::npos);
  ds_sketch* s = nullptr;
  EXPECT_EQ(ds_sketch_load("/nonexistent/file.json", &s), DS_ERR_IO);
  EXPECT_EQ(s, nullptr);
  EXPECT_EQ(ds_sketch_parse("{", &s), DS_ERR_FORMAT);
  // the message is per thread
  std::string other;
  std::thread([&] { other = ds_last_error(); }).join();
  EXPECT_EQ(other, "");
  EXPECT_NE(std::string(ds_last_error()), "");
  SketchPtr ok;
  ASSERT_EQ(ds_sketch_parse(box_json("tracing", 0, 0).c_str(), &ok.p), DS_OK);
  EXPECT_STREQ(ds_last_error(), "");
  EXPECT_EQ(ds_sketch_stroke_count(nullptr), 0u);
  ds_sketch_free(nullptr);
}

TEST(CApi, SketchAccess) {
  SketchPtr s;
  ASSERT_EQ(ds_sketch_parse(box_json("novice", 0, 0).c_str(), &s.p), DS_OK);
  EXPECT_EQ(ds_sketch_stroke_count(s.p), 4u);
  EXPECT_EQ(ds_sketch_point_count(s.p, 0), 21u);
  EXPECT_EQ(ds_sketch_point_count(s.p, 9), 0u);
  double pt[4];
  ASSERT_EQ(ds_sketch_point(s.p, 1, 0, pt), DS_OK);
  EXPECT_DOUBLE_EQ(pt[0], 300);
  EXPECT_DOUBLE_EQ(pt[1], 100);
  EXPECT_DOUBLE_EQ(pt[2], 210);
  EXPECT_EQ(ds_sketch_point(s.p, 1, 21, pt), DS_ERR_INVALID_ARGUMENT);
  char* text = nullptr;
  ASSERT_EQ(ds_sketch_to_json(s.p, &text), DS_OK);
  SketchPtr back;
  ASSERT_EQ(ds_sketch_parse(text, &back.p), DS_OK);
  ds_string_free(text);
  EXPECT_EQ(ds_sketch_stroke_count(back.p), 4u);
}

TEST(CApi, ConfigMergeValidates) {
  ds_config* c = nullptr;
  ASSERT_EQ(ds_config_create(&c), DS_OK);
  EXPECT_EQ(ds_config_merge_json(c, R"({"registration": {"iters": 4}})"), DS_OK);
  EXPECT_EQ(ds_config_merge_json(c, R"({"registration": {"iters": 5, "omega": -2}})"), DS_ERR_VALIDATION);
  EXPECT_EQ(ds_config_merge_json(c, R"({"registration": )"), DS_ERR_FORMAT);
  char* text = nullptr;
  ASSERT_EQ(ds_config_to_json(c, &text), DS_OK);
  const auto j = nlohmann::json::parse(text);
  ds_string_free(text);
  EXPECT_EQ(j["registration"]["iters"], 4);
  EXPECT_EQ(j["registration"]["omega"], 1.1);
  ds_config_free(c);
}

TEST(CApi, RegistrationAndScores) {
  SketchPtr s, t;
  ASSERT_EQ(ds_sketch_parse(box_json("novice", 5, 4).c_str(), &s.p), DS_OK);
  ASSERT_EQ(ds_sketch_parse(box_json("tracing", 0, 0).c_str(), &t.p), DS_OK);
  ds_registration_config rc;
  ds_registration_config_default(&rc);
  EXPECT_EQ(rc.iterations, 10);
  EXPECT_DOUBLE_EQ(rc.omega, 1.1);
  rc.iterations = 3;
  ds_registration* r = nullptr;
  ASSERT_EQ(ds_register(s.p, t.p, &rc, &r), DS_OK) << ds_last_error();
  EXPECT_EQ(ds_registration_iterations(r), 3);
  const int chosen = ds_registration_chosen(r);
  ds_score best{}, sc{};
  ASSERT_EQ(ds_registration_score(r, chosen, &best), DS_OK);
  for (int i = 1; i <= 3; ++i) {
    ASSERT_EQ(ds_registration_score(r, i, &sc), DS_OK);
    EXPECT_LE(sc.e, best.e);
    EXPECT_NEAR(sc.e, 1.1 * sc.precision + sc.recall, 1e-12);
  }
  EXPECT_EQ(ds_registration_score(r, 4, &sc), DS_ERR_INVALID_ARGUMENT);
  SketchPtr reg;
  ASSERT_EQ(ds_registration_sketch(r, &reg.p), DS_OK);
  EXPECT_EQ(ds_sketch_point_count(reg.p, 2), 21u);
  ds_registration_free(r);
  rc.omega = 0;
  EXPECT_EQ(ds_register(s.p, t.p, &rc, &r), DS_ERR_VALIDATION);
}

TEST(CApi, SimilarityFit) {
  const double th = 30 * M_PI / 180, sc = 1.5;
  std::vector<double> a{0, 0, 10, 0, 0, 10, 7, 3}, b;
  for (std::size_t i = 0; i < a.size(); i += 2) {
    b.push_back(sc * (std::cos(th) * a[i] - std::sin(th) * a[i + 1]) + 4);
    b.push_back(sc * (std::sin(th) * a[i] + std::cos(th) * a[i + 1]) - 2);
  }
  ds_similarity t{};
  ASSERT_EQ(ds_fit_similarity(a.data(), b.data(), 4, &t), DS_OK);
  EXPECT_NEAR(t.theta_deg, 30, 1e-9);
  EXPECT_NEAR(t.scale, 1.5, 1e-12);
  EXPECT_NEAR(t.tx, 4, 1e-9);
  EXPECT_NEAR(t.ty, -2, 1e-9);
  const double same[4] = {1, 1, 1, 1};
  EXPECT_EQ(ds_fit_similarity(same, same, 2, &t), DS_ERR_DEGENERATE);
}

TEST(CApi, SynthesisIsSeeded) {
  SketchPtr t;
  ASSERT_EQ(ds_sketch_parse(box_json("tracing", 0, 0).c_str(), &t.p), DS_OK);
  ds_synthesis_config c;
  ds_synthesis_config_default(&c);
  EXPECT_DOUBLE_EQ(c.n1, 0.2);
  EXPECT_EQ(c.seed, 7u);
  SketchPtr a, b, other;
  ASSERT_EQ(ds_synthesize(t.p, "novice", nullptr, &c, &a.p), DS_OK) << ds_last_error();
  ASSERT_EQ(ds_synthesize(t.p, "novice", nullptr, &c, &b.p), DS_OK);
  c.seed = 8;
  ASSERT_EQ(ds_synthesize(t.p, "novice", nullptr, &c, &other.p), DS_OK);
  char *ja = nullptr, *jb = nullptr, *jo = nullptr;
  ds_sketch_to_json(a.p, &ja);
  ds_sketch_to_json(b.p, &jb);
  ds_sketch_to_json(other.p, &jo);
  EXPECT_STREQ(ja, jb);
  EXPECT_STRNE(ja, jo);
  ds_string_free(ja);
  ds_string_free(jb);
  ds_string_free(jo);
  EXPECT_EQ(ds_synthesize(t.p, "novice", "/nonexistent/models", &c, &a.p), DS_ERR_MISSING_MODEL);
  EXPECT_EQ(ds_synthesize(t.p, "expert", nullptr, &c, &a.p), DS_ERR_VALIDATION);
}

TEST(CApi, CommandsLogThroughCallback) {
  const fs::path dir = fs::temp_directory_path() / "dsketch_capi_cmd";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SketchPtr t;
  ASSERT_EQ(ds_sketch_parse(box_json("tracing", 0, 0).c_str(), &t.p), DS_OK);
  ASSERT_EQ(ds_sketch_save(t.p, (dir / "t.json").c_str()), DS_OK);
  std::vector<std::string> lines;
  ds_set_log([](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); },
             &lines);
  ds_config* c = nullptr;
  ds_config_create(&c);
  EXPECT_EQ(ds_cmd_rasterize(c, (dir / "t.json").c_str(), 1, 1, (dir / "r/t.png").c_str()), DS_OK);
  EXPECT_EQ(ds_cmd_export_svg(c, (dir / "t.json").c_str(), (dir / "t.svg").c_str()), DS_OK);
  EXPECT_EQ(ds_cmd_synthesize(c, (dir / "t.json").c_str(), "P", nullptr, (dir / "s.json").c_str(), ""), DS_OK);
  EXPECT_EQ(ds_cmd_analyze(c, (dir / "nope").c_str(), nullptr, (dir / "rep").c_str()), DS_ERR_IO);
  ds_set_log(nullptr, nullptr);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[2], "synthesize models=statistical style=professional");
  EXPECT_EQ(lines[0].rfind("rasterize pixels=", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "r/effective-config.json"));
  EXPECT_TRUE(fs::exists(dir / "s.json"));
  ds_config_free(c);
  fs::remove_all(dir);
}

}  // namespace
