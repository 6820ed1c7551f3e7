#include <gtest/gtest.h>

#include <filesystem>

#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"
#include "dsketch/pipeline/commands.hpp"
#include "dsketch/pipeline/config.hpp"
#include "dsketch/pipeline/dataset.hpp"
#include "fixture_dataset.hpp"

namespace dsketch {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dsketch_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kFormat;
}

TEST(Config, DefaultsCarryTheDocumentedConstants) {
  const Config c;
  const auto j = config_to_json(c);
  EXPECT_EQ(j["registration"]["iters"], 10);
  EXPECT_EQ(j["registration"]["omega"], 1.1);
  EXPECT_EQ(j["registration"]["tolerance"], 1);
  EXPECT_EQ(j["registration"]["sigma_field"], 8.0);
  EXPECT_EQ(j["analysis"]["rho"], 3.0);
  EXPECT_EQ(j["analysis"]["distance_bins"], 50);
  EXPECT_EQ(j["synthesis"]["w_s"], 1.0);
  EXPECT_EQ(j["synthesis"]["w_m"], 0.5);
  EXPECT_EQ(j["synthesis"]["eps_c"], 3.0);
  EXPECT_EQ(j["synthesis"]["mlp_hidden"], nlohmann::json({64, 64}));
  EXPECT_EQ(j["synthesis"]["seed"], 7);
}

TEST(Config, MergeIsPartialAndRoundTrips) {
  Config c;
  merge_config(c, {{"registration", {{"omega", 1.5}}}, {"synthesis", {{"seed", 11}, {"mlp_hidden", {8}}}}});
  EXPECT_EQ(c.registration.omega, 1.5);
  EXPECT_EQ(c.registration.iterations, 10);
  EXPECT_EQ(c.synthesis.synthesis.seed, 11u);
  EXPECT_EQ(c.synthesis.training.train.seed, 11u);
  EXPECT_EQ(c.synthesis.training.hidden, std::vector<int>{8});
  Config d;
  merge_config(d, config_to_json(c));
  EXPECT_EQ(config_to_json(d), config_to_json(c));
}

TEST(Config, RejectsBadValuesWithoutPartialApplication) {
  Config c;
  EXPECT_EQ(code_of([&] { merge_config(c, {{"registration", {{"iters", 3}, {"omega", 0}}}}); }), ErrorCode::kValidation);
  EXPECT_EQ(c.registration.iterations, 10);
  EXPECT_EQ(code_of([&] { merge_config(c, {{"registration", {{"omega", "big"}}}}); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([&] { merge_config(c, {{"analysis", {{"bins", 3}}}}); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] { merge_config(c, {{"nonsense", 1}}); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] { merge_config(c, {{"synthesis", {{"n1", 1.5}}}}); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] { merge_config(c, {{"jobs", 0}}); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] { merge_config(c, nlohmann::json::array()); }), ErrorCode::kFormat);
}

TEST(Dataset, DiscoversDrawingsAndTracings) {
  const fs::path dir = scratch("discover");
  testing::write_fixture_dataset(dir, 2, 1);
  write_file_atomic(dir / "cup_novice_0.reg.json", "{}");
  write_file_atomic(dir / "effective-config.json", "{}");
  const Dataset d = load_dataset(dir);
  ASSERT_EQ(d.drawings.size(), 3u);
  EXPECT_EQ(d.drawings[0].name, "cup_novice_0");
  EXPECT_EQ(d.drawings[2].name, "cup_professional_0");
  ASSERT_NE(d.tracing_for("cup"), nullptr);
  EXPECT_EQ(d.tracing_for("mug"), nullptr);

  Sketch dup = testing::fixture_tracing();
  save_sketch(dup, dir / "another_tracing.json");
  EXPECT_EQ(code_of([&] { load_dataset(dir); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] { load_dataset(dir / "missing"); }), ErrorCode::kIo);
  fs::remove_all(dir);
}

TEST(Dataset, RegSidecarRoundTrip) {
  const Sketch t = testing::fixture_tracing();
  const Sketch s = testing::fixture_drawing(Group::kNovice, 1);
  RegistrationConfig rc;
  rc.iterations = 3;
  const RegistrationResult r = register_pixel_level(s, t, rc);
  const RegSidecar back = reg_sidecar_from_json(nlohmann::json::parse(reg_sidecar_json(r).dump()), "mem");
  EXPECT_EQ(back.chosen, r.chosen);
  ASSERT_EQ(back.scores.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.scores[i], r.iterations[i].score);
  EXPECT_EQ(back.e_star(), r.best().score.e);
  ASSERT_TRUE(same_topology(back.registered, r.registered()));
  EXPECT_EQ(back.registered.strokes[0].points[3], r.registered().strokes[0].points[3]);
  nlohmann::json bad = reg_sidecar_json(r);
  bad["chosen"] = 9;
  EXPECT_EQ(code_of([&] { reg_sidecar_from_json(bad, "mem"); }), ErrorCode::kFormat);
}

TEST(Commands, StyleAndLevelNames) {
  EXPECT_EQ(parse_style("N"), Group::kNovice);
  EXPECT_EQ(parse_style("professional"), Group::kProfessional);
  EXPECT_EQ(code_of([] { parse_style("tracing"); }), ErrorCode::kValidation);
  EXPECT_EQ(parse_level("stroke"), RegistrationLevel::kStroke);
  EXPECT_EQ(to_string(parse_level("sketch")), "sketch");
  EXPECT_EQ(code_of([] { parse_level("global"); }), ErrorCode::kValidation);
}

TEST(Commands, AnalyzeBuildsGroupHistograms) {
  const fs::path dir = scratch("analyze");
  testing::write_fixture_dataset(dir, 2, 2);
  Config c;
  c.registration.iterations = 3;
  c.jobs = 2;
  run_register_dataset(c, dir, dir, false, nullptr);
  const DatasetAnalysis a = analyze_dataset(c, load_dataset(dir), dir, nullptr);
  ASSERT_EQ(a.report.drawings.size(), 4u);
  std::map<std::string, std::size_t> totals;
  for (const auto& h : a.report.histograms) totals[h.group + "/" + h.metric] = h.histogram.total();
  EXPECT_EQ(totals["novice/scale_global"], 2u);
  EXPECT_EQ(totals["professional/rotation_global"], 2u);
  EXPECT_GT(totals["novice/closest_distance_to_professional"], 0u);
  EXPECT_GT(totals["professional/closest_distance_to_novice"], 0u);
  EXPECT_GT(totals["novice/pixel_displacement"], 0u);
  ASSERT_EQ(a.cdr.size(), 2u);
  for (const auto& c2 : a.cdr) {
    EXPECT_EQ(c2.drawings, 2u);
    EXPECT_GT(c2.region.foreground_count(), 0u);
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace dsketch
