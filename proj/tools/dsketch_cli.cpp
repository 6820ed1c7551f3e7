#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsketch/dsketch.h"
#include "json.hpp"

namespace {

using Json = nlohmann::json;

struct Flags {
  std::string config_file;
  std::vector<std::function<void(Json&)>> appliers;

  Json overrides() const {
    Json j = Json::object();
    for (const auto& a : appliers) a(j);
    return j;
  }
};

// Copies a flag into the override JSON only when it was given.
template <typename T>
CLI::Option* override_option(CLI::App* app, Flags& flags, const std::string& name, const std::string& section,
                             const std::string& key, const std::string& help) {
  auto value = std::make_shared<T>();
  CLI::Option* option = app->add_option(name, *value, help);
  flags.appliers.push_back([option, value, section, key](Json& j) {
    if (option->count() == 0) return;
    if (section.empty()) {
      j[key] = *value;
    } else {
      j[section][key] = *value;
    }
  });
  return option;
}

int report(ds_status status) {
  if (status != DS_OK) std::fprintf(stderr, "error: %s: %s\n", ds_status_name(status), ds_last_error());
  return ds_status_exit_code(status);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector sketch registration, analysis and freehand-style synthesis"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config_file, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  app.add_flag_callback(
      "--version",
      [] {
        std::printf("dsketch %s (format version %d)\n", ds_version(), ds_format_version());
        throw CLI::Success();
      },
      "Print toolkit and format versions");

  std::string sketch, tracing, dataset, products, out, out_dir, original, registered, image, level = "pixel", prompt,
                                                                                            style, models, svg;
  bool snapshots = false;
  bool all_strokes = false;
  int width = 1;

  auto* reg = app.add_subcommand("register", "Pixel-level registration of drawings to their tracing");
  reg->add_option("--sketch", sketch, "Freehand sketch JSON");
  reg->add_option("--tracing", tracing, "Tracing sketch JSON");
  reg->add_option("--dataset", dataset, "Register every drawing in this directory instead");
  reg->add_option("--out-dir", out_dir, "Output directory")->required();
  reg->add_flag("--snapshots", snapshots, "Write a PNG per iteration");
  override_option<int>(reg, flags, "--iters", "registration", "iters", "Iterations (10)");
  override_option<double>(reg, flags, "--omega", "registration", "omega", "Precision weight (1.1)");
  override_option<int>(reg, flags, "--tolerance", "registration", "tolerance", "Overlap radius in px (1)");
  override_option<double>(reg, flags, "--sigma-field", "registration", "sigma_field", "Field smoothing sigma (8)");
  override_option<int>(reg, flags, "--jobs", "", "jobs", "Parallel drawings");

  auto* fit = app.add_subcommand("fit-levels", "Sketch- and stroke-level similarity fits");
  fit->add_option("--original", original, "Original sketch JSON");
  fit->add_option("--registered", registered, "Registered sketch or .reg.json");
  fit->add_option("--out", out, "Output levels JSON");
  fit->add_option("--dataset", dataset, "Fit every drawing with a reg sidecar instead");
  fit->add_option("--products", products, "Directory of sidecars (default: dataset)");

  auto* an = app.add_subcommand("analyze", "Dataset metrics and report tables");
  an->add_option("--dataset", dataset, "Dataset directory")->required();
  an->add_option("--products", products, "Directory of sidecars (default: dataset)");
  an->add_option("--out", out_dir, "Report directory")->required();
  override_option<double>(an, flags, "--rho", "analysis", "rho", "CDR radius in px (3)");
  override_option<int>(an, flags, "--tolerance", "analysis", "tolerance", "Overlap radius in px (1)");
  override_option<int>(an, flags, "--jobs", "", "jobs", "Parallel drawings");

  auto* cmp = app.add_subcommand("compare-synthetic", "Score a line image against registered drawings");
  cmp->add_option("--image", image, "Line drawing PNG")->required();
  cmp->add_option("--registered", registered, "Directory of drawings with sidecars")->required();
  cmp->add_option("--level", level, "sketch|stroke|pixel")->check(CLI::IsMember({"sketch", "stroke", "pixel"}));
  cmp->add_option("--prompt", prompt, "Only drawings of this prompt");
  cmp->add_option("--out", out, "Output CSV")->required();
  override_option<int>(cmp, flags, "--tolerance", "analysis", "tolerance", "Overlap radius in px (1)");

  auto* train = app.add_subcommand("train-disturbers", "Train the three stroke disturbers");
  train->add_option("--dataset", dataset, "Dataset directory")->required();
  train->add_option("--products", products, "Directory of sidecars (default: dataset)");
  train->add_option("--style", style, "novice|professional")->required();
  train->add_option("--out", out_dir, "Model directory")->required();
  override_option<long long>(train, flags, "--seed", "synthesis", "seed", "Training seed (7)");
  override_option<int>(train, flags, "--epochs", "synthesis", "epochs", "Training epochs (300)");

  auto* syn = app.add_subcommand("synthesize", "Freehand-style sketch from a tracing");
  syn->add_option("--tracing", tracing, "Tracing sketch JSON")->required();
  syn->add_option("--style", style, "novice|professional (N|P)")->required();
  syn->add_option("--models", models, "Model directory (default: statistical disturbers)");
  syn->add_option("--out", out, "Output sketch JSON")->required();
  syn->add_option("--svg", svg, "Also write an SVG");
  override_option<double>(syn, flags, "--n1", "synthesis", "n1", "Extrinsic noise level (0.2)");
  override_option<double>(syn, flags, "--n2", "synthesis", "n2", "Intrinsic noise level (0.2)");
  override_option<long long>(syn, flags, "--seed", "synthesis", "seed", "Random seed (7)");

  auto* ras = app.add_subcommand("rasterize", "Rasterize a sketch to PNG");
  ras->add_option("--sketch", sketch, "Sketch JSON")->required();
  ras->add_option("--out", out, "Output PNG")->required();
  ras->add_option("--width", width, "Line width in px (1)");
  ras->add_flag("--all-strokes", all_strokes, "Include scaffold strokes");

  auto* exp = app.add_subcommand("export-svg", "Write a sketch as SVG");
  exp->add_option("--sketch", sketch, "Sketch JSON")->required();
  exp->add_option("--out", out, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success&) {
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::fprintf(stderr, "%s", app.help().c_str());
    return 1;
  }

  ds_config* config = nullptr;
  if (ds_status s = ds_config_create(&config); s != DS_OK) return report(s);
  struct Release {
    ds_config* c;
    ~Release() { ds_config_free(c); }
  } release{config};
  if (!flags.config_file.empty()) {
    if (ds_status s = ds_config_merge_file(config, flags.config_file.c_str()); s != DS_OK) return report(s);
  }
  if (ds_status s = ds_config_merge_json(config, flags.overrides().dump().c_str()); s != DS_OK) return report(s);

  auto usage = [](CLI::App* sub, const std::string& msg) {
    std::fprintf(stderr, "error: %s\n%s", msg.c_str(), sub->help().c_str());
    return 1;
  };

  if (reg->parsed()) {
    if (!dataset.empty()) {
      if (!sketch.empty() || !tracing.empty()) return usage(reg, "--dataset excludes --sketch/--tracing");
      return report(ds_cmd_register_dataset(config, dataset.c_str(), out_dir.c_str(), snapshots));
    }
    if (sketch.empty() || tracing.empty()) return usage(reg, "--sketch and --tracing are required");
    return report(ds_cmd_register(config, sketch.c_str(), tracing.c_str(), out_dir.c_str(), snapshots));
  }
  if (fit->parsed()) {
    if (!dataset.empty()) return report(ds_cmd_fit_levels_dataset(config, dataset.c_str(), opt(products)));
    if (original.empty() || registered.empty() || out.empty())
      return usage(fit, "--original, --registered and --out are required");
    return report(ds_cmd_fit_levels(config, original.c_str(), registered.c_str(), out.c_str()));
  }
  if (an->parsed()) return report(ds_cmd_analyze(config, dataset.c_str(), opt(products), out_dir.c_str()));
  if (cmp->parsed())
    return report(ds_cmd_compare_synthetic(config, image.c_str(), registered.c_str(), level.c_str(), opt(prompt),
                                           out.c_str()));
  if (train->parsed())
    return report(ds_cmd_train_disturbers(config, dataset.c_str(), opt(products), style.c_str(), out_dir.c_str()));
  if (syn->parsed())
    return report(ds_cmd_synthesize(config, tracing.c_str(), style.c_str(), opt(models), out.c_str(), opt(svg)));
  if (ras->parsed()) return report(ds_cmd_rasterize(config, sketch.c_str(), width, all_strokes ? 0 : 1, out.c_str()));
  if (exp->parsed()) return report(ds_cmd_export_svg(config, sketch.c_str(), out.c_str()));
  return 1;
}
