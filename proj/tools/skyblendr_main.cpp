// skyblendr: replace the sky in a numbered image sequence.
//
//   skyblendr --config scene.cfg [--input frames/ --output out/ --template sky.png ...]

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "skyblendr/config.hpp"
#include "skyblendr/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Video sky replacement for numbered image sequences"};

  std::string config_path;
  std::string report_path;
  app.add_option("--config", config_path, "Flat 'key = value' configuration file")->check(CLI::ExistingFile);
  app.add_option("--report", report_path, "Write a JSON run report to this path");

  // Command-line overrides map onto config keys; applied after the file.
  const std::vector<std::pair<std::string, std::string>> overrides = {
      {"--input", "input"},       {"--output", "output"},         {"--template", "template"},
      {"--alpha", "alpha"},       {"--beta", "beta"},             {"--radius", "radius"},
      {"--epsilon", "epsilon"},   {"--eta", "eta"},               {"--bandwidth", "bandwidth"},
      {"--crop-factor", "crop_factor"}, {"--matte-dir", "matte_dir"}, {"--seed", "seed"},
      {"--threads", "threads"},
  };
  std::vector<std::optional<std::string>> values(overrides.size());
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    app.add_option_function<std::string>(
        overrides[i].first, [&values, i](const std::string& v) { values[i] = v; },
        "Override config key '" + overrides[i].second + "'");
  }
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only print errors");

  CLI11_PARSE(app, argc, argv);

  try {
    skyblendr::PipelineConfig config;
    if (!config_path.empty()) config = skyblendr::load_config(config_path);
    for (std::size_t i = 0; i < overrides.size(); ++i) {
      if (values[i]) skyblendr::apply_setting(config, overrides[i].second, *values[i]);
    }

    const skyblendr::RunSummary summary = skyblendr::run(config);
    for (const std::string& w : summary.warnings) std::cerr << "warning: " << w << '\n';
    if (!report_path.empty()) skyblendr::write_report(report_path, summary);

    if (!quiet) {
      const auto& p = summary.phase_seconds;
      const double n = summary.frames;
      auto fps = [n](double s) { return s > 0.0 ? n / s : 0.0; };
      std::printf("frames: %d  wall: %.2fs  fps: %.2f  fallbacks: %d\n", summary.frames, summary.total_seconds,
                  summary.fps, summary.fallback_count);
      std::printf("phase fps  matting %.1f  motion %.1f  render %.1f  blend %.1f  (motion+render+blend %.1f)\n",
                  fps(p.matting), fps(p.motion), fps(p.render), fps(p.blend), fps(p.motion + p.render + p.blend));
    }
  } catch (const std::exception& e) {
    std::cerr << "skyblendr: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
