#include "skyblendr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <stdexcept>

#include <json.hpp>

#include "skyblendr/image_io.hpp"

namespace skyblendr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_image_file(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".tif" || ext == ".tiff" ||
         ext == ".ppm" || ext == ".pgm";
}

// Trailing decimal digits of the file stem, or -1.
long long trailing_number(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  std::size_t start = stem.size();
  while (start > 0 && std::isdigit(static_cast<unsigned char>(stem[start - 1]))) --start;
  if (start == stem.size() || stem.size() - start > 9) return -1;
  return std::stoll(stem.substr(start));
}

std::vector<std::filesystem::path> list_sequence(const std::filesystem::path& source, int start) {
  std::vector<std::filesystem::path> out;
  if (std::filesystem::is_directory(source)) {
    std::vector<std::pair<long long, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::directory_iterator(source)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) {
        files.emplace_back(trailing_number(entry.path()), entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (auto& f : files) out.push_back(std::move(f.second));
    return out;
  }
  const std::string pattern = source.string();
  if (pattern.find('%') != std::string::npos) {
    for (int i = start;; ++i) {
      std::filesystem::path p = format_frame_path(pattern, i);
      if (!std::filesystem::is_regular_file(p)) break;
      out.push_back(std::move(p));
    }
    return out;
  }
  if (std::filesystem::is_regular_file(source)) out.push_back(source);
  return out;
}

void ensure_writable_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("output directory " + dir.string() + " cannot be created");
  }
  const std::filesystem::path probe = dir / ".skyblendr_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw std::runtime_error("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::uint64_t frame_seed(std::uint64_t seed, int frame) {
  return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(frame);
}

}  // namespace

SkyReplacer::SkyReplacer(const PipelineConfig& config, SkyBoxTemplate sky, std::vector<WeatherLayer> layers)
    : config_(config), sky_(std::move(sky)), layers_(std::move(layers)) {
  config_.validate();
  sky_.validate();
}

Matte SkyReplacer::compute_matte(const Frame& frame, int source_index) const {
  const Size2 low = matting_input_size(frame.width(), frame.height(), config_.matting_long_side);
  Matte coarse = std::visit(
      [&](const auto& source) -> Matte {
        using Source = std::decay_t<decltype(source)>;
        if constexpr (std::is_same_v<Source, HeuristicMatteSource>) {
          return estimate_coarse_matte(resize_bilinear(frame, low.width, low.height), source.weights);
        } else {
          return load_matte(source, source_index, low.width, low.height);
        }
      },
      config_.matte_source);
  return refine_matte(coarse, frame, config_.guided);
}

FrameResult SkyReplacer::process_frame(const Frame& frame, int source_index) {
  const auto start = Clock::now();
  Matte matte = compute_matte(frame, source_index);
  return process_frame(frame, std::move(matte), seconds_since(start));
}

FrameResult SkyReplacer::process_frame(const Frame& frame, Matte matte, double matting_seconds) {
  PipelineState& s = state_;
  const int t = s.frame_count;
  if (t == 0) {
    s.width = frame.width();
    s.height = frame.height();
  } else if (!frame.same_size(s.width, s.height)) {
    throw std::runtime_error("frame " + std::to_string(t) + " is " + std::to_string(frame.width()) + "x" +
                             std::to_string(frame.height()) + " but the sequence started at " +
                             std::to_string(s.width) + "x" + std::to_string(s.height));
  }
  if (!matte.same_size(frame)) throw std::invalid_argument("matte size does not match frame " + std::to_string(t));
  if (!s.has_crop) {
    s.crop = center_crop_transform(sky_, {s.width, s.height});
    s.has_crop = true;
  }

  FrameReport report;
  report.index = t;
  report.timings.matting = matting_seconds;
  const auto start = Clock::now();

  // Motion: features on the previous frame inside its sky, tracked forward.
  auto phase = Clock::now();
  ImagePyramid pyramid = build_pyramid(to_gray(frame), config_.motion.pyramid_levels);
  if (t > 0) {
    MotionParams params = config_.motion;
    params.rng_seed = frame_seed(config_.motion.rng_seed, t);
    const auto features = detect_sky_features(s.prev_pyramid.levels[0], s.prev_matte, params);
    const auto matches = track_lk(s.prev_pyramid, pyramid, features, params);
    const auto filtered = filter_matches_kde(matches, params);
    const MotionEstimate estimate = estimate_motion_ransac(filtered, params);
    report.feature_count = static_cast<int>(features.size());
    report.match_count = static_cast<int>(matches.size());
    report.filtered_count = static_cast<int>(filtered.size());
    report.inlier_count = estimate.inlier_count;

    SimilarityTransform step;
    if (estimate.inlier_count > 0) {
      step = estimate.transform;
      s.last_step = step;
    } else {
      report.fallback = true;
      step = s.last_step;
    }
    report.step = step;
    s.history.push_back(step);
    s.motion_product = step * s.motion_product;
  }
  report.timings.motion = seconds_since(phase);

  phase = Clock::now();
  report.accumulated = s.accumulated();
  render_background_into(sky_, report.accumulated, {s.width, s.height}, background_);
  report.timings.render = seconds_since(phase);

  phase = Clock::now();
  Frame output = harmonize_and_compose(frame, background_, matte, config_.harmonization, layers_, t);
  report.timings.blend = seconds_since(phase);

  s.prev_pyramid = std::move(pyramid);
  s.prev_matte = matte;
  s.frame_count = t + 1;
  report.timings.total = matting_seconds + seconds_since(start);
  return {std::move(output), std::move(matte), report};
}

std::vector<InputFrame> list_input_frames(const PipelineConfig& config) {
  const auto paths = list_sequence(config.input, config.input_start);
  std::vector<InputFrame> frames;
  frames.reserve(paths.size());
  const bool pattern = !std::filesystem::is_directory(config.input) && config.input.string().find('%') != std::string::npos;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    int index = static_cast<int>(i);
    if (pattern) {
      index = config.input_start + static_cast<int>(i);
    } else if (const long long n = trailing_number(paths[i]); n >= 0) {
      index = static_cast<int>(n);
    }
    frames.push_back({paths[i], index});
  }
  return frames;
}

SkyBoxTemplate load_sky_template(const PipelineConfig& config) {
  SkyBoxTemplate sky;
  sky.image = read_frame(config.template_path);
  if (config.mirror_tile) sky.image = make_mirror_tileable(sky.image);
  sky.crop_factor = config.crop_factor;
  sky.validate();
  return sky;
}

std::vector<WeatherLayer> load_weather_layers(const PipelineConfig& config) {
  std::vector<WeatherLayer> layers;
  for (const WeatherLayerSpec& spec : config.weather) {
    if (spec.kind == WeatherKind::haze) {
      layers.push_back(make_haze_layer(spec.opacity, spec.level));
      continue;
    }
    WeatherLayer layer;
    layer.kind = WeatherKind::rain;
    layer.opacity = spec.opacity;
    for (const auto& path : list_sequence(spec.source, 0)) layer.frames.push_back(read_frame(path));
    if (layer.frames.empty()) throw std::runtime_error("rain layer source has no frames: " + spec.source.string());
    layers.push_back(std::move(layer));
  }
  return layers;
}

RunSummary run(const PipelineConfig& config) {
  config.validate();
  if (config.input.empty()) throw std::invalid_argument("no input configured");
  if (config.output.empty()) throw std::invalid_argument("no output directory configured");
  if (config.template_path.empty()) throw std::invalid_argument("no sky template configured");
  format_frame_path(config.output_pattern, 0);

  const std::vector<InputFrame> inputs = list_input_frames(config);
  if (inputs.empty()) throw std::runtime_error("no input frames found at " + config.input.string());
  if (const auto* files = std::get_if<MatteFileSequence>(&config.matte_source)) {
    if (!std::filesystem::is_directory(files->directory)) {
      throw std::runtime_error("matte directory not found: " + files->directory.string());
    }
  }
  SkyBoxTemplate sky = load_sky_template(config);
  const Frame first = read_frame(inputs.front().path);
  RunSummary summary;
  if (!sky.covers({first.width(), first.height()})) {
    summary.warnings.push_back("sky template is smaller than twice the frame size; tiling will repeat visibly");
  }
  SkyReplacer replacer(config, std::move(sky), load_weather_layers(config));
  ensure_writable_directory(config.output);

  struct Prepared {
    Frame frame;
    Matte matte;
    double matting_seconds = 0.0;
  };
  auto prepare = [&](std::size_t i) {
    Frame frame;
    try {
      frame = read_frame(inputs[i].path);
    } catch (const std::exception& e) {
      throw std::runtime_error("frame " + std::to_string(i) + ": " + e.what());
    }
    const auto start = Clock::now();
    Matte matte = replacer.compute_matte(frame, inputs[i].index);
    return Prepared{std::move(frame), std::move(matte), seconds_since(start)};
  };

  const auto run_start = Clock::now();
  const bool overlap = config.threads > 1;
  std::future<Prepared> next;
  if (overlap) next = std::async(std::launch::async, prepare, 0);

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Prepared current = overlap ? next.get() : prepare(i);
    // Matting of the next frame has no dependency on motion state.
    if (overlap && i + 1 < inputs.size()) next = std::async(std::launch::async, prepare, i + 1);

    FrameResult result = replacer.process_frame(current.frame, std::move(current.matte), current.matting_seconds);
    const std::filesystem::path out_path = config.output / format_frame_path(config.output_pattern, static_cast<int>(i));
    write_frame(out_path, result.output);

    const PhaseTimings& t = result.report.timings;
    summary.phase_seconds.matting += t.matting;
    summary.phase_seconds.motion += t.motion;
    summary.phase_seconds.render += t.render;
    summary.phase_seconds.blend += t.blend;
    summary.phase_seconds.total += t.total;
    if (result.report.fallback) ++summary.fallback_count;
    summary.outputs.push_back(out_path);
    summary.reports.push_back(result.report);
  }
  summary.frames = static_cast<int>(inputs.size());
  summary.total_seconds = seconds_since(run_start);
  summary.fps = summary.total_seconds > 0.0 ? summary.frames / summary.total_seconds : 0.0;
  return summary;
}

std::string report_json(const RunSummary& summary) {
  using nlohmann::json;
  auto fps = [&](double seconds) { return seconds > 0.0 ? summary.frames / seconds : 0.0; };
  auto transform = [](const SimilarityTransform& m) {
    return json{{"scale", m.scale()}, {"rotation", m.rotation()}, {"tx", m.tx()}, {"ty", m.ty()}};
  };
  const PhaseTimings& p = summary.phase_seconds;
  json doc;
  doc["summary"] = {
      {"frames", summary.frames},
      {"wall_seconds", summary.total_seconds},
      {"fps", summary.fps},
      {"fallback_count", summary.fallback_count},
      {"phase_seconds", {{"matting", p.matting}, {"motion", p.motion}, {"render", p.render}, {"blend", p.blend},
                         {"total", p.total}}},
      {"phase_fps", {{"matting", fps(p.matting)}, {"motion", fps(p.motion)}, {"render", fps(p.render)},
                     {"blend", fps(p.blend)}, {"motion_render_blend", fps(p.motion + p.render + p.blend)},
                     {"total", fps(p.total)}}},
  };
  json frames = json::array();
  for (const FrameReport& r : summary.reports) {
    frames.push_back({
        {"index", r.index},
        {"features", r.feature_count},
        {"matches", r.match_count},
        {"kde_kept", r.filtered_count},
        {"inliers", r.inlier_count},
        {"fallback", r.fallback},
        {"step", transform(r.step)},
        {"accumulated", transform(r.accumulated)},
        {"seconds", {{"matting", r.timings.matting}, {"motion", r.timings.motion}, {"render", r.timings.render},
                     {"blend", r.timings.blend}, {"total", r.timings.total}}},
    });
  }
  doc["frames"] = std::move(frames);
  return doc.dump(2);
}

void write_report(const std::filesystem::path& path, const RunSummary& summary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report to " + path.string());
  out << report_json(summary) << '\n';
}

}  // namespace skyblendr
