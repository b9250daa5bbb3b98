#include "skyblendr/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace skyblendr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string quote(std::string_view key) { return "'" + std::string(key) + "'"; }

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw std::invalid_argument("setting " + quote(key) + " expects a number, got " + quote(value));
  }
  return out;
}

long long parse_integer(std::string_view key, std::string_view value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw std::invalid_argument("setting " + quote(key) + " expects an integer, got " + quote(value));
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  const long long v = parse_integer(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw std::invalid_argument("setting " + quote(key) + " is out of range");
  }
  return static_cast<int>(v);
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw std::invalid_argument("setting " + quote(key) + " expects true/false, got " + quote(value));
}

WeatherLayerSpec& weather_layer(PipelineConfig& config, WeatherKind kind, double default_opacity) {
  for (WeatherLayerSpec& spec : config.weather) {
    if (spec.kind == kind) return spec;
  }
  WeatherLayerSpec spec;
  spec.kind = kind;
  spec.opacity = default_opacity;
  config.weather.push_back(spec);
  return config.weather.back();
}

MatteFileSequence& file_source(PipelineConfig& config) {
  if (!std::holds_alternative<MatteFileSequence>(config.matte_source)) config.matte_source = MatteFileSequence{};
  return std::get<MatteFileSequence>(config.matte_source);
}

CoarseMatteWeights& heuristic_weights(PipelineConfig& config) {
  if (!std::holds_alternative<HeuristicMatteSource>(config.matte_source)) config.matte_source = HeuristicMatteSource{};
  return std::get<HeuristicMatteSource>(config.matte_source).weights;
}

}  // namespace

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  value = trim(value);
  MotionParams& motion = config.motion;
  if (key == "input") {
    config.input = std::string(value);
  } else if (key == "input_start") {
    config.input_start = parse_int(key, value);
  } else if (key == "output") {
    config.output = std::string(value);
  } else if (key == "output_pattern") {
    config.output_pattern = std::string(value);
  } else if (key == "template") {
    config.template_path = std::string(value);
  } else if (key == "crop_factor") {
    config.crop_factor = parse_double(key, value);
  } else if (key == "mirror_tile") {
    config.mirror_tile = parse_bool(key, value);
  } else if (key == "matte_source") {
    if (value == "heuristic") {
      config.matte_source = HeuristicMatteSource{};
    } else if (value == "files") {
      file_source(config);
    } else {
      throw std::invalid_argument("matte_source must be 'heuristic' or 'files', got " + quote(value));
    }
  } else if (key == "matte_dir") {
    file_source(config).directory = std::string(value);
  } else if (key == "matte_pattern") {
    file_source(config).pattern = std::string(value);
  } else if (key == "matte_long_side") {
    config.matting_long_side = parse_int(key, value);
  } else if (key == "matte_w_blue") {
    heuristic_weights(config).blue = parse_double(key, value);
  } else if (key == "matte_w_smooth") {
    heuristic_weights(config).smooth = parse_double(key, value);
  } else if (key == "matte_w_height") {
    heuristic_weights(config).height = parse_double(key, value);
  } else if (key == "matte_w_brightness") {
    heuristic_weights(config).brightness = parse_double(key, value);
  } else if (key == "matte_bias") {
    heuristic_weights(config).bias = parse_double(key, value);
  } else if (key == "radius") {
    config.guided.radius = parse_int(key, value);
  } else if (key == "epsilon") {
    config.guided.epsilon = parse_double(key, value);
  } else if (key == "max_features") {
    motion.max_features = parse_int(key, value);
  } else if (key == "pyramid_levels") {
    motion.pyramid_levels = parse_int(key, value);
  } else if (key == "lk_window") {
    motion.lk_window = parse_int(key, value);
  } else if (key == "lk_iterations") {
    motion.lk_iterations = parse_int(key, value);
  } else if (key == "lk_epsilon") {
    motion.lk_epsilon = parse_double(key, value);
  } else if (key == "bandwidth") {
    motion.kde_bandwidth = parse_double(key, value);
  } else if (key == "eta") {
    motion.eta = parse_double(key, value);
  } else if (key == "ransac_iterations") {
    motion.ransac_iterations = parse_int(key, value);
  } else if (key == "ransac_tolerance") {
    motion.ransac_tolerance = parse_double(key, value);
  } else if (key == "min_matches") {
    motion.min_matches = parse_int(key, value);
  } else if (key == "seed") {
    const long long seed = parse_integer(key, value);
    if (seed < 0) throw std::invalid_argument("seed must be non-negative");
    motion.rng_seed = static_cast<std::uint64_t>(seed);
  } else if (key == "alpha") {
    config.harmonization.alpha = parse_double(key, value);
  } else if (key == "beta") {
    config.harmonization.beta = parse_double(key, value);
  } else if (key == "sky_threshold") {
    config.harmonization.sky_threshold = parse_double(key, value);
  } else if (key == "rain") {
    weather_layer(config, WeatherKind::rain, 0.5).source = std::string(value);
  } else if (key == "rain_opacity") {
    weather_layer(config, WeatherKind::rain, 0.5).opacity = parse_double(key, value);
  } else if (key == "haze_opacity") {
    weather_layer(config, WeatherKind::haze, 0.3).opacity = parse_double(key, value);
  } else if (key == "haze_level") {
    weather_layer(config, WeatherKind::haze, 0.3).level = parse_double(key, value);
  } else if (key == "threads") {
    config.threads = parse_int(key, value);
  } else {
    throw std::invalid_argument("unknown setting " + quote(key));
  }
}

PipelineConfig parse_config(std::string_view text, PipelineConfig config) {
  int line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_number) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

void PipelineConfig::validate() const {
  if (!(crop_factor > 0.0 && crop_factor <= 1.0)) throw std::invalid_argument("crop_factor must lie in (0, 1]");
  if (matting_long_side < 8) throw std::invalid_argument("matte_long_side must be >= 8");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (input_start < 0) throw std::invalid_argument("input_start must be >= 0");
  guided.validate();
  motion.validate();
  harmonization.validate();
  for (const WeatherLayerSpec& spec : weather) {
    if (!(spec.opacity >= 0.0 && spec.opacity <= 1.0)) throw std::invalid_argument("weather opacity must lie in [0, 1]");
    if (!(spec.level >= 0.0 && spec.level <= 1.0)) throw std::invalid_argument("haze level must lie in [0, 1]");
    if (spec.kind == WeatherKind::rain && spec.source.empty()) {
      throw std::invalid_argument("rain layer needs a source ('rain = <path>')");
    }
  }
}

}  // namespace skyblendr
