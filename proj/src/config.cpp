#include "mpjr/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mpjr/errors.hpp"

namespace mpjr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, end == std::string_view::npos ? end : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const char* first = v.data();
  if (!v.empty() && v.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a finite number, got '" + std::string(v) + "'");
  }
  return out;
}

int to_int(const std::string& key, std::string_view v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected true/false, got '" + std::string(v) + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string resolve(const std::filesystem::path& base, std::string_view v) {
  std::filesystem::path p{std::string(v)};
  if (p.is_relative()) p = base / p;
  return std::filesystem::weakly_canonical(p).string();
}

bool is_positive_number(std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && ptr == v.data() + v.size() && out > 0.0 && std::isfinite(out);
}

}  // namespace

RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig c;
  using Setter = std::function<void(const std::string&, std::string_view)>;
  const std::map<std::string, Setter> table = {
      {"files.height", [&](auto&, auto v) { c.height_file = resolve(base_dir, v); }},
      {"files.peak_force", [&](auto&, auto v) { c.peak_force_file = resolve(base_dir, v); }},
      {"files.dissipation", [&](auto&, auto v) { c.dissipation_file = resolve(base_dir, v); }},
      {"files.modulus", [&](auto&, auto v) { c.modulus_file = resolve(base_dir, v); }},
      {"files.height_scale", [&](auto& k, auto v) { c.height_scale = to_double(k, v); }},
      {"files.peak_force_scale", [&](auto& k, auto v) { c.peak_force_scale = to_double(k, v); }},
      {"files.dissipation_scale", [&](auto& k, auto v) { c.dissipation_scale = to_double(k, v); }},
      {"files.modulus_scale", [&](auto& k, auto v) { c.modulus_scale = to_double(k, v); }},
      {"geometry.dim", [&](auto& k, auto v) { c.dim = to_int(k, v); }},
      {"geometry.L", [&](auto& k, auto v) { c.length = to_double(k, v); }},
      {"geometry.t", [&](auto& k, auto v) { c.thickness = to_double(k, v); }},
      {"geometry.n_surface", [&](auto& k, auto v) { c.n_surface = to_int(k, v); }},
      {"geometry.grading", [&](auto& k, auto v) { c.grading = to_double(k, v); }},
      {"geometry.n_layers", [&](auto& k, auto v) { c.n_layers = to_int(k, v); }},
      {"geometry.profile_row", [&](auto& k, auto v) { c.profile_row = to_int(k, v); }},
      {"geometry.downsample", [&](auto& k, auto v) { c.downsample = to_int(k, v); }},
      {"material.nu", [&](auto& k, auto v) { c.nu = to_double(k, v); }},
      {"material.threshold", [&](auto& k, auto v) { c.threshold = to_double(k, v); }},
      {"material.homogenized", [&](auto& k, auto v) { c.homogenized = to_bool(k, v); }},
      {"material.E1", [&](auto& k, auto v) { c.e_matrix = to_double(k, v); }},
      {"material.E2", [&](auto& k, auto v) { c.e_inclusion = to_double(k, v); }},
      {"material.E_star", [&](auto& k, auto v) { c.e_star = to_double(k, v); }},
      {"law.k_t", [&](auto& k, auto v) { c.k_t = to_double(k, v); }},
      {"law.k_cap", [&](auto& k, auto v) { c.k_cap = to_double(k, v); }},
      {"law.g_init", [&](auto&, auto v) { c.g_init = std::string(v); }},
      {"law.penalty", [&](auto& k, auto v) { c.penalty = to_bool(k, v); }},
      {"law.quadrature", [&](auto&, auto v) { c.quadrature = std::string(v); }},
      {"load.unit", [&](auto&, auto v) { c.load_unit = std::string(v); }},
      {"load.ramps",
       [&](auto& k, auto v) {
         c.ramps.clear();
         for (auto item : split(v, ',')) {
           if (item.empty()) continue;
           auto parts = split(item, ':');
           if (parts.size() != 2) throw ConfigError(k, "ramp must be 'target:increments'");
           c.ramps.push_back({to_double(k, parts[0]), to_int(k, parts[1])});
         }
       }},
      {"solver.tol_rel", [&](auto& k, auto v) { c.tol_rel = to_double(k, v); }},
      {"solver.tol_abs", [&](auto& k, auto v) { c.tol_abs = to_double(k, v); }},
      {"solver.max_iterations", [&](auto& k, auto v) { c.max_iterations = to_int(k, v); }},
      {"solver.max_depth", [&](auto& k, auto v) { c.max_depth = to_int(k, v); }},
      {"solver.continue_on_snap", [&](auto& k, auto v) { c.continue_on_snap = to_bool(k, v); }},
      {"output.snapshot_every", [&](auto& k, auto v) { c.snapshot_every = to_int(k, v); }},
      {"output.sections",
       [&](auto& k, auto v) {
         c.sections.clear();
         for (auto item : split(v, ',')) {
           if (item.empty()) continue;
           auto parts = split(item, ':');
           if (parts.size() != 2 || parts[0].size() != 1) {
             throw ConfigError(k, "section must be 'x:fraction' or 'y:fraction'");
           }
           c.sections.push_back({parts[0][0], to_double(k, parts[1])});
         }
       }},
  };

  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'section.key = value'",
                       line_no);
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    if (value.empty()) throw ConfigError(key, "empty value");
    it->second(key, value);
  }

  for (const char* req : {"files.height", "files.peak_force", "files.dissipation", "files.modulus"}) {
    if (!seen.count(req)) throw ConfigError(req, "missing required key");
  }
  validate_config(c);
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::filesystem::absolute(path).parent_path());
}

void validate_config(const RunConfig& c) {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  };
  auto exists = [](const char* key, const std::string& f) {
    if (!std::filesystem::exists(f)) throw ConfigError(key, "file not found: " + f);
  };
  exists("files.height", c.height_file);
  exists("files.peak_force", c.peak_force_file);
  exists("files.dissipation", c.dissipation_file);
  exists("files.modulus", c.modulus_file);
  positive("files.height_scale", c.height_scale);
  positive("files.peak_force_scale", c.peak_force_scale);
  positive("files.dissipation_scale", c.dissipation_scale);
  positive("files.modulus_scale", c.modulus_scale);

  if (c.dim != 2 && c.dim != 3) throw ConfigError("geometry.dim", "must be 2 or 3");
  positive("geometry.L", c.length);
  positive("geometry.t", c.thickness);
  if (c.n_surface < 1) throw ConfigError("geometry.n_surface", "must be >= 1");
  if (!(c.grading >= 1.0)) throw ConfigError("geometry.grading", "must be >= 1");
  if (c.n_layers < 1) throw ConfigError("geometry.n_layers", "must be >= 1");
  if (c.profile_row < -1) throw ConfigError("geometry.profile_row", "must be >= 0 (or -1)");
  if (c.downsample < 1) throw ConfigError("geometry.downsample", "must be >= 1");

  if (!(c.nu >= 0.0 && c.nu < 0.5)) throw ConfigError("material.nu", "must lie in [0, 0.5)");
  positive("material.threshold", c.threshold);
  if (c.e_matrix < 0.0) throw ConfigError("material.E1", "must be >= 0");
  if (c.e_inclusion < 0.0) throw ConfigError("material.E2", "must be >= 0");
  if (c.e_star < 0.0) throw ConfigError("material.E_star", "must be >= 0");

  positive("law.k_t", c.k_t);
  if (c.k_cap < 0.0) throw ConfigError("law.k_cap", "must be >= 0");
  if (c.g_init != "g0" && !is_positive_number(c.g_init)) {
    throw ConfigError("law.g_init", "must be 'g0' or a positive length");
  }
  if (c.quadrature != "nodal" && c.quadrature != "gauss") {
    throw ConfigError("law.quadrature", "must be 'nodal' or 'gauss'");
  }

  if (c.load_unit != "h_rms" && !is_positive_number(c.load_unit)) {
    throw ConfigError("load.unit", "must be 'h_rms' or a positive length");
  }
  if (c.ramps.empty()) throw ConfigError("load.ramps", "at least one ramp required");
  for (const auto& r : c.ramps) {
    if (r.increments < 1) throw ConfigError("load.ramps", "increments must be >= 1");
  }

  positive("solver.tol_rel", c.tol_rel);
  positive("solver.tol_abs", c.tol_abs);
  if (c.max_iterations < 1) throw ConfigError("solver.max_iterations", "must be >= 1");
  if (c.max_depth < 0) throw ConfigError("solver.max_depth", "must be >= 0");

  if (c.snapshot_every < 0) throw ConfigError("output.snapshot_every", "must be >= 0");
  for (const auto& s : c.sections) {
    if (s.axis != 'x' && s.axis != 'y') throw ConfigError("output.sections", "axis must be x or y");
    if (!(s.position >= 0.0 && s.position <= 1.0)) {
      throw ConfigError("output.sections", "position must lie in [0, 1]");
    }
  }
}

std::string write_config(const RunConfig& c) {
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "files.height = " << c.height_file << '\n'
    << "files.peak_force = " << c.peak_force_file << '\n'
    << "files.dissipation = " << c.dissipation_file << '\n'
    << "files.modulus = " << c.modulus_file << '\n'
    << "files.height_scale = " << fmt(c.height_scale) << '\n'
    << "files.peak_force_scale = " << fmt(c.peak_force_scale) << '\n'
    << "files.dissipation_scale = " << fmt(c.dissipation_scale) << '\n'
    << "files.modulus_scale = " << fmt(c.modulus_scale) << '\n'
    << "geometry.dim = " << c.dim << '\n'
    << "geometry.L = " << fmt(c.length) << '\n'
    << "geometry.t = " << fmt(c.thickness) << '\n'
    << "geometry.n_surface = " << c.n_surface << '\n'
    << "geometry.grading = " << fmt(c.grading) << '\n'
    << "geometry.n_layers = " << c.n_layers << '\n'
    << "geometry.profile_row = " << c.profile_row << '\n'
    << "geometry.downsample = " << c.downsample << '\n'
    << "material.nu = " << fmt(c.nu) << '\n'
    << "material.threshold = " << fmt(c.threshold) << '\n'
    << "material.homogenized = " << b(c.homogenized) << '\n'
    << "material.E1 = " << fmt(c.e_matrix) << '\n'
    << "material.E2 = " << fmt(c.e_inclusion) << '\n'
    << "material.E_star = " << fmt(c.e_star) << '\n'
    << "law.k_t = " << fmt(c.k_t) << '\n'
    << "law.k_cap = " << fmt(c.k_cap) << '\n'
    << "law.g_init = " << c.g_init << '\n'
    << "law.penalty = " << b(c.penalty) << '\n'
    << "law.quadrature = " << c.quadrature << '\n'
    << "load.unit = " << c.load_unit << '\n'
    << "load.ramps = ";
  for (std::size_t i = 0; i < c.ramps.size(); ++i) {
    o << (i ? ", " : "") << fmt(c.ramps[i].target) << ':' << c.ramps[i].increments;
  }
  o << '\n'
    << "solver.tol_rel = " << fmt(c.tol_rel) << '\n'
    << "solver.tol_abs = " << fmt(c.tol_abs) << '\n'
    << "solver.max_iterations = " << c.max_iterations << '\n'
    << "solver.max_depth = " << c.max_depth << '\n'
    << "solver.continue_on_snap = " << b(c.continue_on_snap) << '\n'
    << "output.snapshot_every = " << c.snapshot_every << '\n';
  if (!c.sections.empty()) {
    o << "output.sections = ";
    for (std::size_t i = 0; i < c.sections.size(); ++i) {
      o << (i ? ", " : "") << c.sections[i].axis << ':' << fmt(c.sections[i].position);
    }
    o << '\n';
  }
  return o.str();
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : write_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mpjr
