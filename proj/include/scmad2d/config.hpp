// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The scmad2d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCMAD2D_CONFIG_HPP
#define SCMAD2D_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scmad2d/channel.hpp"
#include "scmad2d/errors.hpp"

namespace scmad2d {

/// Scenario plus the experiment knobs that may share its file.
struct RunConfig {
  ScenarioConfig scenario;
  std::vector<double> sweepValuesDbm{24.0, 26.0, 28.0, 30.0, 32.0};
  int numSeeds = 50;
  int tMax = 10;
  bool reportBitsPerSecond = false;

  void validate() const {
    scenario.validate();
    if (sweepValuesDbm.empty()) throw ConfigError("invalid sweepValuesDbm: must not be empty", 0, "sweepValuesDbm");
    for (double v : sweepValuesDbm)
      if (!std::isfinite(v)) throw ConfigError("invalid sweepValuesDbm: values must be finite", 0, "sweepValuesDbm");
    if (numSeeds < 1) throw ConfigError("invalid numSeeds: must be >= 1", 0, "numSeeds");
    if (tMax < 1) throw ConfigError("invalid tMax: must be >= 1", 0, "tMax");
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const std::string& key) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("line " + std::to_string(line) + ": cannot parse value of " + key, line, key);
  return v;
}

inline std::vector<double> parse_list(std::string_view text, std::size_t line, const std::string& key) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<double>(text.substr(0, comma), line, key));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

inline bool parse_bool(std::string_view text, std::size_t line, const std::string& key) {
  text = trim(text);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("line " + std::to_string(line) + ": expected true or false for " + key, line, key);
}

}  // namespace detail

/// Flat "key = value" lines; '#' starts a comment. Keys are the field names
/// of ScenarioConfig plus sweepValuesDbm, numSeeds, tMax and
/// reportBitsPerSecond. Lists are comma separated. Unset keys keep their
/// defaults. Throws ConfigError with the line number for syntax problems and
/// with the field name for range problems.
inline RunConfig parse_run_config(std::istream& is) {
  RunConfig rc;
  ScenarioConfig& sc = rc.scenario;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value", line);
    const std::string key(detail::trim(text.substr(0, eq)));
    const std::string_view value = detail::trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": missing key", line);
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line) + ": duplicate key " + key, line, key);

    using detail::parse_number;
    if (key == "J") sc.J = parse_number<int>(value, line, key);
    else if (key == "K") sc.K = parse_number<int>(value, line, key);
    else if (key == "N") sc.N = parse_number<int>(value, line, key);
    else if (key == "J_D") sc.J_D = parse_number<int>(value, line, key);
    else if (key == "noiseDbmPerHz") sc.noiseDbmPerHz = parse_number<double>(value, line, key);
    else if (key == "bandwidthHz") sc.bandwidthHz = parse_number<double>(value, line, key);
    else if (key == "cellularPowerCapDbm") sc.cellularPowerCapDbm = parse_number<double>(value, line, key);
    else if (key == "d2dPowerCapDbm") sc.d2dPowerCapDbm = parse_number<double>(value, line, key);
    else if (key == "cellularSinrFloorDb") sc.cellularSinrFloorDb = parse_number<double>(value, line, key);
    else if (key == "d2dSinrFloorDb") sc.d2dSinrFloorDb = parse_number<double>(value, line, key);
    else if (key == "cellRadiusM") sc.cellRadiusM = parse_number<double>(value, line, key);
    else if (key == "d2dDistanceRangeM") {
      const auto v = detail::parse_list(value, line, key);
      if (v.size() != 2) throw ConfigError("line " + std::to_string(line) + ": d2dDistanceRangeM needs min, max", line, key);
      sc.d2dDistanceRangeM = {v[0], v[1]};
    } else if (key == "seed") sc.seed = parse_number<std::uint64_t>(value, line, key);
    else if (key == "sweepValuesDbm") rc.sweepValuesDbm = detail::parse_list(value, line, key);
    else if (key == "numSeeds") rc.numSeeds = parse_number<int>(value, line, key);
    else if (key == "tMax") rc.tMax = parse_number<int>(value, line, key);
    else if (key == "reportBitsPerSecond") rc.reportBitsPerSecond = detail::parse_bool(value, line, key);
    else throw ConfigError("line " + std::to_string(line) + ": unknown key " + key, line, key);
  }
  rc.validate();
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_run_config(in);
}

inline ScenarioConfig parse_config(const std::string& path) { return load_run_config(path).scenario; }

inline void write_config(std::ostream& os, const RunConfig& rc) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  const ScenarioConfig& sc = rc.scenario;
  os << "J = " << sc.J << '\n'
     << "K = " << sc.K << '\n'
     << "N = " << sc.N << '\n'
     << "J_D = " << sc.J_D << '\n'
     << "noiseDbmPerHz = " << sc.noiseDbmPerHz << '\n'
     << "bandwidthHz = " << sc.bandwidthHz << '\n'
     << "cellularPowerCapDbm = " << sc.cellularPowerCapDbm << '\n'
     << "d2dPowerCapDbm = " << sc.d2dPowerCapDbm << '\n'
     << "cellularSinrFloorDb = " << sc.cellularSinrFloorDb << '\n'
     << "d2dSinrFloorDb = " << sc.d2dSinrFloorDb << '\n'
     << "cellRadiusM = " << sc.cellRadiusM << '\n'
     << "d2dDistanceRangeM = " << sc.d2dDistanceRangeM.first << ", " << sc.d2dDistanceRangeM.second << '\n'
     << "seed = " << sc.seed << '\n'
     << "sweepValuesDbm = ";
  for (std::size_t i = 0; i < rc.sweepValuesDbm.size(); ++i) os << (i ? ", " : "") << rc.sweepValuesDbm[i];
  os << '\n'
     << "numSeeds = " << rc.numSeeds << '\n'
     << "tMax = " << rc.tMax << '\n'
     << "reportBitsPerSecond = " << (rc.reportBitsPerSecond ? "true" : "false") << '\n';
  os.precision(old);
}

}  // namespace scmad2d

#endif  // SCMAD2D_CONFIG_HPP
