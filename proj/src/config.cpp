#include "exitlab/config.hpp"

#include <fstream>

#include "exitlab/schlicht.hpp"

namespace exitlab::config {

using nlohmann::json;

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

geometry::Point parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || (j.size() != 2 && j.size() != 3))
    throw ConfigError(where + ": expected [x,y] or [x,y,z]");
  for (const auto& v : j)
    if (!v.is_number()) throw ConfigError(where + ": non-numeric coordinate");
  if (j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

namespace {

double number_at(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(where + ": missing numeric \"" + std::string(key) + "\"");
  return j[key].get<double>();
}

}  // namespace

geometry::CompactSet parse_compact(const json& j) {
  using geometry::CompactSet;
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ConfigError("compact set: missing \"type\"");
  std::string type = j["type"].get<std::string>();
  try {
    if (type == "closed_ball") {
      require_keys(j, {"type", "center", "radius"}, "closed_ball");
      return CompactSet::closed_ball(parse_point(j.at("center"), "closed_ball"),
                                     number_at(j, "radius", "closed_ball"));
    }
    if (type == "segment") {
      require_keys(j, {"type", "a", "b"}, "segment");
      return CompactSet::segment(parse_point(j.at("a"), "segment"),
                                 parse_point(j.at("b"), "segment"));
    }
    if (type == "point") {
      require_keys(j, {"type", "at"}, "point");
      return CompactSet::single_point(parse_point(j.at("at"), "point"));
    }
    if (type == "union") {
      require_keys(j, {"type", "parts"}, "union");
      if (!j.contains("parts") || !j["parts"].is_array() || j["parts"].empty())
        throw ConfigError("union: \"parts\" must be a non-empty array");
      std::vector<CompactSet> parts;
      for (const auto& p : j["parts"]) parts.push_back(parse_compact(p));
      return CompactSet::finite_union(std::move(parts));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("compact set: ") + e.what());
  }
  throw ConfigError("compact set: unknown type \"" + type + "\"");
}

geometry::Domain parse_domain(const json& j) {
  using geometry::Domain;
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ConfigError("domain: missing \"type\"");
  std::string type = j["type"].get<std::string>();
  try {
    if (type == "ball") {
      require_keys(j, {"type", "center", "radius"}, "ball");
      return Domain::ball(parse_point(j.at("center"), "ball"),
                          number_at(j, "radius", "ball"));
    }
    if (type == "half_space") {
      require_keys(j, {"type", "normal", "offset"}, "half_space");
      return Domain::half_space(parse_point(j.at("normal"), "half_space"),
                                number_at(j, "offset", "half_space"));
    }
    if (type == "strip") {
      require_keys(j, {"type", "halfwidth"}, "strip");
      return Domain::strip(number_at(j, "halfwidth", "strip"));
    }
    if (type == "sector") {
      require_keys(j, {"type", "angle"}, "sector");
      return Domain::sector(number_at(j, "angle", "sector"));
    }
    if (type == "annulus") {
      require_keys(j, {"type", "inner", "outer", "dim"}, "annulus");
      return Domain::annulus(number_at(j, "inner", "annulus"),
                             number_at(j, "outer", "annulus"),
                             static_cast<int>(number_at(j, "dim", "annulus")));
    }
    if (type == "complement") {
      require_keys(j, {"type", "of"}, "complement");
      if (!j.contains("of")) throw ConfigError("complement: missing \"of\"");
      return Domain::complement_of(parse_compact(j.at("of")));
    }
    if (type == "punctured") {
      require_keys(j, {"type", "base", "punctures"}, "punctured");
      if (!j.contains("base") || !j.contains("punctures") ||
          !j["punctures"].is_array())
        throw ConfigError("punctured: needs \"base\" and \"punctures\"");
      std::vector<geometry::Point> pts;
      for (const auto& p : j["punctures"])
        pts.push_back(parse_point(p, "punctured"));
      return Domain::punctured(parse_domain(j.at("base")), std::move(pts));
    }
    if (type == "schlicht") {
      require_keys(j, {"type", "entry", "angle"}, "schlicht");
      if (!j.contains("entry") || !j["entry"].is_string())
        throw ConfigError("schlicht: missing \"entry\"");
      double angle = j.contains("angle") ? number_at(j, "angle", "schlicht") : 0.0;
      return harness::schlicht_entry(j["entry"].get<std::string>(), angle)
          .domain;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  throw ConfigError("domain: unknown type \"" + type + "\"");
}

}  // namespace exitlab::config
