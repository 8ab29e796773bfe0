#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "exitlab/geometry.hpp"

namespace exitlab::config {

// Configuration problems (parse errors, unknown keys, bad values) all land
// here so the CLI can map them to its config-error exit code.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

nlohmann::json load_file(const std::string& path);

// Rejects keys outside `allowed`. The schema is strict by design: archived
// configs must not silently change meaning when options are added later.
void require_keys(const nlohmann::json& j,
                  std::initializer_list<const char*> allowed,
                  const std::string& where);

geometry::Point parse_point(const nlohmann::json& j, const std::string& where);
geometry::CompactSet parse_compact(const nlohmann::json& j);
geometry::Domain parse_domain(const nlohmann::json& j);

}  // namespace exitlab::config
