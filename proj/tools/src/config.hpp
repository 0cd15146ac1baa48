#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sausage/space.hpp"

namespace sausagelab {

using nlohmann::json;

/// A malformed or incomplete configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the document, reporting syntax errors with line and column.
json parse_config(const std::string& text, const std::string& source);

/// Typed access to `obj[key]`; `path` names obj in diagnostics ("" at top).
const json& require(const json& obj, const std::string& key, const std::string& path);
double get_double(const json& obj, const std::string& key, const std::string& path,
                  std::optional<double> fallback = std::nullopt);
long long get_int(const json& obj, const std::string& key, const std::string& path,
                  std::optional<long long> fallback = std::nullopt);
bool get_bool(const json& obj, const std::string& key, const std::string& path,
              std::optional<bool> fallback = std::nullopt);
std::string get_string(const json& obj, const std::string& key, const std::string& path,
                       std::optional<std::string> fallback = std::nullopt);
std::vector<double> get_doubles(const json& obj, const std::string& key, const std::string& path,
                                std::optional<std::vector<double>> fallback = std::nullopt);
std::vector<sausage::Vertex> get_vertices(const json& obj, const std::string& key,
                                          const std::string& path,
                                          std::optional<std::vector<sausage::Vertex>> fallback =
                                              std::nullopt);

/// Reads a space descriptor object.
sausage::SpaceDescriptor parse_space(const json& node, const std::string& path);
/// Checks that every vertex id is inside the space.
void check_vertices(const sausage::MetricMeasureGraph& space,
                    const std::vector<sausage::Vertex>& vertices, const std::string& field);

}  // namespace sausagelab
