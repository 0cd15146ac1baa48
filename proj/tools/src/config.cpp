#include "config.hpp"

#include <algorithm>
#include <memory>

namespace sausagelab {
namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void type_error(const std::string& field, const char* expected) {
  throw ConfigError("field '" + field + "': expected " + expected);
}

}  // namespace

json parse_config(const std::string& text, const std::string& source) {
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw ConfigError(source + ": top level must be an object");
    return doc;
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": malformed JSON");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError("field '" + path + "': expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing field '" + join(path, key) + "'");
  return *it;
}

double get_double(const json& obj, const std::string& key, const std::string& path,
                  std::optional<double> fallback) {
  if (fallback && (!obj.is_object() || !obj.contains(key))) return *fallback;
  const json& v = require(obj, key, path);
  if (!v.is_number()) type_error(join(path, key), "a number");
  return v.get<double>();
}

long long get_int(const json& obj, const std::string& key, const std::string& path,
                  std::optional<long long> fallback) {
  if (fallback && (!obj.is_object() || !obj.contains(key))) return *fallback;
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) type_error(join(path, key), "an integer");
  return v.get<long long>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path,
              std::optional<bool> fallback) {
  if (fallback && (!obj.is_object() || !obj.contains(key))) return *fallback;
  const json& v = require(obj, key, path);
  if (!v.is_boolean()) type_error(join(path, key), "true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path,
                       std::optional<std::string> fallback) {
  if (fallback && (!obj.is_object() || !obj.contains(key))) return *fallback;
  const json& v = require(obj, key, path);
  if (!v.is_string()) type_error(join(path, key), "a string");
  return v.get<std::string>();
}

std::vector<double> get_doubles(const json& obj, const std::string& key, const std::string& path,
                                std::optional<std::vector<double>> fallback) {
  if (fallback && (!obj.is_object() || !obj.contains(key))) return *fallback;
  const json& v = require(obj, key, path);
  if (!v.is_array()) type_error(join(path, key), "an array of numbers");
  std::vector<double> out;
  for (const json& item : v) {
    if (!item.is_number()) type_error(join(path, key), "an array of numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

std::vector<sausage::Vertex> get_vertices(const json& obj, const std::string& key,
                                          const std::string& path,
                                          std::optional<std::vector<sausage::Vertex>> fallback) {
  if (fallback && (!obj.is_object() || !obj.contains(key))) return *fallback;
  const json& v = require(obj, key, path);
  std::vector<sausage::Vertex> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<sausage::Vertex>());
    return out;
  }
  if (!v.is_array()) type_error(join(path, key), "a vertex id or an array of vertex ids");
  for (const json& item : v) {
    if (!item.is_number_integer()) type_error(join(path, key), "an array of vertex ids");
    out.push_back(item.get<sausage::Vertex>());
  }
  return out;
}

sausage::SpaceDescriptor parse_space(const json& node, const std::string& path) {
  using namespace sausage;
  if (!node.is_object()) throw ConfigError("field '" + path + "': expected an object");
  SpaceDescriptor d;
  const std::string measure = get_string(node, "measure", path, std::string("incident"));
  if (measure == "incident") {
    d.measure = MeasureRule::kIncidentConductance;
  } else if (measure == "unit") {
    d.measure = MeasureRule::kUnit;
  } else {
    throw ConfigError("field '" + join(path, "measure") + "': expected \"incident\" or \"unit\"");
  }
  d.vertex_cap = static_cast<std::size_t>(
      get_int(node, "vertex_cap", path, static_cast<long long>(kDefaultVertexCap)));
  const std::string kind = get_string(node, "kind", path);
  auto positive = [&](const char* key) {
    const long long v = get_int(node, key, path);
    if (v <= 0) throw ConfigError("field '" + join(path, key) + "': must be positive");
    return static_cast<int>(v);
  };
  if (kind == "lattice_box") {
    d.kind = LatticeBox{positive("dims"), positive("side"), get_bool(node, "periodic", path, false)};
  } else if (kind == "path") {
    d.kind = LatticeBox{1, positive("n"), false};
  } else if (kind == "sierpinski_gasket") {
    d.kind = SierpinskiGasket{positive("level")};
  } else if (kind == "vicsek_tree") {
    d.kind = VicsekTree{positive("level")};
  } else if (kind == "random") {
    RandomConnected r;
    r.vertex_count = static_cast<std::size_t>(positive("vertices"));
    r.extra_edges = static_cast<std::size_t>(get_int(node, "extra_edges", path, 0));
    r.min_conductance = get_double(node, "min_conductance", path, 0.5);
    r.max_conductance = get_double(node, "max_conductance", path, 2.0);
    r.seed = static_cast<std::uint64_t>(get_int(node, "seed", path, 1));
    d.kind = r;
  } else if (kind == "explicit") {
    ExplicitGraph g;
    g.vertex_count = static_cast<std::size_t>(positive("vertices"));
    const json& edges = require(node, "edges", path);
    if (!edges.is_array()) type_error(join(path, "edges"), "an array of [u, v, w, l] entries");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const json& e = edges[i];
      const std::string field = join(path, "edges") + "[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() < 2 || e.size() > 4) type_error(field, "[u, v, w, l]");
      for (const json& item : e) {
        if (!item.is_number()) type_error(field, "[u, v, w, l] numbers");
      }
      Edge edge;
      edge.u = e[0].get<Vertex>();
      edge.v = e[1].get<Vertex>();
      if (e.size() > 2) edge.conductance = e[2].get<double>();
      if (e.size() > 3) edge.length = e[3].get<double>();
      g.edges.push_back(edge);
    }
    g.measure = get_doubles(node, "mu", path, std::vector<double>{});
    d.kind = std::move(g);
  } else if (kind == "cable_refinement") {
    auto cable = std::make_shared<CableRefinement>();
    cable->base = parse_space(require(node, "base", path), join(path, "base"));
    cable->subdivisions = positive("m");
    d.kind = cable;
  } else {
    throw ConfigError("field '" + join(path, "kind") + "': unknown space kind '" + kind + "'");
  }
  return d;
}

void check_vertices(const sausage::MetricMeasureGraph& space,
                    const std::vector<sausage::Vertex>& vertices, const std::string& field) {
  for (sausage::Vertex v : vertices) {
    if (!space.contains(v)) {
      throw ConfigError("field '" + field + "': vertex " + std::to_string(v) + " is not in the space");
    }
  }
}

}  // namespace sausagelab
