#include "groundkit/scenegraph.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace groundkit::scene {

void WorldModel::ingest(const ObjectRecord& detection) {
  for (double v : detection.position)
    if (!std::isfinite(v))
      throw std::invalid_argument("world model: non-finite position for id '" +
                                  detection.id + "'");
  if (detection.id.empty()) throw std::invalid_argument("world model: empty id");
  objects_[detection.id] = detection;
}

int SceneGraph::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

std::string spatial_predicate(const ObjectRecord& from, const ObjectRecord& to,
                              double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("spatial_predicate: negative epsilon");
  const double dx = to.position[0] - from.position[0];
  const double dy = to.position[1] - from.position[1];
  std::string lateral;
  if (dy > epsilon)
    lateral = "left";
  else if (dy < -epsilon)
    lateral = "right";
  std::string longitudinal;
  if (dx > epsilon)
    longitudinal = "front";
  else if (dx < -epsilon)
    longitudinal = "behind";
  if (lateral.empty() && longitudinal.empty()) return "near";
  if (lateral.empty()) return longitudinal;
  if (longitudinal.empty()) return lateral;
  return lateral + " " + longitudinal;
}

namespace {

std::string node_text(const ObjectRecord& rec) {
  std::string text;
  for (const auto& attr : rec.attributes) {
    if (!text.empty()) text += ' ';
    text += attr;
  }
  if (!text.empty()) text += ' ';
  text += rec.object_class;
  return text;
}

}  // namespace

SceneGraph build_scene_graph(const WorldModel& world, double epsilon) {
  if (world.empty()) throw std::invalid_argument("build_scene_graph: empty world model");
  SceneGraph graph;
  std::vector<const ObjectRecord*> recs;
  for (const auto& [id, rec] : world.objects()) {  // std::map iterates sorted by id
    graph.nodes.push_back({id, node_text(rec)});
    recs.push_back(&rec);
  }
  const int n = static_cast<int>(recs.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      graph.edges.push_back({i, j, spatial_predicate(*recs[i], *recs[j], epsilon)});
    }
  return graph;
}

ObjectRecord detection_from_json_line(const std::string& line) {
  const auto doc = nlohmann::json::parse(line);
  ObjectRecord rec;
  rec.id = doc.at("id").get<std::string>();
  rec.object_class = doc.at("class").get<std::string>();
  if (doc.contains("attributes"))
    rec.attributes = doc.at("attributes").get<std::vector<std::string>>();
  const auto pos = doc.at("position").get<std::vector<double>>();
  if (pos.size() != 3)
    throw std::invalid_argument("detection: position must have three coordinates");
  rec.position = {pos[0], pos[1], pos[2]};
  return rec;
}

WorldModel world_from_jsonl_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("world model: cannot open " + path);
  WorldModel world;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    world.ingest(detection_from_json_line(line));
  }
  return world;
}

std::string scene_graph_to_json(const SceneGraph& graph) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& node : graph.nodes)
    doc["nodes"].push_back({{"id", node.id}, {"text", node.text}});
  doc["edges"] = nlohmann::json::array();
  for (const auto& edge : graph.edges)
    doc["edges"].push_back({{"from", graph.nodes[static_cast<std::size_t>(edge.from)].id},
                            {"to", graph.nodes[static_cast<std::size_t>(edge.to)].id},
                            {"predicate", edge.predicate}});
  return doc.dump(2);
}

SceneGraph scene_graph_from_json(const std::string& json_text) {
  const auto doc = nlohmann::json::parse(json_text);
  SceneGraph graph;
  for (const auto& node : doc.at("nodes"))
    graph.nodes.push_back(
        {node.at("id").get<std::string>(), node.at("text").get<std::string>()});
  for (const auto& edge : doc.at("edges")) {
    const int from = graph.node_index(edge.at("from").get<std::string>());
    const int to = graph.node_index(edge.at("to").get<std::string>());
    if (from < 0 || to < 0)
      throw std::invalid_argument("scene graph: edge references unknown node");
    graph.edges.push_back({from, to, edge.at("predicate").get<std::string>()});
  }
  return graph;
}

}  // namespace groundkit::scene
