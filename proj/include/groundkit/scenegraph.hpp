#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace groundkit::scene {

struct ObjectRecord {
  std::string id;
  std::string object_class;
  std::vector<std::string> attributes;
  std::array<double, 3> position{0.0, 0.0, 0.0};
};

// Dictionary of detected objects keyed by id; re-detections replace the
// previous record for the same id.
class WorldModel {
 public:
  void ingest(const ObjectRecord& detection);  // rejects non-finite positions
  std::size_t size() const { return objects_.size(); }
  bool empty() const { return objects_.empty(); }
  const std::map<std::string, ObjectRecord>& objects() const { return objects_; }

 private:
  std::map<std::string, ObjectRecord> objects_;
};

struct SceneNode {
  std::string id;
  std::string text;  // attributes followed by the class
};

struct SceneEdge {
  int from = 0;  // node indices
  int to = 0;
  std::string predicate;
};

// Fully connected directed graph over the world model: N nodes sorted
// by id, N(N-1) predicate-labeled edges, no self loops.
struct SceneGraph {
  std::vector<SceneNode> nodes;
  std::vector<SceneEdge> edges;

  int node_index(const std::string& id) const;  // -1 when absent
};

// default dead band in meters for the predicate rules
constexpr double kDefaultEpsilon = 0.05;

// Spatial relation of `to` relative to `from` in the global frame with
// x forward and y left. Lateral token first ("left"/"right"), then the
// longitudinal token ("front"/"behind"), joined by a blank; "near" when
// both axes fall inside the dead band. z is ignored.
std::string spatial_predicate(const ObjectRecord& from, const ObjectRecord& to,
                              double epsilon = kDefaultEpsilon);

SceneGraph build_scene_graph(const WorldModel& world, double epsilon = kDefaultEpsilon);

// JSON Lines ingestion, one detection per line:
//   {"id":str, "class":str, "attributes":[str], "position":[x,y,z]}
ObjectRecord detection_from_json_line(const std::string& line);
WorldModel world_from_jsonl_file(const std::string& path);

// {"nodes":[{"id","text"}], "edges":[{"from","to","predicate"}]}
std::string scene_graph_to_json(const SceneGraph& graph);
SceneGraph scene_graph_from_json(const std::string& json_text);

}  // namespace groundkit::scene
