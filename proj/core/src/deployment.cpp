#include "crowdsense/deployment.hpp"

#include <fstream>
#include <sstream>

#include "crowdsense/errors.hpp"
#include "json_util.hpp"

namespace crowdsense {

using detail::ordered_json;

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::WifiSniffer: return "wifi_sniffer";
    case NodeKind::StereoCamera: return "stereo_camera";
    case NodeKind::CalibrationChokePoint: return "choke_point";
  }
  return "?";
}

const char* to_string(TrafficClass traffic) {
  return traffic == TrafficClass::Heavy ? "heavy" : "light";
}

namespace {

NodeKind node_kind_from(const std::string& s) {
  if (s == "wifi_sniffer") return NodeKind::WifiSniffer;
  if (s == "stereo_camera") return NodeKind::StereoCamera;
  if (s == "choke_point") return NodeKind::CalibrationChokePoint;
  throw ParseError("node kind '" + s + "' unknown");
}

TrafficClass traffic_from(const std::string& s) {
  if (s == "heavy") return TrafficClass::Heavy;
  if (s == "light") return TrafficClass::Light;
  throw ParseError("traffic class '" + s + "' unknown");
}

}  // namespace

class DeploymentCodec {
 public:
  static Deployment decode(const nlohmann::json& j) {
    Deployment dep;
    if (j.contains("frame")) {
      const auto& f = j.at("frame");
      const std::string type = f.at("type").get<std::string>();
      if (type == "wgs84") {
        auto origin = detail::point_from_json(f.at("origin"), "frame.origin");
        dep.wgs84_origin_ = {origin.x, origin.y};  // stored as (lat, lon)
      } else if (type != "local") {
        throw ParseError("frame.type must be 'local' or 'wgs84'");
      }
    }
    for (const auto& nj : j.value("nodes", nlohmann::json::array())) {
      SensorNode node;
      node.id = nj.at("id").get<std::string>();
      node.kind = node_kind_from(nj.at("kind").get<std::string>());
      node.position = decode_position(dep, nj);
      if (nj.contains("coverage")) {
        node.coverage = detail::coverage_from_json(nj.at("coverage"));
      } else {
        node.coverage = Coverage::point(node.position);
      }
      node.cluster_id = nj.value("cluster", "");
      node.camera_id = nj.value("camera", "");
      node.sniffer_id = nj.value("sniffer", "");
      dep.add_node(std::move(node));
    }
    for (const auto& cj : j.value("clusters", nlohmann::json::array())) {
      ClusterSpec cluster;
      cluster.cluster_id = cj.at("id").get<std::string>();
      cluster.traffic_class = traffic_from(cj.value("traffic", "heavy"));
      for (const auto& m : cj.at("members")) {
        cluster.members.push_back(m.get<std::string>());
      }
      dep.add_cluster(std::move(cluster));
    }
    for (const auto& rj : j.value("regions", nlohmann::json::array())) {
      Region region;
      region.id = rj.at("id").get<std::string>();
      region.coverage = detail::coverage_from_json(rj.at("coverage"));
      region.position = rj.contains("pos")
                            ? detail::point_from_json(rj.at("pos"), "region.pos")
                            : region.coverage.anchor();
      dep.add_region(std::move(region));
    }
    dep.validate();
    return dep;
  }

  static Point decode_position(const Deployment& dep, const nlohmann::json& nj) {
    if (nj.contains("latlon")) {
      if (!dep.wgs84_origin_) {
        throw ParseError("node '" + nj.at("id").get<std::string>() +
                         "' uses latlon but frame is local");
      }
      Point ll = detail::point_from_json(nj.at("latlon"), "node.latlon");
      return project_wgs84(ll.x, ll.y, dep.wgs84_origin_->first,
                           dep.wgs84_origin_->second);
    }
    return detail::point_from_json(nj.at("pos"), "node.pos");
  }

  static ordered_json encode(const Deployment& dep) {
    ordered_json j;
    j["frame"] = ordered_json{{"type", "local"}};
    auto nodes = ordered_json::array();
    for (const auto& [id, node] : dep.nodes_) {
      ordered_json nj;
      nj["id"] = id;
      nj["kind"] = to_string(node.kind);
      nj["pos"] = detail::point_to_json(node.position);
      nj["coverage"] = detail::coverage_to_json(node.coverage);
      nj["cluster"] = node.cluster_id;
      if (node.kind == NodeKind::CalibrationChokePoint) {
        nj["camera"] = node.camera_id;
        nj["sniffer"] = node.sniffer_id;
      }
      nodes.push_back(std::move(nj));
    }
    j["nodes"] = std::move(nodes);
    auto clusters = ordered_json::array();
    for (const auto& [id, cluster] : dep.clusters_) {
      ordered_json cj;
      cj["id"] = id;
      cj["traffic"] = to_string(cluster.traffic_class);
      cj["members"] = cluster.members;
      clusters.push_back(std::move(cj));
    }
    j["clusters"] = std::move(clusters);
    if (!dep.regions_.empty()) {
      auto regions = ordered_json::array();
      for (const auto& [id, region] : dep.regions_) {
        ordered_json rj;
        rj["id"] = id;
        rj["pos"] = detail::point_to_json(region.position);
        rj["coverage"] = detail::coverage_to_json(region.coverage);
        regions.push_back(std::move(rj));
      }
      j["regions"] = std::move(regions);
    }
    return j;
  }
};

Deployment Deployment::from_json(const std::string& text) {
  return DeploymentCodec::decode(detail::parse_json(text, "deployment"));
}

Deployment Deployment::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open deployment file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string Deployment::to_json() const {
  return DeploymentCodec::encode(*this).dump(2) + "\n";
}

void Deployment::add_node(SensorNode node) {
  if (nodes_.contains(node.id)) {
    throw ConfigError("duplicate node id '" + node.id + "'");
  }
  node_cluster_[node.id] = node.cluster_id;
  nodes_.emplace(node.id, std::move(node));
}

void Deployment::add_cluster(ClusterSpec cluster) {
  if (clusters_.contains(cluster.cluster_id)) {
    throw ConfigError("duplicate cluster id '" + cluster.cluster_id + "'");
  }
  clusters_.emplace(cluster.cluster_id, std::move(cluster));
}

void Deployment::add_region(Region region) {
  if (regions_.contains(region.id)) {
    throw ConfigError("duplicate region id '" + region.id + "'");
  }
  regions_.emplace(region.id, std::move(region));
}

void Deployment::validate() const {
  for (const auto& [id, node] : nodes_) {
    if (node.cluster_id.empty()) {
      throw ConfigError("node '" + id + "' belongs to no cluster");
    }
    auto it = clusters_.find(node.cluster_id);
    if (it == clusters_.end()) {
      throw ConfigError("node '" + id + "' references unknown cluster '" +
                        node.cluster_id + "'");
    }
    const auto& members = it->second.members;
    if (std::find(members.begin(), members.end(), id) == members.end()) {
      throw ConfigError("node '" + id + "' missing from cluster member list");
    }
    if (node.kind == NodeKind::CalibrationChokePoint) {
      const SensorNode* cam = find_node(node.camera_id);
      const SensorNode* sniffer = find_node(node.sniffer_id);
      if (!cam || cam->kind != NodeKind::StereoCamera) {
        throw ConfigError("choke point '" + id + "' needs a stereo_camera reference");
      }
      if (!sniffer || sniffer->kind != NodeKind::WifiSniffer) {
        throw ConfigError("choke point '" + id + "' needs a wifi_sniffer reference");
      }
    }
  }
  for (const auto& [cid, cluster] : clusters_) {
    if (cluster.members.empty()) {
      throw ConfigError("cluster '" + cid + "' has no members");
    }
    for (const auto& member : cluster.members) {
      auto it = nodes_.find(member);
      if (it == nodes_.end()) {
        throw ConfigError("cluster '" + cid + "' lists unknown node '" + member + "'");
      }
      if (it->second.cluster_id != cid) {
        throw ConfigError("node '" + member + "' claimed by two clusters");
      }
    }
  }
}

const SensorNode* Deployment::find_node(const std::string& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const SensorNode& Deployment::node(const std::string& id) const {
  const SensorNode* n = find_node(id);
  if (!n) throw UnknownSensorError("unknown sensor '" + id + "'");
  return *n;
}

const ClusterSpec* Deployment::find_cluster(const std::string& id) const {
  auto it = clusters_.find(id);
  return it == clusters_.end() ? nullptr : &it->second;
}

const Region* Deployment::find_region(const std::string& id) const {
  auto it = regions_.find(id);
  return it == regions_.end() ? nullptr : &it->second;
}

Deployment::AreaRef Deployment::area(const std::string& id) const {
  if (const SensorNode* n = find_node(id)) {
    return {n->position, n->coverage};
  }
  if (const Region* r = find_region(id)) {
    return {r->position, r->coverage};
  }
  throw UnknownAreaError("unknown area '" + id + "'");
}

const std::string& Deployment::cluster_of(const std::string& node_id) const {
  static const std::string kEmpty;
  auto it = node_cluster_.find(node_id);
  return it == node_cluster_.end() ? kEmpty : it->second;
}

std::vector<const SensorNode*> Deployment::choke_points(
    const std::string& cluster_id) const {
  std::vector<const SensorNode*> out;
  for (const auto& [id, node] : nodes_) {
    if (node.kind == NodeKind::CalibrationChokePoint && node.cluster_id == cluster_id) {
      out.push_back(&node);
    }
  }
  return out;
}

}  // namespace crowdsense
