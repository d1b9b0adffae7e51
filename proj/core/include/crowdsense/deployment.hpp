#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crowdsense/geometry.hpp"

namespace crowdsense {

enum class NodeKind {
  WifiSniffer,
  StereoCamera,
  CalibrationChokePoint,  // co-located camera + sniffer pair
};

enum class TrafficClass { Heavy, Light };

struct SensorNode {
  std::string id;
  NodeKind kind = NodeKind::WifiSniffer;
  Point position;
  Coverage coverage;
  std::string cluster_id;
  // Set only for CalibrationChokePoint nodes.
  std::string camera_id;
  std::string sniffer_id;
};

struct ClusterSpec {
  std::string cluster_id;
  TrafficClass traffic_class = TrafficClass::Heavy;
  std::vector<std::string> members;
};

/// Named region that is not a sensor (e.g. a building footprint) used to
/// resolve observation coverage for area-level analytics.
struct Region {
  std::string id;
  Point position;
  Coverage coverage;
};

/// Static description of one deployment: nodes, clusters, regions and the
/// coordinate frame. Immutable after load; safe to share across workers.
class Deployment {
 public:
  Deployment() = default;

  /// Parses and validates the deployment document. Throws ParseError on
  /// malformed input and ConfigError on invariant violations (duplicate ids,
  /// nodes outside any cluster, dangling choke-point references, ...).
  static Deployment from_json(const std::string& text);
  static Deployment load(const std::string& path);

  std::string to_json() const;

  const SensorNode* find_node(const std::string& id) const;
  /// Like find_node but throws UnknownSensorError.
  const SensorNode& node(const std::string& id) const;

  const ClusterSpec* find_cluster(const std::string& id) const;
  const Region* find_region(const std::string& id) const;

  /// Resolves an area id against nodes first, then regions.
  /// Throws UnknownAreaError when neither matches.
  struct AreaRef {
    Point position;
    Coverage coverage;
  };
  AreaRef area(const std::string& id) const;

  /// Cluster owning the given node id ("" when unknown).
  const std::string& cluster_of(const std::string& node_id) const;

  /// Choke points of one cluster, in id order.
  std::vector<const SensorNode*> choke_points(const std::string& cluster_id) const;

  const std::map<std::string, SensorNode>& nodes() const { return nodes_; }
  const std::map<std::string, ClusterSpec>& clusters() const { return clusters_; }
  const std::map<std::string, Region>& regions() const { return regions_; }

  void add_node(SensorNode node);
  void add_cluster(ClusterSpec cluster);
  void add_region(Region region);

  /// Checks every structural invariant; throws ConfigError. Called by
  /// from_json; exposed for programmatically built deployments.
  void validate() const;

 private:
  std::map<std::string, SensorNode> nodes_;
  std::map<std::string, ClusterSpec> clusters_;
  std::map<std::string, Region> regions_;
  std::map<std::string, std::string> node_cluster_;
  std::optional<std::pair<double, double>> wgs84_origin_;

  friend class DeploymentCodec;
};

const char* to_string(NodeKind kind);
const char* to_string(TrafficClass traffic);

}  // namespace crowdsense
