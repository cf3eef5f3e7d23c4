#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "litmeta/coupling.hpp"

namespace litmeta {

enum class WeightKind { raw, normalized };
enum class NodeOrdering { stable, shuffled };

WeightKind weight_kind_from_string(const std::string& s);
const char* to_string(WeightKind k);

/// Node-to-community assignment with its quality score.
struct Partition {
  std::map<std::string, int> assignment;  // node id -> dense label
  double modularity = 0.0;
  int passes = 0;
  std::vector<double> pass_modularity;    // score after each outer pass
  std::set<std::string> isolated_nodes;   // zero-coupling nodes (singletons)

  std::string to_csv() const;  // `paper_id,cluster`
  static Partition from_csv(const std::string& text);
};

struct LouvainOptions {
  WeightKind weight_kind = WeightKind::normalized;
  double min_gain = 1e-9;
  NodeOrdering ordering = NodeOrdering::stable;
  std::uint64_t seed = 0;  // used only by the shuffled ordering
};

/// Two-phase Louvain modularity maximization. With stable ordering nodes are
/// visited in ascending index order and the result is reproducible across
/// runs and thread counts; community labels are numbered by smallest
/// contained node. Isolated nodes stay singleton communities.
Partition louvain(const CouplingGraph& graph, const LouvainOptions& options = {});

/// Newman-Girvan quality of a partition under the chosen weights.
/// Throws when a graph node is missing from the partition.
double modularity(const CouplingGraph& graph, const Partition& partition,
                  WeightKind weight_kind);

/// Per-cluster tabulation of corpus attributes. The level / unit / corridor /
/// environmental-factor dimensions are read from controlled keyword tags
/// ("level:", "unit:", "corridor:", "env:"); untagged records land in the
/// "not_applicable" bucket, multi-tagged ones in "multiple".
struct ClusterProfile {
  int label = 0;
  long size = 0;
  std::map<std::string, long> doc_type_counts;
  std::map<std::string, long> level_counts;
  std::map<std::string, long> unit_counts;
  std::map<std::string, long> corridor_counts;
  std::map<std::string, long> env_factor_counts;
  long published = 0;
  double mean_citations = 0.0;
  double collaboration_index = 0.0;
  bool has_multi_authored = false;
  int year_min = 0;
  int year_max = 0;
  bool isolated_singleton = false;
};

struct Corpus;

std::vector<ClusterProfile> profile_clusters(const Corpus& corpus,
                                             const Partition& partition);

/// JSON export mirroring the per-cluster comparison table; isolated
/// singletons are listed separately.
std::string cluster_profiles_to_json(const std::vector<ClusterProfile>& profiles);

}  // namespace litmeta
