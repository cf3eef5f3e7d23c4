#include "litmeta/community.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "litmeta/csv.hpp"
#include "litmeta/error.hpp"
#include "litmeta/record.hpp"
#include "litmeta/text.hpp"

namespace litmeta {

WeightKind weight_kind_from_string(const std::string& s) {
  if (s == "raw") return WeightKind::raw;
  if (s == "normalized") return WeightKind::normalized;
  throw ValidationError("unknown weight kind '" + s + "'");
}

const char* to_string(WeightKind k) {
  return k == WeightKind::raw ? "raw" : "normalized";
}

std::string Partition::to_csv() const {
  std::ostringstream out;
  out << "paper_id,cluster\n";
  for (const auto& [id, label] : assignment)
    csv::write_row(out, {id, std::to_string(label)});
  return out.str();
}

Partition Partition::from_csv(const std::string& text) {
  std::istringstream in(text);
  auto rows = csv::read(in);
  if (rows.empty() || rows[0] != std::vector<std::string>{"paper_id", "cluster"})
    throw ValidationError("partition csv: missing or wrong header");
  Partition p;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw ValidationError("partition csv: row " + std::to_string(i + 1) +
                            " has wrong field count");
    p.assignment[rows[i][0]] = std::stoi(rows[i][1]);
  }
  return p;
}

namespace {

// Working graph for one Louvain level. Self weight is the full double-counted
// A_ii, so degrees and total weight follow the adjacency-matrix convention.
struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> self_weight;
  std::vector<double> degree;
  double total = 0.0;  // 2m

  int size() const { return static_cast<int>(adj.size()); }

  void finish() {
    degree.assign(adj.size(), 0.0);
    total = 0.0;
    for (size_t i = 0; i < adj.size(); ++i) {
      double d = self_weight[i];
      for (const auto& [j, w] : adj[i]) d += w;
      degree[i] = d;
      total += d;
    }
  }
};

LevelGraph level_from_coupling(const CouplingGraph& graph, WeightKind kind) {
  LevelGraph g;
  g.adj.resize(graph.n_nodes());
  g.self_weight.assign(graph.n_nodes(), 0.0);
  for (const auto& e : graph.edges) {
    double w = kind == WeightKind::raw ? static_cast<double>(e.raw) : e.norm;
    g.adj[e.i].emplace_back(e.j, w);
    g.adj[e.j].emplace_back(e.i, w);
  }
  g.finish();
  return g;
}

// Deterministic Fisher-Yates driven by splitmix64; std::shuffle is
// implementation-defined and would break reproducibility guarantees.
void seeded_shuffle(std::vector<int>& order, std::uint64_t seed) {
  auto next = [state = seed + 0x9e3779b97f4a7c15ull]() mutable {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[next() % i]);
}

// One local-move phase. Returns true when at least one node moved.
bool one_level(const LevelGraph& g, std::vector<int>& node_comm, double min_gain,
               const std::vector<int>& order) {
  const int n = g.size();
  std::vector<double> comm_tot(n, 0.0);
  for (int i = 0; i < n; ++i) comm_tot[node_comm[i]] += g.degree[i];

  const double two_m = g.total;
  if (two_m <= 0.0) return false;
  const double m = two_m / 2.0;

  std::vector<double> neigh_weight(n, 0.0);
  std::vector<int> touched;
  bool any_move = false;
  bool moved_this_pass = true;

  while (moved_this_pass) {
    moved_this_pass = false;
    for (int node : order) {
      const int old_comm = node_comm[node];

      touched.clear();
      for (const auto& [nb, w] : g.adj[node]) {
        int c = node_comm[nb];
        if (neigh_weight[c] == 0.0 && c != old_comm) touched.push_back(c);
        neigh_weight[c] += w;
      }
      std::sort(touched.begin(), touched.end());

      comm_tot[old_comm] -= g.degree[node];
      const double gain_stay =
          neigh_weight[old_comm] - comm_tot[old_comm] * g.degree[node] / two_m;

      int best_comm = old_comm;
      double best_gain = gain_stay;
      for (int c : touched) {
        double gain = neigh_weight[c] - comm_tot[c] * g.degree[node] / two_m;
        if (gain > best_gain) {
          best_gain = gain;
          best_comm = c;
        }
      }

      // Realized modularity delta is (best_gain - gain_stay) / m.
      if (best_comm != old_comm && (best_gain - gain_stay) / m > min_gain) {
        node_comm[node] = best_comm;
        comm_tot[best_comm] += g.degree[node];
        moved_this_pass = true;
        any_move = true;
      } else {
        comm_tot[old_comm] += g.degree[node];
      }

      neigh_weight[old_comm] = 0.0;
      for (int c : touched) neigh_weight[c] = 0.0;
    }
  }
  return any_move;
}

// Relabels communities by smallest member index; returns the community count.
int renumber(std::vector<int>& node_comm) {
  std::vector<int> new_label(node_comm.size(), -1);
  int next = 0;
  for (int& c : node_comm) {
    if (new_label[c] == -1) new_label[c] = next++;
    c = new_label[c];
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& node_comm,
                     int n_comm) {
  LevelGraph out;
  out.adj.resize(n_comm);
  out.self_weight.assign(n_comm, 0.0);
  std::map<std::pair<int, int>, double> between;
  for (int i = 0; i < g.size(); ++i) {
    out.self_weight[node_comm[i]] += g.self_weight[i];
    for (const auto& [j, w] : g.adj[i]) {
      int ci = node_comm[i], cj = node_comm[j];
      if (ci == cj) {
        out.self_weight[ci] += w;  // both directions land here: full 2x intra
      } else if (ci < cj) {
        between[{ci, cj}] += w;
      }
    }
  }
  for (const auto& [key, w] : between) {
    out.adj[key.first].emplace_back(key.second, w);
    out.adj[key.second].emplace_back(key.first, w);
  }
  out.finish();
  return out;
}

double level_modularity(const LevelGraph& g, const std::vector<int>& node_comm) {
  if (g.total <= 0.0) return 0.0;
  int n_comm = *std::max_element(node_comm.begin(), node_comm.end()) + 1;
  std::vector<double> tot(n_comm, 0.0), in(n_comm, 0.0);
  for (int i = 0; i < g.size(); ++i) {
    tot[node_comm[i]] += g.degree[i];
    in[node_comm[i]] += g.self_weight[i];
    for (const auto& [j, w] : g.adj[i])
      if (node_comm[j] == node_comm[i]) in[node_comm[i]] += w;
  }
  double q = 0.0;
  for (int c = 0; c < n_comm; ++c)
    q += in[c] / g.total - (tot[c] / g.total) * (tot[c] / g.total);
  return q;
}

}  // namespace

Partition louvain(const CouplingGraph& graph, const LouvainOptions& options) {
  if (!(options.min_gain > 0.0)) throw ValidationError("louvain: min_gain must be > 0");

  Partition result;
  const int n = static_cast<int>(graph.n_nodes());
  if (n == 0) return result;

  std::vector<char> has_edge(n, 0);
  for (const auto& e : graph.edges) has_edge[e.i] = has_edge[e.j] = 1;
  for (int i = 0; i < n; ++i)
    if (!has_edge[i]) result.isolated_nodes.insert(graph.node_ids[i]);

  // assignment[i] = community of original node i at the current depth
  std::vector<int> assignment(n);
  std::iota(assignment.begin(), assignment.end(), 0);

  LevelGraph level = level_from_coupling(graph, options.weight_kind);
  std::uint64_t shuffle_round = 0;

  if (!graph.edges.empty()) {
    while (true) {
      std::vector<int> node_comm(level.size());
      std::iota(node_comm.begin(), node_comm.end(), 0);
      std::vector<int> order(level.size());
      std::iota(order.begin(), order.end(), 0);
      if (options.ordering == NodeOrdering::shuffled)
        seeded_shuffle(order, options.seed + shuffle_round++);

      bool improved = one_level(level, node_comm, options.min_gain, order);
      int n_comm = renumber(node_comm);
      result.passes += 1;
      for (int& a : assignment) a = node_comm[a];
      result.pass_modularity.push_back(level_modularity(level, node_comm));

      if (!improved || n_comm == level.size()) break;
      level = aggregate(level, node_comm, n_comm);
    }
  }

  // Dense labels numbered by smallest contained node index.
  std::vector<int> label_of(n, -1);
  int next_label = 0;
  for (int i = 0; i < n; ++i) {
    if (label_of[assignment[i]] == -1) label_of[assignment[i]] = next_label++;
    result.assignment[graph.node_ids[i]] = label_of[assignment[i]];
  }
  result.modularity = modularity(graph, result, options.weight_kind);
  return result;
}

double modularity(const CouplingGraph& graph, const Partition& partition,
                  WeightKind weight_kind) {
  const int n = static_cast<int>(graph.n_nodes());
  std::vector<int> comm(n);
  int max_label = -1;
  for (int i = 0; i < n; ++i) {
    auto it = partition.assignment.find(graph.node_ids[i]);
    if (it == partition.assignment.end())
      throw ValidationError("modularity: node '" + graph.node_ids[i] +
                            "' missing from partition");
    comm[i] = it->second;
    max_label = std::max(max_label, it->second);
  }
  if (graph.edges.empty()) return 0.0;

  std::vector<double> intra(max_label + 1, 0.0), tot(max_label + 1, 0.0);
  double m = 0.0;
  std::vector<double> deg(n, 0.0);
  for (const auto& e : graph.edges) {
    double w = weight_kind == WeightKind::raw ? static_cast<double>(e.raw) : e.norm;
    m += w;
    deg[e.i] += w;
    deg[e.j] += w;
    if (comm[e.i] == comm[e.j]) intra[comm[e.i]] += w;
  }
  for (int i = 0; i < n; ++i) tot[comm[i]] += deg[i];

  double q = 0.0;
  for (int c = 0; c <= max_label; ++c)
    q += intra[c] / m - (tot[c] / (2.0 * m)) * (tot[c] / (2.0 * m));
  return q;
}

namespace {

// Single bucket per record and dimension so counts sum to cluster size.
std::string tag_bucket(const Record& r, const std::string& prefix) {
  std::string found;
  int hits = 0;
  for (const auto& kw : r.keywords) {
    if (kw.rfind(prefix, 0) == 0) {
      ++hits;
      found = kw.substr(prefix.size());
    }
  }
  if (hits == 0) return "not_applicable";
  if (hits > 1) return "multiple";
  return found.empty() ? "not_applicable" : found;
}

}  // namespace

std::vector<ClusterProfile> profile_clusters(const Corpus& corpus,
                                             const Partition& partition) {
  for (const auto& [id, label] : partition.assignment) {
    (void)label;
    if (!corpus.contains(id))
      throw ValidationError("profile_clusters: partition node '" + id +
                            "' is not in the corpus");
  }

  std::map<int, std::vector<const Record*>> members;
  for (const auto& r : corpus.records) {
    auto it = partition.assignment.find(r.id);
    if (it != partition.assignment.end()) members[it->second].push_back(&r);
  }

  std::vector<ClusterProfile> profiles;
  for (const auto& [label, recs] : members) {
    ClusterProfile p;
    p.label = label;
    p.size = static_cast<long>(recs.size());
    long citation_sum = 0;
    long multi_docs = 0, multi_authors = 0;
    p.year_min = recs.front()->year;
    p.year_max = recs.front()->year;
    for (const Record* r : recs) {
      ++p.doc_type_counts[to_string(r->doc_type)];
      ++p.level_counts[tag_bucket(*r, "level:")];
      ++p.unit_counts[tag_bucket(*r, "unit:")];
      ++p.corridor_counts[tag_bucket(*r, "corridor:")];
      ++p.env_factor_counts[tag_bucket(*r, "env:")];
      if (r->published) ++p.published;
      citation_sum += r->global_citations;
      if (r->authors.size() >= 2) {
        ++multi_docs;
        multi_authors += static_cast<long>(r->authors.size());
      }
      p.year_min = std::min(p.year_min, r->year);
      p.year_max = std::max(p.year_max, r->year);
    }
    p.mean_citations = static_cast<double>(citation_sum) / static_cast<double>(p.size);
    p.has_multi_authored = multi_docs > 0;
    p.collaboration_index =
        multi_docs > 0 ? static_cast<double>(multi_authors) / multi_docs : 0.0;
    p.isolated_singleton =
        recs.size() == 1 && partition.isolated_nodes.count(recs.front()->id) > 0;
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::string cluster_profiles_to_json(const std::vector<ClusterProfile>& profiles) {
  using ordered_json = nlohmann::ordered_json;
  auto profile_json = [](const ClusterProfile& p) {
    ordered_json j;
    j["label"] = p.label;
    j["size"] = p.size;
    j["doc_type"] = p.doc_type_counts;
    j["level"] = p.level_counts;
    j["unit"] = p.unit_counts;
    j["corridor"] = p.corridor_counts;
    j["environmental_factor"] = p.env_factor_counts;
    j["published"] = p.published;
    j["mean_citations_per_document"] = p.mean_citations;
    j["collaboration_index"] = p.collaboration_index;
    j["collaboration_index_defined"] = p.has_multi_authored;
    j["time_span"] = {p.year_min, p.year_max};
    return j;
  };
  ordered_json out;
  out["clusters"] = ordered_json::array();
  out["isolated_singletons"] = ordered_json::array();
  for (const auto& p : profiles)
    out[p.isolated_singleton ? "isolated_singletons" : "clusters"].push_back(
        profile_json(p));
  return out.dump(2) + "\n";
}

}  // namespace litmeta
