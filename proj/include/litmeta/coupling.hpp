#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "litmeta/record.hpp"

namespace litmeta {

/// Binary paper-by-reference incidence. Rows follow corpus order; columns are
/// the sorted reference universe. Stored as per-row sorted column indices.
struct IncidenceMatrix {
  std::vector<std::string> paper_ids;
  std::vector<std::string> reference_keys;
  std::vector<std::vector<int>> rows;  // sorted column indices, value 1

  size_t n_rows() const { return rows.size(); }
  size_t n_cols() const { return reference_keys.size(); }
  long n_ones() const;
};

struct Corpus;

IncidenceMatrix build_incidence(const Corpus& corpus);

/// Weighted undirected paper-to-paper network. Edge (i,j) is stored once with
/// i < j; the diagonal is kept out of the edge set as per-node self counts.
struct CouplingGraph {
  struct Edge {
    int i;
    int j;
    long raw;     // shared-reference count
    double norm;  // association strength: raw / (self[i] * self[j])
  };

  std::vector<std::string> node_ids;
  std::vector<long> self_counts;  // number of references of each node
  std::vector<Edge> edges;        // sorted by (i, j)

  size_t n_nodes() const { return node_ids.size(); }
  long raw_weight(int i, int j) const;    // 0 when the pair is unstored
  double norm_weight(int i, int j) const; // 0 when the pair is unstored
};

/// Shared-reference counting via the incidence postings lists, parallelized
/// over rows when OpenMP is enabled. Output is identical to the serial
/// reference for any thread count.
CouplingGraph coupling_graph(const IncidenceMatrix& incidence);

/// Straightforward pairwise-intersection implementation, kept as the
/// reference for tests and the benchmark.
CouplingGraph coupling_graph_serial(const IncidenceMatrix& incidence);

struct GraphStats {
  long nodes = 0;
  long edges = 0;
  long isolated_nodes = 0;
  long max_raw_weight = 0;
  /// weight -> edge count; bucket edges configurable, default unit width.
  std::map<long, long> weight_histogram;
};

GraphStats graph_stats(const CouplingGraph& graph);
GraphStats graph_stats(const CouplingGraph& graph, const std::vector<long>& bucket_edges);

/// TSV edge list `source<TAB>target<TAB>raw_weight<TAB>norm_weight`;
/// endpoints of each edge ordered lexicographically, rows sorted.
std::string graph_to_tsv(const CouplingGraph& graph);

/// Rebuilds the graph from corpus node order plus a TSV edge list.
CouplingGraph graph_from_tsv(const std::vector<std::string>& node_ids,
                             const std::vector<long>& self_counts,
                             const std::string& tsv);

std::string graph_to_graphml(const CouplingGraph& graph);

}  // namespace litmeta
