#include "litmeta/coupling.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#ifdef LITMETA_HAVE_OPENMP
#include <omp.h>
#endif

#include "litmeta/csv.hpp"
#include "litmeta/error.hpp"
#include "litmeta/record.hpp"
#include "litmeta/text.hpp"

namespace litmeta {

long IncidenceMatrix::n_ones() const {
  long total = 0;
  for (const auto& row : rows) total += static_cast<long>(row.size());
  return total;
}

IncidenceMatrix build_incidence(const Corpus& corpus) {
  if (corpus.records.empty()) throw ValidationError("build_incidence: empty corpus");

  IncidenceMatrix m;
  auto universe = corpus.reference_universe();
  m.reference_keys.assign(universe.begin(), universe.end());

  std::unordered_map<std::string, int> col_of;
  col_of.reserve(m.reference_keys.size());
  for (int j = 0; j < static_cast<int>(m.reference_keys.size()); ++j)
    col_of[m.reference_keys[j]] = j;

  m.paper_ids.reserve(corpus.records.size());
  m.rows.reserve(corpus.records.size());
  for (const auto& r : corpus.records) {
    m.paper_ids.push_back(r.id);
    std::vector<int> row;
    row.reserve(r.references.size());
    for (const auto& ref : r.references) row.push_back(col_of.at(ref));
    std::sort(row.begin(), row.end());
    m.rows.push_back(std::move(row));
  }
  return m;
}

long CouplingGraph::raw_weight(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j),
                             [](const Edge& e, const std::pair<int, int>& key) {
                               return std::make_pair(e.i, e.j) < key;
                             });
  return (it != edges.end() && it->i == i && it->j == j) ? it->raw : 0;
}

double CouplingGraph::norm_weight(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j),
                             [](const Edge& e, const std::pair<int, int>& key) {
                               return std::make_pair(e.i, e.j) < key;
                             });
  return (it != edges.end() && it->i == i && it->j == j) ? it->norm : 0.0;
}

namespace {

void init_nodes(const IncidenceMatrix& incidence, CouplingGraph& g) {
  g.node_ids = incidence.paper_ids;
  g.self_counts.resize(incidence.n_rows());
  for (size_t i = 0; i < incidence.n_rows(); ++i)
    g.self_counts[i] = static_cast<long>(incidence.rows[i].size());
}

inline double association_strength(long raw, long self_i, long self_j) {
  return static_cast<double>(raw) /
         (static_cast<double>(self_i) * static_cast<double>(self_j));
}

// All edges (i, j) with j > i for one row, ascending j. Walks the postings
// lists of row i's columns; cost is sum over its columns of the posting tail.
std::vector<CouplingGraph::Edge> row_edges(const IncidenceMatrix& incidence,
                                           const std::vector<std::vector<int>>& postings,
                                           const std::vector<long>& self, int i,
                                           std::vector<long>& counts,
                                           std::vector<int>& touched) {
  touched.clear();
  for (int col : incidence.rows[i]) {
    const auto& rows_citing = postings[col];
    auto it = std::upper_bound(rows_citing.begin(), rows_citing.end(), i);
    for (; it != rows_citing.end(); ++it) {
      if (counts[*it]++ == 0) touched.push_back(*it);
    }
  }
  std::sort(touched.begin(), touched.end());
  std::vector<CouplingGraph::Edge> out;
  out.reserve(touched.size());
  for (int j : touched) {
    out.push_back({i, j, counts[j], association_strength(counts[j], self[i], self[j])});
    counts[j] = 0;
  }
  return out;
}

}  // namespace

CouplingGraph coupling_graph(const IncidenceMatrix& incidence) {
  CouplingGraph g;
  init_nodes(incidence, g);
  const int n = static_cast<int>(incidence.n_rows());

  std::vector<std::vector<int>> postings(incidence.n_cols());
  for (int i = 0; i < n; ++i)
    for (int col : incidence.rows[i]) postings[col].push_back(i);

  std::vector<std::vector<CouplingGraph::Edge>> per_row(n);
#ifdef LITMETA_HAVE_OPENMP
#pragma omp parallel
  {
    std::vector<long> counts(n, 0);
    std::vector<int> touched;
#pragma omp for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i)
      per_row[i] = row_edges(incidence, postings, g.self_counts, i, counts, touched);
  }
#else
  std::vector<long> counts(n, 0);
  std::vector<int> touched;
  for (int i = 0; i < n; ++i)
    per_row[i] = row_edges(incidence, postings, g.self_counts, i, counts, touched);
#endif

  size_t total = 0;
  for (const auto& bucket : per_row) total += bucket.size();
  g.edges.reserve(total);
  for (auto& bucket : per_row)
    g.edges.insert(g.edges.end(), bucket.begin(), bucket.end());
  return g;
}

CouplingGraph coupling_graph_serial(const IncidenceMatrix& incidence) {
  CouplingGraph g;
  init_nodes(incidence, g);
  const int n = static_cast<int>(incidence.n_rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& a = incidence.rows[i];
      const auto& b = incidence.rows[j];
      long shared = 0;
      for (size_t p = 0, q = 0; p < a.size() && q < b.size();) {
        if (a[p] < b[q]) ++p;
        else if (a[p] > b[q]) ++q;
        else { ++shared; ++p; ++q; }
      }
      if (shared > 0)
        g.edges.push_back(
            {i, j, shared,
             association_strength(shared, g.self_counts[i], g.self_counts[j])});
    }
  }
  return g;
}

GraphStats graph_stats(const CouplingGraph& graph) {
  return graph_stats(graph, {});
}

GraphStats graph_stats(const CouplingGraph& graph,
                       const std::vector<long>& bucket_edges) {
  GraphStats s;
  s.nodes = static_cast<long>(graph.n_nodes());
  s.edges = static_cast<long>(graph.edges.size());

  std::vector<char> has_edge(graph.n_nodes(), 0);
  for (const auto& e : graph.edges) {
    has_edge[e.i] = has_edge[e.j] = 1;
    s.max_raw_weight = std::max(s.max_raw_weight, e.raw);
    long bucket = e.raw;
    if (!bucket_edges.empty()) {
      // Bucket label is the largest configured edge <= weight.
      auto it = std::upper_bound(bucket_edges.begin(), bucket_edges.end(), e.raw);
      bucket = it == bucket_edges.begin() ? bucket_edges.front() : *(it - 1);
    }
    ++s.weight_histogram[bucket];
  }
  for (char h : has_edge)
    if (!h) ++s.isolated_nodes;
  return s;
}

std::string graph_to_tsv(const CouplingGraph& graph) {
  std::vector<std::tuple<std::string, std::string, long, double>> rows;
  rows.reserve(graph.edges.size());
  for (const auto& e : graph.edges) {
    std::string a = graph.node_ids[e.i];
    std::string b = graph.node_ids[e.j];
    if (b < a) std::swap(a, b);
    rows.emplace_back(std::move(a), std::move(b), e.raw, e.norm);
  }
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  out << "source\ttarget\traw_weight\tnorm_weight\n";
  for (const auto& [a, b, raw, norm] : rows)
    out << a << '\t' << b << '\t' << raw << '\t' << format_real(norm) << '\n';
  return out.str();
}

CouplingGraph graph_from_tsv(const std::vector<std::string>& node_ids,
                             const std::vector<long>& self_counts,
                             const std::string& tsv) {
  if (node_ids.size() != self_counts.size())
    throw ValidationError("graph_from_tsv: node/self-count size mismatch");
  CouplingGraph g;
  g.node_ids = node_ids;
  g.self_counts = self_counts;
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(node_ids.size()); ++i) index[node_ids[i]] = i;

  std::istringstream in(tsv);
  std::string line;
  if (!std::getline(in, line) || line != "source\ttarget\traw_weight\tnorm_weight")
    throw ValidationError("graph tsv: missing or wrong header");
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4)
      throw ValidationError("graph tsv: line " + std::to_string(line_no) +
                            ": expected 4 tab-separated fields");
    auto a = index.find(fields[0]);
    auto b = index.find(fields[1]);
    if (a == index.end() || b == index.end())
      throw ValidationError("graph tsv: line " + std::to_string(line_no) +
                            ": unknown node id");
    int i = a->second, j = b->second;
    if (i > j) std::swap(i, j);
    g.edges.push_back({i, j, std::stol(fields[2]), std::stod(fields[3])});
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& x, const auto& y) {
    return std::make_pair(x.i, x.j) < std::make_pair(y.i, y.j);
  });
  return g;
}

std::string graph_to_graphml(const CouplingGraph& graph) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"d0\" for=\"edge\" attr.name=\"raw_weight\" attr.type=\"long\"/>\n"
      << "  <key id=\"d1\" for=\"edge\" attr.name=\"norm_weight\" attr.type=\"double\"/>\n"
      << "  <key id=\"d2\" for=\"node\" attr.name=\"references\" attr.type=\"long\"/>\n"
      << "  <graph id=\"coupling\" edgedefault=\"undirected\">\n";
  for (size_t i = 0; i < graph.node_ids.size(); ++i)
    out << "    <node id=\"" << graph.node_ids[i] << "\"><data key=\"d2\">"
        << graph.self_counts[i] << "</data></node>\n";
  for (const auto& e : graph.edges)
    out << "    <edge source=\"" << graph.node_ids[e.i] << "\" target=\""
        << graph.node_ids[e.j] << "\"><data key=\"d0\">" << e.raw
        << "</data><data key=\"d1\">" << format_real(e.norm) << "</data></edge>\n";
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

}  // namespace litmeta
