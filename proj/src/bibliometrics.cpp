#include "litmeta/bibliometrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#ifdef LITMETA_HAVE_OPENMP
#include <omp.h>
#endif

#include "json.hpp"
#include "litmeta/log.hpp"
#include "litmeta/record.hpp"

namespace litmeta {

CitationTable local_citations(const Corpus& corpus) {
  CitationTable table;
  const int n = static_cast<int>(corpus.records.size());
  table.paper_ids.reserve(n);
  table.global_citations.reserve(n);
  std::vector<std::string> keys(n);
  for (int i = 0; i < n; ++i) {
    table.paper_ids.push_back(corpus.records[i].id);
    table.global_citations.push_back(corpus.records[i].global_citations);
    keys[i] = corpus.records[i].record_key();
  }

  std::unordered_map<std::string, std::vector<int>> owners;
  for (int i = 0; i < n; ++i) owners[keys[i]].push_back(i);

  std::vector<long> counts(n, 0);
#ifdef LITMETA_HAVE_OPENMP
#pragma omp parallel
  {
    std::vector<long> mine(n, 0);
#pragma omp for schedule(static)
    for (int j = 0; j < n; ++j) {
      for (const auto& ref : corpus.records[j].references) {
        auto it = owners.find(ref);
        if (it == owners.end()) continue;
        for (int i : it->second)
          if (i != j) ++mine[i];
      }
    }
#pragma omp critical
    for (int i = 0; i < n; ++i) counts[i] += mine[i];
  }
#else
  for (int j = 0; j < n; ++j) {
    for (const auto& ref : corpus.records[j].references) {
      auto it = owners.find(ref);
      if (it == owners.end()) continue;
      for (int i : it->second)
        if (i != j) ++counts[i];
    }
  }
#endif
  table.local_citations = std::move(counts);
  return table;
}

CitationTable local_citations_serial(const Corpus& corpus) {
  CitationTable table;
  const size_t n = corpus.records.size();
  for (const auto& r : corpus.records) {
    table.paper_ids.push_back(r.id);
    table.global_citations.push_back(r.global_citations);
  }
  table.local_citations.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    std::string key = corpus.records[i].record_key();
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (corpus.records[j].references.count(key)) ++table.local_citations[i];
    }
  }
  return table;
}

long h_index(const std::vector<long>& citation_counts) {
  std::vector<long> sorted = citation_counts;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  long h = 0;
  for (size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] >= static_cast<long>(i + 1)) h = static_cast<long>(i + 1);
  return h;
}

CollaborationIndex collaboration_index(const Corpus& corpus) {
  long multi_docs = 0, multi_authors = 0;
  for (const auto& r : corpus.records) {
    if (r.authors.size() >= 2) {
      ++multi_docs;
      multi_authors += static_cast<long>(r.authors.size());
    }
  }
  if (multi_docs == 0) {
    log::warn("collaboration_index: no multi-authored records; reporting 0");
    return {0.0, false};
  }
  return {static_cast<double>(multi_authors) / static_cast<double>(multi_docs), true};
}

std::map<int, long> production_by_year(const Corpus& corpus) {
  std::map<int, long> by_year;
  for (const auto& r : corpus.records) ++by_year[r.year];
  return by_year;
}

double annual_growth_rate(const std::map<int, long>& by_year) {
  std::map<int, long> nonzero;
  for (const auto& [year, count] : by_year)
    if (count > 0) nonzero[year] = count;
  if (nonzero.size() < 2) return 0.0;
  auto first = *nonzero.begin();
  auto last = *nonzero.rbegin();
  int span = last.first - first.first;
  if (span <= 0) return 0.0;
  return std::pow(static_cast<double>(last.second) / static_cast<double>(first.second),
                  1.0 / span) -
         1.0;
}

std::string bibliometrics_report(const Corpus& corpus, size_t top_n) {
  using ordered_json = nlohmann::ordered_json;
  CitationTable table = local_citations(corpus);
  const size_t n = corpus.records.size();

  auto top_by = [&](const std::vector<long>& counts) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (counts[a] != counts[b]) return counts[a] > counts[b];
      return table.paper_ids[a] < table.paper_ids[b];
    });
    ordered_json arr = ordered_json::array();
    for (size_t k = 0; k < std::min(top_n, n); ++k) {
      ordered_json row;
      row["id"] = table.paper_ids[order[k]];
      row["global_citations"] = table.global_citations[order[k]];
      row["local_citations"] = table.local_citations[order[k]];
      arr.push_back(row);
    }
    return arr;
  };

  // Author production and per-author h-index over their documents'
  // global citation counts.
  std::map<std::string, std::vector<long>> author_docs;
  for (const auto& r : corpus.records)
    for (const auto& a : r.authors) author_docs[a].push_back(r.global_citations);

  ordered_json authors = ordered_json::array();
  {
    std::vector<std::pair<std::string, const std::vector<long>*>> rows;
    for (const auto& [name, cites] : author_docs) rows.emplace_back(name, &cites);
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      if (a.second->size() != b.second->size())
        return a.second->size() > b.second->size();
      return a.first < b.first;
    });
    for (const auto& [name, cites] : rows) {
      ordered_json row;
      row["name"] = name;
      row["documents"] = cites->size();
      row["h_index"] = h_index(*cites);
      authors.push_back(row);
    }
  }

  CollaborationIndex ci = collaboration_index(corpus);
  auto by_year = production_by_year(corpus);

  ordered_json j;
  j["documents"] = n;
  j["top_cited_global"] = top_by(table.global_citations);
  j["top_cited_local"] = top_by(table.local_citations);
  j["corpus_h_index_global"] = h_index(table.global_citations);
  j["authors"] = authors;
  j["collaboration_index"] = ci.value;
  j["collaboration_index_defined"] = ci.defined;
  ordered_json years;
  for (const auto& [year, count] : by_year) years[std::to_string(year)] = count;
  j["production_by_year"] = years;
  j["annual_growth_rate"] = annual_growth_rate(by_year);
  j["annual_growth_rate_formula"] =
      "(count_last / count_first)^(1 / (year_last - year_first)) - 1 over nonzero years";
  return j.dump(2) + "\n";
}

}  // namespace litmeta
