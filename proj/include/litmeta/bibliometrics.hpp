#pragma once

#include <map>
#include <string>
#include <vector>

namespace litmeta {

struct Corpus;

/// Global vs in-sample citation counts, indexed like corpus.records.
struct CitationTable {
  std::vector<std::string> paper_ids;
  std::vector<long> global_citations;
  std::vector<long> local_citations;
};

/// Counts, for each record, the corpus papers whose reference set contains
/// its normalized key. Uses the same key space as the coupling module.
CitationTable local_citations(const Corpus& corpus);

/// Serial reference implementation (double loop), kept for tests and the
/// benchmark.
CitationTable local_citations_serial(const Corpus& corpus);

/// Largest h such that at least h entries are >= h.
long h_index(const std::vector<long>& citation_counts);

struct CollaborationIndex {
  double value = 0.0;
  bool defined = false;  // false (with value 0) when no multi-authored records
};

/// Total authors of multi-authored records over the number of such records.
CollaborationIndex collaboration_index(const Corpus& corpus);

std::map<int, long> production_by_year(const Corpus& corpus);

/// Compound annual growth between the first and last nonzero years.
double annual_growth_rate(const std::map<int, long>& by_year);

/// JSON report: top-cited lists, per-author production and h-index,
/// collaboration index, yearly counts.
std::string bibliometrics_report(const Corpus& corpus, size_t top_n = 10);

}  // namespace litmeta
