#pragma once

#include <set>
#include <string>
#include <vector>

namespace litmeta {

enum class DocType { quantitative, qualitative, review, theoretical, policy };
enum class Source { scopus_export, wos_export, manual, prior_meta };

const char* to_string(DocType t);
const char* to_string(Source s);
DocType doc_type_from_string(const std::string& s);
Source source_from_string(const std::string& s);

/// One bibliographic item with its reference list.
struct Record {
  std::string id;
  std::string title;
  std::vector<std::string> authors;
  int year = 0;
  std::string venue;
  DocType doc_type = DocType::quantitative;
  bool published = false;
  long global_citations = 0;
  double impact_factor = 0.0;
  std::set<std::string> references;   // normalized reference keys
  std::set<std::string> keywords;     // lowercase
  Source source = Source::manual;

  /// Key this record contributes to the shared reference-key space.
  std::string record_key() const;

  /// Normalized (title, year) pair used for deduplication.
  std::pair<std::string, int> dedupe_key() const;

  bool operator==(const Record&) const = default;
};

/// Drops self-references and checks the per-record invariants.
/// Throws ValidationError naming the record on violation.
void finalize_record(Record& r);

/// Stage-by-stage accounting of inclusion and exclusion.
struct ScreeningLedger {
  struct Stage {
    std::string name;
    long entered = 0;
    long excluded = 0;
    std::string reason;
    bool operator==(const Stage&) const = default;
  };
  std::vector<Stage> stages;

  bool has_stage(const std::string& name) const;
  void append(const std::string& name, long entered, long excluded,
              const std::string& reason);
  /// CSV with header `stage,entered,excluded,reason`.
  std::string to_csv() const;
  static ScreeningLedger from_csv(const std::string& text);
  bool operator==(const ScreeningLedger&) const = default;
};

/// The screened collection. Immutable once built; screening returns new values.
struct Corpus {
  std::vector<Record> records;
  ScreeningLedger ledger;

  /// Union of all record reference sets.
  std::set<std::string> reference_universe() const;

  bool contains(const std::string& id) const;
  const Record* find(const std::string& id) const;
};

}  // namespace litmeta
