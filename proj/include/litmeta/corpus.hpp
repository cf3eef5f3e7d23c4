#pragma once

#include <istream>
#include <set>
#include <string>
#include <vector>

#include "litmeta/record.hpp"

namespace litmeta {

enum class RecordFormat { bibtex_subset, jsonl };

RecordFormat record_format_from_string(const std::string& s);

/// Ingestion front-end for search exports. Dispatches on the declared format.
std::vector<Record> parse_records(std::istream& in, RecordFormat format,
                                  Source source = Source::manual);

struct DedupeResult {
  Corpus corpus;
  std::vector<Record> removed;
};

/// Collapses records with an identical normalized (title, year) pair.
/// The survivor is the record with the richer reference list, ties broken by
/// lexicographically smaller id. Appends a "deduplication" ledger stage.
/// Throws ValidationError when two distinct records share an id.
DedupeResult dedupe(const std::vector<Record>& records);

/// Removes the given ids and appends a ledger stage. Every id must exist and
/// the stage name must be new.
Corpus screen(const Corpus& corpus, const std::string& stage_name,
              const std::set<std::string>& exclude_ids, const std::string& reason);

}  // namespace litmeta
