#include "litmeta/corpus.hpp"

#include <map>

#include "litmeta/bibtex.hpp"
#include "litmeta/error.hpp"
#include "litmeta/jsonl.hpp"

namespace litmeta {

RecordFormat record_format_from_string(const std::string& s) {
  if (s == "bibtex" || s == "bibtex_subset") return RecordFormat::bibtex_subset;
  if (s == "jsonl") return RecordFormat::jsonl;
  throw ValidationError("unknown record format '" + s + "'");
}

std::vector<Record> parse_records(std::istream& in, RecordFormat format, Source source) {
  switch (format) {
    case RecordFormat::bibtex_subset: return parse_bibtex(in, source);
    case RecordFormat::jsonl: return parse_jsonl(in);
  }
  throw ValidationError("unhandled record format");
}

DedupeResult dedupe(const std::vector<Record>& records) {
  std::map<std::string, size_t> ids;
  for (size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = ids.emplace(records[i].id, i);
    if (!inserted && records[it->second] != records[i])
      throw ValidationError("duplicate id '" + records[i].id +
                            "' with conflicting contents");
  }

  // For each (title, year) group, pick the survivor index.
  std::map<std::pair<std::string, int>, size_t> survivor;
  for (size_t i = 0; i < records.size(); ++i) {
    auto key = records[i].dedupe_key();
    auto [it, inserted] = survivor.emplace(key, i);
    if (inserted) continue;
    const Record& incumbent = records[it->second];
    const Record& challenger = records[i];
    if (challenger.references.size() > incumbent.references.size() ||
        (challenger.references.size() == incumbent.references.size() &&
         challenger.id < incumbent.id))
      it->second = i;
  }

  DedupeResult result;
  for (size_t i = 0; i < records.size(); ++i) {
    if (survivor.at(records[i].dedupe_key()) == i)
      result.corpus.records.push_back(records[i]);
    else
      result.removed.push_back(records[i]);
  }
  result.corpus.ledger.append("deduplication", static_cast<long>(records.size()),
                              static_cast<long>(result.removed.size()),
                              "duplicate normalized (title, year)");
  return result;
}

Corpus screen(const Corpus& corpus, const std::string& stage_name,
              const std::set<std::string>& exclude_ids, const std::string& reason) {
  if (corpus.ledger.has_stage(stage_name))
    throw ValidationError("screening stage '" + stage_name + "' already recorded");
  for (const auto& id : exclude_ids)
    if (!corpus.contains(id))
      throw ValidationError("screening stage '" + stage_name + "': unknown id '" + id +
                            "'");

  Corpus out;
  out.ledger = corpus.ledger;
  for (const auto& r : corpus.records)
    if (!exclude_ids.count(r.id)) out.records.push_back(r);
  out.ledger.append(stage_name, static_cast<long>(corpus.records.size()),
                    static_cast<long>(exclude_ids.size()), reason);
  return out;
}

}  // namespace litmeta
