#include "litmeta/record.hpp"

#include <sstream>

#include "litmeta/csv.hpp"
#include "litmeta/error.hpp"
#include "litmeta/text.hpp"

namespace litmeta {

const char* to_string(DocType t) {
  switch (t) {
    case DocType::quantitative: return "quantitative";
    case DocType::qualitative: return "qualitative";
    case DocType::review: return "review";
    case DocType::theoretical: return "theoretical";
    case DocType::policy: return "policy";
  }
  return "?";
}

const char* to_string(Source s) {
  switch (s) {
    case Source::scopus_export: return "scopus_export";
    case Source::wos_export: return "wos_export";
    case Source::manual: return "manual";
    case Source::prior_meta: return "prior_meta";
  }
  return "?";
}

DocType doc_type_from_string(const std::string& s) {
  if (s == "quantitative") return DocType::quantitative;
  if (s == "qualitative") return DocType::qualitative;
  if (s == "review") return DocType::review;
  if (s == "theoretical") return DocType::theoretical;
  if (s == "policy") return DocType::policy;
  throw ValidationError("unknown doc_type '" + s + "'");
}

Source source_from_string(const std::string& s) {
  if (s == "scopus_export") return Source::scopus_export;
  if (s == "wos_export") return Source::wos_export;
  if (s == "manual") return Source::manual;
  if (s == "prior_meta") return Source::prior_meta;
  throw ValidationError("unknown source '" + s + "'");
}

std::string Record::record_key() const {
  return make_record_key(authors, year, title);
}

std::pair<std::string, int> Record::dedupe_key() const {
  return {norm_text(title), year};
}

void finalize_record(Record& r) {
  if (r.id.empty()) throw ValidationError("record with empty id");
  if (r.year < 1900 || r.year > 2100)
    throw ValidationError("record '" + r.id + "': year " + std::to_string(r.year) +
                          " outside [1900, 2100]");
  if (r.global_citations < 0)
    throw ValidationError("record '" + r.id + "': negative global_citations");
  if (r.impact_factor < 0)
    throw ValidationError("record '" + r.id + "': negative impact_factor");
  r.references.erase(normalize_reference_key(r.id));
  r.references.erase(r.record_key());
}

bool ScreeningLedger::has_stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return true;
  return false;
}

void ScreeningLedger::append(const std::string& name, long entered, long excluded,
                             const std::string& reason) {
  if (entered < 0 || excluded < 0 || excluded > entered)
    throw ValidationError("ledger stage '" + name + "': inconsistent counts");
  if (!stages.empty()) {
    const Stage& prev = stages.back();
    if (entered != prev.entered - prev.excluded)
      throw ValidationError("ledger stage '" + name +
                            "': entered count does not telescope from previous stage");
  }
  stages.push_back({name, entered, excluded, reason});
}

std::string ScreeningLedger::to_csv() const {
  std::ostringstream out;
  out << "stage,entered,excluded,reason\n";
  for (const auto& s : stages)
    csv::write_row(out, {s.name, std::to_string(s.entered), std::to_string(s.excluded),
                         s.reason});
  return out.str();
}

ScreeningLedger ScreeningLedger::from_csv(const std::string& text) {
  std::istringstream in(text);
  auto rows = csv::read(in);
  if (rows.empty() || rows[0] != std::vector<std::string>{"stage", "entered", "excluded",
                                                          "reason"})
    throw ValidationError("ledger csv: missing or wrong header");
  ScreeningLedger ledger;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 4)
      throw ValidationError("ledger csv: row " + std::to_string(i + 1) +
                            " has wrong field count");
    ledger.stages.push_back({rows[i][0], std::stol(rows[i][1]), std::stol(rows[i][2]),
                             rows[i][3]});
  }
  return ledger;
}

std::set<std::string> Corpus::reference_universe() const {
  std::set<std::string> universe;
  for (const auto& r : records) universe.insert(r.references.begin(), r.references.end());
  return universe;
}

bool Corpus::contains(const std::string& id) const { return find(id) != nullptr; }

const Record* Corpus::find(const std::string& id) const {
  for (const auto& r : records)
    if (r.id == id) return &r;
  return nullptr;
}

}  // namespace litmeta
