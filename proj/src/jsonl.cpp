#include "litmeta/jsonl.hpp"

#include <string>

#include "json.hpp"
#include "litmeta/error.hpp"

namespace litmeta {

using ordered_json = nlohmann::ordered_json;

namespace {

Record record_from_json(const ordered_json& j, size_t line_no) {
  auto context = [&](const std::string& what) {
    return Error("jsonl: line " + std::to_string(line_no) + ": " + what);
  };
  try {
    Record r;
    r.id = j.at("id").get<std::string>();
    r.title = j.at("title").get<std::string>();
    r.authors = j.at("authors").get<std::vector<std::string>>();
    r.year = j.at("year").get<int>();
    r.venue = j.value("venue", std::string{});
    r.doc_type = doc_type_from_string(j.at("doc_type").get<std::string>());
    r.published = j.at("published").get<bool>();
    r.global_citations = j.value("global_citations", 0L);
    r.impact_factor = j.value("impact_factor", 0.0);
    for (const auto& ref : j.value("references", std::vector<std::string>{}))
      r.references.insert(ref);
    for (const auto& kw : j.value("keywords", std::vector<std::string>{}))
      r.keywords.insert(kw);
    r.source = source_from_string(j.at("source").get<std::string>());
    finalize_record(r);
    return r;
  } catch (const ordered_json::exception& e) {
    throw context(e.what());
  } catch (const ValidationError& e) {
    throw context(e.what());
  }
}

}  // namespace

std::vector<Record> parse_jsonl(std::istream& in) {
  std::vector<Record> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error("jsonl: line " + std::to_string(line_no) + ": invalid JSON");
    records.push_back(record_from_json(j, line_no));
  }
  return records;
}

std::string record_to_json_line(const Record& r) {
  ordered_json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["authors"] = r.authors;
  j["year"] = r.year;
  j["venue"] = r.venue;
  j["doc_type"] = to_string(r.doc_type);
  j["published"] = r.published;
  j["global_citations"] = r.global_citations;
  j["impact_factor"] = r.impact_factor;
  j["references"] = std::vector<std::string>(r.references.begin(), r.references.end());
  j["keywords"] = std::vector<std::string>(r.keywords.begin(), r.keywords.end());
  j["source"] = to_string(r.source);
  return j.dump();
}

void write_jsonl(std::ostream& out, const std::vector<Record>& records) {
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

}  // namespace litmeta
