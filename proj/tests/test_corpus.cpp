#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "fixture.hpp"
#include "litmeta/bibtex.hpp"
#include "litmeta/corpus.hpp"
#include "litmeta/error.hpp"
#include "litmeta/jsonl.hpp"
#include "litmeta/log.hpp"
#include "litmeta/text.hpp"

using namespace litmeta;

namespace {

Record make_record(const std::string& id, const std::string& title, int year,
                   int n_refs) {
  Record r;
  r.id = id;
  r.title = title;
  r.authors = {"Ada Lovelace"};
  r.year = year;
  r.doc_type = DocType::quantitative;
  for (int i = 0; i < n_refs; ++i)
    r.references.insert("ref_" + id + "_" + std::to_string(i));
  return r;
}

}  // namespace

TEST_CASE("bibtex: two-entry file parses into two records") {
  std::istringstream in(R"(
@ARTICLE{gray2012,
  title = {Natural disasters and population mobility},
  author = {Clark Gray and Valerie Mueller},
  year = 2012,
  journal = {PNAS},
  keywords = {migration, level:micro},
  cites = {henry_2004_the, feng_2010_linkages},
  citations = 203,
  impactfactor = {9.4}
}
@WORKINGPAPER{naude2008,
  title = {Conflict, disasters and no jobs},
  author = {Wim Naude},
  year = {2008},
  cites = {barrios_2006_climatic}
}
)");
  auto records = parse_bibtex(in, Source::scopus_export);
  REQUIRE(records.size() == 2);

  const Record& a = records[0];
  CHECK(a.id == "gray2012");
  CHECK(a.title == "Natural disasters and population mobility");
  CHECK(a.authors == std::vector<std::string>{"Clark Gray", "Valerie Mueller"});
  CHECK(a.year == 2012);
  CHECK(a.venue == "PNAS");
  CHECK(a.published);  // journal field present
  CHECK(a.global_citations == 203);
  CHECK(a.impact_factor == doctest::Approx(9.4));
  CHECK(a.references == std::set<std::string>{"henry_2004_the", "feng_2010_linkages"});
  CHECK(a.keywords == std::set<std::string>{"migration", "level:micro"});
  CHECK(a.source == Source::scopus_export);

  const Record& b = records[1];
  CHECK_FALSE(b.published);
  CHECK(b.impact_factor == 0.0);
  CHECK(b.global_citations == 0);
  CHECK(b.record_key() == "naude_2008_conflict");
}

TEST_CASE("bibtex: empty stream yields empty list") {
  std::istringstream in("");
  CHECK(parse_bibtex(in).empty());
  std::istringstream comment_only("just some commentary, no entries");
  CHECK(parse_bibtex(comment_only).empty());
}

TEST_CASE("bibtex: unbalanced braces reported with byte offset and entry index") {
  std::string text = "@ARTICLE{k1,\n  title = {unterminated";
  std::istringstream in(text);
  try {
    parse_bibtex(in);
    FAIL("expected parse error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("entry 1") != std::string::npos);
    size_t brace_offset = text.find("{unterminated");
    CHECK(msg.find("byte offset " + std::to_string(brace_offset)) != std::string::npos);
    CHECK(msg.find("unbalanced braces") != std::string::npos);
  }
}

TEST_CASE("bibtex: duplicate key lists both occurrences") {
  std::istringstream in(
      "@ARTICLE{dup, title={a}, author={X Y}, year=2000}\n"
      "@ARTICLE{dup, title={b}, author={X Y}, year=2001}\n");
  try {
    parse_bibtex(in);
    FAIL("expected duplicate-key error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("duplicate key 'dup'") != std::string::npos);
    CHECK(msg.find("entry 1") != std::string::npos);
    CHECK(msg.find("entry 2") != std::string::npos);
  }
}

TEST_CASE("bibtex: unknown fields are ignored with a warning") {
  std::vector<std::string> warnings;
  log::set_sink([&](log::Level, const std::string& m) { warnings.push_back(m); });
  std::istringstream in("@ARTICLE{k, title={t}, author={A B}, year=2010, volume={12}}");
  auto records = parse_bibtex(in);
  log::set_sink(nullptr);
  REQUIRE(records.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("volume") != std::string::npos);
}

TEST_CASE("bibtex: nested braces and self-reference stripping") {
  std::istringstream in(
      "@ARTICLE{smith2010, title = {The {Big} flood}, author = {Jo Smith},\n"
      " year = 2010, cites = {smith_2010_the, other_2001_x}}");
  auto records = parse_bibtex(in);
  REQUIRE(records.size() == 1);
  CHECK(records[0].title == "The {Big} flood");
  // record_key == smith_2010_the, so the self-citation is dropped
  CHECK(records[0].references == std::set<std::string>{"other_2001_x"});
}

TEST_CASE("dedupe: survivor has the richer reference list") {
  auto a = make_record("idA", "Climate and Migration", 2015, 5);
  auto b = make_record("idB", "climate   AND migration", 2015, 3);  // same normalized
  auto [corpus, removed] = dedupe({a, b});
  REQUIRE(corpus.records.size() == 1);
  CHECK(corpus.records[0].id == "idA");
  REQUIRE(removed.size() == 1);
  CHECK(removed[0].id == "idB");
  CHECK(corpus.ledger.stages.size() == 1);
  CHECK(corpus.ledger.stages[0].name == "deduplication");
  CHECK(corpus.ledger.stages[0].entered == 2);
  CHECK(corpus.ledger.stages[0].excluded == 1);
}

TEST_CASE("dedupe: tie on reference count breaks to smaller id") {
  auto a = make_record("zeta", "Same Title", 2010, 4);
  auto b = make_record("alpha", "same title", 2010, 4);
  auto [corpus, removed] = dedupe({a, b});
  REQUIRE(corpus.records.size() == 1);
  CHECK(corpus.records[0].id == "alpha");
}

TEST_CASE("dedupe: disjoint records pass through") {
  auto a = make_record("a", "t1", 2001, 2);
  auto b = make_record("b", "t2", 2002, 2);
  auto [corpus, removed] = dedupe({a, b});
  CHECK(corpus.records.size() == 2);
  CHECK(removed.empty());
}

TEST_CASE("dedupe: 203 synthetic records with 3 planted duplicate pairs") {
  std::vector<Record> records;
  for (int i = 0; i < 200; ++i)
    records.push_back(make_record("r" + std::to_string(i), "title " + std::to_string(i),
                                  2000 + i % 20, 2 + i % 5));
  // three duplicates of existing titles, with fewer references
  for (int i = 0; i < 3; ++i) {
    Record dup = make_record("dup" + std::to_string(i),
                             "Title " + std::to_string(i * 50), 2000 + (i * 50) % 20, 1);
    records.push_back(dup);
  }
  auto [corpus, removed] = dedupe(records);
  CHECK(corpus.records.size() == 200);
  CHECK(removed.size() == 3);
}

TEST_CASE("dedupe is idempotent") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto corpus = fixture::random_corpus(rng, 40, 60);
    // plant a few duplicates
    auto records = corpus.records;
    for (size_t i = 0; i < records.size() && i < 3; ++i) {
      Record dup = records[i];
      dup.id = dup.id + "_copy";
      records.push_back(dup);
    }
    auto first = dedupe(records);
    auto second = dedupe(first.corpus.records);
    CHECK(second.removed.empty());
    CHECK(second.corpus.records.size() == first.corpus.records.size());
  }
}

TEST_CASE("screen: the worked example (203 -> exclude 20 -> 183)") {
  std::vector<Record> records;
  for (int i = 0; i < 203; ++i)
    records.push_back(make_record("r" + std::to_string(i), "t" + std::to_string(i),
                                  2003 + i % 17, 3));
  auto [corpus, removed] = dedupe(records);
  REQUIRE(corpus.records.size() == 203);

  std::set<std::string> exclude;
  for (int i = 0; i < 20; ++i) exclude.insert("r" + std::to_string(i));
  Corpus screened = screen(corpus, "title_screen", exclude, "off-topic titles");
  CHECK(screened.records.size() == 183);
  const auto& stage = screened.ledger.stages.back();
  CHECK(stage.name == "title_screen");
  CHECK(stage.entered == 203);
  CHECK(stage.excluded == 20);

  // the next stage enters with 183
  Corpus next = screen(screened, "text_screen", {}, "none");
  CHECK(next.ledger.stages.back().entered == 183);
  CHECK(next.ledger.stages.back().excluded == 0);
  CHECK(next.records.size() == 183);
}

TEST_CASE("screen: unknown id and repeated stage name are errors") {
  auto [corpus, removed] = dedupe({make_record("a", "t", 2010, 1)});
  CHECK_THROWS_WITH_AS(screen(corpus, "s1", {"ghost"}, "r"),
                       doctest::Contains("unknown id 'ghost'"), ValidationError);
  Corpus once = screen(corpus, "s1", {}, "r");
  CHECK_THROWS_AS(screen(once, "s1", {}, "r"), ValidationError);
  CHECK_THROWS_AS(screen(once, "deduplication", {}, "r"), ValidationError);
}

TEST_CASE("ledger telescoping holds for any screening sequence") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    auto base = fixture::random_corpus(rng, 60, 40);
    auto [corpus, removed] = dedupe(base.records);
    int n_stages = 1 + static_cast<int>(rng() % 4);
    for (int s = 0; s < n_stages && !corpus.records.empty(); ++s) {
      std::set<std::string> exclude;
      for (const auto& r : corpus.records)
        if (rng() % 4 == 0) exclude.insert(r.id);
      corpus = screen(corpus, "stage" + std::to_string(s), exclude,
                      "random exclusion");
    }
    long excluded_total = 0;
    for (const auto& stage : corpus.ledger.stages) excluded_total += stage.excluded;
    CHECK(corpus.ledger.stages.front().entered - excluded_total ==
          static_cast<long>(corpus.records.size()));
  }
}

TEST_CASE("ledger csv round-trip") {
  auto [corpus, removed] = dedupe({make_record("a", "t", 2010, 1),
                                   make_record("b", "u", 2011, 1)});
  Corpus screened = screen(corpus, "s1", {"a"}, "reason, with comma");
  std::string csv = screened.ledger.to_csv();
  CHECK(ScreeningLedger::from_csv(csv) == screened.ledger);
  CHECK(csv.rfind("stage,entered,excluded,reason\n", 0) == 0);
}

TEST_CASE("jsonl round-trip is the identity on records") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 25; ++trial) {
    auto corpus = fixture::random_corpus(rng, 30, 50);
    std::ostringstream first;
    write_jsonl(first, corpus.records);
    std::istringstream back(first.str());
    auto reparsed = parse_jsonl(back);
    REQUIRE(reparsed.size() == corpus.records.size());
    CHECK(reparsed == corpus.records);
    std::ostringstream second;
    write_jsonl(second, reparsed);
    CHECK(first.str() == second.str());
  }
}

TEST_CASE("jsonl: malformed line reports its line number") {
  std::istringstream in("{\"id\": \"a\"");
  CHECK_THROWS_WITH_AS(parse_jsonl(in), doctest::Contains("line 1"), Error);
}

TEST_CASE("record invariants: year range and citation sign") {
  Record r = make_record("x", "t", 1899, 1);
  CHECK_THROWS_AS(finalize_record(r), ValidationError);
  r.year = 2010;
  r.global_citations = -1;
  CHECK_THROWS_AS(finalize_record(r), ValidationError);
}

TEST_CASE("reference key normalization survives punctuation and case noise") {
  CHECK(normalize_reference_key("  Gray_2012_Natural ") == "gray_2012_natural");
  CHECK(normalize_reference_key("GRAY, 2012: natural!") == "gray2012_natural");
  CHECK(make_record_key({"Clark Gray", "V. Mueller"}, 2012, "Natural disasters") ==
        "gray_2012_natural");
  CHECK(make_record_key({"Naude, Wim"}, 2008, "Conflict, disasters") ==
        "naude_2008_conflict");
}

TEST_CASE("parse_records dispatches on format") {
  std::istringstream bib("@A{k, title={t}, author={A B}, year=2010}");
  CHECK(parse_records(bib, RecordFormat::bibtex_subset).size() == 1);
  Record r = make_record("j1", "t", 2011, 2);
  std::ostringstream line;
  write_jsonl(line, {r});
  std::istringstream jsonl_in(line.str());
  CHECK(parse_records(jsonl_in, RecordFormat::jsonl).size() == 1);
}
