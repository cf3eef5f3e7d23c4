#pragma once

// Deterministic synthetic data shared by the unit, pipeline, and acceptance
// suites: random corpora for oracle comparisons and a full paper-scale
// fixture (151 papers, 5433 references, 4 planted communities, 3904 slow +
// 2065 fast estimates) written to disk for end-to-end runs.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "litmeta/effects.hpp"
#include "litmeta/record.hpp"

namespace fixture {

/// Random corpus for oracle equivalence tests: up to max_papers papers citing
/// references drawn from a max_refs-key universe.
litmeta::Corpus random_corpus(std::mt19937_64& rng, int max_papers, int max_refs);

/// Random effect list with positive se and mixed onsets/clusters.
std::vector<litmeta::EffectRecord> random_effects(std::mt19937_64& rng, int k,
                                                  int n_studies, int n_clusters);

struct PaperScale {
  int papers = 151;
  int references = 5433;
  int blocks = 4;
  long slow_rows = 3904;
  long fast_rows = 2065;
  int slow_studies = 66;
  int fast_studies = 60;
};

/// Writes records.jsonl, effects.csv and config.json under dir (created if
/// needed) and returns the config path. Content is deterministic.
std::string write_paper_scale_fixture(const std::string& dir,
                                      const PaperScale& scale = {});

/// In-memory variant of the paper-scale corpus, for graph-level tests.
litmeta::Corpus paper_scale_corpus(const PaperScale& scale = {});

}  // namespace fixture
