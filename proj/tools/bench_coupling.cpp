// Benchmark: serial reference vs the postings-based (OpenMP) kernels for
// coupling-graph construction and local citation counting.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef LITMETA_HAVE_OPENMP
#include <omp.h>
#endif

#include "litmeta/bibliometrics.hpp"
#include "litmeta/coupling.hpp"
#include "litmeta/record.hpp"

using namespace litmeta;
using clock_type = std::chrono::steady_clock;

namespace {

Corpus synth_corpus(int n_papers, int n_refs, int refs_per_paper, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n_refs - 1);
  Corpus corpus;
  for (int i = 0; i < n_papers; ++i) {
    Record r;
    r.id = "p" + std::to_string(i);
    r.title = "paper " + std::to_string(i);
    r.authors = {"author_" + std::to_string(i % 37)};
    r.year = 2003 + i % 18;
    r.doc_type = DocType::quantitative;
    for (int k = 0; k < refs_per_paper; ++k)
      r.references.insert("ref_" + std::to_string(pick(rng)));
    corpus.records.push_back(std::move(r));
  }
  return corpus;
}

double ms_since(clock_type::time_point start) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  int max_scale = argc > 1 ? std::atoi(argv[1]) : 4;
#ifdef LITMETA_HAVE_OPENMP
  std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled\n");
#endif
  std::printf("%8s %8s %10s %14s %14s %14s %8s\n", "papers", "refs", "edges",
              "serial(ms)", "parallel(ms)", "local_cit(ms)", "match");

  for (int scale = 1; scale <= max_scale; ++scale) {
    int papers = 151 * scale * scale;
    int refs = 5433 * scale;
    Corpus corpus = synth_corpus(papers, refs, 40, 42);
    IncidenceMatrix incidence = build_incidence(corpus);

    auto t0 = clock_type::now();
    CouplingGraph serial = coupling_graph_serial(incidence);
    double serial_ms = ms_since(t0);

    t0 = clock_type::now();
    CouplingGraph parallel = coupling_graph(incidence);
    double parallel_ms = ms_since(t0);

    bool match = serial.edges.size() == parallel.edges.size();
    for (size_t i = 0; match && i < serial.edges.size(); ++i)
      match = serial.edges[i].i == parallel.edges[i].i &&
              serial.edges[i].j == parallel.edges[i].j &&
              serial.edges[i].raw == parallel.edges[i].raw &&
              serial.edges[i].norm == parallel.edges[i].norm;

    t0 = clock_type::now();
    CitationTable local = local_citations(corpus);
    double local_ms = ms_since(t0);
    (void)local;

    std::printf("%8d %8d %10zu %14.1f %14.1f %14.1f %8s\n", papers, refs,
                parallel.edges.size(), serial_ms, parallel_ms, local_ms,
                match ? "yes" : "NO");
    if (!match) return 1;
  }
  return 0;
}
