// Timing comparison between the serial reference paths and the OpenMP
// kernels. Same inputs, same outputs (bit-identical); only wall time differs.
#include <omp.h>

#include <cstdio>
#include <string>

#include "introsumm/matrix.hpp"
#include "introsumm/oracle.hpp"
#include "introsumm/represent.hpp"
#include "introsumm/summarize.hpp"
#include "introsumm/synth.hpp"

using namespace introsumm;

namespace {

Matrix random_matrix(Rng& rng, int r, int c) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.next_uniform(-1.0, 1.0);
  return m;
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-34s serial %8.3fs   parallel %8.3fs   speedup %.2fx\n", name, serial_s,
              parallel_s, parallel_s > 0 ? serial_s / parallel_s : 0.0);
}

}  // namespace

int main() {
  const int threads = omp_get_max_threads();
  std::printf("threads: %d\n", threads);
  Rng rng(4242);

  {
    const int n = 384;
    const Matrix a = random_matrix(rng, n, n);
    const Matrix b = random_matrix(rng, n, n);
    double t0 = omp_get_wtime();
    double sink = 0.0;
    for (int rep = 0; rep < 10; ++rep) sink += reference::matmul(a, b).data[0];
    double t1 = omp_get_wtime();
    for (int rep = 0; rep < 10; ++rep) sink += matmul(a, b).data[0];
    double t2 = omp_get_wtime();
    report("matmul 384x384 (x10)", t1 - t0, t2 - t1);
    if (sink == 42.0) std::printf("impossible\n");
  }

  {
    Rng doc_rng(11);
    const Document doc = make_arxiv_document("bench", doc_rng);
    omp_set_num_threads(1);
    const double t0 = omp_get_wtime();
    for (int rep = 0; rep < 20; ++rep) lexrank_scores(doc);
    const double t1 = omp_get_wtime();
    omp_set_num_threads(threads);
    const double t2 = omp_get_wtime();
    for (int rep = 0; rep < 20; ++rep) lexrank_scores(doc);
    const double t3 = omp_get_wtime();
    report("lexrank centrality (x20)", t1 - t0, t3 - t2);
  }

  {
    SynthConfig config;
    config.mode = "arxiv";
    config.train_docs = 16;
    config.val_docs = 0;
    config.test_docs = 0;
    config.seed = 3;
    const SynthCorpus corpus = generate_synthetic(config);
    LabelConfig lc;
    lc.body_budget = 10;
    const double t0 = omp_get_wtime();
    label_corpus(corpus.train, lc, Exec::serial);
    const double t1 = omp_get_wtime();
    label_corpus(corpus.train, lc, Exec::parallel);
    const double t2 = omp_get_wtime();
    report("oracle labeling, 16 docs", t1 - t0, t2 - t1);
  }

  {
    const int d = 128;
    EncoderParams params = init_encoder(d, rng);
    const Matrix x = random_matrix(rng, 200, d);
    omp_set_num_threads(1);
    const double t0 = omp_get_wtime();
    for (int rep = 0; rep < 50; ++rep) encode(params, x);
    const double t1 = omp_get_wtime();
    omp_set_num_threads(threads);
    const double t2 = omp_get_wtime();
    for (int rep = 0; rep < 50; ++rep) encode(params, x);
    const double t3 = omp_get_wtime();
    report("encoder forward n=200 d=128 (x50)", t1 - t0, t3 - t2);
  }

  return 0;
}
