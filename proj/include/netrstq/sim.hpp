#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netrstq/types.hpp"

namespace netrstq {

struct SimOptions {
  double poisson_mean = 50.0;
  double sim_alpha = 1.0;          // weight of the neighbor-average term in the update
  double noise_sigma = 5.0;        // Gaussian noise on initial expressions, truncated at 0
  double powerlaw_exponent = 0.6;  // rank-based initial proportion decay
  uint64_t seed = 0;
};

// One sequential sweep of the ground-truth proportion update: per gene in
// catalog order, p_ik <- (alpha * neighborMean(pi) + pi_init_ik) / normalizer,
// then pi_ik = E_i * p_ik immediately. Returns max |delta p|.
double sim_proportion_sweep(const TranscriptCatalog& catalog, const TranscriptNetwork& net,
                            double sim_alpha, std::span<const double> pi_init,
                            std::span<const double> gene_expression, std::vector<double>& p,
                            std::vector<double>& pi);

// Ground-truth generator: gene expressions from a Poisson draw, initial
// proportions from a seeded rank power law, Gaussian noise on initial
// expressions, then the neighbor-average update iterated to a fixed point
// (max |delta p| < 1e-8, hard cap 500 sweeps), and a final global
// normalization of the expressions.
SimTruth generate_truth(const TranscriptCatalog& catalog, const TranscriptNetwork& net,
                        const SimOptions& opts);

enum class OverlapModel { Exclusive, SharedPrefix };

struct SampleOptions {
  long long total_reads = 100000;
  int read_length = 0;
  OverlapModel model = OverlapModel::Exclusive;
  double ambiguity = 0.5;  // SharedPrefix: shared fraction of the shortest isoform's positions
  uint64_t seed = 0;
};

// Read-compatibility sampler: reads are allocated to genes proportionally to
// sum_k pi_ik * l_ik, origins within a gene proportionally to
// pi_ik * (l_ik - l_r + 1), start positions uniform along the origin.
// Exclusive marks only the origin compatible. SharedPrefix gives the gene's
// isoforms a common prefix spanning `ambiguity` of the shortest isoform's
// start positions; reads starting inside it are compatible with every
// isoform. Requires read_length < every transcript length.
CompatibilitySet sample_compat(const SimTruth& truth, const TranscriptCatalog& catalog,
                               const SampleOptions& opts);

}  // namespace netrstq
