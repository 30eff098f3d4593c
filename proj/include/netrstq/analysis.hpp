#pragma once

#include <span>
#include <string>
#include <vector>

#include "netrstq/types.hpp"

namespace netrstq {

// Expression matrix: one row per transcript, one column per sample.
struct ExprMatrix {
  std::vector<std::string> transcript_ids;
  std::vector<std::vector<double>> rows;  // rows[t][s]
};

struct CoexpressionResult {
  std::vector<long long> bin_counts;  // nearby pairs per bin of bin_size, sorted by correlation
  int bin_size = 0;
  long long total_pairs = 0;           // all enumerated pairs (constant rows excluded)
  long long total_nearby = 0;          // nearby pairs among all enumerated pairs
  long long excluded_constant = 0;     // transcripts dropped for zero variance
  double expected_per_bin = 0.0;       // graph density * bin_size baseline
};

// Pearson-correlates every transcript pair across samples, sorts pairs from
// largest to smallest, groups them into bins of bin_size (incomplete final bin
// dropped), and counts per bin the pairs that are network-adjacent
// (distance 1) or within distance 2 (via the two-step closure).
CoexpressionResult coexpression_bins(const ExprMatrix& expr, const TranscriptNetwork& net,
                                     const TranscriptCatalog& catalog, int bin_size, int distance);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool warn_small_expected = false;  // some expected cell < 5
  long long table[2][2] = {{0, 0}, {0, 0}};  // {top, rest} x {interacting, not}
};

// Canonical 2x2 chi-square: interacting counts in the first n_top_bins bins
// against the rest of the enumerated pairs. 1 degree of freedom.
ChiSquareResult chi_square_enrichment(const std::vector<long long>& bin_counts, int n_top_bins,
                                      int bin_size, long long total_pairs,
                                      long long total_interacting);

enum class CompareSubset { DifferentNeighbors, AllMultiIsoform, All };

// Pearson correlation of two expression vectors (catalog transcript order)
// after equalizing totals and applying log2(x+1), over the selected subset.
// DifferentNeighbors: transcripts of multi-isoform genes whose isoforms do not
// all share the same neighbor set. Symmetric in the two vectors.
double compare_quant(std::span<const double> expr_a, std::span<const double> expr_b,
                     CompareSubset subset, const TranscriptCatalog& catalog,
                     const TranscriptNetwork* net);

// Convenience: the concatenated expressions of a quantification result.
std::vector<double> flatten_pi(const QuantState& state);

}  // namespace netrstq
