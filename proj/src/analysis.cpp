#include "netrstq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netrstq/common.hpp"
#include "netrstq/netbuild.hpp"

namespace netrstq {

namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw NumericalError("correlation undefined for a constant vector");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

CoexpressionResult coexpression_bins(const ExprMatrix& expr, const TranscriptNetwork& net,
                                     const TranscriptCatalog& catalog, int bin_size,
                                     int distance) {
  if (bin_size < 1) throw ValidationError("bin size must be >= 1");
  if (distance != 1 && distance != 2) throw ValidationError("distance must be 1 or 2");
  const size_t n = expr.transcript_ids.size();
  if (expr.rows.size() != n) throw ValidationError("expression matrix shape mismatch");
  size_t samples = n == 0 ? 0 : expr.rows[0].size();
  if (samples < 2) throw ValidationError("need at least 2 samples for co-expression");
  for (const auto& row : expr.rows)
    if (row.size() != samples) throw ValidationError("ragged expression matrix");

  const TranscriptNetwork* graph = &net;
  TranscriptNetwork closure;
  if (distance == 2) {
    closure = two_step_closure(net, catalog);
    graph = &closure;
  }

  CoexpressionResult out;
  out.bin_size = bin_size;

  // Standardized rows; constant transcripts are excluded with a count.
  std::vector<std::vector<double>> z(n);
  std::vector<int> keep;
  for (size_t t = 0; t < n; ++t) {
    const auto& row = expr.rows[t];
    double mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(samples);
    double ss = 0.0;
    for (double v : row) ss += (v - mean) * (v - mean);
    if (ss <= 0.0) {
      ++out.excluded_constant;
      continue;
    }
    double inv = 1.0 / std::sqrt(ss);
    z[t].resize(samples);
    for (size_t s = 0; s < samples; ++s) z[t][s] = (row[s] - mean) * inv;
    keep.push_back(static_cast<int>(t));
  }

  std::vector<int> node_of(n, -1);
  for (size_t t = 0; t < n; ++t) node_of[t] = graph->node_index(expr.transcript_ids[t]);

  struct Pair {
    double corr;
    int a, b;
    bool nearby;
  };
  std::vector<Pair> pairs;
  pairs.reserve(keep.size() * (keep.size() - 1) / 2);
  for (size_t i = 0; i < keep.size(); ++i) {
    int a = keep[i];
    for (size_t j = i + 1; j < keep.size(); ++j) {
      int b = keep[j];
      double corr = 0.0;
      for (size_t s = 0; s < samples; ++s) corr += z[static_cast<size_t>(a)][s] * z[static_cast<size_t>(b)][s];
      bool nearby = node_of[static_cast<size_t>(a)] >= 0 && node_of[static_cast<size_t>(b)] >= 0 &&
                    graph->has_edge(node_of[static_cast<size_t>(a)], node_of[static_cast<size_t>(b)]);
      pairs.push_back({corr, a, b, nearby});
      if (nearby) ++out.total_nearby;
    }
  }
  out.total_pairs = static_cast<long long>(pairs.size());

  // Largest correlation first; index tie-break keeps the order reproducible.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.corr != y.corr) return x.corr > y.corr;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  size_t full_bins = pairs.size() / static_cast<size_t>(bin_size);
  out.bin_counts.assign(full_bins, 0);
  for (size_t i = 0; i < full_bins * static_cast<size_t>(bin_size); ++i)
    if (pairs[i].nearby) ++out.bin_counts[i / static_cast<size_t>(bin_size)];

  if (out.total_pairs > 0)
    out.expected_per_bin = static_cast<double>(out.total_nearby) /
                           static_cast<double>(out.total_pairs) * static_cast<double>(bin_size);
  return out;
}

ChiSquareResult chi_square_enrichment(const std::vector<long long>& bin_counts, int n_top_bins,
                                      int bin_size, long long total_pairs,
                                      long long total_interacting) {
  if (n_top_bins < 1 || n_top_bins > static_cast<int>(bin_counts.size()))
    throw ValidationError("n_top_bins outside the available bins");
  long long top_total = static_cast<long long>(n_top_bins) * bin_size;
  if (top_total > total_pairs)
    throw ValidationError("top bins exceed the number of enumerated pairs");

  ChiSquareResult r;
  long long a = 0;  // interacting in top
  for (int i = 0; i < n_top_bins; ++i) a += bin_counts[static_cast<size_t>(i)];
  long long b = top_total - a;
  long long c = total_interacting - a;
  long long d = (total_pairs - top_total) - c;
  if (b < 0 || c < 0 || d < 0) throw ValidationError("inconsistent contingency totals");
  r.table[0][0] = a;
  r.table[0][1] = b;
  r.table[1][0] = c;
  r.table[1][1] = d;

  double n = static_cast<double>(total_pairs);
  double r1 = static_cast<double>(a + b), r2 = static_cast<double>(c + d);
  double c1 = static_cast<double>(a + c), c2 = static_cast<double>(b + d);
  if (r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0) {
    r.statistic = 0.0;  // degenerate margin: no association measurable
    r.p_value = 1.0;
    return r;
  }
  double det = static_cast<double>(a) * static_cast<double>(d) -
               static_cast<double>(b) * static_cast<double>(c);
  r.statistic = n * det * det / (r1 * r2 * c1 * c2);
  // Survival function of chi-square with 1 df.
  r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));
  r.warn_small_expected = r1 * c1 / n < 5.0 || r1 * c2 / n < 5.0 || r2 * c1 / n < 5.0 ||
                          r2 * c2 / n < 5.0;
  return r;
}

double compare_quant(std::span<const double> expr_a, std::span<const double> expr_b,
                     CompareSubset subset, const TranscriptCatalog& catalog,
                     const TranscriptNetwork* net) {
  const size_t n = static_cast<size_t>(catalog.transcript_count());
  if (expr_a.size() != n || expr_b.size() != n)
    throw ValidationError("expression vectors do not match the catalog");

  std::vector<int> selected;
  switch (subset) {
    case CompareSubset::All:
      selected.resize(n);
      std::iota(selected.begin(), selected.end(), 0);
      break;
    case CompareSubset::AllMultiIsoform:
      for (int g = 0; g < catalog.gene_count(); ++g)
        if (catalog.gene_size(g) > 1)
          for (int t = catalog.gene_begin(g); t < catalog.gene_end(g); ++t) selected.push_back(t);
      break;
    case CompareSubset::DifferentNeighbors: {
      if (net == nullptr)
        throw ValidationError("different-neighbors subset requires a network");
      for (int g = 0; g < catalog.gene_count(); ++g) {
        if (catalog.gene_size(g) < 2) continue;
        bool differs = false;
        std::vector<int> first;
        for (int t = catalog.gene_begin(g); t < catalog.gene_end(g) && !differs; ++t) {
          int node = net->node_index(catalog.transcript_id(t));
          std::vector<int> nbs;
          if (node >= 0) {
            // Compare neighborhoods in catalog index space.
            for (int v : net->neighbors(node))
              nbs.push_back(catalog.find_transcript(net->node_id(v)));
            std::sort(nbs.begin(), nbs.end());
          }
          if (t == catalog.gene_begin(g))
            first = std::move(nbs);
          else if (nbs != first)
            differs = true;
        }
        if (differs)
          for (int t = catalog.gene_begin(g); t < catalog.gene_end(g); ++t) selected.push_back(t);
      }
      break;
    }
  }
  if (selected.empty()) throw ValidationError("empty comparison subset");

  // Equalize totals (per-million scale), then the log transform.
  double sum_a = 0.0, sum_b = 0.0;
  for (size_t t = 0; t < n; ++t) {
    sum_a += expr_a[t];
    sum_b += expr_b[t];
  }
  if (sum_a <= 0.0 || sum_b <= 0.0)
    throw NumericalError("correlation undefined for a constant vector");
  std::vector<double> xa(selected.size()), xb(selected.size());
  for (size_t i = 0; i < selected.size(); ++i) {
    size_t t = static_cast<size_t>(selected[i]);
    xa[i] = std::log2(expr_a[t] / sum_a * 1e6 + 1.0);
    xb[i] = std::log2(expr_b[t] / sum_b * 1e6 + 1.0);
  }
  return pearson(xa, xb);
}

std::vector<double> flatten_pi(const QuantState& state) {
  std::vector<double> out;
  for (const auto& block : state.pi) out.insert(out.end(), block.begin(), block.end());
  return out;
}

}  // namespace netrstq
