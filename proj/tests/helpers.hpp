#pragma once

// Shared builders and independent oracles for the test suites. The oracles
// evaluate the model's formulas on their own, without going through the
// library code paths they check.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "netrstq/types.hpp"

namespace testhelp {

using netrstq::CompatEntry;
using netrstq::ReadCompat;
using netrstq::TranscriptCatalog;
using netrstq::TranscriptNetwork;

// --- builders ---------------------------------------------------------------

inline TranscriptCatalog make_catalog(
    const std::vector<std::pair<std::string, std::vector<std::pair<std::string, int>>>>& layout) {
  std::vector<netrstq::GeneEntry> genes;
  for (const auto& [gid, transcripts] : layout) {
    netrstq::GeneEntry g;
    g.id = gid;
    for (const auto& [tid, len] : transcripts) g.transcripts.push_back({tid, len});
    genes.push_back(std::move(g));
  }
  return TranscriptCatalog::from_genes(std::move(genes));
}

inline ReadCompat read_of(const std::string& id, std::vector<CompatEntry> compat) {
  ReadCompat r;
  r.read_id = id;
  r.compat = std::move(compat);
  return r;
}

// Random gene instance: K transcripts, n reads with random compat subsets and
// q values in (0, 1].
inline std::vector<ReadCompat> random_reads(std::mt19937_64& rng, int K, int n_reads) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ReadCompat> reads;
  for (int j = 0; j < n_reads; ++j) {
    ReadCompat r;
    r.read_id = "r" + std::to_string(j);
    for (int k = 0; k < K; ++k)
      if (unit(rng) < 0.6) r.compat.push_back({k, 0.05 + 0.95 * unit(rng)});
    if (r.compat.empty()) {
      int k = static_cast<int>(unit(rng) * K) % K;
      r.compat.push_back({k, 0.05 + 0.95 * unit(rng)});
    }
    reads.push_back(std::move(r));
  }
  return reads;
}

// --- oracles ----------------------------------------------------------------

// Log of the uncommitted read likelihood, written out directly.
inline double oracle_read_loglik(const std::vector<double>& p, const std::vector<ReadCompat>& reads) {
  double ll = 0.0;
  for (const ReadCompat& r : reads) {
    double s = 0.0;
    for (const CompatEntry& e : r.compat) s += p[static_cast<size_t>(e.k)] * e.q;
    ll += std::log(s);
  }
  return ll;
}

// Log posterior kernel with a Dirichlet prior alpha = lambda*phi + 1
// (normalizer omitted: constant in p).
inline double oracle_prior_loglik(const std::vector<double>& p, const std::vector<ReadCompat>& reads,
                                  const std::vector<double>& phi, double lambda) {
  double ll = oracle_read_loglik(p, reads);
  for (size_t k = 0; k < p.size(); ++k) {
    double w = lambda * phi[k];
    if (w != 0.0) ll += w * (p[k] > 0.0 ? std::log(p[k]) : -HUGE_VAL);
  }
  return ll;
}

// Grid maximizer over the K=2 simplex with the given step.
inline std::vector<double> oracle_grid_argmax_k2(const std::vector<ReadCompat>& reads,
                                                 const std::vector<double>& phi, double lambda,
                                                 double step) {
  double best = -HUGE_VAL;
  double best_p = 0.5;
  long n = static_cast<long>(std::llround(1.0 / step));
  for (long i = 0; i <= n; ++i) {
    double p0 = static_cast<double>(i) * step;
    std::vector<double> p{p0, 1.0 - p0};
    double v = oracle_prior_loglik(p, reads, phi, lambda);
    if (v > best) {
      best = v;
      best_p = p0;
    }
  }
  return {best_p, 1.0 - best_p};
}

// Textbook 2x2 chi-square via expected counts.
inline double oracle_chi_square(long long a, long long b, long long c, long long d) {
  double n = static_cast<double>(a + b + c + d);
  double obs[2][2] = {{double(a), double(b)}, {double(c), double(d)}};
  double row[2] = {double(a + b), double(c + d)};
  double col[2] = {double(a + c), double(b + d)};
  double stat = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double expected = row[i] * col[j] / n;
      double diff = obs[i][j] - expected;
      stat += diff * diff / expected;
    }
  return stat;
}

inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// BFS distances from one node over an adjacency list.
inline std::vector<int> oracle_bfs(const std::vector<std::vector<int>>& adj, int start) {
  std::vector<int> dist(adj.size(), -1);
  std::vector<int> queue{start};
  dist[static_cast<size_t>(start)] = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    for (int v : adj[static_cast<size_t>(u)])
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testhelp
