#include "netrstq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netrstq/common.hpp"

namespace netrstq {

namespace {

// Adjacency in catalog transcript-index space.
std::vector<std::vector<int>> catalog_adjacency(const TranscriptCatalog& catalog,
                                                const TranscriptNetwork& net) {
  net.validate_against(catalog);
  std::vector<std::vector<int>> adj(static_cast<size_t>(catalog.transcript_count()));
  for (size_t u = 0; u < net.node_count(); ++u) {
    int t = catalog.find_transcript(net.node_id(static_cast<int>(u)));
    auto& row = adj[static_cast<size_t>(t)];
    for (int v : net.neighbors(static_cast<int>(u)))
      row.push_back(catalog.find_transcript(net.node_id(v)));
    std::sort(row.begin(), row.end());
  }
  return adj;
}

double sweep_with_adjacency(const TranscriptCatalog& catalog,
                            const std::vector<std::vector<int>>& adj, double sim_alpha,
                            std::span<const double> pi_init,
                            std::span<const double> gene_expression, std::vector<double>& p,
                            std::vector<double>& pi) {
  double max_delta = 0.0;
  std::vector<double> weight;
  for (int g = 0; g < catalog.gene_count(); ++g) {
    const int b = catalog.gene_begin(g), e = catalog.gene_end(g);
    weight.resize(static_cast<size_t>(e - b));
    double total = 0.0;
    for (int t = b; t < e; ++t) {
      double nb_mean = 0.0;
      const auto& nbs = adj[static_cast<size_t>(t)];
      if (!nbs.empty()) {
        for (int v : nbs) nb_mean += pi[static_cast<size_t>(v)];
        nb_mean /= static_cast<double>(nbs.size());
      }
      double wv = sim_alpha * nb_mean + pi_init[static_cast<size_t>(t)];
      weight[static_cast<size_t>(t - b)] = wv;
      total += wv;
    }
    for (int t = b; t < e; ++t) {
      // A fully silent gene (no signal, no connected neighbors) keeps its p.
      double fresh = total > 0.0 ? weight[static_cast<size_t>(t - b)] / total
                                 : p[static_cast<size_t>(t)];
      max_delta = std::max(max_delta, std::abs(fresh - p[static_cast<size_t>(t)]));
      p[static_cast<size_t>(t)] = fresh;
      pi[static_cast<size_t>(t)] = gene_expression[static_cast<size_t>(g)] * fresh;
    }
  }
  return max_delta;
}

}  // namespace

double sim_proportion_sweep(const TranscriptCatalog& catalog, const TranscriptNetwork& net,
                            double sim_alpha, std::span<const double> pi_init,
                            std::span<const double> gene_expression, std::vector<double>& p,
                            std::vector<double>& pi) {
  return sweep_with_adjacency(catalog, catalog_adjacency(catalog, net), sim_alpha, pi_init,
                              gene_expression, p, pi);
}

SimTruth generate_truth(const TranscriptCatalog& catalog, const TranscriptNetwork& net,
                        const SimOptions& opts) {
  if (opts.poisson_mean <= 0.0) throw ValidationError("poisson mean must be positive");
  if (opts.sim_alpha < 0.0) throw ValidationError("sim alpha must be >= 0");
  if (opts.noise_sigma < 0.0) throw ValidationError("noise sigma must be >= 0");

  const int n_genes = catalog.gene_count();
  const int n_tr = catalog.transcript_count();
  std::mt19937_64 rng(opts.seed);

  SimTruth truth;
  truth.sim_alpha = opts.sim_alpha;
  truth.noise_sigma = opts.noise_sigma;

  // Gene expressions.
  std::poisson_distribution<long> pois(opts.poisson_mean);
  truth.gene_expression.resize(static_cast<size_t>(n_genes));
  for (int g = 0; g < n_genes; ++g)
    truth.gene_expression[static_cast<size_t>(g)] = static_cast<double>(pois(rng));

  // Initial proportions: shuffled ranks under a power-law decay, per gene.
  truth.p_init.assign(static_cast<size_t>(n_tr), 1.0);
  std::vector<int> ranks;
  for (int g = 0; g < n_genes; ++g) {
    const int b = catalog.gene_begin(g), e = catalog.gene_end(g);
    const int K = e - b;
    if (K == 1) continue;
    ranks.resize(static_cast<size_t>(K));
    std::iota(ranks.begin(), ranks.end(), 1);
    std::shuffle(ranks.begin(), ranks.end(), rng);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      double v = std::pow(static_cast<double>(ranks[static_cast<size_t>(k)]),
                          -opts.powerlaw_exponent);
      truth.p_init[static_cast<size_t>(b + k)] = v;
      total += v;
    }
    for (int k = 0; k < K; ++k) truth.p_init[static_cast<size_t>(b + k)] /= total;
  }

  // Initial expressions with truncated Gaussian noise.
  std::normal_distribution<double> noise(0.0, opts.noise_sigma);
  std::vector<double> pi_init(static_cast<size_t>(n_tr));
  for (int t = 0; t < n_tr; ++t) {
    double v = truth.gene_expression[static_cast<size_t>(catalog.gene_of(t))] *
               truth.p_init[static_cast<size_t>(t)];
    if (opts.noise_sigma > 0.0) v += noise(rng);
    pi_init[static_cast<size_t>(t)] = std::max(v, 0.0);
  }

  // Iterate the neighbor-average update to a fixed point.
  auto adj = catalog_adjacency(catalog, net);
  truth.p = truth.p_init;
  std::vector<double> pi(static_cast<size_t>(n_tr));
  for (int t = 0; t < n_tr; ++t) pi[static_cast<size_t>(t)] = pi_init[static_cast<size_t>(t)];
  bool converged = false;
  for (int it = 0; it < 500; ++it) {
    double delta = sweep_with_adjacency(catalog, adj, opts.sim_alpha, pi_init,
                                        truth.gene_expression, truth.p, pi);
    if (delta < 1e-8) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NumericalError("ground-truth proportion update did not converge within 500 sweeps");

  // Final expressions, normalized globally.
  truth.pi.resize(static_cast<size_t>(n_tr));
  double total = 0.0;
  for (int t = 0; t < n_tr; ++t) {
    truth.pi[static_cast<size_t>(t)] = truth.gene_expression[static_cast<size_t>(catalog.gene_of(t))] *
                                       truth.p[static_cast<size_t>(t)];
    total += truth.pi[static_cast<size_t>(t)];
  }
  if (total > 0.0)
    for (double& v : truth.pi) v /= total;
  return truth;
}

CompatibilitySet sample_compat(const SimTruth& truth, const TranscriptCatalog& catalog,
                               const SampleOptions& opts) {
  if (opts.total_reads < 0) throw ValidationError("total reads must be >= 0");
  if (opts.ambiguity < 0.0 || opts.ambiguity > 1.0)
    throw ValidationError("ambiguity must lie in [0,1]");
  for (int t = 0; t < catalog.transcript_count(); ++t)
    if (catalog.length(t) <= opts.read_length)
      throw ValidationError("read length " + std::to_string(opts.read_length) +
                            " is not shorter than transcript '" + catalog.transcript_id(t) + "'");

  std::mt19937_64 rng(opts.seed);
  CompatibilitySet compat(catalog, opts.read_length);

  // Gene weights: sum_k pi_ik * l_ik.
  std::vector<double> gene_weight(static_cast<size_t>(catalog.gene_count()), 0.0);
  for (int t = 0; t < catalog.transcript_count(); ++t)
    gene_weight[static_cast<size_t>(catalog.gene_of(t))] +=
        truth.pi[static_cast<size_t>(t)] * catalog.length(t);
  double weight_total = std::accumulate(gene_weight.begin(), gene_weight.end(), 0.0);
  if (weight_total <= 0.0 && opts.total_reads > 0)
    throw NumericalError("ground truth has zero total expression, cannot sample reads");

  std::discrete_distribution<int> gene_pick(gene_weight.begin(), gene_weight.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Shared-prefix geometry per gene: the first floor(ambiguity * (min_l - l_r
  // + 1)) start positions are common to every isoform; a read starting there
  // is compatible with all of them. Start positions are uniform per
  // transcript, matching the sampling probabilities the estimators assume.
  std::vector<long long> shared_starts(static_cast<size_t>(catalog.gene_count()), 0);
  if (opts.model == OverlapModel::SharedPrefix) {
    for (int g = 0; g < catalog.gene_count(); ++g) {
      int min_len = catalog.length(catalog.gene_begin(g));
      for (int t = catalog.gene_begin(g); t < catalog.gene_end(g); ++t)
        min_len = std::min(min_len, catalog.length(t));
      shared_starts[static_cast<size_t>(g)] = static_cast<long long>(
          std::floor(opts.ambiguity * static_cast<double>(min_len - opts.read_length + 1)));
    }
  }

  std::vector<long long> read_serial(static_cast<size_t>(catalog.gene_count()), 0);
  std::vector<double> origin_weight;
  for (long long r = 0; r < opts.total_reads; ++r) {
    int g = gene_pick(rng);
    const int b = catalog.gene_begin(g), e = catalog.gene_end(g);
    const int K = e - b;

    origin_weight.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k)
      origin_weight[static_cast<size_t>(k)] =
          truth.pi[static_cast<size_t>(b + k)] *
          static_cast<double>(catalog.length(b + k) - opts.read_length + 1);
    std::discrete_distribution<int> origin_pick(origin_weight.begin(), origin_weight.end());
    int origin = origin_pick(rng);

    long long positions = catalog.length(b + origin) - opts.read_length + 1;
    std::uniform_int_distribution<long long> start(1, positions);
    bool shared = opts.model == OverlapModel::SharedPrefix && K > 1 &&
                  start(rng) <= shared_starts[static_cast<size_t>(g)];

    ReadCompat read;
    read.read_id = catalog.gene_id(g) + ":r" +
                   std::to_string(read_serial[static_cast<size_t>(g)]++);
    if (shared) {
      for (int k = 0; k < K; ++k)
        read.compat.push_back(
            {k, 1.0 / static_cast<double>(catalog.length(b + k) - opts.read_length + 1)});
    } else {
      read.compat.push_back(
          {origin, 1.0 / static_cast<double>(catalog.length(b + origin) - opts.read_length + 1)});
    }
    compat.add_read(g, std::move(read));
  }
  return compat;
}

}  // namespace netrstq
