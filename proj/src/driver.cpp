#include "netrstq/driver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netrstq/common.hpp"
#include "netrstq/transforms.hpp"

namespace netrstq {

namespace {

// Catalog + network flattened to index arrays, plus the mutable sweep state.
struct Workspace {
  int n_genes = 0;
  int n_transcripts = 0;
  double lambda = 0.0;
  std::span<const int> lengths;
  std::span<const int> gene_offset;
  std::vector<int> adj_offset;  // CSR adjacency over global transcript indices
  std::vector<int> adj;
  std::vector<int> nb_gene_offset;  // per gene: neighbor genes (CSR)
  std::vector<int> nb_genes;
  std::vector<double> gene_reads;
  std::vector<std::vector<CompatClass>> classes;

  std::vector<double> p;      // concatenated per-gene simplex blocks
  std::vector<double> pi;     // expressions
  std::vector<double> nbsum;  // per transcript: sum of pi over its neighbors

  std::span<double> gene_p(int g) {
    return std::span<double>(p).subspan(static_cast<size_t>(gene_offset[static_cast<size_t>(g)]),
                                        static_cast<size_t>(gene_offset[static_cast<size_t>(g) + 1] -
                                                            gene_offset[static_cast<size_t>(g)]));
  }

  int degree(int t) const { return adj_offset[static_cast<size_t>(t) + 1] - adj_offset[static_cast<size_t>(t)]; }

  double phi_of(int t) const {
    int deg = degree(t);
    if (deg == 0) return 0.0;
    return static_cast<double>(lengths[static_cast<size_t>(t)]) *
           (std::max(nbsum[static_cast<size_t>(t)], 0.0) / static_cast<double>(deg));
  }

  void gene_phi(int g, std::vector<double>& out) const {
    int b = gene_offset[static_cast<size_t>(g)];
    int e = gene_offset[static_cast<size_t>(g) + 1];
    out.resize(static_cast<size_t>(e - b));
    for (int t = b; t < e; ++t) out[static_cast<size_t>(t - b)] = phi_of(t);
  }

  // Recompute pi for gene g from its current p block and update neighbor sums.
  void refresh_gene_pi(int g) {
    int b = gene_offset[static_cast<size_t>(g)];
    int e = gene_offset[static_cast<size_t>(g) + 1];
    for (int t = b; t < e; ++t) {
      double fresh = gene_reads[static_cast<size_t>(g)] * p[static_cast<size_t>(t)] /
                     static_cast<double>(lengths[static_cast<size_t>(t)]);
      double d = fresh - pi[static_cast<size_t>(t)];
      if (d != 0.0) {
        for (int a = adj_offset[static_cast<size_t>(t)]; a < adj_offset[static_cast<size_t>(t) + 1]; ++a)
          nbsum[static_cast<size_t>(adj[static_cast<size_t>(a)])] += d;
        pi[static_cast<size_t>(t)] = fresh;
      }
    }
  }

  NeighborContext context(int g) const {
    NeighborContext ctx;
    ctx.gene = g;
    ctx.nb_genes = std::span<const int>(nb_genes).subspan(
        static_cast<size_t>(nb_gene_offset[static_cast<size_t>(g)]),
        static_cast<size_t>(nb_gene_offset[static_cast<size_t>(g) + 1] -
                            nb_gene_offset[static_cast<size_t>(g)]));
    ctx.lengths = lengths;
    ctx.gene_offset = gene_offset;
    ctx.adj_offset = adj_offset;
    ctx.adj = adj;
    ctx.p_all = p;
    ctx.pi = pi;
    ctx.neighbor_pi_sum = nbsum;
    ctx.gene_reads = gene_reads;
    ctx.lambda = lambda;
    return ctx;
  }
};

Workspace build_workspace(const TranscriptCatalog& catalog, const CompatibilitySet& compat,
                          const TranscriptNetwork& network, double lambda) {
  network.validate_against(catalog);
  if (compat.gene_count() != catalog.gene_count())
    throw ValidationError("compatibility set does not match the catalog");

  Workspace w;
  w.n_genes = catalog.gene_count();
  w.n_transcripts = catalog.transcript_count();
  w.lambda = lambda;
  w.lengths = catalog.lengths();
  w.gene_offset = catalog.gene_offsets();

  // Adjacency in catalog index space.
  std::vector<std::vector<int>> adj(static_cast<size_t>(w.n_transcripts));
  for (size_t node = 0; node < network.node_count(); ++node) {
    int t = catalog.find_transcript(network.node_id(static_cast<int>(node)));
    for (int v : network.neighbors(static_cast<int>(node)))
      adj[static_cast<size_t>(t)].push_back(catalog.find_transcript(network.node_id(v)));
  }
  w.adj_offset.assign(static_cast<size_t>(w.n_transcripts) + 1, 0);
  size_t total = 0;
  for (int t = 0; t < w.n_transcripts; ++t) {
    std::sort(adj[static_cast<size_t>(t)].begin(), adj[static_cast<size_t>(t)].end());
    total += adj[static_cast<size_t>(t)].size();
    w.adj_offset[static_cast<size_t>(t) + 1] = static_cast<int>(total);
  }
  w.adj.reserve(total);
  for (int t = 0; t < w.n_transcripts; ++t)
    w.adj.insert(w.adj.end(), adj[static_cast<size_t>(t)].begin(), adj[static_cast<size_t>(t)].end());

  // Neighbor genes per gene.
  w.nb_gene_offset.assign(static_cast<size_t>(w.n_genes) + 1, 0);
  std::vector<int> scratch;
  for (int g = 0; g < w.n_genes; ++g) {
    scratch.clear();
    for (int t = catalog.gene_begin(g); t < catalog.gene_end(g); ++t)
      for (int a = w.adj_offset[static_cast<size_t>(t)]; a < w.adj_offset[static_cast<size_t>(t) + 1]; ++a)
        scratch.push_back(catalog.gene_of(w.adj[static_cast<size_t>(a)]));
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    w.nb_genes.insert(w.nb_genes.end(), scratch.begin(), scratch.end());
    w.nb_gene_offset[static_cast<size_t>(g) + 1] = static_cast<int>(w.nb_genes.size());
  }

  w.gene_reads.resize(static_cast<size_t>(w.n_genes));
  w.classes.resize(static_cast<size_t>(w.n_genes));
  for (int g = 0; g < w.n_genes; ++g) {
    w.gene_reads[static_cast<size_t>(g)] = static_cast<double>(compat.reads(g).size());
    w.classes[static_cast<size_t>(g)] = collapse_reads(compat.reads(g));
  }

  w.p.assign(static_cast<size_t>(w.n_transcripts), 0.0);
  w.pi.assign(static_cast<size_t>(w.n_transcripts), 0.0);
  w.nbsum.assign(static_cast<size_t>(w.n_transcripts), 0.0);
  return w;
}

void rebuild_pi_and_sums(Workspace& w) {
  for (int g = 0; g < w.n_genes; ++g) {
    int b = w.gene_offset[static_cast<size_t>(g)];
    int e = w.gene_offset[static_cast<size_t>(g) + 1];
    for (int t = b; t < e; ++t)
      w.pi[static_cast<size_t>(t)] = w.gene_reads[static_cast<size_t>(g)] *
                                     w.p[static_cast<size_t>(t)] /
                                     static_cast<double>(w.lengths[static_cast<size_t>(t)]);
  }
  for (int t = 0; t < w.n_transcripts; ++t) {
    double s = 0.0;
    for (int a = w.adj_offset[static_cast<size_t>(t)]; a < w.adj_offset[static_cast<size_t>(t) + 1]; ++a)
      s += w.pi[static_cast<size_t>(w.adj[static_cast<size_t>(a)])];
    w.nbsum[static_cast<size_t>(t)] = s;
  }
}

QuantState finalize_state(const TranscriptCatalog& catalog, Workspace& w, double lambda) {
  QuantState out;
  out.lambda = lambda;
  int n = catalog.gene_count();
  out.p.resize(static_cast<size_t>(n));
  out.rho.resize(static_cast<size_t>(n));
  out.pi.resize(static_cast<size_t>(n));
  out.no_data.assign(static_cast<size_t>(n), 0);
  out.accepted_updates.assign(static_cast<size_t>(n), 0);
  out.phi.resize(static_cast<size_t>(w.n_transcripts));
  for (int t = 0; t < w.n_transcripts; ++t) out.phi[static_cast<size_t>(t)] = w.phi_of(t);
  for (int g = 0; g < n; ++g) {
    int b = catalog.gene_begin(g), e = catalog.gene_end(g);
    std::vector<double> pg(w.p.begin() + b, w.p.begin() + e);
    std::span<const int> lens = catalog.lengths().subspan(static_cast<size_t>(b), static_cast<size_t>(e - b));
    out.pi[static_cast<size_t>(g)] = expressions(pg, w.gene_reads[static_cast<size_t>(g)], lens);
    out.rho[static_cast<size_t>(g)] = relative_abundance(pg, lens);
    out.no_data[static_cast<size_t>(g)] = w.gene_reads[static_cast<size_t>(g)] == 0.0 ? 1 : 0;
    out.p[static_cast<size_t>(g)] = std::move(pg);
  }
  return out;
}

}  // namespace

QuantState base_em_quant(const TranscriptCatalog& catalog, const CompatibilitySet& compat,
                         const EmOptions& opts) {
  TranscriptNetwork empty;
  Workspace w = build_workspace(catalog, compat, empty, 0.0);
  for (int g = 0; g < w.n_genes; ++g) {
    EmResult r = prior_em_classes(w.classes[static_cast<size_t>(g)],
                                  std::vector<double>(static_cast<size_t>(catalog.gene_size(g)), 0.0),
                                  0.0, opts);
    std::copy(r.p.begin(), r.p.end(), w.p.begin() + catalog.gene_begin(g));
  }
  rebuild_pi_and_sums(w);
  QuantState out = finalize_state(catalog, w, 0.0);
  out.converged = true;
  out.rounds = 1;
  return out;
}

QuantState net_rstq(const TranscriptCatalog& catalog, const CompatibilitySet& compat,
                    const TranscriptNetwork& network, const NetRstqOptions& opts) {
  if (opts.lambda < 0.0) throw ValidationError("lambda must be >= 0");
  Workspace w = build_workspace(catalog, compat, network, opts.lambda);

  // Initialization.
  switch (opts.init) {
    case QuantInit::Uniform:
      for (int g = 0; g < w.n_genes; ++g) {
        auto pg = w.gene_p(g);
        std::fill(pg.begin(), pg.end(), 1.0 / static_cast<double>(pg.size()));
      }
      break;
    case QuantInit::BaseEm:
      for (int g = 0; g < w.n_genes; ++g) {
        EmResult r = prior_em_classes(w.classes[static_cast<size_t>(g)],
                                      std::vector<double>(static_cast<size_t>(catalog.gene_size(g)), 0.0),
                                      0.0, opts.inner);
        std::copy(r.p.begin(), r.p.end(), w.p.begin() + catalog.gene_begin(g));
      }
      break;
    case QuantInit::Supplied: {
      if (static_cast<int>(opts.supplied_p.size()) != w.n_genes)
        throw ValidationError("supplied initialization does not match the catalog");
      for (int g = 0; g < w.n_genes; ++g) {
        const auto& pg = opts.supplied_p[static_cast<size_t>(g)];
        if (static_cast<int>(pg.size()) != catalog.gene_size(g))
          throw ValidationError("supplied initialization block size mismatch for gene '" +
                                catalog.gene_id(g) + "'");
        std::copy(pg.begin(), pg.end(), w.p.begin() + catalog.gene_begin(g));
      }
      break;
    }
  }
  rebuild_pi_and_sums(w);

  QuantState out;
  out.lambda = opts.lambda;
  out.accepted_updates.assign(static_cast<size_t>(w.n_genes), 0);

  // Total log pseudo-likelihood at the starting point.
  std::vector<double> phi_i;
  double total_ll = 0.0;
  for (int g = 0; g < w.n_genes; ++g) {
    w.gene_phi(g, phi_i);
    total_ll += gene_log_likelihood(w.gene_p(g), w.classes[static_cast<size_t>(g)], phi_i,
                                    opts.lambda, false);
  }
  if (std::isnan(total_ll))
    throw NumericalError("non-finite starting log pseudo-likelihood");
  out.loglik_trajectory.push_back(total_ll);

  std::vector<int> order(static_cast<size_t>(w.n_genes));
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> p_prev;
  for (int round = 1; round <= opts.max_rounds; ++round) {
    p_prev = w.p;
    if (opts.shuffle_gene_order) {
      std::mt19937_64 rng(opts.seed + static_cast<uint64_t>(round));
      std::shuffle(order.begin(), order.end(), rng);
    }
    for (int gi = 0; gi < w.n_genes; ++gi) {
      int g = order[static_cast<size_t>(gi)];
      w.gene_phi(g, phi_i);
      auto pg = w.gene_p(g);
      EmResult cand = prior_em_classes(w.classes[static_cast<size_t>(g)], phi_i, opts.lambda,
                                       opts.inner, pg);

      NeighborContext ctx = w.context(g);
      double lbar_cur = gene_log_likelihood(pg, w.classes[static_cast<size_t>(g)], phi_i,
                                            opts.lambda, false) +
                        ctx.neighbor_prior_log({});
      double lbar_cand = gene_log_likelihood(cand.p, w.classes[static_cast<size_t>(g)], phi_i,
                                             opts.lambda, false) +
                         ctx.neighbor_prior_log(cand.p);
      if (std::isnan(lbar_cur) || std::isnan(lbar_cand))
        throw NumericalError("non-finite likelihood while updating gene '" + catalog.gene_id(g) + "'");

      double gain = 0.0;
      if (lbar_cand > lbar_cur) {  // strict increase, zero slack
        std::copy(cand.p.begin(), cand.p.end(), pg.begin());
        w.refresh_gene_pi(g);
        ++out.accepted_updates[static_cast<size_t>(g)];
        gain = lbar_cand - lbar_cur;
        if (std::isinf(gain)) {
          // Climbed out of a -inf start; rebuild the total from scratch.
          total_ll = 0.0;
          std::vector<double> phi_g;
          for (int h = 0; h < w.n_genes; ++h) {
            w.gene_phi(h, phi_g);
            total_ll += gene_log_likelihood(w.gene_p(h), w.classes[static_cast<size_t>(h)], phi_g,
                                            opts.lambda, false);
          }
        } else {
          total_ll += gain;
        }
      }
      out.loglik_trajectory.push_back(total_ll);
      if (opts.progress) opts.progress(g, round, gain);
    }
    out.rounds = round;
    double delta = 0.0;
    for (size_t t = 0; t < w.p.size(); ++t)
      delta = std::max(delta, std::abs(w.p[t] - p_prev[t]));
    if (delta < opts.outer_tol) {
      out.converged = true;
      break;
    }
  }

  QuantState final_state = finalize_state(catalog, w, opts.lambda);
  final_state.accepted_updates = std::move(out.accepted_updates);
  final_state.loglik_trajectory = std::move(out.loglik_trajectory);
  final_state.rounds = out.rounds;
  final_state.converged = out.converged;
  return final_state;
}

}  // namespace netrstq
