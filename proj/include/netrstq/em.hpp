#pragma once

#include <span>
#include <vector>

#include "netrstq/types.hpp"

namespace netrstq {

struct EmOptions {
  double tol = 1e-8;   // on max |delta p|
  int max_iter = 1000;
};

struct EmResult {
  std::vector<double> p;
  int iterations = 0;
  bool converged = false;
  bool no_data = false;            // zero reads
  std::vector<double> objective;   // log objective at each iterate, including the last
};

// Reads collapsed by compatibility signature; identical likelihood, large speedup.
struct CompatClass {
  std::vector<CompatEntry> compat;
  double count = 0.0;
};

std::vector<CompatClass> collapse_reads(const std::vector<ReadCompat>& reads);

// log Dirichlet density: log C(alpha) + sum_k (alpha_k - 1) log p_k, with
// log C = lgamma(sum alpha) - sum lgamma(alpha_k). Terms with alpha_k = 1
// contribute 0 even when p_k = 0; p_k = 0 with alpha_k > 1 yields -inf.
double log_dirichlet_prior(std::span<const double> p, std::span<const double> alpha);

// sum_j log sum_k p_k q_jk (the log of the per-gene read likelihood).
double read_log_likelihood(std::span<const double> p, const std::vector<ReadCompat>& reads);
double read_log_likelihood(std::span<const double> p, const std::vector<CompatClass>& classes);

// Soft read assignments a_jk = p_k q_jk / sum_k p_k q_jk, dense rows summing to 1.
// Throws NumericalError("read orphaned by zero probabilities") when a read's
// whole compatibility set has zero probability.
std::vector<std::vector<double>> prior_e_step(std::span<const double> p,
                                              const std::vector<ReadCompat>& reads);

// p_k = (lambda phi_k + sum_j a_jk) / sum_k (lambda phi_k + sum_j a_jk).
std::vector<double> prior_m_step(const std::vector<std::vector<double>>& responsibilities,
                                 std::span<const double> phi, double lambda);

// Maximizes the uncommitted read likelihood of one gene. Zero reads: uniform
// vector with no_data set.
EmResult base_em(const std::vector<ReadCompat>& reads, int n_transcripts,
                 const EmOptions& opts = {});

// Maximizes the read likelihood with the Dirichlet prior parameterized by
// lambda*phi + 1. Zero reads: the prior mode, i.e. phi normalized (uniform when
// the prior mass is zero), with no_data set.
EmResult prior_em(const std::vector<ReadCompat>& reads, std::span<const double> phi,
                  double lambda, const EmOptions& opts = {});

// Class-level variant with an optional warm start (empty = uniform).
EmResult prior_em_classes(const std::vector<CompatClass>& classes, std::span<const double> phi,
                          double lambda, const EmOptions& opts = {},
                          std::span<const double> warm_start = {});

// Views into a sweep workspace needed to re-evaluate the Dirichlet priors of
// the genes neighboring gene `gene` when its candidate P changes their prior
// read counts. All spans are indexed by catalog global transcript index unless
// noted. neighbor_pi_sum[t] caches the sum of pi over t's network neighbors.
struct NeighborContext {
  int gene = -1;
  std::span<const int> nb_genes;         // genes with a transcript adjacent to this gene's, sorted
  std::span<const int> lengths;
  std::span<const int> gene_offset;      // size N+1
  std::span<const int> adj_offset;       // CSR over transcripts, size T+1
  std::span<const int> adj;              // neighbor transcript indices
  std::span<const double> p_all;         // current concatenated P
  std::span<const double> pi;            // current expressions
  std::span<const double> neighbor_pi_sum;
  std::span<const double> gene_reads;    // |r_g| per gene
  double lambda = 0.0;

  // Sum over g in nb_genes of log Dirichlet(P_g; lambda*phi_g + 1) with phi_g
  // recomputed under candidate proportions p_i for `gene` (empty = current P).
  double neighbor_prior_log(std::span<const double> p_i_candidate) const;
};

// Log of the single-gene posterior term: log Dirichlet(P_i; lambda*phi_i + 1)
// plus the read log-likelihood. With include_neighbor_priors set, adds the
// neighbor genes' Dirichlet terms with their prior read counts recomputed as a
// function of the candidate P_i; this is the quantity the sweep's acceptance
// guard compares. -inf may propagate; NaN raises NumericalError.
double gene_log_likelihood(std::span<const double> p_i, const std::vector<ReadCompat>& reads,
                           std::span<const double> phi_i, double lambda,
                           bool include_neighbor_priors, const NeighborContext* ctx = nullptr);
double gene_log_likelihood(std::span<const double> p_i, const std::vector<CompatClass>& classes,
                           std::span<const double> phi_i, double lambda,
                           bool include_neighbor_priors, const NeighborContext* ctx = nullptr);

}  // namespace netrstq
