#include "netrstq/regalt.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "netrstq/common.hpp"
#include "netrstq/em.hpp"
#include "netrstq/transforms.hpp"

namespace netrstq {

PenaltyOperators make_penalty_operators(const TranscriptCatalog& catalog,
                                        const CompatibilitySet& compat,
                                        const TranscriptNetwork& network) {
  network.validate_against(catalog);
  if (compat.gene_count() != catalog.gene_count())
    throw ValidationError("compatibility set does not match the catalog");
  const int T = catalog.transcript_count();

  std::vector<std::vector<int>> adj(static_cast<size_t>(T));
  for (size_t u = 0; u < network.node_count(); ++u) {
    int t = catalog.find_transcript(network.node_id(static_cast<int>(u)));
    for (int v : network.neighbors(static_cast<int>(u)))
      adj[static_cast<size_t>(t)].push_back(catalog.find_transcript(network.node_id(v)));
    std::sort(adj[static_cast<size_t>(t)].begin(), adj[static_cast<size_t>(t)].end());
  }

  PenaltyOperators ops;
  ops.a_diag.resize(static_cast<size_t>(T));
  ops.w_offset.assign(static_cast<size_t>(T) + 1, 0);
  for (int t = 0; t < T; ++t) {
    double reads = static_cast<double>(compat.reads(catalog.gene_of(t)).size());
    ops.a_diag[static_cast<size_t>(t)] = reads / static_cast<double>(catalog.length(t));
    const auto& nbs = adj[static_cast<size_t>(t)];
    for (int u : nbs) {
      double reads_u = static_cast<double>(compat.reads(catalog.gene_of(u)).size());
      ops.w_col.push_back(u);
      ops.w_val.push_back(reads_u / (static_cast<double>(nbs.size()) *
                                     static_cast<double>(catalog.length(u))));
    }
    ops.w_offset[static_cast<size_t>(t) + 1] = static_cast<int>(ops.w_col.size());
  }
  return ops;
}

namespace {

void residual(std::span<const double> p, const PenaltyOperators& ops, std::vector<double>& res) {
  const size_t T = ops.a_diag.size();
  res.resize(T);
  for (size_t t = 0; t < T; ++t) {
    double r = ops.a_diag[t] * p[t];
    for (int e = ops.w_offset[t]; e < ops.w_offset[t + 1]; ++e)
      r -= ops.w_val[static_cast<size_t>(e)] * p[static_cast<size_t>(ops.w_col[static_cast<size_t>(e)])];
    res[t] = r;
  }
}

}  // namespace

double penalty(std::span<const double> p, const PenaltyOperators& ops) {
  if (p.size() != ops.a_diag.size()) throw ValidationError("penalty operand size mismatch");
  std::vector<double> res;
  residual(p, ops, res);
  double psi = 0.0;
  for (double r : res) psi += r * r;
  return psi;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double theta = 0.0;
  int support = 0;
  for (size_t j = 0; j < sorted.size(); ++j) {
    running += sorted[j];
    double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) {
      theta = candidate;
      support = static_cast<int>(j + 1);
    }
  }
  (void)support;
  std::vector<double> out(v.size());
  for (size_t k = 0; k < v.size(); ++k) out[k] = std::max(v[k] - theta, 0.0);
  return out;
}

QuantState solve_penalized(const TranscriptCatalog& catalog, const CompatibilitySet& compat,
                           const TranscriptNetwork& network, const RegAltOptions& opts) {
  if (opts.lambda_reg < 0.0) throw ValidationError("lambda_reg must be >= 0");
  PenaltyOperators ops = make_penalty_operators(catalog, compat, network);

  const int N = catalog.gene_count();
  const int T = catalog.transcript_count();
  std::vector<std::vector<CompatClass>> classes(static_cast<size_t>(N));
  for (int g = 0; g < N; ++g) classes[static_cast<size_t>(g)] = collapse_reads(compat.reads(g));

  std::vector<double> p(static_cast<size_t>(T));
  for (int g = 0; g < N; ++g) {
    double u = 1.0 / static_cast<double>(catalog.gene_size(g));
    std::fill(p.begin() + catalog.gene_begin(g), p.begin() + catalog.gene_end(g), u);
  }

  auto objective = [&](std::span<const double> pv) {
    double obj = -opts.lambda_reg * penalty(pv, ops);
    for (int g = 0; g < N; ++g)
      obj += read_log_likelihood(pv.subspan(static_cast<size_t>(catalog.gene_begin(g)),
                                            static_cast<size_t>(catalog.gene_size(g))),
                                 classes[static_cast<size_t>(g)]);
    return obj;
  };

  std::vector<double> grad(static_cast<size_t>(T)), res, cand(static_cast<size_t>(T));
  double obj = objective(p);
  double step = opts.init_step;
  bool converged = false, stalled = false;
  int iterations = 0;
  std::vector<double> trajectory{obj};

  for (int it = 0; it < opts.max_iter; ++it) {
    iterations = it + 1;
    // Gradient of the read log-likelihood, per gene block.
    std::fill(grad.begin(), grad.end(), 0.0);
    for (int g = 0; g < N; ++g) {
      const int b = catalog.gene_begin(g);
      for (const CompatClass& c : classes[static_cast<size_t>(g)]) {
        double denom = 0.0;
        for (const CompatEntry& e : c.compat) denom += p[static_cast<size_t>(b + e.k)] * e.q;
        if (denom <= 0.0) throw NumericalError("zero-probability read class in gene '" +
                                               catalog.gene_id(g) + "'");
        double scale = c.count / denom;
        for (const CompatEntry& e : c.compat) grad[static_cast<size_t>(b + e.k)] += e.q * scale;
      }
    }
    // Minus the penalty gradient 2 * lambda * (A - W)^T (A - W) p. The graph
    // is symmetric, so column t of W is indexed by t's own neighbor rows.
    if (opts.lambda_reg > 0.0) {
      residual(p, ops, res);
      for (int t = 0; t < T; ++t) {
        double acc = ops.a_diag[static_cast<size_t>(t)] * res[static_cast<size_t>(t)];
        for (int e = ops.w_offset[static_cast<size_t>(t)]; e < ops.w_offset[static_cast<size_t>(t) + 1]; ++e) {
          int u = ops.w_col[static_cast<size_t>(e)];
          int deg_u = ops.w_offset[static_cast<size_t>(u) + 1] - ops.w_offset[static_cast<size_t>(u)];
          // W_ut = |r_g(t)| / (|nb(u)| l_t) = A_tt / |nb(u)|
          acc -= ops.a_diag[static_cast<size_t>(t)] / static_cast<double>(deg_u) *
                 res[static_cast<size_t>(u)];
        }
        grad[static_cast<size_t>(t)] -= 2.0 * opts.lambda_reg * acc;
      }
    }

    // Backtracking projected ascent step.
    double eta = step;
    bool accepted = false;
    while (true) {
      double delta = 0.0;
      for (int g = 0; g < N; ++g) {
        const int b = catalog.gene_begin(g);
        const int K = catalog.gene_size(g);
        std::vector<double> block(static_cast<size_t>(K));
        for (int k = 0; k < K; ++k)
          block[static_cast<size_t>(k)] = p[static_cast<size_t>(b + k)] +
                                          eta * grad[static_cast<size_t>(b + k)];
        std::vector<double> proj = project_to_simplex(block);
        for (int k = 0; k < K; ++k) {
          cand[static_cast<size_t>(b + k)] = proj[static_cast<size_t>(k)];
          delta = std::max(delta, std::abs(proj[static_cast<size_t>(k)] - p[static_cast<size_t>(b + k)]));
        }
      }
      double cand_obj = objective(cand);
      if (cand_obj > obj) {
        p = cand;
#ifndef NDEBUG
        assert(cand_obj >= obj - 1e-10 && "penalized objective decreased");
#endif
        obj = cand_obj;
        trajectory.push_back(obj);
        step = eta * 2.0;
        accepted = true;
        if (delta < opts.tol) converged = true;
        break;
      }
      if (delta < opts.tol) {
        // No ascent available and the projected move is already below
        // tolerance: numerical fixed point.
        converged = true;
        break;
      }
      eta *= 0.5;
      if (eta < 1e-18) {
        stalled = true;
        break;
      }
    }
    if (converged || stalled || !accepted) break;
  }

  QuantState out;
  out.lambda = opts.lambda_reg;
  out.converged = converged;
  out.stalled = stalled;
  out.rounds = iterations;
  out.loglik_trajectory = std::move(trajectory);
  out.phi.assign(static_cast<size_t>(T), 0.0);
  out.no_data.assign(static_cast<size_t>(N), 0);
  out.accepted_updates.assign(static_cast<size_t>(N), 0);
  out.p.resize(static_cast<size_t>(N));
  out.rho.resize(static_cast<size_t>(N));
  out.pi.resize(static_cast<size_t>(N));
  for (int g = 0; g < N; ++g) {
    const int b = catalog.gene_begin(g), e = catalog.gene_end(g);
    std::vector<double> block(p.begin() + b, p.begin() + e);
    auto lens = catalog.lengths().subspan(static_cast<size_t>(b), static_cast<size_t>(e - b));
    double reads = static_cast<double>(compat.reads(g).size());
    out.pi[static_cast<size_t>(g)] = expressions(block, reads, lens);
    out.rho[static_cast<size_t>(g)] = relative_abundance(block, lens);
    out.no_data[static_cast<size_t>(g)] = reads == 0.0 ? 1 : 0;
    out.p[static_cast<size_t>(g)] = std::move(block);
  }
  return out;
}

}  // namespace netrstq
