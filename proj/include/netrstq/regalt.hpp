#pragma once

#include <span>
#include <vector>

#include "netrstq/types.hpp"

namespace netrstq {

// Operators of the quadratic network penalty over concatenated proportions:
// A is diagonal with A_tt = |r_g(t)| / l_t; W has row pattern equal to the
// network adjacency with W_tu = |r_g(u)| / (|nb(t)| * l_u). The residual
// (A - W)P is, per transcript, its expression minus its neighbors' mean.
struct PenaltyOperators {
  std::vector<double> a_diag;
  std::vector<int> w_offset;  // CSR, size T+1
  std::vector<int> w_col;
  std::vector<double> w_val;
};

PenaltyOperators make_penalty_operators(const TranscriptCatalog& catalog,
                                        const CompatibilitySet& compat,
                                        const TranscriptNetwork& network);

// Psi(P) = || A P - W P ||^2.
double penalty(std::span<const double> p, const PenaltyOperators& ops);

// Euclidean projection onto the probability simplex (sort-and-threshold).
std::vector<double> project_to_simplex(std::span<const double> v);

struct RegAltOptions {
  double lambda_reg = 1.0;
  double tol = 1e-6;     // on max |delta p| per accepted step
  int max_iter = 2000;
  double init_step = 1.0;
};

// Maximizes sum_g log L(P_g; r_g) - lambda_reg * Psi(P) by projected gradient
// ascent over the per-gene simplex blocks with backtracking step halving.
// Returns best-so-far with `stalled` set when the step size underflows.
QuantState solve_penalized(const TranscriptCatalog& catalog, const CompatibilitySet& compat,
                           const TranscriptNetwork& network, const RegAltOptions& opts);

}  // namespace netrstq
