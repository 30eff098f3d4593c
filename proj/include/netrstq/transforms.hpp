#pragma once

#include <span>
#include <vector>

#include "netrstq/types.hpp"

namespace netrstq {

// rho_k = (p_k/l_k) / sum_q (p_q/l_q). Output sums to 1.
// Throws NumericalError on an all-zero p ("degenerate probability vector").
std::vector<double> relative_abundance(std::span<const double> p, std::span<const int> lengths);

// pi_k = read_count * p_k / l_k.
std::vector<double> expressions(std::span<const double> p, double read_count,
                                std::span<const int> lengths);

// Prior read count of one transcript: its length times the average expression
// of its network neighbors; 0 when it has no neighbors. pi_all is indexed by
// catalog global transcript index.
double compute_phi(const std::string& transcript_id, const TranscriptNetwork& net,
                   const TranscriptCatalog& catalog, std::span<const double> pi_all);

}  // namespace netrstq
