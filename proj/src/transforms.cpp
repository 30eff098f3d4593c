#include "netrstq/transforms.hpp"

#include "netrstq/common.hpp"

namespace netrstq {

std::vector<double> relative_abundance(std::span<const double> p, std::span<const int> lengths) {
  if (p.size() != lengths.size()) throw ValidationError("probability/length size mismatch");
  std::vector<double> rho(p.size());
  double total = 0.0;
  for (size_t k = 0; k < p.size(); ++k) {
    rho[k] = p[k] / lengths[k];
    total += rho[k];
  }
  if (total <= 0.0) throw NumericalError("degenerate probability vector");
  for (double& r : rho) r /= total;
  return rho;
}

std::vector<double> expressions(std::span<const double> p, double read_count,
                                std::span<const int> lengths) {
  if (p.size() != lengths.size()) throw ValidationError("probability/length size mismatch");
  std::vector<double> pi(p.size());
  for (size_t k = 0; k < p.size(); ++k) pi[k] = read_count * p[k] / lengths[k];
  return pi;
}

double compute_phi(const std::string& transcript_id, const TranscriptNetwork& net,
                   const TranscriptCatalog& catalog, std::span<const double> pi_all) {
  int t = catalog.find_transcript(transcript_id);
  if (t < 0) throw ValidationError("unknown transcript '" + transcript_id + "'");
  int node = net.node_index(transcript_id);
  if (node < 0) return 0.0;  // not in the network: no neighbors
  auto nbs = net.neighbors(node);
  if (nbs.empty()) return 0.0;
  double sum = 0.0;
  for (int v : nbs) {
    int u = catalog.find_transcript(net.node_id(v));
    if (u < 0) throw ValidationError("network node '" + net.node_id(v) + "' is not a catalog transcript");
    sum += pi_all[static_cast<size_t>(u)];
  }
  return catalog.length(t) * (sum / static_cast<double>(nbs.size()));
}

}  // namespace netrstq
