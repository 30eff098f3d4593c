#include "netrstq/em.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include "netrstq/common.hpp"

namespace netrstq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_finite_or_neginf(double v, const char* what) {
  if (std::isnan(v)) throw NumericalError(std::string(what) + " is NaN");
}

}  // namespace

std::vector<CompatClass> collapse_reads(const std::vector<ReadCompat>& reads) {
  // Signature = the exact (k, q) sequence; compat lists are sorted by k.
  std::map<std::vector<std::pair<int, double>>, double> buckets;
  std::vector<std::pair<int, double>> sig;
  for (const ReadCompat& r : reads) {
    sig.clear();
    for (const CompatEntry& e : r.compat) sig.emplace_back(e.k, e.q);
    buckets[sig] += 1.0;
  }
  std::vector<CompatClass> classes;
  classes.reserve(buckets.size());
  for (const auto& [key, count] : buckets) {
    CompatClass c;
    c.count = count;
    c.compat.reserve(key.size());
    for (const auto& [k, q] : key) c.compat.push_back({k, q});
    classes.push_back(std::move(c));
  }
  return classes;
}

double log_dirichlet_prior(std::span<const double> p, std::span<const double> alpha) {
  if (p.size() != alpha.size()) throw ValidationError("p/alpha size mismatch");
  double alpha_sum = 0.0;
  double log_c = 0.0;
  double kernel = 0.0;
  for (size_t k = 0; k < alpha.size(); ++k) {
    alpha_sum += alpha[k];
    log_c -= std::lgamma(alpha[k]);
    double a1 = alpha[k] - 1.0;
    if (a1 != 0.0) {
      if (p[k] <= 0.0) return kNegInf;  // valid log-density limit
      kernel += a1 * std::log(p[k]);
    }
  }
  return std::lgamma(alpha_sum) + log_c + kernel;
}

double read_log_likelihood(std::span<const double> p, const std::vector<ReadCompat>& reads) {
  double ll = 0.0;
  for (const ReadCompat& r : reads) {
    double denom = 0.0;
    for (const CompatEntry& e : r.compat) denom += p[static_cast<size_t>(e.k)] * e.q;
    ll += std::log(denom);  // log(0) = -inf is a valid limit
  }
  return ll;
}

double read_log_likelihood(std::span<const double> p, const std::vector<CompatClass>& classes) {
  double ll = 0.0;
  for (const CompatClass& c : classes) {
    double denom = 0.0;
    for (const CompatEntry& e : c.compat) denom += p[static_cast<size_t>(e.k)] * e.q;
    ll += c.count * std::log(denom);
  }
  return ll;
}

std::vector<std::vector<double>> prior_e_step(std::span<const double> p,
                                              const std::vector<ReadCompat>& reads) {
  std::vector<std::vector<double>> resp(reads.size(), std::vector<double>(p.size(), 0.0));
  for (size_t j = 0; j < reads.size(); ++j) {
    double denom = 0.0;
    for (const CompatEntry& e : reads[j].compat) denom += p[static_cast<size_t>(e.k)] * e.q;
    if (denom <= 0.0)
      throw NumericalError("read orphaned by zero probabilities: '" + reads[j].read_id + "'");
    for (const CompatEntry& e : reads[j].compat)
      resp[j][static_cast<size_t>(e.k)] = p[static_cast<size_t>(e.k)] * e.q / denom;
  }
  return resp;
}

std::vector<double> prior_m_step(const std::vector<std::vector<double>>& responsibilities,
                                 std::span<const double> phi, double lambda) {
  std::vector<double> p(phi.size(), 0.0);
  for (size_t k = 0; k < phi.size(); ++k) p[k] = lambda * phi[k];
  for (const auto& row : responsibilities) {
    if (row.size() != phi.size()) throw ValidationError("responsibility row size mismatch");
    for (size_t k = 0; k < row.size(); ++k) p[k] += row[k];
  }
  double total = 0.0;
  for (double v : p) total += v;
  if (total <= 0.0) throw NumericalError("all-zero M-step numerators");
  for (double& v : p) v /= total;
  return p;
}

namespace {

// Shared EM loop over collapsed classes. phi may be empty (treated as zeros).
EmResult run_em(const std::vector<CompatClass>& classes, int n_transcripts,
                std::span<const double> phi, double lambda, const EmOptions& opts,
                std::span<const double> warm_start) {
  const size_t K = static_cast<size_t>(n_transcripts);
  EmResult out;

  double prior_mass = 0.0;
  std::vector<double> lphi(K, 0.0);
  for (size_t k = 0; k < K && k < phi.size(); ++k) {
    lphi[k] = lambda * phi[k];
    prior_mass += lphi[k];
  }

  if (classes.empty()) {
    out.no_data = true;
    out.converged = true;
    out.p.assign(K, 1.0 / static_cast<double>(K));
    if (prior_mass > 0.0 && phi.size() == K) {
      // Prior mode: phi normalized, exactly (lambda cancels).
      double phi_sum = 0.0;
      for (size_t k = 0; k < K; ++k) phi_sum += phi[k];
      for (size_t k = 0; k < K; ++k) out.p[k] = phi[k] / phi_sum;
    }
    return out;
  }

  // alpha = lambda*phi + 1; its log normalizer is constant across iterations.
  double log_c = std::lgamma(prior_mass + static_cast<double>(K));
  for (size_t k = 0; k < K; ++k) log_c -= std::lgamma(lphi[k] + 1.0);

  std::vector<double> p(K, 1.0 / static_cast<double>(K));
  if (!warm_start.empty()) {
    if (warm_start.size() != K) throw ValidationError("warm start size mismatch");
    p.assign(warm_start.begin(), warm_start.end());
  }

  auto objective_at = [&](std::span<const double> pv) {
    double obj = log_c;
    for (size_t k = 0; k < K; ++k) {
      if (lphi[k] != 0.0) {
        if (pv[k] <= 0.0) return kNegInf;
        obj += lphi[k] * std::log(pv[k]);
      }
    }
    return obj + read_log_likelihood(pv, classes);
  };

  std::vector<double> next(K);
  out.objective.push_back(objective_at(p));
  for (int it = 0; it < opts.max_iter; ++it) {
    for (size_t k = 0; k < K; ++k) next[k] = lphi[k];
    for (const CompatClass& c : classes) {
      double denom = 0.0;
      for (const CompatEntry& e : c.compat) denom += p[static_cast<size_t>(e.k)] * e.q;
      if (denom <= 0.0)
        throw NumericalError("read orphaned by zero probabilities (class of " +
                             std::to_string(static_cast<long long>(c.count)) + " reads)");
      double scale = c.count / denom;
      for (const CompatEntry& e : c.compat)
        next[static_cast<size_t>(e.k)] += p[static_cast<size_t>(e.k)] * e.q * scale;
    }
    double total = 0.0;
    for (double v : next) total += v;
    double delta = 0.0;
    for (size_t k = 0; k < K; ++k) {
      next[k] /= total;
      delta = std::max(delta, std::abs(next[k] - p[k]));
    }
    if (delta < opts.tol) {
      // The step is below tolerance: keep the current iterate. A converged
      // input passes through unchanged, which makes rerunning from a fixed
      // point a no-op.
      out.converged = true;
      break;
    }
    p.swap(next);
    out.iterations = it + 1;
    double obj = objective_at(p);
#ifndef NDEBUG
    assert(obj >= out.objective.back() - (1e-10 + 1e-12 * std::abs(out.objective.back())) &&
           "EM objective decreased");
#endif
    out.objective.push_back(obj);
  }
  out.p = std::move(p);
  return out;
}

}  // namespace

EmResult base_em(const std::vector<ReadCompat>& reads, int n_transcripts, const EmOptions& opts) {
  return run_em(collapse_reads(reads), n_transcripts, {}, 0.0, opts, {});
}

EmResult prior_em(const std::vector<ReadCompat>& reads, std::span<const double> phi,
                  double lambda, const EmOptions& opts) {
  return run_em(collapse_reads(reads), static_cast<int>(phi.size()), phi, lambda, opts, {});
}

EmResult prior_em_classes(const std::vector<CompatClass>& classes, std::span<const double> phi,
                          double lambda, const EmOptions& opts,
                          std::span<const double> warm_start) {
  return run_em(classes, static_cast<int>(phi.size()), phi, lambda, opts, warm_start);
}

double NeighborContext::neighbor_prior_log(std::span<const double> p_i_candidate) const {
  const int begin = gene_offset[static_cast<size_t>(gene)];
  const int end = gene_offset[static_cast<size_t>(gene) + 1];

  // Candidate expressions of this gene's transcripts, and the resulting change
  // to the cached neighbor-pi sums. No same-gene edges, so only other genes'
  // sums can move.
  std::unordered_map<int, double> delta;
  if (!p_i_candidate.empty()) {
    double reads_i = gene_reads[static_cast<size_t>(gene)];
    for (int t = begin; t < end; ++t) {
      double cand = reads_i * p_i_candidate[static_cast<size_t>(t - begin)] /
                    static_cast<double>(lengths[static_cast<size_t>(t)]);
      double d = cand - pi[static_cast<size_t>(t)];
      if (d == 0.0) continue;
      for (int e = adj_offset[static_cast<size_t>(t)]; e < adj_offset[static_cast<size_t>(t) + 1]; ++e)
        delta[adj[static_cast<size_t>(e)]] += d;
    }
  }

  double total = 0.0;
  std::vector<double> alpha;
  for (int g : nb_genes) {
    const int gb = gene_offset[static_cast<size_t>(g)];
    const int ge = gene_offset[static_cast<size_t>(g) + 1];
    alpha.assign(static_cast<size_t>(ge - gb), 1.0);
    for (int t = gb; t < ge; ++t) {
      int deg = adj_offset[static_cast<size_t>(t) + 1] - adj_offset[static_cast<size_t>(t)];
      if (deg == 0) continue;  // phi = 0, alpha stays 1
      double sum = neighbor_pi_sum[static_cast<size_t>(t)];
      if (!delta.empty()) {
        auto it = delta.find(t);
        if (it != delta.end()) sum += it->second;
      }
      double phi = static_cast<double>(lengths[static_cast<size_t>(t)]) *
                   (std::max(sum, 0.0) / static_cast<double>(deg));
      alpha[static_cast<size_t>(t - gb)] = lambda * phi + 1.0;
    }
    total += log_dirichlet_prior(
        p_all.subspan(static_cast<size_t>(gb), static_cast<size_t>(ge - gb)), alpha);
  }
  return total;
}

namespace {

template <typename Reads>
double gene_ll_impl(std::span<const double> p_i, const Reads& reads,
                    std::span<const double> phi_i, double lambda, bool include_neighbor_priors,
                    const NeighborContext* ctx) {
  std::vector<double> alpha(phi_i.size());
  for (size_t k = 0; k < phi_i.size(); ++k) alpha[k] = lambda * phi_i[k] + 1.0;
  double ll = log_dirichlet_prior(p_i, alpha) + read_log_likelihood(p_i, reads);
  if (include_neighbor_priors) {
    if (ctx == nullptr) throw ValidationError("neighbor priors requested without a context");
    ll += ctx->neighbor_prior_log(p_i);
  }
  check_finite_or_neginf(ll, "gene log-likelihood");
  return ll;
}

}  // namespace

double gene_log_likelihood(std::span<const double> p_i, const std::vector<ReadCompat>& reads,
                           std::span<const double> phi_i, double lambda,
                           bool include_neighbor_priors, const NeighborContext* ctx) {
  return gene_ll_impl(p_i, reads, phi_i, lambda, include_neighbor_priors, ctx);
}

double gene_log_likelihood(std::span<const double> p_i, const std::vector<CompatClass>& classes,
                           std::span<const double> phi_i, double lambda,
                           bool include_neighbor_priors, const NeighborContext* ctx) {
  return gene_ll_impl(p_i, classes, phi_i, lambda, include_neighbor_priors, ctx);
}

}  // namespace netrstq
