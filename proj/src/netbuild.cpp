#include "netrstq/netbuild.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_map>

#include "netrstq/common.hpp"

namespace netrstq {

void DomainAnnotation::add(const std::string& transcript_id, const std::string& domain_id) {
  auto& doms = seen_[transcript_id];
  if (doms.emplace(domain_id, true).second) rows_.emplace_back(transcript_id, domain_id);
}

void DDITable::add(const std::string& a, const std::string& b, EdgeTier tier) {
  auto& fwd = partners_[a];
  auto it = fwd.find(b);
  if (it == fwd.end()) {
    fwd.emplace(b, tier);
    partners_[b].emplace(a, tier);  // no-op overwrite risk avoided: emplace keeps first
    ++pair_count_;
  } else if (tier < it->second) {
    it->second = tier;
    partners_[b][a] = tier;
  }
}

bool DDITable::interacts(const std::string& a, const std::string& b) const {
  auto it = partners_.find(a);
  return it != partners_.end() && it->second.count(b) > 0;
}

EdgeTier DDITable::tier(const std::string& a, const std::string& b) const {
  auto it = partners_.find(a);
  if (it == partners_.end()) return EdgeTier::Unspecified;
  auto jt = it->second.find(b);
  return jt == it->second.end() ? EdgeTier::Unspecified : jt->second;
}

std::vector<std::pair<std::string, std::string>> DDITable::pairs_sorted() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [a, ps] : partners_)
    for (const auto& [b, tier] : ps)
      if (a <= b) out.emplace_back(a, b);
  std::sort(out.begin(), out.end());
  return out;
}

TranscriptNetwork build_network(const TranscriptCatalog& catalog, const DomainAnnotation& annot,
                                const DDITable& ddi) {
  // transcripts per domain, in catalog index space
  std::unordered_map<std::string, std::vector<int>> by_domain;
  std::string offenders;
  for (const auto& [tid, dom] : annot.rows()) {
    int t = catalog.find_transcript(tid);
    if (t < 0) {
      offenders += offenders.empty() ? tid : ", " + tid;
      continue;
    }
    by_domain[dom].push_back(t);
  }
  if (!offenders.empty())
    throw ValidationError("annotation references unknown transcripts: " + offenders);

  TranscriptNetwork net;
  for (const auto& [da, db] : ddi.pairs_sorted()) {
    auto ia = by_domain.find(da);
    auto ib = by_domain.find(db);
    if (ia == by_domain.end() || ib == by_domain.end()) continue;
    EdgeTier tier = ddi.tier(da, db);
    for (int t1 : ia->second) {
      for (int t2 : ib->second) {
        if (t1 == t2 || catalog.gene_of(t1) == catalog.gene_of(t2)) continue;
        net.add_edge(catalog.transcript_id(t1), catalog.transcript_id(t2), tier);
      }
    }
  }
  return net;
}

namespace {

// Fixed-width bitset rows for triangle counting and BFS-by-levels.
struct BitRows {
  size_t n = 0, words = 0;
  std::vector<uint64_t> bits;
  BitRows(size_t n_) : n(n_), words((n_ + 63) / 64), bits(n_ * words, 0) {}
  uint64_t* row(size_t i) { return bits.data() + i * words; }
  const uint64_t* row(size_t i) const { return bits.data() + i * words; }
  void set(size_t i, size_t j) { row(i)[j >> 6] |= uint64_t(1) << (j & 63); }
};

}  // namespace

NetworkStats network_stats(const TranscriptNetwork& net) {
  NetworkStats s;
  const size_t n = net.node_count();
  s.node_count = n;
  s.edge_count = net.edge_count();
  if (n >= 2) {
    s.density_defined = true;
    s.density = static_cast<double>(s.edge_count) /
                (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
    s.avg_degree = 2.0 * static_cast<double>(s.edge_count) / static_cast<double>(n);
  }
  if (n == 0) return s;

  BitRows rows(n);
  for (size_t u = 0; u < n; ++u)
    for (int v : net.neighbors(static_cast<int>(u))) rows.set(u, static_cast<size_t>(v));

  // Clustering: triangles through u = half the adjacent neighbor pairs.
  double clustering_sum = 0.0;
  for (size_t u = 0; u < n; ++u) {
    auto nbs = net.neighbors(static_cast<int>(u));
    size_t deg = nbs.size();
    if (deg < 2) continue;
    uint64_t paired = 0;
    const uint64_t* ru = rows.row(u);
    for (int v : nbs) {
      const uint64_t* rv = rows.row(static_cast<size_t>(v));
      for (size_t w = 0; w < rows.words; ++w) paired += std::popcount(ru[w] & rv[w]);
    }
    double triangles = static_cast<double>(paired) / 2.0;
    clustering_sum += triangles / (static_cast<double>(deg) * static_cast<double>(deg - 1) / 2.0);
  }
  s.avg_clustering = clustering_sum / static_cast<double>(n);

  // Connected components.
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  std::vector<size_t> comp_size;
  for (size_t u = 0; u < n; ++u) {
    if (comp[u] >= 0) continue;
    size_t size = 0;
    std::queue<size_t> q;
    q.push(u);
    comp[u] = n_comp;
    while (!q.empty()) {
      size_t x = q.front();
      q.pop();
      ++size;
      for (int v : net.neighbors(static_cast<int>(x)))
        if (comp[static_cast<size_t>(v)] < 0) {
          comp[static_cast<size_t>(v)] = n_comp;
          q.push(static_cast<size_t>(v));
        }
    }
    comp_size.push_back(size);
    ++n_comp;
  }
  int big = static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
  s.largest_component = comp_size[static_cast<size_t>(big)];

  // Diameter over the largest component: eccentricity of every member via
  // frontier bitsets (each reachable node ORs its adjacency row once).
  int diameter = 0;
  std::vector<uint64_t> visited(rows.words), frontier(rows.words), next(rows.words);
  for (size_t u = 0; u < n; ++u) {
    if (comp[u] != big) continue;
    std::fill(visited.begin(), visited.end(), 0);
    std::fill(frontier.begin(), frontier.end(), 0);
    visited[u >> 6] = frontier[u >> 6] = uint64_t(1) << (u & 63);
    int ecc = 0;
    size_t remaining = s.largest_component - 1;
    while (remaining > 0) {
      std::fill(next.begin(), next.end(), 0);
      for (size_t w = 0; w < rows.words; ++w) {
        uint64_t f = frontier[w];
        while (f) {
          size_t x = (w << 6) + static_cast<size_t>(std::countr_zero(f));
          f &= f - 1;
          const uint64_t* rx = rows.row(x);
          for (size_t ww = 0; ww < rows.words; ++ww) next[ww] |= rx[ww];
        }
      }
      size_t grew = 0;
      for (size_t w = 0; w < rows.words; ++w) {
        uint64_t fresh = next[w] & ~visited[w];
        visited[w] |= fresh;
        frontier[w] = fresh;
        grew += std::popcount(fresh);
      }
      if (grew == 0) break;
      remaining -= grew;
      ++ecc;
    }
    diameter = std::max(diameter, ecc);
  }
  s.diameter = diameter;
  return s;
}

namespace {

struct IndexedEdges {
  std::vector<std::string> ids;                      // catalog transcript ids
  std::unordered_map<std::string, int> index;
  std::vector<int> gene_of;
  std::vector<std::pair<int, int>> edges;            // canonical order
  std::unordered_map<uint64_t, EdgeTier> tiers;

  static uint64_t key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
  }
};

IndexedEdges index_over_catalog(const TranscriptNetwork& net, const TranscriptCatalog& catalog) {
  IndexedEdges ix;
  ix.ids.reserve(static_cast<size_t>(catalog.transcript_count()));
  for (int t = 0; t < catalog.transcript_count(); ++t) {
    ix.ids.push_back(catalog.transcript_id(t));
    ix.index.emplace(catalog.transcript_id(t), t);
    ix.gene_of.push_back(catalog.gene_of(t));
  }
  for (const auto& [a, b] : net.edges_sorted()) {
    auto ia = ix.index.find(a);
    auto ib = ix.index.find(b);
    if (ia == ix.index.end() || ib == ix.index.end())
      throw ValidationError("network node '" + (ia == ix.index.end() ? a : b) +
                            "' is not a catalog transcript");
    ix.edges.emplace_back(ia->second, ib->second);
    EdgeTier t = net.tier(net.node_index(a), net.node_index(b));
    if (t != EdgeTier::Unspecified) ix.tiers.emplace(IndexedEdges::key(ia->second, ib->second), t);
  }
  return ix;
}

TranscriptNetwork to_network(const IndexedEdges& ix) {
  TranscriptNetwork out;
  for (const auto& [a, b] : ix.edges) {
    auto it = ix.tiers.find(IndexedEdges::key(a, b));
    out.add_edge(ix.ids[static_cast<size_t>(a)], ix.ids[static_cast<size_t>(b)],
                 it == ix.tiers.end() ? EdgeTier::Unspecified : it->second);
  }
  return out;
}

}  // namespace

TranscriptNetwork randomize_network(const TranscriptNetwork& net, const TranscriptCatalog& catalog,
                                    uint64_t seed) {
  IndexedEdges ix = index_over_catalog(net, catalog);
  std::mt19937_64 rng(seed);

  // Label permutation over all catalog transcripts ("shuffle edges among all
  // the transcripts"): previously isolated transcripts may gain edges.
  std::vector<int> perm(ix.ids.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::unordered_map<uint64_t, size_t> present;  // edge key -> position
  present.reserve(ix.edges.size() * 2);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(ix.edges.size());
  for (auto [a, b] : ix.edges) {
    int pa = perm[static_cast<size_t>(a)];
    int pb = perm[static_cast<size_t>(b)];
    if (pa > pb) std::swap(pa, pb);
    edges.emplace_back(pa, pb);
    present.emplace(IndexedEdges::key(pa, pb), edges.size() - 1);
  }

  auto same_gene = [&](const std::pair<int, int>& e) {
    return ix.gene_of[static_cast<size_t>(e.first)] == ix.gene_of[static_cast<size_t>(e.second)];
  };

  std::vector<size_t> bad;
  for (size_t i = 0; i < edges.size(); ++i)
    if (same_gene(edges[i])) bad.push_back(i);

  // Rewire offenders by swapping endpoints with a random partner edge. A swap
  // must not create self-loops, duplicates, or new same-gene edges.
  std::uniform_int_distribution<size_t> pick(0, edges.empty() ? 0 : edges.size() - 1);
  long attempts_left = 1000 * static_cast<long>(bad.size() + 1);
  while (!bad.empty()) {
    if (--attempts_left < 0)
      throw NumericalError("could not eliminate same-gene edges after bounded retries");
    size_t i = bad.back();
    size_t j = pick(rng);
    if (i == j) continue;
    auto [u, v] = edges[i];
    auto [x, y] = edges[j];
    // Try (u,y) and (x,v); fall back to (u,x) and (y,v).
    for (int flip = 0; flip < 2; ++flip) {
      int a1 = u, b1 = (flip == 0 ? y : x);
      int a2 = (flip == 0 ? x : y), b2 = v;
      if (a1 == b1 || a2 == b2) continue;
      std::pair<int, int> e1{std::min(a1, b1), std::max(a1, b1)};
      std::pair<int, int> e2{std::min(a2, b2), std::max(a2, b2)};
      if (same_gene(e1) || same_gene(e2)) continue;
      uint64_t k1 = IndexedEdges::key(e1.first, e1.second);
      uint64_t k2 = IndexedEdges::key(e2.first, e2.second);
      if (k1 == k2 || present.count(k1) || present.count(k2)) continue;
      present.erase(IndexedEdges::key(edges[i].first, edges[i].second));
      present.erase(IndexedEdges::key(edges[j].first, edges[j].second));
      edges[i] = e1;
      edges[j] = e2;
      present.emplace(k1, i);
      present.emplace(k2, j);
      bad.pop_back();
      if (same_gene(edges[j])) bad.push_back(j);  // j might have been a fellow offender
      break;
    }
  }

  IndexedEdges out = ix;
  out.edges = std::move(edges);
  out.tiers.clear();  // provenance does not survive shuffling
  std::sort(out.edges.begin(), out.edges.end());
  return to_network(out);
}

TranscriptNetwork delete_edges(const TranscriptNetwork& net, double fraction, uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) throw ValidationError("fraction must lie in [0,1]");
  auto edges = net.edges_sorted();  // canonical order makes the draw deterministic
  size_t remove = static_cast<size_t>(std::floor(fraction * static_cast<double>(edges.size())));
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `remove` slots are the deleted sample.
  for (size_t i = 0; i < remove; ++i) {
    std::uniform_int_distribution<size_t> pick(i, edges.size() - 1);
    std::swap(edges[i], edges[pick(rng)]);
  }
  TranscriptNetwork out;
  for (size_t i = remove; i < edges.size(); ++i) {
    int a = net.node_index(edges[i].first);
    int b = net.node_index(edges[i].second);
    out.add_edge(edges[i].first, edges[i].second, net.tier(a, b));
  }
  return out;
}

TranscriptNetwork two_step_closure(const TranscriptNetwork& net, const TranscriptCatalog& catalog) {
  net.validate_against(catalog);
  const size_t n = net.node_count();
  std::vector<int> gene(n);
  for (size_t u = 0; u < n; ++u)
    gene[u] = catalog.gene_of(catalog.find_transcript(net.node_id(static_cast<int>(u))));

  TranscriptNetwork out;
  std::vector<char> mark(n, 0);
  std::vector<int> touched;
  for (size_t u = 0; u < n; ++u) {
    touched.clear();
    for (int v : net.neighbors(static_cast<int>(u))) {
      if (!mark[static_cast<size_t>(v)]) {
        mark[static_cast<size_t>(v)] = 1;
        touched.push_back(v);
      }
      for (int w : net.neighbors(v)) {
        if (!mark[static_cast<size_t>(w)]) {
          mark[static_cast<size_t>(w)] = 1;
          touched.push_back(w);
        }
      }
    }
    for (int v : touched) {
      mark[static_cast<size_t>(v)] = 0;
      if (static_cast<size_t>(v) <= u) continue;  // emit each pair once
      if (gene[static_cast<size_t>(v)] == gene[u]) continue;
      out.add_edge(net.node_id(static_cast<int>(u)), net.node_id(v));
    }
  }
  return out;
}

}  // namespace netrstq
