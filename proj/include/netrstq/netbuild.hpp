#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netrstq/types.hpp"

namespace netrstq {

// transcript -> Pfam-style domain annotation rows; duplicates collapse.
class DomainAnnotation {
 public:
  void add(const std::string& transcript_id, const std::string& domain_id);
  const std::vector<std::pair<std::string, std::string>>& rows() const { return rows_; }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;  // unique, insertion order
  std::unordered_map<std::string, std::unordered_map<std::string, bool>> seen_;
};

// Unordered domain-domain interaction pairs; symmetric closure applied on add;
// self-pairs allowed (a domain may bind itself across two transcripts).
class DDITable {
 public:
  void add(const std::string& domain_a, const std::string& domain_b,
           EdgeTier tier = EdgeTier::Unspecified);
  bool interacts(const std::string& a, const std::string& b) const;
  EdgeTier tier(const std::string& a, const std::string& b) const;
  std::vector<std::pair<std::string, std::string>> pairs_sorted() const;  // a <= b lexically
  std::size_t pair_count() const { return pair_count_; }

 private:
  std::unordered_map<std::string, std::unordered_map<std::string, EdgeTier>> partners_;
  std::size_t pair_count_ = 0;
};

// Connects two transcripts of different genes when any domain-domain
// interaction exists between their annotated domains. Annotation transcript
// ids must belong to the catalog.
TranscriptNetwork build_network(const TranscriptCatalog& catalog, const DomainAnnotation& annot,
                                const DDITable& ddi);

struct NetworkStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double density = 0.0;       // |E| / (n(n-1)/2)
  bool density_defined = false;  // false when n < 2
  double avg_degree = 0.0;
  double avg_clustering = 0.0;  // per node triangles/possible; degree < 2 contributes 0
  int diameter = 0;             // over the largest connected component
  std::size_t largest_component = 0;
};

NetworkStats network_stats(const TranscriptNetwork& net);

// Applies a seeded label permutation over all catalog transcripts to the edge
// endpoints; same-gene edges produced by the permutation are rewired by edge
// swaps until none remain. Edge count is preserved exactly.
TranscriptNetwork randomize_network(const TranscriptNetwork& net, const TranscriptCatalog& catalog,
                                    uint64_t seed);

// Removes floor(fraction * |E|) edges uniformly at random.
TranscriptNetwork delete_edges(const TranscriptNetwork& net, double fraction, uint64_t seed);

// Edge (a,b) iff shortest-path distance <= 2 in the input, with the same-gene
// exclusion re-applied.
TranscriptNetwork two_step_closure(const TranscriptNetwork& net, const TranscriptCatalog& catalog);

}  // namespace netrstq
