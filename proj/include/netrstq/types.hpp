#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netrstq/common.hpp"

namespace netrstq {

struct Transcript {
  std::string id;
  int length = 0;  // base pairs, >= 1
};

struct GeneEntry {
  std::string id;
  std::vector<Transcript> transcripts;
};

// Gene/transcript universe. Gene and transcript order is the input order and is
// stable across a run; all other structures index into this order.
class TranscriptCatalog {
 public:
  TranscriptCatalog() = default;

  // Validates: unique gene ids, globally unique transcript ids, lengths >= 1,
  // every gene non-empty.
  static TranscriptCatalog from_genes(std::vector<GeneEntry> genes);

  int gene_count() const { return static_cast<int>(genes_.size()); }
  int transcript_count() const { return static_cast<int>(lengths_.size()); }
  const std::vector<GeneEntry>& genes() const { return genes_; }
  const GeneEntry& gene(int g) const { return genes_[static_cast<size_t>(g)]; }

  // Flat views over global transcript indices [0, transcript_count()).
  int gene_begin(int g) const { return gene_offset_[static_cast<size_t>(g)]; }
  int gene_end(int g) const { return gene_offset_[static_cast<size_t>(g) + 1]; }
  int gene_size(int g) const { return gene_end(g) - gene_begin(g); }
  int gene_of(int t) const { return gene_of_[static_cast<size_t>(t)]; }
  int length(int t) const { return lengths_[static_cast<size_t>(t)]; }
  std::span<const int> lengths() const { return lengths_; }
  std::span<const int> gene_offsets() const { return gene_offset_; }
  std::span<const int> genes_of() const { return gene_of_; }
  const std::string& transcript_id(int t) const { return transcript_ids_[static_cast<size_t>(t)]; }
  const std::string& gene_id(int g) const { return genes_[static_cast<size_t>(g)].id; }

  // -1 when unknown.
  int find_transcript(const std::string& id) const;
  int find_gene(const std::string& id) const;

 private:
  std::vector<GeneEntry> genes_;
  std::vector<std::string> transcript_ids_;  // by global index
  std::vector<int> lengths_;
  std::vector<int> gene_of_;
  std::vector<int> gene_offset_;  // size gene_count()+1
  std::unordered_map<std::string, int> transcript_index_;
  std::unordered_map<std::string, int> gene_index_;
};

// One compatibility entry: within-gene transcript index k and sampling probability q.
struct CompatEntry {
  int k = 0;
  double q = 0.0;  // in (0, 1]; incompatibility is absence, q = 0 is never stored
};

struct ReadCompat {
  std::string read_id;
  std::vector<CompatEntry> compat;  // sorted by k, non-empty
};

// Per-gene read->transcript compatibility with a run-global read length.
class CompatibilitySet {
 public:
  CompatibilitySet() = default;
  CompatibilitySet(const TranscriptCatalog& catalog, int read_length);

  // Validates: non-empty compat, k in range for the gene, q in (0,1], strictly
  // increasing k (a compat list is a set).
  void add_read(int gene, ReadCompat read);

  int read_length() const { return read_length_; }
  int gene_count() const { return static_cast<int>(by_gene_.size()); }
  const std::vector<ReadCompat>& reads(int gene) const { return by_gene_[static_cast<size_t>(gene)]; }
  long long total_reads() const;

 private:
  std::vector<std::vector<ReadCompat>> by_gene_;
  std::vector<int> gene_sizes_;
  int read_length_ = 0;
};

// Provenance tier of an edge; carried as an attribute, never used by the model.
enum class EdgeTier : uint8_t {
  Structural = 0,
  PredictedHigh = 1,
  PredictedMedium = 2,
  Unspecified = 3,
};

// Undirected binary graph over transcript ids. Nodes are exactly the edge
// endpoints; a transcript absent from the graph simply has no neighbors.
// Self-loops are rejected here; the no-same-gene-edge rule needs a catalog and
// is enforced by the builders/loaders via validate_against().
class TranscriptNetwork {
 public:
  // Dedupes; keeps the strongest (lowest-valued) tier seen for an edge.
  void add_edge(const std::string& a, const std::string& b, EdgeTier tier = EdgeTier::Unspecified);

  std::size_t node_count() const { return node_ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::string& node_id(int idx) const { return node_ids_[static_cast<size_t>(idx)]; }
  int node_index(const std::string& id) const;  // -1 when unknown
  std::span<const int> neighbors(int idx) const { return adj_[static_cast<size_t>(idx)]; }
  bool has_edge(int a, int b) const;
  bool has_edge(const std::string& a, const std::string& b) const;
  EdgeTier tier(int a, int b) const;

  // All edges as id pairs with a < b lexically, sorted; the canonical order
  // used for stores and seeded edge sampling.
  std::vector<std::pair<std::string, std::string>> edges_sorted() const;

  // Throws ValidationError when an endpoint is not a catalog transcript or an
  // edge joins two transcripts of the same gene.
  void validate_against(const TranscriptCatalog& catalog) const;

 private:
  int intern(const std::string& id);

  std::vector<std::string> node_ids_;            // first-seen order
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> adj_;            // sorted neighbor lists
  std::unordered_map<uint64_t, EdgeTier> tiers_; // only non-Unspecified entries
  std::size_t edge_count_ = 0;
};

// Result of a quantification run. Per-gene blocks align with the catalog.
struct QuantState {
  std::vector<std::vector<double>> p;    // read-origin probabilities, each on the simplex
  std::vector<std::vector<double>> rho;  // relative abundances
  std::vector<std::vector<double>> pi;   // expressions, read-count units per base
  std::vector<double> phi;               // prior read counts per global transcript
  double lambda = 0.0;
  std::vector<uint8_t> no_data;          // genes quantified without reads
  std::vector<int> accepted_updates;     // per gene
  std::vector<double> loglik_trajectory; // total log pseudo-likelihood per gene update
  int rounds = 0;
  bool converged = false;
  bool stalled = false;                  // penalized solver: step size underflow
};

// Ground-truth expressions and proportions from the simulation generator.
struct SimTruth {
  std::vector<double> gene_expression;  // per gene, sampled expression
  std::vector<double> p_init;           // initial proportions, per global transcript
  std::vector<double> p;                // converged proportions
  std::vector<double> pi;               // ground-truth expressions, normalized to sum 1
  double sim_alpha = 1.0;               // mixing weight of the neighbor-average term
  double noise_sigma = 0.0;
};

}  // namespace netrstq
