#include "netrstq/types.hpp"

#include <algorithm>

namespace netrstq {

TranscriptCatalog TranscriptCatalog::from_genes(std::vector<GeneEntry> genes) {
  TranscriptCatalog c;
  c.genes_ = std::move(genes);
  c.gene_offset_.reserve(c.genes_.size() + 1);
  c.gene_offset_.push_back(0);
  for (size_t g = 0; g < c.genes_.size(); ++g) {
    const GeneEntry& gene = c.genes_[g];
    if (gene.id.empty()) throw ValidationError("empty gene id");
    if (gene.transcripts.empty())
      throw ValidationError("gene '" + gene.id + "' has no transcripts");
    if (!c.gene_index_.emplace(gene.id, static_cast<int>(g)).second)
      throw ValidationError("duplicate gene id '" + gene.id + "'");
    for (const Transcript& t : gene.transcripts) {
      if (t.id.empty()) throw ValidationError("empty transcript id in gene '" + gene.id + "'");
      if (t.length < 1)
        throw ValidationError("transcript '" + t.id + "' has length " +
                              std::to_string(t.length) + ", must be >= 1");
      int idx = static_cast<int>(c.transcript_ids_.size());
      if (!c.transcript_index_.emplace(t.id, idx).second)
        throw ValidationError("duplicate transcript id '" + t.id + "'");
      c.transcript_ids_.push_back(t.id);
      c.lengths_.push_back(t.length);
      c.gene_of_.push_back(static_cast<int>(g));
    }
    c.gene_offset_.push_back(static_cast<int>(c.transcript_ids_.size()));
  }
  return c;
}

int TranscriptCatalog::find_transcript(const std::string& id) const {
  auto it = transcript_index_.find(id);
  return it == transcript_index_.end() ? -1 : it->second;
}

int TranscriptCatalog::find_gene(const std::string& id) const {
  auto it = gene_index_.find(id);
  return it == gene_index_.end() ? -1 : it->second;
}

CompatibilitySet::CompatibilitySet(const TranscriptCatalog& catalog, int read_length)
    : read_length_(read_length) {
  if (read_length < 1) throw ValidationError("read length must be >= 1");
  by_gene_.resize(static_cast<size_t>(catalog.gene_count()));
  gene_sizes_.reserve(by_gene_.size());
  for (int g = 0; g < catalog.gene_count(); ++g) gene_sizes_.push_back(catalog.gene_size(g));
}

void CompatibilitySet::add_read(int gene, ReadCompat read) {
  if (gene < 0 || gene >= gene_count()) throw ValidationError("gene index out of range");
  if (read.compat.empty())
    throw ValidationError("read '" + read.read_id + "' has empty compatibility set");
  int k_prev = -1;
  for (const CompatEntry& e : read.compat) {
    if (e.k < 0 || e.k >= gene_sizes_[static_cast<size_t>(gene)])
      throw ValidationError("read '" + read.read_id + "' references transcript index " +
                            std::to_string(e.k) + " outside its gene");
    if (e.k <= k_prev)
      throw ValidationError("read '" + read.read_id + "' has unsorted or duplicate compat entries");
    if (!(e.q > 0.0) || e.q > 1.0)
      throw ValidationError("read '" + read.read_id + "' has sampling probability " +
                            std::to_string(e.q) + " outside (0,1]");
    k_prev = e.k;
  }
  by_gene_[static_cast<size_t>(gene)].push_back(std::move(read));
}

long long CompatibilitySet::total_reads() const {
  long long n = 0;
  for (const auto& reads : by_gene_) n += static_cast<long long>(reads.size());
  return n;
}

namespace {
uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}
}  // namespace

int TranscriptNetwork::intern(const std::string& id) {
  auto it = index_.find(id);
  if (it != index_.end()) return it->second;
  int idx = static_cast<int>(node_ids_.size());
  node_ids_.push_back(id);
  adj_.emplace_back();
  index_.emplace(id, idx);
  return idx;
}

void TranscriptNetwork::add_edge(const std::string& a, const std::string& b, EdgeTier tier) {
  if (a == b) throw ValidationError("self-loop on transcript '" + a + "'");
  int ia = intern(a);
  int ib = intern(b);
  auto& na = adj_[static_cast<size_t>(ia)];
  auto pos = std::lower_bound(na.begin(), na.end(), ib);
  if (pos != na.end() && *pos == ib) {
    if (tier != EdgeTier::Unspecified) {
      auto [it, inserted] = tiers_.emplace(edge_key(ia, ib), tier);
      if (!inserted && tier < it->second) it->second = tier;
    }
    return;  // already present
  }
  na.insert(pos, ib);
  auto& nb = adj_[static_cast<size_t>(ib)];
  nb.insert(std::lower_bound(nb.begin(), nb.end(), ia), ia);
  ++edge_count_;
  if (tier != EdgeTier::Unspecified) tiers_.emplace(edge_key(ia, ib), tier);
}

int TranscriptNetwork::node_index(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

bool TranscriptNetwork::has_edge(int a, int b) const {
  if (a < 0 || b < 0 || static_cast<size_t>(a) >= adj_.size()) return false;
  const auto& na = adj_[static_cast<size_t>(a)];
  return std::binary_search(na.begin(), na.end(), b);
}

bool TranscriptNetwork::has_edge(const std::string& a, const std::string& b) const {
  return has_edge(node_index(a), node_index(b));
}

EdgeTier TranscriptNetwork::tier(int a, int b) const {
  auto it = tiers_.find(edge_key(a, b));
  return it == tiers_.end() ? EdgeTier::Unspecified : it->second;
}

std::vector<std::pair<std::string, std::string>> TranscriptNetwork::edges_sorted() const {
  std::vector<std::pair<std::string, std::string>> edges;
  edges.reserve(edge_count_);
  for (size_t i = 0; i < adj_.size(); ++i) {
    for (int j : adj_[i]) {
      if (static_cast<int>(i) < j) {
        const std::string& a = node_ids_[i];
        const std::string& b = node_ids_[static_cast<size_t>(j)];
        edges.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

void TranscriptNetwork::validate_against(const TranscriptCatalog& catalog) const {
  for (size_t i = 0; i < node_ids_.size(); ++i) {
    int t = catalog.find_transcript(node_ids_[i]);
    if (t < 0)
      throw ValidationError("network node '" + node_ids_[i] + "' is not a catalog transcript");
  }
  for (size_t i = 0; i < adj_.size(); ++i) {
    int gi = catalog.gene_of(catalog.find_transcript(node_ids_[i]));
    for (int j : adj_[i]) {
      if (static_cast<int>(i) >= j) continue;
      int gj = catalog.gene_of(catalog.find_transcript(node_ids_[static_cast<size_t>(j)]));
      if (gi == gj)
        throw ValidationError("edge (" + node_ids_[i] + ", " + node_ids_[static_cast<size_t>(j)] +
                              ") joins two transcripts of gene '" + catalog.gene_id(gi) + "'");
    }
  }
}

}  // namespace netrstq
