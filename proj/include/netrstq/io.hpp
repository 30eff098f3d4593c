#pragma once

#include <string>
#include <vector>

#include "netrstq/netbuild.hpp"
#include "netrstq/types.hpp"

namespace netrstq {

// All formats are UTF-8, LF, tab-separated with a fixed header line. Loaders
// validate every type invariant and throw TsvError with file and line; stores
// are byte-deterministic given identical in-memory inputs.

// transcript_id <tab> gene_id <tab> length. Genes ordered by first appearance,
// transcripts by row order.
TranscriptCatalog load_transcripts(const std::string& path);
void store_transcripts(const std::string& path, const TranscriptCatalog& catalog);

// transcript_a <tab> transcript_b, one undirected edge per line; stored with
// a < b lexically, lines sorted.
TranscriptNetwork load_network(const std::string& path);
void store_network(const std::string& path, const TranscriptNetwork& net);

// transcript_id <tab> domain_id
DomainAnnotation load_domains(const std::string& path);
void store_domains(const std::string& path, const DomainAnnotation& annot);

// domain_a <tab> domain_b
DDITable load_ddi(const std::string& path);
void store_ddi(const std::string& path, const DDITable& ddi);

// gene_id <tab> read_id <tab> comma-separated transcript ids
// [<tab> comma-separated explicit q values]. Without the fourth column q is
// computed as 1/(l - read_length + 1), rejecting transcripts with
// l <= read_length. Reads keep their input order.
CompatibilitySet load_compat(const std::string& path, const TranscriptCatalog& catalog,
                             int read_length);
void store_compat(const std::string& path, const TranscriptCatalog& catalog,
                  const CompatibilitySet& compat);

// transcript_id <tab> gene_id <tab> p <tab> rho <tab> pi, 10 significant digits.
struct QuantRow {
  std::string transcript_id;
  std::string gene_id;
  double p = 0.0;
  double rho = 0.0;
  double pi = 0.0;
};
std::vector<QuantRow> load_quant(const std::string& path);
void store_quant(const std::string& path, const TranscriptCatalog& catalog,
                 const QuantState& state);
void store_quant_rows(const std::string& path, const std::vector<QuantRow>& rows);

// The pi column of quant rows aligned to the catalog's transcript order;
// every catalog transcript must appear exactly once.
std::vector<double> quant_pi_vector(const std::vector<QuantRow>& rows,
                                    const TranscriptCatalog& catalog);

// transcript_id <tab> gene_id <tab> gene_expression <tab> p_init <tab> p <tab> pi
SimTruth load_truth(const std::string& path, const TranscriptCatalog& catalog);
void store_truth(const std::string& path, const TranscriptCatalog& catalog, const SimTruth& truth);

}  // namespace netrstq
