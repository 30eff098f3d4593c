#include "netrstq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "netrstq/common.hpp"

namespace netrstq {

namespace {

class LineReader {
 public:
  LineReader(const std::string& path, const char* header, const char* alt_header = nullptr)
      : path_(path), in_(path) {
    if (!in_) throw TsvError(path, 0, "cannot open file");
    std::string first;
    if (!std::getline(in_, first)) throw TsvError(path, 1, "missing header line");
    check_cr(first, 1);
    if (first != header && (alt_header == nullptr || first != alt_header))
      throw TsvError(path, 1, "bad header, expected '" + std::string(header) + "'");
    line_no_ = 1;
  }

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    check_cr(line, line_no_);
    return true;
  }

  long line_no() const { return line_no_; }
  [[noreturn]] void fail(const std::string& reason) const { throw TsvError(path_, line_no_, reason); }

 private:
  void check_cr(const std::string& line, long no) const {
    if (!line.empty() && line.back() == '\r')
      throw TsvError(path_, no, "carriage return found; files must use LF line endings");
  }

  std::string path_;
  std::ifstream in_;
  long line_no_ = 0;
};

std::vector<std::string_view> split_tabs(const std::string& line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.emplace_back(line.data() + start, line.size() - start);
      break;
    }
    fields.emplace_back(line.data() + start, pos - start);
    start = pos + 1;
  }
  return fields;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// from_chars wrappers that raise a proper TsvError
int parse_int_field(LineReader& r, std::string_view s, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    r.fail(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  return v;
}

double parse_double_field(LineReader& r, std::string_view s, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    r.fail(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw ValidationError("cannot write '" + path + "'");
  return out;
}

// Shortest representation that parses back to the same double.
std::string fmt_exact(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// 10 significant digits, the quant.tsv contract.
std::string fmt_quant(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

constexpr const char* kTranscriptsHeader = "transcript_id\tgene_id\tlength";
constexpr const char* kNetworkHeader = "transcript_a\ttranscript_b";
constexpr const char* kDomainsHeader = "transcript_id\tdomain_id";
constexpr const char* kDdiHeader = "domain_a\tdomain_b";
constexpr const char* kCompatHeader = "gene_id\tread_id\tcompat_transcripts";
constexpr const char* kQuantHeader = "transcript_id\tgene_id\tp\trho\tpi";
constexpr const char* kTruthHeader = "transcript_id\tgene_id\tgene_expression\tp_init\tp\tpi";

}  // namespace

TranscriptCatalog load_transcripts(const std::string& path) {
  LineReader r(path, kTranscriptsHeader);
  std::vector<GeneEntry> genes;
  std::unordered_map<std::string, size_t> gene_pos;
  std::unordered_set<std::string> seen_transcripts;
  std::string line;
  while (r.next(line)) {
    auto f = split_tabs(line);
    if (f.size() != 3) r.fail("expected 3 tab-separated fields, got " + std::to_string(f.size()));
    std::string tid(f[0]), gid(f[1]);
    if (tid.empty()) r.fail("empty transcript id");
    if (gid.empty()) r.fail("empty gene id");
    if (!seen_transcripts.insert(tid).second) r.fail("duplicate transcript id '" + tid + "'");
    int length = parse_int_field(r, f[2], "length");
    if (length < 1) r.fail("transcript length must be >= 1");
    auto [it, fresh] = gene_pos.emplace(gid, genes.size());
    if (fresh) genes.push_back({gid, {}});
    genes[it->second].transcripts.push_back({tid, length});
  }
  return TranscriptCatalog::from_genes(std::move(genes));
}

void store_transcripts(const std::string& path, const TranscriptCatalog& catalog) {
  auto out = open_out(path);
  out << kTranscriptsHeader << '\n';
  for (const GeneEntry& g : catalog.genes())
    for (const Transcript& t : g.transcripts)
      out << t.id << '\t' << g.id << '\t' << t.length << '\n';
}

TranscriptNetwork load_network(const std::string& path) {
  LineReader r(path, kNetworkHeader);
  TranscriptNetwork net;
  std::string line;
  while (r.next(line)) {
    auto f = split_tabs(line);
    if (f.size() != 2) r.fail("expected 2 tab-separated fields, got " + std::to_string(f.size()));
    if (f[0].empty() || f[1].empty()) r.fail("empty transcript id");
    if (f[0] == f[1]) r.fail("self-loop on transcript '" + std::string(f[0]) + "'");
    net.add_edge(std::string(f[0]), std::string(f[1]));
  }
  return net;
}

void store_network(const std::string& path, const TranscriptNetwork& net) {
  auto out = open_out(path);
  out << kNetworkHeader << '\n';
  for (const auto& [a, b] : net.edges_sorted()) out << a << '\t' << b << '\n';
}

DomainAnnotation load_domains(const std::string& path) {
  LineReader r(path, kDomainsHeader);
  DomainAnnotation annot;
  std::string line;
  while (r.next(line)) {
    auto f = split_tabs(line);
    if (f.size() != 2) r.fail("expected 2 tab-separated fields, got " + std::to_string(f.size()));
    if (f[0].empty() || f[1].empty()) r.fail("empty id");
    annot.add(std::string(f[0]), std::string(f[1]));
  }
  return annot;
}

void store_domains(const std::string& path, const DomainAnnotation& annot) {
  auto rows = annot.rows();
  std::sort(rows.begin(), rows.end());
  auto out = open_out(path);
  out << kDomainsHeader << '\n';
  for (const auto& [t, d] : rows) out << t << '\t' << d << '\n';
}

DDITable load_ddi(const std::string& path) {
  LineReader r(path, kDdiHeader);
  DDITable ddi;
  std::string line;
  while (r.next(line)) {
    auto f = split_tabs(line);
    if (f.size() != 2) r.fail("expected 2 tab-separated fields, got " + std::to_string(f.size()));
    if (f[0].empty() || f[1].empty()) r.fail("empty domain id");
    ddi.add(std::string(f[0]), std::string(f[1]));
  }
  return ddi;
}

void store_ddi(const std::string& path, const DDITable& ddi) {
  auto out = open_out(path);
  out << kDdiHeader << '\n';
  for (const auto& [a, b] : ddi.pairs_sorted()) out << a << '\t' << b << '\n';
}

CompatibilitySet load_compat(const std::string& path, const TranscriptCatalog& catalog,
                             int read_length) {
  LineReader r(path, kCompatHeader, "gene_id\tread_id\tcompat_transcripts\tq");
  CompatibilitySet compat(catalog, read_length);
  std::unordered_set<std::string> seen;  // gene-scoped read ids
  std::string line;
  std::vector<CompatEntry> entries;
  while (r.next(line)) {
    auto f = split_tabs(line);
    if (f.size() != 3 && f.size() != 4)
      r.fail("expected 3 or 4 tab-separated fields, got " + std::to_string(f.size()));
    std::string gid(f[0]);
    int g = catalog.find_gene(gid);
    if (g < 0) r.fail("unknown gene '" + gid + "'");
    std::string rid(f[1]);
    if (rid.empty()) r.fail("empty read id");
    if (!seen.insert(gid + '\x1f' + rid).second)
      r.fail("duplicate read id '" + rid + "' in gene '" + gid + "'");

    auto tids = split_commas(f[2]);
    std::vector<std::string_view> qs;
    if (f.size() == 4) {
      qs = split_commas(f[3]);
      if (qs.size() != tids.size())
        r.fail("q column has " + std::to_string(qs.size()) + " values for " +
               std::to_string(tids.size()) + " transcripts");
    }
    entries.clear();
    for (size_t i = 0; i < tids.size(); ++i) {
      if (tids[i].empty()) r.fail("empty transcript id in compat list");
      int t = catalog.find_transcript(std::string(tids[i]));
      if (t < 0) r.fail("unknown transcript '" + std::string(tids[i]) + "'");
      if (catalog.gene_of(t) != g)
        r.fail("transcript '" + std::string(tids[i]) + "' does not belong to gene '" + gid + "'");
      double q;
      if (f.size() == 4) {
        q = parse_double_field(r, qs[i], "q");
        if (!(q > 0.0) || q > 1.0) r.fail("q must lie in (0,1]");
      } else {
        if (catalog.length(t) <= read_length)
          r.fail("transcript '" + std::string(tids[i]) + "' (length " +
                 std::to_string(catalog.length(t)) + ") is not longer than the read length " +
                 std::to_string(read_length));
        q = 1.0 / static_cast<double>(catalog.length(t) - read_length + 1);
      }
      entries.push_back({t - catalog.gene_begin(g), q});
    }
    std::sort(entries.begin(), entries.end(),
              [](const CompatEntry& a, const CompatEntry& b) { return a.k < b.k; });
    for (size_t i = 1; i < entries.size(); ++i)
      if (entries[i].k == entries[i - 1].k) r.fail("duplicate transcript in compat list");
    ReadCompat read;
    read.read_id = std::move(rid);
    read.compat = entries;
    compat.add_read(g, std::move(read));
  }
  return compat;
}

void store_compat(const std::string& path, const TranscriptCatalog& catalog,
                  const CompatibilitySet& compat) {
  auto out = open_out(path);
  out << kCompatHeader << '\n';
  for (int g = 0; g < compat.gene_count(); ++g) {
    const int b = catalog.gene_begin(g);
    for (const ReadCompat& read : compat.reads(g)) {
      out << catalog.gene_id(g) << '\t' << read.read_id << '\t';
      // The q column is emitted only when some q differs from the computed
      // default, keeping files in the plain 3-column form when possible.
      bool need_q = false;
      for (const CompatEntry& e : read.compat) {
        int len = catalog.length(b + e.k);
        if (len <= compat.read_length() ||
            e.q != 1.0 / static_cast<double>(len - compat.read_length() + 1)) {
          need_q = true;
          break;
        }
      }
      for (size_t i = 0; i < read.compat.size(); ++i)
        out << (i ? "," : "") << catalog.transcript_id(b + read.compat[i].k);
      if (need_q) {
        out << '\t';
        for (size_t i = 0; i < read.compat.size(); ++i)
          out << (i ? "," : "") << fmt_exact(read.compat[i].q);
      }
      out << '\n';
    }
  }
}

std::vector<QuantRow> load_quant(const std::string& path) {
  LineReader r(path, kQuantHeader);
  std::vector<QuantRow> rows;
  std::unordered_set<std::string> seen;
  std::string line;
  while (r.next(line)) {
    auto f = split_tabs(line);
    if (f.size() != 5) r.fail("expected 5 tab-separated fields, got " + std::to_string(f.size()));
    QuantRow row;
    row.transcript_id = std::string(f[0]);
    row.gene_id = std::string(f[1]);
    if (row.transcript_id.empty() || row.gene_id.empty()) r.fail("empty id");
    if (!seen.insert(row.transcript_id).second)
      r.fail("duplicate transcript id '" + row.transcript_id + "'");
    row.p = parse_double_field(r, f[2], "p");
    row.rho = parse_double_field(r, f[3], "rho");
    row.pi = parse_double_field(r, f[4], "pi");
    if (row.p < 0.0 || row.p > 1.0) r.fail("p outside [0,1]");
    if (row.rho < 0.0 || row.rho > 1.0) r.fail("rho outside [0,1]");
    if (row.pi < 0.0) r.fail("negative pi");
    rows.push_back(std::move(row));
  }
  return rows;
}

void store_quant_rows(const std::string& path, const std::vector<QuantRow>& rows) {
  auto out = open_out(path);
  out << kQuantHeader << '\n';
  for (const QuantRow& row : rows)
    out << row.transcript_id << '\t' << row.gene_id << '\t' << fmt_quant(row.p) << '\t'
        << fmt_quant(row.rho) << '\t' << fmt_quant(row.pi) << '\n';
}

void store_quant(const std::string& path, const TranscriptCatalog& catalog,
                 const QuantState& state) {
  std::vector<QuantRow> rows;
  rows.reserve(static_cast<size_t>(catalog.transcript_count()));
  for (int g = 0; g < catalog.gene_count(); ++g) {
    for (int k = 0; k < catalog.gene_size(g); ++k) {
      int t = catalog.gene_begin(g) + k;
      rows.push_back({catalog.transcript_id(t), catalog.gene_id(g),
                      state.p[static_cast<size_t>(g)][static_cast<size_t>(k)],
                      state.rho[static_cast<size_t>(g)][static_cast<size_t>(k)],
                      state.pi[static_cast<size_t>(g)][static_cast<size_t>(k)]});
    }
  }
  store_quant_rows(path, rows);
}

std::vector<double> quant_pi_vector(const std::vector<QuantRow>& rows,
                                    const TranscriptCatalog& catalog) {
  std::vector<double> pi(static_cast<size_t>(catalog.transcript_count()), 0.0);
  std::vector<char> filled(pi.size(), 0);
  for (const QuantRow& row : rows) {
    int t = catalog.find_transcript(row.transcript_id);
    if (t < 0) throw ValidationError("quant transcript '" + row.transcript_id +
                                     "' is not in the catalog");
    if (catalog.gene_id(catalog.gene_of(t)) != row.gene_id)
      throw ValidationError("quant transcript '" + row.transcript_id +
                            "' is assigned to the wrong gene '" + row.gene_id + "'");
    if (filled[static_cast<size_t>(t)])
      throw ValidationError("duplicate quant row for transcript '" + row.transcript_id + "'");
    filled[static_cast<size_t>(t)] = 1;
    pi[static_cast<size_t>(t)] = row.pi;
  }
  for (int t = 0; t < catalog.transcript_count(); ++t)
    if (!filled[static_cast<size_t>(t)])
      throw ValidationError("quant file is missing transcript '" + catalog.transcript_id(t) + "'");
  return pi;
}

SimTruth load_truth(const std::string& path, const TranscriptCatalog& catalog) {
  LineReader r(path, kTruthHeader);
  SimTruth truth;
  const size_t T = static_cast<size_t>(catalog.transcript_count());
  truth.gene_expression.assign(static_cast<size_t>(catalog.gene_count()), 0.0);
  truth.p_init.assign(T, 0.0);
  truth.p.assign(T, 0.0);
  truth.pi.assign(T, 0.0);
  std::vector<char> filled(T, 0);
  std::string line;
  while (r.next(line)) {
    auto f = split_tabs(line);
    if (f.size() != 6) r.fail("expected 6 tab-separated fields, got " + std::to_string(f.size()));
    int t = catalog.find_transcript(std::string(f[0]));
    if (t < 0) r.fail("unknown transcript '" + std::string(f[0]) + "'");
    int g = catalog.gene_of(t);
    if (catalog.gene_id(g) != f[1])
      r.fail("transcript '" + std::string(f[0]) + "' does not belong to gene '" +
             std::string(f[1]) + "'");
    if (filled[static_cast<size_t>(t)]) r.fail("duplicate transcript '" + std::string(f[0]) + "'");
    filled[static_cast<size_t>(t)] = 1;
    double e = parse_double_field(r, f[2], "gene_expression");
    if (e < 0.0) r.fail("negative gene expression");
    double prev = truth.gene_expression[static_cast<size_t>(g)];
    if (prev != 0.0 && prev != e)
      r.fail("inconsistent gene expression for gene '" + std::string(f[1]) + "'");
    truth.gene_expression[static_cast<size_t>(g)] = e;
    truth.p_init[static_cast<size_t>(t)] = parse_double_field(r, f[3], "p_init");
    truth.p[static_cast<size_t>(t)] = parse_double_field(r, f[4], "p");
    truth.pi[static_cast<size_t>(t)] = parse_double_field(r, f[5], "pi");
  }
  for (size_t t = 0; t < T; ++t)
    if (!filled[t])
      throw ValidationError("truth file is missing transcript '" +
                            catalog.transcript_id(static_cast<int>(t)) + "'");
  return truth;
}

void store_truth(const std::string& path, const TranscriptCatalog& catalog,
                 const SimTruth& truth) {
  auto out = open_out(path);
  out << kTruthHeader << '\n';
  for (int g = 0; g < catalog.gene_count(); ++g) {
    for (int t = catalog.gene_begin(g); t < catalog.gene_end(g); ++t) {
      out << catalog.transcript_id(t) << '\t' << catalog.gene_id(g) << '\t'
          << fmt_exact(truth.gene_expression[static_cast<size_t>(g)]) << '\t'
          << fmt_exact(truth.p_init[static_cast<size_t>(t)]) << '\t'
          << fmt_exact(truth.p[static_cast<size_t>(t)]) << '\t'
          << fmt_exact(truth.pi[static_cast<size_t>(t)]) << '\n';
    }
  }
}

}  // namespace netrstq
