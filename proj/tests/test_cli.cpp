#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "helpers.hpp"
#include "netrstq/cli.hpp"
#include "netrstq/io.hpp"
#include "netrstq/netbuild.hpp"

using namespace netrstq;
using testhelp::make_catalog;

namespace {

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("netrstq_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(reinterpret_cast<uintptr_t>(this)));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream sink;
  std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
  int code = run_cli(args);
  std::cout.rdbuf(old);
  if (out) *out = sink.str();
  return code;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// A small end-to-end fixture: catalog, domains, interactions.
void write_fixture(const TempDir& tmp) {
  write_file(tmp.path("transcripts.tsv"),
             "transcript_id\tgene_id\tlength\n"
             "a1\tgA\t300\n"
             "a2\tgA\t400\n"
             "b1\tgB\t350\n"
             "b2\tgB\t250\n"
             "c1\tgC\t500\n");
  write_file(tmp.path("domains.tsv"),
             "transcript_id\tdomain_id\n"
             "a1\tpf1\n"
             "a2\tpf2\n"
             "b1\tpf3\n"
             "b2\tpf4\n"
             "c1\tpf3\n");
  write_file(tmp.path("ddi.tsv"),
             "domain_a\tdomain_b\n"
             "pf1\tpf3\n"
             "pf2\tpf4\n");
}

}  // namespace

TEST_CASE("cli: full pipeline build-network / simulate / quant / compare") {
  TempDir tmp;
  write_fixture(tmp);

  // build-network: a1-b1, a1-c1, a2-b2
  CHECK(cli({"build-network", "--transcripts", tmp.path("transcripts.tsv"), "--domains",
             tmp.path("domains.tsv"), "--ddi", tmp.path("ddi.tsv"), "--out",
             tmp.path("network.tsv")}) == 0);
  auto net = load_network(tmp.path("network.tsv"));
  CHECK(net.edge_count() == 3);
  CHECK(net.has_edge("a1", "b1"));
  CHECK(net.has_edge("a1", "c1"));
  CHECK(net.has_edge("a2", "b2"));

  // net-stats output is key\tvalue lines
  std::string stats;
  CHECK(cli({"net-stats", "--network", tmp.path("network.tsv")}, &stats) == 0);
  CHECK(stats.find("nodes\t5") != std::string::npos);
  CHECK(stats.find("edges\t3") != std::string::npos);

  // simulate
  CHECK(cli({"simulate", "--transcripts", tmp.path("transcripts.tsv"), "--network",
             tmp.path("network.tsv"), "--total-reads", "8000", "--read-length", "75",
             "--overlap-model", "shared-prefix", "--ambiguity", "0.8", "--seed", "42",
             "--truth-out", tmp.path("truth.tsv"), "--compat-out", tmp.path("compat.tsv")}) == 0);

  // quant with both methods
  CHECK(cli({"quant", "--method", "base-em", "--transcripts", tmp.path("transcripts.tsv"),
             "--compat", tmp.path("compat.tsv"), "--read-length", "75", "--out",
             tmp.path("base.tsv")}) == 0);
  std::string quant_out;
  CHECK(cli({"quant", "--method", "net-rstq", "--transcripts", tmp.path("transcripts.tsv"),
             "--compat", tmp.path("compat.tsv"), "--read-length", "75", "--network",
             tmp.path("network.tsv"), "--lambda", "0.1", "--init", "uniform", "--out",
             tmp.path("net.tsv")},
            &quant_out) == 0);
  CHECK(quant_out.find("converged\t1") != std::string::npos);
  CHECK(load_quant(tmp.path("net.tsv")).size() == 5);

  // reg-quant
  CHECK(cli({"reg-quant", "--transcripts", tmp.path("transcripts.tsv"), "--compat",
             tmp.path("compat.tsv"), "--read-length", "75", "--network", tmp.path("network.tsv"),
             "--lambda-reg", "1.0", "--out", tmp.path("reg.tsv")}) == 0);

  // compare against the truth and against another quant
  std::string cmp;
  CHECK(cli({"compare", "--quant", tmp.path("net.tsv"), "--truth", tmp.path("truth.tsv"),
             "--transcripts", tmp.path("transcripts.tsv"), "--network", tmp.path("network.tsv"),
             "--subset", "different-neighbors"},
            &cmp) == 0);
  CHECK(cmp.rfind("correlation\t", 0) == 0);
  CHECK(cli({"compare", "--quant", tmp.path("net.tsv"), "--other", tmp.path("base.tsv"),
             "--transcripts", tmp.path("transcripts.tsv"), "--subset", "all"}) == 0);

  // randomize / delete-edges
  CHECK(cli({"randomize", "--network", tmp.path("network.tsv"), "--transcripts",
             tmp.path("transcripts.tsv"), "--seed", "9", "--out", tmp.path("rand.tsv")}) == 0);
  CHECK(load_network(tmp.path("rand.tsv")).edge_count() == 3);
  CHECK(cli({"delete-edges", "--network", tmp.path("network.tsv"), "--fraction", "0.5", "--seed",
             "4", "--out", tmp.path("cut.tsv")}) == 0);
  CHECK(load_network(tmp.path("cut.tsv")).edge_count() == 2);  // 3 - floor(1.5)
}

TEST_CASE("cli: coexpress writes bins and report") {
  TempDir tmp;
  write_fixture(tmp);
  CHECK(cli({"build-network", "--transcripts", tmp.path("transcripts.tsv"), "--domains",
             tmp.path("domains.tsv"), "--ddi", tmp.path("ddi.tsv"), "--out",
             tmp.path("network.tsv")}) == 0);
  // three "samples" from different seeds
  for (int s = 0; s < 3; ++s) {
    CHECK(cli({"simulate", "--transcripts", tmp.path("transcripts.tsv"), "--network",
               tmp.path("network.tsv"), "--total-reads", "4000", "--read-length", "75",
               "--seed", std::to_string(100 + s), "--truth-out", tmp.path("tr.tsv"),
               "--compat-out", tmp.path("cp.tsv")}) == 0);
    CHECK(cli({"quant", "--method", "base-em", "--transcripts", tmp.path("transcripts.tsv"),
               "--compat", tmp.path("cp.tsv"), "--read-length", "75", "--out",
               tmp.path("s" + std::to_string(s) + ".tsv")}) == 0);
  }
  CHECK(cli({"coexpress", "--quant", tmp.path("s0.tsv"), tmp.path("s1.tsv"), tmp.path("s2.tsv"),
             "--transcripts", tmp.path("transcripts.tsv"), "--network", tmp.path("network.tsv"),
             "--bin-size", "2", "--distance", "1", "--top-bins", "1", "--bins-out",
             tmp.path("bins.tsv"), "--report-out", tmp.path("report.tsv")}) == 0);
  std::string bins = read_file(tmp.path("bins.tsv"));
  CHECK(bins.rfind("bin\tcount\texpected\n", 0) == 0);
  std::string report = read_file(tmp.path("report.tsv"));
  CHECK(report.find("statistic\tp_value") != std::string::npos);
}

TEST_CASE("cli: exit codes distinguish validation and numerical failures") {
  TempDir tmp;
  write_fixture(tmp);

  // missing file -> validation error (1)
  CHECK(cli({"net-stats", "--network", tmp.path("nope.tsv")}) == 1);
  // malformed arguments -> parse error (1)
  CHECK(cli({"quant", "--method", "bogus"}) == 1);
  CHECK(cli({"randomize", "--network", tmp.path("network.tsv")}) == 1);  // --seed required
  // unknown subcommand
  CHECK(cli({"frobnicate"}) == 1);

  // a same-gene edge that no permutation of a two-transcript gene can fix:
  // randomize must give up with a numerical failure (2)
  write_file(tmp.path("two.tsv"),
             "transcript_id\tgene_id\tlength\n"
             "x1\tgX\t300\n"
             "x2\tgX\t300\n");
  write_file(tmp.path("badnet.tsv"), "transcript_a\ttranscript_b\nx1\tx2\n");
  CHECK(cli({"randomize", "--network", tmp.path("badnet.tsv"), "--transcripts",
             tmp.path("two.tsv"), "--seed", "1", "--out", tmp.path("o.tsv")}) == 2);

  // loading a compat file against the wrong read length -> line-numbered error
  write_file(tmp.path("c.tsv"), "gene_id\tread_id\tcompat_transcripts\ngB\tr0\tb2\n");
  CHECK(cli({"quant", "--method", "base-em", "--transcripts", tmp.path("transcripts.tsv"),
             "--compat", tmp.path("c.tsv"), "--read-length", "250", "--out",
             tmp.path("q.tsv")}) == 1);
}
