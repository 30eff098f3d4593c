#include "netrstq/cli.hpp"

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "netrstq/analysis.hpp"
#include "netrstq/common.hpp"
#include "netrstq/driver.hpp"
#include "netrstq/io.hpp"
#include "netrstq/netbuild.hpp"
#include "netrstq/regalt.hpp"
#include "netrstq/sim.hpp"

namespace netrstq {

namespace {

std::string g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void cmd_quant(const std::string& method, const std::string& transcripts_path,
               const std::string& compat_path, int read_length, const std::string& network_path,
               double lambda, const std::string& init, double outer_tol, int max_rounds,
               uint64_t seed, const std::string& out_path) {
  TranscriptCatalog catalog = load_transcripts(transcripts_path);
  CompatibilitySet compat = load_compat(compat_path, catalog, read_length);

  QuantState state;
  if (method == "base-em") {
    state = base_em_quant(catalog, compat);
  } else {
    if (network_path.empty())
      throw ValidationError("--network is required for method net-rstq");
    TranscriptNetwork net = load_network(network_path);
    NetRstqOptions opts;
    opts.lambda = lambda;
    opts.init = init == "uniform" ? QuantInit::Uniform : QuantInit::BaseEm;
    opts.outer_tol = outer_tol;
    opts.max_rounds = max_rounds;
    opts.seed = seed;
    state = net_rstq(catalog, compat, net, opts);
  }
  store_quant(out_path, catalog, state);
  std::cout << "genes\t" << catalog.gene_count() << "\nreads\t" << compat.total_reads()
            << "\nrounds\t" << state.rounds << "\nconverged\t" << (state.converged ? 1 : 0)
            << "\nlog_pseudo_likelihood\t"
            << (state.loglik_trajectory.empty() ? "nan" : g10(state.loglik_trajectory.back()))
            << "\n";
}

void cmd_reg_quant(const std::string& transcripts_path, const std::string& compat_path,
                   int read_length, const std::string& network_path, double lambda_reg,
                   double tol, int max_iter, const std::string& out_path) {
  TranscriptCatalog catalog = load_transcripts(transcripts_path);
  CompatibilitySet compat = load_compat(compat_path, catalog, read_length);
  TranscriptNetwork net = load_network(network_path);
  RegAltOptions opts;
  opts.lambda_reg = lambda_reg;
  opts.tol = tol;
  opts.max_iter = max_iter;
  QuantState state = solve_penalized(catalog, compat, net, opts);
  store_quant(out_path, catalog, state);
  std::cout << "iterations\t" << state.rounds << "\nconverged\t" << (state.converged ? 1 : 0)
            << "\nstalled\t" << (state.stalled ? 1 : 0) << "\nobjective\t"
            << g10(state.loglik_trajectory.back()) << "\n";
}

void cmd_build_network(const std::string& transcripts_path, const std::string& domains_path,
                       const std::string& ddi_path, const std::string& out_path) {
  TranscriptCatalog catalog = load_transcripts(transcripts_path);
  DomainAnnotation annot = load_domains(domains_path);
  DDITable ddi = load_ddi(ddi_path);
  TranscriptNetwork net = build_network(catalog, annot, ddi);
  store_network(out_path, net);
  std::cout << "nodes\t" << net.node_count() << "\nedges\t" << net.edge_count() << "\n";
}

void cmd_net_stats(const std::string& network_path) {
  TranscriptNetwork net = load_network(network_path);
  NetworkStats s = network_stats(net);
  std::cout << "nodes\t" << s.node_count << "\nedges\t" << s.edge_count << "\ndensity\t"
            << g10(s.density) << "\ndensity_defined\t" << (s.density_defined ? 1 : 0)
            << "\navg_degree\t" << g10(s.avg_degree) << "\navg_clustering\t"
            << g10(s.avg_clustering) << "\ndiameter\t" << s.diameter
            << "\nlargest_component\t" << s.largest_component << "\n";
}

void cmd_simulate(const std::string& transcripts_path, const std::string& network_path,
                  double poisson_mean, double sim_alpha, double noise_sigma,
                  double powerlaw_exponent, long long total_reads, int read_length,
                  const std::string& overlap_model, double ambiguity, uint64_t seed,
                  const std::string& truth_out, const std::string& compat_out) {
  TranscriptCatalog catalog = load_transcripts(transcripts_path);
  TranscriptNetwork net = load_network(network_path);
  SimOptions sopts;
  sopts.poisson_mean = poisson_mean;
  sopts.sim_alpha = sim_alpha;
  sopts.noise_sigma = noise_sigma < 0.0 ? 0.1 * poisson_mean : noise_sigma;
  sopts.powerlaw_exponent = powerlaw_exponent;
  sopts.seed = seed;
  SimTruth truth = generate_truth(catalog, net, sopts);
  store_truth(truth_out, catalog, truth);

  SampleOptions ropts;
  ropts.total_reads = total_reads;
  ropts.read_length = read_length;
  ropts.model = overlap_model == "exclusive" ? OverlapModel::Exclusive : OverlapModel::SharedPrefix;
  ropts.ambiguity = ambiguity;
  ropts.seed = seed + 1;  // distinct stream from the truth generator
  CompatibilitySet compat = sample_compat(truth, catalog, ropts);
  store_compat(compat_out, catalog, compat);
  std::cout << "genes\t" << catalog.gene_count() << "\nreads\t" << compat.total_reads() << "\n";
}

void cmd_coexpress(const std::vector<std::string>& quant_paths,
                   const std::string& transcripts_path, const std::string& network_path,
                   int bin_size, int distance, int top_bins, const std::string& bins_out,
                   const std::string& report_out) {
  TranscriptCatalog catalog = load_transcripts(transcripts_path);
  TranscriptNetwork net = load_network(network_path);
  if (quant_paths.size() < 2) throw ValidationError("need at least 2 quant files (samples)");

  ExprMatrix expr;
  expr.transcript_ids.reserve(static_cast<size_t>(catalog.transcript_count()));
  for (int t = 0; t < catalog.transcript_count(); ++t)
    expr.transcript_ids.push_back(catalog.transcript_id(t));
  expr.rows.assign(static_cast<size_t>(catalog.transcript_count()),
                   std::vector<double>(quant_paths.size(), 0.0));
  for (size_t s = 0; s < quant_paths.size(); ++s) {
    std::vector<double> pi = quant_pi_vector(load_quant(quant_paths[s]), catalog);
    for (size_t t = 0; t < pi.size(); ++t) expr.rows[t][s] = pi[t];
  }

  CoexpressionResult bins = coexpression_bins(expr, net, catalog, bin_size, distance);
  {
    std::ofstream out(bins_out, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + bins_out + "'");
    out << "bin\tcount\texpected\n";
    for (size_t i = 0; i < bins.bin_counts.size(); ++i)
      out << (i + 1) << '\t' << bins.bin_counts[i] << '\t' << g10(bins.expected_per_bin) << '\n';
  }

  ChiSquareResult chi = chi_square_enrichment(bins.bin_counts, top_bins, bin_size,
                                              bins.total_pairs, bins.total_nearby);
  {
    std::ofstream out(report_out, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + report_out + "'");
    out << "statistic\tp_value\ttop_interacting\ttop_other\trest_interacting\trest_other\t"
           "excluded_constant\twarn_small_expected\n";
    out << g10(chi.statistic) << '\t' << g10(chi.p_value) << '\t' << chi.table[0][0] << '\t'
        << chi.table[0][1] << '\t' << chi.table[1][0] << '\t' << chi.table[1][1] << '\t'
        << bins.excluded_constant << '\t' << (chi.warn_small_expected ? 1 : 0) << '\n';
  }
  std::cout << "pairs\t" << bins.total_pairs << "\nbins\t" << bins.bin_counts.size()
            << "\nstatistic\t" << g10(chi.statistic) << "\np_value\t" << g10(chi.p_value) << "\n";
}

void cmd_compare(const std::string& quant_path, const std::string& other_path,
                 const std::string& truth_path, const std::string& transcripts_path,
                 const std::string& network_path, const std::string& subset_name) {
  TranscriptCatalog catalog = load_transcripts(transcripts_path);
  std::vector<double> a = quant_pi_vector(load_quant(quant_path), catalog);
  std::vector<double> b;
  if (!truth_path.empty())
    b = load_truth(truth_path, catalog).pi;
  else if (!other_path.empty())
    b = quant_pi_vector(load_quant(other_path), catalog);
  else
    throw ValidationError("one of --truth or --other is required");

  CompareSubset subset = CompareSubset::All;
  if (subset_name == "different-neighbors") subset = CompareSubset::DifferentNeighbors;
  else if (subset_name == "all-multi-isoform") subset = CompareSubset::AllMultiIsoform;

  TranscriptNetwork net;
  bool have_net = !network_path.empty();
  if (have_net) net = load_network(network_path);
  if (subset == CompareSubset::DifferentNeighbors && !have_net)
    throw ValidationError("--network is required for subset different-neighbors");

  double corr = compare_quant(a, b, subset, catalog, have_net ? &net : nullptr);
  std::cout << "correlation\t" << g10(corr) << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Network-guided isoform transcript quantification"};
  app.require_subcommand(1);

  // quant
  auto* quant = app.add_subcommand("quant", "Estimate transcript proportions from compat data");
  std::string method = "net-rstq", transcripts, compat, network, init = "base-em", out = "quant.tsv";
  int read_length = 0, max_rounds = 100;
  double lambda = 0.1, outer_tol = 1e-6;
  uint64_t seed = 0;
  quant->add_option("--method", method)->check(CLI::IsMember({"base-em", "net-rstq"}));
  quant->add_option("--transcripts", transcripts)->required();
  quant->add_option("--compat", compat)->required();
  quant->add_option("--read-length", read_length)->required();
  quant->add_option("--network", network);
  quant->add_option("--lambda", lambda);
  quant->add_option("--init", init)->check(CLI::IsMember({"uniform", "base-em"}));
  quant->add_option("--outer-tol", outer_tol);
  quant->add_option("--max-rounds", max_rounds);
  quant->add_option("--seed", seed);
  quant->add_option("--out", out);

  // reg-quant
  auto* reg = app.add_subcommand("reg-quant", "Penalized joint estimation (network regularizer)");
  std::string r_transcripts, r_compat, r_network, r_out = "quant.tsv";
  int r_read_length = 0, r_max_iter = 2000;
  double lambda_reg = 1.0, r_tol = 1e-6;
  reg->add_option("--transcripts", r_transcripts)->required();
  reg->add_option("--compat", r_compat)->required();
  reg->add_option("--read-length", r_read_length)->required();
  reg->add_option("--network", r_network)->required();
  reg->add_option("--lambda-reg", lambda_reg);
  reg->add_option("--tol", r_tol);
  reg->add_option("--max-iter", r_max_iter);
  reg->add_option("--out", r_out);

  // build-network
  auto* build = app.add_subcommand("build-network", "Connect transcripts sharing interacting domains");
  std::string b_transcripts, b_domains, b_ddi, b_out = "network.tsv";
  build->add_option("--transcripts", b_transcripts)->required();
  build->add_option("--domains", b_domains)->required();
  build->add_option("--ddi", b_ddi)->required();
  build->add_option("--out", b_out);

  // net-stats
  auto* stats = app.add_subcommand("net-stats", "Graph statistics of a transcript network");
  std::string s_network;
  stats->add_option("--network", s_network)->required();

  // randomize
  auto* rand_cmd = app.add_subcommand("randomize", "Label-permutation randomization of a network");
  std::string z_network, z_transcripts, z_out = "network.tsv";
  uint64_t z_seed = 0;
  rand_cmd->add_option("--network", z_network)->required();
  rand_cmd->add_option("--transcripts", z_transcripts)->required();
  rand_cmd->add_option("--seed", z_seed)->required();
  rand_cmd->add_option("--out", z_out);

  // delete-edges
  auto* del = app.add_subcommand("delete-edges", "Remove a random fraction of edges");
  std::string d_network, d_out = "network.tsv";
  double d_fraction = 0.0;
  uint64_t d_seed = 0;
  del->add_option("--network", d_network)->required();
  del->add_option("--fraction", d_fraction)->required();
  del->add_option("--seed", d_seed)->required();
  del->add_option("--out", d_out);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Seeded ground truth and read-compatibility sampler");
  std::string m_transcripts, m_network, m_model = "exclusive";
  std::string m_truth_out = "truth.tsv", m_compat_out = "compat.tsv";
  double m_poisson = 50.0, m_alpha = 1.0, m_sigma = -1.0, m_powerlaw = 0.6, m_ambiguity = 0.5;
  long long m_reads = 100000;
  int m_read_length = 0;
  uint64_t m_seed = 0;
  sim->add_option("--transcripts", m_transcripts)->required();
  sim->add_option("--network", m_network)->required();
  sim->add_option("--poisson-mean", m_poisson);
  sim->add_option("--sim-alpha", m_alpha);
  sim->add_option("--noise-sigma", m_sigma, "default: 0.1 * poisson mean");
  sim->add_option("--powerlaw-exponent", m_powerlaw);
  sim->add_option("--total-reads", m_reads);
  sim->add_option("--read-length", m_read_length)->required();
  sim->add_option("--overlap-model", m_model)->check(CLI::IsMember({"exclusive", "shared-prefix"}));
  sim->add_option("--ambiguity", m_ambiguity);
  sim->add_option("--seed", m_seed)->required();
  sim->add_option("--truth-out", m_truth_out);
  sim->add_option("--compat-out", m_compat_out);

  // coexpress
  auto* coex = app.add_subcommand("coexpress", "Bin co-expressed pairs by network proximity");
  std::vector<std::string> x_quants;
  std::string x_transcripts, x_network, x_bins_out = "bins.tsv", x_report_out = "report.tsv";
  int x_bin_size = 1000, x_distance = 1, x_top_bins = 10;
  coex->add_option("--quant", x_quants)->required()->expected(-2);
  coex->add_option("--transcripts", x_transcripts)->required();
  coex->add_option("--network", x_network)->required();
  coex->add_option("--bin-size", x_bin_size);
  coex->add_option("--distance", x_distance)->check(CLI::IsMember({1, 2}));
  coex->add_option("--top-bins", x_top_bins);
  coex->add_option("--bins-out", x_bins_out);
  coex->add_option("--report-out", x_report_out);

  // compare
  auto* cmp = app.add_subcommand("compare", "Correlation between two quantifications");
  std::string c_quant, c_other, c_truth, c_transcripts, c_network, c_subset = "all";
  cmp->add_option("--quant", c_quant)->required();
  cmp->add_option("--other", c_other);
  cmp->add_option("--truth", c_truth);
  cmp->add_option("--transcripts", c_transcripts)->required();
  cmp->add_option("--network", c_network);
  cmp->add_option("--subset", c_subset)
      ->check(CLI::IsMember({"different-neighbors", "all-multi-isoform", "all"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // parse failures are validation errors
  }

  try {
    if (*quant)
      cmd_quant(method, transcripts, compat, read_length, network, lambda, init, outer_tol,
                max_rounds, seed, out);
    else if (*reg)
      cmd_reg_quant(r_transcripts, r_compat, r_read_length, r_network, lambda_reg, r_tol,
                    r_max_iter, r_out);
    else if (*build)
      cmd_build_network(b_transcripts, b_domains, b_ddi, b_out);
    else if (*stats)
      cmd_net_stats(s_network);
    else if (*rand_cmd)
      store_network(z_out, randomize_network(load_network(z_network),
                                             load_transcripts(z_transcripts), z_seed));
    else if (*del)
      store_network(d_out, delete_edges(load_network(d_network), d_fraction, d_seed));
    else if (*sim)
      cmd_simulate(m_transcripts, m_network, m_poisson, m_alpha, m_sigma, m_powerlaw, m_reads,
                   m_read_length, m_model, m_ambiguity, m_seed, m_truth_out, m_compat_out);
    else if (*coex)
      cmd_coexpress(x_quants, x_transcripts, x_network, x_bin_size, x_distance, x_top_bins,
                    x_bins_out, x_report_out);
    else if (*cmp)
      cmd_compare(c_quant, c_other, c_truth, c_transcripts, c_network, c_subset);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace netrstq
