#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "netrstq/analysis.hpp"
#include "netrstq/common.hpp"

using namespace netrstq;
using testhelp::make_catalog;

namespace {

ExprMatrix random_matrix(std::mt19937_64& rng, const TranscriptCatalog& catalog, int samples) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ExprMatrix m;
  for (int t = 0; t < catalog.transcript_count(); ++t) {
    m.transcript_ids.push_back(catalog.transcript_id(t));
    std::vector<double> row(static_cast<size_t>(samples));
    for (double& v : row) v = 100.0 * unit(rng);
    m.rows.push_back(std::move(row));
  }
  return m;
}

TranscriptCatalog ten_singletons() {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, int>>>> layout;
  for (int i = 0; i < 10; ++i)
    layout.push_back({"g" + std::to_string(i), {{"t" + std::to_string(i), 100}}});
  return make_catalog(layout);
}

}  // namespace

TEST_CASE("coexpression_bins: fully connected and empty networks") {
  auto catalog = ten_singletons();
  std::mt19937_64 rng(71);
  ExprMatrix m = random_matrix(rng, catalog, 6);

  TranscriptNetwork full;
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j)
      full.add_edge("t" + std::to_string(i), "t" + std::to_string(j));
  auto r = coexpression_bins(m, full, catalog, 5, 1);
  CHECK(r.bin_counts.size() == 9);  // 45 pairs / 5
  for (long long c : r.bin_counts) CHECK(c == 5);

  TranscriptNetwork empty;
  auto r0 = coexpression_bins(m, empty, catalog, 5, 1);
  for (long long c : r0.bin_counts) CHECK(c == 0);
}

TEST_CASE("coexpression_bins: brute-force pair enumeration oracle") {
  auto catalog = ten_singletons();
  std::mt19937_64 rng(73);
  ExprMatrix m = random_matrix(rng, catalog, 5);
  TranscriptNetwork net;
  std::uniform_int_distribution<int> pick(0, 9);
  for (int e = 0; e < 12; ++e) {
    int a = pick(rng), b = pick(rng);
    if (a != b) net.add_edge("t" + std::to_string(a), "t" + std::to_string(b));
  }

  auto result = coexpression_bins(m, net, catalog, 4, 1);

  // oracle: enumerate, correlate, sort, bin
  struct P {
    double c;
    int a, b;
  };
  std::vector<P> pairs;
  for (int a = 0; a < 10; ++a)
    for (int b = a + 1; b < 10; ++b)
      pairs.push_back({testhelp::oracle_pearson(m.rows[static_cast<size_t>(a)],
                                                m.rows[static_cast<size_t>(b)]),
                       a, b});
  std::sort(pairs.begin(), pairs.end(), [](const P& x, const P& y) { return x.c > y.c; });
  size_t bins = pairs.size() / 4;
  std::vector<long long> expect(bins, 0);
  long long nearby_total = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    bool nearby = net.has_edge("t" + std::to_string(pairs[i].a), "t" + std::to_string(pairs[i].b));
    nearby_total += nearby;
    if (i < bins * 4 && nearby) ++expect[i / 4];
  }
  CHECK(result.bin_counts == expect);
  CHECK(result.total_nearby == nearby_total);
  CHECK(result.total_pairs == 45);
  // bin counts sum to the nearby pairs among the binned prefix
  long long sum = 0;
  for (long long c : result.bin_counts) sum += c;
  CHECK(sum <= result.total_nearby);
}

TEST_CASE("coexpression_bins: constant transcripts are excluded and counted") {
  auto catalog = ten_singletons();
  std::mt19937_64 rng(79);
  ExprMatrix m = random_matrix(rng, catalog, 4);
  m.rows[3] = {2.0, 2.0, 2.0, 2.0};
  m.rows[7] = {0.0, 0.0, 0.0, 0.0};
  TranscriptNetwork empty;
  auto r = coexpression_bins(m, empty, catalog, 4, 1);
  CHECK(r.excluded_constant == 2);
  CHECK(r.total_pairs == 28);  // C(8,2)
}

TEST_CASE("coexpression_bins: distance 2 uses the closure") {
  auto catalog = ten_singletons();
  std::mt19937_64 rng(83);
  ExprMatrix m = random_matrix(rng, catalog, 4);
  TranscriptNetwork path;  // t0 - t1 - t2
  path.add_edge("t0", "t1");
  path.add_edge("t1", "t2");
  auto d1 = coexpression_bins(m, path, catalog, 45, 1);
  auto d2 = coexpression_bins(m, path, catalog, 45, 2);
  CHECK(d1.bin_counts[0] == 2);
  CHECK(d2.bin_counts[0] == 3);  // closure adds (t0, t2)
}

TEST_CASE("chi_square_enrichment: identical rates give statistic 0") {
  // 2 interacting per bin of 10, everywhere
  std::vector<long long> bins{2, 2, 2, 2, 2, 2};
  auto r = chi_square_enrichment(bins, 3, 10, 60, 12);
  CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chi_square_enrichment: strong synthetic enrichment is significant") {
  // 73 interactions per 1000 in the top bins, ~30 in the rest
  std::vector<long long> bins(10, 73);
  long long total_pairs = 400000;
  long long total_inter = 730 + (400000 - 10000) * 30 / 1000;
  auto r = chi_square_enrichment(bins, 10, 1000, total_pairs, total_inter);
  CHECK(r.statistic > 100.0);
  CHECK(r.p_value < 1e-10);
  CHECK_FALSE(r.warn_small_expected);
}

TEST_CASE("chi_square_enrichment: all-interacting margin degenerates to 0") {
  std::vector<long long> bins{10, 10};
  auto r = chi_square_enrichment(bins, 1, 10, 20, 20);  // every pair interacts
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("chi_square_enrichment: matches the textbook oracle on random tables") {
  std::mt19937_64 rng(89);
  std::uniform_int_distribution<long long> cell(1, 5000);
  for (int rep = 0; rep < 50; ++rep) {
    long long a = cell(rng), b = cell(rng), c = cell(rng), d = cell(rng);
    // encode the table: one top bin holding a interacting of a+b pairs
    std::vector<long long> bins{a};
    auto r = chi_square_enrichment(bins, 1, static_cast<int>(a + b), a + b + c + d, a + c);
    double expect = testhelp::oracle_chi_square(a, b, c, d);
    CHECK(r.statistic == doctest::Approx(expect).epsilon(1e-9));
    // row swap: exchange the top and rest strata
    std::vector<long long> bins_t{c};
    auto rt = chi_square_enrichment(bins_t, 1, static_cast<int>(c + d), a + b + c + d, a + c);
    CHECK(rt.statistic == doctest::Approx(r.statistic).epsilon(1e-9));
    // column swap: relabel interacting as not-interacting
    std::vector<long long> bins_c{b};
    auto rc = chi_square_enrichment(bins_c, 1, static_cast<int>(a + b), a + b + c + d, b + d);
    CHECK(rc.statistic == doctest::Approx(r.statistic).epsilon(1e-9));
  }
}

TEST_CASE("compare_quant: identity, symmetry, degenerate input") {
  auto catalog = make_catalog({{"A", {{"a1", 100}, {"a2", 100}}},
                               {"B", {{"b1", 100}, {"b2", 100}}}});
  std::vector<double> x{5.0, 1.0, 2.0, 3.0};
  std::vector<double> y{4.0, 2.0, 2.5, 2.0};
  CHECK(compare_quant(x, x, CompareSubset::All, catalog, nullptr) == doctest::Approx(1.0));
  CHECK(compare_quant(x, y, CompareSubset::All, catalog, nullptr) ==
        doctest::Approx(compare_quant(y, x, CompareSubset::All, catalog, nullptr)).epsilon(1e-14));
  std::vector<double> constant{1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)compare_quant(x, constant, CompareSubset::All, catalog, nullptr),
                  NumericalError);
}

TEST_CASE("compare_quant: subsets select the expected transcripts") {
  auto catalog = make_catalog({{"A", {{"a1", 100}, {"a2", 100}}},
                               {"B", {{"b1", 100}, {"b2", 100}}},
                               {"C", {{"c1", 100}}}});
  TranscriptNetwork net;
  net.add_edge("a1", "c1");  // a1 and a2 now differ in neighbors; b1/b2 do not
  std::vector<double> x{5.0, 1.0, 2.0, 3.0, 9.0};
  std::vector<double> y{5.5, 0.5, 2.0, 3.5, 1.0};

  // different-neighbors covers only gene A; with two points the correlation of
  // distinct values is +-1
  double dn = compare_quant(x, y, CompareSubset::DifferentNeighbors, catalog, &net);
  CHECK(std::abs(dn) == doctest::Approx(1.0).epsilon(1e-12));
  // all-multi-isoform covers genes A and B
  double mi = compare_quant(x, y, CompareSubset::AllMultiIsoform, catalog, &net);
  CHECK(std::isfinite(mi));
  CHECK(std::abs(mi - dn) > 1e-6);
  // network required for the neighbor-based subset
  CHECK_THROWS_AS(
      (void)compare_quant(x, y, CompareSubset::DifferentNeighbors, catalog, nullptr),
      ValidationError);
  // empty subset: all genes single-isoform
  auto singles = make_catalog({{"A", {{"a1", 100}}}});
  std::vector<double> one{1.0};
  CHECK_THROWS_AS((void)compare_quant(one, one, CompareSubset::AllMultiIsoform, singles, nullptr),
                  ValidationError);
}
