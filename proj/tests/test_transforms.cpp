#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "netrstq/common.hpp"
#include "netrstq/transforms.hpp"

using namespace netrstq;
using testhelp::make_catalog;

TEST_CASE("relative abundance: single transcript") {
  std::vector<double> p{1.0};
  std::vector<int> l{500};
  auto rho = relative_abundance(p, l);
  CHECK(rho.size() == 1);
  CHECK(rho[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("relative abundance: two transcripts, direct evaluation") {
  std::vector<double> p{0.5, 0.5};
  std::vector<int> l{100, 200};
  auto rho = relative_abundance(p, l);
  CHECK(rho[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(rho[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("relative abundance: scalar oracle cross-check") {
  std::vector<double> p{0.2, 0.3, 0.5};
  std::vector<int> l{100, 150, 250};
  // independent scalar evaluation
  double w0 = 0.2 / 100, w1 = 0.3 / 150, w2 = 0.5 / 250;
  double total = w0 + w1 + w2;
  auto rho = relative_abundance(p, l);
  CHECK(rho[0] == doctest::Approx(w0 / total).epsilon(1e-14));
  CHECK(rho[1] == doctest::Approx(w1 / total).epsilon(1e-14));
  CHECK(rho[2] == doctest::Approx(w2 / total).epsilon(1e-14));
  CHECK(rho[0] + rho[1] + rho[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("relative abundance: degenerate vector rejected") {
  std::vector<double> p{0.0, 0.0};
  std::vector<int> l{100, 200};
  CHECK_THROWS_AS((void)relative_abundance(p, l), NumericalError);
}

TEST_CASE("expressions: zero reads and direct evaluation") {
  std::vector<int> l1{500};
  CHECK(expressions(std::vector<double>{1.0}, 0, l1)[0] == 0.0);
  std::vector<int> l2{100, 200};
  auto pi = expressions(std::vector<double>{0.5, 0.5}, 100, l2);
  CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pi[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("expressions: sum pi_k * l_k recovers the read count") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    int K = 2 + static_cast<int>(unit(rng) * 5);
    std::vector<double> p(static_cast<size_t>(K));
    std::vector<int> l(static_cast<size_t>(K));
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      p[static_cast<size_t>(k)] = unit(rng) + 1e-3;
      total += p[static_cast<size_t>(k)];
      l[static_cast<size_t>(k)] = 100 + static_cast<int>(unit(rng) * 1000);
    }
    for (double& v : p) v /= total;
    auto pi = expressions(p, 1000, l);
    double back = 0.0;
    for (int k = 0; k < K; ++k) back += pi[static_cast<size_t>(k)] * l[static_cast<size_t>(k)];
    CHECK(back == doctest::Approx(1000.0).epsilon(1e-9));
  }
}

TEST_CASE("compute_phi: isolated transcript and direct evaluation") {
  auto catalog = make_catalog({{"gA", {{"a1", 2}}},
                               {"gB", {{"b1", 100}, {"b2", 100}}},
                               {"gC", {{"c1", 100}}},
                               {"gD", {{"d1", 100}}},
                               {"gE", {{"e1", 100}}}});
  TranscriptNetwork net;
  net.add_edge("a1", "b1");
  net.add_edge("a1", "c1");
  net.add_edge("a1", "d1");
  net.add_edge("a1", "e1");

  // pi by catalog order: a1, b1, b2, c1, d1, e1
  std::vector<double> pi{0.0, 10.0, 999.0, 20.0, 30.0, 40.0};
  CHECK(compute_phi("a1", net, catalog, pi) == doctest::Approx(2.0 * 25.0).epsilon(1e-15));
  CHECK(compute_phi("b2", net, catalog, pi) == 0.0);  // no neighbors
}

TEST_CASE("compute_phi: dot-product oracle on a 3-node toy and linearity") {
  auto catalog = make_catalog({{"g1", {{"t1", 150}}}, {"g2", {{"t2", 200}}}, {"g3", {{"t3", 50}}}});
  TranscriptNetwork net;
  net.add_edge("t1", "t2");
  net.add_edge("t1", "t3");
  std::vector<double> pi{3.0, 7.5, 1.25};

  // independent evaluation: l * (S_row . pi) / |nb|
  double expect_t1 = 150.0 * ((0 * 3.0 + 1 * 7.5 + 1 * 1.25) / 2.0);
  double expect_t2 = 200.0 * ((1 * 3.0) / 1.0);
  CHECK(compute_phi("t1", net, catalog, pi) == doctest::Approx(expect_t1).epsilon(1e-14));
  CHECK(compute_phi("t2", net, catalog, pi) == doctest::Approx(expect_t2).epsilon(1e-14));

  // phi is linear in pi
  std::vector<double> scaled = pi;
  for (double& v : scaled) v *= 4.25;
  CHECK(compute_phi("t1", net, catalog, scaled) ==
        doctest::Approx(4.25 * compute_phi("t1", net, catalog, pi)).epsilon(1e-12));
}
