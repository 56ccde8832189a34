#include <doctest.h>

#include <cmath>

#include "wavescat/gl.hpp"

using namespace wavescat;

TEST_CASE("lobatto rules integrate and differentiate exactly") {
  for (int p = 1; p <= 4; ++p) {
    const LobattoRule& r = lobatto_rule(p);
    double sum = 0;
    for (int q = 0; q <= p; ++q) sum += r.weight[size_t(q)];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    // exact for degree 2p-1: check monomials
    for (int d = 0; d <= 2 * p - 1; ++d) {
      double quad = 0;
      for (int q = 0; q <= p; ++q)
        quad += r.weight[size_t(q)] * std::pow(r.node[size_t(q)], d);
      CHECK(quad == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
    // derivative matrix is exact for the basis polynomials
    for (int d = 0; d <= p; ++d)
      for (int i = 0; i <= p; ++i) {
        double der = 0;
        for (int j = 0; j <= p; ++j)
          der += r.diff[i][j] * std::pow(r.node[size_t(j)], d);
        double exact = d == 0 ? 0.0 : d * std::pow(r.node[size_t(i)], d - 1);
        CHECK(der == doctest::Approx(exact).epsilon(1e-12));
      }
    // lagrange basis is nodal
    for (int i = 0; i <= p; ++i)
      for (int j = 0; j <= p; ++j)
        CHECK(r.lagrange(j, r.node[size_t(i)]) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
  }
}

TEST_CASE("legendre rule exactness") {
  for (int n : {2, 4, 8}) {
    LegendreRule r = legendre_rule(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double quad = 0;
      for (int q = 0; q < n; ++q)
        quad += r.weight[size_t(q)] * std::pow(r.node[size_t(q)], d);
      CHECK(quad == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}
