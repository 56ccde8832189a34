#include "wavescat/gl.hpp"

#include <cmath>
#include <stdexcept>

namespace wavescat {

namespace {

LobattoRule make_rule(int degree) {
  LobattoRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      r.node = {0.0, 1.0};
      r.weight = {0.5, 0.5};
      break;
    case 2:
      r.node = {0.0, 0.5, 1.0};
      r.weight = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
      break;
    case 3: {
      const double a = std::sqrt(1.0 / 5.0);
      r.node = {0.0, 0.5 * (1.0 - a), 0.5 * (1.0 + a), 1.0};
      r.weight = {1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0};
      break;
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0);
      r.node = {0.0, 0.5 * (1.0 - a), 0.5, 0.5 * (1.0 + a), 1.0};
      r.weight = {1.0 / 20.0, 49.0 / 180.0, 32.0 / 90.0, 49.0 / 180.0,
                  1.0 / 20.0};
      break;
    }
    default:
      throw std::invalid_argument("lobatto_rule: degree must be in [1,4]");
  }
  // differentiation matrix via barycentric weights
  const int n = degree + 1;
  std::array<double, 5> bary{};
  for (int j = 0; j < n; ++j) {
    double b = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != j) b *= (r.node[j] - r.node[k]);
    bary[j] = 1.0 / b;
  }
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      r.diff[i][j] = (bary[j] / bary[i]) / (r.node[i] - r.node[j]);
      diag -= r.diff[i][j];
    }
    r.diff[i][i] = diag;
  }
  return r;
}

}  // namespace

const LobattoRule& lobatto_rule(int degree) {
  static const LobattoRule rules[4] = {make_rule(1), make_rule(2), make_rule(3),
                                       make_rule(4)};
  if (degree < 1 || degree > 4)
    throw std::invalid_argument("lobatto_rule: degree must be in [1,4]");
  return rules[degree - 1];
}

double LobattoRule::lagrange(int j, double t) const {
  double v = 1.0;
  for (int k = 0; k <= degree; ++k)
    if (k != j) v *= (t - node[k]) / (node[j] - node[k]);
  return v;
}

LegendreRule legendre_rule(int n) {
  LegendreRule r;
  r.node.resize(n);
  r.weight.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n, starting from the Chebyshev estimate
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    // map [-1,1] -> [0,1]
    r.node[n - 1 - i] = 0.5 * (x + 1.0);
    r.weight[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace wavescat
