#pragma once

#include <array>
#include <vector>

namespace wavescat {

// Gauss-Lobatto rule on the reference interval [0,1] for degree-p elements:
// p+1 points including both endpoints, exact for polynomials of degree 2p-1.
struct LobattoRule {
  int degree = 0;
  std::array<double, 5> node{};
  std::array<double, 5> weight{};
  // diff[i][j] = l_j'(node[i]) for the Lagrange basis on the rule's nodes
  std::array<std::array<double, 5>, 5> diff{};

  int npts() const { return degree + 1; }
  double lagrange(int j, double t) const;
};

// degree in [1,4]
const LobattoRule& lobatto_rule(int degree);

// Gauss-Legendre rule on [0,1] with n points (exact to degree 2n-1).
struct LegendreRule {
  std::vector<double> node, weight;
};
LegendreRule legendre_rule(int n);

}  // namespace wavescat
