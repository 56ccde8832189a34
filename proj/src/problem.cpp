#include "wavescat/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "wavescat/gl.hpp"

namespace wavescat {

namespace {
const double kPi = M_PI;
// psi(xi) = (xi-pi)^4 (xi+pi)^4 / denom on (-pi, pi)
const double kPsiDenom = 3840.0 * kPi * (21.0 - 2.0 * kPi * kPi);

double bump(double r) {
  // 1 + 3 (1-2r)^2 (1+2r)^2 for |r| <= 1/2
  double a = 1.0 - 2.0 * r, b = 1.0 + 2.0 * r;
  return 1.0 + 3.0 * a * a * b * b;
}
}  // namespace

double psi(double xi) {
  if (std::abs(xi) >= kPi) return 0.0;
  double a = xi - kPi, b = xi + kPi;
  double a2 = a * a, b2 = b * b;
  return (a2 * a2) * (b2 * b2) / kPsiDenom;
}

double psi_prime(double xi) {
  if (std::abs(xi) >= kPi) return 0.0;
  double q = xi * xi - kPi * kPi;  // (xi-pi)(xi+pi)
  return 8.0 * xi * q * q * q / kPsiDenom;
}

double psi_second(double xi) {
  if (std::abs(xi) >= kPi) return 0.0;
  double q = xi * xi - kPi * kPi;
  return (8.0 * q * q * q + 48.0 * xi * xi * q * q) / kPsiDenom;
}

double ProblemSpec::xi0() const { return kPi; }

double ProblemSpec::alpha(std::array<double, 2> x) const {
  return material(materials, x).first;
}

double ProblemSpec::beta(std::array<double, 2> x) const {
  return material(materials, x).second;
}

std::pair<double, double> material(MaterialCase c, std::array<double, 2> x) {
  switch (c) {
    case MaterialCase::homogeneous:
      return {1.0, 1.0};
    case MaterialCase::bump_1d: {
      double r = std::abs(x[0]);
      return {r < 0.5 ? bump(r) : 1.0, 1.0};
    }
    case MaterialCase::bump_2d: {
      double r = std::hypot(x[0], x[1]);
      return {r <= 0.5 ? bump(r) : 1.0, 1.0};
    }
  }
  throw std::invalid_argument("material: unknown case");
}

Box ProblemSpec::source_region() const {
  Box b{{0, 0}, {0, 0}};
  bool first = true;
  auto merge = [&](const Box& o) {
    if (first) {
      b = o;
      first = false;
      return;
    }
    for (int ax = 0; ax < dim; ++ax) {
      b.lo[size_t(ax)] = std::min(b.lo[size_t(ax)], o.lo[size_t(ax)]);
      b.hi[size_t(ax)] = std::max(b.hi[size_t(ax)], o.hi[size_t(ax)]);
    }
  };
  if (materials == MaterialCase::bump_1d || materials == MaterialCase::bump_2d)
    merge(Box{{-0.5, -0.5}, {0.5, 0.5}});
  if (source == SourceKind::external_point) {
    double r = kPi * c0 / omega;  // lambda / 2
    merge(Box{{source_center[0] - r, source_center[1] - r},
              {source_center[0] + r, source_center[1] + r}});
  }
  for (const Box& s : scatterer) merge(s);
  if (first) return Box{{0, 0}, {0, 0}};
  return b;
}

double ProblemSpec::t0() const {
  if (source == SourceKind::external_point) return -xi0() / omega;
  Box b = source_region();
  double inf_rx = 0;
  for (int ax = 0; ax < dim; ++ax) {
    double d = direction[size_t(ax)];
    inf_rx += std::min(d * b.lo[size_t(ax)], d * b.hi[size_t(ax)]);
  }
  return inf_rx / c0 - xi0() / omega;
}

double ProblemSpec::tf() const {
  if (source == SourceKind::external_point) return xi0() / omega;
  Box b = source_region();
  double sup_rx = 0;
  for (int ax = 0; ax < dim; ++ax) {
    double d = direction[size_t(ax)];
    sup_rx += std::max(d * b.lo[size_t(ax)], d * b.hi[size_t(ax)]);
  }
  return sup_rx / c0 + xi0() / omega;
}

double ProblemSpec::resolved_pml_width() const {
  return pml_width > 0 ? pml_width : c0 * kPi / omega;
}

void ProblemSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("spec: dim must be 1 or 2");
  if (!(omega > 0)) throw std::invalid_argument("spec: omega must be positive");
  if (!(c0 > 0)) throw std::invalid_argument("spec: c0 must be positive");
  double n2 = direction[0] * direction[0];
  if (dim == 2) n2 += direction[1] * direction[1];
  if (std::abs(n2 - 1.0) > 1e-14)
    throw std::invalid_argument("spec: direction must have unit norm");
  if (!(resolved_pml_width() > 0))
    throw std::invalid_argument("spec: PML width must be positive");
  if (source == SourceKind::external_point && dim != 2)
    throw std::invalid_argument("spec: point source requires dim 2");
}

double incoming_wavelet(std::array<double, 2> x, double t,
                        const ProblemSpec& spec) {
  double rx = spec.direction[0] * x[0];
  if (spec.dim == 2) rx += spec.direction[1] * x[1];
  return spec.omega * psi(spec.omega * (t - rx / spec.c0));
}

std::array<double, 2> incoming_wavelet_gradient(std::array<double, 2> x,
                                                double t,
                                                const ProblemSpec& spec) {
  double rx = spec.direction[0] * x[0];
  if (spec.dim == 2) rx += spec.direction[1] * x[1];
  double dpsi = psi_prime(spec.omega * (t - rx / spec.c0));
  double factor = -spec.omega * spec.omega * dpsi / spec.c0;
  return {factor * spec.direction[0],
          spec.dim == 2 ? factor * spec.direction[1] : 0.0};
}

double point_source_F(std::array<double, 2> x, const ProblemSpec& spec) {
  double lambda = 2.0 * kPi * spec.c0 / spec.omega;
  double rho = std::hypot(x[0] - spec.source_center[0],
                          x[1] - spec.source_center[1]);
  double xi = rho / (0.5 * lambda);
  if (xi >= 1.0) return 0.0;
  double q = xi * xi - 1.0;
  return 200.0 / (lambda * lambda) * (q * q * q * q);
}

std::complex<double> psi_fourier(double s, int panels) {
  LegendreRule rule = legendre_rule(8);
  std::complex<double> sum = 0.0;
  const double w = 2.0 * kPi / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = -kPi + p * w;
    for (size_t q = 0; q < rule.node.size(); ++q) {
      double xi = lo + w * rule.node[q];
      sum += w * rule.weight[q] * psi(xi) *
             std::exp(std::complex<double>(0.0, s * xi));
    }
  }
  return sum;
}

std::complex<double> wavelet_time_transform(std::array<double, 2> x,
                                            const ProblemSpec& spec) {
  // int e^{i omega t} u_I(x,t) dt over the support slab around t = r.x/c0
  double rx = spec.direction[0] * x[0];
  if (spec.dim == 2) rx += spec.direction[1] * x[1];
  double tc = rx / spec.c0;
  double half = spec.xi0() / spec.omega;
  LegendreRule rule = legendre_rule(8);
  const int panels = 64;
  const double w = 2.0 * half / panels;
  std::complex<double> sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    double lo = tc - half + p * w;
    for (size_t q = 0; q < rule.node.size(); ++q) {
      double t = lo + w * rule.node[q];
      sum += w * rule.weight[q] * incoming_wavelet(x, t, spec) *
             std::exp(std::complex<double>(0.0, spec.omega * t));
    }
  }
  return sum;
}

}  // namespace wavescat
