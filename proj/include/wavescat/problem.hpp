#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace wavescat {

enum class MaterialCase { homogeneous, bump_1d, bump_2d };
enum class SourceKind { plane_wavelet, external_point };

// Physical axis-aligned box, used for scatterer walls and support regions.
struct Box {
  std::array<double, 2> lo{0, 0};
  std::array<double, 2> hi{0, 0};
};

// Scattering problem: geometry, materials, frequency, incidence and source.
struct ProblemSpec {
  int dim = 1;
  double omega = 0;                       // angular frequency, > 0
  double c0 = 1.0;                        // exterior wave speed
  std::array<double, 2> direction{1, 0};  // unit incidence direction
  std::array<double, 2> half_width{1, 1}; // L_i of the region of interest
  double pml_width = 0;                   // W; 0 means c0*pi/omega
  MaterialCase materials = MaterialCase::bump_1d;
  SourceKind source = SourceKind::plane_wavelet;
  std::array<double, 2> source_center{0.5, 0.5};
  double alpha0 = 1.0, beta0 = 1.0;
  std::vector<Box> scatterer;             // sound-soft walls, may be empty

  double xi0() const;                     // wavelet support half-width (pi)
  double alpha(std::array<double, 2> x) const;
  double beta(std::array<double, 2> x) const;
  // bounding box of the inhomogeneity (alpha != alpha0 or beta != beta0),
  // united with the scatterer and the external source support
  Box source_region() const;
  double t0() const;  // time the forcing first becomes active
  double tf() const;  // time the forcing is gone for good
  double resolved_pml_width() const;

  void validate() const;
};

// Wavelet profile psi: compactly supported on (-pi, pi), normalised so that
// the Fourier transform at -1 equals one.
double psi(double xi);
double psi_prime(double xi);
double psi_second(double xi);

// u_I(x, t) = omega * psi(omega * (t - r.x / c0))
double incoming_wavelet(std::array<double, 2> x, double t,
                        const ProblemSpec& spec);
// spatial gradient of u_I (components along the incidence direction)
std::array<double, 2> incoming_wavelet_gradient(std::array<double, 2> x,
                                                double t,
                                                const ProblemSpec& spec);

// named material cases
std::pair<double, double> material(MaterialCase c, std::array<double, 2> x);

// smeared point source F centred at spec.source_center, support of one
// wavelength in diameter
double point_source_F(std::array<double, 2> x, const ProblemSpec& spec);

// int e^{i s xi} psi(xi) dxi by composite Gauss-Legendre quadrature;
// the normalisation requires the value 1 at s = 1.
std::complex<double> psi_fourier(double s, int panels = 64);

// time transform of the incoming wavelet at frequency -omega, by quadrature
// over the support slab; equals e^{i omega r.x / c0} up to quadrature error
std::complex<double> wavelet_time_transform(std::array<double, 2> x,
                                            const ProblemSpec& spec);

}  // namespace wavescat
