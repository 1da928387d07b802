#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hpeig {

enum class Provenance { Exact, Published, SelfComputed };

std::string_view to_string(Provenance p);

struct ReferenceEntry {
  double value = 0.0;
  int multiplicity = 1;
  int digits = 15;  ///< significant digits that can be trusted
  Provenance provenance = Provenance::Exact;
};

struct ReferenceSpectrum {
  std::vector<ReferenceEntry> entries;  ///< ascending

  /// The first `count` eigenvalues with multiplicities expanded.
  /// Throws ArgumentError if the spectrum is shorter.
  [[nodiscard]] std::vector<double> values(int count) const;
  [[nodiscard]] int size() const;
};

/// π²(i² + j²): Dirichlet eigenvalues of the unit square.
double square_dirichlet(int i, int j);
/// 16π²/9 (m² + mn + n²): Dirichlet eigenvalues of the unit equilateral triangle.
double triangle_dirichlet(int m, int n);

/// Lowest `count` eigenvalues (with multiplicity) of the square with Dirichlet or,
/// skipping the zero eigenvalue, Neumann conditions; and of the triangle.
std::vector<double> square_dirichlet_lowest(int count);
std::vector<double> square_neumann_lowest(int count);
std::vector<double> triangle_dirichlet_lowest(int count);

/// J_ν(x) by its ascending series summed in 50-digit arithmetic. ν >= -1/2, 0 <= x <= 60.
double bessel_j(double nu, double x);

/// m-th positive root of J_ν: scan [0.1, 60] in steps of 0.1, then bisect.
double bessel_root(double nu, int m);

/// Reference spectrum by key: square_dirichlet, square_neumann, triangle, triangle_hole,
/// reaction (parameter κ = 10 or 100), diffusion (parameter a = 10 or 100), slit_square,
/// slit_disk, slit_circle_second. Throws ArgumentError for unknown keys.
ReferenceSpectrum registry(std::string_view key, double parameter = 0.0);

struct ReferenceCheck {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double relative_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Internal cross-checks of the reference data (Bessel roots vs tabulated values,
/// closed forms, registry vs formulas).
std::vector<ReferenceCheck> verify_references();

} // namespace hpeig
