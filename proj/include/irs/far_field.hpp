#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "irs/em_core.hpp"
#include "irs/gradient_design.hpp"
#include "irs/unit_cell.hpp"

namespace irs {

struct ApertureElement {
  double x;      // centre, m
  double width;  // m
  cplx gamma;
};

/// Line aperture along the gradient axis, x-sorted and non-overlapping.
class ApertureProfile {
 public:
  explicit ApertureProfile(std::vector<ApertureElement> elements);

  /// n equal elements of the given width abutting from x = 0.
  static ApertureProfile uniform(int n, double width, cplx gamma);

  std::span<const ApertureElement> elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  /// Sum of element widths.
  double length() const noexcept;
  /// Same elements with every gamma replaced; gamma = -1 gives the PEC plate.
  ApertureProfile with_uniform_gamma(cplx gamma) const;

 private:
  std::vector<ApertureElement> elements_;
};

/// Strictly increasing observation angles in [-pi/2, pi/2].
class AngleGrid {
 public:
  explicit AngleGrid(std::vector<double> radians);
  static AngleGrid degrees(double start, double stop, double step);
  /// -90..90 deg in 0.1 deg steps.
  static AngleGrid standard();

  std::span<const double> radians() const noexcept { return theta_; }
  std::size_t size() const noexcept { return theta_.size(); }

 private:
  std::vector<double> theta_;
};

struct AperturePattern {
  std::vector<double> theta;  // rad
  std::vector<cplx> amplitude;
  Frequency frequency;
  Angle theta_i;
  /// |E| of the equal-aperture PEC plate at its specular peak.
  double reference_level;
};

/// Reflection coefficient of a cell as a function of patch size and frequency.
using CellResponse = std::function<cplx(double patch_size, Frequency f)>;

/// Frequency-independent response read from a tabulated curve.
CellResponse curve_response(PhaseCurve curve);
/// Re-evaluates the unit-cell model at every frequency.
CellResponse model_response(LayerStack stack, CellGeometry geometry, Angle theta_i = {},
                            Polarization pol = Polarization::TE);

/// Tiles the supercell `tiles` times along x; element n of tile t sits at
/// t P + (n + 1/2) pitch with width pitch.
ApertureProfile build_profile(const SupercellSpec& spec, const PhaseCurve& curve, int tiles);
ApertureProfile build_profile(const SupercellSpec& spec, const CellResponse& response,
                              Frequency f, int tiles);

/// Single-direction evaluation of the aperture sum
///   E = sum_n gamma_n w_n sinc(k0 w_n u / 2) exp(j k0 x_n u),  u = sin(theta) - sin(theta_i)
cplx aperture_field(const ApertureProfile& profile, double k0, double u);

/// OpenMP kernel over the angle grid.
AperturePattern scattered_pattern(const ApertureProfile& profile, Angle theta_i, Frequency f,
                                  const AngleGrid& grid = AngleGrid::standard());

namespace reference {
/// Serial evaluation of the same sum; kept as the test oracle for the kernel.
AperturePattern scattered_pattern(const ApertureProfile& profile, Angle theta_i, Frequency f,
                                  const AngleGrid& grid = AngleGrid::standard());
}  // namespace reference

/// Grid angle of maximum |E|; ties go to the smaller |theta|.
Angle peak_angle(const AperturePattern& p);
std::size_t peak_index(const AperturePattern& p);

struct Directivity {
  double linear;
  double db;
};

/// max |E|^2 over the grid-averaged |E|^2 (line-aperture convention).
Directivity peak_directivity(const AperturePattern& p);

/// Half-power width of the main lobe, edges linearly interpolated. Radians.
double beam_width_3db(const AperturePattern& p);

/// Per frequency: design peak |E|^2 over the equal-aperture PEC peak |E|^2.
std::vector<double> efficiency_vs_pec(const SupercellSpec& spec, const PhaseCurve& curve,
                                      Angle theta_i, std::span<const Frequency> f_grid,
                                      int tiles, const AngleGrid& grid = AngleGrid::standard());
std::vector<double> efficiency_vs_pec(const SupercellSpec& spec, const CellResponse& response,
                                      Angle theta_i, std::span<const Frequency> f_grid,
                                      int tiles, const AngleGrid& grid = AngleGrid::standard());

/// "theta_deg, magnitude_db, phase_deg"; magnitude relative to the PEC peak.
void write_pattern_csv(std::ostream& out, const AperturePattern& p);
/// "freq_ghz, ratio, ratio_db"
void write_efficiency_csv(std::ostream& out, std::span<const Frequency> f_grid,
                          std::span<const double> ratios);

}  // namespace irs
