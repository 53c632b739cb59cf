#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irs/em_core.hpp"

namespace irs {

enum class Polarization { TE, TM };

struct Layer {
  double thickness;  // m
  double eps_r;
  double tan_delta;
};

/// Grounded dielectric stack. Layers run from the patch side down to the
/// PEC ground plane.
class LayerStack {
 public:
  explicit LayerStack(std::vector<Layer> layers);

  /// 0.1 mm paper (eps_r 2, tan_d 0.05) over 1.0 mm MDF (eps_r 2.5) on copper.
  static LayerStack paper_on_mdf(bool lossless = false);

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  double total_thickness() const noexcept;
  /// Thickness-weighted mean of the real permittivities.
  double mean_permittivity() const noexcept;

 private:
  std::vector<Layer> layers_;
};

/// Lattice of one unit cell. x is the phase-gradient axis, y the transverse
/// axis; the variable patch dimension D runs along y (the E-field direction of
/// the default polarization). patch_width is the fixed x-extent; when unset the
/// patch is square.
struct CellGeometry {
  double pitch_x;
  double pitch_y;
  std::optional<double> patch_width;

  /// 12 mm x 30 mm lattice with 11 mm wide patches.
  static CellGeometry paper();
};

struct PatchCell {
  CellGeometry geometry;
  double patch_size;  // D, m
  LayerStack stack;

  double width() const noexcept { return geometry.patch_width.value_or(patch_size); }
  /// Throws Error{InvalidGeometry} when a patch does not fit its lattice cell.
  void validate() const;
};

/// Sheet impedance of the patch array. The gap capacitance follows the
/// averaged-field grid formula; a series term places the patch half-wave
/// resonance at D = lambda / (2 sqrt(eps_eff)). Purely reactive.
cplx grid_impedance(const PatchCell& cell, Frequency f, Angle theta_i = {},
                    Polarization pol = Polarization::TE);

/// Input impedance of the short-circuited layer cascade.
cplx slab_input_impedance(const LayerStack& stack, Frequency f, Angle theta_i,
                          Polarization pol);

/// Wave impedance of free space seen by an obliquely incident plane wave.
double incident_wave_impedance(Angle theta_i, Polarization pol);

cplx reflection_coefficient(const PatchCell& cell, Frequency f, Angle theta_i = {},
                            Polarization pol = Polarization::TE);

struct PhaseSample {
  double patch_size;  // m
  double magnitude;
  double phase;  // rad, unwrapped along the curve

  cplx gamma() const { return std::polar(magnitude, phase); }
};

/// Reflection coefficient tabulated against patch size at one frequency.
class PhaseCurve {
 public:
  /// Unwraps arg(gamma) starting from the smallest patch size.
  static PhaseCurve from_gammas(std::span<const double> sizes,
                                std::span<const cplx> gammas, Frequency f,
                                std::optional<CellGeometry> geometry = {});

  /// Phases are unwrapped starting from the first sample's value as given.
  static PhaseCurve from_samples(std::vector<PhaseSample> samples, Frequency f,
                                 std::optional<CellGeometry> geometry = {});

  std::span<const PhaseSample> samples() const noexcept { return samples_; }
  Frequency frequency() const noexcept { return frequency_; }
  const std::optional<CellGeometry>& geometry() const noexcept { return geometry_; }

  double d_min() const noexcept { return samples_.front().patch_size; }
  double d_max() const noexcept { return samples_.back().patch_size; }
  double phase_min() const noexcept;
  double phase_max() const noexcept;
  double phase_span() const noexcept { return phase_max() - phase_min(); }
  /// True when the unwrapped phase is strictly monotone in patch size.
  bool is_monotone() const noexcept;

  /// Linear interpolation of magnitude and unwrapped phase.
  /// Throws Error{InterpolationOutOfRange} outside [d_min, d_max].
  cplx gamma_at(double patch_size) const;
  double phase_at(double patch_size) const;

 private:
  PhaseCurve(std::vector<PhaseSample> samples, Frequency f,
             std::optional<CellGeometry> geometry);
  PhaseSample interpolate(double patch_size) const;

  std::vector<PhaseSample> samples_;
  Frequency frequency_;
  std::optional<CellGeometry> geometry_;
};

/// Samples reflection_coefficient at n_samples evenly spaced patch sizes.
PhaseCurve phase_curve(const LayerStack& stack, const CellGeometry& geometry,
                       double d_min, double d_max, int n_samples, Frequency f,
                       Angle theta_i = {}, Polarization pol = Polarization::TE);

/// Model curve used when no external table is supplied: paper-on-MDF stack,
/// 12 x 30 mm lattice, D in [14, 26] mm, 4001 samples, normal incidence.
PhaseCurve surrogate_phase_curve(Frequency f, bool lossless = false);

/// Patch size whose interpolated phase equals target modulo 2 pi. When several
/// branches reach the target the smallest patch wins.
double solve_patch_size(double target_phase, const PhaseCurve& curve);

/// Inverse interpolation at an unwrapped phase lying inside the curve's span.
double solve_patch_size_on_branch(double unwrapped_phase, const PhaseCurve& curve);

// Phase-table text format: '#' comments, one header line
// "D_mm, gamma_abs, gamma_phase_deg", then one row per sample.
std::string format_phase_table(const PhaseCurve& curve);
PhaseCurve parse_phase_table(std::string_view text,
                             std::optional<Frequency> fallback_frequency = {});
PhaseCurve load_phase_table(const std::filesystem::path& path,
                            std::optional<Frequency> fallback_frequency = {});
void save_phase_table(const PhaseCurve& curve, const std::filesystem::path& path);

}  // namespace irs
