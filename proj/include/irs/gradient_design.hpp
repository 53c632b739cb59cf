#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irs/em_core.hpp"
#include "irs/unit_cell.hpp"

namespace irs {

/// Constant phase gradient varrho = 2 pi / P against the free-space k0.
struct GradientLaw {
  double varrho;  // rad/m
  Wavevector k0;

  double ratio() const noexcept { return varrho / k0.k0; }
};

/// One period of a phase-gradient surface.
struct SupercellSpec {
  Frequency frequency;
  int n_cells;
  double pitch;   // m, along the gradient axis
  double period;  // m, n_cells * pitch
  /// Target phases (rad) on the phase-source branch; absent for published
  /// designs whose phases are unknown.
  std::optional<std::vector<double>> phases;
  std::vector<double> patch_sizes;  // m
  /// Fixed patch extent along the gradient axis; square patches when unset.
  std::optional<double> patch_width;
  std::optional<double> transverse_pitch;
  std::string mapping_note;

  GradientLaw law() const;
  /// Throws Error{InvalidInput} if the structural invariants do not hold.
  void validate() const;
};

/// P = lambda / sin(theta_r): the period steering a normally incident wave to
/// theta_r.
double period_for_angle(Frequency f, Angle theta_r);

/// varrho / k0 = lambda / P. An infinite period gives 0.
double parallel_wavevector_ratio(double period, Frequency f);

/// theta_r = asin(sin theta_i + varrho / k0) for the +1 gradient order.
/// Throws Error{EvanescentOrder} when that order does not propagate.
Angle anomalous_angle(Angle theta_i, double period, Frequency f);

/// wrap(-varrho x_n) at the cell centres x_n = (n + 1/2) P / n_cells.
std::vector<double> phase_profile(int n_cells, double period);

/// Period from period_for_angle, cell phases from phase_profile shifted by a
/// common offset that centres them in the curve's span, sizes by inverting the
/// curve. Cell geometry metadata is copied from the curve when present.
SupercellSpec design_supercell(Frequency f, Angle theta_r, int n_cells,
                               const PhaseCurve& phase_source);

/// Published design: ten 12 mm cells (P = 120 mm) with 11 mm wide patches on a
/// 30 mm transverse pitch. Each listed length D1..D5 fills two adjacent cells
/// in ascending order.
SupercellSpec table2_reference_spec();

std::string to_design_json(const SupercellSpec& spec);
SupercellSpec from_design_json(std::string_view text);
void save_design(const SupercellSpec& spec, const std::filesystem::path& path);
SupercellSpec load_design(const std::filesystem::path& path);

}  // namespace irs
