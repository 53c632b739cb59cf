#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "irs/gradient_design.hpp"

namespace irs {

/// One printed patch, millimetres, sheet origin at the top-left corner.
struct PatchRect {
  double cx;
  double cy;
  double width;   // along the gradient axis (sheet x)
  double height;  // along the transverse axis (sheet y)
};

struct PanelLayout {
  int rows;
  int cols_periods;
  SupercellSpec spec;
  double transverse_pitch;  // m
  double sheet_width;       // m, cols_periods * P
  double sheet_height;      // m, rows * transverse_pitch
  std::vector<PatchRect> patches;
};

/// Places n_cells x cols_periods x rows patches. Patch extent is
/// spec.patch_width (square when unset) along x and D_n along y.
/// Throws Error{LayoutInvalid} if a patch does not leave a positive gap.
PanelLayout layout_panel(const SupercellSpec& spec, int rows, int cols_periods,
                         double transverse_pitch);

/// SVG 1.1 in millimetre user units with the design document embedded in a
/// leading comment. Deterministic for identical layouts.
std::string render_svg(const PanelLayout& layout);
void export_svg(const PanelLayout& layout, const std::filesystem::path& path);

}  // namespace irs
