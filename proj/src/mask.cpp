#include "irs/mask.hpp"

#include <fstream>

#include <fmt/format.h>

#include "irs/error.hpp"

namespace irs {
namespace {

// Fixed 4 decimals with trailing zeros trimmed: 21.3 -> "21.3", 360 -> "360".
std::string mm(double v) {
  std::string s = fmt::format("{:.4f}", v);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

}  // namespace

PanelLayout layout_panel(const SupercellSpec& spec, int rows, int cols_periods,
                         double transverse_pitch) {
  spec.validate();
  if (rows < 1 || cols_periods < 1) {
    throw Error(ErrorKind::LayoutInvalid, "rows and cols_periods must be >= 1");
  }
  if (!(transverse_pitch > 0.0)) {
    throw Error(ErrorKind::LayoutInvalid, "transverse pitch must be positive");
  }
  for (int n = 0; n < spec.n_cells; ++n) {
    const double d = spec.patch_sizes[static_cast<std::size_t>(n)];
    const double w = spec.patch_width.value_or(d);
    if (!(w < spec.pitch) || !(d < transverse_pitch)) {
      throw Error(ErrorKind::LayoutInvalid,
                  fmt::format("cell {}: patch {} x {} mm leaves no gap in a {} x {} mm cell", n,
                              w * 1e3, d * 1e3, spec.pitch * 1e3, transverse_pitch * 1e3));
    }
  }

  PanelLayout layout{rows, cols_periods, spec, transverse_pitch, cols_periods * spec.period,
                     rows * transverse_pitch, {}};
  layout.patches.reserve(static_cast<std::size_t>(rows * cols_periods * spec.n_cells));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols_periods; ++c) {
      for (int n = 0; n < spec.n_cells; ++n) {
        const double d = spec.patch_sizes[static_cast<std::size_t>(n)];
        layout.patches.push_back({(c * spec.period + (n + 0.5) * spec.pitch) * 1e3,
                                  (r + 0.5) * transverse_pitch * 1e3,
                                  spec.patch_width.value_or(d) * 1e3, d * 1e3});
      }
    }
  }
  return layout;
}

std::string render_svg(const PanelLayout& layout) {
  const std::string w = mm(layout.sheet_width * 1e3);
  const std::string h = mm(layout.sheet_height * 1e3);
  std::string design = to_design_json(layout.spec);
  // "--" may not appear inside an XML comment.
  for (auto pos = design.find("--"); pos != std::string::npos; pos = design.find("--", pos)) {
    design.replace(pos, 2, "- -");
  }

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<!-- irs-design\n" + design +
         "patch shape: rectangular, patch_width (or D when unset) along x by D along y; "
         "square patches are an assumption when no width is given\n-->\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}mm\" "
      "height=\"{1}mm\" viewBox=\"0 0 {0} {1}\">\n",
      w, h);
  out += "  <g fill=\"#000000\" stroke=\"none\">\n";
  for (const auto& p : layout.patches) {
    out += fmt::format("    <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\n",
                       mm(p.cx - 0.5 * p.width), mm(p.cy - 0.5 * p.height), mm(p.width),
                       mm(p.height));
  }
  out += "  </g>\n</svg>\n";
  return out;
}

void export_svg(const PanelLayout& layout, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  out << render_svg(layout);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("write to {} failed", path.string()));
}

}  // namespace irs
