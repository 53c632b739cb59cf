#include "irs/gradient_design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "irs/error.hpp"

namespace irs {

GradientLaw SupercellSpec::law() const { return {2.0 * kPi / period, wavenumber(frequency)}; }

void SupercellSpec::validate() const {
  if (n_cells < 2) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("a supercell needs at least 2 cells, got {}", n_cells));
  }
  if (!(pitch > 0.0) || !(period > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "pitch and period must be positive");
  }
  if (std::abs(period - n_cells * pitch) > 1e-9 * period) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("period {} m != n_cells * pitch = {} m", period, n_cells * pitch));
  }
  if (patch_sizes.size() != static_cast<std::size_t>(n_cells)) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("expected {} patch sizes, got {}", n_cells, patch_sizes.size()));
  }
  for (double d : patch_sizes) {
    if (!(d > 0.0)) throw Error(ErrorKind::InvalidInput, "patch sizes must be positive");
  }
  if (phases && phases->size() != static_cast<std::size_t>(n_cells)) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("expected {} phases, got {}", n_cells, phases->size()));
  }
}

double period_for_angle(Frequency f, Angle theta_r) {
  if (theta_r.rad() == 0.0) {
    throw Error(ErrorKind::NoFinitePeriod, "specular requires no gradient (theta_r = 0)");
  }
  if (!(theta_r.rad() > 0.0) || !(theta_r.rad() < kPi / 2.0)) {
    throw Error(ErrorKind::InvalidAngle,
                fmt::format("reflection angle must lie in (0, 90) deg, got {} deg",
                            theta_r.deg()));
  }
  return wavelength(f) / theta_r.sin();
}

double parallel_wavevector_ratio(double period, Frequency f) {
  if (!(period > 0.0)) {
    throw Error(ErrorKind::InvalidInput, fmt::format("period must be positive, got {}", period));
  }
  return wavelength(f) / period;  // 0 for an infinite period
}

Angle anomalous_angle(Angle theta_i, double period, Frequency f) {
  if (!(std::abs(theta_i.rad()) <= kPi / 2.0)) {
    throw Error(ErrorKind::InvalidAngle,
                fmt::format("incidence angle {} deg is not propagating", theta_i.deg()));
  }
  const double s = theta_i.sin() + parallel_wavevector_ratio(period, f);
  if (std::abs(s) > 1.0) {
    throw Error(ErrorKind::EvanescentOrder,
                fmt::format("sin(theta_i) + varrho/k0 = {:.4f}: anomalous order is evanescent", s));
  }
  return Angle::radians(std::asin(s));
}

std::vector<double> phase_profile(int n_cells, double period) {
  if (n_cells < 2) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("a phase gradient needs at least 2 cells, got {}", n_cells));
  }
  if (!(period > 0.0)) throw Error(ErrorKind::InvalidInput, "period must be positive");
  const double varrho = 2.0 * kPi / period;
  const double pitch = period / n_cells;
  std::vector<double> out(static_cast<std::size_t>(n_cells));
  for (int n = 0; n < n_cells; ++n) {
    out[static_cast<std::size_t>(n)] = wrap_phase(-varrho * (n + 0.5) * pitch);
  }
  return out;
}

SupercellSpec design_supercell(Frequency f, Angle theta_r, int n_cells,
                               const PhaseCurve& phase_source) {
  if (n_cells < 2) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("cannot form a gradient with {} cell(s)", n_cells));
  }
  const double period = period_for_angle(f, theta_r);
  const double pitch = period / n_cells;

  // Unwrapped targets -2 pi (n + 1/2) / N; the profile's wrapped values differ
  // from these by whole turns only.
  std::vector<double> targets(static_cast<std::size_t>(n_cells));
  for (int n = 0; n < n_cells; ++n) {
    targets[static_cast<std::size_t>(n)] = -2.0 * kPi * (n + 0.5) / n_cells;
  }
  const double needed = targets.front() - targets.back();
  const double lo = phase_source.phase_min();
  const double hi = phase_source.phase_max();
  if (phase_source.phase_span() < needed) {
    throw Error(ErrorKind::PhaseUnreachable,
                fmt::format("cell {}: phase source spans {:.1f} deg, {} cells need {:.1f} deg",
                            n_cells - 1, rad_to_deg(hi - lo), n_cells, rad_to_deg(needed)));
  }
  const double offset = 0.5 * ((lo - targets.back()) + (hi - targets.front()));

  SupercellSpec spec{f, n_cells, pitch, period, std::vector<double>{}, {}, {}, {}, {}};
  for (int n = 0; n < n_cells; ++n) {
    double phase = std::clamp(targets[static_cast<std::size_t>(n)] + offset, lo, hi);
    double d = 0.0;
    try {
      d = solve_patch_size_on_branch(phase, phase_source);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("cell {}: {}", n, e.what()));
    }
    spec.phases->push_back(phase);
    spec.patch_sizes.push_back(d);
  }
  if (const auto& g = phase_source.geometry()) {
    spec.patch_width = g->patch_width;
    spec.transverse_pitch = g->pitch_y;
  }
  spec.mapping_note = fmt::format(
      "cell n holds the n-th solved size; target phases step by -{:.4g} deg per cell", 
      360.0 / n_cells);
  return spec;
}

SupercellSpec table2_reference_spec() {
  const std::vector<double> listed = {16.4e-3, 19.1e-3, 19.6e-3, 20.1e-3, 21.3e-3};
  std::vector<double> sizes;
  for (double d : listed) {
    sizes.push_back(d);
    sizes.push_back(d);
  }
  return SupercellSpec{
      Frequency::ghz(5.0),
      10,
      12e-3,
      120e-3,
      std::nullopt,
      std::move(sizes),
      11e-3,
      30e-3,
      "D1..D5 each fill two adjacent cells in ascending order (D1 D1 D2 D2 ... D5 D5); "
      "patches are 11 mm along the gradient axis by D_n transverse on a 30 mm pitch"};
}

// ---------------------------------------------------------------------------
// JSON

std::string to_design_json(const SupercellSpec& spec) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["frequency_hz"] = spec.frequency.hz();
  j["n_cells"] = spec.n_cells;
  j["pitch_mm"] = round_export(spec.pitch * 1e3);
  j["period_mm"] = round_export(spec.period * 1e3);
  if (spec.phases) {
    ordered_json ph = ordered_json::array();
    for (double p : *spec.phases) ph.push_back(round_export(rad_to_deg(p)));
    j["phases_deg"] = ph;
  } else {
    j["phases_deg"] = nullptr;
  }
  ordered_json sizes = ordered_json::array();
  for (double d : spec.patch_sizes) sizes.push_back(round_export(d * 1e3));
  j["patch_sizes_mm"] = sizes;
  j["mapping_note"] = spec.mapping_note;
  if (spec.patch_width) j["patch_width_mm"] = round_export(*spec.patch_width * 1e3);
  if (spec.transverse_pitch) j["transverse_pitch_mm"] = round_export(*spec.transverse_pitch * 1e3);
  return j.dump(2) + "\n";
}

SupercellSpec from_design_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, fmt::format("design document: {}", e.what()));
  }
  try {
    std::optional<std::vector<double>> phases;
    if (j.contains("phases_deg") && !j["phases_deg"].is_null()) {
      phases.emplace();
      for (double p : j["phases_deg"].get<std::vector<double>>()) phases->push_back(deg_to_rad(p));
    }
    std::vector<double> sizes;
    for (double d : j.at("patch_sizes_mm").get<std::vector<double>>()) sizes.push_back(d * 1e-3);
    std::optional<double> width, tpitch;
    if (j.contains("patch_width_mm")) width = j["patch_width_mm"].get<double>() * 1e-3;
    if (j.contains("transverse_pitch_mm")) {
      tpitch = j["transverse_pitch_mm"].get<double>() * 1e-3;
    }
    SupercellSpec spec{Frequency(j.at("frequency_hz").get<double>()),
                       j.at("n_cells").get<int>(),
                       j.at("pitch_mm").get<double>() * 1e-3,
                       j.at("period_mm").get<double>() * 1e-3,
                       std::move(phases),
                       std::move(sizes),
                       width,
                       tpitch,
                       j.value("mapping_note", std::string{})};
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, fmt::format("design document: {}", e.what()));
  }
}

void save_design(const SupercellSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  out << to_design_json(spec);
}

SupercellSpec load_design(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_design_json(ss.str());
}

}  // namespace irs
