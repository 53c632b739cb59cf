#include "irs/unit_cell.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "irs/error.hpp"

namespace irs {
namespace {

// Principal root keeps Im(kz) <= 0 for lossy media (exp(-j kz z) decays).
cplx normal_wavenumber(double k0, cplx eps_c, double sin_theta) {
  return k0 * std::sqrt(eps_c - sin_theta * sin_theta);
}

cplx complex_permittivity(const Layer& layer) {
  return {layer.eps_r, -layer.eps_r * layer.tan_delta};
}

cplx layer_wave_impedance(double k0, cplx kz, cplx eps_c, Polarization pol) {
  if (pol == Polarization::TE) return kEta0 * k0 / kz;
  return kEta0 * kz / (k0 * eps_c);
}

}  // namespace

LayerStack::LayerStack(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorKind::InvalidInput, "layer stack is empty");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (!(l.thickness > 0.0) || !(l.eps_r >= 1.0) || !(l.tan_delta >= 0.0)) {
      throw Error(ErrorKind::InvalidInput,
                  fmt::format("layer {}: need thickness > 0, eps_r >= 1, tan_delta >= 0 "
                              "(got {}, {}, {})",
                              i, l.thickness, l.eps_r, l.tan_delta));
    }
  }
}

LayerStack LayerStack::paper_on_mdf(bool lossless) {
  return LayerStack({{0.1e-3, 2.0, lossless ? 0.0 : 0.05}, {1.0e-3, 2.5, 0.0}});
}

double LayerStack::total_thickness() const noexcept {
  double t = 0.0;
  for (const auto& l : layers_) t += l.thickness;
  return t;
}

double LayerStack::mean_permittivity() const noexcept {
  double acc = 0.0;
  for (const auto& l : layers_) acc += l.thickness * l.eps_r;
  return acc / total_thickness();
}

CellGeometry CellGeometry::paper() { return {12e-3, 30e-3, 11e-3}; }

void PatchCell::validate() const {
  const auto& g = geometry;
  if (!(g.pitch_x > 0.0) || !(g.pitch_y > 0.0)) {
    throw Error(ErrorKind::InvalidGeometry, "cell pitches must be positive");
  }
  if (!(patch_size > 0.0) || !(patch_size < g.pitch_y)) {
    throw Error(ErrorKind::InvalidGeometry,
                fmt::format("patch size {} mm must lie in (0, {}) mm", patch_size * 1e3,
                            g.pitch_y * 1e3));
  }
  const double w = width();
  if (!(w > 0.0) || !(w < g.pitch_x)) {
    throw Error(ErrorKind::InvalidGeometry,
                fmt::format("patch width {} mm must lie in (0, {}) mm", w * 1e3,
                            g.pitch_x * 1e3));
  }
}

cplx grid_impedance(const PatchCell& cell, Frequency f, Angle theta_i, Polarization pol) {
  cell.validate();
  const auto& g = cell.geometry;
  const double eps_gap = (cell.stack.layers().front().eps_r + 1.0) / 2.0;
  const double gap = g.pitch_y - cell.patch_size;
  const double fill = cell.width() / g.pitch_x;

  double capacitance = fill * kEps0 * eps_gap * g.pitch_y / kPi *
                       std::log(1.0 / std::sin(kPi * gap / (2.0 * g.pitch_y)));
  if (pol == Polarization::TE) {
    const double s = theta_i.sin();
    capacitance *= 1.0 - s * s / (2.0 * eps_gap);
  }
  if (!(capacitance > 0.0)) {
    return {0.0, -std::numeric_limits<double>::infinity()};
  }

  const double eps_res = (cell.stack.mean_permittivity() + 1.0) / 2.0;
  const double d_res = wavelength(f) / (2.0 * std::sqrt(eps_res));
  const double ratio = cell.patch_size / d_res;
  return {0.0, -(1.0 - ratio * ratio) / (f.omega() * capacitance)};
}

cplx slab_input_impedance(const LayerStack& stack, Frequency f, Angle theta_i,
                          Polarization pol) {
  const double k0 = wavenumber(f).k0;
  const double s = theta_i.sin();
  cplx z{0.0, 0.0};
  const auto& layers = stack.layers();
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    const cplx eps_c = complex_permittivity(*it);
    const cplx kz = normal_wavenumber(k0, eps_c, s);
    const cplx eta = layer_wave_impedance(k0, kz, eps_c, pol);
    const cplx jt = cplx{0.0, 1.0} * std::tan(kz * it->thickness);
    z = eta * (z + eta * jt) / (eta + z * jt);
  }
  return z;
}

double incident_wave_impedance(Angle theta_i, Polarization pol) {
  const double c = theta_i.cos();
  return pol == Polarization::TE ? kEta0 / c : kEta0 * c;
}

cplx reflection_coefficient(const PatchCell& cell, Frequency f, Angle theta_i,
                            Polarization pol) {
  const cplx z_grid = grid_impedance(cell, f, theta_i, pol);
  const cplx z_slab = slab_input_impedance(cell.stack, f, theta_i, pol);
  // Admittances stay finite when the grid opens up (D -> 0).
  const cplx y_grid = std::isinf(z_grid.imag()) ? cplx{} : 1.0 / z_grid;
  const cplx y_surface = y_grid + 1.0 / z_slab;
  const double eta = incident_wave_impedance(theta_i, pol);
  return (1.0 - eta * y_surface) / (1.0 + eta * y_surface);
}

// ---------------------------------------------------------------------------
// PhaseCurve

PhaseCurve::PhaseCurve(std::vector<PhaseSample> samples, Frequency f,
                       std::optional<CellGeometry> geometry)
    : samples_(std::move(samples)), frequency_(f), geometry_(std::move(geometry)) {
  if (samples_.size() < 2) {
    throw Error(ErrorKind::InvalidInput, "phase curve needs at least two samples");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!std::isfinite(s.patch_size) || !std::isfinite(s.phase) ||
        !(s.magnitude >= 0.0) || s.magnitude > 1.0 + 1e-6) {
      throw Error(ErrorKind::InvalidInput,
                  fmt::format("phase curve sample {} is invalid (|gamma| = {})", i,
                              s.magnitude));
    }
    if (i > 0 && !(s.patch_size > samples_[i - 1].patch_size)) {
      throw Error(ErrorKind::InvalidInput,
                  fmt::format("phase curve sizes not strictly increasing at sample {}", i));
    }
  }
  // Unwrap; a sample already within pi of its predecessor is kept bit-exact.
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    const double prev = samples_[i - 1].phase;
    double& cur = samples_[i].phase;
    const double turns = std::round((cur - prev) / (2.0 * kPi));
    if (std::abs(cur - prev) > kPi) cur -= turns * 2.0 * kPi;
  }
}

PhaseCurve PhaseCurve::from_gammas(std::span<const double> sizes,
                                   std::span<const cplx> gammas, Frequency f,
                                   std::optional<CellGeometry> geometry) {
  if (sizes.size() != gammas.size()) {
    throw Error(ErrorKind::InvalidInput, "sizes and gammas differ in length");
  }
  std::vector<PhaseSample> samples;
  samples.reserve(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    samples.push_back({sizes[i], std::abs(gammas[i]), std::arg(gammas[i])});
  }
  return PhaseCurve(std::move(samples), f, std::move(geometry));
}

PhaseCurve PhaseCurve::from_samples(std::vector<PhaseSample> samples, Frequency f,
                                    std::optional<CellGeometry> geometry) {
  return PhaseCurve(std::move(samples), f, std::move(geometry));
}

double PhaseCurve::phase_min() const noexcept {
  return std::min_element(samples_.begin(), samples_.end(),
                          [](const auto& a, const auto& b) { return a.phase < b.phase; })
      ->phase;
}

double PhaseCurve::phase_max() const noexcept {
  return std::max_element(samples_.begin(), samples_.end(),
                          [](const auto& a, const auto& b) { return a.phase < b.phase; })
      ->phase;
}

bool PhaseCurve::is_monotone() const noexcept {
  bool up = true, down = true;
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    const double d = samples_[i].phase - samples_[i - 1].phase;
    up = up && d > 0.0;
    down = down && d < 0.0;
  }
  return up || down;
}

namespace {

// Index i such that samples[i].patch_size <= d <= samples[i+1].patch_size.
std::size_t size_segment(std::span<const PhaseSample> s, double d) {
  auto it = std::upper_bound(s.begin(), s.end(), d,
                             [](double v, const PhaseSample& p) { return v < p.patch_size; });
  std::size_t i = static_cast<std::size_t>(it - s.begin());
  if (i == 0) return 0;
  return std::min(i - 1, s.size() - 2);
}

}  // namespace

PhaseSample PhaseCurve::interpolate(double patch_size) const {
  if (!(patch_size >= d_min()) || !(patch_size <= d_max())) {
    throw Error(ErrorKind::InterpolationOutOfRange,
                fmt::format("patch size {:.4f} mm outside phase curve range [{:.4f}, {:.4f}] mm",
                            patch_size * 1e3, d_min() * 1e3, d_max() * 1e3));
  }
  const std::size_t i = size_segment(samples_, patch_size);
  const auto& a = samples_[i];
  const auto& b = samples_[i + 1];
  if (patch_size == a.patch_size) return a;
  if (patch_size == b.patch_size) return b;
  const double t = (patch_size - a.patch_size) / (b.patch_size - a.patch_size);
  return {patch_size, a.magnitude + t * (b.magnitude - a.magnitude),
          a.phase + t * (b.phase - a.phase)};
}

cplx PhaseCurve::gamma_at(double patch_size) const { return interpolate(patch_size).gamma(); }

double PhaseCurve::phase_at(double patch_size) const { return interpolate(patch_size).phase; }

PhaseCurve phase_curve(const LayerStack& stack, const CellGeometry& geometry, double d_min,
                       double d_max, int n_samples, Frequency f, Angle theta_i,
                       Polarization pol) {
  if (n_samples < 2 || !(d_min > 0.0) || !(d_min < d_max)) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("need 0 < d_min < d_max and n_samples >= 2 (got {}, {}, {})",
                            d_min, d_max, n_samples));
  }
  PatchCell probe{geometry, d_max, stack};
  probe.validate();

  std::vector<double> sizes(static_cast<std::size_t>(n_samples));
  std::vector<cplx> gammas(sizes.size());
  const double step = (d_max - d_min) / (n_samples - 1);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_samples; ++i) {
    const double d = (i == n_samples - 1) ? d_max : d_min + step * i;
    sizes[static_cast<std::size_t>(i)] = d;
    gammas[static_cast<std::size_t>(i)] =
        reflection_coefficient(PatchCell{geometry, d, stack}, f, theta_i, pol);
  }
  return PhaseCurve::from_gammas(sizes, gammas, f, geometry);
}

PhaseCurve surrogate_phase_curve(Frequency f, bool lossless) {
  return phase_curve(LayerStack::paper_on_mdf(lossless), CellGeometry::paper(), 14e-3,
                     26e-3, 4001, f);
}

double solve_patch_size_on_branch(double unwrapped_phase, const PhaseCurve& curve) {
  if (!curve.is_monotone()) {
    throw Error(ErrorKind::InvalidInput, "phase curve is not monotone; cannot invert");
  }
  const auto s = curve.samples();
  const bool increasing = s.back().phase > s.front().phase;
  if (unwrapped_phase < curve.phase_min() || unwrapped_phase > curve.phase_max()) {
    throw Error(ErrorKind::PhaseUnreachable,
                fmt::format("phase {:.3f} deg outside covered span [{:.3f}, {:.3f}] deg",
                            rad_to_deg(unwrapped_phase), rad_to_deg(curve.phase_min()),
                            rad_to_deg(curve.phase_max())));
  }
  auto it = std::lower_bound(s.begin(), s.end(), unwrapped_phase,
                             [increasing](const PhaseSample& p, double v) {
                               return increasing ? p.phase < v : p.phase > v;
                             });
  if (it == s.end()) it = s.end() - 1;
  if (it->phase == unwrapped_phase) return it->patch_size;
  // `it` is the first knot past the target; bracket is [it-1, it].
  const auto& a = *(it - 1);
  const auto& b = *it;
  const double t = (unwrapped_phase - a.phase) / (b.phase - a.phase);
  const double d = a.patch_size + t * (b.patch_size - a.patch_size);
  return std::clamp(d, a.patch_size, b.patch_size);
}

double solve_patch_size(double target_phase, const PhaseCurve& curve) {
  if (!curve.is_monotone()) {
    throw Error(ErrorKind::InvalidInput, "phase curve is not monotone; cannot invert");
  }
  const double lo = curve.phase_min();
  const double hi = curve.phase_max();
  const double two_pi = 2.0 * kPi;
  // Smallest k with target + 2 pi k >= lo, then walk up through the span.
  double k = std::ceil((lo - target_phase) / two_pi);
  std::optional<double> best;
  for (double cand = target_phase + k * two_pi; cand <= hi; cand += two_pi) {
    const double d = solve_patch_size_on_branch(cand, curve);
    if (!best || d < *best) best = d;
  }
  // Knots sitting exactly on the span edges can miss by an ulp of 2 pi k.
  if (!best) {
    for (double edge : {lo, hi}) {
      if (std::abs(wrap_phase(target_phase - edge)) < 1e-12) {
        const double d = solve_patch_size_on_branch(edge, curve);
        if (!best || d < *best) best = d;
      }
    }
  }
  if (!best) {
    throw Error(ErrorKind::PhaseUnreachable,
                fmt::format("target phase {:.3f} deg (mod 360) outside covered span "
                            "[{:.3f}, {:.3f}] deg",
                            rad_to_deg(target_phase), rad_to_deg(lo), rad_to_deg(hi)));
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Phase table I/O

std::string format_phase_table(const PhaseCurve& curve) {
  std::string out;
  out += fmt::format("# frequency_hz: {}\n", curve.frequency().hz());
  if (const auto& g = curve.geometry()) {
    out += fmt::format("# pitch_x_mm: {}\n# pitch_y_mm: {}\n", round_export(g->pitch_x * 1e3),
                       round_export(g->pitch_y * 1e3));
    if (g->patch_width) {
      out += fmt::format("# patch_width_mm: {}\n", round_export(*g->patch_width * 1e3));
    }
  }
  out += "D_mm, gamma_abs, gamma_phase_deg\n";
  for (const auto& s : curve.samples()) {
    out += fmt::format("{}, {}, {}\n", round_export(s.patch_size * 1e3), s.magnitude,
                       round_export(rad_to_deg(s.phase)));
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return {};
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void table_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::TableInvalid, fmt::format("phase table row {}: {}", line_no, what));
}

}  // namespace

PhaseCurve parse_phase_table(std::string_view text, std::optional<Frequency> fallback) {
  std::optional<double> freq_hz, pitch_x, pitch_y, patch_width;
  bool header_seen = false;
  std::vector<PhaseSample> samples;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) continue;
      const auto key = trim(line.substr(1, colon - 1));
      const auto value = parse_double(line.substr(colon + 1));
      if (!value) continue;
      if (key == "frequency_hz") freq_hz = value;
      else if (key == "pitch_x_mm") pitch_x = *value * 1e-3;
      else if (key == "pitch_y_mm") pitch_y = *value * 1e-3;
      else if (key == "patch_width_mm") patch_width = *value * 1e-3;
      continue;
    }
    const auto fields = split_commas(line);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "D_mm" || fields[1] != "gamma_abs" ||
          fields[2] != "gamma_phase_deg") {
        table_error(line_no, "expected header \"D_mm, gamma_abs, gamma_phase_deg\"");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) table_error(line_no, "expected 3 columns");
    const auto d = parse_double(fields[0]);
    const auto mag = parse_double(fields[1]);
    const auto ph = parse_double(fields[2]);
    if (!d || !mag || !ph) table_error(line_no, "unparsable number");
    if (!(*d > 0.0)) table_error(line_no, "patch size must be positive");
    if (*mag < 0.0 || *mag > 1.0 + 1e-6) {
      table_error(line_no, fmt::format("|gamma| = {} exceeds 1", *mag));
    }
    if (!samples.empty() && !(*d * 1e-3 > samples.back().patch_size)) {
      table_error(line_no, "patch sizes must be strictly increasing");
    }
    samples.push_back({*d * 1e-3, *mag, deg_to_rad(*ph)});
  }
  if (!header_seen) table_error(line_no, "missing header line");
  if (samples.size() < 2) table_error(line_no, "need at least two rows");

  std::optional<Frequency> f = fallback;
  if (freq_hz) f = Frequency(*freq_hz);
  if (!f) {
    throw Error(ErrorKind::TableInvalid,
                "phase table has no '# frequency_hz:' line and no frequency was supplied");
  }
  std::optional<CellGeometry> geometry;
  if (pitch_x && pitch_y) geometry = CellGeometry{*pitch_x, *pitch_y, patch_width};
  return PhaseCurve::from_samples(std::move(samples), *f, geometry);
}

PhaseCurve load_phase_table(const std::filesystem::path& path,
                            std::optional<Frequency> fallback) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, fmt::format("cannot open phase table {}", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_phase_table(ss.str(), fallback);
}

void save_phase_table(const PhaseCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoError, fmt::format("cannot write phase table {}", path.string()));
  }
  out << format_phase_table(curve);
}

}  // namespace irs
