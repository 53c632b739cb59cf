#include "irs/far_field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "irs/error.hpp"

namespace irs {
namespace {

double sinc(double a) {
  if (std::abs(a) < 1e-8) return 1.0 - a * a / 6.0;
  return std::sin(a) / a;
}

double ties_tolerance(double v) { return 1e-12 * v; }

}  // namespace

ApertureProfile::ApertureProfile(std::vector<ApertureElement> elements)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw Error(ErrorKind::InvalidInput, "aperture profile is empty");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& e = elements_[i];
    if (!(e.width > 0.0) || !std::isfinite(e.x)) {
      throw Error(ErrorKind::InvalidInput, fmt::format("aperture element {} is invalid", i));
    }
    if (i > 0) {
      const auto& prev = elements_[i - 1];
      const double gap = (e.x - 0.5 * e.width) - (prev.x + 0.5 * prev.width);
      if (!(e.x > prev.x) || gap < -1e-12 * (std::abs(e.x) + e.width)) {
        throw Error(ErrorKind::InvalidInput,
                    fmt::format("aperture elements {} and {} overlap or are unsorted", i - 1, i));
      }
    }
  }
}

ApertureProfile ApertureProfile::uniform(int n, double width, cplx gamma) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "uniform profile needs at least one element");
  std::vector<ApertureElement> el;
  el.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) el.push_back({(i + 0.5) * width, width, gamma});
  return ApertureProfile(std::move(el));
}

double ApertureProfile::length() const noexcept {
  double l = 0.0;
  for (const auto& e : elements_) l += e.width;
  return l;
}

ApertureProfile ApertureProfile::with_uniform_gamma(cplx gamma) const {
  auto el = elements_;
  for (auto& e : el) e.gamma = gamma;
  return ApertureProfile(std::move(el));
}

AngleGrid::AngleGrid(std::vector<double> radians) : theta_(std::move(radians)) {
  if (theta_.empty()) throw Error(ErrorKind::InvalidInput, "angle grid is empty");
  const double lim = kPi / 2.0 + 1e-12;
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    if (!(std::abs(theta_[i]) <= lim) || (i > 0 && !(theta_[i] > theta_[i - 1]))) {
      throw Error(ErrorKind::InvalidInput,
                  "angle grid must be strictly increasing within [-90, 90] deg");
    }
  }
}

AngleGrid AngleGrid::degrees(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw Error(ErrorKind::InvalidInput, "angle grid needs step > 0 and stop >= start");
  }
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = deg_to_rad(std::min(start + step * static_cast<double>(i), stop));
  }
  return AngleGrid(std::move(theta));
}

AngleGrid AngleGrid::standard() { return degrees(-90.0, 90.0, 0.1); }

CellResponse curve_response(PhaseCurve curve) {
  return [c = std::move(curve)](double d, Frequency) { return c.gamma_at(d); };
}

CellResponse model_response(LayerStack stack, CellGeometry geometry, Angle theta_i,
                            Polarization pol) {
  return [stack = std::move(stack), geometry, theta_i, pol](double d, Frequency f) {
    return reflection_coefficient(PatchCell{geometry, d, stack}, f, theta_i, pol);
  };
}

ApertureProfile build_profile(const SupercellSpec& spec, const CellResponse& response,
                              Frequency f, int tiles) {
  if (tiles < 1) throw Error(ErrorKind::InvalidInput, "tiles must be >= 1");
  spec.validate();
  std::vector<cplx> gammas;
  gammas.reserve(spec.patch_sizes.size());
  for (double d : spec.patch_sizes) gammas.push_back(response(d, f));

  std::vector<ApertureElement> el;
  el.reserve(static_cast<std::size_t>(tiles) * gammas.size());
  for (int t = 0; t < tiles; ++t) {
    for (int n = 0; n < spec.n_cells; ++n) {
      el.push_back({t * spec.period + (n + 0.5) * spec.pitch, spec.pitch,
                    gammas[static_cast<std::size_t>(n)]});
    }
  }
  return ApertureProfile(std::move(el));
}

ApertureProfile build_profile(const SupercellSpec& spec, const PhaseCurve& curve, int tiles) {
  return build_profile(spec, curve_response(curve), curve.frequency(), tiles);
}

cplx aperture_field(const ApertureProfile& profile, double k0, double u) {
  cplx sum{};
  for (const auto& e : profile.elements()) {
    sum += e.gamma * e.width * sinc(k0 * e.width * u / 2.0) *
           std::polar(1.0, k0 * e.x * u);
  }
  return sum;
}

AperturePattern scattered_pattern(const ApertureProfile& profile, Angle theta_i, Frequency f,
                                  const AngleGrid& grid) {
  const double k0 = wavenumber(f).k0;
  const auto elements = profile.elements();
  const std::size_t n = elements.size();

  // Structure-of-arrays copy so the inner loop streams contiguous data.
  std::vector<double> weight_re(n), weight_im(n), half_kw(n), kx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx w = elements[i].gamma * elements[i].width;
    weight_re[i] = w.real();
    weight_im[i] = w.imag();
    half_kw[i] = 0.5 * k0 * elements[i].width;
    kx[i] = k0 * elements[i].x;
  }

  const auto theta = grid.radians();
  const double sin_i = theta_i.sin();
  std::vector<cplx> amp(theta.size());
  const auto count = static_cast<std::ptrdiff_t>(theta.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t a = 0; a < count; ++a) {
    const double u = std::sin(theta[static_cast<std::size_t>(a)]) - sin_i;
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double env = sinc(half_kw[i] * u);
      const double c = std::cos(kx[i] * u);
      const double s = std::sin(kx[i] * u);
      re += env * (weight_re[i] * c - weight_im[i] * s);
      im += env * (weight_re[i] * s + weight_im[i] * c);
    }
    amp[static_cast<std::size_t>(a)] = {re, im};
  }
  return {std::vector<double>(theta.begin(), theta.end()), std::move(amp), f, theta_i,
          profile.length()};
}

namespace reference {

AperturePattern scattered_pattern(const ApertureProfile& profile, Angle theta_i, Frequency f,
                                  const AngleGrid& grid) {
  const double k0 = wavenumber(f).k0;
  AperturePattern p{{}, {}, f, theta_i, profile.length()};
  for (double th : grid.radians()) {
    p.theta.push_back(th);
    p.amplitude.push_back(aperture_field(profile, k0, std::sin(th) - theta_i.sin()));
  }
  return p;
}

}  // namespace reference

std::size_t peak_index(const AperturePattern& p) {
  if (p.amplitude.empty()) throw Error(ErrorKind::InvalidInput, "empty pattern");
  std::size_t best = 0;
  double best_pow = std::norm(p.amplitude[0]);
  for (std::size_t i = 1; i < p.amplitude.size(); ++i) {
    const double pw = std::norm(p.amplitude[i]);
    if (pw > best_pow + ties_tolerance(best_pow)) {
      best = i;
      best_pow = pw;
    } else if (pw >= best_pow - ties_tolerance(best_pow) &&
               std::abs(p.theta[i]) < std::abs(p.theta[best])) {
      best = i;
      best_pow = std::max(pw, best_pow);
    }
  }
  return best;
}

Angle peak_angle(const AperturePattern& p) { return Angle::radians(p.theta[peak_index(p)]); }

Directivity peak_directivity(const AperturePattern& p) {
  double peak = 0.0, mean = 0.0;
  for (const auto& a : p.amplitude) {
    const double pw = std::norm(a);
    peak = std::max(peak, pw);
    mean += pw;
  }
  if (!(peak > 0.0)) {
    throw Error(ErrorKind::UndefinedDirectivity, "pattern is zero everywhere");
  }
  mean /= static_cast<double>(p.amplitude.size());
  const double d = peak / mean;
  return {d, to_db_power(d)};
}

double beam_width_3db(const AperturePattern& p) {
  const std::size_t k = peak_index(p);
  const double half = 0.5 * std::norm(p.amplitude[k]);
  auto edge = [&](int dir) {
    std::size_t i = k;
    while (true) {
      const bool at_end = dir < 0 ? i == 0 : i + 1 == p.amplitude.size();
      if (at_end) return p.theta[i];
      const std::size_t j = dir < 0 ? i - 1 : i + 1;
      const double pj = std::norm(p.amplitude[j]);
      if (pj < half) {
        const double pi = std::norm(p.amplitude[i]);
        const double t = (pi - half) / (pi - pj);
        return p.theta[i] + t * (p.theta[j] - p.theta[i]);
      }
      i = j;
    }
  };
  return edge(+1) - edge(-1);
}

std::vector<double> efficiency_vs_pec(const SupercellSpec& spec, const CellResponse& response,
                                      Angle theta_i, std::span<const Frequency> f_grid,
                                      int tiles, const AngleGrid& grid) {
  std::vector<double> out;
  out.reserve(f_grid.size());
  for (const Frequency f : f_grid) {
    const auto profile = build_profile(spec, response, f, tiles);
    const auto design = scattered_pattern(profile, theta_i, f, grid);
    const auto pec = scattered_pattern(profile.with_uniform_gamma(-1.0), theta_i, f, grid);
    const double num = std::norm(design.amplitude[peak_index(design)]);
    const double den = std::norm(pec.amplitude[peak_index(pec)]);
    out.push_back(num / den);
  }
  return out;
}

std::vector<double> efficiency_vs_pec(const SupercellSpec& spec, const PhaseCurve& curve,
                                      Angle theta_i, std::span<const Frequency> f_grid,
                                      int tiles, const AngleGrid& grid) {
  return efficiency_vs_pec(spec, curve_response(curve), theta_i, f_grid, tiles, grid);
}

void write_pattern_csv(std::ostream& out, const AperturePattern& p) {
  out << "theta_deg, magnitude_db, phase_deg\n";
  for (std::size_t i = 0; i < p.theta.size(); ++i) {
    const double rel = std::abs(p.amplitude[i]) / p.reference_level;
    const double db = rel > 0.0 ? std::max(20.0 * std::log10(rel), -300.0) : -300.0;
    fmt::print(out, "{:.4f}, {:.6f}, {:.6f}\n", rad_to_deg(p.theta[i]), db,
               rad_to_deg(std::arg(p.amplitude[i])));
  }
}

void write_efficiency_csv(std::ostream& out, std::span<const Frequency> f_grid,
                          std::span<const double> ratios) {
  out << "freq_ghz, ratio, ratio_db\n";
  for (std::size_t i = 0; i < f_grid.size() && i < ratios.size(); ++i) {
    fmt::print(out, "{:.6f}, {:.8f}, {:.6f}\n", f_grid[i].ghz_value(), ratios[i],
               to_db_power(ratios[i]));
  }
}

}  // namespace irs
