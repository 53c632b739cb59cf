#pragma once

#include <complex>
#include <numbers>

namespace irs {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299'792'458.0;            // m/s, exact
inline constexpr double kMu0 = 1.25663706212e-6;                   // H/m
inline constexpr double kEps0 = 1.0 / (kMu0 * kSpeedOfLight * kSpeedOfLight);
inline constexpr double kEta0 = kMu0 * kSpeedOfLight;              // ~376.73 ohm
inline constexpr double kPi = std::numbers::pi;

/// Positive operating frequency in hertz.
class Frequency {
 public:
  /// Throws Error{InvalidInput} unless hz is finite and > 0.
  explicit Frequency(double hz);

  static Frequency ghz(double value) { return Frequency(value * 1e9); }

  double hz() const noexcept { return hz_; }
  double ghz_value() const noexcept { return hz_ * 1e-9; }
  double omega() const noexcept { return 2.0 * kPi * hz_; }

  friend bool operator==(const Frequency&, const Frequency&) = default;

 private:
  double hz_;
};

/// Free-space wavenumber k0 in rad/m.
struct Wavevector {
  double k0;
};

/// Angle from the surface normal. Radians internally; degrees only at I/O.
class Angle {
 public:
  constexpr Angle() = default;

  static constexpr Angle radians(double v) { return Angle(v); }
  static constexpr Angle degrees(double v) { return Angle(v * kPi / 180.0); }

  constexpr double rad() const noexcept { return rad_; }
  constexpr double deg() const noexcept { return rad_ * 180.0 / kPi; }
  double sin() const noexcept;
  double cos() const noexcept;

  constexpr Angle operator-() const noexcept { return Angle(-rad_); }
  friend constexpr auto operator<=>(const Angle&, const Angle&) = default;

 private:
  constexpr explicit Angle(double v) : rad_(v) {}
  double rad_ = 0.0;
};

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps a phase into (-pi, pi].
double wrap_phase(double phase);

double wavelength(Frequency f);
Wavevector wavenumber(Frequency f);

/// Value rounded to nine decimal places, used for mm and degree text exports.
double round_export(double value);

double to_db_power(double linear);
double from_db_power(double db);

}  // namespace irs
