#include "irs/em_core.hpp"

#include <cmath>

#include <fmt/format.h>

#include "irs/error.hpp"

namespace irs {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidGeometry: return "invalid-geometry";
    case ErrorKind::InvalidAngle: return "invalid-angle";
    case ErrorKind::NoFinitePeriod: return "no-finite-period";
    case ErrorKind::EvanescentOrder: return "evanescent-order";
    case ErrorKind::PhaseUnreachable: return "phase-unreachable";
    case ErrorKind::TableInvalid: return "table-invalid";
    case ErrorKind::InterpolationOutOfRange: return "interpolation-out-of-range";
    case ErrorKind::UndefinedDirectivity: return "undefined-directivity";
    case ErrorKind::LayoutInvalid: return "layout-invalid";
    case ErrorKind::IoError: return "io-error";
  }
  return "unknown";
}

Frequency::Frequency(double hz) : hz_(hz) {
  if (!std::isfinite(hz) || hz <= 0.0) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("frequency must be positive, got {} Hz", hz));
  }
}

double Angle::sin() const noexcept { return std::sin(rad_); }
double Angle::cos() const noexcept { return std::cos(rad_); }

double wrap_phase(double phase) {
  double w = std::remainder(phase, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double wavelength(Frequency f) { return kSpeedOfLight / f.hz(); }

Wavevector wavenumber(Frequency f) { return {2.0 * kPi * f.hz() / kSpeedOfLight}; }

double to_db_power(double linear) { return 10.0 * std::log10(linear); }
double from_db_power(double db) { return std::pow(10.0, db / 10.0); }

double round_export(double value) { return std::round(value * 1e9) / 1e9; }

}  // namespace irs
