#include "unfold/precision.hpp"

#include "unfold/errors.hpp"

#include <cstdio>
#include <ios>

namespace unfold {

std::string_view to_string(Precision p) {
  return p == Precision::Double ? "double" : "extended";
}

Precision parse_precision(std::string_view text) {
  if (text == "double") return Precision::Double;
  if (text == "extended") return Precision::Extended;
  throw Error(ErrorKind::Domain, "unknown precision '" + std::string(text) + "'");
}

namespace {

template <class Real>
int period_cap_for() {
  int n = 4;
  Real width = 1;  // 4^(4-n)
  while (resolvable(Real(2), width / 4)) {
    width /= 4;
    ++n;
  }
  return n;
}

}  // namespace

int period_cap(Precision p) {
  return p == Precision::Double ? period_cap_for<double>() : period_cap_for<Extended>();
}

std::string to_text(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_text(const Extended& x) { return x.str(36, std::ios::scientific); }

template <>
double parse_real<double>(const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Domain, "not a number: '" + text + "'");
  }
  if (used != text.size()) throw Error(ErrorKind::Domain, "not a number: '" + text + "'");
  return v;
}

template <>
Extended parse_real<Extended>(const std::string& text) {
  try {
    return Extended(text);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Domain, "not a number: '" + text + "'");
  }
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::MinimalityViolated: return "MinimalityViolated";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotMinimalPeriod: return "NotMinimalPeriod";
    case ErrorKind::HyperbolicityLost: return "HyperbolicityLost";
    case ErrorKind::NotEscapeWindow: return "NotEscapeWindow";
    case ErrorKind::CoverageNotReached: return "CoverageNotReached";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::CEViolated: return "CEViolated";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::NotMisiurewicz: return "NotMisiurewicz";
    case ErrorKind::PrecisionCapExceeded: return "PrecisionCapExceeded";
    case ErrorKind::NoRootInBracket: return "NoRootInBracket";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace unfold
