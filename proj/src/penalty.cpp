#include "scr/penalty.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace scr {

std::string to_string(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::lasso:
      return "lasso";
    case PenaltyFamily::scad:
      return "scad";
    case PenaltyFamily::mcp:
      return "mcp";
  }
  return "unknown";
}

PenaltyFamily parse_penalty_family(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "lasso") return PenaltyFamily::lasso;
  if (lower == "scad") return PenaltyFamily::scad;
  if (lower == "mcp") return PenaltyFamily::mcp;
  throw std::invalid_argument(fmt::format("unknown penalty family '{}'", name));
}

PenaltySpec::PenaltySpec(PenaltyFamily family, double lambda, double gamma)
    : family_(family), lambda_(lambda), gamma_(gamma) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(fmt::format("penalty lambda must be finite and >= 0 (got {})", lambda));
  }
  if (family == PenaltyFamily::scad && !(gamma > 2.0)) {
    throw std::invalid_argument(fmt::format("SCAD requires gamma > 2 (got {})", gamma));
  }
  if (family == PenaltyFamily::mcp && !(gamma > 1.0)) {
    throw std::invalid_argument(fmt::format("MCP requires gamma > 1 (got {})", gamma));
  }
}

PenaltySpec PenaltySpec::lasso(double lambda) { return PenaltySpec(PenaltyFamily::lasso, lambda, 0.0); }
PenaltySpec PenaltySpec::scad(double lambda, double gamma) { return PenaltySpec(PenaltyFamily::scad, lambda, gamma); }
PenaltySpec PenaltySpec::mcp(double lambda, double gamma) { return PenaltySpec(PenaltyFamily::mcp, lambda, gamma); }

PenaltySpec PenaltySpec::make(PenaltyFamily family, double lambda, double gamma) {
  switch (family) {
    case PenaltyFamily::lasso:
      return lasso(lambda);
    case PenaltyFamily::scad:
      return scad(lambda, gamma > 0.0 ? gamma : kDefaultScadGamma);
    case PenaltyFamily::mcp:
      return mcp(lambda, gamma > 0.0 ? gamma : kDefaultMcpGamma);
  }
  throw std::invalid_argument("unknown penalty family");
}

double PenaltySpec::a1() const { return family_ == PenaltyFamily::mcp ? 1.0 - 1.0 / gamma_ : 1.0; }

namespace {

void require_nonnegative(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument(fmt::format("penalty argument must be >= 0 (got {})", t));
}

}  // namespace

double penalty_value(const PenaltySpec& spec, double t) {
  require_nonnegative(t);
  const double lam = spec.lambda();
  const double g = spec.gamma();
  switch (spec.family()) {
    case PenaltyFamily::lasso:
      return lam * t;
    case PenaltyFamily::scad:
      if (t <= lam) return lam * t;
      if (t <= g * lam) return (2.0 * g * lam * t - t * t - lam * lam) / (2.0 * (g - 1.0));
      return lam * lam * (g * g - 1.0) / (2.0 * (g - 1.0));
    case PenaltyFamily::mcp:
      if (t <= g * lam) return lam * t - t * t / (2.0 * g);
      return 0.5 * g * lam * lam;
  }
  return 0.0;
}

double penalty_deriv(const PenaltySpec& spec, double t) {
  require_nonnegative(t);
  const double lam = spec.lambda();
  const double g = spec.gamma();
  switch (spec.family()) {
    case PenaltyFamily::lasso:
      return lam;
    case PenaltyFamily::scad:
      if (t <= lam) return lam;
      if (t <= g * lam) return (g * lam - t) / (g - 1.0);
      return 0.0;
    case PenaltyFamily::mcp:
      if (t <= g * lam) return (g * lam - t) / g;
      return 0.0;
  }
  return 0.0;
}

}  // namespace scr
