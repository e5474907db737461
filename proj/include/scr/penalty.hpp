#pragma once

#include <string>

namespace scr {

enum class PenaltyFamily { lasso, scad, mcp };

inline constexpr double kDefaultScadGamma = 3.7;
inline constexpr double kDefaultMcpGamma = 1.5;

std::string to_string(PenaltyFamily family);
/// Accepts "lasso", "scad", "mcp" (case-insensitive).
PenaltyFamily parse_penalty_family(const std::string& name);

/**
 * Penalty family with level lambda and concavity gamma.
 *
 * a1 and a2 are the constants for which p'(t) >= a1 * lambda on (0, a2 * lambda]:
 * SCAD has a1 = a2 = 1, MCP has a1 = 1 - 1/gamma and a2 = 1. Lasso ignores gamma.
 */
class PenaltySpec {
 public:
  static PenaltySpec lasso(double lambda);
  static PenaltySpec scad(double lambda, double gamma = kDefaultScadGamma);
  static PenaltySpec mcp(double lambda, double gamma = kDefaultMcpGamma);
  /// Family default gamma when `gamma` is not positive.
  static PenaltySpec make(PenaltyFamily family, double lambda, double gamma = 0.0);

  PenaltyFamily family() const { return family_; }
  double lambda() const { return lambda_; }
  double gamma() const { return gamma_; }
  double a1() const;
  double a2() const { return 1.0; }

  PenaltySpec with_lambda(double lambda) const { return make(family_, lambda, gamma_); }

 private:
  PenaltySpec(PenaltyFamily family, double lambda, double gamma);

  PenaltyFamily family_;
  double lambda_;
  double gamma_;
};

/// p_lambda(t) for t >= 0; throws std::invalid_argument on negative t.
double penalty_value(const PenaltySpec& spec, double t);

/// p'_lambda(t) for t >= 0, with p'(0) taken as the right derivative.
double penalty_deriv(const PenaltySpec& spec, double t);

}  // namespace scr
