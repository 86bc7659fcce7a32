#pragma once

#include <string>
#include <vector>

namespace remest {

/// Non-decreasing penalty rho(delta) applied to the distortion of an error
/// that has persisted for delta slots.
class AgeFunction {
 public:
  enum class Kind { ExponentialAffine, Polynomial, Table };

  /// a * exp(b * delta) + c
  static AgeFunction exponential_affine(double a, double b, double c);
  /// sum_k coeffs[k] * delta^k
  static AgeFunction polynomial(std::vector<double> coeffs);
  /// values[delta] inside the table; geometric continuation with ratio
  /// `tail_ratio` past its end.
  static AgeFunction table(std::vector<double> values, double tail_ratio);

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  double tail_ratio() const { return tail_ratio_; }

  double operator()(int delta) const;

  /// lim rho(delta+1)/rho(delta), used by the existence ratio test.
  double limit_ratio() const;

  /// Throws AgeFunctionError if a parameter is negative or rho decreases
  /// somewhere on 0..delta_max+1.
  void validate(int delta_max) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Polynomial;
  std::vector<double> params_;
  double tail_ratio_ = 1.0;
};

inline double age_penalty(const AgeFunction& rho, int delta) { return rho(delta); }

}  // namespace remest
