#include "remest/age_function.hpp"

#include "remest/errors.hpp"

#include <cmath>
#include <sstream>

namespace remest {

AgeFunction AgeFunction::exponential_affine(double a, double b, double c) {
  AgeFunction f;
  f.kind_ = Kind::ExponentialAffine;
  f.params_ = {a, b, c};
  return f;
}

AgeFunction AgeFunction::polynomial(std::vector<double> coeffs) {
  AgeFunction f;
  f.kind_ = Kind::Polynomial;
  f.params_ = std::move(coeffs);
  return f;
}

AgeFunction AgeFunction::table(std::vector<double> values, double tail_ratio) {
  if (values.empty()) throw AgeFunctionError("age-function table is empty");
  AgeFunction f;
  f.kind_ = Kind::Table;
  f.params_ = std::move(values);
  f.tail_ratio_ = tail_ratio;
  return f;
}

double AgeFunction::operator()(int delta) const {
  if (delta < 0) throw DomainError("age penalty needs delta >= 0");
  switch (kind_) {
    case Kind::ExponentialAffine:
      return params_[0] * std::exp(params_[1] * delta) + params_[2];
    case Kind::Polynomial: {
      double acc = 0.0;
      for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * delta + *it;
      return acc;
    }
    case Kind::Table: {
      const int last = static_cast<int>(params_.size()) - 1;
      if (delta <= last) return params_[delta];
      return params_[last] * std::pow(tail_ratio_, delta - last);
    }
  }
  return 0.0;
}

double AgeFunction::limit_ratio() const {
  switch (kind_) {
    case Kind::ExponentialAffine:
      return params_[0] > 0.0 ? std::exp(params_[1]) : 1.0;
    case Kind::Polynomial:
      return 1.0;
    case Kind::Table:
      return tail_ratio_;
  }
  return 1.0;
}

void AgeFunction::validate(int delta_max) const {
  for (double p : params_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw AgeFunctionError("age-function parameters must be finite and nonnegative: " + describe());
    }
  }
  if (kind_ == Kind::Table && !(tail_ratio_ >= 1.0)) {
    throw AgeFunctionError("age-function tail_ratio must be >= 1 to stay non-decreasing");
  }
  double prev = (*this)(0);
  for (int d = 1; d <= delta_max + 1; ++d) {
    double v = (*this)(d);
    if (v < prev) {
      std::ostringstream os;
      os << "age function decreases between delta=" << d - 1 << " and " << d;
      throw AgeFunctionError(os.str());
    }
    prev = v;
  }
}

std::string AgeFunction::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind_) {
    case Kind::ExponentialAffine:
      os << "exponential_affine(a=" << params_[0] << ", b=" << params_[1] << ", c=" << params_[2] << ")";
      break;
    case Kind::Polynomial:
      os << "polynomial(";
      for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? ", " : "") << params_[i];
      os << ")";
      break;
    case Kind::Table:
      os << "table(n=" << params_.size() << ", tail_ratio=" << tail_ratio_ << ")";
      break;
  }
  return os.str();
}

}  // namespace remest
