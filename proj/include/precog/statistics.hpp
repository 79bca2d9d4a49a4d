#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace precog {

class CorrelationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct PearsonResult {
  double r = 0.0;
  /// Two-sided, from Student's t with n - 2 degrees of freedom.
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Product-moment correlation. Throws CorrelationError for n < 3, mismatched
/// lengths or zero variance.
PearsonResult pearson(std::span<const double> xs, std::span<const double> ys);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction,
/// absolute error well under 1e-12 for the arguments used here.
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

}  // namespace precog
