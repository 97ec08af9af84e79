#pragma once

#include <stdexcept>
#include <string>

namespace wald4 {

/// Thrown by metric_from_form when some edge value of the form is negative
/// beyond tolerance; carries the offending pair.
class not_a_semimetric_error : public std::domain_error {
public:
  not_a_semimetric_error(int i, int j, double value)
      : std::domain_error("form edge value for pair (" + std::to_string(i + 1) +
                          "," + std::to_string(j + 1) +
                          ") is negative: " + std::to_string(value)),
        i_(i), j_(j), value_(value) {}
  int i() const { return i_; }
  int j() const { return j_; }
  double value() const { return value_; }

private:
  int i_, j_;
  double value_;
};

class not_euclidean_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class not_cbb_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class not_cat_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class not_on_side_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Signals that an internal construction step reached a state the
/// surrounding theory rules out (e.g. peeling produced a reduced form
/// without a recognizable equality pattern).
class internal_inconsistency_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace wald4
