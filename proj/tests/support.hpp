#ifndef COPDEP_TESTS_SUPPORT_HPP
#define COPDEP_TESTS_SUPPORT_HPP

#include "copdep/common.hpp"

#include <gtest/gtest.h>
#include <initializer_list>

namespace copdep::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd out(static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) out[i++] = v;
  return out;
}

template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected copdep::Error";
  return ErrorCode::evaluation_failed;
}

}  // namespace copdep::testing

#endif  // COPDEP_TESTS_SUPPORT_HPP
