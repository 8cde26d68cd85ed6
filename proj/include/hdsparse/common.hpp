#pragma once
#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdsparse {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad shape, bad parameter range).
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// A numerical procedure did not reach its target (iteration caps, non-finite values).
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Free-form warnings collected alongside a result instead of printed.
using Warnings = std::vector<std::string>;

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidArgument(what);
}

} // namespace hdsparse
