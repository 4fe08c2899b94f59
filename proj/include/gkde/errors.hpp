#pragma once

#include <stdexcept>
#include <string>

namespace gkde {

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! An argument lies outside the domain of the operation.
class DomainError : public Error
{
public:
  using Error::Error;
};

//! The bump density cannot be built for this bandwidth; shrink b.
class BandwidthTooLarge : public DomainError
{
public:
  using DomainError::DomainError;
};

//! Numerical failures: the inputs were valid but a computation broke down.
class NumericalError : public Error
{
public:
  using Error::Error;
};

class QuadratureNonConvergence : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

class NegativeMass : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

class EnvelopeViolation : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

} // namespace gkde
