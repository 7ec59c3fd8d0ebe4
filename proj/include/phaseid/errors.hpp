// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace phaseid {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures.
class NotPositiveDefinite : public Error { public: using Error::Error; };
class NegativeDiagonal : public Error { public: using Error::Error; };
class Diverged : public Error { public: using Error::Error; };

// Request / precondition failures.
class EmptyComplement : public Error { public: using Error::Error; };
class BadCardinality : public Error { public: using Error::Error; };
class TooLarge : public Error { public: using Error::Error; };
class OutOfRange : public Error { public: using Error::Error; };
class ShapeMismatch : public Error { public: using Error::Error; };
class UnsupportedLabel : public Error { public: using Error::Error; };

// Data failures.
class ZeroNormRow : public Error { public: using Error::Error; };
class ZeroMeanRow : public Error { public: using Error::Error; };
class ZeroDiagonal : public Error { public: using Error::Error; };
class ConstantRow : public Error { public: using Error::Error; };
class NoLabels : public Error { public: using Error::Error; };
class EmptyTrain : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class UnknownLabel : public Error { public: using Error::Error; };
class IdMismatch : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

}  // namespace phaseid
