// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace kvwave {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- configuration / model errors ------------------------------------------

struct OutOfDomain : Error { using Error::Error; };
struct IntervalOrderViolation : Error { using Error::Error; };
struct NegativeDamping : Error { using Error::Error; };
struct ZeroCoupling : Error { using Error::Error; };
struct SscInapplicable : Error { using Error::Error; };
struct BadParameters : Error { using Error::Error; };

// -- discretization errors ---------------------------------------------------

struct ResolutionTooCoarse : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// -- time stepping errors ----------------------------------------------------

struct SingularSystem : Error { using Error::Error; };
struct NonFiniteState : Error { using Error::Error; };
struct WindowTooShort : Error { using Error::Error; };
struct NonPositiveEnergy : Error { using Error::Error; };

// -- spectral errors ---------------------------------------------------------

struct TooLargeForDense : Error { using Error::Error; };
struct NumericallySingular : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };
struct InsufficientSpan : Error { using Error::Error; };

// -- config file errors ------------------------------------------------------

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

} // namespace kvwave
