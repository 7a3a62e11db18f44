#pragma once

#include <stdexcept>
#include <string>

namespace skewpower {

/// Invalid distribution or fit parameters (sigma <= 0, |eps| >= 1, ...).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Bad input data: empty, non-finite, malformed file rows.
struct data_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// All-identical data: the scale update would collapse to zero.
struct degenerate_scale_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested moment does not exist (tail too heavy for the order asked).
struct moment_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Classical information quantities are undefined for these parameters
/// (exponential power with alpha <= 1).
struct regularity_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Numerical failure: non-convergent quadrature, singular matrix.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace skewpower
