// Exception types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace bayesfda {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (empty data, bad sizes, NaN, ...).
struct invalid_input : error {
    using error::error;
};

/// Two grid-valued arguments do not share the same Box/resolution.
struct grid_mismatch : error {
    using error::error;
};

/// Data without the spread required by an estimator (zero MAD, constant column, ...).
struct degenerate_data : error {
    using error::error;
};

/// A sample falls outside the support Box it is supposed to live on.
struct out_of_support : error {
    using error::error;
};

/// Numeric range failure, e.g. overflow/underflow when exponentiating.
struct range_failure : error {
    using error::error;
};

/// Structurally invalid file content (missing header, wrong column count, ...).
struct format_error : error {
    using error::error;
};

/// A pipeline stage aborted; message carries stage name and context.
struct stage_failure : error {
    using error::error;
};

} // namespace bayesfda
