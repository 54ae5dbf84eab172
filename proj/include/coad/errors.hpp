#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace coad {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input shapes disagree (matrix rows vs response length, vector lengths, ...).
struct DimensionMismatch : Error {
    using Error::Error;
};

/// A column index fell outside {1..p} (1-based at the parse boundary).
struct IndexOutOfRange : Error {
    using Error::Error;
};

/// Group file / group structure is malformed (duplicates, empty group,
/// incomplete cover).
struct InvalidGroups : Error {
    using Error::Error;
};

/// A weight scheme was combined with an incompatible group structure.
struct SchemeGroupMismatch : Error {
    using Error::Error;
};

/// Every penalty weight is infinite: nothing can enter the model.
struct AllExcluded : Error {
    using Error::Error;
};

/// Restricted Gram submatrix is numerically singular.
struct SingularGram : Error {
    SingularGram(std::string msg, std::vector<int> subset)
        : Error(std::move(msg)), subset(std::move(subset)) {}
    std::vector<int> subset;
};

/// Objective became NaN/Inf during optimization; input data is corrupt.
struct NonFinite : Error {
    using Error::Error;
};

/// Exact restricted-eigenvalue evaluation requested beyond the supported size.
struct TooLargeForExact : Error {
    using Error::Error;
};

/// Generic invalid-argument error for solver/scenario parameters.
struct InvalidArgument : Error {
    using Error::Error;
};

}  // namespace coad
