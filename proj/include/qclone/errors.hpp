#pragma once

#include <stdexcept>
#include <string>

namespace qclone {

// Base for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad dimensions, indices, or argument values.
struct argument_error : error {
    using error::error;
};

// A dimension product exceeded a configured cap.
struct size_error : error {
    size_error(std::size_t required, std::size_t allowed)
        : error("size cap exceeded: required dimension " + std::to_string(required) +
                ", allowed " + std::to_string(allowed)),
          required(required), allowed(allowed) {}
    std::size_t required;
    std::size_t allowed;
};

// A caller-supplied set of vectors failed an orthonormality/consistency precondition.
struct precondition_error : error {
    using error::error;
};

// Gram matrices of a defining input/output pair set disagree: the pairs do not
// define an isometry on their span.
struct not_an_isometry_error : precondition_error {
    not_an_isometry_error(std::size_t i, std::size_t j, double mismatch)
        : precondition_error("defining pairs are not an isometry: worst Gram mismatch " +
                             std::to_string(mismatch) + " at entry (" + std::to_string(i) +
                             "," + std::to_string(j) + ")"),
          row(i), col(j), mismatch(mismatch) {}
    std::size_t row;
    std::size_t col;
    double mismatch;
};

// Probabilistic cloner asked to clone two (anti)parallel states.
struct degenerate_pair_error : error {
    using error::error;
};

// A fixed-blank machine was given a blank other than its designated one.
// Recoverable by running with the force/override flag.
struct blank_mismatch_error : error {
    using error::error;
};

// Operation not defined for this machine variant.
struct unsupported_variant_error : error {
    using error::error;
};

}  // namespace qclone
