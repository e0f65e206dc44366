#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rnla {

// Dimension or structural mismatch between operands.
class shape_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Out-of-range algorithm parameter (rank, oversampling, gamma, ...).
class parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Cholesky hit a non-positive-definite pivot.
class definiteness_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A randomized decomposition failed after its retry budget.
// Carries the numerical rank detected before giving up.
class decomposition_error : public std::runtime_error {
public:
    decomposition_error(const std::string& what, std::size_t detected_rank)
        : std::runtime_error(what), detected_rank_(detected_rank) {}
    std::size_t detected_rank() const noexcept { return detected_rank_; }

private:
    std::size_t detected_rank_;
};

// Model file could not be read back (bad manifest, blob mismatch, version).
class load_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A tuner layer selector matched nothing.
class selection_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// apply_best_params referenced a missing or already-sketched layer.
class application_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No trial satisfied the accuracy constraint.
class no_feasible_config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A benchmarked thunk threw; carries the iteration index.
class benchmark_error : public std::runtime_error {
public:
    benchmark_error(const std::string& what, std::size_t iteration)
        : std::runtime_error(what), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

} // namespace rnla
