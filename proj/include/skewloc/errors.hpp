#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace skewloc {

/// Invalid parameters or configuration. The message names the violated
/// invariant.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its target accuracy.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, std::string term = {}, double residual = 0.0)
        : std::runtime_error(term.empty() ? what : term + ": " + what),
          term_(std::move(term)),
          residual_(residual) {}

    const std::string& term() const noexcept { return term_; }
    double residual() const noexcept { return residual_; }

private:
    std::string term_;
    double residual_;
};

class QuadratureError : public NumericError {
public:
    using NumericError::NumericError;
};

class DivergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Series truncation failed its decay sanity check; carries the partial sums.
class SeriesError : public NumericError {
public:
    SeriesError(const std::string& what, std::vector<double> partial_sums)
        : NumericError(what, "series",
                       partial_sums.size() >= 2
                           ? partial_sums.back() - partial_sums[partial_sums.size() - 2]
                           : 0.0),
          partial_sums_(std::move(partial_sums)) {}

    const std::vector<double>& partial_sums() const noexcept { return partial_sums_; }

private:
    std::vector<double> partial_sums_;
};

}  // namespace skewloc
