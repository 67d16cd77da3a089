#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration or parameter outside its documented range.
class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(what) {}
};

/// Input outside the mathematical domain of an operation.
class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(what) {}
};

/// Evaluation requested at (or within the exclusion radius of) a singularity.
class singularity_error : public error {
public:
    explicit singularity_error(const std::string& what) : error(what) {}
};

/// Series truncation cannot reach the requested tolerance within the term cap.
class truncation_error : public error {
public:
    truncation_error(const std::string& what, long required_terms_)
        : error(what), required_terms(required_terms_) {}
    long required_terms;  ///< term count the tolerance would have needed
};

/// Curve self-intersection or otherwise invalid patch geometry.
class geometry_error : public error {
public:
    explicit geometry_error(const std::string& what) : error(what) {}
};

/// Iterative solver failed to converge within its iteration budget.
class convergence_error : public error {
public:
    explicit convergence_error(const std::string& what) : error(what) {}
};

/// Linear system rank-deficient beyond the expected null space.
class rank_error : public error {
public:
    explicit rank_error(const std::string& what) : error(what) {}
};

}  // namespace vortex
