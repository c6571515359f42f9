#ifndef BOSELAB_ERRORS_HPP
#define BOSELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace boselab {

// A numerical procedure failed: non-finite value, non-convergence,
// or schemes disagreeing beyond their own error estimates.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested computation exceeds a configured resource cap.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace boselab

#endif
