#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rlra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or parameters violate an operation's precondition.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A sketch lost width: the basis spans fewer than the requested columns.
class RankCollapse : public Error {
public:
    RankCollapse(std::size_t requested, std::size_t achieved)
        : Error("sketch rank collapse: requested width " + std::to_string(requested) +
                ", achieved " + std::to_string(achieved)),
          requested_(requested), achieved_(achieved) {}

    std::size_t requested() const noexcept { return requested_; }
    std::size_t achieved() const noexcept { return achieved_; }

private:
    std::size_t requested_;
    std::size_t achieved_;
};

/// The matrix handed to a pseudoinverse is numerically rank-deficient.
class IllPosedPseudoinverse : public Error {
public:
    using Error::Error;
};

/// No admissible restart remains for the fixed-precision driver.
class Unsatisfiable : public Error {
public:
    using Error::Error;
};

/// Malformed input file or I/O failure; the message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace rlra
