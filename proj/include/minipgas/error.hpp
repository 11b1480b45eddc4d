#ifndef MINIPGAS_ERROR_HPP
#define MINIPGAS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace minipgas {

/// Root of every error raised by the runtime and the kernels.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Element kind of a GlobalRef does not match its segment.
class TypeError : public Error {
public:
    using Error::Error;
};

/// Segment budget exhausted.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Direct access requested to memory owned by another rank.
class OwnershipError : public Error {
public:
    using Error::Error;
};

/// Collective entered inconsistently (mismatched root, barrier timeout, ...).
class CollectiveError : public Error {
public:
    using Error::Error;
};

/// Overlapping writes within one barrier-delimited phase (debug mode only).
class OverlapError : public Error {
public:
    using Error::Error;
};

/// Computation against data from a stale exchange (debug mode only).
class PhaseError : public Error {
public:
    using Error::Error;
};

/// Malformed matrix structure (missing diagonal, duplicates, non-square).
class StructureError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, long line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

/// A rank failed; carries the id of the first failing rank.
class WorldError : public Error {
public:
    WorldError(int rank, const std::string& what)
        : Error("rank " + std::to_string(rank) + ": " + what), rank_(rank) {}

    int rank() const noexcept { return rank_; }

private:
    int rank_;
};

} // namespace minipgas

#endif // MINIPGAS_ERROR_HPP
