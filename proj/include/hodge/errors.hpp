#pragma once

#include <stdexcept>
#include <string>

namespace hodge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed complex: index out of range, unsorted or duplicate simplices.
class InvalidComplex : public Error {
public:
    using Error::Error;
};

/// A triangle references an edge that is not in the complex.
class ClosureViolation : public InvalidComplex {
public:
    using InvalidComplex::InvalidComplex;
};

class Disconnected : public Error {
public:
    using Error::Error;
};

class NotACycle : public Error {
public:
    using Error::Error;
};

class ZeroMatrix : public Error {
public:
    using Error::Error;
};

class ScaleExceeded : public Error {
public:
    using Error::Error;
};

class EdgeInTree : public Error {
public:
    using Error::Error;
};

class TooSparse : public Error {
public:
    using Error::Error;
};

/// Harmonics did not separate the candidate cycles; retry with another seed.
class RankDeficientHarmonics : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace hodge
