#pragma once

#include <stdexcept>
#include <string>

namespace pkpir {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameters outside the model's domain (N < 2, M >= K, theta cached, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A retrieval request against a plan with unequal per-database cache shares.
/// The scheme implemented here is defined only for m_n = M/N.
class NonUniformError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A prefetch plan violating its own invariants (overlap, range, size).
class PlanError : public Error {
public:
    using Error::Error;
};

/// Generated table counts disagree with the closed-form counts; a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

class LengthError : public Error {
public:
    using Error::Error;
};

class WidthError : public Error {
public:
    using Error::Error;
};

/// Duplicate or out-of-range codeword positions.
class PositionError : public Error {
public:
    using Error::Error;
};

/// Interpolation hit a singular system; impossible for a valid MDS code.
class SingularError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ReconstructError : public Error {
public:
    using Error::Error;
};

/// The decoder's peeling pass found an unresolvable row; a malformed table.
class PeelError : public Error {
public:
    using Error::Error;
};

/// An audit grid too large for exhaustive enumeration.
class BudgetError : public Error {
public:
    using Error::Error;
};

}  // namespace pkpir
