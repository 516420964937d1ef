#pragma once

// Exception taxonomy for the ipg library.
//
// Contract violations (bad ids, malformed sources, dimension errors) throw;
// expected data-dependent outcomes (verification failures, signature
// collisions) are returned as values by the functions that produce them.

#include <stdexcept>
#include <string>

namespace ipg {

// Base class; `kind()` gives a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Lexical/syntactic failure in an expression, unit, plan, or record source.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error("parse_error", message) {}
};

// A unit string names a base unit the table does not know.
class UnknownUnitError : public Error {
public:
    explicit UnknownUnitError(const std::string& unit)
        : Error("unknown_unit", "unknown unit: " + unit), unit_(unit) {}
    const std::string& unit() const noexcept { return unit_; }

private:
    std::string unit_;
};

// Two sides of an operation (or a body vs. its declared output) disagree
// dimensionally.
class DimensionMismatchError : public Error {
public:
    explicit DimensionMismatchError(const std::string& message)
        : Error("dimension_mismatch", message) {}
};

// Evaluation reached a variable with no binding.
class UnboundVariableError : public Error {
public:
    explicit UnboundVariableError(const std::string& name)
        : Error("unbound_variable", "unbound variable: " + name), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// Exact-zero divisor.
class DivisionByZeroError : public Error {
public:
    DivisionByZeroError() : Error("division_by_zero", "division by zero") {}
};

// A math function was applied outside its domain (sqrt of a negative, ...).
class DomainError : public Error {
public:
    DomainError(const std::string& function, double argument)
        : Error("domain_error",
                function + " applied outside its domain (argument " +
                    std::to_string(argument) + ")"),
          function_(function), argument_(argument) {}
    const std::string& function() const noexcept { return function_; }
    double argument() const noexcept { return argument_; }

private:
    std::string function_;
    double argument_;
};

// An intermediate or final value overflowed to inf or became NaN.
class NonFiniteError : public Error {
public:
    NonFiniteError() : Error("non_finite", "evaluation produced a non-finite value") {}
};

// Axiom registration rejected a duplicate formula id.
class DuplicateFormulaIdError : public Error {
public:
    explicit DuplicateFormulaIdError(const std::string& id)
        : Error("duplicate_formula_id", "formula id already registered: " + id) {}
};

// A body references a name that is not a declared parameter.
class UndeclaredParameterError : public Error {
public:
    explicit UndeclaredParameterError(const std::string& name)
        : Error("undeclared_parameter", "body references undeclared parameter: " + name) {}
};

// Lookup/invocation named a formula id absent from the library.
class UnknownFormulaIdError : public Error {
public:
    explicit UnknownFormulaIdError(const std::string& id)
        : Error("unknown_formula_id", "unknown formula id: " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

// Invocation arity does not match the formula's parameter list.
class ArityError : public Error {
public:
    explicit ArityError(const std::string& message) : Error("arity_error", message) {}
};

// A dataset record is structurally unusable (missing/ill-typed fields).
class MalformedRecordError : public Error {
public:
    explicit MalformedRecordError(const std::string& message)
        : Error("malformed_record", message) {}
};

// An operation's stated precondition was violated by the caller.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& message)
        : Error("precondition_error", message) {}
};

// Gateway/backend transport failure (unreachable endpoint, HTTP error).
class BackendError : public Error {
public:
    explicit BackendError(const std::string& message) : Error("backend_error", message) {}
};

// The per-stage retry budget ran out before an acceptable response arrived.
class BudgetExhaustedError : public Error {
public:
    explicit BudgetExhaustedError(const std::string& message)
        : Error("budget_exhausted", message) {}
};

// Bad CLI flags / configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config_error", message) {}
};

// A backend response parsed but violated the pipeline's draft contract
// (wrong unknown count, value out of range, unavailable formula id, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error("validation_error", message) {}
};

// Intrinsic metrics are undefined on an empty record set.
class EmptyDatasetError : public Error {
public:
    EmptyDatasetError() : Error("empty_dataset", "dataset contains no records") {}
};

// A record's chapter label is absent from the seed-count table.
class UnknownChapterLabelError : public Error {
public:
    explicit UnknownChapterLabelError(const std::string& label)
        : Error("unknown_chapter_label", "chapter label \"" + label + "\" has no seed count") {}
};

// The complexity fit needs at least two occupied buckets.
class InsufficientBucketsError : public Error {
public:
    explicit InsufficientBucketsError(std::size_t occupied)
        : Error("insufficient_buckets", "complexity fit needs at least 2 occupied buckets, got " +
                                            std::to_string(occupied)) {}
};

} // namespace ipg
