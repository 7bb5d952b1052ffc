// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_ERROR_H
#define PROCAM_ERROR_H

#include <stdexcept>
#include <string>

namespace procam {

// Malformed input: bad JSON, truncated PFM, unparsable OBJ record.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string &what) : std::runtime_error(what) {}
};

// Well-formed input that violates a declared invariant. `field` names the
// offending value (e.g. "params.projector_gamma[1]").
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string &what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string &field() const { return field_; }

private:
    std::string field_;
};

// Non-finite loss or gradient during optimization.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace procam

#endif  // PROCAM_ERROR_H
