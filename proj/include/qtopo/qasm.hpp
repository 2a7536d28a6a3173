// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#pragma once

#include "qtopo/circuit.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qtopo {

/// Parse failure with the 1-based source position of the offending token.
class QasmError : public std::runtime_error {
public:
    QasmError(const std::string& what, std::size_t line, std::size_t column);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses the OpenQASM 2.0 subset: header, include, one qreg, optional creg,
/// h/x/s/t/rz/cx/swap, measure and barrier. Any other gate applied to two
/// qubits (cz, cp, crz, ...) is normalized to CX; other single-qubit gates
/// are rejected. Angles accept numeric literals, `pi` and + - * / ( ).
Circuit parse_qasm(std::string_view text);

/// Canonical OpenQASM 2.0 text. parse_qasm(emit_qasm(c)) == c.
std::string emit_qasm(const Circuit& c);

}  // namespace qtopo
