// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/qasm.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace qtopo {

QasmError::QasmError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         what),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Number, String, Symbol, Arrow, End };

struct Token {
    Tok type = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.column = col_;
        if (pos_ >= src_.size()) return t;

        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.type = Tok::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                t.text += advance();
            }
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            t.type = Tok::Number;
            while (pos_ < src_.size()) {
                const char d = src_[pos_];
                const bool exp_sign = (d == '+' || d == '-') && !t.text.empty() &&
                                      (t.text.back() == 'e' || t.text.back() == 'E');
                if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' || exp_sign) {
                    t.text += advance();
                } else {
                    break;
                }
            }
        } else if (c == '"') {
            t.type = Tok::String;
            advance();
            while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') t.text += advance();
            if (pos_ >= src_.size() || src_[pos_] != '"') {
                throw QasmError("unterminated string", t.line, t.column);
            }
            advance();
        } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            t.type = Tok::Arrow;
            t.text = "->";
            advance();
            advance();
        } else if (std::string_view("[](),;+-*/^").find(c) != std::string_view::npos) {
            t.type = Tok::Symbol;
            t.text = std::string(1, advance());
        } else {
            throw QasmError(std::string("unexpected character '") + c + "'", t.line, t.column);
        }
        return t;
    }

private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

/// One operand: a register name with an optional index.
struct Operand {
    std::string reg;
    std::optional<std::size_t> index;
    Token at;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

    Circuit run() {
        if (is_ident("OPENQASM")) {
            take();
            expect(Tok::Number, "version number");
            expect_symbol(";");
        }
        while (cur_.type != Tok::End) statement();
        if (!qreg_) throw QasmError("missing qreg declaration", cur_.line, cur_.column);
        circuit_.set_num_clbits(clbits_);
        return std::move(circuit_);
    }

private:
    [[noreturn]] void fail(const std::string& msg, const Token& t) const {
        throw QasmError(msg, t.line, t.column);
    }

    Token take() {
        Token t = std::move(cur_);
        cur_ = lex_.next();
        return t;
    }

    bool is_ident(std::string_view s) const { return cur_.type == Tok::Ident && cur_.text == s; }
    bool is_symbol(std::string_view s) const { return cur_.type == Tok::Symbol && cur_.text == s; }

    Token expect(Tok type, const char* what) {
        if (cur_.type != type) fail(std::string("expected ") + what, cur_);
        return take();
    }

    void expect_symbol(std::string_view s) {
        if (!is_symbol(s)) fail("expected '" + std::string(s) + "'", cur_);
        take();
    }

    std::size_t parse_uint(const Token& t) const {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail("expected integer", t);
        return v;
    }

    void statement() {
        if (is_ident("include")) {
            take();
            expect(Tok::String, "file name");
            expect_symbol(";");
        } else if (is_ident("qreg")) {
            const Token kw = take();
            if (qreg_) fail("multiple qregs are not supported", kw);
            auto [name, size] = declaration();
            if (size == 0) fail("empty qreg", kw);
            qreg_ = name;
            circuit_ = Circuit(size, circuit_.name());
        } else if (is_ident("creg")) {
            take();
            auto [name, size] = declaration();
            cregs_[name] = {clbits_, size};
            clbits_ += size;
        } else if (is_ident("measure")) {
            measure();
        } else if (is_ident("barrier")) {
            const Token kw = take();
            for (;;) {
                for (Qubit q : expand(operand(), kw)) circuit_.append(GateOp::single(GateKind::BARRIER, q));
                if (!is_symbol(",")) break;
                take();
            }
            expect_symbol(";");
        } else if (is_ident("gate") || is_ident("opaque") || is_ident("if") || is_ident("reset")) {
            fail("unsupported statement '" + cur_.text + "'", cur_);
        } else if (cur_.type == Tok::Ident) {
            gate_application();
        } else {
            fail("expected statement", cur_);
        }
    }

    std::pair<std::string, std::size_t> declaration() {
        Token name = expect(Tok::Ident, "register name");
        expect_symbol("[");
        const Token size = expect(Tok::Number, "register size");
        expect_symbol("]");
        expect_symbol(";");
        return {name.text, parse_uint(size)};
    }

    Operand operand() {
        Operand op;
        op.at = expect(Tok::Ident, "operand");
        op.reg = op.at.text;
        if (is_symbol("[")) {
            take();
            op.index = parse_uint(expect(Tok::Number, "index"));
            expect_symbol("]");
        }
        return op;
    }

    /// Qubits named by an operand; a bare register expands to all of it.
    std::vector<Qubit> expand(const Operand& op, const Token& stmt) const {
        if (!qreg_) fail("gate before qreg declaration", stmt);
        if (op.reg != *qreg_) fail("unknown quantum register '" + op.reg + "'", op.at);
        if (op.index) {
            if (*op.index >= circuit_.num_qubits()) fail("qubit index out of range", op.at);
            return {static_cast<Qubit>(*op.index)};
        }
        std::vector<Qubit> all(circuit_.num_qubits());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Qubit>(i);
        return all;
    }

    void measure() {
        const Token kw = take();
        const Operand q = operand();
        if (cur_.type != Tok::Arrow) fail("expected '->'", cur_);
        take();
        const Operand c = operand();
        expect_symbol(";");

        const auto it = cregs_.find(c.reg);
        if (it == cregs_.end()) fail("unknown classical register '" + c.reg + "'", c.at);
        const auto [offset, size] = it->second;
        const std::vector<Qubit> qubits = expand(q, kw);
        if (c.index) {
            if (*c.index >= size) fail("classical bit index out of range", c.at);
            if (qubits.size() != 1) fail("register size mismatch in measure", kw);
            circuit_.append(GateOp::single(GateKind::MEASURE, qubits[0], {double(offset + *c.index)}));
            return;
        }
        if (qubits.size() != size) fail("register size mismatch in measure", kw);
        for (std::size_t i = 0; i < size; ++i) {
            circuit_.append(GateOp::single(GateKind::MEASURE, qubits[i], {double(offset + i)}));
        }
    }

    double expr() {
        double v = term();
        while (is_symbol("+") || is_symbol("-")) {
            const bool plus = take().text == "+";
            const double rhs = term();
            v = plus ? v + rhs : v - rhs;
        }
        return v;
    }

    double term() {
        double v = factor();
        while (is_symbol("*") || is_symbol("/")) {
            const bool mul = take().text == "*";
            const double rhs = factor();
            v = mul ? v * rhs : v / rhs;
        }
        return v;
    }

    double factor() {
        if (is_symbol("-")) {
            take();
            return -factor();
        }
        if (is_symbol("+")) {
            take();
            return factor();
        }
        if (is_symbol("(")) {
            take();
            const double v = expr();
            expect_symbol(")");
            return v;
        }
        if (is_ident("pi")) {
            take();
            return std::numbers::pi;
        }
        const Token t = expect(Tok::Number, "number");
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail("malformed number", t);
        return v;
    }

    void gate_application() {
        const Token name = take();
        std::vector<double> params;
        if (is_symbol("(")) {
            take();
            if (!is_symbol(")")) {
                params.push_back(expr());
                while (is_symbol(",")) {
                    take();
                    params.push_back(expr());
                }
            }
            expect_symbol(")");
        }
        std::vector<Operand> args{operand()};
        while (is_symbol(",")) {
            take();
            args.push_back(operand());
        }
        expect_symbol(";");

        static const std::unordered_map<std::string, GateKind> singles = {
            {"h", GateKind::H}, {"x", GateKind::X}, {"s", GateKind::S}, {"t", GateKind::T}, {"rz", GateKind::RZ}};

        std::string lower;
        for (char ch : name.text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));

        if (const auto it = singles.find(lower); it != singles.end()) {
            if (args.size() != 1) fail("gate '" + name.text + "' takes one qubit", name);
            const std::size_t want = it->second == GateKind::RZ ? 1 : 0;
            if (params.size() != want) fail("wrong parameter count for '" + name.text + "'", name);
            for (Qubit q : expand(args[0], name)) circuit_.append(GateOp::single(it->second, q, params));
            return;
        }
        if (args.size() == 2) {
            // swap keeps its identity; every other two-qubit gate reduces to its interaction pair.
            const GateKind kind = lower == "swap" ? GateKind::SWAP : GateKind::CX;
            const auto a = expand(args[0], name);
            const auto b = expand(args[1], name);
            if (a.size() != b.size() && a.size() != 1 && b.size() != 1) {
                fail("register size mismatch", name);
            }
            const std::size_t n = std::max(a.size(), b.size());
            for (std::size_t i = 0; i < n; ++i) {
                const Qubit qa = a[a.size() == 1 ? 0 : i];
                const Qubit qb = b[b.size() == 1 ? 0 : i];
                if (qa == qb) fail("two-qubit gate on identical qubits", args[1].at);
                circuit_.append(GateOp::pair(kind, qa, qb));
            }
            return;
        }
        fail("unsupported gate '" + name.text + "'", name);
    }

    Lexer lex_;
    Token cur_;
    Circuit circuit_;
    std::optional<std::string> qreg_;
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> cregs_;
    std::size_t clbits_ = 0;
};

}  // namespace

Circuit parse_qasm(std::string_view text) { return Parser(text).run(); }

std::string emit_qasm(const Circuit& c) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    out << "qreg q[" << c.num_qubits() << "];\n";
    if (c.num_clbits() > 0) out << "creg c[" << c.num_clbits() << "];\n";
    char buf[64];
    for (const GateOp& g : c.gates()) {
        switch (g.kind) {
            case GateKind::MEASURE:
                out << "measure q[" << g.q0 << "] -> c[" << static_cast<std::size_t>(g.params.at(0)) << "];\n";
                break;
            case GateKind::RZ:
                std::snprintf(buf, sizeof buf, "%.17g", g.params.at(0));
                out << "rz(" << buf << ") q[" << g.q0 << "];\n";
                break;
            default:
                out << gate_name(g.kind) << " q[" << g.q0 << "]";
                if (g.arity() == 2) out << ",q[" << g.q1 << "]";
                out << ";\n";
        }
    }
    return out.str();
}

}  // namespace qtopo
