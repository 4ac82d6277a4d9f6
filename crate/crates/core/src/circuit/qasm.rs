//! OPENQASM 2.0 subset: a single `qreg` and the gates `cx`, `rz`, `h`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, Gate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct QasmError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Header, include line, one `qreg`, then one gate per line. Angles are
/// printed in scientific notation with 17 significant digits, which
/// round-trips every finite `f64`.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.n());
    for g in c.gates() {
        let _ = match *g {
            Gate::Cnot { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
            Gate::Rz { angle, qubit } => writeln!(out, "rz({angle:.16e}) q[{qubit}];"),
            Gate::H { qubit } => writeln!(out, "h q[{qubit}];"),
        };
    }
    out
}

pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    Parser::new(text).program()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Int(usize),
    Str(String),
    Sym(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(x) => format!("number {x}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    peeked: Option<(Tok, usize, usize)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
            peeked: None,
        }
    }

    fn err_at<T>(&self, line: usize, column: usize, message: impl Into<String>) -> Result<T, QasmError> {
        Err(QasmError {
            line,
            column,
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Option<u8> {
        let b = *self.src.get(self.pos)?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else if b & 0xC0 != 0x80 {
            self.col += 1;
        }
        Some(b)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.src.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'/') => {
                    while !matches!(self.src.get(self.pos), None | Some(b'\n')) {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn lex(&mut self) -> Result<(Tok, usize, usize), QasmError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let Some(&b) = self.src.get(self.pos) else {
            return Ok((Tok::Eof, line, col));
        };
        let start = self.pos;
        let tok = if b.is_ascii_alphabetic() || b == b'_' {
            while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_alphanumeric() || *c == b'_') {
                self.bump();
            }
            Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        } else if b.is_ascii_digit() || b == b'.' {
            let mut is_int = true;
            while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            if self.src.get(self.pos) == Some(&b'.') {
                is_int = false;
                self.bump();
                while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            }
            if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
                is_int = false;
                self.bump();
                if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                    self.bump();
                }
                if !matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
                    return self.err_at(line, col, "malformed exponent in number");
                }
                while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            if is_int {
                match text.parse::<usize>() {
                    Ok(i) => Tok::Int(i),
                    Err(_) => return self.err_at(line, col, format!("integer {text} is too large")),
                }
            } else {
                match text.parse::<f64>() {
                    Ok(x) => Tok::Number(x),
                    Err(_) => return self.err_at(line, col, format!("malformed number {text:?}")),
                }
            }
        } else if b == b'"' {
            self.bump();
            while !matches!(self.src.get(self.pos), None | Some(b'"' | b'\n')) {
                self.bump();
            }
            if self.src.get(self.pos) != Some(&b'"') {
                return self.err_at(line, col, "unterminated string");
            }
            self.bump();
            Tok::Str(String::from_utf8_lossy(&self.src[start + 1..self.pos - 1]).into_owned())
        } else if b"[](),;+-*/".contains(&b) {
            self.bump();
            Tok::Sym(b as char)
        } else {
            let ch = std::str::from_utf8(&self.src[start..])
                .ok()
                .and_then(|s| s.chars().next())
                .unwrap_or('\u{fffd}');
            return self.err_at(line, col, format!("unexpected character {ch:?}"));
        };
        Ok((tok, line, col))
    }

    fn peek(&mut self) -> Result<&(Tok, usize, usize), QasmError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn next(&mut self) -> Result<(Tok, usize, usize), QasmError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        let (tok, line, col) = self.next()?;
        if tok == Tok::Sym(c) {
            Ok(())
        } else {
            self.err_at(line, col, format!("expected `{c}`, found {}", tok.describe()))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), QasmError> {
        match self.next()? {
            (Tok::Ident(s), line, col) => Ok((s, line, col)),
            (tok, line, col) => self.err_at(line, col, format!("expected {what}, found {}", tok.describe())),
        }
    }

    fn expect_int(&mut self) -> Result<(usize, usize, usize), QasmError> {
        match self.next()? {
            (Tok::Int(i), line, col) => Ok((i, line, col)),
            (tok, line, col) => self.err_at(line, col, format!("expected an integer, found {}", tok.describe())),
        }
    }

    fn program(&mut self) -> Result<Circuit, QasmError> {
        let (kw, line, col) = self.expect_ident("`OPENQASM`")?;
        if kw != "OPENQASM" {
            return self.err_at(line, col, format!("expected `OPENQASM` header, found `{kw}`"));
        }
        match self.next()? {
            (Tok::Number(2.0), _, _) => {}
            (Tok::Int(2), _, _) => {}
            (tok, line, col) => {
                return self.err_at(
                    line,
                    col,
                    format!("only OPENQASM 2.0 is supported, found {}", tok.describe()),
                )
            }
        }
        self.expect_sym(';')?;

        let mut reg: Option<(String, usize)> = None;
        let mut circuit = Circuit::new(0);
        loop {
            let (tok, line, col) = self.next()?;
            let name = match tok {
                Tok::Eof => break,
                Tok::Ident(s) => s,
                other => return self.err_at(line, col, format!("expected a statement, found {}", other.describe())),
            };
            match name.as_str() {
                "include" => {
                    match self.next()? {
                        (Tok::Str(_), _, _) => {}
                        (tok, l, c) => {
                            return self.err_at(l, c, format!("expected a file name, found {}", tok.describe()))
                        }
                    }
                    self.expect_sym(';')?;
                }
                "qreg" => {
                    if reg.is_some() {
                        return self.err_at(line, col, "only one qreg is supported");
                    }
                    let (id, _, _) = self.expect_ident("a register name")?;
                    self.expect_sym('[')?;
                    let (size, _, _) = self.expect_int()?;
                    self.expect_sym(']')?;
                    self.expect_sym(';')?;
                    circuit = Circuit::new(size);
                    reg = Some((id, size));
                }
                "creg" | "measure" | "barrier" | "reset" | "if" | "gate" | "opaque" => {
                    return self.err_at(line, col, format!("`{name}` is not supported (only qreg, cx, rz, h)"));
                }
                "cx" | "CX" | "rz" | "h" => {
                    let Some(reg) = reg.as_ref() else {
                        return self.err_at(line, col, "gate used before any qreg declaration");
                    };
                    let gate = match name.as_str() {
                        "cx" | "CX" => {
                            let (control, l, c) = self.qubit(reg)?;
                            self.expect_sym(',')?;
                            let (target, _, _) = self.qubit(reg)?;
                            if control == target {
                                return self.err_at(l, c, format!("cx control and target are both q[{control}]"));
                            }
                            Gate::Cnot { control, target }
                        }
                        "rz" => {
                            self.expect_sym('(')?;
                            let (el, ec) = {
                                let p = self.peek()?;
                                (p.1, p.2)
                            };
                            let angle = self.expr()?;
                            if !angle.is_finite() {
                                return self.err_at(el, ec, "angle is not a finite number");
                            }
                            self.expect_sym(')')?;
                            let (qubit, _, _) = self.qubit(reg)?;
                            Gate::Rz { angle, qubit }
                        }
                        _ => Gate::H {
                            qubit: self.qubit(reg)?.0,
                        },
                    };
                    self.expect_sym(';')?;
                    circuit.push(gate).expect("operands validated by the parser");
                }
                other => return self.err_at(line, col, format!("unsupported gate or statement `{other}`")),
            }
        }
        if reg.is_none() {
            return self.err_at(self.line, self.col, "missing qreg declaration");
        }
        Ok(circuit)
    }

    fn qubit(&mut self, reg: &(String, usize)) -> Result<(usize, usize, usize), QasmError> {
        let (id, line, col) = self.expect_ident("a qubit operand")?;
        if id != reg.0 {
            return self.err_at(line, col, format!("unknown register `{id}`"));
        }
        self.expect_sym('[')?;
        let (index, il, ic) = self.expect_int()?;
        if index >= reg.1 {
            return self.err_at(il, ic, format!("qubit index {index} overflows {}[{}]", reg.0, reg.1));
        }
        self.expect_sym(']')?;
        Ok((index, line, col))
    }

    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut value = self.term()?;
        loop {
            match self.peek()?.0 {
                Tok::Sym('+') => {
                    self.next()?;
                    value += self.term()?;
                }
                Tok::Sym('-') => {
                    self.next()?;
                    value -= self.term()?;
                }
                _ => return Ok(value),
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut value = self.unary()?;
        loop {
            match self.peek()?.0 {
                Tok::Sym('*') => {
                    self.next()?;
                    value *= self.unary()?;
                }
                Tok::Sym('/') => {
                    self.next()?;
                    value /= self.unary()?;
                }
                _ => return Ok(value),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, QasmError> {
        match self.next()? {
            (Tok::Sym('-'), _, _) => Ok(-self.unary()?),
            (Tok::Sym('+'), _, _) => self.unary(),
            (Tok::Number(x), _, _) => Ok(x),
            (Tok::Int(i), _, _) => Ok(i as f64),
            (Tok::Ident(id), _, _) if id == "pi" => Ok(std::f64::consts::PI),
            (Tok::Sym('('), _, _) => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            (tok, line, col) => self.err_at(
                line,
                col,
                format!("expected an angle expression, found {}", tok.describe()),
            ),
        }
    }
}
