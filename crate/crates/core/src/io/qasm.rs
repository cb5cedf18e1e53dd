//! OpenQASM 2.0 subset: one `qreg`, optional `creg`, fixed gate names and a
//! trailing measurement block.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct QasmError {
    pub line: usize,
    pub column: usize,
    pub kind: QasmErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QasmErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("index {index} out of range for register `{register}` of size {size}")]
    IndexOutOfRange {
        register: String,
        index: usize,
        size: usize,
    },
    #[error("gate `{gate}` repeats operand q[{qubit}]")]
    DuplicateOperand { gate: String, qubit: usize },
    #[error("gate `{gate}` expects {expected} operand(s), found {found}")]
    Arity {
        gate: String,
        expected: usize,
        found: usize,
    },
    #[error("{0}")]
    Measurement(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Sym(char),
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Arrow => f.write_str("`->`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, QasmError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, msg: String| QasmError {
        line,
        column,
        kind: QasmErrorKind::Syntax(msg),
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let s: String = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .collect();
            i += s.len();
            col += s.len();
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let s: String = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_digit() || **c == '.')
                .collect();
            i += s.len();
            col += s.len();
            Tok::Number(s)
        } else if c == '"' {
            let s: String = chars[i + 1..]
                .iter()
                .take_while(|c| **c != '"' && **c != '\n')
                .collect();
            if chars.get(i + 1 + s.len()) != Some(&'"') {
                return Err(err(start_line, start_col, "unterminated string".into()));
            }
            i += s.len() + 2;
            col += s.len() + 2;
            Tok::Str(s)
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            col += 2;
            Tok::Arrow
        } else if matches!(c, ';' | ',' | '[' | ']' | '(' | ')' | '{' | '}') {
            i += 1;
            col += 1;
            Tok::Sym(c)
        } else {
            return Err(err(start_line, start_col, format!("unexpected character `{c}`")));
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    Ok(out)
}

struct Register {
    name: String,
    size: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    fn fail<T>(&self, at: (usize, usize), kind: QasmErrorKind) -> Result<T, QasmError> {
        Err(QasmError {
            line: at.0,
            column: at.1,
            kind,
        })
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, QasmError> {
        self.fail(self.here(), QasmErrorKind::Syntax(msg.into()))
    }

    fn next(&mut self, what: &str) -> Result<Spanned, QasmError> {
        match self.toks.get(self.pos).cloned() {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => self.syntax(format!("unexpected end of input, expected {what}")),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        let at = self.here();
        let t = self.next(&format!("`{c}`"))?;
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            self.fail(at, QasmErrorKind::Syntax(format!("expected `{c}`, found {}", t.tok)))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, (usize, usize)), QasmError> {
        let at = self.here();
        match self.next(what)?.tok {
            Tok::Ident(s) => Ok((s, at)),
            other => self.fail(at, QasmErrorKind::Syntax(format!("expected {what}, found {other}"))),
        }
    }

    fn integer(&mut self) -> Result<(usize, (usize, usize)), QasmError> {
        let at = self.here();
        match self.next("integer")?.tok {
            Tok::Number(s) => match s.parse::<usize>() {
                Ok(v) => Ok((v, at)),
                Err(_) => self.fail(at, QasmErrorKind::Syntax(format!("expected integer, found `{s}`"))),
            },
            other => self.fail(at, QasmErrorKind::Syntax(format!("expected integer, found {other}"))),
        }
    }

    fn at_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Sym(s), .. }) if *s == c)
    }

    /// `name[idx]` with the register resolved against `reg`.
    fn indexed(&mut self, reg: &Register) -> Result<(usize, (usize, usize)), QasmError> {
        let (name, at) = self.ident("register name")?;
        if name != reg.name {
            return self.fail(at, QasmErrorKind::Syntax(format!("unknown register `{name}`")));
        }
        self.expect_sym('[')?;
        let (idx, idx_at) = self.integer()?;
        self.expect_sym(']')?;
        if idx >= reg.size {
            return self.fail(
                idx_at,
                QasmErrorKind::IndexOutOfRange {
                    register: name,
                    index: idx,
                    size: reg.size,
                },
            );
        }
        Ok((idx, at))
    }

    fn register_decl(&mut self) -> Result<Register, QasmError> {
        let (name, _) = self.ident("register name")?;
        self.expect_sym('[')?;
        let (size, at) = self.integer()?;
        self.expect_sym(']')?;
        self.expect_sym(';')?;
        if size == 0 {
            return self.fail(at, QasmErrorKind::Syntax("register size must be positive".into()));
        }
        Ok(Register { name, size })
    }
}

enum MeasureForm {
    Full,
    Bits(Vec<Option<usize>>),
}

/// Parses the supported OpenQASM 2.0 subset.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let toks = lex(text)?;
    let end = toks.last().map(|t| (t.line, t.column + 1)).unwrap_or((1, 1));
    let mut p = Parser { toks, pos: 0, end };

    let (head, at) = p.ident("`OPENQASM` header")?;
    if head != "OPENQASM" {
        return p.fail(
            at,
            QasmErrorKind::Syntax(format!("expected `OPENQASM`, found `{head}`")),
        );
    }
    let ver_at = p.here();
    match p.next("version")?.tok {
        Tok::Number(v) if v == "2.0" => {}
        other => return p.fail(ver_at, QasmErrorKind::Syntax(format!("unsupported version {other}"))),
    }
    p.expect_sym(';')?;

    let mut qreg: Option<Register> = None;
    let mut creg: Option<Register> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut measure: Option<MeasureForm> = None;

    while let Some(tok) = p.peek().cloned() {
        let at = (tok.line, tok.column);
        let word = match &tok.tok {
            Tok::Ident(w) => w.clone(),
            other => return p.syntax(format!("expected a statement, found {other}")),
        };
        p.pos += 1;
        match word.as_str() {
            "include" => {
                let s_at = p.here();
                match p.next("include path")?.tok {
                    Tok::Str(_) => {}
                    other => return p.fail(s_at, QasmErrorKind::Syntax(format!("expected string, found {other}"))),
                }
                p.expect_sym(';')?;
            }
            "qreg" => {
                if qreg.is_some() {
                    return p.fail(at, QasmErrorKind::Syntax("only one qreg is supported".into()));
                }
                qreg = Some(p.register_decl()?);
            }
            "creg" => {
                if creg.is_some() {
                    return p.fail(at, QasmErrorKind::Syntax("only one creg is supported".into()));
                }
                creg = Some(p.register_decl()?);
            }
            "measure" => {
                let q = match &qreg {
                    Some(q) => q,
                    None => return p.fail(at, QasmErrorKind::Syntax("measure before qreg".into())),
                };
                let c = match &creg {
                    Some(c) => c,
                    None => return p.fail(at, QasmErrorKind::Measurement("measure without creg".into())),
                };
                let (qname, q_at) = p.ident("register name")?;
                if qname != q.name {
                    return p.fail(q_at, QasmErrorKind::Syntax(format!("unknown register `{qname}`")));
                }
                if p.at_sym('[') {
                    p.pos -= 1;
                    let (qi, _) = p.indexed(q)?;
                    match p.next("`->`")?.tok {
                        Tok::Arrow => {}
                        other => return p.syntax(format!("expected `->`, found {other}")),
                    }
                    let (ci, c_at) = p.indexed(c)?;
                    p.expect_sym(';')?;
                    let bits = match measure.get_or_insert_with(|| MeasureForm::Bits(vec![None; c.size])) {
                        MeasureForm::Bits(b) => b,
                        MeasureForm::Full => {
                            return p.fail(at, QasmErrorKind::Measurement("mixed full and per-bit measure".into()))
                        }
                    };
                    if bits[ci].is_some() {
                        return p.fail(c_at, QasmErrorKind::Measurement(format!("c[{ci}] written twice")));
                    }
                    if bits.contains(&Some(qi)) {
                        return p.fail(at, QasmErrorKind::Measurement(format!("q[{qi}] measured twice")));
                    }
                    bits[ci] = Some(qi);
                } else {
                    match p.next("`->`")?.tok {
                        Tok::Arrow => {}
                        other => return p.syntax(format!("expected `->`, found {other}")),
                    }
                    let (cname, c_at) = p.ident("register name")?;
                    if cname != c.name {
                        return p.fail(c_at, QasmErrorKind::Syntax(format!("unknown register `{cname}`")));
                    }
                    p.expect_sym(';')?;
                    if measure.is_some() {
                        return p.fail(at, QasmErrorKind::Measurement("register measured twice".into()));
                    }
                    if c.size != q.size {
                        return p.fail(
                            at,
                            QasmErrorKind::Measurement(format!(
                                "full measure needs creg size {} to match qreg size {}",
                                c.size, q.size
                            )),
                        );
                    }
                    measure = Some(MeasureForm::Full);
                }
            }
            name => {
                let q = match &qreg {
                    Some(q) => q,
                    None => return p.fail(at, QasmErrorKind::Syntax(format!("`{name}` before qreg"))),
                };
                let kind = match GateKind::ALL.into_iter().find(|k| k.name() == name) {
                    Some(k) => k,
                    None => return p.fail(at, QasmErrorKind::UnknownGate(name.to_string())),
                };
                if measure.is_some() {
                    return p.fail(
                        at,
                        QasmErrorKind::Measurement("gate after measure; measurement must be trailing".into()),
                    );
                }
                let mut operands = vec![p.indexed(q)?.0];
                while p.at_sym(',') {
                    p.pos += 1;
                    operands.push(p.indexed(q)?.0);
                }
                p.expect_sym(';')?;
                let gate = Gate::new(kind, operands).or_else(|e| match e {
                    CircuitError::DuplicateOperand { qubit, .. } => p.fail(
                        at,
                        QasmErrorKind::DuplicateOperand {
                            gate: name.to_string(),
                            qubit,
                        },
                    ),
                    CircuitError::Arity { expected, found, .. } => p.fail(
                        at,
                        QasmErrorKind::Arity {
                            gate: name.to_string(),
                            expected,
                            found,
                        },
                    ),
                    other => p.fail(at, QasmErrorKind::Syntax(other.to_string())),
                })?;
                gates.push(gate);
            }
        }
    }

    let qreg = match qreg {
        Some(q) => q,
        None => return p.syntax("missing qreg declaration"),
    };
    let measured = match measure {
        None => None,
        Some(MeasureForm::Full) => Some((0..qreg.size).collect()),
        Some(MeasureForm::Bits(bits)) => {
            let mut out = Vec::with_capacity(bits.len());
            for (ci, b) in bits.into_iter().enumerate() {
                match b {
                    Some(q) => out.push(q),
                    None => {
                        return p.syntax(format!("c[{ci}] is never measured"));
                    }
                }
            }
            Some(out)
        }
    };
    let mut circuit = Circuit::from_gates(qreg.size, gates).expect("operands validated against qreg");
    circuit
        .set_measured(measured)
        .expect("measurement validated during parse");
    Ok(circuit)
}

/// Canonical text: one statement per line, lowercase names, registers `q`/`c`.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits());
    if let Some(bits) = circuit.measured() {
        let _ = writeln!(out, "creg c[{}];", bits.len());
    }
    for g in circuit.gates() {
        out.push_str(g.kind().name());
        for (i, q) in g.operands().iter().enumerate() {
            out.push(if i == 0 { ' ' } else { ',' });
            let _ = write!(out, "q[{q}]");
        }
        out.push_str(";\n");
    }
    if let Some(bits) = circuit.measured() {
        let full = bits.len() == circuit.num_qubits() && bits.iter().enumerate().all(|(i, &q)| i == q);
        if full {
            out.push_str("measure q -> c;\n");
        } else {
            for (ci, q) in bits.iter().enumerate() {
                let _ = writeln!(out, "measure q[{q}] -> c[{ci}];");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Circuit, QasmError> {
        parse_qasm(text)
    }

    const HEAD: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

    #[test]
    fn minimal_program() {
        let c = parse("OPENQASM 2.0; qreg q[1]; x q[0];").unwrap();
        assert_eq!(c.num_qubits(), 1);
        assert_eq!(c.gates(), &[Gate::x(0)]);
        assert_eq!(c.measured(), None);
    }

    #[test]
    fn emit_shapes() {
        let c = Circuit::new(2).unwrap();
        assert_eq!(emit_qasm(&c), format!("{HEAD}qreg q[2];\n"));
        let c = Circuit::from_gates(2, vec![Gate::cx(0, 1)]).unwrap();
        assert!(emit_qasm(&c).lines().any(|l| l == "cx q[0],q[1];"));
    }

    #[test]
    fn distinct_diagnostics() {
        let e = parse("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[0];").unwrap_err();
        assert!(matches!(e.kind, QasmErrorKind::DuplicateOperand { qubit: 0, .. }));
        assert_eq!((e.line, e.column), (3, 1));

        let e = parse("OPENQASM 2.0;\nqreg q[2];\nrz q[0];").unwrap_err();
        assert_eq!(e.kind, QasmErrorKind::UnknownGate("rz".into()));

        let e = parse("OPENQASM 2.0;\nqreg q[2];\nx q[2];").unwrap_err();
        assert!(matches!(
            e.kind,
            QasmErrorKind::IndexOutOfRange { index: 2, size: 2, .. }
        ));
        assert_eq!((e.line, e.column), (3, 5));

        let e = parse("OPENQASM 2.0;\nqreg q[2];\nx q[0]").unwrap_err();
        assert!(matches!(e.kind, QasmErrorKind::Syntax(_)));

        let e = parse("OPENQASM 2.0; qreg q[2]; cx q[0];").unwrap_err();
        assert!(matches!(
            e.kind,
            QasmErrorKind::Arity {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "// header\nOPENQASM 2.0;   // v\n  qreg   q [ 3 ] ;\n\nccx q[0], q[1],q[2]; // toffoli\n";
        let c = parse(text).unwrap();
        assert_eq!(c.gates(), &[Gate::ccx(0, 1, 2)]);
    }

    #[test]
    fn measurement_forms() {
        let c = parse("OPENQASM 2.0; qreg q[3]; creg c[3]; x q[0]; measure q -> c;").unwrap();
        assert_eq!(c.measured(), Some(&[0, 1, 2][..]));
        assert!(emit_qasm(&c).ends_with("measure q -> c;\n"));

        let text = "OPENQASM 2.0; qreg q[3]; creg c[2]; x q[0]; measure q[2] -> c[0]; measure q[0] -> c[1];";
        let c = parse(text).unwrap();
        assert_eq!(c.measured(), Some(&[2, 0][..]));
        assert_eq!(parse(&emit_qasm(&c)).unwrap(), c);

        let e = parse("OPENQASM 2.0; qreg q[2]; creg c[2]; measure q -> c; x q[0];").unwrap_err();
        assert!(matches!(e.kind, QasmErrorKind::Measurement(_)));
        assert!(parse("OPENQASM 2.0; qreg q[2]; creg c[2]; measure q[0] -> c[0];").is_err());
        assert!(parse("OPENQASM 2.0; qreg q[2]; creg c[1]; measure q -> c;").is_err());
    }

    #[test]
    fn header_is_required() {
        assert!(parse("qreg q[1];").is_err());
        assert!(parse("OPENQASM 3.0; qreg q[1];").is_err());
        assert!(parse("OPENQASM 2.0;").is_err());
        assert!(parse("OPENQASM 2.0; qreg q[0];").is_err());
    }
}
