use std::fmt;

use serde::Serialize;

use super::{CircuitProgram, ExpectOp, GateOp, Statement, StatementKind, MAX_QUBITS};
use crate::ugates::MAX_TOFFOLI_CONTROLS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseErrorCode {
    MissingHeader,
    DuplicateHeader,
    UnknownKeyword,
    MalformedNumber,
    QubitOutOfRange,
    DuplicatePrepare,
    PrepareAfterGate,
    RepeatedQubit,
    InvalidValue,
    UnexpectedToken,
    MissingToken,
}

impl ParseErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MissingHeader => "missing-header",
            Self::DuplicateHeader => "duplicate-header",
            Self::UnknownKeyword => "unknown-keyword",
            Self::MalformedNumber => "malformed-number",
            Self::QubitOutOfRange => "qubit-out-of-range",
            Self::DuplicatePrepare => "duplicate-prepare",
            Self::PrepareAfterGate => "prepare-after-gate",
            Self::RepeatedQubit => "repeated-qubit",
            Self::InvalidValue => "invalid-value",
            Self::UnexpectedToken => "unexpected-token",
            Self::MissingToken => "missing-token",
        }
    }
}

impl fmt::Display for ParseErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `line` and `column` are 1-based; `column` points at the offending token.
#[derive(Clone, Debug, PartialEq, Serialize, thiserror::Error)]
#[error("line {line}, column {column}: {code}: expected {expected}, {message}")]
pub struct ParseError {
    pub code: ParseErrorCode,
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub message: String,
}

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

fn tokenize(raw: &str) -> (Vec<Token<'_>>, usize) {
    let code = raw.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                tokens.push(Token { text: &code[s..i], column: code[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push(Token { text: &code[s..], column: code[..s].chars().count() + 1 });
    }
    (tokens, code.trim_end().chars().count() + 1)
}

impl<'a> Line<'a> {
    fn err(&self, code: ParseErrorCode, column: usize, expected: &str, message: impl Into<String>) -> ParseError {
        ParseError { code, line: self.number, column, expected: expected.to_string(), message: message.into() }
    }

    fn next(&mut self, expected: &str) -> Result<Token<'a>, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(*t)
            }
            None => Err(self.err(ParseErrorCode::MissingToken, self.end_column, expected, "reached end of line")),
        }
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).copied()
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) => {
                Err(self.err(ParseErrorCode::UnexpectedToken, t.column, "end of line", format!("found '{}'", t.text)))
            }
            None => Ok(()),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        let t = self.next(&format!("'{word}'"))?;
        if t.text != word {
            return Err(self.err(
                ParseErrorCode::UnexpectedToken,
                t.column,
                &format!("'{word}'"),
                format!("found '{}'", t.text),
            ));
        }
        Ok(())
    }

    fn number(&self, text: &str, column: usize, class: &str) -> Result<f64, ParseError> {
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(
                ParseErrorCode::MalformedNumber,
                column,
                class,
                format!("cannot read '{text}' as a number"),
            )),
        }
    }

    /// A `key=FLOAT` token.
    fn keyed_float(&mut self, key: &str) -> Result<f64, ParseError> {
        let class = format!("{key}=FLOAT");
        let t = self.next(&class)?;
        match t.text.strip_prefix(key).and_then(|r| r.strip_prefix('=')) {
            Some(value) => self.number(value, t.column + key.len() + 1, &class),
            None => Err(self.err(ParseErrorCode::UnexpectedToken, t.column, &class, format!("found '{}'", t.text))),
        }
    }

    /// Optional trailing `key=FLOAT`.
    fn optional_keyed_float(&mut self, key: &str) -> Result<Option<(f64, usize)>, ParseError> {
        match self.peek() {
            Some(t) if t.text.starts_with(&format!("{key}=")) => {
                let v = self.keyed_float(key)?;
                Ok(Some((v, t.column)))
            }
            _ => Ok(None),
        }
    }

    fn qref_text(&self, text: &str, column: usize, n: usize) -> Result<usize, ParseError> {
        let digits = text.strip_prefix('q').filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
        let Some(digits) = digits else {
            return Err(self.err(ParseErrorCode::UnexpectedToken, column, "QREF", format!("found '{text}'")));
        };
        match digits.parse::<usize>() {
            Ok(q) if q < n => Ok(q),
            _ => Err(self.err(
                ParseErrorCode::QubitOutOfRange,
                column,
                "QREF",
                format!("'{text}' is not one of q0..q{}", n - 1),
            )),
        }
    }

    fn qref(&mut self, n: usize) -> Result<usize, ParseError> {
        let t = self.next("QREF")?;
        self.qref_text(t.text, t.column, n)
    }

    fn tol(&mut self) -> Result<Option<f64>, ParseError> {
        match self.optional_keyed_float("tol")? {
            Some((v, _)) if v > 0.0 => Ok(Some(v)),
            Some((v, col)) => {
                Err(self.err(ParseErrorCode::InvalidValue, col, "tol=FLOAT", format!("tolerance {v} must be positive")))
            }
            None => Ok(None),
        }
    }

    fn distinct(&self, qubits: &[usize], column: usize) -> Result<(), ParseError> {
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(self.err(
                    ParseErrorCode::RepeatedQubit,
                    column,
                    "distinct QREFs",
                    format!("q{q} used twice"),
                ));
            }
        }
        Ok(())
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let (tokens, end_column) = tokenize(raw);
        (!tokens.is_empty()).then_some(Line { number: i + 1, tokens, pos: 0, end_column })
    })
}

fn parse_header(line: &mut Line<'_>) -> Result<usize, ParseError> {
    let first = line.next("'qubits'")?;
    if first.text != "qubits" {
        return Err(line.err(
            ParseErrorCode::MissingHeader,
            first.column,
            "'qubits'",
            "the first statement must declare the qubit count",
        ));
    }
    let t = line.next("INT")?;
    let n = t.text.parse::<usize>().map_err(|_| {
        line.err(ParseErrorCode::MalformedNumber, t.column, "INT", format!("cannot read '{}' as an integer", t.text))
    })?;
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(line.err(
            ParseErrorCode::InvalidValue,
            t.column,
            "INT",
            format!("qubit count must be 1..={MAX_QUBITS}"),
        ));
    }
    line.finish()?;
    Ok(n)
}

fn parse_gate(line: &mut Line<'_>, n: usize) -> Result<GateOp, ParseError> {
    let name = line.next("gate name")?;
    let op = match name.text {
        "NOT" => GateOp::Not(line.qref(n)?),
        "U" => {
            let xi = line.keyed_float("xi")?;
            GateOp::U { xi, qubit: line.qref(n)? }
        }
        "CNOT" | "UCNOT" => {
            let control = line.qref(n)?;
            let target = line.qref(n)?;
            line.distinct(&[control, target], name.column)?;
            if name.text == "CNOT" {
                GateOp::Cnot { control, target }
            } else {
                GateOp::Ucnot { control, target }
            }
        }
        "UCU" => {
            let xi = line.keyed_float("xi")?;
            let control = line.qref(n)?;
            let target = line.qref(n)?;
            line.distinct(&[control, target], name.column)?;
            GateOp::Ucu { xi, control, target }
        }
        "UTOFFOLI" => {
            let t = line.next("controls=QREF[,QREF]*")?;
            let Some(list) = t.text.strip_prefix("controls=") else {
                return Err(line.err(
                    ParseErrorCode::UnexpectedToken,
                    t.column,
                    "controls=QREF[,QREF]*",
                    format!("found '{}'", t.text),
                ));
            };
            let mut controls = Vec::new();
            let mut col = t.column + "controls=".len();
            for part in list.split(',') {
                controls.push(line.qref_text(part, col, n)?);
                col += part.chars().count() + 1;
            }
            if controls.len() > MAX_TOFFOLI_CONTROLS {
                return Err(line.err(
                    ParseErrorCode::InvalidValue,
                    t.column,
                    "controls=QREF[,QREF]*",
                    format!("at most {MAX_TOFFOLI_CONTROLS} controls"),
                ));
            }
            let tt = line.next("target=QREF")?;
            let Some(q) = tt.text.strip_prefix("target=") else {
                return Err(line.err(
                    ParseErrorCode::UnexpectedToken,
                    tt.column,
                    "target=QREF",
                    format!("found '{}'", tt.text),
                ));
            };
            let target = line.qref_text(q, tt.column + "target=".len(), n)?;
            let mut all = controls.clone();
            all.push(target);
            line.distinct(&all, t.column)?;
            GateOp::Utoffoli { controls, target }
        }
        other => {
            return Err(line.err(
                ParseErrorCode::UnknownKeyword,
                name.column,
                "one of NOT, U, CNOT, UCNOT, UCU, UTOFFOLI",
                format!("unknown gate '{other}'"),
            ))
        }
    };
    Ok(op)
}

fn parse_expect(line: &mut Line<'_>, n: usize) -> Result<ExpectOp, ParseError> {
    let metric = line.next("metric name")?;
    Ok(match metric.text {
        "fidelity" => {
            let qubit = line.qref(n)?;
            let alpha = line.keyed_float("alpha")?;
            ExpectOp::Fidelity { qubit, alpha, tol: line.tol()? }
        }
        "concurrence" => {
            let a = line.qref(n)?;
            let b = line.qref(n)?;
            line.distinct(&[a, b], metric.column)?;
            ExpectOp::Concurrence { a, b, tol: line.tol()? }
        }
        "purity" => {
            let qubit = line.qref(n)?;
            ExpectOp::Purity { qubit, tol: line.tol()? }
        }
        other => {
            return Err(line.err(
                ParseErrorCode::UnknownKeyword,
                metric.column,
                "one of fidelity, concurrence, purity",
                format!("unknown metric '{other}'"),
            ))
        }
    })
}

/// Parses and validates a circuit program. LF and CRLF line endings are both accepted.
pub fn parse(text: &str) -> Result<CircuitProgram, ParseError> {
    let mut lines = lines(text);
    let Some(mut header) = lines.next() else {
        return Err(ParseError {
            code: ParseErrorCode::MissingHeader,
            line: 1,
            column: 1,
            expected: "'qubits'".into(),
            message: "program is empty".into(),
        });
    };
    let n = parse_header(&mut header)?;
    let mut prepared = vec![false; n];
    let mut touched = vec![false; n];
    let mut statements = Vec::new();
    for mut line in lines {
        let head = line.next("statement")?;
        let kind = match head.text {
            "qubits" => {
                return Err(line.err(
                    ParseErrorCode::DuplicateHeader,
                    head.column,
                    "statement",
                    "qubit count already declared",
                ))
            }
            "prepare" => {
                let qt = line.peek();
                let qubit = line.qref(n)?;
                let col = qt.map_or(head.column, |t| t.column);
                if prepared[qubit] {
                    return Err(line.err(
                        ParseErrorCode::DuplicatePrepare,
                        col,
                        "unprepared QREF",
                        format!("q{qubit} already prepared"),
                    ));
                }
                if touched[qubit] {
                    return Err(line.err(
                        ParseErrorCode::PrepareAfterGate,
                        col,
                        "untouched QREF",
                        format!("q{qubit} was already acted on by a gate"),
                    ));
                }
                line.keyword("real")?;
                let alpha = line.keyed_float("alpha")?;
                let epsilon = match line.optional_keyed_float("epsilon")? {
                    Some((e, _)) if (0.0..=1.0).contains(&e) => Some(e),
                    Some((e, c)) => {
                        return Err(line.err(
                            ParseErrorCode::InvalidValue,
                            c,
                            "epsilon=FLOAT",
                            format!("epsilon {e} outside [0, 1]"),
                        ))
                    }
                    None => None,
                };
                prepared[qubit] = true;
                StatementKind::Prepare { qubit, alpha, epsilon }
            }
            "gate" => {
                let op = parse_gate(&mut line, n)?;
                for q in op.qubits() {
                    touched[q] = true;
                }
                StatementKind::Gate(op)
            }
            "expect" => StatementKind::Expect(parse_expect(&mut line, n)?),
            other => {
                return Err(line.err(
                    ParseErrorCode::UnknownKeyword,
                    head.column,
                    "one of prepare, gate, expect",
                    format!("unknown keyword '{other}'"),
                ))
            }
        };
        line.finish()?;
        statements.push(Statement { line: line.number, kind });
    }
    Ok(CircuitProgram { qubit_count: n, statements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuitlang::unparse;

    fn code(text: &str) -> (ParseErrorCode, usize, usize) {
        let e = parse(text).unwrap_err();
        (e.code, e.line, e.column)
    }

    #[test]
    fn minimal_program() {
        let p = parse("qubits 1\nprepare q0 real alpha=0\ngate NOT q0\nexpect fidelity q0 alpha=3.14159265").unwrap();
        assert_eq!(p.qubit_count, 1);
        assert_eq!(p.statements.len(), 3);
        assert_eq!(p.statements[1], Statement { line: 3, kind: StatementKind::Gate(GateOp::Not(0)) });
    }

    #[test]
    fn ucnot_program_round_trips() {
        let text = "qubits 2\nprepare q0 real alpha=0.7854 epsilon=0.9\nprepare q1 real alpha=0\ngate UCNOT q0 q1\nexpect concurrence q0 q1";
        let p = parse(text).unwrap();
        assert_eq!(p.statements[2].kind, StatementKind::Gate(GateOp::Ucnot { control: 0, target: 1 }));
        assert_eq!(parse(&unparse(&p)).unwrap(), p);
        assert_eq!(unparse(&p), format!("{text}\n"));
    }

    #[test]
    fn comments_blank_lines_and_crlf() {
        let text = "# header comment\r\n\r\nqubits 3 # three\r\n  prepare q2 real alpha=1.5\r\n\r\ngate UTOFFOLI controls=q0,q1 target=q2\r\n";
        let p = parse(text).unwrap();
        assert_eq!(p.statements[0].line, 4);
        assert_eq!(p.statements[1].line, 6);
        assert_eq!(p.statements[1].kind, StatementKind::Gate(GateOp::Utoffoli { controls: vec![0, 1], target: 2 }));
        assert_eq!(parse(&unparse(&p)).unwrap(), p);
    }

    #[test]
    fn error_codes() {
        assert_eq!(code("gate NOT q0"), (ParseErrorCode::MissingHeader, 1, 1));
        assert_eq!(code(""), (ParseErrorCode::MissingHeader, 1, 1));
        assert_eq!(code("qubits 1\nqubits 1"), (ParseErrorCode::DuplicateHeader, 2, 1));
        assert_eq!(code("qubits 1\nmeasure q0"), (ParseErrorCode::UnknownKeyword, 2, 1));
        assert_eq!(code("qubits 1\ngate H q0"), (ParseErrorCode::UnknownKeyword, 2, 6));
        assert_eq!(code("qubits 1\nprepare q0 real alpha=x1"), (ParseErrorCode::MalformedNumber, 2, 23));
        assert_eq!(code("qubits two"), (ParseErrorCode::MalformedNumber, 1, 8));
        assert_eq!(code("qubits 2\ngate CNOT q0 q2"), (ParseErrorCode::QubitOutOfRange, 2, 14));
        assert_eq!(
            code("qubits 1\nprepare q0 real alpha=0\nprepare q0 real alpha=1"),
            (ParseErrorCode::DuplicatePrepare, 3, 9)
        );
        assert_eq!(code("qubits 1\ngate NOT q0\nprepare q0 real alpha=1"), (ParseErrorCode::PrepareAfterGate, 3, 9));
        assert_eq!(code("qubits 2\ngate UCNOT q1 q1"), (ParseErrorCode::RepeatedQubit, 2, 6));
        assert_eq!(code("qubits 1\nprepare q0 real alpha=0 epsilon=1.5"), (ParseErrorCode::InvalidValue, 2, 25));
        assert_eq!(code("qubits 1\ngate NOT q0 q0"), (ParseErrorCode::UnexpectedToken, 2, 13));
        assert_eq!(code("qubits 1\ngate U q0"), (ParseErrorCode::UnexpectedToken, 2, 8));
        assert_eq!(code("qubits 1\nexpect purity"), (ParseErrorCode::MissingToken, 2, 14));
        assert_eq!(code("qubits 1\nprepare q0 real alpha=inf"), (ParseErrorCode::MalformedNumber, 2, 23));
    }

    #[test]
    fn error_message_names_the_line() {
        let e = parse("qubits 1\n\n\ngate FOO q0").unwrap_err();
        assert!(e.to_string().starts_with("line 4, column 6: unknown-keyword"));
    }
}
