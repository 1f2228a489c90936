//! Circuit data model, textual parser/emitter and the `.qc` benchmark importer.
//!
//! The native file format is line-oriented:
//!
//! ```text
//! qubits <n> [ancillas <h>]
//! <GATE> q<i> [q<j> [q<k>]]
//! measx q<i> -> m<t>
//! ifx m<t> { <GATE> ... }
//! ```
//!
//! Gate names are case-insensitive and `#` starts a comment. Ancilla qubits
//! (indices `n..n+h`) are initialized in the |+> state.

use thiserror::Error;

/// Identifier of a Pauli-X measurement outcome (the `t` in `m<t>`).
pub type OutcomeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    Cz(usize, usize),
    Cs(usize, usize),
    Ccz(usize, usize, usize),
    Cnot { control: usize, target: usize },
    MeasureX { qubit: usize, outcome: OutcomeId },
    /// Gates applied only when the referenced outcome was 1 (the |-> result).
    Classical { outcome: OutcomeId, body: Vec<Gate> },
}

impl Gate {
    /// Qubit indices the gate acts on (classical blocks report the union).
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::T(q)
            | Gate::Tdg(q) => vec![*q],
            Gate::Cz(a, b) | Gate::Cs(a, b) => vec![*a, *b],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Ccz(a, b, c) => vec![*a, *b, *c],
            Gate::MeasureX { qubit, .. } => vec![*qubit],
            Gate::Classical { body, .. } => {
                let mut qs: Vec<usize> = body.iter().flat_map(|g| g.qubits()).collect();
                qs.sort_unstable();
                qs.dedup();
                qs
            }
        }
    }
}

/// Ordered gate list over a data register of `n` qubits and an ancilla
/// register of `h` qubits (initialized as |+>).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub n: usize,
    pub h: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, h: 0, gates: Vec::new() }
    }

    pub fn with_ancillas(n: usize, h: usize) -> Self {
        Circuit { n, h, gates: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.n + self.h
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    /// Number of T plus Tdg gates, including inside classical blocks.
    pub fn t_count(&self) -> usize {
        fn count(gates: &[Gate]) -> usize {
            gates
                .iter()
                .map(|g| match g {
                    Gate::T(_) | Gate::Tdg(_) => 1,
                    Gate::Classical { body, .. } => count(body),
                    _ => 0,
                })
                .sum()
        }
        count(&self.gates)
    }

    /// T count after lowering multi-controlled phase gates to CNOT+T:
    /// a CCZ costs 7 T gates and a CS costs 3. This is the pre-optimization
    /// metric reported for benchmark inputs that still contain CCZ/CS.
    pub fn t_count_expanded(&self) -> usize {
        fn count(gates: &[Gate]) -> usize {
            gates
                .iter()
                .map(|g| match g {
                    Gate::T(_) | Gate::Tdg(_) => 1,
                    Gate::Ccz(..) => 7,
                    Gate::Cs(..) => 3,
                    Gate::Classical { body, .. } => count(body),
                    _ => 0,
                })
                .sum()
        }
        count(&self.gates)
    }

    /// Number of H gates outside classical blocks.
    pub fn h_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::H(_))).count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, col {col}: unknown gate `{name}`")]
    UnknownGate { line: usize, col: usize, name: String },
    #[error("line {line}, col {col}: {msg}")]
    Malformed { line: usize, col: usize, msg: String },
    #[error("line {line}, col {col}: qubit q{index} out of range (width {width})")]
    QubitRange { line: usize, col: usize, index: usize, width: usize },
    #[error("line {line}: outcome m{id} referenced before its measurement")]
    UnknownOutcome { line: usize, id: usize },
    #[error("line {line}: duplicate qubit operand")]
    DuplicateOperand { line: usize },
    #[error("missing `qubits <n>` header")]
    MissingHeader,
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<(usize, &'a str)>, // (column, token)
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut col = 0;
        for tok in text.split_whitespace() {
            // byte offset of this token for error reporting
            let off = text[col..].find(tok).map(|o| o + col).unwrap_or(col);
            tokens.push((off + 1, tok));
            col = off + tok.len();
        }
        LineParser { line, tokens, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let t = self.tokens.get(self.pos).copied();
        self.pos += 1;
        t
    }

    fn expect_qubit(&mut self, width: usize) -> Result<usize, ParseError> {
        let (col, tok) = self.next().ok_or(ParseError::Malformed {
            line: self.line,
            col: 1,
            msg: "missing qubit operand".into(),
        })?;
        let idx: usize = tok
            .strip_prefix(['q', 'Q'])
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError::Malformed {
                line: self.line,
                col,
                msg: format!("expected qubit operand, found `{tok}`"),
            })?;
        if idx >= width {
            return Err(ParseError::QubitRange { line: self.line, col, index: idx, width });
        }
        Ok(idx)
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if let Some((col, tok)) = self.next() {
            return Err(ParseError::Malformed {
                line: self.line,
                col,
                msg: format!("unexpected trailing token `{tok}`"),
            });
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_gate_line(
    lp: &mut LineParser,
    name_col: usize,
    name: &str,
    width: usize,
    outcomes_seen: &mut Vec<bool>,
) -> Result<Gate, ParseError> {
    let line = lp.line;
    let distinct = |qs: &[usize]| -> Result<(), ParseError> {
        for i in 0..qs.len() {
            for j in i + 1..qs.len() {
                if qs[i] == qs[j] {
                    return Err(ParseError::DuplicateOperand { line });
                }
            }
        }
        Ok(())
    };
    let g = match name.to_ascii_uppercase().as_str() {
        "H" => Gate::H(lp.expect_qubit(width)?),
        "X" => Gate::X(lp.expect_qubit(width)?),
        "Y" => Gate::Y(lp.expect_qubit(width)?),
        "Z" => Gate::Z(lp.expect_qubit(width)?),
        "S" => Gate::S(lp.expect_qubit(width)?),
        "SDG" => Gate::Sdg(lp.expect_qubit(width)?),
        "T" => Gate::T(lp.expect_qubit(width)?),
        "TDG" => Gate::Tdg(lp.expect_qubit(width)?),
        "CZ" => {
            let (a, b) = (lp.expect_qubit(width)?, lp.expect_qubit(width)?);
            distinct(&[a, b])?;
            Gate::Cz(a, b)
        }
        "CS" => {
            let (a, b) = (lp.expect_qubit(width)?, lp.expect_qubit(width)?);
            distinct(&[a, b])?;
            Gate::Cs(a, b)
        }
        "CNOT" => {
            let (c, t) = (lp.expect_qubit(width)?, lp.expect_qubit(width)?);
            distinct(&[c, t])?;
            Gate::Cnot { control: c, target: t }
        }
        "CCZ" => {
            let (a, b, c) = (
                lp.expect_qubit(width)?,
                lp.expect_qubit(width)?,
                lp.expect_qubit(width)?,
            );
            distinct(&[a, b, c])?;
            Gate::Ccz(a, b, c)
        }
        "MEASX" => {
            let q = lp.expect_qubit(width)?;
            let arrow = lp.next();
            if arrow.map(|(_, t)| t) != Some("->") {
                return Err(ParseError::Malformed {
                    line,
                    col: arrow.map(|(c, _)| c).unwrap_or(1),
                    msg: "expected `-> m<t>` after measx".into(),
                });
            }
            let (col, tok) = lp.next().ok_or(ParseError::Malformed {
                line,
                col: 1,
                msg: "missing outcome label".into(),
            })?;
            let id: usize = tok
                .strip_prefix(['m', 'M'])
                .and_then(|s| s.parse().ok())
                .ok_or(ParseError::Malformed {
                    line,
                    col,
                    msg: format!("expected outcome label, found `{tok}`"),
                })?;
            if outcomes_seen.len() <= id {
                outcomes_seen.resize(id + 1, false);
            }
            outcomes_seen[id] = true;
            Gate::MeasureX { qubit: q, outcome: id }
        }
        _ => {
            return Err(ParseError::UnknownGate {
                line,
                col: name_col,
                name: name.to_string(),
            })
        }
    };
    Ok(g)
}

/// Parses the native circuit format.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    let mut outcomes_seen: Vec<bool> = Vec::new();
    // stack of open ifx blocks
    let mut block_stack: Vec<(OutcomeId, Vec<Gate>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stripped = strip_comment(raw).trim();
        if stripped.is_empty() {
            continue;
        }
        // closing brace (possibly alone on the line)
        if stripped == "}" {
            let (outcome, body) = block_stack.pop().ok_or(ParseError::Malformed {
                line,
                col: 1,
                msg: "unmatched `}`".into(),
            })?;
            let gate = Gate::Classical { outcome, body };
            let c = circuit.as_mut().ok_or(ParseError::MissingHeader)?;
            match block_stack.last_mut() {
                Some((_, b)) => b.push(gate),
                None => c.gates.push(gate),
            }
            continue;
        }

        let mut lp = LineParser::new(line, stripped);
        let (col0, head) = lp.next().unwrap();
        let head_up = head.to_ascii_uppercase();

        if head_up == "QUBITS" {
            if circuit.is_some() {
                return Err(ParseError::Malformed {
                    line,
                    col: col0,
                    msg: "duplicate `qubits` header".into(),
                });
            }
            let (ncol, ntok) = lp.next().ok_or(ParseError::Malformed {
                line,
                col: col0,
                msg: "missing qubit count".into(),
            })?;
            let n: usize = ntok.parse().map_err(|_| ParseError::Malformed {
                line,
                col: ncol,
                msg: format!("invalid qubit count `{ntok}`"),
            })?;
            let mut h = 0;
            if let Some((acol, atok)) = lp.next() {
                if !atok.eq_ignore_ascii_case("ancillas") {
                    return Err(ParseError::Malformed {
                        line,
                        col: acol,
                        msg: format!("expected `ancillas`, found `{atok}`"),
                    });
                }
                let (hcol, htok) = lp.next().ok_or(ParseError::Malformed {
                    line,
                    col: acol,
                    msg: "missing ancilla count".into(),
                })?;
                h = htok.parse().map_err(|_| ParseError::Malformed {
                    line,
                    col: hcol,
                    msg: format!("invalid ancilla count `{htok}`"),
                })?;
            }
            lp.end()?;
            circuit = Some(Circuit::with_ancillas(n, h));
            continue;
        }

        let c = circuit.as_mut().ok_or(ParseError::MissingHeader)?;
        let width = c.n + c.h;

        if head_up == "IFX" {
            let (col, tok) = lp.next().ok_or(ParseError::Malformed {
                line,
                col: col0,
                msg: "missing outcome label after ifx".into(),
            })?;
            let id: usize = tok
                .strip_prefix(['m', 'M'])
                .and_then(|s| s.parse().ok())
                .ok_or(ParseError::Malformed {
                    line,
                    col,
                    msg: format!("expected outcome label, found `{tok}`"),
                })?;
            if !outcomes_seen.get(id).copied().unwrap_or(false) {
                return Err(ParseError::UnknownOutcome { line, id });
            }
            let (bcol, brace) = lp.next().ok_or(ParseError::Malformed {
                line,
                col,
                msg: "expected `{` after ifx outcome".into(),
            })?;
            if brace != "{" {
                return Err(ParseError::Malformed {
                    line,
                    col: bcol,
                    msg: format!("expected `{{`, found `{brace}`"),
                });
            }
            // inline form: remaining tokens up to a closing `}` are
            // `;`-separated gates on this same line
            let rest: Vec<(usize, &str)> = std::iter::from_fn(|| lp.next()).collect();
            if rest.is_empty() {
                block_stack.push((id, Vec::new()));
                continue;
            }
            let closes = rest.last().map(|(_, t)| *t) == Some("}");
            if !closes {
                return Err(ParseError::Malformed {
                    line,
                    col: rest.last().unwrap().0,
                    msg: "inline ifx block must end with `}`".into(),
                });
            }
            let mut body = Vec::new();
            let inner = &rest[..rest.len() - 1];
            for chunk in inner.split(|(_, t)| *t == ";") {
                if chunk.is_empty() {
                    continue;
                }
                let text = chunk.iter().map(|(_, t)| *t).collect::<Vec<_>>().join(" ");
                let mut inner_lp = LineParser::new(line, &text);
                let (gcol, gname) = inner_lp.next().unwrap();
                let _ = gcol;
                body.push(parse_gate_line(
                    &mut inner_lp,
                    chunk[0].0,
                    gname,
                    width,
                    &mut outcomes_seen,
                )?);
                inner_lp.end()?;
            }
            c.gates.push(Gate::Classical { outcome: id, body });
            continue;
        }

        let gate = parse_gate_line(&mut lp, col0, head, width, &mut outcomes_seen)?;
        lp.end()?;
        match block_stack.last_mut() {
            Some((_, body)) => body.push(gate),
            None => c.gates.push(gate),
        }
    }

    if !block_stack.is_empty() {
        return Err(ParseError::Malformed {
            line: text.lines().count(),
            col: 1,
            msg: "unclosed ifx block".into(),
        });
    }
    circuit.ok_or(ParseError::MissingHeader)
}

fn emit_gate(g: &Gate, out: &mut String) {
    match g {
        Gate::H(q) => out.push_str(&format!("H q{q}\n")),
        Gate::X(q) => out.push_str(&format!("X q{q}\n")),
        Gate::Y(q) => out.push_str(&format!("Y q{q}\n")),
        Gate::Z(q) => out.push_str(&format!("Z q{q}\n")),
        Gate::S(q) => out.push_str(&format!("S q{q}\n")),
        Gate::Sdg(q) => out.push_str(&format!("SDG q{q}\n")),
        Gate::T(q) => out.push_str(&format!("T q{q}\n")),
        Gate::Tdg(q) => out.push_str(&format!("TDG q{q}\n")),
        Gate::Cz(a, b) => out.push_str(&format!("CZ q{a} q{b}\n")),
        Gate::Cs(a, b) => out.push_str(&format!("CS q{a} q{b}\n")),
        Gate::Ccz(a, b, c) => out.push_str(&format!("CCZ q{a} q{b} q{c}\n")),
        Gate::Cnot { control, target } => out.push_str(&format!("CNOT q{control} q{target}\n")),
        Gate::MeasureX { qubit, outcome } => {
            out.push_str(&format!("MEASX q{qubit} -> m{outcome}\n"))
        }
        Gate::Classical { outcome, body } => {
            out.push_str(&format!("IFX m{outcome} {{\n"));
            for g in body {
                emit_gate(g, out);
            }
            out.push_str("}\n");
        }
    }
}

/// Serializes a circuit; `parse(emit(c))` structurally equals `c`.
pub fn emit(c: &Circuit) -> String {
    let mut out = String::new();
    if c.h > 0 {
        out.push_str(&format!("qubits {} ancillas {}\n", c.n, c.h));
    } else {
        out.push_str(&format!("qubits {}\n", c.n));
    }
    for g in &c.gates {
        emit_gate(g, &mut out);
    }
    out
}

/// Importer for `.qc`-style benchmark files: `.v`/`.i`/`.o` headers,
/// `BEGIN`/`END` body, `tof` with up to 2 controls. Toffoli gates are lowered
/// to H·CCZ·H; `Z` with 2 or 3 operands means CZ or CCZ.
pub fn parse_qc(text: &str) -> Result<Circuit, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut circuit: Option<Circuit> = None;
    let mut in_body = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stripped = strip_comment(raw).trim();
        if stripped.is_empty() {
            continue;
        }
        let toks: Vec<&str> = stripped.split_whitespace().collect();
        let head = toks[0];

        if head.starts_with('.') {
            match head.to_ascii_lowercase().as_str() {
                ".v" => {
                    names = toks[1..].iter().map(|s| s.to_string()).collect();
                }
                // input/output/constant declarations carry no gate content
                ".i" | ".o" | ".c" | ".ol" => {}
                _ => {}
            }
            continue;
        }
        if head.eq_ignore_ascii_case("BEGIN") {
            if names.is_empty() {
                return Err(ParseError::MissingHeader);
            }
            circuit = Some(Circuit::new(names.len()));
            in_body = true;
            continue;
        }
        if head.eq_ignore_ascii_case("END") {
            in_body = false;
            continue;
        }
        if !in_body {
            continue;
        }
        let c = circuit.as_mut().ok_or(ParseError::MissingHeader)?;

        let mut qubits = Vec::new();
        for tok in &toks[1..] {
            let idx = names.iter().position(|n| n == tok).ok_or_else(|| {
                ParseError::Malformed {
                    line,
                    col: 1,
                    msg: format!("undeclared wire `{tok}`"),
                }
            })?;
            qubits.push(idx);
        }
        for i in 0..qubits.len() {
            for j in i + 1..qubits.len() {
                if qubits[i] == qubits[j] {
                    return Err(ParseError::DuplicateOperand { line });
                }
            }
        }

        match (head.to_ascii_uppercase().as_str(), qubits.len()) {
            ("H", 1) => c.push(Gate::H(qubits[0])),
            ("X", 1) | ("NOT", 1) | ("TOF", 1) => c.push(Gate::X(qubits[0])),
            ("Y", 1) => c.push(Gate::Y(qubits[0])),
            ("Z", 1) => c.push(Gate::Z(qubits[0])),
            ("Z", 2) => c.push(Gate::Cz(qubits[0], qubits[1])),
            ("Z", 3) => c.push(Gate::Ccz(qubits[0], qubits[1], qubits[2])),
            ("S", 1) | ("P", 1) => c.push(Gate::S(qubits[0])),
            ("S*", 1) | ("P*", 1) => c.push(Gate::Sdg(qubits[0])),
            ("T", 1) => c.push(Gate::T(qubits[0])),
            ("T*", 1) => c.push(Gate::Tdg(qubits[0])),
            ("CNOT", 2) | ("TOF", 2) | ("CX", 2) => c.push(Gate::Cnot {
                control: qubits[0],
                target: qubits[1],
            }),
            ("TOF", 3) | ("CCX", 3) => {
                // standard lowering: CCX = H(t) CCZ H(t)
                let (a, b, t) = (qubits[0], qubits[1], qubits[2]);
                c.push(Gate::H(t));
                c.push(Gate::Ccz(a, b, t));
                c.push(Gate::H(t));
            }
            ("SWAP", 2) => {
                let (a, b) = (qubits[0], qubits[1]);
                c.push(Gate::Cnot { control: a, target: b });
                c.push(Gate::Cnot { control: b, target: a });
                c.push(Gate::Cnot { control: a, target: b });
            }
            (_, _) => {
                return Err(ParseError::UnknownGate {
                    line,
                    col: 1,
                    name: head.to_string(),
                })
            }
        }
    }
    circuit.ok_or(ParseError::MissingHeader)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_t() {
        let c = parse("qubits 1\nT q0").unwrap();
        assert_eq!(c.n, 1);
        assert_eq!(c.gates, vec![Gate::T(0)]);
    }

    #[test]
    fn parse_two_gates() {
        let c = parse("qubits 2\nCNOT q0 q1\nT q1").unwrap();
        assert_eq!(c.gates.len(), 2);
        assert_eq!(c.gates[0], Gate::Cnot { control: 0, target: 1 });
    }

    #[test]
    fn parse_unknown_gate() {
        let err = parse("qubits 1\nFOO q0").unwrap_err();
        assert!(matches!(err, ParseError::UnknownGate { line: 2, .. }));
    }

    #[test]
    fn parse_arity_and_range_errors() {
        assert!(parse("qubits 2\nCNOT q0").is_err());
        assert!(matches!(
            parse("qubits 2\nT q5").unwrap_err(),
            ParseError::QubitRange { index: 5, width: 2, .. }
        ));
        assert!(matches!(
            parse("qubits 2\nCNOT q1 q1").unwrap_err(),
            ParseError::DuplicateOperand { .. }
        ));
    }

    #[test]
    fn emit_empty_is_header_only() {
        assert_eq!(emit(&Circuit::new(3)), "qubits 3\n");
    }

    #[test]
    fn emit_single_t() {
        let mut c = Circuit::new(1);
        c.push(Gate::T(0));
        assert_eq!(emit(&c), "qubits 1\nT q0\n");
    }

    #[test]
    fn roundtrip_with_measurement_and_block() {
        let mut c = Circuit::with_ancillas(1, 1);
        c.push(Gate::T(0));
        c.push(Gate::MeasureX { qubit: 0, outcome: 0 });
        c.push(Gate::Classical {
            outcome: 0,
            body: vec![Gate::X(1), Gate::Sdg(1)],
        });
        let text = emit(&c);
        assert_eq!(parse(&text).unwrap(), c);
    }

    #[test]
    fn parse_inline_ifx() {
        let c = parse("qubits 2\nmeasx q0 -> m0\nifx m0 { X q1 ; S q1 }").unwrap();
        assert_eq!(
            c.gates[1],
            Gate::Classical { outcome: 0, body: vec![Gate::X(1), Gate::S(1)] }
        );
    }

    #[test]
    fn ifx_requires_prior_measurement() {
        let err = parse("qubits 2\nifx m0 { X q1 }").unwrap_err();
        assert!(matches!(err, ParseError::UnknownOutcome { id: 0, .. }));
    }

    #[test]
    fn t_count_variants() {
        let mut c = Circuit::new(1);
        c.push(Gate::T(0));
        c.push(Gate::Tdg(0));
        c.push(Gate::S(0));
        assert_eq!(c.t_count(), 2);
        assert_eq!(Circuit::new(2).t_count(), 0);

        let mut ccz = Circuit::new(3);
        ccz.push(Gate::Ccz(0, 1, 2));
        assert_eq!(ccz.t_count(), 0);
        assert_eq!(ccz.t_count_expanded(), 7);
    }

    #[test]
    fn qc_import_toffoli() {
        let text = ".v a b c\n.i a b\n.o c\nBEGIN\ntof a b c\nT a\nEND\n";
        let c = parse_qc(text).unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(
            c.gates,
            vec![Gate::H(2), Gate::Ccz(0, 1, 2), Gate::H(2), Gate::T(0)]
        );
    }

    #[test]
    fn qc_import_gate_aliases() {
        let text = ".v a b\nBEGIN\nZ a b\ntof a\nP* b\nEND\n";
        let c = parse_qc(text).unwrap();
        assert_eq!(c.gates, vec![Gate::Cz(0, 1), Gate::X(0), Gate::Sdg(1)]);
    }

    #[test]
    fn comments_and_case_insensitivity() {
        let c = parse("qubits 1  # one qubit\nt q0 # a T gate\n# done").unwrap();
        assert_eq!(c.gates, vec![Gate::T(0)]);
    }

    #[test]
    fn roundtrip_over_generated_corpus() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let h = rng.gen_range(0..=2);
            let mut c = Circuit::with_ancillas(n, h);
            let w = n + h;
            let mut outcomes = 0;
            for _ in 0..rng.gen_range(0..25) {
                let q = rng.gen_range(0..w);
                let gate = match rng.gen_range(0..12) {
                    0 => Gate::H(q),
                    1 => Gate::X(q),
                    2 => Gate::Y(q),
                    3 => Gate::Z(q),
                    4 => Gate::S(q),
                    5 => Gate::Sdg(q),
                    6 => Gate::T(q),
                    7 => Gate::Tdg(q),
                    8 if w >= 2 => {
                        let mut t = rng.gen_range(0..w);
                        while t == q {
                            t = rng.gen_range(0..w);
                        }
                        Gate::Cnot { control: q, target: t }
                    }
                    9 if w >= 3 => {
                        let mut v: Vec<usize> = (0..w).collect();
                        for i in 0..3 {
                            let j = rng.gen_range(i..w);
                            v.swap(i, j);
                        }
                        Gate::Ccz(v[0], v[1], v[2])
                    }
                    10 => {
                        outcomes += 1;
                        Gate::MeasureX { qubit: q, outcome: outcomes - 1 }
                    }
                    11 if outcomes > 0 => Gate::Classical {
                        outcome: rng.gen_range(0..outcomes),
                        body: vec![Gate::X(q), Gate::Z(q)],
                    },
                    _ => Gate::T(q),
                };
                c.push(gate);
            }
            let text = emit(&c);
            assert_eq!(parse(&text).unwrap(), c, "roundtrip failed:\n{text}");
        }
    }
}
