//! Textual proof format: one parenthesized node per proof constructor.
//!
//! Formulas and terms embed as quoted strings in the statement-language
//! grammar; bare atoms are accepted where the payload is a single
//! identifier or number. Node tags:
//!
//! ```text
//! (compute "F")
//! (axiom <name> ((<var> "t") ...))
//! (forall-intro <var> P)
//! (forall-range-intro <var> "lo" "hi" P)
//! (forall-elim P "w")            ; closed witness
//! (forall-elim P "w" (bounds P ...))
//! (range-enum <var> <lo> <hi> "body" compute)
//! (range-enum <var> <lo> <hi> "body" (cases P ...))
//! (induction <var> Pbase Pstep)
//! (imp-intro <label> "H" P)
//! (imp-elim P P)
//! (hyp <label>)
//! (and-intro P P) (and-elim-l P) (and-elim-r P)
//! (case-split P P P)
//! (rewrite "l = r" (step ...) ...)
//! (eq-subst P P (at i j ...))
//! ```
//!
//! A rewrite step is
//! `(step <rule> <fwd|rev> (at ...) "before" "after" (side P ...))`
//! where `<rule>` is a bare tag, or `(sum-split-at "t")`,
//! `(index-shift "k")`, or `(lemma <name> ((<var> "t") ...))`.

use thiserror::Error;

use super::{CaseSource, Direction, Proof, RewriteRule, RewriteStep};
use crate::lang::{parse_formula, parse_term, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    Str(String),
    List(Vec<SExpr>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SexprError {
    #[error("byte {0}: {1}")]
    Lex(usize, String),
    #[error("malformed node: {0}")]
    Malformed(String),
    #[error("embedded formula/term: {0}")]
    Lang(String),
}

// -------------------------------------------------------------------
// Generic s-expression reader/writer
// -------------------------------------------------------------------

pub fn parse_sexpr(text: &str) -> Result<SExpr, SexprError> {
    let mut pos = 0;
    let bytes = text.as_bytes();
    let expr = read_expr(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(SexprError::Lex(pos, "trailing input".into()));
    }
    Ok(expr)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        match bytes[*pos] {
            b' ' | b'\t' | b'\r' | b'\n' => *pos += 1,
            b';' => {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            }
            _ => break,
        }
    }
}

fn read_expr(bytes: &[u8], pos: &mut usize) -> Result<SExpr, SexprError> {
    skip_ws(bytes, pos);
    if *pos >= bytes.len() {
        return Err(SexprError::Lex(*pos, "unexpected end of input".into()));
    }
    match bytes[*pos] {
        b'(' => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(bytes, pos);
                if *pos >= bytes.len() {
                    return Err(SexprError::Lex(*pos, "unclosed list".into()));
                }
                if bytes[*pos] == b')' {
                    *pos += 1;
                    return Ok(SExpr::List(items));
                }
                items.push(read_expr(bytes, pos)?);
            }
        }
        b')' => Err(SexprError::Lex(*pos, "unexpected ')'".into())),
        b'"' => {
            *pos += 1;
            let mut out = String::new();
            loop {
                if *pos >= bytes.len() {
                    return Err(SexprError::Lex(*pos, "unclosed string".into()));
                }
                match bytes[*pos] {
                    b'"' => {
                        *pos += 1;
                        return Ok(SExpr::Str(out));
                    }
                    b'\\' => {
                        *pos += 1;
                        if *pos >= bytes.len() {
                            return Err(SexprError::Lex(*pos, "dangling escape".into()));
                        }
                        match bytes[*pos] {
                            b'"' => out.push('"'),
                            b'\\' => out.push('\\'),
                            other => {
                                return Err(SexprError::Lex(
                                    *pos,
                                    format!("unknown escape \\{}", other as char),
                                ))
                            }
                        }
                        *pos += 1;
                    }
                    other => {
                        out.push(other as char);
                        *pos += 1;
                    }
                }
            }
        }
        _ => {
            let start = *pos;
            while *pos < bytes.len()
                && !matches!(bytes[*pos], b' ' | b'\t' | b'\r' | b'\n' | b'(' | b')' | b'"')
            {
                *pos += 1;
            }
            Ok(SExpr::Atom(
                std::str::from_utf8(&bytes[start..*pos])
                    .map_err(|_| SexprError::Lex(start, "non-utf8 atom".into()))?
                    .to_string(),
            ))
        }
    }
}

pub fn print_sexpr(expr: &SExpr) -> String {
    let mut out = String::new();
    write_expr(expr, &mut out);
    out
}

fn write_expr(expr: &SExpr, out: &mut String) {
    match expr {
        SExpr::Atom(a) => out.push_str(a),
        SExpr::Str(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    other => out.push(other),
                }
            }
            out.push('"');
        }
        SExpr::List(items) => {
            out.push('(');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_expr(item, out);
            }
            out.push(')');
        }
    }
}

// -------------------------------------------------------------------
// Proof encoding
// -------------------------------------------------------------------

fn atom(s: impl Into<String>) -> SExpr {
    SExpr::Atom(s.into())
}

fn payload(text: String) -> SExpr {
    // bare atom when unambiguous, quoted otherwise
    if !text.is_empty()
        && text
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && !text.starts_with('-')
    {
        SExpr::Atom(text)
    } else {
        SExpr::Str(text)
    }
}

fn formula_payload(f: &Formula) -> SExpr {
    payload(f.to_string())
}

fn term_payload(t: &Term) -> SExpr {
    payload(t.to_string())
}

fn inst_sexpr(inst: &[(String, Term)]) -> SExpr {
    SExpr::List(
        inst.iter()
            .map(|(v, t)| SExpr::List(vec![atom(v.clone()), term_payload(t)]))
            .collect(),
    )
}

fn rule_sexpr(rule: &RewriteRule) -> SExpr {
    match rule {
        RewriteRule::SumSplitAt(t) => SExpr::List(vec![atom("sum-split-at"), term_payload(t)]),
        RewriteRule::IndexShift(t) => SExpr::List(vec![atom("index-shift"), term_payload(t)]),
        RewriteRule::LemmaRewrite(name, inst) => {
            SExpr::List(vec![atom("lemma"), atom(name.clone()), inst_sexpr(inst)])
        }
        other => atom(other.name()),
    }
}

fn step_sexpr(step: &RewriteStep) -> SExpr {
    let mut items = vec![
        atom("step"),
        rule_sexpr(&step.rule),
        atom(match step.direction {
            Direction::Forward => "fwd",
            Direction::Backward => "rev",
        }),
        position_sexpr(&step.position),
        SExpr::Str(step.before.to_string()),
        SExpr::Str(step.after.to_string()),
    ];
    if !step.side_proofs.is_empty() {
        let mut side = vec![atom("side")];
        side.extend(step.side_proofs.iter().map(proof_sexpr));
        items.push(SExpr::List(side));
    }
    SExpr::List(items)
}

fn position_sexpr(position: &[usize]) -> SExpr {
    let mut items = vec![atom("at")];
    items.extend(position.iter().map(|i| atom(i.to_string())));
    SExpr::List(items)
}

pub fn proof_sexpr(proof: &Proof) -> SExpr {
    match proof {
        Proof::ComputeLeaf(f) => SExpr::List(vec![atom("compute"), formula_payload(f)]),
        Proof::AxiomRef { name, inst } => {
            SExpr::List(vec![atom("axiom"), atom(name.clone()), inst_sexpr(inst)])
        }
        Proof::ForallIntro { var, body } => SExpr::List(vec![
            atom("forall-intro"),
            atom(var.clone()),
            proof_sexpr(body),
        ]),
        Proof::ForallRangeIntro { var, lo, hi, body } => SExpr::List(vec![
            atom("forall-range-intro"),
            atom(var.clone()),
            term_payload(lo),
            term_payload(hi),
            proof_sexpr(body),
        ]),
        Proof::ForallElim {
            universal,
            witness,
            bounds,
        } => {
            let mut items = vec![
                atom("forall-elim"),
                proof_sexpr(universal),
                term_payload(witness),
            ];
            if !bounds.is_empty() {
                let mut b = vec![atom("bounds")];
                b.extend(bounds.iter().map(proof_sexpr));
                items.push(SExpr::List(b));
            }
            SExpr::List(items)
        }
        Proof::RangeEnum {
            var,
            lo,
            hi,
            body,
            cases,
        } => {
            let cases_sexpr = match cases {
                CaseSource::Compute => atom("compute"),
                CaseSource::Explicit(list) => {
                    let mut items = vec![atom("cases")];
                    items.extend(list.iter().map(proof_sexpr));
                    SExpr::List(items)
                }
            };
            SExpr::List(vec![
                atom("range-enum"),
                atom(var.clone()),
                atom(lo.to_string()),
                atom(hi.to_string()),
                formula_payload(body),
                cases_sexpr,
            ])
        }
        Proof::Induction { var, base, step } => SExpr::List(vec![
            atom("induction"),
            atom(var.clone()),
            proof_sexpr(base),
            proof_sexpr(step),
        ]),
        Proof::ImpIntro { label, hyp, body } => SExpr::List(vec![
            atom("imp-intro"),
            atom(label.clone()),
            formula_payload(hyp),
            proof_sexpr(body),
        ]),
        Proof::ImpElim { f, arg } => {
            SExpr::List(vec![atom("imp-elim"), proof_sexpr(f), proof_sexpr(arg)])
        }
        Proof::HypRef(label) => SExpr::List(vec![atom("hyp"), atom(label.clone())]),
        Proof::AndIntro(l, r) => {
            SExpr::List(vec![atom("and-intro"), proof_sexpr(l), proof_sexpr(r)])
        }
        Proof::AndElimL(p) => SExpr::List(vec![atom("and-elim-l"), proof_sexpr(p)]),
        Proof::AndElimR(p) => SExpr::List(vec![atom("and-elim-r"), proof_sexpr(p)]),
        Proof::CaseSplit { disj, left, right } => SExpr::List(vec![
            atom("case-split"),
            proof_sexpr(disj),
            proof_sexpr(left),
            proof_sexpr(right),
        ]),
        Proof::RewriteChain { goal, steps } => {
            let mut items = vec![atom("rewrite"), formula_payload(goal)];
            items.extend(steps.iter().map(step_sexpr));
            SExpr::List(items)
        }
        Proof::EqSubst {
            equality,
            target,
            position,
        } => SExpr::List(vec![
            atom("eq-subst"),
            proof_sexpr(equality),
            proof_sexpr(target),
            position_sexpr(position),
        ]),
    }
}

pub fn print_proof(proof: &Proof) -> String {
    print_sexpr(&proof_sexpr(proof))
}

// -------------------------------------------------------------------
// Proof decoding
// -------------------------------------------------------------------

fn malformed(what: impl Into<String>) -> SexprError {
    SexprError::Malformed(what.into())
}

fn as_text(e: &SExpr, what: &str) -> Result<String, SexprError> {
    match e {
        SExpr::Atom(a) => Ok(a.clone()),
        SExpr::Str(s) => Ok(s.clone()),
        SExpr::List(_) => Err(malformed(format!("{what}: expected text"))),
    }
}

fn as_atom(e: &SExpr, what: &str) -> Result<String, SexprError> {
    match e {
        SExpr::Atom(a) => Ok(a.clone()),
        _ => Err(malformed(format!("{what}: expected atom"))),
    }
}

fn as_formula(e: &SExpr, what: &str) -> Result<Formula, SexprError> {
    parse_formula(&as_text(e, what)?).map_err(|err| SexprError::Lang(format!("{what}: {err}")))
}

fn as_term(e: &SExpr, what: &str) -> Result<Term, SexprError> {
    parse_term(&as_text(e, what)?).map_err(|err| SexprError::Lang(format!("{what}: {err}")))
}

fn as_int(e: &SExpr, what: &str) -> Result<i64, SexprError> {
    as_text(e, what)?
        .parse()
        .map_err(|_| malformed(format!("{what}: expected integer")))
}

fn parse_inst(e: &SExpr) -> Result<Vec<(String, Term)>, SexprError> {
    let SExpr::List(items) = e else {
        return Err(malformed("instantiation: expected list"));
    };
    items
        .iter()
        .map(|pair| {
            let SExpr::List(kv) = pair else {
                return Err(malformed("instantiation entry: expected (var term)"));
            };
            if kv.len() != 2 {
                return Err(malformed("instantiation entry: expected (var term)"));
            }
            Ok((as_atom(&kv[0], "instantiation var")?, as_term(&kv[1], "instantiation term")?))
        })
        .collect()
}

fn parse_position(e: &SExpr) -> Result<Vec<usize>, SexprError> {
    let SExpr::List(items) = e else {
        return Err(malformed("position: expected (at ...)"));
    };
    if items.first() != Some(&atom("at")) {
        return Err(malformed("position: expected (at ...)"));
    }
    items[1..]
        .iter()
        .map(|i| {
            as_text(i, "position index")?
                .parse()
                .map_err(|_| malformed("position index"))
        })
        .collect()
}

fn parse_rule(e: &SExpr) -> Result<RewriteRule, SexprError> {
    match e {
        SExpr::Atom(name) => match name.as_str() {
            "distribute" => Ok(RewriteRule::Distribute),
            "factor" => Ok(RewriteRule::Factor),
            "sum-linearity" => Ok(RewriteRule::SumLinearity),
            "sum-split-last" => Ok(RewriteRule::SumSplitLast),
            "sum-split-first" => Ok(RewriteRule::SumSplitFirst),
            "sum-empty" => Ok(RewriteRule::SumEmpty),
            "telescope" => Ok(RewriteRule::Telescope),
            "pow-add-exp" => Ok(RewriteRule::PowAddExp),
            "ring" => Ok(RewriteRule::RingNormalize),
            other => Err(malformed(format!("unknown rewrite rule {other}"))),
        },
        SExpr::List(items) => {
            let head = as_atom(items.first().ok_or_else(|| malformed("empty rule"))?, "rule")?;
            match head.as_str() {
                "sum-split-at" if items.len() == 2 => {
                    Ok(RewriteRule::SumSplitAt(as_term(&items[1], "split point")?))
                }
                "index-shift" if items.len() == 2 => {
                    Ok(RewriteRule::IndexShift(as_term(&items[1], "shift offset")?))
                }
                "lemma" if items.len() == 3 => Ok(RewriteRule::LemmaRewrite(
                    as_atom(&items[1], "lemma name")?,
                    parse_inst(&items[2])?,
                )),
                other => Err(malformed(format!("unknown rewrite rule {other}"))),
            }
        }
        SExpr::Str(_) => Err(malformed("rule: expected atom or list")),
    }
}

fn parse_step(e: &SExpr) -> Result<RewriteStep, SexprError> {
    let SExpr::List(items) = e else {
        return Err(malformed("step: expected list"));
    };
    if items.first() != Some(&atom("step")) || items.len() < 6 {
        return Err(malformed("step: expected (step rule dir (at ...) before after)"));
    }
    let rule = parse_rule(&items[1])?;
    let direction = match as_atom(&items[2], "direction")?.as_str() {
        "fwd" => Direction::Forward,
        "rev" => Direction::Backward,
        other => return Err(malformed(format!("unknown direction {other}"))),
    };
    let position = parse_position(&items[3])?;
    let before = as_term(&items[4], "step before")?;
    let after = as_term(&items[5], "step after")?;
    let mut side_proofs = Vec::new();
    match items.len() {
        6 => {}
        7 => {
            let SExpr::List(side) = &items[6] else {
                return Err(malformed("side proofs: expected (side ...)"));
            };
            if side.first() != Some(&atom("side")) {
                return Err(malformed("side proofs: expected (side ...)"));
            }
            for p in &side[1..] {
                side_proofs.push(parse_proof_sexpr(p)?);
            }
        }
        _ => return Err(malformed("step: too many fields")),
    }
    Ok(RewriteStep {
        rule,
        direction,
        position,
        before,
        after,
        side_proofs,
    })
}

pub fn parse_proof_sexpr(e: &SExpr) -> Result<Proof, SexprError> {
    let SExpr::List(items) = e else {
        return Err(malformed("proof node: expected list"));
    };
    let head = as_atom(
        items.first().ok_or_else(|| malformed("empty proof node"))?,
        "node tag",
    )?;
    let expect = |n: usize| -> Result<(), SexprError> {
        if items.len() != n {
            Err(malformed(format!("{head}: expected {} fields", n - 1)))
        } else {
            Ok(())
        }
    };
    match head.as_str() {
        "compute" => {
            expect(2)?;
            Ok(Proof::ComputeLeaf(as_formula(&items[1], "compute goal")?))
        }
        "axiom" => {
            expect(3)?;
            Ok(Proof::AxiomRef {
                name: as_atom(&items[1], "axiom name")?,
                inst: parse_inst(&items[2])?,
            })
        }
        "forall-intro" => {
            expect(3)?;
            Ok(Proof::ForallIntro {
                var: as_atom(&items[1], "variable")?,
                body: parse_proof_sexpr(&items[2])?.boxed(),
            })
        }
        "forall-range-intro" => {
            expect(5)?;
            Ok(Proof::ForallRangeIntro {
                var: as_atom(&items[1], "variable")?,
                lo: as_term(&items[2], "lower bound")?,
                hi: as_term(&items[3], "upper bound")?,
                body: parse_proof_sexpr(&items[4])?.boxed(),
            })
        }
        "forall-elim" => {
            if items.len() != 3 && items.len() != 4 {
                return Err(malformed("forall-elim: expected 2 or 3 fields"));
            }
            let mut bounds = Vec::new();
            if items.len() == 4 {
                let SExpr::List(b) = &items[3] else {
                    return Err(malformed("bounds: expected (bounds ...)"));
                };
                if b.first() != Some(&atom("bounds")) {
                    return Err(malformed("bounds: expected (bounds ...)"));
                }
                for p in &b[1..] {
                    bounds.push(parse_proof_sexpr(p)?);
                }
            }
            Ok(Proof::ForallElim {
                universal: parse_proof_sexpr(&items[1])?.boxed(),
                witness: as_term(&items[2], "witness")?,
                bounds,
            })
        }
        "range-enum" => {
            expect(6)?;
            let cases = match &items[5] {
                SExpr::Atom(a) if a == "compute" => CaseSource::Compute,
                SExpr::List(list) if list.first() == Some(&atom("cases")) => CaseSource::Explicit(
                    list[1..]
                        .iter()
                        .map(parse_proof_sexpr)
                        .collect::<Result<_, _>>()?,
                ),
                _ => return Err(malformed("range-enum cases")),
            };
            Ok(Proof::RangeEnum {
                var: as_atom(&items[1], "variable")?,
                lo: as_int(&items[2], "lower bound")?,
                hi: as_int(&items[3], "upper bound")?,
                body: as_formula(&items[4], "enumeration body")?,
                cases,
            })
        }
        "induction" => {
            expect(4)?;
            Ok(Proof::Induction {
                var: as_atom(&items[1], "variable")?,
                base: parse_proof_sexpr(&items[2])?.boxed(),
                step: parse_proof_sexpr(&items[3])?.boxed(),
            })
        }
        "imp-intro" => {
            expect(4)?;
            Ok(Proof::ImpIntro {
                label: as_atom(&items[1], "label")?,
                hyp: as_formula(&items[2], "hypothesis")?,
                body: parse_proof_sexpr(&items[3])?.boxed(),
            })
        }
        "imp-elim" => {
            expect(3)?;
            Ok(Proof::ImpElim {
                f: parse_proof_sexpr(&items[1])?.boxed(),
                arg: parse_proof_sexpr(&items[2])?.boxed(),
            })
        }
        "hyp" => {
            expect(2)?;
            Ok(Proof::HypRef(as_atom(&items[1], "label")?))
        }
        "and-intro" => {
            expect(3)?;
            Ok(Proof::AndIntro(
                parse_proof_sexpr(&items[1])?.boxed(),
                parse_proof_sexpr(&items[2])?.boxed(),
            ))
        }
        "and-elim-l" => {
            expect(2)?;
            Ok(Proof::AndElimL(parse_proof_sexpr(&items[1])?.boxed()))
        }
        "and-elim-r" => {
            expect(2)?;
            Ok(Proof::AndElimR(parse_proof_sexpr(&items[1])?.boxed()))
        }
        "case-split" => {
            expect(4)?;
            Ok(Proof::CaseSplit {
                disj: parse_proof_sexpr(&items[1])?.boxed(),
                left: parse_proof_sexpr(&items[2])?.boxed(),
                right: parse_proof_sexpr(&items[3])?.boxed(),
            })
        }
        "rewrite" => {
            if items.len() < 2 {
                return Err(malformed("rewrite: missing goal"));
            }
            Ok(Proof::RewriteChain {
                goal: as_formula(&items[1], "chain goal")?,
                steps: items[2..].iter().map(parse_step).collect::<Result<_, _>>()?,
            })
        }
        "eq-subst" => {
            expect(4)?;
            Ok(Proof::EqSubst {
                equality: parse_proof_sexpr(&items[1])?.boxed(),
                target: parse_proof_sexpr(&items[2])?.boxed(),
                position: parse_position(&items[3])?,
            })
        }
        other => Err(malformed(format!("unknown proof node {other}"))),
    }
}

pub fn parse_proof(text: &str) -> Result<Proof, SexprError> {
    parse_proof_sexpr(&parse_sexpr(text)?)
}

/// Pretty, indented rendering for files: one child per line past a
/// width threshold.
pub fn print_proof_pretty(proof: &Proof) -> String {
    let mut out = String::new();
    pretty(&proof_sexpr(proof), 0, &mut out);
    out.push('\n');
    out
}

fn pretty(expr: &SExpr, indent: usize, out: &mut String) {
    let flat = print_sexpr(expr);
    if indent + flat.len() <= 100 || !matches!(expr, SExpr::List(_)) {
        out.push_str(&flat);
        return;
    }
    let SExpr::List(items) = expr else {
        unreachable!()
    };
    out.push('(');
    for (i, item) in items.iter().enumerate() {
        if i == 0 {
            pretty(item, indent + 1, out);
        } else {
            out.push('\n');
            for _ in 0..indent + 2 {
                out.push(' ');
            }
            pretty(item, indent + 2, out);
        }
    }
    out.push(')');
}
