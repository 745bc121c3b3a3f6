//! The statement language: integer terms with bounded sums, first-order
//! formulas with unbounded and range quantifiers, plus parser, canonical
//! printer, evaluator, and substitution.
//!
//! The semantic domain is the arbitrary-precision integers. Subtraction
//! is total (no truncation at zero); natural-number statements carry
//! explicit `0 <= x` constraints instead. Range quantifier bounds are
//! inclusive. The canonical printed form defines the byte size of every
//! statement, so the printer is part of the contract: parsing the
//! canonical print of a formula yields the formula back, structurally.

mod parse;

pub use parse::{parse_formula, parse_term, ParseError};

use num_traits::{Pow, Signed, ToPrimitive, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

use crate::Int;

/// Integer terms. `Sum` binds its index within the body only; the bounds
/// must not reference the index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Int(Int),
    Var(String),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, Box<Term>),
    Sum {
        index: String,
        lo: Box<Term>,
        hi: Box<Term>,
        body: Box<Term>,
    },
}

/// First-order formulas over [`Term`]s. `>=` and `>` are parsed as
/// flipped `Le`/`Lt`, so only four comparisons exist structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Neq(Term, Term),
    Le(Term, Term),
    Lt(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Universal quantification over the naturals (values >= 0).
    ForallNat(String, Box<Formula>),
    /// Universal quantification over the inclusive range `[lo, hi]`.
    ForallRange(String, Term, Term, Box<Formula>),
    ExistsNat(String, Box<Formula>),
    ExistsRange(String, Term, Term, Box<Formula>),
}

impl Term {
    pub fn int<T: Into<Int>>(v: T) -> Term {
        Term::Int(v.into())
    }

    pub fn nat(v: &crate::Nat) -> Term {
        Term::Int(Int::from(v.clone()))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn pow(base: Term, exp: Term) -> Term {
        Term::Pow(Box::new(base), Box::new(exp))
    }

    pub fn sum(index: &str, lo: Term, hi: Term, body: Term) -> Term {
        Term::Sum {
            index: index.to_string(),
            lo: Box::new(lo),
            hi: Box::new(hi),
            body: Box::new(body),
        }
    }

    /// Left-associated product of one or more factors.
    pub fn product(factors: &[Term]) -> Term {
        let mut it = factors.iter().cloned();
        let first = it.next().expect("empty product");
        it.fold(first, |acc, f| acc * f)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Int(_) => {}
            Term::Var(v) => {
                if !bound.iter().any(|b| b == v) {
                    out.insert(v.clone());
                }
            }
            Term::Add(l, r) | Term::Sub(l, r) | Term::Mul(l, r) | Term::Pow(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Term::Sum { index, lo, hi, body } => {
                lo.collect_free(bound, out);
                hi.collect_free(bound, out);
                bound.push(index.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Capture-checked substitution of `repl` for free occurrences of
    /// `var`. Binders shadow; substituting under a binder that captures a
    /// free variable of `repl` is an error.
    pub fn subst(&self, var: &str, repl: &Term) -> Result<Term, SubstError> {
        Ok(match self {
            Term::Int(_) => self.clone(),
            Term::Var(v) => {
                if v == var {
                    repl.clone()
                } else {
                    self.clone()
                }
            }
            Term::Add(l, r) => Term::Add(
                Box::new(l.subst(var, repl)?),
                Box::new(r.subst(var, repl)?),
            ),
            Term::Sub(l, r) => Term::Sub(
                Box::new(l.subst(var, repl)?),
                Box::new(r.subst(var, repl)?),
            ),
            Term::Mul(l, r) => Term::Mul(
                Box::new(l.subst(var, repl)?),
                Box::new(r.subst(var, repl)?),
            ),
            Term::Pow(l, r) => Term::Pow(
                Box::new(l.subst(var, repl)?),
                Box::new(r.subst(var, repl)?),
            ),
            Term::Sum { index, lo, hi, body } => {
                let lo = lo.subst(var, repl)?;
                let hi = hi.subst(var, repl)?;
                let body = if index == var {
                    (**body).clone()
                } else {
                    if body.free_vars().contains(var) && repl.free_vars().contains(index) {
                        return Err(SubstError::Capture {
                            binder: index.clone(),
                        });
                    }
                    body.subst(var, repl)?
                };
                Term::Sum {
                    index: index.clone(),
                    lo: Box::new(lo),
                    hi: Box::new(hi),
                    body: Box::new(body),
                }
            }
        })
    }

    /// Simultaneous capture-checked substitution; `map` entries apply
    /// in parallel, so replacement terms are never re-substituted.
    pub fn multi_subst(&self, map: &[(String, Term)]) -> Result<Term, SubstError> {
        Ok(match self {
            Term::Int(_) => self.clone(),
            Term::Var(v) => match map.iter().find(|(name, _)| name == v) {
                Some((_, t)) => t.clone(),
                None => self.clone(),
            },
            Term::Add(l, r) => Term::Add(
                Box::new(l.multi_subst(map)?),
                Box::new(r.multi_subst(map)?),
            ),
            Term::Sub(l, r) => Term::Sub(
                Box::new(l.multi_subst(map)?),
                Box::new(r.multi_subst(map)?),
            ),
            Term::Mul(l, r) => Term::Mul(
                Box::new(l.multi_subst(map)?),
                Box::new(r.multi_subst(map)?),
            ),
            Term::Pow(l, r) => Term::Pow(
                Box::new(l.multi_subst(map)?),
                Box::new(r.multi_subst(map)?),
            ),
            Term::Sum { index, lo, hi, body } => {
                let lo = lo.multi_subst(map)?;
                let hi = hi.multi_subst(map)?;
                let inner: Vec<(String, Term)> = map
                    .iter()
                    .filter(|(name, _)| name != index)
                    .cloned()
                    .collect();
                let body_free = body.free_vars();
                for (name, t) in &inner {
                    if body_free.contains(name) && t.free_vars().contains(index) {
                        return Err(SubstError::Capture {
                            binder: index.clone(),
                        });
                    }
                }
                Term::Sum {
                    index: index.clone(),
                    lo: Box::new(lo),
                    hi: Box::new(hi),
                    body: Box::new(body.multi_subst(&inner)?),
                }
            }
        })
    }

    /// Byte length of the canonical printed form.
    pub fn size_bytes(&self) -> usize {
        self.to_string().len()
    }
}

impl std::ops::Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        Term::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        Term::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Term {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        Term::Mul(Box::new(self), Box::new(rhs))
    }
}

impl Formula {
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn forall_nat(var: &str, body: Formula) -> Formula {
        Formula::ForallNat(var.to_string(), Box::new(body))
    }

    pub fn forall_range(var: &str, lo: Term, hi: Term, body: Formula) -> Formula {
        Formula::ForallRange(var.to_string(), lo, hi, Box::new(body))
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// True when every quantifier in the formula is range-bounded, so
    /// exhaustive evaluation can decide it.
    pub fn is_range_only(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Neq(..) | Formula::Le(..) | Formula::Lt(..) => true,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.is_range_only() && r.is_range_only()
            }
            Formula::Not(f) => f.is_range_only(),
            Formula::ForallNat(..) | Formula::ExistsNat(..) => false,
            Formula::ForallRange(_, _, _, body) | Formula::ExistsRange(_, _, _, body) => {
                body.is_range_only()
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(l, r) | Formula::Neq(l, r) | Formula::Le(l, r) | Formula::Lt(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::ForallNat(v, body) | Formula::ExistsNat(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::ForallRange(v, lo, hi, body) | Formula::ExistsRange(v, lo, hi, body) => {
                lo.collect_free(bound, out);
                hi.collect_free(bound, out);
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn subst(&self, var: &str, repl: &Term) -> Result<Formula, SubstError> {
        let sub2 = |l: &Term, r: &Term| -> Result<(Term, Term), SubstError> {
            Ok((l.subst(var, repl)?, r.subst(var, repl)?))
        };
        Ok(match self {
            Formula::Eq(l, r) => {
                let (l, r) = sub2(l, r)?;
                Formula::Eq(l, r)
            }
            Formula::Neq(l, r) => {
                let (l, r) = sub2(l, r)?;
                Formula::Neq(l, r)
            }
            Formula::Le(l, r) => {
                let (l, r) = sub2(l, r)?;
                Formula::Le(l, r)
            }
            Formula::Lt(l, r) => {
                let (l, r) = sub2(l, r)?;
                Formula::Lt(l, r)
            }
            Formula::And(l, r) => Formula::and(l.subst(var, repl)?, r.subst(var, repl)?),
            Formula::Or(l, r) => Formula::or(l.subst(var, repl)?, r.subst(var, repl)?),
            Formula::Not(f) => Formula::not(f.subst(var, repl)?),
            Formula::Implies(l, r) => Formula::implies(l.subst(var, repl)?, r.subst(var, repl)?),
            Formula::ForallNat(v, body) | Formula::ExistsNat(v, body) => {
                let body = if v == var {
                    (**body).clone()
                } else {
                    if body.free_vars().contains(var) && repl.free_vars().contains(v) {
                        return Err(SubstError::Capture { binder: v.clone() });
                    }
                    body.subst(var, repl)?
                };
                match self {
                    Formula::ForallNat(..) => Formula::forall_nat(v, body),
                    _ => Formula::ExistsNat(v.clone(), Box::new(body)),
                }
            }
            Formula::ForallRange(v, lo, hi, body) | Formula::ExistsRange(v, lo, hi, body) => {
                let lo = lo.subst(var, repl)?;
                let hi = hi.subst(var, repl)?;
                let body = if v == var {
                    (**body).clone()
                } else {
                    if body.free_vars().contains(var) && repl.free_vars().contains(v) {
                        return Err(SubstError::Capture { binder: v.clone() });
                    }
                    body.subst(var, repl)?
                };
                match self {
                    Formula::ForallRange(..) => Formula::forall_range(v, lo, hi, body),
                    _ => Formula::ExistsRange(v.clone(), lo, hi, Box::new(body)),
                }
            }
        })
    }

    pub fn size_bytes(&self) -> usize {
        self.to_string().len()
    }

    /// Simultaneous capture-checked substitution over a formula.
    pub fn multi_subst(&self, map: &[(String, Term)]) -> Result<Formula, SubstError> {
        let shadow = |v: &str| -> Vec<(String, Term)> {
            map.iter().filter(|(name, _)| name != v).cloned().collect()
        };
        let capture_check = |v: &str, body: &Formula| -> Result<(), SubstError> {
            let body_free = body.free_vars();
            for (name, t) in map {
                if name != v && body_free.contains(name) && t.free_vars().contains(v) {
                    return Err(SubstError::Capture {
                        binder: v.to_string(),
                    });
                }
            }
            Ok(())
        };
        Ok(match self {
            Formula::Eq(l, r) => Formula::Eq(l.multi_subst(map)?, r.multi_subst(map)?),
            Formula::Neq(l, r) => Formula::Neq(l.multi_subst(map)?, r.multi_subst(map)?),
            Formula::Le(l, r) => Formula::Le(l.multi_subst(map)?, r.multi_subst(map)?),
            Formula::Lt(l, r) => Formula::Lt(l.multi_subst(map)?, r.multi_subst(map)?),
            Formula::And(l, r) => Formula::and(l.multi_subst(map)?, r.multi_subst(map)?),
            Formula::Or(l, r) => Formula::or(l.multi_subst(map)?, r.multi_subst(map)?),
            Formula::Not(f) => Formula::not(f.multi_subst(map)?),
            Formula::Implies(l, r) => {
                Formula::implies(l.multi_subst(map)?, r.multi_subst(map)?)
            }
            Formula::ForallNat(v, body) => {
                capture_check(v, body)?;
                Formula::ForallNat(v.clone(), Box::new(body.multi_subst(&shadow(v))?))
            }
            Formula::ExistsNat(v, body) => {
                capture_check(v, body)?;
                Formula::ExistsNat(v.clone(), Box::new(body.multi_subst(&shadow(v))?))
            }
            Formula::ForallRange(v, lo, hi, body) => {
                capture_check(v, body)?;
                Formula::ForallRange(
                    v.clone(),
                    lo.multi_subst(map)?,
                    hi.multi_subst(map)?,
                    Box::new(body.multi_subst(&shadow(v))?),
                )
            }
            Formula::ExistsRange(v, lo, hi, body) => {
                capture_check(v, body)?;
                Formula::ExistsRange(
                    v.clone(),
                    lo.multi_subst(map)?,
                    hi.multi_subst(map)?,
                    Box::new(body.multi_subst(&shadow(v))?),
                )
            }
        })
    }
}

/// Substitution of a closed term, as exposed to proof construction. The
/// closedness restriction sidesteps variable capture entirely; the
/// kernel uses the capture-checked [`Term::subst`] internally where open
/// replacements are structurally safe.
pub fn substitute_term(t: &Term, var: &str, repl: &Term) -> Result<Term, SubstError> {
    if !repl.is_closed() {
        return Err(SubstError::NotClosed);
    }
    t.subst(var, repl)
}

pub fn substitute_formula(f: &Formula, var: &str, repl: &Term) -> Result<Formula, SubstError> {
    if !repl.is_closed() {
        return Err(SubstError::NotClosed);
    }
    f.subst(var, repl)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("substituted term is not closed")]
    NotClosed,
    #[error("substitution would be captured by binder {binder}")]
    Capture { binder: String },
}

// ---------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------

// Term precedence: + and - are 1, * is 2, ^ is 3, atoms 4. Negative
// literals print at level 1 so they pick up parentheses wherever a bare
// `-` could glue to the operator on their left.
fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Int(v) if v.is_negative() => 1,
        Term::Mul(..) => 2,
        Term::Pow(..) => 3,
        Term::Int(_) | Term::Var(_) | Term::Sum { .. } => 4,
    }
}

fn fmt_term(t: &Term, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = term_prec(t);
    if prec < min {
        write!(f, "(")?;
    }
    match t {
        Term::Int(v) => write!(f, "{v}")?,
        Term::Var(v) => write!(f, "{v}")?,
        Term::Add(l, r) => {
            fmt_term(l, 1, f)?;
            write!(f, " + ")?;
            fmt_term(r, 2, f)?;
        }
        Term::Sub(l, r) => {
            fmt_term(l, 1, f)?;
            write!(f, " - ")?;
            fmt_term(r, 2, f)?;
        }
        Term::Mul(l, r) => {
            fmt_term(l, 2, f)?;
            write!(f, " * ")?;
            fmt_term(r, 3, f)?;
        }
        Term::Pow(l, r) => {
            fmt_term(l, 4, f)?;
            write!(f, "^")?;
            fmt_term(r, 3, f)?;
        }
        Term::Sum { index, lo, hi, body } => {
            write!(f, "sum({index}, ")?;
            fmt_term(lo, 0, f)?;
            write!(f, ", ")?;
            fmt_term(hi, 0, f)?;
            write!(f, ", ")?;
            fmt_term(body, 0, f)?;
            write!(f, ")")?;
        }
    }
    if prec < min {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, 0, f)
    }
}

// Formula precedence: quantifiers 0, => 1 (right-assoc), \/ 2, /\ 3,
// ~ 4, comparisons 5.
fn formula_prec(fm: &Formula) -> u8 {
    match fm {
        Formula::ForallNat(..)
        | Formula::ForallRange(..)
        | Formula::ExistsNat(..)
        | Formula::ExistsRange(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        Formula::Eq(..) | Formula::Neq(..) | Formula::Le(..) | Formula::Lt(..) => 5,
    }
}

fn fmt_formula(fm: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = formula_prec(fm);
    if prec < min {
        write!(f, "(")?;
    }
    let cmp = |op: &str, l: &Term, r: &Term, f: &mut fmt::Formatter<'_>| -> fmt::Result {
        fmt_term(l, 0, f)?;
        write!(f, " {op} ")?;
        fmt_term(r, 0, f)
    };
    match fm {
        Formula::Eq(l, r) => cmp("=", l, r, f)?,
        Formula::Neq(l, r) => cmp("!=", l, r, f)?,
        Formula::Le(l, r) => cmp("<=", l, r, f)?,
        Formula::Lt(l, r) => cmp("<", l, r, f)?,
        Formula::And(l, r) => {
            fmt_formula(l, 3, f)?;
            write!(f, " /\\ ")?;
            fmt_formula(r, 4, f)?;
        }
        Formula::Or(l, r) => {
            fmt_formula(l, 2, f)?;
            write!(f, " \\/ ")?;
            fmt_formula(r, 3, f)?;
        }
        Formula::Implies(l, r) => {
            fmt_formula(l, 2, f)?;
            write!(f, " => ")?;
            fmt_formula(r, 1, f)?;
        }
        Formula::Not(inner) => {
            write!(f, "~")?;
            fmt_formula(inner, 6, f)?;
        }
        Formula::ForallNat(v, body) => {
            write!(f, "forall {v} . ")?;
            fmt_formula(body, 0, f)?;
        }
        Formula::ExistsNat(v, body) => {
            write!(f, "exists {v} . ")?;
            fmt_formula(body, 0, f)?;
        }
        Formula::ForallRange(v, lo, hi, body) => {
            write!(f, "forall {v} in [")?;
            fmt_term(lo, 0, f)?;
            write!(f, ", ")?;
            fmt_term(hi, 0, f)?;
            write!(f, "] . ")?;
            fmt_formula(body, 0, f)?;
        }
        Formula::ExistsRange(v, lo, hi, body) => {
            write!(f, "exists {v} in [")?;
            fmt_term(lo, 0, f)?;
            write!(f, ", ")?;
            fmt_term(hi, 0, f)?;
            write!(f, "] . ")?;
            fmt_formula(body, 0, f)?;
        }
    }
    if prec < min {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, f)
    }
}

// ---------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------

/// Variable environment. Lookup of an unbound variable is an error,
/// never a default.
#[derive(Debug, Clone, Default)]
pub struct Env {
    bindings: HashMap<String, Int>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn bind(&mut self, name: &str, value: Int) -> Option<Int> {
        self.bindings.insert(name.to_string(), value)
    }

    pub fn with(mut self, name: &str, value: Int) -> Env {
        self.bind(name, value);
        self
    }

    pub fn lookup(&self, name: &str) -> Option<&Int> {
        self.bindings.get(name)
    }

    fn restore(&mut self, name: &str, old: Option<Int>) {
        match old {
            Some(v) => {
                self.bindings.insert(name.to_string(), v);
            }
            None => {
                self.bindings.remove(name);
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("negative exponent")]
    NegativeExponent,
    #[error("exponent too large to evaluate")]
    ExponentTooLarge,
    #[error("iteration range too large to evaluate")]
    RangeTooLarge,
    #[error("unbounded quantifier cannot be evaluated")]
    UnboundedQuantifier,
}

/// Hard cap on literal exponents, and on the width of evaluated ranges.
const EVAL_LIMIT: u64 = 10_000_000;

/// Exact evaluation. `Sum(i, lo, hi, body)` is zero when `lo > hi`;
/// `Pow` requires a non-negative exponent.
pub fn eval_term(t: &Term, env: &Env) -> Result<Int, EvalError> {
    let mut env = env.clone();
    eval_term_mut(t, &mut env)
}

fn eval_term_mut(t: &Term, env: &mut Env) -> Result<Int, EvalError> {
    Ok(match t {
        Term::Int(v) => v.clone(),
        Term::Var(v) => env
            .lookup(v)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(v.clone()))?,
        Term::Add(l, r) => eval_term_mut(l, env)? + eval_term_mut(r, env)?,
        Term::Sub(l, r) => eval_term_mut(l, env)? - eval_term_mut(r, env)?,
        Term::Mul(l, r) => eval_term_mut(l, env)? * eval_term_mut(r, env)?,
        Term::Pow(l, r) => {
            let base = eval_term_mut(l, env)?;
            let exp = eval_term_mut(r, env)?;
            if exp.is_negative() {
                return Err(EvalError::NegativeExponent);
            }
            let exp = exp.to_u64().ok_or(EvalError::ExponentTooLarge)?;
            if exp > EVAL_LIMIT {
                return Err(EvalError::ExponentTooLarge);
            }
            Pow::pow(base, exp)
        }
        Term::Sum { index, lo, hi, body } => {
            let lo = eval_term_mut(lo, env)?;
            let hi = eval_term_mut(hi, env)?;
            let mut acc = Int::zero();
            if lo <= hi {
                let width = (&hi - &lo).to_u64().ok_or(EvalError::RangeTooLarge)?;
                if width >= EVAL_LIMIT {
                    return Err(EvalError::RangeTooLarge);
                }
                let saved = env.bind(index, lo.clone());
                let mut i = lo;
                loop {
                    env.bind(index, i.clone());
                    acc += eval_term_mut(body, env)?;
                    if i == hi {
                        break;
                    }
                    i += 1;
                }
                env.restore(index, saved);
            }
            acc
        }
    })
}

/// Exact evaluation of a formula. Only range quantifiers evaluate
/// (exhaustively, vacuously true/false on empty ranges); the unbounded
/// `forall`/`exists` are rejected.
pub fn eval_formula(f: &Formula, env: &Env) -> Result<bool, EvalError> {
    let mut env = env.clone();
    eval_formula_mut(f, &mut env)
}

fn eval_formula_mut(f: &Formula, env: &mut Env) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Eq(l, r) => eval_term_mut(l, env)? == eval_term_mut(r, env)?,
        Formula::Neq(l, r) => eval_term_mut(l, env)? != eval_term_mut(r, env)?,
        Formula::Le(l, r) => eval_term_mut(l, env)? <= eval_term_mut(r, env)?,
        Formula::Lt(l, r) => eval_term_mut(l, env)? < eval_term_mut(r, env)?,
        Formula::And(l, r) => eval_formula_mut(l, env)? && eval_formula_mut(r, env)?,
        Formula::Or(l, r) => eval_formula_mut(l, env)? || eval_formula_mut(r, env)?,
        Formula::Not(inner) => !eval_formula_mut(inner, env)?,
        Formula::Implies(l, r) => !eval_formula_mut(l, env)? || eval_formula_mut(r, env)?,
        Formula::ForallNat(..) | Formula::ExistsNat(..) => {
            return Err(EvalError::UnboundedQuantifier)
        }
        Formula::ForallRange(v, lo, hi, body) => {
            eval_range_quant(v, lo, hi, body, env, true)?
        }
        Formula::ExistsRange(v, lo, hi, body) => {
            eval_range_quant(v, lo, hi, body, env, false)?
        }
    })
}

fn eval_range_quant(
    var: &str,
    lo: &Term,
    hi: &Term,
    body: &Formula,
    env: &mut Env,
    universal: bool,
) -> Result<bool, EvalError> {
    let lo = eval_term_mut(lo, env)?;
    let hi = eval_term_mut(hi, env)?;
    if lo > hi {
        return Ok(universal);
    }
    let width = (&hi - &lo).to_u64().ok_or(EvalError::RangeTooLarge)?;
    if width >= EVAL_LIMIT {
        return Err(EvalError::RangeTooLarge);
    }
    let saved = env.bind(var, lo.clone());
    let mut result = universal;
    let mut i = lo;
    loop {
        env.bind(var, i.clone());
        let v = eval_formula_mut(body, env)?;
        if v != universal {
            result = v;
            break;
        }
        if i == hi {
            break;
        }
        i += 1;
    }
    env.restore(var, saved);
    Ok(result)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn fm(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn parse_shapes() {
        assert_eq!(
            fm("12345679 * 36 = 444444444"),
            Formula::Eq(
                Term::int(12345679) * Term::int(36),
                Term::int(444444444u64)
            )
        );
        assert!(matches!(
            fm("forall n in [1,9] . 12345679*9*n = 111111111*n"),
            Formula::ForallRange(..)
        ));
        assert!(matches!(t("sum(i,0,8,(8-i)*10^i)+1"), Term::Add(..)));
    }

    #[test]
    fn eval_magic_sum() {
        assert_eq!(
            eval_term(&t("sum(i,0,8,(8-i)*10^i)+1"), &Env::new()).unwrap(),
            Int::from(12345679)
        );
        assert_eq!(
            eval_term(&t("sum(i,5,4,i)"), &Env::new()).unwrap(),
            Int::from(0)
        );
        assert!(eval_formula(&fm("12345679*9 = 111111111"), &Env::new()).unwrap());
    }

    #[test]
    fn eval_errors() {
        assert_eq!(
            eval_term(&t("x + 1"), &Env::new()),
            Err(EvalError::UnboundVariable("x".into()))
        );
        assert_eq!(
            eval_term(&t("2^(0 - 1)"), &Env::new()),
            Err(EvalError::NegativeExponent)
        );
        assert_eq!(
            eval_formula(&fm("forall x . x = x"), &Env::new()),
            Err(EvalError::UnboundedQuantifier)
        );
        assert!(eval_formula(&fm("forall x in [1, 0] . 0 = 1"), &Env::new()).unwrap());
    }

    #[test]
    fn substitution() {
        let a = fm("x^2 != 1800");
        assert_eq!(
            substitute_formula(&a, "x", &Term::int(42)).unwrap(),
            fm("42^2 != 1800")
        );
        let shadowed = fm("forall x . x = x");
        assert_eq!(
            substitute_formula(&shadowed, "x", &Term::int(5)).unwrap(),
            shadowed
        );
        assert_eq!(
            substitute_formula(&a, "x", &Term::var("y")),
            Err(SubstError::NotClosed)
        );
    }

    #[test]
    fn free_vars() {
        assert_eq!(
            fm("12345679*9*n = 111111111*n")
                .free_vars()
                .into_iter()
                .collect::<Vec<_>>(),
            vec!["n".to_string()]
        );
        assert!(fm("forall n in [1, 9] . n = n").free_vars().is_empty());
        assert_eq!(
            t("sum(i, 0, b - 2, (b - 2 - i) * b^i)")
                .free_vars()
                .into_iter()
                .collect::<Vec<_>>(),
            vec!["b".to_string()]
        );
    }

    #[test]
    fn print_canonical() {
        assert_eq!(
            fm("12345679*36=444444444").to_string(),
            "12345679 * 36 = 444444444"
        );
        assert_eq!(t("(a+b)*c").to_string(), "(a + b) * c");
        assert_eq!(t("a+b*c").to_string(), "a + b * c");
        assert_eq!(t("a-(b-c)").to_string(), "a - (b - c)");
        assert_eq!(t("a-b-c").to_string(), "a - b - c");
        assert_eq!(t("2^3^4").to_string(), "2^3^4");
        assert_eq!(t("(2^3)^4").to_string(), "(2^3)^4");
        assert_eq!(t("(a+b)^2").to_string(), "(a + b)^2");
        assert_eq!(
            fm("~(a = b) /\\ c = d \\/ e < f").to_string(),
            "~(a = b) /\\ c = d \\/ e < f"
        );
        assert_eq!(
            fm("a = b => (c = d => e = f)").to_string(),
            "a = b => c = d => e = f"
        );
        assert_eq!(
            fm("(forall x . x = x) /\\ 1 = 1").to_string(),
            "(forall x . x = x) /\\ 1 = 1"
        );
    }

    #[test]
    fn negative_literal_round_trip() {
        let term = Term::Add(
            Box::new(Term::var("x")),
            Box::new(Term::int(-5)),
        );
        let printed = term.to_string();
        assert_eq!(printed, "x + (-5)");
        assert_eq!(t(&printed), term);
        assert_eq!(t("-5 - x").to_string(), "-5 - x");
    }

    #[test]
    fn ge_gt_desugar() {
        assert_eq!(fm("a >= b"), fm("b <= a"));
        assert_eq!(fm("a > b"), fm("b < a"));
    }

    #[test]
    fn size_bytes_is_print_length() {
        let f = fm("12345679 * 36 = 444444444");
        assert_eq!(f.size_bytes(), "12345679 * 36 = 444444444".len());
    }

    #[test]
    fn subst_eval_commute_randomized() {
        use num_traits::ToPrimitive;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let tm = random_term(&mut rng, 3, &["x", "y"]);
            let c = Int::from(rng.gen_range(-20i64..=20));
            let y = Int::from(rng.gen_range(-20i64..=20));
            let env = Env::new().with("y", y.clone());
            let env_x = env.clone().with("x", c.clone());
            let direct = eval_term(&tm, &env_x);
            let substituted =
                eval_term(&tm.subst("x", &Term::Int(c.clone())).unwrap(), &env);
            match (direct, substituted) {
                (Ok(a), Ok(b)) => assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                (a, b) => panic!("divergence: {a:?} vs {b:?} on {tm}"),
            }
            let _ = c.to_i64();
        }
    }

    #[test]
    fn sum_split_identity_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let a = rng.gen_range(-5i64..=5);
            let b = rng.gen_range(a..=a + 8);
            let body = random_term(&mut rng, 2, &["i"]);
            let whole = Term::sum("i", Term::int(a), Term::int(b), body.clone());
            let head = Term::sum("i", Term::int(a), Term::int(b - 1), body.clone());
            let last = body.subst("i", &Term::int(b)).unwrap();
            let env = Env::new();
            match (
                eval_term(&whole, &env),
                eval_term(&(head + last), &env),
            ) {
                (Ok(l), Ok(r)) => assert_eq!(l, r),
                (Err(_), Err(_)) => {}
                (l, r) => panic!("divergence: {l:?} vs {r:?}"),
            }
        }
    }

    pub(crate) fn random_term(
        rng: &mut rand_chacha::ChaCha8Rng,
        depth: u32,
        vars: &[&str],
    ) -> Term {
        use rand::Rng;
        if depth == 0 || rng.gen_bool(0.3) {
            if rng.gen_bool(0.5) && !vars.is_empty() {
                Term::var(vars[rng.gen_range(0..vars.len())])
            } else {
                Term::int(rng.gen_range(-9i64..=9))
            }
        } else {
            match rng.gen_range(0..5) {
                0 => random_term(rng, depth - 1, vars) + random_term(rng, depth - 1, vars),
                1 => random_term(rng, depth - 1, vars) - random_term(rng, depth - 1, vars),
                2 => random_term(rng, depth - 1, vars) * random_term(rng, depth - 1, vars),
                3 => Term::pow(
                    random_term(rng, depth - 1, vars),
                    Term::int(rng.gen_range(0i64..=3)),
                ),
                _ => {
                    let a = rng.gen_range(-3i64..=3);
                    let b = rng.gen_range(a - 1..=a + 4);
                    Term::sum(
                        "k",
                        Term::int(a),
                        Term::int(b),
                        random_term(rng, depth - 1, &[vars, &["k"]].concat()),
                    )
                }
            }
        }
    }
}
