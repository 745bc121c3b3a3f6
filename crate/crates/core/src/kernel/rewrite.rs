//! Rewrite rules for sum algebra and their structural application.
//!
//! A rewrite step records the whole term before and after, the path to
//! the redex, the rule, and a direction (equalities are symmetric, so a
//! rule may be replayed right-to-left). Applying a rule is exact: the
//! validator recomputes the transformed subterm and requires the
//! recorded result to match structurally. Rules that are only valid
//! under constraints (nonempty ranges, split points inside bounds,
//! lemma premises) emit side conditions as formulas; the checker
//! discharges each one either by a sub-proof or, when closed, by
//! evaluation.

use thiserror::Error;

use super::normalize::{normalize_ring, ring_equal, NormalizeError};
use crate::lang::{Formula, SubstError, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RewriteRule {
    /// `(a ± b) * c` to `a*c ± b*c`, or `c * (a ± b)` to `c*a ± c*b`.
    Distribute,
    /// Exact inverse of [`RewriteRule::Distribute`].
    Factor,
    /// Pull an index-free factor inside a sum, or combine two sums over
    /// the same range termwise.
    SumLinearity,
    /// `sum(i, lo, hi, f)` to `sum(i, lo, hi-1, f) + f[hi]`.
    SumSplitLast,
    /// `sum(i, lo, hi, f)` to `f[lo] + sum(i, lo+1, hi, f)`.
    SumSplitFirst,
    /// `sum(i, lo, hi, f)` to `sum(i, lo, t, f) + sum(i, t+1, hi, f)`.
    SumSplitAt(Term),
    /// An empty sum collapses to zero.
    SumEmpty,
    /// Shift the index by an index-free offset.
    IndexShift(Term),
    /// `sum(i, lo, hi, f(i+1) - f(i))` to `f(hi+1) - f(lo)`.
    Telescope,
    /// `x^a * x^b` to `x^(a+b)` (a bare base counts as exponent 1).
    PowAddExp,
    /// Replace a subterm by any term with the same ring normal form.
    RingNormalize,
    /// Rewrite by an instantiated library lemma equation.
    LemmaRewrite(String, Vec<(String, Term)>),
}

impl RewriteRule {
    pub fn name(&self) -> &'static str {
        match self {
            RewriteRule::Distribute => "distribute",
            RewriteRule::Factor => "factor",
            RewriteRule::SumLinearity => "sum-linearity",
            RewriteRule::SumSplitLast => "sum-split-last",
            RewriteRule::SumSplitFirst => "sum-split-first",
            RewriteRule::SumSplitAt(_) => "sum-split-at",
            RewriteRule::SumEmpty => "sum-empty",
            RewriteRule::IndexShift(_) => "index-shift",
            RewriteRule::Telescope => "telescope",
            RewriteRule::PowAddExp => "pow-add-exp",
            RewriteRule::RingNormalize => "ring",
            RewriteRule::LemmaRewrite(..) => "lemma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// One link of a rewrite chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub rule: RewriteRule,
    pub direction: Direction,
    /// Path to the redex inside `before` (child indices; sums index
    /// lo 0, hi 1, body 2).
    pub position: Vec<usize>,
    pub before: Term,
    pub after: Term,
    /// Discharges for the rule's side conditions: either empty (all
    /// conditions closed and checked by evaluation) or one proof per
    /// condition, in emission order.
    pub side_proofs: Vec<super::Proof>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("rule {rule} does not match the subterm")]
    NoMatch { rule: &'static str },
    #[error("position {0:?} is out of range")]
    BadPosition(Vec<usize>),
    #[error("recorded result does not match the rule's output")]
    ResultMismatch,
    #[error("offset or split point must not mention the sum index")]
    IndexNotFree,
    #[error("unknown lemma {0}")]
    UnknownLemma(String),
    #[error("lemma {0} does not reduce to an equation")]
    NotAnEquation(String),
    #[error("substitution failed: {0}")]
    Subst(#[from] SubstError),
    #[error("normalization failed: {0}")]
    Normalize(#[from] NormalizeError),
}

/// Navigate to the subterm at `path`.
pub fn subterm_at<'a>(t: &'a Term, path: &[usize]) -> Option<&'a Term> {
    let mut cur = t;
    for &i in path {
        cur = match (cur, i) {
            (Term::Add(l, _), 0)
            | (Term::Sub(l, _), 0)
            | (Term::Mul(l, _), 0)
            | (Term::Pow(l, _), 0) => l,
            (Term::Add(_, r), 1)
            | (Term::Sub(_, r), 1)
            | (Term::Mul(_, r), 1)
            | (Term::Pow(_, r), 1) => r,
            (Term::Sum { lo, .. }, 0) => lo,
            (Term::Sum { hi, .. }, 1) => hi,
            (Term::Sum { body, .. }, 2) => body,
            _ => return None,
        };
    }
    Some(cur)
}

/// Rebuild `t` with the subterm at `path` replaced.
pub fn replace_at(t: &Term, path: &[usize], new: &Term) -> Option<Term> {
    let Some((&i, rest)) = path.split_first() else {
        return Some(new.clone());
    };
    Some(match (t, i) {
        (Term::Add(l, r), 0) => Term::Add(Box::new(replace_at(l, rest, new)?), r.clone()),
        (Term::Add(l, r), 1) => Term::Add(l.clone(), Box::new(replace_at(r, rest, new)?)),
        (Term::Sub(l, r), 0) => Term::Sub(Box::new(replace_at(l, rest, new)?), r.clone()),
        (Term::Sub(l, r), 1) => Term::Sub(l.clone(), Box::new(replace_at(r, rest, new)?)),
        (Term::Mul(l, r), 0) => Term::Mul(Box::new(replace_at(l, rest, new)?), r.clone()),
        (Term::Mul(l, r), 1) => Term::Mul(l.clone(), Box::new(replace_at(r, rest, new)?)),
        (Term::Pow(l, r), 0) => Term::Pow(Box::new(replace_at(l, rest, new)?), r.clone()),
        (Term::Pow(l, r), 1) => Term::Pow(l.clone(), Box::new(replace_at(r, rest, new)?)),
        (Term::Sum { index, lo, hi, body }, 0) => Term::Sum {
            index: index.clone(),
            lo: Box::new(replace_at(lo, rest, new)?),
            hi: hi.clone(),
            body: body.clone(),
        },
        (Term::Sum { index, lo, hi, body }, 1) => Term::Sum {
            index: index.clone(),
            lo: lo.clone(),
            hi: Box::new(replace_at(hi, rest, new)?),
            body: body.clone(),
        },
        (Term::Sum { index, lo, hi, body }, 2) => Term::Sum {
            index: index.clone(),
            lo: lo.clone(),
            hi: hi.clone(),
            body: Box::new(replace_at(body, rest, new)?),
        },
        _ => return None,
    })
}

/// Side condition `a <= b` with both sides in ring normal form.
fn cond_le(a: &Term, b: &Term) -> Result<Formula, RewriteError> {
    Ok(Formula::Le(normalize_ring(a)?, normalize_ring(b)?))
}

fn cond_lt(a: &Term, b: &Term) -> Result<Formula, RewriteError> {
    Ok(Formula::Lt(normalize_ring(a)?, normalize_ring(b)?))
}

fn one() -> Term {
    Term::int(1)
}

/// Apply `rule` to `redex` (forward direction), producing the
/// transformed subterm and the side conditions under which the
/// transformation is an equality.
pub fn apply_rule(
    rule: &RewriteRule,
    redex: &Term,
    lemmas: &super::LemmaStore,
) -> Result<(Term, Vec<Formula>), RewriteError> {
    let no_match = || RewriteError::NoMatch { rule: rule.name() };
    match rule {
        RewriteRule::Distribute => {
            let out = match redex {
                Term::Mul(l, c) if matches!(**l, Term::Add(..) | Term::Sub(..)) => match &**l {
                    Term::Add(a, b) => {
                        (**a).clone() * (**c).clone() + (**b).clone() * (**c).clone()
                    }
                    Term::Sub(a, b) => {
                        (**a).clone() * (**c).clone() - (**b).clone() * (**c).clone()
                    }
                    _ => unreachable!(),
                },
                Term::Mul(c, r) if matches!(**r, Term::Add(..) | Term::Sub(..)) => match &**r {
                    Term::Add(a, b) => {
                        (**c).clone() * (**a).clone() + (**c).clone() * (**b).clone()
                    }
                    Term::Sub(a, b) => {
                        (**c).clone() * (**a).clone() - (**c).clone() * (**b).clone()
                    }
                    _ => unreachable!(),
                },
                _ => return Err(no_match()),
            };
            Ok((out, Vec::new()))
        }
        RewriteRule::Factor => {
            let out = match redex {
                Term::Add(l, r) => match (&**l, &**r) {
                    (Term::Mul(a, c1), Term::Mul(b, c2)) if c1 == c2 => {
                        ((**a).clone() + (**b).clone()) * (**c1).clone()
                    }
                    (Term::Mul(c1, a), Term::Mul(c2, b)) if c1 == c2 => {
                        (**c1).clone() * ((**a).clone() + (**b).clone())
                    }
                    _ => return Err(no_match()),
                },
                Term::Sub(l, r) => match (&**l, &**r) {
                    (Term::Mul(a, c1), Term::Mul(b, c2)) if c1 == c2 => {
                        ((**a).clone() - (**b).clone()) * (**c1).clone()
                    }
                    (Term::Mul(c1, a), Term::Mul(c2, b)) if c1 == c2 => {
                        (**c1).clone() * ((**a).clone() - (**b).clone())
                    }
                    _ => return Err(no_match()),
                },
                _ => return Err(no_match()),
            };
            Ok((out, Vec::new()))
        }
        RewriteRule::SumLinearity => {
            let out = match redex {
                Term::Mul(l, c) if matches!(**l, Term::Sum { .. }) => {
                    let Term::Sum { index, lo, hi, body } = &**l else {
                        unreachable!()
                    };
                    if c.free_vars().contains(index) {
                        return Err(RewriteError::IndexNotFree);
                    }
                    Term::sum(
                        index,
                        (**lo).clone(),
                        (**hi).clone(),
                        (**body).clone() * (**c).clone(),
                    )
                }
                Term::Mul(c, r) if matches!(**r, Term::Sum { .. }) => {
                    let Term::Sum { index, lo, hi, body } = &**r else {
                        unreachable!()
                    };
                    if c.free_vars().contains(index) {
                        return Err(RewriteError::IndexNotFree);
                    }
                    Term::sum(
                        index,
                        (**lo).clone(),
                        (**hi).clone(),
                        (**c).clone() * (**body).clone(),
                    )
                }
                Term::Add(l, r) | Term::Sub(l, r) => {
                    let (
                        Term::Sum { index: i1, lo: lo1, hi: hi1, body: f },
                        Term::Sum { index: i2, lo: lo2, hi: hi2, body: g },
                    ) = (&**l, &**r)
                    else {
                        return Err(no_match());
                    };
                    if i1 != i2 || lo1 != lo2 || hi1 != hi2 {
                        return Err(no_match());
                    }
                    let body = if matches!(redex, Term::Add(..)) {
                        (**f).clone() + (**g).clone()
                    } else {
                        (**f).clone() - (**g).clone()
                    };
                    Term::sum(i1, (**lo1).clone(), (**hi1).clone(), body)
                }
                _ => return Err(no_match()),
            };
            Ok((out, Vec::new()))
        }
        RewriteRule::SumSplitLast => {
            let Term::Sum { index, lo, hi, body } = redex else {
                return Err(no_match());
            };
            let last = body.subst(index, hi)?;
            let head = Term::sum(
                index,
                (**lo).clone(),
                (**hi).clone() - one(),
                (**body).clone(),
            );
            Ok((head + last, vec![cond_le(lo, hi)?]))
        }
        RewriteRule::SumSplitFirst => {
            let Term::Sum { index, lo, hi, body } = redex else {
                return Err(no_match());
            };
            let first = body.subst(index, lo)?;
            let tail = Term::sum(
                index,
                (**lo).clone() + one(),
                (**hi).clone(),
                (**body).clone(),
            );
            Ok((first + tail, vec![cond_le(lo, hi)?]))
        }
        RewriteRule::SumSplitAt(t) => {
            let Term::Sum { index, lo, hi, body } = redex else {
                return Err(no_match());
            };
            if t.free_vars().contains(index) {
                return Err(RewriteError::IndexNotFree);
            }
            let left = Term::sum(index, (**lo).clone(), t.clone(), (**body).clone());
            let right = Term::sum(index, t.clone() + one(), (**hi).clone(), (**body).clone());
            let conds = vec![
                cond_le(lo, &(t.clone() + one()))?,
                cond_le(t, hi)?,
            ];
            Ok((left + right, conds))
        }
        RewriteRule::SumEmpty => {
            let Term::Sum { lo, hi, .. } = redex else {
                return Err(no_match());
            };
            Ok((Term::int(0), vec![cond_lt(hi, lo)?]))
        }
        RewriteRule::IndexShift(k) => {
            let Term::Sum { index, lo, hi, body } = redex else {
                return Err(no_match());
            };
            if k.free_vars().contains(index) {
                return Err(RewriteError::IndexNotFree);
            }
            let shifted_body = body.subst(index, &(Term::var(index) - k.clone()))?;
            let out = Term::sum(
                index,
                (**lo).clone() + k.clone(),
                (**hi).clone() + k.clone(),
                shifted_body,
            );
            Ok((out, Vec::new()))
        }
        RewriteRule::Telescope => {
            let Term::Sum { index, lo, hi, body } = redex else {
                return Err(no_match());
            };
            let Term::Sub(p, q) = &**body else {
                return Err(no_match());
            };
            let stepped = q.subst(index, &(Term::var(index) + one()))?;
            if !ring_equal(p, &stepped)? {
                return Err(no_match());
            }
            let out = q.subst(index, &((**hi).clone() + one()))? - q.subst(index, lo)?;
            Ok((out, vec![cond_le(lo, &((**hi).clone() + one()))?]))
        }
        RewriteRule::PowAddExp => {
            let Term::Mul(l, r) = redex else {
                return Err(no_match());
            };
            let as_pow = |t: &Term| -> (Term, Term) {
                match t {
                    Term::Pow(b, e) => ((**b).clone(), (**e).clone()),
                    other => (other.clone(), one()),
                }
            };
            let (b1, e1) = as_pow(l);
            let (b2, e2) = as_pow(r);
            if b1 != b2 {
                return Err(no_match());
            }
            Ok((Term::pow(b1, e1 + e2), Vec::new()))
        }
        RewriteRule::RingNormalize => Ok((normalize_ring(redex)?, Vec::new())),
        RewriteRule::LemmaRewrite(name, inst) => {
            let entry = lemmas
                .get(name)
                .ok_or_else(|| RewriteError::UnknownLemma(name.clone()))?;
            let (lhs, rhs, conds) = instantiate_equation(&entry.statement, inst, name)?;
            if redex != &lhs {
                return Err(no_match());
            }
            Ok((rhs, conds))
        }
    }
}

/// Peel quantifiers and premises off a lemma statement, instantiate the
/// bound variables, and return the equation plus the instance conditions
/// (one `0 <= v` per natural quantifier, the range bounds per range
/// quantifier, and each premise).
pub fn instantiate_equation(
    statement: &Formula,
    inst: &[(String, Term)],
    name: &str,
) -> Result<(Term, Term, Vec<Formula>), RewriteError> {
    let lookup = |v: &str| -> Result<&Term, RewriteError> {
        inst.iter()
            .find(|(name, _)| name == v)
            .map(|(_, t)| t)
            .ok_or_else(|| RewriteError::NotAnEquation(format!("{name}: missing binding for {v}")))
    };
    let mut conds = Vec::new();
    let mut map: Vec<(String, Term)> = Vec::new();
    let mut cur = statement;
    loop {
        match cur {
            Formula::ForallNat(v, body) => {
                let t = lookup(v)?;
                conds.push(Formula::Le(Term::int(0), t.clone()));
                map.push((v.clone(), t.clone()));
                cur = body;
            }
            Formula::ForallRange(v, lo, hi, body) => {
                let t = lookup(v)?;
                let lo = lo.multi_subst(&map)?;
                let hi = hi.multi_subst(&map)?;
                conds.push(Formula::Le(lo, t.clone()));
                conds.push(Formula::Le(t.clone(), hi));
                map.push((v.clone(), t.clone()));
                cur = body;
            }
            Formula::Implies(premise, body) => {
                conds.push(premise.multi_subst(&map)?);
                cur = body;
            }
            Formula::Eq(l, r) => {
                let l = l.multi_subst(&map)?;
                let r = r.multi_subst(&map)?;
                return Ok((l, r, conds));
            }
            _ => return Err(RewriteError::NotAnEquation(name.to_string())),
        }
    }
}

/// Check one chain link: the redex of the source side must transform
/// into the destination side exactly. Returns the side conditions to
/// discharge.
pub fn validate_step(
    step: &RewriteStep,
    lemmas: &super::LemmaStore,
) -> Result<Vec<Formula>, RewriteError> {
    let (src, dst) = match step.direction {
        Direction::Forward => (&step.before, &step.after),
        Direction::Backward => (&step.after, &step.before),
    };
    let redex = subterm_at(src, &step.position)
        .ok_or_else(|| RewriteError::BadPosition(step.position.clone()))?;
    if matches!(step.rule, RewriteRule::RingNormalize) {
        // any ring-equal replacement is fine; no canonical output
        let other = subterm_at(dst, &step.position)
            .ok_or_else(|| RewriteError::BadPosition(step.position.clone()))?;
        if !ring_equal(redex, other)? {
            return Err(RewriteError::ResultMismatch);
        }
        let rebuilt = replace_at(src, &step.position, other)
            .ok_or_else(|| RewriteError::BadPosition(step.position.clone()))?;
        if &rebuilt != dst {
            return Err(RewriteError::ResultMismatch);
        }
        return Ok(Vec::new());
    }
    let (result, conds) = apply_rule(&step.rule, redex, lemmas)?;
    let rebuilt = replace_at(src, &step.position, &result)
        .ok_or_else(|| RewriteError::BadPosition(step.position.clone()))?;
    if &rebuilt != dst {
        return Err(RewriteError::ResultMismatch);
    }
    Ok(conds)
}

/// Public entry matching the operation contract: validate a step and
/// return whether it applies together with the derived side conditions.
pub fn apply_rewrite(
    step: &RewriteStep,
    lemmas: &super::LemmaStore,
) -> (bool, Vec<Formula>) {
    match validate_step(step, lemmas) {
        Ok(conds) => (true, conds),
        Err(_) => (false, Vec::new()),
    }
}

