//! Proof construction helpers.
//!
//! The kernel matches formulas structurally, so proof builders have to
//! bridge between the shapes rules emit (monotonicity instances like
//! `a + z <= b + z`) and the canonical shapes side conditions are stated
//! in. [`reshape_cmp`] does that bridging with equality-substitution
//! steps whose equalities are single ring-normalization chains.
//!
//! [`Facts`] is a tiny derivation engine over the hypotheses available
//! at a point in a proof: it proves `l <= r` goals by direct reference,
//! by adding a constant slack to a known inequality, or by composing
//! nonnegativity of monomial factors. Everything it returns is an
//! ordinary proof object; nothing here extends the trusted checker.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::kernel::{poly_of, ring_equal, term_of, Direction, Proof, RewriteRule, RewriteStep};
use crate::lang::{eval_formula, Env, Formula, Term};
use crate::Int;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("cannot derive {0}")]
    Underivable(String),
    #[error("ring bridge between {0} and {1} failed")]
    NotRingEqual(String, String),
    #[error("malformed builder input: {0}")]
    Malformed(String),
}

pub fn axiom_ref(name: &str, inst: &[(&str, Term)]) -> Proof {
    Proof::AxiomRef {
        name: name.to_string(),
        inst: inst
            .iter()
            .map(|(v, t)| (v.to_string(), t.clone()))
            .collect(),
    }
}

pub fn imp_elim(f: Proof, arg: Proof) -> Proof {
    Proof::ImpElim {
        f: f.boxed(),
        arg: arg.boxed(),
    }
}

pub fn imp_elim2(f: Proof, a1: Proof, a2: Proof) -> Proof {
    imp_elim(imp_elim(f, a1), a2)
}

pub fn imp_elim3(f: Proof, a1: Proof, a2: Proof, a3: Proof) -> Proof {
    imp_elim(imp_elim2(f, a1, a2), a3)
}

/// A proof of `from = to` by one ring-normalization step (empty chain
/// when the terms are identical).
pub fn eq_by_ring(from: &Term, to: &Term) -> Result<Proof, BuildError> {
    let goal = Formula::Eq(from.clone(), to.clone());
    if from == to {
        return Ok(Proof::RewriteChain {
            goal,
            steps: Vec::new(),
        });
    }
    if !ring_equal(from, to).unwrap_or(false) {
        return Err(BuildError::NotRingEqual(from.to_string(), to.to_string()));
    }
    Ok(Proof::RewriteChain {
        goal,
        steps: vec![RewriteStep {
            rule: RewriteRule::RingNormalize,
            direction: Direction::Forward,
            position: vec![],
            before: from.clone(),
            after: to.clone(),
            side_proofs: vec![],
        }],
    })
}

fn comparison_sides(f: &Formula) -> Option<(&Term, &Term)> {
    match f {
        Formula::Eq(l, r) | Formula::Neq(l, r) | Formula::Le(l, r) | Formula::Lt(l, r) => {
            Some((l, r))
        }
        _ => None,
    }
}

/// Convert a proof of one comparison into a proof of a ring-equal one
/// by rewriting each side.
pub fn reshape_cmp(p: Proof, from: &Formula, to: &Formula) -> Result<Proof, BuildError> {
    if from == to {
        return Ok(p);
    }
    let (Some((a, b)), Some((l, r))) = (comparison_sides(from), comparison_sides(to)) else {
        return Err(BuildError::Malformed(format!(
            "reshape of non-comparisons {from} and {to}"
        )));
    };
    if std::mem::discriminant(from) != std::mem::discriminant(to) {
        return Err(BuildError::Malformed(format!(
            "reshape across kinds {from} and {to}"
        )));
    }
    let mut proof = p;
    if a != l {
        proof = Proof::EqSubst {
            equality: eq_by_ring(a, l)?.boxed(),
            target: proof.boxed(),
            position: vec![0],
        };
    }
    if b != r {
        proof = Proof::EqSubst {
            equality: eq_by_ring(b, r)?.boxed(),
            target: proof.boxed(),
            position: vec![1],
        };
    }
    Ok(proof)
}

/// Canonical term of the difference `r - l`.
fn diff_poly(l: &Term, r: &Term) -> Option<crate::kernel::Poly> {
    Some(poly_of(r).ok()?.sub(&poly_of(l).ok()?))
}

/// The hypotheses in scope at a construction site, in checker labeling:
/// binder hypotheses under the variable name, explicit ones under their
/// label. Derived facts (with their full proofs) can be added as
/// further starting points.
#[derive(Debug, Clone, Default)]
pub struct Facts {
    hyps: Vec<(String, Formula)>,
    derived: Vec<(Proof, Formula)>,
}

impl Facts {
    pub fn new() -> Facts {
        Facts::default()
    }

    pub fn with_hyp(mut self, label: &str, f: Formula) -> Facts {
        self.hyps.push((label.to_string(), f.clone()));
        self
    }

    /// Record an already-derived fact for later goals.
    pub fn add_fact(&mut self, proof: Proof, formula: Formula) {
        self.derived.push((proof, formula));
    }

    /// The binder hypothesis of `forall v`: `0 <= v`.
    pub fn with_nat_var(self, var: &str) -> Facts {
        let f = Formula::Le(Term::int(0), Term::var(var));
        self.with_hyp(var, f)
    }

    /// The binder hypothesis of `forall v in [lo, hi]`.
    pub fn with_range_var(self, var: &str, lo: &Term, hi: &Term) -> Facts {
        let f = Formula::and(
            Formula::Le(lo.clone(), Term::var(var)),
            Formula::Le(Term::var(var), hi.clone()),
        );
        self.with_hyp(var, f)
    }

    /// Every comparison reachable from the hypotheses by conjunction
    /// projection, plus the derived facts, with the proofs that
    /// reference them.
    fn base_facts(&self) -> Vec<(Proof, Formula)> {
        let mut out = Vec::new();
        for (label, f) in &self.hyps {
            let hyp = Proof::HypRef(label.clone());
            match f {
                Formula::And(a, b) => {
                    out.push((Proof::AndElimL(hyp.clone().boxed()), (**a).clone()));
                    out.push((Proof::AndElimR(hyp.boxed()), (**b).clone()));
                }
                other => out.push((hyp, other.clone())),
            }
        }
        out.extend(self.derived.iter().cloned());
        out
    }

    /// Discharge a rewrite side condition or lemma premise.
    pub fn discharge(&self, cond: &Formula) -> Result<Proof, BuildError> {
        match cond {
            Formula::Le(l, r) => self.prove_le(l, r),
            Formula::Lt(l, r) => self.prove_lt(l, r),
            _ => self
                .by_computation(cond)
                .or_else(|| self.by_reference(cond))
                .ok_or_else(|| BuildError::Underivable(cond.to_string())),
        }
    }

    fn by_computation(&self, goal: &Formula) -> Option<Proof> {
        if goal.is_closed()
            && goal.is_range_only()
            && eval_formula(goal, &Env::new()) == Ok(true)
        {
            Some(Proof::ComputeLeaf(goal.clone()))
        } else {
            None
        }
    }

    fn by_reference(&self, goal: &Formula) -> Option<Proof> {
        self.base_facts()
            .into_iter()
            .find(|(_, f)| f == goal)
            .map(|(p, _)| p)
    }

    /// Prove `l <= r`.
    pub fn prove_le(&self, l: &Term, r: &Term) -> Result<Proof, BuildError> {
        let goal = Formula::Le(l.clone(), r.clone());
        if let Some(p) = self.by_computation(&goal) {
            return Ok(p);
        }
        if let Some(p) = self.by_reference(&goal) {
            return Ok(p);
        }
        let Some(goal_diff) = diff_poly(l, r) else {
            return Err(BuildError::Underivable(goal.to_string()));
        };

        // pure slack: r - l is a nonnegative constant
        if let Some(c) = goal_diff.as_constant() {
            if !c.is_negative() {
                return self.le_by_pure_slack(l, r, &c);
            }
        }

        // a known inequality plus a nonnegative constant slack
        for (fact_proof, fact) in self.base_facts() {
            let Formula::Le(a, b) = &fact else { continue };
            let Some(fact_diff) = diff_poly(a, b) else {
                continue;
            };
            let slack = goal_diff.sub(&fact_diff);
            let Some(c) = slack.as_constant() else {
                continue;
            };
            if c.is_negative() {
                continue;
            }
            return self.le_by_fact_slack(l, r, fact_proof, &fact, &c);
        }

        // 0 <= monomial with provably nonnegative factors
        if poly_of(l).ok().map(|p| p.is_zero()) == Some(true) {
            if let Some(p) = self.nonneg_monomial(r) {
                return Ok(p);
            }
        }

        Err(BuildError::Underivable(goal.to_string()))
    }

    /// `l <= r` from `0 <= c` where `c = r - l` is a literal.
    fn le_by_pure_slack(&self, l: &Term, r: &Term, c: &Int) -> Result<Proof, BuildError> {
        let c_term = Term::Int(c.clone());
        let zero = Term::int(0);
        // 0 <= c  =>  0 + l <= c + l
        let ax = axiom_ref(
            "add-mono-le",
            &[("x", zero.clone()), ("y", c_term.clone()), ("z", l.clone())],
        );
        let nonneg = Proof::ComputeLeaf(Formula::Le(zero.clone(), c_term.clone()));
        let raw = imp_elim(ax, nonneg);
        let raw_formula = Formula::Le(zero.clone() + l.clone(), c_term + l.clone());
        reshape_cmp(raw, &raw_formula, &Formula::Le(l.clone(), r.clone()))
    }

    /// `l <= r` from a fact `a <= b` with `r - l = (b - a) + c`,
    /// `c >= 0` literal.
    fn le_by_fact_slack(
        &self,
        l: &Term,
        r: &Term,
        fact_proof: Proof,
        fact: &Formula,
        c: &Int,
    ) -> Result<Proof, BuildError> {
        let Formula::Le(a, b) = fact else {
            return Err(BuildError::Malformed("slack from a non-le fact".into()));
        };
        let z = term_of(&poly_of(l).map_err(|e| BuildError::Malformed(e.to_string()))?.sub(
            &poly_of(a).map_err(|e| BuildError::Malformed(e.to_string()))?,
        ));
        // a <= b  =>  a + z <= b + z, with a + z ~ l and b + z ~ r - c
        let ax = axiom_ref(
            "add-mono-le",
            &[("x", a.clone()), ("y", b.clone()), ("z", z.clone())],
        );
        let shifted = imp_elim(ax, fact_proof);
        let shifted_formula = Formula::Le(a.clone() + z.clone(), b.clone() + z);
        if c.is_zero() {
            return reshape_cmp(shifted, &shifted_formula, &Formula::Le(l.clone(), r.clone()));
        }
        let mid = term_of(
            &poly_of(r)
                .map_err(|e| BuildError::Malformed(e.to_string()))?
                .sub(&crate::kernel::Poly::constant(c.clone())),
        );
        let first = reshape_cmp(
            shifted,
            &shifted_formula,
            &Formula::Le(l.clone(), mid.clone()),
        )?;
        let second = self.le_by_pure_slack(&mid, r, c)?;
        let trans = imp_elim2(
            axiom_ref(
                "le-trans",
                &[("x", l.clone()), ("y", mid), ("z", r.clone())],
            ),
            first,
            second,
        );
        Ok(trans)
    }

    /// `0 <= m` for a single monomial `m` with a positive coefficient
    /// and variable factors that are themselves provably nonnegative.
    fn nonneg_monomial(&self, m: &Term) -> Option<Proof> {
        let poly = poly_of(m).ok()?;
        let monos = poly.monomials();
        if monos.is_empty() {
            // m ~ 0
            let p = Proof::ComputeLeaf(Formula::Le(Term::int(0), Term::int(0)));
            return reshape_cmp(
                p,
                &Formula::Le(Term::int(0), Term::int(0)),
                &Formula::Le(Term::int(0), m.clone()),
            )
            .ok();
        }
        let [(coeff, atoms)] = monos else { return None };
        if coeff.is_negative() {
            return None;
        }
        let zero = Term::int(0);
        let mut cur_term = Term::Int(coeff.clone());
        let mut cur =
            Proof::ComputeLeaf(Formula::Le(zero.clone(), cur_term.clone()));
        for atom in atoms {
            let (base, exp) = atom.as_var_literal()?;
            let factor = if exp == 1 {
                Term::var(&base)
            } else {
                Term::pow(Term::var(&base), Term::int(exp))
            };
            let factor_nonneg = self.nonneg_power(&base, exp)?;
            // 0 <= factor => (0 <= cur => 0 * factor <= cur * factor)
            let ax = axiom_ref(
                "mul-mono-le",
                &[
                    ("x", zero.clone()),
                    ("y", cur_term.clone()),
                    ("z", factor.clone()),
                ],
            );
            let raw = imp_elim2(ax, factor_nonneg, cur);
            let raw_formula = Formula::Le(
                zero.clone() * factor.clone(),
                cur_term.clone() * factor.clone(),
            );
            let next_term = term_of(&poly_of(&(cur_term.clone() * factor)).ok()?);
            cur = reshape_cmp(
                raw,
                &raw_formula,
                &Formula::Le(zero.clone(), next_term.clone()),
            )
            .ok()?;
            cur_term = next_term;
        }
        reshape_cmp(
            cur,
            &Formula::Le(zero.clone(), cur_term),
            &Formula::Le(zero, m.clone()),
        )
        .ok()
    }

    /// `0 <= v^e` for a literal exponent, from `0 <= v`.
    fn nonneg_power(&self, var: &str, exp: i64) -> Option<Proof> {
        let v = Term::var(var);
        let base_nonneg = self.prove_le(&Term::int(0), &v).ok()?;
        if exp == 1 {
            return Some(base_nonneg);
        }
        let zero = Term::int(0);
        let e = Term::int(exp);
        // 0 <= 0 => (0 <= e => (0 <= v => 0^e <= v^e))
        let ax = axiom_ref(
            "pow-mono-le",
            &[("x", zero.clone()), ("y", v.clone()), ("n", e.clone())],
        );
        let raw = imp_elim3(
            ax,
            Proof::ComputeLeaf(Formula::Le(zero.clone(), zero.clone())),
            Proof::ComputeLeaf(Formula::Le(zero.clone(), e.clone())),
            base_nonneg,
        );
        let raw_formula = Formula::Le(
            Term::pow(zero.clone(), e.clone()),
            Term::pow(v.clone(), e.clone()),
        );
        reshape_cmp(
            raw,
            &raw_formula,
            &Formula::Le(zero, Term::pow(v, e)),
        )
        .ok()
    }

    /// Prove `l < r`: by evaluation, by reference, by shifting a known
    /// strict fact, or over the naturals through `l + 1 <= r`.
    pub fn prove_lt(&self, l: &Term, r: &Term) -> Result<Proof, BuildError> {
        let goal = Formula::Lt(l.clone(), r.clone());
        if let Some(p) = self.by_computation(&goal) {
            return Ok(p);
        }
        if let Some(p) = self.by_reference(&goal) {
            return Ok(p);
        }
        // a ring-equal strict fact
        for (fact_proof, fact) in self.base_facts() {
            let Formula::Lt(a, b) = &fact else { continue };
            if ring_equal(a, l).unwrap_or(false) && ring_equal(b, r).unwrap_or(false) {
                return reshape_cmp(fact_proof, &fact, &goal);
            }
        }
        // successor bridge: l < r from l + 1 <= r, for nonnegative l, r
        let attempt = || -> Result<Proof, BuildError> {
            let zero = Term::int(0);
            let r_nonneg = self.prove_le(&zero, r)?;
            let l_nonneg = self.prove_le(&zero, l)?;
            let shifted = self.prove_le(&(l.clone() + Term::int(1)), r)?;
            // succ-gt at x := r, t := l, second conjunct
            let ax = axiom_ref("succ-gt", &[("x", r.clone()), ("t", l.clone())]);
            let both = imp_elim2(ax, r_nonneg, l_nonneg);
            let bridge = Proof::AndElimR(both.boxed());
            Ok(imp_elim(bridge, shifted))
        };
        attempt().map_err(|_| BuildError::Underivable(goal.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check, LemmaStore};
    use crate::lang::parse_formula;

    fn fm(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn tm(s: &str) -> Term {
        crate::lang::parse_term(s).unwrap()
    }

    /// Check a derived proof inside the hypothesis context it was built
    /// for by wrapping it in the corresponding intro nodes.
    fn check_under_nat_hyp(
        var: &str,
        extra: Option<(&str, &str)>,
        proof: Proof,
        conclusion: &str,
    ) -> bool {
        let mut body = proof;
        let mut goal = fm(conclusion);
        if let Some((label, hyp)) = extra {
            goal = Formula::implies(fm(hyp), goal);
            body = Proof::ImpIntro {
                label: label.into(),
                hyp: fm(hyp),
                body: body.boxed(),
            };
        }
        let wrapped = Proof::ForallIntro {
            var: var.into(),
            body: body.boxed(),
        };
        let full_goal = Formula::forall_nat(var, goal);
        let report = check(&wrapped, &full_goal, &LemmaStore::new());
        if !report.accepted {
            eprintln!("rejected: {:?}", report.failure);
        }
        report.accepted
    }

    #[test]
    fn closed_discharge() {
        let facts = Facts::new();
        let p = facts.prove_le(&tm("2"), &tm("10")).unwrap();
        assert!(check(&p, &fm("2 <= 10"), &LemmaStore::new()).accepted);
        assert!(facts.prove_le(&tm("10"), &tm("2")).is_err());
    }

    #[test]
    fn hypothesis_slack() {
        // from 2 <= b: 0 <= b - 1, 0 <= b - 2, 1 <= b - 1
        let facts = Facts::new().with_nat_var("b").with_hyp("hb", fm("2 <= b"));
        for (l, r) in [("0", "b - 1"), ("0", "b - 2"), ("1", "b - 1"), ("2", "b")] {
            let p = facts.prove_le(&tm(l), &tm(r)).unwrap();
            assert!(
                check_under_nat_hyp("b", Some(("hb", "2 <= b")), p, &format!("{l} <= {r}")),
                "{l} <= {r}"
            );
        }
    }

    #[test]
    fn range_hypothesis_projection() {
        let facts = Facts::new().with_range_var("n", &tm("1"), &tm("9"));
        let p = facts.prove_le(&tm("n"), &tm("9")).unwrap();
        let wrapped = Proof::ForallRangeIntro {
            var: "n".into(),
            lo: tm("1"),
            hi: tm("9"),
            body: p.boxed(),
        };
        assert!(check(
            &wrapped,
            &fm("forall n in [1, 9] . n <= 9"),
            &LemmaStore::new()
        )
        .accepted);

        // with slack: n + 1 <= 10
        let p = facts.prove_le(&tm("n + 1"), &tm("10")).unwrap();
        let wrapped = Proof::ForallRangeIntro {
            var: "n".into(),
            lo: tm("1"),
            hi: tm("9"),
            body: p.boxed(),
        };
        assert!(check(
            &wrapped,
            &fm("forall n in [1, 9] . n + 1 <= 10"),
            &LemmaStore::new()
        )
        .accepted);
    }

    #[test]
    fn pure_slack() {
        let facts = Facts::new().with_nat_var("x");
        let p = facts.prove_le(&tm("x"), &tm("x + 3")).unwrap();
        assert!(check_under_nat_hyp("x", None, p, "x <= x + 3"));
    }

    #[test]
    fn monomial_nonnegativity() {
        let facts = Facts::new().with_nat_var("m").with_nat_var("p");
        let p = facts.prove_le(&tm("0"), &tm("m * p")).unwrap();
        let wrapped = Proof::ForallIntro {
            var: "m".into(),
            body: Proof::ForallIntro {
                var: "p".into(),
                body: p.boxed(),
            }
            .boxed(),
        };
        let report = check(
            &wrapped,
            &fm("forall m . forall p . 0 <= m * p"),
            &LemmaStore::new(),
        );
        assert!(report.accepted, "{:?}", report.failure);

        let facts = Facts::new().with_nat_var("x");
        let p = facts.prove_le(&tm("0"), &tm("3600 * x^2")).unwrap();
        assert!(check_under_nat_hyp("x", None, p, "0 <= 3600 * x^2"));
    }

    #[test]
    fn reshape_bridges_ring_equal_shapes() {
        let p = Proof::ComputeLeaf(fm("4 <= 6"));
        let q = reshape_cmp(p, &fm("4 <= 6"), &fm("2 + 2 <= 2 * 3")).unwrap();
        assert!(check(&q, &fm("2 + 2 <= 2 * 3"), &LemmaStore::new()).accepted);

        let p = Proof::ComputeLeaf(fm("4 <= 6"));
        assert!(reshape_cmp(p, &fm("4 <= 6"), &fm("4 <= 7")).is_err());
    }
}
