//! Proof objects and the trusted checker.
//!
//! The checker synthesizes the conclusion of a proof tree bottom-up and
//! compares it structurally with the stated goal. Hypotheses are
//! labeled; introducing `forall x` (over the naturals) or
//! `forall x in [lo, hi]` makes the bound fact available under the
//! variable's own name (`0 <= x`, respectively `lo <= x /\ x <= hi`).
//! Quantified variables are generic: introducing a variable that is
//! already in scope, or that occurs free in an open hypothesis, is
//! rejected outright.
//!
//! Rejection is a report, not an error: [`check`] always returns a
//! [`CheckReport`] whose `failure` carries the path to the offending
//! node. Step counts are deterministic: one per proof node, one per
//! rewrite match, one per enumeration case.

mod normalize;
mod rewrite;
pub mod sexpr;

pub use normalize::{normalize_ring, poly_of, ring_equal, term_of, Atom, AtomKey, NormalizeError, Poly};
pub use rewrite::{
    apply_rewrite, apply_rule, instantiate_equation, replace_at, subterm_at, validate_step,
    Direction, RewriteError, RewriteRule, RewriteStep,
};

use num_traits::Signed;
use serde::Serialize;
use std::sync::OnceLock;

use crate::lang::{eval_formula, eval_term, parse_formula, Env, Formula, Term};
use crate::Int;

/// Natural-deduction proof trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proof {
    /// A closed formula whose quantifiers are all range-bounded,
    /// checked by exhaustive evaluation.
    ComputeLeaf(Formula),
    /// An instance of a registered axiom schema; the instantiation must
    /// bind every schema variable.
    AxiomRef {
        name: String,
        inst: Vec<(String, Term)>,
    },
    /// Concludes `forall v . C` from a body concluding `C` with `v`
    /// generic; the body may use the hypothesis `0 <= v` under label `v`.
    ForallIntro { var: String, body: Box<Proof> },
    /// Concludes `forall v in [lo, hi] . C`; the body may use
    /// `lo <= v /\ v <= hi` under label `v`.
    ForallRangeIntro {
        var: String,
        lo: Term,
        hi: Term,
        body: Box<Proof>,
    },
    /// Specializes a universal statement to a witness. A closed witness
    /// is checked by evaluation; an open witness needs explicit bound
    /// proofs (`0 <= w` for the unbounded quantifier, `lo <= w` and
    /// `w <= hi` for a range).
    ForallElim {
        universal: Box<Proof>,
        witness: Term,
        bounds: Vec<Proof>,
    },
    /// One case per value of `[lo, hi]`, each concluding the body
    /// instance; cases may be stored or regenerated as compute leaves.
    RangeEnum {
        var: String,
        lo: i64,
        hi: i64,
        body: Formula,
        cases: CaseSource,
    },
    /// Concludes `forall v . P` from `P[0]` and
    /// `forall v . (P => P[v+1])`.
    Induction {
        var: String,
        base: Box<Proof>,
        step: Box<Proof>,
    },
    ImpIntro {
        label: String,
        hyp: Formula,
        body: Box<Proof>,
    },
    ImpElim { f: Box<Proof>, arg: Box<Proof> },
    HypRef(String),
    AndIntro(Box<Proof>, Box<Proof>),
    AndElimL(Box<Proof>),
    AndElimR(Box<Proof>),
    /// From `A \/ B`, `A => C`, and `B => C`, conclude `C`.
    CaseSplit {
        disj: Box<Proof>,
        left: Box<Proof>,
        right: Box<Proof>,
    },
    /// Establishes `l = r` by a chain of rewrite steps from `l` to `r`.
    RewriteChain {
        goal: Formula,
        steps: Vec<RewriteStep>,
    },
    /// Rewrites a proved statement by a proved equality at a position.
    EqSubst {
        equality: Box<Proof>,
        target: Box<Proof>,
        position: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseSource {
    Explicit(Vec<Proof>),
    /// Each case is the compute leaf of the instantiated body.
    Compute,
}

impl Proof {
    pub fn boxed(self) -> Box<Proof> {
        Box::new(self)
    }

    /// Byte length of the canonical s-expression print.
    pub fn size_bytes(&self) -> usize {
        sexpr::print_proof(self).len()
    }
}

/// The registered range-enumeration generator: one compute leaf per
/// value. `body` must be quantifier-range-only and closed except for
/// `var`.
pub fn expand_range_enum(
    var: &str,
    lo: i64,
    hi: i64,
    body: &Formula,
) -> Result<Vec<Proof>, String> {
    if hi < lo {
        return Err(format!("empty range [{lo}, {hi}]"));
    }
    let mut cases = Vec::with_capacity((hi - lo + 1) as usize);
    for v in lo..=hi {
        let inst = body
            .subst(var, &Term::int(v))
            .map_err(|e| e.to_string())?;
        cases.push(Proof::ComputeLeaf(inst));
    }
    Ok(cases)
}

// ---------------------------------------------------------------------
// Axiom registry
// ---------------------------------------------------------------------

/// A named schema; instantiating every variable yields the axiom
/// instance.
pub struct AxiomSchema {
    pub name: &'static str,
    pub vars: &'static [&'static str],
    pub formula: Formula,
}

/// The fixed, closed axiom list: monotonicity of addition,
/// multiplication and powers, transitivity, the successor bridge
/// between strict and non-strict order on the naturals, trichotomy at a
/// threshold, equality laws, and the bridge from strict order to
/// disequality.
pub fn axioms() -> &'static [AxiomSchema] {
    static AXIOMS: OnceLock<Vec<AxiomSchema>> = OnceLock::new();
    AXIOMS.get_or_init(|| {
        let schema = |name, vars, text: &str| AxiomSchema {
            name,
            vars,
            formula: parse_formula(text).expect("axiom schemas parse"),
        };
        vec![
            schema("eq-refl", &["x"], "x = x"),
            schema("eq-sym", &["x", "y"], "x = y => y = x"),
            schema("eq-trans", &["x", "y", "z"], "x = y => (y = z => x = z)"),
            schema("le-trans", &["x", "y", "z"], "x <= y => (y <= z => x <= z)"),
            schema("lt-le-trans", &["x", "y", "z"], "x < y => (y <= z => x < z)"),
            schema("le-lt-trans", &["x", "y", "z"], "x <= y => (y < z => x < z)"),
            schema("add-mono-le", &["x", "y", "z"], "x <= y => x + z <= y + z"),
            schema(
                "mul-mono-le",
                &["x", "y", "z"],
                "0 <= z => (x <= y => x * z <= y * z)",
            ),
            schema(
                "pow-mono-le",
                &["x", "y", "n"],
                "0 <= x => (0 <= n => (x <= y => x^n <= y^n))",
            ),
            schema(
                "succ-gt",
                &["x", "t"],
                "0 <= x => (0 <= t => ((t < x => t + 1 <= x) /\\ (t + 1 <= x => t < x)))",
            ),
            schema("trichotomy", &["t"], "forall x . x <= t \\/ t < x"),
            schema("lt-neq", &["x", "y"], "x < y => x != y"),
            schema("neq-sym", &["x", "y"], "x != y => y != x"),
        ]
    })
}

pub fn axiom(name: &str) -> Option<&'static AxiomSchema> {
    axioms().iter().find(|a| a.name == name)
}

// ---------------------------------------------------------------------
// Lemma store
// ---------------------------------------------------------------------

/// A named, checked statement with its proof.
#[derive(Debug, Clone)]
pub struct LemmaEntry {
    pub name: String,
    pub statement: Formula,
    pub proof: Proof,
    pub tags: Vec<String>,
}

/// Lemmas admitted for `LemmaRewrite` references. Entries are only
/// inserted after their proof checks against the entries already
/// present, so the store never holds an unverified statement.
#[derive(Debug, Clone, Default)]
pub struct LemmaStore {
    entries: Vec<LemmaEntry>,
}

impl LemmaStore {
    pub fn new() -> LemmaStore {
        LemmaStore::default()
    }

    pub fn get(&self, name: &str) -> Option<&LemmaEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn entries(&self) -> &[LemmaEntry] {
        &self.entries
    }

    /// Check the entry's proof against its statement and admit it.
    pub fn insert_checked(&mut self, entry: LemmaEntry) -> Result<u64, CheckFailure> {
        if self.get(&entry.name).is_some() {
            return Err(CheckFailure {
                path: Vec::new(),
                message: format!("duplicate lemma {}", entry.name),
            });
        }
        let report = check(&entry.proof, &entry.statement, self);
        if let Some(failure) = report.failure {
            return Err(failure);
        }
        self.entries.push(entry);
        Ok(report.steps)
    }
}

// ---------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckFailure {
    /// Child-index path from the root to the rejected node.
    pub path: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub accepted: bool,
    /// Total proof nodes visited, plus one per rewrite match and one
    /// per enumeration case.
    pub steps: u64,
    pub failure: Option<CheckFailure>,
}

/// Stack reserved for a checking run. The checker recurses on the
/// proof tree; the reservation is virtual, only the pages actually
/// touched cost anything.
const CHECKER_STACK: usize = 256 * 1024 * 1024;

/// Run the recursive checker on its own stack, independent of the
/// caller's thread configuration.
fn on_checker_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(CHECKER_STACK)
            .spawn_scoped(scope, f)
            .expect("spawn checker thread")
            .join()
            .expect("checker thread panicked")
    })
}

/// Check `proof` against `goal`. Rejection is reported, not raised.
pub fn check(proof: &Proof, goal: &Formula, lemmas: &LemmaStore) -> CheckReport {
    on_checker_stack(|| {
        let mut checker = Checker {
            steps: 0,
            lemmas,
        };
        let mut ctx = Ctx::default();
        match checker.infer(proof, &mut ctx, &mut Vec::new()) {
            Ok(conclusion) if &conclusion == goal => CheckReport {
                accepted: true,
                steps: checker.steps,
                failure: None,
            },
            Ok(conclusion) => CheckReport {
                accepted: false,
                steps: checker.steps,
                failure: Some(CheckFailure {
                    path: Vec::new(),
                    message: format!("proof concludes {conclusion}, not the goal {goal}"),
                }),
            },
            Err(failure) => CheckReport {
                accepted: false,
                steps: checker.steps,
                failure: Some(failure),
            },
        }
    })
}

/// Synthesize the conclusion of a closed proof without a stated goal.
pub fn infer_conclusion(proof: &Proof, lemmas: &LemmaStore) -> Result<Formula, CheckFailure> {
    on_checker_stack(|| {
        let mut checker = Checker {
            steps: 0,
            lemmas,
        };
        checker.infer(proof, &mut Ctx::default(), &mut Vec::new())
    })
}

#[derive(Default)]
struct Ctx {
    /// Open hypotheses, innermost last; binder hypotheses use the
    /// variable name as label.
    hyps: Vec<(String, Formula)>,
    generics: Vec<String>,
}

struct Checker<'a> {
    steps: u64,
    lemmas: &'a LemmaStore,
}

impl<'a> Checker<'a> {
    fn fail(&self, path: &[usize], message: impl Into<String>) -> CheckFailure {
        CheckFailure {
            path: path.to_vec(),
            message: message.into(),
        }
    }

    fn check_hyp_wellformed(
        &self,
        hyp: &Formula,
        ctx: &Ctx,
        path: &[usize],
    ) -> Result<(), CheckFailure> {
        for v in hyp.free_vars() {
            if !ctx.generics.contains(&v) {
                return Err(self.fail(path, format!("hypothesis mentions unbound variable {v}")));
            }
        }
        Ok(())
    }

    fn fresh_binder(
        &self,
        var: &str,
        ctx: &Ctx,
        path: &[usize],
    ) -> Result<(), CheckFailure> {
        if ctx.generics.iter().any(|g| g == var) {
            return Err(self.fail(path, format!("variable {var} shadows a generic in scope")));
        }
        if ctx.hyps.iter().any(|(l, _)| l == var) {
            return Err(self.fail(path, format!("variable {var} collides with hypothesis label")));
        }
        for (label, hyp) in &ctx.hyps {
            if hyp.free_vars().contains(var) {
                return Err(self.fail(
                    path,
                    format!("variable {var} occurs free in open hypothesis {label}"),
                ));
            }
        }
        Ok(())
    }

    fn infer(
        &mut self,
        proof: &Proof,
        ctx: &mut Ctx,
        path: &mut Vec<usize>,
    ) -> Result<Formula, CheckFailure> {
        self.steps += 1;
        match proof {
            Proof::ComputeLeaf(goal) => {
                if !goal.is_closed() {
                    return Err(self.fail(path, "compute leaf must be closed"));
                }
                if !goal.is_range_only() {
                    return Err(self.fail(path, "compute leaf contains an unbounded quantifier"));
                }
                match eval_formula(goal, &Env::new()) {
                    Ok(true) => Ok(goal.clone()),
                    Ok(false) => Err(self.fail(path, format!("{goal} evaluates to false"))),
                    Err(e) => Err(self.fail(path, format!("cannot evaluate {goal}: {e}"))),
                }
            }
            Proof::AxiomRef { name, inst } => {
                let Some(schema) = axiom(name) else {
                    return Err(self.fail(path, format!("unknown axiom {name}")));
                };
                if inst.len() != schema.vars.len()
                    || !schema.vars.iter().all(|v| inst.iter().any(|(n, _)| n == v))
                {
                    return Err(self.fail(
                        path,
                        format!("axiom {name} expects bindings for {:?}", schema.vars),
                    ));
                }
                for (v, t) in inst {
                    for fv in t.free_vars() {
                        if !ctx.generics.contains(&fv) {
                            return Err(self.fail(
                                path,
                                format!("axiom binding {v} mentions unbound variable {fv}"),
                            ));
                        }
                    }
                }
                schema
                    .formula
                    .multi_subst(inst)
                    .map_err(|e| self.fail(path, format!("axiom instantiation: {e}")))
            }
            Proof::ForallIntro { var, body } => {
                self.fresh_binder(var, ctx, path)?;
                ctx.generics.push(var.clone());
                ctx.hyps
                    .push((var.clone(), Formula::Le(Term::int(0), Term::var(var))));
                path.push(0);
                let conclusion = self.infer(body, ctx, path);
                path.pop();
                ctx.hyps.pop();
                ctx.generics.pop();
                Ok(Formula::forall_nat(var, conclusion?))
            }
            Proof::ForallRangeIntro { var, lo, hi, body } => {
                self.fresh_binder(var, ctx, path)?;
                for t in [lo, hi] {
                    for fv in t.free_vars() {
                        if fv == *var {
                            return Err(
                                self.fail(path, format!("range bound mentions the index {var}"))
                            );
                        }
                        if !ctx.generics.contains(&fv) {
                            return Err(self.fail(
                                path,
                                format!("range bound mentions unbound variable {fv}"),
                            ));
                        }
                    }
                }
                let hyp = Formula::and(
                    Formula::Le(lo.clone(), Term::var(var)),
                    Formula::Le(Term::var(var), hi.clone()),
                );
                ctx.generics.push(var.clone());
                ctx.hyps.push((var.clone(), hyp));
                path.push(0);
                let conclusion = self.infer(body, ctx, path);
                path.pop();
                ctx.hyps.pop();
                ctx.generics.pop();
                Ok(Formula::forall_range(
                    var,
                    lo.clone(),
                    hi.clone(),
                    conclusion?,
                ))
            }
            Proof::ForallElim {
                universal,
                witness,
                bounds,
            } => {
                path.push(0);
                let concl = self.infer(universal, ctx, path);
                path.pop();
                let concl = concl?;
                for fv in witness.free_vars() {
                    if !ctx.generics.contains(&fv) {
                        return Err(
                            self.fail(path, format!("witness mentions unbound variable {fv}"))
                        );
                    }
                }
                match concl {
                    Formula::ForallNat(x, body) => {
                        match bounds.as_slice() {
                            [] => {
                                let value = self.eval_closed(witness, path, "witness")?;
                                if value.is_negative() {
                                    return Err(self.fail(
                                        path,
                                        format!("witness {witness} is negative"),
                                    ));
                                }
                            }
                            [p] => {
                                let want = Formula::Le(Term::int(0), witness.clone());
                                self.expect_subproof(p, &want, ctx, path, 1)?;
                            }
                            _ => {
                                return Err(self.fail(
                                    path,
                                    "unbounded elimination takes at most one bound proof",
                                ))
                            }
                        }
                        body.subst(&x, witness)
                            .map_err(|e| self.fail(path, format!("specialization: {e}")))
                    }
                    Formula::ForallRange(x, lo, hi, body) => {
                        match bounds.as_slice() {
                            [] => {
                                let w = self.eval_closed(witness, path, "witness")?;
                                let lo_v = self.eval_closed(&lo, path, "lower bound")?;
                                let hi_v = self.eval_closed(&hi, path, "upper bound")?;
                                if w < lo_v || w > hi_v {
                                    return Err(self.fail(
                                        path,
                                        format!("witness {witness} outside [{lo}, {hi}]"),
                                    ));
                                }
                            }
                            [plo, phi] => {
                                let want_lo = Formula::Le(lo.clone(), witness.clone());
                                self.expect_subproof(plo, &want_lo, ctx, path, 1)?;
                                let want_hi = Formula::Le(witness.clone(), hi.clone());
                                self.expect_subproof(phi, &want_hi, ctx, path, 2)?;
                            }
                            _ => {
                                return Err(self.fail(
                                    path,
                                    "range elimination takes no or exactly two bound proofs",
                                ))
                            }
                        }
                        body.subst(&x, witness)
                            .map_err(|e| self.fail(path, format!("specialization: {e}")))
                    }
                    other => Err(self.fail(
                        path,
                        format!("cannot eliminate a non-universal statement {other}"),
                    )),
                }
            }
            Proof::RangeEnum {
                var,
                lo,
                hi,
                body,
                cases,
            } => {
                if hi < lo {
                    return Err(self.fail(path, format!("empty enumeration range [{lo}, {hi}]")));
                }
                for fv in body.free_vars() {
                    if fv != *var && !ctx.generics.contains(&fv) {
                        return Err(self.fail(
                            path,
                            format!("enumeration body mentions unbound variable {fv}"),
                        ));
                    }
                }
                let count = (hi - lo + 1) as usize;
                match cases {
                    CaseSource::Explicit(list) => {
                        if list.len() != count {
                            return Err(self.fail(
                                path,
                                format!("expected {count} cases, found {}", list.len()),
                            ));
                        }
                        for (i, case) in list.iter().enumerate() {
                            self.steps += 1;
                            let want = body
                                .subst(var, &Term::int(lo + i as i64))
                                .map_err(|e| self.fail(path, format!("case instance: {e}")))?;
                            path.push(i);
                            let got = self.infer(case, ctx, path);
                            path.pop();
                            let got = got?;
                            if got != want {
                                path.push(i);
                                let fail = self.fail(
                                    path,
                                    format!("case {i} concludes {got}, expected {want}"),
                                );
                                path.pop();
                                return Err(fail);
                            }
                        }
                    }
                    CaseSource::Compute => {
                        for (i, v) in (*lo..=*hi).enumerate() {
                            // one for the case, one for its leaf
                            self.steps += 2;
                            let inst = body
                                .subst(var, &Term::int(v))
                                .map_err(|e| self.fail(path, format!("case instance: {e}")))?;
                            if !inst.is_closed() || !inst.is_range_only() {
                                return Err(self.fail(
                                    path,
                                    "generated cases must be closed and range-only",
                                ));
                            }
                            match eval_formula(&inst, &Env::new()) {
                                Ok(true) => {}
                                Ok(false) => {
                                    path.push(i);
                                    let fail = self
                                        .fail(path, format!("case {inst} evaluates to false"));
                                    path.pop();
                                    return Err(fail);
                                }
                                Err(e) => {
                                    path.push(i);
                                    let fail =
                                        self.fail(path, format!("cannot evaluate {inst}: {e}"));
                                    path.pop();
                                    return Err(fail);
                                }
                            }
                        }
                    }
                }
                Ok(Formula::forall_range(
                    var,
                    Term::int(*lo),
                    Term::int(*hi),
                    body.clone(),
                ))
            }
            Proof::Induction { var, base, step } => {
                path.push(1);
                let step_concl = self.infer(step, ctx, path);
                path.pop();
                let step_concl = step_concl?;
                let Formula::ForallNat(v, imp) = &step_concl else {
                    return Err(self.fail(
                        path,
                        format!("induction step concludes {step_concl}, not a universal"),
                    ));
                };
                if v != var {
                    return Err(self.fail(
                        path,
                        format!("induction step quantifies {v}, expected {var}"),
                    ));
                }
                let Formula::Implies(p, q) = &**imp else {
                    return Err(self.fail(path, "induction step body must be an implication"));
                };
                let succ = p
                    .subst(var, &(Term::var(var) + Term::int(1)))
                    .map_err(|e| self.fail(path, format!("successor instance: {e}")))?;
                if **q != succ {
                    return Err(self.fail(
                        path,
                        format!("induction step conclusion {q} is not {succ}"),
                    ));
                }
                let zero = p
                    .subst(var, &Term::int(0))
                    .map_err(|e| self.fail(path, format!("base instance: {e}")))?;
                path.push(0);
                let base_concl = self.infer(base, ctx, path);
                path.pop();
                let base_concl = base_concl?;
                if base_concl != zero {
                    return Err(self.fail(
                        path,
                        format!("induction base concludes {base_concl}, expected {zero}"),
                    ));
                }
                Ok(Formula::forall_nat(var, (**p).clone()))
            }
            Proof::ImpIntro { label, hyp, body } => {
                if ctx.hyps.iter().any(|(l, _)| l == label) {
                    return Err(self.fail(path, format!("hypothesis label {label} already open")));
                }
                if ctx.generics.iter().any(|g| g == label) {
                    return Err(
                        self.fail(path, format!("label {label} collides with a generic"))
                    );
                }
                self.check_hyp_wellformed(hyp, ctx, path)?;
                ctx.hyps.push((label.clone(), hyp.clone()));
                path.push(0);
                let conclusion = self.infer(body, ctx, path);
                path.pop();
                ctx.hyps.pop();
                Ok(Formula::implies(hyp.clone(), conclusion?))
            }
            Proof::ImpElim { f, arg } => {
                path.push(0);
                let f_concl = self.infer(f, ctx, path);
                path.pop();
                let f_concl = f_concl?;
                let Formula::Implies(premise, conclusion) = f_concl else {
                    return Err(self.fail(path, "left side of elimination is not an implication"));
                };
                path.push(1);
                let arg_concl = self.infer(arg, ctx, path);
                path.pop();
                let arg_concl = arg_concl?;
                if arg_concl != *premise {
                    return Err(self.fail(
                        path,
                        format!("argument concludes {arg_concl}, expected {premise}"),
                    ));
                }
                Ok(*conclusion)
            }
            Proof::HypRef(label) => ctx
                .hyps
                .iter()
                .rev()
                .find(|(l, _)| l == label)
                .map(|(_, f)| f.clone())
                .ok_or_else(|| self.fail(path, format!("unknown hypothesis {label}"))),
            Proof::AndIntro(l, r) => {
                path.push(0);
                let lc = self.infer(l, ctx, path);
                path.pop();
                path.push(1);
                let rc = self.infer(r, ctx, path);
                path.pop();
                Ok(Formula::and(lc?, rc?))
            }
            Proof::AndElimL(p) | Proof::AndElimR(p) => {
                path.push(0);
                let c = self.infer(p, ctx, path);
                path.pop();
                let Formula::And(a, b) = c? else {
                    return Err(self.fail(path, "projection from a non-conjunction"));
                };
                Ok(match proof {
                    Proof::AndElimL(_) => *a,
                    _ => *b,
                })
            }
            Proof::CaseSplit { disj, left, right } => {
                path.push(0);
                let d = self.infer(disj, ctx, path);
                path.pop();
                let Formula::Or(a, b) = d? else {
                    return Err(self.fail(path, "case split on a non-disjunction"));
                };
                path.push(1);
                let lc = self.infer(left, ctx, path);
                path.pop();
                let Formula::Implies(la, lc_body) = lc? else {
                    return Err(self.fail(path, "left case must be an implication"));
                };
                if la != a {
                    return Err(self.fail(path, format!("left case assumes {la}, expected {a}")));
                }
                path.push(2);
                let rc = self.infer(right, ctx, path);
                path.pop();
                let Formula::Implies(ra, rc_body) = rc? else {
                    return Err(self.fail(path, "right case must be an implication"));
                };
                if ra != b {
                    return Err(self.fail(path, format!("right case assumes {ra}, expected {b}")));
                }
                if lc_body != rc_body {
                    return Err(self.fail(
                        path,
                        format!("cases conclude {lc_body} and {rc_body}"),
                    ));
                }
                Ok(*lc_body)
            }
            Proof::RewriteChain { goal, steps } => {
                let Formula::Eq(l, r) = goal else {
                    return Err(self.fail(path, "rewrite chain goal must be an equation"));
                };
                for fv in goal.free_vars() {
                    if !ctx.generics.contains(&fv) {
                        return Err(
                            self.fail(path, format!("chain goal mentions unbound variable {fv}"))
                        );
                    }
                }
                let mut current = l;
                for (i, step) in steps.iter().enumerate() {
                    self.steps += 1;
                    if &step.before != current {
                        path.push(i);
                        let fail = self.fail(
                            path,
                            format!(
                                "step {i} starts from {}, chain is at {current}",
                                step.before
                            ),
                        );
                        path.pop();
                        return Err(fail);
                    }
                    let conds = match validate_step(step, self.lemmas) {
                        Ok(conds) => conds,
                        Err(e) => {
                            path.push(i);
                            let fail =
                                self.fail(path, format!("step {i} ({}): {e}", step.rule.name()));
                            path.pop();
                            return Err(fail);
                        }
                    };
                    self.discharge_conditions(&conds, &step.side_proofs, ctx, path, i)?;
                    current = &step.after;
                }
                if current != r {
                    return Err(self.fail(
                        path,
                        format!("chain ends at {current}, goal right side is {r}"),
                    ));
                }
                Ok(goal.clone())
            }
            Proof::EqSubst {
                equality,
                target,
                position,
            } => {
                path.push(0);
                let eq_concl = self.infer(equality, ctx, path);
                path.pop();
                let Formula::Eq(a, b) = eq_concl? else {
                    return Err(self.fail(path, "equality proof does not conclude an equation"));
                };
                path.push(1);
                let target_concl = self.infer(target, ctx, path);
                path.pop();
                let target_concl = target_concl?;
                let (found, binders) = formula_term_at(&target_concl, position)
                    .ok_or_else(|| self.fail(path, format!("bad position {position:?}")))?;
                if found != &a {
                    return Err(self.fail(
                        path,
                        format!("subterm at {position:?} is {found}, equality rewrites {a}"),
                    ));
                }
                let mut moved = a.free_vars();
                moved.extend(b.free_vars());
                moved.retain(|v| binders.contains(v));
                if !moved.is_empty() {
                    return Err(self.fail(
                        path,
                        format!("rewrite crosses binders {moved:?} capturing the equality"),
                    ));
                }
                formula_replace_term_at(&target_concl, position, &b)
                    .ok_or_else(|| self.fail(path, format!("bad position {position:?}")))
            }
        }
    }

    fn eval_closed(
        &self,
        t: &Term,
        path: &[usize],
        what: &str,
    ) -> Result<Int, CheckFailure> {
        if !t.is_closed() {
            return Err(self.fail(path, format!("{what} {t} is not closed")));
        }
        eval_term(t, &Env::new()).map_err(|e| self.fail(path, format!("{what} {t}: {e}")))
    }

    fn expect_subproof(
        &mut self,
        proof: &Proof,
        want: &Formula,
        ctx: &mut Ctx,
        path: &mut Vec<usize>,
        index: usize,
    ) -> Result<(), CheckFailure> {
        path.push(index);
        let got = self.infer(proof, ctx, path);
        path.pop();
        let got = got?;
        if &got != want {
            return Err(self.fail(path, format!("sub-proof concludes {got}, expected {want}")));
        }
        Ok(())
    }

    fn discharge_conditions(
        &mut self,
        conds: &[Formula],
        side_proofs: &[Proof],
        ctx: &mut Ctx,
        path: &mut Vec<usize>,
        step_index: usize,
    ) -> Result<(), CheckFailure> {
        if conds.is_empty() {
            if !side_proofs.is_empty() {
                return Err(self.fail(path, format!("step {step_index} needs no side proofs")));
            }
            return Ok(());
        }
        if side_proofs.is_empty() {
            for cond in conds {
                if !cond.is_closed() || !cond.is_range_only() {
                    return Err(self.fail(
                        path,
                        format!("side condition {cond} of step {step_index} needs a proof"),
                    ));
                }
                match eval_formula(cond, &Env::new()) {
                    Ok(true) => {}
                    Ok(false) => {
                        return Err(self.fail(
                            path,
                            format!("side condition {cond} of step {step_index} is false"),
                        ))
                    }
                    Err(e) => {
                        return Err(self.fail(
                            path,
                            format!("side condition {cond} of step {step_index}: {e}"),
                        ))
                    }
                }
            }
            return Ok(());
        }
        if side_proofs.len() != conds.len() {
            return Err(self.fail(
                path,
                format!(
                    "step {step_index} has {} side conditions but {} proofs",
                    conds.len(),
                    side_proofs.len()
                ),
            ));
        }
        for (j, (cond, proof)) in conds.iter().zip(side_proofs).enumerate() {
            path.push(step_index);
            let r = self.expect_subproof(proof, cond, ctx, path, j);
            path.pop();
            r?;
        }
        Ok(())
    }
}

/// Navigate a formula path to a term, collecting crossed binders.
/// Formula children: comparison sides are terms 0/1; connectives index
/// their operands; range quantifiers index lo 0, hi 1, body 2; the
/// unbounded quantifiers index their body as 0.
pub fn formula_term_at<'f>(f: &'f Formula, path: &[usize]) -> Option<(&'f Term, Vec<String>)> {
    let mut binders = Vec::new();
    let mut cur = f;
    let mut i = 0;
    while i < path.len() {
        let step = path[i];
        i += 1;
        match (cur, step) {
            (Formula::Eq(l, _), 0)
            | (Formula::Neq(l, _), 0)
            | (Formula::Le(l, _), 0)
            | (Formula::Lt(l, _), 0) => {
                return term_descent(l, &path[i..], binders);
            }
            (Formula::Eq(_, r), 1)
            | (Formula::Neq(_, r), 1)
            | (Formula::Le(_, r), 1)
            | (Formula::Lt(_, r), 1) => {
                return term_descent(r, &path[i..], binders);
            }
            (Formula::And(l, _), 0) | (Formula::Or(l, _), 0) | (Formula::Implies(l, _), 0) => {
                cur = l;
            }
            (Formula::And(_, r), 1) | (Formula::Or(_, r), 1) | (Formula::Implies(_, r), 1) => {
                cur = r;
            }
            (Formula::Not(g), 0) => cur = g,
            (Formula::ForallNat(v, g), 0) | (Formula::ExistsNat(v, g), 0) => {
                binders.push(v.clone());
                cur = g;
            }
            (Formula::ForallRange(_, lo, _, _), 0) | (Formula::ExistsRange(_, lo, _, _), 0) => {
                return term_descent(lo, &path[i..], binders);
            }
            (Formula::ForallRange(_, _, hi, _), 1) | (Formula::ExistsRange(_, _, hi, _), 1) => {
                return term_descent(hi, &path[i..], binders);
            }
            (Formula::ForallRange(v, _, _, g), 2) | (Formula::ExistsRange(v, _, _, g), 2) => {
                binders.push(v.clone());
                cur = g;
            }
            _ => return None,
        }
    }
    None
}

fn term_descent<'t>(
    t: &'t Term,
    path: &[usize],
    mut binders: Vec<String>,
) -> Option<(&'t Term, Vec<String>)> {
    let mut cur = t;
    for (pos, &step) in path.iter().enumerate() {
        if let Term::Sum { index, .. } = cur {
            if step == 2 {
                binders.push(index.clone());
            }
        }
        cur = subterm_at(cur, &path[pos..=pos])?;
    }
    Some((cur, binders))
}

/// Rebuild a formula with the term at a formula path replaced.
pub fn formula_replace_term_at(f: &Formula, path: &[usize], new: &Term) -> Option<Formula> {
    let (&step, rest) = path.split_first()?;
    Some(match (f, step) {
        (Formula::Eq(l, r), 0) => Formula::Eq(replace_at(l, rest, new)?, r.clone()),
        (Formula::Eq(l, r), 1) => Formula::Eq(l.clone(), replace_at(r, rest, new)?),
        (Formula::Neq(l, r), 0) => Formula::Neq(replace_at(l, rest, new)?, r.clone()),
        (Formula::Neq(l, r), 1) => Formula::Neq(l.clone(), replace_at(r, rest, new)?),
        (Formula::Le(l, r), 0) => Formula::Le(replace_at(l, rest, new)?, r.clone()),
        (Formula::Le(l, r), 1) => Formula::Le(l.clone(), replace_at(r, rest, new)?),
        (Formula::Lt(l, r), 0) => Formula::Lt(replace_at(l, rest, new)?, r.clone()),
        (Formula::Lt(l, r), 1) => Formula::Lt(l.clone(), replace_at(r, rest, new)?),
        (Formula::And(l, r), 0) => {
            Formula::and(formula_replace_term_at(l, rest, new)?, (**r).clone())
        }
        (Formula::And(l, r), 1) => {
            Formula::and((**l).clone(), formula_replace_term_at(r, rest, new)?)
        }
        (Formula::Or(l, r), 0) => {
            Formula::or(formula_replace_term_at(l, rest, new)?, (**r).clone())
        }
        (Formula::Or(l, r), 1) => {
            Formula::or((**l).clone(), formula_replace_term_at(r, rest, new)?)
        }
        (Formula::Implies(l, r), 0) => {
            Formula::implies(formula_replace_term_at(l, rest, new)?, (**r).clone())
        }
        (Formula::Implies(l, r), 1) => {
            Formula::implies((**l).clone(), formula_replace_term_at(r, rest, new)?)
        }
        (Formula::Not(g), 0) => Formula::not(formula_replace_term_at(g, rest, new)?),
        (Formula::ForallNat(v, g), 0) => {
            Formula::ForallNat(v.clone(), Box::new(formula_replace_term_at(g, rest, new)?))
        }
        (Formula::ExistsNat(v, g), 0) => {
            Formula::ExistsNat(v.clone(), Box::new(formula_replace_term_at(g, rest, new)?))
        }
        (Formula::ForallRange(v, lo, hi, g), 0) => Formula::ForallRange(
            v.clone(),
            replace_at(lo, rest, new)?,
            hi.clone(),
            g.clone(),
        ),
        (Formula::ForallRange(v, lo, hi, g), 1) => Formula::ForallRange(
            v.clone(),
            lo.clone(),
            replace_at(hi, rest, new)?,
            g.clone(),
        ),
        (Formula::ForallRange(v, lo, hi, g), 2) => Formula::ForallRange(
            v.clone(),
            lo.clone(),
            hi.clone(),
            Box::new(formula_replace_term_at(g, rest, new)?),
        ),
        (Formula::ExistsRange(v, lo, hi, g), 0) => Formula::ExistsRange(
            v.clone(),
            replace_at(lo, rest, new)?,
            hi.clone(),
            g.clone(),
        ),
        (Formula::ExistsRange(v, lo, hi, g), 1) => Formula::ExistsRange(
            v.clone(),
            lo.clone(),
            replace_at(hi, rest, new)?,
            g.clone(),
        ),
        (Formula::ExistsRange(v, lo, hi, g), 2) => Formula::ExistsRange(
            v.clone(),
            lo.clone(),
            hi.clone(),
            Box::new(formula_replace_term_at(g, rest, new)?),
        ),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_term;

    fn fm(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn tm(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn store() -> LemmaStore {
        LemmaStore::new()
    }

    #[test]
    fn compute_leaf_accept_reject() {
        let good = Proof::ComputeLeaf(fm("42^2 = 1764"));
        assert!(check(&good, &fm("42^2 = 1764"), &store()).accepted);

        let bad = Proof::ComputeLeaf(fm("12345679*9 = 111111112"));
        let report = check(&bad, &fm("12345679*9 = 111111112"), &store());
        assert!(!report.accepted);
        assert!(report.failure.unwrap().message.contains("false"));

        let open = Proof::ComputeLeaf(fm("x = x"));
        assert!(!check(&open, &fm("x = x"), &store()).accepted);

        let unbounded = Proof::ComputeLeaf(fm("forall x . x = x"));
        assert!(!check(&unbounded, &fm("forall x . x = x"), &store()).accepted);

        let ranged = Proof::ComputeLeaf(fm("forall x in [0, 9] . x * 2 <= 18"));
        assert!(check(&ranged, &fm("forall x in [0, 9] . x * 2 <= 18"), &store()).accepted);
    }

    #[test]
    fn universal_cut_checks() {
        // forall-elim over forall-intro, specialized to a closed witness
        let body = Proof::RewriteChain {
            goal: fm("x + x = 2 * x"),
            steps: vec![RewriteStep {
                rule: RewriteRule::RingNormalize,
                direction: Direction::Forward,
                position: vec![],
                before: tm("x + x"),
                after: tm("2 * x"),
                side_proofs: vec![],
            }],
        };
        let universal = Proof::ForallIntro {
            var: "x".into(),
            body: body.boxed(),
        };
        assert!(check(&universal, &fm("forall x . x + x = 2 * x"), &store()).accepted);

        let cut = Proof::ForallElim {
            universal: universal.clone().boxed(),
            witness: tm("4"),
            bounds: vec![],
        };
        assert!(check(&cut, &fm("4 + 4 = 2 * 4"), &store()).accepted);

        // negative witnesses are rejected for quantifiers over naturals
        let bad = Proof::ForallElim {
            universal: universal.boxed(),
            witness: tm("0 - 1"),
            bounds: vec![],
        };
        assert!(!check(&bad, &fm("(0 - 1) + (0 - 1) = 2 * (0 - 1)"), &store()).accepted);
    }

    #[test]
    fn eigenvariable_discipline() {
        // introducing x twice is shadowing, rejected outright
        let inner = Proof::ForallIntro {
            var: "x".into(),
            body: Proof::ComputeLeaf(fm("1 = 1")).boxed(),
        };
        let outer = Proof::ForallIntro {
            var: "x".into(),
            body: inner.boxed(),
        };
        let report = check(&outer, &fm("forall x . forall x . 1 = 1"), &store());
        assert!(!report.accepted);
        assert!(report.failure.unwrap().message.contains("shadows"));

        // a hypothesis may not mention a variable introduced later
        let bad = Proof::ImpIntro {
            label: "h".into(),
            hyp: fm("x <= 5"),
            body: Proof::ForallIntro {
                var: "x".into(),
                body: Proof::HypRef("h".into()).boxed(),
            }
            .boxed(),
        };
        let report = check(&bad, &fm("x <= 5 => forall x . x <= 5"), &store());
        assert!(!report.accepted);
    }

    #[test]
    fn hypotheses_and_implication() {
        let p = Proof::ImpIntro {
            label: "h".into(),
            hyp: fm("1 <= 2"),
            body: Proof::HypRef("h".into()).boxed(),
        };
        assert!(check(&p, &fm("1 <= 2 => 1 <= 2"), &store()).accepted);

        let elim = Proof::ImpElim {
            f: p.boxed(),
            arg: Proof::ComputeLeaf(fm("1 <= 2")).boxed(),
        };
        assert!(check(&elim, &fm("1 <= 2"), &store()).accepted);

        assert!(!check(&Proof::HypRef("nope".into()), &fm("1 = 1"), &store()).accepted);
    }

    #[test]
    fn axiom_instantiation() {
        let inst = vec![
            ("x".to_string(), tm("2")),
            ("y".to_string(), tm("3")),
            ("z".to_string(), tm("5")),
        ];
        let p = Proof::AxiomRef {
            name: "le-trans".into(),
            inst,
        };
        assert!(check(&p, &fm("2 <= 3 => (3 <= 5 => 2 <= 5)"), &store()).accepted);

        // missing binding
        let p = Proof::AxiomRef {
            name: "le-trans".into(),
            inst: vec![("x".to_string(), tm("2"))],
        };
        assert!(infer_conclusion(&p, &store()).is_err());

        // unknown axiom
        let p = Proof::AxiomRef {
            name: "nonsense".into(),
            inst: vec![],
        };
        assert!(infer_conclusion(&p, &store()).is_err());
    }

    #[test]
    fn range_enum_and_expansion() {
        let cases = expand_range_enum("x", 0, 42, &fm("x^2 < 1800")).unwrap();
        assert_eq!(cases.len(), 43);
        let single = expand_range_enum("x", 5, 5, &fm("x = 5")).unwrap();
        assert_eq!(single.len(), 1);
        let big = expand_range_enum("x", 0, 3600, &fm("x^2 != 1800")).unwrap();
        assert_eq!(big.len(), 3601);
        assert!(expand_range_enum("x", 3, 2, &fm("x = x")).is_err());

        let enum_proof = Proof::RangeEnum {
            var: "x".into(),
            lo: 0,
            hi: 42,
            body: fm("x^2 < 1800"),
            cases: CaseSource::Compute,
        };
        let goal = fm("forall x in [0, 42] . x^2 < 1800");
        let report = check(&enum_proof, &goal, &store());
        assert!(report.accepted);

        let explicit = Proof::RangeEnum {
            var: "x".into(),
            lo: 0,
            hi: 42,
            body: fm("x^2 < 1800"),
            cases: CaseSource::Explicit(cases),
        };
        let report2 = check(&explicit, &goal, &store());
        assert!(report2.accepted);
        // generated cases cost the same as explicit compute leaves
        assert_eq!(report.steps, report2.steps);

        // a false case is caught
        let lying = Proof::RangeEnum {
            var: "x".into(),
            lo: 0,
            hi: 43,
            body: fm("x^2 < 1800"),
            cases: CaseSource::Compute,
        };
        assert!(!check(&lying, &fm("forall x in [0, 43] . x^2 < 1800"), &store()).accepted);
    }

    #[test]
    fn check_determinism() {
        let p = Proof::RangeEnum {
            var: "x".into(),
            lo: 0,
            hi: 20,
            body: fm("x * x <= 400"),
            cases: CaseSource::Compute,
        };
        let goal = fm("forall x in [0, 20] . x * x <= 400");
        let a = check(&p, &goal, &store());
        let b = check(&p, &goal, &store());
        assert_eq!(a, b);
        assert!(a.accepted);
    }

    #[test]
    fn distribute_example() {
        let s = tm("sum(i, 0, b - 2, (b - 2 - i) * b^i)");
        let before = (s.clone() + Term::int(1)) * tm("b - 1");
        let (after, conds) =
            apply_rule(&RewriteRule::Distribute, &before, &store()).unwrap();
        assert_eq!(after, s * tm("b - 1") + Term::int(1) * tm("b - 1"));
        assert!(conds.is_empty());
    }

    #[test]
    fn index_shift_example() {
        use crate::lang::{eval_term, Env};
        let before = tm("sum(i, 0, b - 2, (b - 2 - i) * b^(i + 1))");
        let displayed = tm("sum(i, 1, b - 1, (b - 1 - i) * b^i)");
        let (shifted, conds) =
            apply_rule(&RewriteRule::IndexShift(Term::int(1)), &before, &store()).unwrap();
        assert!(conds.is_empty());
        for b in 2..=12 {
            let env = Env::new().with("b", crate::Int::from(b));
            let a = eval_term(&before, &env).unwrap();
            let c = eval_term(&shifted, &env).unwrap();
            let d = eval_term(&displayed, &env).unwrap();
            assert_eq!(a, c);
            assert_eq!(a, d);
        }
        // the raw output differs from the displayed form only by ring
        // normalization of bounds and body
        assert!(ring_equal(
            &shifted,
            &displayed
        )
        .unwrap());
    }

    #[test]
    fn telescope_example() {
        use crate::lang::{eval_term, Env};
        // f(i) = i^2: sum of (i+1)^2 - i^2 from a to m telescopes
        let body = tm("(i + 1)^2 - i^2");
        let before = Term::sum("i", tm("a"), tm("m"), body);
        let (after, conds) = apply_rule(&RewriteRule::Telescope, &before, &store()).unwrap();
        assert_eq!(conds.len(), 1);
        for (a, m) in [(0i64, 5i64), (2, 2), (1, 7), (3, 2)] {
            if m + 1 < a {
                continue;
            }
            let env = Env::new()
                .with("a", crate::Int::from(a))
                .with("m", crate::Int::from(m));
            assert_eq!(
                eval_term(&before, &env).unwrap(),
                eval_term(&after, &env).unwrap(),
                "a={a} m={m}"
            );
        }

        // a body that is not a difference of consecutive values fails
        let bad = Term::sum("i", tm("0"), tm("m"), tm("(i + 2)^2 - i^2"));
        assert!(apply_rule(&RewriteRule::Telescope, &bad, &store()).is_err());
    }

    #[test]
    fn sum_empty_and_split() {
        let s = tm("sum(i, 0, 0 - 1, i)");
        let (after, conds) = apply_rule(&RewriteRule::SumEmpty, &s, &store()).unwrap();
        assert_eq!(after, Term::int(0));
        assert_eq!(conds, vec![fm("-1 < 0")]);

        let s = tm("sum(i, 1, 9, i * i)");
        let (after, conds) = apply_rule(&RewriteRule::SumSplitLast, &s, &store()).unwrap();
        assert_eq!(after, tm("sum(i, 1, 9 - 1, i * i) + 9 * 9"));
        assert_eq!(conds, vec![fm("1 <= 9")]);
    }

    #[test]
    fn rewrite_chain_checks() {
        // 10*n + 1 = 9*n + (n + 1), generically over n
        let chain = Proof::RewriteChain {
            goal: fm("10*n + 1 = 9*n + (n + 1)"),
            steps: vec![RewriteStep {
                rule: RewriteRule::RingNormalize,
                direction: Direction::Forward,
                position: vec![],
                before: tm("10*n + 1"),
                after: tm("9*n + (n + 1)"),
                side_proofs: vec![],
            }],
        };
        let p = Proof::ForallIntro {
            var: "n".into(),
            body: chain.boxed(),
        };
        assert!(check(&p, &fm("forall n . 10*n + 1 = 9*n + (n + 1)"), &store()).accepted);

        // a chain whose step does not reach the goal right side
        let broken = Proof::RewriteChain {
            goal: fm("2 + 2 = 5"),
            steps: vec![RewriteStep {
                rule: RewriteRule::RingNormalize,
                direction: Direction::Forward,
                position: vec![],
                before: tm("2 + 2"),
                after: tm("4"),
                side_proofs: vec![],
            }],
        };
        assert!(!check(&broken, &fm("2 + 2 = 5"), &store()).accepted);

        // ring steps may not change the value
        let lie = Proof::RewriteChain {
            goal: fm("2 + 2 = 5"),
            steps: vec![RewriteStep {
                rule: RewriteRule::RingNormalize,
                direction: Direction::Forward,
                position: vec![],
                before: tm("2 + 2"),
                after: tm("5"),
                side_proofs: vec![],
            }],
        };
        assert!(!check(&lie, &fm("2 + 2 = 5"), &store()).accepted);
    }

    #[test]
    fn eq_subst_rewrites_at_position() {
        // from 2 + 2 = 4 and refl of (2 + 2) * k, conclude the scaled form
        let eq = Proof::ComputeLeaf(fm("2 + 2 = 4"));
        let refl = Proof::AxiomRef {
            name: "eq-refl".into(),
            inst: vec![("x".to_string(), tm("(2 + 2) * 3"))],
        };
        let p = Proof::EqSubst {
            equality: eq.boxed(),
            target: refl.boxed(),
            position: vec![1, 0],
        };
        assert!(check(&p, &fm("(2 + 2) * 3 = 4 * 3"), &store()).accepted);
    }

    #[test]
    fn eq_subst_capture_rejected() {
        // rewriting i + 0 under the sum binder for i must be refused
        let eq = Proof::ImpIntro {
            label: "h".into(),
            hyp: fm("i + 0 = i"),
            body: Proof::HypRef("h".into()).boxed(),
        };
        // build: hypothesis i + 0 = i (open) is not even well-formed at
        // the top level, so check the navigation guard directly
        let target = fm("sum(i, 0, 9, i + 0) = 45");
        let (found, binders) = formula_term_at(&target, &[0, 2]).unwrap();
        assert_eq!(found, &tm("i + 0"));
        assert_eq!(binders, vec!["i".to_string()]);
        drop(eq);
    }

    #[test]
    fn induction_shape() {
        // forall n . 0 <= n by induction: base 0 <= 0, step n -> n + 1
        // (the step uses the hypothesis only to keep the shape honest)
        let base = Proof::ComputeLeaf(fm("0 <= 0"));
        let step_body = Proof::ImpIntro {
            label: "ih".into(),
            hyp: fm("0 <= n"),
            body: Proof::ImpElim {
                f: Proof::AxiomRef {
                    name: "add-mono-le".into(),
                    inst: vec![
                        ("x".to_string(), tm("0")),
                        ("y".to_string(), tm("n")),
                        ("z".to_string(), tm("1")),
                    ],
                }
                .boxed(),
                arg: Proof::HypRef("ih".into()).boxed(),
            }
            .boxed(),
        };
        // add-mono-le concludes 0 + 1 <= n + 1, which is not literally
        // 0 <= n + 1; bridge with eq-subst through 0 + 1 = 1 ... kept
        // simple here by proving a statement in the emitted shape.
        let step = Proof::ForallIntro {
            var: "n".into(),
            body: step_body.boxed(),
        };
        let got = infer_conclusion(&step, &store()).unwrap();
        assert_eq!(got, fm("forall n . 0 <= n => 0 + 1 <= n + 1"));
        drop(base);
    }

    #[test]
    fn proof_sexpr_round_trip() {
        let p = Proof::ForallElim {
            universal: Proof::ForallIntro {
                var: "n".into(),
                body: Proof::RewriteChain {
                    goal: fm("n + n = 2 * n"),
                    steps: vec![RewriteStep {
                        rule: RewriteRule::RingNormalize,
                        direction: Direction::Forward,
                        position: vec![],
                        before: tm("n + n"),
                        after: tm("2 * n"),
                        side_proofs: vec![Proof::ComputeLeaf(fm("1 = 1"))],
                    }],
                }
                .boxed(),
            }
            .boxed(),
            witness: tm("4"),
            bounds: vec![],
        };
        let text = sexpr::print_proof(&p);
        assert_eq!(sexpr::parse_proof(&text).unwrap(), p);
        let pretty = sexpr::print_proof_pretty(&p);
        assert_eq!(sexpr::parse_proof(pretty.trim()).unwrap(), p);
    }
}
