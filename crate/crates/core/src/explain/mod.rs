//! Explanation analysis: universal-cut detection, (program, input)
//! explanation objects with size and run-cost metrics, the
//! three-category proof classifier, and the existential/witness form.
//!
//! A universal cut is a proof fragment where the introduction of a
//! universal quantifier is immediately followed by its elimination.
//! The introduction body is an algorithm mapping each witness `u` to a
//! proof of the instance; the elimination records the input it was run
//! on. An explanation is exactly such a pair: a program from a fixed
//! combinator set plus an input whose run yields a kernel-accepted
//! proof of the target.
//!
//! Metrics are concrete: program and input sizes are the byte lengths
//! of their canonical prints, the run cost is the checker's step count
//! plus the production cost, and the threshold compares
//! `(program + input) / statement` against a configurable `alpha`. The
//! ordering of explanations is the Pareto order on (size, steps).

pub mod centroid;

use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{
    check, infer_conclusion, sexpr, CaseSource, CheckFailure, LemmaStore, Proof, RewriteStep,
};
use crate::lang::{eval_formula, eval_term, Env, Formula, SubstError, Term};
use crate::{Int, Ratio};

pub use centroid::{centroid_classify, LabeledDataset};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("run exceeded the step limit of {0}")]
    StepLimitExceeded(u64),
    #[error("produced proof concludes {produced}, not the target {target}")]
    ProofMismatch { produced: Formula, target: Formula },
    #[error("input does not satisfy the precondition {0}")]
    PreconditionFalse(Formula),
    #[error("exact tie between labels {0} and {1}")]
    Tie(String, String),
    #[error("explanations target different statements")]
    MixedTargets,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown witness map {0}")]
    UnknownWitnessFn(String),
    #[error("produced proof rejected: {0:?}")]
    Rejected(CheckFailure),
    #[error("program cannot run on this input: {0}")]
    BadInput(String),
    #[error("substitution failed: {0}")]
    Subst(#[from] SubstError),
}

// ---------------------------------------------------------------------
// Templates and cut detection
// ---------------------------------------------------------------------

/// A generic sub-proof with one designated parameter: the algorithm
/// mapping each witness to a proof of the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub param: String,
    /// Bounds when the parameter ranges over an interval.
    pub range: Option<(Term, Term)>,
    /// Conclusion of the body, with the parameter free.
    pub schema_statement: Formula,
    pub schema_proof: Proof,
}

impl Template {
    /// Re-wrap the body under its quantifier introduction.
    pub fn universal(&self) -> Proof {
        match &self.range {
            None => Proof::ForallIntro {
                var: self.param.clone(),
                body: self.schema_proof.clone().boxed(),
            },
            Some((lo, hi)) => Proof::ForallRangeIntro {
                var: self.param.clone(),
                lo: lo.clone(),
                hi: hi.clone(),
                body: self.schema_proof.clone().boxed(),
            },
        }
    }

    /// The statement the wrapped universal proves.
    pub fn universal_statement(&self) -> Formula {
        match &self.range {
            None => Formula::forall_nat(&self.param, self.schema_statement.clone()),
            Some((lo, hi)) => Formula::forall_range(
                &self.param,
                lo.clone(),
                hi.clone(),
                self.schema_statement.clone(),
            ),
        }
    }

    /// Check the wrapped universal; a valid template is generic in its
    /// parameter by construction.
    pub fn validate(&self, lemmas: &LemmaStore) -> bool {
        check(&self.universal(), &self.universal_statement(), lemmas).accepted
    }
}

/// A detected universal cut: the template, the input it was eliminated
/// at, and the proof-tree path of the elimination node.
#[derive(Debug, Clone)]
pub struct Cut {
    pub template: Template,
    pub input: Term,
    pub path: Vec<usize>,
}

/// Find every introduction-followed-by-elimination of a universal
/// quantifier, outermost first. The template statement is synthesized
/// from the introduction subtree, so only self-contained cuts are
/// reported.
pub fn detect_cuts(proof: &Proof, lemmas: &LemmaStore) -> Vec<Cut> {
    let mut cuts = Vec::new();
    collect_cuts(proof, lemmas, &mut Vec::new(), &mut cuts);
    cuts
}

fn collect_cuts(proof: &Proof, lemmas: &LemmaStore, path: &mut Vec<usize>, out: &mut Vec<Cut>) {
    if let Proof::ForallElim {
        universal, witness, ..
    } = proof
    {
        let template = match &**universal {
            Proof::ForallIntro { var, body } => Some((var.clone(), None, body)),
            Proof::ForallRangeIntro { var, lo, hi, body } => {
                Some((var.clone(), Some((lo.clone(), hi.clone())), body))
            }
            _ => None,
        };
        if let Some((param, range, body)) = template {
            if let Ok(entire) = infer_conclusion(universal, lemmas) {
                let schema_statement = match entire {
                    Formula::ForallNat(_, b) => Some(*b),
                    Formula::ForallRange(_, _, _, b) => Some(*b),
                    _ => None,
                };
                if let Some(schema_statement) = schema_statement {
                    out.push(Cut {
                        template: Template {
                            param,
                            range,
                            schema_statement,
                            schema_proof: (**body).clone(),
                        },
                        input: witness.clone(),
                        path: path.clone(),
                    });
                }
            }
        }
    }
    for_each_child(proof, &mut |steps: &[usize], child: &Proof| {
        path.extend_from_slice(steps);
        collect_cuts(child, lemmas, path, out);
        path.truncate(path.len() - steps.len());
    });
}

/// Visit each direct sub-proof with its child path segment (one index,
/// or two for a rewrite side proof), in checker path order.
fn for_each_child(proof: &Proof, f: &mut dyn FnMut(&[usize], &Proof)) {
    match proof {
        Proof::ComputeLeaf(_) | Proof::AxiomRef { .. } | Proof::HypRef(_) => {}
        Proof::ForallIntro { body, .. }
        | Proof::ForallRangeIntro { body, .. }
        | Proof::ImpIntro { body, .. } => f(&[0], body),
        Proof::ForallElim {
            universal, bounds, ..
        } => {
            f(&[0], universal);
            for (i, b) in bounds.iter().enumerate() {
                f(&[i + 1], b);
            }
        }
        Proof::RangeEnum { cases, .. } => {
            if let CaseSource::Explicit(list) = cases {
                for (i, c) in list.iter().enumerate() {
                    f(&[i], c);
                }
            }
        }
        Proof::Induction { base, step, .. } => {
            f(&[0], base);
            f(&[1], step);
        }
        Proof::ImpElim { f: g, arg } => {
            f(&[0], g);
            f(&[1], arg);
        }
        Proof::AndIntro(l, r) => {
            f(&[0], l);
            f(&[1], r);
        }
        Proof::AndElimL(p) | Proof::AndElimR(p) => f(&[0], p),
        Proof::CaseSplit { disj, left, right } => {
            f(&[0], disj);
            f(&[1], left);
            f(&[2], right);
        }
        Proof::RewriteChain { steps, .. } => {
            for (i, s) in steps.iter().enumerate() {
                for (j, sp) in s.side_proofs.iter().enumerate() {
                    f(&[i, j], sp);
                }
            }
        }
        Proof::EqSubst {
            equality, target, ..
        } => {
            f(&[0], equality);
            f(&[1], target);
        }
    }
}

/// Substitute a closed term for a variable throughout a proof: in every
/// embedded formula and term, respecting binders. This is the
/// beta-reduced contrast of a cut: the proof `pi[t]` in which the
/// generality of the argument is no longer stressed.
///
/// References to the variable's binder hypothesis (`0 <= x`, or the
/// range bounds) would dangle after reduction; use
/// [`beta_reduce_template`] to replace them with compute leaves of the
/// instantiated facts.
pub fn substitute_proof(proof: &Proof, var: &str, value: &Term) -> Result<Proof, SubstError> {
    if !value.is_closed() {
        return Err(SubstError::NotClosed);
    }
    subst_proof(proof, var, value)
}

/// The full beta reduction of a template at an input: substitute the
/// parameter and discharge uses of its binder hypothesis by
/// computation.
pub fn beta_reduce_template(template: &Template, input: &Term) -> Result<Proof, SubstError> {
    let hyp = match &template.range {
        None => Formula::Le(Term::int(0), Term::var(&template.param)),
        Some((lo, hi)) => Formula::and(
            Formula::Le(lo.clone(), Term::var(&template.param)),
            Formula::Le(Term::var(&template.param), hi.clone()),
        ),
    };
    let instance = hyp.subst(&template.param, input)?;
    let substituted = substitute_proof(&template.schema_proof, &template.param, input)?;
    Ok(replace_hyp_refs(&substituted, &template.param, &instance))
}

/// Replace `HypRef(label)` with a compute leaf of `fact`. Inside an
/// accepted proof the label cannot be shadowed (shadowing is rejected
/// outright), so the replacement is unambiguous.
fn replace_hyp_refs(proof: &Proof, label: &str, fact: &Formula) -> Proof {
    let go = |p: &Proof| replace_hyp_refs(p, label, fact).boxed();
    match proof {
        Proof::HypRef(l) if l == label => Proof::ComputeLeaf(fact.clone()),
        Proof::HypRef(_) | Proof::ComputeLeaf(_) | Proof::AxiomRef { .. } => proof.clone(),
        Proof::ForallIntro { var, body } => Proof::ForallIntro {
            var: var.clone(),
            body: go(body),
        },
        Proof::ForallRangeIntro { var, lo, hi, body } => Proof::ForallRangeIntro {
            var: var.clone(),
            lo: lo.clone(),
            hi: hi.clone(),
            body: go(body),
        },
        Proof::ForallElim {
            universal,
            witness,
            bounds,
        } => Proof::ForallElim {
            universal: go(universal),
            witness: witness.clone(),
            bounds: bounds
                .iter()
                .map(|b| replace_hyp_refs(b, label, fact))
                .collect(),
        },
        Proof::RangeEnum {
            var,
            lo,
            hi,
            body,
            cases,
        } => Proof::RangeEnum {
            var: var.clone(),
            lo: *lo,
            hi: *hi,
            body: body.clone(),
            cases: match cases {
                CaseSource::Compute => CaseSource::Compute,
                CaseSource::Explicit(list) => CaseSource::Explicit(
                    list.iter()
                        .map(|c| replace_hyp_refs(c, label, fact))
                        .collect(),
                ),
            },
        },
        Proof::Induction { var, base, step } => Proof::Induction {
            var: var.clone(),
            base: go(base),
            step: go(step),
        },
        Proof::ImpIntro {
            label: l,
            hyp,
            body,
        } => Proof::ImpIntro {
            label: l.clone(),
            hyp: hyp.clone(),
            body: go(body),
        },
        Proof::ImpElim { f, arg } => Proof::ImpElim {
            f: go(f),
            arg: go(arg),
        },
        Proof::AndIntro(l, r) => Proof::AndIntro(go(l), go(r)),
        Proof::AndElimL(p) => Proof::AndElimL(go(p)),
        Proof::AndElimR(p) => Proof::AndElimR(go(p)),
        Proof::CaseSplit { disj, left, right } => Proof::CaseSplit {
            disj: go(disj),
            left: go(left),
            right: go(right),
        },
        Proof::RewriteChain { goal, steps } => Proof::RewriteChain {
            goal: goal.clone(),
            steps: steps
                .iter()
                .map(|s| RewriteStep {
                    rule: s.rule.clone(),
                    direction: s.direction,
                    position: s.position.clone(),
                    before: s.before.clone(),
                    after: s.after.clone(),
                    side_proofs: s
                        .side_proofs
                        .iter()
                        .map(|p| replace_hyp_refs(p, label, fact))
                        .collect(),
                })
                .collect(),
        },
        Proof::EqSubst {
            equality,
            target,
            position,
        } => Proof::EqSubst {
            equality: go(equality),
            target: go(target),
            position: position.clone(),
        },
    }
}

fn subst_proof(proof: &Proof, var: &str, value: &Term) -> Result<Proof, SubstError> {
    let sp = |p: &Proof| subst_proof(p, var, value).map(Proof::boxed);
    Ok(match proof {
        Proof::ComputeLeaf(f) => Proof::ComputeLeaf(f.subst(var, value)?),
        Proof::AxiomRef { name, inst } => Proof::AxiomRef {
            name: name.clone(),
            inst: inst
                .iter()
                .map(|(v, t)| Ok((v.clone(), t.subst(var, value)?)))
                .collect::<Result<_, SubstError>>()?,
        },
        Proof::ForallIntro { var: v, body } => {
            if v == var {
                proof.clone()
            } else {
                Proof::ForallIntro {
                    var: v.clone(),
                    body: sp(body)?,
                }
            }
        }
        Proof::ForallRangeIntro { var: v, lo, hi, body } => Proof::ForallRangeIntro {
            var: v.clone(),
            lo: lo.subst(var, value)?,
            hi: hi.subst(var, value)?,
            body: if v == var { body.clone() } else { sp(body)? },
        },
        Proof::ForallElim {
            universal,
            witness,
            bounds,
        } => Proof::ForallElim {
            universal: sp(universal)?,
            witness: witness.subst(var, value)?,
            bounds: bounds
                .iter()
                .map(|b| subst_proof(b, var, value))
                .collect::<Result<_, _>>()?,
        },
        Proof::RangeEnum {
            var: v,
            lo,
            hi,
            body,
            cases,
        } => Proof::RangeEnum {
            var: v.clone(),
            lo: *lo,
            hi: *hi,
            body: if v == var {
                body.clone()
            } else {
                body.subst(var, value)?
            },
            cases: match cases {
                CaseSource::Compute => CaseSource::Compute,
                CaseSource::Explicit(list) => CaseSource::Explicit(
                    list.iter()
                        .map(|c| subst_proof(c, var, value))
                        .collect::<Result<_, _>>()?,
                ),
            },
        },
        Proof::Induction { var: v, base, step } => Proof::Induction {
            var: v.clone(),
            base: sp(base)?,
            step: sp(step)?,
        },
        Proof::ImpIntro { label, hyp, body } => Proof::ImpIntro {
            label: label.clone(),
            hyp: hyp.subst(var, value)?,
            body: sp(body)?,
        },
        Proof::ImpElim { f, arg } => Proof::ImpElim {
            f: sp(f)?,
            arg: sp(arg)?,
        },
        Proof::HypRef(label) => Proof::HypRef(label.clone()),
        Proof::AndIntro(l, r) => Proof::AndIntro(sp(l)?, sp(r)?),
        Proof::AndElimL(p) => Proof::AndElimL(sp(p)?),
        Proof::AndElimR(p) => Proof::AndElimR(sp(p)?),
        Proof::CaseSplit { disj, left, right } => Proof::CaseSplit {
            disj: sp(disj)?,
            left: sp(left)?,
            right: sp(right)?,
        },
        Proof::RewriteChain { goal, steps } => Proof::RewriteChain {
            goal: goal.subst(var, value)?,
            steps: steps
                .iter()
                .map(|s| {
                    Ok(RewriteStep {
                        rule: match &s.rule {
                            crate::kernel::RewriteRule::SumSplitAt(t) => {
                                crate::kernel::RewriteRule::SumSplitAt(t.subst(var, value)?)
                            }
                            crate::kernel::RewriteRule::IndexShift(t) => {
                                crate::kernel::RewriteRule::IndexShift(t.subst(var, value)?)
                            }
                            crate::kernel::RewriteRule::LemmaRewrite(name, inst) => {
                                crate::kernel::RewriteRule::LemmaRewrite(
                                    name.clone(),
                                    inst.iter()
                                        .map(|(v, t)| Ok((v.clone(), t.subst(var, value)?)))
                                        .collect::<Result<_, SubstError>>()?,
                                )
                            }
                            other => other.clone(),
                        },
                        direction: s.direction,
                        position: s.position.clone(),
                        before: s.before.subst(var, value)?,
                        after: s.after.subst(var, value)?,
                        side_proofs: s
                            .side_proofs
                            .iter()
                            .map(|p| subst_proof(p, var, value))
                            .collect::<Result<_, _>>()?,
                    })
                })
                .collect::<Result<_, SubstError>>()?,
        },
        Proof::EqSubst {
            equality,
            target,
            position,
        } => Proof::EqSubst {
            equality: sp(equality)?,
            target: sp(target)?,
            position: position.clone(),
        },
    })
}

// ---------------------------------------------------------------------
// Programs, explanations, reports
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Multiply,
    Divide,
}

/// A registered input-to-witness map for the existential form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessMap {
    /// `A[x]`: the decidable precondition on the input.
    pub input_predicate: Formula,
    pub param: String,
    /// Name of the registered map from inputs to witnesses.
    pub witness_fn: String,
    /// `B[y]`: the decidable statement about the witness.
    pub output_predicate: Formula,
    pub out_param: String,
}

/// The closed combinator set of explanation programs. Termination is
/// guaranteed by construction: each combinator runs a fixed,
/// input-bounded procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExplProgram {
    /// Instantiate a generic template at the input.
    Template(Template),
    /// Emit a range enumeration with one compute case per value.
    EnumGenerator {
        var: String,
        lo: i64,
        hi: i64,
        body: Formula,
    },
    /// Run a digit-level arithmetic trace and emit its compute leaf.
    Trace { kind: TraceKind, base: u32 },
    /// Map an input satisfying `A` to a witness satisfying `B`.
    Witness(WitnessMap),
    /// The fixed nearest-centroid classifier (see [`centroid`]).
    Centroid,
}

/// Inputs explanations run on: a closed term, an operand pair for the
/// trace programs, or a whole dataset plus query for the classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum ExplInput {
    Term(Term),
    Pair(Term, Term),
    Dataset(LabeledDataset, Vec<Ratio>),
}

/// A pair of a program and an input value for it; running the pair
/// yields a proof of the explained statement.
#[derive(Debug, Clone)]
pub struct Explanation {
    pub program: ExplProgram,
    pub input: ExplInput,
}

impl Explanation {
    /// Wrap a standalone proof as a constant program: an algorithm that
    /// ignores its input and returns the proof. This is how whole
    /// proofs are measured and ordered as explanations.
    pub fn from_proof(proof: &Proof, statement: &Formula) -> Explanation {
        let text = sexpr::print_proof(proof) + &statement.to_string();
        let mut param = "u".to_string();
        while text.contains(&param) {
            param.push('_');
        }
        Explanation {
            program: ExplProgram::Template(Template {
                param,
                range: None,
                schema_statement: statement.clone(),
                schema_proof: proof.clone(),
            }),
            input: ExplInput::Term(Term::int(0)),
        }
    }
}

/// Canonical source text of a program; its byte length is the program
/// size.
pub fn program_source(p: &ExplProgram) -> String {
    match p {
        ExplProgram::Template(t) => {
            format!(
                "(template {} {})",
                t.param,
                sexpr::print_proof(&t.universal())
            )
        }
        ExplProgram::EnumGenerator { var, lo, hi, body } => {
            format!("(enum-gen {var} {lo} {hi} \"{body}\")")
        }
        ExplProgram::Trace { kind, base } => {
            let kind = match kind {
                TraceKind::Multiply => "multiply",
                TraceKind::Divide => "divide",
            };
            format!("(trace {kind} {base})")
        }
        ExplProgram::Witness(wm) => format!(
            "(witness-map {} {} \"{}\" {} \"{}\")",
            wm.witness_fn, wm.param, wm.input_predicate, wm.out_param, wm.output_predicate
        ),
        ExplProgram::Centroid => "(centroid-classifier)".to_string(),
    }
}

/// Canonical source text of an input; its byte length is the input
/// size.
pub fn input_source(i: &ExplInput) -> String {
    match i {
        ExplInput::Term(t) => t.to_string(),
        ExplInput::Pair(a, b) => format!("(pair {a} {b})"),
        ExplInput::Dataset(ds, query) => {
            let mut text = ds.to_csv();
            text.push_str("query,");
            text.push_str(&centroid::row_csv(query));
            text.push('\n');
            text
        }
    }
}

/// Threshold and classification parameters. `alpha` is the size-ratio
/// threshold; `k_max` the case-analysis tolerance; `step_limit` caps
/// explanation runs.
#[derive(Debug, Clone)]
pub struct ReportParams {
    pub alpha: Ratio,
    pub k_max: u64,
    pub step_limit: u64,
}

impl Default for ReportParams {
    fn default() -> Self {
        ReportParams {
            alpha: Ratio::from_integer(Int::from(1)),
            k_max: 12,
            step_limit: 10_000_000,
        }
    }
}

/// Size and run-cost metrics of one explanation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationReport {
    pub program_bytes: u64,
    pub input_bytes: u64,
    pub statement_bytes: u64,
    pub run_steps: u64,
    /// `(program_bytes + input_bytes) / statement_bytes`, exactly.
    pub ratio: Ratio,
    pub passes_threshold: bool,
    pub alpha: Ratio,
    /// Canonical text of the explained statement.
    pub statement_text: String,
}

impl ExplanationReport {
    pub fn new(
        program_bytes: u64,
        input_bytes: u64,
        statement_text: String,
        run_steps: u64,
        alpha: &Ratio,
    ) -> ExplanationReport {
        let statement_bytes = statement_text.len() as u64;
        let ratio = Ratio::new(
            Int::from(program_bytes + input_bytes),
            Int::from(statement_bytes.max(1)),
        );
        ExplanationReport {
            program_bytes,
            input_bytes,
            statement_bytes,
            run_steps,
            passes_threshold: &ratio <= alpha,
            ratio,
            alpha: alpha.clone(),
            statement_text,
        }
    }

    /// Total serialized size of the (program, input) pair.
    pub fn pair_bytes(&self) -> u64 {
        self.program_bytes + self.input_bytes
    }
}

// ---------------------------------------------------------------------
// Running explanations
// ---------------------------------------------------------------------

/// Run the pair and check the produced proof against the target.
/// Conclusions that differ from the target only by closed subterms of
/// equal value are bridged with compute-checked equality substitutions,
/// so `12345679 * 9 * 4 = 111111111 * 4` explains
/// `12345679 * 36 = 444444444`.
pub fn run_explanation(
    e: &Explanation,
    target: &Formula,
    params: &ReportParams,
    lemmas: &LemmaStore,
) -> Result<(Proof, ExplanationReport), ExplainError> {
    let (proof, production_steps) = produce(e, target, lemmas)?;
    let report = check(&proof, target, lemmas);
    if !report.accepted {
        return Err(ExplainError::Rejected(
            report.failure.unwrap_or(CheckFailure {
                path: vec![],
                message: "target mismatch".into(),
            }),
        ));
    }
    let run_steps = report.steps + production_steps;
    if run_steps > params.step_limit {
        return Err(ExplainError::StepLimitExceeded(params.step_limit));
    }
    let report = ExplanationReport::new(
        program_source(&e.program).len() as u64,
        input_source(&e.input).len() as u64,
        target.to_string(),
        run_steps,
        &params.alpha,
    );
    Ok((proof, report))
}

fn produce(
    e: &Explanation,
    target: &Formula,
    lemmas: &LemmaStore,
) -> Result<(Proof, u64), ExplainError> {
    match (&e.program, &e.input) {
        (ExplProgram::Template(t), ExplInput::Term(input)) => {
            if !input.is_closed() {
                return Err(ExplainError::BadInput("template input must be closed".into()));
            }
            let raw = Proof::ForallElim {
                universal: t.universal().boxed(),
                witness: input.clone(),
                bounds: vec![],
            };
            let produced = t.schema_statement.subst(&t.param, input)?;
            let bridged = bridge_to_target(raw, &produced, target)?;
            Ok((bridged, 1))
        }
        (ExplProgram::EnumGenerator { var, lo, hi, body }, _) => {
            let proof = Proof::RangeEnum {
                var: var.clone(),
                lo: *lo,
                hi: *hi,
                body: body.clone(),
                cases: CaseSource::Compute,
            };
            let produced = Formula::forall_range(var, Term::int(*lo), Term::int(*hi), body.clone());
            if &produced != target {
                return Err(ExplainError::ProofMismatch {
                    produced,
                    target: target.clone(),
                });
            }
            Ok((proof, (hi - lo + 1).max(0) as u64))
        }
        (ExplProgram::Trace { kind, base }, ExplInput::Pair(a, b)) => {
            let a_val = closed_nat(a)?;
            let b_val = closed_nat(b)?;
            let (produced, production) = match kind {
                TraceKind::Multiply => {
                    let trace = crate::numeral::long_multiply_trace(&a_val, &b_val, *base)
                        .map_err(|e| ExplainError::BadInput(e.to_string()))?;
                    let digits: u64 = trace
                        .partial_rows
                        .iter()
                        .map(|(_, row)| row.len() as u64)
                        .sum();
                    (
                        Formula::Eq(a.clone() * b.clone(), Term::nat(&trace.result.value())),
                        digits,
                    )
                }
                TraceKind::Divide => {
                    let trace = crate::numeral::long_divide_trace(&a_val, &b_val, *base)
                        .map_err(|e| ExplainError::BadInput(e.to_string()))?;
                    let steps = trace.steps.len() as u64;
                    (
                        Formula::Eq(
                            b.clone() * Term::nat(&trace.quotient) + Term::nat(&trace.remainder),
                            a.clone(),
                        ),
                        steps,
                    )
                }
            };
            let proof = Proof::ComputeLeaf(produced.clone());
            let bridged = bridge_to_target(proof, &produced, target)?;
            Ok((bridged, production))
        }
        (ExplProgram::Witness(wm), ExplInput::Term(input)) => {
            let (_, witness, proof) = explain_existential(wm, input, lemmas)?;
            let produced = infer_conclusion(&proof, lemmas)
                .map_err(ExplainError::Rejected)?;
            let bridged = bridge_to_target(proof, &produced, target)?;
            let _ = witness;
            Ok((bridged, 1))
        }
        (ExplProgram::Centroid, _) => Err(ExplainError::BadInput(
            "the centroid classifier runs through centroid_classify".into(),
        )),
        _ => Err(ExplainError::BadInput(
            "input shape does not fit the program".into(),
        )),
    }
}

fn closed_nat(t: &Term) -> Result<crate::Nat, ExplainError> {
    if !t.is_closed() {
        return Err(ExplainError::BadInput(format!("{t} is not closed")));
    }
    let v = eval_term(t, &Env::new()).map_err(|e| ExplainError::BadInput(e.to_string()))?;
    if v.is_negative() {
        return Err(ExplainError::BadInput(format!("{t} is negative")));
    }
    Ok(v.to_biguint().expect("nonnegative"))
}

/// Patch a proof whose comparison conclusion differs from the target
/// only in closed subterms of equal value.
fn bridge_to_target(
    proof: Proof,
    produced: &Formula,
    target: &Formula,
) -> Result<Proof, ExplainError> {
    if produced == target {
        return Ok(proof);
    }
    let mismatch = || ExplainError::ProofMismatch {
        produced: produced.clone(),
        target: target.clone(),
    };
    let sides = |f: &Formula| -> Option<(Term, Term)> {
        match f {
            Formula::Eq(l, r) | Formula::Neq(l, r) | Formula::Le(l, r) | Formula::Lt(l, r) => {
                Some((l.clone(), r.clone()))
            }
            _ => None,
        }
    };
    if std::mem::discriminant(produced) != std::mem::discriminant(target) {
        return Err(mismatch());
    }
    let (Some((pl, pr)), Some((tl, tr))) = (sides(produced), sides(target)) else {
        return Err(mismatch());
    };
    let mut proof = proof;
    for (position, from, to) in [(0usize, pl, tl), (1, pr, tr)] {
        if from == to {
            continue;
        }
        if !from.is_closed() || !to.is_closed() {
            return Err(mismatch());
        }
        let env = Env::new();
        match (eval_term(&from, &env), eval_term(&to, &env)) {
            (Ok(a), Ok(b)) if a == b => {}
            _ => return Err(mismatch()),
        }
        proof = Proof::EqSubst {
            equality: Proof::ComputeLeaf(Formula::Eq(from, to)).boxed(),
            target: proof.boxed(),
            position: vec![position],
        };
    }
    Ok(proof)
}

// ---------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------

/// The three categories: a generic proof behind a universal cut, a
/// case analysis (with its case count), or no general statement at all.
#[derive(Debug, Clone)]
pub enum ProofCategory {
    Explanatory { cuts: Vec<Cut> },
    CaseAnalytic { k: u64 },
    Opaque,
}

impl ProofCategory {
    pub fn name(&self) -> &'static str {
        match self {
            ProofCategory::Explanatory { .. } => "explanatory",
            ProofCategory::CaseAnalytic { .. } => "case-analytic",
            ProofCategory::Opaque => "opaque",
        }
    }
}

/// Largest enumeration inside the proof: a range enumeration counts its
/// cases, a case split counts as 2.
pub fn max_enumeration_cases(proof: &Proof) -> u64 {
    let mut max = 0u64;
    crate::library::walk(proof, &mut |node| {
        let weight = match node {
            Proof::RangeEnum { lo, hi, .. } => (hi - lo + 1).max(0) as u64,
            Proof::CaseSplit { .. } => 2,
            _ => 0,
        };
        max = max.max(weight);
    });
    max
}

/// Classify a checked proof: explanatory when some universal cut's
/// generic sub-proof stays within `k_max` enumerated cases; otherwise
/// case-analytic with the best cut's case count; opaque without any
/// cut.
pub fn classify_proof(proof: &Proof, k_max: u64, lemmas: &LemmaStore) -> ProofCategory {
    let cuts = detect_cuts(proof, lemmas);
    if cuts.is_empty() {
        return ProofCategory::Opaque;
    }
    let weights: Vec<u64> = cuts
        .iter()
        .map(|c| max_enumeration_cases(&c.template.universal()))
        .collect();
    let qualifying: Vec<Cut> = cuts
        .iter()
        .zip(&weights)
        .filter(|(_, w)| **w <= k_max)
        .map(|(c, _)| c.clone())
        .collect();
    if !qualifying.is_empty() {
        ProofCategory::Explanatory { cuts: qualifying }
    } else {
        ProofCategory::CaseAnalytic {
            k: weights.iter().copied().min().unwrap_or(0),
        }
    }
}

// ---------------------------------------------------------------------
// Ordering
// ---------------------------------------------------------------------

/// Strict Pareto dominance on (serialized size, run steps).
pub fn pareto_dominates(a: &ExplanationReport, b: &ExplanationReport) -> bool {
    let size_a = a.pair_bytes();
    let size_b = b.pair_bytes();
    size_a <= size_b
        && a.run_steps <= b.run_steps
        && (size_a < size_b || a.run_steps < b.run_steps)
}

/// Order explanations of one statement: Pareto dominance linearized by
/// (size, steps, stable input order). Returns the indices in display
/// order. Mixing targets is an error.
pub fn order_explanations(
    items: &[(Explanation, ExplanationReport)],
) -> Result<Vec<usize>, ExplainError> {
    if let Some((_, first)) = items.first() {
        if items
            .iter()
            .any(|(_, r)| r.statement_text != first.statement_text)
        {
            return Err(ExplainError::MixedTargets);
        }
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| (items[i].1.pair_bytes(), items[i].1.run_steps, i));
    Ok(order)
}

// ---------------------------------------------------------------------
// The existential form
// ---------------------------------------------------------------------

/// Apply a registered witness map to a term.
pub fn apply_witness_fn(name: &str, input: &Int) -> Result<Int, ExplainError> {
    match name {
        "identity" => Ok(input.clone()),
        // the book-shop toy: orders placed yesterday map to the books
        // delivered today
        "book-shop" => {
            let table = [(1, 101), (2, 102), (3, 103)];
            table
                .iter()
                .find(|(order, _)| &Int::from(*order) == input)
                .map(|(_, book)| Int::from(*book))
                .ok_or_else(|| {
                    ExplainError::BadInput(format!("no delivery for order {input}"))
                })
        }
        other => Err(ExplainError::UnknownWitnessFn(other.to_string())),
    }
}

/// The existential explanation: an algorithm mapping each input
/// satisfying `A` to a witness satisfying `B`, plus the input it ran
/// on. Returns the pair, the witness, and the compute proof of the
/// witness statement.
pub fn explain_existential(
    wm: &WitnessMap,
    input: &Term,
    lemmas: &LemmaStore,
) -> Result<(Explanation, Term, Proof), ExplainError> {
    let precondition = wm.input_predicate.subst(&wm.param, input)?;
    if !precondition.is_closed() || !precondition.is_range_only() {
        return Err(ExplainError::BadInput(format!(
            "precondition {precondition} is not decidable"
        )));
    }
    if eval_formula(&precondition, &Env::new()) != Ok(true) {
        return Err(ExplainError::PreconditionFalse(precondition));
    }
    let input_value =
        eval_term(input, &Env::new()).map_err(|e| ExplainError::BadInput(e.to_string()))?;
    let witness = Term::Int(apply_witness_fn(&wm.witness_fn, &input_value)?);
    let statement = wm.output_predicate.subst(&wm.out_param, &witness)?;
    let proof = Proof::ComputeLeaf(statement.clone());
    let report = check(&proof, &statement, lemmas);
    if !report.accepted {
        return Err(ExplainError::Rejected(report.failure.unwrap()));
    }
    let explanation = Explanation {
        program: ExplProgram::Witness(wm.clone()),
        input: ExplInput::Term(input.clone()),
    };
    Ok((explanation, witness, proof))
}

// ---------------------------------------------------------------------
// Combined report for display
// ---------------------------------------------------------------------

/// Everything the analyzer reports about one proof/explanation: the
/// category, the cuts, and the quantitative metrics.
#[derive(Debug, Clone, Serialize)]
pub struct FullReport {
    pub category: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub cuts: Vec<CutSummary>,
    pub program_bytes: u64,
    pub input_bytes: u64,
    pub statement_bytes: u64,
    pub run_steps: u64,
    /// Exact rational, printed as `numerator/denominator`.
    pub ratio: String,
    pub passes_threshold: bool,
    pub alpha: String,
    pub k_max: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutSummary {
    pub input: String,
    pub path: Vec<usize>,
}

impl FullReport {
    pub fn assemble(
        category: &ProofCategory,
        cuts: &[Cut],
        report: &ExplanationReport,
        params: &ReportParams,
    ) -> FullReport {
        FullReport {
            category: category.name().to_string(),
            k: match category {
                ProofCategory::CaseAnalytic { k } => Some(*k),
                _ => None,
            },
            cuts: cuts
                .iter()
                .map(|c| CutSummary {
                    input: c.input.to_string(),
                    path: c.path.clone(),
                })
                .collect(),
            program_bytes: report.program_bytes,
            input_bytes: report.input_bytes,
            statement_bytes: report.statement_bytes,
            run_steps: report.run_steps,
            ratio: ratio_string(&report.ratio),
            passes_threshold: report.passes_threshold,
            alpha: ratio_string(&params.alpha),
            k_max: params.k_max,
        }
    }
}

pub fn ratio_string(r: &Ratio) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, parse_term};
    use crate::library::standard_library;

    fn fm(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn tm(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn scaling_template(store: &LemmaStore) -> Template {
        let lemma = store.get("digit-scaling").unwrap();
        let Proof::ForallRangeIntro { var, lo, hi, body } = &lemma.proof else {
            panic!("unexpected digit-scaling shape")
        };
        let Formula::ForallRange(_, _, _, statement) = &lemma.statement else {
            panic!("unexpected digit-scaling statement")
        };
        Template {
            param: var.clone(),
            range: Some((lo.clone(), hi.clone())),
            schema_statement: (**statement).clone(),
            schema_proof: (**body).clone(),
        }
    }

    #[test]
    fn displayed_cut_detected_at_root() {
        let store = LemmaStore::new();
        let body = Proof::RewriteChain {
            goal: fm("x + x = 2 * x"),
            steps: vec![crate::kernel::RewriteStep {
                rule: crate::kernel::RewriteRule::RingNormalize,
                direction: crate::kernel::Direction::Forward,
                position: vec![],
                before: tm("x + x"),
                after: tm("2 * x"),
                side_proofs: vec![],
            }],
        };
        let cut = Proof::ForallElim {
            universal: Proof::ForallIntro {
                var: "x".into(),
                body: body.clone().boxed(),
            }
            .boxed(),
            witness: tm("4"),
            bounds: vec![],
        };
        let cuts = detect_cuts(&cut, &store);
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].path, Vec::<usize>::new());
        assert_eq!(cuts[0].input, tm("4"));
        assert_eq!(cuts[0].template.schema_statement, fm("x + x = 2 * x"));
        assert!(cuts[0].template.validate(&store));

        // the beta-reduced contrast has no cut
        let reduced = substitute_proof(&body, "x", &tm("4")).unwrap();
        assert!(detect_cuts(&reduced, &store).is_empty());
        assert!(check(&reduced, &fm("4 + 4 = 2 * 4"), &store).accepted);
    }

    #[test]
    fn no_elimination_no_cuts() {
        let store = standard_library().unwrap();
        for entry in store.entries() {
            // library lemmas are introductions without eliminations
            assert!(
                detect_cuts(&entry.proof, &store).is_empty(),
                "{}",
                entry.name
            );
        }
    }

    #[test]
    fn digit_scaling_run_and_cut() {
        let store = standard_library().unwrap();
        let template = scaling_template(&store);
        let target = fm("12345679 * 36 = 444444444");
        let e = Explanation {
            program: ExplProgram::Template(template.clone()),
            input: ExplInput::Term(tm("4")),
        };
        let params = ReportParams::default();
        let (proof, report) = run_explanation(&e, &target, &params, &store).unwrap();
        assert!(check(&proof, &target, &store).accepted);
        assert!(report.run_steps > 0);

        // exactly one cut, at the specialization input 4
        let cuts = detect_cuts(&proof, &store);
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].input, tm("4"));

        // the substituted contrast proof: also accepted, no cuts
        let reduced = substitute_proof(&template.schema_proof, &template.param, &tm("4")).unwrap();
        let reduced_statement = template
            .schema_statement
            .subst(&template.param, &tm("4"))
            .unwrap();
        assert!(check(&reduced, &reduced_statement, &store).accepted);
        let bridged = bridge_to_target(reduced, &reduced_statement, &target).unwrap();
        assert!(check(&bridged, &target, &store).accepted);
        assert!(detect_cuts(&bridged, &store).is_empty());

        // the wrong instance is a mismatch
        let e10 = Explanation {
            program: ExplProgram::Template(template),
            input: ExplInput::Term(tm("10")),
        };
        assert!(matches!(
            run_explanation(&e10, &target, &params, &store),
            Err(ExplainError::Rejected(_)) | Err(ExplainError::ProofMismatch { .. })
        ));
    }

    #[test]
    fn trace_program_runs() {
        let store = LemmaStore::new();
        let params = ReportParams::default();
        let target = fm("7678 * 3706 = 28454668");
        let e = Explanation {
            program: ExplProgram::Trace {
                kind: TraceKind::Multiply,
                base: 10,
            },
            input: ExplInput::Pair(tm("7678"), tm("3706")),
        };
        let (proof, _) = run_explanation(&e, &target, &params, &store).unwrap();
        assert!(matches!(proof, Proof::ComputeLeaf(_)));

        let target = fm("9 * 12345679 + 0 = 111111111");
        let e = Explanation {
            program: ExplProgram::Trace {
                kind: TraceKind::Divide,
                base: 10,
            },
            input: ExplInput::Pair(tm("111111111"), tm("9")),
        };
        let (proof, _) = run_explanation(&e, &target, &params, &store).unwrap();
        assert!(check(&proof, &target, &store).accepted);
    }

    #[test]
    fn classification_categories() {
        let store = standard_library().unwrap();
        let params = ReportParams::default();

        // the digit-scaling cut proof is explanatory at k_max 12
        let template = scaling_template(&store);
        let target = fm("12345679 * 36 = 444444444");
        let e = Explanation {
            program: ExplProgram::Template(template),
            input: ExplInput::Term(tm("4")),
        };
        let (proof, _) = run_explanation(&e, &target, &params, &store).unwrap();
        assert!(matches!(
            classify_proof(&proof, 12, &store),
            ProofCategory::Explanatory { .. }
        ));

        // an enumeration of 43 cases wrapped as a cut is case-analytic
        let enum_43 = Proof::RangeEnum {
            var: "x".into(),
            lo: 0,
            hi: 42,
            body: fm("x^2 < 1800"),
            cases: CaseSource::Compute,
        };
        let wrapped = Explanation::from_proof(&enum_43, &fm("forall x in [0, 42] . x^2 < 1800"));
        let ExplProgram::Template(t) = &wrapped.program else {
            panic!()
        };
        let cut_proof = Proof::ForallElim {
            universal: t.universal().boxed(),
            witness: tm("0"),
            bounds: vec![],
        };
        match classify_proof(&cut_proof, 12, &store) {
            ProofCategory::CaseAnalytic { k } => assert_eq!(k, 43),
            other => panic!("expected case-analytic, got {other:?}"),
        }
        // raising the tolerance flips it to explanatory (monotone)
        assert!(matches!(
            classify_proof(&cut_proof, 43, &store),
            ProofCategory::Explanatory { .. }
        ));

        // no universal cut at all: opaque
        assert!(matches!(
            classify_proof(&enum_43, 12, &store),
            ProofCategory::Opaque
        ));
    }

    #[test]
    fn classification_monotone_in_kmax() {
        let store = standard_library().unwrap();
        let template = scaling_template(&store);
        let proof = Proof::ForallElim {
            universal: template.universal().boxed(),
            witness: tm("4"),
            bounds: vec![],
        };
        let mut last_rank = 0u8;
        for k_max in [0u64, 1, 2, 12, 100, 10_000] {
            let rank = match classify_proof(&proof, k_max, &store) {
                ProofCategory::Opaque => 0,
                ProofCategory::CaseAnalytic { .. } => 1,
                ProofCategory::Explanatory { .. } => 2,
            };
            assert!(rank >= last_rank, "k_max {k_max} decreased the category");
            last_rank = rank;
        }
    }

    #[test]
    fn ordering_and_dominance() {
        let store = LemmaStore::new();
        let params = ReportParams::default();
        let target = fm("forall x in [0, 9] . x * x <= 81");
        let enum_a = Explanation {
            program: ExplProgram::EnumGenerator {
                var: "x".into(),
                lo: 0,
                hi: 9,
                body: fm("x * x <= 81"),
            },
            input: ExplInput::Term(tm("0")),
        };
        let (_, report_a) = run_explanation(&enum_a, &target, &params, &store).unwrap();
        // the same enumeration with its cases spelled out: same step
        // count, strictly larger serialization, so it is dominated
        let compute_proof = Proof::RangeEnum {
            var: "x".into(),
            lo: 0,
            hi: 9,
            body: fm("x * x <= 81"),
            cases: CaseSource::Compute,
        };
        let explicit_proof = Proof::RangeEnum {
            var: "x".into(),
            lo: 0,
            hi: 9,
            body: fm("x * x <= 81"),
            cases: CaseSource::Explicit(
                crate::kernel::expand_range_enum("x", 0, 9, &fm("x * x <= 81")).unwrap(),
            ),
        };
        let wrapped = Explanation::from_proof(&compute_proof, &target);
        let wrapped_explicit = Explanation::from_proof(&explicit_proof, &target);
        let (_, report_b) = run_explanation(&wrapped, &target, &params, &store).unwrap();
        let (_, report_c) =
            run_explanation(&wrapped_explicit, &target, &params, &store).unwrap();
        assert_eq!(report_b.run_steps, report_c.run_steps);
        assert!(report_b.pair_bytes() < report_c.pair_bytes());
        assert!(pareto_dominates(&report_b, &report_c));
        assert!(!pareto_dominates(&report_c, &report_b));
        assert!(!pareto_dominates(&report_b, &report_b));

        // the generator pays its cases in steps but is the smallest
        assert!(report_a.pair_bytes() < report_b.pair_bytes());

        let order = order_explanations(&[
            (wrapped_explicit.clone(), report_c.clone()),
            (wrapped.clone(), report_b.clone()),
            (enum_a, report_a),
        ])
        .unwrap();
        assert_eq!(order, vec![2, 1, 0]);

        // ties keep input order
        let order = order_explanations(&[
            (wrapped.clone(), report_b.clone()),
            (wrapped.clone(), report_b.clone()),
        ])
        .unwrap();
        assert_eq!(order, vec![0, 1]);

        // mixed targets rejected
        let other_target = fm("forall x in [0, 8] . x * x <= 81");
        let other = Explanation {
            program: ExplProgram::EnumGenerator {
                var: "x".into(),
                lo: 0,
                hi: 8,
                body: fm("x * x <= 81"),
            },
            input: ExplInput::Term(tm("0")),
        };
        let (_, report_c) = run_explanation(&other, &other_target, &params, &store).unwrap();
        assert!(matches!(
            order_explanations(&[(wrapped, report_b), (other, report_c)]),
            Err(ExplainError::MixedTargets)
        ));
    }

    #[test]
    fn pareto_properties_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9a3e70);
        let params = ReportParams::default();
        let reports: Vec<ExplanationReport> = (0..60)
            .map(|_| {
                ExplanationReport::new(
                    rng.gen_range(0..50),
                    rng.gen_range(0..50),
                    "statement".to_string(),
                    rng.gen_range(0..100),
                    &params.alpha,
                )
            })
            .collect();
        for a in &reports {
            assert!(!pareto_dominates(a, a), "irreflexive");
            for b in &reports {
                for c in &reports {
                    if pareto_dominates(a, b) && pareto_dominates(b, c) {
                        assert!(pareto_dominates(a, c), "transitive");
                    }
                }
            }
        }
    }

    #[test]
    fn existential_book_shop() {
        let store = LemmaStore::new();
        let wm = WitnessMap {
            input_predicate: fm("x = 1 \\/ x = 2 \\/ x = 3"),
            param: "x".into(),
            witness_fn: "book-shop".into(),
            output_predicate: fm("y = 101 \\/ y = 102 \\/ y = 103"),
            out_param: "y".into(),
        };
        let (explanation, witness, proof) = explain_existential(&wm, &tm("2"), &store).unwrap();
        assert_eq!(witness, tm("102"));
        assert!(matches!(proof, Proof::ComputeLeaf(_)));
        assert!(matches!(explanation.program, ExplProgram::Witness(_)));

        assert!(matches!(
            explain_existential(&wm, &tm("4"), &store),
            Err(ExplainError::PreconditionFalse(_))
        ));
    }

    #[test]
    fn existential_dioph_witness() {
        let store = LemmaStore::new();
        let wm = WitnessMap {
            input_predicate: fm("0 <= x /\\ x <= 3600 /\\ x^2 = 1764"),
            param: "x".into(),
            witness_fn: "identity".into(),
            output_predicate: fm("y^2 = 1764"),
            out_param: "y".into(),
        };
        let (_, witness, proof) = explain_existential(&wm, &tm("42"), &store).unwrap();
        assert_eq!(witness, tm("42"));
        assert!(check(&proof, &fm("42^2 = 1764"), &store).accepted);
    }

    #[test]
    fn report_ratio_exact() {
        let params = ReportParams::default();
        let report = ExplanationReport::new(100, 23, "x".repeat(41), 5, &params.alpha);
        let lhs = &report.ratio * Ratio::from_integer(Int::from(report.statement_bytes));
        assert_eq!(lhs, Ratio::from_integer(Int::from(123)));
        assert!(!report.passes_threshold);
        let tiny = ExplanationReport::new(10, 3, "x".repeat(41), 5, &params.alpha);
        assert!(tiny.passes_threshold);
    }

    #[test]
    fn constant_wrapping_preserves_statement() {
        let store = standard_library().unwrap();
        let entry = store.get("repunit-core").unwrap();
        let e = Explanation::from_proof(&entry.proof, &entry.statement);
        let params = ReportParams::default();
        let (proof, report) = run_explanation(&e, &entry.statement, &params, &store).unwrap();
        assert!(check(&proof, &entry.statement, &store).accepted);
        assert_eq!(
            report.statement_bytes,
            entry.statement.to_string().len() as u64
        );
    }
}
