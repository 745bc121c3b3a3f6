//! Univariate Diophantine non-solvability over the naturals.
//!
//! For `p(x) = a_n x^n + ... + a_0` with `a_n != 0`, every natural
//! solution satisfies `x <= bound(p) = n * max(|a_0|, ..., |a_{n-1}|)`:
//! beyond that the leading term dominates the rest. Two provers turn
//! this into kernel-checked proofs of `forall x . p(x) != 0`:
//!
//! * [`prove_no_solution_enum`] splits on the bound and checks the
//!   finitely many small candidates one by one (a range enumeration with
//!   `bound + 1` cases), with a generic dominance argument for the tail;
//! * [`prove_no_solution_interval`] handles `x^k - c` by locating the
//!   threshold `t` with `t^k < c < (t+1)^k` and proving both intervals
//!   generically from the monotonicity of powers, with no enumeration
//!   at all.
//!
//! Both conclude the identical formula, so their proofs can be compared
//! as explanations of the same statement.

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::kernel::{poly_of, term_of, CaseSource, LemmaStore, Proof};
use crate::lang::{Formula, Term};
use crate::library::derive::{
    axiom_ref, imp_elim, imp_elim2, reshape_cmp, BuildError, Facts,
};
use crate::{Int, Nat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiophError {
    #[error("a natural root exists: {0}")]
    RootFound(Nat),
    #[error("polynomial shape not supported by the interval prover")]
    UnsupportedShape,
    #[error("degree must be at least 1")]
    DegreeZero,
    #[error("leading coefficient must be nonzero")]
    ZeroLeading,
    #[error("not a univariate polynomial: {0}")]
    NotUnivariate(String),
    #[error("bound {0} too large to enumerate")]
    BoundTooLarge(Nat),
    #[error("internal construction failed: {0}")]
    Construction(String),
}

impl From<BuildError> for DiophError {
    fn from(e: BuildError) -> Self {
        DiophError::Construction(e.to_string())
    }
}

/// An integer polynomial `a_0 + a_1 x + ... + a_n x^n`, `a_n != 0`,
/// `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<Int>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<Int>) -> Result<IntPoly, DiophError> {
        if coeffs.len() < 2 {
            return Err(DiophError::DegreeZero);
        }
        if coeffs.last().map(Zero::is_zero).unwrap_or(true) {
            return Err(DiophError::ZeroLeading);
        }
        Ok(IntPoly { coeffs })
    }

    /// Parse from a term in at most one variable, e.g. `x^2 - 1800`.
    pub fn from_term(t: &Term) -> Result<IntPoly, DiophError> {
        let poly = poly_of(t).map_err(|e| DiophError::NotUnivariate(e.to_string()))?;
        let mut coeffs: Vec<Int> = Vec::new();
        let mut var: Option<String> = None;
        for (c, atoms) in poly.monomials() {
            let degree = match atoms.as_slice() {
                [] => 0usize,
                [atom] => {
                    let (name, exp) = atom
                        .as_var_literal()
                        .ok_or_else(|| DiophError::NotUnivariate(t.to_string()))?;
                    match &var {
                        Some(v) if *v != name => {
                            return Err(DiophError::NotUnivariate(t.to_string()))
                        }
                        _ => var = Some(name),
                    }
                    usize::try_from(exp).map_err(|_| DiophError::NotUnivariate(t.to_string()))?
                }
                _ => return Err(DiophError::NotUnivariate(t.to_string())),
            };
            if coeffs.len() <= degree {
                coeffs.resize(degree + 1, Int::zero());
            }
            coeffs[degree] = c.clone();
        }
        IntPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Int {
        self.coeffs.last().expect("degree >= 1")
    }

    pub fn eval(&self, x: &Int) -> Int {
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Canonical polynomial term in the variable `x`.
    pub fn term(&self) -> Term {
        let x = Term::var("x");
        let mut parts: Vec<Term> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => Term::Int(c.clone()),
                _ => {
                    let p = if i == 1 {
                        x.clone()
                    } else {
                        Term::pow(x.clone(), Term::int(i as i64))
                    };
                    if c == &Int::from(1) {
                        p
                    } else {
                        Term::Int(c.clone()) * p
                    }
                }
            };
            parts.push(mono);
        }
        // assemble in canonical normal form
        term_of(&poly_of(&parts_sum(parts)).expect("polynomial"))
    }

    /// The statement both provers certify: `forall x . p(x) != 0`.
    pub fn statement(&self) -> Formula {
        Formula::forall_nat("x", Formula::Neq(self.term(), Term::int(0)))
    }
}

fn parts_sum(parts: Vec<Term>) -> Term {
    let mut it = parts.into_iter();
    let first = it.next().expect("nonzero polynomial");
    it.fold(first, |acc, t| acc + t)
}

/// The solution bound `n * max(|a_0|, ..., |a_{n-1}|)`: beyond it the
/// leading term outweighs all the others (tested, not assumed).
pub fn bound(p: &IntPoly) -> Nat {
    let n = p.degree();
    let max = p.coeffs[..n]
        .iter()
        .map(|c| c.abs())
        .max()
        .expect("degree >= 1");
    (Int::from(n) * max).to_biguint().expect("nonnegative")
}

/// All natural roots, by scanning `[0, bound]`; completeness follows
/// from the bound guarantee.
pub fn solve(p: &IntPoly) -> Result<Vec<Nat>, DiophError> {
    let b = bound(p);
    let limit = b
        .to_u64()
        .filter(|&v| v <= 10_000_000)
        .ok_or_else(|| DiophError::BoundTooLarge(b.clone()))?;
    let mut roots = Vec::new();
    for x in 0..=limit {
        let xi = Int::from(x);
        if p.eval(&xi).is_zero() {
            roots.push(Nat::from(x));
        }
    }
    Ok(roots)
}

fn first_root(p: &IntPoly) -> Result<Option<Nat>, DiophError> {
    Ok(solve(p)?.into_iter().next())
}

// ---------------------------------------------------------------------
// The enumeration prover
// ---------------------------------------------------------------------

/// Prove `forall x . p(x) != 0` by trichotomy at the bound: the
/// candidates up to the bound are enumerated one by one (`bound + 1`
/// compute cases); beyond it, a generic dominance argument applies.
pub fn prove_no_solution_enum(p: &IntPoly) -> Result<Proof, DiophError> {
    if let Some(root) = first_root(p)? {
        return Err(DiophError::RootFound(root));
    }
    let b = bound(p);
    let b_i64 = b
        .to_i64()
        .filter(|&v| v <= 1_000_000)
        .ok_or_else(|| DiophError::BoundTooLarge(b.clone()))?;
    let p_term = p.term();
    let goal_body = Formula::Neq(p_term.clone(), Term::int(0));
    let b_term = Term::Int(Int::from(b_i64));

    // forall y in [0, b] . p(y) != 0, one compute case per candidate
    let enum_body = goal_body
        .subst("x", &Term::var("y"))
        .map_err(|e| DiophError::Construction(e.to_string()))?;
    let enumeration = Proof::RangeEnum {
        var: "y".into(),
        lo: 0,
        hi: b_i64,
        body: enum_body,
        cases: CaseSource::Compute,
    };
    let small = Proof::ImpIntro {
        label: "hle".into(),
        hyp: Formula::Le(Term::var("x"), b_term.clone()),
        body: Proof::ForallElim {
            universal: enumeration.boxed(),
            witness: Term::var("x"),
            bounds: vec![Proof::HypRef("x".into()), Proof::HypRef("hle".into())],
        }
        .boxed(),
    };

    let hgt = Formula::Lt(b_term.clone(), Term::var("x"));
    let facts = Facts::new().with_nat_var("x").with_hyp("hgt", hgt.clone());
    let tail = dominance_tail(p, &b, facts)?;
    let large = Proof::ImpIntro {
        label: "hgt".into(),
        hyp: hgt,
        body: tail.boxed(),
    };

    let trichotomy = Proof::ForallElim {
        universal: axiom_ref("trichotomy", &[("t", b_term)]).boxed(),
        witness: Term::var("x"),
        bounds: vec![Proof::HypRef("x".into())],
    };
    Ok(Proof::ForallIntro {
        var: "x".into(),
        body: Proof::CaseSplit {
            disj: trichotomy.boxed(),
            left: small.boxed(),
            right: large.boxed(),
        }
        .boxed(),
    })
}

// ---------------------------------------------------------------------
// Dominance: the generic tail argument
// ---------------------------------------------------------------------

/// A proved inequality `lhs <= rhs` with both sides in canonical form.
#[derive(Clone)]
struct LeFact {
    proof: Proof,
    lhs: Term,
    rhs: Term,
}

fn canon(t: &Term) -> Term {
    term_of(&poly_of(t).expect("dominance terms are polynomial"))
}

struct Dominance {
    facts: Facts,
}

impl Dominance {
    fn le(&self, l: &Term, r: &Term) -> Result<LeFact, BuildError> {
        let l = canon(l);
        let r = canon(r);
        let proof = self.facts.prove_le(&l, &r)?;
        Ok(LeFact { proof, lhs: l, rhs: r })
    }

    fn remember(&mut self, fact: &LeFact) {
        self.facts.add_fact(
            fact.proof.clone(),
            Formula::Le(fact.lhs.clone(), fact.rhs.clone()),
        );
    }

    /// Wrap an axiom conclusion into canonical shape.
    fn canonical(&self, proof: Proof, raw_l: Term, raw_r: Term) -> Result<LeFact, BuildError> {
        let lhs = canon(&raw_l);
        let rhs = canon(&raw_r);
        let proof = reshape_cmp(
            proof,
            &Formula::Le(raw_l, raw_r),
            &Formula::Le(lhs.clone(), rhs.clone()),
        )?;
        Ok(LeFact { proof, lhs, rhs })
    }

    /// From `a <= b` and `c <= d`, derive `a + c <= b + d`.
    fn le_add(&self, d1: &LeFact, d2: &LeFact) -> Result<LeFact, BuildError> {
        let first = self.canonical(
            imp_elim(
                axiom_ref(
                    "add-mono-le",
                    &[
                        ("x", d1.lhs.clone()),
                        ("y", d1.rhs.clone()),
                        ("z", d2.lhs.clone()),
                    ],
                ),
                d1.proof.clone(),
            ),
            d1.lhs.clone() + d2.lhs.clone(),
            d1.rhs.clone() + d2.lhs.clone(),
        )?;
        let second = self.canonical(
            imp_elim(
                axiom_ref(
                    "add-mono-le",
                    &[
                        ("x", d2.lhs.clone()),
                        ("y", d2.rhs.clone()),
                        ("z", d1.rhs.clone()),
                    ],
                ),
                d2.proof.clone(),
            ),
            d2.lhs.clone() + d1.rhs.clone(),
            d2.rhs.clone() + d1.rhs.clone(),
        )?;
        self.trans(&first, &second)
    }

    fn trans(&self, d1: &LeFact, d2: &LeFact) -> Result<LeFact, BuildError> {
        if d1.rhs != d2.lhs {
            return Err(BuildError::Malformed(format!(
                "transitivity mismatch: {} vs {}",
                d1.rhs, d2.lhs
            )));
        }
        let proof = imp_elim2(
            axiom_ref(
                "le-trans",
                &[
                    ("x", d1.lhs.clone()),
                    ("y", d1.rhs.clone()),
                    ("z", d2.rhs.clone()),
                ],
            ),
            d1.proof.clone(),
            d2.proof.clone(),
        );
        Ok(LeFact {
            proof,
            lhs: d1.lhs.clone(),
            rhs: d2.rhs.clone(),
        })
    }

    /// Multiply both sides by a nonnegative literal.
    fn scale(&self, d: &LeFact, k: &Int) -> Result<LeFact, BuildError> {
        let k_term = Term::Int(k.clone());
        let nonneg = Proof::ComputeLeaf(Formula::Le(Term::int(0), k_term.clone()));
        let raw = imp_elim2(
            axiom_ref(
                "mul-mono-le",
                &[
                    ("x", d.lhs.clone()),
                    ("y", d.rhs.clone()),
                    ("z", k_term.clone()),
                ],
            ),
            nonneg,
            d.proof.clone(),
        );
        self.canonical(
            raw,
            d.lhs.clone() * k_term.clone(),
            d.rhs.clone() * k_term,
        )
    }

    /// Multiply both sides by a provably nonnegative term.
    fn scale_term(&self, d: &LeFact, z: &Term) -> Result<LeFact, BuildError> {
        let z = canon(z);
        let nonneg = self.facts.prove_le(&Term::int(0), &z)?;
        let raw = imp_elim2(
            axiom_ref(
                "mul-mono-le",
                &[("x", d.lhs.clone()), ("y", d.rhs.clone()), ("z", z.clone())],
            ),
            nonneg,
            d.proof.clone(),
        );
        self.canonical(raw, d.lhs.clone() * z.clone(), d.rhs.clone() * z)
    }

    /// From `a <= b`, derive `-b <= -a`.
    fn negate(&self, d: &LeFact) -> Result<LeFact, BuildError> {
        let z = canon(
            &(Term::int(0) - d.lhs.clone() - d.rhs.clone()),
        );
        let raw = imp_elim(
            axiom_ref(
                "add-mono-le",
                &[
                    ("x", d.lhs.clone()),
                    ("y", d.rhs.clone()),
                    ("z", z.clone()),
                ],
            ),
            d.proof.clone(),
        );
        self.canonical(raw, d.lhs.clone() + z.clone(), d.rhs.clone() + z)
    }

    /// Add a literal to both sides.
    fn shift(&self, d: &LeFact, k: &Int) -> Result<LeFact, BuildError> {
        let k_term = Term::Int(k.clone());
        let raw = imp_elim(
            axiom_ref(
                "add-mono-le",
                &[
                    ("x", d.lhs.clone()),
                    ("y", d.rhs.clone()),
                    ("z", k_term.clone()),
                ],
            ),
            d.proof.clone(),
        );
        self.canonical(raw, d.lhs.clone() + k_term.clone(), d.rhs.clone() + k_term)
    }

    /// `x^a <= x^b` for literals `a <= b`, given `1 <= x` among the
    /// facts.
    fn pow_exp_mono(&self, x: &Term, a: usize, b: usize) -> Result<LeFact, BuildError> {
        let xa = canon(&Term::pow(x.clone(), Term::int(a as i64)));
        let xb = canon(&Term::pow(x.clone(), Term::int(b as i64)));
        if a == b {
            return self.le(&xa, &xb);
        }
        let gap = Term::int((b - a) as i64);
        let one = Term::int(1);
        // 1^(b-a) <= x^(b-a)
        let one_le_x = self.facts.prove_le(&one, x)?;
        let raw = imp_elim3(
            axiom_ref(
                "pow-mono-le",
                &[("x", one.clone()), ("y", x.clone()), ("n", gap.clone())],
            ),
            Proof::ComputeLeaf(Formula::Le(Term::int(0), one.clone())),
            Proof::ComputeLeaf(Formula::Le(Term::int(0), gap.clone())),
            one_le_x,
        );
        let unit = self.canonical(
            raw,
            Term::pow(one.clone(), gap.clone()),
            Term::pow(x.clone(), gap.clone()),
        )?;
        // scale by x^a
        let scaled = self.scale_term(&unit, &xa)?;
        // scaled: x^a <= x^(b-a) * x^a = x^b
        if scaled.lhs != xa || scaled.rhs != xb {
            return Err(BuildError::Malformed(format!(
                "power monotonicity derived {} <= {}",
                scaled.lhs, scaled.rhs
            )));
        }
        Ok(scaled)
    }
}

fn imp_elim3(f: Proof, a: Proof, b: Proof, c: Proof) -> Proof {
    imp_elim(imp_elim2(f, a, b), c)
}

/// Under hypotheses `0 <= x` (label `x`) and `bound < x` (label `hgt`),
/// derive `p(x) != 0` generically.
fn dominance_tail(p: &IntPoly, b: &Nat, facts: Facts) -> Result<Proof, DiophError> {
    let x = Term::var("x");
    let n = p.degree();
    let b_int = Int::from(b.clone());
    let c_int = &b_int + 1;
    let mut dx = Dominance { facts };

    // leading-positive form: q = p or q = -p
    let negated = p.leading().is_negative();
    let q: Vec<Int> = if negated {
        p.coeffs.iter().map(|c| -c).collect()
    } else {
        p.coeffs.clone()
    };
    let q_poly = IntPoly { coeffs: q };
    let q_term = canon(&q_poly.term());
    let a_n = q_poly.leading().clone();

    // c <= x from bound < x
    let succ = imp_elim2(
        axiom_ref("succ-gt", &[("x", x.clone()), ("t", Term::Int(b_int.clone()))]),
        dx.facts.prove_le(&Term::int(0), &x)?,
        Proof::ComputeLeaf(Formula::Le(Term::int(0), Term::Int(b_int.clone()))),
    );
    let bridge = imp_elim(
        Proof::AndElimL(succ.boxed()),
        Proof::HypRef("hgt".into()),
    );
    let c_le_x = dx.canonical(
        bridge,
        Term::Int(b_int.clone()) + Term::int(1),
        x.clone(),
    )?;
    dx.remember(&c_le_x);
    let one_le_x = dx.le(&Term::int(1), &x)?;
    dx.remember(&one_le_x);

    // each low-order term is at most max|a_i| * x^(n-1)
    let max_abs: Int = q_poly.coeffs[..n]
        .iter()
        .map(|c| c.abs())
        .max()
        .expect("degree >= 1");
    let pow_top = canon(&Term::pow(x.clone(), Term::int((n - 1) as i64)));
    let mut low_bound: Option<LeFact> = None;
    for (i, coeff) in q_poly.coeffs[..n].iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let k = -coeff.clone(); // the negated-term coefficient
        let xi = canon(&Term::pow(x.clone(), Term::int(i as i64)));
        let term_fact = if !k.is_negative() {
            // k x^i <= k x^(n-1) <= max x^(n-1)
            let pows = dx.pow_exp_mono(&x, i, n - 1)?;
            let scaled = dx.scale(&pows, &k)?;
            let lift = dx.canonical(
                imp_elim2(
                    axiom_ref(
                        "mul-mono-le",
                        &[
                            ("x", Term::Int(k.clone())),
                            ("y", Term::Int(max_abs.clone())),
                            ("z", pow_top.clone()),
                        ],
                    ),
                    dx.facts.prove_le(&Term::int(0), &pow_top)?,
                    Proof::ComputeLeaf(Formula::Le(
                        Term::Int(k.clone()),
                        Term::Int(max_abs.clone()),
                    )),
                ),
                Term::Int(k.clone()) * pow_top.clone(),
                Term::Int(max_abs.clone()) * pow_top.clone(),
            )?;
            dx.trans(&scaled, &lift)?
        } else {
            // k < 0: k x^i <= 0 <= max x^(n-1)
            let nn = dx.le(&Term::int(0), &(Term::Int(-k.clone()) * xi.clone()))?;
            let flipped = dx.negate(&nn)?;
            let right = dx.le(&Term::int(0), &(Term::Int(max_abs.clone()) * pow_top.clone()))?;
            dx.trans(&flipped, &right)?
        };
        low_bound = Some(match low_bound {
            None => term_fact,
            Some(acc) => dx.le_add(&acc, &term_fact)?,
        });
    }
    let low_bound = low_bound.expect("a_0 != 0 whenever no root exists");

    // lift the collected bound (t nonzero terms, each at most
    // max * x^(n-1)) up to B * x^(n-1) with B = n * max
    let target_rhs = canon(&(Term::Int(b_int.clone()) * pow_top.clone()));
    let low_bound = if low_bound.rhs == target_rhs {
        low_bound
    } else {
        let collected_coeff: Int = poly_of(&low_bound.rhs)
            .map_err(|e| DiophError::Construction(e.to_string()))?
            .monomials()
            .first()
            .map(|(c, _)| c.clone())
            .unwrap_or_else(Int::zero);
        let lift = dx.canonical(
            imp_elim2(
                axiom_ref(
                    "mul-mono-le",
                    &[
                        ("x", Term::Int(collected_coeff.clone())),
                        ("y", Term::Int(b_int.clone())),
                        ("z", pow_top.clone()),
                    ],
                ),
                dx.facts.prove_le(&Term::int(0), &pow_top)?,
                Proof::ComputeLeaf(Formula::Le(
                    Term::Int(collected_coeff.clone()),
                    Term::Int(b_int.clone()),
                )),
            ),
            Term::Int(collected_coeff) * pow_top.clone(),
            Term::Int(b_int.clone()) * pow_top.clone(),
        )?;
        dx.trans(&low_bound, &lift)?
    };

    // a_n x^n - B x^(n-1) <= q(x)
    let lead = canon(&(Term::Int(a_n.clone()) * Term::pow(x.clone(), Term::int(n as i64))));
    let lead_refl = dx.le(&lead, &lead)?;
    let neg_low = dx.negate(&low_bound)?;
    let lower = dx.le_add(&lead_refl, &neg_low)?;
    if lower.rhs != q_term {
        return Err(DiophError::Construction(format!(
            "dominance reassembly reached {}, wanted {q_term}",
            lower.rhs
        )));
    }

    // 1 <= a_n x - B
    let e_term = canon(&(Term::Int(a_n.clone()) * x.clone() - Term::Int(b_int.clone())));
    let scaled_c = dx.scale(&c_le_x, &a_n)?;
    let shifted = dx.shift(&scaled_c, &(-b_int.clone()))?;
    let floor = dx.le(
        &Term::int(1),
        &Term::Int(&a_n * &c_int - &b_int),
    )?;
    let one_le_e = dx.trans(&floor, &shifted)?;
    if one_le_e.rhs != e_term {
        return Err(DiophError::Construction(format!(
            "linear floor reached {}, wanted {e_term}",
            one_le_e.rhs
        )));
    }
    dx.remember(&one_le_e);

    // e <= x^(n-1) e = a_n x^n - B x^(n-1)
    let top_unit = dx.pow_exp_mono(&x, 0, n - 1)?;
    let widened = dx.scale_term(&top_unit, &e_term)?;
    if widened.lhs != e_term || widened.rhs != lower.lhs {
        return Err(DiophError::Construction(format!(
            "dominance widening derived {} <= {}",
            widened.lhs, widened.rhs
        )));
    }

    // 1 <= q(x)
    let one_le_q = dx.trans(&dx.trans(&one_le_e, &widened)?, &lower)?;
    dx.remember(&one_le_q);

    let p_term = canon(&p.term());
    if !negated {
        // 0 < q(x), hence q(x) != 0
        let succ = imp_elim2(
            axiom_ref(
                "succ-gt",
                &[("x", q_term.clone()), ("t", Term::int(0))],
            ),
            dx.facts.prove_le(&Term::int(0), &q_term)?,
            Proof::ComputeLeaf(Formula::Le(Term::int(0), Term::int(0))),
        );
        let strict = imp_elim(
            Proof::AndElimR(succ.boxed()),
            reshape_cmp(
                one_le_q.proof,
                &Formula::Le(Term::int(1), q_term.clone()),
                &Formula::Le(Term::int(0) + Term::int(1), q_term.clone()),
            )?,
        );
        // strict: 0 < q(x)
        let neq = imp_elim(
            axiom_ref("lt-neq", &[("x", Term::int(0)), ("y", q_term.clone())]),
            strict,
        );
        let flipped = imp_elim(
            axiom_ref("neq-sym", &[("x", Term::int(0)), ("y", q_term.clone())]),
            neq,
        );
        Ok(flipped)
    } else {
        // q = -p: from 1 <= -p(x), p(x) <= -1 < 0, hence p(x) != 0
        let z = canon(&(p_term.clone() - Term::int(1)));
        let raw = imp_elim(
            axiom_ref(
                "add-mono-le",
                &[("x", Term::int(1)), ("y", q_term.clone()), ("z", z.clone())],
            ),
            one_le_q.proof,
        );
        let le_neg_one = dx.canonical(
            raw,
            Term::int(1) + z.clone(),
            q_term + z,
        )?;
        let strict = imp_elim2(
            axiom_ref(
                "le-lt-trans",
                &[
                    ("x", p_term.clone()),
                    ("y", Term::int(-1)),
                    ("z", Term::int(0)),
                ],
            ),
            le_neg_one.proof,
            Proof::ComputeLeaf(Formula::Lt(Term::int(-1), Term::int(0))),
        );
        let neq = imp_elim(
            axiom_ref("lt-neq", &[("x", p_term), ("y", Term::int(0))]),
            strict,
        );
        Ok(neq)
    }
}

// ---------------------------------------------------------------------
// The interval prover
// ---------------------------------------------------------------------

/// Largest `t` with `t^k <= c`, by binary search.
fn kth_root_floor(c: &Int, k: u32) -> Int {
    let mut lo = Int::zero();
    let mut hi = c.clone() + 1;
    // invariant: lo^k <= c < hi^k
    while &lo + 1 < hi {
        let mid: Int = (&lo + &hi) / 2;
        if num_traits::pow::Pow::pow(mid.clone(), k) <= *c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Prove `forall x . x^k - c != 0` with two generic intervals: all
/// `x <= t` make the power too small, all `x > t` make it too large,
/// where `t` is the integer k-th root floor of `c`. No enumeration.
pub fn prove_no_solution_interval(p: &IntPoly) -> Result<Proof, DiophError> {
    let (k, c) = match interval_shape(p) {
        Some(parts) => parts,
        None => return Err(DiophError::UnsupportedShape),
    };
    let t = kth_root_floor(&c, k);
    let t_pow = num_traits::pow::Pow::pow(t.clone(), k);
    if t_pow == c {
        return Err(DiophError::RootFound(t.to_biguint().expect("t >= 0")));
    }
    let t1: Int = &t + 1;
    let t1_pow = num_traits::pow::Pow::pow(t1.clone(), k);

    let x = Term::var("x");
    let p_term = canon(&p.term());
    let k_term = Term::int(k as i64);
    let t_term = Term::Int(t.clone());

    // branch x <= t: x^k <= t^k = t_pow, so p(x) <= t_pow - c < 0
    let below = {
        let hyp = Formula::Le(x.clone(), t_term.clone());
        let facts = Facts::new().with_nat_var("x").with_hyp("hle", hyp.clone());
        let dx = Dominance { facts };
        let body = (|| -> Result<Proof, BuildError> {
            let raw = imp_elim3(
                axiom_ref(
                    "pow-mono-le",
                    &[("x", x.clone()), ("y", t_term.clone()), ("n", k_term.clone())],
                ),
                dx.facts.prove_le(&Term::int(0), &x)?,
                Proof::ComputeLeaf(Formula::Le(Term::int(0), k_term.clone())),
                Proof::HypRef("hle".into()),
            );
            // x^k <= t^k; evaluate the right side
            let xk = Term::pow(x.clone(), k_term.clone());
            let evaluated = Proof::EqSubst {
                equality: Proof::ComputeLeaf(Formula::Eq(
                    Term::pow(t_term.clone(), k_term.clone()),
                    Term::Int(t_pow.clone()),
                ))
                .boxed(),
                target: raw.boxed(),
                position: vec![1],
            };
            let fact = dx.canonical(evaluated, xk, Term::Int(t_pow.clone()))?;
            // shift by -c: p(x) <= t_pow - c
            let shifted = dx.shift(&fact, &(-c.clone()))?;
            if shifted.lhs != p_term {
                return Err(BuildError::Malformed(format!(
                    "interval lower branch at {}, wanted {p_term}",
                    shifted.lhs
                )));
            }
            let strict = imp_elim2(
                axiom_ref(
                    "le-lt-trans",
                    &[
                        ("x", p_term.clone()),
                        ("y", Term::Int(&t_pow - &c)),
                        ("z", Term::int(0)),
                    ],
                ),
                shifted.proof,
                Proof::ComputeLeaf(Formula::Lt(Term::Int(&t_pow - &c), Term::int(0))),
            );
            Ok(imp_elim(
                axiom_ref("lt-neq", &[("x", p_term.clone()), ("y", Term::int(0))]),
                strict,
            ))
        })()?;
        Proof::ImpIntro {
            label: "hle".into(),
            hyp,
            body: body.boxed(),
        }
    };

    // branch t < x: t+1 <= x, so t1_pow = (t+1)^k <= x^k and p(x) > 0
    let above = {
        let hyp = Formula::Lt(t_term.clone(), x.clone());
        let facts = Facts::new().with_nat_var("x").with_hyp("hgt", hyp.clone());
        let dx = Dominance { facts };
        let body = (|| -> Result<Proof, BuildError> {
            let succ = imp_elim2(
                axiom_ref("succ-gt", &[("x", x.clone()), ("t", t_term.clone())]),
                dx.facts.prove_le(&Term::int(0), &x)?,
                Proof::ComputeLeaf(Formula::Le(Term::int(0), t_term.clone())),
            );
            let stepped = imp_elim(
                Proof::AndElimL(succ.boxed()),
                Proof::HypRef("hgt".into()),
            );
            let t1_le_x = dx.canonical(stepped, t_term.clone() + Term::int(1), x.clone())?;
            let raw = imp_elim3(
                axiom_ref(
                    "pow-mono-le",
                    &[
                        ("x", Term::Int(t1.clone())),
                        ("y", x.clone()),
                        ("n", k_term.clone()),
                    ],
                ),
                Proof::ComputeLeaf(Formula::Le(Term::int(0), Term::Int(t1.clone()))),
                Proof::ComputeLeaf(Formula::Le(Term::int(0), k_term.clone())),
                t1_le_x.proof,
            );
            // (t+1)^k <= x^k; evaluate the left side
            let evaluated = Proof::EqSubst {
                equality: Proof::ComputeLeaf(Formula::Eq(
                    Term::pow(Term::Int(t1.clone()), k_term.clone()),
                    Term::Int(t1_pow.clone()),
                ))
                .boxed(),
                target: raw.boxed(),
                position: vec![0],
            };
            let fact = dx.canonical(
                evaluated,
                Term::Int(t1_pow.clone()),
                Term::pow(x.clone(), k_term.clone()),
            )?;
            let shifted = dx.shift(&fact, &(-c.clone()))?;
            if shifted.rhs != p_term {
                return Err(BuildError::Malformed(format!(
                    "interval upper branch at {}, wanted {p_term}",
                    shifted.rhs
                )));
            }
            let strict = imp_elim2(
                axiom_ref(
                    "lt-le-trans",
                    &[
                        ("x", Term::int(0)),
                        ("y", Term::Int(&t1_pow - &c)),
                        ("z", p_term.clone()),
                    ],
                ),
                Proof::ComputeLeaf(Formula::Lt(Term::int(0), Term::Int(&t1_pow - &c))),
                shifted.proof,
            );
            let neq = imp_elim(
                axiom_ref("lt-neq", &[("x", Term::int(0)), ("y", p_term.clone())]),
                strict,
            );
            Ok(imp_elim(
                axiom_ref("neq-sym", &[("x", Term::int(0)), ("y", p_term.clone())]),
                neq,
            ))
        })()?;
        Proof::ImpIntro {
            label: "hgt".into(),
            hyp,
            body: body.boxed(),
        }
    };

    let trichotomy = Proof::ForallElim {
        universal: axiom_ref("trichotomy", &[("t", t_term)]).boxed(),
        witness: x,
        bounds: vec![Proof::HypRef("x".into())],
    };
    Ok(Proof::ForallIntro {
        var: "x".into(),
        body: Proof::CaseSplit {
            disj: trichotomy.boxed(),
            left: below.boxed(),
            right: above.boxed(),
        }
        .boxed(),
    })
}

/// `Some((k, c))` when `p = x^k - c` with `c >= 1`.
fn interval_shape(p: &IntPoly) -> Option<(u32, Int)> {
    let n = p.degree();
    if p.leading() != &Int::from(1) {
        return None;
    }
    let c = -p.coeffs[0].clone();
    if !c.is_positive() {
        return None;
    }
    if p.coeffs[1..n].iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some((n as u32, c))
}

/// The interval prover's threshold data for display: `t`, `t^k`, and
/// `(t+1)^k`.
pub fn interval_threshold(p: &IntPoly) -> Result<(Int, Int, Int), DiophError> {
    let (k, c) = interval_shape(p).ok_or(DiophError::UnsupportedShape)?;
    let t = kth_root_floor(&c, k);
    let t_pow = num_traits::pow::Pow::pow(t.clone(), k);
    if t_pow == c {
        return Err(DiophError::RootFound(t.to_biguint().expect("t >= 0")));
    }
    let t1: Int = &t + 1;
    let t1_pow = num_traits::pow::Pow::pow(t1, k);
    Ok((t, t_pow, t1_pow))
}

/// Convenience: run a prover end to end and also check the result.
pub fn check_statement(p: &IntPoly, proof: &Proof) -> crate::kernel::CheckReport {
    crate::kernel::check(proof, &p.statement(), &LemmaStore::new())
}
