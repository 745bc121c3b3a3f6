//! Pre-constructed, kernel-checked proof objects: the base-b seed
//! identity, the geometric block-merge lemma, the general
//! base-b/repetition identity, the digit-scaling statement, and the
//! arithmetic core of the division-remainder argument.
//!
//! Every builder returns a [`LemmaEntry`]; [`standard_library`] checks
//! them in dependency order and refuses to hand out a store containing
//! anything unverified. The proofs here are generic: none of them
//! enumerates cases.

pub mod chain;
pub mod derive;

use chain::ChainBuilder;
use derive::{BuildError, Facts};

use crate::kernel::{
    CheckFailure, LemmaEntry, LemmaStore, Proof, RewriteRule,
};
use crate::lang::{parse_formula, parse_term, Formula, Term};

fn fm(s: &str) -> Formula {
    parse_formula(s).expect("library statements parse")
}

fn tm(s: &str) -> Term {
    parse_term(s).expect("library terms parse")
}

fn entry(name: &str, statement: Formula, proof: Proof, tags: &[&str]) -> LemmaEntry {
    LemmaEntry {
        name: name.to_string(),
        statement,
        proof,
        tags: tags.iter().map(|t| t.to_string()).collect(),
    }
}

fn build_error(name: &str, e: BuildError) -> ! {
    panic!("building lemma {name}: {e}")
}

/// `forall b >= 2`: the seed times `b - 1` is the base-b repunit:
/// `(sum_{i=0}^{b-2} (b-2-i) b^i + 1) * (b - 1) = sum_{i=0}^{b-2} b^i`.
///
/// The chain expands the product, telescopes the difference of the two
/// shifted sums, and reassembles the repunit; no case enumeration.
pub fn repunit_core() -> LemmaEntry {
    let name = "repunit-core";
    let statement = fm(
        "forall b . 2 <= b => \
         (sum(i, 0, b - 2, (b - 2 - i) * b^i) + 1) * (b - 1) = sum(i, 0, b - 2, b^i)",
    );
    let seed = tm("sum(i, 0, b - 2, (b - 2 - i) * b^i)");
    let seed_body = tm("(b - 2 - i) * b^i");
    let start = (seed.clone() + Term::int(1)) * tm("b - 1");
    let rhs = tm("sum(i, 0, b - 2, b^i)");

    let facts = Facts::new().with_nat_var("b").with_hyp("hb", fm("2 <= b"));
    let lemmas = LemmaStore::new();
    let mut c = ChainBuilder::new(start, &lemmas, facts);
    let proof = (|| -> Result<Proof, BuildError> {
        // (seed + 1) * (b - 1)  ~>  seed*(b-1) + 1*(b-1)
        c.apply(RewriteRule::Distribute, &[])?;
        // seed * (b - 1)  ~>  seed*b - seed*1
        c.apply(RewriteRule::Distribute, &[0])?;
        // push both factors through the sums
        c.apply(RewriteRule::SumLinearity, &[0, 0])?;
        c.apply(RewriteRule::SumLinearity, &[0, 1])?;
        // combine into a single sum of differences
        c.apply(RewriteRule::SumLinearity, &[0])?;
        // shape the body as a telescoping difference plus b^(i+1)
        let stepped = seed_body.subst("i", &tm("i + 1")).expect("closed step");
        c.ring(
            &[0, 2],
            (stepped.clone() - seed_body.clone()) + Term::pow(tm("b"), tm("i + 1")),
        )?;
        // split the sum back apart and telescope the first half
        let tele = Term::sum("i", tm("0"), tm("b - 2"), stepped - seed_body.clone());
        let pows = Term::sum("i", tm("0"), tm("b - 2"), Term::pow(tm("b"), tm("i + 1")));
        c.apply_rev(RewriteRule::SumLinearity, &[0], tele + pows)?;
        c.apply(RewriteRule::Telescope, &[0, 0])?;
        // realign the power sum to exponents 1 .. b-1
        c.apply(RewriteRule::IndexShift(Term::int(1)), &[0, 1])?;
        c.ring(&[0, 1, 0], tm("1"))?;
        c.ring(&[0, 1, 1], tm("b - 1"))?;
        c.ring(&[0, 1, 2], tm("b^i"))?;
        // peel the top power, cancel it against the telescoped part
        c.apply(RewriteRule::SumSplitLast, &[0, 1])?;
        c.ring(&[0, 1, 0, 1], tm("b - 2"))?;
        c.ring(
            &[],
            Term::pow(tm("b"), tm("0"))
                + Term::sum("i", tm("0 + 1"), tm("b - 2"), tm("b^i")),
        )?;
        // reassemble sum_{i=0}^{b-2} b^i
        c.apply_rev(RewriteRule::SumSplitFirst, &[], rhs.clone())?;
        c.finish(&rhs)
    })()
    .unwrap_or_else(|e| build_error(name, e));

    let proof = Proof::ForallIntro {
        var: "b".into(),
        body: Proof::ImpIntro {
            label: "hb".into(),
            hyp: fm("2 <= b"),
            body: proof.boxed(),
        }
        .boxed(),
    };
    entry(name, statement, proof, &["generic", "repunit"])
}

/// Geometric block merge:
/// `forall x, m >= 1, p`:
/// `sum_{i=0}^{m-1} x^i * sum_{j=0}^{p-1} x^(m j) = sum_{k=0}^{m p - 1} x^k`,
/// by induction on the repetition count `p`.
pub fn geom_merge() -> LemmaEntry {
    let name = "geom-merge";
    let equation = fm(
        "sum(i, 0, m - 1, x^i) * sum(j, 0, p - 1, x^(m * j)) = sum(k, 0, m * p - 1, x^k)",
    );
    let statement = Formula::forall_nat(
        "x",
        Formula::forall_nat(
            "m",
            Formula::implies(fm("1 <= m"), Formula::forall_nat("p", equation.clone())),
        ),
    );
    let lemmas = LemmaStore::new();
    let outer_facts = Facts::new()
        .with_nat_var("x")
        .with_nat_var("m")
        .with_hyp("hm", fm("1 <= m"));

    // base case: P[p := 0], both sides empty
    let base = (|| -> Result<Proof, BuildError> {
        let p0 = equation.subst("p", &Term::int(0)).expect("closed subst");
        let Formula::Eq(lhs0, rhs0) = &p0 else { unreachable!() };
        let mut c = ChainBuilder::new(lhs0.clone(), &lemmas, outer_facts.clone());
        c.apply(RewriteRule::SumEmpty, &[1])?;
        c.apply(RewriteRule::SumLinearity, &[])?;
        c.ring(&[2], tm("0 - 0"))?;
        c.apply(RewriteRule::Telescope, &[])?;
        c.ring(&[], tm("0"))?;
        c.apply_rev(RewriteRule::SumEmpty, &[], rhs0.clone())?;
        c.finish(rhs0)
    })()
    .unwrap_or_else(|e| build_error(name, e));

    // step: assuming P(p), derive P(p+1)
    let step_facts = outer_facts
        .clone()
        .with_nat_var("p")
        .with_hyp("ih", equation.clone());
    let step_body = (|| -> Result<Proof, BuildError> {
        let succ = equation
            .subst("p", &tm("p + 1"))
            .expect("closed subst");
        let Formula::Eq(lhs1, rhs1) = &succ else { unreachable!() };
        let Formula::Eq(lhs_p, rhs_p) = &equation else { unreachable!() };

        // peel the last block factor off the left side
        let mut c = ChainBuilder::new(lhs1.clone(), &lemmas, step_facts.clone());
        c.ring(&[1, 1], tm("p"))?;
        c.apply(RewriteRule::SumSplitLast, &[1])?;
        c.apply(RewriteRule::Distribute, &[])?;
        let (peeled, mid_raw) = c.finish_here();
        debug_assert_eq!(
            &mid_raw,
            &(lhs_p.clone() + tm("sum(i, 0, m - 1, x^i)") * Term::pow(tm("x"), tm("m * p")))
        );

        // rewrite the finished block by the induction hypothesis
        let with_ih = Proof::EqSubst {
            equality: Proof::HypRef("ih".into()).boxed(),
            target: peeled.boxed(),
            position: vec![1, 0],
        };
        let mid = rhs_p.clone()
            + tm("sum(i, 0, m - 1, x^i)") * Term::pow(tm("x"), tm("m * p"));

        // absorb the new block into the long run of powers
        let mut c = ChainBuilder::new(mid.clone(), &lemmas, step_facts.clone());
        c.apply(RewriteRule::SumLinearity, &[1])?;
        c.apply(RewriteRule::PowAddExp, &[1, 2])?;
        c.apply(RewriteRule::IndexShift(tm("m * p")), &[1])?;
        c.ring(&[1, 0], tm("m * p - 1 + 1"))?;
        c.ring(&[1, 1], tm("m * (p + 1) - 1"))?;
        c.ring(&[1, 2], tm("x^i"))?;
        c.ring(
            &[1],
            Term::sum("k", tm("m * p - 1 + 1"), tm("m * (p + 1) - 1"), tm("x^k")),
        )?;
        c.apply_rev(
            RewriteRule::SumSplitAt(tm("m * p - 1")),
            &[],
            rhs1.clone(),
        )?;
        let merged = c.finish(rhs1)?;

        // chain the two equalities
        let trans = derive::imp_elim2(
            derive::axiom_ref(
                "eq-trans",
                &[
                    ("x", lhs1.clone()),
                    ("y", mid),
                    ("z", rhs1.clone()),
                ],
            ),
            with_ih,
            merged,
        );
        Ok(trans)
    })()
    .unwrap_or_else(|e| build_error(name, e));

    let step = Proof::ForallIntro {
        var: "p".into(),
        body: Proof::ImpIntro {
            label: "ih".into(),
            hyp: equation.clone(),
            body: step_body.boxed(),
        }
        .boxed(),
    };
    let induction = Proof::Induction {
        var: "p".into(),
        base: base.boxed(),
        step: step.boxed(),
    };
    let proof = Proof::ForallIntro {
        var: "x".into(),
        body: Proof::ForallIntro {
            var: "m".into(),
            body: Proof::ImpIntro {
                label: "hm".into(),
                hyp: fm("1 <= m"),
                body: induction.boxed(),
            }
            .boxed(),
        }
        .boxed(),
    };
    entry(name, statement, proof, &["generic", "geometric"])
}

/// The full identity: `forall b >= 2, p >= 1`:
/// `(seed(b) + 1) * sum_{j=0}^{p-1} b^((b-1)j) * (b - 1) = sum_{k=0}^{(b-1)p-1} b^k`,
/// by rewriting with the seed identity and the block merge.
pub fn repunit_general() -> LemmaEntry {
    let name = "repunit-general";
    let statement = fm(
        "forall b . 2 <= b => (forall p . 1 <= p => \
         (sum(i, 0, b - 2, (b - 2 - i) * b^i) + 1) * sum(j, 0, p - 1, b^((b - 1) * j)) * (b - 1) \
         = sum(k, 0, (b - 1) * p - 1, b^k))",
    );
    // the chain references the other two lemmas, so build it against a
    // store that has them
    let mut lemmas = LemmaStore::new();
    lemmas
        .insert_checked(repunit_core())
        .expect("repunit-core checks");
    lemmas
        .insert_checked(geom_merge())
        .expect("geom-merge checks");

    let facts = Facts::new()
        .with_nat_var("b")
        .with_hyp("hb", fm("2 <= b"))
        .with_nat_var("p")
        .with_hyp("hp", fm("1 <= p"));
    let start = tm(
        "(sum(i, 0, b - 2, (b - 2 - i) * b^i) + 1) * sum(j, 0, p - 1, b^((b - 1) * j)) * (b - 1)",
    );
    let rhs = tm("sum(k, 0, (b - 1) * p - 1, b^k)");
    let mut c = ChainBuilder::new(start, &lemmas, facts);
    let chain = (|| -> Result<Proof, BuildError> {
        // bring the two factors of the seed identity together
        c.ring(
            &[],
            (tm("sum(i, 0, b - 2, (b - 2 - i) * b^i) + 1") * tm("b - 1"))
                * tm("sum(j, 0, p - 1, b^((b - 1) * j))"),
        )?;
        c.apply(
            RewriteRule::LemmaRewrite("repunit-core".into(), vec![("b".into(), tm("b"))]),
            &[0],
        )?;
        c.ring(&[0, 1], tm("b - 1 - 1"))?;
        c.apply(
            RewriteRule::LemmaRewrite(
                "geom-merge".into(),
                vec![
                    ("x".into(), tm("b")),
                    ("m".into(), tm("b - 1")),
                    ("p".into(), tm("p")),
                ],
            ),
            &[],
        )?;
        c.finish(&rhs)
    })()
    .unwrap_or_else(|e| build_error(name, e));

    let proof = Proof::ForallIntro {
        var: "b".into(),
        body: Proof::ImpIntro {
            label: "hb".into(),
            hyp: fm("2 <= b"),
            body: Proof::ForallIntro {
                var: "p".into(),
                body: Proof::ImpIntro {
                    label: "hp".into(),
                    hyp: fm("1 <= p"),
                    body: chain.boxed(),
                }
                .boxed(),
            }
            .boxed(),
        }
        .boxed(),
    };
    entry(name, statement, proof, &["generic", "repunit"])
}

/// `forall n in [1, 9] . 12345679 * 9 * n = 111111111 * n`: the scaling
/// statement, proved by rewriting the seed product under a generic `n`
/// rather than enumerating the nine digits.
pub fn digit_scaling() -> LemmaEntry {
    let name = "digit-scaling";
    let statement = fm("forall n in [1, 9] . 12345679 * 9 * n = 111111111 * n");
    let lhs_n = tm("12345679 * 9 * n");
    let body = Proof::EqSubst {
        equality: Proof::ComputeLeaf(fm("12345679 * 9 = 111111111")).boxed(),
        target: Proof::AxiomRef {
            name: "eq-refl".into(),
            inst: vec![("x".into(), lhs_n)],
        }
        .boxed(),
        position: vec![1, 0],
    };
    let proof = Proof::ForallRangeIntro {
        var: "n".into(),
        lo: Term::int(1),
        hi: Term::int(9),
        body: body.boxed(),
    };
    entry(name, statement, proof, &["generic", "scaling"])
}

/// The arithmetic core of the division-remainder argument: for
/// `n in [1, 7]`, the next partial dividend `10n + 1` decomposes as
/// `9n + (n + 1)` with a remainder still below the divisor, and the
/// ninth partial dividend is exactly `9 * 9`.
pub fn division_invariant_core() -> LemmaEntry {
    let name = "division-invariant-core";
    let statement = fm(
        "(forall n in [1, 7] . 10 * n + 1 = 9 * n + (n + 1) /\\ n + 1 < 9) \
         /\\ 10 * 8 + 1 = 9 * 9 + 0",
    );
    let facts = Facts::new().with_range_var("n", &Term::int(1), &Term::int(7));
    let decomposition = derive::eq_by_ring(&tm("10 * n + 1"), &tm("9 * n + (n + 1)"))
        .unwrap_or_else(|e| build_error(name, e));
    let below = facts
        .prove_lt(&tm("n + 1"), &Term::int(9))
        .unwrap_or_else(|e| build_error(name, e));
    let ranged = Proof::ForallRangeIntro {
        var: "n".into(),
        lo: Term::int(1),
        hi: Term::int(7),
        body: Proof::AndIntro(decomposition.boxed(), below.boxed()).boxed(),
    };
    let terminal = Proof::ComputeLeaf(fm("10 * 8 + 1 = 9 * 9 + 0"));
    let proof = Proof::AndIntro(ranged.boxed(), terminal.boxed());
    entry(name, statement, proof, &["generic", "division"])
}

/// All five lemmas, checked in dependency order.
pub fn standard_library() -> Result<LemmaStore, CheckFailure> {
    let mut store = LemmaStore::new();
    store.insert_checked(repunit_core())?;
    store.insert_checked(geom_merge())?;
    store.insert_checked(repunit_general())?;
    store.insert_checked(digit_scaling())?;
    store.insert_checked(division_invariant_core())?;
    Ok(store)
}

/// Does the proof contain a range enumeration anywhere?
pub fn contains_range_enum(p: &Proof) -> bool {
    let mut found = false;
    walk(p, &mut |node| {
        if matches!(node, Proof::RangeEnum { .. }) {
            found = true;
        }
    });
    found
}

/// Pre-order traversal over all proof nodes, including rewrite side
/// proofs and enumeration cases.
pub fn walk(p: &Proof, f: &mut impl FnMut(&Proof)) {
    f(p);
    match p {
        Proof::ComputeLeaf(_) | Proof::AxiomRef { .. } | Proof::HypRef(_) => {}
        Proof::ForallIntro { body, .. }
        | Proof::ForallRangeIntro { body, .. }
        | Proof::ImpIntro { body, .. } => walk(body, f),
        Proof::ForallElim {
            universal, bounds, ..
        } => {
            walk(universal, f);
            for b in bounds {
                walk(b, f);
            }
        }
        Proof::RangeEnum { cases, .. } => {
            if let crate::kernel::CaseSource::Explicit(list) = cases {
                for c in list {
                    walk(c, f);
                }
            }
        }
        Proof::Induction { base, step, .. } => {
            walk(base, f);
            walk(step, f);
        }
        Proof::ImpElim { f: g, arg } => {
            walk(g, f);
            walk(arg, f);
        }
        Proof::AndIntro(l, r) => {
            walk(l, f);
            walk(r, f);
        }
        Proof::AndElimL(p) | Proof::AndElimR(p) => walk(p, f),
        Proof::CaseSplit { disj, left, right } => {
            walk(disj, f);
            walk(left, f);
            walk(right, f);
        }
        Proof::RewriteChain { steps, .. } => {
            for s in steps {
                for sp in &s.side_proofs {
                    walk(sp, f);
                }
            }
        }
        Proof::EqSubst {
            equality, target, ..
        } => {
            walk(equality, f);
            walk(target, f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{eval_formula, Env};
    use crate::Int;

    #[test]
    fn all_lemmas_check() {
        let store = standard_library().expect("library checks");
        assert_eq!(store.entries().len(), 5);
        for entry in store.entries() {
            assert!(
                !contains_range_enum(&entry.proof),
                "{} contains an enumeration",
                entry.name
            );
        }
    }

    #[test]
    fn repunit_core_instances() {
        let store = standard_library().unwrap();
        let core = store.get("repunit-core").unwrap();
        let Formula::ForallNat(_, body) = &core.statement else {
            panic!("unexpected shape")
        };
        // b = 10: the seed is 12345679 and the product is the repunit
        for b in [2i64, 10, 20] {
            let inst = body.subst("b", &Term::int(b)).unwrap();
            assert!(eval_formula(&inst, &Env::new()).unwrap(), "b = {b}");
        }
        // spot values
        let env = Env::new();
        assert!(eval_formula(
            &fm("(sum(i, 0, 10 - 2, (10 - 2 - i) * 10^i) + 1) * (10 - 1) = 111111111"),
            &env
        )
        .unwrap());
        assert!(eval_formula(
            &fm("sum(i, 0, 2 - 2, (2 - 2 - i) * 2^i) + 1 = 1"),
            &env
        )
        .unwrap());
    }

    #[test]
    fn geom_merge_instances() {
        // m=9, p=3, x=10 gives the 27-digit repunit; m=2, p=2, x=3 gives 40
        let eq = fm(
            "sum(i, 0, m - 1, x^i) * sum(j, 0, p - 1, x^(m * j)) = sum(k, 0, m * p - 1, x^k)",
        );
        for (x, m, p) in [(10i64, 9i64, 3i64), (3, 2, 2), (5, 1, 0), (7, 4, 1)] {
            let env = Env::new()
                .with("x", Int::from(x))
                .with("m", Int::from(m))
                .with("p", Int::from(p));
            assert!(eval_formula(&eq, &env).unwrap(), "x={x} m={m} p={p}");
        }
        let lhs = crate::lang::eval_term(
            &tm("sum(i, 0, 2 - 1, 3^i) * sum(j, 0, 2 - 1, 3^(2 * j))"),
            &Env::new(),
        )
        .unwrap();
        assert_eq!(lhs, Int::from(40));
    }

    #[test]
    fn repunit_general_grid() {
        let store = standard_library().unwrap();
        let general = store.get("repunit-general").unwrap();
        let Formula::ForallNat(_, outer) = &general.statement else {
            panic!("unexpected shape")
        };
        for b in 2..=12i64 {
            let inst_b = outer.subst("b", &Term::int(b)).unwrap();
            for p in 1..=3i64 {
                let Formula::Implies(_, rest) = &inst_b else {
                    panic!()
                };
                let Formula::ForallNat(_, inner) = &**rest else {
                    panic!()
                };
                let inst = inner.subst("p", &Term::int(p)).unwrap();
                assert!(eval_formula(&inst, &Env::new()).unwrap(), "b={b} p={p}");
            }
        }
    }

    #[test]
    fn digit_scaling_specializations() {
        let store = standard_library().unwrap();
        let scaling = store.get("digit-scaling").unwrap();
        // eliminating at n gives the three displayed products
        for (n, rhs) in [
            (1i64, "111111111"),
            (4, "444444444"),
            (7, "777777777"),
        ] {
            let elim = Proof::ForallElim {
                universal: scaling.proof.clone().boxed(),
                witness: Term::int(n),
                bounds: vec![],
            };
            let goal = fm(&format!("12345679 * 9 * {n} = 111111111 * {n}"));
            let report = crate::kernel::check(&elim, &goal, &store);
            assert!(report.accepted, "n={n}: {:?}", report.failure);
            let env = Env::new();
            assert!(eval_formula(
                &fm(&format!("12345679 * 9 * {n} = {rhs}")),
                &env
            )
            .unwrap());
        }
    }

    #[test]
    fn division_invariant_instances() {
        // n=1: 11 = 9 + 2 and 2 < 9; n=7: 71 = 63 + 8 and 8 < 9
        let body = fm("10 * n + 1 = 9 * n + (n + 1) /\\ n + 1 < 9");
        for n in 1..=7i64 {
            let env = Env::new().with("n", Int::from(n));
            assert!(eval_formula(&body, &env).unwrap(), "n={n}");
        }
        assert!(eval_formula(&fm("10 * 8 + 1 = 9 * 9 + 0"), &Env::new()).unwrap());
    }

    #[test]
    fn division_core_pairs_with_the_trace() {
        // the kernel-checked arithmetic core says the (n+1)-th partial
        // dividend decomposes as 9n + (n+1) with n+1 below the divisor;
        // the digit-level trace must realize exactly that: remainders
        // 1..8 then 0, quotient digits 0..7 then 9
        use crate::numeral::{long_divide_trace, repdigit};
        let repunit = repdigit(1, 9, 10).unwrap();
        let trace = long_divide_trace(&repunit, &crate::Nat::from(9u32), 10).unwrap();
        for n in 1..=7usize {
            let r_n = &trace.steps[n - 1].partial_remainder;
            assert_eq!(r_n, &crate::Nat::from(n));
            // next partial dividend is 10 n + 1, its digit is n and the
            // remainder n + 1, matching the lemma body at this n
            let next = &trace.steps[n];
            assert_eq!(next.partial_dividend, crate::Nat::from(10 * n + 1));
            assert_eq!(next.quotient_digit, n as u32);
            assert_eq!(next.partial_remainder, crate::Nat::from(n + 1));
            let body = fm("10 * n + 1 = 9 * n + (n + 1) /\\ n + 1 < 9");
            let env = Env::new().with("n", Int::from(n as i64));
            assert!(eval_formula(&body, &env).unwrap());
        }
        // the terminal step: 81 = 9 * 9 + 0
        let last = trace.steps.last().unwrap();
        assert_eq!(last.partial_dividend, crate::Nat::from(81u32));
        assert_eq!(last.quotient_digit, 9);
        assert_eq!(last.partial_remainder, crate::Nat::from(0u32));
    }

    #[test]
    fn random_instance_cross_validation() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x11b);
        let store = standard_library().unwrap();
        for entry in store.entries() {
            for _ in 0..25 {
                let inst = random_instance(&entry.statement, &mut rng);
                assert!(
                    eval_formula(&inst, &Env::new()).unwrap(),
                    "{}: {inst}",
                    entry.name
                );
            }
        }
    }

    /// Strip quantifiers and premises with in-range random values,
    /// returning a closed evaluable instance.
    fn random_instance(
        statement: &Formula,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Formula {
        use rand::Rng;
        let mut cur = statement.clone();
        loop {
            match cur {
                Formula::ForallNat(v, body) => {
                    let value = rng.gen_range(0i64..=8);
                    cur = body.subst(&v, &Term::int(value)).unwrap();
                }
                Formula::ForallRange(v, lo, hi, body) => {
                    let lo = crate::lang::eval_term(&lo, &Env::new()).unwrap();
                    let hi = crate::lang::eval_term(&hi, &Env::new()).unwrap();
                    use num_traits::ToPrimitive;
                    let value = rng.gen_range(lo.to_i64().unwrap()..=hi.to_i64().unwrap());
                    cur = body.subst(&v, &Term::int(value)).unwrap();
                }
                Formula::Implies(premise, body) => {
                    if eval_formula(&premise, &Env::new()) == Ok(true) {
                        cur = *body;
                    } else {
                        // premise false: the implication holds; report it
                        return Formula::implies(*premise, *body);
                    }
                }
                other => return other,
            }
        }
    }
}
