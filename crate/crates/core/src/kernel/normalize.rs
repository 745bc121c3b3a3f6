//! Polynomial normal forms for the rewrite engine.
//!
//! Terms are normalized to sums of monomials: an integer coefficient
//! times a sorted product of atoms. An atom is a variable or integer
//! base raised to a (normalized, polynomial) exponent, or a whole `Sum`
//! subterm treated as an opaque indeterminate keyed by its
//! alpha-normalized canonical print. Equal terms normalize identically;
//! powers of the same base merge by adding exponents, and bound sum
//! indices are identified up to renaming.
//!
//! The fragment is exactly what the proof library needs: coefficients
//! times power atoms `b^(polynomial in parameters)`; exponents may not
//! themselves contain powers with symbolic exponents.

use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt::Write as _;
use thiserror::Error;

use crate::lang::Term;
use crate::Int;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("non-linear symbolic exponent")]
    NonLinearExponent,
    #[error("unsupported base for a symbolic exponent")]
    SymbolicBase,
    #[error("negative literal exponent")]
    NegativeExponent,
    #[error("literal exponent too large to normalize")]
    ExponentTooLarge,
}

/// Base of a power atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AtomKey {
    Var(String),
    Lit(Int),
    /// A `Sum` subterm; the key string is its alpha-normalized print.
    Opaque(String),
}

/// `base ^ exp`. The payload keeps a reconstructible term for opaque
/// atoms; it is excluded from equality and ordering, which go through
/// the alpha-normalized key.
#[derive(Debug, Clone)]
pub struct Atom {
    pub key: AtomKey,
    pub exp: Poly,
    payload: Option<Term>,
}

impl Atom {
    /// `Some((name, e))` when the atom is a plain variable raised to a
    /// literal exponent.
    pub fn as_var_literal(&self) -> Option<(String, i64)> {
        use num_traits::ToPrimitive;
        let AtomKey::Var(name) = &self.key else {
            return None;
        };
        let exp = self.exp.as_constant()?.to_i64()?;
        Some((name.clone(), exp))
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.exp == other.exp
    }
}

impl Eq for Atom {}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.key, &self.exp).cmp(&(&other.key, &other.exp))
    }
}

/// Sum of monomials, highest monomial first, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly {
    monos: Vec<(Int, Vec<Atom>)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { monos: Vec::new() }
    }

    pub fn constant(c: Int) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                monos: vec![(c, Vec::new())],
            }
        }
    }

    fn atom(a: Atom) -> Poly {
        Poly {
            monos: vec![(Int::one(), vec![a])],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Int> {
        match self.monos.len() {
            0 => Some(Int::zero()),
            1 if self.monos[0].1.is_empty() => Some(self.monos[0].0.clone()),
            _ => None,
        }
    }

    /// The monomials, highest first.
    pub fn monomials(&self) -> &[(Int, Vec<Atom>)] {
        &self.monos
    }

    fn normalized(mut monos: Vec<(Int, Vec<Atom>)>) -> Poly {
        monos.sort_by(|a, b| b.1.cmp(&a.1));
        let mut out: Vec<(Int, Vec<Atom>)> = Vec::with_capacity(monos.len());
        for (c, atoms) in monos {
            match out.last_mut() {
                Some((c0, a0)) if *a0 == atoms => *c0 += c,
                _ => out.push((c, atoms)),
            }
            if let Some((c0, _)) = out.last() {
                if c0.is_zero() {
                    out.pop();
                }
            }
        }
        Poly { monos: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut monos = self.monos.clone();
        monos.extend(other.monos.iter().cloned());
        Poly::normalized(monos)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            monos: self.monos.iter().map(|(c, a)| (-c, a.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut monos = Vec::with_capacity(self.monos.len() * other.monos.len());
        for (c1, a1) in &self.monos {
            for (c2, a2) in &other.monos {
                monos.push((c1 * c2, merge_atoms(a1, a2)));
            }
        }
        Poly::normalized(monos)
    }

    fn pow_literal(&self, exp: u32) -> Poly {
        let mut acc = Poly::constant(Int::one());
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// True when every atom is a plain variable with a constant
    /// exponent, i.e. the polynomial is fit to serve as an exponent.
    fn is_exponent_shaped(&self) -> bool {
        self.monos.iter().all(|(_, atoms)| {
            atoms.iter().all(|a| {
                matches!(a.key, AtomKey::Var(_))
                    && a.exp.as_constant().map(|c| c.is_positive()).unwrap_or(false)
            })
        })
    }
}

/// Multiply two sorted atom vectors, merging equal bases by adding
/// exponents and dropping zero exponents.
fn merge_atoms(a: &[Atom], b: &[Atom]) -> Vec<Atom> {
    let mut all: Vec<Atom> = a.iter().chain(b.iter()).cloned().collect();
    all.sort_by(|x, y| x.key.cmp(&y.key));
    let mut out: Vec<Atom> = Vec::with_capacity(all.len());
    for atom in all {
        match out.last_mut() {
            Some(last) if last.key == atom.key => {
                last.exp = last.exp.add(&atom.exp);
            }
            _ => out.push(atom),
        }
        if let Some(last) = out.last() {
            if last.exp.is_zero() {
                out.pop();
            }
        }
    }
    out.sort();
    out
}

/// Alpha-normalized structural print used to key opaque sum atoms.
/// Bound sum indices print as `@<level>`.
fn alpha_key(t: &Term, bound: &mut Vec<String>, out: &mut String) {
    match t {
        Term::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Term::Var(v) => match bound.iter().rposition(|b| b == v) {
            Some(level) => {
                let _ = write!(out, "@{level}");
            }
            None => out.push_str(v),
        },
        Term::Add(l, r) => {
            out.push_str("(+ ");
            alpha_key(l, bound, out);
            out.push(' ');
            alpha_key(r, bound, out);
            out.push(')');
        }
        Term::Sub(l, r) => {
            out.push_str("(- ");
            alpha_key(l, bound, out);
            out.push(' ');
            alpha_key(r, bound, out);
            out.push(')');
        }
        Term::Mul(l, r) => {
            out.push_str("(* ");
            alpha_key(l, bound, out);
            out.push(' ');
            alpha_key(r, bound, out);
            out.push(')');
        }
        Term::Pow(l, r) => {
            out.push_str("(^ ");
            alpha_key(l, bound, out);
            out.push(' ');
            alpha_key(r, bound, out);
            out.push(')');
        }
        Term::Sum { index, lo, hi, body } => {
            out.push_str("(sum ");
            alpha_key(lo, bound, out);
            out.push(' ');
            alpha_key(hi, bound, out);
            out.push(' ');
            bound.push(index.clone());
            alpha_key(body, bound, out);
            bound.pop();
            out.push(')');
        }
    }
}

const MAX_COMPOUND_EXPONENT: u32 = 64;
const MAX_LITERAL_EXPONENT: u64 = 1_000_000;

/// Normalize a term into its polynomial form.
pub fn poly_of(t: &Term) -> Result<Poly, NormalizeError> {
    Ok(match t {
        Term::Int(v) => Poly::constant(v.clone()),
        Term::Var(v) => Poly::atom(Atom {
            key: AtomKey::Var(v.clone()),
            exp: Poly::constant(Int::one()),
            payload: None,
        }),
        Term::Add(l, r) => poly_of(l)?.add(&poly_of(r)?),
        Term::Sub(l, r) => poly_of(l)?.sub(&poly_of(r)?),
        Term::Mul(l, r) => poly_of(l)?.mul(&poly_of(r)?),
        Term::Pow(base, exp) => {
            let exp_poly = poly_of(exp)?;
            if !exp_poly.is_exponent_shaped() {
                return Err(NormalizeError::NonLinearExponent);
            }
            let base_poly = poly_of(base)?;
            match exp_poly.as_constant() {
                Some(c) => {
                    if c.is_negative() {
                        return Err(NormalizeError::NegativeExponent);
                    }
                    if let Some(bc) = base_poly.as_constant() {
                        // literal ^ literal folds to a constant
                        let e = c.to_u64().ok_or(NormalizeError::ExponentTooLarge)?;
                        if e > MAX_LITERAL_EXPONENT {
                            return Err(NormalizeError::ExponentTooLarge);
                        }
                        Poly::constant(num_traits::pow::Pow::pow(bc, e))
                    } else if let Some(atom) = single_unit_atom(&base_poly) {
                        scale_atom_exp(atom, &exp_poly)
                    } else {
                        let e = c.to_u32().ok_or(NormalizeError::ExponentTooLarge)?;
                        if e > MAX_COMPOUND_EXPONENT {
                            return Err(NormalizeError::ExponentTooLarge);
                        }
                        base_poly.pow_literal(e)
                    }
                }
                None => {
                    if let Some(bc) = base_poly.as_constant() {
                        if bc.is_one() {
                            Poly::constant(Int::one())
                        } else if bc.is_negative() {
                            return Err(NormalizeError::SymbolicBase);
                        } else {
                            Poly::atom(Atom {
                                key: AtomKey::Lit(bc),
                                exp: exp_poly,
                                payload: None,
                            })
                        }
                    } else if let Some(atom) = single_unit_atom(&base_poly) {
                        scale_atom_exp(atom, &exp_poly)
                    } else {
                        return Err(NormalizeError::SymbolicBase);
                    }
                }
            }
        }
        Term::Sum { index, lo, hi, body } => {
            let lo_t = term_of(&poly_of(lo)?);
            let hi_t = term_of(&poly_of(hi)?);
            let body_t = term_of(&poly_of(body)?);
            let payload = Term::Sum {
                index: index.clone(),
                lo: Box::new(lo_t),
                hi: Box::new(hi_t),
                body: Box::new(body_t),
            };
            let mut key = String::new();
            alpha_key(&payload, &mut Vec::new(), &mut key);
            Poly::atom(Atom {
                key: AtomKey::Opaque(key),
                exp: Poly::constant(Int::one()),
                payload: Some(payload),
            })
        }
    })
}

/// `Some(atom)` when the polynomial is a single monomial `1 * atom`.
fn single_unit_atom(p: &Poly) -> Option<Atom> {
    match p.monos.as_slice() {
        [(c, atoms)] if c.is_one() && atoms.len() == 1 => Some(atoms[0].clone()),
        _ => None,
    }
}

/// `(base^e0)^e = base^(e0*e)` for a unit atom base.
fn scale_atom_exp(atom: Atom, exp: &Poly) -> Poly {
    let merged = atom.exp.mul(exp);
    if merged.is_zero() {
        return Poly::constant(Int::one());
    }
    Poly::atom(Atom {
        key: atom.key,
        exp: merged,
        payload: atom.payload,
    })
}

/// Reconstruct the canonical term of a polynomial.
pub fn term_of(p: &Poly) -> Term {
    if p.monos.is_empty() {
        return Term::int(0);
    }
    let mono_term = |c_abs: &Int, atoms: &[Atom]| -> Term {
        let mut factors: Vec<Term> = Vec::new();
        if !c_abs.is_one() || atoms.is_empty() {
            factors.push(Term::Int(c_abs.clone()));
        }
        for atom in atoms {
            let base = match &atom.key {
                AtomKey::Var(v) => Term::var(v),
                AtomKey::Lit(c) => Term::Int(c.clone()),
                AtomKey::Opaque(_) => atom
                    .payload
                    .clone()
                    .expect("opaque atoms always carry a payload"),
            };
            let exp = &atom.exp;
            if exp.as_constant().map(|c| c.is_one()).unwrap_or(false) {
                factors.push(base);
            } else {
                factors.push(Term::pow(base, term_of(exp)));
            }
        }
        Term::product(&factors)
    };
    let mut acc: Option<Term> = None;
    for (c, atoms) in &p.monos {
        let abs = c.abs();
        let piece = mono_term(&abs, atoms);
        acc = Some(match acc {
            None => {
                if c.is_negative() {
                    // a leading negative coefficient is kept on the
                    // coefficient itself
                    mono_term(c, atoms)
                } else {
                    piece
                }
            }
            Some(prev) => {
                if c.is_negative() {
                    prev - piece
                } else {
                    prev + piece
                }
            }
        });
    }
    acc.unwrap()
}

/// Canonical ring normal form of a term.
pub fn normalize_ring(t: &Term) -> Result<Term, NormalizeError> {
    Ok(term_of(&poly_of(t)?))
}

/// Do two terms have identical normal forms?
pub fn ring_equal(a: &Term, b: &Term) -> Result<bool, NormalizeError> {
    Ok(poly_of(a)? == poly_of(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{eval_term, parse_term, Env};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn eq(a: &str, b: &str) -> bool {
        ring_equal(&t(a), &t(b)).unwrap()
    }

    #[test]
    fn basic_identities() {
        assert!(eq("10*n + 1", "9*n + (n + 1)"));
        assert!(eq("x - x", "0"));
        assert!(eq("b^(i+1)", "b * b^i"));
        assert!(eq("(x + 1)^2", "x^2 + 2*x + 1"));
        assert!(eq("x * y", "y * x"));
        assert!(!eq("x + 1", "x"));
        assert!(eq("2^3", "8"));
        assert!(eq("x^0", "1"));
    }

    #[test]
    fn power_merging() {
        assert!(eq("x^i * x^(m*p)", "x^(i + m*p)"));
        assert!(eq("(x^2)^k", "x^(2*k)"));
        assert!(eq("10^j * 10^j", "10^(2*j)"));
        assert!(eq("x * x", "x^2"));
    }

    #[test]
    fn sum_atoms() {
        assert!(eq("sum(i, 0, n, x^i)", "sum(k, 0, n, x^k)"));
        assert!(eq(
            "sum(i, 0, n, x^i) * 2 - sum(k, 0, n, x^k)",
            "sum(j, 0, n, x^j)"
        ));
        assert!(!eq("sum(i, 0, n, x^i)", "sum(i, 1, n, x^i)"));
        // bounds and bodies are normalized inside the atom key
        assert!(eq("sum(i, 0 + 1, n, x^i * 1)", "sum(i, 1, n, x^i)"));
        // a free variable in the body is not confused with the index
        assert!(!eq("sum(i, 0, n, x^i)", "sum(x, 0, n, x^x)"));
    }

    #[test]
    fn errors() {
        assert_eq!(
            poly_of(&t("x^(0 - 1)")).unwrap_err(),
            NormalizeError::NegativeExponent
        );
        assert_eq!(
            poly_of(&t("x^(2^i)")).unwrap_err(),
            NormalizeError::NonLinearExponent
        );
        assert_eq!(
            poly_of(&t("(x + 1)^i")).unwrap_err(),
            NormalizeError::SymbolicBase
        );
    }

    #[test]
    fn normal_form_round_trips() {
        for s in [
            "x^2 - 1800",
            "3*x^2 + 2*x - 7",
            "b^(b - 1) - b + 2",
            "0 - x",
            "sum(i, 0, b - 2, (b - 2 - i) * b^i) + 1",
            "m*p + m - 1",
        ] {
            let nf = normalize_ring(&t(s)).unwrap();
            let nf2 = normalize_ring(&nf).unwrap();
            assert_eq!(nf, nf2, "idempotence on {s}: {nf} vs {nf2}");
            assert!(ring_equal(&t(s), &nf).unwrap());
        }
    }

    #[test]
    fn normalization_agrees_with_evaluation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let vars = ["x", "y", "b"];
        for _ in 0..500 {
            let tm = crate::lang::tests::random_term(&mut rng, 3, &vars);
            let nf = match normalize_ring(&tm) {
                Ok(nf) => nf,
                Err(_) => continue,
            };
            let mut env = Env::new();
            for v in vars {
                env.bind(v, Int::from(rng.gen_range(0i64..=6)));
            }
            match (eval_term(&tm, &env), eval_term(&nf, &env)) {
                (Ok(a), Ok(b)) => assert_eq!(a, b, "term {tm} nf {nf}"),
                // normalization may fold partiality away (e.g. x^0 with
                // x unevaluable); only a both-defined disagreement is a
                // bug
                _ => {}
            }
        }
    }
}
