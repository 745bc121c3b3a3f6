//! Base-b digit strings and digit-level long multiplication / division
//! trace generators.
//!
//! Values are arbitrary-precision naturals; bases run from 2 to 36 with
//! the fixed alphabet `0-9a-z`. Traces record exactly what the school
//! algorithms write down, including explicit all-zero partial rows and
//! leading quotient zeros, so the rendered grids match the classical
//! layouts digit for digit.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

use crate::Nat;

/// Largest supported base (digits `0-9` then `a-z`).
pub const MAX_BASE: u32 = 36;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumeralError {
    #[error("base {0} out of range [2, 36]")]
    BaseOutOfRange(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u32 },
    #[error("repetition count must be at least 1")]
    ZeroReps,
}

fn check_base(base: u32) -> Result<(), NumeralError> {
    if (2..=MAX_BASE).contains(&base) {
        Ok(())
    } else {
        Err(NumeralError::BaseOutOfRange(base))
    }
}

/// A base-b digit string, most-significant digit first.
///
/// Canonical values have no leading zero (except the single digit `0`),
/// but trace rows may carry explicit context zeros; use
/// [`Digits::canonical`] to normalize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digits {
    base: u32,
    digits: Vec<u32>,
}

impl Digits {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self, NumeralError> {
        check_base(base)?;
        for &d in &digits {
            if d >= base {
                return Err(NumeralError::DigitOutOfRange { digit: d, base });
            }
        }
        let digits = if digits.is_empty() { vec![0] } else { digits };
        Ok(Digits { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Digits most-significant first, including any context zeros.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The numeric value of the string.
    pub fn value(&self) -> Nat {
        let bytes: Vec<u8> = self.digits.iter().map(|&d| d as u8).collect();
        BigUint::from_radix_be(&bytes, self.base).expect("digits already validated")
    }

    /// Same value with leading zeros stripped (a lone `0` stays).
    pub fn canonical(&self) -> Digits {
        let first = self.digits.iter().position(|&d| d != 0);
        match first {
            Some(i) => Digits {
                base: self.base,
                digits: self.digits[i..].to_vec(),
            },
            None => Digits {
                base: self.base,
                digits: vec![0],
            },
        }
    }

    /// Left-pad with zeros to `width` digits (no-op if already wider).
    pub fn padded_to(&self, width: usize) -> Digits {
        if self.digits.len() >= width {
            self.clone()
        } else {
            let mut digits = vec![0; width - self.digits.len()];
            digits.extend_from_slice(&self.digits);
            Digits {
                base: self.base,
                digits,
            }
        }
    }
}

impl fmt::Display for Digits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{}", digit_char(d))?;
        }
        Ok(())
    }
}

/// `0-9a-z` alphabet: digit value to character.
pub fn digit_char(d: u32) -> char {
    debug_assert!(d < MAX_BASE);
    if d < 10 {
        (b'0' + d as u8) as char
    } else {
        (b'a' + (d - 10) as u8) as char
    }
}

/// Inverse of [`digit_char`]; `None` for characters outside `0-9a-z`.
pub fn char_digit(c: char) -> Option<u32> {
    match c {
        '0'..='9' => Some(c as u32 - '0' as u32),
        'a'..='z' => Some(c as u32 - 'a' as u32 + 10),
        _ => None,
    }
}

/// Convert `n` to canonical base-b digits.
pub fn to_digits(n: &Nat, base: u32) -> Result<Digits, NumeralError> {
    check_base(base)?;
    let digits = n.to_radix_be(base).iter().map(|&d| d as u32).collect();
    Ok(Digits { base, digits })
}

/// Parse a digit string in the `0-9a-z` alphabet back to a value.
pub fn from_str(text: &str, base: u32) -> Result<Digits, NumeralError> {
    check_base(base)?;
    let mut digits = Vec::with_capacity(text.len());
    for c in text.chars() {
        let d = char_digit(c).ok_or(NumeralError::DigitOutOfRange {
            digit: u32::MAX,
            base,
        })?;
        if d >= base {
            return Err(NumeralError::DigitOutOfRange { digit: d, base });
        }
        digits.push(d);
    }
    Digits::new(base, digits)
}

/// Value of a [`Digits`]; inverse of [`to_digits`] on canonical strings.
pub fn from_digits(d: &Digits) -> Nat {
    d.value()
}

/// A digit-level long multiplication record: one partial row per
/// multiplier digit, least-significant first, row k shifted k places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultTrace {
    pub base: u32,
    pub multiplicand: Nat,
    pub multiplier: Nat,
    /// `(shift, row)` pairs; `value(row) * base^shift` summed over rows
    /// reconstructs the product.
    pub partial_rows: Vec<(usize, Digits)>,
    pub result: Digits,
}

/// Long multiplication exactly as written by hand: row k is the
/// multiplicand times the k-th multiplier digit. A zero multiplier digit
/// keeps its explicit all-zero row, padded to the width of the widest
/// nonzero row.
pub fn long_multiply_trace(x: &Nat, y: &Nat, base: u32) -> Result<MultTrace, NumeralError> {
    check_base(base)?;
    let y_digits_le: Vec<u32> = if y.is_zero() {
        vec![0]
    } else {
        y.to_radix_le(base).iter().map(|&d| d as u32).collect()
    };
    let rows_raw: Vec<Nat> = y_digits_le.iter().map(|&d| x * Nat::from(d)).collect();
    let width = rows_raw
        .iter()
        .map(|r| to_digits(r, base).map(|d| d.len()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(1);
    let partial_rows = rows_raw
        .iter()
        .enumerate()
        .map(|(shift, r)| Ok((shift, to_digits(r, base)?.padded_to(width))))
        .collect::<Result<Vec<_>, NumeralError>>()?;
    let result = to_digits(&(x * y), base)?;
    Ok(MultTrace {
        base,
        multiplicand: x.clone(),
        multiplier: y.clone(),
        partial_rows,
        result,
    })
}

/// One step of schoolbook division: bring down a dividend digit, divide,
/// keep the remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivStep {
    pub partial_dividend: Nat,
    pub quotient_digit: u32,
    pub partial_remainder: Nat,
}

/// A digit-level long division record, one step per dividend digit
/// (most-significant first). The quotient digit string keeps a leading
/// zero when the first partial dividend is smaller than the divisor;
/// `quotient` is the canonical numeric value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivTrace {
    pub base: u32,
    pub dividend: Nat,
    pub divisor: Nat,
    pub steps: Vec<DivStep>,
    pub quotient: Nat,
    pub remainder: Nat,
}

impl DivTrace {
    /// Quotient digits as written in the trace, leading zeros included.
    pub fn quotient_digits(&self) -> Digits {
        let digits = self.steps.iter().map(|s| s.quotient_digit).collect();
        Digits::new(self.base, digits).expect("digits bounded by base")
    }
}

pub fn long_divide_trace(n: &Nat, d: &Nat, base: u32) -> Result<DivTrace, NumeralError> {
    check_base(base)?;
    if d.is_zero() {
        return Err(NumeralError::DivisionByZero);
    }
    let dividend_digits = to_digits(n, base)?;
    let big_base = Nat::from(base);
    let mut remainder = Nat::zero();
    let mut steps = Vec::with_capacity(dividend_digits.len());
    for &digit in dividend_digits.digits() {
        let partial_dividend = &remainder * &big_base + Nat::from(digit);
        let (q, r) = partial_dividend.div_rem(d);
        let quotient_digit = u32::try_from(&q).expect("quotient digit below base");
        steps.push(DivStep {
            partial_dividend,
            quotient_digit,
            partial_remainder: r.clone(),
        });
        remainder = r;
    }
    let (quotient, remainder) = n.div_rem(d);
    Ok(DivTrace {
        base,
        dividend: n.clone(),
        divisor: d.clone(),
        steps,
        quotient,
        remainder,
    })
}

/// The generic repdigit seed for base `b` with `p` block repetitions:
/// `(sum_{i=0}^{b-2} (b-2-i) b^i + 1) * sum_{j=0}^{p-1} b^{(b-1)j}`.
///
/// For (10, 1) this is 12345679; multiplying it by `(b-1)*d` yields a run
/// of `(b-1)*p` copies of the digit `d`.
pub fn magic_number(base: u32, reps: u32) -> Result<Nat, NumeralError> {
    check_base(base)?;
    if reps == 0 {
        return Err(NumeralError::ZeroReps);
    }
    let b = Nat::from(base);
    let mut head = Nat::zero();
    // sum_{i=0}^{b-2} (b-2-i) b^i, accumulated most-significant first.
    for coeff in 0..=(base - 2) {
        head = &head * &b + Nat::from(coeff);
    }
    head += Nat::one();
    let mut blocks = Nat::zero();
    let block_shift = b.pow(base - 1);
    for _ in 0..reps {
        blocks = &blocks * &block_shift + Nat::one();
    }
    Ok(head * blocks)
}

/// Value whose base-b expansion is `count` copies of the digit `d`.
pub fn repdigit(d: u32, count: u32, base: u32) -> Result<Nat, NumeralError> {
    check_base(base)?;
    if d >= base {
        return Err(NumeralError::DigitOutOfRange { digit: d, base });
    }
    let b = Nat::from(base);
    let mut v = Nat::zero();
    for _ in 0..count {
        v = &v * &b + Nat::from(d);
    }
    Ok(v)
}

/// The repdigit multiplication table for base `b`, digit `d`, and `p`
/// block repetitions: the statement `magic * ((b-1)*d) = repdigit` and
/// the multiplication trace that proves it.
pub struct TrickTable {
    pub statement: crate::Formula,
    pub trace: MultTrace,
}

pub fn trick_table(base: u32, digit: u32, reps: u32) -> Result<TrickTable, NumeralError> {
    check_base(base)?;
    if digit == 0 || digit >= base {
        return Err(NumeralError::DigitOutOfRange { digit, base });
    }
    let magic = magic_number(base, reps)?;
    let multiplier = Nat::from((base - 1) * digit);
    let result = repdigit(digit, (base - 1) * reps, base)?;
    debug_assert_eq!(&magic * &multiplier, result);
    let trace = long_multiply_trace(&magic, &multiplier, base)?;
    let statement = crate::Formula::Eq(
        crate::Term::product(&[
            crate::Term::nat(&magic),
            crate::Term::nat(&multiplier),
        ]),
        crate::Term::nat(&result),
    );
    Ok(TrickTable { statement, trace })
}

/// Render a multiplication trace as the classical right-aligned grid:
/// multiplicand, multiplier, rule, one line per partial row (shifted k
/// places left of the margin), rule, result. Lines carry no trailing
/// blanks.
pub fn render_mult(trace: &MultTrace) -> String {
    let base = trace.base;
    let top = to_digits(&trace.multiplicand, base).expect("base validated").to_string();
    let second = to_digits(&trace.multiplier, base).expect("base validated").to_string();
    let result = trace.result.to_string();
    let width = trace
        .partial_rows
        .iter()
        .map(|(shift, row)| row.len() + shift)
        .chain([top.len(), second.len(), result.len()])
        .max()
        .unwrap_or(1);
    let mut lines = Vec::new();
    lines.push(format!("{top:>width$}"));
    lines.push(format!("{second:>width$}"));
    lines.push("-".repeat(width));
    for (shift, row) in &trace.partial_rows {
        let row = row.to_string();
        let pad = width - shift - row.len();
        lines.push(format!("{}{}", " ".repeat(pad), row));
    }
    lines.push("-".repeat(width));
    lines.push(format!("{result:>width$}"));
    lines.join("\n") + "\n"
}

/// Render a division trace: dividend and divisor on the first line, then
/// one line per step showing the partial remainder written under the
/// digit just processed followed by the brought-down digit. The quotient
/// string (leading zero kept) appears under the divisor.
pub fn render_div(trace: &DivTrace) -> String {
    let base = trace.base;
    let dividend = to_digits(&trace.dividend, base).expect("base validated").to_string();
    let divisor = to_digits(&trace.divisor, base).expect("base validated").to_string();
    let quotient = trace.quotient_digits().to_string();
    let n = dividend.len();
    let mut lines = Vec::new();
    lines.push(format!("{dividend} | {divisor}"));
    for (idx, step) in trace.steps.iter().enumerate() {
        let i = idx + 1;
        let rem = to_digits(&step.partial_remainder, base)
            .expect("base validated")
            .to_string();
        // Remainder ends in the column of dividend digit i (1-based);
        // the next dividend digit is brought down beside it.
        let start = i.saturating_sub(rem.len());
        let mut left = format!("{}{}", " ".repeat(start), rem);
        if i < n {
            left.push(dividend.as_bytes()[i] as char);
        }
        let mut line = format!("{left:<n$} |");
        match i {
            1 => line.push_str(&format!(" {}", "-".repeat(quotient.len()))),
            2 => line.push_str(&format!(" {quotient}")),
            _ => {}
        }
        while line.ends_with(' ') {
            line.pop();
        }
        lines.push(line);
    }
    lines.join("\n") + "\n"
}
