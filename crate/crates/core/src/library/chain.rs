//! Incremental construction of rewrite chains.
//!
//! The builder tracks the chain's current term, applies rules at
//! positions (forward, or backward given the pre-image), discharges
//! emitted side conditions against a [`Facts`] context, and finishes
//! into a `RewriteChain` proof.

use super::derive::{BuildError, Facts};
use crate::kernel::{
    apply_rule, replace_at, ring_equal, subterm_at, Direction, LemmaStore, Proof, RewriteRule,
    RewriteStep,
};
use crate::lang::{Formula, Term};

pub struct ChainBuilder<'a> {
    start: Term,
    current: Term,
    steps: Vec<RewriteStep>,
    lemmas: &'a LemmaStore,
    facts: Facts,
}

impl<'a> ChainBuilder<'a> {
    pub fn new(start: Term, lemmas: &'a LemmaStore, facts: Facts) -> Self {
        ChainBuilder {
            current: start.clone(),
            start,
            steps: Vec::new(),
            lemmas,
            facts,
        }
    }

    pub fn current(&self) -> &Term {
        &self.current
    }

    fn discharge_all(&self, conds: &[Formula]) -> Result<Vec<Proof>, BuildError> {
        // leave closed-only condition sets to the checker's evaluator
        let all_closed = conds.iter().all(|c| c.is_closed() && c.is_range_only());
        if conds.is_empty() || all_closed {
            return Ok(Vec::new());
        }
        conds.iter().map(|c| self.facts.discharge(c)).collect()
    }

    fn push(&mut self, rule: RewriteRule, direction: Direction, position: &[usize], after: Term, side_proofs: Vec<Proof>) {
        self.steps.push(RewriteStep {
            rule,
            direction,
            position: position.to_vec(),
            before: self.current.clone(),
            after: after.clone(),
            side_proofs,
        });
        self.current = after;
    }

    /// Apply a rule forward at `position`.
    pub fn apply(&mut self, rule: RewriteRule, position: &[usize]) -> Result<&mut Self, BuildError> {
        let redex = subterm_at(&self.current, position).ok_or_else(|| {
            BuildError::Malformed(format!("no subterm at {position:?} in {}", self.current))
        })?;
        let (result, conds) = apply_rule(&rule, redex, self.lemmas)
            .map_err(|e| BuildError::Malformed(format!("{e} at {position:?} in {}", self.current)))?;
        let side_proofs = self.discharge_all(&conds)?;
        let after = replace_at(&self.current, position, &result)
            .expect("position validated by subterm_at");
        self.push(rule, Direction::Forward, position, after, side_proofs);
        Ok(self)
    }

    /// Apply a rule backward: `preimage` replaces the subterm at
    /// `position`, and applying the rule forward to `preimage` must
    /// reproduce what is currently there.
    pub fn apply_rev(
        &mut self,
        rule: RewriteRule,
        position: &[usize],
        preimage: Term,
    ) -> Result<&mut Self, BuildError> {
        let redex = subterm_at(&self.current, position).ok_or_else(|| {
            BuildError::Malformed(format!("no subterm at {position:?} in {}", self.current))
        })?;
        let (result, conds) = apply_rule(&rule, &preimage, self.lemmas)
            .map_err(|e| BuildError::Malformed(format!("{e} reversing at {position:?}")))?;
        if &result != redex {
            return Err(BuildError::Malformed(format!(
                "backward step mismatch at {position:?}: rule yields {result}, term has {redex}"
            )));
        }
        let side_proofs = self.discharge_all(&conds)?;
        let after = replace_at(&self.current, position, &preimage)
            .expect("position validated by subterm_at");
        self.push(rule, Direction::Backward, position, after, side_proofs);
        Ok(self)
    }

    /// Replace the subterm at `position` by a ring-equal term. A
    /// no-op replacement is skipped rather than recorded.
    pub fn ring(&mut self, position: &[usize], new_subterm: Term) -> Result<&mut Self, BuildError> {
        let redex = subterm_at(&self.current, position).ok_or_else(|| {
            BuildError::Malformed(format!("no subterm at {position:?} in {}", self.current))
        })?;
        if redex == &new_subterm {
            return Ok(self);
        }
        if !ring_equal(redex, &new_subterm).unwrap_or(false) {
            return Err(BuildError::NotRingEqual(
                redex.to_string(),
                new_subterm.to_string(),
            ));
        }
        let after = replace_at(&self.current, position, &new_subterm)
            .expect("position validated by subterm_at");
        self.push(
            RewriteRule::RingNormalize,
            Direction::Forward,
            position,
            after,
            Vec::new(),
        );
        Ok(self)
    }

    /// Close the chain at `rhs`, yielding a proof of `start = rhs`.
    pub fn finish(self, rhs: &Term) -> Result<Proof, BuildError> {
        if &self.current != rhs {
            return Err(BuildError::Malformed(format!(
                "chain ended at {}, wanted {rhs}",
                self.current
            )));
        }
        Ok(Proof::RewriteChain {
            goal: Formula::Eq(self.start, rhs.clone()),
            steps: self.steps,
        })
    }

    /// Close the chain where it stands, yielding `start = current`.
    pub fn finish_here(self) -> (Proof, Term) {
        let current = self.current.clone();
        (
            Proof::RewriteChain {
                goal: Formula::Eq(self.start, current.clone()),
                steps: self.steps,
            },
            current,
        )
    }
}
