//! An independent, slow evaluator used to cross-check [`crate::checker`].
//!
//! It works state by state on the full formula syntax (no desugaring),
//! applies updates through [`crate::updates::apply_update`] on real
//! [`KripkeModel`] values, and decides each `[*]` by turning every union of
//! arrow blocks into a syntactic update built from characteristic formulas.
//! The checker shares none of this code path except the partition itself.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use crate::bisim::{arrow_blocks, coarsest_partition, CharacteristicFormulas};
use crate::checker::Budget;
use crate::error::EvalError;
use crate::kripke::KripkeModel;
use crate::syntax::{Clause, Formula, Update};
use crate::updates::{apply_update, Evaluator};

/// Decides `M, s ⊨ f` by brute force.
pub fn brute_force_arb_oracle(
    m: &KripkeModel,
    s: usize,
    f: &Formula,
    budget: Budget,
) -> Result<bool, EvalError> {
    if s >= m.num_states() {
        return Err(EvalError::UnknownState(s));
    }
    Oracle { budget }.holds(m, s, f, 0)
}

struct Oracle {
    budget: Budget,
}

/// Clause evaluator that caches truth sets for one fixed model.
struct Cached<'a> {
    oracle: &'a Oracle,
    model: &'a KripkeModel,
    depth: usize,
    cache: RefCell<HashMap<Formula, BTreeSet<usize>>>,
}

impl Evaluator for Cached<'_> {
    fn truth_set(&self, m: &KripkeModel, f: &Formula) -> Result<BTreeSet<usize>, EvalError> {
        let same = std::ptr::eq(m, self.model);
        if same {
            if let Some(hit) = self.cache.borrow().get(f) {
                return Ok(hit.clone());
            }
        }
        let mut set = BTreeSet::new();
        for s in 0..m.num_states() {
            if self.oracle.holds(m, s, f, self.depth)? {
                set.insert(s);
            }
        }
        if same {
            self.cache.borrow_mut().insert(f.clone(), set.clone());
        }
        Ok(set)
    }
}

impl Oracle {
    fn successors<'m>(
        &self,
        m: &'m KripkeModel,
        s: usize,
        agent: &str,
    ) -> Result<impl Iterator<Item = usize> + 'm, EvalError> {
        let arrows = m
            .arrows_of(agent)
            .map_err(|_| EvalError::UnknownAgent(agent.to_string()))?;
        Ok(arrows
            .range((s, 0)..(s + 1, 0))
            .map(|&(_, t)| t))
    }

    fn updated(&self, m: &KripkeModel, u: &Update, depth: usize) -> Result<KripkeModel, EvalError> {
        let eval = Cached {
            oracle: self,
            model: m,
            depth,
            cache: RefCell::new(HashMap::new()),
        };
        apply_update(m, u, &eval)
    }

    fn holds(&self, m: &KripkeModel, s: usize, f: &Formula, depth: usize) -> Result<bool, EvalError> {
        if depth > self.budget.max_recursion_depth {
            return Err(EvalError::DepthBudget {
                limit: self.budget.max_recursion_depth,
            });
        }
        // only modal and dynamic operators count towards the depth
        let d = depth + 1;
        Ok(match f {
            Formula::Atom(p) => m.is_true(p, s),
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Not(g) => !self.holds(m, s, g, depth)?,
            Formula::And(l, r) => self.holds(m, s, l, depth)? && self.holds(m, s, r, depth)?,
            Formula::Or(l, r) => self.holds(m, s, l, depth)? || self.holds(m, s, r, depth)?,
            Formula::Implies(l, r) => !self.holds(m, s, l, depth)? || self.holds(m, s, r, depth)?,
            Formula::Iff(l, r) => self.holds(m, s, l, depth)? == self.holds(m, s, r, depth)?,
            Formula::Box(a, g) => {
                for t in self.successors(m, s, a)? {
                    if !self.holds(m, t, g, d)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Diamond(a, g) => {
                for t in self.successors(m, s, a)? {
                    if self.holds(m, t, g, d)? {
                        return Ok(true);
                    }
                }
                false
            }
            // updates are total functions on models, so <U>φ and [U]φ agree
            Formula::UpdateBox(u, g) | Formula::UpdateDiamond(u, g) => {
                let next = self.updated(m, u, d)?;
                self.holds(&next, s, g, d)?
            }
            Formula::ArbBox(g) => self.every_update(m, s, g, d)?,
            Formula::ArbDiamond(g) => !self.every_update(m, s, &Formula::not((**g).clone()), d)?,
        })
    }

    /// True when `g` holds at `s` after every syntactic update realizing a
    /// union of arrow blocks.
    fn every_update(&self, m: &KripkeModel, s: usize, g: &Formula, depth: usize) -> Result<bool, EvalError> {
        let part = coarsest_partition(m);
        let blocks = arrow_blocks(m, &part);
        if blocks.len() > self.budget.max_arrow_blocks || blocks.len() >= 64 {
            return Err(EvalError::BlockBudget {
                blocks: blocks.len(),
                limit: self.budget.max_arrow_blocks,
            });
        }
        if m.agents().is_empty() {
            // no arrows to remove: the only reachable model is m itself
            return self.holds(m, s, g, depth);
        }
        let mut chis = CharacteristicFormulas::new(m, &part);
        let block_clauses: Vec<Clause> = blocks
            .iter()
            .map(|b| {
                Clause::new(
                    chis.block(b.source_block),
                    m.agents()[b.agent].clone(),
                    chis.block(b.target_block),
                )
            })
            .collect();
        let eval = Cached {
            oracle: self,
            model: m,
            depth,
            cache: RefCell::new(HashMap::new()),
        };
        for mask in 0..1u64 << blocks.len() {
            let mut clauses: Vec<Clause> = block_clauses
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect();
            if clauses.is_empty() {
                clauses.push(Clause::new(Formula::Bot, m.agents()[0].clone(), Formula::Bot));
            }
            let u = Update::new(clauses).expect("nonempty clause list");
            let next = apply_update(m, &u, &eval)?;
            if !self.holds(&next, s, g, depth)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
