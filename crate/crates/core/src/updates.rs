//! Arrow updates: the model transformation `M * U`.
//!
//! An arrow `(v, a, v')` survives `U` when it matches at least one clause
//! `(φ, a, φ')` of `U`, meaning `φ` holds at `v` and `φ'` at `v'`. Both are
//! evaluated in the model *before* the update. States and valuation never
//! change; agents without a clause lose every arrow.

use std::collections::BTreeSet;

use crate::error::EvalError;
use crate::kripke::KripkeModel;
use crate::syntax::{Clause, Formula, Update};

/// Truth of a formula at the states of a given model.
///
/// `apply_update` needs this to decide clause preconditions but must not
/// depend on a particular model checker.
pub trait Evaluator {
    fn truth_set(&self, m: &KripkeModel, f: &Formula) -> Result<BTreeSet<usize>, EvalError>;
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    fn truth_set(&self, m: &KripkeModel, f: &Formula) -> Result<BTreeSet<usize>, EvalError> {
        (**self).truth_set(m, f)
    }
}

/// An arrow of some agent, by state and agent indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub source: usize,
    pub agent: usize,
    pub target: usize,
}

pub fn arrow_matches(
    m: &KripkeModel,
    arrow: Arrow,
    clause: &Clause,
    eval: &impl Evaluator,
) -> Result<bool, EvalError> {
    let present = arrow.agent < m.agents().len()
        && m.arrows(arrow.agent).contains(&(arrow.source, arrow.target));
    if !present {
        return Err(EvalError::NoSuchArrow {
            from: arrow.source,
            agent: arrow.agent,
            to: arrow.target,
        });
    }
    let clause_agent = m
        .agent_index(&clause.agent)
        .ok_or_else(|| EvalError::UnknownAgent(clause.agent.clone()))?;
    if clause_agent != arrow.agent {
        return Ok(false);
    }
    Ok(eval.truth_set(m, &clause.pre)?.contains(&arrow.source)
        && eval.truth_set(m, &clause.post)?.contains(&arrow.target))
}

/// Computes `M * U`. Every clause formula is evaluated on `m`.
pub fn apply_update(
    m: &KripkeModel,
    u: &Update,
    eval: &impl Evaluator,
) -> Result<KripkeModel, EvalError> {
    // (agent, pre-set, post-set) for every clause
    let mut resolved = Vec::with_capacity(u.clauses().len());
    for c in u.clauses() {
        let agent = m
            .agent_index(&c.agent)
            .ok_or_else(|| EvalError::UnknownAgent(c.agent.clone()))?;
        resolved.push((agent, eval.truth_set(m, &c.pre)?, eval.truth_set(m, &c.post)?));
    }
    let arrows = (0..m.agents().len())
        .map(|a| {
            m.arrows(a)
                .iter()
                .copied()
                .filter(|(s, t)| {
                    resolved
                        .iter()
                        .any(|(ca, pre, post)| *ca == a && pre.contains(s) && post.contains(t))
                })
                .collect()
        })
        .collect();
    Ok(m.with_arrows(arrows))
}
