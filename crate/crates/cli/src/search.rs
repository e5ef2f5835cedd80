//! Bounded model search behind `sat-search`.
//!
//! For each size `n` every arrow relation and valuation over states
//! `s0..s{n-1}` is enumerated, the formula is checked at `s0`, and a
//! candidate is skipped unless it is the least encoding among all relabellings
//! of `s1..s{n-1}`. The search is exponential in `n²`.

use std::collections::BTreeSet;

use aaul::checker::{Budget, Checker};
use aaul::error::EvalError;
use aaul::kripke::KripkeModel;
use aaul::syntax::{signature, Formula};

pub const DEFAULT_MAX_CANDIDATES: u64 = 1 << 22;

pub struct Query<'a> {
    pub formula: &'a Formula,
    pub max_states: usize,
    pub agents: &'a [String],
    pub props: &'a [String],
    pub max_candidates: u64,
    pub budget: Budget,
}

pub struct Report {
    pub model: Option<KripkeModel>,
    /// Candidates whose evaluation hit the quantifier budget.
    pub over_budget: usize,
}

fn bit_count(q: &Query, n: usize) -> usize {
    q.agents.len() * n * n + q.props.len() * n
}

pub fn run(q: &Query) -> Result<Report, String> {
    if q.max_states == 0 {
        return Err("--max-states must be at least 1".into());
    }
    let sig = signature(q.formula);
    if let Some(a) = sig.agents.iter().find(|a| !q.agents.contains(a)) {
        return Err(format!("formula mentions agent `{a}` missing from --agents"));
    }
    if let Some(p) = sig.props.iter().find(|p| !q.props.contains(p)) {
        return Err(format!("formula mentions proposition `{p}` missing from --props"));
    }
    let bits = bit_count(q, q.max_states);
    if bits >= 63 || 1u64 << bits > q.max_candidates {
        return Err(format!(
            "{} states need 2^{bits} candidates, above --max-candidates {}",
            q.max_states, q.max_candidates
        ));
    }
    let checker = Checker::new(q.budget);
    let mut over_budget = 0;
    for n in 1..=q.max_states {
        let perms = permutations_fixing_zero(n);
        let bits = bit_count(q, n);
        for code in 0..1u64 << bits {
            let raw: Vec<bool> = (0..bits).map(|i| code >> i & 1 == 1).collect();
            if !is_canonical(q, n, &raw, &perms) {
                continue;
            }
            let m = decode(q, n, &raw);
            match checker.satisfies(&m, 0, q.formula) {
                Ok(true) => {
                    return Ok(Report {
                        model: Some(m),
                        over_budget,
                    })
                }
                Ok(false) => {}
                Err(EvalError::BlockBudget { .. }) => over_budget += 1,
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(Report {
        model: None,
        over_budget,
    })
}

fn permutations_fixing_zero(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut vec![0], &mut (1..n).collect(), &mut out);
    out
}

/// Bit layout: agent-major `n × n` adjacency matrices, then one row of `n`
/// bits per proposition.
fn relabel(q: &Query, n: usize, raw: &[bool], perm: &[usize]) -> Vec<bool> {
    let mut out = vec![false; raw.len()];
    for a in 0..q.agents.len() {
        for s in 0..n {
            for t in 0..n {
                out[a * n * n + perm[s] * n + perm[t]] = raw[a * n * n + s * n + t];
            }
        }
    }
    let base = q.agents.len() * n * n;
    for p in 0..q.props.len() {
        for s in 0..n {
            out[base + p * n + perm[s]] = raw[base + p * n + s];
        }
    }
    out
}

fn is_canonical(q: &Query, n: usize, raw: &[bool], perms: &[Vec<usize>]) -> bool {
    perms.iter().all(|perm| raw <= relabel(q, n, raw, perm).as_slice())
}

fn decode(q: &Query, n: usize, raw: &[bool]) -> KripkeModel {
    let arrows = (0..q.agents.len())
        .map(|a| {
            (0..n)
                .flat_map(|s| (0..n).map(move |t| (s, t)))
                .filter(|&(s, t)| raw[a * n * n + s * n + t])
                .collect::<BTreeSet<_>>()
        })
        .collect();
    let base = q.agents.len() * n * n;
    let valuation = q
        .props
        .iter()
        .enumerate()
        .map(|(p, name)| (name.clone(), (0..n).filter(|&s| raw[base + p * n + s]).collect()))
        .collect();
    KripkeModel::from_parts(
        (0..n).map(|s| format!("s{s}")).collect(),
        q.agents.to_vec(),
        arrows,
        valuation,
        Some(0),
    )
    .expect("decoded model is well formed")
}
