// Seeded generators and independent reference implementations shared by
// the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;

use aaul::bisim::{arrow_blocks, coarsest_partition};
use aaul::kripke::KripkeModel;
use aaul::syntax::{Clause, Formula, Update};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const AGENTS: [&str; 2] = ["a", "b"];
pub const PROPS: [&str; 2] = ["p", "q"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_states` states; every possible arrow is present with
/// probability `density`, every proposition with probability 1/2.
pub fn random_model(
    rng: &mut impl Rng,
    max_states: usize,
    agents: &[&str],
    props: &[&str],
    density: f64,
) -> KripkeModel {
    let n = rng.gen_range(1..=max_states);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let arrows = agents
        .iter()
        .map(|_| {
            let mut set = BTreeSet::new();
            for s in 0..n {
                for t in 0..n {
                    if rng.gen_bool(density) {
                        set.insert((s, t));
                    }
                }
            }
            set
        })
        .collect();
    let valuation = props
        .iter()
        .map(|p| {
            let set: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            (p.to_string(), set)
        })
        .filter(|(_, set)| !set.is_empty())
        .collect();
    KripkeModel::from_parts(
        states,
        agents.iter().map(|a| a.to_string()).collect(),
        arrows,
        valuation,
        Some(0),
    )
    .expect("generated model is well formed")
}

/// A random model whose `[*]` enumeration stays within `max_blocks`.
pub fn small_block_model(
    rng: &mut impl Rng,
    max_states: usize,
    density: f64,
    max_blocks: usize,
) -> KripkeModel {
    loop {
        let m = random_model(rng, max_states, &AGENTS, &PROPS, density);
        if arrow_blocks(&m, &coarsest_partition(&m)).len() <= max_blocks {
            return m;
        }
    }
}

fn leaf(rng: &mut impl Rng, props: &[&str]) -> Formula {
    match rng.gen_range(0..6) {
        0 => Formula::Top,
        1 => Formula::Bot,
        _ => Formula::atom(*props.choose(rng).unwrap()),
    }
}

/// An AUL-pure formula of modal depth at most `depth`. Update modalities
/// appear only when `updates` is set.
pub fn random_aul_formula(
    rng: &mut impl Rng,
    depth: usize,
    agents: &[&str],
    props: &[&str],
    updates: bool,
) -> Formula {
    let size = rng.gen_range(0..4);
    aul_rec(rng, depth, size, agents, props, updates)
}

fn aul_rec(
    rng: &mut impl Rng,
    depth: usize,
    size: usize,
    agents: &[&str],
    props: &[&str],
    updates: bool,
) -> Formula {
    if size == 0 {
        return leaf(rng, props);
    }
    let choices = if depth == 0 { 4 } else if updates { 8 } else { 7 };
    match rng.gen_range(0..choices) {
        0 => Formula::not(aul_rec(rng, depth, size - 1, agents, props, updates)),
        1 => Formula::and(
            aul_rec(rng, depth, size - 1, agents, props, updates),
            aul_rec(rng, depth, size / 2, agents, props, updates),
        ),
        2 => Formula::or(
            aul_rec(rng, depth, size - 1, agents, props, updates),
            aul_rec(rng, depth, size / 2, agents, props, updates),
        ),
        3 => Formula::implies(
            aul_rec(rng, depth, size / 2, agents, props, updates),
            aul_rec(rng, depth, size - 1, agents, props, updates),
        ),
        4 | 5 => Formula::boxed(
            *agents.choose(rng).unwrap(),
            aul_rec(rng, depth - 1, size - 1, agents, props, updates),
        ),
        6 => Formula::diamond(
            *agents.choose(rng).unwrap(),
            aul_rec(rng, depth - 1, size - 1, agents, props, updates),
        ),
        _ => Formula::update_box(
            random_update(rng, 1, agents, props),
            aul_rec(rng, depth - 1, size - 1, agents, props, updates),
        ),
    }
}

/// An AUL-pure update with one to three clauses of modal depth at most
/// `depth`.
pub fn random_update(rng: &mut impl Rng, depth: usize, agents: &[&str], props: &[&str]) -> Update {
    let n = rng.gen_range(1..=3);
    let clauses = (0..n)
        .map(|_| {
            let (pre_size, post_size) = (rng.gen_range(0..3), rng.gen_range(0..3));
            let pre = aul_rec(rng, depth, pre_size, agents, props, false);
            let agent = *agents.choose(rng).unwrap();
            Clause::new(pre, agent, aul_rec(rng, depth, post_size, agents, props, false))
        })
        .collect();
    Update::new(clauses).unwrap()
}

/// Modal depth at most `depth` with exactly one `[*]` or `<*>`, placed at a
/// random position. Update modalities with AUL-pure clauses may occur.
pub fn random_one_arb_formula(rng: &mut impl Rng, depth: usize, agents: &[&str], props: &[&str]) -> Formula {
    let size = rng.gen_range(0..3);
    let f = one_arb_rec(rng, depth, size, agents, props);
    debug_assert_eq!(f.arb_count(), 1);
    f
}

fn one_arb_rec(rng: &mut impl Rng, depth: usize, size: usize, agents: &[&str], props: &[&str]) -> Formula {
    let choices = if depth == 0 || size == 0 { 2 } else { 6 };
    match rng.gen_range(0..choices) {
        0 => Formula::arb_box(random_aul_formula(rng, depth, agents, props, true)),
        1 => Formula::arb_diamond(random_aul_formula(rng, depth, agents, props, true)),
        2 => Formula::not(one_arb_rec(rng, depth, size - 1, agents, props)),
        3 => {
            let inner = one_arb_rec(rng, depth, size - 1, agents, props);
            let other = random_aul_formula(rng, depth, agents, props, false);
            if rng.gen_bool(0.5) {
                Formula::and(inner, other)
            } else {
                Formula::implies(other, inner)
            }
        }
        4 => Formula::boxed(
            *agents.choose(rng).unwrap(),
            one_arb_rec(rng, depth - 1, size - 1, agents, props),
        ),
        _ => Formula::diamond(
            *agents.choose(rng).unwrap(),
            one_arb_rec(rng, depth - 1, size - 1, agents, props),
        ),
    }
}

/// A formula with at most `max_arb` quantifiers anywhere, including under
/// updates.
pub fn random_formula(rng: &mut impl Rng, depth: usize, max_arb: usize, agents: &[&str], props: &[&str]) -> Formula {
    if max_arb == 0 || rng.gen_bool(0.3) {
        random_aul_formula(rng, depth, agents, props, true)
    } else {
        let f = random_one_arb_formula(rng, depth, agents, props);
        if max_arb > 1 && rng.gen_bool(0.3) {
            Formula::and(f, random_formula(rng, depth, max_arb - 1, agents, props))
        } else {
            f
        }
    }
}

/// Greatest bisimulation by deleting violating pairs from the valuation
/// equivalence until nothing changes. Quadratic in pairs per pass, fine for
/// a handful of states.
pub fn naive_bisimulation(m: &KripkeModel) -> Vec<Vec<bool>> {
    let n = m.num_states();
    let same_val =
        |s: usize, t: usize| m.valuation().iter().all(|(_, set)| set.contains(&s) == set.contains(&t));
    let mut z: Vec<Vec<bool>> = (0..n).map(|s| (0..n).map(|t| same_val(s, t)).collect()).collect();
    let succ = |a: usize, s: usize| -> Vec<usize> {
        m.arrows(a).iter().filter(|(x, _)| *x == s).map(|&(_, t)| t).collect()
    };
    loop {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                if !z[s][t] {
                    continue;
                }
                let ok = (0..m.agents().len()).all(|a| {
                    let (ss, ts) = (succ(a, s), succ(a, t));
                    ss.iter().all(|&s2| ts.iter().any(|&t2| z[s2][t2]))
                        && ts.iter().all(|&t2| ss.iter().any(|&s2| z[s2][t2]))
                });
                if !ok {
                    z[s][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return z;
        }
    }
}

/// Recomputes `M * U` arrow by arrow, deciding every clause formula with
/// `holds` on the original model.
pub fn reference_update(
    m: &KripkeModel,
    u: &Update,
    holds: impl Fn(usize, &Formula) -> bool,
) -> Vec<BTreeSet<(usize, usize)>> {
    (0..m.agents().len())
        .map(|a| {
            m.arrows(a)
                .iter()
                .copied()
                .filter(|&(s, t)| {
                    u.clauses().iter().any(|c| {
                        m.agents()[a] == c.agent && holds(s, &c.pre) && holds(t, &c.post)
                    })
                })
                .collect()
        })
        .collect()
}
