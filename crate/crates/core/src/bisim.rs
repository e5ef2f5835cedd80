//! Coarsest bisimulation by signature refinement, characteristic formulas
//! of the resulting classes, and the decomposition of each relation into
//! arrow blocks.
//!
//! On a finite model two states satisfy the same modal formulas exactly when
//! they are bisimilar. Arrow-update formulas are bisimulation invariant too,
//! so the set of arrows an update retains is always a union of *arrow
//! blocks*: all `a`-arrows from one class into another. Conversely every
//! union of blocks is retained by the update with one clause
//! `(χ_source, a, χ_target)` per block, where `χ` is a characteristic
//! formula. This is what makes the `[*]` quantifier finitely decidable.

use std::collections::HashMap;

use crate::error::EvalError;
use crate::kripke::KripkeModel;
use crate::syntax::Formula;

/// The coarsest bisimulation on a model. Blocks are numbered in order of
/// their smallest state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_index: Vec<usize>,
    /// `levels[k][s]` is the class of `s` after `k` refinement rounds.
    levels: Vec<Vec<usize>>,
}

impl Partition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, s: usize) -> usize {
        self.block_index[s]
    }

    pub fn block_index(&self) -> &[usize] {
        &self.block_index
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Refinement rounds performed, counting the final round that found the
    /// partition stable.
    pub fn rounds(&self) -> usize {
        self.levels.len() - 1
    }

    fn from_levels(levels: Vec<Vec<usize>>) -> Partition {
        let block_index = levels.last().cloned().unwrap_or_default();
        let count = block_index.iter().map(|&b| b + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); count];
        for (s, &b) in block_index.iter().enumerate() {
            blocks[b].push(s);
        }
        Partition {
            blocks,
            block_index,
            levels,
        }
    }
}

/// Renumbers class keys by first occurrence.
fn canonical_ids<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> Vec<usize> {
    let mut ids = HashMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

/// Signature refinement. `initial[s]` is the valuation class of `s`;
/// `arrows` lists `(agent, source, target)`. Returns every intermediate
/// level; the last one is stable.
pub(crate) fn refine(initial: &[usize], arrows: &[(usize, usize, usize)]) -> Vec<Vec<usize>> {
    let n = initial.len();
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(a, s, t) in arrows {
        succ[s].push((a, t));
    }
    let mut levels = vec![canonical_ids(initial.iter())];
    loop {
        let cur = levels.last().unwrap();
        let next = canonical_ids((0..n).map(|s| {
            let mut sig: Vec<(usize, usize)> = succ[s].iter().map(|&(a, t)| (a, cur[t])).collect();
            sig.sort_unstable();
            sig.dedup();
            (cur[s], sig)
        }));
        let before = cur.iter().map(|&b| b + 1).max().unwrap_or(0);
        let after = next.iter().map(|&b| b + 1).max().unwrap_or(0);
        levels.push(next);
        if after == before {
            return levels;
        }
    }
}

/// Valuation classes: states agreeing on every stored proposition share a
/// class.
pub(crate) fn valuation_classes(m: &KripkeModel) -> Vec<usize> {
    canonical_ids((0..m.num_states()).map(|s| {
        m.valuation()
            .iter()
            .map(|(_, set)| set.contains(&s))
            .collect::<Vec<bool>>()
    }))
}

pub(crate) fn indexed_arrows(m: &KripkeModel) -> Vec<(usize, usize, usize)> {
    (0..m.agents().len())
        .flat_map(|a| m.arrows(a).iter().map(move |&(s, t)| (a, s, t)))
        .collect()
}

pub fn coarsest_partition(m: &KripkeModel) -> Partition {
    Partition::from_levels(refine(&valuation_classes(m), &indexed_arrows(m)))
}

pub fn bisimilar(m: &KripkeModel, s: usize, t: usize) -> Result<bool, EvalError> {
    for x in [s, t] {
        if x >= m.num_states() {
            return Err(EvalError::UnknownState(x));
        }
    }
    let part = coarsest_partition(m);
    Ok(part.block_of(s) == part.block_of(t))
}

/// A purely modal formula whose truth set in `m` is exactly block `block`
/// of `part`, which must be `coarsest_partition(m)`.
///
/// The level-0 formula of a class is the conjunction of its valuation
/// literals. The level-`k+1` formula adds, for each agent, a diamond for
/// every level-`k` successor class and a box over their disjunction.
pub fn characteristic_formula(m: &KripkeModel, part: &Partition, block: usize) -> Formula {
    CharacteristicFormulas::new(m, part).block(block)
}

/// Shares subformulas across the classes of one partition.
pub(crate) struct CharacteristicFormulas<'a> {
    m: &'a KripkeModel,
    part: &'a Partition,
    memo: HashMap<(usize, usize), Formula>,
}

impl<'a> CharacteristicFormulas<'a> {
    pub(crate) fn new(m: &'a KripkeModel, part: &'a Partition) -> Self {
        CharacteristicFormulas {
            m,
            part,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn block(&mut self, block: usize) -> Formula {
        let rep = self.part.blocks[block][0];
        // the last round only confirmed stability, so the level before it
        // already separates the final classes
        self.at_level(self.part.rounds() - 1, rep)
    }

    fn at_level(&mut self, level: usize, s: usize) -> Formula {
        let class = self.part.levels[level][s];
        if let Some(f) = self.memo.get(&(level, class)) {
            return f.clone();
        }
        let mut parts: Vec<Formula> = self
            .m
            .valuation()
            .iter()
            .map(|(p, set)| {
                if set.contains(&s) {
                    Formula::atom(p.clone())
                } else {
                    Formula::not(Formula::atom(p.clone()))
                }
            })
            .collect();
        if level > 0 {
            for (a, agent) in self.m.agents().iter().enumerate() {
                // one representative per distinct successor class
                let mut reps: Vec<(usize, usize)> = Vec::new();
                for &(src, t) in self.m.arrows(a) {
                    if src != s {
                        continue;
                    }
                    let c = self.part.levels[level - 1][t];
                    if !reps.iter().any(|&(rc, _)| rc == c) {
                        reps.push((c, t));
                    }
                }
                reps.sort_unstable();
                let succ: Vec<Formula> = reps
                    .iter()
                    .map(|&(_, t)| self.at_level(level - 1, t))
                    .collect();
                for f in &succ {
                    parts.push(Formula::diamond(agent.clone(), f.clone()));
                }
                parts.push(Formula::boxed(agent.clone(), Formula::disj(succ)));
            }
        }
        let f = Formula::conj(parts);
        self.memo.insert((level, class), f.clone());
        f
    }
}

/// All `agent`-arrows from one class into another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowBlock {
    pub agent: usize,
    pub source_block: usize,
    pub target_block: usize,
    pub arrows: Vec<(usize, usize)>,
}

/// Nonempty arrow blocks ordered by `(agent, source block, target block)`.
pub fn arrow_blocks(m: &KripkeModel, part: &Partition) -> Vec<ArrowBlock> {
    let mut blocks: Vec<ArrowBlock> = Vec::new();
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (a, s, t) in indexed_arrows(m) {
        let key = (a, part.block_of(s), part.block_of(t));
        let i = *index.entry(key).or_insert_with(|| {
            blocks.push(ArrowBlock {
                agent: a,
                source_block: key.1,
                target_block: key.2,
                arrows: Vec::new(),
            });
            blocks.len() - 1
        });
        blocks[i].arrows.push((s, t));
    }
    blocks.sort_by_key(|b| (b.agent, b.source_block, b.target_block));
    blocks
}
