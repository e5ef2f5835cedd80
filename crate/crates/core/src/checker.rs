//! The satisfaction relation, including `[*]`.
//!
//! Formulas are desugared to the core fragment and evaluated bottom-up as
//! truth sets. Every model reached during one evaluation is the input model
//! with some arrows removed, so a model is represented by the bitset of its
//! surviving arrows (indices into the input's arrow list).
//!
//! `[*]φ` is decided on the current model `M`: compute the coarsest
//! bisimulation of `M`, split its arrows into arrow blocks, and require `φ`
//! after every union of blocks, the empty union included. The sets of
//! arrows an `[*]`-free update can retain are exactly these unions (see
//! [`crate::bisim`]), so the enumeration is exhaustive and nothing else is
//! enumerated. With `B` blocks this is `2^B` evaluations of `φ`, bounded by
//! [`Budget::max_arrow_blocks`].

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::bisim::{self, CharacteristicFormulas};
use crate::error::EvalError;
use crate::kripke::KripkeModel;
use crate::syntax::{desugar, Clause, Core, Formula, Update};
use crate::updates::Evaluator;

/// Limits on a single evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest number of arrow blocks a `[*]` may enumerate over.
    pub max_arrow_blocks: usize,
    /// Deepest nesting of `[a]`, `[U]` and `[*]` (boolean connectives are
    /// not counted).
    pub max_recursion_depth: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_arrow_blocks: 20,
            max_recursion_depth: 64,
        }
    }
}

impl Budget {
    pub fn with_max_arrow_blocks(self, max_arrow_blocks: usize) -> Self {
        Budget {
            max_arrow_blocks,
            ..self
        }
    }
}

/// Quantifiers with at least this many blocks split the enumeration across
/// threads.
const PARALLEL_BLOCKS: usize = 12;
const PARALLEL_CHUNKS: u64 = 64;
const MEMO_LIMIT: usize = 1 << 16;

type States = FixedBitSet;
type Alive = FixedBitSet;
type Memo = HashMap<(Alive, usize), States>;

struct Engine<'m> {
    n: usize,
    agents: HashMap<&'m str, usize>,
    props: HashMap<&'m str, States>,
    /// `(agent, source, target)` for every arrow of the input model.
    arrows: Vec<(usize, usize, usize)>,
    initial_classes: Vec<usize>,
    budget: Budget,
}

impl<'m> Engine<'m> {
    fn new(m: &'m KripkeModel, budget: Budget) -> Self {
        let n = m.num_states();
        let props = m
            .valuation()
            .iter()
            .map(|(p, set)| {
                let mut bits = FixedBitSet::with_capacity(n);
                for &s in set {
                    bits.insert(s);
                }
                (p.as_str(), bits)
            })
            .collect();
        Engine {
            n,
            agents: m
                .agents()
                .iter()
                .enumerate()
                .map(|(i, a)| (a.as_str(), i))
                .collect(),
            props,
            arrows: bisim::indexed_arrows(m),
            initial_classes: bisim::valuation_classes(m),
            budget,
        }
    }

    fn all_arrows(&self) -> Alive {
        let mut alive = FixedBitSet::with_capacity(self.arrows.len());
        alive.insert_range(..);
        alive
    }

    fn all_states(&self) -> States {
        let mut all = FixedBitSet::with_capacity(self.n);
        all.insert_range(..);
        all
    }

    fn agent(&self, name: &str) -> Result<usize, EvalError> {
        self.agents
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::UnknownAgent(name.to_string()))
    }

    fn eval(&self, f: &Core, alive: &Alive, depth: usize, memo: &mut Memo) -> Result<States, EvalError> {
        if depth > self.budget.max_recursion_depth {
            return Err(EvalError::DepthBudget {
                limit: self.budget.max_recursion_depth,
            });
        }
        match f {
            Core::Atom(p) => Ok(self
                .props
                .get(p.as_str())
                .cloned()
                .unwrap_or_else(|| FixedBitSet::with_capacity(self.n))),
            Core::Top => Ok(self.all_states()),
            Core::Not(g) => {
                let mut set = self.eval(g, alive, depth, memo)?;
                set.toggle_range(..);
                Ok(set)
            }
            Core::And(l, r) => {
                let mut set = self.eval(l, alive, depth, memo)?;
                if set.is_clear() {
                    return Ok(set);
                }
                set.intersect_with(&self.eval(r, alive, depth, memo)?);
                Ok(set)
            }
            Core::Box(a, g) => {
                let agent = self.agent(a)?;
                let inner = self.eval(g, alive, depth + 1, memo)?;
                let mut set = self.all_states();
                for i in alive.ones() {
                    let (ai, s, t) = self.arrows[i];
                    if ai == agent && !inner.contains(t) {
                        set.set(s, false);
                    }
                }
                Ok(set)
            }
            Core::Update(clauses, g) => {
                let mut resolved = Vec::with_capacity(clauses.len());
                for c in clauses {
                    resolved.push((
                        self.agent(&c.agent)?,
                        self.eval(&c.pre, alive, depth + 1, memo)?,
                        self.eval(&c.post, alive, depth + 1, memo)?,
                    ));
                }
                let mut next = FixedBitSet::with_capacity(self.arrows.len());
                for i in alive.ones() {
                    let (ai, s, t) = self.arrows[i];
                    if resolved
                        .iter()
                        .any(|(ca, pre, post)| *ca == ai && pre.contains(s) && post.contains(t))
                    {
                        next.insert(i);
                    }
                }
                self.eval(g, &next, depth + 1, memo)
            }
            Core::Arb(g) => {
                if **g == Core::Top {
                    return Ok(self.all_states());
                }
                let key = (alive.clone(), g.as_ref() as *const Core as usize);
                if let Some(hit) = memo.get(&key) {
                    return Ok(hit.clone());
                }
                let blocks = self.arrow_blocks(alive);
                let result = self.quantify(g, &blocks, depth + 1, memo)?;
                if memo.len() >= MEMO_LIMIT {
                    memo.clear();
                }
                memo.insert(key, result.clone());
                Ok(result)
            }
        }
    }

    /// Arrow blocks of the model `alive`, as sets of arrow indices, ordered
    /// by `(agent, source class, target class)`.
    fn arrow_blocks(&self, alive: &Alive) -> Vec<Alive> {
        let live: Vec<(usize, usize, usize)> = alive.ones().map(|i| self.arrows[i]).collect();
        let levels = bisim::refine(&self.initial_classes, &live);
        let class = levels.last().expect("refinement yields a level");
        let mut grouped: Vec<((usize, usize, usize), Alive)> = Vec::new();
        let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for i in alive.ones() {
            let (a, s, t) = self.arrows[i];
            let key = (a, class[s], class[t]);
            let slot = *index.entry(key).or_insert_with(|| {
                grouped.push((key, FixedBitSet::with_capacity(self.arrows.len())));
                grouped.len() - 1
            });
            grouped[slot].1.insert(i);
        }
        grouped.sort_by_key(|(key, _)| *key);
        grouped.into_iter().map(|(_, bits)| bits).collect()
    }

    fn check_block_budget(&self, blocks: usize) -> Result<(), EvalError> {
        if blocks > self.budget.max_arrow_blocks || blocks >= 64 {
            return Err(EvalError::BlockBudget {
                blocks,
                limit: self.budget.max_arrow_blocks,
            });
        }
        Ok(())
    }

    fn union(&self, blocks: &[Alive], mask: u64) -> Alive {
        let mut alive = FixedBitSet::with_capacity(self.arrows.len());
        for (b, bits) in blocks.iter().enumerate() {
            if mask >> b & 1 == 1 {
                alive.union_with(bits);
            }
        }
        alive
    }

    /// Intersection over every union of `blocks` of the truth set of `g`.
    fn quantify(&self, g: &Core, blocks: &[Alive], depth: usize, memo: &mut Memo) -> Result<States, EvalError> {
        self.check_block_budget(blocks.len())?;
        let total = 1u64 << blocks.len();
        if blocks.len() < PARALLEL_BLOCKS {
            return self.quantify_range(g, blocks, 0..total, depth, memo);
        }
        let chunk = total / PARALLEL_CHUNKS;
        let parts: Vec<Result<States, EvalError>> = (0..PARALLEL_CHUNKS)
            .into_par_iter()
            .map(|c| {
                let mut local = Memo::new();
                self.quantify_range(g, blocks, c * chunk..(c + 1) * chunk, depth, &mut local)
            })
            .collect();
        let mut acc = self.all_states();
        for part in parts {
            acc.intersect_with(&part?);
            if acc.is_clear() {
                break;
            }
        }
        Ok(acc)
    }

    fn quantify_range(
        &self,
        g: &Core,
        blocks: &[Alive],
        masks: std::ops::Range<u64>,
        depth: usize,
        memo: &mut Memo,
    ) -> Result<States, EvalError> {
        let mut acc = self.all_states();
        for mask in masks {
            let sub = self.union(blocks, mask);
            acc.intersect_with(&self.eval(g, &sub, depth, memo)?);
            if acc.is_clear() {
                break;
            }
        }
        Ok(acc)
    }
}

fn to_set(bits: &FixedBitSet) -> BTreeSet<usize> {
    bits.ones().collect()
}

/// Model checker with a fixed [`Budget`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Checker {
    pub budget: Budget,
}

impl Checker {
    pub fn new(budget: Budget) -> Self {
        Checker { budget }
    }

    pub fn satisfies(&self, m: &KripkeModel, s: usize, f: &Formula) -> Result<bool, EvalError> {
        if s >= m.num_states() {
            return Err(EvalError::UnknownState(s));
        }
        Ok(self.truth_set(m, f)?.contains(&s))
    }

    pub fn truth_set(&self, m: &KripkeModel, f: &Formula) -> Result<BTreeSet<usize>, EvalError> {
        let engine = Engine::new(m, self.budget);
        let core = desugar(f);
        let mut memo = Memo::new();
        Ok(to_set(&engine.eval(&core, &engine.all_arrows(), 0, &mut memo)?))
    }

    /// For `f = <*>φ` true at `s`, an `[*]`-free update after which `φ`
    /// holds at `s`: one clause `(χ_source, agent, χ_target)` per retained
    /// arrow block, or a single unsatisfiable clause when no arrow is
    /// retained. `None` when `f` is false at `s`.
    pub fn witness_update(&self, m: &KripkeModel, s: usize, f: &Formula) -> Result<Option<Update>, EvalError> {
        let Formula::ArbDiamond(body) = f else {
            return Err(EvalError::NotArbDiamond);
        };
        if s >= m.num_states() {
            return Err(EvalError::UnknownState(s));
        }
        if m.agents().is_empty() {
            return Err(EvalError::NoAgents);
        }
        let core = desugar(body);
        if core == Core::Top {
            let identity = m
                .agents()
                .iter()
                .map(|a| Clause::new(Formula::Top, a.clone(), Formula::Top))
                .collect();
            return Ok(Some(Update::new(identity).expect("model has agents")));
        }
        let engine = Engine::new(m, self.budget);
        let part = bisim::coarsest_partition(m);
        let blocks = bisim::arrow_blocks(m, &part);
        engine.check_block_budget(blocks.len())?;
        let arrow_ids: HashMap<(usize, usize, usize), usize> = engine
            .arrows
            .iter()
            .enumerate()
            .map(|(i, &arrow)| (arrow, i))
            .collect();
        let bits: Vec<Alive> = blocks
            .iter()
            .map(|b| {
                let mut set = FixedBitSet::with_capacity(engine.arrows.len());
                for &(src, tgt) in &b.arrows {
                    set.insert(arrow_ids[&(b.agent, src, tgt)]);
                }
                set
            })
            .collect();
        let mut memo = Memo::new();
        for mask in 0..1u64 << blocks.len() {
            let sub = engine.union(&bits, mask);
            if !engine.eval(&core, &sub, 1, &mut memo)?.contains(s) {
                continue;
            }
            let mut chis = CharacteristicFormulas::new(m, &part);
            let mut clauses: Vec<Clause> = blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, b)| {
                    Clause::new(
                        chis.block(b.source_block),
                        m.agents()[b.agent].clone(),
                        chis.block(b.target_block),
                    )
                })
                .collect();
            if clauses.is_empty() {
                clauses.push(Clause::new(Formula::Bot, m.agents()[0].clone(), Formula::Bot));
            }
            return Ok(Some(Update::new(clauses).expect("nonempty clause list")));
        }
        Ok(None)
    }
}

impl Evaluator for Checker {
    fn truth_set(&self, m: &KripkeModel, f: &Formula) -> Result<BTreeSet<usize>, EvalError> {
        Checker::truth_set(self, m, f)
    }
}

pub fn satisfies(m: &KripkeModel, s: usize, f: &Formula, budget: Budget) -> Result<bool, EvalError> {
    Checker::new(budget).satisfies(m, s, f)
}

pub fn truth_set(m: &KripkeModel, f: &Formula, budget: Budget) -> Result<BTreeSet<usize>, EvalError> {
    Checker::new(budget).truth_set(m, f)
}

pub fn witness_update(
    m: &KripkeModel,
    s: usize,
    f: &Formula,
    budget: Budget,
) -> Result<Option<Update>, EvalError> {
    Checker::new(budget).witness_update(m, s, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::load_model;
    use crate::syntax::parse_formula;
    use crate::updates::apply_update;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn refl_a() -> Formula {
        f("<a><a>true & [*]~<a>[a]false")
    }

    /// s -a-> t, t -a-> t, p only at t
    fn lollipop() -> KripkeModel {
        load_model("states: s t\nagent a: s->t t->t\nval p: t\n").unwrap()
    }

    #[test]
    fn arb_box_true_is_valid() {
        let m = lollipop();
        for s in 0..2 {
            assert!(satisfies(&m, s, &f("[*]true"), Budget::default()).unwrap());
        }
    }

    #[test]
    fn empty_union_removes_all_arrows() {
        let m = lollipop();
        assert!(satisfies(&m, 0, &f("<*>[a]false"), Budget::default()).unwrap());
    }

    #[test]
    fn basic_truth_sets() {
        let m = lollipop();
        let b = Budget::default();
        assert_eq!(truth_set(&m, &f("p"), b).unwrap(), BTreeSet::from([1]));
        assert_eq!(truth_set(&m, &f("<a>p"), b).unwrap(), BTreeSet::from([0, 1]));
        assert_eq!(truth_set(&m, &f("[a]~p"), b).unwrap(), BTreeSet::new());
    }

    #[test]
    fn refl_a_fails_when_successor_is_distinguishable() {
        let m = lollipop();
        assert!(!satisfies(&m, 0, &refl_a(), Budget::default()).unwrap());
        assert!(satisfies(&m, 1, &refl_a(), Budget::default()).unwrap());
        // the distinguishing update kills t's loop but keeps s -> t
        let u = f("[{(~p,a,true)}]<a>[a]false");
        assert!(satisfies(&m, 0, &u, Budget::default()).unwrap());
    }

    #[test]
    fn refl_a_holds_on_identity_relation() {
        let m = load_model("states: x y z\nagent a: x->x y->y z->z\nagent b: x->y y->x\nval q: y\n").unwrap();
        for s in 0..3 {
            assert!(satisfies(&m, s, &refl_a(), Budget::default()).unwrap());
        }
    }

    #[test]
    fn budget_violations_are_errors() {
        let m = lollipop();
        let tight = Budget::default().with_max_arrow_blocks(1);
        assert_eq!(
            satisfies(&m, 0, &refl_a(), tight),
            Err(EvalError::BlockBudget { blocks: 2, limit: 1 })
        );
        // [*]true never enumerates
        assert!(satisfies(&m, 0, &f("[*]true"), tight).unwrap());
        let shallow = Budget {
            max_recursion_depth: 2,
            ..Budget::default()
        };
        assert!(matches!(
            satisfies(&m, 0, &f("[a][a][a]p"), shallow),
            Err(EvalError::DepthBudget { limit: 2 })
        ));
    }

    #[test]
    fn unknown_agent_and_state_are_errors() {
        let m = lollipop();
        assert_eq!(
            satisfies(&m, 0, &f("[b]p"), Budget::default()),
            Err(EvalError::UnknownAgent("b".into()))
        );
        assert_eq!(
            satisfies(&m, 9, &f("p"), Budget::default()),
            Err(EvalError::UnknownState(9))
        );
    }

    fn verify_witness(m: &KripkeModel, s: usize, formula: &Formula) -> Update {
        let Formula::ArbDiamond(body) = formula else { unreachable!() };
        let u = witness_update(m, s, formula, Budget::default())
            .unwrap()
            .expect("witness exists");
        assert!(u.is_aul_pure());
        let checker = Checker::default();
        let updated = apply_update(m, &u, &checker).unwrap();
        assert!(checker.satisfies(&updated, s, body).unwrap());
        u
    }

    #[test]
    fn witness_for_removing_all_arrows() {
        let m = lollipop();
        let u = verify_witness(&m, 0, &f("<*>[a]false"));
        assert_eq!(u.clauses(), &[Clause::new(Formula::Bot, "a", Formula::Bot)]);
    }

    #[test]
    fn witness_for_trivial_body_is_total() {
        let m = lollipop();
        let u = verify_witness(&m, 0, &f("<*>true"));
        assert_eq!(u.clauses(), &[Clause::new(Formula::Top, "a", Formula::Top)]);
    }

    #[test]
    fn witness_keeps_one_successor_loop_and_drops_another() {
        // x has two a-successors y (p) and z (q), both with a-loops
        let m = load_model(
            "states: x y z w\nagent a: x->y x->z y->y z->z w->w\nval p: y\nval q: z\n",
        )
        .unwrap();
        let formula = f("<*>(<a><a>true & <a>[a]false)");
        let u = verify_witness(&m, 0, &formula);
        // both arrows out of x plus the loop at y
        assert_eq!(u.clauses().len(), 3);
        assert_eq!(
            witness_update(&m, 0, &f("<*>[a]p"), Budget::default())
                .unwrap()
                .map(|u| u.clauses().len()),
            Some(1)
        );
        assert_eq!(witness_update(&m, 0, &f("<*>(p & ~p)"), Budget::default()).unwrap(), None);
        assert_eq!(witness_update(&m, 0, &f("[*]p"), Budget::default()), Err(EvalError::NotArbDiamond));
    }

    #[test]
    fn nested_quantifiers_rederive_blocks() {
        // after any update, some further update makes x a dead end
        let m = lollipop();
        assert!(satisfies(&m, 0, &f("[*]<*>[a]false"), Budget::default()).unwrap());
        // <*>[*] : first remove everything, then nothing can bring arrows back
        assert!(satisfies(&m, 0, &f("<*>[*][a]false"), Budget::default()).unwrap());
        assert!(!satisfies(&m, 0, &f("[*][*]<a>true"), Budget::default()).unwrap());
    }
}
