//! Finite multi-agent Kripke models.
//!
//! States, agents and propositions keep their declaration order; every
//! textual output iterates in that order so that serialization is
//! byte-deterministic.
//!
//! File format (line oriented, `#` starts a comment):
//!
//! ```text
//! states: s0 s1 s2
//! agent a: s0->s0 s1->s1
//! agent b: s0->s1 s1->s0
//! val p: s0
//! point: s0
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::syntax::is_identifier;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate agent `{0}`")]
    DuplicateAgent(String),
    #[error("reference to undeclared state `{0}`")]
    UnknownState(String),
    #[error("reference to undeclared agent `{0}`")]
    UnknownAgent(String),
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
}

/// A finite Kripke model `(W, R, V)` with an optional designated point.
///
/// Arrows are stored per agent as sets of `(source, target)` state indices.
/// Only propositions with a nonempty truth set are stored; any other
/// proposition is false everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    states: Vec<String>,
    agents: Vec<String>,
    arrows: Vec<BTreeSet<(usize, usize)>>,
    valuation: Vec<(String, BTreeSet<usize>)>,
    point: Option<usize>,
    state_ids: HashMap<String, usize>,
    agent_ids: HashMap<String, usize>,
}

impl KripkeModel {
    pub fn builder() -> ModelBuilder {
        ModelBuilder::default()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_ids.get(name).copied()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agent_ids.get(name).copied()
    }

    /// Arrows of the agent with the given index.
    pub fn arrows(&self, agent: usize) -> &BTreeSet<(usize, usize)> {
        &self.arrows[agent]
    }

    pub fn arrows_of(&self, agent: &str) -> Result<&BTreeSet<(usize, usize)>, ModelError> {
        self.agent_index(agent)
            .map(|a| &self.arrows[a])
            .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))
    }

    pub fn total_arrows(&self) -> usize {
        self.arrows.iter().map(BTreeSet::len).sum()
    }

    /// `(proposition, truth set)` pairs in declaration order.
    pub fn valuation(&self) -> &[(String, BTreeSet<usize>)] {
        &self.valuation
    }

    pub fn is_true(&self, prop: &str, s: usize) -> bool {
        self.valuation
            .iter()
            .find(|(p, _)| p == prop)
            .is_some_and(|(_, set)| set.contains(&s))
    }

    pub fn point(&self) -> Option<usize> {
        self.point
    }

    /// Same states, valuation and point with replaced arrow sets.
    ///
    /// # Panics
    ///
    /// If `arrows` does not have one entry per agent or mentions a state
    /// index out of range.
    pub fn with_arrows(&self, arrows: Vec<BTreeSet<(usize, usize)>>) -> KripkeModel {
        assert_eq!(arrows.len(), self.agents.len(), "one arrow set per agent");
        let n = self.states.len();
        assert!(
            arrows.iter().flatten().all(|&(s, t)| s < n && t < n),
            "arrow endpoint out of range"
        );
        KripkeModel {
            arrows,
            ..self.clone()
        }
    }

    pub fn with_point(&self, point: Option<usize>) -> KripkeModel {
        if let Some(p) = point {
            assert!(p < self.states.len(), "point out of range");
        }
        KripkeModel {
            point,
            ..self.clone()
        }
    }

    /// Builds a model from index-based parts. Empty truth sets are dropped.
    pub fn from_parts(
        states: Vec<String>,
        agents: Vec<String>,
        arrows: Vec<BTreeSet<(usize, usize)>>,
        valuation: Vec<(String, BTreeSet<usize>)>,
        point: Option<usize>,
    ) -> Result<KripkeModel, ModelError> {
        let mut b = ModelBuilder::default();
        for s in &states {
            b = b.state(s);
        }
        for (a, name) in agents.iter().enumerate() {
            b = b.agent(name);
            if let Some(set) = arrows.get(a) {
                for &(s, t) in set {
                    let (s, t) = (name_of(&states, s)?, name_of(&states, t)?);
                    b = b.arrow(name, s, t);
                }
            }
        }
        if arrows.len() > agents.len() {
            return Err(ModelError::UnknownAgent(format!("#{}", agents.len())));
        }
        for (p, set) in &valuation {
            for &s in set {
                b = b.val(p, name_of(&states, s)?);
            }
        }
        if let Some(pt) = point {
            b = b.point(name_of(&states, pt)?);
        }
        b.build()
    }
}

fn name_of(states: &[String], s: usize) -> Result<&str, ModelError> {
    states
        .get(s)
        .map(String::as_str)
        .ok_or_else(|| ModelError::UnknownState(format!("#{s}")))
}

/// Collects names and resolves them in [`ModelBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    states: Vec<String>,
    agents: Vec<String>,
    arrows: Vec<(String, String, String)>,
    valuation: Vec<(String, String)>,
    point: Option<String>,
}

impl ModelBuilder {
    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.states.push(name.into());
        self
    }

    pub fn states<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn agent(mut self, name: impl Into<String>) -> Self {
        self.agents.push(name.into());
        self
    }

    pub fn arrow(mut self, agent: &str, from: &str, to: &str) -> Self {
        self.arrows
            .push((agent.to_string(), from.to_string(), to.to_string()));
        self
    }

    pub fn val(mut self, prop: &str, state: &str) -> Self {
        self.valuation.push((prop.to_string(), state.to_string()));
        self
    }

    pub fn point(mut self, state: &str) -> Self {
        self.point = Some(state.to_string());
        self
    }

    pub fn build(self) -> Result<KripkeModel, ModelError> {
        let mut state_ids = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if !is_identifier(s) {
                return Err(ModelError::InvalidName(s.clone()));
            }
            if state_ids.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let mut agent_ids = HashMap::new();
        for (i, a) in self.agents.iter().enumerate() {
            if !is_identifier(a) {
                return Err(ModelError::InvalidName(a.clone()));
            }
            if agent_ids.insert(a.clone(), i).is_some() {
                return Err(ModelError::DuplicateAgent(a.clone()));
            }
        }
        let lookup = |s: &str| {
            state_ids
                .get(s)
                .copied()
                .ok_or_else(|| ModelError::UnknownState(s.to_string()))
        };
        let mut arrows = vec![BTreeSet::new(); self.agents.len()];
        for (a, s, t) in &self.arrows {
            let ai = *agent_ids
                .get(a)
                .ok_or_else(|| ModelError::UnknownAgent(a.clone()))?;
            arrows[ai].insert((lookup(s)?, lookup(t)?));
        }
        let mut valuation: Vec<(String, BTreeSet<usize>)> = Vec::new();
        for (p, s) in &self.valuation {
            if !is_identifier(p) {
                return Err(ModelError::InvalidName(p.clone()));
            }
            let s = lookup(s)?;
            match valuation.iter_mut().find(|(q, _)| q == p) {
                Some((_, set)) => {
                    set.insert(s);
                }
                None => valuation.push((p.clone(), BTreeSet::from([s]))),
            }
        }
        let point = self.point.as_deref().map(lookup).transpose()?;
        Ok(KripkeModel {
            states: self.states,
            agents: self.agents,
            arrows,
            valuation,
            point,
            state_ids,
            agent_ids,
        })
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a model in the line-oriented file format.
pub fn load_model(text: &str) -> Result<KripkeModel, ModelError> {
    let mut b = ModelBuilder::default();
    let mut seen_point = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_error(line_no, "expected `<keyword>: ...`"))?;
        let mut head_words = head.split_whitespace();
        let keyword = head_words.next().unwrap_or("");
        let name = head_words.next();
        if head_words.next().is_some() {
            return Err(parse_error(line_no, format!("malformed header `{head}`")));
        }
        let items = rest.split_whitespace();
        match (keyword, name) {
            ("states", None) => {
                b = b.states(items);
            }
            ("agent", Some(agent)) => {
                if b.agents.iter().any(|a| a == agent) {
                    return Err(ModelError::DuplicateAgent(agent.to_string()));
                }
                b = b.agent(agent);
                for item in items {
                    let (s, t) = item.split_once("->").ok_or_else(|| {
                        parse_error(line_no, format!("expected `source->target`, found `{item}`"))
                    })?;
                    b = b.arrow(agent, s, t);
                }
            }
            ("val", Some(prop)) => {
                if !is_identifier(prop) {
                    return Err(ModelError::InvalidName(prop.to_string()));
                }
                for s in items {
                    b = b.val(prop, s);
                }
            }
            ("point", None) => {
                let words: Vec<&str> = items.collect();
                if words.len() != 1 || seen_point {
                    return Err(parse_error(line_no, "expected exactly one point"));
                }
                seen_point = true;
                b = b.point(words[0]);
            }
            _ => {
                return Err(parse_error(
                    line_no,
                    format!("unknown declaration `{head}`"),
                ))
            }
        }
    }
    b.build()
}

/// Writes a model in the file format; [`load_model`] inverts it exactly.
pub fn save_model(m: &KripkeModel) -> String {
    let mut out = String::new();
    out.push_str("states:");
    for s in &m.states {
        out.push(' ');
        out.push_str(s);
    }
    out.push('\n');
    for (a, name) in m.agents.iter().enumerate() {
        let _ = write!(out, "agent {name}:");
        for &(s, t) in &m.arrows[a] {
            let _ = write!(out, " {}->{}", m.states[s], m.states[t]);
        }
        out.push('\n');
    }
    for (p, set) in &m.valuation {
        let _ = write!(out, "val {p}:");
        for &s in set {
            out.push(' ');
            out.push_str(&m.states[s]);
        }
        out.push('\n');
    }
    if let Some(pt) = m.point {
        let _ = writeln!(out, "point: {}", m.states[pt]);
    }
    out
}

/// Graphviz rendering: one node per state labelled with its true
/// propositions, one edge per arrow labelled with its agent, the point drawn
/// as a double circle.
pub fn export_dot(m: &KripkeModel) -> String {
    let mut out = String::from("digraph model {\n  node [shape=circle];\n");
    for (s, name) in m.states.iter().enumerate() {
        let props: Vec<&str> = m
            .valuation
            .iter()
            .filter(|(_, set)| set.contains(&s))
            .map(|(p, _)| p.as_str())
            .collect();
        let shape = if m.point == Some(s) {
            ", shape=doublecircle"
        } else {
            ""
        };
        let label = if props.is_empty() {
            name.clone()
        } else {
            format!("{name}\\n{}", props.join(","))
        };
        let _ = writeln!(out, "  \"{name}\" [label=\"{label}\"{shape}];");
    }
    for (a, agent) in m.agents.iter().enumerate() {
        for &(s, t) in &m.arrows[a] {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{agent}\"];",
                m.states[s], m.states[t]
            );
        }
    }
    out.push_str("}\n");
    out
}
