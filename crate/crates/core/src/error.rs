use thiserror::Error;

/// Failure to evaluate a formula. Exceeding a budget is reported here and
/// never turned into a truth value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("quantifier budget exceeded: {blocks} arrow blocks, limit {limit}")]
    BlockBudget { blocks: usize, limit: usize },
    #[error("recursion depth limit {limit} exceeded")]
    DepthBudget { limit: usize },
    #[error("formula mentions undeclared agent `{0}`")]
    UnknownAgent(String),
    #[error("state index {0} is not a state of the model")]
    UnknownState(usize),
    #[error("arrow ({from}, {agent}, {to}) is not in the model")]
    NoSuchArrow {
        from: usize,
        agent: usize,
        to: usize,
    },
    #[error("expected a formula of the form <*>φ")]
    NotArbDiamond,
    #[error("the model declares no agents, so no update literal can be formed")]
    NoAgents,
}
