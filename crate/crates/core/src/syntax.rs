//! Formulas and arrow updates: the AST, a recursive-descent parser for the
//! ASCII surface syntax, a minimal-parenthesis printer and the desugaring
//! pass onto the core fragment.
//!
//! Surface syntax, from loosest to tightest binding:
//!
//! | operator            | meaning                     | associativity |
//! |---------------------|-----------------------------|---------------|
//! | `<->`               | biconditional               | left          |
//! | `->`                | implication                 | right         |
//! | `\|`                | disjunction                 | left          |
//! | `&`                 | conjunction                 | left          |
//! | `~`, `[a]`, `<a>`, `[{..}]`, `<{..}>`, `[*]`, `<*>` | unary | prefix |
//!
//! Update literals are written `{(pre, agent, post), ...}` and appear inside
//! `[...]` or `<...>`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A formula of arbitrary arrow update logic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// `[a]φ`: φ holds at every `a`-successor.
    Box(String, Box<Formula>),
    /// `<a>φ`.
    Diamond(String, Box<Formula>),
    /// `[U]φ`: φ holds after the arrow update `U`.
    UpdateBox(Update, Box<Formula>),
    UpdateDiamond(Update, Box<Formula>),
    /// `[*]φ`: φ holds after every update free of `[*]`.
    ArbBox(Box<Formula>),
    ArbDiamond(Box<Formula>),
}

/// One clause `(pre, agent, post)` of an arrow update. An `agent`-arrow
/// survives the clause when `pre` holds at its source and `post` at its
/// target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub pre: Formula,
    pub agent: String,
    pub post: Formula,
}

impl Clause {
    pub fn new(pre: Formula, agent: impl Into<String>, post: Formula) -> Self {
        Clause {
            pre,
            agent: agent.into(),
            post,
        }
    }
}

/// A nonempty list of clauses. Semantically a set: order and duplicates do
/// not affect the result of applying it, but they are kept for printing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Update {
    clauses: Vec<Clause>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("an arrow update needs at least one clause")]
pub struct EmptyUpdate;

impl Update {
    pub fn new(clauses: Vec<Clause>) -> Result<Self, EmptyUpdate> {
        if clauses.is_empty() {
            return Err(EmptyUpdate);
        }
        Ok(Update { clauses })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    /// True when no clause formula contains `[*]` or `<*>`.
    pub fn is_aul_pure(&self) -> bool {
        self.clauses
            .iter()
            .all(|c| c.pre.is_aul_pure() && c.post.is_aul_pure())
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn boxed(agent: impl Into<String>, f: Formula) -> Self {
        Formula::Box(agent.into(), Box::new(f))
    }

    pub fn diamond(agent: impl Into<String>, f: Formula) -> Self {
        Formula::Diamond(agent.into(), Box::new(f))
    }

    pub fn update_box(u: Update, f: Formula) -> Self {
        Formula::UpdateBox(u, Box::new(f))
    }

    pub fn update_diamond(u: Update, f: Formula) -> Self {
        Formula::UpdateDiamond(u, Box::new(f))
    }

    pub fn arb_box(f: Formula) -> Self {
        Formula::ArbBox(Box::new(f))
    }

    pub fn arb_diamond(f: Formula) -> Self {
        Formula::ArbDiamond(Box::new(f))
    }

    /// Left-nested conjunction; `Top` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `Bot` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bot)
    }

    /// True when the formula contains no `[*]`/`<*>`, including inside
    /// update clauses.
    pub fn is_aul_pure(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => true,
            Formula::Not(f) | Formula::Box(_, f) | Formula::Diamond(_, f) => f.is_aul_pure(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.is_aul_pure() && r.is_aul_pure()
            }
            Formula::UpdateBox(u, f) | Formula::UpdateDiamond(u, f) => {
                u.is_aul_pure() && f.is_aul_pure()
            }
            Formula::ArbBox(_) | Formula::ArbDiamond(_) => false,
        }
    }

    /// Nesting depth of `[a]`/`<a>` operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 0,
            Formula::Not(f) | Formula::ArbBox(f) | Formula::ArbDiamond(f) => f.modal_depth(),
            Formula::Box(_, f) | Formula::Diamond(_, f) => 1 + f.modal_depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.modal_depth().max(r.modal_depth())
            }
            Formula::UpdateBox(u, f) | Formula::UpdateDiamond(u, f) => u
                .clauses()
                .iter()
                .map(|c| c.pre.modal_depth().max(c.post.modal_depth()))
                .max()
                .unwrap_or(0)
                .max(f.modal_depth()),
        }
    }

    /// Number of `[*]`/`<*>` occurrences.
    pub fn arb_count(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 0,
            Formula::Not(f) | Formula::Box(_, f) | Formula::Diamond(_, f) => f.arb_count(),
            Formula::ArbBox(f) | Formula::ArbDiamond(f) => 1 + f.arb_count(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.arb_count() + r.arb_count()
            }
            Formula::UpdateBox(u, f) | Formula::UpdateDiamond(u, f) => {
                u.clauses()
                    .iter()
                    .map(|c| c.pre.arb_count() + c.post.arb_count())
                    .sum::<usize>()
                    + f.arb_count()
            }
        }
    }
}

/// Propositions and agents occurring anywhere in a formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub props: BTreeSet<String>,
    pub agents: BTreeSet<String>,
}

pub fn signature(f: &Formula) -> Signature {
    let mut sig = Signature::default();
    collect_signature(f, &mut sig);
    sig
}

fn collect_signature(f: &Formula, sig: &mut Signature) {
    match f {
        Formula::Atom(p) => {
            sig.props.insert(p.clone());
        }
        Formula::Top | Formula::Bot => {}
        Formula::Not(g) | Formula::ArbBox(g) | Formula::ArbDiamond(g) => collect_signature(g, sig),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_signature(l, sig);
            collect_signature(r, sig);
        }
        Formula::Box(a, g) | Formula::Diamond(a, g) => {
            sig.agents.insert(a.clone());
            collect_signature(g, sig);
        }
        Formula::UpdateBox(u, g) | Formula::UpdateDiamond(u, g) => {
            for c in u.clauses() {
                sig.agents.insert(c.agent.clone());
                collect_signature(&c.pre, sig);
                collect_signature(&c.post, sig);
            }
            collect_signature(g, sig);
        }
    }
}

// ---------------------------------------------------------------------------
// Core fragment
// ---------------------------------------------------------------------------

/// The primitive fragment every formula desugars into. Evaluation is only
/// defined here.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Core {
    Atom(String),
    Top,
    Not(Box<Core>),
    And(Box<Core>, Box<Core>),
    Box(String, Box<Core>),
    Update(Vec<CoreClause>, Box<Core>),
    Arb(Box<Core>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoreClause {
    pub pre: Core,
    pub agent: String,
    pub post: Core,
}

fn core_not(c: Core) -> Core {
    Core::Not(Box::new(c))
}

fn core_and(l: Core, r: Core) -> Core {
    Core::And(Box::new(l), Box::new(r))
}

/// Rewrites every abbreviation into `{Atom, Top, Not, And, Box, Update, Arb}`:
///
/// * `false` ↦ `~true`
/// * `φ | ψ` ↦ `~(~φ & ~ψ)`
/// * `φ -> ψ` ↦ `~(φ & ~ψ)`
/// * `φ <-> ψ` ↦ `(φ -> ψ) & (ψ -> φ)`, each side rewritten as above
/// * `<a>φ` ↦ `~[a]~φ`, likewise for `<U>` and `<*>`
pub fn desugar(f: &Formula) -> Core {
    match f {
        Formula::Atom(p) => Core::Atom(p.clone()),
        Formula::Top => Core::Top,
        Formula::Bot => core_not(Core::Top),
        Formula::Not(g) => core_not(desugar(g)),
        Formula::And(l, r) => core_and(desugar(l), desugar(r)),
        Formula::Or(l, r) => core_not(core_and(core_not(desugar(l)), core_not(desugar(r)))),
        Formula::Implies(l, r) => core_not(core_and(desugar(l), core_not(desugar(r)))),
        Formula::Iff(l, r) => {
            let (l, r) = (desugar(l), desugar(r));
            core_and(
                core_not(core_and(l.clone(), core_not(r.clone()))),
                core_not(core_and(r, core_not(l))),
            )
        }
        Formula::Box(a, g) => Core::Box(a.clone(), Box::new(desugar(g))),
        Formula::Diamond(a, g) => core_not(Core::Box(a.clone(), Box::new(core_not(desugar(g))))),
        Formula::UpdateBox(u, g) => Core::Update(desugar_update(u), Box::new(desugar(g))),
        Formula::UpdateDiamond(u, g) => core_not(Core::Update(
            desugar_update(u),
            Box::new(core_not(desugar(g))),
        )),
        Formula::ArbBox(g) => Core::Arb(Box::new(desugar(g))),
        Formula::ArbDiamond(g) => core_not(Core::Arb(Box::new(core_not(desugar(g))))),
    }
}

pub fn desugar_update(u: &Update) -> Vec<CoreClause> {
    u.clauses()
        .iter()
        .map(|c| CoreClause {
            pre: desugar(&c.pre),
            agent: c.agent.clone(),
            post: desugar(&c.post),
        })
        .collect()
}

impl Core {
    /// The same formula as a [`Formula`] built only from core constructors.
    pub fn to_formula(&self) -> Formula {
        match self {
            Core::Atom(p) => Formula::Atom(p.clone()),
            Core::Top => Formula::Top,
            Core::Not(g) => Formula::not(g.to_formula()),
            Core::And(l, r) => Formula::and(l.to_formula(), r.to_formula()),
            Core::Box(a, g) => Formula::boxed(a.clone(), g.to_formula()),
            Core::Update(cs, g) => {
                let clauses = cs
                    .iter()
                    .map(|c| Clause::new(c.pre.to_formula(), c.agent.clone(), c.post.to_formula()))
                    .collect();
                // desugar never produces an empty clause list
                let u = Update::new(clauses).expect("core update has clauses");
                Formula::update_box(u, g.to_formula())
            }
            Core::Arb(g) => Formula::arb_box(g.to_formula()),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unexpected character {found:?} at offset {pos}")]
    UnknownToken { pos: usize, found: char },
    #[error("syntax error at offset {pos}: expected {expected}, found {found}")]
    Unexpected {
        pos: usize,
        expected: String,
        found: String,
    },
}

impl SyntaxError {
    pub fn position(&self) -> usize {
        match self {
            SyntaxError::UnknownToken { pos, .. } | SyntaxError::Unexpected { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Comma,
    Star,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Arrow => "`->`",
            Tok::DoubleArrow => "`<->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::LAngle => "`<`",
            Tok::RAngle => "`>`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Star => "`*`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// True for nonempty strings over `[A-Za-z0-9_]` that are not keywords.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char) && s != "true" && s != "false"
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let tok = match c {
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '*' => Tok::Star,
            '>' => Tok::RAngle,
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            '<' if text[i..].starts_with("<->") => {
                i += 2;
                Tok::DoubleArrow
            }
            '<' => Tok::LAngle,
            c if is_ident_char(c) => {
                let end = text[i..]
                    .find(|ch: char| !is_ident_char(ch))
                    .map_or(text.len(), |off| i + off);
                let word = &text[i..end];
                i = end;
                out.push((
                    start,
                    match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word.to_string()),
                    },
                ));
                continue;
            }
            other => return Err(SyntaxError::UnknownToken { pos: i, found: other }),
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> SyntaxError {
        SyntaxError::Unexpected {
            pos: self.pos(),
            expected: expected.to_string(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn agent(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error("agent name")),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBracket => {
                self.bump();
                match self.peek() {
                    Tok::Star => {
                        self.bump();
                        self.expect(Tok::RBracket, "`]`")?;
                        Ok(Formula::arb_box(self.unary()?))
                    }
                    Tok::LBrace => {
                        let u = self.update_literal()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        Ok(Formula::update_box(u, self.unary()?))
                    }
                    _ => {
                        let a = self.agent()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        Ok(Formula::boxed(a, self.unary()?))
                    }
                }
            }
            Tok::LAngle => {
                self.bump();
                match self.peek() {
                    Tok::Star => {
                        self.bump();
                        self.expect(Tok::RAngle, "`>`")?;
                        Ok(Formula::arb_diamond(self.unary()?))
                    }
                    Tok::LBrace => {
                        let u = self.update_literal()?;
                        self.expect(Tok::RAngle, "`>`")?;
                        Ok(Formula::update_diamond(u, self.unary()?))
                    }
                    _ => {
                        let a = self.agent()?;
                        self.expect(Tok::RAngle, "`>`")?;
                        Ok(Formula::diamond(a, self.unary()?))
                    }
                }
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.error("formula")),
        }
    }

    fn update_literal(&mut self) -> Result<Update, SyntaxError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut clauses = vec![self.clause()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            clauses.push(self.clause()?);
        }
        self.expect(Tok::RBrace, "`,` or `}`")?;
        Ok(Update::new(clauses).expect("at least one clause parsed"))
    }

    fn clause(&mut self) -> Result<Clause, SyntaxError> {
        self.expect(Tok::LParen, "`(` opening a clause")?;
        let pre = self.formula()?;
        self.expect(Tok::Comma, "`,`")?;
        let agent = self.agent()?;
        self.expect(Tok::Comma, "`,`")?;
        let post = self.formula()?;
        self.expect(Tok::RParen, "`)` closing a clause")?;
        Ok(Clause { pre, agent, post })
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error("end of input")),
        }
    }
}

/// Parses a formula in the ASCII surface syntax.
///
/// ```
/// use aaul::syntax::{parse_formula, Formula};
///
/// let f = parse_formula("p & ~q").unwrap();
/// assert_eq!(f, Formula::and(Formula::atom("p"), Formula::not(Formula::atom("q"))));
/// ```
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a bare update literal such as `{(true,b,true)}`.
pub fn parse_update(text: &str) -> Result<Update, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let u = p.update_literal()?;
    p.finish()?;
    Ok(u)
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

const PREC_IFF: u8 = 1;
const PREC_IMP: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_UNARY: u8 = 5;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => PREC_IFF,
        Formula::Implies(..) => PREC_IMP,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn write_child(out: &mut String, f: &Formula, parens: bool) {
    if parens {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    } else {
        write_formula(out, f);
    }
}

fn write_binary(out: &mut String, l: &Formula, op: &str, r: &Formula, prec: u8, right_assoc: bool) {
    let (lp, rp) = (precedence(l), precedence(r));
    let left_parens = lp < prec || (right_assoc && lp == prec);
    let right_parens = rp < prec || (!right_assoc && rp == prec);
    write_child(out, l, left_parens);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write_child(out, r, right_parens);
}

fn write_update(out: &mut String, u: &Update) {
    out.push('{');
    for (i, c) in u.clauses().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('(');
        write_formula(out, &c.pre);
        out.push_str(", ");
        out.push_str(&c.agent);
        out.push_str(", ");
        write_formula(out, &c.post);
        out.push(')');
    }
    out.push('}');
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Top => out.push_str("true"),
        Formula::Bot => out.push_str("false"),
        Formula::Not(g) => {
            out.push('~');
            write_child(out, g, precedence(g) < PREC_UNARY);
        }
        Formula::And(l, r) => write_binary(out, l, "&", r, PREC_AND, false),
        Formula::Or(l, r) => write_binary(out, l, "|", r, PREC_OR, false),
        Formula::Implies(l, r) => write_binary(out, l, "->", r, PREC_IMP, true),
        Formula::Iff(l, r) => write_binary(out, l, "<->", r, PREC_IFF, false),
        Formula::Box(a, g) => {
            out.push('[');
            out.push_str(a);
            out.push(']');
            write_child(out, g, precedence(g) < PREC_UNARY);
        }
        Formula::Diamond(a, g) => {
            out.push('<');
            out.push_str(a);
            out.push('>');
            write_child(out, g, precedence(g) < PREC_UNARY);
        }
        Formula::UpdateBox(u, g) => {
            out.push('[');
            write_update(out, u);
            out.push(']');
            write_child(out, g, precedence(g) < PREC_UNARY);
        }
        Formula::UpdateDiamond(u, g) => {
            out.push('<');
            write_update(out, u);
            out.push('>');
            write_child(out, g, precedence(g) < PREC_UNARY);
        }
        Formula::ArbBox(g) => {
            out.push_str("[*]");
            write_child(out, g, precedence(g) < PREC_UNARY);
        }
        Formula::ArbDiamond(g) => {
            out.push_str("<*>");
            write_child(out, g, precedence(g) < PREC_UNARY);
        }
    }
}

/// Canonical text with minimal parentheses; [`parse_formula`] inverts it.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

pub fn print_update(u: &Update) -> String {
    let mut out = String::new();
    write_update(&mut out, u);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_update(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
