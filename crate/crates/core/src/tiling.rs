//! Wang tiling instances, the formula that encodes them, a periodic tiling
//! search, and the torus-shaped witness model built from a periodic tiling.
//!
//! Coordinates are `(n, m)`: `n` grows to the east, `m` to the north. A tile
//! at `(n, m)` must show its north colour on the south edge of `(n, m + 1)`
//! and its east colour on the west edge of `(n + 1, m)`. On a `k × k` torus
//! both coordinates wrap modulo `k`.
//!
//! Vocabulary of the encoding:
//!
//! | symbol            | meaning                                   |
//! |-------------------|-------------------------------------------|
//! | agent `a`         | reflexive marker relation                 |
//! | agent `b`         | origin `s0` to and from every cell         |
//! | agents `u d l r`  | one step up, down, left, right            |
//! | `p`               | holds only at the origin                  |
//! | `p_<tile>`        | the cell carries tile type `<tile>`       |
//! | `N_<c>` ... `W_<c>` | the north ... west edge has colour `<c>` |

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::checker::{Budget, Checker};
use crate::error::EvalError;
use crate::kripke::{KripkeModel, ModelError};
use crate::syntax::{is_identifier, Clause, Formula, Update};

pub const AGENT_MARK: &str = "a";
pub const AGENT_ORIGIN: &str = "b";

/// The four grid directions, in the order up, down, left, right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    pub fn agent(self) -> &'static str {
        match self {
            Direction::Up => "u",
            Direction::Down => "d",
            Direction::Left => "l",
            Direction::Right => "r",
        }
    }

    /// `(dn, dm)` offset of one step.
    fn offset(self) -> (i64, i64) {
        match self {
            Direction::Up => (0, 1),
            Direction::Down => (0, -1),
            Direction::Left => (-1, 0),
            Direction::Right => (1, 0),
        }
    }
}

/// The eight ordered pairs of orthogonal directions whose composites must
/// commute.
pub const COMMUTING_PAIRS: [(Direction, Direction); 8] = [
    (Direction::Up, Direction::Left),
    (Direction::Up, Direction::Right),
    (Direction::Down, Direction::Left),
    (Direction::Down, Direction::Right),
    (Direction::Left, Direction::Up),
    (Direction::Left, Direction::Down),
    (Direction::Right, Direction::Up),
    (Direction::Right, Direction::Down),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    North,
    East,
    South,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::East, Side::South, Side::West];

    pub fn letter(self) -> &'static str {
        match self {
            Side::North => "N",
            Side::East => "E",
            Side::South => "S",
            Side::West => "W",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileType {
    pub name: String,
    /// Colour indices in [`Side::ALL`] order: north, east, south, west.
    pub sides: [usize; 4],
}

impl TileType {
    pub fn color(&self, side: Side) -> usize {
        self.sides[side as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileInstance {
    colors: Vec<String>,
    types: Vec<TileType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate tile `{name}`")]
    DuplicateTile { line: usize, name: String },
    #[error("line {line}: tile `{name}` has no {side}= side")]
    MissingSide { line: usize, name: String, side: &'static str },
    #[error("line {line}: colour `{color}` is not in the declared colour list")]
    UnknownColor { line: usize, color: String },
    #[error("the instance has no tile types")]
    Empty,
}

impl TileInstance {
    /// Builds an instance from `(name, [north, east, south, west])` colour
    /// names. Colours are numbered in order of first use.
    pub fn new<S: AsRef<str>>(tiles: &[(S, [S; 4])]) -> Result<Self, TileError> {
        let mut text = String::new();
        for (name, [n, e, s, w]) in tiles {
            let _ = writeln!(
                text,
                "tile {} N={} E={} S={} W={}",
                name.as_ref(),
                n.as_ref(),
                e.as_ref(),
                s.as_ref(),
                w.as_ref()
            );
        }
        parse_tiles(&text)
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn types(&self) -> &[TileType] {
        &self.types
    }

    pub fn color_name(&self, c: usize) -> &str {
        &self.colors[c]
    }

    fn tile_prop(&self, i: usize) -> String {
        format!("p_{}", self.types[i].name)
    }

    fn side_prop(&self, side: Side, c: usize) -> String {
        format!("{}_{}", side.letter(), self.colors[c])
    }

    /// Appends a tile type, adding any new colours. Used to build perturbed
    /// instances in tests.
    pub fn with_extra_tile(&self, name: &str, sides: [&str; 4]) -> Result<TileInstance, TileError> {
        let mut tiles: Vec<(String, [String; 4])> = self
            .types
            .iter()
            .map(|t| (t.name.clone(), t.sides.map(|c| self.colors[c].clone())))
            .collect();
        tiles.push((name.to_string(), sides.map(str::to_string)));
        let mut inst = TileInstance::new(&tiles)?;
        // keep the original colour numbering stable
        let mut colors = self.colors.clone();
        for c in &inst.colors {
            if !colors.contains(c) {
                colors.push(c.clone());
            }
        }
        for t in &mut inst.types {
            t.sides = t.sides.map(|c| colors.iter().position(|x| *x == inst.colors[c]).unwrap());
        }
        inst.colors = colors;
        Ok(inst)
    }
}

/// Reads the tile file format: `tile <name> N=<c> E=<c> S=<c> W=<c>` per
/// line, `#` comments. An optional `colors: c1 c2 ...` line restricts the
/// colours that may be used; otherwise colours are declared by use.
pub fn parse_tiles(text: &str) -> Result<TileInstance, TileError> {
    let mut declared: Option<Vec<String>> = None;
    let mut colors: Vec<String> = Vec::new();
    let mut types: Vec<TileType> = Vec::new();
    let bad = |line: usize, message: String| TileError::Parse { line, message };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("colors:") {
            let list: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if let Some(c) = list.iter().find(|c| !is_identifier(c)) {
                return Err(bad(line, format!("invalid colour name `{c}`")));
            }
            declared = Some(list);
            continue;
        }
        let mut words = body.split_whitespace();
        if words.next() != Some("tile") {
            return Err(bad(line, "expected `tile <name> N=.. E=.. S=.. W=..`".into()));
        }
        let name = words
            .next()
            .ok_or_else(|| bad(line, "missing tile name".into()))?;
        if !is_identifier(name) {
            return Err(bad(line, format!("invalid tile name `{name}`")));
        }
        if types.iter().any(|t| t.name == name) {
            return Err(TileError::DuplicateTile {
                line,
                name: name.to_string(),
            });
        }
        let mut sides: [Option<usize>; 4] = [None; 4];
        for word in words {
            let (key, color) = word
                .split_once('=')
                .ok_or_else(|| bad(line, format!("expected `SIDE=colour`, found `{word}`")))?;
            let side = match key {
                "N" => Side::North,
                "E" => Side::East,
                "S" => Side::South,
                "W" => Side::West,
                other => return Err(bad(line, format!("unknown side `{other}`"))),
            };
            if !is_identifier(color) {
                return Err(bad(line, format!("invalid colour name `{color}`")));
            }
            if let Some(list) = &declared {
                if !list.iter().any(|c| c == color) {
                    return Err(TileError::UnknownColor {
                        line,
                        color: color.to_string(),
                    });
                }
            }
            if sides[side as usize].is_some() {
                return Err(bad(line, format!("side {key} given twice")));
            }
            let ci = match colors.iter().position(|c| c == color) {
                Some(ci) => ci,
                None => {
                    colors.push(color.to_string());
                    colors.len() - 1
                }
            };
            sides[side as usize] = Some(ci);
        }
        let mut resolved = [0; 4];
        for side in Side::ALL {
            resolved[side as usize] = sides[side as usize].ok_or_else(|| TileError::MissingSide {
                line,
                name: name.to_string(),
                side: side.letter(),
            })?;
        }
        types.push(TileType {
            name: name.to_string(),
            sides: resolved,
        });
    }
    if types.is_empty() {
        return Err(TileError::Empty);
    }
    Ok(TileInstance { colors, types })
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

fn atom(s: &str) -> Formula {
    Formula::atom(s)
}

fn dia(agent: &str, f: Formula) -> Formula {
    Formula::diamond(agent, f)
}

fn bx(agent: &str, f: Formula) -> Formula {
    Formula::boxed(agent, f)
}

fn and(l: Formula, r: Formula) -> Formula {
    Formula::and(l, r)
}

fn imp(l: Formula, r: Formula) -> Formula {
    Formula::implies(l, r)
}

/// `<a>true`
fn marked() -> Formula {
    dia(AGENT_MARK, Formula::Top)
}

/// `[a]false`
fn unmarked() -> Formula {
    bx(AGENT_MARK, Formula::Bot)
}

/// `<a><a>true & [*]~<a>[a]false`: every `a`-arrow leads to a state that
/// cannot be told apart from its source.
pub fn refl_a() -> Formula {
    and(
        dia(AGENT_MARK, marked()),
        Formula::arb_box(Formula::not(dia(AGENT_MARK, unmarked()))),
    )
}

/// `[*](<a>true -> [b][b]<a>true)`
fn marked_returns() -> Formula {
    Formula::arb_box(imp(marked(), bx(AGENT_ORIGIN, bx(AGENT_ORIGIN, marked()))))
}

/// `<b>(<b>true & [b]<a>true)`
fn origin_marks_cells() -> Formula {
    dia(
        AGENT_ORIGIN,
        and(dia(AGENT_ORIGIN, Formula::Top), bx(AGENT_ORIGIN, marked())),
    )
}

/// `<x><a>true & <b><b>[a]false`
fn separated(x: &str) -> Formula {
    and(
        dia(x, marked()),
        dia(AGENT_ORIGIN, dia(AGENT_ORIGIN, unmarked())),
    )
}

/// Every named part of the tiling formula for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingEncoding {
    pub psi1: Formula,
    pub psi2: Formula,
    /// Indexed like [`Direction::ALL`].
    pub psi3: [Formula; 4],
    pub psi4: [Formula; 4],
    pub propd: [Formula; 4],
    /// The update embedded in each `propd`.
    pub propd_update: [Update; 4],
    pub return_: [Formula; 4],
    pub inverse: Formula,
    pub commute: Formula,
    pub one_tile: Formula,
    pub one_color: Formula,
    pub tile_colors: Formula,
    pub tile_match: Formula,
}

/// The update `(p | [a]false, b, true), (true, a, true), ([a]false, x, true)`.
pub fn propd_update(x: Direction) -> Update {
    Update::new(vec![
        Clause::new(Formula::or(atom("p"), unmarked()), AGENT_ORIGIN, Formula::Top),
        Clause::new(Formula::Top, AGENT_MARK, Formula::Top),
        Clause::new(unmarked(), x.agent(), Formula::Top),
    ])
    .expect("three clauses")
}

fn psi3(x: &str) -> Formula {
    bx(
        AGENT_ORIGIN,
        and(
            dia(
                x,
                Formula::conj([Formula::not(atom("p")), refl_a(), dia(AGENT_ORIGIN, atom("p"))]),
            ),
            Formula::arb_box(imp(dia(x, marked()), bx(x, marked()))),
        ),
    )
}

fn psi4(x: &str) -> Formula {
    Formula::arb_box(imp(
        marked(),
        bx(AGENT_ORIGIN, bx(x, bx(AGENT_ORIGIN, marked()))),
    ))
}

fn propd(x: Direction) -> Formula {
    let xa = x.agent();
    let antecedent = Formula::conj([
        unmarked(),
        dia(xa, marked()),
        origin_marks_cells(),
        Formula::arb_diamond(separated(xa)),
    ]);
    let consequent = Formula::update_box(propd_update(x), Formula::arb_diamond(separated(xa)));
    bx(AGENT_ORIGIN, Formula::arb_box(imp(antecedent, consequent)))
}

fn return_(x: &str) -> Formula {
    let target = Formula::conj([marked(), origin_marks_cells(), marked_returns()]);
    bx(
        AGENT_ORIGIN,
        Formula::arb_diamond(Formula::conj([
            unmarked(),
            dia(AGENT_ORIGIN, Formula::Top),
            dia(x, Formula::arb_diamond(target)),
        ])),
    )
}

fn inverse() -> Formula {
    let back = |x: Direction, y: Direction| bx(x.agent(), bx(y.agent(), unmarked()));
    bx(
        AGENT_ORIGIN,
        Formula::arb_box(imp(
            unmarked(),
            Formula::conj([
                back(Direction::Up, Direction::Down),
                back(Direction::Down, Direction::Up),
                back(Direction::Left, Direction::Right),
                back(Direction::Right, Direction::Left),
            ]),
        )),
    )
}

fn commute() -> Formula {
    let law = |(x, y): (Direction, Direction)| {
        imp(
            dia(x.agent(), dia(y.agent(), unmarked())),
            bx(y.agent(), bx(x.agent(), unmarked())),
        )
    };
    bx(
        AGENT_ORIGIN,
        Formula::arb_box(Formula::conj(COMMUTING_PAIRS.into_iter().map(law))),
    )
}

fn one_tile(inst: &TileInstance) -> Formula {
    let k = inst.types.len();
    let some = Formula::disj((0..k).map(|i| atom(&inst.tile_prop(i))));
    let pairs: Vec<Formula> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| Formula::not(and(atom(&inst.tile_prop(i)), atom(&inst.tile_prop(j)))))
        .collect();
    let body = if pairs.is_empty() {
        some
    } else {
        and(some, Formula::conj(pairs))
    };
    bx(AGENT_ORIGIN, body)
}

fn one_color(inst: &TileInstance) -> Formula {
    let per_side = |side: Side| {
        let colors = inst.colors.len();
        bx(
            AGENT_ORIGIN,
            Formula::conj((0..colors).map(|c| {
                imp(
                    atom(&inst.side_prop(side, c)),
                    Formula::conj(
                        (0..colors)
                            .filter(|&d| d != c)
                            .map(|d| Formula::not(atom(&inst.side_prop(side, d)))),
                    ),
                )
            })),
        )
    };
    Formula::conj([Side::North, Side::South, Side::East, Side::West].map(per_side))
}

fn tile_colors(inst: &TileInstance) -> Formula {
    bx(
        AGENT_ORIGIN,
        Formula::conj(inst.types.iter().enumerate().map(|(i, t)| {
            imp(
                atom(&inst.tile_prop(i)),
                Formula::conj(
                    [Side::North, Side::South, Side::East, Side::West]
                        .map(|side| atom(&inst.side_prop(side, t.color(side)))),
                ),
            )
        })),
    )
}

fn tile_match(inst: &TileInstance) -> Formula {
    bx(
        AGENT_ORIGIN,
        Formula::conj((0..inst.colors.len()).map(|c| {
            and(
                imp(
                    atom(&inst.side_prop(Side::North, c)),
                    bx(Direction::Up.agent(), atom(&inst.side_prop(Side::South, c))),
                ),
                imp(
                    atom(&inst.side_prop(Side::West, c)),
                    bx(Direction::Left.agent(), atom(&inst.side_prop(Side::East, c))),
                ),
            )
        })),
    )
}

impl TilingEncoding {
    pub fn new(inst: &TileInstance) -> Self {
        let dirs = Direction::ALL;
        TilingEncoding {
            psi1: Formula::conj([
                refl_a(),
                atom("p"),
                dia(AGENT_ORIGIN, Formula::Top),
                bx(AGENT_ORIGIN, Formula::not(atom("p"))),
            ]),
            psi2: and(
                bx(AGENT_ORIGIN, and(refl_a(), dia(AGENT_ORIGIN, atom("p")))),
                marked_returns(),
            ),
            psi3: dirs.map(|x| psi3(x.agent())),
            psi4: dirs.map(|x| psi4(x.agent())),
            propd: dirs.map(propd),
            propd_update: dirs.map(propd_update),
            return_: dirs.map(|x| return_(x.agent())),
            inverse: inverse(),
            commute: commute(),
            one_tile: one_tile(inst),
            one_color: one_color(inst),
            tile_colors: tile_colors(inst),
            tile_match: tile_match(inst),
        }
    }

    /// The top-level conjuncts in order, with their names: `psi1`, `psi2`,
    /// then `psi3_x psi4_x propd_x return_x` for `x` in `u d l r`, then
    /// `inverse commute one_tile one_color tile_colors tile_match`.
    pub fn conjuncts(&self) -> Vec<(String, &Formula)> {
        let mut out: Vec<(String, &Formula)> = vec![("psi1".into(), &self.psi1), ("psi2".into(), &self.psi2)];
        for (i, x) in Direction::ALL.iter().enumerate() {
            let a = x.agent();
            out.push((format!("psi3_{a}"), &self.psi3[i]));
            out.push((format!("psi4_{a}"), &self.psi4[i]));
            out.push((format!("propd_{a}"), &self.propd[i]));
            out.push((format!("return_{a}"), &self.return_[i]));
        }
        out.push(("inverse".into(), &self.inverse));
        out.push(("commute".into(), &self.commute));
        out.push(("one_tile".into(), &self.one_tile));
        out.push(("one_color".into(), &self.one_color));
        out.push(("tile_colors".into(), &self.tile_colors));
        out.push(("tile_match".into(), &self.tile_match));
        out
    }

    /// The full tiling formula: the left-nested conjunction of
    /// [`Self::conjuncts`].
    pub fn psi_types(&self) -> Formula {
        Formula::conj(self.conjuncts().into_iter().map(|(_, f)| f.clone()))
    }

    /// Looks up a conjunct or one of `refl_a`, `psi_types`.
    pub fn named(&self, name: &str) -> Option<Formula> {
        match name {
            "psi_types" => Some(self.psi_types()),
            "refl_a" => Some(refl_a()),
            _ => self
                .conjuncts()
                .into_iter()
                .find(|(n, _)| n == name)
                .map(|(_, f)| f.clone()),
        }
    }

    /// The four conjuncts without `[*]`.
    pub fn static_conjuncts(&self) -> [(&'static str, &Formula); 4] {
        [
            ("one_tile", &self.one_tile),
            ("one_color", &self.one_color),
            ("tile_colors", &self.tile_colors),
            ("tile_match", &self.tile_match),
        ]
    }
}

pub fn encode(inst: &TileInstance) -> Formula {
    TilingEncoding::new(inst).psi_types()
}

// ---------------------------------------------------------------------------
// Periodic tilings
// ---------------------------------------------------------------------------

/// A `k × k` assignment of tile types, indexed `(n, m)`, read as a tiling of
/// the torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicTiling {
    period: usize,
    /// Tile index of `(n, m)` at `n * period + m`.
    grid: Vec<usize>,
}

impl PeriodicTiling {
    /// Panics if `grid.len() != period * period`.
    pub fn from_grid(period: usize, grid: Vec<usize>) -> Self {
        assert_eq!(grid.len(), period * period, "grid must be period × period");
        PeriodicTiling { period, grid }
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn tile_at(&self, n: usize, m: usize) -> usize {
        self.grid[n * self.period + m]
    }

    /// Copy with one cell replaced; the result need not be valid.
    pub fn with_cell(&self, n: usize, m: usize, tile: usize) -> Self {
        let mut grid = self.grid.clone();
        grid[n * self.period + m] = tile;
        PeriodicTiling {
            period: self.period,
            grid,
        }
    }

    /// Checks every torus adjacency constraint.
    pub fn is_valid(&self, inst: &TileInstance) -> bool {
        let k = self.period;
        if self.grid.iter().any(|&t| t >= inst.types.len()) {
            return false;
        }
        let tile = |n: usize, m: usize| &inst.types[self.tile_at(n % k, m % k)];
        (0..k).all(|n| {
            (0..k).all(|m| {
                tile(n, m).color(Side::North) == tile(n, m + 1).color(Side::South)
                    && tile(n, m).color(Side::East) == tile(n + 1, m).color(Side::West)
            })
        })
    }

    /// One line per row, northernmost first; tile names separated by spaces.
    pub fn render(&self, inst: &TileInstance) -> String {
        let k = self.period;
        let mut out = String::new();
        for m in (0..k).rev() {
            let row: Vec<&str> = (0..k)
                .map(|n| inst.types[self.tile_at(n, m)].name.as_str())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Exhaustive backtracking over the `k²` cells in `(n, m)` order. Returns
/// the lexicographically least valid assignment.
pub fn find_periodic_tiling(inst: &TileInstance, k: usize) -> Option<PeriodicTiling> {
    assert!(k >= 1, "period must be positive");
    let mut grid: Vec<Option<usize>> = vec![None; k * k];
    if place(inst, k, 0, &mut grid) {
        Some(PeriodicTiling {
            period: k,
            grid: grid.into_iter().map(|t| t.expect("complete")).collect(),
        })
    } else {
        None
    }
}

/// Smallest period up to `max_period` admitting a tiling.
pub fn search_periodic_tiling(inst: &TileInstance, max_period: usize) -> Option<PeriodicTiling> {
    (1..=max_period).find_map(|k| find_periodic_tiling(inst, k))
}

/// Constraints between `(n, m)` holding `tile` and every assigned neighbour.
fn consistent(inst: &TileInstance, k: usize, grid: &[Option<usize>], n: usize, m: usize, tile: usize) -> bool {
    let t = &inst.types[tile];
    let up = (n, (m + 1) % k);
    let down = (n, (m + k - 1) % k);
    let right = ((n + 1) % k, m);
    let left = ((n + k - 1) % k, m);
    let check = |(cn, cm): (usize, usize), f: &dyn Fn(&TileType) -> bool| {
        // with k = 1 the neighbour is the cell itself
        let neighbour = if (cn, cm) == (n, m) { Some(tile) } else { grid[cn * k + cm] };
        neighbour.map_or(true, |o| f(&inst.types[o]))
    };
    check(up, &|o| t.color(Side::North) == o.color(Side::South))
        && check(down, &|o| o.color(Side::North) == t.color(Side::South))
        && check(right, &|o| t.color(Side::East) == o.color(Side::West))
        && check(left, &|o| o.color(Side::East) == t.color(Side::West))
}

fn place(inst: &TileInstance, k: usize, cell: usize, grid: &mut [Option<usize>]) -> bool {
    if cell == k * k {
        return true;
    }
    let (n, m) = (cell / k, cell % k);
    for tile in 0..inst.types.len() {
        if consistent(inst, k, grid, n, m, tile) {
            grid[cell] = Some(tile);
            if place(inst, k, cell + 1, grid) {
                return true;
            }
            grid[cell] = None;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Witness models
// ---------------------------------------------------------------------------

/// Name of the state for cell `(n, m)`.
pub fn cell_state(n: usize, m: usize) -> String {
    format!("c_{n}_{m}")
}

/// Proposition unique to cell `(n, m)` when cell propositions are enabled.
pub fn cell_prop(n: usize, m: usize) -> String {
    format!("cell_{n}_{m}")
}

/// The origin plus one state per torus cell. `a` is the identity, `b` links
/// the origin with every cell in both directions, `u d l r` step to the
/// toroidal neighbours. The origin is the designated point.
pub fn build_torus_model(inst: &TileInstance, tiling: &PeriodicTiling, unique_cell_props: bool) -> KripkeModel {
    try_build_torus_model(inst, tiling, unique_cell_props).expect("torus model is well formed")
}

fn try_build_torus_model(
    inst: &TileInstance,
    tiling: &PeriodicTiling,
    unique_cell_props: bool,
) -> Result<KripkeModel, ModelError> {
    let k = tiling.period;
    let cells: Vec<(usize, usize)> = (0..k).flat_map(|n| (0..k).map(move |m| (n, m))).collect();
    // state 0 is the origin, cell (n, m) is state 1 + n * k + m
    let id = |n: usize, m: usize| 1 + n * k + m;
    let mut states = vec!["s0".to_string()];
    states.extend(cells.iter().map(|&(n, m)| cell_state(n, m)));

    let mut agents = vec![AGENT_MARK.to_string(), AGENT_ORIGIN.to_string()];
    agents.extend(Direction::ALL.iter().map(|d| d.agent().to_string()));

    let mut arrows: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); agents.len()];
    arrows[0] = (0..states.len()).map(|s| (s, s)).collect();
    for &(n, m) in &cells {
        arrows[1].insert((0, id(n, m)));
        arrows[1].insert((id(n, m), 0));
        for (di, d) in Direction::ALL.iter().enumerate() {
            let (dn, dm) = d.offset();
            let tn = (n as i64 + dn).rem_euclid(k as i64) as usize;
            let tm = (m as i64 + dm).rem_euclid(k as i64) as usize;
            arrows[2 + di].insert((id(n, m), id(tn, tm)));
        }
    }

    let mut valuation: Vec<(String, BTreeSet<usize>)> = vec![("p".into(), BTreeSet::from([0]))];
    for i in 0..inst.types.len() {
        let set = cells
            .iter()
            .filter(|&&(n, m)| tiling.tile_at(n, m) == i)
            .map(|&(n, m)| id(n, m))
            .collect();
        valuation.push((inst.tile_prop(i), set));
    }
    for side in [Side::North, Side::South, Side::East, Side::West] {
        for c in 0..inst.colors.len() {
            let set = cells
                .iter()
                .filter(|&&(n, m)| inst.types[tiling.tile_at(n, m)].color(side) == c)
                .map(|&(n, m)| id(n, m))
                .collect();
            valuation.push((inst.side_prop(side, c), set));
        }
    }
    if unique_cell_props {
        for &(n, m) in &cells {
            valuation.push((cell_prop(n, m), BTreeSet::from([id(n, m)])));
        }
    }
    valuation.retain(|(_, set)| !set.is_empty());
    KripkeModel::from_parts(states, agents, arrows, valuation, Some(0))
}

/// Pass or fail of each `[*]`-free conjunct at the model's point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticReport {
    pub results: Vec<(&'static str, bool)>,
}

impl StaticReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|&(_, ok)| ok)
    }

    pub fn passed(&self, name: &str) -> Option<bool> {
        self.results
            .iter()
            .find(|(n, _)| *n == name)
            .map(|&(_, ok)| ok)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StaticCheckError {
    #[error("the model has no designated origin point")]
    NoPoint,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Evaluates `one_tile`, `one_color`, `tile_colors` and `tile_match` at the
/// model's point.
pub fn check_static_conjuncts(m: &KripkeModel, inst: &TileInstance) -> Result<StaticReport, StaticCheckError> {
    let origin = m.point().ok_or(StaticCheckError::NoPoint)?;
    let enc = TilingEncoding::new(inst);
    let checker = Checker::new(Budget::default());
    let mut results = Vec::with_capacity(4);
    for (name, f) in enc.static_conjuncts() {
        results.push((name, checker.satisfies(m, origin, f)?));
    }
    Ok(StaticReport { results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, print_formula, signature};

    fn alternating() -> TileInstance {
        parse_tiles("tile t0 N=a E=c S=b W=c\ntile t1 N=b E=c S=a W=c\n").unwrap()
    }

    #[test]
    fn parses_single_tile() {
        let inst = parse_tiles("tile t0 N=c E=c S=c W=c").unwrap();
        assert_eq!(inst.types().len(), 1);
        assert_eq!(inst.colors(), &["c".to_string()]);
    }

    #[test]
    fn parses_tiles_in_order() {
        let inst = alternating();
        assert_eq!(inst.types()[0].name, "t0");
        assert_eq!(inst.types()[1].name, "t1");
        assert_eq!(inst.colors().len(), 3);
        assert_eq!(inst.color_name(inst.types()[1].color(Side::North)), "b");
    }

    #[test]
    fn tile_parse_errors() {
        assert!(matches!(
            parse_tiles("tile t0 N=c E=c S=c").unwrap_err(),
            TileError::MissingSide { side: "W", .. }
        ));
        assert!(matches!(
            parse_tiles("tile t0 N=c E=c S=c W=c\ntile t0 N=c E=c S=c W=c").unwrap_err(),
            TileError::DuplicateTile { line: 2, .. }
        ));
        assert!(matches!(
            parse_tiles("colors: red\ntile t0 N=red E=red S=blue W=red").unwrap_err(),
            TileError::UnknownColor { line: 2, .. }
        ));
        assert!(matches!(parse_tiles("# nothing\n").unwrap_err(), TileError::Empty));
        assert!(parse_tiles("tile t0 N=c E=c S=c W=c Q=c").is_err());
    }

    #[test]
    fn uniform_tile_tiles_with_period_one() {
        let inst = parse_tiles("tile t0 N=c E=c S=c W=c").unwrap();
        let t = find_periodic_tiling(&inst, 1).unwrap();
        assert!(t.is_valid(&inst));
    }

    #[test]
    fn vertical_mismatch_never_tiles() {
        let inst = parse_tiles("tile t0 N=red E=c S=blue W=c").unwrap();
        for k in 1..=3 {
            assert!(find_periodic_tiling(&inst, k).is_none());
        }
    }

    #[test]
    fn alternation_needs_period_two() {
        let inst = alternating();
        assert!(find_periodic_tiling(&inst, 1).is_none());
        let t = find_periodic_tiling(&inst, 2).unwrap();
        assert!(t.is_valid(&inst));
        // lexicographically least: (0,0)=t0, (0,1)=t1, (1,0)=t0, (1,1)=t1
        assert_eq!(t, PeriodicTiling::from_grid(2, vec![0, 1, 0, 1]));
        assert_eq!(t.render(&inst), "t1 t1\nt0 t0\n");
    }

    #[test]
    fn psi_types_shape() {
        let enc = TilingEncoding::new(&alternating());
        assert_eq!(enc.conjuncts().len(), 24);
        assert_eq!(COMMUTING_PAIRS.len(), 8);
        let sig = signature(&enc.psi_types());
        let agents: Vec<&str> = sig.agents.iter().map(String::as_str).collect();
        assert_eq!(agents, ["a", "b", "d", "l", "r", "u"]);
    }

    #[test]
    fn one_tile_for_two_tiles() {
        let enc = TilingEncoding::new(&alternating());
        assert_eq!(
            enc.one_tile,
            parse_formula("[b]((p_t0 | p_t1) & ~(p_t0 & p_t1))").unwrap()
        );
    }

    #[test]
    fn hand_checked_subformulas() {
        let enc = TilingEncoding::new(&alternating());
        let p = |s: &str| parse_formula(s).unwrap();
        assert_eq!(enc.psi1, p("<a><a>true & [*]~<a>[a]false & p & <b>true & [b]~p"));
        assert_eq!(
            enc.psi4[3],
            p("[*](<a>true -> [b][r][b]<a>true)")
        );
        assert_eq!(
            print_formula(&Formula::update_box(enc.propd_update[0].clone(), Formula::Top)),
            "[{(p | [a]false, b, true), (true, a, true), ([a]false, u, true)}]true"
        );
        assert_eq!(
            enc.tile_match,
            p("[b]((N_a -> [u]S_a) & (W_a -> [l]E_a) & ((N_c -> [u]S_c) & (W_c -> [l]E_c)) & ((N_b -> [u]S_b) & (W_b -> [l]E_b)))")
        );
    }

    #[test]
    fn torus_model_sizes() {
        let uniform = parse_tiles("tile t0 N=c E=c S=c W=c").unwrap();
        let t1 = find_periodic_tiling(&uniform, 1).unwrap();
        let m = build_torus_model(&uniform, &t1, false);
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.arrows_of("b").unwrap().len(), 2);
        for d in ["u", "d", "l", "r"] {
            assert_eq!(m.arrows_of(d).unwrap(), &BTreeSet::from([(1, 1)]));
        }

        let inst = alternating();
        let t2 = find_periodic_tiling(&inst, 2).unwrap();
        let m = build_torus_model(&inst, &t2, false);
        assert_eq!(m.num_states(), 5);
        assert_eq!(m.arrows_of("b").unwrap().len(), 8);
        for d in ["u", "d", "l", "r"] {
            assert_eq!(m.arrows_of(d).unwrap().len(), 4);
        }
        assert_eq!(m.arrows_of("a").unwrap().len(), 5);
        assert_eq!(m.point(), Some(0));
        for s in 1..5 {
            let tiles = ["p_t0", "p_t1"].iter().filter(|p| m.is_true(p, s)).count();
            assert_eq!(tiles, 1);
        }
        let with_cells = build_torus_model(&inst, &t2, true);
        assert!(with_cells.is_true("cell_1_0", 3));
    }

    #[test]
    fn up_increments_second_coordinate() {
        let inst = alternating();
        let t2 = find_periodic_tiling(&inst, 2).unwrap();
        let m = build_torus_model(&inst, &t2, false);
        let from = m.state_index("c_1_0").unwrap();
        let to = m.state_index("c_1_1").unwrap();
        assert!(m.arrows_of("u").unwrap().contains(&(from, to)));
        let right = m.state_index("c_0_0").unwrap();
        assert!(m.arrows_of("r").unwrap().contains(&(right, from)));
    }

    #[test]
    fn static_conjuncts_pass_on_witness_and_catch_perturbations() {
        let inst = alternating();
        let t2 = find_periodic_tiling(&inst, 2).unwrap();
        let m = build_torus_model(&inst, &t2, false);
        let report = check_static_conjuncts(&m, &inst).unwrap();
        assert!(report.all_pass(), "{report:?}");

        let broken = t2.with_cell(0, 0, 1);
        assert!(!broken.is_valid(&inst));
        let m = build_torus_model(&inst, &broken, false);
        let report = check_static_conjuncts(&m, &inst).unwrap();
        assert_eq!(report.passed("tile_match"), Some(false));
        assert_eq!(report.passed("tile_colors"), Some(true));
    }

    #[test]
    fn double_tile_breaks_one_tile() {
        let inst = alternating();
        let t2 = find_periodic_tiling(&inst, 2).unwrap();
        let m = build_torus_model(&inst, &t2, false);
        let mut valuation = m.valuation().to_vec();
        for (p, set) in &mut valuation {
            if p == "p_t1" {
                set.insert(1);
            }
        }
        let bad = KripkeModel::from_parts(
            m.states().to_vec(),
            m.agents().to_vec(),
            (0..m.agents().len()).map(|a| m.arrows(a).clone()).collect(),
            valuation,
            m.point(),
        )
        .unwrap();
        let report = check_static_conjuncts(&bad, &inst).unwrap();
        assert_eq!(report.passed("one_tile"), Some(false));
    }
}
