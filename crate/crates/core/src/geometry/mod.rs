//! Exact geometry of cylinder cubes, points of the fractal and Euclidean balls.
//!
//! All predicates are decided over the rationals. Floating point never enters
//! this module: at depth 40 the cube sides of a ternary schedule are already
//! below what a double can separate from neighbouring coordinates.

mod enumerate;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::schedule::{Cell, Schedule};

pub use enumerate::{
    cells_inside_ball, covering_count, enumerate_cells, enumerate_cells_in_box, CellCounts,
    CountInterval,
};

/// A finite multi-index `σ ∈ Σ_n`: one kept cell per level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAddress {
    cells: Vec<Cell>,
}

impl CellAddress {
    pub fn new(cells: Vec<Cell>) -> Self {
        CellAddress { cells }
    }

    pub fn root() -> Self {
        CellAddress { cells: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn child(&self, cell: Cell) -> Self {
        let mut cells = self.cells.clone();
        cells.push(cell);
        CellAddress { cells }
    }

    pub fn truncate(&self, n: usize) -> Self {
        CellAddress {
            cells: self.cells[..n.min(self.cells.len())].to_vec(),
        }
    }

    /// Every level's choice must be a kept cell of that level's step.
    pub fn validate(&self, s: &Schedule) -> Result<()> {
        for (i, cell) in self.cells.iter().enumerate() {
            let step = s.step(i + 1);
            if cell.len() != s.dim() || !step.contains(cell) {
                return Err(Error::InvalidAddress(format!(
                    "cell {cell:?} at level {} is not kept",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Integer corner of the cube in units of `Λ_n` (Horner evaluation).
    pub(crate) fn integer_corner(&self, s: &Schedule) -> Vec<BigUint> {
        let mut corner = vec![BigUint::zero(); s.dim()];
        for (i, cell) in self.cells.iter().enumerate() {
            let m = s.step(i + 1).m();
            for (a, &c) in corner.iter_mut().zip(cell) {
                *a *= m;
                *a += c;
            }
        }
        corner
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailRule {
    /// Lexicographically smallest kept cell at every level.
    FirstKept,
    /// Cycle through these cell choices.
    Periodic(Vec<Cell>),
}

/// An infinite address naming a point of the fractal: an explicit prefix
/// followed by a tail rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointAddress {
    prefix: Vec<Cell>,
    tail: TailRule,
}

impl PointAddress {
    pub fn new(prefix: Vec<Cell>, tail: TailRule) -> Result<Self> {
        if let TailRule::Periodic(cycle) = &tail {
            if cycle.is_empty() {
                return Err(Error::PointSpec("empty periodic tail".into()));
            }
        }
        Ok(PointAddress { prefix, tail })
    }

    /// The point `0^∞`-style address: first kept cell everywhere.
    pub fn first_kept() -> Self {
        PointAddress {
            prefix: Vec::new(),
            tail: TailRule::FirstKept,
        }
    }

    /// Anchor point of a cylinder: the cell address followed by first-kept.
    pub fn anchor_of(cell: &CellAddress) -> Self {
        PointAddress {
            prefix: cell.cells().to_vec(),
            tail: TailRule::FirstKept,
        }
    }

    pub fn prefix(&self) -> &[Cell] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// Parses `prefix=c1|c2|...;tail=first-kept` or
    /// `prefix=...;tail=periodic:c1|c2`, where each `ci` is `v1,...,vN`.
    /// Either field may be omitted (empty prefix, first-kept tail).
    pub fn parse(spec: &str) -> Result<Self> {
        let mut prefix = Vec::new();
        let mut tail = TailRule::FirstKept;
        let mut seen = (false, false);
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::PointSpec(format!("expected key=value, got `{part}`")))?;
            match key.trim() {
                "prefix" if !seen.0 => {
                    seen.0 = true;
                    prefix = parse_cells(value)?;
                }
                "tail" if !seen.1 => {
                    seen.1 = true;
                    let value = value.trim();
                    tail = if value == "first-kept" {
                        TailRule::FirstKept
                    } else if let Some(cycle) = value.strip_prefix("periodic:") {
                        let cycle = parse_cells(cycle)?;
                        if cycle.is_empty() {
                            return Err(Error::PointSpec("empty periodic tail".into()));
                        }
                        TailRule::Periodic(cycle)
                    } else {
                        return Err(Error::PointSpec(format!("unknown tail rule `{value}`")));
                    };
                }
                other => {
                    return Err(Error::PointSpec(format!("unexpected field `{other}`")));
                }
            }
        }
        Ok(PointAddress { prefix, tail })
    }

    /// Cell chosen at `level` (levels start at 1), checked against the step.
    pub fn cell_at<'a>(&'a self, s: &'a Schedule, level: usize) -> Result<&'a Cell> {
        let step = s.step(level);
        let cell = if level <= self.prefix.len() {
            &self.prefix[level - 1]
        } else {
            match &self.tail {
                TailRule::FirstKept => step.first_kept(),
                TailRule::Periodic(cycle) => &cycle[(level - self.prefix.len() - 1) % cycle.len()],
            }
        };
        if cell.len() != s.dim() || !step.contains(cell) {
            return Err(Error::InvalidAddress(format!(
                "cell {cell:?} at level {level} is not kept"
            )));
        }
        Ok(cell)
    }

    pub fn truncate(&self, s: &Schedule, depth: usize) -> Result<CellAddress> {
        let cells = (1..=depth)
            .map(|n| self.cell_at(s, n).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(CellAddress::new(cells))
    }
}

impl fmt::Display for PointAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix={};tail=", format_cells(&self.prefix))?;
        match &self.tail {
            TailRule::FirstKept => write!(f, "first-kept"),
            TailRule::Periodic(cycle) => write!(f, "periodic:{}", format_cells(cycle)),
        }
    }
}

fn parse_cells(value: &str) -> Result<Vec<Cell>> {
    let value = value.trim();
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split('|')
        .map(|tok| {
            crate::schedule::parse_cell_token(tok)
                .ok_or_else(|| Error::PointSpec(format!("bad cell `{tok}`")))
        })
        .collect()
}

fn format_cells(cells: &[Cell]) -> String {
    cells
        .iter()
        .map(|c| c.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("|")
}

/// An axis-aligned cube with exact rational corner and side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalBox {
    pub corner: Vec<BigRational>,
    pub side: BigRational,
}

impl RationalBox {
    pub fn new(corner: Vec<BigRational>, side: BigRational) -> Result<Self> {
        if !side.is_positive() {
            return Err(Error::Argument("box side must be positive".into()));
        }
        Ok(RationalBox { corner, side })
    }

    /// A degenerate box `{p}` is allowed only through this constructor.
    pub fn point(coords: Vec<BigRational>) -> Self {
        RationalBox {
            corner: coords,
            side: BigRational::zero(),
        }
    }

    pub fn unit(dim: usize) -> Self {
        RationalBox {
            corner: vec![BigRational::zero(); dim],
            side: BigRational::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn contains_box(&self, other: &RationalBox) -> bool {
        self.corner
            .iter()
            .zip(&other.corner)
            .all(|(a, b)| a <= b && b + &other.side <= a + &self.side)
    }

    fn from_integer(corner: Vec<BigUint>, inv_side: &BigUint) -> Self {
        let den = BigInt::from(inv_side.clone());
        RationalBox {
            corner: corner
                .into_iter()
                .map(|c| BigRational::new(BigInt::from(c), den.clone()))
                .collect(),
            side: BigRational::new(BigInt::one(), den),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// The cell lies in the open ball around every point of the centre box.
    Inside,
    /// Neither inside nor outside for every centre.
    Meets,
    /// The cell misses the closed ball around every point of the centre box.
    Outside,
}

/// Exact cube `C_σ` of an address.
pub fn address_to_box(s: &Schedule, sigma: &CellAddress) -> Result<RationalBox> {
    sigma.validate(s)?;
    let (_, inv) = s.exact_counts(sigma.len());
    Ok(RationalBox::from_integer(sigma.integer_corner(s), &inv))
}

/// Cube of side `Λ_depth` certainly containing the point.
pub fn point_box(s: &Schedule, x: &PointAddress, depth: usize) -> Result<RationalBox> {
    let sigma = x.truncate(s, depth)?;
    let (_, inv) = s.exact_counts(depth);
    Ok(RationalBox::from_integer(sigma.integer_corner(s), &inv))
}

/// Squared distances between two boxes: `(min, max)` over all point pairs.
fn squared_distance_range(cell: &RationalBox, center: &RationalBox) -> (BigRational, BigRational) {
    let mut min_d = BigRational::zero();
    let mut max_d = BigRational::zero();
    for (a, b) in cell.corner.iter().zip(&center.corner) {
        let a_hi = a + &cell.side;
        let b_hi = b + &center.side;
        let zero = BigRational::zero();
        let gap = (a - &b_hi).max(b - &a_hi).max(zero);
        let far = (&a_hi - b).max(&b_hi - a);
        min_d += &gap * &gap;
        max_d += &far * &far;
    }
    (min_d, max_d)
}

/// Classifies a cell against `B(y, r)` for every `y` in `center`. Ties
/// (distance exactly `r`) count as [`Classification::Meets`].
pub fn classify_cell(cell: &RationalBox, center: &RationalBox, r: &BigRational) -> Classification {
    let (min_d, max_d) = squared_distance_range(cell, center);
    let r2 = r * r;
    if max_d < r2 {
        Classification::Inside
    } else if min_d > r2 {
        Classification::Outside
    } else {
        Classification::Meets
    }
}
