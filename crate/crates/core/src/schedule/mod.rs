//! Construction schedules for translation fractals.
//!
//! A schedule assigns to every level `n >= 1` a [`GridStep`]: the unit cube is
//! cut into `m^N` congruent cells and a subset of them is kept. Composing the
//! steps of levels `1..=n` yields the level-`n` cylinder cubes, of side
//! `Λ_n = ∏ 1/m_i`, and there are `P_n = ∏ p_i` of them.

mod oracle;
mod parse;

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;

use crate::error::{Error, Result};

pub use oracle::{hausdorff_nontriviality, oracle_dims, NontrivialityReport, Trend};
pub(crate) use parse::parse_cell as parse_cell_token;
pub use parse::parse_schedule;

/// A cell of the `m^N` grid, one coordinate per axis, each in `0..m`.
pub type Cell = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridStep {
    dim: usize,
    m: u32,
    kept: Vec<Cell>,
}

impl GridStep {
    /// Validates and builds a step. Kept cells are stored in lexicographic
    /// order, which fixes the index `σ(n)` of each cell.
    pub fn new(dim: usize, m: u32, mut kept: Vec<Cell>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidStep("dimension must be at least 1".into()));
        }
        if m < 2 {
            return Err(Error::InvalidStep(format!("subdivision factor {m} < 2")));
        }
        if kept.is_empty() {
            return Err(Error::InvalidStep("empty kept set".into()));
        }
        for cell in &kept {
            if cell.len() != dim {
                return Err(Error::InvalidStep(format!(
                    "cell {cell:?} has {} coordinates, expected {dim}",
                    cell.len()
                )));
            }
            if let Some(c) = cell.iter().find(|&&c| c >= m) {
                return Err(Error::InvalidStep(format!(
                    "cell {cell:?} out of range: coordinate {c} >= {m}"
                )));
            }
        }
        kept.sort();
        if let Some(w) = kept.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidStep(format!("duplicate cell {:?}", w[0])));
        }
        if kept.len() < 2 {
            return Err(Error::InvalidStep(
                "at least two kept cells are required".into(),
            ));
        }
        let total = (m as u64).checked_pow(dim as u32);
        if total.is_some_and(|t| (kept.len() as u64) > t) {
            return Err(Error::InvalidStep("more kept cells than grid cells".into()));
        }
        Ok(GridStep { dim, m, kept })
    }

    /// Middle-thirds Cantor step.
    pub fn cantor() -> Self {
        GridStep::new(1, 3, vec![vec![0], vec![2]]).unwrap()
    }

    /// 3x3 grid with the central square removed.
    pub fn carpet() -> Self {
        let kept = grid_cells(2, 3).filter(|c| c != &[1, 1]).collect();
        GridStep::new(2, 3, kept).unwrap()
    }

    /// 3x3 grid keeping the four corners and the centre.
    pub fn vicsek() -> Self {
        let kept = grid_cells(2, 3)
            .filter(|c| (c[0] + c[1]) % 2 == 0)
            .collect();
        GridStep::new(2, 3, kept).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Subdivision factor per axis; the contraction ratio is `1/m`.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of kept cells.
    pub fn p(&self) -> usize {
        self.kept.len()
    }

    pub fn kept(&self) -> &[Cell] {
        &self.kept
    }

    pub fn contains(&self, cell: &[u32]) -> bool {
        self.kept
            .binary_search_by(|c| c.as_slice().cmp(cell))
            .is_ok()
    }

    /// Lexicographically smallest kept cell.
    pub fn first_kept(&self) -> &Cell {
        &self.kept[0]
    }

    /// Same subdivision and kept-set cardinality.
    pub fn same_counts(&self, other: &GridStep) -> bool {
        self.m == other.m && self.p() == other.p()
    }
}

/// All cells of the `m^dim` grid in lexicographic order.
pub fn grid_cells(dim: usize, m: u32) -> impl Iterator<Item = Cell> {
    let total = (m as usize).pow(dim as u32);
    (0..total).map(move |mut idx| {
        let mut cell = vec![0; dim];
        for c in cell.iter_mut().rev() {
            *c = (idx % m as usize) as u32;
            idx /= m as usize;
        }
        cell
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleRule {
    /// Explicit steps; the last `period` of them repeat forever.
    Periodic { steps: Vec<GridStep>, period: usize },
    /// Carpet and Vicsek steps alternating in blocks of growing length.
    CarpetVicsek { carpet: GridStep, vicsek: GridStep },
}

/// Cumulative `(log P_n, log 1/Λ_n)` for `n = 0..len`.
#[derive(Debug, Default)]
struct LogTable {
    entries: Vec<(f64, f64)>,
}

/// An immutable construction schedule. Cumulative logarithms are cached
/// behind a lock so concurrent readers observe a consistent prefix.
#[derive(Debug)]
pub struct Schedule {
    dim: usize,
    rule: ScheduleRule,
    logs: RwLock<LogTable>,
}

impl Clone for Schedule {
    fn clone(&self) -> Self {
        Schedule::from_rule(self.dim, self.rule.clone())
    }
}

impl PartialEq for Schedule {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rule == other.rule
    }
}

impl Eq for Schedule {}

impl Schedule {
    fn from_rule(dim: usize, rule: ScheduleRule) -> Self {
        Schedule {
            dim,
            rule,
            logs: RwLock::new(LogTable {
                entries: vec![(0.0, 0.0)],
            }),
        }
    }

    /// Explicit prefix followed by a periodic tail made of the last `period`
    /// steps.
    pub fn periodic(steps: Vec<GridStep>, period: usize) -> Result<Self> {
        let Some(first) = steps.first() else {
            return Err(Error::InvalidStep("schedule has no steps".into()));
        };
        let dim = first.dim();
        if let Some(bad) = steps.iter().find(|s| s.dim() != dim) {
            return Err(Error::InvalidStep(format!(
                "step of dimension {} in a schedule of dimension {dim}",
                bad.dim()
            )));
        }
        if period == 0 || period > steps.len() {
            return Err(Error::InvalidStep(format!(
                "periodic tail length {period} not in 1..={}",
                steps.len()
            )));
        }
        Ok(Schedule::from_rule(
            dim,
            ScheduleRule::Periodic { steps, period },
        ))
    }

    /// The same step at every level.
    pub fn constant(step: GridStep) -> Self {
        Schedule::periodic(vec![step], 1).unwrap()
    }

    pub fn cantor() -> Self {
        Schedule::constant(GridStep::cantor())
    }

    pub fn carpet_vicsek() -> Self {
        Schedule::from_rule(
            2,
            ScheduleRule::CarpetVicsek {
                carpet: GridStep::carpet(),
                vicsek: GridStep::vicsek(),
            },
        )
    }

    /// Named generators: `cantor`, `carpet`, `vicsek`, `carpet-vicsek`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "cantor" => Ok(Schedule::cantor()),
            "carpet" => Ok(Schedule::constant(GridStep::carpet())),
            "vicsek" => Ok(Schedule::constant(GridStep::vicsek())),
            "carpet-vicsek" => Ok(Schedule::carpet_vicsek()),
            other => Err(Error::Argument(format!("unknown generator `{other}`"))),
        }
    }

    pub fn into_shared(self) -> Arc<Schedule> {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rule(&self) -> &ScheduleRule {
        &self.rule
    }

    /// Step used at level `n` (levels start at 1).
    pub fn step(&self, n: usize) -> &GridStep {
        assert!(n >= 1, "levels start at 1");
        match &self.rule {
            ScheduleRule::Periodic { steps, period } => {
                let len = steps.len();
                if n <= len {
                    &steps[n - 1]
                } else {
                    &steps[len - period + (n - len - 1) % period]
                }
            }
            ScheduleRule::CarpetVicsek { carpet, vicsek } => match carpet_vicsek_q(n) {
                1 => carpet,
                _ => vicsek,
            },
        }
    }

    /// `(log P_n, log 1/Λ_n)`.
    pub fn log_counts(&self, n: usize) -> (f64, f64) {
        {
            let table = self.logs.read().unwrap();
            if let Some(&e) = table.entries.get(n) {
                return e;
            }
        }
        let mut table = self.logs.write().unwrap();
        while table.entries.len() <= n {
            let j = table.entries.len();
            let (lp, lm) = *table.entries.last().unwrap();
            let step = self.step(j);
            table
                .entries
                .push((lp + (step.p() as f64).ln(), lm + (step.m() as f64).ln()));
        }
        table.entries[n]
    }

    /// `log 1/Λ_n`, the natural scale parameter `t` of level `n`.
    pub fn t(&self, n: usize) -> f64 {
        self.log_counts(n).1
    }

    /// Exact `(P_n, 1/Λ_n)`.
    pub fn exact_counts(&self, n: usize) -> (BigUint, BigUint) {
        let mut p = BigUint::from(1u32);
        let mut inv = BigUint::from(1u32);
        for j in 1..=n {
            let step = self.step(j);
            p *= step.p() as u32;
            inv *= step.m();
        }
        (p, inv)
    }

    /// Prefix products `(P_j, 1/Λ_j)` for `j = 0..=n`.
    pub fn exact_prefix(&self, n: usize) -> Vec<(BigUint, BigUint)> {
        let mut out = Vec::with_capacity(n + 1);
        let mut p = BigUint::from(1u32);
        let mut inv = BigUint::from(1u32);
        out.push((p.clone(), inv.clone()));
        for j in 1..=n {
            let step = self.step(j);
            p *= step.p() as u32;
            inv *= step.m();
            out.push((p.clone(), inv.clone()));
        }
        out
    }

    /// Smallest level `n` with `Λ_n <= r` (as a ratio `num/den`, `r > 0`).
    pub fn level_for_radius(&self, num: &BigUint, den: &BigUint) -> usize {
        // Λ_n <= num/den  <=>  den <= num * (1/Λ_n)
        let mut inv = BigUint::from(1u32);
        let mut n = 0;
        while den > &(num * &inv) {
            n += 1;
            inv *= self.step(n).m();
        }
        n
    }

    /// Schedule whose steps are replaced level by level with `f(n, step)`.
    /// Used to check that oracle values only depend on `(p_n, m_n)`.
    pub fn map_steps(
        &self,
        levels: usize,
        f: impl Fn(usize, &GridStep) -> GridStep,
    ) -> Result<Self> {
        let steps = (1..=levels).map(|n| f(n, self.step(n))).collect();
        Schedule::periodic(steps, 1)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            ScheduleRule::Periodic { steps, period } => write!(
                f,
                "periodic schedule (dim {}, {} steps, tail {})",
                self.dim,
                steps.len(),
                period
            ),
            ScheduleRule::CarpetVicsek { .. } => write!(f, "carpet-vicsek schedule"),
        }
    }
}

/// Block rule: level `j` is a Carpet step (`1`) when
/// `(k-1)(2k-1) < j <= (2k-1)k` and a Vicsek step (`2`) when
/// `k(2k-1) < j <= k(2k+1)`, for some `k >= 1`.
pub fn carpet_vicsek_q(j: usize) -> u8 {
    assert!(j >= 1);
    // smallest k with j <= k(2k+1)
    let mut k = ((j as f64 / 2.0).sqrt() as usize).max(1);
    while k > 1 && j <= (k - 1) * (2 * k - 1) {
        k -= 1;
    }
    while j > k * (2 * k + 1) {
        k += 1;
    }
    if j <= (2 * k - 1) * k {
        1
    } else {
        2
    }
}
