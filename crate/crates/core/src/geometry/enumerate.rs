//! Pruned depth-first enumeration of cylinder cubes against a ball.
//!
//! Coordinates are scaled by a common integer `S` (a multiple of `1/Λ_n` and
//! of every denominator of the point box), so each predicate is a comparison
//! of big integers. Subtrees outside the ball are dropped; subtrees inside it
//! are counted in one step as `P_n / P_j`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{CellAddress, PointAddress, RationalBox};
use crate::error::{Error, Result};
use crate::schedule::Schedule;

/// Level-`n` kept cells certainly inside `B(x, r)` (`inner`) and possibly
/// meeting the enlarged closed ball `B̄(x, r + Λ_n √N)` (`outer`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCounts {
    pub inner: BigUint,
    pub outer: BigUint,
}

/// Exact-or-bracketing count of cells: `lo <= count <= hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountInterval {
    pub lo: BigUint,
    pub hi: BigUint,
}

impl CountInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

struct Distances {
    min2: BigInt,
    max2: BigInt,
    /// max over centres of the squared distance from the centre to the cell
    maxmin2: BigInt,
}

struct Frame {
    dim: usize,
    /// `S / M_j`: side of a level-`j` cube in scaled units
    unit: Vec<BigInt>,
    p_lo: Vec<BigInt>,
    p_hi: Vec<BigInt>,
    /// `(num(r) * S)^2`
    r2: BigInt,
    den: BigInt,
    den2: BigInt,
}

fn to_int(u: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, u.clone())
}

impl Frame {
    fn new(
        s: &Schedule,
        point: &RationalBox,
        r: &BigRational,
        depth: usize,
    ) -> Result<(Frame, Vec<(BigUint, BigUint)>)> {
        if point.dim() != s.dim() {
            return Err(Error::Argument(format!(
                "point of dimension {} for a schedule of dimension {}",
                point.dim(),
                s.dim()
            )));
        }
        if !r.is_positive() {
            return Err(Error::Argument("radius must be positive".into()));
        }
        let prefix = s.exact_prefix(depth);
        let m_depth = to_int(&prefix[depth].1);
        let mut scale = m_depth.clone();
        for c in point.corner.iter().chain(std::iter::once(&point.side)) {
            scale = scale.lcm(c.denom());
        }
        let unit = prefix.iter().map(|(_, inv)| &scale / to_int(inv)).collect();
        let scaled = |q: &BigRational| q.numer() * (&scale / q.denom());
        let p_lo: Vec<BigInt> = point.corner.iter().map(scaled).collect();
        let width = scaled(&point.side);
        let p_hi = p_lo.iter().map(|a| a + &width).collect();
        let r_scaled = r.numer() * &scale;
        let den = r.denom().clone();
        Ok((
            Frame {
                dim: s.dim(),
                unit,
                p_lo,
                p_hi,
                r2: &r_scaled * &r_scaled,
                den2: &den * &den,
                den,
            },
            prefix,
        ))
    }

    fn distances(&self, lo: &[BigInt], level: usize) -> Distances {
        let u = &self.unit[level];
        let zero = BigInt::zero();
        let mut d = Distances {
            min2: BigInt::zero(),
            max2: BigInt::zero(),
            maxmin2: BigInt::zero(),
        };
        for (i, lo_i) in lo.iter().enumerate().take(self.dim) {
            let hi_i = lo_i + u;
            let (a, b) = (&self.p_lo[i], &self.p_hi[i]);
            let gap = (lo_i - b).max(a - &hi_i).max(zero.clone());
            let far = (&hi_i - a).max(b - lo_i);
            let gap_a = (lo_i - a).max(a - &hi_i).max(zero.clone());
            let gap_b = (lo_i - b).max(b - &hi_i).max(zero.clone());
            let worst = gap_a.max(gap_b);
            d.min2 += &gap * &gap;
            d.max2 += &far * &far;
            d.maxmin2 += &worst * &worst;
        }
        d
    }

    /// Every point of the cell is in the open ball around every centre.
    fn inside_open(&self, d: &Distances) -> bool {
        &d.max2 * &self.den2 < self.r2
    }

    fn inside_closed(&self, d: &Distances) -> bool {
        &d.max2 * &self.den2 <= self.r2
    }

    /// Misses the closed ball around every centre.
    fn outside_closed(&self, d: &Distances) -> bool {
        &d.min2 * &self.den2 > self.r2
    }

    /// Meets the closed ball around every centre.
    fn certainly_meets_closed(&self, d: &Distances) -> bool {
        &d.maxmin2 * &self.den2 <= self.r2
    }

    /// Possibly meets `B̄(y, r + Λ_level √N)`, decided exactly:
    /// `sqrt(A) <= B + C sqrt(N)` with `A = min2 den^2`, `B = num S`,
    /// `C = den S/M_level`.
    fn meets_enlarged(&self, d: &Distances, level: usize) -> bool {
        let a = &d.min2 * &self.den2;
        let c = &self.den * &self.unit[level];
        let c2n = &c * &c * BigInt::from(self.dim);
        let x = a - &self.r2 - &c2n;
        if !x.is_positive() {
            return true;
        }
        &x * &x <= BigInt::from(4u32) * &self.r2 * &c2n
    }

    fn children(&self, s: &Schedule, lo: &[BigInt], level: usize) -> Vec<Vec<BigInt>> {
        let u = &self.unit[level + 1];
        s.step(level + 1)
            .kept()
            .iter()
            .map(|cell| {
                lo.iter()
                    .zip(cell)
                    .map(|(base, &c)| base + u * BigInt::from(c))
                    .collect()
            })
            .collect()
    }
}

fn check_resolution(s: &Schedule, point: &RationalBox, level: usize) -> Result<()> {
    let (_, inv) = s.exact_counts(level);
    if &point.side * BigRational::from_integer(to_int(&inv)) > BigRational::one() {
        return Err(Error::Resolution(format!(
            "point box of side {} is coarser than the level-{level} cells",
            point.side
        )));
    }
    Ok(())
}

/// Counts level-`n` cells against `B(x, r)` with the point resolved to depth
/// `n + guard`.
pub fn enumerate_cells(
    s: &Schedule,
    x: &PointAddress,
    r: &BigRational,
    n: usize,
    guard: usize,
) -> Result<CellCounts> {
    let point = super::point_box(s, x, n + guard)?;
    enumerate_cells_in_box(s, &point, r, n)
}

/// As [`enumerate_cells`] for an explicit point box.
pub fn enumerate_cells_in_box(
    s: &Schedule,
    point: &RationalBox,
    r: &BigRational,
    n: usize,
) -> Result<CellCounts> {
    check_resolution(s, point, n)?;
    let (frame, prefix) = Frame::new(s, point, r, n)?;
    let p_n = &prefix[n].0;
    let subtree: Vec<BigUint> = prefix.iter().map(|(p, _)| p_n / p).collect();

    let mut inner = BigUint::zero();
    let mut outer = BigUint::zero();
    let mut stack = vec![(0usize, vec![BigInt::zero(); s.dim()])];
    while let Some((level, lo)) = stack.pop() {
        let d = frame.distances(&lo, level);
        if !frame.meets_enlarged(&d, n) {
            continue;
        }
        if frame.inside_open(&d) {
            inner += &subtree[level];
            outer += &subtree[level];
        } else if level == n {
            outer += 1u32;
        } else {
            stack.extend(
                frame
                    .children(s, &lo, level)
                    .into_iter()
                    .map(|c| (level + 1, c)),
            );
        }
    }
    Ok(CellCounts { inner, outer })
}

/// Number of level-`m` kept cells meeting the closed ball `B̄(x, r)`.
///
/// The descent stops at `level_for(r) + guard` (or at `m`, whichever comes
/// first); cells still undecided there contribute all their descendants to
/// the upper bound only. When the descent reaches `m` the count is exact up
/// to point uncertainty.
pub fn covering_count(
    s: &Schedule,
    x: &PointAddress,
    r: &BigRational,
    m: usize,
    guard: usize,
) -> Result<CountInterval> {
    if !r.is_positive() {
        return Err(Error::Argument("radius must be positive".into()));
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let (_, inv_m) = s.exact_counts(m);
    if den > &(num * &inv_m) {
        return Err(Error::Argument(format!(
            "cells of level {m} are larger than the radius"
        )));
    }
    let stop = m.min(s.level_for_radius(num, den) + guard);
    let point = super::point_box(s, x, stop + guard)?;
    let (frame, prefix) = Frame::new(s, &point, r, stop)?;
    let (p_m, _) = s.exact_counts(m);
    let subtree: Vec<BigUint> = prefix.iter().map(|(p, _)| &p_m / p).collect();

    let mut lo = BigUint::zero();
    let mut hi = BigUint::zero();
    let mut stack = vec![(0usize, vec![BigInt::zero(); s.dim()])];
    while let Some((level, corner)) = stack.pop() {
        let d = frame.distances(&corner, level);
        if frame.outside_closed(&d) {
            continue;
        }
        if frame.inside_closed(&d) {
            lo += &subtree[level];
            hi += &subtree[level];
        } else if level == m {
            hi += 1u32;
            if frame.certainly_meets_closed(&d) {
                lo += 1u32;
            }
        } else if level == stop {
            hi += &subtree[level];
        } else {
            stack.extend(
                frame
                    .children(s, &corner, level)
                    .into_iter()
                    .map(|c| (level + 1, c)),
            );
        }
    }
    Ok(CountInterval { lo, hi })
}

/// Level-`level` cells certainly inside the open ball around every point of
/// `point`, in lexicographic address order, at most `limit` of them.
pub fn cells_inside_ball(
    s: &Schedule,
    point: &RationalBox,
    r: &BigRational,
    level: usize,
    limit: usize,
) -> Result<Vec<CellAddress>> {
    let (frame, _) = Frame::new(s, point, r, level)?;
    let mut out = Vec::new();
    let mut stack = vec![(CellAddress::root(), vec![BigInt::zero(); s.dim()], false)];
    while let Some((addr, corner, known_inside)) = stack.pop() {
        if out.len() >= limit {
            break;
        }
        let depth = addr.len();
        let inside = known_inside || {
            let d = frame.distances(&corner, depth);
            if frame.outside_closed(&d) {
                continue;
            }
            frame.inside_open(&d)
        };
        if depth == level {
            if inside {
                out.push(addr);
            }
            continue;
        }
        let kept = s.step(depth + 1).kept();
        let children = frame.children(s, &corner, depth);
        for (cell, child) in kept.iter().zip(children).rev() {
            stack.push((addr.child(cell.clone()), child, inside));
        }
    }
    Ok(out)
}
