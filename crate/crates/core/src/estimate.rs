//! Dimension estimates carried between the oracle, the estimators and the CLI.

use std::fmt;

/// Level (and optional gap) ranges that an estimate was computed over.
///
/// Every windowed value is a statement about this finite window, never about
/// the limit itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub levels: (usize, usize),
    pub gaps: Option<(usize, usize)>,
}

impl Window {
    pub fn levels(lo: usize, hi: usize) -> Self {
        Window {
            levels: (lo, hi),
            gaps: None,
        }
    }

    pub fn with_gaps(mut self, lo: usize, hi: usize) -> Self {
        self.gaps = Some((lo, hi));
        self
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "levels={}..{}", self.levels.0, self.levels.1)?;
        if let Some((lo, hi)) = self.gaps {
            write!(f, ";gaps={lo}..{hi}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub uncertainty: f64,
    pub window: Window,
}

impl Estimate {
    pub fn new(value: f64, uncertainty: f64, window: Window) -> Self {
        Estimate {
            value,
            uncertainty,
            window,
        }
    }

    /// True when `target` lies within `tol` plus the reported uncertainty.
    pub fn agrees_with(&self, target: f64, tol: f64) -> bool {
        (self.value - target).abs() <= tol + self.uncertainty
    }
}

/// The four pointwise dimensions: lower tangential, lower local, upper local,
/// upper tangential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionEstimate {
    pub lower_tangential: Estimate,
    pub lower_local: Estimate,
    pub upper_local: Estimate,
    pub upper_tangential: Estimate,
}

impl DimensionEstimate {
    /// Checks `lower_tangential - u <= lower_local <= upper_local <= upper_tangential + u`,
    /// where each comparison uses the summed uncertainty of the two sides.
    pub fn ordering_holds(&self) -> bool {
        let (lt, ll, ul, ut) = (
            &self.lower_tangential,
            &self.lower_local,
            &self.upper_local,
            &self.upper_tangential,
        );
        lt.value - (lt.uncertainty + ll.uncertainty) <= ll.value
            && ll.value <= ul.value + (ll.uncertainty + ul.uncertainty)
            && ul.value <= ut.value + (ul.uncertainty + ut.uncertainty)
    }

    /// `(name, estimate)` rows in canonical order.
    pub fn rows(&self) -> [(&'static str, &Estimate); 4] {
        [
            ("lower_tangential", &self.lower_tangential),
            ("lower_local", &self.lower_local),
            ("upper_local", &self.upper_local),
            ("upper_tangential", &self.upper_tangential),
        ]
    }

    pub fn max_uncertainty(&self) -> f64 {
        self.rows()
            .iter()
            .map(|(_, e)| e.uncertainty)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(v: f64, u: f64) -> Estimate {
        Estimate::new(v, u, Window::levels(1, 2))
    }

    #[test]
    fn ordering_tolerates_uncertainty() {
        let d = DimensionEstimate {
            lower_tangential: est(1.02, 0.01),
            lower_local: est(1.0, 0.02),
            upper_local: est(1.0, 0.0),
            upper_tangential: est(0.99, 0.02),
        };
        assert!(d.ordering_holds());
        let bad = DimensionEstimate {
            lower_tangential: est(1.5, 0.01),
            ..d
        };
        assert!(!bad.ordering_holds());
    }

    #[test]
    fn window_display() {
        let w = Window::levels(10, 20).with_gaps(3, 7);
        assert_eq!(w.to_string(), "levels=10..20;gaps=3..7");
    }
}
