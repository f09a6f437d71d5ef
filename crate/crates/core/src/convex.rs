//! Sublevel sets of `g(alpha) = sum_k exp(alpha * c_k)`.
//!
//! `g` is a positive sum of exponentials and therefore convex, so every
//! sublevel set `{alpha : g(alpha) <= rhs}` restricted to an interval is
//! itself an interval. Endpoints come from bisection.

/// Absolute bisection tolerance in alpha.
pub const ALPHA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    rates: Vec<f64>,
}

/// Bracketed sublevel set: `inner` is guaranteed inside the set, and the
/// `outer_*` points (when the set stops short of the search interval) are
/// guaranteed outside it, within [`ALPHA_TOL`] of the matching endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sublevel {
    pub lo: f64,
    pub hi: f64,
    pub outer_lo: Option<f64>,
    pub outer_hi: Option<f64>,
}

impl ExpSum {
    /// `rates[k]` is `ln L_k`, so each term is `L_k^alpha`.
    pub fn new(rates: Vec<f64>) -> Self {
        Self { rates }
    }

    pub fn from_bases(bases: &[f64]) -> Self {
        Self::new(bases.iter().map(|l| l.ln()).collect())
    }

    pub fn with_term(&self, rate: f64) -> Self {
        let mut rates = self.rates.clone();
        rates.push(rate);
        Self { rates }
    }

    pub fn value(&self, alpha: f64) -> f64 {
        self.rates.iter().map(|c| (alpha * c).exp()).sum()
    }

    pub fn slope(&self, alpha: f64) -> f64 {
        self.rates.iter().map(|c| c * (alpha * c).exp()).sum()
    }

    /// Minimizer of the sum on `[lo, hi]`.
    pub fn argmin(&self, lo: f64, hi: f64) -> f64 {
        if self.slope(lo) >= 0.0 {
            return lo;
        }
        if self.slope(hi) <= 0.0 {
            return hi;
        }
        let (mut a, mut b) = (lo, hi);
        while b - a > ALPHA_TOL {
            let mid = 0.5 * (a + b);
            if self.slope(mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    /// `{alpha in [lo, hi] : value(alpha) <= rhs}`, or `None` when empty.
    pub fn sublevel(&self, rhs: f64, lo: f64, hi: f64) -> Option<Sublevel> {
        if lo > hi {
            return None;
        }
        let argmin = self.argmin(lo, hi);
        self.sublevel_around(rhs, lo, hi, argmin)
    }

    /// Like [`ExpSum::sublevel`] with a known minimizer on `[lo, hi]`.
    pub fn sublevel_around(&self, rhs: f64, lo: f64, hi: f64, argmin: f64) -> Option<Sublevel> {
        if self.value(argmin) > rhs {
            return None;
        }
        let (inner_lo, outer_lo) = if self.value(lo) <= rhs {
            (lo, None)
        } else {
            let (out, inn) = self.crossing(rhs, lo, argmin);
            (inn, Some(out))
        };
        let (inner_hi, outer_hi) = if self.value(hi) <= rhs {
            (hi, None)
        } else {
            let (out, inn) = self.crossing(rhs, hi, argmin);
            (inn, Some(out))
        };
        Some(Sublevel {
            lo: inner_lo,
            hi: inner_hi,
            outer_lo,
            outer_hi,
        })
    }

    /// Bisects between `outside` (value > rhs) and `inside` (value <= rhs),
    /// returning the final `(outside, inside)` bracket.
    fn crossing(&self, rhs: f64, mut outside: f64, mut inside: f64) -> (f64, f64) {
        while (inside - outside).abs() > ALPHA_TOL {
            let mid = 0.5 * (inside + outside);
            if self.value(mid) <= rhs {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        (outside, inside)
    }
}
