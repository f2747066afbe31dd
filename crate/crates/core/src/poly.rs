//! Piecewise polynomials on exact dyadic breakpoints.
//!
//! Every atom in the crate is one of these: polynomial pieces of low degree
//! between dyadic knots, identically zero outside the support. Evaluation is
//! right-continuous at breakpoints, matching the truncated-power convention
//! used to construct the B-splines. Inner products are exact L2 integrals
//! (Gauss-Legendre per merged piece, with enough nodes for the product
//! degree).

use crate::dyadic::Dyadic;
use crate::quad::gauss_legendre;
use crate::{Error, Result};
use std::collections::BTreeSet;

/// A piecewise polynomial. Piece `i` holds local monomial coefficients
/// `c[t]` for `sum_t c[t] (x - breakpoints[i])^t` on
/// `[breakpoints[i], breakpoints[i+1])`. The zero function is the empty
/// piece list.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    breakpoints: Vec<Dyadic>,
    pieces: Vec<Vec<f64>>,
}

/// Rewrites `p(u)` with origin shifted by `s`: returns `q` with
/// `q(v) = p(v + s)`.
fn shift_origin(coeffs: &[f64], s: f64) -> Vec<f64> {
    let n = coeffs.len();
    let mut out = vec![0.0; n];
    for (t, &c) in coeffs.iter().enumerate() {
        // c * (v + s)^t expanded by the binomial theorem.
        let mut binom = 1.0;
        let mut s_pow = 1.0;
        for r in (0..=t).rev() {
            out[r] += c * binom * s_pow;
            if r > 0 {
                binom = binom * r as f64 / (t - r + 1) as f64;
                s_pow *= s;
            }
        }
    }
    out
}

fn eval_local(coeffs: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * u + c;
    }
    acc
}

impl PiecewisePoly {
    /// The identically-zero function.
    pub fn zero() -> Self {
        PiecewisePoly { breakpoints: Vec::new(), pieces: Vec::new() }
    }

    /// Builds a piecewise polynomial from ascending breakpoints and local
    /// coefficient lists (one per interval).
    pub fn from_pieces(breakpoints: Vec<Dyadic>, pieces: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.is_empty() && pieces.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != pieces.len() + 1 {
            return Err(Error::arg(format!(
                "expected {} breakpoints for {} pieces, got {}",
                pieces.len() + 1,
                pieces.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("breakpoints must be strictly ascending"));
        }
        let mut p = PiecewisePoly { breakpoints, pieces };
        p.trim();
        Ok(p)
    }

    /// Constant `value` on `[lo, hi)`.
    pub fn constant(lo: Dyadic, hi: Dyadic, value: f64) -> Result<Self> {
        Self::from_pieces(vec![lo, hi], vec![vec![value]])
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Support as the first/last breakpoint pair, `None` for the zero function.
    pub fn support(&self) -> Option<(Dyadic, Dyadic)> {
        if self.is_zero() {
            None
        } else {
            Some((self.breakpoints[0], *self.breakpoints.last().unwrap()))
        }
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breakpoints
    }

    /// Largest piece degree (0 for the zero function).
    pub fn degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|c| c.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    /// Drops leading/trailing pieces whose coefficients are all exactly zero.
    fn trim(&mut self) {
        let lead = self
            .pieces
            .iter()
            .take_while(|c| c.iter().all(|&v| v == 0.0))
            .count();
        if lead == self.pieces.len() {
            *self = Self::zero();
            return;
        }
        let trail = self
            .pieces
            .iter()
            .rev()
            .take_while(|c| c.iter().all(|&v| v == 0.0))
            .count();
        let n = self.pieces.len();
        self.pieces.drain(n - trail..);
        self.pieces.drain(..lead);
        self.breakpoints.drain(n + 1 - trail..);
        self.breakpoints.drain(..lead);
    }

    /// Right-continuous evaluation; zero outside the support (the last
    /// breakpoint itself evaluates to zero).
    pub fn evaluate(&self, x: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let idx = self.breakpoints.partition_point(|b| b.to_f64() <= x);
        if idx == 0 || idx == self.breakpoints.len() {
            return 0.0;
        }
        eval_local(&self.pieces[idx - 1], x - self.breakpoints[idx - 1].to_f64())
    }

    /// Exact integral over the support (closed-form per piece).
    pub fn integral(&self) -> f64 {
        let mut total = 0.0;
        for (i, coeffs) in self.pieces.iter().enumerate() {
            let h = (self.breakpoints[i + 1] - self.breakpoints[i]).to_f64();
            let mut h_pow = h;
            for (t, &c) in coeffs.iter().enumerate() {
                total += c * h_pow / (t as f64 + 1.0);
                h_pow *= h;
            }
        }
        total
    }

    /// Exact L2 inner product, integrating the product polynomial piecewise
    /// with a Gauss-Legendre rule sized for its degree.
    pub fn inner_product(&self, other: &PiecewisePoly) -> f64 {
        let (Some((a_lo, a_hi)), Some((b_lo, b_hi))) = (self.support(), other.support()) else {
            return 0.0;
        };
        let lo = a_lo.max(b_lo);
        let hi = a_hi.min(b_hi);
        if lo >= hi {
            return 0.0;
        }
        let mut cuts: BTreeSet<Dyadic> = BTreeSet::new();
        cuts.insert(lo);
        cuts.insert(hi);
        for &b in self.breakpoints.iter().chain(&other.breakpoints) {
            if lo < b && b < hi {
                cuts.insert(b);
            }
        }
        let nodes = (self.degree() + other.degree() + 1).div_ceil(2) + 1;
        let (xs, ws) = gauss_legendre(nodes);
        let cuts: Vec<f64> = cuts.iter().map(Dyadic::to_f64).collect();
        let mut total = 0.0;
        for seg in cuts.windows(2) {
            let mid = 0.5 * (seg[0] + seg[1]);
            let half = 0.5 * (seg[1] - seg[0]);
            let mut acc = 0.0;
            for (&xi, &wi) in xs.iter().zip(&ws) {
                let x = mid + half * xi;
                acc += wi * self.evaluate(x) * other.evaluate(x);
            }
            total += half * acc;
        }
        total
    }

    pub fn norm(&self) -> f64 {
        self.inner_product(self).max(0.0).sqrt()
    }

    /// Merged-breakpoint sum `sum_i coeffs[i] * polys[i]`.
    pub fn linear_combination(coeffs: &[f64], polys: &[PiecewisePoly]) -> Result<PiecewisePoly> {
        if coeffs.is_empty() || coeffs.len() != polys.len() {
            return Err(Error::arg(format!(
                "coefficient/function count mismatch: {} vs {}",
                coeffs.len(),
                polys.len()
            )));
        }
        let mut cuts: BTreeSet<Dyadic> = BTreeSet::new();
        for p in polys {
            cuts.extend(p.breakpoints.iter().copied());
        }
        if cuts.len() < 2 {
            return Ok(PiecewisePoly::zero());
        }
        let breakpoints: Vec<Dyadic> = cuts.into_iter().collect();
        let width = polys.iter().map(PiecewisePoly::degree).max().unwrap() + 1;
        let mut pieces = vec![vec![0.0; width]; breakpoints.len() - 1];
        for (&c, p) in coeffs.iter().zip(polys) {
            if p.is_zero() || c == 0.0 {
                continue;
            }
            for (i, piece) in p.pieces.iter().enumerate() {
                let (seg_lo, seg_hi) = (p.breakpoints[i], p.breakpoints[i + 1]);
                let start = breakpoints.binary_search(&seg_lo).unwrap();
                let end = breakpoints.binary_search(&seg_hi).unwrap();
                for slot in start..end {
                    let s = (breakpoints[slot] - seg_lo).to_f64();
                    let shifted = shift_origin(piece, s);
                    for (t, v) in shifted.iter().enumerate() {
                        pieces[slot][t] += c * v;
                    }
                }
            }
        }
        PiecewisePoly::from_pieces(breakpoints, pieces)
    }

    /// Clips to `[lo, hi]`; the zero function if there is no overlap.
    pub fn restrict(&self, lo: Dyadic, hi: Dyadic) -> Result<PiecewisePoly> {
        if lo >= hi {
            return Err(Error::arg(format!(
                "degenerate restriction interval [{lo}, {hi}]"
            )));
        }
        let Some((s_lo, s_hi)) = self.support() else {
            return Ok(PiecewisePoly::zero());
        };
        let lo = lo.max(s_lo);
        let hi = hi.min(s_hi);
        if lo >= hi {
            return Ok(PiecewisePoly::zero());
        }
        let mut breakpoints = vec![lo];
        breakpoints.extend(
            self.breakpoints
                .iter()
                .copied()
                .filter(|&b| lo < b && b < hi),
        );
        breakpoints.push(hi);
        let mut pieces = Vec::with_capacity(breakpoints.len() - 1);
        for &start in &breakpoints[..breakpoints.len() - 1] {
            let idx = self.breakpoints.partition_point(|b| *b <= start) - 1;
            let s = (start - self.breakpoints[idx]).to_f64();
            pieces.push(shift_origin(&self.pieces[idx], s));
        }
        PiecewisePoly::from_pieces(breakpoints, pieces)
    }

    /// The function `x -> amplitude * p(2^scale_log2 * x - shift)`, exact on
    /// the dyadic breakpoint lattice.
    pub fn dilate_translate(&self, scale_log2: u32, shift: Dyadic, amplitude: f64) -> PiecewisePoly {
        if self.is_zero() {
            return PiecewisePoly::zero();
        }
        let breakpoints: Vec<Dyadic> = self
            .breakpoints
            .iter()
            .map(|&b| (b + shift).mul_pow2(-(scale_log2 as i32)))
            .collect();
        let factor = f64::powi(2.0, scale_log2 as i32);
        let pieces: Vec<Vec<f64>> = self
            .pieces
            .iter()
            .map(|coeffs| {
                let mut pow = amplitude;
                coeffs
                    .iter()
                    .map(|&c| {
                        let v = c * pow;
                        pow *= factor;
                        v
                    })
                    .collect()
            })
            .collect();
        PiecewisePoly { breakpoints, pieces }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dy(n: i64, e: u32) -> Dyadic {
        Dyadic::new(n, e)
    }

    /// Hat function on [0, 2] with peak 1 at x = 1.
    fn hat() -> PiecewisePoly {
        PiecewisePoly::from_pieces(
            vec![dy(0, 0), dy(1, 0), dy(2, 0)],
            vec![vec![0.0, 1.0], vec![1.0, -1.0]],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_hat() {
        let h = hat();
        assert_eq!(h.evaluate(1.0), 1.0);
        assert_eq!(h.evaluate(0.25), 0.25);
        assert_eq!(h.evaluate(1.5), 0.5);
        assert_eq!(h.evaluate(-0.5), 0.0);
        assert_eq!(h.evaluate(2.0), 0.0); // right-continuous at the last breakpoint
        assert_eq!(h.evaluate(2.5), 0.0);
    }

    #[test]
    fn hat_self_inner_product() {
        // int_0^1 x^2 + int_0^1 (1-u)^2 = 2/3
        let h = hat();
        assert!((h.inner_product(&h) - 2.0 / 3.0).abs() < 1e-15);
        assert!((h.integral() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn disjoint_supports_are_orthogonal() {
        let h = hat();
        let far = h.dilate_translate(0, dy(-5, 0), 1.0);
        assert_eq!(h.inner_product(&far), 0.0);
    }

    #[test]
    fn quadrature_matches_closed_form_monomial_integrals() {
        // Random-ish single-piece polynomials integrated against each other:
        // compare against the exact monomial cross integrals on [1/2, 3/4].
        let lo = dy(1, 1);
        let hi = dy(3, 2);
        for dp in 0..4usize {
            for dq in 0..4usize {
                let p_coeffs: Vec<f64> = (0..=dp).map(|t| (t as f64 + 1.0) * 0.37 - 0.5).collect();
                let q_coeffs: Vec<f64> = (0..=dq).map(|t| 1.0 - (t as f64) * 0.81).collect();
                let p =
                    PiecewisePoly::from_pieces(vec![lo, hi], vec![p_coeffs.clone()]).unwrap();
                let q =
                    PiecewisePoly::from_pieces(vec![lo, hi], vec![q_coeffs.clone()]).unwrap();
                let h = (hi - lo).to_f64();
                let mut exact = 0.0;
                for (a, &ca) in p_coeffs.iter().enumerate() {
                    for (b, &cb) in q_coeffs.iter().enumerate() {
                        exact += ca * cb * h.powi((a + b + 1) as i32) / (a + b + 1) as f64;
                    }
                }
                assert!(
                    (p.inner_product(&q) - exact).abs() < 1e-13,
                    "degrees {dp}/{dq}"
                );
            }
        }
    }

    #[test]
    fn linear_combination_identity_and_cancellation() {
        let h = hat();
        let same = PiecewisePoly::linear_combination(&[1.0], &[h.clone()]).unwrap();
        assert_eq!(same, h);
        let zero = PiecewisePoly::linear_combination(&[1.0, -1.0], &[h.clone(), h]).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn linear_combination_rejects_mismatched_lengths() {
        assert!(PiecewisePoly::linear_combination(&[1.0, 2.0], &[hat()]).is_err());
        assert!(PiecewisePoly::linear_combination(&[], &[]).is_err());
    }

    #[test]
    fn linear_combination_merges_breakpoints() {
        let h = hat();
        let shifted = h.dilate_translate(0, dy(1, 0), 1.0); // hat on [1, 3]
        let sum = PiecewisePoly::linear_combination(&[1.0, 1.0], &[h, shifted]).unwrap();
        assert_eq!(sum.evaluate(1.0), 1.0);
        assert_eq!(sum.evaluate(1.5), 1.0); // 0.5 + 0.5 on the overlap
        assert_eq!(sum.evaluate(2.5), 0.5);
        assert_eq!(sum.support().unwrap(), (dy(0, 0), dy(3, 0)));
    }

    #[test]
    fn restrict_cases() {
        let h = hat();
        let full = h.restrict(dy(0, 0), dy(2, 0)).unwrap();
        assert_eq!(full, h);
        let right = h.restrict(dy(1, 1), dy(1, 0)).unwrap(); // [1/2, 1]
        assert_eq!(right.support().unwrap(), (dy(1, 1), dy(1, 0)));
        assert_eq!(right.evaluate(0.75), 0.75);
        assert_eq!(right.evaluate(1.25), 0.0);
        let gone = h.restrict(dy(5, 0), dy(6, 0)).unwrap();
        assert!(gone.is_zero());
        assert!(h.restrict(dy(1, 0), dy(1, 0)).is_err());
    }

    #[test]
    fn dilate_translate_transforms_support_and_values() {
        let h = hat();
        // 2^(1/2) h(2x - 1): support [1/2, 3/2], peak at x = 1.
        let a = h.dilate_translate(1, dy(1, 0), std::f64::consts::SQRT_2);
        assert_eq!(a.support().unwrap(), (dy(1, 1), dy(3, 1)));
        assert!((a.evaluate(1.0) - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(a.evaluate(0.5), 0.0);
    }

    #[test]
    fn inner_product_symmetry() {
        let h = hat();
        let g = h.dilate_translate(1, dy(1, 0), 1.3);
        assert!((h.inner_product(&g) - g.inner_product(&h)).abs() < 1e-15);
    }
}
