//! Cardinal spline multiresolution analysis on a compact interval.
//!
//! Builds the B-spline scaling function of order `m`, the compactly
//! supported semi-orthogonal Chui-Wang wavelet (support length `w = 2m - 1`),
//! and the cut-off bases for the nested spaces `V_j` and their orthogonal
//! complements `W_j` on `[c, d]`: translates are restricted to the interval
//! and, for the wavelet basis, the excess boundary functions introduced by
//! the cutting are dropped.

use crate::dyadic::Dyadic;
use crate::poly::PiecewisePoly;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of a spline space on `[c, d]`: order, interval, and scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceParams {
    /// Spline order `m` (degree `m - 1`).
    pub order: u32,
    pub c: i64,
    pub d: i64,
    /// Knot spacing is `2^-scale`.
    pub scale: u32,
}

impl SpaceParams {
    pub fn new(order: u32, c: i64, d: i64, scale: u32) -> Result<Self> {
        if order < 2 {
            return Err(Error::arg(format!("spline order must be >= 2, got {order}")));
        }
        if d <= c {
            return Err(Error::arg(format!("empty interval [{c}, {d}]")));
        }
        if (d - c) < order as i64 {
            return Err(Error::arg(format!(
                "interval [{c}, {d}] shorter than one order-{order} scaling function"
            )));
        }
        Ok(SpaceParams { order, c, d, scale })
    }

    pub fn with_scale(&self, scale: u32) -> Self {
        SpaceParams { scale, ..*self }
    }

    /// Support length `w = 2m - 1` of the wavelet.
    pub fn wavelet_support(&self) -> u32 {
        2 * self.order - 1
    }

    /// `dim V_j = (d - c) 2^j + m - 1`.
    pub fn dim_v(&self) -> usize {
        ((self.d - self.c) as usize) * (1usize << self.scale) + self.order as usize - 1
    }

    /// `dim W_j = (d - c) 2^j`.
    pub fn dim_w(&self) -> usize {
        ((self.d - self.c) as usize) * (1usize << self.scale)
    }

    pub fn interval(&self) -> (Dyadic, Dyadic) {
        (Dyadic::from_int(self.c), Dyadic::from_int(self.d))
    }
}

/// Whether an atom is a scaling function or a wavelet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomKind {
    Scaling,
    Wavelet,
}

/// One dictionary element: a dilated, translated prototype restricted to the
/// interval.
#[derive(Clone, Debug)]
pub struct Atom {
    pub kind: AtomKind,
    pub order: u32,
    /// Dilation exponent `j`: the prototype is evaluated at `2^j x - k`.
    pub scale: u32,
    /// Translation `k`, dyadic when the lattice is refined.
    pub translation: Dyadic,
    /// The function `2^(j/2) prototype(2^j x - k)` restricted to `[c, d]`.
    pub shape: PiecewisePoly,
    /// Exact L2 norm of `shape`.
    pub norm: f64,
}

fn pow2_half(j: u32) -> f64 {
    let whole = f64::powi(2.0, (j / 2) as i32);
    if j % 2 == 1 {
        whole * std::f64::consts::SQRT_2
    } else {
        whole
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// The cardinal B-spline of order `m` on the knots `0, 1, ..., m`, from the
/// truncated-power representation. Unit integral.
pub fn bspline(m: u32) -> Result<PiecewisePoly> {
    if m < 1 {
        return Err(Error::arg("B-spline order must be >= 1"));
    }
    let deg = (m - 1) as usize;
    let inv_fact: f64 = 1.0 / (1..=deg).map(|t| t as f64).product::<f64>().max(1.0);
    let breakpoints: Vec<Dyadic> = (0..=m as i64).map(Dyadic::from_int).collect();
    let mut pieces = Vec::with_capacity(m as usize);
    for i in 0..m {
        // On [i, i+1) only the truncated powers with r <= i are active:
        // (1/(m-1)!) sum_r (-1)^r C(m,r) (u + i - r)^(m-1) around u = x - i.
        let mut coeffs = vec![0.0; deg + 1];
        for r in 0..=i {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let c_r = sign * binomial(m, r) * inv_fact;
            let s = (i - r) as f64;
            let mut s_pow = s.powi(deg as i32);
            for t in 0..=deg {
                coeffs[t] += c_r * binomial(deg as u32, t as u32) * s_pow;
                if deg > t {
                    s_pow = if s == 0.0 {
                        if deg - t == 1 { 1.0 } else { 0.0 }
                    } else {
                        s_pow / s
                    };
                }
            }
        }
        pieces.push(coeffs);
    }
    PiecewisePoly::from_pieces(breakpoints, pieces)
}

/// Two-scale coefficients of the order-`m` B-spline:
/// `phi(x) = sum_n p_n phi(2x - n)`, `p_n = 2^(1-m) C(m, n)`.
pub fn bspline_two_scale(m: u32) -> Vec<f64> {
    let factor = f64::powi(2.0, 1 - m as i32);
    (0..=m).map(|n| factor * binomial(m, n)).collect()
}

/// The Chui-Wang semi-orthogonal spline wavelet of order `m` with support
/// `[0, 2m - 1]`, together with its two-scale coefficients `q` such that
/// `psi(x) = sum_n q_n phi(2x - n)`. The sign is fixed so that `q_0 > 0`;
/// the defining property (orthogonality to all same-scale B-spline
/// translates) is what the tests pin down.
pub fn chui_wang_wavelet(m: u32) -> Result<(PiecewisePoly, Vec<f64>)> {
    if m < 1 {
        return Err(Error::arg("wavelet order must be >= 1"));
    }
    let wide = bspline(2 * m)?;
    let scale = f64::powi(2.0, 1 - m as i32);
    let mut q: Vec<f64> = (0..=(3 * m - 2) as i64)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let sum: f64 = (0..=m as i64)
                .map(|l| binomial(m, l as u32) * wide.evaluate((n - l + 1) as f64))
                .sum();
            sign * scale * sum
        })
        .collect();
    if q[0] < 0.0 {
        for v in &mut q {
            *v = -*v;
        }
    }
    let phi = bspline(m)?;
    let halves: Vec<PiecewisePoly> = (0..q.len())
        .map(|n| phi.dilate_translate(1, Dyadic::from_int(n as i64), 1.0))
        .collect();
    let psi = PiecewisePoly::linear_combination(&q, &halves)?;
    Ok((psi, q))
}

/// Builds one restricted atom from a prototype shape. Errors if the translate
/// does not intersect the interval.
pub(crate) fn restricted_atom(
    kind: AtomKind,
    prototype: &PiecewisePoly,
    params: &SpaceParams,
    k: Dyadic,
) -> Result<Atom> {
    let (c, d) = params.interval();
    let shape = prototype
        .dilate_translate(params.scale, k, pow2_half(params.scale))
        .restrict(c, d)?;
    if shape.is_zero() {
        return Err(Error::arg(format!(
            "translate {k} at scale {} has empty support on [{}, {}]",
            params.scale, params.c, params.d
        )));
    }
    let norm = shape.norm();
    Ok(Atom {
        kind,
        order: params.order,
        scale: params.scale,
        translation: k,
        shape,
        norm,
    })
}

/// A single restricted scaling atom `phi_{j,k}`.
pub fn scaling_atom(params: &SpaceParams, k: Dyadic) -> Result<Atom> {
    restricted_atom(AtomKind::Scaling, &bspline(params.order)?, params, k)
}

/// A single restricted wavelet atom `psi_{j,k}`.
pub fn wavelet_atom(params: &SpaceParams, k: Dyadic) -> Result<Atom> {
    restricted_atom(AtomKind::Wavelet, &chui_wang_wavelet(params.order)?.0, params, k)
}

/// The cut-off B-spline basis of `V_j`: integer translates `k` with
/// `k in (2^j c - m, 2^j d)`, restricted to the interval.
pub fn basis_v(params: &SpaceParams) -> Result<Vec<Atom>> {
    let phi = bspline(params.order)?;
    let lo = (params.c << params.scale) - params.order as i64;
    let hi = params.d << params.scale;
    ((lo + 1)..hi)
        .map(|k| restricted_atom(AtomKind::Scaling, &phi, params, Dyadic::from_int(k)))
        .collect()
}

/// The cut-off wavelet basis of `W_j`: all integer translates meeting the
/// interval, with the first `ceil(z)` and last `floor(z)` boundary functions
/// eliminated, `z = (w - 1) / 2`. Yields exactly `dim W_j = (d - c) 2^j`
/// atoms.
pub fn basis_w(params: &SpaceParams) -> Result<Vec<Atom>> {
    let (psi, _) = chui_wang_wavelet(params.order)?;
    let w = params.wavelet_support() as i64;
    let z_ceil = w / 2; // z = (w-1)/2; w odd makes ceil(z) = floor(z) = (w-1)/2
    let z_floor = (w - 1) / 2;
    let lo = (params.c << params.scale) - w + 1 + z_ceil;
    let hi = (params.d << params.scale) - 1 - z_floor;
    (lo..=hi)
        .map(|k| restricted_atom(AtomKind::Wavelet, &psi, params, Dyadic::from_int(k)))
        .collect()
}
