//! Adaptive quadrature with algebraic endpoint singularities.
//!
//! Intervals without flagged endpoints go through globally adaptive
//! 7/15-point Gauss–Kronrod bisection. A flagged endpoint switches the whole
//! interval to tanh-sinh quadrature, whose nodes crowd the endpoints at a
//! double-exponential rate. Integrands receive an [`Abscissa`] carrying the
//! distances to both endpoints, computed without cancellation, so factors
//! like `(1 - x)^(γ-1)` stay accurate where `x` itself rounds to the
//! endpoint.

use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, Result};

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Cap on bisection depth (Gauss–Kronrod) or step halvings (tanh-sinh).
    pub max_depth: u32,
    /// Distance from a non-integrable endpoint at which integration stops.
    pub endpoint_eps: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 50,
            endpoint_eps: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if self.max_depth < 1 {
            return Err(invalid("quadrature max_depth must be at least 1"));
        }
        if !(self.endpoint_eps > 0.0 && self.endpoint_eps < 1e-3) {
            return Err(invalid("endpoint_eps must lie in (0, 1e-3)"));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub err_estimate: f64,
    pub converged: bool,
    /// Set when a non-integrable endpoint was cut back by `endpoint_eps`.
    pub truncated_endpoint: bool,
}

/// A quadrature node together with its distances to both interval ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_lo: f64,
    pub to_hi: f64,
}

/// How an endpoint is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Regular,
    /// May be unbounded; probed for integrability and truncated if needed.
    Singular,
    /// Always cut back by `endpoint_eps`.
    Truncate,
}

impl Endpoint {
    fn from_flag(singular: bool) -> Self {
        if singular {
            Endpoint::Singular
        } else {
            Endpoint::Regular
        }
    }
}

/// Integrates `f` over `[lo, hi]`.
///
/// A flagged endpoint whose integrand does not decay faster than
/// `1 / distance` is treated as non-integrable: integration stops
/// `endpoint_eps` short of it and `truncated_endpoint` is set.
pub fn integrate<F>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
    singular_at_lo: bool,
    singular_at_hi: bool,
) -> Result<QuadratureResult>
where
    F: Fn(Abscissa) -> f64,
{
    integrate_with(
        f,
        lo,
        hi,
        spec,
        Endpoint::from_flag(singular_at_lo),
        Endpoint::from_flag(singular_at_hi),
    )
}

/// [`integrate`] with explicit per-endpoint policy.
pub fn integrate_with<F>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
    lo_policy: Endpoint,
    hi_policy: Endpoint,
) -> Result<QuadratureResult>
where
    F: Fn(Abscissa) -> f64,
{
    spec.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("integration bounds must satisfy lo < hi, got [{lo}, {hi}]")));
    }
    let width = hi - lo;
    let cut_lo = match lo_policy {
        Endpoint::Regular => false,
        Endpoint::Truncate => true,
        Endpoint::Singular => !integrable_near(&f, lo, hi, true),
    };
    let cut_hi = match hi_policy {
        Endpoint::Regular => false,
        Endpoint::Truncate => true,
        Endpoint::Singular => !integrable_near(&f, lo, hi, false),
    };

    let eps = spec.endpoint_eps;
    let off_lo = if cut_lo { eps } else { 0.0 };
    let off_hi = if cut_hi { eps } else { 0.0 };
    let inner_width = width - off_lo - off_hi;
    if !(inner_width > 0.0) {
        return Err(invalid("interval shorter than the endpoint truncation"));
    }
    let inner_lo = lo + off_lo;
    let shifted = |a: Abscissa| {
        f(Abscissa {
            x: a.x,
            from_lo: a.from_lo + off_lo,
            to_hi: a.to_hi + off_hi,
        })
    };

    let any_singular = lo_policy != Endpoint::Regular || hi_policy != Endpoint::Regular;
    let mut out = if any_singular {
        tanh_sinh(&shifted, inner_lo, inner_width, spec)
    } else {
        gauss_kronrod_adaptive(&shifted, inner_lo, inner_width, spec)
    };
    out.truncated_endpoint = cut_lo || cut_hi;
    Ok(out)
}

/// Probes `d · |f|` at distances shrinking toward one endpoint; a ratio that
/// does not fall marks the endpoint as non-integrable.
fn integrable_near<F>(f: &F, lo: f64, hi: f64, at_lo: bool) -> bool
where
    F: Fn(Abscissa) -> f64,
{
    let width = hi - lo;
    let mut prev: Option<f64> = None;
    for k in 1..=4 {
        let d = width * 10f64.powi(-8 * k);
        let a = if at_lo {
            Abscissa {
                x: lo + d,
                from_lo: d,
                to_hi: width - d,
            }
        } else {
            Abscissa {
                x: hi - d,
                from_lo: width - d,
                to_hi: d,
            }
        };
        let g = d * f(a).abs();
        if !g.is_finite() {
            return false;
        }
        if let Some(p) = prev {
            if p > 0.0 && k == 4 && g >= 0.999 * p {
                return false;
            }
        }
        prev = Some(g);
    }
    true
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    lo: f64,
    width: f64,
    value: f64,
    err: f64,
    depth: u32,
}

fn gk15<F>(f: &F, lo: f64, width: f64, outer_lo: f64, outer_width: f64) -> (f64, f64)
where
    F: Fn(Abscissa) -> f64,
{
    let half = 0.5 * width;
    let centre = lo + half;
    let eval = |offset: f64| {
        // Distances measured from the integration bounds, not the segment.
        let from_lo = (lo - outer_lo) + half + offset;
        let to_hi = outer_width - from_lo;
        f(Abscissa {
            x: centre + offset,
            from_lo,
            to_hi,
        })
    };
    let fc = eval(0.0);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let pair = eval(-half * x) + eval(half * x);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

const MAX_SEGMENTS: usize = 4000;

fn gauss_kronrod_adaptive<F>(f: &F, lo: f64, width: f64, spec: &QuadratureSpec) -> QuadratureResult
where
    F: Fn(Abscissa) -> f64,
{
    let (value, err) = gk15(f, lo, width, lo, width);
    let mut segments = vec![Segment {
        lo,
        width,
        value,
        err,
        depth: 0,
    }];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.err).sum();
        if !total.is_finite() || !total_err.is_finite() {
            return QuadratureResult {
                value: total,
                err_estimate: f64::INFINITY,
                converged: false,
                truncated_endpoint: false,
            };
        }
        if total_err <= spec.tolerance(total) {
            return QuadratureResult {
                value: total,
                err_estimate: total_err,
                converged: true,
                truncated_endpoint: false,
            };
        }
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < spec.max_depth)
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .map(|(i, _)| i);
        let Some(i) = worst.filter(|_| segments.len() < MAX_SEGMENTS) else {
            return QuadratureResult {
                value: total,
                err_estimate: total_err,
                converged: false,
                truncated_endpoint: false,
            };
        };
        let s = segments.swap_remove(i);
        let half = 0.5 * s.width;
        for child_lo in [s.lo, s.lo + half] {
            let (value, err) = gk15(f, child_lo, half, lo, width);
            segments.push(Segment {
                lo: child_lo,
                width: half,
                value,
                err,
                depth: s.depth + 1,
            });
        }
    }
}

// Beyond this the complementary distance underflows.
const TANH_SINH_T_MAX: f64 = 6.1;
const TANH_SINH_MAX_LEVEL: u32 = 12;
const TANH_SINH_MIN_LEVEL: u32 = 3;

fn tanh_sinh<F>(f: &F, lo: f64, width: f64, spec: &QuadratureSpec) -> QuadratureResult
where
    F: Fn(Abscissa) -> f64,
{
    let half = 0.5 * width;
    let hi = lo + width;
    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let from_lo = width / (1.0 + (-2.0 * u).exp());
        let to_hi = width / (1.0 + (2.0 * u).exp());
        if from_lo == 0.0 || to_hi == 0.0 {
            return 0.0;
        }
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        if w == 0.0 {
            return 0.0;
        }
        let x = if from_lo <= to_hi { lo + from_lo } else { hi - to_hi };
        w * f(Abscissa { x, from_lo, to_hi })
    };

    let levels = spec.max_depth.min(TANH_SINH_MAX_LEVEL);
    let mut h = 1.0;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= TANH_SINH_T_MAX {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut err = f64::INFINITY;
    let mut converged = false;
    for level in 1..=levels {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= TANH_SINH_T_MAX {
            let t = k as f64 * h;
            sum += node(t) + node(-t);
            k += 2;
        }
        let next = sum * h;
        err = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            err = f64::INFINITY;
            break;
        }
        if level >= TANH_SINH_MIN_LEVEL.min(levels) && err <= spec.tolerance(estimate) {
            converged = true;
            break;
        }
    }
    QuadratureResult {
        value: estimate,
        err_estimate: err,
        converged,
        truncated_endpoint: false,
    }
}
