//! First-moment rate functions and the bounds built from them: the pair rate
//! Λ and its forbidden intervals, the balanced rate Λ_b(1/2), the volume
//! maximum g, the planted heuristic u_k, and the large-k certificates τ_k and
//! g_c.
//!
//! Everything is evaluated in the natural-log domain; `α ln α` is taken as 0
//! at the endpoints.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{bisect, geomspace, golden_min, linspace, scan_then_golden_max};

/// Clause density, given directly or through r = γ 2^k ln 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Density {
    R(f64),
    Gamma(f64),
}

impl Density {
    pub fn r(self, k: u32) -> f64 {
        match self {
            Density::R(r) => r,
            Density::Gamma(g) => r_from_gamma(k, g),
        }
    }
}

/// r = γ 2^k ln 2.
pub fn r_from_gamma(k: u32, gamma: f64) -> f64 {
    gamma * pow2(k as i32) * LN_2
}

#[inline]
fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// −α ln α − (1−α) ln(1−α), with the endpoint limits.
pub fn entropy(alpha: f64) -> f64 {
    let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    -xlogx(alpha) - xlogx(1.0 - alpha)
}

/// ln Λ(α, k, r) = ln 2 + H(α) + r ln(1 − 2^{1−k} + 2^{−k}(1−α)^k).
pub fn ln_lambda_pair(alpha: f64, k: u32, r: f64) -> f64 {
    let one_minus = (1.0 - alpha).max(0.0);
    let inner = pow2(-(k as i32)) * (one_minus.powi(k as i32) - 2.0);
    let tail = if r == 0.0 { 0.0 } else { r * inner.ln_1p() };
    LN_2 + entropy(alpha) + tail
}

/// Λ(α, k, r).
pub fn lambda_pair(alpha: f64, k: u32, r: f64) -> f64 {
    ln_lambda_pair(alpha, k, r).exp()
}

/// Sub-unit intervals of Λ(·, k, r) on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalReport {
    pub sub_unit_intervals: Vec<(f64, f64)>,
    /// inf{α : Λ(α) < 1}; `None` if Λ ≥ 1 everywhere on the scan.
    pub delta: Option<f64>,
}

/// Scan grid: `grid` uniform points plus a geometric sweep toward 0, where the
/// interesting features of large-k curves live.
fn scan_grid(grid: usize, hi: f64) -> Vec<f64> {
    let mut pts = linspace(0.0, hi, grid);
    let step = hi / (grid.max(2) - 1) as f64;
    pts.extend(geomspace(1e-300, step, 600));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Locate the sub-unit intervals of Λ by a sign scan of ln Λ on [0, 1] with
/// bisection refinement of every crossing to `refine_tol`.
pub fn forbidden_intervals(k: u32, r: f64, grid: usize, refine_tol: f64) -> Result<IntervalReport> {
    if grid < 1000 {
        return Err(Error::InvalidParameters(format!("grid of {grid} points is below 1000")));
    }
    if refine_tol <= 0.0 || k < 2 || r < 0.0 {
        return Err(Error::InvalidParameters("need k >= 2, r >= 0 and refine_tol > 0".into()));
    }
    let f = |a: f64| ln_lambda_pair(a, k, r);
    let pts = scan_grid(grid, 1.0);
    let mut intervals = Vec::new();
    let mut open: Option<f64> = if f(0.0) < 0.0 { Some(0.0) } else { None };
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        if (fa < 0.0) != (fb < 0.0) {
            let x = bisect(f, a, b, refine_tol).unwrap_or(0.5 * (a + b));
            match open.take() {
                Some(lo) => intervals.push((lo, x)),
                None => open = Some(x),
            }
        }
    }
    if let Some(lo) = open {
        intervals.push((lo, 1.0));
    }
    let delta = intervals.first().map(|&(lo, _)| lo);
    Ok(IntervalReport { sub_unit_intervals: intervals, delta })
}

/// w(α, k, γ) = 2 ln 2 − 2(1/2 − α)² − γ ln 2 [2 − (1−α)^k], an upper bound
/// on ln Λ(α, k, γ 2^k ln 2).
pub fn w_bound(alpha: f64, k: u32, gamma: f64) -> f64 {
    2.0 * LN_2 - 2.0 * (0.5 - alpha).powi(2) - gamma * LN_2 * (2.0 - (1.0 - alpha).powi(k as i32))
}

/// t with ε = 2^{1−k}(1 + t), where ε ∈ (0, 1) is the small root of
/// ε(2−ε)^{k−1} = 1. Solved as log1p(t) + (k−1) log1p(−2^{−k}(1+t)) = 0 so
/// that the excess over 2^{1−k} keeps full relative precision.
pub fn epsilon_excess(k: u32) -> f64 {
    assert!(k >= 2, "epsilon_excess needs k >= 2");
    if k == 2 {
        return 1.0;
    }
    let x = pow2(-(k as i32));
    let km1 = (k - 1) as f64;
    let h = |t: f64| t.ln_1p() + km1 * (-x * (1.0 + t)).ln_1p();
    // Peak of h sits at ε = 2/k; the root we want lies below it.
    let t_peak = 1.0 / (k as f64 * x) - 1.0;
    let mut t = 0.0;
    let mut t_hi = (2.0 * k as f64 * x).min(t_peak);
    while h(t_hi) < 0.0 && t_hi < t_peak {
        t_hi = (2.0 * t_hi).min(t_peak);
    }
    let mut t_lo = 0.0;
    for _ in 0..200 {
        t = 0.5 * (t_lo + t_hi);
        if t_hi - t_lo <= 1e-16 * t_hi {
            break;
        }
        if h(t) < 0.0 {
            t_lo = t;
        } else {
            t_hi = t;
        }
    }
    t
}

/// Small root ε of ε(2−ε)^{k−1} = 1; ε = 1 for k = 2.
pub fn epsilon_root(k: u32) -> f64 {
    2.0 * pow2(-(k as i32)) * (1.0 + epsilon_excess(k))
}

/// Coefficients of the series L = −Σ_j c_j ε^j / j with
/// c_j = (k−1) 2^{1−j} + 2 − k, where L is the per-clause log factor of
/// Λ_b(1/2). Returns (Σ_j c_j ε^j / j, Σ_{j≥2} c_j 2^k ε^j / j).
fn balanced_series(k: u32) -> (f64, f64) {
    let eps = epsilon_root(k);
    let kf = k as f64;
    let scale = pow2(k as i32);
    let (mut total, mut tail) = (0.0f64, 0.0f64);
    let mut pow = eps;
    for j in 1..5000 {
        let c = (kf - 1.0) * pow2(1 - j) + 2.0 - kf;
        let term = c * pow / j as f64;
        total += term;
        if j >= 2 {
            tail += term * scale;
        }
        // c_j can vanish for a single j, so test the envelope, not the term.
        if kf * pow / (j as f64) < 1e-19 * total.abs() && j > 2 {
            break;
        }
        pow *= eps;
    }
    (total, tail)
}

/// ln Λ_b(1/2, k, r) = 2 ln 2 + r ln[((1−ε/2)^k − 2^{−k})² / (1−ε)^k].
///
/// Uses the identity (1−ε/2)^k − 2^{−k} = 2^{1−k}(1−ε)/ε, which turns the log
/// factor into 2(k−1) log1p(−ε/2) + (2−k) log1p(−ε), summed as a series.
pub fn ln_lambda_b_half(k: u32, r: f64) -> f64 {
    assert!(k >= 3, "balanced rate needs k >= 3");
    let (s, _) = balanced_series(k);
    2.0 * LN_2 - r * s
}

/// 2^k L + 2 where L is the log factor in `ln_lambda_b_half`, computed
/// without cancellation: −2t − Σ_{j≥2} c_j 2^k ε^j / j.
pub fn balanced_excess(k: u32) -> f64 {
    let t = epsilon_excess(k);
    let (_, tail) = balanced_series(k);
    -2.0 * t - tail
}

/// m(k) − 1, the seven correction terms of m(k).
pub fn m_poly_excess(k: u32) -> f64 {
    let kf = k as f64;
    let x = pow2(-(k as i32));
    let k2 = kf * kf;
    let k3 = k2 * kf;
    let k4 = k3 * kf;
    let terms = [
        (2.0 * kf + 3.0) / 2.0 * x,
        (3.0 * k2 + 6.0 * kf - 4.0) / 2.0 * x.powi(2),
        (13.0 * k2 - 12.0 * kf + 1.0) / 2.0 * x.powi(3),
        (6.0 * k3 - 13.0 * k2 + 2.0 * kf) * x.powi(4),
        (9.0 * k4 - 24.0 * k3 + 10.0 * k2) / 2.0 * x.powi(5),
        (9.0 * k4 - 6.0 * k3) * x.powi(6),
        4.5 * k4 * x.powi(7),
    ];
    terms.iter().rev().sum()
}

/// m(k) = 1 + (2k+3)/2 · 2^{−k} + … + 9/2 · k^4 2^{−7k}.
pub fn m_poly(k: u32) -> f64 {
    1.0 + m_poly_excess(k)
}

/// Balanced lower bound 2 ln 2 [1 − γ m(k)].
pub fn balanced_lower_bound(k: u32, gamma: f64) -> f64 {
    2.0 * LN_2 * (1.0 - gamma * m_poly(k))
}

/// ln Λ_b(1/2, k, γ 2^k ln 2) − 2 ln 2 [1 − γ m(k)], evaluated in the form
/// γ ln 2 [(2^k L + 2) + 2 (m(k) − 1)] so that large k keeps precision.
pub fn balanced_bound_margin(k: u32, gamma: f64) -> f64 {
    gamma * LN_2 * (balanced_excess(k) + 2.0 * m_poly_excess(k))
}

/// Volume bound (1−γ) ln 2 + (1 + 9 ln 2 / 16) k^{−2}.
pub fn volume_bound(k: u32, gamma: f64) -> f64 {
    (1.0 - gamma) * LN_2 + (1.0 + 9.0 * LN_2 / 16.0) / (k as f64).powi(2)
}

/// Maximum of Λ over [0, Δ].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GMax {
    pub ln_g: f64,
    pub alpha_at_max: f64,
    pub delta: f64,
}

/// g(k, r) = max_{α ∈ [0, Δ]} Λ(α, k, r), by a dense scan of [0, Δ] and
/// golden-section refinement. Errors if Λ never drops below 1.
pub fn g_max(k: u32, r: f64, grid: usize) -> Result<GMax> {
    let rep = forbidden_intervals(k, r, grid.max(1000), 1e-14)?;
    let Some(delta) = rep.delta else {
        return Err(Error::NoForbiddenRegion(format!("Λ(·, {k}, {r}) ≥ 1 on the whole scan")));
    };
    let f = |a: f64| ln_lambda_pair(a, k, r);
    if delta == 0.0 {
        return Ok(GMax { ln_g: f(0.0), alpha_at_max: 0.0, delta });
    }
    let mut pts = scan_grid(grid.max(10_000), delta);
    pts.retain(|&a| a <= delta);
    let (alpha_at_max, ln_g) = scan_then_golden_max(f, &pts, 1e-12);
    Ok(GMax { ln_g, alpha_at_max, delta })
}

/// z = γ k² 2^{−γk}, the quantity controlling the α_M bound.
pub fn alpha_m_z(k: u32, gamma: f64) -> f64 {
    let kf = k as f64;
    gamma * kf * kf * 2f64.powf(-gamma * kf)
}

/// û(α, k, r) = −ln α − 2^{−k} r k (1 − kα), an upper bound on dΛ/dα.
pub fn u_hat(alpha: f64, k: u32, r: f64) -> f64 {
    let kf = k as f64;
    -alpha.ln() - pow2(-(k as i32)) * r * kf * (1.0 - kf * alpha)
}

/// u(α, k, r) = ln 2 − α ln α + α − r 2^{−k}(1 + α), the non-decreasing
/// majorant of ln Λ near 0.
pub fn u_majorant(alpha: f64, k: u32, r: f64) -> f64 {
    let xlogx = if alpha <= 0.0 { 0.0 } else { alpha * alpha.ln() };
    LN_2 - xlogx + alpha - r * pow2(-(k as i32)) * (1.0 + alpha)
}

/// Upper bound 2^{−γk}(1 + 4γk² 2^{−γk} ln 2) on α_M.
pub fn alpha_m_upper_bound(k: u32, gamma: f64) -> f64 {
    let base = 2f64.powf(-gamma * k as f64);
    base * (1.0 + 4.0 * alpha_m_z(k, gamma) * LN_2)
}

/// Smallest fixed point of q(α) = 2^{−γk} 2^{γk²α}, i.e. the smallest root
/// of û(·, k, γ 2^k ln 2). Requires k ≥ 8 and that a fixed point exists,
/// which holds whenever γ > 3 log₂(k) / k and also somewhat below it.
pub fn alpha_m_root(k: u32, gamma: f64) -> Result<f64> {
    let kf = k as f64;
    let domain = || Error::Domain(format!("need k >= 8 and a fixed point of q, got k = {k}, γ = {gamma}"));
    if k < 8 || !(gamma > 0.0) {
        return Err(domain());
    }
    let base = 2f64.powf(-gamma * kf);
    // φ(α) = ln q(α) − ln α is convex with its minimum at 1/(γk² ln 2).
    let phi = |a: f64| -gamma * kf * LN_2 + gamma * kf * kf * a * LN_2 - a.ln();
    let a_min = 1.0 / (gamma * kf * kf * LN_2);
    if phi(a_min) > 0.0 {
        return Err(domain());
    }
    let lo = base * 1e-3;
    bisect(phi, lo, a_min, 1e-15 * a_min).ok_or_else(|| Error::Bracket("α_M fixed point not bracketed".into()))
}

/// u_k(α) = (2^k − 1)/k · ln((k−1)/α) / (1 − α).
pub fn u_k_density(k: u32, alpha: f64) -> f64 {
    let kf = k as f64;
    (pow2(k as i32) - 1.0) / kf * ((kf - 1.0) / alpha).ln() / (1.0 - alpha)
}

/// u_k = min over α ∈ (0, 1) of u_k(α), with its minimiser.
pub fn u_k_min(k: u32) -> (f64, f64) {
    let (a, v) = golden_min(|a| u_k_density(k, a), 1e-9, 1.0 - 1e-9, 1e-12);
    (v, a)
}

/// τ_k = (2^k ln 2 − ((k+1) ln 2 + 3)/2) / ((2^k − 1) ln 2).
pub fn tau_k(k: u32) -> f64 {
    let p = pow2(k as i32);
    (p * LN_2 - ((k as f64 + 1.0) * LN_2 + 3.0) / 2.0) / ((p - 1.0) * LN_2)
}

/// g_c(k, α): the density (in units of 2^k ln 2) above which the analytic
/// argument certifies frozen variables.
pub fn g_c(k: u32, alpha: f64) -> f64 {
    let kf = k as f64;
    let a = alpha / (kf + 1.0);
    let num = 1.0 + a * (1.0 - a.ln()) / LN_2;
    let den = 1.0 + alpha * (1.0 - alpha) * (1.0 - 1.0 / kf.sqrt()) / (1.0 + 1.0 / kf);
    num / den
}

/// min over α of g_c(k, α), with its minimiser.
pub fn g_c_min(k: u32) -> (f64, f64) {
    let grid = linspace(1e-6, 1.0 - 1e-6, 10_000);
    let (a, v) = scan_then_golden_max(|a| -g_c(k, a), &grid, 1e-12);
    (-v, a)
}

/// ½ log₂(Λ_b(1/2, k, r) / g(k, r)).
pub fn cluster_count_exponent(k: u32, r: f64) -> Result<f64> {
    let g = g_max(k, r, 10_000)?;
    Ok((ln_lambda_b_half(k, r) - g.ln_g) / (2.0 * LN_2))
}

/// ln 2 (1 + γ − 2γ m(k)) − (1 + 9 ln 2/16) k^{−2}: the bracket whose
/// positivity, given both volume and balanced bounds, implies a positive
/// cluster-count exponent.
pub fn entropy_bracket(k: u32, gamma: f64) -> f64 {
    LN_2 * (1.0 + gamma - 2.0 * gamma * m_poly(k)) - (1.0 + 9.0 * LN_2 / 16.0) / (k as f64).powi(2)
}
