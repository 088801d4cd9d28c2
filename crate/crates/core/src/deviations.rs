//! Large-deviation exponent Ω, constraint margin B, and the constrained
//! maximisation of B on {Ω = s} that yields the rigorous freezing density.
//!
//! A point is (δ, ζ, ε) with λ = rk/(2^k − 1) and ρ = λ(1+δ)(1−α). At a
//! stationary point ζ and the multiplier μ are closed-form in (δ, ε), which
//! leaves a 2-equation system solved by damped Newton.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_min, linspace, solve_linear};
use crate::rates::g_c;

const LN_2: f64 = std::f64::consts::LN_2;

/// ω(x) = (1+x) ln(1+x) − x without the checks; ω(−1) = 1.
fn omega(x: f64) -> f64 {
    if x == -1.0 {
        1.0
    } else if x.abs() < 1e-4 {
        // Σ_{n≥2} (−1)^n x^n / (n(n−1))
        let mut sum = 0.0;
        let mut pow = x * x;
        for n in 2..12 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * pow / (n * (n - 1)) as f64;
            pow *= x;
        }
        sum
    } else {
        (1.0 + x) * x.ln_1p() - x
    }
}

/// ω(x) = (1+x) ln(1+x) − x for x ≥ −1.
pub fn omega_fn(x: f64) -> Result<f64> {
    if !(x >= -1.0) {
        return Err(Error::Domain(format!("ω needs x ≥ −1, got {x}")));
    }
    Ok(omega(x))
}

/// Chernoff factor F(x, y) = exp(−x ω(y)) for x > 0.
pub fn chernoff_f(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("F needs a positive first argument, got {x}")));
    }
    Ok((-x * omega_fn(y)?).exp())
}

/// λ = rk/(2^k − 1).
pub fn lambda_of(k: u32, r: f64) -> f64 {
    r * k as f64 / (2f64.powi(k as i32) - 1.0)
}

/// s = ln 2 + r ln(1 − 2^{−k}).
pub fn s_of(k: u32, r: f64) -> f64 {
    LN_2 + r * (-(2f64.powi(-(k as i32)))).ln_1p()
}

/// Density at which s vanishes.
pub fn s_root(k: u32) -> f64 {
    -LN_2 / (-(2f64.powi(-(k as i32)))).ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationPoint {
    pub delta: f64,
    pub zeta: f64,
    pub epsilon: f64,
    /// Lagrange multiplier; not used by Ω or B.
    pub mu: f64,
    pub k: u32,
    pub r: f64,
    pub alpha: f64,
}

impl DeviationPoint {
    pub fn lambda(&self) -> f64 {
        lambda_of(self.k, self.r)
    }

    pub fn rho(&self) -> f64 {
        self.lambda() * (1.0 + self.delta) * (1.0 - self.alpha)
    }
}

/// Ω = λω(δ) + e^{−ρ}ω(ζ) + λ(k−1)(1+δ)(1+ζ)e^{−ρ}ω(ε).
pub fn big_omega(p: &DeviationPoint) -> f64 {
    let l = p.lambda();
    let e = (-p.rho()).exp();
    l * omega(p.delta)
        + e * omega(p.zeta)
        + l * (p.k as f64 - 1.0) * (1.0 + p.delta) * (1.0 + p.zeta) * e * omega(p.epsilon)
}

/// B = (1+ε)(1+ζ)(k−1)e^{−ρ} − α.
pub fn big_b(p: &DeviationPoint) -> f64 {
    (1.0 + p.epsilon) * (1.0 + p.zeta) * (p.k as f64 - 1.0) * (-p.rho()).exp() - p.alpha
}

/// ζ solving ln(1+ζ) = (k−1)λ(1+δ)ε.
pub fn zeta_implied(k: u32, r: f64, delta: f64, epsilon: f64) -> f64 {
    ((k as f64 - 1.0) * lambda_of(k, r) * (1.0 + delta) * epsilon).exp_m1()
}

/// μ = 1/(λ(1+δ) ln(1+ε)).
pub fn mu_implied(k: u32, r: f64, delta: f64, epsilon: f64) -> Result<f64> {
    let den = lambda_of(k, r) * (1.0 + delta) * epsilon.ln_1p();
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Degenerate(format!("μ undefined at δ = {delta}, ε = {epsilon}")));
    }
    Ok(1.0 / den)
}

/// (ζ, μ) implied by (δ, ε) at a stationary point.
pub fn stationary_closures(p: &DeviationPoint) -> Result<(f64, f64)> {
    if !(p.delta > -1.0 && p.epsilon > -1.0) {
        return Err(Error::Domain(format!("closures need δ, ε > −1, got δ = {}, ε = {}", p.delta, p.epsilon)));
    }
    Ok((zeta_implied(p.k, p.r, p.delta, p.epsilon), mu_implied(p.k, p.r, p.delta, p.epsilon)?))
}

/// Search box [δ₀, 0] × [0, ε₀] with δ₀ = −√(2s/λ) and
/// ε₀ = (1−α)/(k−1) + ln 3/(λ(1+δ₀)(k−1)).
pub fn region_bounds(k: u32, r: f64, alpha: f64) -> Result<(f64, f64)> {
    let s = s_of(k, r);
    if !(s > 0.0) {
        return Err(Error::Domain(format!("s = {s} ≤ 0 at k = {k}, r = {r}: density beyond 2^k ln 2")));
    }
    let l = lambda_of(k, r);
    let d0 = -(2.0 * s / l).sqrt();
    let km1 = k as f64 - 1.0;
    let e0 = (1.0 - alpha) / km1 + 3f64.ln() / (l * (1.0 + d0) * km1);
    Ok((d0, e0))
}

/// Residuals of the reduced system at (δ, ε) and their Jacobian.
struct Reduced {
    k: u32,
    r: f64,
    alpha: f64,
    lambda: f64,
    s: f64,
}

impl Reduced {
    fn new(k: u32, r: f64, alpha: f64) -> Self {
        Reduced { k, r, alpha, lambda: lambda_of(k, r), s: s_of(k, r) }
    }

    fn point(&self, d: f64, e: f64) -> DeviationPoint {
        let zeta = zeta_implied(self.k, self.r, d, e);
        let mu = mu_implied(self.k, self.r, d, e).unwrap_or(f64::NAN);
        DeviationPoint { delta: d, zeta, epsilon: e, mu, k: self.k, r: self.r, alpha: self.alpha }
    }

    /// [ln(1+δ) + e^{−ρ}((1−α)ζ + (k−1)(1+ζ)ω(ε)), Ω − s].
    fn residual(&self, d: f64, e: f64) -> [f64; 2] {
        let p = self.point(d, e);
        let km1 = self.k as f64 - 1.0;
        let er = (-p.rho()).exp();
        let pp = (1.0 - self.alpha) * p.zeta + km1 * (1.0 + p.zeta) * omega(e);
        [d.ln_1p() + er * pp, big_omega(&p) - self.s]
    }

    fn jacobian(&self, d: f64, e: f64) -> [[f64; 2]; 2] {
        let p = self.point(d, e);
        let (l, a, km1) = (self.lambda, self.alpha, self.k as f64 - 1.0);
        let z = p.zeta;
        let er = (-p.rho()).exp();
        let w = omega(e);
        let z_d = (1.0 + z) * km1 * l * e;
        let z_e = (1.0 + z) * km1 * l * (1.0 + d);
        let pp = (1.0 - a) * z + km1 * (1.0 + z) * w;
        let p_d = z_d * ((1.0 - a) + km1 * w);
        let p_e = z_e * ((1.0 - a) + km1 * w) + km1 * (1.0 + z) * e.ln_1p();
        let r1_d = 1.0 / (1.0 + d) + er * (-l * (1.0 - a) * pp + p_d);
        let r1_e = er * p_e;
        let lz = z.ln_1p();
        let om_d = l * d.ln_1p() - l * (1.0 - a) * er * omega(z)
            + er * lz * z_d
            + l * km1 * er * w * ((1.0 + z) + (1.0 + d) * z_d - (1.0 + d) * (1.0 + z) * l * (1.0 - a));
        let om_e = er * lz * z_e + l * km1 * (1.0 + d) * er * (z_e * w + (1.0 + z) * e.ln_1p());
        [[r1_d, r1_e], [om_d, om_e]]
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarySolution {
    pub point: DeviationPoint,
    /// Reduced-system residuals followed by the two closure residuals.
    pub residuals: Vec<f64>,
    pub b_value: f64,
    pub omega_value: f64,
    pub s_value: f64,
    pub iterations: usize,
}

impl StationarySolution {
    fn build(sys: &Reduced, d: f64, e: f64, iterations: usize) -> Result<Self> {
        let point = sys.point(d, e);
        let [r1, r2] = sys.residual(d, e);
        let (zeta, mu) = stationary_closures(&point)?;
        let sol = StationarySolution {
            point,
            residuals: vec![r1, r2, point.zeta - zeta, point.mu - mu],
            b_value: big_b(&point),
            omega_value: big_omega(&point),
            s_value: sys.s,
            iterations,
        };
        Ok(sol)
    }

    pub fn max_residual(&self) -> f64 {
        max_abs(&self.residuals)
    }

    /// δ ≤ 0 ≤ ε and ζ ≥ 0, allowing `slack` for rounding.
    pub fn has_extremum_signs(&self, slack: f64) -> bool {
        self.point.delta <= slack && self.point.epsilon >= -slack && self.point.zeta >= -slack
    }
}

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

fn newton(sys: &Reduced, start: (f64, f64), tol: f64) -> std::result::Result<(f64, f64, usize), String> {
    let (mut d, mut e) = start;
    let mut f = sys.residual(d, e);
    let mut trace = Vec::new();
    for it in 0..MAX_ITER {
        let norm = max_abs(&f);
        if norm < tol {
            return Ok((d, e, it));
        }
        trace.push(format!("{it}: δ={d:.6e} ε={e:.6e} |F|={norm:.3e}"));
        let j = sys.jacobian(d, e);
        let Some(step) = solve_linear(j, [-f[0], -f[1]]) else {
            return Err(format!("singular Jacobian; {}", trace.join("; ")));
        };
        let mut t = 1.0;
        loop {
            let (nd, ne) = (d + t * step[0], e + t * step[1]);
            if nd > -1.0 && ne > -1.0 {
                let nf = sys.residual(nd, ne);
                if nf.iter().all(|x| x.is_finite()) && max_abs(&nf) < (1.0 - 1e-4 * t) * norm {
                    d = nd;
                    e = ne;
                    f = nf;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                // A stalled step at rounding level still counts as converged.
                if norm < tol * 1e3 {
                    return Ok((d, e, it));
                }
                return Err(format!("line search stalled; {}", trace.join("; ")));
            }
        }
    }
    Err(format!("no convergence in {MAX_ITER} iterations; {}", trace.join("; ")))
}

/// Starting points: the default, the four inset box corners and the centre.
fn starts(d0: f64, e0: f64) -> Vec<(f64, f64)> {
    vec![
        (d0 / 4.0, e0 / 4.0),
        (0.9 * d0, 0.1 * e0),
        (0.9 * d0, 0.9 * e0),
        (0.1 * d0, 0.1 * e0),
        (0.1 * d0, 0.9 * e0),
        (d0 / 2.0, e0 / 2.0),
    ]
}

fn checked(sol: StationarySolution) -> Result<StationarySolution> {
    if !sol.has_extremum_signs(1e-12) {
        return Err(Error::InvalidSolution(format!(
            "stationary point outside the sign region: δ = {}, ζ = {}, ε = {}",
            sol.point.delta, sol.point.zeta, sol.point.epsilon
        )));
    }
    Ok(sol)
}

/// Solve the reduced stationary system at (k, r, α) starting from `init`
/// (default (δ₀/4, ε₀/4)). Falls back on multi-start, then on nested
/// bisection.
pub fn solve_stationary(k: u32, r: f64, alpha: f64, init: Option<(f64, f64)>, tol: f64) -> Result<StationarySolution> {
    check_args(k, alpha)?;
    let (d0, e0) = region_bounds(k, r, alpha)?;
    let sys = Reduced::new(k, r, alpha);
    let start = init.unwrap_or((d0 / 4.0, e0 / 4.0));
    match newton(&sys, start, tol) {
        Ok((d, e, it)) => checked(StationarySolution::build(&sys, d, e, it)?),
        Err(first) => match solve_stationary_multistart(k, r, alpha, tol) {
            Ok(sol) => Ok(sol),
            Err(_) => solve_stationary_bisection(k, r, alpha, tol)
                .map_err(|e| Error::Solver(format!("Newton failed ({first}); bisection failed ({e})"))),
        },
    }
}

fn check_args(k: u32, alpha: f64) -> Result<()> {
    if k < 2 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameters(format!("need k ≥ 2 and α ∈ (0,1), got k = {k}, α = {alpha}")));
    }
    Ok(())
}

/// Newton from every start; the converged solutions must agree.
pub fn solve_stationary_multistart(k: u32, r: f64, alpha: f64, tol: f64) -> Result<StationarySolution> {
    check_args(k, alpha)?;
    let (d0, e0) = region_bounds(k, r, alpha)?;
    let sys = Reduced::new(k, r, alpha);
    let mut found: Vec<StationarySolution> = Vec::new();
    let mut failures = Vec::new();
    for s in starts(d0, e0) {
        match newton(&sys, s, tol) {
            Ok((d, e, it)) => found.push(StationarySolution::build(&sys, d, e, it)?),
            Err(msg) => failures.push(msg),
        }
    }
    let Some(first) = found.first().cloned() else {
        return Err(Error::Solver(format!("no start converged: {}", failures.join(" | "))));
    };
    for other in &found[1..] {
        let gap = (other.point.delta - first.point.delta).abs().max((other.point.epsilon - first.point.epsilon).abs());
        if gap > 1e-6 {
            return Err(Error::Solver(format!(
                "distinct stationary points (δ, ε) = ({}, {}) and ({}, {})",
                first.point.delta, first.point.epsilon, other.point.delta, other.point.epsilon
            )));
        }
    }
    checked(first)
}

/// Nested bisection: for each ε the first residual is solved in δ, and the
/// constraint Ω = s is then solved in ε. Slow but derivative-free.
pub fn solve_stationary_bisection(k: u32, r: f64, alpha: f64, tol: f64) -> Result<StationarySolution> {
    check_args(k, alpha)?;
    let (_, e0) = region_bounds(k, r, alpha)?;
    let sys = Reduced::new(k, r, alpha);
    let delta_of = |e: f64| bisect(|d| sys.residual(d, e)[0], -1.0 + 1e-12, 0.0, 1e-16);
    let h = |e: f64| match delta_of(e) {
        Some(d) => sys.residual(d, e)[1],
        None => f64::NAN,
    };
    let mut hi = e0;
    while !(h(hi) > 0.0) {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Bracket("Ω never reaches s along the reduced curve".into()));
        }
    }
    let e = bisect(h, 1e-300, hi, 1e-16 * hi).ok_or_else(|| Error::Bracket("ε not bracketed".into()))?;
    let d = delta_of(e).ok_or_else(|| Error::Bracket("δ not bracketed".into()))?;
    let sol = StationarySolution::build(&sys, d, e, 0)?;
    if sol.max_residual() > tol.max(1e-10) {
        return Err(Error::Solver(format!("bisection residual {:.3e} above tolerance", sol.max_residual())));
    }
    checked(sol)
}

/// Stationary point at density r, or `None` when s ≤ 0 and the constraint
/// set is empty (B counts as negative there).
fn b_at(k: u32, alpha: f64, r: f64, warm: &mut Option<(f64, f64)>) -> Result<Option<StationarySolution>> {
    if !(s_of(k, r) > 0.0) {
        return Ok(None);
    }
    let sol = solve_stationary(k, r, alpha, *warm, DEFAULT_TOL)?;
    *warm = Some((sol.point.delta, sol.point.epsilon));
    Ok(Some(sol))
}

const GUARD: f64 = 1e-9;

fn b_value(sol: &Option<StationarySolution>) -> f64 {
    sol.as_ref().map_or(f64::NEG_INFINITY, |s| s.b_value)
}

/// The critical density c_k^α together with the stationary point there.
pub fn critical_point(k: u32, alpha: f64, r_lo: f64, r_hi: f64, tol: f64) -> Result<(f64, StationarySolution)> {
    if !(r_lo < r_hi) || !(tol > 0.0) {
        return Err(Error::InvalidParameters(format!("need r_lo < r_hi and tol > 0, got [{r_lo}, {r_hi}], {tol}")));
    }
    check_args(k, alpha)?;
    let mut warm = None;
    let lo_sol = b_at(k, alpha, r_lo, &mut warm)?;
    let hi_sol = b_at(k, alpha, r_hi, &mut None)?;
    if !(b_value(&lo_sol) > GUARD && b_value(&hi_sol) < -GUARD) {
        return Err(Error::Bracket(format!(
            "B = {:.3e} at r = {r_lo} and {:.3e} at r = {r_hi}; need positive then negative",
            b_value(&lo_sol),
            b_value(&hi_sol)
        )));
    }
    let (mut lo, mut hi) = (r_lo, r_hi);
    let (mut b_lo, mut b_hi) = (b_value(&lo_sol), b_value(&hi_sol));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let sol = b_at(k, alpha, mid, &mut warm)?;
        let b = b_value(&sol);
        if b.abs() <= GUARD {
            if let Some(sol) = sol {
                return Ok((mid, sol));
            }
        }
        if b > 0.0 {
            lo = mid;
            b_lo = b;
        } else {
            hi = mid;
            b_hi = b;
        }
    }
    // Linear interpolation of B inside the final bracket.
    let c = if b_hi.is_finite() { lo + (hi - lo) * b_lo / (b_lo - b_hi) } else { 0.5 * (lo + hi) };
    let sol = solve_stationary(k, c, alpha, warm, DEFAULT_TOL)?;
    Ok((c, sol))
}

/// c_k^α: the density where B at the stationary point changes sign.
pub fn critical_density(k: u32, alpha: f64, r_lo: f64, r_hi: f64, tol: f64) -> Result<f64> {
    critical_point(k, alpha, r_lo, r_hi, tol).map(|(c, _)| c)
}

/// Bracket [0.5 r_s, 0.9999 r_s] below the density r_s where s vanishes.
pub fn default_bracket(k: u32) -> (f64, f64) {
    let rs = s_root(k);
    (0.5 * rs, 0.9999 * rs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub c: f64,
    pub alpha: f64,
    pub solution: StationarySolution,
    /// ∂_α B − μ ∂_α Ω at the returned point (zero at the optimum).
    pub alpha_residual: f64,
}

/// ∂_α B − μ ∂_α Ω at fixed (δ, ζ, ε, r).
fn alpha_gradient(p: &DeviationPoint) -> f64 {
    let l = p.lambda();
    let er = (-p.rho()).exp();
    let km1 = p.k as f64 - 1.0;
    let db = (1.0 + p.epsilon) * (1.0 + p.zeta) * km1 * er * l * (1.0 + p.delta) - 1.0;
    let dom = l * (1.0 + p.delta) * er * (omega(p.zeta) + l * km1 * (1.0 + p.delta) * (1.0 + p.zeta) * omega(p.epsilon));
    db - p.mu * dom
}

/// Four-equation residual in (δ, ε, r, α).
fn full_residual(k: u32, x: [f64; 4]) -> [f64; 4] {
    let [d, e, r, a] = x;
    let sys = Reduced::new(k, r, a);
    let [r1, r2] = sys.residual(d, e);
    let p = sys.point(d, e);
    [r1, r2, big_b(&p), alpha_gradient(&p)]
}

fn polish(k: u32, x0: [f64; 4]) -> Option<[f64; 4]> {
    let scale = [x0[0].abs().max(1e-3), x0[1].abs().max(1e-3), x0[2], 0.1];
    let mut x = x0;
    let mut f = full_residual(k, x);
    for _ in 0..50 {
        let norm = max_abs(&f);
        if norm < 1e-13 {
            return Some(x);
        }
        let mut j = [[0.0; 4]; 4];
        for c in 0..4 {
            let h = 1e-6 * scale[c];
            let (mut xp, mut xm) = (x, x);
            xp[c] += h;
            xm[c] -= h;
            let (fp, fm) = (full_residual(k, xp), full_residual(k, xm));
            for row in 0..4 {
                j[row][c] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        let step = solve_linear(j, f.map(|v| -v))?;
        let mut t = 1.0;
        loop {
            let cand: [f64; 4] = std::array::from_fn(|i| x[i] + t * step[i]);
            let fc = full_residual(k, cand);
            if fc.iter().all(|v| v.is_finite()) && max_abs(&fc) < norm {
                x = cand;
                f = fc;
                break;
            }
            t *= 0.5;
            if t < 1e-8 {
                return (norm < 1e-10).then_some(x);
            }
        }
    }
    (max_abs(&f) < 1e-10).then_some(x)
}

/// Minimise c_k^α over α ∈ [0.1, 0.5]: golden section on the critical
/// density, then Newton on the system with ∂_α added.
pub fn minimize_over_alpha(k: u32, tol: f64) -> Result<CriticalPoint> {
    if k < 3 {
        return Err(Error::InvalidParameters(format!("k = {k} too small for the α minimisation")));
    }
    let (lo, hi) = default_bracket(k);
    let rtol = 1e-12 * hi;
    let mut err = None;
    let mut c_of = |a: f64| match critical_density(k, a, lo, hi, rtol) {
        Ok(c) => c,
        Err(e) => {
            err.get_or_insert(e);
            f64::INFINITY
        }
    };
    let (a_g, _) = golden_min(&mut c_of, 0.1, 0.5, tol.max(1e-9));
    if let Some(e) = err {
        return Err(e);
    }
    let (c_g, sol_g) = critical_point(k, a_g, lo, hi, rtol)?;
    let x0 = [sol_g.point.delta, sol_g.point.epsilon, c_g, a_g];
    let (c, alpha) = match polish(k, x0) {
        // Keep the polished point only if it stays near the golden-section one.
        Some([_, _, c, a]) if (a - a_g).abs() < 1e-2 && (c - c_g).abs() < 1e-3 * c_g => (c, a),
        _ => (c_g, a_g),
    };
    let solution = solve_stationary(k, c, alpha, Some((sol_g.point.delta, sol_g.point.epsilon)), DEFAULT_TOL)?;
    let alpha_residual = alpha_gradient(&solution.point);
    Ok(CriticalPoint { c, alpha, solution, alpha_residual })
}

/// c_k^α / (2^k ln 2) over the default bracket.
pub fn normalised_critical_density(k: u32, alpha: f64) -> Result<f64> {
    let (lo, hi) = default_bracket(k);
    Ok(critical_density(k, alpha, lo, hi, 1e-10 * hi)? / (2f64.powi(k as i32) * LN_2))
}

/// Largest B over a grid on the box, taking at each (δ, ε) the largest ζ
/// with Ω ≤ s. `None` if no grid point admits such a ζ.
pub fn max_b_on_box(k: u32, r: f64, alpha: f64, grid: usize) -> Result<Option<f64>> {
    check_args(k, alpha)?;
    let (d0, e0) = region_bounds(k, r, alpha)?;
    let s = s_of(k, r);
    let l = lambda_of(k, r);
    let mut best: Option<f64> = None;
    for &d in &linspace(d0, 0.0, grid) {
        for &e in &linspace(0.0, e0, grid) {
            let pt = |z: f64| DeviationPoint { delta: d, zeta: z, epsilon: e, mu: f64::NAN, k, r, alpha };
            // Ω is convex in ζ with its minimum here.
            let z_min = (-l * (k as f64 - 1.0) * (1.0 + d) * omega(e)).exp_m1();
            if big_omega(&pt(z_min)) > s {
                continue;
            }
            let mut z_hi = z_min.max(0.0) + 1.0;
            while big_omega(&pt(z_hi)) <= s {
                z_hi = 2.0 * z_hi + 1.0;
            }
            let z = bisect(|z| big_omega(&pt(z)) - s, z_min, z_hi, 1e-14 * z_hi).unwrap_or(z_min);
            let b = big_b(&pt(z));
            best = Some(best.map_or(b, |m| m.max(b)));
        }
    }
    Ok(best)
}

/// The sufficient inequality with the exact box bounds at r = c 2^k ln 2:
/// α/((k−1)(1+ε₀)) [ln(α e^{ck(1+δ₀)(1−α) ln 2}/((k−1)(1+ε₀))) − 1] ≥ (1−c) ln 2.
pub fn main_inequality_holds(k: u32, alpha: f64, c: f64) -> bool {
    let r = c * 2f64.powi(k as i32) * LN_2;
    let Ok((d0, e0)) = region_bounds(k, r, alpha) else {
        return false;
    };
    let kf = k as f64;
    let den = (kf - 1.0) * (1.0 + e0);
    let inner = alpha.ln() + c * kf * (1.0 + d0) * (1.0 - alpha) * LN_2 - den.ln();
    alpha / den * (inner - 1.0) >= (1.0 - c) * LN_2
}

/// True when c ≥ g_c(k, α), which certifies frozen variables at density
/// c 2^k ln 2. Outside k ≥ 14, c ∈ (4/5, 1], α ∈ (0, 1) nothing is certified.
pub fn analytic_k14_certificate(k: u32, alpha: f64, c: f64) -> bool {
    k >= 14 && c > 0.8 && c <= 1.0 && alpha > 0.0 && alpha < 1.0 && c >= g_c(k, alpha)
}
