//! Published reference values used by `reproduce` verdicts and the
//! acceptance run. Each constant names the table or figure it comes from.

/// Bumped whenever a value below changes.
pub const REFERENCE_VERSION: u32 = 1;

/// Planted-model table, heuristic modified-process bound u_k for k = 3..7.
pub const U_K: [(u32, f64); 5] = [(3, 6.25), (4, 12.34), (5, 22.90), (6, 41.95), (7, 76.84)];
pub const U_K_TOL: f64 = 0.01;

/// Planted-model table, empirical freezing threshold t_k^1 for k = 3..7.
pub const T_K1: [(u32, f64); 5] = [(3, 5.72), (4, 11.58), (5, 21.75), (6, 40.13), (7, 73.88)];
/// Relative tolerance for t_k^1.
pub const T_K1_REL_TOL: f64 = 0.03;

/// One row of the stationary-point table for the rigorous freezing density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CkRow {
    pub k: u32,
    /// Satisfiability lower bound quoted alongside.
    pub r_k: f64,
    pub c_k: f64,
    pub alpha_m: f64,
    pub mu: f64,
    pub delta: f64,
    pub zeta: f64,
    pub epsilon: f64,
}

/// Stationary-point table for 9 ≤ k ≤ 13.
pub const C_K: [CkRow; 5] = [
    CkRow { k: 9, r_k: 349.92, c_k: 347.84, alpha_m: 0.265, mu: 8.037, delta: -0.015085, zeta: 1.7336, epsilon: 0.02083 },
    CkRow { k: 10, r_k: 704.94, c_k: 690.48, alpha_m: 0.273, mu: 6.935, delta: -0.015714, zeta: 2.7134, epsilon: 0.02194 },
    CkRow { k: 11, r_k: 1413.90, c_k: 1370.42, alpha_m: 0.281, mu: 6.256, delta: -0.015789, zeta: 4.0330, epsilon: 0.02229 },
    CkRow { k: 12, r_k: 2833.12, c_k: 2720.44, alpha_m: 0.289, mu: 5.802, delta: -0.015548, zeta: 5.7977, epsilon: 0.02220 },
    CkRow { k: 13, r_k: 5671.90, c_k: 5402.23, alpha_m: 0.297, mu: 5.480, delta: -0.015132, zeta: 8.1457, epsilon: 0.02184 },
];
/// Relative tolerance on c_k.
pub const C_K_REL_TOL: f64 = 1e-3;
/// Absolute tolerance on α_m, μ, δ, ζ, ε.
pub const C_K_COLUMN_TOL: f64 = 1e-3;

/// k = 9 sweep of B at the stationary point, α = 0.265: expected sign per r.
pub const K9_ALPHA: f64 = 0.265;
pub const K9_SWEEP: [(f64, bool); 3] = [(347.0, true), (347.5, true), (348.0, false)];

/// Upper curve of the pair-rate figure, Λ(α, 8, 169): the sign crossings.
pub const FIG1_K: u32 = 8;
pub const FIG1_R: f64 = 169.0;
pub const FIG1_CROSSINGS: [f64; 3] = [0.06, 0.26, 0.68];
/// Grid size of the emitted curve.
pub const FIG1_POINTS: usize = 750;

/// Root-location spot values of the w bound: (α, k, γ, w, printed digits),
/// where "printed digits" is the number of decimals quoted.
pub const W_SPOTS: [(f64, u32, f64, f64, i32); 3] = [
    (1.0 / 9.0, 9, 0.985, -0.0451, 4),
    (3.0 / 8.0, 9, 0.985, -0.000520265, 9),
    (0.99, 8, 2.0 / 3.0, -0.0181019, 7),
];

/// Rescaled satisfiability lower bound at k = 14 and the g_c figure.
pub const TAU_14: f64 = 0.9994711565304686;
pub const FIG2_K: u32 = 14;
pub const FIG2_POINTS: usize = 500;

/// Limit of c_k^α / (2^k ln 2) at α = 1/2.
pub fn asymptotic_ratio(alpha: f64) -> f64 {
    1.0 / (1.0 + alpha * (1.0 - alpha))
}
