//! Numerical checks of a candidate isometry `T: ℓ_q²(ℂ) → S_p^n`.
//!
//! The candidate is doubled into a Hermitian pair `A = J(e_1)`, `B = J(e_2)` on `ℂ^n ⊕ ℂ^n`.
//! If `T` were isometric then `(1 + |t|^q)^{p/q} = ‖A + tB‖_p^p` for every real `t`, and the
//! second derivative of the right-hand side at `t = 0` (computed by the trace formula) would
//! have to match the behaviour of `(p/q)·t^{q−2}` as `t → 0⁺`. Each check that fails is
//! numerical evidence that `T` is not an isometry; passing them proves nothing.

use num_complex::Complex64;

use crate::embed::{EmbeddingMap, SpaceKind};
use crate::error::{Error, ErrorKind, Result};
use crate::matrix::{hermitian_eigenvalues, ComplexMatrix};
use crate::moi::second_derivative_schatten;
use crate::schatten::{schatten_norm, schatten_norm_pow, PExponent};

/// Default verdict tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Symmetric probe grid, log-spaced near zero.
pub const DEFAULT_T_GRID: [f64; 17] = [
    -2.0, -1.0, -0.5, -0.25, -0.1, -1e-2, -1e-3, -1e-4, 0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.5, 1.0,
    2.0,
];

/// Tie-break weight of the linear predictor in trajectory matching.
const PREDICTOR_WEIGHT: f64 = 1e-6;
/// Absolute eigensolver error allowed on top of the Lipschitz bound.
const LIPSCHITZ_SLACK: f64 = 1e-9;

/// Hermitian pair `(A, B)` with the exponents of the candidate it came from.
#[derive(Debug, Clone)]
pub struct CandidatePair {
    a: ComplexMatrix,
    b: ComplexMatrix,
    q: f64,
    p: PExponent,
}

impl CandidatePair {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, q: f64, p: PExponent) -> Result<Self> {
        a.check_hermitian()?;
        b.check_hermitian()?;
        if a.rows() != b.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: b.rows(),
            });
        }
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidExponent(format!(
                "q must be finite and positive, got {q}"
            )));
        }
        Ok(CandidatePair { a, b, q, p })
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    /// `A + tB`.
    pub fn pencil(&self, t: f64) -> ComplexMatrix {
        self.a
            .add_scaled(t, &self.b)
            .expect("pair shares one dimension")
    }
}

/// `J(a) = 2^{−1/p}·[[0, a_1T(e_1) + a_2T(e_2)], [a_1T(e_1)* + a_2T(e_2)*, 0]]` for
/// `a = e_1, e_2`.
pub fn double_map(t: &EmbeddingMap) -> Result<CandidatePair> {
    let (dom, cod) = (t.domain(), t.codomain());
    if dom.kind != SpaceKind::Vector || dom.dim != 2 {
        return Err(Error::Precondition(
            "doubling needs a map with domain ℓ_q²".into(),
        ));
    }
    if cod.kind != SpaceKind::Matrix {
        return Err(Error::Precondition(
            "doubling needs a Schatten-class codomain".into(),
        ));
    }
    let p = cod
        .exponent
        .as_finite()
        .ok_or_else(|| Error::Precondition("doubling is undefined for p = ∞".into()))?;
    let q = dom
        .exponent
        .as_finite()
        .ok_or_else(|| Error::Precondition("doubling needs finite q".into()))?;
    let scale = 2f64.powf(-1.0 / p);
    let image = |k: usize| {
        t.basis_images()[k]
            .as_matrix()
            .expect("matrix codomain")
            .hermitian_dilation(scale)
    };
    CandidatePair::new(image(0), image(1), q, cod.exponent)
}

/// `J((a_1, a_2)) = a_1 A + a_2 B`.
pub fn doubled_image(pair: &CandidatePair, a1: Complex64, a2: Complex64) -> ComplexMatrix {
    pair.a
        .scale(a1)
        .add(&pair.b.scale(a2))
        .expect("pair shares one dimension")
}

/// One grid point of the scalar identity comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub t: f64,
    pub target: f64,
    pub actual: f64,
    pub residual: f64,
}

/// Compares `(1 + |t|^q)^{p/q}` with `‖A + tB‖_p^p` (norm form `(1 + |t|^q)^{1/q}` vs
/// `‖A + tB‖` for `p = ∞`); residual `|target − actual| / (1 + |target|)`.
pub fn scalar_identity_residual(pair: &CandidatePair, t_grid: &[f64]) -> Vec<ResidualRow> {
    let q = pair.q;
    t_grid
        .iter()
        .map(|&t| {
            let base = 1.0 + t.abs().powf(q);
            let m = pair.pencil(t);
            let (target, actual) = match pair.p {
                PExponent::Finite(p) => (base.powf(p / q), schatten_norm_pow(&m, p)),
                PExponent::Infinity => (base.powf(1.0 / q), schatten_norm(&m, PExponent::Infinity)),
            };
            ResidualRow {
                t,
                target,
                actual,
                residual: (target - actual).abs() / (1.0 + target.abs()),
            }
        })
        .collect()
}

/// Eigenvalue trajectories of `A + tB` over a strictly increasing grid.
///
/// Consecutive spectra are matched by the assignment of least total displacement; among
/// equal-cost assignments the one closest to a linear extrapolation of each trajectory wins,
/// so crossing eigenvalues keep their identity. Moves longer than `‖B‖·Δt` are excluded,
/// which the sorted matching always satisfies. Returns one vector per trajectory.
pub fn eigenvalue_curves(pair: &CandidatePair, t_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    if t_grid
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::Precondition(
            "t grid must be strictly increasing".into(),
        ));
    }
    let n = pair.a.rows();
    let lipschitz = pair.b.operator_norm();
    let mut curves: Vec<Vec<f64>> = vec![Vec::with_capacity(t_grid.len()); n];
    for (step, &t) in t_grid.iter().enumerate() {
        let values = hermitian_eigenvalues(&pair.pencil(t))?;
        if step == 0 {
            for (curve, v) in curves.iter_mut().zip(values) {
                curve.push(v);
            }
            continue;
        }
        let cost: Vec<Vec<f64>> = curves
            .iter()
            .map(|curve| {
                let prev = curve[step - 1];
                let predicted = if step >= 2 {
                    let slope = (prev - curve[step - 2]) / (t_grid[step - 1] - t_grid[step - 2]);
                    prev + slope * (t - t_grid[step - 1])
                } else {
                    prev
                };
                let reach =
                    lipschitz * (t - t_grid[step - 1]) + LIPSCHITZ_SLACK * (1.0 + prev.abs());
                values
                    .iter()
                    .map(|&v| {
                        let moved = (v - prev).abs();
                        if moved > reach {
                            f64::INFINITY
                        } else {
                            moved + PREDICTOR_WEIGHT * (v - predicted).abs()
                        }
                    })
                    .collect()
            })
            .collect();
        let assignment = min_cost_assignment(&cost);
        for (curve, col) in curves.iter_mut().zip(assignment) {
            curve.push(values[col]);
        }
    }
    Ok(curves)
}

/// Hungarian algorithm on a square cost matrix; returns the column assigned to each row.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based potentials formulation; column 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let i0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = col0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if owner[j] > 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Second derivative at `t = 0` expected from the target function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum D2Target {
    Value(f64),
    /// `(p/q)·t^{q−2}` blows up as `t → 0⁺` for `q < 2`.
    Diverges,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2Comparison {
    pub target: D2Target,
    pub actual: f64,
    pub consistent: bool,
}

/// Compares the trace-formula second derivative of `‖A + tB‖_p^p` at 0 with the target:
/// `0` for `q > 2`, `p` for `q = 2` (from `(1 + t²)^{p/2}`), divergent for `q < 2`.
pub fn second_derivative_obstruction(pair: &CandidatePair, tol: f64) -> Result<D2Comparison> {
    let p = match pair.p {
        PExponent::Finite(p) if p >= 2.0 => p,
        _ => {
            return Err(Error::Precondition(format!(
                "second-derivative test needs finite p >= 2, got {}",
                pair.p
            )))
        }
    };
    let actual = second_derivative_schatten(&pair.a, &pair.b, p)?;
    let q = pair.q;
    let (target, consistent) = if q < 2.0 {
        (D2Target::Diverges, false)
    } else if q > 2.0 {
        (D2Target::Value(0.0), actual.abs() <= tol)
    } else {
        (D2Target::Value(p), (actual - p).abs() <= tol * (1.0 + p))
    };
    Ok(D2Comparison {
        target,
        actual,
        consistent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    FailsScalarIdentity,
    FailsD2Divergence,
    FailsD2Nonzero,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::FailsScalarIdentity => "FAILS_SCALAR_IDENTITY",
            Verdict::FailsD2Divergence => "FAILS_D2_DIVERGENCE",
            Verdict::FailsD2Nonzero => "FAILS_D2_NONZERO",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Verdict::Consistent,
            Verdict::FailsScalarIdentity,
            Verdict::FailsD2Divergence,
            Verdict::FailsD2Nonzero,
            Verdict::Inconclusive,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
    }
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub t_grid: Vec<f64>,
    pub tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            t_grid: DEFAULT_T_GRID.to_vec(),
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub q: f64,
    pub p: PExponent,
    pub tol: f64,
    /// Sorted by `t`.
    pub residual_profile: Vec<ResidualRow>,
    pub max_residual: f64,
    /// `None` when the derivative test does not apply or failed numerically.
    pub d2_actual: Option<f64>,
    pub d2_target: Option<D2Target>,
    pub verdict: Verdict,
}

/// Runs doubling, the scalar identity on the grid and, for finite `p ≥ 2`, the
/// second-derivative test.
///
/// Verdict order: for `1 < q < 2` with finite `p ≥ 2` the target's second derivative
/// diverges whatever the candidate, so `FAILS_D2_DIVERGENCE` is decided first. Otherwise a
/// scalar residual above `tol` gives `FAILS_SCALAR_IDENTITY`, then the derivative test decides,
/// and a numerical failure of the derivative test gives `INCONCLUSIVE`.
pub fn check_candidate(t: &EmbeddingMap, config: &CheckConfig) -> Result<ObstructionReport> {
    if config.tol.is_nan() || config.tol < 0.0 {
        return Err(Error::Precondition("tolerance must be non-negative".into()));
    }
    if config.t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Precondition("t grid must be finite".into()));
    }
    let pair = double_map(t)?;
    let mut grid = config.t_grid.clone();
    grid.sort_by(f64::total_cmp);

    let residual_profile = scalar_identity_residual(&pair, &grid);
    let max_residual = residual_profile
        .iter()
        .map(|r| r.residual)
        .fold(0.0_f64, |m, r| if r.is_nan() { f64::NAN } else { m.max(r) });

    let q = pair.q;
    let derivative_applies = matches!(pair.p, PExponent::Finite(p) if p >= 2.0);
    let d2 = if derivative_applies {
        match second_derivative_obstruction(&pair, config.tol) {
            Ok(c) => Some(Ok(c)),
            Err(e) if e.kind() == ErrorKind::Numerical => Some(Err(e)),
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let scalar_ok = max_residual <= config.tol;
    let verdict = if derivative_applies && q > 1.0 && q < 2.0 {
        Verdict::FailsD2Divergence
    } else if !scalar_ok {
        Verdict::FailsScalarIdentity
    } else {
        match &d2 {
            None => Verdict::Consistent,
            Some(Err(_)) => Verdict::Inconclusive,
            Some(Ok(c)) if c.consistent => Verdict::Consistent,
            Some(Ok(c)) => match c.target {
                D2Target::Diverges => Verdict::FailsD2Divergence,
                D2Target::Value(_) => Verdict::FailsD2Nonzero,
            },
        }
    };

    let (d2_actual, d2_target) = match d2 {
        Some(Ok(c)) => (Some(c.actual), Some(c.target)),
        _ => (None, None),
    };
    Ok(ObstructionReport {
        q,
        p: pair.p,
        tol: config.tol,
        residual_profile,
        max_residual,
        d2_actual,
        d2_target,
        verdict,
    })
}
