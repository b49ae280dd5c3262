//! Discrete multilinear operator integrals and the trace formula for the second
//! derivative of `t ↦ ‖A + tB‖_p^p`.

use num_complex::Complex64;

use crate::divdiff::{divided_difference, SymbolFunction};
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, ComplexMatrix, SpectralDecomposition};
use crate::schatten::{schatten_norm_pow, PExponent};

/// Relative size of the imaginary part of a trace that is still accepted as round-off.
pub const TRACE_IMAG_TOL: f64 = 1e-9;

/// Anchors `A_0, …, A_n`, perturbations `B_1, …, B_n` and the symbol `f`.
#[derive(Debug, Clone)]
pub struct MoiProblem {
    anchors: Vec<ComplexMatrix>,
    perturbations: Vec<ComplexMatrix>,
    symbol: SymbolFunction,
}

impl MoiProblem {
    pub fn new(
        anchors: Vec<ComplexMatrix>,
        perturbations: Vec<ComplexMatrix>,
        symbol: SymbolFunction,
    ) -> Result<Self> {
        let order = perturbations.len();
        if order == 0 {
            return Err(Error::Precondition(
                "operator integral needs order n >= 1".into(),
            ));
        }
        if anchors.len() != order + 1 {
            return Err(Error::Precondition(format!(
                "order {order} needs {} anchors, got {}",
                order + 1,
                anchors.len()
            )));
        }
        let dim = anchors[0].rows();
        for m in anchors.iter().chain(&perturbations) {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            if m.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.rows(),
                });
            }
        }
        for a in &anchors {
            a.check_hermitian()?;
        }
        if symbol.max_order() < order {
            return Err(Error::OrderInsufficient {
                required: order,
                available: symbol.max_order(),
            });
        }
        Ok(MoiProblem {
            anchors,
            perturbations,
            symbol,
        })
    }

    pub fn order(&self) -> usize {
        self.perturbations.len()
    }

    pub fn dim(&self) -> usize {
        self.anchors[0].rows()
    }

    pub fn anchors(&self) -> &[ComplexMatrix] {
        &self.anchors
    }

    pub fn perturbations(&self) -> &[ComplexMatrix] {
        &self.perturbations
    }

    pub fn symbol(&self) -> &SymbolFunction {
        &self.symbol
    }
}

/// `Σ f^{[n]}(λ_{i_0}, …, λ_{i_n}) P_{i_0} B_1 P_{i_1} ⋯ B_n P_{i_n}` over all index tuples,
/// with spectral data from [`hermitian_eig`] at `group_tol`.
pub fn moi_apply(problem: &MoiProblem, group_tol: f64) -> Result<ComplexMatrix> {
    // identical anchors share one decomposition
    let mut spectra: Vec<SpectralDecomposition> = Vec::with_capacity(problem.anchors.len());
    let mut slot: Vec<usize> = Vec::with_capacity(problem.anchors.len());
    for (j, a) in problem.anchors.iter().enumerate() {
        match problem.anchors[..j].iter().position(|b| b == a) {
            Some(prev) => slot.push(slot[prev]),
            None => {
                spectra.push(hermitian_eig(a, group_tol)?);
                slot.push(spectra.len() - 1);
            }
        }
    }
    let levels: Vec<&SpectralDecomposition> = slot.iter().map(|&s| &spectra[s]).collect();

    let dim = problem.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    let mut nodes = Vec::with_capacity(levels.len());
    let first = levels[0];
    for (lambda, proj) in first.eigenvalues().iter().zip(first.projectors()) {
        nodes.push(*lambda);
        accumulate(problem, &levels, 1, proj.clone(), &mut nodes, &mut acc)?;
        nodes.pop();
    }
    Ok(acc)
}

fn accumulate(
    problem: &MoiProblem,
    levels: &[&SpectralDecomposition],
    depth: usize,
    prefix: ComplexMatrix,
    nodes: &mut Vec<f64>,
    acc: &mut ComplexMatrix,
) -> Result<()> {
    if depth == levels.len() {
        let coeff = divided_difference(&problem.symbol, nodes)?;
        *acc = acc.add(&prefix.scale_real(coeff))?;
        return Ok(());
    }
    let with_b = prefix.mul(&problem.perturbations[depth - 1])?;
    let level = levels[depth];
    for (lambda, proj) in level.eigenvalues().iter().zip(level.projectors()) {
        nodes.push(*lambda);
        let next = with_b.mul(proj)?;
        accumulate(problem, levels, depth + 1, next, nodes, acc)?;
        nodes.pop();
    }
    Ok(())
}

/// `d²/dt² ‖A + tB‖_p^p` at `t = 0` via `2·Tr T^{A,A,A}_{f^{[2]}}(B, B)` with `f = |x|^p`.
pub fn second_derivative_schatten(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<f64> {
    second_derivative_schatten_with_tol(a, b, p, crate::matrix::DEFAULT_GROUP_TOL)
}

pub fn second_derivative_schatten_with_tol(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    p: f64,
    group_tol: f64,
) -> Result<f64> {
    if !(p.is_finite() && p >= 2.0) {
        return Err(Error::Precondition(format!(
            "trace formula needs finite p >= 2, got {p}"
        )));
    }
    b.check_hermitian()?;
    let symbol = SymbolFunction::abs_pow(p)?;
    let problem = MoiProblem::new(
        vec![a.clone(), a.clone(), a.clone()],
        vec![b.clone(), b.clone()],
        symbol,
    )?;
    let trace: Complex64 = moi_apply(&problem, group_tol)?.trace();
    let value = 2.0 * trace.re;
    let residue = 2.0 * trace.im.abs();
    if residue > TRACE_IMAG_TOL * (1.0 + value.abs()) {
        return Err(Error::ImaginaryTrace { residue });
    }
    Ok(value)
}

/// Central second difference of `g(t) = ‖A + tB‖_p^p` with step `h`.
pub fn fd_second_derivative(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    p: PExponent,
    h: f64,
) -> Result<f64> {
    let p = p
        .as_finite()
        .ok_or_else(|| Error::Precondition("finite-difference oracle needs finite p".into()))?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Precondition(format!(
            "step must be positive, got {h}"
        )));
    }
    let g = |t: f64| -> Result<f64> { Ok(schatten_norm_pow(&a.add_scaled(t, b)?, p)) };
    Ok((g(h)? - 2.0 * g(0.0)? + g(-h)?) / (h * h))
}

/// `10⁻³·(1 + ‖A‖)/(1 + ‖B‖)` in operator norm.
pub fn default_fd_step(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    1e-3 * (1.0 + a.operator_norm()) / (1.0 + b.operator_norm())
}
