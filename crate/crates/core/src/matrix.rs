//! Dense complex matrices, Hermitian spectral decompositions and singular values.
//!
//! All routines are pure functions of their inputs. The eigen and singular value
//! solvers are nalgebra's; eigenvalue grouping and spectral projectors are built here.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::divdiff::SymbolFunction;
use crate::error::{Error, Result};

/// Default eigenvalue grouping tolerance, relative to `1 + ‖A‖_F`.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;

/// Relative Hermiticity tolerance accepted by the spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-12;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// Dense complex matrix with finite entries and at least one row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} matrix has no entries")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_major(rows, cols, &entries)
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        for r in 0..inner.nrows() {
            for c in 0..inner.ncols() {
                let z = inner[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(ComplexMatrix(inner))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    /// Diagonal matrix with the given entries.
    pub fn diag(entries: &[Complex64]) -> Self {
        assert!(!entries.is_empty(), "diagonal must be non-empty");
        let n = entries.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, &z) in entries.iter().enumerate() {
            m[(k, k)] = z;
        }
        ComplexMatrix(m)
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let entries: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&entries)
    }

    /// Matrix unit `E_{ij}` of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.0[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diagonal().iter().sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix(&self.0 - &other.0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                found: other.rows(),
            });
        }
        Ok(ComplexMatrix(&self.0 * &other.0))
    }

    /// `self + t·other`.
    pub fn add_scaled(&self, t: f64, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix(&self.0 + &other.0 * Complex64::new(t, 0.0)))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }

    /// `‖A − A*‖_F`; only meaningful for square matrices.
    pub fn hermitian_defect(&self) -> f64 {
        (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Fails unless the matrix is square and Hermitian within `HERMITIAN_TOL·(1+‖A‖_F)`.
    pub fn check_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let tolerance = HERMITIAN_TOL * (1.0 + self.frobenius_norm());
        let asymmetry = self.hermitian_defect();
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(())
    }

    /// `(A + A*)/2`.
    pub fn symmetrized(&self) -> Self {
        ComplexMatrix((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Block anti-diagonal Hermitian dilation `[[0, X], [X*, 0]]` scaled by `c`.
    pub fn hermitian_dilation(&self, c: f64) -> Self {
        let (r, k) = (self.rows(), self.cols());
        let n = r + k;
        let mut m = DMatrix::zeros(n, n);
        let scaled = &self.0 * Complex64::new(c, 0.0);
        m.view_mut((0, r), (r, k)).copy_from(&scaled);
        m.view_mut((r, 0), (k, r)).copy_from(&scaled.adjoint());
        ComplexMatrix(m)
    }
}

/// Grouped spectral data of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    dim: usize,
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    multiplicities: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Σ g(λ_i) P_i`.
    pub fn apply_fn(&self, mut g: impl FnMut(f64) -> Result<f64>) -> Result<ComplexMatrix> {
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for (lambda, proj) in self.eigenvalues.iter().zip(&self.projectors) {
            let value = g(*lambda)?;
            acc += proj.as_dmatrix() * Complex64::new(value, 0.0);
        }
        ComplexMatrix::from_dmatrix(acc).map_err(|_| {
            Error::Arithmetic("functional calculus produced a non-finite entry".into())
        })
    }

    /// `Σ λ_i P_i`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(Ok).expect("eigenvalues are finite")
    }
}

/// Hermitian eigendecomposition with eigenvalue clustering.
///
/// Raw eigenvalues closer than `group_tol·(1+‖A‖_F)` are chained into one cluster whose
/// representative is the cluster mean; its projector sums the rank-one eigenprojectors.
pub fn hermitian_eig(a: &ComplexMatrix, group_tol: f64) -> Result<SpectralDecomposition> {
    if !(group_tol >= 0.0 && group_tol.is_finite()) {
        return Err(Error::Precondition(format!(
            "group tolerance must be finite and non-negative, got {group_tol}"
        )));
    }
    a.check_hermitian()?;
    let n = a.rows();
    let sym = a.symmetrized();
    let eig = sym
        .0
        .clone()
        .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let threshold = group_tol * (1.0 + a.frobenius_norm());
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(cluster)
                if eig.eigenvalues[*cluster.last().unwrap()] - eig.eigenvalues[idx]
                    <= threshold =>
            {
                cluster.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let mean = cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let mut proj = DMatrix::<Complex64>::zeros(n, n);
        for &i in cluster {
            let v = eig.eigenvectors.column(i);
            proj += v * v.adjoint();
        }
        eigenvalues.push(mean);
        projectors.push(ComplexMatrix(proj));
        multiplicities.push(cluster.len());
    }

    Ok(SpectralDecomposition {
        dim: n,
        eigenvalues,
        projectors,
        multiplicities,
    })
}

/// Eigenvalues of a Hermitian matrix with multiplicity, descending, without grouping.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.check_hermitian()?;
    let mut values: Vec<f64> = a
        .symmetrized()
        .0
        .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::NoConvergence)?
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Singular values in descending order; `min(rows, cols)` of them.
pub fn singular_values(t: &ComplexMatrix) -> Vec<f64> {
    let svd = t.0.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().map(|x| x.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `f(A) = Σ f(λ_i) P_i` with the default grouping tolerance.
pub fn function_calculus(a: &ComplexMatrix, f: &SymbolFunction) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(a, DEFAULT_GROUP_TOL)?;
    spec.apply_fn(|x| f.derivative(0, x))
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary from the QR factorisation of a seeded complex Ginibre matrix.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    assert!(dim > 0, "unitary dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = DMatrix::from_fn(dim, dim, |_, _| complex_normal(&mut rng));
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    ComplexMatrix(q)
}

/// Seeded matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix(DMatrix::from_fn(rows, cols, |_, _| {
        complex_normal(&mut rng)
    }))
}

/// Seeded Hermitian matrix `(G + G*)/2` with `G` complex Gaussian.
pub fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    random_complex(dim, dim, seed).symmetrized()
}
