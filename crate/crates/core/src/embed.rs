//! Explicit isometric embeddings between ℓ_p and Schatten spaces, a sampling isometry
//! checker, and the cubature dimension bound Λ(m, p).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::schatten::{schatten_norm, vector_pnorm, PExponent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// ℓ_p^n
    Vector,
    /// S_p^n, the n×n matrices
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// ℓ_p^n(𝕂) or S_p^n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub dim: usize,
    pub exponent: PExponent,
    pub field: Field,
}

impl SpaceSpec {
    pub fn vector(dim: usize, exponent: PExponent, field: Field) -> Self {
        SpaceSpec {
            kind: SpaceKind::Vector,
            dim,
            exponent,
            field,
        }
    }

    pub fn matrix(dim: usize, exponent: PExponent) -> Self {
        SpaceSpec {
            kind: SpaceKind::Matrix,
            dim,
            exponent,
            field: Field::Complex,
        }
    }

    /// Number of basis vectors (matrix spaces are indexed row-major).
    pub fn basis_len(&self) -> usize {
        match self.kind {
            SpaceKind::Vector => self.dim,
            SpaceKind::Matrix => self.dim * self.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Precondition(
                "space dimension must be positive".into(),
            ));
        }
        if self.kind == SpaceKind::Matrix && self.field != Field::Complex {
            return Err(Error::Precondition("matrix spaces are complex".into()));
        }
        Ok(())
    }

    pub fn zero(&self) -> Element {
        match self.kind {
            SpaceKind::Vector => Element::Vector(vec![Complex64::new(0.0, 0.0); self.dim]),
            SpaceKind::Matrix => Element::Matrix(ComplexMatrix::zeros(self.dim, self.dim)),
        }
    }

    /// `k`-th basis element.
    pub fn basis(&self, k: usize) -> Element {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.basis_len()];
        coeffs[k] = Complex64::new(1.0, 0.0);
        self.from_coefficients(&coeffs)
    }

    pub fn from_coefficients(&self, coeffs: &[Complex64]) -> Element {
        match self.kind {
            SpaceKind::Vector => Element::Vector(coeffs.to_vec()),
            SpaceKind::Matrix => Element::Matrix(
                ComplexMatrix::from_row_major(self.dim, self.dim, coeffs)
                    .expect("coefficient count matches"),
            ),
        }
    }

    /// Fails unless `x` has this space's shape (and is real for real spaces).
    pub fn check(&self, x: &Element) -> Result<()> {
        match (self.kind, x) {
            (SpaceKind::Vector, Element::Vector(v)) => {
                if v.len() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: v.len(),
                    });
                }
                if self.field == Field::Real && v.iter().any(|z| z.im != 0.0) {
                    return Err(Error::Precondition(
                        "element of a real space has imaginary part".into(),
                    ));
                }
                if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::Precondition("element has non-finite entries".into()));
                }
                Ok(())
            }
            (SpaceKind::Matrix, Element::Matrix(m)) => {
                if m.rows() != self.dim || m.cols() != self.dim {
                    return Err(Error::Shape(format!(
                        "expected {0}x{0} matrix, got {1}x{2}",
                        self.dim,
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok(())
            }
            _ => Err(Error::Shape("element kind does not match space".into())),
        }
    }

    pub fn norm(&self, x: &Element) -> Result<f64> {
        self.check(x)?;
        Ok(x.norm(self.exponent))
    }
}

/// Vector or matrix element of a [`SpaceSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Vector(Vec<Complex64>),
    Matrix(ComplexMatrix),
}

impl Element {
    pub fn real_vector(v: &[f64]) -> Self {
        Element::Vector(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Vector entries, or matrix entries in row-major order.
    pub fn coefficients(&self) -> Vec<Complex64> {
        match self {
            Element::Vector(v) => v.clone(),
            Element::Matrix(m) => m.row_major(),
        }
    }

    /// ℓ_p norm for vectors, Schatten norm for matrices.
    pub fn norm(&self, p: PExponent) -> f64 {
        match self {
            Element::Vector(v) => vector_pnorm(v, p),
            Element::Matrix(m) => schatten_norm(m, p),
        }
    }

    pub fn as_matrix(&self) -> Option<&ComplexMatrix> {
        match self {
            Element::Matrix(m) => Some(m),
            Element::Vector(_) => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[Complex64]> {
        match self {
            Element::Vector(v) => Some(v),
            Element::Matrix(_) => None,
        }
    }
}

/// Linear map stored by the images of the domain basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMap {
    domain: SpaceSpec,
    codomain: SpaceSpec,
    basis_images: Vec<Element>,
}

impl EmbeddingMap {
    pub fn new(domain: SpaceSpec, codomain: SpaceSpec, basis_images: Vec<Element>) -> Result<Self> {
        domain.validate()?;
        codomain.validate()?;
        if basis_images.len() != domain.basis_len() {
            return Err(Error::DimensionMismatch {
                expected: domain.basis_len(),
                found: basis_images.len(),
            });
        }
        for image in &basis_images {
            codomain.check(image)?;
        }
        Ok(EmbeddingMap {
            domain,
            codomain,
            basis_images,
        })
    }

    pub fn domain(&self) -> &SpaceSpec {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceSpec {
        &self.codomain
    }

    pub fn basis_images(&self) -> &[Element] {
        &self.basis_images
    }

    /// `Σ x_k · T(e_k)`.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.domain.check(x)?;
        let coeffs = x.coefficients();
        let mut acc = vec![Complex64::new(0.0, 0.0); self.codomain.basis_len()];
        for (c, image) in coeffs.iter().zip(&self.basis_images) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (slot, z) in acc.iter_mut().zip(image.coefficients()) {
                *slot += c * z;
            }
        }
        Ok(self.codomain.from_coefficients(&acc))
    }

    /// `outer ∘ inner`, built from the images of `inner`'s basis.
    pub fn compose(outer: &EmbeddingMap, inner: &EmbeddingMap) -> Result<EmbeddingMap> {
        let shapes_match = outer.domain.kind == inner.codomain.kind
            && outer.domain.dim == inner.codomain.dim
            && outer.domain.field == inner.codomain.field;
        if !shapes_match {
            return Err(Error::Shape(
                "inner codomain does not match outer domain".into(),
            ));
        }
        let images = inner
            .basis_images
            .iter()
            .map(|y| outer.apply(y))
            .collect::<Result<Vec<_>>>()?;
        EmbeddingMap::new(inner.domain, outer.codomain, images)
    }

    /// Same basis images, with the domain and codomain norms replaced.
    pub fn with_exponents(&self, domain: PExponent, codomain: PExponent) -> EmbeddingMap {
        let mut out = self.clone();
        out.domain.exponent = domain;
        out.codomain.exponent = codomain;
        out
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// ℓ_p^m(ℂ) → S_p^m, `e_k ↦ E_{kk}`.
pub fn diag_embedding(m: usize, p: PExponent) -> Result<EmbeddingMap> {
    positive("m", m)?;
    let images = (0..m)
        .map(|k| Element::Matrix(ComplexMatrix::unit(m, m, k, k)))
        .collect();
    EmbeddingMap::new(
        SpaceSpec::vector(m, p, Field::Complex),
        SpaceSpec::matrix(m, p),
        images,
    )
}

/// S_p^m → S_p^n by top-left block placement.
pub fn corner_embedding(m: usize, n: usize, p: PExponent) -> Result<EmbeddingMap> {
    positive("m", m)?;
    if m > n {
        return Err(Error::Precondition(format!(
            "corner embedding needs m <= n, got m={m}, n={n}"
        )));
    }
    let images = (0..m * m)
        .map(|k| Element::Matrix(ComplexMatrix::unit(n, n, k / m, k % m)))
        .collect();
    EmbeddingMap::new(SpaceSpec::matrix(m, p), SpaceSpec::matrix(n, p), images)
}

/// ℓ_1²(ℝ) → ℓ_∞^n(ℝ), `(x, y) ↦ (x − y, x + y, 0, …, 0)`.
pub fn sum_diff_embedding(n: usize) -> Result<EmbeddingMap> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "sum/difference embedding needs n >= 2, got {n}"
        )));
    }
    let mut e1 = vec![0.0; n];
    let mut e2 = vec![0.0; n];
    e1[0] = 1.0;
    e1[1] = 1.0;
    e2[0] = -1.0;
    e2[1] = 1.0;
    EmbeddingMap::new(
        SpaceSpec::vector(2, PExponent::Finite(1.0), Field::Real),
        SpaceSpec::vector(n, PExponent::Infinity, Field::Real),
        vec![Element::real_vector(&e1), Element::real_vector(&e2)],
    )
}

/// ℓ_2^{m²}(ℂ) → S_p^{m²}, `e_k ↦ E_{1k}`: the image is rank one with singular value ‖a‖₂.
pub fn first_row_embedding(m: usize, p: PExponent) -> Result<EmbeddingMap> {
    positive("m", m)?;
    let n = m * m;
    let images = (0..n)
        .map(|k| Element::Matrix(ComplexMatrix::unit(n, n, 0, k)))
        .collect();
    EmbeddingMap::new(
        SpaceSpec::vector(n, PExponent::Finite(2.0), Field::Complex),
        SpaceSpec::matrix(n, p),
        images,
    )
}

/// S_2^m → ℓ_2^{m²}(ℂ), row-major flattening.
pub fn vec_embedding(m: usize) -> Result<EmbeddingMap> {
    positive("m", m)?;
    let n = m * m;
    let codomain = SpaceSpec::vector(n, PExponent::Finite(2.0), Field::Complex);
    let images = (0..n).map(|k| codomain.basis(k)).collect();
    EmbeddingMap::new(
        SpaceSpec::matrix(m, PExponent::Finite(2.0)),
        codomain,
        images,
    )
}

/// S_2^m → S_p^{m²} as first-row ∘ vec.
pub fn s2_to_sp_embedding(m: usize, p: PExponent) -> Result<EmbeddingMap> {
    EmbeddingMap::compose(&first_row_embedding(m, p)?, &vec_embedding(m)?)
}

/// ℓ_2²(ℝ) → ℓ_4³(ℝ): `u ↦ c·(⟨u, v_0⟩, ⟨u, v_1⟩, ⟨u, v_2⟩)` with `v_k` at angles `kπ/3`
/// and `c = (8/9)^{1/4}`, using `Σ_k cos⁴(θ − kπ/3) = 9/8`.
pub fn cubature_embedding_2_4_3() -> EmbeddingMap {
    let c = (8.0f64 / 9.0).powf(0.25);
    let angles: Vec<f64> = (0..3)
        .map(|k| k as f64 * std::f64::consts::PI / 3.0)
        .collect();
    let e1: Vec<f64> = angles.iter().map(|t| c * t.cos()).collect();
    let e2: Vec<f64> = angles.iter().map(|t| c * t.sin()).collect();
    EmbeddingMap::new(
        SpaceSpec::vector(2, PExponent::Finite(2.0), Field::Real),
        SpaceSpec::vector(3, PExponent::Finite(4.0), Field::Real),
        vec![Element::real_vector(&e1), Element::real_vector(&e2)],
    )
    .expect("fixed construction is well formed")
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::Precondition(format!("{name} must be >= 1")));
    }
    Ok(())
}

/// Outcome of [`verify_isometry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryVerdict {
    pub max_relative_residual: f64,
    pub pass: bool,
    /// Total elements compared, probes included.
    pub samples_checked: usize,
}

/// Compares `‖x‖` with `‖T x‖` on the basis vectors, the all-ones element and `sample_count`
/// seeded Gaussian elements. The residual is `|‖x‖ − ‖Tx‖| / ‖x‖`.
pub fn verify_isometry(
    map: &EmbeddingMap,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<IsometryVerdict> {
    if sample_count == 0 {
        return Err(Error::Precondition("sample_count must be >= 1".into()));
    }
    let domain = map.domain();
    let len = domain.basis_len();
    let mut probes: Vec<Element> = (0..len).map(|k| domain.basis(k)).collect();
    probes.push(domain.from_coefficients(&vec![one(); len]));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_count {
        let coeffs: Vec<Complex64> = (0..len)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = match domain.field {
                    Field::Real => 0.0,
                    Field::Complex => StandardNormal.sample(&mut rng),
                };
                Complex64::new(re, im)
            })
            .collect();
        probes.push(domain.from_coefficients(&coeffs));
    }

    let mut worst = 0.0_f64;
    for x in &probes {
        let lhs = domain.norm(x)?;
        let rhs = map.codomain().norm(&map.apply(x)?)?;
        let residual = if lhs > 0.0 {
            (lhs - rhs).abs() / lhs
        } else {
            rhs
        };
        worst = worst.max(residual);
    }
    Ok(IsometryVerdict {
        max_relative_residual: worst,
        pass: worst <= tol,
        samples_checked: probes.len(),
    })
}

/// Scalar algebra for [`lambda_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisionAlgebra {
    Real,
    Complex,
    Quaternion,
}

fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc·(n−k+i) is divisible by i after each step
        acc = acc
            .checked_mul(n as u128 - k as u128 + i)
            .ok_or_else(|| Error::Arithmetic("binomial coefficient overflows u128".into()))?
            / i;
    }
    Ok(acc)
}

/// Upper bound Λ(m, p) on `n` for which ℓ_2^m(𝕂) ↪ ℓ_p^n(𝕂), `p` even. Integer arithmetic only.
pub fn lambda_bound(m: u64, p: u64, algebra: DivisionAlgebra) -> Result<u128> {
    if m < 2 {
        return Err(Error::Precondition(format!(
            "Λ(m, p) needs m >= 2, got {m}"
        )));
    }
    if p == 0 || !p.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "Λ(m, p) needs even p > 0, got {p}"
        )));
    }
    let half = p / 2;
    match algebra {
        DivisionAlgebra::Real => binomial(m + p - 1, m - 1),
        DivisionAlgebra::Complex => {
            let b = binomial(m + half - 1, m - 1)?;
            b.checked_mul(b)
                .ok_or_else(|| Error::Arithmetic("Λ overflows u128".into()))
        }
        DivisionAlgebra::Quaternion => {
            let num = binomial(2 * m + half - 2, 2 * m - 2)?
                .checked_mul(binomial(2 * m + half - 1, 2 * m - 2)?)
                .ok_or_else(|| Error::Arithmetic("Λ overflows u128".into()))?;
            let den = (2 * m - 1) as u128;
            if num % den != 0 {
                return Err(Error::Arithmetic(format!(
                    "quaternionic Λ({m}, {p}) is not an integer: {num}/{den}"
                )));
            }
            Ok(num / den)
        }
    }
}
