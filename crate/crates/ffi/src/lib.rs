//! C ABI over `schatten-core`.
//!
//! Every fallible function returns a [`SchattenStatus`] and writes results through out
//! pointers. Matrices and embedding maps are opaque heap handles released with their `_free`
//! function. After a non-OK status, [`schatten_last_error_message`] describes the failure on
//! the calling thread. Infinite exponents are passed as `INFINITY`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use schatten_core::divdiff::{divided_difference, SymbolFunction};
use schatten_core::embed::{
    corner_embedding, cubature_embedding_2_4_3, diag_embedding, first_row_embedding, lambda_bound,
    s2_to_sp_embedding, sum_diff_embedding, vec_embedding, verify_isometry, DivisionAlgebra,
    EmbeddingMap,
};
use schatten_core::matrix::{singular_values, ComplexMatrix};
use schatten_core::moi::{fd_second_derivative, second_derivative_schatten};
use schatten_core::num_complex::Complex64;
use schatten_core::obstruct::{check_candidate, CheckConfig, Verdict};
use schatten_core::schatten::{schatten_norm, PExponent};
use schatten_core::{Error, ErrorKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Precondition = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenAlgebra {
    Real = 0,
    Complex = 1,
    Quaternion = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenMapKind {
    Diag = 0,
    Corner = 1,
    SumDiff = 2,
    FirstRow = 3,
    Vec = 4,
    S2Sp = 5,
    Cubature243 = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenVerdict {
    Consistent = 0,
    FailsScalarIdentity = 1,
    FailsD2Divergence = 2,
    FailsD2Nonzero = 3,
    Inconclusive = 4,
}

/// Opaque complex matrix.
pub struct SchattenMatrix {
    inner: ComplexMatrix,
}

/// Opaque linear map between ℓ_p / Schatten spaces.
pub struct SchattenEmbedding {
    inner: EmbeddingMap,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(SchattenStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Precondition => SchattenStatus::Precondition,
            ErrorKind::Numerical => SchattenStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SchattenStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SchattenStatus::InvalidArgument, msg.into())
}

/// Runs `body`, converting errors and panics into a status plus last-error message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SchattenStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            SchattenStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SchattenStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn matrix<'a>(m: *const SchattenMatrix, what: &str) -> Result<&'a ComplexMatrix, Failure> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null(what))
}

fn exponent(p: f64) -> Result<PExponent, Failure> {
    Ok(PExponent::from_f64(p)?)
}

/// Message for the last failed call on this thread; empty after a successful call.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn schatten_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a `rows × cols` matrix from row-major real parts and optional imaginary parts
/// (`im` may be null).
///
/// # Safety
/// `re` (and `im` when non-null) must point to `rows * cols` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_matrix_new(
    rows: usize,
    cols: usize,
    re: *const f64,
    im: *const f64,
    out_matrix: *mut *mut SchattenMatrix,
) -> SchattenStatus {
    guard(|| {
        let dst = out(out_matrix, "out_matrix")?;
        *dst = ptr::null_mut();
        let len = rows
            .checked_mul(cols)
            .filter(|&l| l > 0)
            .ok_or_else(|| invalid("rows and cols must be positive"))?;
        let re = slice(re, len, "re")?;
        let im = if im.is_null() {
            None
        } else {
            Some(slice(im, len, "im")?)
        };
        let entries: Vec<Complex64> = (0..len)
            .map(|k| Complex64::new(re[k], im.map_or(0.0, |im| im[k])))
            .collect();
        let inner = ComplexMatrix::from_row_major(rows, cols, &entries)?;
        *dst = Box::into_raw(Box::new(SchattenMatrix { inner }));
        Ok(())
    })
}

/// # Safety
/// `matrix` must be null or a handle from `schatten_matrix_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn schatten_matrix_free(matrix: *mut SchattenMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// # Safety
/// `matrix` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn schatten_matrix_rows(matrix: *const SchattenMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.inner.rows())
}

/// # Safety
/// `matrix` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn schatten_matrix_cols(matrix: *const SchattenMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.inner.cols())
}

/// # Safety
/// `matrix` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_matrix_get(
    matrix: *const SchattenMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> SchattenStatus {
    guard(|| {
        let m = matrix_ref(matrix)?;
        if row >= m.rows() || col >= m.cols() {
            return Err(invalid(format!("index ({row}, {col}) out of bounds")));
        }
        let z = m.get(row, col);
        *out(re, "re")? = z.re;
        *out(im, "im")? = z.im;
        Ok(())
    })
}

unsafe fn matrix_ref<'a>(m: *const SchattenMatrix) -> Result<&'a ComplexMatrix, Failure> {
    matrix(m, "matrix")
}

/// Schatten p-norm; `p = INFINITY` gives the operator norm.
///
/// # Safety
/// `matrix` must be a live handle; `out_norm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_norm_p(
    matrix: *const SchattenMatrix,
    p: f64,
    out_norm: *mut f64,
) -> SchattenStatus {
    guard(|| {
        let m = matrix_ref(matrix)?;
        let p = exponent(p)?;
        *out(out_norm, "out_norm")? = schatten_norm(m, p);
        Ok(())
    })
}

/// Writes the `min(rows, cols)` singular values in descending order. `*out_len` receives the
/// count; with a buffer shorter than that, nothing is written and `BUFFER_TOO_SMALL` returned.
///
/// # Safety
/// `matrix` must be a live handle; `values` must hold `capacity` doubles; `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_singular_values(
    matrix: *const SchattenMatrix,
    values: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> SchattenStatus {
    guard(|| {
        let m = matrix_ref(matrix)?;
        let len = out(out_len, "out_len")?;
        let sv = singular_values(m);
        *len = sv.len();
        if capacity < sv.len() {
            return Err(Failure(
                SchattenStatus::BufferTooSmall,
                format!("need room for {} values, got {capacity}", sv.len()),
            ));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        std::slice::from_raw_parts_mut(values, sv.len()).copy_from_slice(&sv);
        Ok(())
    })
}

/// `d²/dt² ‖A + tB‖_p^p` at `t = 0` by the trace formula (finite `p ≥ 2`).
///
/// # Safety
/// `a`, `b` must be live handles; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_second_derivative(
    a: *const SchattenMatrix,
    b: *const SchattenMatrix,
    p: f64,
    out_value: *mut f64,
) -> SchattenStatus {
    guard(|| {
        let v = second_derivative_schatten(matrix(a, "a")?, matrix(b, "b")?, p)?;
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}

/// Central second difference of `t ↦ ‖A + tB‖_p^p` at 0 with step `h`.
///
/// # Safety
/// `a`, `b` must be live handles; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_fd_second_derivative(
    a: *const SchattenMatrix,
    b: *const SchattenMatrix,
    p: f64,
    h: f64,
    out_value: *mut f64,
) -> SchattenStatus {
    guard(|| {
        let v = fd_second_derivative(matrix(a, "a")?, matrix(b, "b")?, exponent(p)?, h)?;
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}

/// Divided difference of `|x|^p` over `nodes` (repeated nodes allowed up to the symbol's order).
///
/// # Safety
/// `nodes` must point to `node_count` doubles; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_divdiff_abs_pow(
    p: f64,
    nodes: *const f64,
    node_count: usize,
    out_value: *mut f64,
) -> SchattenStatus {
    guard(|| {
        let f = SymbolFunction::abs_pow(p)?;
        let v = divided_difference(&f, slice(nodes, node_count, "nodes")?)?;
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}

/// Divided difference of `Σ coeffs[k] x^k` over `nodes`.
///
/// # Safety
/// `coeffs` and `nodes` must point to the given counts of doubles; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_divdiff_polynomial(
    coeffs: *const f64,
    coeff_count: usize,
    nodes: *const f64,
    node_count: usize,
    out_value: *mut f64,
) -> SchattenStatus {
    guard(|| {
        let f = SymbolFunction::polynomial(slice(coeffs, coeff_count, "coeffs")?);
        let v = divided_difference(&f, slice(nodes, node_count, "nodes")?)?;
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}

/// Λ(m, p) for even `p`. Values beyond `UINT64_MAX` report `NUMERICAL`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_lambda_bound(
    m: u64,
    p: u64,
    algebra: SchattenAlgebra,
    out_value: *mut u64,
) -> SchattenStatus {
    guard(|| {
        let alg = match algebra {
            SchattenAlgebra::Real => DivisionAlgebra::Real,
            SchattenAlgebra::Complex => DivisionAlgebra::Complex,
            SchattenAlgebra::Quaternion => DivisionAlgebra::Quaternion,
        };
        let v = lambda_bound(m, p, alg)?;
        let v = u64::try_from(v).map_err(|_| {
            Failure(
                SchattenStatus::Numerical,
                format!("Λ = {v} exceeds 64 bits"),
            )
        })?;
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}

/// Built-in map by kind. Unused parameters are ignored: `Corner` uses `m`, `n`, `p`;
/// `SumDiff` uses `n`; `Vec` uses `m`; `Cubature243` uses none; the rest use `m` and `p`.
///
/// # Safety
/// `out_embedding` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_embedding_new(
    kind: SchattenMapKind,
    m: usize,
    n: usize,
    p: f64,
    out_embedding: *mut *mut SchattenEmbedding,
) -> SchattenStatus {
    guard(|| {
        let dst = out(out_embedding, "out_embedding")?;
        *dst = ptr::null_mut();
        let needs_p = matches!(
            kind,
            SchattenMapKind::Diag
                | SchattenMapKind::Corner
                | SchattenMapKind::FirstRow
                | SchattenMapKind::S2Sp
        );
        let p = if needs_p {
            exponent(p)?
        } else {
            PExponent::Finite(1.0)
        };
        let inner = match kind {
            SchattenMapKind::Diag => diag_embedding(m, p)?,
            SchattenMapKind::Corner => corner_embedding(m, n, p)?,
            SchattenMapKind::SumDiff => sum_diff_embedding(n)?,
            SchattenMapKind::FirstRow => first_row_embedding(m, p)?,
            SchattenMapKind::Vec => vec_embedding(m)?,
            SchattenMapKind::S2Sp => s2_to_sp_embedding(m, p)?,
            SchattenMapKind::Cubature243 => cubature_embedding_2_4_3(),
        };
        *dst = Box::into_raw(Box::new(SchattenEmbedding { inner }));
        Ok(())
    })
}

/// Copy of `embedding` with its domain exponent set to `q` and codomain exponent to `p`.
///
/// # Safety
/// `embedding` must be a live handle; `out_embedding` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_embedding_with_exponents(
    embedding: *const SchattenEmbedding,
    q: f64,
    p: f64,
    out_embedding: *mut *mut SchattenEmbedding,
) -> SchattenStatus {
    guard(|| {
        let dst = out(out_embedding, "out_embedding")?;
        *dst = ptr::null_mut();
        let inner = embedding_ref(embedding)?.with_exponents(exponent(q)?, exponent(p)?);
        *dst = Box::into_raw(Box::new(SchattenEmbedding { inner }));
        Ok(())
    })
}

unsafe fn embedding_ref<'a>(e: *const SchattenEmbedding) -> Result<&'a EmbeddingMap, Failure> {
    e.as_ref()
        .map(|e| &e.inner)
        .ok_or_else(|| null("embedding"))
}

/// # Safety
/// `embedding` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn schatten_embedding_free(embedding: *mut SchattenEmbedding) {
    if !embedding.is_null() {
        drop(Box::from_raw(embedding));
    }
}

/// Sampling isometry check: basis vectors, the all-ones vector and `samples` seeded
/// Gaussian vectors.
///
/// # Safety
/// `embedding` must be a live handle; `out_max_residual` and `out_pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_verify_isometry(
    embedding: *const SchattenEmbedding,
    samples: usize,
    seed: u64,
    tol: f64,
    out_max_residual: *mut f64,
    out_pass: *mut bool,
) -> SchattenStatus {
    guard(|| {
        let v = verify_isometry(embedding_ref(embedding)?, samples, seed, tol)?;
        *out(out_max_residual, "out_max_residual")? = v.max_relative_residual;
        *out(out_pass, "out_pass")? = v.pass;
        Ok(())
    })
}

/// Obstruction check of a candidate `ℓ_q² → S_p^n` on the default grid.
///
/// # Safety
/// `embedding` must be a live handle; `out_verdict` and `out_max_residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schatten_check_candidate(
    embedding: *const SchattenEmbedding,
    tol: f64,
    out_verdict: *mut SchattenVerdict,
    out_max_residual: *mut f64,
) -> SchattenStatus {
    guard(|| {
        let config = CheckConfig {
            tol,
            ..CheckConfig::default()
        };
        let report = check_candidate(embedding_ref(embedding)?, &config)?;
        *out(out_verdict, "out_verdict")? = match report.verdict {
            Verdict::Consistent => SchattenVerdict::Consistent,
            Verdict::FailsScalarIdentity => SchattenVerdict::FailsScalarIdentity,
            Verdict::FailsD2Divergence => SchattenVerdict::FailsD2Divergence,
            Verdict::FailsD2Nonzero => SchattenVerdict::FailsD2Nonzero,
            Verdict::Inconclusive => SchattenVerdict::Inconclusive,
        };
        *out(out_max_residual, "out_max_residual")? = report.max_residual;
        Ok(())
    })
}
