//! Euclidean space `E^m` with an orthogonal structure `P` satisfying `P^2 = eps * Id`.
//!
//! Coordinates are laid out as `(x^1..x^p, y^1..y^p, z^1..z^q)`. The block-swap
//! structure sends `(x, y, z)` to `(nu * y, nu * x, eps * z)` componentwise.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type AmbientVector = DVector<f64>;

/// Default absolute tolerance for structural validation on basis residuals.
pub const VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = String;

    fn try_from(v: i64) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i64 {
    fn from(s: Sign) -> i64 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// The block-swap-with-signs structure on `E^{2p+q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSwap {
    p: usize,
    q: usize,
    nu: Vec<Sign>,
    eps: Vec<Sign>,
}

impl BlockSwap {
    pub fn new(nu: Vec<Sign>, eps: Vec<Sign>) -> Result<Self> {
        if nu.is_empty() {
            return Err(Error::invalid("nu", "p must be positive"));
        }
        if eps.is_empty() {
            return Err(Error::invalid("eps", "q must be positive"));
        }
        Ok(BlockSwap {
            p: nu.len(),
            q: eps.len(),
            nu,
            eps,
        })
    }

    /// All signs positive.
    pub fn plain(p: usize, q: usize) -> Result<Self> {
        Self::new(vec![Sign::Plus; p], vec![Sign::Plus; q])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn nu(&self) -> &[Sign] {
        &self.nu
    }

    pub fn eps(&self) -> &[Sign] {
        &self.eps
    }

    pub fn dim(&self) -> usize {
        2 * self.p + self.q
    }

    /// The common z-block sign, if every `eps_j` agrees.
    pub fn uniform_eps(&self) -> Option<Sign> {
        let first = self.eps[0];
        self.eps.iter().all(|&e| e == first).then_some(first)
    }

    fn apply_unchecked(&self, v: &AmbientVector) -> AmbientVector {
        let p = self.p;
        let mut out = AmbientVector::zeros(v.len());
        for (i, nu) in self.nu.iter().enumerate() {
            let nu = nu.value();
            out[i] = nu * v[p + i];
            out[p + i] = nu * v[i];
        }
        for (j, eps) in self.eps.iter().enumerate() {
            out[2 * p + j] = eps.value() * v[2 * p + j];
        }
        out
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let m = self.dim();
        let p = self.p;
        let mut mat = DMatrix::zeros(m, m);
        for (i, nu) in self.nu.iter().enumerate() {
            mat[(i, p + i)] = nu.value();
            mat[(p + i, i)] = nu.value();
        }
        for (j, eps) in self.eps.iter().enumerate() {
            mat[(2 * p + j, 2 * p + j)] = eps.value();
        }
        mat
    }
}

/// An arbitrary orthogonal matrix with `M^2 = epsilon * Id`.
///
/// The algebraic conditions are not enforced at construction; use
/// [`validate_structure`] before relying on them.
#[derive(Debug, Clone, PartialEq)]
pub struct Involution {
    matrix: DMatrix<f64>,
    epsilon: Sign,
}

impl Involution {
    pub fn new(matrix: DMatrix<f64>, epsilon: Sign) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::invalid(
                "matrix",
                format!("must be square, got {}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        if matrix.nrows() == 0 {
            return Err(Error::invalid("matrix", "must be non-empty"));
        }
        Ok(Involution { matrix, epsilon })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AmbientStructure {
    BlockSwap(BlockSwap),
    GenericInvolution(Involution),
}

impl From<BlockSwap> for AmbientStructure {
    fn from(b: BlockSwap) -> Self {
        AmbientStructure::BlockSwap(b)
    }
}

impl From<Involution> for AmbientStructure {
    fn from(i: Involution) -> Self {
        AmbientStructure::GenericInvolution(i)
    }
}

impl AmbientStructure {
    pub fn dim(&self) -> usize {
        match self {
            AmbientStructure::BlockSwap(b) => b.dim(),
            AmbientStructure::GenericInvolution(i) => i.matrix.nrows(),
        }
    }

    /// `+1` for almost product structures, `-1` for the almost complex case.
    pub fn epsilon(&self) -> f64 {
        match self {
            AmbientStructure::BlockSwap(_) => 1.0,
            AmbientStructure::GenericInvolution(i) => i.epsilon.value(),
        }
    }

    pub fn as_block_swap(&self) -> Option<&BlockSwap> {
        match self {
            AmbientStructure::BlockSwap(b) => Some(b),
            AmbientStructure::GenericInvolution(_) => None,
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        match self {
            AmbientStructure::BlockSwap(b) => b.to_matrix(),
            AmbientStructure::GenericInvolution(i) => i.matrix.clone(),
        }
    }

    pub fn apply(&self, v: &AmbientVector) -> Result<AmbientVector> {
        check_dim(self.dim(), v)?;
        Ok(self.apply_unchecked(v))
    }

    /// Caller guarantees `v.len() == self.dim()`.
    pub(crate) fn apply_unchecked(&self, v: &AmbientVector) -> AmbientVector {
        match self {
            AmbientStructure::BlockSwap(b) => b.apply_unchecked(v),
            AmbientStructure::GenericInvolution(i) => &i.matrix * v,
        }
    }
}

pub(crate) fn check_dim(expected: usize, v: &AmbientVector) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: v.len(),
        });
    }
    Ok(())
}

pub fn inner_product(u: &AmbientVector, v: &AmbientVector) -> Result<f64> {
    check_dim(u.len(), v)?;
    Ok(u.dot(v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViolationKind {
    /// `<P^2 e_i, e_j> != eps * delta_ij`
    NotInvolutive,
    /// `<P e_i, P e_j> != delta_ij`
    NotIsometric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub row: usize,
    pub col: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `P^2 = eps * Id` and `<PU, PV> = <U, V>` on all standard basis pairs.
pub fn validate_structure(s: &AmbientStructure, tol: f64) -> Result<Validation> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let m = s.to_matrix();
    let n = m.nrows();
    let eps = s.epsilon();
    let square = &m * &m;
    let gram = m.transpose() * &m;
    let mut violations = Vec::new();
    for row in 0..n {
        for col in 0..n {
            let delta = if row == col { 1.0 } else { 0.0 };
            let r_inv = (square[(row, col)] - eps * delta).abs();
            if !(r_inv <= tol) {
                violations.push(Violation {
                    kind: ViolationKind::NotInvolutive,
                    row,
                    col,
                    residual: r_inv,
                });
            }
            let r_iso = (gram[(row, col)] - delta).abs();
            if !(r_iso <= tol) {
                violations.push(Violation {
                    kind: ViolationKind::NotIsometric,
                    row,
                    col,
                    residual: r_iso,
                });
            }
        }
    }
    Ok(Validation { violations })
}
