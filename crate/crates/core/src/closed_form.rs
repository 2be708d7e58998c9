//! Explicit formulas for the block-swap structure on the hypersphere and on
//! the product of spheres, written in terms of the scalar invariants
//!
//! ```text
//! sigma = sum nu_i x^i y^i          tau = sum eps_j (z^j)^2
//! gamma = sum nu_i (x^i Y^i + y^i X^i)   mu = sum eps_j z^j Z^j
//! ```
//!
//! These are computed independently of [`crate::induction`] and serve as its
//! oracle. On the hypersphere the 1-form is `u_1(X) = (gamma + mu) / R`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{check_dim, AmbientVector, BlockSwap};
use crate::submanifold::{Hypersphere, ManifoldPoint, ProductOfSpheres, Submanifold, TangentVector};

/// Relative agreement required between coordinate-derived and nominal radii.
pub const RADIUS_AGREEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointInvariants {
    pub sigma: f64,
    pub tau: f64,
    pub r1sq: f64,
    pub r2sq: f64,
    pub r3sq: f64,
    /// `r1sq + r2sq`
    pub rsq: f64,
    /// `rsq + r3sq`
    pub big_rsq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentInvariants {
    pub gamma: f64,
    pub mu: f64,
}

pub fn invariants(
    s: &BlockSwap,
    pt: &AmbientVector,
    x: Option<&AmbientVector>,
) -> Result<(PointInvariants, Option<TangentInvariants>)> {
    check_dim(s.dim(), pt)?;
    if let Some(x) = x {
        check_dim(s.dim(), x)?;
    }
    let p = s.p();
    let (mut sigma, mut tau, mut r1sq, mut r2sq, mut r3sq) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, nu) in s.nu().iter().enumerate() {
        let (xi, yi) = (pt[i], pt[p + i]);
        sigma += nu.value() * xi * yi;
        r1sq += xi * xi;
        r2sq += yi * yi;
    }
    for (j, eps) in s.eps().iter().enumerate() {
        let z = pt[2 * p + j];
        tau += eps.value() * z * z;
        r3sq += z * z;
    }
    let rsq = r1sq + r2sq;
    let point = PointInvariants {
        sigma,
        tau,
        r1sq,
        r2sq,
        r3sq,
        rsq,
        big_rsq: rsq + r3sq,
    };
    let tangent = x.map(|x| {
        let mut gamma = 0.0;
        for (i, nu) in s.nu().iter().enumerate() {
            gamma += nu.value() * (pt[i] * x[p + i] + pt[p + i] * x[i]);
        }
        let mut mu = 0.0;
        for (j, eps) in s.eps().iter().enumerate() {
            mu += eps.value() * pt[2 * p + j] * x[2 * p + j];
        }
        TangentInvariants { gamma, mu }
    });
    Ok((point, tangent))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example1Structure {
    pub a11: f64,
    pub xi1: AmbientVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example1Action {
    pub u1: f64,
    pub px: AmbientVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example2Structure {
    pub a: DMatrix<f64>,
    pub xi1: AmbientVector,
    pub xi2: AmbientVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example2Action {
    pub u1: f64,
    pub u2: f64,
    pub px: AmbientVector,
}

fn radius_agrees(measured: f64, nominal: f64) -> Result<()> {
    let residual = (measured - nominal).abs() / nominal;
    if !(residual <= RADIUS_AGREEMENT_TOL) {
        return Err(Error::NotOnManifold { residual });
    }
    Ok(())
}

fn check_layout(s: &BlockSwap, dim: usize) -> Result<()> {
    if s.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: s.dim(),
        });
    }
    Ok(())
}

/// Builds `(f(x_i, y_i), g(x_i, y_i), h(z_j))` blockwise.
fn blocks(
    s: &BlockSwap,
    x_part: impl Fn(usize) -> f64,
    y_part: impl Fn(usize) -> f64,
    z_part: impl Fn(usize) -> f64,
) -> AmbientVector {
    let p = s.p();
    AmbientVector::from_fn(s.dim(), |k, _| {
        if k < p {
            x_part(k)
        } else if k < 2 * p {
            y_part(k - p)
        } else {
            z_part(k - 2 * p)
        }
    })
}

fn sphere_invariants(s: &BlockSwap, sph: &Hypersphere, pt: &ManifoldPoint) -> Result<PointInvariants> {
    check_layout(s, sph.ambient_dim())?;
    sph.point(pt.coords().clone())?;
    let (inv, _) = invariants(s, pt.coords(), None)?;
    radius_agrees(inv.big_rsq, sph.radius() * sph.radius())?;
    Ok(inv)
}

/// `a_11 = (2 sigma + tau) / R^2` and
/// `xi_1 = (1/R)(nu y - a_11 x, nu x - a_11 y, (eps - a_11) z)`.
pub fn example1_structure(s: &BlockSwap, sph: &Hypersphere, pt: &ManifoldPoint) -> Result<Example1Structure> {
    let inv = sphere_invariants(s, sph, pt)?;
    let big_r = inv.big_rsq.sqrt();
    let a11 = (2.0 * inv.sigma + inv.tau) / inv.big_rsq;
    let c = pt.coords();
    let p = s.p();
    let nu = s.nu();
    let eps = s.eps();
    let xi1 = blocks(
        s,
        |i| (nu[i].value() * c[p + i] - a11 * c[i]) / big_r,
        |i| (nu[i].value() * c[i] - a11 * c[p + i]) / big_r,
        |j| (eps[j].value() - a11) * c[2 * p + j] / big_r,
    );
    Ok(Example1Structure { a11, xi1 })
}

/// `u_1(X) = (gamma + mu) / R` and `P X = P~ X - (u_1(X) / R) * pt`.
pub fn example1_u_and_p(
    s: &BlockSwap,
    sph: &Hypersphere,
    pt: &ManifoldPoint,
    x: &TangentVector,
) -> Result<Example1Action> {
    let inv = sphere_invariants(s, sph, pt)?;
    check_tangent(sph, pt, x)?;
    let (_, tinv) = invariants(s, pt.coords(), Some(x.coords()))?;
    let tinv = tinv.expect("tangent supplied");
    let big_r = inv.big_rsq.sqrt();
    let u1 = (tinv.gamma + tinv.mu) / big_r;
    let c = pt.coords();
    let v = x.coords();
    let p = s.p();
    let k = u1 / big_r;
    let px = blocks(
        s,
        |i| s.nu()[i].value() * v[p + i] - k * c[i],
        |i| s.nu()[i].value() * v[i] - k * c[p + i],
        |j| s.eps()[j].value() * v[2 * p + j] - k * c[2 * p + j],
    );
    Ok(Example1Action { u1, px })
}

fn check_tangent<S: Submanifold>(sub: &S, pt: &ManifoldPoint, x: &TangentVector) -> Result<()> {
    if x.base() != pt.coords() {
        return Err(Error::BaseMismatch);
    }
    sub.tangent(pt, x.coords().clone())?;
    Ok(())
}

fn product_invariants(
    s: &BlockSwap,
    prod: &ProductOfSpheres,
    pt: &ManifoldPoint,
) -> Result<(PointInvariants, f64)> {
    check_layout(s, prod.ambient_dim())?;
    if s.p() != prod.p() {
        return Err(Error::invalid("p", "structure and product disagree on p"));
    }
    let eps = s.uniform_eps().ok_or(Error::MixedSigns)?.value();
    prod.point(pt.coords().clone())?;
    let (inv, _) = invariants(s, pt.coords(), None)?;
    radius_agrees(inv.rsq, prod.r() * prod.r())?;
    radius_agrees(inv.r3sq, prod.r3() * prod.r3())?;
    Ok((inv, eps))
}

/// The 2x2 matrix `a` and the vector fields `xi_1`, `xi_2` on the product.
pub fn example2_structure(
    s: &BlockSwap,
    prod: &ProductOfSpheres,
    pt: &ManifoldPoint,
) -> Result<Example2Structure> {
    let (inv, eps) = product_invariants(s, prod, pt)?;
    let PointInvariants {
        sigma,
        tau,
        rsq,
        r3sq,
        big_rsq,
        ..
    } = inv;
    let r = rsq.sqrt();
    let r3 = r3sq.sqrt();
    let big_r = big_rsq.sqrt();

    let a11 = (2.0 * sigma + eps * r3sq) / big_rsq;
    let a12 = (2.0 * sigma - eps * rsq) * r3 / (r * big_rsq);
    let a22 = (2.0 * sigma * r3sq + eps * rsq * rsq) / (rsq * big_rsq);
    let a = DMatrix::from_row_slice(2, 2, &[a11, a12, a12, a22]);

    let c = pt.coords();
    let p = s.p();
    let nu = s.nu();
    let eps_j = s.eps();
    let k = 2.0 * sigma / rsq;
    let x_block = |i: usize| nu[i].value() * c[p + i] - k * c[i];
    let y_block = |i: usize| nu[i].value() * c[i] - k * c[p + i];
    let z_block = |j: usize| (eps_j[j].value() - tau / r3sq) * c[2 * p + j];

    let xi1 = blocks(s, |i| x_block(i) / big_r, |i| y_block(i) / big_r, |j| z_block(j) / big_r);
    let xi2 = blocks(
        s,
        |i| r3 / r * x_block(i) / big_r,
        |i| r3 / r * y_block(i) / big_r,
        |j| -r / r3 * z_block(j) / big_r,
    );
    Ok(Example2Structure { a, xi1, xi2 })
}

/// `u_1`, `u_2` and `P X` on the product.
pub fn example2_u_and_p(
    s: &BlockSwap,
    prod: &ProductOfSpheres,
    pt: &ManifoldPoint,
    x: &TangentVector,
) -> Result<Example2Action> {
    let (inv, _) = product_invariants(s, prod, pt)?;
    check_tangent(prod, pt, x)?;
    let (_, tinv) = invariants(s, pt.coords(), Some(x.coords()))?;
    let TangentInvariants { gamma, mu } = tinv.expect("tangent supplied");
    let r = inv.rsq.sqrt();
    let r3 = inv.r3sq.sqrt();
    let big_r = inv.big_rsq.sqrt();

    let u1 = (gamma + mu) / big_r;
    let u2 = (r3 / r * gamma - r / r3 * mu) / big_r;

    let c = pt.coords();
    let v = x.coords();
    let p = s.p();
    let kg = gamma / inv.rsq;
    let km = mu / inv.r3sq;
    let px = blocks(
        s,
        |i| s.nu()[i].value() * v[p + i] - kg * c[i],
        |i| s.nu()[i].value() * v[i] - kg * c[p + i],
        |j| s.eps()[j].value() * v[2 * p + j] - km * c[2 * p + j],
    );
    Ok(Example2Action { u1, u2, px })
}
