//! Submanifolds of `E^m` presented by an orthonormal normal frame.
//!
//! Two families are provided: the hypersphere `S^{m-1}(R)` (codimension 1) and
//! the product `S^{2p-1}(r) x S^{q-1}(r3)` (codimension 2), which sits inside
//! the hypersphere of radius `sqrt(r^2 + r3^2)`.
//!
//! Normal frames are computed from the actual norms of the point's blocks
//! rather than the nominal radii, so they are orthonormal to rounding even for
//! points that satisfy membership only to tolerance.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{check_dim, AmbientVector};

/// Relative membership tolerance used when validating points.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// Relative orthogonality tolerance used when validating tangent vectors.
pub const TANGENCY_TOL: f64 = 1e-10;

const MIN_TANGENT_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    coords: AmbientVector,
}

impl ManifoldPoint {
    pub fn coords(&self) -> &AmbientVector {
        &self.coords
    }

    pub fn into_coords(self) -> AmbientVector {
        self.coords
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    coords: AmbientVector,
    base: AmbientVector,
}

impl TangentVector {
    pub(crate) fn from_parts(coords: AmbientVector, base: AmbientVector) -> Self {
        TangentVector { coords, base }
    }

    pub fn coords(&self) -> &AmbientVector {
        &self.coords
    }

    pub fn base(&self) -> &AmbientVector {
        &self.base
    }
}

pub trait Submanifold {
    fn ambient_dim(&self) -> usize;

    fn codim(&self) -> usize;

    /// Largest relative residual of the defining equations at `pt`.
    fn membership_residual(&self, pt: &AmbientVector) -> Result<f64>;

    /// Normal frame at a point already known to be on the submanifold.
    fn frame_at(&self, pt: &AmbientVector) -> Vec<AmbientVector>;

    /// A point drawn uniformly on each sphere factor.
    fn sample_coords<R: Rng + ?Sized>(&self, rng: &mut R) -> AmbientVector;

    fn contains(&self, pt: &AmbientVector, tol: f64) -> Result<bool> {
        Ok(self.membership_residual(pt)? <= tol)
    }

    fn point(&self, coords: AmbientVector) -> Result<ManifoldPoint> {
        self.point_with_tol(coords, MEMBERSHIP_TOL)
    }

    fn point_with_tol(&self, coords: AmbientVector, tol: f64) -> Result<ManifoldPoint> {
        let residual = self.membership_residual(&coords)?;
        if !(residual <= tol) {
            return Err(Error::NotOnManifold { residual });
        }
        Ok(ManifoldPoint { coords })
    }

    fn normal_frame(&self, pt: &ManifoldPoint) -> Result<Vec<AmbientVector>> {
        self.point(pt.coords.clone())?;
        Ok(self.frame_at(&pt.coords))
    }

    /// Removes the normal components of `v`: `v - sum_a <v, N_a> N_a`.
    fn project_tangent(&self, pt: &ManifoldPoint, v: &AmbientVector) -> Result<TangentVector> {
        check_dim(self.ambient_dim(), v)?;
        let frame = self.normal_frame(pt)?;
        Ok(TangentVector {
            coords: remove_normal(v, &frame),
            base: pt.coords.clone(),
        })
    }

    /// Wraps `v` as a tangent vector after checking orthogonality to the frame.
    fn tangent(&self, pt: &ManifoldPoint, v: AmbientVector) -> Result<TangentVector> {
        check_dim(self.ambient_dim(), &v)?;
        let frame = self.normal_frame(pt)?;
        let scale = v.norm().max(f64::MIN_POSITIVE);
        let residual = frame
            .iter()
            .map(|n| n.dot(&v).abs() / scale)
            .fold(0.0, f64::max);
        if !(residual <= TANGENCY_TOL) {
            return Err(Error::NotTangent { residual });
        }
        Ok(TangentVector {
            coords: v,
            base: pt.coords.clone(),
        })
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> ManifoldPoint {
        ManifoldPoint {
            coords: self.sample_coords(rng),
        }
    }

    /// Projection of a Gaussian draw; redrawn when almost all of it was normal.
    fn sample_tangent<R: Rng + ?Sized>(&self, pt: &ManifoldPoint, rng: &mut R) -> TangentVector {
        let frame = self.frame_at(&pt.coords);
        TangentVector {
            coords: sample_tangent_coords(self.ambient_dim(), &frame, rng),
            base: pt.coords.clone(),
        }
    }
}

pub(crate) fn remove_normal(v: &AmbientVector, frame: &[AmbientVector]) -> AmbientVector {
    let mut out = v.clone();
    for n in frame {
        out.axpy(-v.dot(n), n, 1.0);
    }
    out
}

pub(crate) fn sample_tangent_coords<R: Rng + ?Sized>(
    dim: usize,
    frame: &[AmbientVector],
    rng: &mut R,
) -> AmbientVector {
    loop {
        let draw = gaussian(dim, rng);
        let t = remove_normal(&draw, frame);
        let n = draw.norm();
        if n > 0.0 && t.norm() >= MIN_TANGENT_FRACTION * n {
            return t;
        }
    }
}

fn gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> AmbientVector {
    AmbientVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform point on the sphere of the given radius in `E^dim`.
fn sphere_draw<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R) -> AmbientVector {
    loop {
        let g = gaussian(dim, rng);
        let n = g.norm();
        if n > 0.0 && n.is_finite() {
            return g * (radius / n);
        }
    }
}

fn check_radius(field: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::invalid(field, format!("must be positive and finite, got {value}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypersphere {
    ambient_dim: usize,
    radius: f64,
}

impl Hypersphere {
    pub fn new(ambient_dim: usize, radius: f64) -> Result<Self> {
        if ambient_dim < 2 {
            return Err(Error::invalid("ambient_dim", "must be at least 2"));
        }
        check_radius("R", radius)?;
        Ok(Hypersphere { ambient_dim, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Submanifold for Hypersphere {
    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn codim(&self) -> usize {
        1
    }

    fn membership_residual(&self, pt: &AmbientVector) -> Result<f64> {
        check_dim(self.ambient_dim, pt)?;
        let rsq = self.radius * self.radius;
        Ok((pt.norm_squared() - rsq).abs() / rsq)
    }

    fn frame_at(&self, pt: &AmbientVector) -> Vec<AmbientVector> {
        vec![pt / pt.norm()]
    }

    fn sample_coords<R: Rng + ?Sized>(&self, rng: &mut R) -> AmbientVector {
        sphere_draw(self.ambient_dim, self.radius, rng)
    }
}

/// `S^{2p-1}(r) x S^{q-1}(r3)` in `E^{2p+q}` with the `(x, y | z)` block split.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOfSpheres {
    p: usize,
    q: usize,
    r: f64,
    r3: f64,
}

impl ProductOfSpheres {
    pub fn new(p: usize, q: usize, r: f64, r3: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("p", "must be positive"));
        }
        if q < 2 {
            return Err(Error::invalid("q", "must be at least 2 so that S^{q-1} has tangent directions"));
        }
        check_radius("r", r)?;
        check_radius("r3", r3)?;
        Ok(ProductOfSpheres { p, q, r, r3 })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r3(&self) -> f64 {
        self.r3
    }

    /// Radius of the hypersphere containing the product.
    pub fn outer_radius(&self) -> f64 {
        self.r.hypot(self.r3)
    }

    pub fn enclosing_sphere(&self) -> Hypersphere {
        Hypersphere {
            ambient_dim: 2 * self.p + self.q,
            radius: self.outer_radius(),
        }
    }

    fn split_norms_sq(&self, pt: &AmbientVector) -> (f64, f64) {
        let k = 2 * self.p;
        (pt.rows(0, k).norm_squared(), pt.rows(k, self.q).norm_squared())
    }
}

impl Submanifold for ProductOfSpheres {
    fn ambient_dim(&self) -> usize {
        2 * self.p + self.q
    }

    fn codim(&self) -> usize {
        2
    }

    fn membership_residual(&self, pt: &AmbientVector) -> Result<f64> {
        check_dim(self.ambient_dim(), pt)?;
        let (first, second) = self.split_norms_sq(pt);
        let rsq = self.r * self.r;
        let r3sq = self.r3 * self.r3;
        Ok(((first - rsq).abs() / rsq).max((second - r3sq).abs() / r3sq))
    }

    fn frame_at(&self, pt: &AmbientVector) -> Vec<AmbientVector> {
        let (first, second) = self.split_norms_sq(pt);
        let r = first.sqrt();
        let r3 = second.sqrt();
        let big_r = r.hypot(r3);
        let n1 = pt / big_r;
        let k = 2 * self.p;
        let n2 = AmbientVector::from_fn(pt.len(), |i, _| {
            if i < k {
                r3 / r * pt[i] / big_r
            } else {
                -r / r3 * pt[i] / big_r
            }
        });
        vec![n1, n2]
    }

    fn sample_coords<R: Rng + ?Sized>(&self, rng: &mut R) -> AmbientVector {
        let first = sphere_draw(2 * self.p, self.r, rng);
        let second = sphere_draw(self.q, self.r3, rng);
        AmbientVector::from_iterator(self.ambient_dim(), first.iter().chain(second.iter()).copied())
    }
}
