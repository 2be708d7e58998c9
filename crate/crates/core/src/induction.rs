//! Induced structure on a submanifold from tangential/normal decomposition.
//!
//! For a submanifold with orthonormal normal frame `(N_1..N_r)` and ambient
//! structure `P~`, every tangent `X` and every normal `N_a` split as
//!
//! ```text
//! P~ X   = P X + sum_a u_a(X) N_a
//! P~ N_a = eps xi_a + sum_b a_ab N_b
//! ```
//!
//! [`induce_at_point`] computes this in one step. [`chain_induce`] gets the
//! same data for a product of spheres by first inducing on the enclosing
//! hypersphere and then decomposing that structure against the second
//! normal. The two routes are kept numerically separate so comparing them is
//! meaningful.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{check_dim, AmbientStructure, AmbientVector};
use crate::submanifold::{
    Hypersphere, ManifoldPoint, ProductOfSpheres, Submanifold, TangentVector, MEMBERSHIP_TOL,
};

/// Tangent probes used by [`compare_structures`] when the caller has no preference.
pub const DEFAULT_PROBES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Direct,
    /// Through the enclosing hypersphere; frame is `(N_1, N_2)` with `N_1` its normal.
    Chained,
}

/// Per-point induced data `(P, u_a, xi_a, a)`.
///
/// `P` and `u_a` are evaluated on demand from the ambient structure and frame;
/// `xi_a` and `a` are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedStructure {
    structure: AmbientStructure,
    base: AmbientVector,
    frame: Vec<AmbientVector>,
    xi: Vec<AmbientVector>,
    a: DMatrix<f64>,
    route: Route,
}

impl InducedStructure {
    pub fn base(&self) -> &AmbientVector {
        &self.base
    }

    pub fn codim(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[AmbientVector] {
        &self.frame
    }

    pub fn xi(&self) -> &[AmbientVector] {
        &self.xi
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn structure(&self) -> &AmbientStructure {
        &self.structure
    }

    pub fn is_chained(&self) -> bool {
        self.route == Route::Chained
    }

    /// Mutable access for fault injection.
    pub fn a_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.a
    }

    /// Mutable access for fault injection.
    pub fn xi_mut(&mut self) -> &mut [AmbientVector] {
        &mut self.xi
    }

    fn check_base(&self, x: &TangentVector) -> Result<()> {
        if x.base() != &self.base {
            return Err(Error::BaseMismatch);
        }
        Ok(())
    }

    /// Tangential part of `P~ X`.
    pub fn apply_p(&self, x: &TangentVector) -> Result<TangentVector> {
        self.check_base(x)?;
        let px = self.p_action(x.coords());
        Ok(TangentVector::from_parts(px, self.base.clone()))
    }

    /// `u_a(X) = <P~ X, N_a>` for each normal.
    pub fn evaluate_u(&self, x: &TangentVector) -> Result<Vec<f64>> {
        self.check_base(x)?;
        Ok(self.u_action(x.coords()))
    }

    /// `u_a(X)` through the metric: `<X, xi_a>`.
    pub fn evaluate_u_metric(&self, x: &TangentVector) -> Result<Vec<f64>> {
        self.check_base(x)?;
        Ok(self.xi.iter().map(|xi| x.coords().dot(xi)).collect())
    }

    pub(crate) fn p_action(&self, x: &AmbientVector) -> AmbientVector {
        let mut px = self.structure.apply_unchecked(x);
        match self.route {
            Route::Direct => {
                let coeffs: Vec<f64> = self.frame.iter().map(|n| px.dot(n)).collect();
                for (c, n) in coeffs.iter().zip(&self.frame) {
                    px.axpy(-c, n, 1.0);
                }
            }
            Route::Chained => {
                // P X = P-bar X - <P-bar X, N_2> N_2 with P-bar X = P~ X - <P~ X, N_1> N_1
                for n in &self.frame {
                    let c = px.dot(n);
                    px.axpy(-c, n, 1.0);
                }
            }
        }
        px
    }

    pub(crate) fn u_action(&self, x: &AmbientVector) -> Vec<f64> {
        let px = self.structure.apply_unchecked(x);
        match self.route {
            Route::Direct => self.frame.iter().map(|n| px.dot(n)).collect(),
            Route::Chained => {
                let n1 = &self.frame[0];
                let n2 = &self.frame[1];
                let u1 = px.dot(n1);
                let mut bar = px;
                bar.axpy(-u1, n1, 1.0);
                vec![u1, bar.dot(n2)]
            }
        }
    }
}

fn check_ambient<S: Submanifold>(s: &AmbientStructure, sub: &S) -> Result<()> {
    if s.dim() != sub.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: sub.ambient_dim(),
            actual: s.dim(),
        });
    }
    Ok(())
}

/// Direct decomposition of `P~ N_a` against the full normal frame.
pub fn induce_at_point<S: Submanifold>(
    s: &AmbientStructure,
    sub: &S,
    pt: &ManifoldPoint,
) -> Result<InducedStructure> {
    check_ambient(s, sub)?;
    let frame = sub.normal_frame(pt)?;
    Ok(induce_with_frame(s, pt.coords().clone(), frame))
}

/// Decomposition against a caller-supplied orthonormal normal frame.
///
/// The frame is trusted; this is the entry point for submanifolds not
/// modelled by [`Submanifold`].
pub fn induce_with_frame(
    s: &AmbientStructure,
    base: AmbientVector,
    frame: Vec<AmbientVector>,
) -> InducedStructure {
    let eps = s.epsilon();
    let r = frame.len();
    let images: Vec<AmbientVector> = frame.iter().map(|n| s.apply_unchecked(n)).collect();
    let a = DMatrix::from_fn(r, r, |alpha, beta| images[alpha].dot(&frame[beta]));
    let xi = images
        .into_iter()
        .enumerate()
        .map(|(alpha, mut img)| {
            for (beta, n) in frame.iter().enumerate() {
                img.axpy(-a[(alpha, beta)], n, 1.0);
            }
            img * eps
        })
        .collect();
    InducedStructure {
        structure: s.clone(),
        base,
        frame,
        xi,
        a,
        route: Route::Direct,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainVariant {
    #[default]
    Faithful,
    /// Leaves the normal part of `xi_1` out of `a_12` (fault injection only).
    DropXi1Normal,
}

/// Two-step induction: `E^m` to the outer sphere, then the outer sphere to the product.
pub fn chain_induce(
    s: &AmbientStructure,
    outer: &Hypersphere,
    inner: &ProductOfSpheres,
    pt: &ManifoldPoint,
) -> Result<InducedStructure> {
    chain_induce_variant(s, outer, inner, pt, ChainVariant::Faithful)
}

pub fn chain_induce_variant(
    s: &AmbientStructure,
    outer: &Hypersphere,
    inner: &ProductOfSpheres,
    pt: &ManifoldPoint,
    variant: ChainVariant,
) -> Result<InducedStructure> {
    check_nesting(outer, inner)?;
    check_ambient(s, inner)?;
    let inner_frame = inner.normal_frame(pt)?;
    let x = pt.coords();
    check_dim(outer.ambient_dim(), x)?;
    let eps = s.epsilon();

    // first step: hypersurface structure (P-bar, u_1, xi-bar_1, a_11) on the outer sphere
    let n1 = outer.frame_at(x).remove(0);
    let pn1 = s.apply_unchecked(&n1);
    let a11 = pn1.dot(&n1);
    let mut xi1_bar = pn1;
    xi1_bar.axpy(-a11, &n1, 1.0);
    xi1_bar *= eps;
    let p_bar = |v: &AmbientVector| {
        let mut w = s.apply_unchecked(v);
        let u1 = w.dot(&n1);
        w.axpy(-u1, &n1, 1.0);
        (w, u1)
    };

    // second step: decompose P-bar N_2 and split xi-bar_1 against N_2
    let n2 = inner_frame[1].clone();
    let (pbar_n2, a21) = p_bar(&n2);
    let a22 = pbar_n2.dot(&n2);
    let mut xi2 = pbar_n2;
    xi2.axpy(-a22, &n2, 1.0);
    xi2 *= eps;

    let xi1_normal = xi1_bar.dot(&n2);
    let mut xi1 = xi1_bar;
    xi1.axpy(-xi1_normal, &n2, 1.0);
    let a12 = match variant {
        ChainVariant::Faithful => eps * xi1_normal,
        ChainVariant::DropXi1Normal => 0.0,
    };

    let a = DMatrix::from_row_slice(2, 2, &[a11, a12, a21, a22]);
    Ok(InducedStructure {
        structure: s.clone(),
        base: x.clone(),
        frame: vec![n1, n2],
        xi: vec![xi1, xi2],
        a,
        route: Route::Chained,
    })
}

pub(crate) fn check_nesting(outer: &Hypersphere, inner: &ProductOfSpheres) -> Result<()> {
    if outer.ambient_dim() != inner.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: inner.ambient_dim(),
            actual: outer.ambient_dim(),
        });
    }
    let inner_sq = inner.r() * inner.r() + inner.r3() * inner.r3();
    let outer_sq = outer.radius() * outer.radius();
    if !((inner_sq - outer_sq).abs() <= MEMBERSHIP_TOL * outer_sq) {
        return Err(Error::NestingViolated { inner_sq, outer_sq });
    }
    Ok(())
}

/// Largest discrepancy between two structures at the same point: `a`, every
/// `xi_a`, and `P X`, `u_a(X)` over the probes.
pub fn compare_structures(
    lhs: &InducedStructure,
    rhs: &InducedStructure,
    probes: &[TangentVector],
) -> Result<f64> {
    if lhs.base != rhs.base {
        return Err(Error::BaseMismatch);
    }
    if lhs.codim() != rhs.codim() {
        return Err(Error::CodimMismatch {
            lhs: lhs.codim(),
            rhs: rhs.codim(),
        });
    }
    let mut worst = (&lhs.a - &rhs.a).amax();
    for (l, r) in lhs.xi.iter().zip(&rhs.xi) {
        worst = worst.max((l - r).amax());
    }
    for x in probes {
        lhs.check_base(x)?;
        let v = x.coords();
        worst = worst.max((lhs.p_action(v) - rhs.p_action(v)).amax());
        for (ul, ur) in lhs.u_action(v).into_iter().zip(rhs.u_action(v)) {
            worst = worst.max((ul - ur).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BlockSwap;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> AmbientVector {
        AmbientVector::from_column_slice(x)
    }

    fn plain(p: usize, q: usize) -> AmbientStructure {
        BlockSwap::plain(p, q).unwrap().into()
    }

    /// Independent route: project `P~ N_1` onto the tangent space and read the
    /// normal coefficient off the remainder.
    fn oracle_codim1(s: &AmbientStructure, sph: &Hypersphere, pt: &ManifoldPoint) -> (f64, AmbientVector) {
        let n = sph.normal_frame(pt).unwrap().remove(0);
        let pn = s.apply(&n).unwrap();
        let tangential = sph.project_tangent(pt, &pn).unwrap().coords().clone();
        let normal_part = &pn - &tangential;
        (normal_part.dot(&n), tangential)
    }

    #[test]
    fn sphere_equator_point() {
        let s = plain(1, 1);
        let sph = Hypersphere::new(3, 1.0).unwrap();
        let pt = sph.point(v(&[1., 0., 0.])).unwrap();
        let (a_oracle, xi_oracle) = oracle_codim1(&s, &sph, &pt);
        assert_eq!(a_oracle, 0.0);
        assert_eq!(xi_oracle, v(&[0., 1., 0.]));
        let st = induce_at_point(&s, &sph, &pt).unwrap();
        assert_eq!(st.a()[(0, 0)], 0.0);
        assert!((&st.xi()[0] - v(&[0., 1., 0.])).amax() < 1e-15);
    }

    #[test]
    fn sphere_fixed_axis_point() {
        let s = plain(1, 1);
        let sph = Hypersphere::new(3, 1.0).unwrap();
        let pt = sph.point(v(&[0., 0., 1.])).unwrap();
        let st = induce_at_point(&s, &sph, &pt).unwrap();
        assert_eq!(st.a()[(0, 0)], 1.0);
        assert_eq!(st.xi()[0], v(&[0., 0., 0.]));
    }

    #[test]
    fn product_example_matrix() {
        let s = plain(1, 2);
        let pr = ProductOfSpheres::new(1, 2, 1.0, 1.0).unwrap();
        let pt = pr.point(v(&[1., 0., 1., 0.])).unwrap();
        // oracle: plain inner products of the images of the frame
        let frame = pr.normal_frame(&pt).unwrap();
        let expected = DMatrix::from_fn(2, 2, |i, j| s.apply(&frame[i]).unwrap().dot(&frame[j]));
        let frozen = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!((&expected - &frozen).amax() < 1e-15);
        let st = induce_at_point(&s, &pr, &pt).unwrap();
        assert!((st.a() - &frozen).amax() < 1e-15);
        let chained = chain_induce(&s, &pr.enclosing_sphere(), &pr, &pt).unwrap();
        assert!((chained.a() - &frozen).amax() < 1e-15);
    }

    #[test]
    fn apply_p_examples() {
        let s = plain(1, 1);
        let sph = Hypersphere::new(3, 1.0).unwrap();
        let pt = sph.point(v(&[1., 0., 0.])).unwrap();
        let st = induce_at_point(&s, &sph, &pt).unwrap();
        let x = sph.tangent(&pt, v(&[0., 0., 1.])).unwrap();
        assert_eq!(st.apply_p(&x).unwrap().coords(), &v(&[0., 0., 1.]));

        let pole = sph.point(v(&[0., 0., 1.])).unwrap();
        let st = induce_at_point(&s, &sph, &pole).unwrap();
        let x = sph.tangent(&pole, v(&[0.25, -1.5, 0.])).unwrap();
        assert_eq!(st.apply_p(&x).unwrap().coords(), &v(&[-1.5, 0.25, 0.]));
    }

    #[test]
    fn evaluate_u_examples() {
        let s = plain(1, 1);
        let sph = Hypersphere::new(3, 1.0).unwrap();
        let pt = sph.point(v(&[1., 0., 0.])).unwrap();
        let st = induce_at_point(&s, &sph, &pt).unwrap();
        let x = sph.tangent(&pt, v(&[0., 1., 0.])).unwrap();
        assert_eq!(st.evaluate_u(&x).unwrap(), vec![1.0]);
        assert_eq!(st.evaluate_u_metric(&x).unwrap(), vec![1.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = sph.sample_point(&mut rng);
        let st = induce_at_point(&s, &sph, &q).unwrap();
        let xi = sph.tangent(&q, st.xi()[0].clone()).unwrap();
        let a11 = st.a()[(0, 0)];
        assert!((st.evaluate_u(&xi).unwrap()[0] - (1.0 - a11 * a11)).abs() < 1e-14);
    }

    #[test]
    fn base_mismatch_rejected() {
        let s = plain(1, 1);
        let sph = Hypersphere::new(3, 1.0).unwrap();
        let pt = sph.point(v(&[1., 0., 0.])).unwrap();
        let other = sph.point(v(&[0., 1., 0.])).unwrap();
        let st = induce_at_point(&s, &sph, &pt).unwrap();
        let x = sph.tangent(&other, v(&[1., 0., 0.])).unwrap();
        assert_eq!(st.apply_p(&x), Err(Error::BaseMismatch));
        assert_eq!(st.evaluate_u(&x), Err(Error::BaseMismatch));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let s = plain(1, 2);
        let sph = Hypersphere::new(3, 1.0).unwrap();
        let pt = sph.point(v(&[1., 0., 0.])).unwrap();
        assert!(matches!(induce_at_point(&s, &sph, &pt), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn chain_rejects_bad_nesting() {
        let s = plain(1, 2);
        let pr = ProductOfSpheres::new(1, 2, 1.0, 1.0).unwrap();
        let outer = Hypersphere::new(4, 1.0).unwrap();
        let pt = pr.point(v(&[1., 0., 1., 0.])).unwrap();
        assert!(matches!(
            chain_induce(&s, &outer, &pr, &pt),
            Err(Error::NestingViolated { .. })
        ));
    }

    #[test]
    fn chain_xi2_matches_direct_tangential_part() {
        let s: AmbientStructure = BlockSwap::new(
            vec![crate::geometry::Sign::Plus, crate::geometry::Sign::Minus],
            vec![crate::geometry::Sign::Minus, crate::geometry::Sign::Plus, crate::geometry::Sign::Plus],
        )
        .unwrap()
        .into();
        let pr = ProductOfSpheres::new(2, 3, 0.7, 1.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let pt = pr.sample_point(&mut rng);
            let chained = chain_induce(&s, &pr.enclosing_sphere(), &pr, &pt).unwrap();
            let frame = pr.normal_frame(&pt).unwrap();
            let pn2 = s.apply(&frame[1]).unwrap();
            let oracle = pr.project_tangent(&pt, &pn2).unwrap();
            assert!((&chained.xi()[1] - oracle.coords()).amax() < 1e-13);
        }
    }

    #[test]
    fn compare_reflexive_and_detects_perturbation() {
        let s = plain(1, 2);
        let pr = ProductOfSpheres::new(1, 2, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pt = pr.sample_point(&mut rng);
        let st = induce_at_point(&s, &pr, &pt).unwrap();
        let probes: Vec<_> = (0..DEFAULT_PROBES).map(|_| pr.sample_tangent(&pt, &mut rng)).collect();
        assert_eq!(compare_structures(&st, &st, &probes).unwrap(), 0.0);
        let mut bad = st.clone();
        bad.a_mut()[(0, 1)] += 1e-3;
        assert!(compare_structures(&st, &bad, &probes).unwrap() >= 1e-3);

        let sph = pr.enclosing_sphere();
        let st1 = induce_at_point(&s, &sph, &pt).unwrap();
        assert!(matches!(
            compare_structures(&st, &st1, &probes),
            Err(Error::CodimMismatch { lhs: 2, rhs: 1 })
        ));
    }

    #[test]
    fn dropped_normal_part_breaks_chain() {
        let s = plain(1, 2);
        let pr = ProductOfSpheres::new(1, 2, 1.0, 1.0).unwrap();
        let pt = pr.point(v(&[1., 0., 1., 0.])).unwrap();
        let direct = induce_at_point(&s, &pr, &pt).unwrap();
        let bad = chain_induce_variant(&s, &pr.enclosing_sphere(), &pr, &pt, ChainVariant::DropXi1Normal).unwrap();
        assert!(compare_structures(&direct, &bad, &[]).unwrap() >= 0.5 - 1e-12);
    }

    #[test]
    fn almost_complex_structure_decomposes() {
        use crate::geometry::{Involution, Sign};
        // J rotates (e0,e1) and (e2,e3) by 90 degrees; a_11 = <J N, N> = 0
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 1)] = -1.0;
        m[(1, 0)] = 1.0;
        m[(2, 3)] = -1.0;
        m[(3, 2)] = 1.0;
        let s: AmbientStructure = Involution::new(m, Sign::Minus).unwrap().into();
        let sph = Hypersphere::new(4, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pt = sph.sample_point(&mut rng);
        let st = induce_at_point(&s, &sph, &pt).unwrap();
        assert!(st.a()[(0, 0)].abs() < 1e-15);
        let n = &st.frame()[0];
        let rebuilt = -1.0 * &st.xi()[0] + st.a()[(0, 0)] * n;
        assert!((s.apply(n).unwrap() - rebuilt).amax() < 1e-15);
    }
}
