//! Residual checks for the algebraic identities satisfied by induced structures.
//!
//! Every check samples points from a caller-supplied generator. Each point
//! gets its own seed (`rng.next_u64()`), from which the point and its tangents
//! are drawn; the seed of the worst sample is kept in the report so the
//! residual can be reproduced bit for bit with [`codim1_point_residuals`] and
//! friends.
//!
//! Residuals are `|LHS - RHS|` (sup norm for vectors) divided by
//! `max(1, operand norms)`: `|X|` for identities linear in a tangent `X`,
//! `|X| |Y|` for bilinear ones, `|xi_a|` for identities in the structure
//! vectors alone.
//!
//! All identities assume an almost product ambient structure (`eps = +1`).

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed_form::{example1_structure, example1_u_and_p, example2_structure, example2_u_and_p};
use crate::error::{Error, Result};
use crate::geometry::{AmbientStructure, AmbientVector, BlockSwap};
use crate::induction::{
    chain_induce_variant, check_nesting, compare_structures, induce_at_point, ChainVariant, InducedStructure,
    DEFAULT_PROBES,
};
use crate::submanifold::{Hypersphere, ProductOfSpheres, Submanifold, TangentVector};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Hypersurface identities, in report order.
pub const CODIM1_IDS: [&str; 7] = ["2.2.i", "2.2.ii", "2.2.iii", "2.2.iv", "2.3.i", "2.3.ii", "2.3.iii"];

/// Codimension-2 identities, in report order.
pub const CODIM2_IDS: [&str; 13] = [
    "2.6.i", "2.6.ii", "2.6.iii", "2.6.iv", "2.6.v", "2.6.vi", "2.6.vii", "2.6.viii", "2.6.ix", "2.7.i", "2.7.ii",
    "2.7.iii", "2.7.iv",
];

pub const CHAIN_ID: &str = "thm2.1";

pub const EXAMPLE1_IDS: [&str; 4] = ["ex1.a11", "ex1.xi1", "ex1.u1", "ex1.P"];

pub const EXAMPLE2_IDS: [&str; 6] = ["ex2.a", "ex2.xi1", "ex2.xi2", "ex2.u1", "ex2.u2", "ex2.P"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorstCase {
    pub point_index: usize,
    /// Absent for identities that involve no tangent vector.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tangent_index: Option<usize>,
    pub point_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: String,
    pub samples: u64,
    #[serde(with = "crate::report::nullable_f64")]
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub worst_case: Option<WorstCase>,
}

/// Per-identity tolerances with a common default.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    default: f64,
    overrides: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::uniform(DEFAULT_TOL)
    }
}

impl Tolerances {
    pub fn uniform(default: f64) -> Self {
        Tolerances {
            default,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, id: impl Into<String>, tol: f64) -> Self {
        self.overrides.insert(id.into(), tol);
        self
    }

    pub fn default_tol(&self) -> f64 {
        self.default
    }

    pub fn overrides(&self) -> &BTreeMap<String, f64> {
        &self.overrides
    }

    pub fn get(&self, id: &str) -> f64 {
        self.overrides.get(id).copied().unwrap_or(self.default)
    }
}

/// A deliberate corruption of computed components, used to show the checks
/// are not vacuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fault {
    /// `xi_index += delta * t` for a fixed unit tangent `t`.
    Xi { index: usize, delta: f64 },
    /// `a[row][col] += delta`.
    A { row: usize, col: usize, delta: f64 },
    /// `P X += delta * X`.
    P { delta: f64 },
    /// `u_index(X) += delta * <X, t>`.
    U { index: usize, delta: f64 },
}

/// Sample counts for the sampled checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub n_points: usize,
    pub n_tangents: usize,
}

impl Sampling {
    pub fn new(n_points: usize, n_tangents: usize) -> Self {
        Sampling { n_points, n_tangents }
    }
}

/// Structure accessors with an optional fault applied.
struct View<'a> {
    st: &'a InducedStructure,
    fault: Option<Fault>,
    dir: AmbientVector,
}

impl<'a> View<'a> {
    fn new(st: &'a InducedStructure, fault: Option<Fault>) -> Self {
        let dir = if fault.is_some() {
            fault_direction(st)
        } else {
            AmbientVector::zeros(0)
        };
        View { st, fault, dir }
    }

    fn p(&self, x: &AmbientVector) -> AmbientVector {
        let mut px = self.st.p_action(x);
        if let Some(Fault::P { delta }) = self.fault {
            px.axpy(delta, x, 1.0);
        }
        px
    }

    fn u(&self, x: &AmbientVector) -> Vec<f64> {
        let mut u = self.st.u_action(x);
        if let Some(Fault::U { index, delta }) = self.fault {
            if let Some(slot) = u.get_mut(index) {
                *slot += delta * x.dot(&self.dir);
            }
        }
        u
    }

    fn xi(&self, alpha: usize) -> AmbientVector {
        let mut xi = self.st.xi()[alpha].clone();
        if let Some(Fault::Xi { index, delta }) = self.fault {
            if index == alpha {
                xi.axpy(delta, &self.dir, 1.0);
            }
        }
        xi
    }

    fn a(&self, row: usize, col: usize) -> f64 {
        let mut v = self.st.a()[(row, col)];
        if let Some(Fault::A { row: r, col: c, delta }) = self.fault {
            if (r, c) == (row, col) {
                v += delta;
            }
        }
        v
    }
}

/// Unit tangent direction: the normalized projection of the standard basis
/// vector that keeps the most length.
fn fault_direction(st: &InducedStructure) -> AmbientVector {
    let m = st.base().len();
    let mut best = AmbientVector::zeros(m);
    let mut best_norm = -1.0;
    for k in 0..m {
        let e = AmbientVector::from_fn(m, |i, _| if i == k { 1.0 } else { 0.0 });
        let t = crate::submanifold::remove_normal(&e, st.frame());
        let n = t.norm();
        if n > best_norm {
            best_norm = n;
            best = t;
        }
    }
    best / best_norm
}

struct Accumulator {
    id: &'static str,
    samples: u64,
    max: f64,
    worst: Option<WorstCase>,
}

impl Accumulator {
    fn new(id: &'static str) -> Self {
        Accumulator {
            id,
            samples: 0,
            max: 0.0,
            worst: None,
        }
    }

    fn push(&mut self, residual: f64, at: WorstCase) {
        self.samples += 1;
        // strict comparison keeps the earliest sample on ties; NaN beats everything
        let worse = match self.worst {
            None => true,
            Some(_) => residual > self.max || (residual.is_nan() && !self.max.is_nan()),
        };
        if worse {
            self.max = residual;
            self.worst = Some(at);
        }
    }

    fn finish(self, tol: &Tolerances) -> IdentityReport {
        let tolerance = tol.get(self.id);
        IdentityReport {
            identity_id: self.id.to_string(),
            samples: self.samples,
            max_residual: self.max,
            tolerance,
            passed: self.max <= tolerance,
            worst_case: self.worst,
        }
    }
}

/// One residual for one identity at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleResidual {
    pub identity: &'static str,
    pub tangent_index: Option<usize>,
    pub residual: f64,
}

fn lin_scale(x: &AmbientVector) -> f64 {
    1f64.max(x.norm())
}

fn bilin_scale(x: &AmbientVector, y: &AmbientVector) -> f64 {
    1f64.max(x.norm() * y.norm())
}

fn require_product_structure(s: &AmbientStructure) -> Result<()> {
    if s.epsilon() != 1.0 {
        return Err(Error::RequiresProductStructure);
    }
    Ok(())
}

fn draw_tangents<S: Submanifold>(
    sub: &S,
    pt: &crate::submanifold::ManifoldPoint,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<TangentVector> {
    (0..n).map(|_| sub.sample_tangent(pt, rng)).collect()
}

/// Every hypersurface residual at the point drawn from `point_seed`.
pub fn codim1_point_residuals(
    s: &AmbientStructure,
    sph: &Hypersphere,
    point_seed: u64,
    n_tangents: usize,
    fault: Option<Fault>,
) -> Result<Vec<SampleResidual>> {
    require_product_structure(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    let pt = sph.sample_point(&mut rng);
    let st = induce_at_point(s, sph, &pt)?;
    let tangents = draw_tangents(sph, &pt, n_tangents, &mut rng);
    let view = View::new(&st, fault);
    let a11 = view.a(0, 0);
    let xi1 = view.xi(0);

    let mut out = Vec::with_capacity(2 + 5 * n_tangents);
    let point_level = |identity, residual| SampleResidual {
        identity,
        tangent_index: None,
        residual,
    };
    // u_1(xi_1) = 1 - a_11^2
    let r = (view.u(&xi1)[0] - (1.0 - a11 * a11)).abs() / lin_scale(&xi1);
    out.push(point_level("2.2.iii", r));
    // P xi_1 = -a_11 xi_1
    let r = (view.p(&xi1) + a11 * &xi1).amax() / lin_scale(&xi1);
    out.push(point_level("2.2.iv", r));

    for (k, x) in tangents.iter().enumerate() {
        let x = x.coords();
        let y = tangents[(k + 1) % tangents.len()].coords();
        let at = |identity, residual| SampleResidual {
            identity,
            tangent_index: Some(k),
            residual,
        };
        let px = view.p(x);
        let py = view.p(y);
        let ux = view.u(x)[0];
        let uy = view.u(y)[0];
        // P^2 X = X - u_1(X) xi_1
        let mut d = view.p(&px) - x;
        d.axpy(ux, &xi1, 1.0);
        out.push(at("2.2.i", d.amax() / lin_scale(x)));
        // u_1(P X) = -a_11 u_1(X)
        out.push(at("2.2.ii", (view.u(&px)[0] + a11 * ux).abs() / lin_scale(x)));
        // u_1(X) = g(X, xi_1)
        out.push(at("2.3.i", (ux - x.dot(&xi1)).abs() / lin_scale(x)));
        // g(P X, Y) = g(X, P Y)
        out.push(at("2.3.ii", (px.dot(y) - x.dot(&py)).abs() / bilin_scale(x, y)));
        // g(P X, P Y) = g(X, Y) - u_1(X) u_1(Y)
        out.push(at(
            "2.3.iii",
            (px.dot(&py) - (x.dot(y) - ux * uy)).abs() / bilin_scale(x, y),
        ));
    }
    Ok(out)
}

/// Every codimension-2 residual at the point drawn from `point_seed`.
pub fn codim2_point_residuals(
    s: &AmbientStructure,
    prod: &ProductOfSpheres,
    point_seed: u64,
    n_tangents: usize,
    fault: Option<Fault>,
) -> Result<Vec<SampleResidual>> {
    require_product_structure(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    let pt = prod.sample_point(&mut rng);
    let st = induce_at_point(s, prod, &pt)?;
    let tangents = draw_tangents(prod, &pt, n_tangents, &mut rng);
    let view = View::new(&st, fault);
    let (a11, a12, a21, a22) = (view.a(0, 0), view.a(0, 1), view.a(1, 0), view.a(1, 1));
    let xi1 = view.xi(0);
    let xi2 = view.xi(1);
    let u_xi1 = view.u(&xi1);
    let u_xi2 = view.u(&xi2);
    let xi_scale = 1f64.max(xi1.norm()).max(xi2.norm());

    let mut out = Vec::with_capacity(6 + 8 * n_tangents);
    let point_level = |identity, residual| SampleResidual {
        identity,
        tangent_index: None,
        residual,
    };
    let cross = -a11 * a12 - a12 * a22;
    out.push(point_level("2.6.iv", (u_xi1[0] - (1.0 - a11 * a11 - a12 * a12)).abs() / xi_scale));
    out.push(point_level("2.6.v", (u_xi1[1] - cross).abs() / xi_scale));
    out.push(point_level("2.6.vi", (u_xi2[0] - cross).abs() / xi_scale));
    out.push(point_level("2.6.vii", (u_xi2[1] - (1.0 - a12 * a12 - a22 * a22)).abs() / xi_scale));
    // P xi_1 = -a_11 xi_1 - a_12 xi_2
    let mut d = view.p(&xi1);
    d.axpy(a11, &xi1, 1.0);
    d.axpy(a12, &xi2, 1.0);
    out.push(point_level("2.6.viii", d.amax() / xi_scale));
    // P xi_2 = -a_12 xi_1 - a_22 xi_2
    let mut d = view.p(&xi2);
    d.axpy(a12, &xi1, 1.0);
    d.axpy(a22, &xi2, 1.0);
    out.push(point_level("2.6.ix", d.amax() / xi_scale));

    for (k, x) in tangents.iter().enumerate() {
        let x = x.coords();
        let y = tangents[(k + 1) % tangents.len()].coords();
        let at = |identity, residual| SampleResidual {
            identity,
            tangent_index: Some(k),
            residual,
        };
        let px = view.p(x);
        let py = view.p(y);
        let ux = view.u(x);
        let uy = view.u(y);
        let upx = view.u(&px);
        // P^2 X = X - u_1(X) xi_1 - u_2(X) xi_2
        let mut d = view.p(&px) - x;
        d.axpy(ux[0], &xi1, 1.0);
        d.axpy(ux[1], &xi2, 1.0);
        out.push(at("2.6.i", d.amax() / lin_scale(x)));
        out.push(at("2.6.ii", (upx[0] + a11 * ux[0] + a12 * ux[1]).abs() / lin_scale(x)));
        out.push(at("2.6.iii", (upx[1] + a21 * ux[0] + a22 * ux[1]).abs() / lin_scale(x)));
        out.push(at("2.7.i", (ux[0] - x.dot(&xi1)).abs() / lin_scale(x)));
        out.push(at("2.7.ii", (ux[1] - x.dot(&xi2)).abs() / lin_scale(x)));
        out.push(at("2.7.iii", (px.dot(y) - x.dot(&py)).abs() / bilin_scale(x, y)));
        let rhs = x.dot(y) - ux[0] * uy[0] - ux[1] * uy[1];
        out.push(at("2.7.iv", (px.dot(&py) - rhs).abs() / bilin_scale(x, y)));
    }
    Ok(out)
}

fn aggregate<F>(
    ids: &[&'static str],
    n_points: usize,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
    mut per_point: F,
) -> Result<Vec<IdentityReport>>
where
    F: FnMut(u64) -> Result<Vec<SampleResidual>>,
{
    let mut accs: Vec<Accumulator> = ids.iter().map(|&id| Accumulator::new(id)).collect();
    for point_index in 0..n_points {
        let point_seed = rng.next_u64();
        for sample in per_point(point_seed)? {
            let slot = ids
                .iter()
                .position(|&id| id == sample.identity)
                .expect("residual for an unlisted identity");
            accs[slot].push(
                sample.residual,
                WorstCase {
                    point_index,
                    tangent_index: sample.tangent_index,
                    point_seed,
                },
            );
        }
    }
    Ok(accs.into_iter().map(|a| a.finish(tol)).collect())
}

/// The seven hypersurface identities over sampled points and tangents.
pub fn check_codim1(
    s: &AmbientStructure,
    sph: &Hypersphere,
    sampling: Sampling,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
) -> Result<Vec<IdentityReport>> {
    check_codim1_faulty(s, sph, sampling, rng, tol, None)
}

pub fn check_codim1_faulty(
    s: &AmbientStructure,
    sph: &Hypersphere,
    sampling: Sampling,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
    fault: Option<Fault>,
) -> Result<Vec<IdentityReport>> {
    require_product_structure(s)?;
    if s.dim() != sph.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: sph.ambient_dim(),
            actual: s.dim(),
        });
    }
    aggregate(&CODIM1_IDS, sampling.n_points, rng, tol, |seed| {
        codim1_point_residuals(s, sph, seed, sampling.n_tangents.max(1), fault)
    })
}

/// The thirteen codimension-2 identities over sampled points and tangents.
pub fn check_codim2(
    s: &AmbientStructure,
    prod: &ProductOfSpheres,
    sampling: Sampling,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
) -> Result<Vec<IdentityReport>> {
    check_codim2_faulty(s, prod, sampling, rng, tol, None)
}

pub fn check_codim2_faulty(
    s: &AmbientStructure,
    prod: &ProductOfSpheres,
    sampling: Sampling,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
    fault: Option<Fault>,
) -> Result<Vec<IdentityReport>> {
    require_product_structure(s)?;
    if s.dim() != prod.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: prod.ambient_dim(),
            actual: s.dim(),
        });
    }
    aggregate(&CODIM2_IDS, sampling.n_points, rng, tol, |seed| {
        codim2_point_residuals(s, prod, seed, sampling.n_tangents.max(1), fault)
    })
}

/// Direct-versus-chained discrepancy at the point drawn from `point_seed`.
pub fn chain_point_residual(
    s: &AmbientStructure,
    outer: &Hypersphere,
    inner: &ProductOfSpheres,
    point_seed: u64,
    variant: ChainVariant,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    let pt = inner.sample_point(&mut rng);
    let probes = draw_tangents(inner, &pt, DEFAULT_PROBES, &mut rng);
    let direct = induce_at_point(s, inner, &pt)?;
    let chained = chain_induce_variant(s, outer, inner, &pt, variant)?;
    compare_structures(&direct, &chained, &probes)
}

pub fn check_theorem_chain(
    s: &AmbientStructure,
    outer: &Hypersphere,
    inner: &ProductOfSpheres,
    n_points: usize,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
) -> Result<IdentityReport> {
    check_theorem_chain_variant(s, outer, inner, n_points, rng, tol, ChainVariant::Faithful)
}

pub fn check_theorem_chain_variant(
    s: &AmbientStructure,
    outer: &Hypersphere,
    inner: &ProductOfSpheres,
    n_points: usize,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
    variant: ChainVariant,
) -> Result<IdentityReport> {
    check_nesting(outer, inner)?;
    let reports = aggregate(&[CHAIN_ID], n_points, rng, tol, |seed| {
        Ok(vec![SampleResidual {
            identity: CHAIN_ID,
            tangent_index: None,
            residual: chain_point_residual(s, outer, inner, seed, variant)?,
        }])
    })?;
    Ok(reports.into_iter().next().expect("one report"))
}

fn rel_scalar(closed: f64, engine: f64) -> f64 {
    (closed - engine).abs() / 1f64.max(engine.abs())
}

fn rel_vector(closed: &AmbientVector, engine: &AmbientVector, scale: f64) -> f64 {
    (closed - engine).amax() / 1f64.max(scale)
}

/// Closed-form hypersphere formulas against the engine at the point drawn from `point_seed`.
pub fn example1_point_residuals(
    s: &BlockSwap,
    sph: &Hypersphere,
    point_seed: u64,
    n_tangents: usize,
) -> Result<Vec<SampleResidual>> {
    let ambient = AmbientStructure::BlockSwap(s.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    let pt = sph.sample_point(&mut rng);
    let tangents = draw_tangents(sph, &pt, n_tangents, &mut rng);
    let st = induce_at_point(&ambient, sph, &pt)?;
    let cf = example1_structure(s, sph, &pt)?;
    let mut out = vec![
        SampleResidual {
            identity: "ex1.a11",
            tangent_index: None,
            residual: rel_scalar(cf.a11, st.a()[(0, 0)]),
        },
        SampleResidual {
            identity: "ex1.xi1",
            tangent_index: None,
            residual: rel_vector(&cf.xi1, &st.xi()[0], st.xi()[0].norm()),
        },
    ];
    for (k, x) in tangents.iter().enumerate() {
        let act = example1_u_and_p(s, sph, &pt, x)?;
        let scale = lin_scale(x.coords());
        out.push(SampleResidual {
            identity: "ex1.u1",
            tangent_index: Some(k),
            residual: (act.u1 - st.evaluate_u(x)?[0]).abs() / scale,
        });
        out.push(SampleResidual {
            identity: "ex1.P",
            tangent_index: Some(k),
            residual: rel_vector(&act.px, st.apply_p(x)?.coords(), scale),
        });
    }
    Ok(out)
}

/// Closed-form product formulas against the engine at the point drawn from `point_seed`.
pub fn example2_point_residuals(
    s: &BlockSwap,
    prod: &ProductOfSpheres,
    point_seed: u64,
    n_tangents: usize,
) -> Result<Vec<SampleResidual>> {
    let ambient = AmbientStructure::BlockSwap(s.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    let pt = prod.sample_point(&mut rng);
    let tangents = draw_tangents(prod, &pt, n_tangents, &mut rng);
    let st = induce_at_point(&ambient, prod, &pt)?;
    let cf = example2_structure(s, prod, &pt)?;
    let mut out = vec![
        SampleResidual {
            identity: "ex2.a",
            tangent_index: None,
            residual: (&cf.a - st.a()).amax() / 1f64.max(st.a().amax()),
        },
        SampleResidual {
            identity: "ex2.xi1",
            tangent_index: None,
            residual: rel_vector(&cf.xi1, &st.xi()[0], st.xi()[0].norm()),
        },
        SampleResidual {
            identity: "ex2.xi2",
            tangent_index: None,
            residual: rel_vector(&cf.xi2, &st.xi()[1], st.xi()[1].norm()),
        },
    ];
    for (k, x) in tangents.iter().enumerate() {
        let act = example2_u_and_p(s, prod, &pt, x)?;
        let u = st.evaluate_u(x)?;
        let scale = lin_scale(x.coords());
        out.push(SampleResidual {
            identity: "ex2.u1",
            tangent_index: Some(k),
            residual: (act.u1 - u[0]).abs() / scale,
        });
        out.push(SampleResidual {
            identity: "ex2.u2",
            tangent_index: Some(k),
            residual: (act.u2 - u[1]).abs() / scale,
        });
        out.push(SampleResidual {
            identity: "ex2.P",
            tangent_index: Some(k),
            residual: rel_vector(&act.px, st.apply_p(x)?.coords(), scale),
        });
    }
    Ok(out)
}

pub fn check_example1(
    s: &BlockSwap,
    sph: &Hypersphere,
    sampling: Sampling,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
) -> Result<Vec<IdentityReport>> {
    aggregate(&EXAMPLE1_IDS, sampling.n_points, rng, tol, |seed| {
        example1_point_residuals(s, sph, seed, sampling.n_tangents.max(1))
    })
}

pub fn check_example2(
    s: &BlockSwap,
    prod: &ProductOfSpheres,
    sampling: Sampling,
    rng: &mut dyn RngCore,
    tol: &Tolerances,
) -> Result<Vec<IdentityReport>> {
    if s.uniform_eps().is_none() {
        return Err(Error::MixedSigns);
    }
    aggregate(&EXAMPLE2_IDS, sampling.n_points, rng, tol, |seed| {
        example2_point_residuals(s, prod, seed, sampling.n_tangents.max(1))
    })
}
