use apstruct::{Hypersphere, ProductOfSpheres, Submanifold};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn orthonormality_defect(frame: &[DVector<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dot(b) - target).abs());
        }
    }
    worst
}

fn random_product(rng: &mut ChaCha8Rng) -> ProductOfSpheres {
    let p = rng.random_range(1..=3);
    let q = rng.random_range(2..=4);
    ProductOfSpheres::new(p, q, rng.random_range(0.1..3.0), rng.random_range(0.1..3.0)).unwrap()
}

#[test]
fn sphere_frames_are_unit_radial() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let m = rng.random_range(3..=10);
        let sph = Hypersphere::new(m, rng.random_range(0.1..3.0)).unwrap();
        let pt = sph.sample_point(&mut rng);
        let frame = sph.normal_frame(&pt).unwrap();
        assert_eq!(frame.len(), 1);
        assert!(orthonormality_defect(&frame) < 1e-12);
        let radial = pt.coords() / pt.coords().norm();
        assert!((&frame[0] - radial).amax() < 1e-12);
    }
}

#[test]
fn product_frames_are_orthonormal_and_second_normal_is_tangent_to_outer_sphere() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let prod = random_product(&mut rng);
        let pt = prod.sample_point(&mut rng);
        let frame = prod.normal_frame(&pt).unwrap();
        assert_eq!(frame.len(), 2);
        assert!(orthonormality_defect(&frame) < 1e-12);
        let scale = pt.coords().norm();
        assert!(frame[1].dot(pt.coords()).abs() / scale < 1e-12);
    }
}

#[test]
fn product_tangents_are_tangent_to_enclosing_sphere() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let prod = random_product(&mut rng);
        let outer = prod.enclosing_sphere();
        let pt = prod.sample_point(&mut rng);
        assert!(outer.contains(pt.coords(), 1e-12).unwrap());
        let x = prod.sample_tangent(&pt, &mut rng);
        let outer_pt = outer.point(pt.coords().clone()).unwrap();
        outer.tangent(&outer_pt, x.coords().clone()).unwrap();
    }
}

#[test]
fn projection_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let prod = random_product(&mut rng);
        let pt = prod.sample_point(&mut rng);
        let v = DVector::from_fn(prod.ambient_dim(), |_, _| rng.random_range(-2.0..2.0));
        let once = prod.project_tangent(&pt, &v).unwrap();
        let twice = prod.project_tangent(&pt, once.coords()).unwrap();
        assert!((once.coords() - twice.coords()).amax() < 1e-12);
    }
}

#[test]
fn radial_scaling_moves_membership_residual_linearly() {
    let sph = Hypersphere::new(5, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let pt = sph.sample_point(&mut rng);
    for t in [1e-8, 1e-6, 1e-4] {
        let moved = pt.coords() * (1.0 + t);
        let res = sph.membership_residual(&moved).unwrap();
        assert!((res / (2.0 * t) - 1.0).abs() < 1e-3, "t = {t}, residual = {res}");
        assert!(sph.point(moved).is_err() || t < 1e-10);
    }
}
