use apstruct::geometry::{validate_structure, Involution};
use apstruct::induction::{chain_induce, compare_structures, induce_at_point};
use apstruct::{AmbientStructure, BlockSwap, Hypersphere, ProductOfSpheres, Sign, Submanifold};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn swap() -> impl Strategy<Value = BlockSwap> {
    (1usize..=3, 2usize..=4)
        .prop_flat_map(|(p, q)| (prop::collection::vec(sign(), p), prop::collection::vec(sign(), q)))
        .prop_map(|(nu, eps)| BlockSwap::new(nu, eps).unwrap())
}

fn radius() -> impl Strategy<Value = f64> {
    0.2f64..3.0
}

/// Checks both defining decompositions at `pt` for each probe.
fn reconstruction_defect<S: Submanifold>(s: &AmbientStructure, sub: &S, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pt = sub.sample_point(&mut rng);
    let st = induce_at_point(s, sub, &pt).unwrap();
    let frame = st.frame();
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let x = sub.sample_tangent(&pt, &mut rng);
        let mut rebuilt = st.apply_p(&x).unwrap().coords().clone();
        for (u, n) in st.evaluate_u(&x).unwrap().iter().zip(frame) {
            rebuilt.axpy(*u, n, 1.0);
        }
        worst = worst.max((s.apply(x.coords()).unwrap() - rebuilt).amax() / x.coords().norm().max(1.0));
    }
    for (alpha, n) in frame.iter().enumerate() {
        let mut rebuilt = st.xi()[alpha].clone() * s.epsilon();
        for (beta, nb) in frame.iter().enumerate() {
            rebuilt.axpy(st.a()[(alpha, beta)], nb, 1.0);
        }
        worst = worst.max((s.apply(n).unwrap() - rebuilt).amax());
    }
    worst
}

/// Symmetric orthogonal matrix `Q D Q^T` with random signs on `D`.
fn random_involution(m: usize, seed: u64) -> Involution {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    let q = g.qr().q();
    let d = DMatrix::from_diagonal(&DVector::from_fn(m, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 }));
    Involution::new(&q * d * q.transpose(), Sign::Plus).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn induced_p_is_tangent(s in swap(), r in radius(), r3 in radius(), seed in any::<u64>()) {
        let prod = ProductOfSpheres::new(s.p(), s.q(), r, r3).unwrap();
        let ambient = AmbientStructure::from(s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = prod.sample_point(&mut rng);
        let st = induce_at_point(&ambient, &prod, &pt).unwrap();
        let x = prod.sample_tangent(&pt, &mut rng);
        let px = st.apply_p(&x).unwrap();
        for n in st.frame() {
            prop_assert!(px.coords().dot(n).abs() < 1e-12 * x.coords().norm().max(1.0));
        }
        for xi in st.xi() {
            for n in st.frame() {
                prop_assert!(xi.dot(n).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn a_is_symmetric(s in swap(), r in radius(), r3 in radius(), seed in any::<u64>()) {
        let prod = ProductOfSpheres::new(s.p(), s.q(), r, r3).unwrap();
        let ambient = AmbientStructure::from(s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = prod.sample_point(&mut rng);
        let st = induce_at_point(&ambient, &prod, &pt).unwrap();
        prop_assert!((st.a() - st.a().transpose()).amax() < 1e-14);
    }

    #[test]
    fn decomposition_reconstructs_ambient_action(s in swap(), r in radius(), r3 in radius(), seed in any::<u64>()) {
        let prod = ProductOfSpheres::new(s.p(), s.q(), r, r3).unwrap();
        let sph = prod.enclosing_sphere();
        let ambient = AmbientStructure::from(s);
        prop_assert!(reconstruction_defect(&ambient, &prod, seed) < 1e-12);
        prop_assert!(reconstruction_defect(&ambient, &sph, seed) < 1e-12);
    }

    #[test]
    fn chained_equals_direct(s in swap(), r in radius(), r3 in radius(), seed in any::<u64>()) {
        let prod = ProductOfSpheres::new(s.p(), s.q(), r, r3).unwrap();
        let outer = prod.enclosing_sphere();
        let ambient = AmbientStructure::from(s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = prod.sample_point(&mut rng);
        let probes: Vec<_> = (0..6).map(|_| prod.sample_tangent(&pt, &mut rng)).collect();
        let direct = induce_at_point(&ambient, &prod, &pt).unwrap();
        let chained = chain_induce(&ambient, &outer, &prod, &pt).unwrap();
        prop_assert!(compare_structures(&direct, &chained, &probes).unwrap() < 1e-10);
    }

    #[test]
    fn generic_involution_decomposes(m in 3usize..=8, radius in radius(), seed in any::<u64>()) {
        let inv = random_involution(m, seed);
        let ambient = AmbientStructure::from(inv);
        prop_assert!(validate_structure(&ambient, 1e-12).unwrap().is_ok());
        let sph = Hypersphere::new(m, radius).unwrap();
        prop_assert!(reconstruction_defect(&ambient, &sph, seed ^ 1) < 1e-12);
    }
}

#[test]
fn chain_rejects_unnested_spheres() {
    let ambient = AmbientStructure::from(BlockSwap::plain(1, 2).unwrap());
    let prod = ProductOfSpheres::new(1, 2, 1.0, 1.0).unwrap();
    let outer = Hypersphere::new(4, 1.5).unwrap();
    let pt = prod.point(DVector::from_vec(vec![1.0, 0.0, 1.0, 0.0])).unwrap();
    assert!(chain_induce(&ambient, &outer, &prod, &pt).is_err());
}
