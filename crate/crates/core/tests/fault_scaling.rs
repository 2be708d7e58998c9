use apstruct::verification::{check_codim1_faulty, check_codim2_faulty, Fault, IdentityReport, Sampling, Tolerances};
use apstruct::{AmbientStructure, BlockSwap, Hypersphere, ProductOfSpheres, Sign};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DELTAS: [f64; 7] = [1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2];

fn faults(delta: f64, codim: usize) -> Vec<Fault> {
    let mut out = vec![Fault::P { delta }];
    for i in 0..codim {
        out.push(Fault::Xi { index: i, delta });
        out.push(Fault::U { index: i, delta });
        for j in 0..codim {
            out.push(Fault::A { row: i, col: j, delta });
        }
    }
    out
}

fn ambient() -> AmbientStructure {
    BlockSwap::new(vec![Sign::Plus, Sign::Minus], vec![Sign::Plus, Sign::Minus, Sign::Plus])
        .unwrap()
        .into()
}

fn run(fault: Fault, codim: usize) -> Vec<IdentityReport> {
    let s = ambient();
    let tol = Tolerances::default();
    let sampling = Sampling::new(20, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    if codim == 1 {
        check_codim1_faulty(&s, &Hypersphere::new(7, 1.3).unwrap(), sampling, &mut rng, &tol, Some(fault)).unwrap()
    } else {
        let prod = ProductOfSpheres::new(2, 3, 0.9, 1.4).unwrap();
        check_codim2_faulty(&s, &prod, sampling, &mut rng, &tol, Some(fault)).unwrap()
    }
}

/// Every identity that reacts to a fault reacts in proportion to its size;
/// the others stay at rounding level.
fn assert_linear(codim: usize) {
    let n_kinds = faults(1.0, codim).len();
    for kind in 0..n_kinds {
        let runs: Vec<Vec<IdentityReport>> = DELTAS.iter().map(|&d| run(faults(d, codim)[kind], codim)).collect();
        let mut sensitive = 0;
        for id in 0..runs[0].len() {
            let slopes: Vec<f64> = DELTAS
                .iter()
                .zip(&runs)
                .map(|(d, reps)| reps[id].max_residual / d)
                .collect();
            let reference = slopes[DELTAS.len() / 2];
            let label = format!("{:?} {}", faults(1.0, codim)[kind], runs[0][id].identity_id);
            if reference < 1e-6 {
                for (d, reps) in DELTAS.iter().zip(&runs) {
                    assert!(reps[id].max_residual < 1e-12 + 1e-4 * d, "{label}: {slopes:?}");
                }
                continue;
            }
            sensitive += 1;
            for slope in &slopes {
                assert!((slope / reference - 1.0).abs() < 0.05, "{label}: {slopes:?}");
            }
        }
        assert!(sensitive > 0, "fault kind {kind} left every identity untouched");
    }
}

#[test]
fn hypersurface_residuals_scale_linearly() {
    assert_linear(1);
}

#[test]
fn codim2_residuals_scale_linearly() {
    assert_linear(2);
}
