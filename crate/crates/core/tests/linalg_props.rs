mod common;

use common::*;
use matmoment::linalg::{eigenvalues, is_psd, psd_threshold, symmetrize};
use matmoment::Tolerance;
use matmoment_oracle::{oracle_psd_with, random_gram, random_symmetric, Dense};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quad_form(m: &Dense, v: &[f64]) -> f64 {
    m.iter()
        .zip(v)
        .map(|(row, vi)| vi * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
        .sum()
}

fn unit_vector(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

#[test]
fn psd_verdict_bounds_every_rayleigh_quotient() {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut accepted = 0;
    for i in 0..60 {
        let p = 1 + i % 6;
        let m = if i % 2 == 0 {
            random_gram(&mut rng, p, 1 + i % p)
        } else {
            random_symmetric(&mut rng, p)
        };
        let s = sym(&m);
        if !is_psd(&s, &tol).unwrap().psd {
            continue;
        }
        accepted += 1;
        let floor = -psd_threshold(&s, &tol);
        for _ in 0..1000 {
            let v = unit_vector(&mut rng, p);
            assert!(quad_form(&m, &v) >= floor, "matrix {i}");
        }
    }
    assert!(accepted >= 30);
}

/// Outside the band `-0.2 * rho(M) < lambda_min < 0` Rayleigh sampling with
/// 2000 trials finds a negative direction with overwhelming probability for
/// `p <= 4`, so the two verdicts must coincide.
#[test]
fn is_psd_agrees_with_sampling_oracle() {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut compared = 0;
    for i in 0..10_000 {
        let p = 1 + i % 4;
        let m = match i % 3 {
            0 => random_gram(&mut rng, p, p),
            1 => random_gram(&mut rng, p, 1 + (i / 3) % p),
            _ => random_symmetric(&mut rng, p),
        };
        let s = sym(&m);
        let ev = eigenvalues(&s).unwrap();
        let rho = ev[0].abs().max(ev[p - 1].abs());
        let in_band = ev[0] < 0.0 && ev[0] > -0.2 * rho && !is_psd(&s, &tol).unwrap().psd;
        if in_band {
            continue;
        }
        compared += 1;
        assert_eq!(
            is_psd(&s, &tol).unwrap().psd,
            oracle_psd_with(&m, 2000, &mut rng),
            "matrix {i}: spectrum {ev:?}"
        );
    }
    assert!(compared >= 9_000, "only {compared} matrices outside the band");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetrize_is_idempotent(entries in prop::collection::vec(-1e3..1e3f64, 16)) {
        let raw: Dense = entries.chunks(4).map(<[f64]>::to_vec).collect();
        let (once, _) = symmetrize(&raw).unwrap();
        let (twice, defect) = symmetrize(&once.to_rows()).unwrap();
        prop_assert_eq!(once, twice);
        prop_assert_eq!(defect, 0.0);
    }

    #[test]
    fn scaled_identity_spectrum_is_exact(c in -1e6..1e6f64, p in 1usize..7) {
        let ev = eigenvalues(&sym(&scale(&identity(p), c))).unwrap();
        prop_assert!(ev.iter().all(|&x| x == c));
    }

    #[test]
    fn gram_matrices_are_psd(seed in any::<u64>(), p in 1usize..7, rank in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gram(&mut rng, p, rank);
        prop_assert!(is_psd(&sym(&g), &Tolerance::default()).unwrap().psd);
    }
}
