use std::f64::consts::PI;

use batchbandit::linalg::{max_eigenvalue, min_eigenvalue, quad_form_inv, solve_spd, SymMatrix, Vector};
use proptest::prelude::*;

/// `BᵀB + shift·I` for a random square `B`.
fn arb_spd(n: usize, shift: f64) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |b| {
        SymMatrix::from_upper(n, |i, j| {
            let s: f64 = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum();
            s + if i == j { shift } else { 0.0 }
        })
        .unwrap()
    })
}

fn arb_sym(n: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-3.0..3.0f64, n * n)
        .prop_map(move |v| SymMatrix::from_upper(n, |i, j| v[i * n + j]).unwrap())
}

/// Roots of the characteristic cubic of a symmetric 3×3 matrix, by the
/// trigonometric formula.
fn cubic_eigenvalues(a: &SymMatrix) -> [f64; 3] {
    let g = |i, j| a.get(i, j);
    let tr = g(0, 0) + g(1, 1) + g(2, 2);
    let minors = g(0, 0) * g(1, 1) - g(0, 1).powi(2) + g(0, 0) * g(2, 2) - g(0, 2).powi(2)
        + g(1, 1) * g(2, 2)
        - g(1, 2).powi(2);
    let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2).powi(2))
        - g(0, 1) * (g(0, 1) * g(2, 2) - g(1, 2) * g(0, 2))
        + g(0, 2) * (g(0, 1) * g(1, 2) - g(1, 1) * g(0, 2));
    // λ³ − tr λ² + minors λ − det, shifted by λ = y + tr/3
    let p = minors - tr * tr / 3.0;
    let q = -2.0 * tr.powi(3) / 27.0 + tr * minors / 3.0 - det;
    let mut roots = if p.abs() < 1e-14 {
        [tr / 3.0; 3]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        [0, 1, 2].map(|k| tr / 3.0 + r * (phi - 2.0 * PI * k as f64 / 3.0).cos())
    };
    roots.sort_by(f64::total_cmp);
    roots
}

proptest! {
    #[test]
    fn solve_recovers_planted_vector(a in (1usize..6).prop_flat_map(|n| arb_spd(n, 0.5)), seed in any::<u64>()) {
        let n = a.dim();
        let mut rng = batchbandit::rng::RngStream::new(seed, 0);
        let x = Vector::new((0..n).map(|_| rng.std_normal()).collect()).unwrap();
        let b = Vector::new(a.mul_vec(x.as_slice())).unwrap();
        let got = solve_spd(&a, &b).unwrap();
        for i in 0..n {
            prop_assert!((got[i] - x[i]).abs() <= 1e-8 * (1.0 + x[i].abs()));
        }
        let q = quad_form_inv(&a, &b).unwrap();
        prop_assert!((q - x.dot(&b)).abs() <= 1e-8 * (1.0 + q.abs()));
    }

    #[test]
    fn extreme_eigenvalues_are_superadditive(a in arb_sym(4), b in arb_sym(4)) {
        let s = a.add(&b);
        prop_assert!(min_eigenvalue(&s) >= min_eigenvalue(&a) + min_eigenvalue(&b) - 1e-10);
        prop_assert!(max_eigenvalue(&s) <= max_eigenvalue(&a) + max_eigenvalue(&b) + 1e-10);
    }

    #[test]
    fn jacobi_matches_cubic_roots(a in arb_sym(3)) {
        let want = cubic_eigenvalues(&a);
        let got = a.eigenvalues();
        for (g, w) in got.iter().zip(want) {
            prop_assert!((g - w).abs() <= 1e-7, "{:?} vs {:?}", got, want);
        }
    }

    #[test]
    fn spectrum_sums_to_trace(a in (1usize..7).prop_flat_map(arb_sym)) {
        let tr: f64 = (0..a.dim()).map(|i| a.get(i, i)).sum();
        let ev: f64 = a.eigenvalues().iter().sum();
        prop_assert!((tr - ev).abs() <= 1e-9 * (1.0 + tr.abs()));
    }
}
