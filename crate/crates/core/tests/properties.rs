use num_complex::Complex64;
use proptest::prelude::*;
use qnute::{
    bs_tridiagonal, build_bs_pauli, decompose_dense, encode_samples, measure_s, multiply_strings, sigma_basis,
    split_terms, trotter_step, BSParams, BasisMode, Boundary, Grid, HamiltonianTerm, Matrix, PauliString, PauliSum,
    QnuteConfig, ScaledState, StateVector, SymmetricEigen, TermStrategy,
};

fn string(n: usize) -> impl Strategy<Value = PauliString> {
    (0u64..1 << n, 0u64..1 << n).prop_map(move |(x, z)| PauliString::from_masks(n, x, z))
}

fn coef() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn sum(n: usize) -> impl Strategy<Value = PauliSum<f64>> {
    prop::collection::vec((coef(), string(n)), 0..8)
        .prop_map(move |terms| PauliSum::from_terms(n, terms).unwrap())
}

fn sized_sum(max_n: usize) -> impl Strategy<Value = PauliSum<f64>> {
    (1..=max_n).prop_flat_map(sum)
}

fn state(n: usize) -> impl Strategy<Value = StateVector<f64>> {
    prop::collection::vec(coef(), 1 << n)
        .prop_filter("non-zero", |v| v.iter().any(|a| a.norm() > 1e-3))
        .prop_map(|v| StateVector::from_amplitudes(v).unwrap())
}

fn dense(s: &PauliSum<f64>) -> Matrix<Complex64> {
    s.dense_matrix().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn string_products_match_dense((p, q) in (1usize..=4).prop_flat_map(|n| (string(n), string(n)))) {
        let (phase, r) = multiply_strings::<f64>(&p, &q).unwrap();
        let want = p.dense_matrix::<f64>().unwrap().matmul(&q.dense_matrix().unwrap());
        let got = r.dense_matrix::<f64>().unwrap().scale(phase);
        prop_assert_eq!(got.max_abs_diff(&want), 0.0);
    }

    #[test]
    fn sum_products_match_dense((a, b) in (1usize..=3).prop_flat_map(|n| (sum(n), sum(n)))) {
        let got = dense(&a.mul(&b).unwrap());
        let want = dense(&a).matmul(&dense(&b));
        prop_assert!(got.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn decompose_inverts_dense(s in sized_sum(4)) {
        let back = decompose_dense(&dense(&s)).unwrap();
        prop_assert_eq!(back.len(), s.len());
        for (c, p) in s.terms() {
            prop_assert!((back.coefficient(p) - c).norm() < 1e-12);
        }
    }

    #[test]
    fn hermiticity_detection(
        terms in (1usize..=3).prop_flat_map(|n| prop::collection::vec((any::<bool>(), -2.0f64..2.0, string(n)), 1..6))
    ) {
        // Real coefficients give Hermitian sums; an imaginary one usually breaks it.
        let n = terms[0].2.num_qubits();
        let s = PauliSum::from_terms(
            n,
            terms.iter().map(|&(imag, v, p)| (if imag { Complex64::new(0.0, v) } else { Complex64::new(v, 0.0) }, p)),
        )
        .unwrap();
        let m = dense(&s);
        prop_assert_eq!(s.is_hermitian(1e-12), m.is_hermitian(1e-12));
        prop_assert_eq!(s.is_hermitian(1e-12), s.sub(&s.adjoint()).unwrap().is_empty());
    }

    #[test]
    fn encoding_is_scale_equivariant(
        v in prop::collection::vec(0.0f64..10.0, 8).prop_filter("non-zero", |v| v.iter().any(|x| *x > 1e-3)),
        lambda in 0.01f64..100.0,
    ) {
        let a = encode_samples(&v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| x * lambda).collect();
        let b = encode_samples(&scaled).unwrap();
        prop_assert!((b.scale - lambda * a.scale).abs() < 1e-12 * b.scale);
        for (x, y) in a.state.amplitudes().iter().zip(b.state.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn expectations_are_conjugate_symmetric(
        (psi, p, q) in (1usize..=3).prop_flat_map(|n| (state(n), string(n), string(n)))
    ) {
        let pq = PauliSum::from_string(Complex64::new(1.0, 0.0), p).mul(&PauliSum::from_string(Complex64::new(1.0, 0.0), q)).unwrap();
        let qp = PauliSum::from_string(Complex64::new(1.0, 0.0), q).mul(&PauliSum::from_string(Complex64::new(1.0, 0.0), p)).unwrap();
        let a = psi.expectation(&pq).unwrap();
        let b = psi.expectation(&qp).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn rotations_match_dense_exponential(
        (psi, p) in (1usize..=3).prop_flat_map(|n| (state(n), string(n))),
        angle in -3.0f64..3.0,
    ) {
        let got = psi.apply_pauli_rotation(&p, angle).unwrap();
        let gen = p.dense_matrix::<f64>().unwrap().scale(Complex64::new(0.0, -angle));
        let want = gen.expm().matvec(psi.amplitudes());
        for (x, y) in got.amplitudes().iter().zip(&want) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn steps_keep_unit_norm_and_psd_gram(
        (psi, h) in (1usize..=3).prop_flat_map(|n| (state(n), sum(n))),
        dt in 1e-3f64..2e-2,
    ) {
        let n = psi.num_qubits();
        let basis = sigma_basis(n, &(0..n).collect::<Vec<_>>(), BasisMode::Full).unwrap();
        let s = measure_s(&psi, &basis);
        let k = basis.len();
        let sym = Matrix::from_fn(k, k, |i, j| s[(i, j)].re + s[(j, i)].re);
        prop_assert!(sym.sub(&sym.transpose()).max_abs() < 1e-12);
        let eig = SymmetricEigen::new(&sym);
        prop_assert!(eig.values[0] > -1e-10);

        let h = h.scale_real(1.0 / (1.0 + h.terms().iter().map(|(c, _)| c.norm()).sum::<f64>()));
        let cfg = QnuteConfig::new(dt, 1, n);
        let input = ScaledState::new(psi, 1.0).unwrap();
        let (out, report) = trotter_step(&input, &HamiltonianTerm::full(h), &cfg).unwrap();
        prop_assert!((out.state.norm() - 1.0).abs() < 1e-10);
        prop_assert!(report.residual < 1e-8);
    }

    #[test]
    fn split_terms_reconstruct(h in sum(4), size in 1usize..=4, stride in 1usize..=3) {
        for strategy in [TermStrategy::Single, TermStrategy::Windows { size, stride }] {
            let terms = split_terms(&h, strategy).unwrap();
            let mut acc = PauliSum::zero(4);
            for t in &terms {
                acc = acc.add(&t.pauli).unwrap();
            }
            prop_assert!(acc.sub(&h).unwrap().is_empty());
        }
    }

    #[test]
    fn pauli_form_matches_tridiagonal(
        n in 2usize..=5,
        x0 in 0.0f64..50.0,
        width in 10.0f64..300.0,
        r in 0.0f64..0.2,
        sigma in 0.0f64..0.8,
        linear in any::<bool>(),
    ) {
        let grid = Grid::new(x0, x0 + width, n).unwrap();
        let p = BSParams::new(r, sigma).unwrap();
        let boundary = if linear { Boundary::Linear } else { Boundary::Central };
        let got = build_bs_pauli(&grid, &p, boundary).unwrap().dense_matrix().unwrap();
        let want = bs_tridiagonal(&grid, &p, boundary).dense().to_complex();
        let scale = bs_tridiagonal(&grid, &p, boundary).dense().max_abs().max(1.0);
        prop_assert!(got.max_abs_diff(&want) <= 1e-10 * scale);
    }

    #[test]
    fn linear_data_follows_the_boundary_ode(
        n in 2usize..=5,
        a in -3.0f64..3.0,
        b in -100.0f64..100.0,
        r in 0.0f64..0.2,
        sigma in 0.0f64..0.8,
    ) {
        let grid = Grid::new(0.0, 150.0, n).unwrap();
        let p = BSParams::new(r, sigma).unwrap();
        let u: Vec<f64> = grid.points().iter().map(|x| a * x + b).collect();
        let h = build_bs_pauli(&grid, &p, Boundary::Linear).unwrap();
        let u: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let du: Vec<f64> = h.dense_matrix().unwrap().matvec(&u).iter().map(|z| z.re).collect();
        // d/dτ [a x + b e^{−rτ}] at τ = 0
        let last = grid.num_points() - 1;
        prop_assert!((du[0] + r * b).abs() < 1e-8 * (1.0 + b.abs()));
        prop_assert!((du[last] + r * b).abs() < 1e-8 * (1.0 + b.abs() + a.abs() * 150.0));
    }
}
