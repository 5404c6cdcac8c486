use std::f64::consts::PI;

use ferriq::circuit_ir::{clifford_depth, is_unitary4, Angle, Gate};
use ferriq::ffft::*;
use ferriq::jw::OrderingMap;
use ferriq::perm::{CascadeMode, CompileOptions};
use ferriq::verify::fock::{max_abs, unitary_of, CMatrix};
use ferriq::verify::{mode_transfer, verify_permutation_circuit};
use num_complex::Complex64;

fn dft(n: usize) -> CMatrix {
    let s = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |k, x| Complex64::from_polar(s, 2.0 * PI * (k * x % n) as f64 / n as f64))
}

fn system_block(t: &CMatrix, n: usize) -> CMatrix {
    t.view((0, 0), (n, n)).into_owned()
}

fn serial() -> CompileOptions {
    CompileOptions { cascade: CascadeMode::Serial, ..Default::default() }
}

#[test]
fn f2_matches_printed_matrix() {
    let m = f2_gate();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let want = [[1.0, 0.0, 0.0, 0.0], [0.0, h, h, 0.0], [0.0, h, -h, 0.0], [0.0, 0.0, 0.0, -1.0]];
    for r in 0..4 {
        for k in 0..4 {
            assert!((m[r][k] - Complex64::new(want[r][k], 0.0)).norm() < 1e-15);
        }
    }
    assert!(is_unitary4(&m, 1e-12));
}

#[test]
fn f2_squared_is_identity_on_single_particle_block() {
    let m = f2_gate();
    for r in 1..3 {
        for k in 1..3 {
            let v: Complex64 = (1..3).map(|j| m[r][j] * m[j][k]).sum();
            let want = if r == k { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-12);
        }
    }
}

#[test]
fn two_modes_is_single_f2() {
    let (c, plan) = build_ffft_1d(1);
    assert_eq!(c.instructions.len(), 1);
    assert!(matches!(c.instructions[0].gate, Gate::Unitary2 { .. }));
    assert_eq!(plan.levels.len(), 1);
}

#[test]
fn transfer_equals_dft() {
    for n in 1..=6u32 {
        let (c, plan) = build_ffft_1d(n);
        let modes = 1 << n;
        let t = mode_transfer(&c).unwrap();
        let diff = max_abs(&(system_block(&t.u, modes) - dft(modes)));
        assert!(diff < 1e-10, "n={n}: {diff}");
        assert_eq!(plan.levels.len(), n as usize);
        assert_eq!(plan.interleave_layers(), 3 * (n as usize - 1));
    }
}

#[test]
fn dft4_entries() {
    let (c, _) = build_ffft_1d(2);
    let t = mode_transfer(&c).unwrap();
    let i = Complex64::new(0.0, 1.0);
    let want = [[1.0.into(), 1.0.into(), 1.0.into(), 1.0.into()], [1.0.into(), i, -Complex64::from(1.0), -i]];
    for (k, row) in want.iter().enumerate() {
        for (x, w) in row.iter().enumerate() {
            assert!((t.u[(k, x)] - w * 0.5).norm() < 1e-12, "({k},{x})");
        }
    }
}

#[test]
fn fock_single_particle_sector_n8() {
    let (c, _) = build_ffft_1d_with(3, &serial());
    assert!(c.n_qubits() <= 12);
    let u = unitary_of(&c).unwrap();
    let f = dft(8);
    let vac = u[(0, 0)];
    assert!((vac.norm() - 1.0).abs() < 1e-9);
    for x in 0..8 {
        for k in 0..8 {
            let got = u[(1 << k, 1 << x)];
            assert!((got - f[(k, x)] * vac).norm() < 1e-9, "x={x} k={k}: {got}");
        }
    }
}

#[test]
fn ffft_2d_equals_dft_tensor() {
    for l in [2usize, 4] {
        let c = build_ffft_2d(l).unwrap();
        let t = mode_transfer(&c).unwrap();
        let want = dft(l).kronecker(&dft(l));
        let diff = max_abs(&(system_block(&t.u, l * l) - want));
        assert!(diff < 1e-10, "L={l}: {diff}");
    }
}

#[test]
fn ffft_2d_rectangular() {
    let c = build_ffft_2d_rect(2, 4, &CompileOptions::default()).unwrap();
    let t = mode_transfer(&c).unwrap();
    let diff = max_abs(&(system_block(&t.u, 8) - dft(2).kronecker(&dft(4))));
    assert!(diff < 1e-10, "{diff}");
    assert!(build_ffft_2d(3).is_err());
}

#[test]
fn clifford_depth_grows_logarithmically() {
    let depths: Vec<usize> = (2..=7).map(|n| clifford_depth(&build_ffft_1d(n).0)).collect();
    let per_level: Vec<usize> = depths.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(per_level.iter().all(|&d| d == per_level[0]), "{depths:?}");
}

#[test]
fn plan_angles_are_dyadic() {
    for n in 1..=8 {
        let plan = plan_ffft_1d(n);
        assert!(plan.angles().all(|a| a.is_dyadic()));
        for level in &plan.levels {
            assert!(level.gates.iter().all(|g| g.den == level.block as u64 && g.a < g.den / 2));
        }
    }
}

#[test]
fn table_ccz_values() {
    let want = [(2, 0, "0.000"), (4, 0, "0.000"), (8, 1, "0.125"), (16, 4, "0.250"), (32, 11, "0.344"), (64, 26, "0.406"), (128, 57, "0.445"), (256, 120, "0.469")];
    let rows = ccz_table(8);
    for (row, (n, ccz, pm)) in rows.iter().zip(want) {
        assert_eq!((row.n_modes, row.ccz), (n, ccz));
        assert_eq!(format!("{:.3}", row.per_mode), pm);
    }
}

#[test]
fn table_interleave_values() {
    let rows = interleave_table(8);
    let fswap: Vec<u64> = rows.iter().map(|r| r.fswap_div3).collect();
    let djw: Vec<u64> = rows.iter().map(|r| r.djw_div3).collect();
    assert_eq!(fswap, [0, 1, 6, 28, 120, 496, 2016, 8128]);
    assert_eq!(djw, [0, 2, 10, 26, 58, 122, 250, 506]);
}

#[test]
fn djw_cost_bounded_by_six_per_mode() {
    for n in 3..=20 {
        assert!(djw_interleave_cost(n) <= 6 * (1u64 << n));
    }
}

#[test]
fn rz_recursion_matches_cascade_classifier() {
    for n in 1..=10 {
        let modes = 1u64 << n;
        let angles: Vec<Angle> = (0..modes / 2).map(|a| Angle::turns(a as i64, modes)).collect();
        assert_eq!(catalysis_cascade_ccz(&angles).unwrap(), ccz_cost_rz(n), "n={n}");
    }
}

#[test]
fn classifier_rejects_non_dyadic() {
    assert!(pauli_class(&Angle::turns(1, 3)).is_err());
    assert!(pauli_class(&Angle::Radians(0.1)).is_err());
    assert_eq!(pauli_class(&Angle::turns(1, 4)).unwrap(), None);
}

fn rz(theta: f64) -> [Complex64; 2] {
    [Complex64::from_polar(1.0, -theta / 2.0), Complex64::from_polar(1.0, theta / 2.0)]
}

#[test]
fn paired_angles_differ_by_paulis() {
    // Rz(-θ) = X Rz(θ) X, and Rz(2π - θ) = -Rz(-θ).
    for b in 2..=64u32 {
        for a in 0..b {
            let t = 2.0 * PI * a as f64 / b as f64;
            let t2 = 2.0 * PI * (b - a) as f64 / b as f64;
            let (d1, d2) = (rz(t), rz(t2));
            assert!((d2[0] + d1[1]).norm() < 1e-12 && (d2[1] + d1[0]).norm() < 1e-12, "{a}/{b}");
        }
    }
}

#[test]
fn catalysis_report_sums_levels() {
    let plan = plan_ffft_1d(5);
    let r = catalysis_report(&plan).unwrap();
    assert_eq!(r.levels.len(), 5);
    assert_eq!(r.f2_total, r.levels.iter().map(|l| l.f2_ccz).sum::<u64>());
    assert_eq!(r.rz_total, r.levels.iter().map(|l| l.rz_ccz).sum::<u64>());
    assert_eq!(r.total, r.f2_total + r.rz_total);
    assert_eq!(r.levels[4].rz_ccz, ccz_cost_rz(5));
    assert_eq!(r.levels[4].f2_ccz, 16);
}

#[test]
fn full_k_negate_is_involution() {
    for l in [2usize, 4, 8] {
        let p = momentum_pairing_permutation(l, MomentumPairing::FullKNegate).unwrap();
        assert!(p.compose(&p).unwrap().is_identity());
    }
}

#[test]
fn kx_negate_is_rowwise_reflection() {
    let l = 4;
    let p = momentum_pairing_permutation(l, MomentumPairing::KxNegate).unwrap();
    for row in 0..l {
        assert_eq!(p.apply(row * l), row * l);
        for j in 1..l {
            assert_eq!(p.apply(row * l + j), row * l + (l - j));
        }
    }
}

#[test]
fn spin_split_pairs_opposite_momenta() {
    let l = 4;
    let m = l * l;
    let p = momentum_pairing_permutation(l, MomentumPairing::SpinSplit).unwrap();
    for k in 0..m {
        let (ky, kx) = (k / l, k % l);
        let neg = ((l - ky) % l) * l + (l - kx) % l;
        assert_eq!(p.apply(2 * k), k);
        assert_eq!(p.apply(2 * neg + 1), m + k);
    }
}

#[test]
fn momentum_pairings_compile_and_verify() {
    for kind in [MomentumPairing::KxNegate, MomentumPairing::FullKNegate, MomentumPairing::SpinSplit] {
        for l in [2usize, 4] {
            let c = compile_momentum_pairing(l, kind, &CompileOptions::default()).unwrap();
            let p = momentum_pairing_permutation(l, kind).unwrap();
            let m0 = OrderingMap::identity(p.n());
            let m1 = m0.after(&p).unwrap();
            let r = verify_permutation_circuit(&c, &m0, &m1);
            assert!(r.pass, "{kind:?} L={l}: {:?}", r.failures.first());
        }
    }
}

#[test]
fn two_particle_sector_matches_slater_determinants() {
    let (c, _) = build_ffft_1d_with(3, &serial());
    let u = unitary_of(&c).unwrap();
    for k in 0..=3 {
        let e = fock_sector_error(&u, &dft_matrix(8), k);
        assert!(e < 1e-9, "k={k}: {e}");
    }
    assert!(fock_sector_error(&u, &dft_matrix(8).transpose().map(|z| z.conj()), 2) > 0.1);
}

#[test]
fn dft_helpers_agree_with_local_reference() {
    assert!(max_abs(&(dft_matrix(8) - dft(8))) < 1e-15);
    assert!(max_abs(&(dft_2d(2, 4) - dft(2).kronecker(&dft(4)))) < 1e-15);
}
