use ferriq::circuit_ir::{cost_report, Gate};
use ferriq::jw::Permutation;
use ferriq::perm::{AGroupMode, CascadeMode, CompileOptions, Strategy};
use ferriq::syk::*;
use ferriq::verify::fock::{max_abs, CMatrix};
use ferriq::verify::{branch_with_outcomes, channel_branches, unitary_equal_up_to_phase, verify_channel};
use num_complex::Complex64;

fn serial_cycle(close_frame: bool) -> CycleOptions {
    CycleOptions {
        close_frame,
        strategy: Strategy::Auto,
        compile: CompileOptions { cascade: CascadeMode::Serial, ..Default::default() },
    }
}

fn term(idx: [usize; 4], j: f64) -> SykTerm {
    SykTerm { idx, j }
}

fn instance(n: usize, terms: Vec<SykTerm>) -> SykInstance {
    SykInstance { model: SykModel::Sparse, n_majorana: n, terms, degree: 0, seed: 0, layers: Vec::new() }
}

#[test]
fn degree_one_on_eight_is_two_disjoint_terms() {
    let inst = sample_sparse_syk(8, 1, 1.0, 3).unwrap();
    assert_eq!(inst.terms.len(), 2);
    assert_eq!(inst.degrees(), vec![1; 8]);
}

#[test]
fn sparse_degree_is_exact() {
    let inst = sample_sparse_syk(400, 4, 1.0, 11).unwrap();
    inst.validate().unwrap();
    assert_eq!(inst.terms.len(), 400);
    assert!(inst.degrees().iter().all(|&d| d == 4));
}

#[test]
fn coupling_variance_matches_formula() {
    let n = 400;
    let inst = sample_sparse_syk(n, 100, 1.0, 5).unwrap();
    let js: Vec<f64> = inst.terms.iter().map(|t| t.j).collect();
    assert_eq!(js.len(), 10_000);
    let mean = js.iter().sum::<f64>() / js.len() as f64;
    let var = js.iter().map(|j| (j - mean).powi(2)).sum::<f64>() / (js.len() - 1) as f64;
    let want = 6.0 / (n as f64).powi(3);
    assert!((var / want - 1.0).abs() < 0.05, "{var} vs {want}");
}

#[test]
fn samplers_are_deterministic() {
    assert_eq!(sample_sparse_syk(24, 3, 1.0, 9).unwrap(), sample_sparse_syk(24, 3, 1.0, 9).unwrap());
    assert_eq!(sample_interleave_syk(14, 4, 1.0, 9).unwrap(), sample_interleave_syk(14, 4, 1.0, 9).unwrap());
    assert_ne!(sample_sparse_syk(24, 3, 1.0, 9).unwrap(), sample_sparse_syk(24, 3, 1.0, 10).unwrap());
}

#[test]
fn bad_sizes_are_rejected() {
    assert!(matches!(sample_sparse_syk(7, 1, 1.0, 0), Err(SykError::BadSize(7))));
    assert!(matches!(sample_sparse_syk(4, 2, 1.0, 0), Err(SykError::Infeasible { .. })));
}

#[test]
fn complete_model_has_every_quadruple() {
    let inst = sample_complete_syk(10, 1.0, 0).unwrap();
    assert_eq!(inst.terms.len(), 210);
    inst.validate().unwrap();
}

#[test]
fn interleave_rounds_couple_consecutive_slots() {
    let inst = sample_interleave_syk(16, 1, 1.0, 4).unwrap();
    assert_eq!(inst.layers.len(), 1);
    let frame = inst.layers[0].frame.clone().unwrap();
    for (t, term) in inst.terms.iter().enumerate() {
        let mut slots: Vec<usize> = term.idx.iter().map(|&i| frame.apply(i)).collect();
        slots.sort_unstable();
        assert_eq!(slots, (4 * t..4 * t + 4).collect::<Vec<_>>());
    }
}

#[test]
fn disjoint_terms_take_one_color() {
    let inst = instance(8, vec![term([0, 1, 2, 3], 0.1), term([4, 5, 6, 7], 0.2)]);
    assert_eq!(color_interactions(&inst).classes.len(), 1);
}

#[test]
fn shared_majorana_needs_two_colors() {
    let inst = instance(8, vec![term([0, 1, 2, 3], 0.1), term([3, 4, 5, 6], 0.2)]);
    assert_eq!(color_interactions(&inst).classes.len(), 2);
}

#[test]
fn coloring_respects_degree_bound() {
    for seed in 0..5 {
        let inst = sample_sparse_syk(48, 4, 1.0, seed).unwrap();
        let s = color_interactions(&inst);
        assert!(s.classes.len() <= max_conflict_degree(&inst) + 1);
        assert_eq!(s.n_terms(), inst.terms.len());
        for class in &s.classes {
            let mut seen = std::collections::HashSet::new();
            assert!(class.terms.iter().flat_map(|t| t.idx).all(|i| seen.insert(i)));
        }
    }
}

#[test]
fn hamiltonian_is_hermitian() {
    for inst in [sample_sparse_syk(12, 3, 1.0, 1).unwrap(), sample_interleave_syk(14, 3, 1.0, 1).unwrap()] {
        let h = hamiltonian_dense(&inst).unwrap();
        assert!(max_abs(&(&h - h.adjoint())) < 1e-12);
    }
}

#[test]
fn single_local_term_is_one_rotation() {
    let inst = instance(4, vec![term([0, 1, 2, 3], 0.7)]);
    let s = color_interactions(&inst);
    let c = compile_trotter_cycle(&s, 0.1, &CycleOptions::default()).unwrap();
    assert_eq!(c.instructions.len(), 1);
    assert!(matches!(c.instructions[0].gate, Gate::Rzz(_)));
    let u = ferriq::verify::unitary_of(&c).unwrap();
    let want = trotter_reference(&s, 0.1).unwrap();
    assert!(unitary_equal_up_to_phase(&u, &want, 1e-12).unwrap());
}

#[test]
fn two_class_cycle_matches_product_of_exponentials() {
    let inst = instance(8, vec![term([0, 2, 5, 7], 0.9), term([1, 3, 4, 6], -0.4), term([0, 1, 4, 5], 0.6), term([2, 3, 6, 7], 0.3)]);
    let s = color_interactions(&inst);
    assert_eq!(s.classes.len(), 2);
    let c = compile_trotter_cycle(&s, 0.3, &serial_cycle(true)).unwrap();
    let want = trotter_reference(&s, 0.3).unwrap();
    verify_channel(&c, &want, 1e-8).unwrap();
}

#[test]
fn open_cycle_leaves_class_frame() {
    let inst = instance(8, vec![term([0, 2, 5, 7], 0.9), term([0, 1, 4, 5], 0.6)]);
    let s = color_interactions(&inst);
    let closed = compile_trotter_cycle(&s, 0.3, &serial_cycle(true)).unwrap();
    let open = compile_trotter_cycle(&s, 0.3, &serial_cycle(false)).unwrap();
    assert!(open.instructions.len() < closed.instructions.len());
    assert!(channel_branches(&open).is_ok());
}

#[test]
fn interleave_cycle_matches_reference() {
    let inst = sample_interleave_syk(8, 3, 1.0, 2).unwrap();
    let s = schedule(&inst);
    assert_eq!(s.classes.len(), 3);
    let c = compile_trotter_cycle(&s, 0.5, &serial_cycle(true)).unwrap();
    verify_channel(&c, &trotter_reference(&s, 0.5).unwrap(), 1e-8).unwrap();
}

fn zero_branch_unitary(c: &ferriq::circuit_ir::CompiledCircuit) -> CMatrix {
    let k = branch_with_outcomes(c, &vec![0; c.outcome_count()]).unwrap().expect("zero record has weight").kraus;
    let norm = (k.adjoint() * &k)[(0, 0)].re.sqrt();
    k / Complex64::new(norm, 0.0)
}

fn phase_aligned_error(u: &CMatrix, v: &CMatrix) -> f64 {
    let tr = (v.adjoint() * u).trace();
    let phase = tr / tr.norm();
    (u / phase - v).singular_values().max()
}

#[test]
fn trotter_error_is_second_order() {
    let inst = sample_sparse_syk(12, 3, 1.0, 21).unwrap();
    let s = schedule(&inst);
    assert!(s.classes.len() >= 2);
    let h = hamiltonian_dense(&inst).unwrap();
    let dts = [0.1, 0.05, 0.025];
    let errors: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let c = compile_trotter_cycle(&s, dt, &serial_cycle(true)).unwrap();
            let u = zero_branch_unitary(&c);
            phase_aligned_error(&u, &ferriq::verify::fock::expm_hermitian(&h, dt))
        })
        .collect();
    let xs: Vec<f64> = dts.iter().map(|d: &f64| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() < 0.15, "slope {slope}, errors {errors:?}");
}

#[test]
fn zero_hamiltonian_form_factor_is_one() {
    let inst = instance(8, vec![term([0, 1, 2, 3], 0.0)]);
    let curve = spectral_form_factor(&[inst], &[0.0, 1.0, 10.0], 0.0).unwrap();
    assert!(curve.mean.iter().all(|&v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn form_factor_starts_at_one() {
    let inst = sample_sparse_syk(12, 3, 1.0, 0).unwrap();
    let curve = spectral_form_factor(&[inst], &[0.0, 5.0], 0.0).unwrap();
    assert!((curve.mean[0] - 1.0).abs() < 1e-12);
    assert!(curve.mean[1] < 1.0);
}

#[test]
fn form_factor_cap() {
    let inst = sample_sparse_syk(20, 1, 1.0, 0).unwrap();
    assert!(matches!(spectral_form_factor(&[inst], &[1.0], 0.0), Err(SykError::CapExceeded(20))));
}

#[test]
fn interleave_cycle_cost_within_budget() {
    let compile = CompileOptions { cascade: CascadeMode::Serial, a_group: AGroupMode::DirectCz, ..Default::default() };
    let opts = CycleOptions { close_frame: false, strategy: Strategy::Auto, compile };
    for n in [64usize, 128] {
        for d in [2usize, 4] {
            let inst = sample_interleave_syk(n, d, 1.0, 1).unwrap();
            let s = schedule(&inst);
            let c = compile_trotter_cycle(&s, 0.1, &opts).unwrap();
            let cost = cycle_cost(&s, &c);
            assert!(cost.clifford_per_majorana <= 2.5 * d as f64, "n={n} d={d}: {}", cost.clifford_per_majorana);
            assert_eq!(cost_report(&c).rotation_count, inst.terms.len());
        }
    }
}

#[test]
fn packed_frame_places_terms_first() {
    let terms = vec![term([1, 3, 5, 7], 1.0)];
    let f = packed_frame(8, &terms);
    assert_eq!(f, Permutation::new(vec![4, 0, 5, 1, 6, 2, 7, 3]).unwrap());
}

#[test]
fn chain_layout_cycle_matches_reference() {
    let inst = sample_interleave_syk_with(8, 2, 1.0, 6, RoundLayout::Chain).unwrap();
    assert_eq!(inst.degree, 4);
    let s = schedule(&inst);
    assert_eq!(s.classes.len(), 4);
    let c = compile_trotter_cycle(&s, 0.4, &serial_cycle(true)).unwrap();
    verify_channel(&c, &trotter_reference(&s, 0.4).unwrap(), 1e-8).unwrap();
}

#[test]
fn bootstrap_of_identical_samples_is_zero() {
    let samples = vec![vec![1.0, 0.5, 0.7]; 10];
    assert_eq!(bootstrap_dip_stderr(&samples, 50, 1), 0.0);
}

#[test]
fn erdos_renyi_mean_degree() {
    let n = 200;
    let mut total = 0;
    for seed in 0..20 {
        let inst = sample_sparse_syk_erdos_renyi(n, 4, 1.0, seed).unwrap();
        inst.validate().unwrap();
        total += inst.terms.len();
        let s = schedule(&inst);
        assert_eq!(s.n_terms(), inst.terms.len());
    }
    let mean_degree = 4.0 * total as f64 / (20.0 * n as f64);
    assert!((mean_degree - 4.0).abs() < 0.2, "{mean_degree}");
    assert!(sample_sparse_syk_erdos_renyi(8, 40, 1.0, 0).is_err());
}
