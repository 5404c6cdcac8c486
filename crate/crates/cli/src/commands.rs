use ferriq::circuit_ir::{cost_report, CompiledCircuit};
use ferriq::ffft::{
    build_ffft_1d_with, build_ffft_2d_rect, catalysis_report, ccz_table, compile_momentum_pairing, dft_2d, dft_matrix,
    djw_interleave_cost, fock_sector_error, fswap_interleave_cost, interleave_table, momentum_pairing_permutation,
};
use ferriq::jw::{OrderingMap, Permutation};
use ferriq::majorana::{compile_majorana_permutation_with, MajoranaPermutation};
use ferriq::perm::{
    compile_permutation_with, synth_reflection_2d, CascadeMode, CompileOptions, StructuredKind, StructuredPerm,
};
use ferriq::syk::{
    compile_trotter_cycle, cycle_cost, log_times, sample_complete_syk, sample_interleave_syk_with, sample_sparse_syk,
    sample_sparse_syk_erdos_renyi,
    schedule, spectral_form_factor, trotter_reference, CycleOptions, SykInstance,
};
use ferriq::verify::fock::max_abs;
use ferriq::verify::{
    mode_transfer, unitary_of, verify_channel, verify_majorana_circuit, verify_permutation_circuit, VerificationReport,
};
use serde_json::{json, Value};

use crate::output::{emit, invalid, to_pretty, Failure, Meta};
use crate::{
    Command, FfftArgs, Format, ModelArg, ModelArgs, OutputArgs, PairingArgs, PermArgs, SykCommand, SykCompileArgs,
    SykSampleArgs, SykSffArgs, TableArg, TablesArgs, VerifyArgs,
};

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::CompilePerm(a) => compile_perm(&a),
        Command::CompileMperm(a) => compile_mperm(&a),
        Command::CompileFfft(a) => compile_ffft(&a),
        Command::CompilePairing(a) => compile_pairing(&a),
        Command::Syk(SykCommand::Sample(a)) => syk_sample(&a),
        Command::Syk(SykCommand::Compile(a)) => syk_compile(&a),
        Command::Syk(SykCommand::Sff(a)) => syk_sff(&a),
        Command::Tables(a) => tables(&a),
        Command::Verify(a) => verify(&a),
    }
}

fn report_json(r: &VerificationReport) -> Value {
    let mut v = serde_json::to_value(r).expect("report serializes");
    // Wall-clock timings would break byte-identical reruns.
    v.as_object_mut().expect("object").remove("timings");
    v
}

/// Writes a circuit artifact, then turns a failed check into exit code 3.
fn write_circuit(
    meta: &Meta,
    out: &OutputArgs,
    c: &CompiledCircuit,
    extra: Vec<(&str, Value)>,
    passed: Option<bool>,
) -> Result<(), Failure> {
    let cost = cost_report(c);
    let text = match out.format.unwrap_or(Format::Json) {
        Format::Csv => format!("{}{}", meta.csv_header(), cost.to_csv()),
        Format::Json => {
            let mut doc = json!({
                "meta": meta.to_value(),
                "circuit": c.to_json_value(),
                "cost": serde_json::to_value(&cost).expect("cost serializes"),
            });
            let obj = doc.as_object_mut().expect("object");
            for (k, v) in extra {
                obj.insert(k.to_string(), v);
            }
            to_pretty(&doc)
        }
    };
    emit(out.out.as_deref(), &text)?;
    match passed {
        Some(false) => Err(Failure::Verification("verification failed".into())),
        _ => Ok(()),
    }
}

fn compile_perm(a: &PermArgs) -> Result<(), Failure> {
    let meta = Meta::new("compile-perm", a.seed, a);
    let p = Permutation::parse(&a.perm).map_err(invalid)?;
    let mut c = compile_permutation_with(&p, a.strategy.into(), &a.circuit.options());
    if a.materialize_swaps {
        c = c.materialize_swaps();
    }
    let mut extra = Vec::new();
    let mut passed = None;
    if a.verify {
        let r = verify_permutation_circuit(&c, &OrderingMap::identity(p.n()), &OrderingMap::from_permutation(&p));
        passed = Some(r.pass);
        extra.push(("verification", report_json(&r)));
    }
    write_circuit(&meta, &a.output, &c, extra, passed)
}

fn compile_mperm(a: &PermArgs) -> Result<(), Failure> {
    let meta = Meta::new("compile-mperm", a.seed, a);
    let p = Permutation::parse(&a.perm).map_err(invalid)?;
    let images = p.images().to_vec();
    let mp = MajoranaPermutation::new(p).map_err(invalid)?;
    let mut c = compile_majorana_permutation_with(&mp, a.strategy.into(), &a.circuit.options());
    if a.materialize_swaps {
        c = c.materialize_swaps();
    }
    let mut extra = Vec::new();
    let mut passed = None;
    if a.verify {
        let r = verify_majorana_circuit(&c, &images);
        passed = Some(r.pass);
        extra.push(("verification", report_json(&r)));
    }
    write_circuit(&meta, &a.output, &c, extra, passed)
}

fn build_ffft(n: u32, dim: u8, opts: &CompileOptions) -> Result<CompiledCircuit, Failure> {
    if dim == 1 {
        Ok(build_ffft_1d_with(n, opts).0)
    } else {
        build_ffft_2d_rect(1 << n, 1 << n, opts).map_err(invalid)
    }
}

fn compile_ffft(a: &FfftArgs) -> Result<(), Failure> {
    let meta = Meta::new("compile-ffft", a.seed, a);
    let opts = a.circuit.options();
    let c = build_ffft(a.n, a.dim, &opts)?;
    let l = 1usize << a.n;
    let mut extra = Vec::new();
    if a.dim == 1 {
        let (_, plan) = build_ffft_1d_with(a.n, &opts);
        let report = catalysis_report(&plan).map_err(invalid)?;
        extra.push(("catalysis", serde_json::to_value(report).expect("report serializes")));
    }
    let mut passed = None;
    if let Some(k) = a.verify_sector {
        let f = if a.dim == 1 { dft_matrix(l) } else { dft_2d(l, l) };
        let modes = f.nrows();
        if k > modes {
            return Err(invalid(format!("sector {k} exceeds {modes} modes")));
        }
        let (error, tol, method) = if k == 1 {
            let t = mode_transfer(&c).map_err(invalid)?;
            (max_abs(&(t.u.view((0, 0), (modes, modes)).into_owned() - &f)), 1e-10, "mode transfer")
        } else {
            let serial = CompileOptions { cascade: CascadeMode::Serial, ..opts };
            let u = unitary_of(&build_ffft(a.n, a.dim, &serial)?).map_err(invalid)?;
            (fock_sector_error(&u, &f, k), 1e-9, "dense Fock sector with serial cascades")
        };
        let pass = error < tol;
        passed = Some(pass);
        extra.push((
            "verification",
            json!({ "pass": pass, "sector": k, "max_error": error, "tolerance": tol, "method": method }),
        ));
    }
    write_circuit(&meta, &a.output, &c, extra, passed)
}

fn compile_pairing(a: &PairingArgs) -> Result<(), Failure> {
    let meta = Meta::new("compile-pairing", a.seed, a);
    let l = a.l as usize;
    let c = compile_momentum_pairing(l, a.kind.into(), &a.circuit.options()).map_err(invalid)?;
    let p = momentum_pairing_permutation(l, a.kind.into()).map_err(invalid)?;
    let mut extra = vec![("permutation", json!(p.images()))];
    let mut passed = None;
    if a.verify {
        let r = verify_permutation_circuit(&c, &OrderingMap::identity(p.n()), &OrderingMap::from_permutation(&p));
        passed = Some(r.pass);
        extra.push(("verification", report_json(&r)));
    }
    write_circuit(&meta, &a.output, &c, extra, passed)
}

fn sample(m: &ModelArgs, seed: u64) -> Result<SykInstance, Failure> {
    match m.model {
        ModelArg::Sparse if m.erdos_renyi => sample_sparse_syk_erdos_renyi(m.n, m.d, m.j, seed),
        ModelArg::Sparse => sample_sparse_syk(m.n, m.d, m.j, seed),
        ModelArg::Complete => sample_complete_syk(m.n, m.j, seed),
        ModelArg::Interleave => sample_interleave_syk_with(m.n, m.rounds, m.j, seed, m.layout.into()),
    }
    .map_err(invalid)
}

fn syk_sample(a: &SykSampleArgs) -> Result<(), Failure> {
    let meta = Meta::new("syk-sample", a.model.seed, a);
    let inst = sample(&a.model, a.model.seed)?;
    let doc = json!({ "meta": meta.to_value(), "instance": serde_json::to_value(&inst).expect("instance serializes") });
    emit(a.output.out.as_deref(), &to_pretty(&doc))
}

fn syk_compile(a: &SykCompileArgs) -> Result<(), Failure> {
    let meta = Meta::new("syk-compile", a.model.seed, a);
    if a.verify && a.open_frame {
        return Err(invalid("--verify compares against the closed cycle; drop --open-frame"));
    }
    let inst = sample(&a.model, a.model.seed)?;
    let sched = schedule(&inst);
    let opts = CycleOptions { close_frame: !a.open_frame, strategy: a.strategy.into(), compile: a.circuit.options() };
    let c = compile_trotter_cycle(&sched, a.dt, &opts).map_err(invalid)?;
    let mut extra = vec![("syk_cost", serde_json::to_value(cycle_cost(&sched, &c)).expect("cost serializes"))];
    let mut passed = None;
    if a.verify {
        let want = trotter_reference(&sched, a.dt).map_err(invalid)?;
        let result = verify_channel(&c, &want, 1e-8);
        if let Err(e) = &result {
            if e.contains("oracle cap") {
                return Err(invalid(e));
            }
        }
        passed = Some(result.is_ok());
        extra.push(("verification", json!({ "pass": result.is_ok(), "tolerance": 1e-8, "detail": result.err() })));
    }
    write_circuit(&meta, &a.output, &c, extra, passed)
}

fn syk_sff(a: &SykSffArgs) -> Result<(), Failure> {
    let meta = Meta::new("syk-sff", a.model.seed, a);
    if !(a.tmin > 0.0 && a.tmax > a.tmin) {
        return Err(invalid("need 0 < tmin < tmax"));
    }
    let instances = (0..a.instances).map(|i| sample(&a.model, a.model.seed + i)).collect::<Result<Vec<_>, _>>()?;
    let times = log_times(a.tmin, a.tmax, a.points as usize);
    let curve = spectral_form_factor(&instances, &times, a.beta).map_err(invalid)?;
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = meta.csv_header();
            s.push_str("t,mean,stderr\n");
            for i in 0..times.len() {
                s.push_str(&format!("{},{},{}\n", curve.times[i], curve.mean[i], curve.stderr[i]));
            }
            s
        }
        Format::Json => {
            let (k, dip) = curve.dip();
            to_pretty(&json!({
                "meta": meta.to_value(),
                "times": curve.times,
                "mean": curve.mean,
                "stderr": curve.stderr,
                "dip": { "t": curve.times[k], "value": dip },
            }))
        }
    };
    emit(a.output.out.as_deref(), &text)
}

fn asymptotics_rows(max_exp: u32) -> Result<String, Failure> {
    let mut s = String::from("l,method,ffft_1d,reflect_2d,ffft_2d\n");
    for e in 1..=max_exp {
        let l = 1usize << e;
        let qubits = (l * l) as f64;
        let reflection = StructuredPerm::new(StructuredKind::Reflect2D(l, l)).map_err(invalid)?;
        let swap_1d = fswap_interleave_cost(e) as f64 / l as f64;
        let swap_reflect = 3.0 * reflection.perm.inversions() as f64 / qubits;
        let djw_1d = djw_interleave_cost(e) as f64 / l as f64;
        let djw_reflect = cost_report(&synth_reflection_2d(l, l).map_err(invalid)?).two_qubit_clifford_count as f64 / qubits;
        for (method, f1, r) in [("swap_network", swap_1d, swap_reflect), ("dynamic_jw", djw_1d, djw_reflect)] {
            s.push_str(&format!("{l},{method},{f1:.3},{r:.3},{:.3}\n", 2.0 * f1 + 2.0 * r));
        }
    }
    Ok(s)
}

fn tables(a: &TablesArgs) -> Result<(), Failure> {
    let meta = Meta::new("tables", 0, a);
    if a.output.format == Some(Format::Json) {
        return Err(invalid("tables are emitted as CSV only"));
    }
    let body = match a.which {
        TableArg::S1Ccz => {
            let mut s = String::from("n_modes,ccz,per_mode\n");
            for r in ccz_table(a.n_max.unwrap_or(8)) {
                s.push_str(&format!("{},{},{:.3}\n", r.n_modes, r.ccz, r.per_mode));
            }
            s
        }
        TableArg::S2Interleave => {
            let mut s = String::from("n_modes,fswap_div3,djw_div3\n");
            for r in interleave_table(a.n_max.unwrap_or(8)) {
                s.push_str(&format!("{},{},{}\n", r.n_modes, r.fswap_div3, r.djw_div3));
            }
            s
        }
        TableArg::Table1Asymptotics => asymptotics_rows(a.n_max.unwrap_or(5))?,
    };
    emit(a.output.out.as_deref(), &format!("{}{body}", meta.csv_header()))
}

fn parse_list(s: &str) -> Result<Vec<usize>, Failure> {
    Ok(Permutation::parse(s).map_err(invalid)?.images().to_vec())
}

fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let meta = Meta::new("verify", 0, a);
    let raw = std::fs::read_to_string(&a.circuit).map_err(|e| Failure::Io(format!("{}: {e}", a.circuit.display())))?;
    let value: Value = serde_json::from_str(&raw).map_err(invalid)?;
    let circuit_text = match value.get("circuit") {
        Some(inner) => inner.to_string(),
        None => raw,
    };
    let c = CompiledCircuit::from_json(&circuit_text).map_err(invalid)?;
    c.validate().map_err(invalid)?;
    let report = if let Some(images) = &a.majorana {
        verify_majorana_circuit(&c, &parse_list(images)?)
    } else {
        let m1 = a.m1.as_deref().ok_or_else(|| invalid("give --m1 or --majorana"))?;
        let m1 = OrderingMap::new(parse_list(m1)?).map_err(invalid)?;
        let m0 = match &a.m0 {
            Some(s) => OrderingMap::new(parse_list(s)?).map_err(invalid)?,
            None => OrderingMap::identity(m1.n()),
        };
        verify_permutation_circuit(&c, &m0, &m1)
    };
    let doc = json!({ "meta": meta.to_value(), "verification": report_json(&report) });
    emit(a.output.out.as_deref(), &to_pretty(&doc))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} failing Majoranas", report.failures.len().max(1))))
    }
}
