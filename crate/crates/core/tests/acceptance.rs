//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p qffnn --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qffnn::experiment::{
    run_network_table, Evaluation, ExperimentConfig, ModeSelection, LINE_TARGETS,
};
use qffnn::ffnn::{
    coherent_run_exact, conditional_output_probability, hybrid_run_exact, NetworkSpec,
};
use qffnn::neuron::{
    build_uw, hsgs, rew_state, simulate_activation, BinaryVector, NeuronSpec, PatternLabel,
};
use qffnn::noise::ReadoutErrorModel;
use qffnn::sim::{GateOp, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

type Check = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Check);

fn lab(l: u64, m: usize) -> BinaryVector {
    BinaryVector::from_label(PatternLabel(l), m).unwrap()
}

fn signs(l: u64, m: usize) -> Vec<i64> {
    (0..m)
        .map(|k| if l >> k & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// `(i·w)² / m²` from raw sign lists.
fn oracle(i: &[i64], w: &[i64]) -> f64 {
    let d: i64 = i.iter().zip(w).map(|(a, b)| a * b).sum();
    let m = i.len() as f64;
    (d * d) as f64 / (m * m)
}

/// Output probability of the line network from node probabilities: the
/// output node fires exactly when one hidden node fires.
fn line_oracle(label: u64) -> f64 {
    let i = signs(label, 4);
    let p1 = oracle(&i, &signs(12, 4));
    let p2 = oracle(&i, &signs(10, 4));
    p1 * (1.0 - p2) + (1.0 - p1) * p2
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn target_recognition() -> Check {
    let net = NetworkSpec::line_recognition();
    let mut worst: f64 = 0.0;
    for &l in &LINE_TARGETS {
        let input = lab(l, 4);
        for r in [
            hybrid_run_exact(&net, &input),
            coherent_run_exact(&net, &input),
        ] {
            let r = r.map_err(|e| e.to_string())?;
            worst = worst.max((r.p_out - 1.0).abs());
            ensure(r.classified_positive, || {
                format!("label {l} rejected in {} mode", r.mode)
            })?;
        }
    }
    ensure(worst < TOL, || format!("max |p_out - 1| = {worst:e}"))?;
    Ok(format!("max |p_out - 1| = {worst:.1e}"))
}

fn rejection() -> Check {
    let net = NetworkSpec::line_recognition();
    let mut zeros = Vec::new();
    let mut worst: f64 = 0.0;
    for l in (0..16).filter(|l| !LINE_TARGETS.contains(l)) {
        let expected = line_oracle(l);
        ensure(expected == 0.0 || expected == 0.375, || {
            format!("oracle gives {expected} at {l}")
        })?;
        if expected == 0.0 {
            zeros.push(l);
        }
        let input = lab(l, 4);
        for r in [
            hybrid_run_exact(&net, &input),
            coherent_run_exact(&net, &input),
        ] {
            let r = r.map_err(|e| e.to_string())?;
            worst = worst.max((r.p_out - expected).abs());
            ensure(!r.classified_positive, || {
                format!("label {l} accepted in {} mode", r.mode)
            })?;
        }
    }
    ensure(zeros == [0, 6, 9, 15], || format!("zeros at {zeros:?}"))?;
    ensure(worst < TOL, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "12 labels in {{0, 0.375}}, zeros at {zeros:?}, max deviation {worst:.1e}"
    ))
}

fn equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut nets = vec![NetworkSpec::line_recognition()];
    for _ in 0..50 {
        let (a, b) = (rng.random_range(0..16), rng.random_range(0..16));
        nets.push(NetworkSpec::three_node(lab(a, 4), lab(b, 4), lab(2, 2)).unwrap());
    }
    let mut worst: f64 = 0.0;
    for net in &nets {
        for l in 0..16 {
            let input = lab(l, 4);
            let h = hybrid_run_exact(net, &input)
                .map_err(|e| e.to_string())?
                .p_out;
            let c = coherent_run_exact(net, &input)
                .map_err(|e| e.to_string())?
                .p_out;
            worst = worst.max((h - c).abs());
        }
    }
    ensure(worst < TOL, || {
        format!("max |hybrid - coherent| = {worst:e}")
    })?;
    Ok(format!(
        "{} networks x 16 labels, max difference {worst:.1e}",
        nets.len()
    ))
}

fn single_neuron_oracle() -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for i in 0..16 {
        for w in 0..16 {
            let p = simulate_activation(&lab(i, 4), &lab(w, 4)).map_err(|e| e.to_string())?;
            worst = worst.max((p - oracle(&signs(i, 4), &signs(w, 4))).abs());
            n += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let (i, w) = (rng.random_range(0..256), rng.random_range(0..256));
        let p = simulate_activation(&lab(i, 8), &lab(w, 8)).map_err(|e| e.to_string())?;
        worst = worst.max((p - oracle(&signs(i, 8), &signs(w, 8))).abs());
        n += 1;
    }
    ensure(worst < TOL, || format!("max deviation {worst:e}"))?;
    Ok(format!("{n} pairs, max deviation {worst:.1e}"))
}

fn hsgs_correctness() -> Check {
    let mut worst: f64 = 0.0;
    let mut largest = 0;
    for n in [2usize, 3] {
        let m = 1usize << n;
        for l in 0..1u64 << m {
            let synth = hsgs(&lab(l, m));
            ensure(synth.gates.len() < m, || {
                format!("{} gates for label {l}, m = {m}", synth.gates.len())
            })?;
            largest = largest.max(synth.gates.len());
            let mut s = StateVector::new(n).unwrap();
            let hs: Vec<GateOp> = (0..n).map(GateOp::h).collect();
            s.apply_all(&hs).unwrap();
            s.apply_all(&synth.gates).unwrap();
            let target: Vec<Complex64> = signs(l, m)
                .iter()
                .map(|&e| Complex64::new(e as f64 / (m as f64).sqrt(), 0.0))
                .collect();
            let overlap: Complex64 = s
                .amplitudes()
                .iter()
                .zip(&target)
                .map(|(a, b)| a.conj() * b)
                .sum();
            worst = worst.max(1.0 - overlap.norm());
        }
    }
    ensure(worst < TOL, || format!("max 1 - |overlap| = {worst:e}"))?;
    Ok(format!(
        "272 sign vectors, at most {largest} gates, max 1 - |overlap| = {worst:.1e}"
    ))
}

fn uw_constraint() -> Check {
    let mut worst: f64 = 0.0;
    for w in 0..16 {
        let weight = lab(w, 4);
        let mut s = rew_state(&weight).unwrap();
        s.apply_all(&build_uw(&NeuronSpec::local(weight)))
            .map_err(|e| e.to_string())?;
        worst = worst.max((s.amplitude(3).norm() - 1.0).abs());
    }
    ensure(worst < TOL, || {
        format!("max ||<11|U_w|psi_w>| - 1| = {worst:e}")
    })?;
    Ok(format!("16 weights, max deviation {worst:.1e}"))
}

fn conditional_law() -> Check {
    let net = NetworkSpec::line_recognition();
    let mut worst: f64 = 0.0;
    for (b1, b2) in [(false, false), (false, true), (true, false), (true, true)] {
        let p = conditional_output_probability(&net, &[b1, b2]).map_err(|e| e.to_string())?;
        let expected = if b1 ^ b2 { 1.0 } else { 0.0 };
        worst = worst.max((p - expected).abs());
    }
    ensure(worst < TOL, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "p = b1 XOR b2 for all four patterns, max rounding {worst:.1e}"
    ))
}

fn single_node_impossibility() -> Check {
    let mut best: f64 = 0.0;
    for w in 0..16 {
        let ws = signs(w, 4);
        let worst_target = LINE_TARGETS
            .iter()
            .map(|&t| oracle(&signs(t, 4), &ws))
            .fold(f64::INFINITY, f64::min);
        for &t in &LINE_TARGETS {
            let p = simulate_activation(&lab(t, 4), &lab(w, 4)).map_err(|e| e.to_string())?;
            ensure((p - oracle(&signs(t, 4), &ws)).abs() < TOL, || {
                format!("simulation disagrees at w = {w}")
            })?;
        }
        ensure(worst_target <= 0.25, || {
            format!("weight {w} reaches {worst_target} on every target")
        })?;
        best = best.max(worst_target);
    }
    Ok(format!(
        "best single weight reaches min target probability {best}"
    ))
}

fn sampled_statistics() -> Check {
    let net = NetworkSpec::line_recognition();
    let config = ExperimentConfig {
        mode: ModeSelection::Both,
        evaluation: Evaluation::Sampled,
        shots: 8192,
        seed: 2024,
        ..Default::default()
    };
    let table = run_network_table(&net, &config).map_err(|e| e.to_string())?;
    let mut worst_z: f64 = 0.0;
    for row in &table.rows {
        let exact = line_oracle(row.label);
        for o in &row.outcomes {
            let sigma = (exact * (1.0 - exact) / 8192.0).sqrt();
            let dev = (o.p_out - exact).abs();
            ensure(dev <= 5.0 * sigma + 1e-9, || {
                format!(
                    "label {} {}: {} vs {exact} ({:.1} sigma)",
                    row.label,
                    o.mode,
                    o.p_out,
                    dev / sigma
                )
            })?;
            if sigma > 0.0 {
                worst_z = worst_z.max(dev / sigma);
            }
        }
    }
    ensure(table.all_correct(), || "some verdicts are wrong".into())?;
    Ok(format!(
        "both modes within {worst_z:.2} sigma, all 16 verdicts correct"
    ))
}

fn noise_round_trip() -> Check {
    let net = NetworkSpec::line_recognition();
    let mut config = ExperimentConfig {
        mode: ModeSelection::Both,
        evaluation: Evaluation::Sampled,
        shots: 100_000,
        seed: 77,
        noise: Some(ReadoutErrorModel::new(0.05, 0.03).unwrap()),
        mitigate: true,
        ..Default::default()
    };
    let deviation = |config: &ExperimentConfig| -> Result<(f64, bool), String> {
        let table = run_network_table(&net, config).map_err(|e| e.to_string())?;
        let worst = table
            .rows
            .iter()
            .flat_map(|r| {
                r.outcomes
                    .iter()
                    .map(move |o| (o.p_out - line_oracle(r.label)).abs())
            })
            .fold(0.0, f64::max);
        Ok((worst, table.all_correct()))
    };
    let (mitigated, correct) = deviation(&config)?;
    ensure(mitigated < 0.02, || {
        format!("mitigated deviation {mitigated}")
    })?;
    ensure(correct, || "mitigated verdicts are wrong".into())?;

    config.noise = Some(ReadoutErrorModel::new(0.1, 0.03).unwrap());
    config.mitigate = false;
    let (raw, _) = deviation(&config)?;
    ensure(raw > 0.02, || format!("unmitigated deviation only {raw}"))?;
    Ok(format!(
        "mitigated max deviation {mitigated:.4}, unmitigated (p01 = 0.1) {raw:.4}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "target recognition",
            Some(Duration::from_secs(1)),
            target_recognition,
        ),
        ("rejection", Some(Duration::from_secs(1)), rejection),
        (
            "hybrid-coherent equivalence",
            Some(Duration::from_secs(10)),
            equivalence,
        ),
        (
            "single-neuron oracle",
            Some(Duration::from_secs(10)),
            single_neuron_oracle,
        ),
        (
            "sign synthesis correctness and size",
            Some(Duration::from_secs(5)),
            hsgs_correctness,
        ),
        (
            "weight unitary maps to |1..1>",
            Some(Duration::from_secs(1)),
            uw_constraint,
        ),
        ("conditional output law", None, conditional_law),
        ("single-node impossibility", None, single_node_impossibility),
        (
            "sampled-mode statistics",
            Some(Duration::from_secs(30)),
            sampled_statistics,
        ),
        ("noise and mitigation round trip", None, noise_round_trip),
    ];
    let mut failures = 0;
    for (k, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > *limit {
                outcome = Err(format!("took {elapsed:?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({elapsed:.2?})", k + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {:>2}. {name}: {detail} ({elapsed:.2?})", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
