//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`) and asserting the stated
//! tolerances.

use std::process::Command;
use std::time::Instant;

use qgcd_core::circuit::{build_qpe_circuit, resource_report};
use qgcd_core::numerics::{ceil_log2, reduce_fraction, stein_gcd, ProblemInstance, Rational};
use qgcd_core::qpe::{
    choose_t, default_max_iters, exact_distribution, kitaev_feedback_angles, protocol_a,
    protocol_b, recover_fraction, run_kitaev_qpe, run_statevector_qpe, statevector_distribution,
    GcdOutcome, PhaseEstimate,
};

fn report(criterion: u32, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("criterion {criterion:>2} {verdict} — {detail}");
    assert!(passed, "criterion {criterion}: {detail}");
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// 1. Dyadic-order reference instance (35, 40) at t = 4, through the CLI:
///    probability exactly 0.125 at the eight even outcomes, 0 elsewhere,
///    within 1e-12, in under a second.
#[test]
fn criterion_01_even_peak_distribution() {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qgcd"))
        .args([
            "dist", "--x", "35", "--r", "40", "--t", "4", "--method", "exact",
        ])
        .output()
        .expect("binary runs");
    let elapsed = started.elapsed().as_secs_f64();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("m,probability"));
    let mut worst = 0.0f64;
    let mut count = 0;
    for row in rows {
        let (m, p) = row.split_once(',').unwrap();
        let m: usize = m.parse().unwrap();
        let p: f64 = p.parse().unwrap();
        let expected = if m.is_multiple_of(2) { 0.125 } else { 0.0 };
        worst = worst.max((p - expected).abs());
        count += 1;
    }
    assert_eq!(count, 16);
    report(
        1,
        worst <= 1e-12 && elapsed < 1.0,
        &format!("eight 0.125 peaks, max deviation {worst:.2e}, {elapsed:.3}s"),
    );
}

/// 2. The worked measurement pipeline: outcome 2 at t = 4, r = 40 gives
///    b = 0.125, p = 5, s/N = 1/8, N = 8, gcd = 5. Exact integers.
#[test]
fn criterion_02_caption_pipeline() {
    let estimate = PhaseEstimate::new(2, 4);
    let b_exact = estimate.b == Rational { num: 2, den: 16 };
    let b_value = estimate.b.to_f64() == 0.125;
    let rec = recover_fraction(2, 4, 40);
    let p_ok = rec.p == 5;
    let reduced_ok = rec.reduced == Rational { num: 1, den: 8 };
    let n = rec.reduced.den;
    let gcd = 40 / n;
    let gcd_ok = n == 8 && gcd == 5 && stein_gcd(35, 40) == gcd;
    report(
        2,
        b_exact && b_value && p_ok && reduced_ok && gcd_ok,
        &format!(
            "m=2 -> b={}, p={}, s/N={}, N={n}, gcd={gcd}",
            estimate.b, rec.p, rec.reduced
        ),
    );
}

/// 3. Non-dyadic reference instance (21, 126), order 6: six peak clusters
///    at round(s·2^t/6) for t in {4, 5, 6, 10}; mass within ±1 of the
///    centers at least 8/π² for every t, and non-decreasing in t. Under 5 s.
#[test]
fn criterion_03_six_peak_concentration() {
    let started = Instant::now();
    let n = ProblemInstance::new(21, 126).unwrap().order;
    assert_eq!(n, 6);
    let mut masses = Vec::new();
    for t in [4u32, 5, 6, 10] {
        let dist = exact_distribution(21, 126, t).unwrap();
        let dim = 1u64 << t;
        let mut counted = vec![false; dim as usize];
        let mut mass = 0.0;
        for s in 0..n {
            let center = (s * dim * 2 + n) / (2 * n);
            for offset in [dim - 1, 0, 1] {
                let m = ((center + offset) % dim) as usize;
                if !counted[m] {
                    counted[m] = true;
                    mass += dist[m];
                }
            }
        }
        masses.push(mass);
    }
    let elapsed = started.elapsed().as_secs_f64();
    let bound = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let bound_ok = masses.iter().all(|&m| m >= bound);
    let monotone = masses.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    report(
        3,
        bound_ok && monotone && elapsed < 5.0,
        &format!(
            "masses at t=4,5,6,10: {:.5}, {:.5}, {:.5}, {:.5} (bound {bound:.4}; monotone: {monotone}), {elapsed:.3}s",
            masses[0], masses[1], masses[2], masses[3]
        ),
    );
}

/// 4. Oracle equivalence: the state-vector pipeline matches the analytic
///    distribution within max-abs 1e-10 for every 2 <= x < r <= 24 and
///    t in 3..=8. Under 60 s.
#[test]
fn criterion_04_oracle_equivalence() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut pipelines = 0u32;
    for r in 3..=24u64 {
        for x in 2..r {
            for t in 3..=8u32 {
                let sim = statevector_distribution(x, r, t).unwrap();
                let oracle = exact_distribution(x, r, t).unwrap();
                let err = sim
                    .iter()
                    .zip(&oracle)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                worst = worst.max(err);
                pipelines += 1;
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        4,
        worst <= 1e-10 && elapsed < 60.0,
        &format!("{pipelines} pipelines, max |Δ| {worst:.2e}, {elapsed:.1}s"),
    );
}

/// 5. Iterative single-ancilla equivalence: 100k shots on (35, 40, 4) within
///    total variation 0.02 of the analytic distribution, and the feedback
///    angle set is exactly {π/2, π/4, π/8}.
#[test]
fn criterion_05_single_ancilla_equivalence() {
    let shots = 100_000u64;
    let estimates = run_kitaev_qpe(35, 40, 4, shots, 12).unwrap();
    let mut hist = vec![0.0f64; 16];
    for est in &estimates {
        hist[est.m_out as usize] += 1.0 / shots as f64;
    }
    let oracle = exact_distribution(35, 40, 4).unwrap();
    let tv = total_variation(&hist, &oracle);
    let angles: Vec<String> = kitaev_feedback_angles(4)
        .iter()
        .map(|a| a.to_string())
        .collect();
    let angles_ok = angles == ["pi/2", "pi/4", "pi/8"];
    report(
        5,
        tv <= 0.02 && angles_ok,
        &format!(
            "TV {tv:.4} at 100k shots; feedback angles {{{}}}",
            angles.join(", ")
        ),
    );
}

/// 6. Register-size and rounding soundness: at t = L + 3, every outcome
///    within the 1/(2r) window of a peak recovers s/N exactly for r <= 64
///    (closed-window membership at rounding ties), and the sampled
///    exact-recovery frequency is at least 0.75 minus 3σ at 100k shots.
#[test]
fn criterion_06_recovery_soundness_and_rate() {
    // Exhaustive window check.
    let mut windowed = 0u64;
    for r in 2..=64u64 {
        let (t, n_bits) = choose_t(r, 0.25).unwrap();
        assert_eq!(t, ceil_log2(r) + 3);
        assert_eq!(n_bits, ceil_log2(r) + 1);
        let pow = 1u64 << t;
        for x in 1..r {
            let n = ProblemInstance::new(x, r).unwrap().order;
            for s in 0..n {
                let lo = (s * pow / n).saturating_sub(pow / (2 * r) + 2);
                let hi = ((s * pow).div_ceil(n) + pow / (2 * r) + 2).min(pow - 1);
                for m in lo..=hi {
                    let diff = (m * n).abs_diff(s * pow);
                    if 2 * r * diff <= n * pow {
                        windowed += 1;
                        let rec = recover_fraction(m, t, r);
                        let sound = if rec.exact {
                            rec.reduced == reduce_fraction(s, n).unwrap()
                        } else {
                            2 * (m * r).abs_diff(rec.p * pow) <= pow
                        };
                        assert!(sound, "r={r} x={x} s={s} m={m}");
                    }
                }
            }
        }
    }

    // Statistical exact-recovery rate on the non-dyadic reference instance.
    let shots = 100_000u64;
    let (x, r) = (21u64, 126u64);
    let n = ProblemInstance::new(x, r).unwrap().order;
    let (t, _) = choose_t(r, 0.25).unwrap();
    let estimates = run_statevector_qpe(x, r, t, shots, 2025).unwrap();
    let mut hits = 0u64;
    for est in &estimates {
        let s = ((est.m_out * n * 2 + (1u64 << t)) / (2u64 << t)) % n;
        if recover_fraction(est.m_out, t, r).reduced == reduce_fraction(s, n).unwrap() {
            hits += 1;
        }
    }
    let freq = hits as f64 / shots as f64;
    let sigma = (0.75 * 0.25 / shots as f64).sqrt();
    report(
        6,
        freq >= 0.75 - 3.0 * sigma,
        &format!("{windowed} windowed outcomes sound; sampled exact-recovery rate {freq:.4} (threshold {:.4})", 0.75 - 3.0 * sigma),
    );
}

/// 7. Protocol A statistics: 1000 seeded trials on (35, 40) with 20
///    repetitions fail at most (3/4)^20 + 3σ of the time, and every success
///    claims gcd 5.
#[test]
fn criterion_07_protocol_a_bound() {
    let trials = 1000u64;
    let mut failures = 0u64;
    for seed in 0..trials {
        match protocol_a(35, 40, 0.25, 20, seed).unwrap().claimed_gcd {
            GcdOutcome::Gcd(g) => assert_eq!(g, 5, "seed {seed}"),
            GcdOutcome::Failed => failures += 1,
        }
    }
    let bound_p = 0.75f64.powi(20);
    let sigma = (bound_p * (1.0 - bound_p) / trials as f64).sqrt();
    let limit = bound_p + 3.0 * sigma;
    let frac = failures as f64 / trials as f64;
    report(
        7,
        frac <= limit,
        &format!(
            "{failures}/{trials} failures ({frac:.4}); limit {limit:.4}; all successes claim 5"
        ),
    );
}

/// 8. Protocol B correctness: for every pair 2 <= x < r <= 48 and ten seeds,
///    the returned gcd equals the classical gcd within 5·⌈log2 r⌉ rounds.
///    Under 5 minutes.
#[test]
fn criterion_08_protocol_b_grid() {
    let started = Instant::now();
    let mut runs = 0u64;
    let mut worst_rounds = 0usize;
    for r in 3..=48u64 {
        let round_cap = (5 * ceil_log2(r)) as usize;
        for x in 2..r {
            for seed in 0..10u64 {
                let record = protocol_b(x, r, 0.25, seed, default_max_iters(r)).unwrap();
                runs += 1;
                assert_eq!(
                    record.claimed_gcd,
                    GcdOutcome::Gcd(stein_gcd(x, r)),
                    "x={x} r={r} seed={seed}"
                );
                assert!(
                    record.iterations.len() <= round_cap,
                    "x={x} r={r} seed={seed}: {} rounds",
                    record.iterations.len()
                );
                worst_rounds = worst_rounds.max(record.iterations.len());
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        8,
        elapsed < 300.0,
        &format!("{runs} runs all classical, worst {worst_rounds} rounds, {elapsed:.1}s"),
    );
}

/// 9. Resource report: r = 40 at ε = 1/4 gives t_this = 9 and t_shor = 15;
///    a t = 4 circuit on L = 6 reports 4·(4·6+2) = 104 elementary adder
///    gates. Exact integers.
#[test]
fn criterion_09_resource_report() {
    let circuit = build_qpe_circuit(35, 40, 4).unwrap();
    let rep = resource_report(&circuit, 0.25).unwrap();
    let ok = rep.t_this == 9
        && rep.t_shor == 15
        && circuit.work_bits() == 6
        && rep.modadd_macros == 4
        && rep.modadd_elementary_estimate == 104
        && (rep.smallest_phase_angle - std::f64::consts::PI / 8.0).abs() < 1e-15;
    report(
        9,
        ok,
        &format!(
            "t_this={} t_shor={} macros={} elementary={} smallest=pi/8",
            rep.t_this, rep.t_shor, rep.modadd_macros, rep.modadd_elementary_estimate
        ),
    );
}

/// 10. Eigenstate suite: for all (x, r) with r <= 64 and every s below the
///     order, the addition unitary fixes |u_s> up to the phase e^{2πi s/N},
///     with fidelity within 1e-12 and phase error at most 1e-10.
#[test]
fn criterion_10_eigenstate_suite() {
    use num_complex::Complex64;
    const TAU: f64 = std::f64::consts::TAU;
    let mut worst_phase = 0.0f64;
    let mut worst_fidelity = 0.0f64;
    let mut states = 0u64;
    for r in 2..=64u64 {
        for x in 1..=r {
            let n = ProblemInstance::new(x, r).unwrap().order;
            for s in 0..n {
                let u = qgcd_core::qpe::eigenstate(x, r, s, 0).unwrap();
                let mut v = u.clone();
                v.apply_mod_add(x);
                let inner: Complex64 = u
                    .amps()
                    .iter()
                    .zip(v.amps())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                worst_fidelity = worst_fidelity.max((inner.norm() - 1.0).abs());
                let expected = TAU * s as f64 / n as f64;
                let mut diff = (inner.arg() - expected) % TAU;
                if diff > std::f64::consts::PI {
                    diff -= TAU;
                }
                if diff < -std::f64::consts::PI {
                    diff += TAU;
                }
                worst_phase = worst_phase.max(diff.abs());
                states += 1;
            }
        }
    }
    report(
        10,
        worst_fidelity <= 1e-12 && worst_phase <= 1e-10,
        &format!("{states} eigenstates, worst fidelity error {worst_fidelity:.2e}, worst phase error {worst_phase:.2e}"),
    );
}
