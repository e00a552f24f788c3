//! Self-check suite over small instances, behind the `qgcd verify`
//! subcommand: eigenvalue relation, simulator-versus-oracle agreement,
//! rounding-recovery soundness, and end-to-end protocol correctness.

use num_complex::Complex64;

use crate::numerics::{ceil_log2, reduce_fraction, stein_gcd, ProblemInstance};
use crate::qpe::{
    default_max_iters, exact_distribution, protocol_a, protocol_b, recover_fraction,
    statevector_distribution, GcdOutcome,
};

const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Restrict every check to moduli at most 24 so the suite finishes in a
    /// few seconds.
    pub quick: bool,
    /// Negative control: flip the sign of the expected eigenphase so the
    /// eigenvalue check must fail.
    pub inject_phase_fault: bool,
}

/// Run every check and collect the outcomes. The caller decides how to
/// render them; the suite passes iff every outcome does.
pub fn run_suite(options: &VerifyOptions) -> Vec<CheckOutcome> {
    vec![
        eigenvalue_check(options),
        oracle_equivalence_check(options),
        recovery_soundness_check(options),
        protocol_a_check(options),
        protocol_b_check(options),
    ]
}

/// `U|u_s> = e^{2πi s/N}|u_s>` for every instance and every s.
fn eigenvalue_check(options: &VerifyOptions) -> CheckOutcome {
    let r_max = if options.quick { 24 } else { 64 };
    let sign = if options.inject_phase_fault {
        -1.0
    } else {
        1.0
    };
    let mut worst = 0.0f64;
    let mut instances = 0usize;
    for r in 2..=r_max {
        for x in 1..=r {
            let n = ProblemInstance::new(x, r).unwrap().order;
            instances += 1;
            for s in 0..n {
                let u = crate::qpe::eigenstate(x, r, s, 0).unwrap();
                let mut v = u.clone();
                v.apply_mod_add(x);
                let inner: Complex64 = u
                    .amps()
                    .iter()
                    .zip(v.amps())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let fidelity_err = (inner.norm() - 1.0).abs();
                let expected = sign * TAU * s as f64 / n as f64;
                let mut phase_err = (inner.arg() - expected) % TAU;
                if phase_err > std::f64::consts::PI {
                    phase_err -= TAU;
                }
                if phase_err < -std::f64::consts::PI {
                    phase_err += TAU;
                }
                worst = worst.max(fidelity_err).max(phase_err.abs());
            }
        }
    }
    CheckOutcome {
        name: "eigenvalue-relation",
        passed: worst <= 1e-10,
        detail: format!("{instances} instances with r <= {r_max}, worst error {worst:.3e}"),
    }
}

/// State-vector pipeline distribution equals the analytic oracle.
fn oracle_equivalence_check(options: &VerifyOptions) -> CheckOutcome {
    let (r_max, t_max) = if options.quick { (12, 6) } else { (24, 8) };
    let mut worst = 0.0f64;
    let mut runs = 0usize;
    for r in 3..=r_max {
        for x in 2..r {
            for t in 3..=t_max {
                let sim = statevector_distribution(x, r, t).unwrap();
                let oracle = exact_distribution(x, r, t).unwrap();
                let err = sim
                    .iter()
                    .zip(&oracle)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                worst = worst.max(err);
                runs += 1;
            }
        }
    }
    CheckOutcome {
        name: "oracle-equivalence",
        passed: worst <= 1e-10,
        detail: format!("{runs} pipelines with r <= {r_max}, t <= {t_max}, max |Δ| {worst:.3e}"),
    }
}

/// Rounding recovery returns s/N exactly on every outcome inside the
/// half-width 1/(2r) window around a peak, at t = L + 3.
fn recovery_soundness_check(options: &VerifyOptions) -> CheckOutcome {
    let r_max = if options.quick { 24 } else { 64 };
    let mut checked = 0usize;
    for r in 2..=r_max {
        let t = ceil_log2(r) + 3;
        let pow = 1u64 << t;
        for x in 1..r {
            let n = ProblemInstance::new(x, r).unwrap().order;
            for s in 0..n {
                let center = s * pow;
                let lo = (center / n).saturating_sub(pow / (2 * r) + 2);
                let hi = (center.div_ceil(n) + pow / (2 * r) + 2).min(pow - 1);
                for m in lo..=hi {
                    let diff = (m * n).abs_diff(s * pow);
                    if 2 * r * diff <= n * pow {
                        checked += 1;
                        let rec = recover_fraction(m, t, r);
                        // An exact tie leaves two peaks at equal distance;
                        // there the rounded numerator only has to stay inside
                        // the closed window.
                        let sound = if rec.exact {
                            rec.reduced == reduce_fraction(s, n).unwrap()
                        } else {
                            2 * (m * r).abs_diff(rec.p * pow) <= pow
                        };
                        if !sound {
                            return CheckOutcome {
                                name: "recovery-soundness",
                                passed: false,
                                detail: format!(
                                    "m={m} on (x={x}, r={r}) recovered {}",
                                    rec.reduced
                                ),
                            };
                        }
                    }
                }
            }
        }
    }
    CheckOutcome {
        name: "recovery-soundness",
        passed: true,
        detail: format!("{checked} peak-adjacent outcomes with r <= {r_max} all recover s/N"),
    }
}

/// Protocol A on instances whose order divides `2^t`: every outcome then
/// sits on an exact peak, recovered denominators always divide the order,
/// and every seeded run must land exactly the classical gcd. (On other
/// orders an off-peak outcome can inflate the denominator estimate; the
/// greatest-denominator rule gives no pointwise guarantee there.)
fn protocol_a_check(options: &VerifyOptions) -> CheckOutcome {
    let r_max = if options.quick { 12 } else { 24 };
    let mut runs = 0usize;
    for r in 3..=r_max {
        let (t, _) = crate::qpe::choose_t(r, 0.25).unwrap();
        for x in 2..r {
            let inst = ProblemInstance::new(x, r).unwrap();
            if !(1u64 << t).is_multiple_of(inst.order) {
                continue;
            }
            for seed in 0..4u64 {
                let record = protocol_a(x, r, 0.25, 20, seed).unwrap();
                runs += 1;
                if record.claimed_gcd != GcdOutcome::Gcd(stein_gcd(x, r)) {
                    return CheckOutcome {
                        name: "protocol-a",
                        passed: false,
                        detail: format!("(x={x}, r={r}, seed={seed}) -> {:?}", record.claimed_gcd),
                    };
                }
            }
        }
    }
    CheckOutcome {
        name: "protocol-a",
        passed: true,
        detail: format!("{runs} exact-peak runs all claim the classical gcd"),
    }
}

/// Protocol B terminates with the classical gcd on an exhaustive grid.
fn protocol_b_check(options: &VerifyOptions) -> CheckOutcome {
    let r_max = if options.quick { 12 } else { 24 };
    let mut runs = 0usize;
    let mut worst_iters = 0usize;
    for r in 3..=r_max {
        for x in 2..r {
            for seed in 0..2u64 {
                let record = protocol_b(x, r, 0.25, seed, default_max_iters(r)).unwrap();
                runs += 1;
                if record.claimed_gcd != GcdOutcome::Gcd(stein_gcd(x, r)) {
                    return CheckOutcome {
                        name: "protocol-b",
                        passed: false,
                        detail: format!("(x={x}, r={r}, seed={seed}) -> {:?}", record.claimed_gcd),
                    };
                }
                worst_iters = worst_iters.max(record.iterations.len());
            }
        }
    }
    CheckOutcome {
        name: "protocol-b",
        passed: true,
        detail: format!("{runs} runs all equal the classical gcd, worst {worst_iters} rounds"),
    }
}
