//! The algorithm layer: eigenstates of the addition unitary, the analytic
//! outcome distribution, full and single-ancilla iterative phase-estimation
//! runs, exact fraction recovery, and the two classical post-processing
//! protocols that turn phase samples into a gcd claim.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::PiFraction;
use crate::error::{Error, Result};
use crate::numerics::{
    ceil_log2, precompute_multiples, reduce_fraction, ProblemInstance, Rational,
};
use crate::statevector::{cumulative, draw_from_cdf, Gate, StateVector};
use crate::{DEFAULT_MAX_AMPS, MAX_CONTROL_QUBITS};

const TAU: f64 = std::f64::consts::TAU;

/// One measured control-register outcome together with the dyadic phase
/// estimate it encodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    pub m_out: u64,
    pub t: u32,
    /// `m_out / 2^t`, kept as an exact dyadic fraction.
    pub b: Rational,
    /// Signed defect `s/N - b`, exact; only populated where the true phase
    /// is known (tests and diagnostics).
    pub b_defect: Option<Defect>,
}

/// An exact signed fraction `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Defect {
    pub num: i64,
    pub den: u64,
}

impl PhaseEstimate {
    pub fn new(m_out: u64, t: u32) -> Self {
        debug_assert!((1..63).contains(&t) && m_out < 1u64 << t);
        PhaseEstimate {
            m_out,
            t,
            b: Rational {
                num: m_out,
                den: 1u64 << t,
            },
            b_defect: None,
        }
    }

    /// Attach the exact defect `s/n - b` for a known eigenphase.
    pub fn with_known_phase(mut self, s: u64, n: u64) -> Self {
        let den = n * self.b.den;
        let num = (s * self.b.den) as i64 - (self.m_out * n) as i64;
        self.b_defect = Some(Defect { num, den });
        self
    }
}

/// The fraction recovered from one outcome: numerator `p = round(b·r)`
/// (half rounds up), the reduced form `p/r`, and whether the rounding window
/// `[b·r - 1/2, b·r + 1/2]` pinned a single integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredFraction {
    pub p: u64,
    pub r: u64,
    pub reduced: Rational,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    A,
    B,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Protocol::A => write!(f, "a"),
            Protocol::B => write!(f, "b"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub t: u32,
    pub epsilon: f64,
    pub shots: u64,
    pub seed: u64,
    pub protocol: Protocol,
}

/// Final claim of a protocol run; failure is a value, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcdOutcome {
    Gcd(u64),
    Failed,
}

impl GcdOutcome {
    pub fn value(&self) -> Option<u64> {
        match self {
            GcdOutcome::Gcd(g) => Some(*g),
            GcdOutcome::Failed => None,
        }
    }
}

/// One replacement round of protocol B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationStep {
    pub x: u64,
    pub r: u64,
    pub s_over_n: Rational,
    /// Raw candidate `s/N * r_i` (an integer because `N` divides `r_i`).
    pub candidate: u64,
    pub divides_x: bool,
    pub divides_r: bool,
}

/// Full provenance of one protocol execution.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: ProblemInstance,
    pub config: RunConfig,
    pub samples: Vec<PhaseEstimate>,
    pub recoveries: Vec<RecoveredFraction>,
    pub iterations: Vec<IterationStep>,
    pub claimed_gcd: GcdOutcome,
}

/// Eigenstate `|u_s> = N^{-1/2} Σ_k e^{-2πi sk/N} |(kx + y) mod r>` of the
/// addition unitary, on a bare work register.
pub fn eigenstate(x: u64, r: u64, s: u64, y: u64) -> Result<StateVector> {
    let inst = ProblemInstance::new(x, r)?;
    let n = inst.order;
    if s >= n {
        return Err(Error::Domain(format!("s = {s} not below the order {n}")));
    }
    if y >= r {
        return Err(Error::Domain(format!("y = {y} not below r = {r}")));
    }
    let norm = 1.0 / (n as f64).sqrt();
    let mut state = StateVector::work_register(r)?;
    let mut w = y;
    for k in 0..n {
        state.amps_mut()[w as usize] =
            Complex64::from_polar(norm, -TAU * (s * k % n) as f64 / n as f64);
        w = (w + inst.addend()) % r;
    }
    Ok(state)
}

/// Analytic outcome distribution of the whole procedure, computed straight
/// from the sum `P(m) = 2^{-2t} Σ_a |Σ_{j<2^t, j≡a (mod N)} e^{-2πi jm/2^t}|²`
/// with no state vector. This is the independent oracle the simulator is
/// checked against.
pub fn exact_distribution(x: u64, r: u64, t: u32) -> Result<Vec<f64>> {
    let inst = ProblemInstance::new(x, r)?;
    if t == 0 || t > MAX_CONTROL_QUBITS {
        return Err(Error::Range(format!(
            "t = {t} outside [1, {MAX_CONTROL_QUBITS}]"
        )));
    }
    let n = inst.order as usize;
    let dim = 1u64 << t;
    let roots: Vec<Complex64> = (0..dim)
        .map(|v| Complex64::from_polar(1.0, -TAU * v as f64 / dim as f64))
        .collect();
    let norm = 1.0 / (dim as f64 * dim as f64);
    let mask = dim - 1;
    let mut residue_sums = vec![Complex64::ZERO; n];
    let mut out = Vec::with_capacity(dim as usize);
    for m in 0..dim {
        residue_sums.fill(Complex64::ZERO);
        for j in 0..dim {
            residue_sums[(j as usize) % n] += roots[(j.wrapping_mul(m) & mask) as usize];
        }
        out.push(residue_sums.iter().map(|z| z.norm_sqr()).sum::<f64>() * norm);
    }
    Ok(out)
}

/// Builds the post-transform state of the procedure: Hadamards on every
/// control qubit, one controlled addition per qubit with the doubled addend
/// schedule, then the inverse Fourier transform.
pub(crate) fn qpe_state_capped(x: u64, r: u64, t: u32, max_amps: u64) -> Result<StateVector> {
    let inst = ProblemInstance::new(x, r)?;
    let mut state = StateVector::init_state_capped(t, r, max_amps)?;
    for qubit in 0..t {
        state.apply_gate(&Gate::Hadamard { qubit })?;
    }
    for (qubit, &addend) in precompute_multiples(inst.x, r, t)?.iter().enumerate() {
        state.apply_gate(&Gate::ControlledModAdd {
            control: qubit as u32,
            addend,
            modulus: r,
        })?;
    }
    state.apply_inverse_qft();
    Ok(state)
}

/// Control-register distribution of the state-vector pipeline (exact marginal
/// probabilities, no sampling).
pub fn statevector_distribution(x: u64, r: u64, t: u32) -> Result<Vec<f64>> {
    statevector_distribution_capped(x, r, t, DEFAULT_MAX_AMPS)
}

pub fn statevector_distribution_capped(x: u64, r: u64, t: u32, max_amps: u64) -> Result<Vec<f64>> {
    Ok(qpe_state_capped(x, r, t, max_amps)?.distribution())
}

/// Run the full procedure and sample `shots` outcomes.
pub fn run_statevector_qpe(
    x: u64,
    r: u64,
    t: u32,
    shots: u64,
    seed: u64,
) -> Result<Vec<PhaseEstimate>> {
    run_statevector_qpe_capped(x, r, t, shots, seed, DEFAULT_MAX_AMPS)
}

pub fn run_statevector_qpe_capped(
    x: u64,
    r: u64,
    t: u32,
    shots: u64,
    seed: u64,
    max_amps: u64,
) -> Result<Vec<PhaseEstimate>> {
    if shots == 0 {
        return Err(Error::Domain("shots must be positive".into()));
    }
    let state = qpe_state_capped(x, r, t, max_amps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(state
        .sample(&mut rng, shots)
        .into_iter()
        .map(|m| PhaseEstimate::new(m, t))
        .collect())
}

/// Iterative single-ancilla phase estimation: one control qubit, reused
/// `t` times from the most significant exponent down, with the measured
/// bits fed back as phase corrections before each Hadamard.
///
/// Measurement statistics match the full inverse-transform pipeline; only
/// one control qubit is ever alive.
pub fn run_kitaev_qpe(x: u64, r: u64, t: u32, shots: u64, seed: u64) -> Result<Vec<PhaseEstimate>> {
    run_kitaev_qpe_capped(x, r, t, shots, seed, DEFAULT_MAX_AMPS)
}

pub fn run_kitaev_qpe_capped(
    x: u64,
    r: u64,
    t: u32,
    shots: u64,
    seed: u64,
    max_amps: u64,
) -> Result<Vec<PhaseEstimate>> {
    if shots == 0 {
        return Err(Error::Domain("shots must be positive".into()));
    }
    let inst = ProblemInstance::new(x, r)?;
    if t == 0 || t > MAX_CONTROL_QUBITS {
        return Err(Error::Range(format!(
            "t = {t} outside [1, {MAX_CONTROL_QUBITS}]"
        )));
    }
    if 2 * r > max_amps {
        return Err(Error::Resource(format!(
            "2 * {r} amplitudes exceed the cap of {max_amps}"
        )));
    }
    let addends = precompute_multiples(inst.x, r, t)?;
    let dim = 1u64 << t;
    let rl = r as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimates = Vec::with_capacity(shots as usize);
    let mut row0 = vec![Complex64::ZERO; rl];
    let mut row1 = vec![Complex64::ZERO; rl];
    for _ in 0..shots {
        let mut work = vec![Complex64::ZERO; rl];
        work[0] = Complex64::ONE;
        let mut m = 0u64;
        // Exponent 2^k, from k = t-1 down to 0; the iteration with exponent
        // 2^k resolves bit (t-1-k) of the outcome, least significant first.
        for k in (0..t).rev() {
            let bit_index = t - 1 - k;
            // Control reset to |+>; apply the controlled addition on the
            // control=1 branch.
            row0.copy_from_slice(&work);
            row1.copy_from_slice(&work);
            row1.rotate_right(addends[k as usize] as usize);
            // Feedback from the already-measured lower-significance bits:
            // angle -2π (2^k · prefix) / 2^t with prefix = m mod 2^{t-1-k}.
            let prefix = m & ((1u64 << bit_index) - 1);
            if prefix != 0 {
                let angle = -TAU * ((1u64 << k) * prefix) as f64 / dim as f64;
                let phase = Complex64::from_polar(1.0, angle);
                for a in row1.iter_mut() {
                    *a *= phase;
                }
            }
            // Hadamard on the control, then measure it.
            let mut p0 = 0.0;
            for w in 0..rl {
                let a = (row0[w] + row1[w]) * 0.5;
                let b = (row0[w] - row1[w]) * 0.5;
                row0[w] = a;
                row1[w] = b;
                p0 += a.norm_sqr();
            }
            let u: f64 = rng.random();
            if u >= p0 {
                let scale = 1.0 / (1.0 - p0).sqrt();
                for (w, a) in work.iter_mut().enumerate() {
                    *a = row1[w] * scale;
                }
                m |= 1u64 << bit_index;
            } else {
                let scale = 1.0 / p0.sqrt();
                for (w, a) in work.iter_mut().enumerate() {
                    *a = row0[w] * scale;
                }
            }
        }
        estimates.push(PhaseEstimate::new(m, t));
    }
    Ok(estimates)
}

/// Magnitudes of the feedback phase angles the iterative run uses:
/// `π/2, π/4, ..., π/2^{t-1}`. The smallest is `π/2^{t-1}`.
pub fn kitaev_feedback_angles(t: u32) -> Vec<PiFraction> {
    (1..t)
        .map(|j| PiFraction::new(1, 1u64 << j).expect("power of two"))
        .collect()
}

/// `⌈log2(2 + 1/(2ε))⌉`, the extra control qubits a failure budget of ε
/// costs on top of the accuracy bits.
pub fn accuracy_extra_bits(epsilon: f64) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let v = 2.0 + 1.0 / (2.0 * epsilon);
    let lg = v.log2();
    // Snap to the nearest integer before ceiling so exact powers of two
    // (e.g. ε = 1/4 giving v = 4) are not pushed a bit too high.
    let snapped = if (lg - lg.round()).abs() < 1e-9 {
        lg.round()
    } else {
        lg.ceil()
    };
    Ok(snapped as u32)
}

/// Register size for a target modulus: `n = ⌈log2 r⌉ + 1` accuracy bits make
/// the rounding recovery exact, and `t = n + ⌈log2(2 + 1/(2ε))⌉` achieves
/// them with probability at least `1 - ε`. Returns `(t, n)`.
pub fn choose_t(r: u64, epsilon: f64) -> Result<(u32, u32)> {
    if r < 2 {
        return Err(Error::Domain("r must be at least 2".into()));
    }
    let n = ceil_log2(r) + 1;
    Ok((n + accuracy_extra_bits(epsilon)?, n))
}

/// Recover the fraction behind an outcome: `b = m/2^t`, numerator
/// `p = round(b·r)` with halves rounding up, reduced to lowest terms.
///
/// The `exact` flag records whether the window `[b·r - 1/2, b·r + 1/2]`
/// contains a single integer; at an exact tie (`b·r` a half-integer) two
/// integers qualify and the rounding is ambiguous.
pub fn recover_fraction(m_out: u64, t: u32, r: u64) -> RecoveredFraction {
    assert!((1..=40).contains(&t), "unsupported register size");
    assert!(m_out < 1u64 << t, "outcome outside the register range");
    assert!(r >= 1);
    let pow = 1u64 << t;
    let two_mr = 2 * m_out * r;
    let p = (two_mr + pow) / (2 * pow);
    let tie = two_mr % (2 * pow) == pow;
    RecoveredFraction {
        p,
        r,
        reduced: reduce_fraction(p, r).expect("r > 0"),
        exact: !tie,
    }
}

/// Stable per-repetition seed derivation, so repetitions are independent and
/// reproducible regardless of execution order.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(index.wrapping_add(1))))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Default iteration budget for protocol B: `10·⌈log2 r⌉`, comfortably above
/// the expected logarithmic round count.
pub fn default_max_iters(r: u64) -> u32 {
    10 * ceil_log2(r.max(2))
}

/// Protocol A: repeat the procedure `m_reps` times (one sample each), reduce
/// every recovered fraction, and keep the greatest denominator seen. The
/// claim is `r / N̂` provided it divides both inputs; anything else is a
/// failure. Outcomes `m = 0` reduce to `0/1` and so contribute `N' = 1`.
pub fn protocol_a(x: u64, r: u64, epsilon: f64, m_reps: u32, seed: u64) -> Result<RunRecord> {
    protocol_a_with_limit(x, r, epsilon, m_reps, seed, DEFAULT_MAX_AMPS)
}

pub fn protocol_a_with_limit(
    x: u64,
    r: u64,
    epsilon: f64,
    m_reps: u32,
    seed: u64,
    max_amps: u64,
) -> Result<RunRecord> {
    if m_reps == 0 {
        return Err(Error::Domain("m_reps must be positive".into()));
    }
    let instance = ProblemInstance::new(x, r)?;
    let (t, _) = choose_t(r, epsilon)?;
    let mut record = RunRecord {
        instance,
        config: RunConfig {
            t,
            epsilon,
            shots: 1,
            seed,
            protocol: Protocol::A,
        },
        samples: Vec::new(),
        recoveries: Vec::new(),
        iterations: Vec::new(),
        claimed_gcd: GcdOutcome::Failed,
    };
    if instance.is_trivial() {
        // r divides x: the answer is r, no quantum run needed.
        record.claimed_gcd = GcdOutcome::Gcd(r);
        return Ok(record);
    }
    // The state for a fixed (x, r, t) is the same in every repetition; build
    // it once and give each repetition its own derived-seed generator, which
    // draws exactly what an independent single-shot run would.
    let state = qpe_state_capped(x, r, t, max_amps)?;
    let cdf = cumulative(&state.distribution());
    let mut n_hat = 1u64;
    for rep in 0..m_reps {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, rep as u64));
        let m = draw_from_cdf(&cdf, &mut rng);
        let recovery = recover_fraction(m, t, r);
        n_hat = n_hat.max(recovery.reduced.den);
        record.samples.push(PhaseEstimate::new(m, t));
        record.recoveries.push(recovery);
    }
    let claim = r / n_hat;
    record.claimed_gcd =
        if r.is_multiple_of(n_hat) && x.is_multiple_of(claim) && r.is_multiple_of(claim) {
            GcdOutcome::Gcd(claim)
        } else {
            GcdOutcome::Failed
        };
    Ok(record)
}

/// Protocol B: Euclid-like replacement. Each round draws one sample on the
/// current pair `(x_i, r_i)`, forms the candidate `g = s/N · r_i`, replaces
/// the pair by `(x', min(g mod x', x' - g mod x'))` with `x' = min(x_i, r_i)`,
/// and stops as soon as the chosen nonzero candidate passes the termination
/// test against the original inputs. A candidate that repeats without
/// passing triggers the unsticking rule: restart from whichever original
/// input it fails to divide.
///
/// The termination test verifies the proposal classically, as order-finding
/// verifies its order candidates: the candidate must divide both inputs and
/// dividing it out must leave coprime parts. A candidate that divides both
/// inputs but fails the coprimality check is provably below the answer —
/// the proof that an off-peak estimate contaminated the chain — so the
/// descent restarts from the original pair (fresh randomness, same run).
pub fn protocol_b(x: u64, r: u64, epsilon: f64, seed: u64, max_iters: u32) -> Result<RunRecord> {
    protocol_b_with_limit(x, r, epsilon, seed, max_iters, DEFAULT_MAX_AMPS)
}

pub fn protocol_b_with_limit(
    x: u64,
    r: u64,
    epsilon: f64,
    seed: u64,
    max_iters: u32,
    max_amps: u64,
) -> Result<RunRecord> {
    if max_iters == 0 {
        return Err(Error::Domain("max_iters must be positive".into()));
    }
    let instance = ProblemInstance::new(x, r)?;
    let (t, _) = choose_t(r, epsilon)?;
    let mut record = RunRecord {
        instance,
        config: RunConfig {
            t,
            epsilon,
            shots: 1,
            seed,
            protocol: Protocol::B,
        },
        samples: Vec::new(),
        recoveries: Vec::new(),
        iterations: Vec::new(),
        claimed_gcd: GcdOutcome::Failed,
    };
    if instance.is_trivial() {
        record.claimed_gcd = GcdOutcome::Gcd(r);
        return Ok(record);
    }
    let (mut xi, mut ri) = (x, r);
    let mut last_candidate: Option<u64> = None;
    for round in 0..max_iters {
        let (s_over_n, raw_candidate) = if xi % ri == 0 {
            // Degenerate pair: r_i divides x_i, so r_i itself is the round's
            // candidate and no draw is needed.
            (Rational { num: 1, den: 1 }, ri)
        } else {
            let (ti, _) = choose_t(ri, epsilon)?;
            let state = qpe_state_capped(xi, ri, ti, max_amps)?;
            let cdf = cumulative(&state.distribution());
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, round as u64));
            // A zero draw (s = 0) carries no information; redraw a bounded
            // number of times.
            let mut recovery = None;
            for _attempt in 0..4 {
                let m = draw_from_cdf(&cdf, &mut rng);
                let rec = recover_fraction(m, ti, ri);
                record.samples.push(PhaseEstimate::new(m, ti));
                record.recoveries.push(rec);
                if rec.reduced.num != 0 {
                    recovery = Some(rec);
                    break;
                }
            }
            match recovery {
                Some(rec) => {
                    let g = rec.reduced.num * (ri / rec.reduced.den);
                    (rec.reduced, g)
                }
                None => {
                    // All draws were zero: record the dead round and move on
                    // with the pair unchanged.
                    record.iterations.push(IterationStep {
                        x: xi,
                        r: ri,
                        s_over_n: Rational::ZERO,
                        candidate: 0,
                        divides_x: false,
                        divides_r: false,
                    });
                    continue;
                }
            }
        };

        let x_prime = xi.min(ri);
        // Reduce the raw candidate modulo x' (gcd-preserving) before pairing
        // it with its complement; the raw value may exceed x'.
        let a = raw_candidate % x_prime;
        let candidate = if a == 0 { x_prime } else { a.min(x_prime - a) };

        record.iterations.push(IterationStep {
            x: xi,
            r: ri,
            s_over_n,
            candidate: raw_candidate,
            divides_x: raw_candidate != 0 && x.is_multiple_of(raw_candidate),
            divides_r: raw_candidate != 0 && r.is_multiple_of(raw_candidate),
        });

        if x.is_multiple_of(candidate) && r.is_multiple_of(candidate) {
            if crate::numerics::stein_gcd(x / candidate, r / candidate) == 1 {
                record.claimed_gcd = GcdOutcome::Gcd(candidate);
                return Ok(record);
            }
            // Divides both inputs but leaves a common factor: a bad estimate
            // pushed the chain below the answer. Restart the descent.
            xi = x;
            ri = r;
            last_candidate = None;
            continue;
        }

        if last_candidate == Some(candidate) {
            // The nonzero result stabilised on a non-divisor: restart from
            // whichever original input it fails to divide.
            xi = if !x.is_multiple_of(candidate) { x } else { r };
            ri = candidate;
        } else {
            xi = x_prime;
            ri = candidate;
        }
        last_candidate = Some(candidate);
    }
    Ok(record)
}
