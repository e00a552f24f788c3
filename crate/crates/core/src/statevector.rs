//! Dense state-vector simulation of a `t`-qubit control register joint with
//! an `r`-dimensional work register.
//!
//! The work register is simulated at its exact dimension `r` rather than
//! being padded to `2^⌈log2 r⌉` qubits: work values `>= r` are simply not
//! representable, so the wrap-around of the modular addition is automatic and
//! the addition unitary is a clean permutation (one `rotate_right` per
//! control row).
//!
//! Amplitudes are indexed as `(j, w) -> j*r + w` where `j` is the control
//! integer (qubit 0 is the least-significant bit of `j`) and `w` the work
//! value.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::{DEFAULT_MAX_AMPS, MAX_CONTROL_QUBITS, MAX_MODULUS};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const TAU: f64 = std::f64::consts::TAU;

/// A single gate application. All gates act on the control register except
/// `ControlledModAdd`, which permutes the work register when its control
/// qubit is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Hadamard {
        qubit: u32,
    },
    /// Multiplies the amplitude by `e^{i·angle}` exactly when both qubits
    /// are 1. Symmetric in its two qubits.
    ControlledPhase {
        control: u32,
        target: u32,
        angle: f64,
    },
    /// `w -> (w + addend) mod modulus` on basis states whose control bit is
    /// set; identity otherwise.
    ControlledModAdd {
        control: u32,
        addend: u64,
        modulus: u64,
    },
    Swap {
        a: u32,
        b: u32,
    },
}

/// One step of the inverse-QFT gate sequence, with the phase denominators
/// kept as exact powers of two (`angle = -2π / 2^denom_log2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqftStep {
    Hadamard {
        qubit: u32,
    },
    Phase {
        control: u32,
        target: u32,
        denom_log2: u32,
    },
    Swap {
        a: u32,
        b: u32,
    },
}

/// Gate sequence for the inverse transform `F⁺` on `t` qubits, with the
/// convention `F|j> = 2^{-t/2} Σ_k e^{2πi jk/2^t} |k>`.
///
/// Layout: per qubit from the most significant down, a Hadamard followed by
/// controlled phases against every lower qubit, then the bit-reversal swaps.
/// `t` Hadamards, `t(t-1)/2` phases, `⌊t/2⌋` swaps.
pub fn inverse_qft_schedule(t: u32) -> Vec<IqftStep> {
    let mut steps = Vec::new();
    for q in (0..t).rev() {
        steps.push(IqftStep::Hadamard { qubit: q });
        for m in (0..q).rev() {
            steps.push(IqftStep::Phase {
                control: m,
                target: q,
                denom_log2: q - m + 1,
            });
        }
    }
    for i in 0..t / 2 {
        steps.push(IqftStep::Swap { a: i, b: t - 1 - i });
    }
    steps
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    t: u32,
    r: u64,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0>^t |0>` with the default amplitude budget.
    pub fn init_state(t: u32, r: u64) -> Result<Self> {
        Self::init_state_capped(t, r, DEFAULT_MAX_AMPS)
    }

    /// `|0>^t |0>` with an explicit cap on `2^t * r`.
    pub fn init_state_capped(t: u32, r: u64, max_amps: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::Domain(
                "control register needs at least one qubit".into(),
            ));
        }
        if t > MAX_CONTROL_QUBITS {
            return Err(Error::Range(format!(
                "t = {t} exceeds the supported maximum of {MAX_CONTROL_QUBITS}"
            )));
        }
        if !(2..MAX_MODULUS).contains(&r) {
            return Err(Error::Domain(format!(
                "work dimension {r} outside [2, {MAX_MODULUS})"
            )));
        }
        let dim = (1u64 << t)
            .checked_mul(r)
            .filter(|&d| d <= max_amps)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "2^{t} * {r} amplitudes exceed the cap of {max_amps}"
                ))
            })?;
        let mut amps = vec![Complex64::ZERO; dim as usize];
        amps[0] = Complex64::ONE;
        Ok(StateVector { t, r, amps })
    }

    /// A bare work register (`t = 0`), used for eigenstate constructions.
    pub fn work_register(r: u64) -> Result<Self> {
        Self::from_amps(0, r, vec![Complex64::ZERO; r as usize])
    }

    /// Wrap an amplitude array of the right length. No normalisation check.
    pub fn from_amps(t: u32, r: u64, amps: Vec<Complex64>) -> Result<Self> {
        if r < 1 {
            return Err(Error::Domain("work dimension must be positive".into()));
        }
        let dim = (1u64 << t) * r;
        if amps.len() as u64 != dim {
            return Err(Error::Domain(format!(
                "expected {dim} amplitudes for t={t}, r={r}, got {}",
                amps.len()
            )));
        }
        Ok(StateVector { t, r, amps })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Flat index of `(control value, work value)`.
    pub fn index(&self, j: u64, w: u64) -> usize {
        (j * self.r + w) as usize
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: u32) -> Result<()> {
        if q >= self.t {
            return Err(Error::QubitIndex(format!(
                "qubit {q} on a {}-qubit register",
                self.t
            )));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::Hadamard { qubit } => {
                self.check_qubit(qubit)?;
                self.hadamard(qubit);
            }
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(Error::QubitIndex("phase control equals target".into()));
                }
                if !angle.is_finite() {
                    return Err(Error::Domain("phase angle must be finite".into()));
                }
                self.controlled_phase(control, target, angle);
            }
            Gate::ControlledModAdd {
                control,
                addend,
                modulus,
            } => {
                self.check_qubit(control)?;
                if modulus != self.r {
                    return Err(Error::Domain(format!(
                        "gate modulus {modulus} does not match work dimension {}",
                        self.r
                    )));
                }
                if addend >= modulus {
                    return Err(Error::Domain(format!(
                        "addend {addend} not below modulus {modulus}"
                    )));
                }
                self.controlled_mod_add(control, addend);
            }
            Gate::Swap { a, b } => {
                self.check_qubit(a)?;
                self.check_qubit(b)?;
                if a == b {
                    return Err(Error::QubitIndex("swap on identical qubits".into()));
                }
                self.swap_qubits(a, b);
            }
        }
        Ok(())
    }

    fn hadamard(&mut self, qubit: u32) {
        let mask = 1u64 << qubit;
        let r = self.r as usize;
        for j in 0..1u64 << self.t {
            if j & mask != 0 {
                continue;
            }
            let lo = (j * self.r) as usize;
            let hi = ((j | mask) * self.r) as usize;
            for w in 0..r {
                let a = self.amps[lo + w];
                let b = self.amps[hi + w];
                self.amps[lo + w] = (a + b) * FRAC_1_SQRT_2;
                self.amps[hi + w] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    fn controlled_phase(&mut self, control: u32, target: u32, angle: f64) {
        let mask = (1u64 << control) | (1u64 << target);
        let phase = Complex64::from_polar(1.0, angle);
        let r = self.r as usize;
        for j in 0..1u64 << self.t {
            if j & mask != mask {
                continue;
            }
            let base = (j * self.r) as usize;
            for w in 0..r {
                self.amps[base + w] *= phase;
            }
        }
    }

    fn controlled_mod_add(&mut self, control: u32, addend: u64) {
        let mask = 1u64 << control;
        let r = self.r as usize;
        for j in 0..1u64 << self.t {
            if j & mask == 0 {
                continue;
            }
            let base = (j * self.r) as usize;
            self.amps[base..base + r].rotate_right(addend as usize);
        }
    }

    fn swap_qubits(&mut self, a: u32, b: u32) {
        let (ma, mb) = (1u64 << a, 1u64 << b);
        let r = self.r as usize;
        for j in 0..1u64 << self.t {
            if j & ma != 0 && j & mb == 0 {
                let j2 = j ^ ma ^ mb;
                let base1 = (j * self.r) as usize;
                let base2 = (j2 * self.r) as usize;
                for w in 0..r {
                    self.amps.swap(base1 + w, base2 + w);
                }
            }
        }
    }

    /// The addition unitary itself, with no control: `w -> (w + addend) mod r`
    /// on every row. Used for eigenstate checks.
    pub fn apply_mod_add(&mut self, addend: u64) {
        let addend = addend % self.r;
        let r = self.r as usize;
        for j in 0..1u64 << self.t {
            let base = (j * self.r) as usize;
            self.amps[base..base + r].rotate_right(addend as usize);
        }
    }

    /// Inverse Fourier transform on the control register only, applied as the
    /// gate sequence of [`inverse_qft_schedule`] rather than a dense matrix.
    pub fn apply_inverse_qft(&mut self) {
        for step in inverse_qft_schedule(self.t) {
            match step {
                IqftStep::Hadamard { qubit } => self.hadamard(qubit),
                IqftStep::Phase {
                    control,
                    target,
                    denom_log2,
                } => {
                    let angle = -TAU / (1u64 << denom_log2) as f64;
                    self.controlled_phase(control, target, angle);
                }
                IqftStep::Swap { a, b } => self.swap_qubits(a, b),
            }
        }
    }

    /// Marginal outcome probabilities of the control register.
    pub fn distribution(&self) -> Vec<f64> {
        let r = self.r as usize;
        (0..1usize << self.t)
            .map(|j| {
                self.amps[j * r..(j + 1) * r]
                    .iter()
                    .map(|a| a.norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// `shots` i.i.d. control-register outcomes, drawn by inverse-CDF over
    /// ascending `m`. Deterministic for a fixed generator state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, shots: u64) -> Vec<u64> {
        let cdf = cumulative(&self.distribution());
        (0..shots).map(|_| draw_from_cdf(&cdf, rng)).collect()
    }
}

pub(crate) fn cumulative(probabilities: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probabilities
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

pub(crate) fn draw_from_cdf<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    // Smallest m with u < cdf[m]; the min guards the float tail where the
    // last partial sum lands a hair below 1.
    (cdf.partition_point(|&c| c <= u) as u64).min(cdf.len() as u64 - 1)
}
