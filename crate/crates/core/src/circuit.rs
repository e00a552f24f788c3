//! Gate-list circuit representation, a stable text format, and resource
//! reporting.
//!
//! The controlled modular addition is kept as an opaque macro with the
//! `4L + 2` elementary-gate cost of the reversible-adder scheme it stands
//! for; the controlled power `U^{2^j}` is always compiled to a single macro
//! with a precomputed addend, never to `2^j` repetitions.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{ceil_log2, precompute_multiples, stein_gcd, ProblemInstance};
use crate::qpe::accuracy_extra_bits;
use crate::statevector::{inverse_qft_schedule, Gate, IqftStep, StateVector};
use crate::DEFAULT_MAX_AMPS;

/// An exact angle `num/den · π`, reduced to lowest terms. Emitted and parsed
/// as text like `pi/8`, `-3pi/4` or `pi`; never as a decimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PiFraction {
    num: i64,
    den: u64,
}

impl PiFraction {
    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("angle denominator must be positive".into()));
        }
        if num == 0 {
            return Ok(PiFraction { num: 0, den: 1 });
        }
        let g = stein_gcd(num.unsigned_abs(), den);
        Ok(PiFraction {
            num: num / g as i64,
            den: den / g,
        })
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn radians(&self) -> f64 {
        self.num as f64 * std::f64::consts::PI / self.den as f64
    }

    fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed angle `{text}`"));
        let (neg, rest) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let pi_at = rest.find("pi").ok_or_else(bad)?;
        let (coef, tail) = rest.split_at(pi_at);
        let tail = &tail[2..];
        let num: i64 = if coef.is_empty() {
            1
        } else {
            coef.parse().map_err(|_| bad())?
        };
        let den: u64 = match tail.strip_prefix('/') {
            Some(d) => d.parse().map_err(|_| bad())?,
            None if tail.is_empty() => 1,
            None => return Err(bad()),
        };
        PiFraction::new(if neg { -num } else { num }, den)
    }
}

impl fmt::Display for PiFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            return write!(f, "0");
        }
        if self.num < 0 {
            write!(f, "-")?;
        }
        let n = self.num.unsigned_abs();
        if n != 1 {
            write!(f, "{n}")?;
        }
        write!(f, "pi")?;
        if self.den != 1 {
            write!(f, "/{}", self.den)?;
        }
        Ok(())
    }
}

/// One entry of the gate list. `ModAdd` is the controlled modular-addition
/// macro; `Measure` is terminal per qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitOp {
    Hadamard {
        qubit: u32,
    },
    ControlledPhase {
        control: u32,
        target: u32,
        angle: PiFraction,
    },
    ModAdd {
        control: u32,
        addend: u64,
        modulus: u64,
    },
    Swap {
        a: u32,
        b: u32,
    },
    Measure {
        qubit: u32,
    },
}

/// Provenance of a built circuit. Not part of the text format, so not part
/// of circuit equality.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CircuitMeta {
    pub x: Option<u64>,
    pub epsilon: Option<f64>,
}

/// An ordered gate list over `t` control qubits and an `r`-dimensional work
/// register.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub t: u32,
    pub r: u64,
    pub ops: Vec<CircuitOp>,
    pub meta: CircuitMeta,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.r == other.r && self.ops == other.ops
    }
}

impl Circuit {
    /// Cost-model width of the work register, `L = ⌈log2 r⌉`.
    pub fn work_bits(&self) -> u32 {
        ceil_log2(self.r)
    }

    /// Check qubit ranges, addend bounds, modulus consistency, and that no
    /// gate follows a measurement on the same qubit.
    pub fn validate(&self) -> Result<()> {
        let mut measured = vec![false; self.t as usize];
        let check = |q: u32| -> Result<()> {
            if q >= self.t {
                return Err(Error::QubitIndex(format!(
                    "q[{q}] on a {}-qubit register",
                    self.t
                )));
            }
            Ok(())
        };
        for op in &self.ops {
            let touched: Vec<u32> = match *op {
                CircuitOp::Hadamard { qubit } => {
                    check(qubit)?;
                    vec![qubit]
                }
                CircuitOp::ControlledPhase {
                    control, target, ..
                } => {
                    check(control)?;
                    check(target)?;
                    if control == target {
                        return Err(Error::QubitIndex("phase control equals target".into()));
                    }
                    vec![control, target]
                }
                CircuitOp::ModAdd {
                    control,
                    addend,
                    modulus,
                } => {
                    check(control)?;
                    if modulus != self.r {
                        return Err(Error::Domain(format!(
                            "modadd modulus {modulus} does not match work register {}",
                            self.r
                        )));
                    }
                    if addend >= modulus {
                        return Err(Error::Domain(format!(
                            "addend {addend} not below modulus {modulus}"
                        )));
                    }
                    vec![control]
                }
                CircuitOp::Swap { a, b } => {
                    check(a)?;
                    check(b)?;
                    if a == b {
                        return Err(Error::QubitIndex("swap on identical qubits".into()));
                    }
                    vec![a, b]
                }
                CircuitOp::Measure { qubit } => {
                    check(qubit)?;
                    if measured[qubit as usize] {
                        return Err(Error::Domain(format!("q[{qubit}] measured twice")));
                    }
                    measured[qubit as usize] = true;
                    continue;
                }
            };
            for q in touched {
                if measured[q as usize] {
                    return Err(Error::Domain(format!(
                        "gate on q[{q}] after its measurement"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Replay the gate list through the state-vector simulator (measurements
    /// are skipped; sampling is a separate concern).
    pub fn replay(&self) -> Result<StateVector> {
        self.replay_capped(DEFAULT_MAX_AMPS)
    }

    pub fn replay_capped(&self, max_amps: u64) -> Result<StateVector> {
        self.validate()?;
        let mut state = StateVector::init_state_capped(self.t, self.r, max_amps)?;
        for op in &self.ops {
            let gate = match *op {
                CircuitOp::Hadamard { qubit } => Gate::Hadamard { qubit },
                CircuitOp::ControlledPhase {
                    control,
                    target,
                    angle,
                } => Gate::ControlledPhase {
                    control,
                    target,
                    angle: angle.radians(),
                },
                CircuitOp::ModAdd {
                    control,
                    addend,
                    modulus,
                } => Gate::ControlledModAdd {
                    control,
                    addend,
                    modulus,
                },
                CircuitOp::Swap { a, b } => Gate::Swap { a, b },
                CircuitOp::Measure { .. } => continue,
            };
            state.apply_gate(&gate)?;
        }
        Ok(state)
    }
}

/// Inverse-QFT block as circuit ops, with exact `-π/2^{k-1}` angles.
fn iqft_ops(t: u32) -> Vec<CircuitOp> {
    inverse_qft_schedule(t)
        .into_iter()
        .map(|step| match step {
            IqftStep::Hadamard { qubit } => CircuitOp::Hadamard { qubit },
            IqftStep::Phase {
                control,
                target,
                denom_log2,
            } => CircuitOp::ControlledPhase {
                control,
                target,
                // -2π/2^k = -π/2^{k-1}
                angle: PiFraction::new(-1, 1u64 << (denom_log2 - 1)).expect("power of two"),
            },
            IqftStep::Swap { a, b } => CircuitOp::Swap { a, b },
        })
        .collect()
}

/// The full procedure as a static circuit: `t` Hadamards, one controlled
/// addition macro per control qubit with addend `(2^j x) mod r`, the inverse
/// transform, and a terminal measurement on every control qubit.
pub fn build_qpe_circuit(x: u64, r: u64, t: u32) -> Result<Circuit> {
    let inst = ProblemInstance::new(x, r)?;
    if inst.is_trivial() {
        return Err(Error::TrivialInstance(format!(
            "x = {x} is a multiple of r = {r}: the order is 1 and gcd(x, r) = {r}; no circuit needed"
        )));
    }
    if t == 0 || t > crate::MAX_CONTROL_QUBITS {
        return Err(Error::Range(format!(
            "t = {t} outside [1, {}]",
            crate::MAX_CONTROL_QUBITS
        )));
    }
    let mut ops = Vec::new();
    for qubit in 0..t {
        ops.push(CircuitOp::Hadamard { qubit });
    }
    for (j, &addend) in precompute_multiples(x, r, t)?.iter().enumerate() {
        ops.push(CircuitOp::ModAdd {
            control: j as u32,
            addend,
            modulus: r,
        });
    }
    ops.extend(iqft_ops(t));
    for qubit in 0..t {
        ops.push(CircuitOp::Measure { qubit });
    }
    let circuit = Circuit {
        t,
        r,
        ops,
        meta: CircuitMeta {
            x: Some(x),
            epsilon: None,
        },
    };
    circuit.validate()?;
    Ok(circuit)
}

/// Standalone inverse-QFT circuit on `t` qubits: `t` Hadamards,
/// `t(t-1)/2` controlled phases with angles `-2π/2^k` for `k = 2..t`, and
/// the final bit-reversal swaps. The work register is a placeholder of
/// dimension 2 (no gate touches it).
pub fn build_iqft_circuit(t: u32) -> Circuit {
    assert!(t >= 1, "the transform needs at least one qubit");
    Circuit {
        t,
        r: 2,
        ops: iqft_ops(t),
        meta: CircuitMeta::default(),
    }
}

/// Gate-count report backing the qubit- and gate-cost comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceReport {
    /// Control qubits this algorithm needs: `L + 1 + ⌈log2(2 + 1/(2ε))⌉`.
    pub t_this: u32,
    /// Control qubits order finding needs for the same budget:
    /// `2L + 1 + ⌈log2(2 + 1/(2ε))⌉`.
    pub t_shor: u32,
    pub hadamards: usize,
    pub cphases: usize,
    pub modadd_macros: usize,
    /// `modadd_macros · (4L + 2)` elementary gates, per the cited
    /// reversible-adder scheme.
    pub modadd_elementary_estimate: u64,
    /// `π / 2^{t-1}` radians, the smallest phase-gate angle appearing at
    /// this register size.
    pub smallest_phase_angle: f64,
}

pub fn resource_report(circuit: &Circuit, epsilon: f64) -> Result<ResourceReport> {
    let extra = accuracy_extra_bits(epsilon)?;
    let l = circuit.work_bits();
    let mut hadamards = 0;
    let mut cphases = 0;
    let mut modadd_macros = 0;
    for op in &circuit.ops {
        match op {
            CircuitOp::Hadamard { .. } => hadamards += 1,
            CircuitOp::ControlledPhase { .. } => cphases += 1,
            CircuitOp::ModAdd { .. } => modadd_macros += 1,
            CircuitOp::Swap { .. } | CircuitOp::Measure { .. } => {}
        }
    }
    Ok(ResourceReport {
        t_this: l + 1 + extra,
        t_shor: 2 * l + 1 + extra,
        hadamards,
        cphases,
        modadd_macros,
        modadd_elementary_estimate: modadd_macros as u64 * (4 * l as u64 + 2),
        smallest_phase_angle: std::f64::consts::PI / (1u64 << (circuit.t - 1)) as f64,
    })
}

/// Emit the circuit in the line-per-gate text format:
///
/// ```text
/// qreg q[4]; wreg w[40];
/// h q[0]
/// cmodadd(35,40) q[0], w
/// cp(-pi/2) q[2], q[3]
/// swap q[0], q[3]
/// measure q[0]
/// ```
pub fn emit_text(circuit: &Circuit) -> String {
    let mut out = format!("qreg q[{}]; wreg w[{}];\n", circuit.t, circuit.r);
    for op in &circuit.ops {
        match *op {
            CircuitOp::Hadamard { qubit } => {
                out.push_str(&format!("h q[{qubit}]\n"));
            }
            CircuitOp::ControlledPhase {
                control,
                target,
                angle,
            } => {
                out.push_str(&format!("cp({angle}) q[{control}], q[{target}]\n"));
            }
            CircuitOp::ModAdd {
                control,
                addend,
                modulus,
            } => {
                out.push_str(&format!("cmodadd({addend},{modulus}) q[{control}], w\n"));
            }
            CircuitOp::Swap { a, b } => {
                out.push_str(&format!("swap q[{a}], q[{b}]\n"));
            }
            CircuitOp::Measure { qubit } => {
                out.push_str(&format!("measure q[{qubit}]\n"));
            }
        }
    }
    out
}

fn parse_qubit(token: &str) -> Result<u32> {
    token
        .strip_prefix("q[")
        .and_then(|rest| rest.strip_suffix(']'))
        .and_then(|digits| digits.parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected a qubit reference, got `{token}`")))
}

/// Parse text produced by [`emit_text`] back into a circuit. The result
/// compares equal to the emitted circuit (provenance metadata is not part of
/// the format).
pub fn parse_text(text: &str) -> Result<Circuit> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty circuit text".into()))?;
    let (t, r) = parse_header(header)?;
    let mut ops = Vec::new();
    for line in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        ops.push(parse_gate_line(line)?);
    }
    let circuit = Circuit {
        t,
        r,
        ops,
        meta: CircuitMeta::default(),
    };
    circuit.validate()?;
    Ok(circuit)
}

fn parse_header(header: &str) -> Result<(u32, u64)> {
    let bad = || Error::Parse(format!("malformed header `{header}`"));
    let rest = header.strip_prefix("qreg q[").ok_or_else(bad)?;
    let (t_digits, rest) = rest.split_once("]; wreg w[").ok_or_else(bad)?;
    let r_digits = rest.strip_suffix("];").ok_or_else(bad)?;
    let t = t_digits.parse().map_err(|_| bad())?;
    let r = r_digits.parse().map_err(|_| bad())?;
    Ok((t, r))
}

fn parse_gate_line(line: &str) -> Result<CircuitOp> {
    let bad = || Error::Parse(format!("malformed gate line `{line}`"));
    let (head, args) = line.split_once(' ').ok_or_else(bad)?;
    if head == "h" {
        return Ok(CircuitOp::Hadamard {
            qubit: parse_qubit(args)?,
        });
    }
    if head == "measure" {
        return Ok(CircuitOp::Measure {
            qubit: parse_qubit(args)?,
        });
    }
    if head == "swap" {
        let (a, b) = args.split_once(", ").ok_or_else(bad)?;
        return Ok(CircuitOp::Swap {
            a: parse_qubit(a)?,
            b: parse_qubit(b)?,
        });
    }
    if let Some(rest) = head.strip_prefix("cp(") {
        let angle_text = rest.strip_suffix(')').ok_or_else(bad)?;
        let angle = PiFraction::parse(angle_text)?;
        let (c, t) = args.split_once(", ").ok_or_else(bad)?;
        return Ok(CircuitOp::ControlledPhase {
            control: parse_qubit(c)?,
            target: parse_qubit(t)?,
            angle,
        });
    }
    if let Some(rest) = head.strip_prefix("cmodadd(") {
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        let (addend, modulus) = inner.split_once(',').ok_or_else(bad)?;
        let (control, w) = args.split_once(", ").ok_or_else(bad)?;
        if w != "w" {
            return Err(bad());
        }
        return Ok(CircuitOp::ModAdd {
            control: parse_qubit(control)?,
            addend: addend.parse().map_err(|_| bad())?,
            modulus: modulus.parse().map_err(|_| bad())?,
        });
    }
    Err(bad())
}
