//! Rendering of run records, distributions, and resource reports. Every
//! function here is a pure formatter so identical inputs yield identical
//! bytes.

use serde_json::{json, Value};

use qgcd_core::circuit::{Circuit, PiFraction, ResourceReport};
use qgcd_core::qpe::{GcdOutcome, Protocol, RunRecord};

/// Probabilities are printed with twelve digits after the decimal point so
/// regenerated histograms diff cleanly.
pub fn format_probability(p: f64) -> String {
    format!("{p:.12}")
}

pub fn distribution_csv(probabilities: &[f64]) -> String {
    let mut out = String::from("m,probability\n");
    for (m, p) in probabilities.iter().enumerate() {
        out.push_str(&format!("{m},{}\n", format_probability(*p)));
    }
    out
}

pub fn distribution_text(probabilities: &[f64]) -> String {
    let mut out = String::new();
    for (m, p) in probabilities.iter().enumerate() {
        out.push_str(&format!("{m:>8}  {}\n", format_probability(*p)));
    }
    out
}

pub fn distribution_json(probabilities: &[f64]) -> Value {
    Value::Array(
        probabilities
            .iter()
            .enumerate()
            .map(|(m, p)| json!({ "m": m, "probability": p }))
            .collect(),
    )
}

fn gcd_value(outcome: &GcdOutcome) -> Value {
    match outcome {
        GcdOutcome::Gcd(g) => json!(g),
        GcdOutcome::Failed => json!("failed"),
    }
}

/// Stable-schema JSON form of a full run record.
pub fn run_record_json(record: &RunRecord) -> Value {
    json!({
        "instance": {
            "x": record.instance.x,
            "r": record.instance.r,
            "L": record.instance.work_bits,
            "N": record.instance.order,
        },
        "config": {
            "t": record.config.t,
            "epsilon": record.config.epsilon,
            "shots": record.config.shots,
            "seed": record.config.seed,
            "protocol": record.config.protocol.to_string(),
        },
        "samples": record.samples.iter()
            .map(|s| json!({ "m": s.m_out, "t": s.t }))
            .collect::<Vec<_>>(),
        "recoveries": record.recoveries.iter()
            .map(|r| json!({
                "p": r.p,
                "r": r.r,
                "s": r.reduced.num,
                "N": r.reduced.den,
                "exact": r.exact,
            }))
            .collect::<Vec<_>>(),
        "iterations": record.iterations.iter()
            .map(|step| json!({
                "x": step.x,
                "r": step.r,
                "s": step.s_over_n.num,
                "N": step.s_over_n.den,
                "g": step.candidate,
                "divides_x": step.divides_x,
                "divides_r": step.divides_r,
            }))
            .collect::<Vec<_>>(),
        "gcd": gcd_value(&record.claimed_gcd),
    })
}

/// Human form of a run record: instance, configuration, per-repetition
/// recovered fractions, the order estimate, and the claim.
pub fn run_record_text(record: &RunRecord) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "instance: x={} r={} L={} N={}\n",
        record.instance.x, record.instance.r, record.instance.work_bits, record.instance.order
    ));
    out.push_str(&format!(
        "config: protocol={} t={} epsilon={} seed={}\n",
        record.config.protocol, record.config.t, record.config.epsilon, record.config.seed
    ));
    let label = match record.config.protocol {
        Protocol::A => "rep",
        Protocol::B => "draw",
    };
    for (i, (sample, recovery)) in record.samples.iter().zip(&record.recoveries).enumerate() {
        out.push_str(&format!(
            "{label} {i}: m={} b={}/{} p={} s/N={}/{} exact={}\n",
            sample.m_out,
            sample.b.num,
            sample.b.den,
            recovery.p,
            recovery.reduced.num,
            recovery.reduced.den,
            recovery.exact
        ));
    }
    for (i, step) in record.iterations.iter().enumerate() {
        out.push_str(&format!(
            "iter {i}: x={} r={} s/N={}/{} g={} divides_x={} divides_r={}\n",
            step.x,
            step.r,
            step.s_over_n.num,
            step.s_over_n.den,
            step.candidate,
            step.divides_x,
            step.divides_r
        ));
    }
    if record.config.protocol == Protocol::A {
        let n_hat = record
            .recoveries
            .iter()
            .map(|r| r.reduced.den)
            .max()
            .unwrap_or(1);
        out.push_str(&format!("N_hat = {n_hat}\n"));
    }
    match record.claimed_gcd {
        GcdOutcome::Gcd(g) => out.push_str(&format!("gcd = {g}\n")),
        GcdOutcome::Failed => out.push_str("gcd = failed\n"),
    }
    out
}

/// The smallest phase angle at register size `t`, as an exact fraction of π.
fn smallest_angle(t: u32) -> PiFraction {
    PiFraction::new(1, 1u64 << (t - 1)).expect("power of two")
}

pub fn report_text(circuit: &Circuit, report: &ResourceReport) -> String {
    format!(
        "t = {}\n\
         L = {}\n\
         t_this = {}\n\
         t_shor = {}\n\
         hadamards = {}\n\
         cphases = {}\n\
         modadd_macros = {}\n\
         modadd_elementary_estimate = {}\n\
         smallest_phase_angle = {}\n",
        circuit.t,
        circuit.work_bits(),
        report.t_this,
        report.t_shor,
        report.hadamards,
        report.cphases,
        report.modadd_macros,
        report.modadd_elementary_estimate,
        smallest_angle(circuit.t)
    )
}

pub fn circuit_json(circuit: &Circuit, text: &str, report: &ResourceReport) -> Value {
    json!({
        "t": circuit.t,
        "r": circuit.r,
        "L": circuit.work_bits(),
        "text": text,
        "report": {
            "t_this": report.t_this,
            "t_shor": report.t_shor,
            "hadamards": report.hadamards,
            "cphases": report.cphases,
            "modadd_macros": report.modadd_macros,
            "modadd_elementary_estimate": report.modadd_elementary_estimate,
            "smallest_phase_angle": smallest_angle(circuit.t).to_string(),
            "smallest_phase_angle_radians": report.smallest_phase_angle,
        },
    })
}
