use std::fmt;
use std::path::Path;

use fockdyn::dynamics::{
    competing_channel_fixed_point, convergence_trace, derive_transfer_matrix, steady_state, CoarseGraining,
    ProbabilityVector,
};
use fockdyn::optics::{beamsplitter, bunching_enhancement, hom_distribution, transition_amplitude};
use fockdyn::{BeamsplitterSpec, FockError, OccupationVector, ParticleKind, SingleParticleUnitary};
use serde_json::{json, Value};

use crate::render::{sig6, Table};
use crate::{DephasingBasis, Kind, UnitarySource};

/// `t^2 + r^2` may miss 1 by this much on the command line; the pair is
/// rescaled onto the unit circle.
const BEAMSPLITTER_INPUT_SLACK: f64 = 1e-3;

#[derive(Debug)]
pub enum CliError {
    Arg(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Arg(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Arg(m) | CliError::Numeric(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::NotUnitary { .. }
            | FockError::NonUniqueFixedPoint { .. }
            | FockError::NotConverged { .. }
            | FockError::InvalidDensityMatrix(_)
            | FockError::NotStochastic(_)
            | FockError::UndefinedRatio
            | FockError::ZeroNorm => CliError::Numeric(e.to_string()),
            _ => CliError::Arg(e.to_string()),
        }
    }
}

fn arg(e: FockError) -> CliError {
    CliError::Arg(e.to_string())
}

/// Everything a command produces, ready for any output format.
pub struct Rendered {
    pub config: Value,
    pub table: Table,
    pub csv: String,
    pub json: Value,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| CliError::Arg(format!("bad {what} entry {tok:?} in {s:?}")))
        })
        .collect()
}

fn parse_occupation(s: &str) -> Result<OccupationVector, CliError> {
    OccupationVector::parse(s).map_err(arg)
}

/// Fills in a missing amplitude from the other and rescales near-unit pairs.
fn resolve_beamsplitter(t: Option<f64>, r: Option<f64>) -> Result<BeamsplitterSpec, CliError> {
    let (t, r) = match (t, r) {
        (None, None) => return Ok(BeamsplitterSpec::balanced()),
        (Some(t), None) => (t, (1.0 - t * t).max(0.0).sqrt()),
        (None, Some(r)) => ((1.0 - r * r).max(0.0).sqrt(), r),
        (Some(t), Some(r)) => (t, r),
    };
    let s = t * t + r * r;
    if s.is_nan() || (s - 1.0).abs() > BEAMSPLITTER_INPUT_SLACK {
        return Err(CliError::Arg(format!("t^2 + r^2 = {s} is not 1 (t={t}, r={r})")));
    }
    BeamsplitterSpec::new(t / s.sqrt(), r / s.sqrt()).map_err(arg)
}

fn beamsplitter_config(spec: BeamsplitterSpec) -> Value {
    json!({ "kind": "beamsplitter", "t": spec.t(), "r": spec.r() })
}

fn load_matrix(path: &Path) -> Result<SingleParticleUnitary, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Arg(format!("{}: {e}", path.display())))?;
    Ok(SingleParticleUnitary::from_json(&value)?)
}

/// Resolves `--matrix`, `--fourier` or `--t/--r`, in that order; `default`
/// applies when none is given.
fn resolve_unitary(
    src: &UnitarySource,
    default: impl FnOnce() -> Result<(SingleParticleUnitary, Value), CliError>,
) -> Result<(SingleParticleUnitary, Value), CliError> {
    if let Some(path) = &src.matrix {
        let u = load_matrix(path)?;
        let cfg = json!({ "kind": "matrix", "path": path.display().to_string(), "n": u.dim() });
        return Ok((u, cfg));
    }
    if let Some(n) = src.fourier {
        let u = SingleParticleUnitary::fourier(n).map_err(arg)?;
        return Ok((u, json!({ "kind": "fourier", "n": n })));
    }
    if src.t.is_some() || src.r.is_some() {
        let spec = resolve_beamsplitter(src.t, src.r)?;
        return Ok((beamsplitter(spec), beamsplitter_config(spec)));
    }
    default()
}

pub fn hom(t: Option<f64>, r: Option<f64>, input: &str) -> Result<Rendered, CliError> {
    let spec = resolve_beamsplitter(t, r)?;
    let input = parse_occupation(input)?;
    if input.num_modes() != 2 {
        return Err(CliError::Arg(format!("hom needs a 2-mode input, got {input}")));
    }
    let dist = hom_distribution(spec, &input)?;

    let mut table = Table::new(&["occupation", "probability"]);
    for (occ, p) in dist.entries() {
        table.row(vec![occ.to_string(), sig6(*p)]);
    }
    Ok(Rendered {
        config: json!({ "command": "hom", "unitary": beamsplitter_config(spec), "input": input }),
        table,
        csv: dist.to_csv(),
        json: json!({ "distribution": dist.to_json() }),
    })
}

pub fn amplitude(input: &str, to: &str, kind: Kind, src: &UnitarySource) -> Result<Rendered, CliError> {
    let input = parse_occupation(input)?;
    let output = parse_occupation(to)?;
    let (u, ucfg) = resolve_unitary(src, || {
        let spec = BeamsplitterSpec::balanced();
        Ok((beamsplitter(spec), beamsplitter_config(spec)))
    })?;
    let kind = match kind {
        Kind::Boson => ParticleKind::Boson,
        Kind::Fermion => ParticleKind::Fermion,
    };
    let a = transition_amplitude(&u, &input, &output, kind)?;

    let mut table = Table::new(&["input", "output", "kind", "re", "im", "probability"]);
    table.row(vec![
        input.to_string(),
        output.to_string(),
        kind.to_string(),
        sig6(a.re),
        sig6(a.im),
        sig6(a.norm_sqr()),
    ]);
    Ok(Rendered {
        config: json!({ "command": "amplitude", "unitary": ucfg, "input": input, "to": output, "kind": kind }),
        table,
        csv: format!(
            "input,output,kind,re,im,probability\n\"{input}\",\"{output}\",{kind},{:?},{:?},{:?}\n",
            a.re,
            a.im,
            a.norm_sqr()
        ),
        json: json!({ "re": a.re, "im": a.im, "probability": a.norm_sqr() }),
    })
}

pub fn bunching(inputs: &str, target: usize, src: &UnitarySource) -> Result<Rendered, CliError> {
    let modes: Vec<usize> = parse_list(inputs, "mode")?;
    let (u, ucfg) = resolve_unitary(src, || {
        let n = modes.iter().copied().max().map_or(1, |m| m + 1).max(target + 1).max(modes.len());
        let u = SingleParticleUnitary::fourier(n).map_err(arg)?;
        Ok((u, json!({ "kind": "fourier", "n": n })))
    })?;
    let ratio = bunching_enhancement(&u, &modes, target)?;
    let classical: f64 = modes.iter().map(|&m| u.get(m, target).norm_sqr()).product();
    let quantum = ratio * classical;
    let factorial: f64 = (1..=modes.len()).map(|k| k as f64).product();

    let mut table = Table::new(&["M", "target", "p_quantum", "p_classical", "ratio", "M!"]);
    table.row(vec![
        modes.len().to_string(),
        target.to_string(),
        sig6(quantum),
        sig6(classical),
        sig6(ratio),
        sig6(factorial),
    ]);
    Ok(Rendered {
        config: json!({ "command": "bunching", "unitary": ucfg, "inputs": modes, "target": target }),
        table,
        csv: format!(
            "num_particles,target,p_quantum,p_classical,ratio,m_factorial\n{},{target},{quantum:?},{classical:?},{ratio:?},{factorial:?}\n",
            modes.len()
        ),
        json: json!({
            "num_particles": modes.len(),
            "p_quantum": quantum,
            "p_classical": classical,
            "ratio": ratio,
            "m_factorial": factorial,
        }),
    })
}

pub fn thermalize(steps: usize, initial: &str, modes: usize, src: &UnitarySource) -> Result<Rendered, CliError> {
    if steps < 1 {
        return Err(CliError::Arg("--steps must be at least 1".into()));
    }
    if modes < 2 {
        return Err(CliError::Arg("--modes must be at least 2".into()));
    }
    let grading = CoarseGraining::same_vs_different(modes, 2).map_err(arg)?;
    let start = ProbabilityVector::new(grading.labels(), parse_list(initial, "probability")?)
        .map_err(|e| CliError::Arg(format!("initial distribution: {e}")))?;
    let (u, ucfg) = resolve_unitary(src, || {
        if modes == 2 {
            let spec = BeamsplitterSpec::balanced();
            Ok((beamsplitter(spec), beamsplitter_config(spec)))
        } else {
            let u = SingleParticleUnitary::fourier(modes).map_err(arg)?;
            Ok((u, json!({ "kind": "fourier", "n": modes })))
        }
    })?;
    if u.dim() != modes {
        return Err(CliError::Arg(format!("unitary has {} modes, --modes is {modes}", u.dim())));
    }
    let transfer = derive_transfer_matrix(&u, &grading)?;
    let pi = steady_state(&transfer)?;
    let rows = convergence_trace(&transfer, &start, steps)?;

    let mut table = Table::new(&["step", "P_same", "P_diff", "l1_to_steady"]);
    let mut csv = String::from("step,P_same,P_diff,l1_distance_to_steady\n");
    for row in &rows {
        table.row(vec![
            row.step.to_string(),
            sig6(row.probs[0]),
            sig6(row.probs[1]),
            sig6(row.l1_distance_to_steady),
        ]);
        csv.push_str(&format!(
            "{},{:?},{:?},{:?}\n",
            row.step, row.probs[0], row.probs[1], row.l1_distance_to_steady
        ));
    }
    table.note(format!(
        "transfer matrix [[{}, {}], [{}, {}]]; steady state ({}, {})",
        sig6(transfer.get(0, 0)),
        sig6(transfer.get(0, 1)),
        sig6(transfer.get(1, 0)),
        sig6(transfer.get(1, 1)),
        sig6(pi.probs()[0]),
        sig6(pi.probs()[1]),
    ));
    Ok(Rendered {
        config: json!({
            "command": "thermalize",
            "unitary": ucfg,
            "steps": steps,
            "initial": start.probs(),
            "modes": modes,
        }),
        table,
        csv,
        json: json!({
            "transfer_matrix": transfer.to_json(),
            "steady_state": pi,
            "trace": rows,
        }),
    })
}

pub fn fixedpoint(dim: usize, phases: &str, basis: DephasingBasis) -> Result<Rendered, CliError> {
    if dim < 2 {
        return Err(CliError::Arg("--dim must be at least 2".into()));
    }
    let phases: Vec<f64> = parse_list(phases, "phase")?;
    if phases.len() != dim {
        return Err(CliError::Arg(format!("{} phases given for dim {dim}", phases.len())));
    }
    let step = SingleParticleUnitary::diagonal_phases(&phases).map_err(arg)?;
    let (b, basis_name) = match basis {
        DephasingBasis::Fourier => (SingleParticleUnitary::fourier(dim).map_err(arg)?, "fourier"),
        DephasingBasis::Identity => (SingleParticleUnitary::identity(dim), "identity"),
    };
    let report = competing_channel_fixed_point(&step, &b, dim)?;
    let diagonal = report.state.diagonal();

    let mut table = Table::new(&["level", "population"]);
    for (i, p) in diagonal.iter().enumerate() {
        table.row(vec![i.to_string(), sig6(*p)]);
    }
    table.note(format!("eigenvalue-1 multiplicity: {}", report.multiplicity));
    table.note(format!("distance from I/{dim}: {}", sig6(report.distance_from_maximally_mixed)));
    table.note(format!(
        "overlap condition: {} (min overlap {})",
        report.overlap_condition,
        sig6(report.min_overlap)
    ));
    table.note(format!("non-degenerate phases: {}", report.nondegenerate_phases));
    if !report.is_unique() {
        table.note("fixed point not unique; populations are the projection of |0><0|");
    }

    let mut csv = String::from("quantity,value\n");
    csv.push_str(&format!("multiplicity,{}\n", report.multiplicity));
    csv.push_str(&format!("distance_from_maximally_mixed,{:?}\n", report.distance_from_maximally_mixed));
    csv.push_str(&format!("min_overlap,{:?}\n", report.min_overlap));
    csv.push_str(&format!("overlap_condition,{}\n", report.overlap_condition));
    csv.push_str(&format!("nondegenerate_phases,{}\n", report.nondegenerate_phases));
    for (i, p) in diagonal.iter().enumerate() {
        csv.push_str(&format!("population_{i},{p:?}\n"));
    }
    Ok(Rendered {
        config: json!({ "command": "fixedpoint", "dim": dim, "phases": phases, "basis": basis_name }),
        table,
        csv,
        json: json!({
            "diagonal": diagonal,
            "multiplicity": report.multiplicity,
            "unique": report.is_unique(),
            "distance_from_maximally_mixed": report.distance_from_maximally_mixed,
            "min_overlap": report.min_overlap,
            "overlap_condition": report.overlap_condition,
            "nondegenerate_phases": report.nondegenerate_phases,
        }),
    })
}
