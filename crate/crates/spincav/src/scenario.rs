//! Declarative scenario configs and the task runner behind the CLI.
//!
//! A scenario is a single TOML file with explicit unit suffixes in every key
//! (`omega_ghz`, `scale_t`, `temperature_k`); no unit inference is
//! performed anywhere.  Outputs are deterministic: the same config renders
//! byte-identical CSV.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::constants::K_B_GHZ_PER_K;
use crate::eigen::{diagonalize, Ensemble, PreparationSpec, SpectralModel};
use crate::error::{Error, Result};
use crate::export;
use crate::inout::{
    dispersive_shift, field_sweep_fixed_frequency, shift_table, transmission_spectrum,
    CavityParams, SweepPreparation,
};
use crate::model::{
    CouplingVector, DimerConfig, ElectroNuclearConfig, FieldVector, GiantSpinConfig, ModelConfig,
    Spin, ToyConfig,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub model: ModelBlock,
    pub cavity: CavityBlock,
    #[serde(default)]
    pub lineshape: LineshapeBlock,
    pub field: FieldBlock,
    pub coupling: CouplingBlock,
    #[serde(default)]
    pub preparation: PreparationBlock,
    pub task: TaskBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: String,
    // toy_s1
    pub d_ghz: Option<f64>,
    pub g_diag: Option<[f64; 3]>,
    // giant_spin
    pub s: Option<f64>,
    pub stevens_ghz: Option<Vec<(u32, i32, f64)>>,
    pub g_rows: Option<[[f64; 3]; 3]>,
    pub zeeman_sign: Option<f64>,
    // dimer
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub g1_diag: Option<[f64; 3]>,
    pub g2_diag: Option<[f64; 3]>,
    pub theta_deg: Option<f64>,
    pub j12_ghz: Option<f64>,
    pub j12_over_kb_k: Option<f64>,
    pub gj1: Option<f64>,
    pub gj2: Option<f64>,
    // electronuclear
    pub i: Option<f64>,
    pub g_perp: Option<f64>,
    pub g_par: Option<f64>,
    pub g_i: Option<f64>,
    pub a_par_ghz: Option<f64>,
    pub a_perp_ghz: Option<f64>,
    pub p_ghz: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityBlock {
    pub omega_ghz: f64,
    pub gamma1_ghz: f64,
    pub gamma2_ghz: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineshapeBlock {
    #[serde(default)]
    pub eta_ghz: f64,
    #[serde(default = "one")]
    pub n_molecules: f64,
    /// Optional per-molecule coupling scale factors (overrides `n_molecules`).
    pub molecule_scales: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

impl Default for LineshapeBlock {
    fn default() -> Self {
        Self { eta_ghz: 0.0, n_molecules: 1.0, molecule_scales: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub direction: [f64; 3],
    /// Field = direction * scale; the direction is used as given, not normalized.
    pub scale_t: Option<f64>,
    // sweep range (field-sweep, sw-check and optimize tasks)
    pub scale_min_t: Option<f64>,
    pub scale_max_t: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingBlock {
    pub lambda_ghz: [f64; 3],
    pub lambda_nuclear_ghz: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PreparationBlock {
    /// `each` (default) | `pure` | `thermal` | `explicit`
    pub kind: Option<String>,
    pub state_index: Option<usize>,
    pub temperature_k: Option<f64>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskBlock {
    pub kind: String,
    // spectrum
    pub omega_min_ghz: Option<f64>,
    pub omega_max_ghz: Option<f64>,
    pub points: Option<usize>,
    // shifts
    pub probe_omega_ghz: Option<f64>,
    // sw-check
    pub n_max: Option<usize>,
    // optimize
    pub scale_step_t: Option<f64>,
    pub directions: Option<Vec<[f64; 3]>>,
    pub refine: Option<bool>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub csv: Option<String>,
    pub svg: Option<String>,
}

/// A parsed and semantically validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: ModelConfig,
    pub cavity: CavityParams,
    pub eta_ghz: f64,
    pub ensemble: Ensemble,
    pub field: FieldBlock,
    pub coupling: CouplingVector,
    pub preparation: Preparation,
    pub task: TaskBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preparation {
    EachState,
    Spec(PreparationSpec),
}

fn missing(block: &str, key: &str) -> Error {
    Error::Config(format!("[{block}] is missing required key `{key}`"))
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

impl Scenario {
    pub fn from_file_text(text: &str) -> Result<Self> {
        Self::from_parts(ScenarioFile::parse(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_file_text(&text)
    }

    pub fn from_parts(file: ScenarioFile) -> Result<Self> {
        let model = build_model(&file.model)?;
        let cavity = CavityParams::new(
            file.cavity.omega_ghz,
            file.cavity.gamma1_ghz,
            file.cavity.gamma2_ghz,
        )
        .map_err(|e| Error::Config(format!("[cavity]: {e}")))?;

        if file.lineshape.eta_ghz < 0.0 || !file.lineshape.eta_ghz.is_finite() {
            return Err(Error::Config("[lineshape] eta_ghz must be >= 0".into()));
        }
        let ensemble = match &file.lineshape.molecule_scales {
            Some(scales) => Ensemble::Scaled(scales.clone()),
            None => Ensemble::Uniform { n: file.lineshape.n_molecules },
        };
        ensemble.validate().map_err(|e| Error::Config(format!("[lineshape]: {e}")))?;

        if file.field.direction.iter().all(|v| *v == 0.0) {
            return Err(Error::Config("[field] direction must be non-zero".into()));
        }

        let coupling = CouplingVector {
            electronic: file.coupling.lambda_ghz,
            nuclear: file.coupling.lambda_nuclear_ghz,
        };
        coupling.validate().map_err(|e| Error::Config(format!("[coupling]: {e}")))?;
        if coupling.is_zero() {
            return Err(Error::Config("[coupling] lambda_ghz must have a non-zero component".into()));
        }

        let preparation = match file.preparation.kind.as_deref().unwrap_or("each") {
            "each" => Preparation::EachState,
            "pure" => Preparation::Spec(PreparationSpec::Pure(
                file.preparation.state_index.ok_or_else(|| missing("preparation", "state_index"))?,
            )),
            "thermal" => Preparation::Spec(PreparationSpec::Thermal {
                kelvin: file
                    .preparation
                    .temperature_k
                    .ok_or_else(|| missing("preparation", "temperature_k"))?,
            }),
            "explicit" => Preparation::Spec(PreparationSpec::Explicit(
                file.preparation.weights.clone().ok_or_else(|| missing("preparation", "weights"))?,
            )),
            other => {
                return Err(Error::Config(format!(
                    "[preparation] unknown kind `{other}` (each|pure|thermal|explicit)"
                )))
            }
        };

        match file.task.kind.as_str() {
            "spectrum" | "field-sweep" | "shifts" | "sw-check" | "qnd" | "optimize" => {}
            other => {
                return Err(Error::Config(format!(
                    "[task] unknown kind `{other}` (spectrum|field-sweep|shifts|sw-check|qnd|optimize)"
                )))
            }
        }

        Ok(Self {
            model,
            cavity,
            eta_ghz: file.lineshape.eta_ghz,
            ensemble,
            field: file.field,
            coupling,
            preparation,
            task: file.task,
            output: file.output,
        })
    }

    pub fn static_field(&self) -> Result<FieldVector> {
        let scale = self.field.scale_t.ok_or_else(|| missing("field", "scale_t"))?;
        Ok(FieldVector::scaled(self.field.direction, scale))
    }

    fn sweep_grid(&self) -> Result<Vec<f64>> {
        let min = self.field.scale_min_t.ok_or_else(|| missing("field", "scale_min_t"))?;
        let max = self.field.scale_max_t.ok_or_else(|| missing("field", "scale_max_t"))?;
        let points = self.field.points.ok_or_else(|| missing("field", "points"))?;
        if points < 2 || max <= min {
            return Err(Error::Config("[field] sweep needs points >= 2 and scale_max_t > scale_min_t".into()));
        }
        Ok((0..points).map(|i| min + (max - min) * i as f64 / (points - 1) as f64).collect())
    }

    fn base_prep_spec(&self) -> PreparationSpec {
        match &self.preparation {
            Preparation::EachState => PreparationSpec::Pure(0),
            Preparation::Spec(spec) => spec.clone(),
        }
    }

    pub fn spectral_model(&self) -> Result<SpectralModel> {
        SpectralModel::build(
            &self.model,
            &self.static_field()?,
            &self.coupling,
            &self.base_prep_spec(),
            self.ensemble.clone(),
            self.eta_ghz,
        )
    }
}

fn need(v: Option<f64>, key: &str) -> Result<f64> {
    v.ok_or_else(|| missing("model", key))
}

pub fn build_model(block: &ModelBlock) -> Result<ModelConfig> {
    let spin_of =
        |v: f64, key: &str| Spin::new(v).map_err(|e| Error::Config(format!("[model] {key}: {e}")));
    match block.kind.as_str() {
        "toy_s1" => Ok(ModelConfig::Toy(ToyConfig {
            d_ghz: need(block.d_ghz, "d_ghz")?,
            g_diag: block.g_diag.ok_or_else(|| missing("model", "g_diag"))?,
        })),
        "giant_spin" => {
            let s = spin_of(need(block.s, "s")?, "s")?;
            let mut stevens = BTreeMap::new();
            for &(k, q, v) in block.stevens_ghz.as_deref().unwrap_or(&[]) {
                stevens.insert((k, q), v);
            }
            let g = match (block.g_rows, block.g_diag) {
                (Some(rows), None) => rows,
                (None, Some(d)) => [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]],
                _ => return Err(Error::Config("[model] give exactly one of g_diag or g_rows".into())),
            };
            Ok(ModelConfig::GiantSpin(GiantSpinConfig {
                s,
                stevens,
                raw_anisotropy: Vec::new(),
                g,
                zeeman_sign: block.zeeman_sign.unwrap_or(1.0),
            }))
        }
        "dimer" => {
            let j12_ghz = match (block.j12_ghz, block.j12_over_kb_k) {
                (Some(j), None) => j,
                (None, Some(jk)) => jk * K_B_GHZ_PER_K,
                _ => {
                    return Err(Error::Config(
                        "[model] give exactly one of j12_ghz or j12_over_kb_k".into(),
                    ))
                }
            };
            Ok(ModelConfig::Dimer(DimerConfig {
                s1: spin_of(need(block.s1, "s1")?, "s1")?,
                s2: spin_of(need(block.s2, "s2")?, "s2")?,
                g1_diag: block.g1_diag.ok_or_else(|| missing("model", "g1_diag"))?,
                g2_diag: block.g2_diag.ok_or_else(|| missing("model", "g2_diag"))?,
                theta: need(block.theta_deg, "theta_deg")?.to_radians(),
                j12_ghz,
                gj1: need(block.gj1, "gj1")?,
                gj2: need(block.gj2, "gj2")?,
            }))
        }
        "electronuclear" => Ok(ModelConfig::ElectroNuclear(ElectroNuclearConfig {
            s: spin_of(need(block.s, "s")?, "s")?,
            i: spin_of(need(block.i, "i")?, "i")?,
            g_perp: need(block.g_perp, "g_perp")?,
            g_par: need(block.g_par, "g_par")?,
            g_i: need(block.g_i, "g_i")?,
            a_par_ghz: need(block.a_par_ghz, "a_par_ghz")?,
            a_perp_ghz: need(block.a_perp_ghz, "a_perp_ghz")?,
            p_ghz: need(block.p_ghz, "p_ghz")?,
        })),
        other => Err(Error::Config(format!(
            "[model] unknown kind `{other}` (toy_s1|giant_spin|dimer|electronuclear)"
        ))),
    }
}

/// Files written plus any dispersive-guard warnings raised on the way.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    /// Human-readable summary lines for stdout.
    pub summary: Vec<String>,
}

/// Execute a scenario, writing outputs under `out_dir` (paths in the config
/// are joined onto it).
pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    match sc.task.kind.as_str() {
        "spectrum" => run_spectrum(sc, out_dir),
        "field-sweep" => run_field_sweep(sc, out_dir),
        "shifts" => run_shifts(sc, out_dir),
        "sw-check" => run_sw_check(sc, out_dir),
        "qnd" => run_qnd(sc, out_dir),
        "optimize" => run_optimize(sc, out_dir),
        _ => unreachable!("validated at load"),
    }
}

fn out_path(sc_path: &Option<String>, out_dir: &Path, default_name: &str) -> PathBuf {
    match sc_path {
        Some(p) => out_dir.join(p),
        None => out_dir.join(default_name),
    }
}

fn prepared_states(sc: &Scenario, sm: &SpectralModel) -> Result<Vec<(usize, SpectralModel)>> {
    match &sc.preparation {
        Preparation::EachState => (0..sm.dim()).map(|b| Ok((b, sm.prepared_pure(b)?))).collect(),
        Preparation::Spec(_) => Ok(vec![(usize::MAX, sm.clone())]),
    }
}

fn degeneracy_warnings(sm: &SpectralModel, warnings: &mut Vec<String>) {
    for (i, j) in sm.eigen.degenerate_pairs() {
        warnings.push(format!(
            "states {i} and {j} are degenerate within 1e-9 GHz; readout cannot distinguish them"
        ));
    }
}

fn run_spectrum(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    let lo = sc.task.omega_min_ghz.ok_or_else(|| missing("task", "omega_min_ghz"))?;
    let hi = sc.task.omega_max_ghz.ok_or_else(|| missing("task", "omega_max_ghz"))?;
    let points = sc.task.points.ok_or_else(|| missing("task", "points"))?;
    if points < 2 || hi <= lo {
        return Err(Error::Config(
            "[task] spectrum needs points >= 2 and omega_max_ghz > omega_min_ghz".into(),
        ));
    }
    let grid: Vec<f64> =
        (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();

    let sm = sc.spectral_model()?;
    let mut report = RunReport::default();
    degeneracy_warnings(&sm, &mut report.warnings);

    let mut traces = Vec::new();
    for (beta, prepared) in prepared_states(sc, &sm)? {
        let state_label = if beta == usize::MAX { 0 } else { beta };
        if beta != usize::MAX {
            let entry = dispersive_shift(&prepared, &sc.cavity, beta, Some(sc.cavity.omega_ghz))?;
            if entry.guard_violated {
                report.warnings.push(format!(
                    "state {beta}: dispersive guard violated (|Lambda| >= ||E| - omega_c|)"
                ));
            }
        }
        let trace = transmission_spectrum(&grid, &sc.cavity, &prepared)?;
        traces.push((state_label, trace));
    }

    let csv = export::trace_csv(&traces.iter().map(|(b, t)| (*b, t)).collect::<Vec<_>>());
    let csv_path = out_path(&sc.output.csv, out_dir, "spectrum.csv");
    export::write_file(&csv_path, &csv)?;
    report.files.push(csv_path);

    if sc.output.svg.is_some() {
        let curves: Vec<(String, &[f64], &[f64])> = traces
            .iter()
            .map(|(b, t)| (format!("state {b}"), t.omega_ghz.as_slice(), t.abs_t.as_slice()))
            .collect();
        let svg = export::line_plot_svg("transmission spectrum", "omega (GHz)", "|t_c|", &curves);
        let svg_path = out_path(&sc.output.svg, out_dir, "spectrum.svg");
        export::write_file(&svg_path, &svg)?;
        report.files.push(svg_path);
    }
    report.summary.push(format!("spectrum: {} states x {} points", traces.len(), points));
    Ok(report)
}

fn run_field_sweep(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    let grid = sc.sweep_grid()?;
    let prep = match &sc.preparation {
        Preparation::EachState => SweepPreparation::EachState,
        Preparation::Spec(spec) => SweepPreparation::Fixed(spec.clone()),
    };
    let sweep = field_sweep_fixed_frequency(
        &sc.model,
        &sc.coupling,
        &sc.cavity,
        sc.ensemble.clone(),
        sc.eta_ghz,
        sc.field.direction,
        &grid,
        &prep,
    )?;
    let mut report = RunReport::default();
    let csv = export::sweep_csv(&sweep);
    let csv_path = out_path(&sc.output.csv, out_dir, "field_sweep.csv");
    export::write_file(&csv_path, &csv)?;
    report.files.push(csv_path);

    if sc.output.svg.is_some() {
        let abs: Vec<Vec<f64>> =
            sweep.curves.iter().map(|c| c.iter().map(|t| t.norm()).collect()).collect();
        let curves: Vec<(String, &[f64], &[f64])> = sweep
            .states
            .iter()
            .zip(abs.iter())
            .map(|(s, y)| {
                let label = match s {
                    Some(b) => format!("state {b}"),
                    None => "prepared".to_string(),
                };
                (label, sweep.b_t.as_slice(), y.as_slice())
            })
            .collect();
        let svg = export::line_plot_svg("fixed-frequency field sweep", "b (T)", "|t_c|", &curves);
        let svg_path = out_path(&sc.output.svg, out_dir, "field_sweep.svg");
        export::write_file(&svg_path, &svg)?;
        report.files.push(svg_path);
    }
    report.summary.push(format!(
        "field sweep: {} curves x {} field points at omega = {} GHz",
        sweep.curves.len(),
        grid.len(),
        sc.cavity.omega_ghz
    ));
    Ok(report)
}

fn run_shifts(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    let sm = sc.spectral_model()?;
    let mut report = RunReport::default();
    degeneracy_warnings(&sm, &mut report.warnings);
    let shifts = shift_table(&sm, &sc.cavity, sc.task.probe_omega_ghz)?;
    for entry in &shifts {
        if entry.guard_violated {
            report.warnings.push(format!("state {}: dispersive guard violated", entry.state));
        }
    }
    let csv = export::shift_csv(&shifts);
    // honor the config's output path only when it was written for this task
    let configured = if sc.task.kind == "shifts" { &sc.output.csv } else { &None };
    let csv_path = out_path(configured, out_dir, "shifts.csv");
    export::write_file(&csv_path, &csv)?;
    report.files.push(csv_path);
    for entry in &shifts {
        report.summary.push(format!(
            "state {}: shift = {:+.6e} {:+.6e}i GHz",
            entry.state, entry.value.re, entry.value.im
        ));
    }
    Ok(report)
}

fn run_sw_check(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    let grid = sc.sweep_grid()?;
    let n_max = sc.task.n_max.unwrap_or(8);
    let points = crate::dispersive::sw_vs_ed_compare(
        &sc.model,
        &sc.coupling,
        &sc.cavity,
        sc.field.direction,
        &grid,
        n_max,
    )?;
    let mut csv = String::from("b_t,max_discrepancy_ghz,dispersive\n");
    for p in &points {
        use std::fmt::Write as _;
        let _ = writeln!(csv, "{},{},{}", p.field_t, p.max_discrepancy_ghz, u8::from(p.dispersive));
    }
    let mut report = RunReport::default();
    let csv_path = out_path(&sc.output.csv, out_dir, "sw_check.csv");
    export::write_file(&csv_path, &csv)?;
    report.files.push(csv_path);
    let worst = points.iter().map(|p| p.max_discrepancy_ghz).fold(0.0, f64::max);
    let flagged = points.iter().filter(|p| !p.dispersive).count();
    report.summary.push(format!(
        "sw-check: {} field points, worst discrepancy {:.3e} GHz, {} non-dispersive",
        points.len(),
        worst,
        flagged
    ));
    Ok(report)
}

fn run_qnd(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    let sm = sc.spectral_model()?;
    let q = crate::dispersive::qnd_commutator(&sm, &sc.cavity)?;
    let mut csv = String::from("b1,b2,re_phi,im_phi,re_comm,im_comm\n");
    for b1 in 0..sm.dim() {
        for b2 in 0..sm.dim() {
            use std::fmt::Write as _;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                b1,
                b2,
                q.phi[(b1, b2)].re,
                q.phi[(b1, b2)].im,
                q.commutator[(b1, b2)].re,
                q.commutator[(b1, b2)].im
            );
        }
    }
    let mut report = RunReport::default();
    let csv_path = out_path(&sc.output.csv, out_dir, "qnd.csv");
    export::write_file(&csv_path, &csv)?;
    report.files.push(csv_path);
    report.summary.push(format!(
        "qnd: commutator Frobenius norm {:.6e} GHz^2, coupling-normalized {:.6e}",
        q.frobenius, q.normalized
    ));
    Ok(report)
}

/// Outcome of the working-point search.
#[derive(Debug, Clone)]
pub enum WorkingPointResult {
    Feasible {
        field: FieldVector,
        direction: [f64; 3],
        scale_t: f64,
        /// Real shift per state at the optimum (GHz).
        shifts: Vec<f64>,
        /// Min pairwise |Re shift_i - Re shift_j| (GHz).
        objective: f64,
        guard_ok: bool,
    },
    Infeasible {
        diagnostics: Vec<String>,
    },
}

/// Objective at one candidate field: min pairwise real-shift separation,
/// `None` when the candidate violates a constraint.
fn evaluate_candidate(
    sc: &Scenario,
    direction: [f64; 3],
    scale: f64,
    diagnostics: &mut Vec<String>,
) -> Result<Option<(f64, Vec<f64>)>> {
    let field = FieldVector::scaled(direction, scale);
    let sm = SpectralModel::build(
        &sc.model,
        &field,
        &sc.coupling,
        &PreparationSpec::Pure(0),
        sc.ensemble.clone(),
        sc.eta_ghz,
    )?;
    let degenerate = sm.eigen.degenerate_pairs();
    if !degenerate.is_empty() {
        diagnostics
            .push(format!("scale {scale} T along {direction:?}: degenerate pairs {degenerate:?}"));
        return Ok(None);
    }
    let shifts = shift_table(&sm, &sc.cavity, Some(sc.cavity.omega_ghz))?;
    if shifts.iter().any(|s| s.guard_violated) {
        diagnostics.push(format!("scale {scale} T along {direction:?}: dispersive guard violated"));
        return Ok(None);
    }
    let re: Vec<f64> = shifts.iter().map(|s| s.value.re).collect();
    let mut objective = f64::INFINITY;
    for i in 0..re.len() {
        for j in (i + 1)..re.len() {
            objective = objective.min((re[i] - re[j]).abs());
        }
    }
    Ok(Some((objective, re)))
}

/// Deterministic working-point search: anchored magnitude grid per
/// direction, then a fixed fine sub-grid around the best coarse point.
/// Enlarging the magnitude range while keeping the step and anchor cannot
/// decrease the reported optimum.
pub fn optimize_working_point(sc: &Scenario) -> Result<WorkingPointResult> {
    let min = sc.field.scale_min_t.ok_or_else(|| missing("field", "scale_min_t"))?;
    let max = sc.field.scale_max_t.ok_or_else(|| missing("field", "scale_max_t"))?;
    let step = sc.task.scale_step_t.ok_or_else(|| missing("task", "scale_step_t"))?;
    if step <= 0.0 || max < min {
        return Err(Error::Config(
            "[task] optimize needs scale_step_t > 0 and scale_max_t >= scale_min_t".into(),
        ));
    }
    let directions: Vec<[f64; 3]> =
        sc.task.directions.clone().unwrap_or_else(|| vec![sc.field.direction]);
    let refine = sc.task.refine.unwrap_or(true);

    let mut diagnostics = Vec::new();
    let mut best: Option<(f64, [f64; 3], f64, Vec<f64>)> = None;

    let consider = |scale: f64,
                    dir: [f64; 3],
                    best: &mut Option<(f64, [f64; 3], f64, Vec<f64>)>,
                    diagnostics: &mut Vec<String>|
     -> Result<()> {
        if let Some((objective, shifts)) = evaluate_candidate(sc, dir, scale, diagnostics)? {
            let better = match best {
                None => true,
                Some((obj, ..)) => objective > *obj,
            };
            if better {
                *best = Some((objective, dir, scale, shifts));
            }
        }
        Ok(())
    };

    for dir in &directions {
        // anchored coarse grid: min, min + step, ...
        let mut k = 0usize;
        loop {
            let scale = min + k as f64 * step;
            if scale > max + 1e-12 * step.max(1.0) {
                break;
            }
            consider(scale, *dir, &mut best, &mut diagnostics)?;
            k += 1;
        }
    }

    if refine {
        if let Some((_, dir, scale, _)) = best.clone() {
            for frac in [-0.75, -0.5, -0.25, 0.25, 0.5, 0.75] {
                let candidate = scale + frac * step;
                if candidate >= min - 1e-12 && candidate <= max + 1e-12 {
                    consider(candidate, dir, &mut best, &mut diagnostics)?;
                }
            }
        }
    }

    match best {
        Some((objective, direction, scale_t, shifts)) => Ok(WorkingPointResult::Feasible {
            field: FieldVector::scaled(direction, scale_t),
            direction,
            scale_t,
            shifts,
            objective,
            guard_ok: true,
        }),
        None => {
            if diagnostics.is_empty() {
                diagnostics.push("empty search grid".into());
            }
            Ok(WorkingPointResult::Infeasible { diagnostics })
        }
    }
}

fn run_optimize(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    let result = optimize_working_point(sc)?;
    let mut report = RunReport::default();
    match &result {
        WorkingPointResult::Feasible { field, direction, scale_t, shifts, objective, .. } => {
            let mut csv = String::from("quantity,value\n");
            use std::fmt::Write as _;
            let _ = writeln!(csv, "bx_t,{}", field.bx);
            let _ = writeln!(csv, "by_t,{}", field.by);
            let _ = writeln!(csv, "bz_t,{}", field.bz);
            let _ = writeln!(csv, "scale_t,{scale_t}");
            let _ = writeln!(csv, "objective_ghz,{objective}");
            for (i, s) in shifts.iter().enumerate() {
                let _ = writeln!(csv, "shift_{i}_ghz,{s}");
            }
            let configured = if sc.task.kind == "optimize" { &sc.output.csv } else { &None };
            let csv_path = out_path(configured, out_dir, "working_point.csv");
            export::write_file(&csv_path, &csv)?;
            report.files.push(csv_path);
            report.summary.push(format!(
                "working point: scale {scale_t} T along {direction:?}, min pairwise shift gap {objective:.6e} GHz"
            ));
        }
        WorkingPointResult::Infeasible { diagnostics } => {
            report.summary.push("working point: infeasible".into());
            for d in diagnostics {
                report.warnings.push(d.clone());
            }
        }
    }
    Ok(report)
}

/// Run the shift-table task regardless of the config's own task kind (CLI
/// `shifts` subcommand).
pub fn run_shifts_task(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    run_shifts(sc, out_dir)
}

/// Run the working-point task regardless of the config's own task kind (CLI
/// `optimize` subcommand).
pub fn run_optimize_task(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    run_optimize(sc, out_dir)
}

/// Sorted spin-level energies at the static field, for quick inspection.
pub fn level_summary(sc: &Scenario) -> Result<Vec<f64>> {
    let h = sc.model.hamiltonian(&sc.static_field()?)?;
    Ok(diagonalize(&h)?.energies().to_vec())
}
