//! Input-output cavity transmission and state-dependent dispersive shifts.
//!
//! The central object is the two-port transmission amplitude
//!
//! ```text
//! t_c(w) = i sqrt(g1 g2) / (Wc - w - i g/2 + N sum_pairs p_ab |L_ab|^2 / (w + E_ab + i eta))
//! ```
//!
//! with the sum running over ordered eigenstate pairs, `E_ab = E_a - E_b`,
//! `p_ab = p_a - p_b` and `|L_ab|^2 = L_ab L_ba`.  The per-state frequency
//! pull is exposed both in its real small-broadening limit and as the
//! complex probe-frequency-resolved form whose imaginary part is the
//! spin-induced broadening.

use num_complex::Complex64 as C64;

use crate::eigen::SpectralModel;
use crate::error::{Error, Result};

/// Threshold treated as "exactly resonant" when `eta = 0` (GHz).
const SINGULAR_TOL_GHZ: f64 = 1e-12;

/// Cavity frequency and port loss rates, GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub omega_ghz: f64,
    pub gamma1_ghz: f64,
    pub gamma2_ghz: f64,
}

impl CavityParams {
    pub fn new(omega_ghz: f64, gamma1_ghz: f64, gamma2_ghz: f64) -> Result<Self> {
        let c = Self { omega_ghz, gamma1_ghz, gamma2_ghz };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_ghz.is_finite() && self.omega_ghz > 0.0) {
            return Err(Error::invalid(format!("cavity frequency must be > 0, got {}", self.omega_ghz)));
        }
        if self.gamma1_ghz < 0.0 || self.gamma2_ghz < 0.0 {
            return Err(Error::invalid("port loss rates must be >= 0"));
        }
        if self.gamma() <= 0.0 {
            return Err(Error::invalid("total loss gamma1 + gamma2 must be > 0"));
        }
        Ok(())
    }

    /// Total cavity loss `gamma = gamma1 + gamma2`.
    pub fn gamma(&self) -> f64 {
        self.gamma1_ghz + self.gamma2_ghz
    }

    /// On-resonance bare transmission magnitude `2 sqrt(g1 g2) / g`.
    pub fn bare_peak(&self) -> f64 {
        2.0 * (self.gamma1_ghz * self.gamma2_ghz).sqrt() / self.gamma()
    }
}

/// Spin self-energy `N sum_pairs p_ab |L_ab|^2 / (w + E_ab + i eta)`.
fn spin_self_energy(omega: f64, sm: &SpectralModel) -> Result<C64> {
    let dim = sm.dim();
    let n = sm.ensemble.factor();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..dim {
        for b in 0..dim {
            if a == b {
                continue;
            }
            let p = sm.populations[a] - sm.populations[b];
            if p == 0.0 {
                continue;
            }
            let l2 = sm.lambda.abs_sqr(a, b);
            if l2 == 0.0 {
                continue;
            }
            let e = sm.eigen.gap(a, b);
            if sm.eta_ghz == 0.0 && (omega + e).abs() < SINGULAR_TOL_GHZ {
                return Err(Error::SingularEvaluation {
                    op: "transmission_amplitude",
                    detail: format!(
                        "probe frequency {omega} GHz hits transition E({a},{b}) = {e} GHz with eta = 0"
                    ),
                });
            }
            acc += C64::new(p * l2, 0.0) / C64::new(omega + e, sm.eta_ghz);
        }
    }
    Ok(acc * n)
}

/// Complex transmission amplitude at probe frequency `omega` (GHz).
pub fn transmission_amplitude(omega: f64, cav: &CavityParams, sm: &SpectralModel) -> Result<C64> {
    cav.validate()?;
    if !omega.is_finite() {
        return Err(Error::invalid("probe frequency must be finite"));
    }
    let sigma = spin_self_energy(omega, sm)?;
    let denom = C64::new(cav.omega_ghz - omega, -cav.gamma() / 2.0) + sigma;
    Ok(C64::new(0.0, (cav.gamma1_ghz * cav.gamma2_ghz).sqrt()) / denom)
}

/// One state's dispersive shift plus its dispersive-regime guard status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftEntry {
    pub state: usize,
    /// Complex shift; real part = frequency pull, imaginary part = induced broadening.
    pub value: C64,
    /// True when some term violated `|L_ab| < ||E_ab| - Wc|`.
    pub guard_violated: bool,
}

/// State-dependent cavity frequency shift for the molecule prepared in `beta`.
///
/// * `at_omega = None`: the real small-broadening limit
///   `2 N sum_a |L_ab|^2 E_ab / (Wc^2 - E_ab^2)`.
/// * `at_omega = Some(w)`: the complex probe-resolved form
///   `N sum_a 2 |L_ab|^2 E_ab / ((w + i eta)^2 - E_ab^2)`.
pub fn dispersive_shift(
    sm: &SpectralModel,
    cav: &CavityParams,
    beta: usize,
    at_omega: Option<f64>,
) -> Result<ShiftEntry> {
    cav.validate()?;
    let dim = sm.dim();
    if beta >= dim {
        return Err(Error::invalid(format!("state index {beta} out of range (dim {dim})")));
    }
    let n = sm.ensemble.factor();
    let mut value = C64::new(0.0, 0.0);
    let mut guard_violated = false;
    for a in 0..dim {
        if a == beta {
            continue;
        }
        let l2 = sm.lambda.abs_sqr(a, beta);
        let e = sm.eigen.gap(a, beta);
        if l2 == 0.0 {
            continue;
        }
        if l2.sqrt() >= (e.abs() - cav.omega_ghz).abs() {
            guard_violated = true;
        }
        match at_omega {
            None => {
                let denom = cav.omega_ghz * cav.omega_ghz - e * e;
                if denom.abs() < SINGULAR_TOL_GHZ {
                    return Err(Error::SingularEvaluation {
                        op: "dispersive_shift",
                        detail: format!(
                            "transition E({a},{beta}) = {e} GHz is resonant with the cavity and eta -> 0"
                        ),
                    });
                }
                value += C64::new(2.0 * l2 * e / denom, 0.0);
            }
            Some(w) => {
                let z = C64::new(w, sm.eta_ghz);
                let denom = z * z - C64::new(e * e, 0.0);
                if denom.norm() < SINGULAR_TOL_GHZ {
                    return Err(Error::SingularEvaluation {
                        op: "dispersive_shift",
                        detail: format!("(w + i eta)^2 - E({a},{beta})^2 vanished at w = {w} GHz"),
                    });
                }
                value += C64::new(2.0 * l2 * e, 0.0) / denom;
            }
        }
    }
    Ok(ShiftEntry { state: beta, value: value * n, guard_violated })
}

/// The shift table for every eigenstate.
pub fn shift_table(sm: &SpectralModel, cav: &CavityParams, at_omega: Option<f64>) -> Result<Vec<ShiftEntry>> {
    (0..sm.dim()).map(|beta| dispersive_shift(sm, cav, beta, at_omega)).collect()
}

/// Transmission samples over a frequency grid with the phase unwrapped.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionTrace {
    pub omega_ghz: Vec<f64>,
    pub t: Vec<C64>,
    pub abs_t: Vec<f64>,
    /// Continuous phase in radians (adjacent steps wrapped into (-pi, pi]).
    pub phase_rad: Vec<f64>,
}

impl TransmissionTrace {
    pub fn len(&self) -> usize {
        self.omega_ghz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_ghz.is_empty()
    }
}

/// Sample the transmission over an ascending frequency grid.
pub fn transmission_spectrum(grid: &[f64], cav: &CavityParams, sm: &SpectralModel) -> Result<TransmissionTrace> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("frequency grid must be strictly ascending"));
    }
    let mut t = Vec::with_capacity(grid.len());
    let mut abs_t = Vec::with_capacity(grid.len());
    let mut phase = Vec::with_capacity(grid.len());
    for (i, &w) in grid.iter().enumerate() {
        let tc = transmission_amplitude(w, cav, sm)?;
        abs_t.push(tc.norm());
        let raw = tc.arg();
        if i == 0 {
            phase.push(raw);
        } else {
            let prev = phase[i - 1];
            phase.push(prev + wrap_to_pi(raw - wrap_to_pi(prev)));
        }
        t.push(tc);
    }
    Ok(TransmissionTrace { omega_ghz: grid.to_vec(), t, abs_t, phase_rad: phase })
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_to_pi(x: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut y = x % two_pi;
    if y <= -std::f64::consts::PI {
        y += two_pi;
    } else if y > std::f64::consts::PI {
        y -= two_pi;
    }
    y
}

/// Location and height of the trace maximum, with three-point parabolic
/// refinement of the peak position.  Peak-location assertions require the
/// grid spacing to be at most a tenth of the line width.
pub fn find_peak(trace: &TransmissionTrace) -> Option<(f64, f64)> {
    if trace.is_empty() {
        return None;
    }
    let mut imax = 0;
    for i in 1..trace.len() {
        if trace.abs_t[i] > trace.abs_t[imax] {
            imax = i;
        }
    }
    if imax == 0 || imax + 1 == trace.len() {
        return Some((trace.omega_ghz[imax], trace.abs_t[imax]));
    }
    let (xm, x0, xp) = (trace.omega_ghz[imax - 1], trace.omega_ghz[imax], trace.omega_ghz[imax + 1]);
    let (ym, y0, yp) = (trace.abs_t[imax - 1], trace.abs_t[imax], trace.abs_t[imax + 1]);
    let denom = ym - 2.0 * y0 + yp;
    if denom >= 0.0 {
        return Some((x0, y0));
    }
    let h = 0.5 * (xp - xm);
    let shift = 0.5 * (ym - yp) / denom * h;
    Some((x0 + shift.clamp(-h, h), y0))
}

/// Self-consistent pulled-resonance estimate for a prepared state: iterates
/// `w = Wc + Re shift(w)` to convergence.  For weak pulls this lands on
/// `Wc + Re shift(Wc)` after one step; for strong collective pulls it keeps
/// the prediction aligned with the actual transmission maximum.
pub fn pulled_peak_estimate(sm: &SpectralModel, cav: &CavityParams, beta: usize) -> Result<(f64, ShiftEntry)> {
    let mut w = cav.omega_ghz;
    for _ in 0..256 {
        let entry = dispersive_shift(sm, cav, beta, Some(w))?;
        let next = cav.omega_ghz + entry.value.re;
        if (next - w).abs() < 1e-13 * cav.omega_ghz.abs().max(1.0) {
            return Ok((next, dispersive_shift(sm, cav, beta, Some(next))?));
        }
        w = next;
    }
    Ok((w, dispersive_shift(sm, cav, beta, Some(w))?))
}

/// A located per-state transmission peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakReport {
    pub state: usize,
    /// Refined argmax of |t_c| (GHz).
    pub omega_peak_ghz: f64,
    pub height: f64,
    /// Self-consistent prediction the scan was centered on (GHz).
    pub predicted_ghz: f64,
    /// Full line width `gamma + 2 |Im shift|` at the prediction (GHz).
    pub width_ghz: f64,
    pub guard_violated: bool,
}

/// Scan `|t_c|` around the pulled-resonance estimate for state `beta` and
/// refine the argmax.  The grid spacing is a tenth of the smaller of the
/// cavity width and the full line width.
pub fn locate_state_peak(
    sm: &SpectralModel,
    cav: &CavityParams,
    beta: usize,
    half_span_widths: f64,
) -> Result<PeakReport> {
    let prepared = sm.prepared_pure(beta)?;
    let (predicted, shift) = pulled_peak_estimate(&prepared, cav, beta)?;
    let gamma = cav.gamma();
    let width = gamma + 2.0 * shift.value.im.abs();
    let half_span = half_span_widths * width.max(gamma);
    let step = (gamma.min(width) / 10.0).max(half_span * 1e-5);
    let n = (2.0 * half_span / step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| predicted - half_span + i as f64 * step).collect();
    let trace = transmission_spectrum(&grid, cav, &prepared)?;
    let (omega_peak_ghz, height) = find_peak(&trace).expect("non-empty grid");
    Ok(PeakReport {
        state: beta,
        omega_peak_ghz,
        height,
        predicted_ghz: predicted,
        width_ghz: width,
        guard_violated: shift.guard_violated,
    })
}

/// Phase sign at a single probe point: the sign of `arg t_c` wrapped into
/// `(-pi, pi]`.  Left of a transmission peak the argument sits just below
/// `+pi` (positive); right of it the wrap flips it negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Spin label of the uniaxial S = 1 model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S1Label {
    MMinus,
    MZero,
    MPlus,
}

/// Truth-table classifier for the S = 1 readout: the two inputs are the
/// transmission-phase signs at fixed offsets below and above the central
/// frequency.
///
/// `(+,+) -> M = -1`, `(+,-) -> M = +1`, `(-,-) -> M = 0`; the remaining
/// pattern `(-,+)` signals out-of-model input.
pub fn classify_s1_phase(left: Sign, right: Sign) -> Result<S1Label> {
    match (left, right) {
        (Sign::Plus, Sign::Plus) => Ok(S1Label::MMinus),
        (Sign::Plus, Sign::Minus) => Ok(S1Label::MPlus),
        (Sign::Minus, Sign::Minus) => Ok(S1Label::MZero),
        (Sign::Minus, Sign::Plus) => Err(Error::Unclassifiable),
    }
}

/// Phase signs at `center - delta` and `center + delta` for a prepared model.
pub fn phase_signs_about(
    sm: &SpectralModel,
    cav: &CavityParams,
    center_ghz: f64,
    delta_ghz: f64,
) -> Result<(Sign, Sign)> {
    let left = transmission_amplitude(center_ghz - delta_ghz, cav, sm)?;
    let right = transmission_amplitude(center_ghz + delta_ghz, cav, sm)?;
    Ok((Sign::of(left.arg()), Sign::of(right.arg())))
}

/// Fixed-frequency transmission magnitude versus field, one curve per
/// prepared state (or a single curve for a fixed preparation).
#[derive(Debug, Clone)]
pub struct FieldSweep {
    pub b_t: Vec<f64>,
    /// `curves[state][grid index]`.
    pub curves: Vec<Vec<C64>>,
    /// State index of each curve (`None` for a fixed preparation).
    pub states: Vec<Option<usize>>,
}

/// Preparation policy for [`field_sweep_fixed_frequency`].
#[derive(Debug, Clone)]
pub enum SweepPreparation {
    /// One curve per eigenstate, each prepared pure.
    EachState,
    Fixed(crate::eigen::PreparationSpec),
}

/// Rebuild the model at every field value and sample `t_c` at the cavity
/// frequency for each prepared state.
pub fn field_sweep_fixed_frequency(
    model: &crate::model::ModelConfig,
    lam: &crate::model::CouplingVector,
    cav: &CavityParams,
    ensemble: crate::eigen::Ensemble,
    eta_ghz: f64,
    direction: [f64; 3],
    b_grid: &[f64],
    prep: &SweepPreparation,
) -> Result<FieldSweep> {
    cav.validate()?;
    let dim = model.dim();
    let states: Vec<Option<usize>> = match prep {
        SweepPreparation::EachState => (0..dim).map(Some).collect(),
        SweepPreparation::Fixed(_) => vec![None],
    };
    let mut curves = vec![Vec::with_capacity(b_grid.len()); states.len()];
    for &b in b_grid {
        let field = crate::model::FieldVector::scaled(direction, b);
        let base_prep = match prep {
            SweepPreparation::EachState => crate::eigen::PreparationSpec::Pure(0),
            SweepPreparation::Fixed(p) => p.clone(),
        };
        let sm = SpectralModel::build(model, &field, lam, &base_prep, ensemble.clone(), eta_ghz)?;
        match prep {
            SweepPreparation::EachState => {
                for beta in 0..dim {
                    let prepared = sm.prepared_pure(beta)?;
                    curves[beta].push(transmission_amplitude(cav.omega_ghz, cav, &prepared)?);
                }
            }
            SweepPreparation::Fixed(_) => {
                curves[0].push(transmission_amplitude(cav.omega_ghz, cav, &sm)?);
            }
        }
    }
    Ok(FieldSweep { b_t: b_grid.to_vec(), curves, states })
}
