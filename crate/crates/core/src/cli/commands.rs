use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use rydmagic::atomdata::{
    build_model, find_coincidences, group_by_configuration, Channel, Level, LevelKey,
    ModelConstants, PolarizabilityModel, ReducedDipole,
};
use rydmagic::heating::TrapSpec;
use rydmagic::matcher::{
    find_free_electron_match, find_magic_wavelength, find_zero_crossings, list_resonances,
    MagicPoint, MatchOptions,
};
use rydmagic::polarizability::{total_alpha, total_alpha_with, EvalError, WindowPolicy};
use rydmagic::units::{
    au_to_nm, convert_alpha, convert_energy, convert_omega, AlphaUnit, EnergyUnit, OmegaUnit,
    ATOMIC_MASS_UNIT, CONSTANTS,
};
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::output::{emit, Row};
use super::{BreakdownArgs, CoincideArgs, ConvertArgs, HeatArgs, MagicArgs, Quantity, ScanArgs};

const DEFAULT_SCAN_COUNT: usize = 101;
const MAX_GRID_POINTS: usize = 10_000_000;

fn to_au(cfg: &RunConfig, value: f64) -> Result<f64> {
    convert_omega(value, cfg.omega_unit, OmegaUnit::Au)
        .with_context(|| format!("omega {value} {}", cfg.omega_unit))
}

/// Endpoints in a.u., ascending (nm input reverses the order).
fn range_to_au(cfg: &RunConfig, (a, b): (f64, f64)) -> Result<(f64, f64)> {
    let (x, y) = (to_au(cfg, a)?, to_au(cfg, b)?);
    Ok((x.min(y), x.max(y)))
}

fn model_for(cfg: &RunConfig, key: &LevelKey) -> Result<PolarizabilityModel> {
    let (levels, dipoles) = cfg.load_data()?;
    Ok(build_model(key, &levels, &dipoles, &cfg.model)?)
}

#[derive(Serialize)]
struct ScanRow {
    omega_au: f64,
    lambda_nm: Option<f64>,
    alpha_au: Option<f64>,
    sigma_au: Option<f64>,
    excluded: bool,
}

impl Row for ScanRow {
    const COLUMNS: &'static [&'static str] =
        &["omega_au", "lambda_nm", "alpha_au", "sigma_au", "excluded"];
}

fn grid(lo: f64, hi: f64, step: Option<f64>, count: Option<usize>) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        bail!("--omega range must be finite with A <= B (after unit conversion)");
    }
    let n = match (step, count) {
        (Some(s), _) => {
            if !(s > 0.0 && s.is_finite()) {
                bail!("--step must be positive, got {s}");
            }
            let n = ((hi - lo) / s + 1e-9).floor();
            if n >= MAX_GRID_POINTS as f64 {
                bail!("--step {s} gives more than {MAX_GRID_POINTS} points");
            }
            return Ok((0..=n as usize).map(|i| lo + i as f64 * s).collect());
        }
        (None, Some(0)) => bail!("--count must be at least 1"),
        (None, Some(c)) => c,
        (None, None) if lo == hi => 1,
        (None, None) => DEFAULT_SCAN_COUNT,
    };
    if n > MAX_GRID_POINTS {
        bail!("--count is capped at {MAX_GRID_POINTS}");
    }
    if n == 1 {
        if lo != hi {
            bail!("--count 1 needs a zero-width range A:A");
        }
        return Ok(vec![lo]);
    }
    if lo == hi {
        bail!("--count {n} needs A < B");
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

pub fn scan<W: Write>(cfg: &RunConfig, args: &ScanArgs, out: &mut W) -> Result<()> {
    let model = model_for(cfg, &args.state)?;
    let (a, b) = args.omega;
    let points = grid(a.min(b), a.max(b), args.step, args.count)?;
    let mut omegas = points
        .into_iter()
        .map(|w| to_au(cfg, w))
        .collect::<Result<Vec<_>>>()?;
    omegas.sort_by(f64::total_cmp);
    let policy = if args.allow_excluded {
        WindowPolicy::Allow
    } else {
        WindowPolicy::Enforce
    };
    let rows = omegas
        .par_iter()
        .map(|&w| {
            let lambda_nm = au_to_nm(w).ok();
            match total_alpha_with(&model, w, policy) {
                Ok(r) => Ok(ScanRow {
                    omega_au: w,
                    lambda_nm,
                    alpha_au: Some(r.total),
                    sigma_au: Some(r.uncertainty),
                    excluded: r.excluded,
                }),
                Err(EvalError::ResonanceProximity { .. } | EvalError::Pole { .. }) => Ok(ScanRow {
                    omega_au: w,
                    lambda_nm,
                    alpha_au: None,
                    sigma_au: None,
                    excluded: true,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let notes = vec![format!("state {}", args.state)];
    emit(out, cfg.output_format, "scan", &rows, &notes)
}

#[derive(Serialize)]
struct MagicRow {
    ground: String,
    partner: String,
    omega_au: f64,
    lambda_nm: f64,
    alpha_au: f64,
    residual_au: f64,
    bracket_lo_au: f64,
    bracket_hi_au: f64,
}

impl Row for MagicRow {
    const COLUMNS: &'static [&'static str] = &[
        "ground",
        "partner",
        "omega_au",
        "lambda_nm",
        "alpha_au",
        "residual_au",
        "bracket_lo_au",
        "bracket_hi_au",
    ];
}

impl From<&MagicPoint> for MagicRow {
    fn from(p: &MagicPoint) -> Self {
        Self {
            ground: p.ground.label.clone(),
            partner: p.partner.label(),
            omega_au: p.omega,
            lambda_nm: p.lambda_nm,
            alpha_au: p.alpha_at_match,
            residual_au: p.residual,
            bracket_lo_au: p.bracket.0,
            bracket_hi_au: p.bracket.1,
        }
    }
}

/// Between the two lowest resonances of `ground`, kept clear of their
/// exclusion windows.
fn default_range(ground: &PolarizabilityModel) -> Result<(f64, f64)> {
    let res = list_resonances(ground);
    let margin = 2.0 * ground.exclusion_halfwidth();
    match res.as_slice() {
        [r0, r1, ..] if r1.omega_res - r0.omega_res > 2.0 * margin => {
            Ok((r0.omega_res + margin, r1.omega_res - margin))
        }
        _ => bail!(
            "{} has fewer than two separated resonances; pass --omega A:B",
            ground.target().label
        ),
    }
}

pub fn magic<W: Write>(cfg: &RunConfig, args: &MagicArgs, out: &mut W) -> Result<()> {
    let (levels, dipoles) = cfg.load_data()?;
    let ground_key = args
        .ground
        .or(cfg.ground)
        .unwrap_or_else(|| levels.ground().key());
    let ground = build_model(&ground_key, &levels, &dipoles, &cfg.model)?;
    let range = match args.solver.omega {
        Some(r) => range_to_au(cfg, r)?,
        None => default_range(&ground)?,
    };
    let defaults = MatchOptions::default();
    let opts = MatchOptions {
        scan_step: args.solver.scan_step.unwrap_or(defaults.scan_step),
        omega_tol: args.solver.omega_tol.unwrap_or(defaults.omega_tol),
        alpha_tol: args.solver.alpha_tol.unwrap_or(defaults.alpha_tol),
    };
    let points = if args.zero {
        find_zero_crossings(&ground, range, &opts)?
    } else if args.free_electron {
        find_free_electron_match(&ground, range, &opts)?
    } else {
        let key = args.rydberg.or(cfg.rydberg).ok_or_else(|| {
            anyhow!("no partner: give --rydberg LABEL, --zero or --free-electron")
        })?;
        let rydberg = build_model(&key, &levels, &dipoles, &cfg.model)?;
        find_magic_wavelength(&ground, &rydberg, range, &opts)?
    };
    let rows: Vec<MagicRow> = points.iter().map(MagicRow::from).collect();
    let mut notes = vec![format!(
        "searched omega in [{}, {}] a.u. ({:.4} to {:.4} nm)",
        range.0,
        range.1,
        au_to_nm(range.1).unwrap_or(f64::NAN),
        au_to_nm(range.0).unwrap_or(f64::INFINITY)
    )];
    if rows.is_empty() {
        notes.push("no crossing in range".into());
    }
    emit(out, cfg.output_format, "magic", &rows, &notes)
}

#[derive(Serialize)]
struct BreakdownRow {
    np: String,
    d_au: f64,
    delta_e_au: f64,
    denominator_au: f64,
    alpha_contr: f64,
    alpha_acc: f64,
}

impl Row for BreakdownRow {
    const COLUMNS: &'static [&'static str] = &[
        "np",
        "d_au",
        "delta_e_au",
        "denominator_au",
        "alpha_contr",
        "alpha_acc",
    ];
}

#[derive(Deserialize)]
struct TermInput {
    np: String,
    d_au: f64,
    delta_e_au: f64,
}

/// A model whose channels are given directly as (label, D, δE) rows.
fn injected_model(cfg: &RunConfig, state: LevelKey, path: &Path) -> Result<PolarizabilityModel> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let target = Level::new(state, 0.0, "injected");
    let mut channels = Vec::new();
    for (i, rec) in rdr.deserialize::<TermInput>().enumerate() {
        let t = rec.with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        let key: LevelKey =
            t.np.parse()
                .map_err(|e| anyhow!("{}: row {}: {e}", path.display(), i + 1))?;
        channels.push(Channel {
            level: Level::new(key, t.delta_e_au * CONSTANTS.hartree_wavenumber, "injected"),
            dipole: ReducedDipole::new(state, key, t.d_au, 0.0),
        });
    }
    let constants = ModelConstants {
        n_max: channels.iter().map(|c| c.level.n).max().unwrap_or(0),
        core_alpha: cfg.model.core_alpha,
        core_alpha_rel_unc: cfg.model.core_alpha_rel_unc,
        tail_alpha: cfg.model.tails.get(&state).copied().unwrap_or(0.0),
        exclusion_halfwidth: cfg.model.exclusion_halfwidth,
    };
    Ok(PolarizabilityModel::new(target, channels, constants)?)
}

pub fn breakdown<W: Write>(cfg: &RunConfig, args: &BreakdownArgs, out: &mut W) -> Result<()> {
    let model = match &args.terms {
        Some(p) => injected_model(cfg, args.state, p)?,
        None => model_for(cfg, &args.state)?,
    };
    let omega = to_au(cfg, args.omega)?;
    let r = total_alpha(&model, omega)?;
    let rows: Vec<BreakdownRow> = r
        .terms
        .iter()
        .map(|t| BreakdownRow {
            np: t.level.label.clone(),
            d_au: t.d_value,
            delta_e_au: t.delta_e,
            denominator_au: t.denominator,
            alpha_contr: t.contribution,
            alpha_acc: t.accumulated,
        })
        .collect();
    let notes = vec![
        format!(
            "state {} at omega = {} a.u. ({} nm)",
            args.state,
            omega,
            au_to_nm(omega).map_or("-".into(), |l| l.to_string())
        ),
        format!(
            "valence = {}, core = {}, tail = {}, total = {} +/- {} a0^3",
            r.valence, r.core, r.tail, r.total, r.uncertainty
        ),
    ];
    emit(out, cfg.output_format, "breakdown", &rows, &notes)
}

#[derive(Serialize)]
struct CoincideRow {
    lower: String,
    upper: String,
    configuration: String,
    delta_e_cm1: f64,
    target_delta_e_cm1: f64,
    mismatch_cm1: f64,
}

impl Row for CoincideRow {
    const COLUMNS: &'static [&'static str] = &[
        "lower",
        "upper",
        "configuration",
        "delta_e_cm1",
        "target_delta_e_cm1",
        "mismatch_cm1",
    ];
}

#[derive(Serialize)]
struct ConfigurationRow {
    configuration: String,
    best_mismatch_cm1: f64,
    members: usize,
}

impl Row for ConfigurationRow {
    const COLUMNS: &'static [&'static str] = &["configuration", "best_mismatch_cm1", "members"];
}

pub fn coincide<W: Write>(cfg: &RunConfig, args: &CoincideArgs, out: &mut W) -> Result<()> {
    let (levels, _) = cfg.load_data()?;
    let found = find_coincidences(&levels, args.pair, args.tol, !args.all_pairs)?;
    let notes = vec![format!(
        "reference {}-{}, tolerance {} cm-1, {}",
        args.pair.0,
        args.pair.1,
        args.tol,
        if args.all_pairs {
            "all pairs"
        } else {
            "dipole-allowed pairs only"
        }
    )];
    if args.by_configuration {
        let rows: Vec<ConfigurationRow> = group_by_configuration(&found)
            .into_iter()
            .map(|g| ConfigurationRow {
                configuration: format!("{}-{}", g.lower, g.upper),
                best_mismatch_cm1: g.best_mismatch,
                members: g.members.len(),
            })
            .collect();
        return emit(out, cfg.output_format, "coincide", &rows, &notes);
    }
    let rows: Vec<CoincideRow> = found
        .iter()
        .map(|c| CoincideRow {
            lower: c.pair.0.label.clone(),
            upper: c.pair.1.label.clone(),
            configuration: format!(
                "{}-{}",
                c.pair.0.key().configuration(),
                c.pair.1.key().configuration()
            ),
            delta_e_cm1: c.delta_e,
            target_delta_e_cm1: c.target_delta_e,
            mismatch_cm1: c.mismatch,
        })
        .collect();
    emit(out, cfg.output_format, "coincide", &rows, &notes)
}

#[derive(Serialize)]
struct HeatRow {
    omega0_rad_s: f64,
    gate_time_s: f64,
    omega_tau: f64,
    heating_hbar_omega0: f64,
    temperature_k: f64,
    energy_ratio: f64,
}

impl Row for HeatRow {
    const COLUMNS: &'static [&'static str] = &[
        "omega0_rad_s",
        "gate_time_s",
        "omega_tau",
        "heating_hbar_omega0",
        "temperature_k",
        "energy_ratio",
    ];
}

pub const HEAT_DISCREPANCY_NOTE: &str =
    "a heating of 0.006 hbar*omega0 is quoted in the literature \
for a 1 MHz trap and a 1 us gate; k_B T = hbar*omega0*(omega0*tau)^2/4 gives 9.87 for \
omega0 = 2*pi*1e6 rad/s (0.25 for omega0 = 1e6 rad/s), so that value is not reproduced";

pub fn heat<W: Write>(cfg: &RunConfig, args: &HeatArgs, out: &mut W) -> Result<()> {
    let trap =
        TrapSpec::from_frequency(args.trap_freq, args.unit, args.mass_amu * ATOMIC_MASS_UNIT)?;
    let h = trap.heating_per_cycle(args.gate_time)?;
    let e = trap.restored_energy(args.gate_time)?;
    let rows = [HeatRow {
        omega0_rad_s: trap.omega0(),
        gate_time_s: args.gate_time,
        omega_tau: h.omega_tau,
        heating_hbar_omega0: h.in_trap_quanta,
        temperature_k: h.temperature_k,
        energy_ratio: e / trap.e0(),
    }];
    let notes = vec![HEAT_DISCREPANCY_NOTE.to_string()];
    emit(out, cfg.output_format, "heat", &rows, &notes)
}

#[derive(Serialize)]
struct ConvertRow {
    kind: &'static str,
    value: f64,
    from: String,
    to: String,
    result: f64,
}

impl Row for ConvertRow {
    const COLUMNS: &'static [&'static str] = &["kind", "value", "from", "to", "result"];
}

pub fn convert<W: Write>(cfg: &RunConfig, args: &ConvertArgs, out: &mut W) -> Result<()> {
    let (kind, from, to, result) = match args.kind {
        Quantity::Omega => {
            let (f, t): (OmegaUnit, OmegaUnit) = (args.from.parse()?, args.to.parse()?);
            (
                "omega",
                f.to_string(),
                t.to_string(),
                convert_omega(args.value, f, t)?,
            )
        }
        Quantity::Alpha => {
            let (f, t): (AlphaUnit, AlphaUnit) = (args.from.parse()?, args.to.parse()?);
            (
                "alpha",
                f.to_string(),
                t.to_string(),
                convert_alpha(args.value, f, t),
            )
        }
        Quantity::Energy => {
            let (f, t): (EnergyUnit, EnergyUnit) = (args.from.parse()?, args.to.parse()?);
            (
                "energy",
                f.to_string(),
                t.to_string(),
                convert_energy(args.value, f, t),
            )
        }
    };
    let rows = [ConvertRow {
        kind,
        value: args.value,
        from,
        to,
        result,
    }];
    emit(out, cfg.output_format, "convert", &rows, &[])
}
