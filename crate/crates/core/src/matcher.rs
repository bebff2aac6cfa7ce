//! Resonance listing and bracketed root finding for α(ω) = 0 and
//! α_ground(ω) = α_partner(ω).
//!
//! The ω range is first cut at every pole of either curve (with the model's
//! exclusion window removed around each), then each pole-free interval is
//! scanned on a uniform grid for sign changes, and every sign change is
//! refined by bisection. Each reported root therefore comes with an
//! enclosing bracket over which the difference changes sign.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::atomdata::{Level, LevelKey, PolarizabilityModel};
use crate::polarizability::{channel_delta_e, free_electron_alpha, total_alpha_value, EvalError};
use crate::units::au_to_nm;

pub const DEFAULT_SCAN_STEP: f64 = 2e-6;
pub const DEFAULT_OMEGA_TOL: f64 = 1e-9;
pub const DEFAULT_ALPHA_TOL: f64 = 1e-3;
const MAX_BISECTIONS: usize = 200;
const WINDOW_PAD: f64 = 1.0 + 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("ground and partner models are identical; the difference vanishes everywhere")]
    Degenerate,
    #[error("invalid range ({0}, {1}): need 0 <= lo < hi, both finite")]
    InvalidRange(f64, f64),
    #[error("range endpoint {omega} a.u. lies inside the exclusion window of the resonance at {omega_res} a.u.")]
    EndpointInWindow { omega: f64, omega_res: f64 },
    #[error("invalid solver option: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resonance {
    pub target: LevelKey,
    pub intermediate: Level,
    pub omega_res: f64,
    pub lambda_nm: f64,
}

/// What the ground-state curve is matched against.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchPartner {
    /// α_ground(ω) = 0.
    Zero,
    /// α_ground(ω) = −1/ω².
    FreeElectron,
    State(Level),
}

impl MatchPartner {
    pub fn label(&self) -> String {
        match self {
            MatchPartner::Zero => "zero".into(),
            MatchPartner::FreeElectron => "free-electron".into(),
            MatchPartner::State(l) => l.label.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagicPoint {
    pub omega: f64,
    pub lambda_nm: f64,
    pub ground: Level,
    pub partner: MatchPartner,
    /// α_ground(ω) − α_partner(ω) at `omega`, a₀³.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub alpha_at_match: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchOptions {
    /// Grid spacing for the sign-change scan, a.u.
    pub scan_step: f64,
    /// Stop when the bracket half-width is at most this, a.u.
    pub omega_tol: f64,
    /// Stop when |α_ground − α_partner| is at most this, a₀³.
    pub alpha_tol: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            scan_step: DEFAULT_SCAN_STEP,
            omega_tol: DEFAULT_OMEGA_TOL,
            alpha_tol: DEFAULT_ALPHA_TOL,
        }
    }
}

impl MatchOptions {
    fn validate(&self) -> Result<(), MatchError> {
        for (name, v) in [
            ("scan_step", self.scan_step),
            ("omega_tol", self.omega_tol),
            ("alpha_tol", self.alpha_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MatchError::InvalidOptions(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One resonance per channel at ω_res = |δE|, ascending.
pub fn list_resonances(model: &PolarizabilityModel) -> Vec<Resonance> {
    let mut out: Vec<Resonance> = model
        .channels()
        .iter()
        .map(|ch| {
            let omega_res = channel_delta_e(model, &ch.level).abs();
            Resonance {
                target: model.target().key(),
                intermediate: ch.level.clone(),
                omega_res,
                lambda_nm: au_to_nm(omega_res).unwrap_or(f64::INFINITY),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.omega_res
            .total_cmp(&b.omega_res)
            .then_with(|| a.intermediate.key().cmp(&b.intermediate.key()))
    });
    out
}

#[derive(Clone, Copy)]
enum Curve<'a> {
    Model(&'a PolarizabilityModel),
    Zero,
    FreeElectron,
}

impl Curve<'_> {
    fn alpha(&self, omega: f64) -> Result<f64, EvalError> {
        match self {
            Curve::Model(m) => total_alpha_value(m, omega),
            Curve::Zero => Ok(0.0),
            Curve::FreeElectron => free_electron_alpha(omega),
        }
    }

    /// (pole position, exclusion half-width)
    fn poles(&self) -> Vec<(f64, f64)> {
        match self {
            Curve::Model(m) => list_resonances(m)
                .into_iter()
                .map(|r| (r.omega_res, m.exclusion_halfwidth()))
                .collect(),
            Curve::Zero => Vec::new(),
            Curve::FreeElectron => vec![(0.0, 0.0)],
        }
    }
}

/// The pole-free sub-intervals of `range` for the given models: the range
/// minus an open window of each model's exclusion half-width around each of
/// its resonances.
pub fn pole_free_intervals(
    models: &[&PolarizabilityModel],
    range: (f64, f64),
) -> Result<Vec<(f64, f64)>, MatchError> {
    let curves: Vec<Curve> = models.iter().map(|m| Curve::Model(m)).collect();
    partition(&curves, range)
}

fn partition(curves: &[Curve], range: (f64, f64)) -> Result<Vec<(f64, f64)>, MatchError> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(MatchError::InvalidRange(lo, hi));
    }
    let mut windows: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|c| c.poles())
        // widened by a hair so grid endpoints never fall inside a window
        // through rounding
        .map(|(p, hw)| (p - hw * WINDOW_PAD, p + hw * WINDOW_PAD))
        .collect();
    windows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(a, b) in &windows {
        let pole = 0.5 * (a + b);
        for endpoint in [lo, hi] {
            let inside = if a == b {
                endpoint == a
            } else {
                endpoint > a && endpoint < b
            };
            if inside {
                return Err(MatchError::EndpointInWindow {
                    omega: endpoint,
                    omega_res: pole,
                });
            }
        }
    }
    let mut intervals = Vec::new();
    let mut start = lo;
    for (a, b) in windows {
        if b <= start {
            continue;
        }
        if a >= hi {
            break;
        }
        if a > start {
            intervals.push((start, a));
        }
        start = start.max(b);
    }
    if start < hi {
        intervals.push((start, hi));
    }
    Ok(intervals)
}

struct Difference<'a> {
    ground: Curve<'a>,
    partner: Curve<'a>,
}

impl Difference<'_> {
    fn eval(&self, omega: f64) -> Result<f64, EvalError> {
        Ok(self.ground.alpha(omega)? - self.partner.alpha(omega)?)
    }
}

/// Evaluates `g` on a uniform grid over [a, b] and returns the brackets over
/// which it changes sign, with the end values.
fn scan_interval(
    g: &Difference,
    (a, b): (f64, f64),
    step: f64,
) -> Result<Vec<(f64, f64, f64)>, EvalError> {
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let at = |k: usize| {
        if k == n {
            b
        } else {
            a + (b - a) * (k as f64) / (n as f64)
        }
    };
    let mut out = Vec::new();
    let mut x0 = at(0);
    let mut g0 = g.eval(x0)?;
    for k in 1..=n {
        let x1 = at(k);
        let g1 = g.eval(x1)?;
        if (g0 >= 0.0) != (g1 >= 0.0) {
            out.push((x0, x1, g0));
        }
        x0 = x1;
        g0 = g1;
    }
    Ok(out)
}

/// Bisection on a sign-changing bracket. Returns (ω*, g(ω*), lo, hi) with
/// lo < ω* < hi.
fn refine(
    g: &Difference,
    (mut lo, mut hi, mut g_lo): (f64, f64, f64),
    opts: &MatchOptions,
) -> Result<(f64, f64, f64, f64), EvalError> {
    let mut mid = 0.5 * (lo + hi);
    let mut g_mid = g.eval(mid)?;
    for _ in 0..MAX_BISECTIONS {
        if g_mid.abs() <= opts.alpha_tol || 0.5 * (hi - lo) <= opts.omega_tol {
            break;
        }
        if (g_mid >= 0.0) == (g_lo >= 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next <= lo || next >= hi {
            break;
        }
        mid = next;
        g_mid = g.eval(mid)?;
    }
    Ok((mid, g_mid, lo, hi))
}

fn solve(
    ground: &PolarizabilityModel,
    partner: Curve,
    partner_tag: MatchPartner,
    range: (f64, f64),
    opts: &MatchOptions,
) -> Result<Vec<MagicPoint>, MatchError> {
    opts.validate()?;
    let g = Difference {
        ground: Curve::Model(ground),
        partner,
    };
    let intervals = partition(&[g.ground, g.partner], range)?;
    let per_interval: Vec<Vec<MagicPoint>> = intervals
        .par_iter()
        .map(|&iv| -> Result<Vec<MagicPoint>, MatchError> {
            let mut roots = Vec::new();
            for bracket in scan_interval(&g, iv, opts.scan_step)? {
                let (omega, residual, lo, hi) = refine(&g, bracket, opts)?;
                roots.push(MagicPoint {
                    omega,
                    lambda_nm: au_to_nm(omega).unwrap_or(f64::INFINITY),
                    ground: ground.target().clone(),
                    partner: partner_tag.clone(),
                    residual,
                    bracket: (lo, hi),
                    alpha_at_match: g.ground.alpha(omega)?,
                });
            }
            Ok(roots)
        })
        .collect::<Result<_, _>>()?;
    Ok(per_interval.into_iter().flatten().collect())
}

/// Roots of α(ω) over `range`, excluding resonance windows.
pub fn find_zero_crossings(
    model: &PolarizabilityModel,
    range: (f64, f64),
    opts: &MatchOptions,
) -> Result<Vec<MagicPoint>, MatchError> {
    solve(model, Curve::Zero, MatchPartner::Zero, range, opts)
}

/// Roots of α_ground(ω) − α_rydberg(ω) over `range`.
pub fn find_magic_wavelength(
    ground: &PolarizabilityModel,
    rydberg: &PolarizabilityModel,
    range: (f64, f64),
    opts: &MatchOptions,
) -> Result<Vec<MagicPoint>, MatchError> {
    if ground == rydberg {
        return Err(MatchError::Degenerate);
    }
    solve(
        ground,
        Curve::Model(rydberg),
        MatchPartner::State(rydberg.target().clone()),
        range,
        opts,
    )
}

/// Roots of α_ground(ω) + 1/ω² over `range`.
pub fn find_free_electron_match(
    ground: &PolarizabilityModel,
    range: (f64, f64),
    opts: &MatchOptions,
) -> Result<Vec<MagicPoint>, MatchError> {
    solve(
        ground,
        Curve::FreeElectron,
        MatchPartner::FreeElectron,
        range,
        opts,
    )
}
