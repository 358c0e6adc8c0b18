//! Scattering scenarios: TE and TM combs, a tuned magnon, and Lorentzian
//! optical densities of states deciding which sideband survives in each
//! orbit.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brillouin::{MaterialParams, OverlapQuadrature, ScatteringChannel, ScatteringEngine};
use crate::error::{Error, Result};
use crate::walker::{EnvelopeShape, WalkerIndex, WalkerMode};
use crate::wgm::{
    fsr_in, geometric_birefringence_in, resonance_omega_in, solve_comb_in, Orbit, Polarization,
    ScanWindow, SphereGeometry, WgmIndex, WgmMode,
};

/// Unit-peak Lorentzian `(κ/2)² / (δ² + (κ/2)²)`.
pub fn lorentzian_dos(detuning: f64, linewidth: f64) -> Result<f64> {
    if !(linewidth > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "linewidth must be positive, got {linewidth}"
        )));
    }
    let half = 0.5 * linewidth;
    Ok(half * half / (detuning * detuning + half * half))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linewidth {
    /// Angular frequency, rad/s.
    Absolute(f64),
    /// Fraction of the TE free spectral range.
    FsrFraction(f64),
}

impl Linewidth {
    pub fn resolve(self, fsr: f64) -> Result<f64> {
        let value = match self {
            Linewidth::Absolute(w) => w,
            Linewidth::FsrFraction(x) => x * fsr,
        };
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "linewidth {self:?} is not positive"
            )));
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnonTuning {
    /// `ω_m = FSR − GB`.
    ExactFsrMinusGb,
    /// Fixed angular frequency, rad/s.
    Explicit(f64),
}

/// How channel amplitudes enter the intensities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeModel {
    /// Every allowed channel has unit amplitude; only the density of states
    /// of the addressed TM mode matters.
    SelectionRule,
    /// Overlap-integral amplitudes.
    Overlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub cw_dominant: f64,
    pub ccw_dominant: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            cw_dominant: 2.0,
            ccw_dominant: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    CwDominant,
    Reciprocal,
    CcwDominant,
}

impl Verdict {
    pub fn from_ratio(ratio: f64, thresholds: &Thresholds) -> Self {
        if ratio > thresholds.cw_dominant {
            Verdict::CwDominant
        } else if ratio < thresholds.ccw_dominant {
            Verdict::CcwDominant
        } else {
            Verdict::Reciprocal
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            Verdict::CwDominant => Verdict::CcwDominant,
            Verdict::CcwDominant => Verdict::CwDominant,
            Verdict::Reciprocal => Verdict::Reciprocal,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Sampling of the rendered spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumGrid {
    /// Half-width of the plotted window in units of the FSR.
    pub half_span_fsr: f64,
    /// Target spacing in units of the FSR; adjusted so that `±ω_m` are grid
    /// points.
    pub step_fsr: f64,
}

impl Default for SpectrumGrid {
    fn default() -> Self {
        Self {
            half_span_fsr: 0.5,
            step_fsr: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringScenario {
    pub geometry: SphereGeometry,
    pub material: MaterialParams,
    pub m_te: u32,
    pub q: u32,
    /// Magnon mode; its frequency is replaced when tuning is not explicit.
    pub magnon: WalkerMode,
    pub optical_linewidth: Linewidth,
    pub magnon_linewidth: Linewidth,
    pub tuning: MagnonTuning,
    pub model: AmplitudeModel,
    pub thresholds: Thresholds,
    pub quadrature: OverlapQuadrature,
    pub grid: SpectrumGrid,
    pub scan: ScanWindow,
    /// Relabel CW ↔ CCW throughout (mirror-image bookkeeping).
    pub mirror_orbits: bool,
}

impl ScatteringScenario {
    /// Desk-scale defaults: 1 mm YIG sphere, `m_TE = 100`, `κ = 0.005 FSR`.
    pub fn desk(magnon: WalkerMode) -> Self {
        Self {
            geometry: SphereGeometry::new(0.5e-3, 2.19).expect("valid"),
            material: MaterialParams::yig(),
            m_te: 100,
            q: 1,
            magnon,
            optical_linewidth: Linewidth::FsrFraction(0.005),
            magnon_linewidth: Linewidth::FsrFraction(0.005),
            tuning: MagnonTuning::ExactFsrMinusGb,
            model: AmplitudeModel::SelectionRule,
            thresholds: Thresholds::default(),
            quadrature: OverlapQuadrature::default(),
            grid: SpectrumGrid::default(),
            scan: ScanWindow::default(),
            mirror_orbits: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m_te < 2 || self.q < 1 {
            return Err(Error::InvalidIndex(format!(
                "m_TE = {}, q = {}",
                self.m_te, self.q
            )));
        }
        let t = self.thresholds;
        if !(t.ccw_dominant > 0.0 && t.ccw_dominant <= t.cw_dominant) {
            return Err(Error::InvalidParameter(format!("thresholds {t:?}")));
        }
        if !(self.grid.half_span_fsr > 0.0 && self.grid.step_fsr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spectrum grid {:?}",
                self.grid
            )));
        }
        Ok(())
    }
}

/// `|amplitude|² × DOS(ω_out − ω_TM)`.
pub fn channel_intensity(
    channel: &ScatteringChannel,
    optical_linewidth: f64,
    model: AmplitudeModel,
) -> Result<f64> {
    if channel.delta_l != 0 {
        return Err(Error::DisallowedChannel(channel.delta_l));
    }
    let weight = match model {
        AmplitudeModel::SelectionRule => 1.0,
        AmplitudeModel::Overlap => channel.amplitude.norm_sqr(),
    };
    Ok(weight * lorentzian_dos(channel.detuning(), optical_linewidth)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// `ω₂ − ω₁` in units of the FSR.
    pub delta_over_fsr: Vec<f64>,
    pub intensity_cw: Vec<f64>,
    pub intensity_ccw: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub i_cw: f64,
    pub i_ccw: f64,
    pub ratio: f64,
    pub verdict: Verdict,
}

impl Summary {
    pub fn new(i_cw: f64, i_ccw: f64, thresholds: &Thresholds) -> Self {
        let ratio = i_cw / i_ccw;
        Self {
            i_cw,
            i_ccw,
            ratio,
            verdict: Verdict::from_ratio(ratio, thresholds),
        }
    }

    /// The same result with the orbit labels exchanged.
    pub fn mirrored(&self, thresholds: &Thresholds) -> Self {
        Self::new(self.i_ccw, self.i_cw, thresholds)
    }
}

/// Comb quantities around the input mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombParameters {
    pub omega_te: f64,
    pub fsr: f64,
    pub gb: f64,
    pub omega_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub comb: CombParameters,
    pub channels_cw: Vec<ScatteringChannel>,
    pub channels_ccw: Vec<ScatteringChannel>,
    pub spectrum: Spectrum,
    pub summary: Summary,
}

fn comb_parameters(s: &ScatteringScenario) -> Result<CombParameters> {
    // FSR and GB are taken between m_TE − 1 and m_TE, the pair that the
    // tuned Stokes line connects
    let free = fsr_in(&s.geometry, s.m_te - 1, Polarization::Te, s.q, &s.scan)?;
    let gb = geometric_birefringence_in(&s.geometry, s.m_te - 1, s.q, &s.scan)?;
    let omega_te = resonance_omega_in(&s.geometry, Polarization::Te, s.m_te, s.q, &s.scan)?;
    let omega_m = match s.tuning {
        MagnonTuning::ExactFsrMinusGb => free - gb,
        MagnonTuning::Explicit(w) => w,
    };
    if !(omega_m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "magnon frequency {omega_m}"
        )));
    }
    Ok(CombParameters {
        omega_te,
        fsr: free,
        gb,
        omega_m,
    })
}

fn orbit_channels(
    s: &ScatteringScenario,
    engine: &ScatteringEngine,
    magnon: &WalkerMode,
    orbit: Orbit,
    tm: &[WgmMode],
) -> Result<Vec<ScatteringChannel>> {
    let input = WgmMode::solve_in(
        &s.geometry,
        WgmIndex::new(orbit, Polarization::Te, s.m_te, s.q)?,
        &s.scan,
    )?;
    engine.enumerate_channels(&input, magnon, tm)
}

fn spectrum_grid(grid: &SpectrumGrid, fsr: f64, omega_m: f64) -> Vec<f64> {
    let target = grid.step_fsr * fsr;
    let per_line = (omega_m / target).ceil().max(1.0);
    let step = omega_m / per_line;
    let half = (grid.half_span_fsr * fsr / step).ceil() as i64;
    (-half..=half).map(|k| k as f64 * step).collect()
}

pub fn run_scenario(s: &ScatteringScenario) -> Result<ScenarioResult> {
    s.validate()?;
    let comb = comb_parameters(s)?;
    let kappa = s.optical_linewidth.resolve(comb.fsr)?;
    let gamma = s.magnon_linewidth.resolve(comb.fsr)?;
    let magnon = s.magnon.with_frequency(comb.omega_m);
    let engine = ScatteringEngine::new(s.material, s.quadrature)?;

    let span = magnon.index.m_mag.unsigned_abs();
    let tm = solve_comb_in(
        &s.geometry,
        Orbit::Cw,
        Polarization::Tm,
        s.m_te.saturating_sub(span).max(1)..=s.m_te + span,
        s.q,
        &s.scan,
    )?;
    let (cw, ccw) = if s.mirror_orbits {
        (Orbit::Ccw, Orbit::Cw)
    } else {
        (Orbit::Cw, Orbit::Ccw)
    };
    let channels_cw = orbit_channels(s, &engine, &magnon, cw, &tm)?;
    let channels_ccw = orbit_channels(s, &engine, &magnon, ccw, &tm)?;

    let total = |channels: &[ScatteringChannel]| -> Result<f64> {
        channels
            .iter()
            .map(|ch| channel_intensity(ch, kappa, s.model))
            .sum()
    };
    let summary = Summary::new(total(&channels_cw)?, total(&channels_ccw)?, &s.thresholds);

    let lines = |channels: &[ScatteringChannel]| -> Result<Vec<(f64, f64)>> {
        channels
            .iter()
            .map(|ch| {
                Ok((
                    ch.omega_out - ch.omega_in,
                    channel_intensity(ch, kappa, s.model)?,
                ))
            })
            .collect()
    };
    let (lines_cw, lines_ccw) = (lines(&channels_cw)?, lines(&channels_ccw)?);
    let offsets = spectrum_grid(&s.grid, comb.fsr, comb.omega_m);
    let render = |lines: &[(f64, f64)]| -> Vec<f64> {
        offsets
            .par_iter()
            .map(|&w| {
                lines
                    .iter()
                    .map(|&(center, height)| {
                        height * lorentzian_dos(w - center, gamma).expect("positive linewidth")
                    })
                    .sum()
            })
            .collect()
    };
    let spectrum = Spectrum {
        delta_over_fsr: offsets.iter().map(|w| w / comb.fsr).collect(),
        intensity_cw: render(&lines_cw),
        intensity_ccw: render(&lines_ccw),
    };
    Ok(ScenarioResult {
        comb,
        channels_cw,
        channels_ccw,
        spectrum,
        summary,
    })
}

/// Magnons of OAM 0, 1 and 2 used for the three reference scenarios.
pub fn figure4_magnons() -> [WalkerMode; 3] {
    let placeholder = 2.0 * PI * 1e9;
    [
        WalkerMode::new(
            WalkerIndex {
                n: 1,
                m_mag: 1,
                r: 0,
            },
            placeholder,
            EnvelopeShape::Uniform,
        ),
        WalkerMode::new(
            WalkerIndex {
                n: 4,
                m_mag: 0,
                r: 1,
            },
            placeholder,
            EnvelopeShape::Vortex,
        ),
        WalkerMode::new(
            WalkerIndex {
                n: 3,
                m_mag: -1,
                r: 1,
            },
            placeholder,
            EnvelopeShape::Vortex,
        ),
    ]
    .map(|m| m.expect("catalog entries are valid"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure4Row {
    pub oam: i32,
    pub magnon: WalkerIndex,
    pub comb: CombParameters,
    pub summary: Summary,
    /// CW/CCW ratio with overlap-integral amplitudes, whatever the model.
    pub overlap_ratio: f64,
    #[serde(skip)]
    pub spectrum: Spectrum,
}

/// The OAM 0, 1, 2 scenario suite built from `template` (its magnon is
/// replaced by each reference magnon in turn).
pub fn figure4_suite(template: &ScatteringScenario) -> Result<Vec<Figure4Row>> {
    figure4_magnons()
        .par_iter()
        .map(|magnon| {
            let scenario = ScatteringScenario {
                magnon: magnon.clone(),
                ..template.clone()
            };
            let result = run_scenario(&scenario)?;
            let overlap_ratio = if scenario.model == AmplitudeModel::Overlap {
                result.summary.ratio
            } else {
                let kappa = scenario.optical_linewidth.resolve(result.comb.fsr)?;
                let sum = |chs: &[ScatteringChannel]| -> Result<f64> {
                    chs.iter()
                        .map(|ch| channel_intensity(ch, kappa, AmplitudeModel::Overlap))
                        .sum()
                };
                sum(&result.channels_cw)? / sum(&result.channels_ccw)?
            };
            Ok(Figure4Row {
                oam: magnon.oam(),
                magnon: magnon.index,
                comb: result.comb,
                summary: result.summary,
                overlap_ratio,
                spectrum: result.spectrum,
            })
        })
        .collect()
}
