//! One builder per subcommand. Each returns the rendered files and the text
//! for standard output; nothing touches the filesystem here.

use std::f64::consts::PI;

use optomag_core::brillouin::{
    allowed_m_tm, delta_l, output_component, Process, ScatteringChannel,
};
use optomag_core::config::Config;
use optomag_core::io::{csv_bytes, json_bytes, svg_line_plot, Series};
use optomag_core::spectra::{
    figure4_suite, run_scenario, CombParameters, Spectrum, Summary, Verdict,
};
use optomag_core::walker::{
    extract_winding, oam_volume_integral, walker_oam, EnvelopeShape, VolumeGrid, WalkerIndex,
};
use optomag_core::wgm::{
    resonance_size_parameter_in, wgm_oam, AngularMomentumTriple, Component, Orbit, Polarization,
};
use optomag_core::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::{Artifact, Outcome};

/// Circle on which catalog windings are measured, clear of the radial node.
const WINDING_RHO: f64 = 0.4;
const WINDING_Z: f64 = 0.1;
const WINDING_SAMPLES: usize = 128;

#[derive(Serialize)]
struct WalkerRow {
    n: u32,
    m_mag: i32,
    r: u32,
    envelope: EnvelopeShape,
    omega_m_hz: f64,
    l_z: i32,
    winding: i32,
    oam_integral: f64,
}

pub fn walker_modes(config: &Config) -> Result<Outcome> {
    let modes = config.walker_modes()?;
    let rows = modes
        .par_iter()
        .map(|mode| {
            Ok(WalkerRow {
                n: mode.index.n,
                m_mag: mode.index.m_mag,
                r: mode.index.r,
                envelope: mode.shape,
                omega_m_hz: mode.omega_m / (2.0 * PI),
                l_z: walker_oam(mode.index.m_mag),
                winding: extract_winding(mode, WINDING_RHO, WINDING_Z, WINDING_SAMPLES)?,
                oam_integral: oam_volume_integral(mode, VolumeGrid::default())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        stdout: format!("{} Walker modes\n", rows.len()),
        files: vec![Artifact::new("walker_modes.csv", csv_bytes(&rows)?)],
    })
}

#[derive(Serialize)]
struct WgmRow {
    polarization: Polarization,
    m: u32,
    q: u32,
    size_parameter: f64,
    frequency_hz: f64,
    fsr_hz: f64,
    gb_over_fsr: f64,
}

pub fn wgm_modes(config: &Config) -> Result<Outcome> {
    let geometry = config.geometry()?;
    let (m_te, hw, q) = (config.wgm.m_te, config.wgm.table_half_width, config.wgm.q);
    let ms: Vec<u32> = (m_te - hw..=m_te + hw + 1).collect();
    let solve = |pol: Polarization| -> Result<Vec<f64>> {
        ms.par_iter()
            .map(|&m| resonance_size_parameter_in(&geometry, pol, m, q, &config.wgm.scan))
            .collect()
    };
    let (te, tm) = (solve(Polarization::Te)?, solve(Polarization::Tm)?);
    let hz = |x: f64| geometry.omega(x) / (2.0 * PI);
    let mut rows = Vec::new();
    for (pol, xs) in [(Polarization::Te, &te), (Polarization::Tm, &tm)] {
        for k in 0..ms.len() - 1 {
            let te_fsr = hz(te[k + 1]) - hz(te[k]);
            let gb = (hz(tm[k]) - hz(te[k])).rem_euclid(te_fsr);
            rows.push(WgmRow {
                polarization: pol,
                m: ms[k],
                q,
                size_parameter: xs[k],
                frequency_hz: hz(xs[k]),
                fsr_hz: hz(xs[k + 1]) - hz(xs[k]),
                gb_over_fsr: gb / te_fsr,
            });
        }
    }
    let centre = rows
        .iter()
        .find(|r| r.m == m_te)
        .map_or(f64::NAN, |r| r.gb_over_fsr);
    Ok(Outcome {
        stdout: format!(
            "{} WGM rows; GB/FSR at m = {m_te}: {centre:.4}\n",
            rows.len()
        ),
        files: vec![Artifact::new("wgm_modes.csv", csv_bytes(&rows)?)],
    })
}

#[derive(Serialize)]
struct OamRow {
    orbit: Orbit,
    polarization: Polarization,
    component: Component,
    m: u32,
    oam: i64,
    spin: i64,
    total_j: i64,
}

pub fn oam(config: &Config) -> Result<Outcome> {
    let (m_te, hw) = (config.wgm.m_te, config.wgm.table_half_width);
    let mut rows = Vec::new();
    for orbit in Orbit::BOTH {
        for m in m_te - hw..=m_te + hw {
            for (pol, component) in [
                (Polarization::Te, Component::None),
                (Polarization::Tm, Component::Inner),
                (Polarization::Tm, Component::Outer),
            ] {
                let t = AngularMomentumTriple::of(orbit, pol, component, m)?;
                rows.push(OamRow {
                    orbit,
                    polarization: pol,
                    component,
                    m,
                    oam: t.l,
                    spin: t.s,
                    total_j: t.j,
                });
            }
        }
    }
    Ok(Outcome {
        stdout: format!("{} angular momentum rows\n", rows.len()),
        files: vec![Artifact::new("oam.csv", csv_bytes(&rows)?)],
    })
}

#[derive(Serialize)]
struct SelectionReport {
    orbit: Orbit,
    process: Process,
    m_te: u32,
    m_mag: i32,
    magnon_oam: i32,
    m_tm: u32,
    component: Component,
    te_oam: i64,
    tm_oam: i64,
    delta_l: i64,
    rule: String,
}

pub fn selection(
    config: &Config,
    orbit: Orbit,
    process: Process,
    m_te: Option<u32>,
    m_mag: Option<i32>,
) -> Result<Outcome> {
    let m_te = m_te.unwrap_or(config.wgm.m_te);
    let m_mag = match m_mag {
        Some(v) => v,
        None => {
            config
                .walker_catalog
                .first()
                .ok_or_else(|| Error::EmptyCatalog("walker_catalog".into()))?
                .m_mag
        }
    };
    if m_te < 1 {
        return Err(Error::InvalidIndex(format!(
            "m_TE must be >= 1, got {m_te}"
        )));
    }
    let m_tm = allowed_m_tm(orbit, process, m_te, m_mag)?;
    let component = output_component(orbit, process);
    let rule = match (orbit, process) {
        (Orbit::Cw, Process::Stokes) | (Orbit::Ccw, Process::AntiStokes) => "m_TM = m_TE - m_mag",
        _ => "m_TM = m_TE + m_mag",
    };
    let report = SelectionReport {
        orbit,
        process,
        m_te,
        m_mag,
        magnon_oam: walker_oam(m_mag),
        m_tm,
        component,
        te_oam: wgm_oam(orbit, Polarization::Te, Component::None, m_te)?,
        tm_oam: wgm_oam(orbit, Polarization::Tm, component, m_tm)?,
        delta_l: delta_l(orbit, process, m_te, m_tm, m_mag),
        rule: rule.into(),
    };
    Ok(Outcome {
        stdout: format!(
            "{orbit} {process}: {rule} -> m_TM = {m_tm} ({component} component) for m_TE = {m_te}, m_mag = {m_mag}\n"
        ),
        files: vec![Artifact::new("selection.json", json_bytes(&report)?)],
    })
}

fn catalog_scenario(
    config: &Config,
    position: usize,
) -> Result<optomag_core::spectra::ScatteringScenario> {
    let magnon = config
        .walker_modes()?
        .into_iter()
        .nth(position)
        .ok_or_else(|| {
            Error::InvalidIndex(format!(
                "magnon {position} is outside walker_catalog of length {}",
                config.walker_catalog.len()
            ))
        })?;
    config.scenario(magnon)
}

#[derive(Serialize)]
struct ChannelRow {
    orbit: Orbit,
    process: Process,
    m_te: u32,
    m_tm: u32,
    component: Component,
    m_mag: i32,
    delta_l: i64,
    omega_out: f64,
    detuning_over_fsr: f64,
    amplitude_abs: f64,
}

fn channel_rows(channels: &[ScatteringChannel], fsr: f64) -> Vec<ChannelRow> {
    channels
        .iter()
        .map(|c| ChannelRow {
            orbit: c.input.orbit,
            process: c.process,
            m_te: c.input.m,
            m_tm: c.output.m,
            component: c.component,
            m_mag: c.magnon.m_mag,
            delta_l: c.delta_l,
            omega_out: c.omega_out,
            detuning_over_fsr: c.detuning() / fsr,
            amplitude_abs: c.amplitude.norm(),
        })
        .collect()
}

#[derive(Serialize)]
struct ChannelsReport<'a> {
    magnon: WalkerIndex,
    comb: CombParameters,
    channels: &'a [ChannelRow],
}

pub fn channels(config: &Config, position: usize) -> Result<Outcome> {
    let scenario = catalog_scenario(config, position)?;
    let result = run_scenario(&scenario)?;
    let mut rows = channel_rows(&result.channels_cw, result.comb.fsr);
    rows.extend(channel_rows(&result.channels_ccw, result.comb.fsr));
    let report = ChannelsReport {
        magnon: scenario.magnon.index,
        comb: result.comb,
        channels: &rows,
    };
    Ok(Outcome {
        stdout: format!(
            "{} channels for magnon {}\n",
            rows.len(),
            scenario.magnon.index
        ),
        files: vec![
            Artifact::new("channels.csv", csv_bytes(&rows)?),
            Artifact::new("channels.json", json_bytes(&report)?),
        ],
    })
}

#[derive(Serialize)]
struct SpectrumRow {
    delta_omega_over_fsr: f64,
    i_cw: f64,
    i_ccw: f64,
}

fn spectrum_csv(spectrum: &Spectrum) -> Result<Vec<u8>> {
    let rows: Vec<_> = spectrum
        .delta_over_fsr
        .iter()
        .zip(&spectrum.intensity_cw)
        .zip(&spectrum.intensity_ccw)
        .map(|((&d, &cw), &ccw)| SpectrumRow {
            delta_omega_over_fsr: d,
            i_cw: cw,
            i_ccw: ccw,
        })
        .collect();
    csv_bytes(&rows)
}

fn spectrum_svg(title: &str, spectrum: &Spectrum) -> String {
    svg_line_plot(
        title,
        "(ω₂ − ω₁) / FSR",
        &spectrum.delta_over_fsr,
        &[
            Series {
                label: "CW",
                y: &spectrum.intensity_cw,
                color: "#c0392b",
            },
            Series {
                label: "CCW",
                y: &spectrum.intensity_ccw,
                color: "#2c6fbb",
            },
        ],
    )
}

#[derive(Serialize)]
struct SpectrumReport {
    magnon: WalkerIndex,
    magnon_oam: i32,
    comb: CombParameters,
    summary: Summary,
}

pub fn spectrum(config: &Config, position: usize, svg: bool) -> Result<Outcome> {
    let scenario = catalog_scenario(config, position)?;
    let result = run_scenario(&scenario)?;
    let report = SpectrumReport {
        magnon: scenario.magnon.index,
        magnon_oam: scenario.magnon.oam(),
        comb: result.comb,
        summary: result.summary,
    };
    let mut files = vec![
        Artifact::new("spectrum.csv", spectrum_csv(&result.spectrum)?),
        Artifact::new("summary.json", json_bytes(&report)?),
    ];
    if svg {
        let title = format!("magnon {}", scenario.magnon.index);
        files.push(Artifact::new(
            "spectrum.svg",
            spectrum_svg(&title, &result.spectrum),
        ));
    }
    Ok(Outcome {
        stdout: format!(
            "magnon {}: I_cw/I_ccw = {:.6e} ({})\n",
            scenario.magnon.index, result.summary.ratio, result.summary.verdict
        ),
        files,
    })
}

#[derive(Serialize)]
struct Figure4CsvRow {
    oam: i32,
    n: u32,
    m_mag: i32,
    r: u32,
    i_cw: f64,
    i_ccw: f64,
    ratio: f64,
    verdict: Verdict,
    overlap_ratio: f64,
    fsr: f64,
    gb_over_fsr: f64,
    omega_m: f64,
}

#[derive(Serialize)]
struct Figure4Report<'a> {
    m_te: u32,
    rows: &'a [optomag_core::spectra::Figure4Row],
}

pub fn figure4(config: &Config, svg: bool) -> Result<Outcome> {
    let template = catalog_scenario(config, 0)?;
    let rows = figure4_suite(&template)?;
    let table: Vec<_> = rows
        .iter()
        .map(|row| Figure4CsvRow {
            oam: row.oam,
            n: row.magnon.n,
            m_mag: row.magnon.m_mag,
            r: row.magnon.r,
            i_cw: row.summary.i_cw,
            i_ccw: row.summary.i_ccw,
            ratio: row.summary.ratio,
            verdict: row.summary.verdict,
            overlap_ratio: row.overlap_ratio,
            fsr: row.comb.fsr,
            gb_over_fsr: row.comb.gb / row.comb.fsr,
            omega_m: row.comb.omega_m,
        })
        .collect();
    let mut files = vec![
        Artifact::new("figure4.csv", csv_bytes(&table)?),
        Artifact::new(
            "figure4.json",
            json_bytes(&Figure4Report {
                m_te: template.m_te,
                rows: &rows,
            })?,
        ),
    ];
    let mut stdout = String::new();
    for row in &rows {
        files.push(Artifact::new(
            format!("spectrum_oam{}.csv", row.oam),
            spectrum_csv(&row.spectrum)?,
        ));
        if svg {
            let title = format!("magnon OAM {} {}", row.oam, row.magnon);
            files.push(Artifact::new(
                format!("spectrum_oam{}.svg", row.oam),
                spectrum_svg(&title, &row.spectrum),
            ));
        }
        stdout.push_str(&format!(
            "OAM {}: I_cw/I_ccw = {:.6e} ({})\n",
            row.oam, row.summary.ratio, row.summary.verdict
        ));
    }
    Ok(Outcome { stdout, files })
}
