//! `optomag`: mode tables, selection rules, scattering channels and spectra
//! from a single TOML configuration.

mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use optomag_core::brillouin::Process;
use optomag_core::config::Config;
use optomag_core::wgm::Orbit;
use optomag_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "optomag",
    version,
    about = "Magnon Brillouin scattering in whispering-gallery resonators"
)]
struct Cli {
    /// TOML configuration; defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Also write SVG plots.
    #[arg(long, global = true)]
    svg: bool,

    /// Cap on worker threads.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    /// Validate the configuration and stop before computing anything.
    #[arg(long, global = true)]
    validate: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Walker or WGM mode table.
    Modes {
        #[arg(value_enum)]
        which: ModeTable,
    },
    /// Angular momentum bookkeeping of the WGM components around m_TE.
    Oam,
    /// Allowed TM index for one orbit and process.
    Selection {
        #[arg(long, value_enum)]
        orbit: OrbitArg,
        #[arg(long, value_enum)]
        process: ProcessArg,
        /// Defaults to `wgm.m_te`.
        #[arg(long)]
        m_te: Option<u32>,
        /// Defaults to the first catalog entry.
        #[arg(long, allow_negative_numbers = true)]
        m_mag: Option<i32>,
    },
    /// Scattering channels of one catalog magnon in both orbits.
    Channels {
        /// Position in `walker_catalog`.
        #[arg(long, default_value_t = 0)]
        magnon: usize,
    },
    /// CW and CCW spectra of one catalog magnon.
    Spectrum {
        #[arg(long, default_value_t = 0)]
        magnon: usize,
    },
    /// Reciprocity survey over magnons of OAM 0, 1 and 2.
    Figure4,
    /// Validate the configuration and print it with defaults filled in.
    Validate,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeTable {
    Walker,
    Wgm,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrbitArg {
    Cw,
    Ccw,
}

impl From<OrbitArg> for Orbit {
    fn from(o: OrbitArg) -> Self {
        match o {
            OrbitArg::Cw => Orbit::Cw,
            OrbitArg::Ccw => Orbit::Ccw,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ProcessArg {
    Stokes,
    #[value(name = "anti-stokes", alias = "anti_stokes")]
    AntiStokes,
}

impl From<ProcessArg> for Process {
    fn from(p: ProcessArg) -> Self {
        match p {
            ProcessArg::Stokes => Process::Stokes,
            ProcessArg::AntiStokes => Process::AntiStokes,
        }
    }
}

/// A rendered output file, written only once every file of a command is ready.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            name: name.into(),
            bytes: bytes.into(),
        }
    }
}

pub struct Outcome {
    pub stdout: String,
    pub files: Vec<Artifact>,
}

fn load_config(path: Option<&Path>) -> Result<Config, Error> {
    match path {
        None => Ok(Config::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            Config::from_toml(&text)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let config = load_config(cli.config.as_deref())?;
    if cli.validate || matches!(cli.command, Command::Validate) {
        return Ok(Outcome {
            stdout: config.to_toml(),
            files: Vec::new(),
        });
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Modes {
            which: ModeTable::Walker,
        } => commands::walker_modes(&config),
        Command::Modes {
            which: ModeTable::Wgm,
        } => commands::wgm_modes(&config),
        Command::Oam => commands::oam(&config),
        Command::Selection {
            orbit,
            process,
            m_te,
            m_mag,
        } => commands::selection(&config, (*orbit).into(), (*process).into(), *m_te, *m_mag),
        Command::Channels { magnon } => commands::channels(&config, *magnon),
        Command::Spectrum { magnon } => commands::spectrum(&config, *magnon, cli.svg),
        Command::Figure4 => commands::figure4(&config, cli.svg),
        Command::Validate => unreachable!("handled above"),
    }
}

fn write_all(dir: &Path, files: &[Artifact]) -> Result<(), Error> {
    if files.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(dir)?;
    for file in files {
        std::fs::write(dir.join(&file.name), &file.bytes)?;
    }
    Ok(())
}

/// Exit status and category of an error.
fn classify(e: &Error) -> (u8, &'static str) {
    match e {
        Error::Config(_) => (2, "config"),
        Error::Io(_) => (1, "io"),
        e if e.is_numerical() => (3, "numerical"),
        _ => (2, "input"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        write_all(&cli.out, &outcome.files)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (code, kind) = classify(&e);
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("optomag: error kind={kind} code={code} message={message:?}");
            ExitCode::from(code)
        }
    }
}
