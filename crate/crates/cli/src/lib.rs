//! Subcommands of the `dronefilm` binary.
//!
//! Exit codes: 0 on success, 1 for data errors (bad clip contents, invalid
//! configuration, failed simulation), 2 for usage and file errors.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use dronefilm_core::export::{
    write_histogram_csv, write_quality_map_csv, write_trace_csv, write_waypoints_csv,
};
use dronefilm_core::metrics::{aggregate, compare, Comparison, RunReport};
use dronefilm_core::mocap::{
    load_jsonl, mixed_clip, parse_bvh, resample, synth_clip, to_clip, write_jsonl, AxisMap,
    JointMapping, SynthKind, SynthParams, CMU_SCALE,
};
use dronefilm_core::simworld::{run_simulation, Mode, SimConfig, SimRun};
use dronefilm_core::viewpoint::{
    global_optimum, quality_map_with, subject_state_clamped, DescriptorSelector,
};
use dronefilm_core::MotionClip;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 1,
            CliError::File { .. } | CliError::Usage(_) => 2,
        }
    }

    fn file(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::File {
            path: path.to_path_buf(),
            source,
        }
    }

    fn data(path: &Path) -> impl FnOnce(String) -> CliError + '_ {
        move |msg| CliError::Data(format!("{}: {msg}", path.display()))
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "dronefilm",
    version,
    about = "Plan and simulate drone camera trajectories around a moving subject"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a BVH file to canonical skeleton JSONL.
    Convert {
        #[command(flatten)]
        input: ClipArgs,
        /// Output JSONL path.
        #[arg(long)]
        out: PathBuf,
        /// Resample to this rate (Hz) before writing.
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Generate an analytic test clip as JSONL.
    Synth(SynthArgs),
    /// Write the quality curve of one frame as CSV.
    Qualitymap {
        #[command(flatten)]
        input: ClipArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Clip time in seconds.
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate one camera strategy and write trace, report and histograms.
    Simulate {
        #[command(flatten)]
        input: ClipArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "proposed")]
        mode: Mode,
        /// Output prefix; files are named `<prefix>_trace.csv` and so on.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both strategies on the same clip and seed and compare them.
    Compare {
        #[command(flatten)]
        input: ClipArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Comparison JSON path; the text table goes to stdout.
        #[arg(long)]
        out: PathBuf,
    },
}

/// A clip file: canonical JSONL, or BVH when the extension is `.bvh`.
#[derive(Debug, Args)]
pub struct ClipArgs {
    pub clip: PathBuf,
    /// BVH joint-name mapping (JSON object from joint id to source name).
    /// Defaults to the CMU naming.
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    /// Meters per BVH unit.
    #[arg(long, default_value_t = CMU_SCALE)]
    pub scale: f64,
    /// Up axis of the BVH source: y-up or z-up.
    #[arg(long, default_value = "y-up")]
    pub axis: AxisMap,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Flat key = value config file; flags below override it.
    #[arg(long, env = "DRONEFILM_CONFIG")]
    pub config: Option<PathBuf>,
    /// Seed of the drift noise.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulation rate in Hz.
    #[arg(long)]
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClipKind {
    Synth(SynthKind),
    /// A straight walk followed by waving in place.
    Mixed,
}

impl FromStr for ClipKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "mixed" {
            return Ok(ClipKind::Mixed);
        }
        s.parse::<SynthKind>()
            .map(ClipKind::Synth)
            .map_err(|e| format!("{e}; `mixed` is also accepted"))
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// straight_walk, circle_walk, in_place_wave, static_tpose or mixed.
    pub kind: ClipKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Clip length in seconds.
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    /// Frame rate in Hz.
    #[arg(long, default_value_t = 30.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
    #[arg(long, default_value_t = 0.0)]
    pub heading: f64,
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 8.0)]
    pub period: f64,
    /// Body rotation while waving, deg/s.
    #[arg(long, default_value_t = 0.0)]
    pub turn_rate: f64,
    #[arg(long, default_value_t = 0.5)]
    pub wave_hz: f64,
}

impl SynthArgs {
    pub fn params(&self) -> SynthParams {
        SynthParams {
            speed_mps: self.speed,
            heading_deg: self.heading,
            radius_m: self.radius,
            period_s: self.period,
            turn_rate_deg_s: self.turn_rate,
            wave_hz: self.wave_hz,
            origin: [0.0, 0.0],
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Convert { input, out, rate } => cmd_convert(&input, rate, &out),
        Command::Synth(args) => cmd_synth(&args),
        Command::Qualitymap {
            input,
            config,
            t,
            out,
        } => cmd_qualitymap(&input, &config, t, &out),
        Command::Simulate {
            input,
            config,
            mode,
            out,
        } => cmd_simulate(&input, &config, mode, &out),
        Command::Compare { input, config, out } => cmd_compare(&input, &config, &out),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(CliError::file(path))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::file(dir))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(CliError::file(path))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> CliResult<()> {
    w.flush().map_err(CliError::file(path))
}

fn write_csv<E: std::fmt::Display>(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> Result<(), E>,
) -> CliResult<()> {
    let mut w = create(path)?;
    f(&mut w).map_err(|e| CliError::File {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    finish(path, w)
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(CliError::file(path))
}

/// Loads a clip from JSONL or (by extension) BVH.
pub fn load_clip(args: &ClipArgs) -> CliResult<MotionClip> {
    let path = &args.clip;
    let is_bvh = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("bvh"));
    if is_bvh {
        let text = read_text(path)?;
        let mapping = match &args.mapping {
            Some(m) => JointMapping::from_json(&read_text(m)?)
                .map_err(|e| CliError::data(m)(e.to_string()))?,
            None => JointMapping::cmu(),
        };
        if !(args.scale.is_finite() && args.scale > 0.0) {
            return Err(CliError::Usage(format!(
                "--scale {}: must be a positive number",
                args.scale
            )));
        }
        let doc = parse_bvh(&text).map_err(|e| CliError::data(path)(e.to_string()))?;
        to_clip(&doc, args.scale, args.axis, &mapping)
            .map_err(|e| CliError::data(path)(e.to_string()))
    } else {
        let file = File::open(path).map_err(CliError::file(path))?;
        load_jsonl(BufReader::new(file)).map_err(|e| CliError::data(path)(e.to_string()))
    }
}

/// Config from `--config` (or the environment) with flag overrides applied.
pub fn load_config(args: &ConfigArgs) -> CliResult<SimConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = read_text(path)?;
            SimConfig::from_toml_str(&text).map_err(|e| CliError::data(path)(e.to_string()))?
        }
        None => SimConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    if let Some(rate) = args.rate {
        cfg.sim_rate = rate;
    }
    cfg.validate().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(cfg)
}

pub fn cmd_convert(input: &ClipArgs, rate: Option<f64>, out: &Path) -> CliResult<()> {
    let mut clip = load_clip(input)?;
    if let Some(hz) = rate {
        clip = resample(&clip, hz).map_err(|e| CliError::Usage(format!("--rate: {e}")))?;
    }
    let mut w = create(out)?;
    write_jsonl(&clip, &mut w).map_err(CliError::file(out))?;
    finish(out, w)?;
    println!(
        "wrote {} frames ({:.3} s at {:.3} Hz) to {}",
        clip.frames().len(),
        clip.duration(),
        clip.rate_hz(),
        out.display()
    );
    Ok(())
}

pub fn synth(args: &SynthArgs) -> CliResult<MotionClip> {
    let params = args.params();
    match args.kind {
        ClipKind::Synth(kind) => synth_clip(kind, &params, args.duration, args.rate),
        ClipKind::Mixed => mixed_clip(&params, args.duration, args.rate),
    }
    .map_err(|e| CliError::Usage(e.to_string()))
}

pub fn cmd_synth(args: &SynthArgs) -> CliResult<()> {
    let clip = synth(args)?;
    let mut w = create(&args.out)?;
    write_jsonl(&clip, &mut w).map_err(CliError::file(&args.out))?;
    finish(&args.out, w)?;
    println!(
        "wrote {} frames to {}",
        clip.frames().len(),
        args.out.display()
    );
    Ok(())
}

pub fn cmd_qualitymap(input: &ClipArgs, config: &ConfigArgs, t: f64, out: &Path) -> CliResult<()> {
    let clip = load_clip(input)?;
    let cfg = load_config(config)?;
    if !clip.contains(t) {
        return Err(CliError::Usage(format!(
            "--t {t}: outside the clip range [{}, {}]",
            clip.start(),
            clip.end()
        )));
    }
    let frame = clip.sample(t).map_err(|e| CliError::Data(e.to_string()))?;
    let state = subject_state_clamped(&clip, t, cfg.subject_window)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let descriptor =
        DescriptorSelector::new(cfg.speed_threshold, cfg.hysteresis).select(state.speed());
    let map = quality_map_with(&frame, &state, descriptor, cfg.n_samples)
        .map_err(|e| CliError::Data(e.to_string()))?;
    write_csv(out, |w| write_quality_map_csv(w, &map))?;
    println!(
        "{descriptor} at t = {t} s (speed {:.3} m/s); best azimuth {} deg; wrote {}",
        state.speed(),
        global_optimum(&map, cfg.initial_azimuth),
        out.display()
    );
    Ok(())
}

fn simulate(clip: &MotionClip, cfg: &SimConfig, mode: Mode) -> CliResult<(SimRun, RunReport)> {
    let run = run_simulation(clip, cfg, mode).map_err(|e| CliError::Data(e.to_string()))?;
    let report = aggregate(&run.records, &run.maps).map_err(|e| CliError::Data(e.to_string()))?;
    Ok((run, report))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

/// Paths written by `simulate` for an output prefix.
pub fn simulate_outputs(prefix: &Path) -> [PathBuf; 5] {
    [
        "_trace.csv",
        "_report.json",
        "_waypoints.csv",
        "_hist_composition.csv",
        "_hist_viewpoint.csv",
    ]
    .map(|s| with_suffix(prefix, s))
}

pub fn cmd_simulate(
    input: &ClipArgs,
    config: &ConfigArgs,
    mode: Mode,
    out: &Path,
) -> CliResult<()> {
    let clip = load_clip(input)?;
    let cfg = load_config(config)?;
    let (run, report) = simulate(&clip, &cfg, mode)?;
    let [trace, report_path, waypoints, hist_c, hist_v] = simulate_outputs(out);
    write_csv(&trace, |w| write_trace_csv(w, &run.records))?;
    write_json(&report_path, &report)?;
    write_csv(&waypoints, |w| write_waypoints_csv(w, &run.waypoints))?;
    write_csv(&hist_c, |w| {
        write_histogram_csv(w, &report.histogram_composition)
    })?;
    write_csv(&hist_v, |w| {
        write_histogram_csv(w, &report.histogram_viewpoint)
    })?;
    println!(
        "{mode}: {} frames ({} invisible), avg screen error ratio {:.4}, avg viewpoint error {:.2} deg",
        report.frame_count, report.invisible_count, report.avg_screen_error_ratio, report.avg_viewpoint_error_deg
    );
    println!("wrote {}_*", out.display());
    Ok(())
}

/// Runs both strategies concurrently with identical clip, config and seed.
pub fn compare_modes(clip: &MotionClip, cfg: &SimConfig) -> CliResult<Comparison> {
    let (proposed, follow) = std::thread::scope(|s| {
        let p = s.spawn(|| simulate(clip, cfg, Mode::Proposed));
        let f = s.spawn(|| simulate(clip, cfg, Mode::FollowMe));
        (
            p.join().expect("simulation thread"),
            f.join().expect("simulation thread"),
        )
    });
    Ok(compare(&proposed?.1, &follow?.1))
}

pub fn cmd_compare(input: &ClipArgs, config: &ConfigArgs, out: &Path) -> CliResult<()> {
    let clip = load_clip(input)?;
    let cfg = load_config(config)?;
    let comparison = compare_modes(&clip, &cfg)?;
    write_json(out, &comparison)?;
    print!("{}", comparison.to_table());
    Ok(())
}
