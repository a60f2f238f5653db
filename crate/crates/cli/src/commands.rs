use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use cfgauge_core::analysis::{analyze, plot, AnalysisOptions, AnalysisReport, StrainMode};
use cfgauge_core::config::PRESET_NAMES;
use cfgauge_core::experiment::{parse_record, run_experiment, Scenario};
use cfgauge_core::mechanics::{residual_thermal_stress, Beam, Face, Gauge, LoadCase, Orientation};
use cfgauge_core::model::{section_properties, BeamGeometry, MaterialSet};
use cfgauge_core::sensing::DividerConfig;
use cfgauge_core::Config;
use serde::Serialize;

use crate::output::{csv_bytes, emit, json_bytes, Format};
use crate::{reproduce, usage, Cli, Command, OrientationArg, Outcome, StrainModeArg};

/// A named, fully resolved configuration.
pub struct Sample {
    pub name: String,
    pub config: Config,
}

fn layer_paths(cli: &Cli) -> Vec<&Path> {
    cli.configs.iter().map(PathBuf::as_path).collect()
}

fn has_config(cli: &Cli) -> bool {
    cli.preset.is_some() || !cli.configs.is_empty()
}

fn named(config: Config, fallback: &str) -> Sample {
    Sample {
        name: config.name.clone().unwrap_or_else(|| fallback.to_string()),
        config,
    }
}

/// The configured sample, or every shipped preset when none is given.
pub fn samples(cli: &Cli) -> Result<Vec<Sample>> {
    if !has_config(cli) {
        return PRESET_NAMES
            .iter()
            .map(|p| Ok(named(Config::preset(p)?, p)))
            .collect();
    }
    Ok(vec![single(cli)?])
}

pub fn single(cli: &Cli) -> Result<Sample> {
    if !has_config(cli) {
        return usage("this command needs --preset or --config");
    }
    let config = Config::layered(cli.preset.map(|p| p.name()), &layer_paths(cli))?;
    config.validate()?;
    Ok(named(config, "config"))
}

pub fn seed_for(cli: &Cli, config: &Config) -> Result<u64> {
    match cli.seed.or(config.seed) {
        Some(s) => Ok(s),
        None => usage("a seed is required: pass --seed or set experiment.seed"),
    }
}

fn tabular<T: Serialize>(cli: &Cli, rows: &[T]) -> Result<()> {
    let bytes = match cli.format {
        None | Some(Format::Json) => json_bytes(rows)?,
        Some(Format::Csv) => csv_bytes(rows)?,
        Some(Format::Svg) => return usage("svg output is only available for `analyze`"),
    };
    emit(cli.out.as_deref(), &bytes)
}

/// Clears the sign of zero so reports never print `-0.0`.
fn z(x: f64) -> f64 {
    x + 0.0
}

#[derive(Serialize)]
struct SectionRow {
    sample: String,
    beam_height_mm: f64,
    transformation_factor: f64,
    composite_area_mm2: f64,
    petg_area_mm2: f64,
    second_moment_mm4: f64,
}

fn section(cli: &Cli) -> Result<Outcome> {
    let mut rows = Vec::new();
    for s in samples(cli)? {
        let g = &s.config.geometry;
        let p = section_properties(g, &s.config.materials)?;
        rows.push(SectionRow {
            sample: s.name,
            beam_height_mm: g.beam_height * 1e3,
            transformation_factor: p.transformation_factor,
            composite_area_mm2: p.composite_area * 1e6,
            petg_area_mm2: p.petg_area * 1e6,
            second_moment_mm4: p.second_moment * 1e12,
        });
    }
    tabular(cli, &rows)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct BendRow {
    sample: String,
    force_n: f64,
    orientation: Orientation,
    gauge: Gauge,
    face: Face,
    moment_nm: f64,
    deflection_mm: f64,
    max_strain: f64,
    average_strain: f64,
    gauge_strain: f64,
    max_fiber_stress_mpa: f64,
    loading_stress_mpa: f64,
}

fn bend(cli: &Cli, force: f64, orientation: OrientationArg) -> Result<Outcome> {
    if !force.is_finite() || force < 0.0 {
        return usage(format!("--force must be a finite non-negative number, got {force}"));
    }
    let orientation = match orientation {
        OrientationArg::Initial => Orientation::Initial,
        OrientationArg::Flipped => Orientation::Flipped,
    };
    let mut rows = Vec::new();
    for s in samples(cli)? {
        let beam = Beam::new(s.config.geometry, s.config.materials)?;
        let b = beam.bend(LoadCase::new(force, orientation));
        for gauge in Gauge::BOTH {
            let i = gauge.index();
            rows.push(BendRow {
                sample: s.name.clone(),
                force_n: force,
                orientation,
                gauge,
                face: orientation.face_of(gauge),
                moment_nm: z(b.moment),
                deflection_mm: z(b.deflection * 1e3),
                max_strain: z(b.max_strain),
                average_strain: z(b.average_strain),
                gauge_strain: z(b.gauge_strain[i]),
                max_fiber_stress_mpa: z(b.max_fiber_stress * 1e-6),
                loading_stress_mpa: z(b.gauge_stress[i] * 1e-6),
            });
        }
    }
    tabular(cli, &rows)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct ThermalRow {
    sample: String,
    beam_height_mm: f64,
    delta_t_composite_k: f64,
    delta_t_petg_k: f64,
    stress_mpa: f64,
}

fn thermal(cli: &Cli) -> Result<Outcome> {
    let mut rows = Vec::new();
    for s in samples(cli)? {
        let t = residual_thermal_stress(&s.config.geometry, &s.config.materials)?;
        rows.push(ThermalRow {
            sample: s.name,
            beam_height_mm: s.config.geometry.beam_height * 1e3,
            delta_t_composite_k: t.delta_t_composite,
            delta_t_petg_k: t.delta_t_petg,
            stress_mpa: t.stress * 1e-6,
        });
    }
    tabular(cli, &rows)?;
    Ok(Outcome::Ok)
}

/// `dir/stem-<seed>.ext` for sweep members.
fn sweep_path(base: &Path, seed: u64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}-{seed}.{ext}"))
}

fn simulate_one(scenario: &Scenario, config: &Config, seed: u64, path: &Path) -> Result<usize> {
    let sim = run_experiment(scenario, &config.plan(seed))?;
    sim.record
        .save(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(sim.record.len())
}

fn simulate(cli: &Cli, sweep: Option<u32>, threads: Option<usize>) -> Result<Outcome> {
    if matches!(cli.format, Some(f) if f != Format::Csv) {
        return usage("`simulate` writes csv only");
    }
    let Some(out) = cli.out.as_deref() else {
        return usage("`simulate` needs --out PATH for the record");
    };
    let sample = single(cli)?;
    let seed = seed_for(cli, &sample.config)?;
    let scenario = sample.config.scenario();
    let Some(n) = sweep else {
        let rows = simulate_one(&scenario, &sample.config, seed, out)?;
        println!("{} ({rows} rows, seed {seed})", out.display());
        return Ok(Outcome::Ok);
    };
    if n == 0 {
        return usage("--sweep must be at least 1");
    }
    let workers = threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
        .clamp(1, n as usize);
    let next = AtomicU32::new(0);
    let results: Mutex<Vec<(u64, Result<usize>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let s = seed.wrapping_add(i as u64);
                let r = simulate_one(&scenario, &sample.config, s, &sweep_path(out, s));
                results.lock().expect("worker panicked").push((s, r));
            });
        }
    });
    let mut results = results.into_inner().expect("worker panicked");
    results.sort_by_key(|(s, _)| *s);
    for (s, r) in results {
        let rows = r?;
        println!("{} ({rows} rows, seed {s})", sweep_path(out, s).display());
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct FitRow {
    window: usize,
    orientation: Option<Orientation>,
    start_time: f64,
    end_time: f64,
    cycles: usize,
    gauge: Gauge,
    status: cfgauge_core::analysis::ChannelStatus,
    k: Option<f64>,
    r_unstrained: Option<f64>,
    r_squared: Option<f64>,
    hysteresis: Option<f64>,
    relative_drift: Option<f64>,
}

fn fit_rows(report: &AnalysisReport) -> Vec<FitRow> {
    let mut rows = Vec::new();
    for w in &report.windows {
        for ch in &w.channels {
            rows.push(FitRow {
                window: w.id,
                orientation: w.orientation,
                start_time: w.start_time,
                end_time: w.end_time,
                cycles: w.cycles,
                gauge: ch.gauge,
                status: ch.status,
                k: ch.fit.map(|f| f.k),
                r_unstrained: ch.r_unstrained,
                r_squared: ch.fit.map(|f| f.r_squared),
                hysteresis: ch.metrics.map(|m| m.hysteresis),
                relative_drift: ch.metrics.map(|m| m.relative_drift),
            });
        }
    }
    rows
}

fn analyze_cmd(cli: &Cli, input: &Path, mode: StrainModeArg, svg: Option<&Path>) -> Result<Outcome> {
    let record = parse_record(input)?;
    let (geometry, materials, mut options): (BeamGeometry, MaterialSet, AnalysisOptions) = if has_config(cli) {
        let s = single(cli)?;
        (s.config.geometry, s.config.materials, s.config.analysis_options())
    } else if let Some(meta) = &record.metadata {
        let scenario: Scenario = serde_json::from_value(meta.scenario.clone())
            .map_err(|e| cfgauge_core::Error::Config(format!("record metadata scenario: {e}")))?;
        let options = AnalysisOptions {
            force_floor: meta.force_floor,
            small_amplitude: meta.small_amplitude,
            tolerance: 0.1,
            strain_mode: StrainMode::Absolute,
            divider: meta.divider,
        };
        (scenario.geometry, scenario.materials, options)
    } else {
        return usage("the record has no metadata sidecar; pass --preset or --config");
    };
    options.strain_mode = match mode {
        StrainModeArg::Absolute => StrainMode::Absolute,
        StrainModeArg::Relative => StrainMode::Relative,
    };
    let report = analyze(&record, &geometry, &materials, &options)?;
    let divider: DividerConfig = record.metadata.as_ref().map_or(options.divider, |m| m.divider);
    let chart = || plot::report_svg(&record, &report, &geometry, &divider);
    if let Some(path) = svg {
        emit(Some(path), chart().as_bytes())?;
    }
    let bytes = match cli.format {
        None | Some(Format::Json) => json_bytes(&report)?,
        Some(Format::Csv) => csv_bytes(&fit_rows(&report))?,
        Some(Format::Svg) => chart().into_bytes(),
    };
    emit(cli.out.as_deref(), &bytes)?;
    Ok(Outcome::Ok)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Section => section(cli),
        Command::Bend { force, orientation } => bend(cli, *force, *orientation),
        Command::Thermal => thermal(cli),
        Command::Simulate { sweep, threads } => simulate(cli, *sweep, *threads),
        Command::Analyze { input, strain_mode, svg } => analyze_cmd(cli, input, *strain_mode, svg.as_deref()),
        Command::Reproduce { table, runs } => reproduce::run(cli, *table, *runs),
        Command::Schema { kind } => {
            emit(cli.out.as_deref(), kind.source().as_bytes())?;
            Ok(Outcome::Ok)
        }
    }
}
