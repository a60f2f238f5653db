use cfgauge_core::analysis::{analyze, AnalysisReport, ChannelStatus, StrainMode};
use cfgauge_core::experiment::{run_experiment, Simulation, TimeSeriesRecord};
use cfgauge_core::mechanics::{Gauge, Orientation};
use cfgauge_core::sensing::Matrix;
use cfgauge_core::Config;

fn run(c: &Config, seed: u64) -> (Simulation, AnalysisReport) {
    let sim = run_experiment(&c.scenario(), &c.plan(seed)).unwrap();
    let report = analyze(&sim.record, &c.geometry, &c.materials, &c.analysis_options()).unwrap();
    (sim, report)
}

fn window_k(report: &AnalysisReport, gauge: Gauge, orientation: Orientation) -> Vec<f64> {
    report
        .windows
        .iter()
        .filter(|w| w.orientation == Some(orientation))
        .map(|w| w.channels[gauge.index()].fit.unwrap().k)
        .collect()
}

#[test]
fn window_count_matches_plan_for_every_preset() {
    for name in ["short", "medium", "tall"] {
        let c = Config::preset(name).unwrap();
        let (_, report) = run(&c, 1);
        assert_eq!(report.windows.len(), c.plan(1).small_set_count(), "{name}");
        assert!(report.windows.windows(2).all(|w| w[0].end_row <= w[1].start_row));
        assert!(report.windows.iter().all(|w| w.cycles == 20));
    }
}

#[test]
fn noiseless_fits_match_the_model_state() {
    let c = Config::preset("short").unwrap();
    for seed in 0..3 {
        let (sim, report) = run(&c, seed);
        for w in &report.windows {
            for g in Gauge::BOTH {
                let i = g.index();
                let (a, b) = (sim.truth[w.start_row][i], sim.truth[w.end_row - 1][i]);
                if a.k != b.k {
                    continue;
                }
                let fit = w.channels[i].fit.unwrap();
                assert!((fit.k - a.k).abs() <= 0.01 * a.k.abs() + 1e-9, "seed {seed} window {} {g:?}", w.id);
                let ru = w.channels[i].r_unstrained.unwrap();
                assert!((ru / a.r_unstrained - 1.0).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn initial_orientation_changes_only_the_compression_gauge() {
    let c = Config::preset("short").unwrap();
    let (_, report) = run(&c, 4);
    let tension = window_k(&report, Gauge::Two, Orientation::Initial);
    assert!(tension.iter().all(|&k| k == tension[0]));
    let compression = window_k(&report, Gauge::One, Orientation::Initial);
    assert!(compression.windows(2).all(|w| w[1] >= w[0]));
    assert!(compression.last().unwrap() > &compression[0]);
}

#[test]
fn flipped_tension_gauge_rises_then_falls() {
    let c = Config::preset("short").unwrap();
    for seed in 0..3 {
        let (_, report) = run(&c, seed);
        let k = window_k(&report, Gauge::One, Orientation::Flipped);
        let peak = k.iter().cloned().enumerate().fold((0, f64::MIN), |a, (i, v)| if v > a.1 { (i, v) } else { a });
        assert!(peak.0 > 0 && peak.0 + 1 < k.len(), "seed {seed}: {k:?}");
        assert!(k[..=peak.0].windows(2).all(|w| w[1] >= w[0]));
        assert!(k[peak.0..].windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn breakin_curves_follow_the_force_ceiling() {
    let c = Config::preset("short").unwrap();
    let (_, report) = run(&c, 2);
    assert_eq!(report.curves.len(), 4);
    for curve in &report.curves {
        assert!(curve.points.windows(2).all(|w| w[1].max_breakin_strain > w[0].max_breakin_strain));
        assert_eq!(curve.points.last().unwrap().max_force, 62.0);
    }
}

#[test]
fn voltage_only_record_gives_the_same_fits() {
    let c = Config::preset("short").unwrap();
    let (sim, report) = run(&c, 6);
    let mut rows = sim.record.rows.clone();
    for r in &mut rows {
        r.resistance = [f64::NAN; 2];
    }
    let bare = TimeSeriesRecord { rows, metadata: sim.record.metadata.clone() };
    let again = analyze(&bare, &c.geometry, &c.materials, &c.analysis_options()).unwrap();
    assert_eq!(again.windows.len(), report.windows.len());
    for (a, b) in again.windows.iter().zip(&report.windows) {
        for g in 0..2 {
            let (ka, kb) = (a.channels[g].fit.unwrap().k, b.channels[g].fit.unwrap().k);
            assert!((ka - kb).abs() <= 1e-4 * kb.abs().max(1.0), "{ka} {kb}");
        }
    }
}

#[test]
fn record_without_metadata_is_read_as_one_orientation() {
    let mut c = Config::preset("short").unwrap();
    c.orientations = vec![Orientation::Initial];
    let (sim, report) = run(&c, 2);
    let bare = TimeSeriesRecord { rows: sim.record.rows.clone(), metadata: None };
    let again = analyze(&bare, &c.geometry, &c.materials, &c.analysis_options()).unwrap();
    assert_eq!(again.windows.len(), 7);
    assert_eq!(again.fits(Gauge::One), report.fits(Gauge::One));
}

#[test]
fn broken_insulating_gauge_is_reported_open() {
    let mut c = Config::preset("short").unwrap();
    c.orientations = vec![Orientation::Initial];
    c.gauge.matrix = Matrix::Insulating;
    c.gauge.strength.compressive_scale = 100e6;
    let (sim, report) = run(&c, 1);
    assert!(sim.final_states[0].open_circuit);
    assert_eq!(report.open_channels, vec![Gauge::One]);
    let statuses: Vec<ChannelStatus> = report.windows.iter().map(|w| w.channels[0].status).collect();
    assert!(statuses.iter().all(|s| *s == ChannelStatus::Open));
    assert!(report.windows.iter().all(|w| w.channels[1].status == ChannelStatus::Ok));
}

#[test]
fn drift_decorator_is_recovered() {
    let mut c = Config::preset("short").unwrap();
    c.waveform.breakin_sets.clear();
    c.decorator.drift_per_cycle = 1e-3;
    let (_, report) = run(&c, 0);
    for w in &report.windows {
        for ch in &w.channels {
            let d = -ch.metrics.unwrap().relative_drift;
            assert!((d / 1e-3 - 1.0).abs() < 0.05, "{d}");
        }
    }
}

#[test]
fn noiseless_linear_run_has_no_hysteresis_or_drift() {
    let c = Config::preset("medium").unwrap();
    let (sim, report) = run(&c, 0);
    for w in &report.windows {
        for ch in &w.channels {
            let i = ch.gauge.index();
            if sim.truth[w.start_row][i] != sim.truth[w.end_row - 1][i] {
                continue;
            }
            let m = ch.metrics.unwrap();
            assert!(m.hysteresis < 1e-6 && m.relative_drift.abs() < 1e-9, "{m:?}");
        }
    }
}

#[test]
fn relative_mode_ignores_a_deflection_offset() {
    let c = Config::preset("short").unwrap();
    let sim = run_experiment(&c.scenario(), &c.plan(9)).unwrap();
    let mut shifted = sim.record.clone();
    for r in &mut shifted.rows {
        r.deflection += 2e-4;
    }
    let opts = cfgauge_core::analysis::AnalysisOptions {
        strain_mode: StrainMode::Relative,
        ..c.analysis_options()
    };
    let a = analyze(&sim.record, &c.geometry, &c.materials, &opts).unwrap();
    let b = analyze(&shifted, &c.geometry, &c.materials, &opts).unwrap();
    for (wa, wb) in a.windows.iter().zip(&b.windows) {
        for g in 0..2 {
            let (ka, kb) = (wa.channels[g].fit.unwrap().k, wb.channels[g].fit.unwrap().k);
            assert!((ka - kb).abs() <= 1e-6 * ka.abs().max(1.0));
        }
    }
}

#[test]
fn report_serializes_to_json() {
    let c = Config::preset("tall").unwrap();
    let (_, report) = run(&c, 0);
    let text = serde_json::to_string(&report).unwrap();
    let back: AnalysisReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}
