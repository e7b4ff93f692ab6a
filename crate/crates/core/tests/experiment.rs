use pasha::benchgen::{self, generate, CurveModel};
use pasha::experiment::{
    aggregate, emit_report, read_runs, run_cells, run_experiment, write_runs, BenchmarkSource, ExperimentSpec,
    MethodSpec, ReportFormat,
};
use pasha::simulator::{simulate, CurveRow, LearningCurveTable};
use pasha::{Direction, RankingCriterion, ResourceSpec, SchedulerConfig, SchedulerMode};

fn method(name: &str, mode: SchedulerMode) -> MethodSpec {
    MethodSpec::new(
        name,
        SchedulerConfig::new(ResourceSpec::new(1, 3, 27).unwrap(), mode, 64, 0)
            .with_criterion(RankingCriterion::Soft { epsilon: 0.025 }),
    )
}

fn generated(seeds: Vec<u64>) -> BenchmarkSource {
    BenchmarkSource::Generated {
        n_configs: 64,
        units: 27,
        model: CurveModel { crossing_horizon: 3, ..CurveModel::default() },
        seeds,
    }
}

#[test]
fn single_cell_report_is_that_run() {
    let spec = ExperimentSpec {
        benchmark: generated(vec![4]),
        methods: vec![method("pasha", SchedulerMode::Pasha)],
        workers: 4,
        scheduler_seeds: vec![9],
    };
    let report = run_experiment(&spec).unwrap();
    let table = generate(64, 27, &CurveModel { crossing_horizon: 3, ..CurveModel::default() }, 4).unwrap();
    let sim = simulate(&spec.methods[0].config.clone().with_seed(9), &table, 4).unwrap();
    let m = &report.methods[0];
    assert_eq!(m.runs, 1);
    assert_eq!(m.metric_mean, sim.chosen_metric_full);
    assert_eq!(m.runtime_mean, sim.wall_clock);
    assert_eq!(m.max_resources_mean, sim.max_resources as f64);
    assert_eq!((m.metric_std, m.runtime_std, m.max_resources_std), (0.0, 0.0, 0.0));
    assert_eq!(m.speedup, 1.0);
}

fn protocol() -> ExperimentSpec {
    ExperimentSpec {
        benchmark: generated(vec![0, 1, 2]),
        methods: vec![
            method("asha", SchedulerMode::Asha),
            method("pasha", SchedulerMode::Pasha),
            method("one-epoch", SchedulerMode::OneEpoch),
            method("random", SchedulerMode::Random),
        ],
        workers: 4,
        scheduler_seeds: vec![0, 1, 2, 3, 4],
    }
}

#[test]
fn five_by_three_repetitions_give_a_table_per_method() {
    let report = run_experiment(&protocol()).unwrap();
    assert_eq!(report.reference, "asha");
    assert_eq!(report.runs.len(), 60);
    assert!(report.methods.iter().all(|m| m.runs == 15));
    assert_eq!(report.methods[0].speedup, 1.0);
    let md = emit_report(&report, ReportFormat::Markdown).unwrap();
    assert_eq!(md.lines().count(), 6);
    assert!(md.starts_with("| Method | Accuracy | Runtime | Speedup factor | Max resources |\n"));
    assert!(md.contains("| random | ") && md.contains(" | -- | 0.0 ± 0.0 |"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = run_experiment(&protocol()).unwrap();
    let b = run_experiment(&protocol()).unwrap();
    for format in [ReportFormat::Markdown, ReportFormat::Csv] {
        assert_eq!(emit_report(&a, format).unwrap(), emit_report(&b, format).unwrap());
    }
}

#[test]
fn aggregation_matches_an_independent_recomputation_from_raw_runs() {
    let report = run_experiment(&protocol()).unwrap();
    let mut buf = Vec::new();
    write_runs(&report.runs, &mut buf).unwrap();

    // independent fold over the raw csv, without the library's types
    let mut rdr = csv::Reader::from_reader(&buf[..]);
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (mi, ri, xi) = (col("metric"), col("runtime_seconds"), col("max_resources"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let asha_runtime: Vec<f64> = rows.iter().filter(|r| &r[0] == "asha").map(|r| r[ri].parse().unwrap()).collect();
    let asha_mean = asha_runtime.iter().sum::<f64>() / asha_runtime.len() as f64;
    for m in &report.methods {
        let mine: Vec<&csv::StringRecord> = rows.iter().filter(|r| r[0] == *m.method).collect();
        let values = |i: usize| mine.iter().map(|r| r[i].parse::<f64>().unwrap()).collect::<Vec<_>>();
        let stats = |v: Vec<f64>| {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let sd = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
            (mean, sd)
        };
        let (metric, metric_sd) = stats(values(mi));
        let (runtime, runtime_sd) = stats(values(ri));
        let (max, max_sd) = stats(values(xi));
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        assert!(close(m.metric_mean, metric) && close(m.metric_std, metric_sd), "{}", m.method);
        assert!(close(m.runtime_mean, runtime) && close(m.runtime_std, runtime_sd), "{}", m.method);
        assert!(close(m.max_resources_mean, max) && close(m.max_resources_std, max_sd), "{}", m.method);
        if runtime > 0.0 {
            assert!(close(m.speedup, asha_mean / runtime), "{}", m.method);
        }
    }

    // the report verb's path: csv back to records, then aggregate again
    let again = aggregate(read_runs(&buf[..]).unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn output_format_never_changes_numbers() {
    let report = run_experiment(&protocol()).unwrap();
    let csv_text = emit_report(&report, ReportFormat::Csv).unwrap();
    let md = emit_report(&report, ReportFormat::Markdown).unwrap();
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    for (row, m) in rdr.records().map(Result::unwrap).zip(&report.methods) {
        let mean: f64 = row[2].parse().unwrap();
        assert_eq!(mean, m.metric_mean);
        assert!(md.contains(&format!("| {} | {:.4} ± ", m.method, mean)));
        assert_eq!(
            &row[6],
            if m.runtime_mean >= 360.0 {
                format!("{:.1}h ± {:.1}h", m.runtime_mean / 3600.0, m.runtime_std / 3600.0)
            } else {
                format!("{:.1}s ± {:.1}s", m.runtime_mean, m.runtime_std)
            }
        );
    }
}

#[test]
fn cells_come_back_in_method_then_seed_order() {
    let cells = run_cells(&protocol()).unwrap();
    let keys: Vec<(String, u64, u64)> =
        cells.iter().map(|c| (c.record.method.clone(), c.record.benchmark_seed, c.record.scheduler_seed)).collect();
    let names = ["asha", "pasha", "one-epoch", "random"];
    let mut expected = Vec::new();
    for n in names {
        for b in 0..3 {
            for s in 0..5 {
                expected.push((n.to_owned(), b, s));
            }
        }
    }
    assert_eq!(keys, expected);
}

#[test]
fn multi_file_benchmarks_impute_missing_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let model = CurveModel { crossing_horizon: 3, ..CurveModel::default() };
    let mut paths = Vec::new();
    for seed in 0..3u64 {
        let table = generate(64, 27, &model, seed).unwrap();
        let table = if seed == 1 {
            let rows: Vec<CurveRow> = table.rows().iter().filter(|r| r.candidate != 10).cloned().collect();
            LearningCurveTable::new("epoch", "accuracy", Direction::Maximize, rows).unwrap()
        } else {
            table
        };
        let path = dir.path().join(format!("bench-{seed}.tsv"));
        benchgen::save(&table, &path).unwrap();
        paths.push(path);
    }
    let tables = BenchmarkSource::Files(paths.clone()).resolve().unwrap();
    assert!(tables.iter().all(|(_, t)| t.len() == 64));
    let spec = ExperimentSpec {
        benchmark: BenchmarkSource::Files(paths),
        methods: vec![method("asha", SchedulerMode::Asha)],
        workers: 2,
        scheduler_seeds: vec![0],
    };
    assert_eq!(run_experiment(&spec).unwrap().runs.len(), 3);
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.tsv");
    let table =
        generate(32, 9, &CurveModel { noise_std: 0.01, allow_observed_crossings: true, ..CurveModel::default() }, 1)
            .unwrap();
    benchgen::save(&table, &path).unwrap();
    assert_eq!(benchgen::load(&path).unwrap(), table);
    assert!(benchgen::load(dir.path().join("missing.tsv")).is_err());
}
