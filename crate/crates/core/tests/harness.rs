use posterior_lab::harness::{
    ingest_dataset, read_trajectory_csv, run_replications, run_trajectory, write_record, write_summary, ModelKind,
    RunConfig, Summary, TruthSpec,
};

#[test]
fn twenty_seed_excursion_frequency_is_a_fraction() {
    let mut c = RunConfig::new(TruthSpec::Uniform, ModelKind::Barron, 200);
    c.seeds = (1..=20).collect();
    let rep = run_replications(&c, 4).unwrap();
    assert_eq!(rep.records.len(), 20);
    let e = rep
        .summary
        .excursions
        .iter()
        .find(|e| e.statistic == "gamma_stat@ln2" && e.delta == 0.9)
        .unwrap();
    assert!((0.0..=1.0).contains(&e.frequency));
    assert_eq!(e.frequency, e.seeds_with_excursion as f64 / 20.0);
}

#[test]
fn three_seeds_three_files_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::new(TruthSpec::GaussExp { theta: 0.2 }, ModelKind::Barron, 60);
    c.seeds = vec![7, 8, 9];
    let rep = run_replications(&c, 3).unwrap();
    for r in &rep.records {
        let (csv, _) = write_record(dir.path(), "t", r).unwrap();
        assert_eq!(read_trajectory_csv(&csv).unwrap().grid, r.table.grid);
    }
    let path = dir.path().join("summary.json");
    write_summary(&path, &rep.summary).unwrap();
    let back: Summary = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, rep.summary);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 7);
}

#[test]
fn dataset_truth_runs_over_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    let xs: Vec<String> = (1..=40).map(|i| format!("{}", (i as f64 * 0.618034).fract())).collect();
    std::fs::write(&path, format!("x\n{}\n", xs.join("\n"))).unwrap();
    assert_eq!(ingest_dataset(&path).unwrap().len(), 40);

    let c = RunConfig::new(TruthSpec::File { path: path.clone() }, ModelKind::Barron, 40);
    let r = run_trajectory(&c, 1).unwrap();
    assert_eq!(*r.table.grid.last().unwrap(), 40);
    // the seed does not touch file data
    assert_eq!(r.table.rows, run_trajectory(&c, 2).unwrap().table.rows);

    let mut long = c.clone();
    long.n_max = 41;
    assert!(run_trajectory(&long, 1).is_err());
}

#[test]
fn cosine_replications_match_across_jobs() {
    let mut c = RunConfig::new(TruthSpec::Uniform, ModelKind::Cosine, 40);
    c.seeds = vec![1, 2];
    let a = run_replications(&c, 1).unwrap();
    let b = run_replications(&c, 2).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(
        serde_json::to_string(&a.summary).unwrap(),
        serde_json::to_string(&b.summary).unwrap()
    );
}
