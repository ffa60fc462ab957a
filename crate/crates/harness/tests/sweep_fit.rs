use bhs_core::algo::AlgorithmId;
use bhs_harness::fit::{fit_csv, fit_exponent};
use bhs_harness::sweep::{read_csv, sweep, write_csv, BhSpec, Grid, COLUMNS};
use bhs_harness::HarnessError;

#[test]
fn cp_under_block_bh() {
    let mut g = Grid::new(vec![AlgorithmId::Cp], vec![16, 64]);
    g.adversaries = vec!["block-bh".into()];
    let rows = sweep(&g);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.verdict == "correct" && r.error.is_empty()), "{rows:?}");
}

#[test]
fn empty_grid_writes_the_header_only() {
    let rows = sweep(&Grid::new(vec![], vec![16]));
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "algo,n,bh,adversary,seed,rounds,moves,verdict,error\n");
    assert_eq!(COLUMNS.join(","), "algo,n,bh,adversary,seed,rounds,moves,verdict,error");
}

#[test]
fn horizon_cells_and_error_cells_become_rows() {
    let mut g = Grid::new(vec![AlgorithmId::Cp], vec![32]);
    g.horizon = Some(5);
    g.adversaries = vec!["static".into(), "no-such-adversary".into()];
    let rows = sweep(&g);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].verdict, "horizon");
    assert_eq!(rows[0].rounds, Some(5));
    assert_eq!(rows[1].verdict, "error");
    assert!(!rows[1].error.is_empty() && rows[1].rounds.is_none());
}

#[test]
fn csv_round_trip() {
    let mut g = Grid::new(vec![AlgorithmId::Cp, AlgorithmId::Gl], vec![9, 12]);
    g.bhs = vec![BhSpec::Node(0), BhSpec::Frac { num: 3, den: 4 }];
    g.adversaries = vec!["cut".into(), "random:0.5".into(), "bogus".into()];
    g.seeds = vec![1, 2];
    let rows = sweep(&g);
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    assert!(read_csv(&b"n,algo\n1,cp\n"[..]).is_err());
}

#[test]
fn fit_examples() {
    let ns = [16.0, 64.0, 256.0];
    let sq: Vec<_> = ns.iter().map(|&n: &f64| (n, n * n)).collect();
    assert!((fit_exponent(&sq).unwrap().slope - 2.0).abs() < 1e-9);
    let th: Vec<_> = ns.iter().map(|&n: &f64| (n, n.powf(1.5))).collect();
    assert!((fit_exponent(&th).unwrap().slope - 1.5).abs() < 1e-9);
    assert!(matches!(fit_exponent(&sq[..2]), Err(HarnessError::InsufficientData { .. })));
    assert!(matches!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(HarnessError::NonPositiveValue { .. })));
}

#[test]
fn fit_over_a_sweep_csv() {
    let mut g = Grid::new(vec![AlgorithmId::Cp], vec![16, 32, 64, 128]);
    g.adversaries = vec!["cut".into()];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    write_csv(&sweep(&g), std::fs::File::create(&path).unwrap()).unwrap();
    let f = fit_csv(&path, "n", "rounds", &[("algo".into(), "cp".into())]).unwrap();
    assert_eq!(f.points, 4);
    assert!(f.slope > 1.0, "{f:?}");
    let none = fit_csv(&path, "n", "rounds", &[("algo".into(), "gl".into())]);
    assert!(matches!(none, Err(HarnessError::InsufficientData { .. })));
}

#[test]
#[ignore = "block-bh keeps the Leader's edge into the black hole missing, which leaves CDO with a linear worst case (slope about 1.0); its super-linear worst case comes from block-leader"]
fn cdo_block_bh_slope() {
    let mut g = Grid::new(vec![AlgorithmId::Cdo], vec![16, 64, 256, 1024]);
    g.adversaries = vec!["block-bh".into()];
    g.bhs = vec![BhSpec::Frac { num: 1, den: 4 }, BhSpec::Frac { num: 1, den: 2 }, BhSpec::Frac { num: 3, den: 4 }];
    g.worst = true;
    let rows = sweep(&g);
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.rounds.unwrap() as f64)).collect();
    let f = fit_exponent(&pts).unwrap();
    assert!((1.2..=1.8).contains(&f.slope), "{f:?}");
}
