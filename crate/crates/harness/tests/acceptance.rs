//! End-to-end acceptance run. Prints one line per criterion and fails if any
//! criterion fails. Run with `--release`-level optimisation (the test profile
//! already uses it); the exhaustive checks take several minutes.

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use bhs_core::adversary::{enumerate_choices, Adversary, Strategy, StrategyAdversary};
use bhs_core::algo::{validate_setting, Algo, AlgorithmId, Setting};
use bhs_core::checker::{check_matrix, CheckConfig, HorizonRule, MatrixReport, Outcome, DEFAULT_MEMO_CAP};
use bhs_core::comm::CommKind;
use bhs_core::ring::{validate_presence, EdgeId, RoundPresence};
use bhs_core::sim::{default_comm, finished, run, setup, step, StopRule, Verdict};
use bhs_core::world::WorldState;
use bhs_core::Error;
use bhs_harness::fit::fit_exponent;
use bhs_harness::runner::{execute, RunConfig};
use bhs_harness::sweep::{sweep, BhSpec, Grid};
use bhs_harness::HarnessError;

type Check = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Check>);

fn report_line(no: u32, name: &str, res: &Check, secs: f64) {
    let (tag, detail) = match res {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    // Written straight to the handle so that it shows without --nocapture.
    let _ = writeln!(std::io::stderr(), "criterion {no} [{tag}] {name}: {detail} ({secs:.1}s)");
}

fn matrix(id: AlgorithmId, ns: &[u32]) -> MatrixReport {
    check_matrix(|n| Algo::new(id, n), ns, HorizonRule::Default, DEFAULT_MEMO_CAP)
}

fn all_pass(r: &MatrixReport) -> Check {
    let worst: Vec<String> = r.worst_by_n().iter().map(|(n, w)| format!("n={n}:{w}")).collect();
    let summary = format!("{}/{} cells pass, worst rounds {}", r.passed(), r.cells.len(), worst.join(" "));
    if r.all_pass() && !r.cells.is_empty() {
        Ok(summary)
    } else {
        let bad: Vec<String> = r
            .cells
            .iter()
            .filter(|c| !c.result.as_ref().is_ok_and(|v| v.outcome.is_pass()))
            .map(|c| {
                let what = match &c.result {
                    Ok(v) => v.outcome.name().to_string(),
                    Err(e) => e.to_string(),
                };
                format!("n={} bh={} starts={:?} {what}", c.cell.algo.n, c.cell.bh, c.cell.starts)
            })
            .collect();
        Err(format!("{summary}; failing: {}", bad.join("; ")))
    }
}

fn two_agents() -> Check {
    let r = check_matrix(Algo::two_agent_cp, &[5], HorizonRule::Default, DEFAULT_MEMO_CAP);
    let names: Vec<String> =
        r.cells.iter().map(|c| format!("bh={}:{}", c.cell.bh, c.result.as_ref().map_or("error", |v| v.outcome.name()))).collect();
    let ok = r.cells.len() == 4 && r.cells.iter().all(|c| matches!(&c.result, Ok(v) if !v.outcome.is_pass()));
    if ok { Ok(names.join(" ")) } else { Err(names.join(" ")) }
}

fn scaling() -> Check {
    let ns = vec![16, 64, 256, 1024];
    let quarters = [1, 2, 3].map(|num| BhSpec::Frac { num, den: 4 }).to_vec();
    let mut lines = Vec::new();
    let mut ok = true;
    for (id, lo, hi) in [(AlgorithmId::Cp, 1.7, 2.3), (AlgorithmId::Cdo, 1.2, 1.8), (AlgorithmId::Gl, 1.7, 2.3)] {
        let mut g = Grid::new(vec![id], ns.clone());
        g.bhs = quarters.clone();
        g.adversaries = Strategy::builtin().iter().map(|s| s.descriptor()).collect();
        g.worst = true;
        let rows = sweep(&g);
        if rows.iter().any(|r| r.verdict != "correct") {
            ok = false;
            lines.push(format!("{}: a worst-case row is not correct", id.name()));
            continue;
        }
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.rounds.unwrap_or(0) as f64)).collect();
        match fit_exponent(&pts) {
            Ok(f) => {
                let good = (lo..=hi).contains(&f.slope) && f.residual < 0.5;
                ok &= good;
                lines.push(format!("{} slope {:.3} residual {:.3} in [{lo},{hi}]", id.name(), f.slope, f.residual));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("{}: {e}", id.name()));
            }
        }
    }
    if ok { Ok(lines.join(", ")) } else { Err(lines.join(", ")) }
}

fn static_sanity() -> Check {
    let first = |id, n, bh| -> Result<u32, String> {
        let mut cfg = RunConfig::new(id, n, bh);
        cfg.horizon = Some(100_000);
        let r = execute(&cfg, None).map_err(|e| e.to_string())?;
        match (r.verdict.as_str(), r.termination_round) {
            ("correct", Some(t)) => Ok(t),
            _ => Err(format!("{} verdict {}", id.name(), r.verdict)),
        }
    };
    let cp = first(AlgorithmId::Cp, 100, 50)?;
    let cdo = first(AlgorithmId::Cdo, 100, 10)?;
    let msg = format!("cp n=100 bh=50 in {cp} rounds (<= 160), cdo n=100 bh=10 in {cdo} rounds (<= 60)");
    if cp <= 160 && cdo <= 60 { Ok(msg) } else { Err(msg) }
}

fn determinism_and_replay() -> Check {
    let mut traces = 0;
    for (id, adv) in [(AlgorithmId::Cp, "random:0.5"), (AlgorithmId::Cdo, "random:0.3"), (AlgorithmId::Gl, "random:0.4")] {
        for seed in 0..5 {
            let once = || -> Result<Vec<u8>, HarnessError> {
                let mut cfg = RunConfig::new(id, 20, 7);
                cfg.seed = seed;
                let cfg = cfg.with_adversary(adv)?;
                let mut buf = Vec::new();
                execute(&cfg, Some(&mut buf))?;
                Ok(buf)
            };
            let (a, b) = (once().map_err(|e| e.to_string())?, once().map_err(|e| e.to_string())?);
            if a != b {
                return Err(format!("{} seed {seed}: traces differ", id.name()));
            }
            traces += 1;
        }
    }
    // Counterexamples: the two-agent team at n=5 and a horizon-limited check.
    let mut replays = 0;
    let cases = [(Algo::two_agent_cp(5), 2, None), (Algo::two_agent_cp(5), 3, None), (Algo::new(AlgorithmId::Cp, 5), 3, Some(20))];
    for (algo, bh, horizon) in cases {
        let mut cfg = CheckConfig::for_algo(&algo);
        if let Some(h) = horizon {
            cfg.horizon = h;
        }
        let v = bhs_core::checker::model_check(&algo, bh, &[0], default_comm(&algo), &cfg).map_err(|e| e.to_string())?;
        let (Outcome::Fail(cx) | Outcome::HorizonExceeded(cx)) = v.outcome else {
            return Err(format!("n=5 bh={bh}: expected a counterexample"));
        };
        let world = setup(&algo, bh, &[0], default_comm(&algo)).map_err(|e| e.to_string())?;
        let mut adv = StrategyAdversary::new(Strategy::Scripted(cx.schedule.clone()));
        let out = run(&algo, world, &mut adv, cx.round as u64, StopRule::FirstTermination, &|r| cx.elect_at(r), |_, _| {})
            .map_err(|e| e.to_string())?;
        if out.verdict == Verdict::Correct || out.world.round != cx.round {
            return Err(format!("bh={bh}: replay ended at round {} with {:?}", out.world.round, out.verdict));
        }
        replays += 1;
    }
    Ok(format!("{traces} seeded runs byte-identical, {replays} counterexamples replayed to their violation round"))
}

fn successors(algo: &Algo, w: &WorldState, choices: &[Option<EdgeId>]) -> HashSet<WorldState> {
    choices
        .iter()
        .map(|&c| {
            let mut next = w.clone();
            step(algo, &mut next, c.map_or(RoundPresence::ALL, RoundPresence::missing), &[]).unwrap();
            next
        })
        .collect()
}

fn pruning() -> Check {
    let mut worlds = 0;
    for id in [AlgorithmId::Cp, AlgorithmId::Cdo, AlgorithmId::Gl] {
        for n in 4..=6u32 {
            let algo = Algo::new(id, n);
            for bh in 0..n {
                let starts: Vec<u32> = if id.colocated() {
                    if bh == 0 {
                        continue;
                    }
                    vec![0]
                } else {
                    (1..=3).map(|k| (bh + k) % n).collect()
                };
                for seed in 0..4 {
                    let mut w = setup(&algo, bh, &starts, default_comm(&algo)).unwrap();
                    let mut adv = StrategyAdversary::new(Strategy::RandomSeeded { p: 0.5, seed });
                    loop {
                        let pruned = enumerate_choices(&w);
                        for c in &pruned {
                            validate_presence(&w.spec, &c.map_or(RoundPresence::ALL, RoundPresence::missing))
                                .map_err(|e| e.to_string())?;
                        }
                        let raw: Vec<_> = std::iter::once(None).chain((0..n).map(|e| Some(EdgeId(e)))).collect();
                        if successors(&algo, &w, &pruned) != successors(&algo, &w, &raw) {
                            return Err(format!("{} n={n} bh={bh} round {}: pruned successors differ", id.name(), w.round));
                        }
                        worlds += 1;
                        if finished(&algo, &w) || w.round >= 80 {
                            break;
                        }
                        let p = adv.decide(&w).map_or(RoundPresence::ALL, RoundPresence::missing);
                        step(&algo, &mut w, p, &[]).unwrap();
                    }
                }
            }
        }
    }
    Ok(format!("{worlds} reachable worlds, pruned successors equal raw successors"))
}

fn infeasible_gate() -> Check {
    let regions = [
        Setting { comm: CommKind::Vision, colocated: false, anonymous: false },
        Setting { comm: CommKind::F2F, colocated: false, anonymous: true },
        Setting { comm: CommKind::Vision, colocated: true, anonymous: true },
        Setting { comm: CommKind::F2F, colocated: true, anonymous: true },
    ];
    for s in regions {
        if !matches!(validate_setting(&s), Err(Error::InfeasibleSetting { .. })) {
            return Err(format!("{s:?} accepted"));
        }
    }
    for comm in [CommKind::Vision, CommKind::F2F] {
        let cfg = RunConfig { comm: Some(comm), ..RunConfig::new(AlgorithmId::Gl, 9, 3) };
        if !matches!(execute(&cfg, None), Err(HarnessError::Core(Error::InfeasibleSetting { .. }))) {
            return Err(format!("gl under {} not rejected", comm.name()));
        }
    }
    Ok("scattered and colocated-anonymous endogenous settings rejected".into())
}

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        ("exhaustive CP n=4..6", Box::new(|| all_pass(&matrix(AlgorithmId::Cp, &[4, 5, 6])))),
        ("exhaustive CDO n=4..6", Box::new(|| all_pass(&matrix(AlgorithmId::Cdo, &[4, 5, 6])))),
        ("exhaustive GL n=4,5", Box::new(|| all_pass(&matrix(AlgorithmId::Gl, &[4, 5])))),
        ("two-agent CP n=5 never passes", Box::new(two_agents)),
        ("scaling slopes", Box::new(scaling)),
        ("static-ring sanity", Box::new(static_sanity)),
        ("determinism and replay", Box::new(determinism_and_replay)),
        ("pruning soundness", Box::new(pruning)),
        ("infeasible-setting gate", Box::new(infeasible_gate)),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        report_line(i as u32 + 1, name, &res, t.elapsed().as_secs_f64());
        if res.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
