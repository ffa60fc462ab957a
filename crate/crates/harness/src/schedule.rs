//! Scripted schedules, one `<round> <edge|->` line per round, and the elect
//! sidecar, one `<round> <choice>...` line per round with group orderings.
//!
//! Blank lines and lines starting with `#` are ignored. Rounds must appear in
//! increasing order; a round left out has no missing edge (or default
//! orderings).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bhs_core::adversary::Schedule;
use bhs_core::ring::EdgeId;

use crate::error::{HarnessError, Result};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
}

fn bad(line: usize, reason: impl Into<String>) -> HarnessError {
    HarnessError::MalformedSchedule { line, reason: reason.into() }
}

fn round_of(line: usize, tok: &str, next: usize) -> Result<usize> {
    let r: usize = tok.parse().map_err(|_| bad(line, format!("bad round index {tok:?}")))?;
    if r < next {
        return Err(bad(line, format!("round {r} out of order")));
    }
    Ok(r)
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut out: Vec<Option<EdgeId>> = Vec::new();
    for (line, toks) in lines(text) {
        let [round, edge] = toks[..] else { return Err(bad(line, "expected `<round> <edge|->`")) };
        let r = round_of(line, round, out.len())?;
        let e = match edge {
            "-" => None,
            e => Some(EdgeId(e.parse().map_err(|_| bad(line, format!("bad edge {e:?}")))?)),
        };
        out.resize(r, None);
        out.push(e);
    }
    Ok(Schedule(out))
}

pub fn write_schedule(s: &Schedule) -> String {
    let mut out = String::new();
    for (r, e) in s.0.iter().enumerate() {
        match e {
            Some(e) => writeln!(out, "{r} {}", e.0),
            None => writeln!(out, "{r} -"),
        }
        .expect("writing to a string");
    }
    out
}

pub fn parse_elect(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (line, toks) in lines(text) {
        let r = round_of(line, toks[0], out.len())?;
        let choices = toks[1..]
            .iter()
            .map(|t| t.parse().map_err(|_| bad(line, format!("bad choice {t:?}"))))
            .collect::<Result<Vec<usize>>>()?;
        out.resize(r, Vec::new());
        out.push(choices);
    }
    Ok(out)
}

/// Only rounds with at least one choice are written.
pub fn write_elect(elect: &[Vec<usize>]) -> String {
    let mut out = String::new();
    for (r, c) in elect.iter().enumerate().filter(|(_, c)| !c.is_empty()) {
        out.push_str(&r.to_string());
        for x in c {
            write!(out, " {x}").expect("writing to a string");
        }
        out.push('\n');
    }
    out
}

/// Where the elect sidecar of a schedule file lives.
pub fn elect_path(schedule: &Path) -> PathBuf {
    let mut p = schedule.as_os_str().to_owned();
    p.push(".elect");
    PathBuf::from(p)
}

/// Load a schedule and, if present, its elect sidecar.
pub fn load(path: &Path) -> Result<(Schedule, Vec<Vec<usize>>)> {
    let sched = parse_schedule(&std::fs::read_to_string(path)?)?;
    let side = elect_path(path);
    let elect = if side.exists() { parse_elect(&std::fs::read_to_string(side)?)? } else { Vec::new() };
    Ok((sched, elect))
}

/// Write a schedule, plus its sidecar when any round has choices.
pub fn save(path: &Path, sched: &Schedule, elect: &[Vec<usize>]) -> Result<()> {
    std::fs::write(path, write_schedule(sched))?;
    if elect.iter().any(|c| !c.is_empty()) {
        std::fs::write(elect_path(path), write_elect(elect))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps_and_comments() {
        let s = parse_schedule("# demo\n0 3\n\n2 -\n4 1\n").unwrap();
        assert_eq!(s.0, vec![Some(EdgeId(3)), None, None, None, Some(EdgeId(1))]);
        assert_eq!(parse_schedule(&write_schedule(&s)).unwrap(), s);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(parse_schedule("0 x"), Err(HarnessError::MalformedSchedule { line: 1, .. })));
        assert!(parse_schedule("3 1\n1 2").is_err());
        assert!(parse_schedule("0").is_err());
        assert!(parse_elect("1 a").is_err());
    }

    #[test]
    fn elect_round_trip() {
        let e = vec![vec![], vec![1, 0], vec![], vec![5]];
        assert_eq!(write_elect(&e), "1 1 0\n3 5\n");
        assert_eq!(parse_elect(&write_elect(&e)).unwrap(), e);
    }
}
