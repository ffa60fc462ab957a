//! Space-time diagrams: nodes left to right, rounds top to bottom.
//!
//! Row 0 holds the start positions and row `r + 1` the positions after round
//! `r`. A missing edge is a red tick on the column boundary it joins, spanning
//! the round in which it is missing; the wrap-around edge is drawn on both
//! outer borders.

use std::fmt::Write as _;

use crate::trace::{Event, Trace};

pub const CELL: i64 = 24;
pub const ROW: i64 = 12;
const LEFT: i64 = 40;
const TOP: i64 = 30;
const BOTTOM: i64 = 20;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Centre of node column `v`.
pub fn x(v: u32) -> i64 {
    LEFT + v as i64 * CELL + CELL / 2
}

/// Left boundary of node column `v`.
fn boundary(v: u32) -> i64 {
    LEFT + v as i64 * CELL
}

pub fn y(row: u32) -> i64 {
    TOP + row as i64 * ROW
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mark {
    Death,
    Termination,
}

/// `(node, row)` points of an agent's life line and the row-end marker,
/// if any. The line stops at death.
pub fn agent_points(trace: &Trace, agent: usize) -> (Vec<(u32, u32)>, Vec<(Mark, u32, u32)>) {
    let mut pts = vec![(trace.report.placements[agent], 0)];
    let mut marks = Vec::new();
    for (r, rec) in trace.rounds.iter().enumerate() {
        let Some(a) = rec.agents.iter().find(|a| a.id == agent) else { continue };
        let row = r as u32 + 1;
        pts.push((a.node, row));
        for e in &rec.events {
            match *e {
                Event::Death { agent: d } if d == agent => marks.push((Mark::Death, a.node, row)),
                Event::Termination { agent: t } if t == agent => marks.push((Mark::Termination, a.node, row)),
                _ => {}
            }
        }
        if !a.alive {
            break;
        }
    }
    (pts, marks)
}

/// Path data for `pts`, starting a new subpath where the agent crosses the
/// wrap-around edge.
fn path_data(pts: &[(u32, u32)]) -> String {
    let mut d = String::new();
    for (i, &(v, r)) in pts.iter().enumerate() {
        let jump = i == 0 || pts[i - 1].0.abs_diff(v) > 1;
        let cmd = if jump { 'M' } else { 'L' };
        if !d.is_empty() {
            d.push(' ');
        }
        write!(d, "{cmd}{} {}", x(v), y(r)).expect("writing to a string");
    }
    d
}

pub fn render_diagram(trace: &Trace) -> String {
    let rep = &trace.report;
    let n = rep.n;
    let rows = trace.rounds.len() as u32;
    let width = boundary(n) + LEFT;
    let height = y(rows) + BOTTOM;
    let mut s = String::new();
    let mut w = |line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">"#
    ));
    w(format!(
        "<title>{} n={} bh={} adversary={} verdict={}</title>",
        rep.algo, n, rep.bh, escape(&rep.adversary), rep.verdict
    ));
    w(format!(
        r##"<rect class="bh" x="{}" y="{}" width="{CELL}" height="{}" fill="#dddddd"/>"##,
        boundary(rep.bh),
        y(0),
        y(rows) - y(0)
    ));
    w(r#"<g class="nodes" text-anchor="middle">"#.into());
    for v in 0..n {
        w(format!(r#"<text x="{}" y="{}">{v}</text>"#, x(v), TOP - 12));
    }
    w("</g>".into());
    w(r#"<g class="missing" stroke="red" stroke-width="2">"#.into());
    for (r, rec) in trace.rounds.iter().enumerate() {
        let Some(e) = rec.missing else { continue };
        let (y0, y1) = (y(r as u32), y(r as u32 + 1));
        let xs = if e + 1 == n { vec![boundary(0), boundary(n)] } else { vec![boundary(e + 1)] };
        for xb in xs {
            w(format!(r#"<line x1="{xb}" y1="{y0}" x2="{xb}" y2="{y1}"/>"#));
        }
    }
    w("</g>".into());
    w(r#"<g class="agents" fill="none" stroke-width="2">"#.into());
    let mut all_marks = Vec::new();
    for agent in 0..rep.placements.len() {
        let (pts, marks) = agent_points(trace, agent);
        let color = COLORS[agent % COLORS.len()];
        w(format!(r#"<path class="agent" data-agent="{agent}" stroke="{color}" d="{}"/>"#, path_data(&pts)));
        all_marks.extend(marks.into_iter().map(|m| (agent, m)));
    }
    w("</g>".into());
    w(r#"<g class="events">"#.into());
    for (agent, (mark, v, r)) in all_marks {
        let (cx, cy) = (x(v), y(r));
        match mark {
            Mark::Death => w(format!(
                r#"<path class="death" data-agent="{agent}" stroke="black" stroke-width="2" d="M{} {} L{} {} M{} {} L{} {}"/>"#,
                cx - 4, cy - 4, cx + 4, cy + 4, cx - 4, cy + 4, cx + 4, cy - 4
            )),
            Mark::Termination => w(format!(
                r#"<rect class="termination" data-agent="{agent}" x="{}" y="{}" width="8" height="8" fill="{}"/>"#,
                cx - 4,
                cy - 4,
                COLORS[agent % COLORS.len()]
            )),
        }
    }
    w("</g>".into());
    w("</svg>".into());
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
