//! CSV tables and SVG plots.

use std::fmt::Write as _;
use std::io::Write;

use serde_json::Value;

use crate::chains::{Chain, Refinement};
use crate::error::Result;
use crate::folding::FoldingCertificate;
use crate::invlim::{Arc, PPoint};
use crate::isotopy::{isotopy_eval, DisplacementMap};
use crate::num::Scalar;
use crate::tentmap::{Nonrecurrence, OmegaSet, TentMap};

/// One line of a suite report.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRow {
    pub check: String,
    pub params: Value,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl SuiteRow {
    pub fn new(
        check: impl Into<String>,
        params: Value,
        value: f64,
        bound: f64,
        pass: bool,
    ) -> Self {
        SuiteRow {
            check: check.into(),
            params,
            value,
            bound,
            pass,
        }
    }
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// `j, lo, hi, lo_closed, hi_closed` with links numbered from 1.
pub fn write_chain_csv<S: Scalar, W: Write>(out: W, chain: &Chain<S>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j", "lo", "hi", "lo_closed", "hi_closed"])?;
    for (j, l) in chain.links().iter().enumerate() {
        w.write_record([
            (j + 1).to_string(),
            l.lo.to_string(),
            l.hi.to_string(),
            l.lo_closed.to_string(),
            l.hi_closed.to_string(),
        ])?;
    }
    finish(w)
}

/// `fine_j, coarse_j`, 1-based; `coarse_j` is empty where no link was certified.
pub fn write_witness_csv<W: Write>(out: W, refinement: &Refinement) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["fine_j", "coarse_j"])?;
    for (j, c) in refinement.witness.iter().enumerate() {
        w.write_record([
            (j + 1).to_string(),
            c.map(|c| (c + 1).to_string()).unwrap_or_default(),
        ])?;
    }
    finish(w)
}

pub fn write_folding_csv<S: Scalar, W: Write>(
    out: W,
    certs: &[FoldingCertificate<S>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["point_repr", "depth", "max_gap", "member"])?;
    for c in certs {
        w.write_record([
            c.point.to_string(),
            c.depth.to_string(),
            c.max_gap.to_string(),
            c.member.to_string(),
        ])?;
    }
    finish(w)
}

pub fn write_suite_csv<W: Write>(out: W, rows: &[SuiteRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "param_json", "value", "bound", "pass"])?;
    for r in rows {
        w.write_record([
            r.check.clone(),
            r.params.to_string(),
            r.value.to_string(),
            r.bound.to_string(),
            r.pass.to_string(),
        ])?;
    }
    finish(w)
}

/// `n, x` for an orbit `x_0, x_1, …`.
pub fn write_orbit_csv<S: Scalar, W: Write>(out: W, orbit: &[S]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "x"])?;
    for (n, x) in orbit.iter().enumerate() {
        w.write_record([n.to_string(), x.to_string()])?;
    }
    finish(w)
}

/// `anchor, fold_level`.
pub fn write_ppoints_csv<S: Scalar, W: Write>(out: W, points: &[PPoint<S>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["anchor", "fold_level"])?;
    for p in points {
        w.write_record([p.anchor.to_string(), p.fold_level.to_string()])?;
    }
    finish(w)
}

/// `index, point, certified_finite, depth, preperiod, period`.
pub fn write_omega_csv<S: Scalar, W: Write>(out: W, omega: &OmegaSet<S>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "index",
        "point",
        "certified_finite",
        "depth",
        "preperiod",
        "period",
    ])?;
    let (pre, per) = match omega.cycle {
        Some(c) => (c.preperiod.to_string(), c.period.to_string()),
        None => (String::new(), String::new()),
    };
    for (i, y) in omega.points.iter().enumerate() {
        w.write_record([
            i.to_string(),
            y.to_string(),
            omega.certified_finite.to_string(),
            omega.depth.to_string(),
            pre.clone(),
            per.clone(),
        ])?;
    }
    finish(w)
}

/// `nonrecurrent, gap, depth, closest_index`.
pub fn write_nonrecurrence_csv<W: Write>(out: W, n: &Nonrecurrence) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["nonrecurrent", "gap", "depth", "closest_index"])?;
    w.write_record([
        n.nonrecurrent.to_string(),
        n.gap.to_string(),
        n.depth.to_string(),
        n.closest_index.to_string(),
    ])?;
    finish(w)
}

/// `k, r, links, mesh`.
pub fn write_mesh_csv<S: Scalar, W: Write>(out: W, chain: &Chain<S>, mesh: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "r", "links", "mesh"])?;
    w.write_record([
        chain.k().to_string(),
        chain.r().to_string(),
        chain.len().to_string(),
        mesh.to_string(),
    ])?;
    finish(w)
}

/// A named polyline in the `(π_i, π_j)` plane.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Samples `(π_i, π_j)` along an arc at `count` equally spaced anchors.
pub fn arc_series<S: Scalar>(
    map: &TentMap<S>,
    arc: &Arc<S>,
    i: usize,
    j: usize,
    count: usize,
) -> Vec<(f64, f64)> {
    let count = count.max(2);
    let span = arc.hi().clone() - arc.lo().clone();
    (0..count)
        .map(|k| {
            let u = arc.lo().clone()
                + span.clone() * S::from_ratio(k as i64, 1) / S::from_ratio(count as i64 - 1, 1);
            let x = arc.point_at(u);
            (x.project(map, i).to_f64(), x.project(map, j).to_f64())
        })
        .collect()
}

/// The arc, its image under `h` and the slice `H(·, t)` of the arc.
pub fn isotopy_series<S: Scalar>(
    map: &TentMap<S>,
    h: &DisplacementMap<S>,
    arc: &Arc<S>,
    t: &S,
    (i, j): (usize, usize),
    count: usize,
) -> Result<Vec<Series>> {
    let count = count.max(2);
    let span = arc.hi().clone() - arc.lo().clone();
    let mut base = Vec::with_capacity(count);
    let mut image = Vec::with_capacity(count);
    let mut slice = Vec::with_capacity(count);
    let pair =
        |x: &crate::invlim::LimitPoint<S>| (x.project(map, i).to_f64(), x.project(map, j).to_f64());
    for k in 0..count {
        let u = arc.lo().clone()
            + span.clone() * S::from_ratio(k as i64, 1) / S::from_ratio(count as i64 - 1, 1);
        let x = arc.point_at(u);
        base.push(pair(&x));
        image.push(pair(&h.apply(map, &x)));
        slice.push(pair(&isotopy_eval(map, h, &x, t)?));
    }
    Ok(vec![
        Series {
            label: "arc".into(),
            color: "#1f77b4",
            points: base,
        },
        Series {
            label: "h(arc)".into(),
            color: "#d62728",
            points: image,
        },
        Series {
            label: format!("H(arc, {t})"),
            color: "#2ca02c",
            points: slice,
        },
    ])
}

/// SVG 1.1 document drawing each series as a polyline over `[0, 1]²`.
pub fn render_svg(title: &str, axes: (usize, usize), series: &[Series]) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 40.0;
    let sx = |x: f64| PAD + x * SIZE;
    let sy = |y: f64| PAD + (1.0 - y) * SIZE;
    let total = SIZE + 2.0 * PAD;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(title));
    let _ = writeln!(
        svg,
        r##"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#888" stroke-width="1"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">π_{}</text>"#,
        PAD + SIZE / 2.0,
        total - 10.0,
        axes.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">π_{}</text>"#,
        PAD + SIZE / 2.0,
        PAD + SIZE / 2.0,
        axes.1
    );
    for (k, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|(x, y)| format!("{:.4},{:.4}", sx(*x), sy(*y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            s.color,
            pts.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" fill="{}">{}</text>"#,
            PAD + 8.0,
            PAD + 16.0 + 14.0 * k as f64,
            s.color,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::build_chain;
    use crate::invlim::TailRule;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn chain_csv_for_slope_two() {
        let map = TentMap::new(q(2, 1)).unwrap();
        let chain = build_chain(&map, 0, 0).unwrap();
        let mut buf = Vec::new();
        write_chain_csv(&mut buf, &chain).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "j,lo,hi,lo_closed,hi_closed\n1,0,1/2,true,false\n2,1/4,3/4,false,false\n3,1/2,1,false,true\n"
        );
    }

    #[test]
    fn suite_csv_quotes_json() {
        let rows = [SuiteRow::new(
            "mesh",
            serde_json::json!({"k": 2, "s": "2"}),
            0.5,
            1.0,
            true,
        )];
        let mut buf = Vec::new();
        write_suite_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            r#"mesh,"{""k"":2,""s"":""2""}",0.5,1,true"#
        );
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let map = TentMap::new(q(2, 1)).unwrap();
        let arc = Arc::new(&map, 3, q(0, 1), q(1, 1), TailRule::Left).unwrap();
        let series = [Series {
            label: "a<b".into(),
            color: "#000",
            points: arc_series(&map, &arc, 0, 1, 50),
        }];
        let svg = render_svg("test", (0, 1), &series);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("a&lt;b") && svg.trim_end().ends_with("</svg>"));
    }
}
