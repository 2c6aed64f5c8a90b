//! Deterministic CSV / JSON / SVG emission.
//!
//! Every document starts with a provenance header (tool version, seed and
//! SHA-256 of the input) so reruns can be compared byte for byte.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bilipschitz::DistortionReport;
use crate::error::{GeomError, Result};
use crate::polytope::Point;
use crate::volume::{BallApprox, GrowthFit};

pub const TOOL: &str = "hilbert";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    /// Monte Carlo sample budget, for stochastic runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    pub input_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Provenance {
    pub fn new(seed: Option<u64>, input: &[u8]) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            budget: None,
            input_sha256: sha256_hex(input),
        }
    }

    pub fn with_budget(mut self, samples: usize) -> Self {
        self.budget = Some(samples);
        self
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let seed = self.seed.map_or_else(|| "none".into(), |s| s.to_string());
        let mut f = vec![("version", format!("{} {}", self.tool, self.version)), ("seed", seed)];
        if let Some(b) = self.budget {
            f.push(("budget", b.to_string()));
        }
        f.push(("input-sha256", self.input_sha256.clone()));
        f
    }

    /// Header as `# key: value` lines.
    pub fn comment_block(&self) -> String {
        self.fields().iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
    }
}

/// Comma-separated table with LF line endings under a provenance header.
pub fn csv(prov: &Provenance, columns: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = prov.comment_block();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    provenance: &'a Provenance,
    data: &'a T,
}

/// Pretty JSON object whose first key is `provenance`.
pub fn json<T: Serialize>(prov: &Provenance, data: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Document { provenance: prov, data })?;
    s.push('\n');
    Ok(s)
}

/// Planar polylines as a standalone SVG; `closed` paths are drawn as
/// polygons. The y axis points up.
pub fn svg(prov: &Provenance, paths: &[(&[Point], bool, &str)]) -> Result<String> {
    let pts = paths.iter().flat_map(|(p, _, _)| p.iter());
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        if p.len() != 2 {
            return Err(GeomError::WrongDimension { expected: 2, got: p.len() });
        }
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if !lo[0].is_finite() {
        return Err(GeomError::DegenerateInput("nothing to draw".into()));
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let pad = 0.05 * span;
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let mut out = String::new();
    out.push_str("<!--\n");
    for (k, v) in prov.fields() {
        let _ = writeln!(out, "  {k}: {v}");
    }
    out.push_str("-->\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="600" height="{:.0}">"#,
        lo[0] - pad,
        -hi[1] - pad,
        w,
        h,
        600.0 * h / w
    );
    let stroke = span / 300.0;
    for (p, closed, color) in paths {
        let coords: Vec<String> = p.iter().map(|q| format!("{:.6},{:.6}", q[0], -q[1])).collect();
        let tag = if *closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            out,
            r#"  <{tag} points="{}" fill="none" stroke="{color}" stroke-width="{stroke:.6}"/>"#,
            coords.join(" ")
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn growth_csv(prov: &Provenance, fit: &GrowthFit) -> String {
    let rows = (0..fit.radii.len()).map(|i| vec![fit.radii[i], fit.volumes[i], fit.std_errors[i]]);
    csv(prov, &["radius", "volume", "stderr"], rows)
}

pub fn ball_csv(prov: &Provenance, ball: &BallApprox) -> String {
    let n = ball.center.len();
    let mut cols: Vec<String> = (0..n).map(|k| format!("u{k}")).collect();
    cols.push("t".into());
    cols.extend((0..n).map(|k| format!("x{k}")));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let rows = ball.directions.iter().zip(&ball.params).zip(&ball.points).map(|((u, t), p)| {
        let mut row: Vec<f64> = u.iter().copied().collect();
        row.push(*t);
        row.extend(p.iter().copied());
        row
    });
    csv(prov, &cols, rows)
}

pub fn distortion_csv(prov: &Provenance, report: &DistortionReport) -> String {
    let rows = report.bands.iter().map(|b| vec![b.depth, b.count as f64, b.min_ratio, b.max_ratio]);
    csv(prov, &["depth", "pairs", "min_ratio", "max_ratio"], rows)
}
