use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hilbert_core::bilipschitz::{
    bernig_inverse, bernig_map, distortion_report, finsler_comparison, ComparisonConfig, DistortionConfig, DualVector,
};
use hilbert_core::embedding::LogEmbedding;
use hilbert_core::metric::{distance_alexander, distance_birkhoff, distance_crossratio, finsler_norm};
use hilbert_core::output::{self, Provenance};
use hilbert_core::polytope::{boundary_intersection, vrep_from_hrep};
use hilbert_core::sampling::{point_at_depth, rng, uniform_interior};
use hilbert_core::volume::{
    ball_boundary, ball_volume, default_quadrature_directions, exact_planar_density, finsler_density, growth_fit,
    ray_divergence_ratio, McConfig, Measure, Sampler,
};
use hilbert_core::{GeomError, HRep, Point, PolytopeFile};
use serde_json::json;

use crate::*;

type Out<'a> = &'a mut dyn Write;

pub fn run(cmd: &Command, out: Out) -> Result<(), Failure> {
    match cmd {
        Command::Distance(a) => distance(a, out),
        Command::Finsler(a) => finsler(a, out),
        Command::Ball(a) => ball(a, out),
        Command::Growth(a) => growth(a, out),
        Command::Embed(a) => embed(a, out),
        Command::Lift(a) => lift(a, out),
        Command::Bernig(a) => bernig(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Raylimit(a) => raylimit(a, out),
        Command::Check(a) => check(a, out),
    }
}

struct Loaded {
    bytes: Vec<u8>,
    h: HRep,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Failure::Usage(format!("{} is not UTF-8", path.display())))?;
    let h = PolytopeFile::parse(text)?.to_hrep()?;
    Ok(Loaded { bytes, h })
}

fn point(h: &HRep, c: &[f64]) -> Result<Point, Failure> {
    if c.len() != h.dim() {
        return Err(GeomError::WrongDimension { expected: h.dim(), got: c.len() }.into());
    }
    Ok(Point::from_row_slice(c))
}

fn center(h: &HRep, c: &Option<Coords>) -> Result<Point, Failure> {
    match c {
        Some(c) => point(h, c),
        None => Ok(h.analytic_center()?),
    }
}

fn fmt(p: &[f64]) -> String {
    p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn emit(path: &Option<PathBuf>, content: impl FnOnce() -> Result<String, GeomError>) -> Result<(), Failure> {
    if let Some(path) = path {
        fs::write(path, content()?)?;
    }
    Ok(())
}

fn measure(m: MeasureArg) -> Measure {
    match m {
        MeasureArg::Busemann => Measure::Busemann,
        MeasureArg::HolmesThompson => Measure::HolmesThompson,
    }
}

fn mc_config(a: &McArgs) -> McConfig {
    let sampler = match a.sampler {
        SamplerArg::DualLog => Sampler::DualLog,
        SamplerArg::EuclideanBox => Sampler::EuclideanBox,
    };
    McConfig { samples: a.samples, seed: a.seed, sampler, directions: a.directions, ..Default::default() }
}

fn distance(a: &DistanceArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let h = &input.h;
    let (p, q) = (point(h, &a.p)?, point(h, &a.q)?);
    let birkhoff = distance_birkhoff(h, &p, &q)?;
    let crossratio = distance_crossratio(h, &p, &q)?;
    writeln!(out, "distance {birkhoff}")?;
    writeln!(out, "crossratio {crossratio}")?;
    let alexander = if h.dim() == 2 { Some(distance_alexander(&vrep_from_hrep(h)?, &p, &q)?) } else { None };
    if let Some(d) = alexander {
        writeln!(out, "alexander {d}")?;
    }
    let chord = if p != q { Some(boundary_intersection(h, &p, &(&q - &p))?) } else { None };
    match &chord {
        Some(c) => {
            writeln!(out, "chord_a {}", fmt(c.a.as_slice()))?;
            writeln!(out, "chord_b {}", fmt(c.b.as_slice()))?;
        }
        None => writeln!(out, "chord none (p = q)")?,
    }
    let prov = Provenance::new(None, &input.bytes);
    emit(&a.json, || {
        output::json(
            &prov,
            &json!({
                "p": a.p, "q": a.q,
                "distance": birkhoff, "crossratio": crossratio, "alexander": alexander,
                "chord": chord.map(|c| [c.a.as_slice().to_vec(), c.b.as_slice().to_vec()]),
            }),
        )
    })
}

fn finsler(a: &FinslerArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let h = &input.h;
    let (p, v) = (point(h, &a.p)?, point(h, &a.v)?);
    let f = finsler_norm(h, &p, &v)?;
    let k = a.directions.unwrap_or_else(|| default_quadrature_directions(h.dim()));
    let density = |m| if h.dim() == 2 { exact_planar_density(h, &p, m) } else { finsler_density(h, &p, m, k) };
    let (bus, ht) = (density(Measure::Busemann)?, density(Measure::HolmesThompson)?);
    writeln!(out, "finsler {f}")?;
    writeln!(out, "busemann_density {bus}")?;
    writeln!(out, "holmes_thompson_density {ht}")?;
    let prov = Provenance::new(None, &input.bytes);
    emit(&a.json, || {
        output::json(
            &prov,
            &json!({
                "p": a.p, "v": a.v, "finsler": f,
                "busemann_density": bus, "holmes_thompson_density": ht,
                "quadrature": if h.dim() == 2 { json!("exact") } else { json!(k) },
            }),
        )
    })
}

fn ball(a: &BallArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let h = &input.h;
    let o = center(h, &a.center)?;
    let b = ball_boundary(h, &o, a.radius, a.boundary_directions)?;
    let (tmin, tmax) = b.params.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    writeln!(out, "center {}", fmt(o.as_slice()))?;
    writeln!(out, "radius {}", a.radius)?;
    writeln!(out, "boundary_points {}", b.points.len())?;
    writeln!(out, "euclidean_extent {tmin} {tmax}")?;
    let mut prov = Provenance::new(None, &input.bytes);
    let mut volume = None;
    if a.volume {
        let cfg = mc_config(&a.mc);
        let v = ball_volume(h, &o, a.radius, measure(a.mc.measure), &cfg)?;
        writeln!(out, "volume {} stderr {} accepted {}/{}", v.estimate, v.std_error, v.accepted, v.samples)?;
        prov = Provenance::new(Some(a.mc.seed), &input.bytes).with_budget(a.mc.samples);
        volume = Some(v);
    }
    emit(&a.out.csv, || Ok(output::ball_csv(&prov, &b)))?;
    emit(&a.svg, || {
        let poly = vrep_from_hrep(h)?.polygon_ccw()?;
        output::svg(&prov, &[(&poly, true, "black"), (&b.points, true, "steelblue")])
    })?;
    emit(&a.out.json, || {
        output::json(
            &prov,
            &json!({
                "center": o.as_slice(), "radius": a.radius,
                "boundary": b.points.iter().map(|p| p.as_slice().to_vec()).collect::<Vec<_>>(),
                "measure": volume.as_ref().map(|_| measure(a.mc.measure)),
                "volume": volume,
            }),
        )
    })
}

fn growth(a: &GrowthArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let h = &input.h;
    let o = center(h, &a.center)?;
    let cfg = mc_config(&a.mc);
    let fit = growth_fit(h, &o, &a.radii, measure(a.mc.measure), &cfg)?;
    writeln!(out, "{:>8} {:>14} {:>12}", "radius", "volume", "stderr")?;
    for i in 0..fit.radii.len() {
        writeln!(out, "{:>8} {:>14.6e} {:>12.3e}", fit.radii[i], fit.volumes[i], fit.std_errors[i])?;
    }
    writeln!(out, "window_from {}", fit.radii[fit.window_start])?;
    writeln!(out, "slope {} ± {} (95% [{}, {}])", fit.slope, fit.slope_std_error, fit.slope_ci[0], fit.slope_ci[1])?;
    writeln!(out, "asvol {} plateau_change {} plateaued {}", fit.asvol, fit.plateau_change, fit.plateaued())?;
    writeln!(out, "monotone {}", fit.monotone)?;
    let prov = Provenance::new(Some(a.mc.seed), &input.bytes).with_budget(a.mc.samples);
    emit(&a.out.csv, || Ok(output::growth_csv(&prov, &fit)))?;
    emit(&a.out.json, || output::json(&prov, &json!({ "center": o.as_slice(), "config": cfg, "fit": fit })))
}

fn embed(a: &EmbedArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let h = &input.h;
    let emb = LogEmbedding::new(h)?;
    let wp = emb.embed(&point(h, &a.p)?)?;
    writeln!(out, "target_dim {}", emb.target_dim())?;
    writeln!(out, "image_p {}", fmt(wp.coords()))?;
    let mut pair = None;
    if let Some(q) = &a.q {
        let q = point(h, q)?;
        let wq = emb.embed(&q)?;
        let (e, d) = (emb.distance(&wp, &wq), distance_birkhoff(h, &point(h, &a.p)?, &q)?);
        writeln!(out, "image_q {}", fmt(wq.coords()))?;
        writeln!(out, "norm_distance {e}")?;
        writeln!(out, "hilbert_distance {d}")?;
        pair = Some(json!({ "image_q": wq.coords(), "norm_distance": e, "hilbert_distance": d }));
    }
    let prov = Provenance::new(None, &input.bytes);
    emit(&a.json, || {
        output::json(&prov, &json!({ "embedding": emb.descriptor(), "image_p": wp.coords(), "pair": pair }))
    })
}

fn lift(a: &LiftArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let d = LogEmbedding::new(&input.h)?.descriptor();
    writeln!(out, "source_dim {}", d.source_dim)?;
    writeln!(out, "target_dim {}", d.target_dim)?;
    writeln!(out, "facet_order {}", d.facet_order.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))?;
    writeln!(out, "dependency {}", fmt(&d.dependency))?;
    for (i, f) in d.section_functionals.iter().enumerate() {
        writeln!(out, "H{i} {} + {}", fmt(&f.gradient), f.offset)?;
    }
    let prov = Provenance::new(None, &input.bytes);
    emit(&a.json, || output::json(&prov, &d))
}

fn bernig(a: &BernigArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let h = &input.h;
    if let Some(p) = &a.p {
        let w = bernig_map(h, &point(h, p)?)?;
        writeln!(out, "image {}", fmt(w.coords()))?;
        let prov = Provenance::new(None, &input.bytes);
        return emit(&a.out.json, || output::json(&prov, &json!({ "p": p, "image": w.coords() })));
    }
    if let Some(w) = &a.inverse {
        if w.len() != h.dim() {
            return Err(GeomError::WrongDimension { expected: h.dim(), got: w.len() }.into());
        }
        let x = bernig_inverse(h, &DualVector(w.clone()))?;
        let resid = bernig_map(h, &x)?.distance(&DualVector(w.clone()));
        writeln!(out, "preimage {}", fmt(x.as_slice()))?;
        writeln!(out, "residual {resid:e}")?;
        let prov = Provenance::new(None, &input.bytes);
        return emit(&a.out.json, || {
            output::json(&prov, &json!({ "image": w, "preimage": x.as_slice(), "residual": resid }))
        });
    }
    let cfg = DistortionConfig { seed: a.seed, pairs_per_depth: a.pairs, ..Default::default() };
    let r = distortion_report(h, &cfg)?;
    writeln!(out, "{:>8} {:>6} {:>12} {:>12}", "depth", "pairs", "min_ratio", "max_ratio")?;
    for b in &r.bands {
        writeln!(out, "{:>8.0e} {:>6} {:>12.6} {:>12.6}", b.depth, b.count, b.min_ratio, b.max_ratio)?;
    }
    writeln!(out, "pairs {} ratio [{}, {}]", r.sample_count, r.min_ratio, r.max_ratio)?;
    writeln!(out, "widening {} passed {}", r.widening, r.passed)?;
    let prov = Provenance::new(Some(a.seed), &input.bytes).with_budget(r.sample_count);
    emit(&a.out.csv, || Ok(output::distortion_csv(&prov, &r)))?;
    emit(&a.out.json, || output::json(&prov, &json!({ "config": cfg, "report": r })))?;
    if !r.passed {
        return Err(Failure::Check {
            invariant: "DistortionStable",
            detail: format!("ratio band widens toward the boundary (widening {})", r.widening),
        });
    }
    Ok(())
}

fn compare(a: &CompareArgs, out: Out) -> Result<(), Failure> {
    let (pa, pb, ps) = (load(&a.a)?, load(&a.b)?, load(&a.simplex)?);
    let simplex = vrep_from_hrep(&ps.h)?;
    let cfg = ComparisonConfig {
        seed: a.seed,
        points_per_depth: a.points,
        directions: a.directions,
        ..Default::default()
    };
    let c = finsler_comparison(&pa.h, &pb.h, &simplex, &cfg)?;
    writeln!(out, "{:>8} {:>6} {:>12} {:>12}", "depth", "points", "min_ratio", "max_ratio")?;
    for b in &c.bands {
        writeln!(out, "{:>8.0e} {:>6} {:>12.6} {:>12.6}", b.depth, b.count, b.min_ratio, b.max_ratio)?;
    }
    writeln!(out, "ratio [{}, {}] widening {}", c.min_ratio, c.max_ratio, c.widening)?;
    let bytes = [&pa.bytes[..], b"\0", &pb.bytes, b"\0", &ps.bytes].concat();
    let prov = Provenance::new(Some(a.seed), &bytes).with_budget(a.points * cfg.depths.len());
    emit(&a.out.csv, || {
        let rows = c.bands.iter().map(|b| vec![b.depth, b.count as f64, b.min_ratio, b.max_ratio]);
        Ok(output::csv(&prov, &["depth", "points", "min_ratio", "max_ratio"], rows))
    })?;
    emit(&a.out.json, || output::json(&prov, &json!({ "config": cfg, "comparison": c })))
}

fn raylimit(a: &RaylimitArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let h = &input.h;
    let o = center(h, &a.center)?;
    let (v1, v2) = (point(h, &a.v1)?, point(h, &a.v2)?);
    let ratios = a.t.iter().map(|&t| ray_divergence_ratio(h, &o, &v1, &v2, t)).collect::<Result<Vec<_>, _>>()?;
    writeln!(out, "{:>8} {:>22}", "t", "ratio")?;
    for (t, r) in a.t.iter().zip(&ratios) {
        writeln!(out, "{t:>8} {r:>22}")?;
    }
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    writeln!(out, "strictly_decreasing {decreasing}")?;
    let prov = Provenance::new(None, &input.bytes);
    emit(&a.out.csv, || {
        Ok(output::csv(&prov, &["t", "ratio"], a.t.iter().zip(&ratios).map(|(t, r)| vec![*t, *r])))
    })?;
    emit(&a.out.json, || {
        output::json(
            &prov,
            &json!({ "center": o.as_slice(), "v1": a.v1, "v2": a.v2, "t": a.t, "ratio": ratios, "strictly_decreasing": decreasing }),
        )
    })
}

struct CheckRow {
    name: &'static str,
    max_dev: f64,
    worst: usize,
}

fn check(a: &CheckArgs, out: Out) -> Result<(), Failure> {
    let input = load(&a.input.path)?;
    let h = &input.h;
    let planar = if h.dim() == 2 { Some(vrep_from_hrep(h)?) } else { None };
    let emb = LogEmbedding::new(h)?;
    let mut r = rng(a.seed, 0);
    let mut rows = vec![
        CheckRow { name: "crossratio-birkhoff", max_dev: 0.0, worst: 0 },
        CheckRow { name: "embedding-birkhoff", max_dev: 0.0, worst: 0 },
    ];
    if planar.is_some() {
        rows.push(CheckRow { name: "alexander-birkhoff", max_dev: 0.0, worst: 0 });
    }
    let mut table = Vec::with_capacity(a.pairs);
    for i in 0..a.pairs {
        // alternate interior pairs with pairs reaching down to depth 1e-4
        let p = uniform_interior(h, &mut r);
        let q = if i % 2 == 0 { uniform_interior(h, &mut r) } else { point_at_depth(h, &mut r, 10f64.powi(-1 - (i / 2 % 4) as i32)) };
        let d = distance_birkhoff(h, &p, &q)?;
        let mut row = vec![i as f64, d, distance_crossratio(h, &p, &q)?, emb.distance(&emb.embed(&p)?, &emb.embed(&q)?)];
        if let Some(v) = &planar {
            row.push(distance_alexander(v, &p, &q)?);
        }
        for (c, &x) in rows.iter_mut().zip(&row[2..]) {
            let dev = (x - d).abs() / (1.0 + d);
            if !(dev <= c.max_dev) {
                c.max_dev = dev;
                c.worst = i;
            }
        }
        table.push(row);
    }
    writeln!(out, "{:<22} {:>14} {:>10} {:>6}", "check", "max_deviation", "tolerance", "status")?;
    for c in &rows {
        let status = if c.max_dev <= a.tol { "ok" } else { "FAIL" };
        writeln!(out, "{:<22} {:>14.3e} {:>10.1e} {:>6}", c.name, c.max_dev, a.tol, status)?;
    }
    if planar.is_none() {
        writeln!(out, "{:<22} {:>14} {:>10} {:>6}", "alexander-birkhoff", "-", "-", "skip")?;
    }
    writeln!(out, "pairs {}", a.pairs)?;

    let prov = Provenance::new(Some(a.seed), &input.bytes).with_budget(a.pairs);
    let mut cols = vec!["pair", "birkhoff", "crossratio", "embedding"];
    if planar.is_some() {
        cols.push("alexander");
    }
    emit(&a.out.csv, || Ok(output::csv(&prov, &cols, table.iter().cloned())))?;
    let summary: Vec<_> = rows
        .iter()
        .map(|c| json!({ "check": c.name, "max_deviation": c.max_dev, "worst_pair": c.worst, "passed": c.max_dev <= a.tol }))
        .collect();
    emit(&a.out.json, || output::json(&prov, &json!({ "pairs": a.pairs, "tolerance": a.tol, "checks": summary })))?;

    if let Some(c) = rows.iter().find(|c| !(c.max_dev <= a.tol)) {
        return Err(Failure::Check {
            invariant: "DistanceFormulaAgreement",
            detail: format!("{} deviates by {:e} > {:e} at pair {}", c.name, c.max_dev, a.tol, c.worst),
        });
    }
    Ok(())
}
