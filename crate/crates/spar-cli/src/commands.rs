//! The five subcommands. Each writes its tables into an output directory;
//! grid work runs on the ambient rayon pool and rows keep grid order.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use spar_core::copulas::{CopulaModel, EvDependence, Family};
use spar_core::geometry::AngleScale;
use spar_core::margins::Margin;
use spar_core::spar::{
    assemble, catalog_knots, l1_sphere_grid3, lambda_catalog, limit_set, spar_record, spar_record_vector, AngleRecord,
    Profile, Source,
};

use crate::config::RunConfig;
use crate::output::{write_meta, Cell, Table};
use crate::verify::{run_suite, CriterionReport};

const MARGIN_KINDS: [&str; 7] = ["laplace", "sgp", "gp", "pareto", "exponential", "normal", "t"];

struct CatalogEntry {
    name: &'static str,
    params: Vec<(&'static str, &'static str)>,
    example: Family,
    dims: &'static str,
}

fn entries() -> Vec<CatalogEntry> {
    let sl = |alpha| Family::Ev(EvDependence::SymmetricLogistic { alpha });
    vec![
        CatalogEntry { name: "independence", params: vec![], example: Family::Independence, dims: ">=2" },
        CatalogEntry { name: "frank", params: vec![("alpha", "alpha != 0")], example: Family::Frank { alpha: 5.0 }, dims: "2" },
        CatalogEntry { name: "joe", params: vec![("alpha", "alpha >= 1")], example: Family::Joe { alpha: 2.0 }, dims: "2" },
        CatalogEntry { name: "gaussian", params: vec![("rho", "-1 < rho < 1")], example: Family::Gaussian { rho: 0.5 }, dims: "2" },
        CatalogEntry {
            name: "t",
            params: vec![("rho", "-1 < rho < 1"), ("nu", "nu > 0")],
            example: Family::StudentT { rho: 0.5, nu: 2.0 },
            dims: "2",
        },
        CatalogEntry { name: "ev_logistic", params: vec![("alpha", "alpha >= 1")], example: sl(2.0), dims: "2" },
        CatalogEntry {
            name: "ev_asymmetric_logistic",
            params: vec![("alpha", "alpha >= 1"), ("gamma1", "0 <= gamma1 <= 1"), ("gamma2", "0 <= gamma2 <= 1")],
            example: Family::Ev(EvDependence::AsymmetricLogistic { alpha: 2.0, gamma1: 0.5, gamma2: 0.5 }),
            dims: "2",
        },
        CatalogEntry {
            name: "husler_reiss",
            params: vec![("alpha", "alpha > 0")],
            example: Family::Ev(EvDependence::HuslerReiss { alpha: 1.0 }),
            dims: "2",
        },
        CatalogEntry {
            name: "clayton",
            params: vec![("alpha", "alpha >= -1, alpha != 0")],
            example: Family::Clayton { alpha: 1.0 },
            dims: "2",
        },
        CatalogEntry { name: "nelsen_4215", params: vec![("alpha", "alpha >= 1")], example: Family::Nelsen4215 { alpha: 2.0 }, dims: "2" },
        CatalogEntry {
            name: "bivariate_exponential",
            params: vec![("alpha", "0 <= alpha <= 1")],
            example: Family::BivExponential { alpha: 0.5 },
            dims: "2",
        },
    ]
}

fn profile_name(p: Profile) -> &'static str {
    match p {
        Profile::Standard => "standard",
        Profile::GaussianType { .. } => "gaussian_type",
        Profile::MuDependent { .. } => "mu_dependent",
    }
}

/// Machine-readable listing of copula families. Entries whose name contains
/// `filter` are kept; an empty filter keeps everything.
pub fn catalog(filter: &str) -> Result<Value> {
    let mut families = Vec::new();
    for e in entries() {
        if !e.name.contains(filter) {
            continue;
        }
        let c = match e.example {
            Family::Independence => CopulaModel::independence(2)?,
            f => CopulaModel::new(f)?,
        };
        // λ profiles seen around the L¹ circle at the catalog knots and quadrant midpoints
        let mut profiles: Vec<&str> = Vec::new();
        let mut available = false;
        for k in 0..16 {
            let q = -2.0 + 0.25 * (k as f64 + 0.5);
            let (cq, sq) = spar_core::geometry::StarBoundary::l1(2).pseudo_trig(q);
            if let Some(entry) = lambda_catalog(&c, [cq, sq])? {
                available = true;
                let n = profile_name(entry.profile);
                if !profiles.contains(&n) {
                    profiles.push(n);
                }
            }
        }
        let profile = if profiles.contains(&"gaussian_type") {
            Some("gaussian_type")
        } else if profiles.contains(&"mu_dependent") {
            Some("mu_dependent")
        } else {
            profiles.first().copied()
        };
        families.push(json!({
            "name": e.name,
            "parameters": e.params.iter().map(|(n, r)| json!({"name": n, "range": r})).collect::<Vec<_>>(),
            "dimensions": e.dims,
            "lambda_catalog": available,
            "lambda_margin": if available { Some("laplace") } else { None },
            "profile": profile,
            "margins": MARGIN_KINDS,
        }));
    }
    Ok(json!({ "families": families, "margins": MARGIN_KINDS }))
}

fn scalar_angles(n: usize, period: f64) -> Vec<f64> {
    (1..=n).map(|k| -0.5 * period + period * k as f64 / n as f64).collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn prepare_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

/// Grid evaluation: writes `q.csv`, `rq.csv` and `xy.csv` (two dimensions).
pub fn eval(cfg: &RunConfig, out: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let e = cfg.engine()?;
    if e.dim() != 2 {
        bail!("eval tabulates two-dimensional models; model.dim is {}", e.dim());
    }
    prepare_dir(out)?;
    let angles = scalar_angles(cfg.grid.angles, e.map.angular.period());
    let radii = linspace(cfg.grid.r_min, cfg.grid.r_max, cfg.grid.r_count);

    let q_rows: Vec<Vec<Cell>> = angles
        .par_iter()
        .map(|&q| {
            let a = e.angular_density(q);
            vec![Cell::Num(q), Cell::Num(a.value().unwrap_or(f64::NAN)), Cell::Flag(a.is_divergent())]
        })
        .collect();
    let rq_rows: Vec<Vec<Cell>> = angles
        .par_iter()
        .flat_map_iter(|&q| radii.iter().map(move |&r| (q, r)))
        .map(|(q, r)| vec![Cell::Num(q), Cell::Num(r), Cell::Num(e.joint_polar_density(r, q))])
        .collect();
    let xs = linspace(cfg.grid.xy_range[0], cfg.grid.xy_range[1], cfg.grid.xy_count);
    let xy_rows: Vec<Vec<Cell>> = xs
        .par_iter()
        .flat_map_iter(|&x| xs.iter().map(move |&y| (x, y)))
        .map(|(x, y)| vec![Cell::Num(x), Cell::Num(y), Cell::Num(e.ln_joint_cartesian(&[x, y]).exp())])
        .collect();

    let mut files = Vec::new();
    for (name, header, rows) in [
        ("q.csv", vec!["q", "f_q", "divergent"], q_rows),
        ("rq.csv", vec!["q", "r", "f_rq"], rq_rows),
        ("xy.csv", vec!["x", "y", "f_xy"], xy_rows),
    ] {
        Table { header, rows }.write(&out.join(name))?;
        files.push(out.join(name));
    }
    write_meta(out, "eval", cfg, seed, &["q.csv", "rq.csv", "xy.csv"])?;
    Ok(files)
}

fn record_cells(rec: &AngleRecord) -> Vec<Cell> {
    vec![
        Cell::Num(rec.mu),
        Cell::Num(rec.zeta),
        Cell::Num(rec.xi),
        Cell::Num(rec.sigma),
        Cell::Num(rec.f_w),
        Cell::Num(rec.lambda.unwrap_or(f64::NAN)),
        Cell::Flag(rec.flags.valid()),
        Cell::Flag(rec.flags.divergent),
        Cell::Flag(rec.flags.degenerate),
        Cell::Flag(rec.flags.numeric),
    ]
}

const RECORD_COLUMNS: [&str; 10] = ["mu", "zeta", "xi", "sigma", "f_w", "lambda", "valid", "divergent", "degenerate", "numeric"];

/// SPAR export: writes `spar.csv` and, when `spar.limit_set` is set, `limit_set.csv`.
pub fn spar(cfg: &RunConfig, out: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let e = cfg.engine()?;
    let opts = cfg.spar_options()?;
    if cfg.spar.limit_set && !e.margin.is_laplace() {
        bail!("limit sets are defined for Laplace margins; margin.kind is '{}'", cfg.margin.kind);
    }
    prepare_dir(out)?;
    let d = e.dim();
    let (model, angle_cols): (_, Vec<&'static str>) = if d == 2 {
        let mut grid = scalar_angles(cfg.grid.angles, e.map.angular.period());
        if e.map.angular.scale == AngleScale::Pseudo && opts.source == Source::Catalog {
            grid.extend(catalog_knots(&e.copula));
            grid.sort_by(f64::total_cmp);
            grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        }
        let records = grid.par_iter().map(|&a| spar_record(&e, &opts, a)).collect::<spar_core::Result<Vec<_>>>()?;
        (assemble(&e, &opts, records, Some(e.map.angular.scale)), vec!["q"])
    } else if d == 3 {
        let grid: Vec<Vec<f64>> = l1_sphere_grid3(cfg.spar.sphere_resolution).iter().map(|p| p.to_vec()).collect();
        let records = grid.par_iter().map(|w| spar_record_vector(&e, &opts, w)).collect::<spar_core::Result<Vec<_>>>()?;
        (assemble(&e, &opts, records, None), vec!["b1", "b2", "b3"])
    } else {
        bail!("spar supports dimensions 2 and 3; model.dim is {d}");
    };

    let lead = |rec: &AngleRecord| -> Vec<Cell> {
        match rec.angle {
            Some(a) => vec![Cell::Num(a)],
            None => rec.b.iter().map(|&x| Cell::Num(x)).collect(),
        }
    };
    // vector records are listed by their direction scaled to unit radial gauge
    let mut header = angle_cols.clone();
    header.extend(RECORD_COLUMNS);
    let mut t = Table::new(header);
    for rec in &model.records {
        let mut row = lead(rec);
        row.extend(record_cells(rec));
        t.push(row);
    }
    t.write(&out.join("spar.csv"))?;
    let mut files = vec![out.join("spar.csv")];
    let mut names = vec!["spar.csv"];

    if cfg.spar.limit_set {
        let ls = limit_set(&model)?;
        let mut header = angle_cols;
        header.extend(if d == 2 { vec!["x", "y"] } else { vec!["x", "y", "z"] });
        header.push("degenerate");
        let mut t = Table::new(header);
        for ((rec, p), &deg) in model.records.iter().zip(&ls.points).zip(&ls.degenerate) {
            let mut row = lead(rec);
            row.extend(p.iter().map(|&x| Cell::Num(x)));
            row.push(Cell::Flag(deg));
            t.push(row);
        }
        t.write(&out.join("limit_set.csv"))?;
        files.push(out.join("limit_set.csv"));
        names.push("limit_set.csv");
    }
    write_meta(out, "spar", cfg, seed, &names)?;
    Ok(files)
}

/// Reads a two-column numeric CSV. A non-numeric first line is taken as a header.
pub fn read_sample(path: &Path) -> Result<Vec<[f64; 2]>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Option<Vec<f64>> = rec.iter().map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite())).collect();
        match parsed {
            Some(v) if v.len() == 2 => rows.push([v[0], v[1]]),
            _ if line == 1 && rows.is_empty() => continue,
            Some(v) => bail!("{}: line {line}: expected 2 columns, found {}", path.display(), v.len()),
            None => bail!("{}: line {line}: non-numeric value in '{}'", path.display(), rec.iter().collect::<Vec<_>>().join(",")),
        }
    }
    Ok(rows)
}

/// Plotting positions `(rank - 1/2)/n` with ties given their average rank.
pub fn plotting_positions(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut u = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        // ranks i+1..=j+1 share their mean
        let rank = 0.5 * ((i + 1) + (j + 1)) as f64;
        for &k in &idx[i..=j] {
            u[k] = (rank - 0.5) / n as f64;
        }
        i = j + 1;
    }
    u
}

/// Rank transform to Laplace margins followed by the configured polar map.
pub fn transform(cfg: &RunConfig, input: &Path, out: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let map = cfg.polar_map()?;
    if map.dim() != 2 {
        bail!("transform works on two-column samples");
    }
    let rows = read_sample(input)?;
    if rows.len() < 10 {
        bail!("{}: need at least 10 rows, found {}", input.display(), rows.len());
    }
    let mut cols = [Vec::new(), Vec::new()];
    for r in &rows {
        cols[0].push(r[0]);
        cols[1].push(r[1]);
    }
    for (j, c) in cols.iter().enumerate() {
        if c.iter().all(|&v| v == c[0]) {
            bail!("{}: column {} is constant, so its ranks are degenerate", input.display(), j + 1);
        }
    }
    let lap = Margin::laplace();
    let u: Vec<Vec<f64>> = cols.iter().map(|c| plotting_positions(c)).collect();
    let origin = cfg.polar.origin.clone().unwrap_or_else(|| vec![0.0, 0.0]);
    if origin.len() != 2 {
        bail!("polar.origin must have 2 entries");
    }
    let mut t = Table::new(vec!["x_l", "y_l", "r", "q"]);
    for i in 0..rows.len() {
        let x = [lap.quantile(u[0][i])?, lap.quantile(u[1][i])?];
        let p = map.to_polar(&[x[0] - origin[0], x[1] - origin[1]])?;
        t.push(vec![Cell::Num(x[0]), Cell::Num(x[1]), Cell::Num(p.r), Cell::Num(p.angle.unwrap_or(f64::NAN))]);
    }
    prepare_dir(out)?;
    t.write(&out.join("transformed.csv"))?;
    write_meta(out, "transform", cfg, seed, &["transformed.csv"])?;
    Ok(vec![out.join("transformed.csv")])
}

/// Runs a verification suite and writes `verify.csv`.
pub fn verify(cfg: &RunConfig, suite: &str, out: &Path, seed: u64) -> Result<Vec<CriterionReport>> {
    let reports = run_suite(suite, seed)?;
    prepare_dir(out)?;
    let mut t = Table::new(vec!["criterion", "check", "value", "relation", "bound", "pass"]);
    for r in &reports {
        for c in &r.checks {
            t.push(vec![
                Cell::Int(r.id as i64),
                Cell::Text(format!("\"{}\"", c.name.replace('"', "\"\""))),
                Cell::Num(c.value),
                Cell::Text(c.relation.to_string()),
                Cell::Num(c.bound),
                Cell::Flag(c.pass),
            ]);
        }
    }
    t.write(&out.join("verify.csv"))?;
    write_meta(out, "verify", cfg, seed, &["verify.csv"])?;
    Ok(reports)
}
