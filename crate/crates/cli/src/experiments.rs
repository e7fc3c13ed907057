//! Experiment dispatch: each named experiment builds its geometry from the
//! config, runs the library checks, and returns flat CSV rows, a JSON
//! payload, and plot descriptions.

use std::f64::consts::PI;

use serde_json::{json, Value};
use warpiso_core::chain::{chain_margins, corollary_run, hm_residual};
use warpiso_core::isolab::{catalog_weights, verify_weighted_iso, verify_weighted_iso_parametric};
use warpiso_core::models::{self, model_by_name};
use warpiso_core::report::ToCsvRecord;
use warpiso_core::spectral::{
    bisect_sign_change, first_harmonic, lambda1_bound_check, power_counterexample,
    second_variation_probe, slice_stability, small_ball_threshold, steklov_annulus, steklov_ball,
};
use warpiso_core::{
    shapes, CsvRecord, NodeCoord, RadialWeight, Regime, Resolution, StarGraph, WarpedSpace,
    WeightPair,
};

use crate::config::Config;
use crate::svg::{Plot, Series};

pub const EXPERIMENTS: [&str; 10] = [
    "classify",
    "verify-iso",
    "catalog4",
    "hm-check",
    "chain",
    "stability",
    "small-ball",
    "power-annulus",
    "eigen-lambda",
    "eigen-steklov",
];

pub struct RunOutput {
    pub records: Vec<CsvRecord>,
    pub payload: Value,
    pub plots: Vec<Plot>,
    pub all_hold: bool,
}

pub fn run(
    name: &str,
    cfg: &Config,
    resolution: Option<usize>,
    seed: u64,
) -> Result<RunOutput, String> {
    match name {
        "classify" => classify(cfg),
        "verify-iso" => verify_iso(cfg, resolution, seed),
        "catalog4" => catalog4(cfg, resolution, seed),
        "hm-check" => hm_check(cfg, resolution, seed),
        "chain" => chain_experiment(cfg, resolution, seed),
        "stability" => stability(cfg, resolution),
        "small-ball" => small_ball(cfg),
        "power-annulus" => power_annulus(cfg),
        "eigen-lambda" => eigen_lambda(cfg, resolution, seed),
        "eigen-steklov" => eigen_steklov(cfg),
        other => Err(format!(
            "unknown experiment `{other}`; available: {}",
            EXPERIMENTS.join(", ")
        )),
    }
}

fn core<T>(r: warpiso_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Concrete grid resolution: an override n means n nodes on circles and an
/// (n, 2n) product on spheres, rounded up to the grid parity rules.
fn resolution_for(space: &WarpedSpace, over: Option<usize>) -> Resolution {
    match over {
        None => Resolution::Default,
        Some(n) => {
            if space.fiber_dimension() == 1 {
                Resolution::Circle((n + n % 2).max(4))
            } else {
                let nc = n.max(4);
                Resolution::Sphere(nc, (2 * nc).max(4))
            }
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Parse a radial weight name: `1`, `r`, `r^K`, `sinh`, `sinh^K`, `cosh`,
/// `cosh-1`, `cosh-1^K`, `tan`, `tan^K`, `cos`, `1-cos`, `s^L`, `s'`.
fn weight_by_name(space: &WarpedSpace, text: &str) -> Result<RadialWeight, String> {
    let t = text.trim();
    let exponent = |rest: &str| -> Result<f64, String> {
        rest.trim()
            .parse::<f64>()
            .map_err(|_| format!("weight `{t}`: bad exponent `{rest}`"))
    };
    Ok(match t {
        "1" => RadialWeight::one(),
        "r" => RadialWeight::power(1.0),
        "sinh" => RadialWeight::sinh_pow(1.0),
        "cosh" => RadialWeight::cosh(),
        "cosh-1" => RadialWeight::cosh_minus_one_pow(1.0),
        "tan" => RadialWeight::tan_pow(1.0),
        "cos" => RadialWeight::cos(),
        "1-cos" => RadialWeight::one_minus_cos(),
        "s'" => {
            let (profile, _) = core(space.single_factor())?;
            RadialWeight::profile_slope(profile)
        }
        _ => {
            if let Some(rest) = t.strip_prefix("r^") {
                RadialWeight::power(exponent(rest)?)
            } else if let Some(rest) = t.strip_prefix("sinh^") {
                RadialWeight::sinh_pow(exponent(rest)?)
            } else if let Some(rest) = t.strip_prefix("cosh-1^") {
                RadialWeight::cosh_minus_one_pow(exponent(rest)?)
            } else if let Some(rest) = t.strip_prefix("tan^") {
                RadialWeight::tan_pow(exponent(rest)?)
            } else if let Some(rest) = t.strip_prefix("s^") {
                let (profile, _) = core(space.single_factor())?;
                RadialWeight::profile_pow(profile, exponent(rest)?)
            } else {
                return Err(format!(
                    "unknown weight `{t}`; known: 1, r, r^K, sinh^K, cosh, \
                     cosh-1^K, tan^K, cos, 1-cos, s^L, s'"
                ));
            }
        }
    })
}

/// Split `head(a, b, …)` into the head and numeric arguments; `key=value`
/// tags inside the parentheses keep only the value.
fn split_call(t: &str) -> Result<(&str, Vec<f64>), String> {
    let Some(open) = t.find('(') else {
        return Ok((t, Vec::new()));
    };
    let inner = t[open..]
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("`{t}`: unbalanced parentheses"))?;
    let mut args = Vec::new();
    for part in inner.split(',') {
        let p = part.trim();
        if p.is_empty() {
            continue;
        }
        let p = p.rsplit('=').next().unwrap_or(p).trim();
        args.push(
            p.parse::<f64>()
                .map_err(|_| format!("`{t}`: bad number `{p}`"))?,
        );
    }
    Ok((&t[..open], args))
}

/// Build a named shape: slice(r0), ellipse(a,b), offset-circle(d,rho),
/// offset-sphere(d,rho), ellipsoid(a,b,c), revolution-cosine(r0,c1,…),
/// random-circle(lo,hi), random-revolution(lo,hi), random-sphere(lo,hi).
fn shape_by_name(
    space: &WarpedSpace,
    resolution: Resolution,
    seed: u64,
    text: &str,
) -> Result<StarGraph, String> {
    let t = text.trim();
    let (head, args) = split_call(t)?;
    let need = |n: usize| -> Result<(), String> {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!(
                "shape `{t}`: expected {n} numeric arguments, got {}",
                args.len()
            ))
        }
    };
    match head {
        "slice" => {
            need(1)?;
            core(StarGraph::slice(space, resolution, args[0]))
        }
        "ellipse" => {
            need(2)?;
            core(shapes::ellipse(space, resolution, args[0], args[1]))
        }
        "offset-circle" => {
            need(2)?;
            core(shapes::offset_circle(space, resolution, args[0], args[1]))
        }
        "offset-sphere" => {
            need(2)?;
            core(shapes::offset_sphere(space, resolution, args[0], args[1]))
        }
        "ellipsoid" => {
            need(3)?;
            core(shapes::ellipsoid(
                space, resolution, args[0], args[1], args[2],
            ))
        }
        "revolution-cosine" => {
            if args.len() < 2 {
                return Err(format!(
                    "shape `{t}`: expected revolution-cosine(r0, c1, …)"
                ));
            }
            core(shapes::revolution_cosine(
                space, resolution, args[0], &args[1..],
            ))
        }
        "random-circle" => {
            need(2)?;
            core(shapes::random_circle_graph(
                space, resolution, seed, 6, args[0], args[1],
            ))
        }
        "random-revolution" => {
            need(2)?;
            core(shapes::random_revolution_graph(
                space, resolution, seed, 4, args[0], args[1],
            ))
        }
        "random-sphere" => {
            need(2)?;
            core(shapes::random_sphere_graph(
                space, resolution, seed, args[0], args[1],
            ))
        }
        other => Err(format!(
            "unknown shape `{other}`; known: slice, ellipse, offset-circle, \
             offset-sphere, ellipsoid, revolution-cosine, random-circle, \
             random-revolution, random-sphere"
        )),
    }
}

/// Polar trace (circle fibers) or per-ring ψ envelope (sphere fibers).
fn shape_plot(graph: &StarGraph, name: &str, title: &str) -> Plot {
    let grid = graph.grid();
    let psi = graph.psi();
    if grid.is_circle() {
        let mut pts = Vec::with_capacity(grid.len() + 1);
        for i in 0..grid.len() {
            if let NodeCoord::Circle { phi } = grid.node(i) {
                pts.push((psi[i] * phi.cos(), psi[i] * phi.sin()));
            }
        }
        if let Some(&first) = pts.first() {
            pts.push(first);
        }
        Plot {
            name: name.into(),
            title: title.into(),
            x_label: "ψ cos φ".into(),
            y_label: "ψ sin φ".into(),
            series: vec![Series {
                label: "boundary".into(),
                points: pts,
            }],
        }
    } else {
        let (nc, na) = grid.shape();
        let colat: Vec<f64> = grid
            .colatitudes()
            .map(|(c, _)| c.to_vec())
            .unwrap_or_default();
        let mut lo_pts = Vec::with_capacity(nc);
        let mut hi_pts = Vec::with_capacity(nc);
        for i in 0..nc {
            let ring = &psi[i * na..(i + 1) * na];
            let lo = ring.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ring.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            lo_pts.push((colat[i], lo));
            hi_pts.push((colat[i], hi));
        }
        Plot {
            name: name.into(),
            title: title.into(),
            x_label: "colatitude ϑ".into(),
            y_label: "ψ".into(),
            series: vec![
                Series {
                    label: "ring min".into(),
                    points: lo_pts,
                },
                Series {
                    label: "ring max".into(),
                    points: hi_pts,
                },
            ],
        }
    }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn classify(cfg: &Config) -> Result<RunOutput, String> {
    let model = cfg.str_required("model")?;
    let space = core(model_by_name(&model))?;
    let default_hi = if space.r_max().is_finite() {
        space.r_min() + 0.9 * (space.r_max() - space.r_min())
    } else {
        space.r_min() + 2.0
    };
    let r_hi = cfg.f64_or("r_hi", default_hi)?;
    let k = cfg.f64_opt("k")?;
    let report = core(space.classify_regime(r_hi, k))?;

    let regime_name = match report.regime {
        Regime::SlicesIsoperimetric => "SlicesIsoperimetric",
        Regime::GlwRegime => "GlwRegime",
        Regime::SlicesNotIsoperimetric => "SlicesNotIsoperimetric",
        Regime::Indeterminate => "Indeterminate",
    };
    let verdict = !matches!(report.regime, Regime::Indeterminate);
    let records = vec![CsvRecord {
        experiment: "classify".into(),
        model: space.label().to_string(),
        shape: format!("window [{}, {}]", report.window.0, report.window.1),
        weight: regime_name.into(),
        lhs: report.margin_min,
        rhs: report.margin_max,
        margin: report.margin_min,
        verdict,
    }];

    // Plot the convexity margin s′² − s s″ against the fiber gap λ₁/m and
    // the comparison curvature, plus the profile itself.
    let (profile, _) = core(space.single_factor())?;
    let m = space.fiber_dimension() as f64;
    let rs = linspace(space.r_min(), r_hi, 241);
    let mut margin_pts = Vec::with_capacity(rs.len());
    let mut profile_pts = Vec::with_capacity(rs.len());
    for &r in &rs {
        let (s, s1, s2) = core(profile.eval(r))?;
        margin_pts.push((r, s1 * s1 - s * s2));
        profile_pts.push((r, s));
    }
    let mut margin_series = vec![Series {
        label: "s'^2 - s s''".into(),
        points: margin_pts,
    }];
    if let Some(lam) = report.fiber_lambda1 {
        margin_series.push(Series {
            label: "lambda1 / m".into(),
            points: vec![(space.r_min(), lam / m), (r_hi, lam / m)],
        });
    }
    if let Some(kv) = report.k_used {
        margin_series.push(Series {
            label: "K".into(),
            points: vec![(space.r_min(), kv), (r_hi, kv)],
        });
    }
    let plots = vec![
        Plot {
            name: "classify-margin".into(),
            title: format!("{}: convexity margin ({})", space.label(), regime_name),
            x_label: "r".into(),
            y_label: "margin".into(),
            series: margin_series,
        },
        Plot {
            name: "classify-profile".into(),
            title: format!("{}: warping profile", space.label()),
            x_label: "r".into(),
            y_label: "s(r)".into(),
            series: vec![Series {
                label: "s".into(),
                points: profile_pts,
            }],
        },
    ];

    let payload = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    Ok(RunOutput {
        records,
        payload,
        plots,
        all_hold: verdict,
    })
}

// ---------------------------------------------------------------------------
// verify-iso
// ---------------------------------------------------------------------------

fn verify_iso(cfg: &Config, res: Option<usize>, seed: u64) -> Result<RunOutput, String> {
    let model = cfg.str_required("model")?;
    let space = core(model_by_name(&model))?;
    let resolution = resolution_for(&space, res);
    let shape = cfg.str_required("shape")?;
    let weight_name = cfg.str_opt("weight")?.unwrap_or_else(|| "1".into());
    let a = weight_by_name(&space, &weight_name)?;
    let pair = match cfg.str_opt("volume_weight")? {
        Some(c) => core(WeightPair::with_volume_weight(
            a,
            weight_by_name(&space, &c)?,
            space.r_min(),
        ))?,
        None => core(WeightPair::plain(a, space.r_min()))?,
    };

    let (head, args) = split_call(shape.trim())?;
    let tangent = head == "offset-circle" && args.len() == 2 && args[0] >= args[1];
    let (record, plots) = if tangent {
        if args[0] > args[1] {
            return Err(format!(
                "shape `{shape}`: need d ≤ rho — beyond tangency the circle \
                 is no longer a radial graph"
            ));
        }
        // The tangent circle through the origin leaves the star-shaped
        // chart, so measure it parametrically.
        let (d, rho) = (args[0], args[1]);
        let curve = move |t: f64| {
            (
                (d + rho * t.cos(), rho * t.sin()),
                (-rho * t.sin(), rho * t.cos()),
            )
        };
        let record = core(verify_weighted_iso_parametric(
            &space,
            &pair,
            &format!("tangent-circle(d={d},rho={rho})"),
            curve,
        ))?;
        let pts: Vec<(f64, f64)> = (0..=256)
            .map(|i| curve(2.0 * PI * i as f64 / 256.0).0)
            .collect();
        let plot = Plot {
            name: "shape".into(),
            title: format!("{}: {}", space.label(), record.shape),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "boundary".into(),
                points: pts,
            }],
        };
        (record, vec![plot])
    } else {
        let graph = shape_by_name(&space, resolution, seed, &shape)?;
        let record = core(verify_weighted_iso(&graph, &pair))?;
        let plot = shape_plot(
            &graph,
            "shape",
            &format!("{}: {}", space.label(), graph.label()),
        );
        (record, vec![plot])
    };

    let payload = serde_json::to_value(&record).map_err(|e| e.to_string())?;
    let row = record.csv_record();
    let all_hold = row.verdict;
    Ok(RunOutput {
        records: vec![row],
        payload,
        plots,
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// catalog4
// ---------------------------------------------------------------------------

fn catalog4(cfg: &Config, res: Option<usize>, seed: u64) -> Result<RunOutput, String> {
    let count = cfg.usize_or("count", 12)?;
    let ks_f = cfg.list_f64_or("ks", &[1.0, 2.0])?;
    let mut ks = Vec::with_capacity(ks_f.len());
    for &x in &ks_f {
        if x.fract() != 0.0 || x < 0.0 {
            return Err(format!("ks: expected nonnegative integers, got {x}"));
        }
        ks.push(x as u32);
    }

    let cases = [
        ("euclidean2", 0.7, 1.8),
        ("euclidean3", 0.8, 1.6),
        ("hyperbolic2", 0.5, 1.5),
        ("hemisphere2", 0.3, 1.0),
    ];

    let mut records = Vec::new();
    let mut case_json = Vec::new();
    let mut series = Vec::new();
    let mut all_hold = true;
    for (name, lo, hi) in cases {
        let space = core(model_by_name(name))?;
        let resolution = match resolution_for(&space, res) {
            Resolution::Default => {
                if space.fiber_dimension() == 1 {
                    Resolution::Circle(256)
                } else {
                    Resolution::Sphere(16, 32)
                }
            }
            r => r,
        };
        let pairs = core(catalog_weights(&space, &ks))?;
        let mut min_rel = f64::INFINITY;
        let mut pts = Vec::with_capacity(count);
        let mut case_hold = true;
        for t in 0..count {
            let graph = if space.fiber_dimension() == 1 {
                core(shapes::random_circle_graph(
                    &space,
                    resolution,
                    seed + t as u64,
                    6,
                    lo,
                    hi,
                ))?
            } else {
                core(shapes::random_sphere_graph(
                    &space,
                    resolution,
                    seed + t as u64,
                    lo,
                    hi,
                ))?
            };
            let mut trial_min = f64::INFINITY;
            for pair in &pairs {
                let rec = core(verify_weighted_iso(&graph, pair))?;
                trial_min = trial_min.min(rec.relative_margin);
                case_hold &= rec.verdict;
                records.push(rec.csv_record());
            }
            min_rel = min_rel.min(trial_min);
            pts.push((t as f64, trial_min));
        }
        all_hold &= case_hold;
        series.push(Series {
            label: name.into(),
            points: pts,
        });
        case_json.push(json!({
            "model": name,
            "band": [lo, hi],
            "weights": pairs.iter().map(|p| p.label()).collect::<Vec<_>>(),
            "trials": count,
            "min_relative_margin": min_rel,
            "all_hold": case_hold,
        }));
    }

    Ok(RunOutput {
        records,
        payload: json!({ "cases": case_json }),
        plots: vec![Plot {
            name: "relative-margins".into(),
            title: "worst relative margin per random shape".into(),
            x_label: "trial".into(),
            y_label: "min (lhs - rhs)/(1 + rhs)".into(),
            series,
        }],
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// hm-check
// ---------------------------------------------------------------------------

fn hm_check(cfg: &Config, res: Option<usize>, seed: u64) -> Result<RunOutput, String> {
    let model = cfg.str_opt("model")?.unwrap_or_else(|| "euclidean3".into());
    let space = core(model_by_name(&model))?;
    let k = cfg.usize_or("k", 1)?;
    let count = cfg.usize_or("count", 10)?;
    let etas = cfg.list_str_or("etas", &["1", "r^2"])?;
    let lo = cfg.f64_or("band_lo", 0.8)?;
    let hi = cfg.f64_or("band_hi", 1.6)?;
    let harmonics = cfg.usize_or("harmonics", if k >= 2 { 4 } else { 6 })?;

    let circle = space.fiber_dimension() == 1;
    let resolution = match resolution_for(&space, res) {
        Resolution::Default => {
            if circle {
                Resolution::Circle(256)
            } else if k >= 2 {
                Resolution::Sphere(48, 8)
            } else {
                Resolution::Sphere(16, 32)
            }
        }
        r => r,
    };

    let mut records = Vec::new();
    let mut worst: f64 = 0.0;
    let mut eta_series: Vec<Series> = etas
        .iter()
        .map(|e| Series {
            label: format!("η = {e}"),
            points: Vec::with_capacity(count),
        })
        .collect();
    let mut trials_json = Vec::new();
    let mut all_hold = true;
    for t in 0..count {
        let graph = if circle {
            core(shapes::random_circle_graph(
                &space,
                resolution,
                seed + t as u64,
                harmonics,
                lo,
                hi,
            ))?
        } else if k >= 2 {
            core(shapes::random_revolution_graph(
                &space,
                resolution,
                seed + t as u64,
                harmonics,
                lo,
                hi,
            ))?
        } else {
            core(shapes::random_sphere_graph(
                &space,
                resolution,
                seed + t as u64,
                lo,
                hi,
            ))?
        };
        let mut per_eta = Vec::new();
        for (ei, eta_name) in etas.iter().enumerate() {
            let eta = weight_by_name(&space, eta_name)?;
            let check = core(hm_residual(&graph, k, &eta))?;
            worst = worst.max(check.residual.abs());
            eta_series[ei]
                .points
                .push((t as f64, (check.residual.abs() + 1e-18).log10()));
            per_eta.push(json!({
                "eta": eta_name,
                "residual": check.residual,
                "raw": check.raw,
                "scale": check.scale,
            }));
            let row = check.csv_record();
            all_hold &= row.verdict;
            records.push(row);
        }
        trials_json.push(json!({ "shape": graph.label(), "terms": per_eta }));
    }

    Ok(RunOutput {
        records,
        payload: json!({
            "model": space.label(),
            "k": k,
            "worst_residual": worst,
            "trials": trials_json,
        }),
        plots: vec![Plot {
            name: "hm-residuals".into(),
            title: format!("{}: normalized identity residuals, k = {k}", space.label()),
            x_label: "trial".into(),
            y_label: "log10 |residual|".into(),
            series: eta_series,
        }],
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

fn chain_experiment(cfg: &Config, res: Option<usize>, seed: u64) -> Result<RunOutput, String> {
    let model = cfg.str_required("model")?;
    let space = core(model_by_name(&model))?;
    let resolution = match resolution_for(&space, res) {
        Resolution::Default => {
            if space.fiber_dimension() == 1 {
                Resolution::Circle(512)
            } else {
                Resolution::Sphere(48, 96)
            }
        }
        r => r,
    };
    let shape = cfg.str_required("shape")?;
    let l = cfg.usize_or("l", 1)? as u32;
    let k = cfg.usize_or("k", if space.fiber_dimension() == 1 { 1 } else { 2 })?;
    let graph = shape_by_name(&space, resolution, seed, &shape)?;

    let chain_rep = core(chain_margins(&graph, l, k))?;
    let coro = core(corollary_run(&graph, l, k))?;

    let stair: Vec<(f64, f64)> = chain_rep
        .entries
        .iter()
        .enumerate()
        .map(|(j, &e)| (j as f64, e))
        .collect();
    let base_line = vec![(0.0, chain_rep.base), (k as f64, chain_rep.base)];
    let plots = vec![Plot {
        name: "chain-staircase".into(),
        title: format!("{}: weighted curvature integrals, l = {l}", graph.label()),
        x_label: "j".into(),
        y_label: "E_j".into(),
        series: vec![
            Series {
                label: "E_j".into(),
                points: stair,
            },
            Series {
                label: "volume base".into(),
                points: base_line,
            },
        ],
    }];

    let payload = json!({
        "chain": serde_json::to_value(&chain_rep).map_err(|e| e.to_string())?,
        "corollary": serde_json::to_value(&coro).map_err(|e| e.to_string())?,
    });
    let rows = vec![chain_rep.csv_record(), coro.csv_record()];
    let all_hold = rows.iter().all(|r| r.verdict);
    Ok(RunOutput {
        records: rows,
        payload,
        plots,
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

fn stability(cfg: &Config, res: Option<usize>) -> Result<RunOutput, String> {
    let probe = cfg.bool_or("probe", true)?;
    if cfg.has("r0") || cfg.has("model") {
        // Single slice in a named model.
        let model = cfg.str_required("model")?;
        let space = core(model_by_name(&model))?;
        let r0_default = if space.r_max().is_finite() {
            0.5 * (space.r_min() + space.r_max())
        } else {
            space.r_min() + 1.0
        };
        let r0 = cfg.f64_or("r0", r0_default)?;
        let verdict = core(slice_stability(&space, r0))?;
        let mut records = vec![verdict.csv_record()];
        let mut probe_json = Value::Null;
        if probe {
            let resolution = match resolution_for(&space, res) {
                Resolution::Default => {
                    if space.fiber_dimension() == 1 {
                        Resolution::Circle(128)
                    } else {
                        Resolution::Sphere(16, 32)
                    }
                }
                r => r,
            };
            let rep = core(second_variation_probe(
                &space,
                resolution,
                r0,
                "first fiber harmonic",
                first_harmonic,
                None,
            ))?;
            records.push(rep.csv_record());
            probe_json = serde_json::to_value(&rep).map_err(|e| e.to_string())?;
        }
        let all_hold = records.iter().all(|r| r.verdict);
        return Ok(RunOutput {
            records,
            payload: json!({
                "verdict": serde_json::to_value(&verdict).map_err(|e| e.to_string())?,
                "probe": probe_json,
            }),
            plots: Vec::new(),
            all_hold,
        });
    }

    // Sweep the sine profile over circle fibers of radius R: the equator
    // slice flips from stable to unstable exactly at R = 1.
    let lo = cfg.f64_or("radius_lo", 0.5)?;
    let hi = cfg.f64_or("radius_hi", 2.0)?;
    let samples = cfg.usize_or("samples", 7)?;
    let find_flip = cfg.bool_or("find_flip", true)?;
    if !(lo > 0.0 && hi > lo) {
        return Err(format!("need 0 < radius_lo < radius_hi, got ({lo}, {hi})"));
    }
    let r0 = PI / 2.0;
    let resolution = match res {
        Some(n) => (n + n % 2).max(4),
        None => 128,
    };

    let mut records = Vec::new();
    let mut margin_pts = Vec::with_capacity(samples);
    let mut d2_pts = Vec::with_capacity(samples);
    let mut sweep_json = Vec::new();
    for radius in linspace(lo, hi, samples) {
        let space = core(models::sine_circle(radius))?;
        let verdict = core(slice_stability(&space, r0))?;
        margin_pts.push((radius, verdict.margin));
        let mut entry = json!({
            "radius": radius,
            "stable": verdict.stable,
            "margin": verdict.margin,
        });
        records.push(verdict.csv_record());
        if probe {
            let rep = core(second_variation_probe(
                &space,
                Resolution::Circle(resolution),
                r0,
                "first fiber harmonic",
                first_harmonic,
                None,
            ))?;
            d2_pts.push((radius, rep.d2));
            entry["d2"] = serde_json::to_value(rep.d2).map_err(|e| e.to_string())?;
            records.push(rep.csv_record());
        }
        sweep_json.push(entry);
    }

    let mut flip_json = Value::Null;
    if find_flip {
        let d2_at = |radius: f64| -> warpiso_core::Result<f64> {
            let space = models::sine_circle(radius)?;
            let rep = second_variation_probe(
                &space,
                Resolution::Circle(resolution),
                r0,
                "first fiber harmonic",
                first_harmonic,
                None,
            )?;
            Ok(rep.d2)
        };
        let (d2_lo, d2_hi) = (core(d2_at(lo))?, core(d2_at(hi))?);
        if d2_lo * d2_hi < 0.0 {
            let flip = core(bisect_sign_change(d2_at, lo, hi, 1e-7))?;
            // The sine profile has s′² − s s″ ≡ 1, so the borderline fiber
            // radius is exactly 1 whatever the slice.
            records.push(CsvRecord {
                experiment: "stability-flip".into(),
                model: "sine-circle(R)".into(),
                shape: format!("slice(r={r0})"),
                weight: "fiber radius at d² = 0".into(),
                lhs: flip,
                rhs: 1.0,
                margin: flip - 1.0,
                verdict: (flip - 1.0).abs() <= 1e-6,
            });
            flip_json = serde_json::to_value(flip).map_err(|e| e.to_string())?;
        }
    }

    let mut plots = vec![Plot {
        name: "stability-margin".into(),
        title: "equator slice: eigenvalue margin over fiber radius".into(),
        x_label: "fiber radius R".into(),
        y_label: "lambda1 - threshold".into(),
        series: vec![
            Series {
                label: "margin".into(),
                points: margin_pts,
            },
            Series {
                label: "zero".into(),
                points: vec![(lo, 0.0), (hi, 0.0)],
            },
        ],
    }];
    if probe {
        plots.push(Plot {
            name: "second-variation".into(),
            title: "volume-preserving second variation at the equator".into(),
            x_label: "fiber radius R".into(),
            y_label: "d²A/dt²".into(),
            series: vec![
                Series {
                    label: "probe".into(),
                    points: d2_pts,
                },
                Series {
                    label: "zero".into(),
                    points: vec![(lo, 0.0), (hi, 0.0)],
                },
            ],
        });
    }

    let all_hold = records.iter().all(|r| r.verdict);
    Ok(RunOutput {
        records,
        payload: json!({ "sweep": sweep_json, "flip_radius": flip_json }),
        plots,
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// small-ball
// ---------------------------------------------------------------------------

fn small_ball(cfg: &Config) -> Result<RunOutput, String> {
    let names = cfg.list_str_or(
        "models",
        &[
            "euclidean2",
            "euclidean3",
            "euclidean4",
            "sine-circle(2)",
            "sine-circle(0.25)",
        ],
    )?;
    let mut records = Vec::new();
    let mut reports = Vec::new();
    let mut slope_pts = Vec::new();
    let mut threshold_pts = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let space = core(model_by_name(name))?;
        let rep = core(small_ball_threshold(&space))?;
        slope_pts.push((i as f64, rep.slope_at_origin));
        threshold_pts.push((i as f64, rep.threshold));
        records.push(rep.csv_record());
        reports.push(serde_json::to_value(&rep).map_err(|e| e.to_string())?);
    }
    let all_hold = records.iter().all(|r| r.verdict);
    Ok(RunOutput {
        records,
        payload: json!({ "models": names, "reports": reports }),
        plots: vec![Plot {
            name: "small-ball".into(),
            title: "cone slope against the small-ball threshold".into(),
            x_label: "model index".into(),
            y_label: "slope / threshold".into(),
            series: vec![
                Series {
                    label: "s'(0)".into(),
                    points: slope_pts,
                },
                Series {
                    label: "threshold".into(),
                    points: threshold_pts,
                },
            ],
        }],
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// power-annulus
// ---------------------------------------------------------------------------

fn power_annulus(cfg: &Config) -> Result<RunOutput, String> {
    let m = cfg.usize_or("m", 1)?;
    let r1s = cfg.list_f64_or("r1", &[1.0, 10.0, 100.0])?;
    let mut records = Vec::new();
    let mut reports = Vec::new();
    let mut pts = Vec::with_capacity(r1s.len());
    for &r1 in &r1s {
        let rep = core(power_counterexample(m, r1))?;
        pts.push((r1.log10(), rep.area_to_volume_ratio.log10()));
        records.push(rep.csv_record());
        reports.push(serde_json::to_value(&rep).map_err(|e| e.to_string())?);
    }
    let all_hold = records.iter().all(|r| r.verdict);
    Ok(RunOutput {
        records,
        payload: json!({ "m": m, "reports": reports }),
        plots: vec![Plot {
            name: "cusp-ratio".into(),
            title: "equal-volume annuli with vanishing boundary area".into(),
            x_label: "log10 r1".into(),
            y_label: "log10 area / volume".into(),
            series: vec![Series {
                label: "annuli".into(),
                points: pts,
            }],
        }],
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// eigen-lambda
// ---------------------------------------------------------------------------

fn eigen_lambda(cfg: &Config, res: Option<usize>, seed: u64) -> Result<RunOutput, String> {
    let model = cfg.str_opt("model")?.unwrap_or_else(|| "euclidean3".into());
    let space = core(model_by_name(&model))?;
    let resolution = match resolution_for(&space, res) {
        Resolution::Default => {
            if space.fiber_dimension() == 1 {
                Resolution::Circle(256)
            } else {
                Resolution::Sphere(32, 8)
            }
        }
        r => r,
    };
    let shape = cfg.str_required("shape")?;
    let ks_f = cfg.list_f64_or("ks", &[0.0, 1.0])?;
    let graph = shape_by_name(&space, resolution, seed, &shape)?;

    let mut records = Vec::new();
    let mut reports = Vec::new();
    let mut est_pts = Vec::new();
    let mut bound_pts = Vec::new();
    for &kf in &ks_f {
        if kf.fract() != 0.0 || kf < 0.0 {
            return Err(format!("ks: expected nonnegative integers, got {kf}"));
        }
        let k = kf as usize;
        let rep = core(lambda1_bound_check(&graph, k))?;
        if let Some(est) = rep.lambda1_exact.or(rep.rayleigh_upper) {
            est_pts.push((kf, est));
        }
        bound_pts.push((kf, rep.bound));
        records.push(rep.csv_record());
        reports.push(serde_json::to_value(&rep).map_err(|e| e.to_string())?);
    }
    let all_hold = records.iter().all(|r| r.verdict);
    Ok(RunOutput {
        records,
        payload: json!({ "shape": graph.label(), "reports": reports }),
        plots: vec![Plot {
            name: "eigen-bound".into(),
            title: format!("{}: first eigenvalue against the curvature bound", graph.label()),
            x_label: "k".into(),
            y_label: "lambda1".into(),
            series: vec![
                Series {
                    label: "estimate".into(),
                    points: est_pts,
                },
                Series {
                    label: "bound".into(),
                    points: bound_pts,
                },
            ],
        }],
        all_hold,
    })
}

// ---------------------------------------------------------------------------
// eigen-steklov
// ---------------------------------------------------------------------------

fn eigen_steklov(cfg: &Config) -> Result<RunOutput, String> {
    let domain = cfg.str_opt("domain")?.unwrap_or_else(|| "ball(3, 1)".into());
    let modes = cfg.usize_or("modes", 8)?;
    let (head, args) = split_call(domain.trim())?;
    let rep = match head {
        "ball" => {
            if args.len() != 2 || args[0].fract() != 0.0 || args[0] < 2.0 {
                return Err(format!("domain `{domain}`: expected ball(n ≥ 2, rho)"));
            }
            core(steklov_ball(args[0] as usize, args[1]))?
        }
        "annulus" => {
            if args.len() != 2 {
                return Err(format!("domain `{domain}`: expected annulus(a, b)"));
            }
            core(steklov_annulus(args[0], args[1], modes))?
        }
        other => return Err(format!("unknown domain `{other}`; known: ball, annulus")),
    };
    let payload = serde_json::to_value(&rep).map_err(|e| e.to_string())?;
    let row = rep.csv_record();
    let all_hold = row.verdict;
    Ok(RunOutput {
        records: vec![row],
        payload,
        plots: Vec::new(),
        all_hold,
    })
}
