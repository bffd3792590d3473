//! JSON command-line front end.
//!
//! Every subcommand prints one report object with sorted keys, so two
//! invocations with identical inputs and seed are byte-identical.
//! Randomized verdicts carry `"certified": false` plus their trial
//! counts. Exit codes: 0 success, 1 negative verdict under `--assert`
//! (and corpus mismatch), 2 input error, 3 computation capped.

use std::fs;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::corpus;
use crate::cr_fields::{
    cr_vector_fields, kappa, lie_saturation, straighten_linear, tangent_hol_fields, KappaReport,
    LieReport, MinimalityVerdict, VectorField,
};
use crate::error::{CrError, Result};
use crate::flows::{orbit_dim_numeric, FlowConfig, C64};
use crate::manifold::{GraphManifold, Manifold, PointC};
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::segre::{
    double_reflection_sample, first_reflection, reciprocity_sample, segre_contains,
    segre_transversal, segre_variety, TransversalVerdict,
};
use crate::spec_io::{
    digest_hex, gauss_value, load_series, manifold_from_json, manifold_to_json, parse_point_arg,
    point_value, points_from_json, poly_value, series_from_json, series_to_json,
};
use crate::transcendence::{
    check_maps_into, perturbation_builder, trdeg_estimate, DependenceCertificate, SeriesMap,
    DEFAULT_BIDEGREE, DEFAULT_ORDER,
};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Parser)]
#[command(
    name = "crkit",
    version,
    about = "Exact CR-geometry toolkit for real algebraic sets"
)]
struct Cli {
    /// Seed for every randomized routine (env CRKIT_SEED also works).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Pretty-print the report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Exit 1 when the main verdict of the command is negative.
    #[arg(long = "assert", global = true)]
    assert_verdict: bool,
    /// Add wall-clock timing to the report (breaks byte comparisons).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Codimension, CR rank, genericity, minimality, kappa and chi.
    Analyze {
        /// Manifold description (JSON file).
        manifold: String,
        /// Degree bound for the holomorphic tangent-field search.
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// Bracket-depth cap for the minimality check.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Segre variety at a point and/or sampled reciprocity check.
    Segre {
        manifold: String,
        /// Comma-separated coordinates of the conjugation point.
        #[arg(long)]
        point: Option<String>,
        /// Check reciprocity on this many sampled on-manifold pairs.
        #[arg(long)]
        reciprocity_samples: Option<usize>,
    },
    /// Segre-transversality verdict with witness.
    Transversal {
        manifold: String,
        /// Evaluation trials before falling back to exact minors.
        #[arg(long, default_value_t = 16)]
        trials: u32,
    },
    /// Degeneracy invariant kappa, excess chi, witness minor.
    Kappa { manifold: String },
    /// Linear straightening of product directions.
    Straighten { manifold: String },
    /// Lie saturation at the base point; --numeric adds the flow orbit.
    Orbit {
        manifold: String,
        /// Also integrate flows and compare the numeric orbit dimension.
        #[arg(long)]
        numeric: bool,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Reflection of a finite point set in a target manifold.
    Reflect {
        target: String,
        /// JSON file with the source points.
        #[arg(long)]
        points: String,
        /// Source manifold for the two-point double reflection.
        #[arg(long)]
        source: Option<String>,
        /// Map components (comma-separated polynomials in the source
        /// holomorphic variables), required with --source.
        #[arg(long)]
        map: Option<String>,
        /// Sample count per Segre set in the double reflection.
        #[arg(long, default_value_t = 4)]
        pair_samples: usize,
    },
    /// Transcendence-degree estimate for a truncated series map.
    Trdeg {
        /// Series file, or builtin: sin, exp, polynomial:<p1,p2,...>.
        series: String,
        /// Degree bounds D_z D_x of the dependence search.
        #[arg(long, num_args = 2, value_names = ["DZ", "DX"])]
        bounds: Option<Vec<u32>>,
        /// Truncation order N.
        #[arg(long)]
        order: Option<u32>,
    },
    /// Check that a series map sends one germ into another.
    MapsInto {
        series: String,
        /// Source manifold (graph form).
        source: String,
        target: String,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Attach sin^a perturbations to straightened slots of a map.
    Perturb {
        series: String,
        /// Order of vanishing of the perturbation.
        #[arg(long, default_value_t = 1)]
        a: u32,
        /// Comma-separated component indices to perturb (0-based).
        #[arg(long, default_value = "0")]
        slots: String,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Run the built-in examples against their frozen reports.
    Corpus {
        /// Regenerate the frozen expected reports.
        #[arg(long)]
        write: bool,
    },
}

/// What the exit code should be once the report has been printed.
enum Exit {
    Clean,
    /// Applies only under --assert.
    Verdict(bool),
    /// Applies always (corpus comparison).
    Hard(bool),
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let seed = resolve_seed(cli.seed);
    let started = Instant::now();
    match dispatch(&cli.cmd, seed) {
        Ok((mut report, exit)) => {
            if cli.timing {
                if let Value::Object(map) = &mut report {
                    map.insert(
                        "timing_ms".into(),
                        json!(started.elapsed().as_millis() as u64),
                    );
                }
            }
            let text = if cli.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            }
            .expect("report serialization");
            println!("{}", text);
            match exit {
                Exit::Clean => 0,
                Exit::Verdict(ok) => {
                    if cli.assert_verdict && !ok {
                        1
                    } else {
                        0
                    }
                }
                Exit::Hard(ok) => {
                    if ok {
                        0
                    } else {
                        1
                    }
                }
            }
        }
        Err(e) => {
            eprintln!("crkit: {}", e);
            e.exit_code()
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    if let Some(s) = flag {
        return s;
    }
    if let Ok(text) = std::env::var("CRKIT_SEED") {
        if let Some(s) = parse_seed(&text) {
            return s;
        }
    }
    DEFAULT_SEED
}

fn parse_seed(text: &str) -> Option<u64> {
    let t = text.trim();
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).ok()
    } else {
        t.parse().ok()
    }
}

fn dispatch(cmd: &Cmd, seed: u64) -> Result<(Value, Exit)> {
    match cmd {
        Cmd::Analyze {
            manifold,
            degree,
            depth,
        } => cmd_analyze(manifold, *degree, *depth, seed),
        Cmd::Segre {
            manifold,
            point,
            reciprocity_samples,
        } => cmd_segre(manifold, point.as_deref(), *reciprocity_samples, seed),
        Cmd::Transversal { manifold, trials } => cmd_transversal(manifold, *trials, seed),
        Cmd::Kappa { manifold } => cmd_kappa(manifold, seed),
        Cmd::Straighten { manifold } => cmd_straighten(manifold, seed),
        Cmd::Orbit {
            manifold,
            numeric,
            depth,
        } => cmd_orbit(manifold, *numeric, *depth, seed),
        Cmd::Reflect {
            target,
            points,
            source,
            map,
            pair_samples,
        } => cmd_reflect(
            target,
            points,
            source.as_deref(),
            map.as_deref(),
            *pair_samples,
            seed,
        ),
        Cmd::Trdeg {
            series,
            bounds,
            order,
        } => cmd_trdeg(series, bounds.as_deref(), *order, seed),
        Cmd::MapsInto {
            series,
            source,
            target,
            order,
        } => cmd_maps_into(series, source, target, *order, seed),
        Cmd::Perturb {
            series,
            a,
            slots,
            order,
        } => cmd_perturb(series, *a, slots, *order, seed),
        Cmd::Corpus { write } => cmd_corpus(*write, seed),
    }
}

// ---------------------------------------------------------------- inputs

fn envelope(command: &str, inputs: Value, seed: u64, report: Value) -> Value {
    json!({
        "command": command,
        "inputs": inputs,
        "report": report,
        "seed": seed,
    })
}

fn load_manifold(path: &str) -> Result<(Manifold, Value)> {
    let text = fs::read_to_string(path)?;
    let m = manifold_from_json(&text)?;
    let desc = json!({"path": path, "sha256": digest_hex(text.as_bytes())});
    Ok((m, desc))
}

fn load_series_arg(arg: &str, order: u32) -> Result<(SeriesMap, Value)> {
    if arg == "sin" || arg == "exp" || arg.starts_with("polynomial:") {
        return Ok((load_series(arg, order)?, json!({ "builtin": arg })));
    }
    let text = fs::read_to_string(arg)?;
    let map = series_from_json(&text)?;
    let desc = json!({"path": arg, "sha256": digest_hex(text.as_bytes())});
    Ok((map, desc))
}

fn as_graph(m: &Manifold) -> Result<&GraphManifold> {
    match m {
        Manifold::Graph(g) => Ok(g),
        Manifold::Implicit(_) => Err(CrError::BadInput(
            "this command needs a graph-form manifold".into(),
        )),
    }
}

fn require_base(m: &Manifold) -> Result<&PointC> {
    m.base_point()
        .ok_or_else(|| CrError::BadInput("the manifold carries no base_point".into()))
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CrError::BadInput(format!("bad component index {:?}", t.trim())))
        })
        .collect()
}

// ----------------------------------------------------------- value builders

fn form_str(m: &Manifold) -> &'static str {
    match m {
        Manifold::Graph(_) => "graph",
        Manifold::Implicit(_) => "implicit",
    }
}

fn manifold_header(m: &Manifold) -> Map<String, Value> {
    let mut h = Map::new();
    h.insert("name".into(), json!(m.name()));
    h.insert("n".into(), json!(m.n()));
    h.insert("form".into(), json!(form_str(m)));
    h
}

fn polys_value(ps: &[Poly]) -> Value {
    Value::Array(ps.iter().map(poly_value).collect())
}

fn field_value(f: &VectorField) -> Value {
    json!({
        "coefficients": f.coeffs.iter().map(poly_value).collect::<Vec<_>>(),
        "name": f.name,
    })
}

fn lie_value(r: &LieReport) -> Value {
    json!({
        "bracket_words": r.bracket_words,
        "depth_reached": r.depth_reached,
        "expected_rank": r.expected,
        "generic_span_rank": r.generic_span_rank,
        "span_rank_at_point": r.span_rank_at_p,
        "verdict": r.verdict.as_str(),
    })
}

fn kappa_value(r: &KappaReport) -> Value {
    json!({
        "chi": r.chi,
        "exceptional_generators": polys_value(&r.exceptional_gens),
        "kappa": r.kappa,
        "stabilized": r.stabilized,
        "witness_cols": r.witness_cols,
        "witness_minor": r.witness_minor.as_ref().map(poly_value),
        "witness_rows": r.witness_rows,
    })
}

fn cert_value(c: &DependenceCertificate) -> Value {
    json!({
        "components": c.indices,
        "d_x": c.d_x,
        "d_z": c.d_z,
        "exact": c.exact,
        "relation": poly_value(&c.poly),
        "residual_order": c.residual_order,
    })
}

fn graph_value(g: &GraphManifold) -> Value {
    json!({
        "base_point": g.base_point.as_ref().map(point_value),
        "equations": polys_value(&g.q),
        "m": g.m,
        "n": g.n,
        "name": g.name,
    })
}

// ---------------------------------------------------------------- commands

fn cmd_analyze(path: &str, degree: u32, depth: Option<usize>, seed: u64) -> Result<(Value, Exit)> {
    let (m, input) = load_manifold(path)?;
    let mut rep = manifold_header(&m);
    let basis = cr_vector_fields(&m, seed)?;
    rep.insert("cr_rank".into(), json!(basis.m));
    rep.insert("codimension".into(), json!(basis.d));
    if let Manifold::Graph(g) = &m {
        let k = kappa(g, seed)?;
        rep.insert("kappa".into(), json!(k.kappa));
        rep.insert("chi".into(), json!(k.chi));
    }
    let mut ok = true;
    match m.base_point() {
        Some(p) => {
            if let Manifold::Implicit(im) = &m {
                rep.insert("regular_at_base".into(), json!(im.regular_at(p, seed)?));
                let (generic, d1, d) = im.cr_generic_at(p, seed)?;
                rep.insert(
                    "cr_generic_at_base".into(),
                    json!({"codim": d, "cr_codim": d1, "generic": generic}),
                );
            }
            let lie = lie_saturation(&m, p, depth, seed)?;
            ok = matches!(lie.verdict, MinimalityVerdict::Minimal);
            rep.insert("minimality".into(), lie_value(&lie));
        }
        None => {
            rep.insert("minimality".into(), Value::Null);
        }
    }
    let (fields, complete) = tangent_hol_fields(&m, degree, seed)?;
    rep.insert(
        "holomorphic_tangent_fields".into(),
        json!({
            "complete": complete,
            "count": fields.len(),
            "degree_bound": degree,
            "fields": fields.iter().map(field_value).collect::<Vec<_>>(),
        }),
    );
    Ok((
        envelope("analyze", json!({ "manifold": input }), seed, rep.into()),
        Exit::Verdict(ok),
    ))
}

fn cmd_segre(
    path: &str,
    point: Option<&str>,
    reciprocity: Option<usize>,
    seed: u64,
) -> Result<(Value, Exit)> {
    let (m, input) = load_manifold(path)?;
    if point.is_none() && reciprocity.is_none() {
        return Err(CrError::BadInput(
            "segre needs --point and/or --reciprocity-samples".into(),
        ));
    }
    let mut rep = manifold_header(&m);
    let mut ok = true;
    if let Some(ps) = point {
        let q = parse_point_arg(ps, m.n())?;
        let sv = segre_variety(&m, &q)?;
        let mut body = Map::new();
        body.insert("generators".into(), polys_value(&sv.ideal.gens));
        body.insert("point".into(), point_value(&q));
        if let Some(p) = m.base_point() {
            body.insert("base_on_variety".into(), json!(segre_contains(&m, p, &q)));
        }
        rep.insert("segre".into(), body.into());
    }
    if let Some(k) = reciprocity {
        let (pairs, holds) = reciprocity_sample(&m, k, seed)?;
        ok = holds;
        rep.insert(
            "reciprocity".into(),
            json!({"certified": false, "holds": holds, "pairs_checked": pairs}),
        );
    }
    Ok((
        envelope("segre", json!({ "manifold": input }), seed, rep.into()),
        Exit::Verdict(ok),
    ))
}

fn cmd_transversal(path: &str, trials: u32, seed: u64) -> Result<(Value, Exit)> {
    let (m, input) = load_manifold(path)?;
    let g = as_graph(&m)?;
    let p = require_base(&m)?;
    let r = segre_transversal(g, p, seed, trials)?;
    let mut rep = manifold_header(&m);
    rep.insert("certified".into(), json!(r.certified));
    rep.insert("k".into(), json!(r.k));
    rep.insert("trials_used".into(), json!(r.trials_used));
    rep.insert("verdict".into(), json!(r.verdict.as_str()));
    rep.insert(
        "witness".into(),
        match &r.witness {
            Some(w) => json!(w
                .iter()
                .map(|row| row.iter().map(gauss_value).collect::<Vec<_>>())
                .collect::<Vec<_>>()),
            None => Value::Null,
        },
    );
    let ok = !matches!(r.verdict, TransversalVerdict::NotTransversal);
    Ok((
        envelope("transversal", json!({ "manifold": input }), seed, rep.into()),
        Exit::Verdict(ok),
    ))
}

fn cmd_kappa(path: &str, seed: u64) -> Result<(Value, Exit)> {
    let (m, input) = load_manifold(path)?;
    let g = as_graph(&m)?;
    let r = kappa(g, seed)?;
    let mut rep = manifold_header(&m);
    if let Value::Object(body) = kappa_value(&r) {
        rep.extend(body);
    }
    Ok((
        envelope("kappa", json!({ "manifold": input }), seed, rep.into()),
        Exit::Clean,
    ))
}

fn cmd_straighten(path: &str, seed: u64) -> Result<(Value, Exit)> {
    let (m, input) = load_manifold(path)?;
    let g = as_graph(&m)?;
    let r = straighten_linear(g, seed)?;
    let mut rep = manifold_header(&m);
    rep.insert("kappa_after".into(), json!(r.kappa_after));
    rep.insert("kappa_before".into(), json!(r.kappa_before));
    rep.insert(
        "steps".into(),
        json!(r
            .steps
            .iter()
            .map(|s| json!({
                "direction": s.direction.iter().map(gauss_value).collect::<Vec<_>>(),
                "dropped": s.dropped,
            }))
            .collect::<Vec<_>>()),
    );
    rep.insert(
        "result".into(),
        r.result.as_ref().map(graph_value).unwrap_or(Value::Null),
    );
    let ok = r.result.is_some();
    Ok((
        envelope("straighten", json!({ "manifold": input }), seed, rep.into()),
        Exit::Verdict(ok),
    ))
}

fn cmd_orbit(path: &str, numeric: bool, depth: Option<usize>, seed: u64) -> Result<(Value, Exit)> {
    let (m, input) = load_manifold(path)?;
    let p = require_base(&m)?;
    let lie = lie_saturation(&m, p, depth, seed)?;
    let mut rep = manifold_header(&m);
    rep.insert("lie".into(), lie_value(&lie));
    let mut ok = matches!(lie.verdict, MinimalityVerdict::Minimal);
    if numeric {
        let basis = cr_vector_fields(&m, seed)?;
        let mut fields = basis.l_fields.clone();
        fields.extend(basis.lbar_fields.clone());
        let pc: Vec<C64> = p
            .complexified()
            .iter()
            .map(|g| {
                let (re, im) = g.to_f64();
                C64::new(re, im)
            })
            .collect();
        let dim = orbit_dim_numeric(&fields, &pc, &FlowConfig::default(), seed)?;
        let matches_symbolic = dim == lie.span_rank_at_p;
        ok = matches_symbolic;
        rep.insert(
            "numeric".into(),
            json!({
                "certified": false,
                "matches_symbolic": matches_symbolic,
                "orbit_dimension": dim,
            }),
        );
    }
    Ok((
        envelope("orbit", json!({ "manifold": input }), seed, rep.into()),
        Exit::Verdict(ok),
    ))
}

fn cmd_reflect(
    target: &str,
    points_path: &str,
    source: Option<&str>,
    map: Option<&str>,
    pair_samples: usize,
    seed: u64,
) -> Result<(Value, Exit)> {
    let (mt, t_input) = load_manifold(target)?;
    let points_text = fs::read_to_string(points_path)?;
    let p_input = json!({
        "path": points_path,
        "sha256": digest_hex(points_text.as_bytes()),
    });
    let mut rep = manifold_header(&mt);
    let mut inputs = Map::new();
    inputs.insert("points".into(), p_input);
    inputs.insert("target".into(), t_input);
    let ok;
    match (source, map) {
        (Some(src_path), Some(map_str)) => {
            let (ms, s_input) = load_manifold(src_path)?;
            inputs.insert("source".into(), s_input);
            let gs = as_graph(&ms)?;
            let gt = as_graph(&mt)?;
            let pts = points_from_json(&points_text, gs.n)?;
            if pts.len() != 2 {
                return Err(CrError::BadInput(
                    "double reflection needs exactly two points (z and w)".into(),
                ));
            }
            let comps: Vec<Poly> = map_str
                .split(',')
                .map(|s| parse_poly(s.trim(), &gs.ctx))
                .collect::<Result<_>>()?;
            let r = double_reflection_sample(gs, gt, &comps, &pts[0], &pts[1], pair_samples, seed)?;
            ok = r.dim_estimate.is_some();
            rep.insert(
                "double".into(),
                json!({
                    "certified": false,
                    "dim_estimate": r.dim_estimate,
                    "generators": polys_value(&r.ideal.gens),
                    "k_used": r.k_used,
                    "sampled": r.sampled,
                    "stabilized": r.stabilized,
                }),
            );
        }
        (None, None) => {
            let pts = points_from_json(&points_text, mt.n())?;
            let r = first_reflection(&mt, &pts, None, seed)?;
            ok = r.dim_estimate.is_some();
            rep.insert(
                "first".into(),
                json!({
                    "certified": false,
                    "dim_estimate": r.dim_estimate,
                    "generators": polys_value(&r.ideal.gens),
                    "sample": r.sample.as_ref().map(point_value),
                    "source_count": r.sources.len(),
                }),
            );
        }
        _ => {
            return Err(CrError::BadInput(
                "--source and --map go together".into(),
            ));
        }
    }
    Ok((
        envelope("reflect", inputs.into(), seed, rep.into()),
        Exit::Verdict(ok),
    ))
}

fn cmd_trdeg(
    series: &str,
    bounds: Option<&[u32]>,
    order: Option<u32>,
    seed: u64,
) -> Result<(Value, Exit)> {
    let n = order.unwrap_or(DEFAULT_ORDER);
    let (f, input) = load_series_arg(series, n)?;
    let (dz, dx) = match bounds {
        Some(b) => (b[0], b[1]),
        None => DEFAULT_BIDEGREE,
    };
    let r = trdeg_estimate(&f, dz, dx, n)?;
    let rep = json!({
        "advisory": r.advisory,
        "bounds": [r.d_z, r.d_x],
        "certificates": r.certificates.iter().map(cert_value).collect::<Vec<_>>(),
        "estimate": r.estimate,
        "independent": r.independent,
        "n_in": f.n_in,
        "n_out": f.n_out,
        "order": r.order,
    });
    Ok((
        envelope("trdeg", json!({ "series": input }), seed, rep),
        Exit::Clean,
    ))
}

fn cmd_maps_into(
    series: &str,
    source: &str,
    target: &str,
    order: Option<u32>,
    seed: u64,
) -> Result<(Value, Exit)> {
    let (f, f_input) = load_series_arg(series, order.unwrap_or(DEFAULT_ORDER))?;
    let (ms, s_input) = load_manifold(source)?;
    let (mt, t_input) = load_manifold(target)?;
    let gs = as_graph(&ms)?;
    let n = order.unwrap_or(f.order);
    let r = check_maps_into(&f, gs, &mt, n)?;
    let rep = json!({
        "first_failure": r.first_failure,
        "holds": r.holds,
        "order": r.order,
        "source": ms.name(),
        "target": mt.name(),
    });
    Ok((
        envelope(
            "maps-into",
            json!({"series": f_input, "source": s_input, "target": t_input}),
            seed,
            rep,
        ),
        Exit::Verdict(r.holds),
    ))
}

fn cmd_perturb(
    series: &str,
    a: u32,
    slots: &str,
    order: Option<u32>,
    seed: u64,
) -> Result<(Value, Exit)> {
    let n = order.unwrap_or(DEFAULT_ORDER);
    let (f, input) = load_series_arg(series, n)?;
    let idx = parse_indices(slots)?;
    let g = perturbation_builder(&f, &idx, a)?;
    let rep = json!({
        "a": a,
        "perturbed": series_to_json(&g),
        "slots": idx,
    });
    Ok((
        envelope("perturb", json!({ "series": input }), seed, rep),
        Exit::Clean,
    ))
}

// ------------------------------------------------------------------ corpus

/// Deterministic battery over the built-in examples: structural ranks,
/// minimality, kappa/chi and transversality for graphs, and a small
/// reciprocity sample.
pub fn corpus_battery(seed: u64) -> Result<Value> {
    let mut out = Vec::new();
    for m in corpus::all() {
        let mut e = Map::new();
        e.insert("name".into(), json!(m.name()));
        e.insert("n".into(), json!(m.n()));
        e.insert("form".into(), json!(form_str(&m)));
        let basis = cr_vector_fields(&m, seed)?;
        e.insert("cr_rank".into(), json!(basis.m));
        e.insert("codimension".into(), json!(basis.d));
        let p = m
            .base_point()
            .cloned()
            .ok_or_else(|| CrError::Internal("corpus manifolds carry base points".into()))?;
        let lie = lie_saturation(&m, &p, None, seed)?;
        e.insert("minimality".into(), json!(lie.verdict.as_str()));
        e.insert("span_rank".into(), json!(lie.span_rank_at_p));
        if let Manifold::Graph(g) = &m {
            let k = kappa(g, seed)?;
            e.insert("kappa".into(), json!(k.kappa));
            e.insert("chi".into(), json!(k.chi));
            if g.series_order.is_none() {
                let t = segre_transversal(g, &p, seed, 16)?;
                e.insert(
                    "transversal".into(),
                    json!({"certified": t.certified, "verdict": t.verdict.as_str()}),
                );
            }
        }
        let (pairs, holds) = reciprocity_sample(&m, 10, seed)?;
        e.insert(
            "reciprocity".into(),
            json!({"holds": holds, "pairs_checked": pairs}),
        );
        out.push(Value::Object(e));
    }
    Ok(Value::Array(out))
}

fn expected_path() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/expected.json")
}

fn cmd_corpus(write: bool, seed: u64) -> Result<(Value, Exit)> {
    let battery = corpus_battery(seed)?;
    let canonical = serde_json::to_string(&battery).expect("battery serialization");
    let path = expected_path();
    let mut rep = Map::new();
    rep.insert(
        "count".into(),
        json!(battery.as_array().map(|a| a.len()).unwrap_or(0)),
    );
    rep.insert("manifolds".into(), battery);
    let matched;
    if write {
        fs::write(path, format!("{}\n", canonical))?;
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");
        for m in corpus::all() {
            let spec = serde_json::to_string_pretty(&manifold_to_json(&m))
                .expect("manifold serialization");
            fs::write(format!("{}/{}.json", dir, m.name()), format!("{}\n", spec))?;
        }
        matched = true;
        rep.insert("written".into(), json!(true));
    } else {
        let stored = fs::read_to_string(path).unwrap_or_default();
        matched = stored.trim_end() == canonical;
    }
    rep.insert("matched".into(), json!(matched));
    Ok((
        envelope("corpus", json!({}), seed, rep.into()),
        Exit::Hard(matched),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_parsing_accepts_hex_and_decimal() {
        assert_eq!(parse_seed("12648430"), Some(0xC0FFEE));
        assert_eq!(parse_seed("0xC0FFEE"), Some(0xC0FFEE));
        assert_eq!(parse_seed(" 7 "), Some(7));
        assert_eq!(parse_seed("pig"), None);
    }

    #[test]
    fn battery_is_value_deterministic() {
        let a = corpus_battery(1).unwrap();
        let b = corpus_battery(1).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn cli_asserts_parse() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
