use std::error::Error as StdError;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use magneto::gauge::{frustration, FrustrationMode, DEFAULT_BUDGET};
use magneto::io::{format_subset, graph_to_json, parse_graph, parse_subset};
use magneto::isoperimetry::{cycle_closed_form, isoperimetric, IsoperimetricResult};
use magneto::spectral::{heat_kernel, spectrum_report, SignatureMode};
use magneto::{
    CutReport, Dimension, Group, GroupElement, IsoperimetryOptions, MagneticGraph, SwitchingAssignment, VertexSet,
};

use crate::{verify, Cli, Command, HeuristicArgs, Oracle, Outcome, Status};

pub type CliResult<T> = Result<T, Box<dyn StdError>>;

pub fn load_graph(path: &Path) -> CliResult<MagneticGraph> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_graph(&text)?)
}

fn ok(results: Value, summary: String) -> Outcome {
    Outcome { results, summary, status: Status::Ok }
}

pub fn mode(cli: &Cli, h: &HeuristicArgs) -> FrustrationMode {
    if h.heuristic {
        FrustrationMode::Heuristic { restarts: h.restarts, seed: h.seed }
    } else {
        FrustrationMode::Exact { budget: cli.budget.unwrap_or(DEFAULT_BUDGET) }
    }
}

/// Cyclic elements as integer exponents, circle elements in turns.
fn element_json(e: &GroupElement) -> Value {
    match e {
        GroupElement::Cyclic { exponent, .. } => json!(exponent),
        GroupElement::Circle { .. } => json!(e.turns()),
    }
}

fn assignment_json(tau: &SwitchingAssignment) -> Value {
    tau.values().iter().map(|v| v.as_ref().map_or(Value::Null, element_json)).collect()
}

pub fn cut_json(c: &CutReport, n: usize) -> Value {
    json!({
        "subset": format_subset(c.subset, n),
        "frustration": c.frustration,
        "boundary": c.boundary,
        "volume": c.volume,
        "quotient": c.objective,
    })
}

fn constant_json(r: &IsoperimetricResult, n: usize, key: &str) -> Value {
    let mut v = json!({
        key: r.constant,
        "delta": r.delta.to_string(),
        "argmin": format_subset(r.argmin.subset, n),
        "frustration": r.argmin.frustration,
        "boundary": r.argmin.boundary,
        "volume": r.argmin.volume,
        "exact": r.exact,
    });
    if let Some(rows) = &r.profile {
        v["profile"] = rows.iter().map(|c| cut_json(c, n)).collect();
    }
    v
}

fn bound_word(exact: bool) -> &'static str {
    if exact {
        "exact"
    } else {
        "uncertified"
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Frustration { graph, subset, heuristic, discretize } => {
            let mut g = load_graph(graph)?;
            let warning = match discretize {
                Some(k) => {
                    if g.group() != Group::Circle {
                        return Err(format!("--discretize needs circle signatures, graph has {:?}", g.group()).into());
                    }
                    g = g.discretize(*k)?;
                    Some(format!("signatures rounded to the {k}-th roots of unity; the value is not certified for the original graph"))
                }
                None => None,
            };
            let set = match subset {
                Some(s) => parse_subset(s, g.n())?,
                None => VertexSet::full(g.n()),
            };
            let r = frustration(&g, set, mode(cli, heuristic))?;
            let exact = r.exact && warning.is_none();
            let mut results = json!({
                "iota": r.value,
                "subset": format_subset(set, g.n()),
                "exact": exact,
                "minimizer": assignment_json(&r.minimizer),
                "evaluations": r.evaluations,
            });
            let mut summary = format!("ι = {} ({})", r.value, bound_word(exact));
            if let Some(w) = warning {
                summary.push_str(&format!("\nwarning: {w}"));
                results["warning"] = json!(w);
            }
            Ok(ok(results, summary))
        }
        Command::Cheeger { graph, profile, max_vertices, heuristic } => {
            let g = load_graph(graph)?;
            let opts = IsoperimetryOptions {
                frustration: mode(cli, heuristic),
                max_vertices: *max_vertices,
                profile: *profile,
            };
            let r = isoperimetric(&g, Dimension::Infinite, &opts)?;
            let summary =
                format!("h = {} at {} ({})", r.constant, format_subset(r.argmin.subset, g.n()), bound_word(r.exact));
            Ok(ok(constant_json(&r, g.n(), "h"), summary))
        }
        Command::Isoperimetric { graph, delta, profile, max_vertices, heuristic } => {
            let g = load_graph(graph)?;
            let delta: Dimension = delta.parse()?;
            let opts = IsoperimetryOptions {
                frustration: mode(cli, heuristic),
                max_vertices: *max_vertices,
                profile: *profile,
            };
            let r = isoperimetric(&g, delta, &opts)?;
            let summary = format!(
                "c_{delta} = {} at {} ({})",
                r.constant,
                format_subset(r.argmin.subset, g.n()),
                bound_word(r.exact)
            );
            Ok(ok(constant_json(&r, g.n(), "c_delta"), summary))
        }
        Command::Product { graphs, output } => {
            let factors = graphs.iter().map(|p| load_graph(p)).collect::<CliResult<Vec<_>>>()?;
            let p = MagneticGraph::product_of(&factors)?;
            fs::write(output, graph_to_json(&p) + "\n").map_err(|e| format!("{}: {e}", output.display()))?;
            let results = json!({
                "factors": factors.len(),
                "n": p.n(),
                "edges": p.edges().len(),
                "output": output.display().to_string(),
            });
            let summary = format!("product of {} graphs: {} vertices, {} edges", factors.len(), p.n(), p.edges().len());
            Ok(ok(results, summary))
        }
        Command::Spectrum { graph } => {
            let g = load_graph(graph)?;
            let r = spectrum_report(&g)?;
            let summary = format!("λ_1 = {}, λ_n = {}", r.eigenvalues[0], r.eigenvalues[r.eigenvalues.len() - 1]);
            Ok(ok(serde_json::to_value(&r)?, summary))
        }
        Command::Heat { graph, t, unsigned } => {
            let g = load_graph(graph)?;
            let mode = if *unsigned { SignatureMode::Unsigned } else { SignatureMode::Signed };
            let k = heat_kernel(&g, *t, mode)?;
            let rows = |part: fn(&num_complex::Complex64) -> f64| -> Value {
                (0..g.n()).map(|u| (0..g.n()).map(|v| part(&k.matrix[(u, v)])).collect::<Vec<_>>()).collect()
            };
            let trace: f64 = (0..g.n()).map(|u| k.matrix[(u, u)].re).sum();
            let results = json!({
                "t": t,
                "unsigned": unsigned,
                "trace": trace,
                "re": rows(|z| z.re),
                "im": rows(|z| z.im),
            });
            Ok(ok(results, format!("heat kernel at t = {t}, trace {trace}")))
        }
        Command::Verify { graph, suite, delta, trials, seed } => {
            let g = load_graph(graph)?;
            let delta: Dimension = delta.parse()?;
            verify::run(cli, &g, *suite, delta, *trials, *seed)
        }
        Command::Oracle { family: Oracle::Cycle { n, k, j, delta } } => {
            let sigma = GroupElement::cyclic(*j, *k)?;
            let delta: Dimension = delta.parse()?;
            let c = cycle_closed_form(*n, &sigma, delta)?;
            let results = json!({ "iota": c.iota, "h": c.h, format!("c_delta({delta})"): c.c_delta });
            let summary = format!("C_{n} with ξ_{k}^{j}: ι = {}, h = {}, c_{delta} = {}", c.iota, c.h, c.c_delta);
            Ok(ok(results, summary))
        }
    }
}
