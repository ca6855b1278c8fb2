//! Acceptance criteria. Runs as a plain binary so that every criterion prints
//! exactly one PASS or FAIL line; exits non-zero if any fails.

use std::f64::consts::{E, PI, TAU};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use magneto::families::{self, RandomGraphSpec};
use magneto::functional::{
    bernoulli_check, coarea_lhs, extremal_certificate, key_average_circle, key_average_cyclic,
    key_average_quadrature_bound, quotient_infimum_search, signed_gradient_norm, sobolev_quotient, verify_sobolev,
    SobolevMode, DEFAULT_N_THETA,
};
use magneto::gauge::frustration_exact;
use magneto::isoperimetry::{isoperimetric, verify_product_additivity, SubsetTable};
use magneto::spectral::{
    domination_check, eigenvalue_lower_bound_check, heat_kernel_properties_check, kato_check, spectrum,
    trace_bound_check, trace_constant,
};
use magneto::{
    cheeger_constant, Dimension, Group, GroupElement, IsoperimetryOptions, MagneticGraph, SignatureMode, Tolerances,
    VertexFunction, VertexSet,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    ensure(start.elapsed() <= limit, || format!("took {:.1?}, limit {limit:?}", start.elapsed()))
}

fn el(j: i64, k: u32) -> GroupElement {
    GroupElement::cyclic(j, k).unwrap()
}

fn random_in_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    Complex64::from_polar(r, rng.random_range(0.0..TAU))
}

fn random_function(rng: &mut ChaCha8Rng, n: usize) -> VertexFunction {
    loop {
        let values: Vec<Complex64> = (0..n)
            .map(|_| if rng.random::<f64>() < 0.15 { Complex64::new(0.0, 0.0) } else { random_in_disk(rng) })
            .collect();
        let f = VertexFunction::new(values).unwrap();
        if !f.is_zero() {
            return f.normalized().unwrap();
        }
    }
}

/// Random unbalanced graphs with `3 ≤ n ≤ 7`, `2 ≤ k ≤ 4`, random weights and measures.
fn corpus(count: usize, seed: u64) -> Vec<MagneticGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let spec = RandomGraphSpec {
                n: rng.random_range(3..=7),
                group: Group::Cyclic(rng.random_range(2..=4)),
                edge_prob: rng.random_range(0.3..0.8),
                weighted: true,
            };
            families::random_unbalanced(&mut rng, spec)
        })
        .collect()
}

const KS: [u32; 4] = [2, 3, 4, 6];

fn cycle_frustration_oracle() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for n in 3..=8 {
        for k in KS {
            for j in 0..k {
                let g = families::cycle(n, &el(j as i64, k)).unwrap();
                let got = frustration_exact(&g, VertexSet::full(n)).unwrap().value;
                let want = 2.0 * (PI * j as f64 / k as f64).sin();
                ensure((got - want).abs() <= 1e-12, || format!("n={n} k={k} j={j}: {got} vs {want}"))?;
                cases += 1;
            }
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("{cases} cycles in {:.2?}", start.elapsed()))
}

fn cycle_cheeger_oracle() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for n in 3..=8 {
        for k in KS {
            for j in 0..k {
                let g = families::cycle(n, &el(j as i64, k)).unwrap();
                let r = cheeger_constant(&g).unwrap();
                let want = 2.0 * (PI * j as f64 / k as f64).sin() / n as f64;
                ensure((r.constant - want).abs() <= 1e-12, || format!("n={n} k={k} j={j}: {} vs {want}", r.constant))?;
                if j != 0 {
                    ensure(r.argmin.subset == VertexSet::full(n), || {
                        format!("n={n} k={k} j={j}: argmin {:?}", r.argmin.subset)
                    })?;
                }
                cases += 1;
            }
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{cases} cycles in {:.2?}", start.elapsed()))
}

fn variational_sandwich() -> Outcome {
    let opts = IsoperimetryOptions::default();
    let graphs = corpus(50, 3);
    let worst: Vec<(f64, f64)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let cert = extremal_certificate(g, Dimension::Infinite, &opts).unwrap();
            let h = cert.result.constant;
            let q = sobolev_quotient(g, &cert.function, 1.0, 1.0).unwrap();
            let (_, best) = quotient_infimum_search(g, 1.0, 1.0, 3000, i as u64).unwrap();
            ((q - h).abs(), best - h / 3.0)
        })
        .collect();
    let cert_err = worst.iter().map(|w| w.0).fold(0.0, f64::max);
    let margin = worst.iter().map(|w| w.1).fold(f64::INFINITY, f64::min);
    ensure(cert_err <= 1e-9, || format!("certificate quotient differs from h by {cert_err:e}"))?;
    ensure(margin >= -1e-9, || format!("search found a quotient {margin:e} below h/3"))?;

    // circle signatures: unicyclic graphs, where the frustration index is exact
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let circle: Vec<MagneticGraph> = (0..50)
        .map(|_| {
            let n = rng.random_range(3..=7);
            let len = rng.random_range(3..=n);
            families::random_unicyclic(&mut rng, n, len, Group::Circle)
        })
        .collect();
    let worst: Vec<(f64, f64)> = circle
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let cert = extremal_certificate(g, Dimension::Infinite, &opts).unwrap();
            let h = cert.result.constant;
            let q = sobolev_quotient(g, &cert.function, 1.0, 1.0).unwrap();
            let (_, best) = quotient_infimum_search(g, 1.0, 1.0, 3000, 1000 + i as u64).unwrap();
            ((q - h).abs(), best - h / 2.0)
        })
        .collect();
    let circle_err = worst.iter().map(|w| w.0).fold(0.0, f64::max);
    let circle_margin = worst.iter().map(|w| w.1).fold(f64::INFINITY, f64::min);
    ensure(circle_err <= 1e-9, || format!("circle certificate differs from h by {circle_err:e}"))?;
    ensure(circle_margin >= -1e-9, || format!("circle search found a quotient {circle_margin:e} below h/2"))?;
    Ok(format!(
        "cyclic: certificate error {cert_err:.1e}, min (best − h/3) {margin:.3e}; circle: error {circle_err:.1e}, min (best − h/2) {circle_margin:.3e}"
    ))
}

fn coarea_property() -> Outcome {
    let graphs = corpus(20, 5);
    let results: Vec<(usize, f64)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
            let mut violations = 0;
            let mut slack = f64::INFINITY;
            for _ in 0..50 {
                let f = random_function(&mut rng, g.n());
                let lhs = coarea_lhs(g, &f).unwrap();
                let rhs = 3.0 * signed_gradient_norm(g, &f, 1.0).unwrap();
                if lhs > rhs + 1e-9 {
                    violations += 1;
                }
                slack = slack.min(rhs - lhs);
            }
            (violations, slack)
        })
        .collect();
    let violations: usize = results.iter().map(|r| r.0).sum();
    let slack = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    ensure(violations == 0, || format!("{violations} violations out of 1000"))?;
    Ok(format!("1000 functions on 20 graphs, min slack {slack:.3e}"))
}

fn sobolev_suite() -> Outcome {
    let graphs = corpus(20, 5);
    let opts = IsoperimetryOptions::default();
    let deltas = [2.5, 3.0, 4.0];
    let results: Vec<(usize, usize)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let table = SubsetTable::compute(g, &opts).unwrap();
            let h = table.constant(Dimension::Infinite).constant;
            let c: Vec<f64> = deltas.iter().map(|&d| table.constant(Dimension::Finite(d)).constant).collect();
            let mut modes = vec![SobolevMode::CheegerP1 { h }];
            for p in [1.5, 2.0, 3.0] {
                modes.push(SobolevMode::CheegerP { p, h });
            }
            for (&delta, &c_delta) in deltas.iter().zip(&c) {
                modes.push(SobolevMode::IsoP1 { delta, c_delta });
                for p in [1.0, 1.5, 2.0] {
                    modes.push(SobolevMode::IsoGeneral { p, delta, c_delta });
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(200 + i as u64);
            let mut checks = 0;
            let mut violations = 0;
            for _ in 0..50 {
                let f = random_function(&mut rng, g.n());
                for &mode in &modes {
                    checks += 1;
                    if !verify_sobolev(g, &f, mode).unwrap().satisfied {
                        violations += 1;
                    }
                }
            }
            (checks, violations)
        })
        .collect();
    let checks: usize = results.iter().map(|r| r.0).sum();
    let violations: usize = results.iter().map(|r| r.1).sum();
    ensure(violations == 0, || format!("{violations} violations in {checks} checks"))?;
    Ok(format!("{checks} checks (1000 functions × 16 mode/δ/p combinations), 0 violations"))
}

fn key_lemmas() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pairs: Vec<(Complex64, Complex64)> =
        (0..100_000).map(|_| (random_in_disk(&mut rng), random_in_disk(&mut rng))).collect();
    let circle_bad =
        pairs.par_iter().filter(|(a, b)| key_average_circle(*a, *b).unwrap() > 2.0 * (a - b).norm() + 1e-12).count();
    ensure(circle_bad == 0, || format!("circle lemma fails on {circle_bad} pairs"))?;
    for k in KS {
        let bad = pairs
            .par_iter()
            .filter(|(a, b)| {
                let v = key_average_cyclic(*a, *b, k, DEFAULT_N_THETA).unwrap();
                v > 3.0 * (a - b).norm() + key_average_quadrature_bound(*a, *b, k, DEFAULT_N_THETA)
            })
            .count();
        ensure(bad == 0, || format!("cyclic lemma (k={k}) fails on {bad} pairs"))?;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("10^5 pairs, k ∈ {{2,3,4,6}} and circle, {:.2?}", start.elapsed()))
}

fn complex_bernoulli() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs: Vec<(Complex64, Complex64)> =
        (0..100_000).map(|_| (random_in_disk(&mut rng), random_in_disk(&mut rng))).collect();
    for alpha in [1.0, 1.5, 2.0, 3.7] {
        let bad = pairs.par_iter().filter(|(a, b)| !bernoulli_check(*a, *b, alpha).unwrap()).count();
        ensure(bad == 0, || format!("α={alpha}: {bad} failures"))?;
    }
    Ok("4 × 10^5 checks".into())
}

fn product_additivity() -> Outcome {
    let start = Instant::now();
    let flip = el(1, 2);
    let c3 = families::cycle(3, &flip).unwrap();
    let c4 = families::cycle(4, &flip).unwrap();
    let k2 = families::single_edge(&flip).unwrap();
    let opts = IsoperimetryOptions { max_vertices: 18, ..Default::default() };
    let mut lines = Vec::new();
    for (name, factors) in [("C3×C4", vec![c3.clone(), c4]), ("C3×C3×K2", vec![c3.clone(), c3, k2])] {
        let r = verify_product_additivity(&factors, &opts).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.holds, || format!("{name}: {} ∉ [{}, {}]", r.product_constant, r.lower, r.upper))?;
        lines.push(format!(
            "{name}: {:.6} ≤ {:.6} ≤ {:.6} ({})",
            r.lower,
            r.product_constant,
            r.upper,
            if r.exact { "exact" } else { "upper-bound mode" }
        ));
    }
    within(Duration::from_secs(600), start)?;
    Ok(format!("{}; {:.1?}", lines.join("; "), start.elapsed()))
}

fn spectral_envelope() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let tol = Tolerances::default();
    let mut balanced_count = 0;
    for i in 0..200 {
        let group = match i % 4 {
            0 => Group::Cyclic(2),
            1 => Group::Cyclic(3),
            2 => Group::Cyclic(5),
            _ => Group::Circle,
        };
        let spec = RandomGraphSpec {
            n: rng.random_range(3..=10),
            group,
            edge_prob: rng.random_range(0.2..0.7),
            weighted: true,
        };
        let g = if i % 3 == 0 {
            families::random_balanced(&mut rng, spec)
        } else {
            families::random_connected(&mut rng, spec)
        };
        let s = spectrum(&g, SignatureMode::Signed).unwrap();
        let top = 2.0 * g.max_mu_degree();
        ensure(s.eigenvalues[0] >= -tol.envelope && *s.eigenvalues.last().unwrap() <= top + tol.envelope, || {
            format!("graph {i}: spectrum {:?} leaves [0, {top}]", s.eigenvalues)
        })?;
        let tau = families::random_switching(&mut rng, g.n(), group);
        let switched = spectrum(&g.switch(&tau).unwrap(), SignatureMode::Signed).unwrap();
        let diff = s.eigenvalues.iter().zip(&switched.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(diff <= 1e-9, || format!("graph {i}: switching moved the spectrum by {diff:e}"))?;
        let balanced = g.is_balanced().is_balanced();
        balanced_count += balanced as usize;
        ensure((s.eigenvalues[0] < 1e-9) == balanced, || {
            format!("graph {i}: λ₁ = {:e} but balanced = {balanced}", s.eigenvalues[0])
        })?;
    }
    Ok(format!("200 graphs ({balanced_count} balanced)"))
}

fn heat_kernel_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let tol = Tolerances::default();
    let mut worst_fd: f64 = 0.0;
    for i in 0..50 {
        let group = if i % 2 == 0 { Group::Cyclic(rng.random_range(2..=6)) } else { Group::Circle };
        let spec = RandomGraphSpec {
            n: rng.random_range(2..=9),
            group,
            edge_prob: rng.random_range(0.2..0.7),
            weighted: true,
        };
        let g = if i % 5 == 0 {
            families::random_balanced(&mut rng, spec)
        } else {
            families::random_connected(&mut rng, spec)
        };
        for t in [0.1, 1.0, 10.0] {
            let a = rng.random_range(0.0..=t);
            let r = heat_kernel_properties_check(&g, t, a, &tol).unwrap();
            ensure(r.passed, || format!("graph {i}, t={t}: {r:?}"))?;
            worst_fd = worst_fd.max(r.heat_equation_residual / r.heat_equation_tolerance);
            let f = random_function(&mut rng, g.n());
            let k = kato_check(&g, &f, &tol).unwrap();
            ensure(k.passed, || format!("graph {i}: Kato violated by {:e}", k.max_violation))?;
            let d = domination_check(&g, t, &f, &tol).unwrap();
            ensure(d.passed, || format!("graph {i}, t={t}: {d:?}"))?;
        }
    }
    Ok(format!("50 graphs × 3 times, worst heat-equation residual/tolerance {worst_fd:.3}"))
}

fn trace_and_eigenvalue_bounds() -> Outcome {
    let g = families::cycle(4, &el(1, 2)).unwrap();
    let c3 = isoperimetric(&g, Dimension::Finite(3.0), &IsoperimetryOptions::default()).unwrap().constant;
    ensure((c3 - 0.7937005).abs() < 1e-7, || format!("c₃ = {c3}"))?;
    let r = trace_bound_check(&g, 3.0, c3, &[0.01, 0.1, 1.0, 10.0, 100.0]).unwrap();
    ensure(r.passed, || format!("{r:?}"))?;
    let constant = trace_constant(3.0, c3, g.max_mu_degree()).unwrap();
    for k in 1..=4 {
        let e = eigenvalue_lower_bound_check(&g, 3.0, c3, k).unwrap();
        let expected = 3.0 / (2.0 * E) * (k as f64 / (constant * 4.0)).powf(2.0 / 3.0);
        ensure(e.passed && (e.bound - expected).abs() < 1e-15, || format!("{e:?}"))?;
    }
    Ok(format!("c₃ = {c3:.7}, C_δ = {:.4e}", r.constant))
}

fn cycle_spectrum() -> Outcome {
    let text = include_str!("fixtures/cycle_spectra.json");
    let fixture: serde_json::Value = serde_json::from_str(text).unwrap();
    let cases = fixture["cases"].as_array().unwrap();
    let mut worst: f64 = 0.0;
    for case in cases {
        let n = case["n"].as_u64().unwrap() as usize;
        let k = case["k"].as_u64().unwrap() as u32;
        let j = case["j"].as_i64().unwrap();
        let want: Vec<f64> = case["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        let c = families::cycle(n, &el(j, k)).unwrap();
        let g = MagneticGraph::new(n, c.group(), c.edges().iter().map(|e| (e.u, e.v, e.weight, e.sig)), vec![2.0; n])
            .unwrap();
        let got = spectrum(&g, SignatureMode::Signed).unwrap().eigenvalues;
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(err <= 1e-9, || format!("n={n} k={k} j={j}: {got:?} vs {want:?}"))?;
        worst = worst.max(err);
    }
    ensure(cases.len() == 6 * 15, || format!("fixture has {} cases", cases.len()))?;
    Ok(format!("{} cycles, max deviation {worst:.1e}", cases.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("cycle frustration oracle", cycle_frustration_oracle),
        ("cycle Cheeger oracle", cycle_cheeger_oracle),
        ("variational sandwich", variational_sandwich),
        ("coarea inequality", coarea_property),
        ("Sobolev inequalities", sobolev_suite),
        ("averaging lemmas", key_lemmas),
        ("complex Bernoulli", complex_bernoulli),
        ("product additivity", product_additivity),
        ("spectral envelope", spectral_envelope),
        ("heat kernel suite", heat_kernel_suite),
        ("trace and eigenvalue bounds", trace_and_eigenvalue_bounds),
        ("magnetic cycle spectrum", cycle_spectrum),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || f == &id.to_string()) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
