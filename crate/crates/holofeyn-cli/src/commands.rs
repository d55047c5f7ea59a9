use crate::report::{complex, fmt_complex, real, Report};
use holofeyn::amplitude::{evaluate_w, layout_of, mc_oracle_w, required_test_form_degree, IntegralResult};
use holofeyn::anomaly::{anomaly_symbol, anomaly_vanishes_exactly, o_apply, outer_boundary_decay, quadratic_residual};
use holofeyn::polys::{check_inverse, corner_expand, d_inverse, kirchhoff_polynomial, laplacian_determinant_times_t, m_inverse_from, weighted_laplacian};
use holofeyn::quadrature::QuadConfig;
use holofeyn::testform::{TestForm, TestFormSpec};
use holofeyn::{DecoratedGraph, EdgeSubset, Error, Result};
use serde_json::json;
use std::path::{Path, PathBuf};

pub fn load_graph(path: &Path, d: Option<usize>) -> std::result::Result<DecoratedGraph, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    let g: DecoratedGraph = text.parse().map_err(|e: Error| format!("{}: {}", path.display(), e))?;
    Ok(match d {
        Some(d) if d != g.dim() => g.with_dim(d),
        _ => g,
    })
}

fn one_based(s: &EdgeSubset) -> Vec<usize> {
    s.indices().iter().map(|e| e + 1).collect()
}

fn graph_summary(g: &DecoratedGraph) -> serde_json::Value {
    let edges: Vec<_> = g.edges().iter().zip(g.decorations()).map(|(&(a, b), n)| json!({ "tail": a + 1, "head": b + 1, "n": n })).collect();
    json!({ "dim": g.dim(), "vertices": g.num_vertices(), "edges": edges })
}

fn header(r: &mut Report, command: &str, g: &DecoratedGraph) {
    r.set("command", json!(command));
    r.set("graph", graph_summary(g));
}

pub fn load_form(phi: &Option<PathBuf>, g: &DecoratedGraph, degree: i64) -> std::result::Result<TestForm, String> {
    let degree = degree.max(0) as usize;
    match phi {
        None => {
            let l = layout_of(g);
            Ok(TestForm::generic_packet(l.d, l.n_rel, degree))
        }
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {}", p.display(), e))?;
            let spec = TestFormSpec::from_json(&text).map_err(|e| format!("{}: {}", p.display(), e))?;
            let l = layout_of(g);
            spec.build(l.d, l.n_rel, degree).map_err(|e| format!("{}: {}", p.display(), e))
        }
    }
}

pub fn classify(g: &DecoratedGraph) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "classify", g);
    let d = g.dim();
    let v = g.is_laman(d)?;
    let cert = anomaly_vanishes_exactly(g, d)?;
    let laman_subs = g.laman_subgraphs(d)?;
    let witness = v.witness.as_ref().map(one_based);
    r.set("laman", json!(v.is_laman));
    r.set("witness", json!(witness));
    r.set("equality", json!([v.equality.0, v.equality.1]));
    r.set("first_betti", json!(g.first_betti()));
    r.set("required_form_degree", json!(required_test_form_degree(g, d)));
    r.set(
        "certificate",
        json!({ "vanishes": cert.vanishes, "power": cert.power, "violating_subgraph": cert.violating_subgraph.as_ref().map(one_based) }),
    );
    r.set("laman_subgraphs", json!(laman_subs.iter().map(one_based).collect::<Vec<_>>()));
    r.line(format!("laman: {}", v.is_laman));
    r.line(format!("witness: {}", v.witness.map(|w| w.to_string()).unwrap_or_else(|| "none".into())));
    r.line(format!("d|V| = {}, (d-1)|E| + d + 1 = {}", v.equality.0, v.equality.1));
    r.line(format!("first betti number: {}", g.first_betti()));
    r.line(format!("required form degree: {}", required_test_form_degree(g, d)));
    r.line(format!("anomaly vanishes: {} (power {})", cert.vanishes, cert.power));
    r.line(format!("laman subgraphs: {}", laman_subs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")));
    r.columns(&["key", "value"]);
    r.row(vec!["laman".into(), v.is_laman.to_string()]);
    r.row(vec!["first_betti".into(), g.first_betti().to_string()]);
    r.row(vec!["required_form_degree".into(), required_test_form_degree(g, d).to_string()]);
    r.row(vec!["anomaly_vanishes".into(), cert.vanishes.to_string()]);
    r.row(vec!["certificate_power".into(), cert.power.to_string()]);
    r.row(vec!["laman_subgraphs".into(), laman_subs.len().to_string()]);
    Ok(r)
}

pub fn kirchhoff(g: &DecoratedGraph) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "kirchhoff", g);
    let trees = g.spanning_trees()?;
    let k = kirchhoff_polynomial(g)?;
    let det = laplacian_determinant_times_t(g)?;
    let ok = k == det;
    r.set("kirchhoff", json!(k.to_string()));
    r.set("determinant_times_t", json!(det.to_string()));
    r.set("spanning_trees", json!(trees.iter().map(one_based).collect::<Vec<_>>()));
    r.set("identity", json!(if ok { "ok" } else { "violated" }));
    r.line(k.to_string());
    r.line(format!("spanning trees: {}", trees.len()));
    r.line(format!("identity: {}", if ok { "ok" } else { "violated" }));
    r.columns(&["quantity", "value"]);
    r.row(vec!["kirchhoff".into(), k.to_string()]);
    r.row(vec!["determinant_times_t".into(), det.to_string()]);
    r.row(vec!["spanning_trees".into(), trees.len().to_string()]);
    if !ok {
        r.fail(format!("det(M)·Πt = {} differs from the tree sum {}", det, k));
    }
    Ok(r)
}

fn matrix_strings<T: ToString>(m: &[Vec<T>]) -> Vec<Vec<String>> {
    m.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect()
}

pub fn minverse(g: &DecoratedGraph) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "minverse", g);
    let lap = weighted_laplacian(g)?;
    let inv = m_inverse_from(&lap)?;
    let check = check_inverse(&lap.matrix, &inv);
    let (m, mi) = (matrix_strings(&lap.matrix), matrix_strings(&inv));
    r.set("matrix", json!(m));
    r.set("inverse", json!(mi));
    r.set("kirchhoff", json!(lap.tree_polynomial.to_string()));
    r.set("identity", json!(if check.is_ok() { "ok" } else { "violated" }));
    r.columns(&["matrix", "row", "column", "entry"]);
    for (name, mat) in [("M", &m), ("Minv", &mi)] {
        for (i, row) in mat.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                r.line(format!("{}[{},{}] = {}", name, i + 1, j + 1, x));
                r.row(vec![name.into(), (i + 1).to_string(), (j + 1).to_string(), x.clone()]);
            }
        }
    }
    r.line(format!("identity: {}", if check.is_ok() { "ok" } else { "violated" }));
    if let Err(e) = check {
        r.fail(e.to_string());
    }
    Ok(r)
}

pub fn dinverse(g: &DecoratedGraph) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "dinverse", g);
    let data = d_inverse(g)?;
    let entries = matrix_strings(&data.entries);
    r.set("entries", json!(entries));
    r.set("kirchhoff", json!(data.kirchhoff.to_string()));
    r.set("inclusion", json!("ok"));
    r.columns(&["edge", "vertex", "entry"]);
    for (e, row) in entries.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            r.line(format!("dinv[e{},{}] = {}", e + 1, j + 1, x));
            r.row(vec![(e + 1).to_string(), (j + 1).to_string(), x.clone()]);
        }
    }
    r.line("inclusion: ok");
    Ok(r)
}

pub fn corners(g: &DecoratedGraph) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "corners", g);
    let k = kirchhoff_polynomial(g)?;
    let mut table = Vec::new();
    let mut bad = Vec::new();
    r.columns(&["subset", "connected", "first_betti", "min_rho_degree", "leading_coefficient"]);
    for sub in EdgeSubset::all_nonempty(g.num_edges()) {
        let ex = corner_expand(&k, &sub)?;
        let (deg, lead) = &ex[0];
        let connected = g.subset_is_connected(&sub);
        let h1 = g.subset_betti(&sub)?;
        if connected && (*deg != h1 as i32 || lead.is_zero()) {
            bad.push(sub.to_string());
        }
        table.push(json!({ "subset": one_based(&sub), "connected": connected, "first_betti": h1, "min_rho_degree": deg, "leading_coefficient": lead.to_string() }));
        r.line(format!("{:<16} connected={:<5} h1={} min_rho_degree={} leading={}", sub.to_string(), connected, h1, deg, lead));
        r.row(vec![sub.to_string(), connected.to_string(), h1.to_string(), deg.to_string(), lead.to_string()]);
    }
    r.set("subsets", json!(table));
    r.set("identity", json!(if bad.is_empty() { "ok" } else { "violated" }));
    r.line(format!("identity: {}", if bad.is_empty() { "ok" } else { "violated" }));
    if !bad.is_empty() {
        r.fail(format!("minimal rho degree differs from the first Betti number on {}", bad.join(" ")));
    }
    Ok(r)
}

fn integral_fields(r: &mut Report, key: &str, x: &IntegralResult) {
    r.set(key, json!({ "value": complex(x.value), "error": x.error, "evaluations": x.evaluations }));
}

pub struct EvalArgs {
    pub eps: f64,
    pub l: f64,
    pub mc: bool,
    pub samples: usize,
    pub seed: u64,
}

pub fn eval(g: &DecoratedGraph, phi: &TestForm, a: &EvalArgs, cfg: &QuadConfig) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "eval", g);
    r.set("eps", real(a.eps));
    r.set("L", real(a.l));
    let w = evaluate_w(g, phi, a.eps, a.l, cfg)?;
    integral_fields(&mut r, "quadrature", &w);
    r.line(format!("W: {} ± {:e} ({} evaluations)", fmt_complex(w.value), w.error, w.evaluations));
    r.columns(&["method", "re", "im", "error", "evaluations"]);
    r.row(vec!["quadrature".into(), w.value.re.to_string(), w.value.im.to_string(), w.error.to_string(), w.evaluations.to_string()]);
    if a.mc {
        let m = mc_oracle_w(g, phi, a.eps, a.l, a.samples, a.seed)?;
        let z = if m.error > 0.0 { (w.value - m.value).norm() / m.error } else { 0.0 };
        integral_fields(&mut r, "monte_carlo", &m);
        r.set("seed", json!(a.seed));
        r.set("standard_errors_apart", json!(z));
        r.line(format!("Monte Carlo: {} ± {:e} ({} samples, seed {})", fmt_complex(m.value), m.error, a.samples, a.seed));
        r.line(format!("difference: {:.3} standard errors", z));
        r.row(vec!["monte_carlo".into(), m.value.re.to_string(), m.value.im.to_string(), m.error.to_string(), m.evaluations.to_string()]);
    }
    Ok(r)
}

pub fn mc_oracle(g: &DecoratedGraph, phi: &TestForm, a: &EvalArgs) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "mc-oracle", g);
    r.set("eps", real(a.eps));
    r.set("L", real(a.l));
    r.set("seed", json!(a.seed));
    let m = mc_oracle_w(g, phi, a.eps, a.l, a.samples, a.seed)?;
    integral_fields(&mut r, "monte_carlo", &m);
    r.line(format!("W (Monte Carlo): {} ± {:e} ({} samples, seed {})", fmt_complex(m.value), m.error, a.samples, a.seed));
    r.columns(&["re", "im", "standard_error", "samples", "seed"]);
    r.row(vec![m.value.re.to_string(), m.value.im.to_string(), m.error.to_string(), m.evaluations.to_string(), a.seed.to_string()]);
    Ok(r)
}

pub fn anomaly(g: &DecoratedGraph, phi: Option<&TestForm>, cfg: &QuadConfig) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "anomaly", g);
    let cert = anomaly_vanishes_exactly(g, g.dim())?;
    r.set("certificate", json!({ "vanishes": cert.vanishes, "power": cert.power, "violating_subgraph": cert.violating_subgraph.as_ref().map(one_based) }));
    r.columns(&["alpha", "re", "im", "error"]);
    if cert.vanishes {
        r.set("coefficients", json!([]));
        r.line(format!("anomaly vanishes (power {})", cert.power));
        return Ok(r);
    }
    let sym = anomaly_symbol(g, cfg)?;
    r.set("order", json!(sym.order));
    let coeffs: Vec<_> = sym
        .coefficients
        .iter()
        .map(|(a, c)| json!({ "alpha": a, "value": complex(*c), "error": sym.errors.get(a).copied().unwrap_or(0.0) }))
        .collect();
    r.set("coefficients", json!(coeffs));
    r.line(format!("symbol of order {} in k/2, {} coefficients", sym.order, sym.coefficients.len()));
    for (a, c) in &sym.coefficients {
        let e = sym.errors.get(a).copied().unwrap_or(0.0);
        r.line(format!("  {:?}: {} ± {:e}", a, fmt_complex(*c), e));
        let alpha: Vec<String> = a.iter().map(|x| x.to_string()).collect();
        r.row(vec![alpha.join(" "), c.re.to_string(), c.im.to_string(), e.to_string()]);
    }
    if !sym.check_order() {
        r.fail("stored multi-index of the wrong total degree");
    }
    if let Some(phi) = phi {
        let v = o_apply(&sym, phi)?;
        r.set("applied", complex(v));
        r.line(format!("O(phi): {}", fmt_complex(v)));
    }
    Ok(r)
}

pub fn quadratic_check(g: &DecoratedGraph, phi: &TestForm, tol: f64, cfg: &QuadConfig) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "quadratic-check", g);
    let rep = quadratic_residual(g, phi, cfg)?;
    let rel = rep.relative_residual();
    r.set("residual", complex(rep.residual));
    r.set("relative_residual", json!(rel));
    r.set("max_term", json!(rep.max_term));
    r.set("error", json!(rep.error));
    r.set("tolerance", json!(tol));
    r.set("face_sum", complex(rep.total_faces));
    let terms: Vec<_> = rep
        .terms
        .iter()
        .map(|t| json!({ "subset": one_based(&t.subset), "laman": t.laman, "permutation_sign": t.permutation_sign, "face": complex(t.face_integral), "composed": complex(t.composed), "magnitude": t.composed.norm(), "error": t.error }))
        .collect();
    r.set("terms", json!(terms));
    r.columns(&["subset", "laman", "permutation_sign", "composed_re", "composed_im", "magnitude"]);
    for t in &rep.terms {
        r.line(format!("{:<12} laman={:<5} sign={:+} composed={} |.|={:e}", t.subset.to_string(), t.laman, t.permutation_sign, fmt_complex(t.composed), t.composed.norm()));
        r.row(vec![t.subset.to_string(), t.laman.to_string(), t.permutation_sign.to_string(), t.composed.re.to_string(), t.composed.im.to_string(), t.composed.norm().to_string()]);
    }
    r.line(format!("residual: {} (relative {:e}, max term {:e})", fmt_complex(rep.residual), rel, rep.max_term));
    if !(rel < tol) {
        r.fail(format!("relative residual {:e} is not below {:e}", rel, tol));
    }
    Ok(r)
}

pub fn boundary_decay(g: &DecoratedGraph, phi: &TestForm, ls: &[f64], strict: bool, cfg: &QuadConfig) -> Result<Report> {
    let mut r = Report::default();
    header(&mut r, "boundary-decay", g);
    let pts = outer_boundary_decay(g, phi, ls, cfg)?;
    let decreasing = pts.windows(2).all(|w| w[1].magnitude < w[0].magnitude);
    let all_zero = pts.iter().all(|p| p.magnitude == 0.0);
    let ratio = match (pts.first(), pts.last()) {
        (Some(a), Some(b)) if a.magnitude > 0.0 => Some(b.magnitude / a.magnitude),
        _ => None,
    };
    r.set("points", json!(pts.iter().map(|p| json!({ "L": p.l, "value": complex(p.value), "magnitude": p.magnitude, "error": p.error })).collect::<Vec<_>>()));
    r.set("strictly_decreasing", json!(decreasing));
    r.set("last_over_first", json!(ratio));
    r.columns(&["L", "re", "im", "magnitude", "error"]);
    for p in &pts {
        r.line(format!("L={:<6} magnitude {:e} (error {:e})", p.l, p.magnitude, p.error));
        r.row(vec![p.l.to_string(), p.value.re.to_string(), p.value.im.to_string(), p.magnitude.to_string(), p.error.to_string()]);
    }
    r.line(format!("strictly decreasing: {}", decreasing));
    if let Some(x) = ratio {
        r.line(format!("last/first: {:.4}", x));
    }
    if strict && !decreasing && !all_zero {
        r.fail("outer-boundary magnitudes are not strictly decreasing");
    }
    Ok(r)
}
