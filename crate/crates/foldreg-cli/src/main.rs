use clap::{Args, Parser, Subcommand, ValueEnum};
use foldreg::canard;
use foldreg::dynamics;
use foldreg::equilibria;
use foldreg::filippov;
use foldreg::melnikov::{Criticality, Profile};
use foldreg::reproduce;
use foldreg::scenario::{transition_from_label, Scenario};
use foldreg::slowfast;
use foldreg::{Error, Family64, Regularized64, Transition64};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "foldreg", version, about = "Fold-fold singularities of planar Filippov systems and their regularizations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Built-in scenario id (ii-basic, vi-basic, bfield, ex1, ex1:<eta>) or a scenario JSON file
    #[arg(long, global = true, default_value = "ii-basic")]
    scenario: String,
    /// Transition function: linear, cubic, quintic, septic or odd:a1,a3,...
    #[arg(long, global = true)]
    phi: Option<String>,
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Regularization parameter; repeatable where a command accepts several
    #[arg(long, global = true)]
    epsilon: Vec<f64>,
    /// Write outputs into this directory instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fold-fold diagnosis of the scenario at alpha = 0
    Classify,
    /// Bifurcation chart and the curves D, H and C
    Curves,
    /// Critical manifold samples (x, m0, stability)
    Manifold {
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 0.5)]
        x_max: f64,
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// Melnikov function profiles, cycle zeros and the saddle node
    Melnikov {
        #[arg(long, allow_hyphen_values = true)]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Maximal Canard slope, closed form and numeric
    Canard,
    /// Integrate one trajectory in the fast chart
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
        t_end: f64,
    },
    /// Phase portrait from a grid of initial conditions
    Portrait {
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 0.3)]
        x_span: f64,
        #[arg(long, default_value_t = 3.0)]
        v_span: f64,
    },
    /// Critical-point kind and periodic orbits along an alpha range
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        alpha_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha_max: f64,
        #[arg(long, default_value_t = 21)]
        n: usize,
    },
    /// Computed-versus-published table for a worked example (all when omitted)
    Reproduce {
        #[arg(long)]
        example: Option<String>,
    },
}

struct Output {
    name: &'static str,
    json: Option<Value>,
    csv: Option<String>,
    svg: Option<String>,
}

impl Output {
    fn new(name: &'static str) -> Self {
        Output { name, json: None, csv: None, svg: None }
    }
}

fn emit(out: Output, g: &Global, default: Format) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Usage(e.to_string());
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("JSON value serializes") + "\n";
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir).map_err(io)?;
        if let Some(v) = &out.json {
            std::fs::write(dir.join(format!("{}.json", out.name)), pretty(v)).map_err(io)?;
        }
        if let Some(c) = &out.csv {
            std::fs::write(dir.join(format!("{}.csv", out.name)), c).map_err(io)?;
        }
        if let Some(s) = &out.svg {
            std::fs::write(dir.join(format!("{}.svg", out.name)), s).map_err(io)?;
        }
        return Ok(());
    }
    let fmt = g.format.unwrap_or(default);
    let text = match fmt {
        Format::Json => out.json.as_ref().map(pretty),
        Format::Csv => out.csv.clone(),
        Format::Svg => out.svg.clone(),
    };
    match text {
        Some(t) => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(t.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(io(e)),
                _ => Ok(()),
            }
        }
        None => Err(Error::Usage("this command has no output in the requested format".into())),
    }
}

fn load(g: &Global) -> Result<(Scenario<f64>, Transition64), Error> {
    let sc = if g.scenario.ends_with(".json") {
        let text = std::fs::read_to_string(&g.scenario).map_err(|e| Error::Usage(format!("{}: {e}", g.scenario)))?;
        Scenario::from_json(&text)?
    } else {
        Scenario::builtin(&g.scenario)?
    };
    let phi = match &g.phi {
        Some(l) => transition_from_label(l)?,
        None => sc.transition(None)?,
    };
    Ok((sc, phi))
}

fn eps_list(g: &Global, default: &[f64]) -> Vec<f64> {
    if g.epsilon.is_empty() {
        default.to_vec()
    } else {
        g.epsilon.clone()
    }
}

fn to_json<S: serde::Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report serializes")
}

fn err_json(e: &Error) -> Value {
    json!({ "error": e.kind(), "message": e.to_string() })
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn classify(g: &Global) -> Result<Output, Error> {
    let (sc, _) = load(g)?;
    let d = filippov::diagnose(&sc.family)?;
    let mut v = to_json(&d);
    v["scenario"] = json!(sc.id);
    let class = match d.case {
        'A' => "visible-visible",
        'B' => "invisible-invisible",
        _ => "visible-invisible",
    };
    v["class"] = json!(class);
    v["det_zx"] = json!(d.det_zx0);
    let mut o = Output::new("classify");
    o.json = Some(v);
    Ok(o)
}

fn curves(g: &Global) -> Result<Output, Error> {
    let (sc, phi) = load(g)?;
    let chart = equilibria::chart(&sc.family, &phi)?;
    let delta_c = canard::canard_constants(&sc.family, &phi).ok().map(|r| r.delta_c);
    let mut rows = Vec::new();
    for e in eps_list(g, &equilibria::NUMERIC_H_EPS) {
        let d = equilibria::d_curve(&chart.closed, e);
        let ah = chart.numeric_h.iter().find(|(x, _)| *x == e).map(|p| p.1).or_else(|| {
            (chart.closed.det_x < 0.0).then(|| equilibria::hopf_alpha(&sc.family, &phi, e, chart.closed.delta_h).ok()).flatten()
        });
        rows.push(vec![e.to_string(), opt(d.map(|d| d.0)), opt(d.map(|d| d.1)), opt(ah), opt(delta_c.map(|c| c * e))]);
    }
    let mut v = to_json(&chart);
    v["delta_C"] = json!(delta_c);
    v["scenario"] = json!(sc.id);
    v["phi"] = json!(phi.label());
    let mut o = Output::new("curves");
    o.json = Some(v);
    o.csv = Some(csv_text(&["epsilon", "alpha_D_minus", "alpha_D_plus", "alpha_H", "alpha_C"], rows));
    Ok(o)
}

fn manifold(g: &Global, x_min: f64, x_max: f64, n: usize) -> Result<Output, Error> {
    let (sc, phi) = load(g)?;
    let reg = Regularized64::new(sc.family.clone(), phi, g.alpha, 1.0)?;
    let rows = slowfast::sample_manifold(&reg, x_min, x_max, n)
        .into_iter()
        .map(|(x, v, s)| vec![x.to_string(), v.to_string(), to_json(&s).as_str().unwrap_or_default().to_string()]);
    let mut o = Output::new("manifold");
    o.csv = Some(csv_text(&["x", "m0", "stability"], rows));
    Ok(o)
}

fn melnikov(g: &Global, deltas: &[f64], n: usize) -> Result<Output, Error> {
    let (sc, phi) = load(g)?;
    let prof = Profile::new(&sc.family, &phi)?;
    let closed = equilibria::closed_chart_real(&sc.family, &phi)?;
    let deltas: Vec<f64> = if deltas.is_empty() { vec![closed.delta_h] } else { deltas.to_vec() };
    let crit: Result<Criticality, Error> = prof.hopf_criticality(closed.delta_h);
    let mut rows = Vec::new();
    let mut zeros = Vec::new();
    for &d in &deltas {
        for i in 1..=n {
            let v = if i == n { prof.domain_top } else { prof.vstar + (prof.domain_top - prof.vstar) * i as f64 / n as f64 };
            rows.push(vec![d.to_string(), v.to_string(), prof.melnikov(v, d)?.to_string()]);
        }
        let z = prof.cycle_zeros(d)?;
        zeros.push(json!({ "delta": d, "zeros": z.iter().map(|(v, s)| json!({"v0": v, "slope_sign": s})).collect::<Vec<_>>() }));
    }
    let sn = match prof.saddle_node() {
        Ok((v, d)) => json!({ "v_S": v, "delta_S": d }),
        Err(e) => err_json(&e),
    };
    let mut o = Output::new("melnikov");
    o.csv = Some(csv_text(&["delta", "v0", "M"], rows));
    o.json = Some(json!({
        "scenario": sc.id,
        "phi": phi.label(),
        "vstar": prof.vstar,
        "domain_top": prof.domain_top,
        "delta_H": closed.delta_h,
        "criticality": crit.as_ref().map(to_json).unwrap_or_else(err_json),
        "zeros": zeros,
        "saddle_node": sn,
    }));
    Ok(o)
}

fn canard_cmd(g: &Global) -> Result<Output, Error> {
    let (sc, phi) = load(g)?;
    let rep = canard::canard_constants(&sc.family, &phi)?;
    let numeric: Vec<Value> = eps_list(g, &[1e-3, 4e-3])
        .par_iter()
        .map(|&e| match canard::numeric_canard(&sc.family, &phi, e) {
            Ok(d) => json!({ "epsilon": e, "delta_C": d }),
            Err(err) => json!({ "epsilon": e, "error": err.kind(), "message": err.to_string() }),
        })
        .collect();
    let mut o = Output::new("canard");
    o.json = Some(json!({
        "scenario": sc.id,
        "phi": phi.label(),
        "vbar": rep.vbar,
        "M": rep.m,
        "N": rep.n,
        "delta_C_closed": rep.delta_c,
        "delta_C_numeric": numeric,
        "gap_slope": rep.gap_slope_c,
    }));
    Ok(o)
}

fn first_eps(g: &Global, default: f64) -> f64 {
    g.epsilon.first().copied().unwrap_or(default)
}

fn simulate(g: &Global, x0: f64, v0: f64, t_end: f64) -> Result<Output, Error> {
    let (sc, phi) = load(g)?;
    let reg = Regularized64::new(sc.family.clone(), phi, g.alpha, first_eps(g, 0.006))?;
    let tr = dynamics::integrate(&reg, (x0, v0), t_end, &[])?;
    let rows = tr.samples.iter().map(|(t, x, v)| vec![t.to_string(), x.to_string(), v.to_string()]);
    let mut o = Output::new("simulate");
    o.csv = Some(csv_text(&["t", "x", "v"], rows));
    o.json = Some(json!({ "events": to_json(&tr.events) }));
    Ok(o)
}

struct Canvas {
    w: f64,
    h: f64,
    x: (f64, f64),
    v: (f64, f64),
    body: String,
}

impl Canvas {
    fn px(&self, x: f64, v: f64) -> (f64, f64) {
        let vc = v.clamp(self.v.0, self.v.1);
        ((x - self.x.0) / (self.x.1 - self.x.0) * self.w, (1.0 - (vc - self.v.0) / (self.v.1 - self.v.0)) * self.h)
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for &(x, v) in pts {
            let (a, b) = self.px(x, v);
            let _ = write!(d, "{a:.2},{b:.2} ");
        }
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{}"/>"#,
            d.trim_end()
        );
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.w, self.h, self.w, self.h, self.body
        )
    }
}

fn portrait(g: &Global, grid: usize, x_span: f64, v_span: f64) -> Result<Output, Error> {
    let (sc, phi) = load(g)?;
    let eps = first_eps(g, 0.006);
    let reg = Regularized64::new(sc.family.clone(), phi, g.alpha, eps)?;
    let mut c = Canvas { w: 600.0, h: 400.0, x: (-x_span, x_span), v: (-v_span, v_span), body: String::new() };
    c.polyline(&[(-x_span, 1.0), (x_span, 1.0)], "#999999", 1.0);
    c.polyline(&[(-x_span, -1.0), (x_span, -1.0)], "#999999", 1.0);
    let starts: Vec<(f64, f64)> = (0..grid)
        .flat_map(|i| (0..grid).map(move |j| (i, j)))
        .map(|(i, j)| {
            let s = |k: usize, span: f64| -span + 2.0 * span * (k as f64 + 0.5) / grid as f64;
            (s(i, x_span), s(j, v_span))
        })
        .collect();
    let t_end = 2.0 / eps;
    let paths: Vec<Vec<(f64, f64)>> = starts
        .par_iter()
        .map(|&p| {
            let fwd = dynamics::integrate(&reg, p, t_end, &[]);
            fwd.map(|t| t.samples.iter().map(|s| (s.1, s.2)).collect()).unwrap_or_default()
        })
        .collect();
    for p in &paths {
        let clipped: Vec<(f64, f64)> = p.iter().copied().filter(|(x, _)| x.abs() <= x_span).collect();
        c.polyline(&clipped, "#1f4e9c", 0.6);
    }
    let m = slowfast::sample_manifold(&Regularized64::new(sc.family.clone(), reg.phi.clone(), g.alpha, 1.0)?, -x_span, x_span, 200);
    let mut seg = Vec::new();
    for (x, v, s) in m {
        let color = if s == slowfast::Stability::Attracting { "#000000" } else { "#c03030" };
        seg.push((x, v, color));
    }
    for w in seg.windows(2) {
        c.polyline(&[(w[0].0, w[0].1), (w[1].0, w[1].1)], w[0].2, 2.0);
    }
    if let Ok((sec, vp)) = dynamics::critical_section(&reg) {
        if let Ok(orbits) = dynamics::scan_orbits(&reg, sec, vp + 1e-3, vp + v_span, 40) {
            for o in orbits {
                if let Ok(t) = dynamics::integrate(&reg, o.section_point, o.period, &[]) {
                    let pts: Vec<(f64, f64)> = t.samples.iter().map(|s| (s.1, s.2)).collect();
                    c.polyline(&pts, "#e08000", 2.0);
                }
            }
        }
    }
    let mut o = Output::new("portrait");
    o.svg = Some(c.finish());
    Ok(o)
}

fn sweep(g: &Global, lo: f64, hi: f64, n: usize) -> Result<Output, Error> {
    let (sc, phi) = load(g)?;
    let eps = first_eps(g, 0.006);
    let fam: Family64 = sc.family.oriented().0;
    let base = Regularized64::new(fam, phi, lo, eps)?;
    let alphas: Vec<f64> = (0..n).map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect();
    let rows: Vec<Vec<String>> = alphas
        .par_iter()
        .map(|&a| {
            let reg = match base.with_params(a, eps) {
                Ok(r) => r,
                Err(e) => return vec![a.to_string(), e.kind().into(), String::new(), String::new()],
            };
            let kind = equilibria::classify_region(&reg)
                .map(|k| to_json(&k).as_str().unwrap_or_default().to_string())
                .unwrap_or_else(|e| e.kind().into());
            let (count, stab) = match dynamics::critical_section(&reg)
                .and_then(|(sec, vp)| dynamics::scan_orbits(&reg, sec, vp + 1e-3, vp + 2.0, 60))
            {
                Ok(o) => (
                    o.len().to_string(),
                    o.iter().map(|c| to_json(&c.stability).as_str().unwrap_or_default().to_string()).collect::<Vec<_>>().join(";"),
                ),
                Err(e) => (String::new(), e.kind().into()),
            };
            vec![a.to_string(), kind, count, stab]
        })
        .collect();
    let mut o = Output::new("sweep");
    o.csv = Some(csv_text(&["alpha", "kind", "orbits", "stabilities"], rows));
    Ok(o)
}

fn reproduce_cmd(example: Option<&str>) -> Result<(Output, usize), Error> {
    let ids: Vec<&str> = match example {
        Some(id) => vec![id],
        None => reproduce::EXAMPLES.to_vec(),
    };
    let reports = ids.iter().map(|id| reproduce::reproduce(id)).collect::<Result<Vec<_>, _>>()?;
    let failures: usize = reports.iter().map(|r| r.failures()).sum();
    let mut rows = Vec::new();
    for r in &reports {
        for c in &r.checks {
            rows.push(vec![
                r.id.clone(),
                c.quantity.clone(),
                c.computed.clone(),
                c.expected.clone(),
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
            ]);
        }
    }
    let mut o = Output::new("reproduce");
    o.json = Some(to_json(&reports));
    o.csv = Some(csv_text(&["example", "quantity", "computed", "expected", "status"], rows));
    Ok((o, failures))
}

fn run(cli: Cli) -> Result<usize, Error> {
    let g = &cli.global;
    let (out, default, failures) = match &cli.cmd {
        Cmd::Classify => (classify(g)?, Format::Json, 0),
        Cmd::Curves => (curves(g)?, Format::Json, 0),
        Cmd::Manifold { x_min, x_max, n } => (manifold(g, *x_min, *x_max, *n)?, Format::Csv, 0),
        Cmd::Melnikov { delta, n } => (melnikov(g, delta, *n)?, Format::Json, 0),
        Cmd::Canard => (canard_cmd(g)?, Format::Json, 0),
        Cmd::Simulate { x0, v0, t_end } => (simulate(g, *x0, *v0, *t_end)?, Format::Csv, 0),
        Cmd::Portrait { grid, x_span, v_span } => (portrait(g, *grid, *x_span, *v_span)?, Format::Svg, 0),
        Cmd::Sweep { alpha_min, alpha_max, n } => (sweep(g, *alpha_min, *alpha_max, *n)?, Format::Csv, 0),
        Cmd::Reproduce { example } => {
            let (o, f) = reproduce_cmd(example.as_deref())?;
            (o, Format::Csv, f)
        }
    };
    emit(out, g, default)?;
    Ok(failures)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(f) => ExitCode::from(f.min(255) as u8),
        Err(e) => {
            eprintln!("{}: {e}", e.kind());
            ExitCode::from(if matches!(e, Error::Usage(_)) { 2 } else { 1 })
        }
    }
}
