use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use susyode::darboux::{search_cofactor, verify_darboux, verify_first_integral, Certificate, PolyVectorField};
use susyode::dsl::{generator_index, parse_expr, parse_system, BuiltSystem, IntegralLine, Scope, SystemFile};
use susyode::grassmann::{AlgebraCtx, Multivector};
use susyode::nonassoc::{algebra_report, homogenize, polarize, taylor_series};
use susyode::solve::{
    expand_to_layers, integrate, monitor_invariants, picard_iterate, transform_solution, transform_trajectory,
    write_csv, Assignment, LayerSystem, SolveError, Trajectory, DEFAULT_STEP, DEFAULT_TOL,
};
use susyode::superspace::{check_susy_invariance, ComponentSystem, SusyGenerator};
use susyode::{GradedPoly, Parity, Symbol};

use crate::args::{Cli, Command};
use crate::{CliError, Report, Style};

/// Generators used when neither the file nor the command line sets `L`.
const DEFAULT_GENERATORS: u32 = 2;
/// Pass threshold for series partial sums against RK4.
const SERIES_TOL: f64 = 1e-6;

struct Loaded {
    file: SystemFile,
    built: BuiltSystem,
    name: String,
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn load(path: Option<&Path>) -> Result<Loaded, CliError> {
    let path = path.ok_or_else(|| usage("--system <file> is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let file = parse_system(&text).map_err(|e| usage(format!("{}:{e}", path.display())))?;
    let built = file.build().map_err(|e| usage(format!("{}:{e}", path.display())))?;
    let name = file
        .meta("name")
        .map(str::to_string)
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_default();
    Ok(Loaded { file, built, name })
}

fn parse_generator(text: &str, n: u8) -> Result<SusyGenerator, CliError> {
    let g = match text {
        "Q" => SusyGenerator::Q,
        _ => text
            .strip_prefix('Q')
            .and_then(|i| i.parse::<u8>().ok())
            .filter(|i| (1..=n).contains(i))
            .map(SusyGenerator::Qi)
            .ok_or_else(|| usage(format!("generator `{text}` is not Q or Q1..Q{n}")))?,
    };
    Ok(g)
}

fn generator_of(loaded: &Loaded, flag: Option<&str>) -> Result<SusyGenerator, CliError> {
    parse_generator(
        flag.or(loaded.file.solve.generator.as_deref()).unwrap_or("Q"),
        loaded.built.space.n,
    )
}

fn user_poly(loaded: &Loaded, text: &str) -> Result<GradedPoly, CliError> {
    let e = parse_expr(text).map_err(|e| usage(format!("in `{text}`: {e}")))?;
    loaded
        .file
        .poly(&loaded.built.space, &e, Scope::Components)
        .and_then(|p| {
            p.substitute(&loaded.built.values)
                .map_err(|e| susyode::dsl::DslError::invalid(Default::default(), e.to_string()))
        })
        .map_err(|e| usage(format!("in `{text}`: {e}")))
}

fn field_of(sys: &ComponentSystem) -> Result<PolyVectorField, CliError> {
    PolyVectorField::from_system(sys).map_err(usage)
}

pub fn execute(cli: &Cli, style: Style) -> Result<Report, CliError> {
    let loaded = load(cli.system.as_deref())?;
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    match &cli.command {
        Command::Expand => Ok(expand(&loaded)),
        Command::CheckSusy { generator } => check_susy(&loaded, generator.as_deref(), style),
        Command::Darboux { f, kappa, search } => darboux(&loaded, f, kappa.as_deref(), *search, style),
        Command::FirstIntegral { expr, name } => first_integral(&loaded, expr.as_deref(), name.as_deref(), style),
        Command::Integrate { t_end, h, generators } => run_integrate(&loaded, *t_end, *h, *generators, tol, style),
        Command::Picard { iters } => picard(&loaded, *iters),
        Command::Transform { epsilon, generator } => transform(&loaded, epsilon, generator.as_deref(), tol, style),
        Command::Series { order, trials, at } => series(
            &loaded,
            *order,
            *trials,
            *at,
            cli.seed,
            cli.tol.unwrap_or(SERIES_TOL),
            style,
        ),
        Command::Homogenize { var } => run_homogenize(&loaded, var),
    }
}

fn expand(loaded: &Loaded) -> Report {
    let sys = &loaded.built.system;
    let equations: Vec<Value> = sys
        .equations
        .iter()
        .map(|e| json!({ "lhs": e.symbol.derivative(e.order).to_string(), "rhs": e.rhs.to_string() }))
        .collect();
    Report {
        text: sys.to_string(),
        json: json!({ "system": loaded.name, "equations": equations }),
        csv: None,
        pass: true,
    }
}

fn check_susy(loaded: &Loaded, flag: Option<&str>, style: Style) -> Result<Report, CliError> {
    let n = loaded.built.space.n;
    let generators = if flag == Some("all") {
        std::iter::once(SusyGenerator::Q)
            .chain((1..=n).map(SusyGenerator::Qi))
            .collect()
    } else {
        vec![generator_of(loaded, flag)?]
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut pass = true;
    for g in generators {
        let r = check_susy_invariance(&loaded.built.system, g).map_err(usage)?;
        writeln!(text, "{} {g} (eps = {})", style.verdict(r.invariant), r.epsilon).unwrap();
        for e in r.residuals.iter().filter(|e| !e.poly.is_zero()) {
            writeln!(text, "  {}: residual {}", e.equation, e.residual).unwrap();
        }
        pass &= r.invariant;
        reports.push(r);
    }
    Ok(Report {
        text,
        json: json!({ "system": loaded.name, "checks": reports }),
        csv: None,
        pass,
    })
}

fn certificate_text(c: &Certificate, label: &str, style: Style) -> String {
    let mut s = format!("{} {label}: {}\n", style.verdict(c.holds), c.object);
    if let Some(k) = &c.cofactor {
        writeln!(s, "  cofactor: {k}").unwrap();
    }
    writeln!(s, "  residual: {}", c.residual).unwrap();
    if c.cofactor.is_some() {
        writeln!(s, "  invariant locus: {}", c.locus).unwrap();
    }
    s
}

fn darboux(
    loaded: &Loaded,
    f: &str,
    kappa: Option<&str>,
    search: Option<u32>,
    style: Style,
) -> Result<Report, CliError> {
    let field = field_of(&loaded.built.system)?;
    let f = user_poly(loaded, f)?;
    let kappa = match (kappa, search) {
        (Some(k), _) => Some(user_poly(loaded, k)?),
        (None, Some(bound)) => search_cofactor(&field, &f, bound).map_err(usage)?,
        (None, None) => return Err(usage("give --kappa or --search")),
    };
    match kappa {
        Some(k) => {
            let c = verify_darboux(&field, &f, &k).map_err(usage)?;
            Ok(Report {
                text: certificate_text(&c, "darboux", style),
                pass: c.holds,
                json: json!(c),
                csv: None,
            })
        }
        None => {
            let bound = search.unwrap_or_default();
            Ok(Report {
                text: format!("{} no cofactor of degree <= {bound} for {f}\n", style.verdict(false)),
                json: json!({ "field": field.to_string(), "object": f.to_string(), "type": "darboux", "cofactor": null, "holds": false, "search_bound": bound }),
                csv: None,
                pass: false,
            })
        }
    }
}

/// System in which an integral line is claimed: its `when` names set to zero.
fn restricted(loaded: &Loaded, line: &IntegralLine) -> Result<ComponentSystem, CliError> {
    let space = &loaded.built.space;
    let mut consts = BTreeMap::new();
    let mut comps = std::collections::BTreeSet::new();
    for name in &line.when {
        if let Some(c) = space.constants.get(name) {
            consts.insert(c.clone(), GradedPoly::zero());
        } else if let Some(c) = space.component(name) {
            comps.insert(c.clone());
        }
    }
    let sys = loaded.built.system.substitute_constants(&consts).map_err(usage)?;
    Ok(if comps.is_empty() {
        sys
    } else {
        sys.restrict_to_zero(&comps)
    })
}

fn first_integral(loaded: &Loaded, expr: Option<&str>, name: Option<&str>, style: Style) -> Result<Report, CliError> {
    let lines: Vec<IntegralLine> = match expr {
        Some(text) => {
            let e = parse_expr(text).map_err(|e| usage(format!("in `{text}`: {e}")))?;
            vec![IntegralLine {
                name: "expr".into(),
                expr: e,
                when: vec![],
                at: Default::default(),
            }]
        }
        None => loaded
            .file
            .integrals
            .iter()
            .filter(|i| name.is_none_or(|n| i.name == n))
            .cloned()
            .collect(),
    };
    if lines.is_empty() {
        return Err(usage("no integrals to check"));
    }
    let mut text = String::new();
    let mut certs = Vec::new();
    let mut pass = true;
    for line in &lines {
        let integral = loaded.file.integral(&loaded.built.space, line).map_err(usage)?;
        let field = field_of(&restricted(loaded, line)?)?;
        let c = verify_first_integral(&field, &integral).map_err(usage)?;
        let mut label = line.name.clone();
        if !line.when.is_empty() {
            write!(label, " (when {} = 0)", line.when.join(" = 0, ")).unwrap();
        }
        text.push_str(&certificate_text(&c, &label, style));
        pass &= c.holds;
        certs.push(json!({ "name": line.name, "when": line.when, "certificate": c }));
    }
    Ok(Report {
        text,
        json: json!({ "system": loaded.name, "integrals": certs }),
        csv: None,
        pass,
    })
}

/// Everything needed to integrate a file numerically.
struct Numeric {
    assignment: Assignment,
    layer: LayerSystem,
    init: Vec<f64>,
    t0: f64,
    t_end: f64,
    h: f64,
}

fn prepare(loaded: &Loaded, t_end: Option<f64>, h: Option<f64>, generators: u32) -> Result<Numeric, CliError> {
    let file = &loaded.file;
    let ctx = AlgebraCtx::new(generators).map_err(usage)?;
    let assignment = file.assignment(&loaded.built, ctx).map_err(usage)?;
    let layer = expand_to_layers(&loaded.built.system, &assignment).map_err(usage)?;
    let given = file.initial_values(&loaded.built, &assignment).map_err(usage)?;
    let values: BTreeMap<Symbol, Multivector<f64>> = layer
        .variables
        .iter()
        .map(|v| {
            (
                v.clone(),
                given.get(v).map_or_else(|| Multivector::zero(ctx), Multivector::to_f64),
            )
        })
        .collect();
    let init = layer.state_from(&values).map_err(usage)?;
    let setting = |k: &str| file.setting(k).map_err(usage);
    Ok(Numeric {
        t0: setting("t0")?.unwrap_or(0.0),
        t_end: t_end.map_or_else(|| Ok(setting("t_end")?.unwrap_or(1.0)), Ok::<f64, CliError>)?,
        h: h.map_or_else(|| Ok(setting("h")?.unwrap_or(DEFAULT_STEP)), Ok::<f64, CliError>)?,
        assignment,
        layer,
        init,
    })
}

fn csv_of(traj: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_csv(traj, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn state_json(labels: &[String], state: &[f64]) -> Value {
    labels
        .iter()
        .zip(state)
        .map(|(l, v)| (l.clone(), json!(v)))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

/// A `when` clause holds numerically if every named constant is zero.
fn when_holds(loaded: &Loaded, assignment: &Assignment, line: &IntegralLine) -> bool {
    line.when.iter().all(|n| {
        loaded
            .built
            .space
            .constants
            .get(n)
            .is_some_and(|c| assignment.get(c).is_none_or(Multivector::is_zero))
    })
}

fn run_integrate(
    loaded: &Loaded,
    t_end: Option<f64>,
    h: Option<f64>,
    generators: Option<u32>,
    tol: f64,
    style: Style,
) -> Result<Report, CliError> {
    let l = generators.or(loaded.file.generators).unwrap_or(DEFAULT_GENERATORS);
    let num = prepare(loaded, t_end, h, l)?;
    let mut text = String::new();
    writeln!(
        text,
        "{}: {} unknowns over L={l}, t in [{}, {}], h = {}",
        loaded.name,
        num.layer.len(),
        num.t0,
        num.t_end,
        num.h
    )
    .unwrap();
    let (traj, blow_up) = match integrate(&num.layer, &num.init, num.t0, num.t_end, num.h) {
        Ok(t) => (t, None),
        Err(SolveError::BlowUp { t_last, trajectory }) => (*trajectory, Some(t_last)),
        Err(e) => return Err(usage(e)),
    };
    let mut pass = true;
    if let Some(t) = blow_up {
        writeln!(text, "{} solution blew up after t = {t}", style.verdict(false)).unwrap();
        pass = false;
    }
    writeln!(text, "state at t = {}:", traj.time(traj.len() - 1)).unwrap();
    for (label, v) in traj.labels.iter().zip(traj.last()) {
        writeln!(text, "  {label} = {v:e}").unwrap();
    }
    let mut integrals = Vec::new();
    for line in &loaded.file.integrals {
        if !when_holds(loaded, &num.assignment, line) {
            writeln!(text, "skip {}: needs {} = 0", line.name, line.when.join(" = 0, ")).unwrap();
            continue;
        }
        let integral = loaded.file.integral(&loaded.built.space, line).map_err(usage)?;
        let (ok, drift, note) = match monitor_invariants(&num.layer, &traj, &integral, &num.assignment) {
            Ok(d) => (d <= tol, Some(d), format!("drift {d:e}")),
            Err(e) => (false, None, e.to_string()),
        };
        writeln!(text, "{} {} {}", style.verdict(ok), line.name, note).unwrap();
        pass &= ok;
        integrals.push(json!({ "name": line.name, "drift": drift, "pass": ok, "note": note }));
    }
    let json = json!({
        "system": loaded.name,
        "generators": l,
        "t0": num.t0,
        "t_end": num.t_end,
        "h": num.h,
        "steps": traj.len() - 1,
        "blow_up": blow_up,
        "final": state_json(&traj.labels, traj.last()),
        "integrals": integrals,
        "tolerance": tol,
    });
    Ok(Report {
        text,
        json,
        csv: Some(csv_of(&traj)),
        pass,
    })
}

/// Initial values as polynomials, zero for components not listed.
fn initial_point(loaded: &Loaded, sys: &ComponentSystem) -> Result<BTreeMap<Symbol, GradedPoly>, CliError> {
    let given = loaded.file.initial_polys(&loaded.built).map_err(usage)?;
    Ok(sys
        .to_first_order()
        .variables()
        .into_iter()
        .map(|v| {
            let p = given.get(&v).cloned().unwrap_or_default();
            (v, p)
        })
        .collect())
}

fn picard(loaded: &Loaded, iters: u32) -> Result<Report, CliError> {
    let init = initial_point(loaded, &loaded.built.system)?;
    let p = picard_iterate(&loaded.built.system, &init, iters).map_err(usage)?;
    let mut text = p.to_string();
    let mut grouped = serde_json::Map::new();
    for (s, _) in &p.components {
        let groups = p.grouped(s.name()).expect("component exists");
        if groups.len() > 1 || groups.first().is_some_and(|(k, _)| k != "1") {
            for (k, poly) in &groups {
                writeln!(text, "  {s}(t) [{k}] = {poly}").unwrap();
            }
        }
        let g: serde_json::Map<String, Value> = groups.into_iter().map(|(k, v)| (k, json!(v.to_string()))).collect();
        grouped.insert(s.name().to_string(), g.into());
    }
    Ok(Report {
        text,
        json: json!({ "system": loaded.name, "picard": p.record(), "grouped": grouped }),
        csv: None,
        pass: true,
    })
}

fn transform(
    loaded: &Loaded,
    epsilon: &str,
    generator: Option<&str>,
    tol: f64,
    style: Style,
) -> Result<Report, CliError> {
    let k = generator_index(epsilon)
        .ok_or_else(|| usage(format!("--epsilon must name a generator e<k>, got `{epsilon}`")))?;
    let g = generator_of(loaded, generator)?;
    let mut text = String::new();
    let mut json = serde_json::Map::new();
    json.insert("system".into(), json!(loaded.name));
    json.insert("generator".into(), json!(g.to_string()));
    json.insert("epsilon".into(), json!(epsilon));
    let mut pass = true;
    let mut csv = None;
    if !loaded.file.solve.seed.is_empty() {
        let seed = loaded.file.seed_solution(&loaded.built).map_err(usage)?;
        let eps = Symbol::constant(epsilon, Parity::Odd);
        match transform_solution(&loaded.built.system, &seed, &eps, g) {
            Ok(sol) => {
                writeln!(
                    text,
                    "{} seed transformed by {epsilon} {g}; residual 0",
                    style.verdict(true)
                )
                .unwrap();
                text.push_str(&sol.to_string());
                json.insert("solution".into(), json!(sol.record()));
            }
            Err(e) => {
                writeln!(text, "{} {e}", style.verdict(false)).unwrap();
                json.insert("solution_error".into(), json!(e.to_string()));
                pass = false;
            }
        }
    }
    if !loaded.file.solve.init.is_empty() {
        let l = loaded.file.generators.unwrap_or(DEFAULT_GENERATORS).max(k);
        let num = prepare(loaded, None, None, l)?;
        let traj =
            integrate(&num.layer, &num.init, num.t0, num.t_end, num.h).map_err(|e| CliError::Failure(e.to_string()))?;
        let moved =
            transform_trajectory(&loaded.built.system, &num.layer, &num.assignment, &traj, g, k).map_err(usage)?;
        let ok = moved.max_deviation <= tol;
        writeln!(
            text,
            "{} trajectory transformed by {epsilon} {g}: max deviation from re-integration {:e}",
            style.verdict(ok),
            moved.max_deviation
        )
        .unwrap();
        pass &= ok;
        json.insert("max_deviation".into(), json!(moved.max_deviation));
        json.insert(
            "final".into(),
            state_json(&moved.trajectory.labels, moved.trajectory.last()),
        );
        csv = Some(csv_of(&moved.trajectory));
    }
    if text.is_empty() {
        return Err(usage("transform needs `seed` or `init` lines in [solve]"));
    }
    json.insert("pass".into(), json!(pass));
    Ok(Report {
        text,
        json: json.into(),
        csv,
        pass,
    })
}

fn render_point(p: &[GradedPoly]) -> String {
    let parts: Vec<String> = p.iter().map(GradedPoly::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Grassmann value of a polynomial in constants and generators `e<k>`.
fn grassmann_value(p: &GradedPoly, assignment: &Assignment) -> Result<Multivector<f64>, CliError> {
    let ctx = assignment.ctx;
    let lookup = |s: &Symbol| match generator_index(s.name()) {
        Some(k) if s.is_constant() && assignment.get(s).is_none() => Multivector::generator(ctx, k).ok(),
        _ => assignment.get(s).map(Multivector::to_f64),
    };
    p.eval(ctx, &lookup).map_err(usage)
}

fn series(
    loaded: &Loaded,
    order: usize,
    trials: usize,
    at: Option<f64>,
    seed: u64,
    tol: f64,
    style: Style,
) -> Result<Report, CliError> {
    let q = homogenize(&loaded.built.system, "u").map_err(usage)?;
    let b = polarize(&q).map_err(usage)?;
    let report = algebra_report(&b, trials, seed).map_err(usage)?;
    let init = initial_point(loaded, &loaded.built.system)?;
    let x0: Vec<GradedPoly> = q
        .coords
        .iter()
        .map(|c| init.get(c).cloned().unwrap_or_else(GradedPoly::one))
        .collect();
    let coeffs = taylor_series(&b, &x0, order).map_err(usage)?;
    let names: Vec<String> = q.coords.iter().map(Symbol::to_string).collect();
    let mut text = format!("coordinates: [{}]\nB = {b}\n{report}", names.join(", "));
    for (k, c) in coeffs.iter().enumerate() {
        writeln!(text, "c{k} = {}", render_point(c)).unwrap();
    }
    let mut json = serde_json::Map::new();
    json.insert("system".into(), json!(loaded.name));
    json.insert("coordinates".into(), json!(names));
    json.insert(
        "product".into(),
        json!(b.components.iter().map(GradedPoly::to_string).collect::<Vec<_>>()),
    );
    json.insert("report".into(), json!(report));
    json.insert(
        "coefficients".into(),
        json!(coeffs
            .iter()
            .map(|c| c.iter().map(GradedPoly::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>()),
    );
    let mut pass = true;
    if !loaded.file.solve.init.is_empty() {
        let l = loaded.file.generators.unwrap_or(DEFAULT_GENERATORS);
        let num = prepare(loaded, at, None, l)?;
        let traj =
            integrate(&num.layer, &num.init, num.t0, num.t_end, num.h).map_err(|e| CliError::Failure(e.to_string()))?;
        let t = num.t_end - num.t0;
        let values = num.layer.values_at(traj.last());
        let mut deviation: f64 = 0.0;
        for (i, c) in q.coords.iter().enumerate() {
            let Some(rk4) = values.get(c) else { continue };
            let mut sum = Multivector::zero(num.assignment.ctx);
            let mut tk = 1.0;
            for coeff in &coeffs {
                let v = grassmann_value(&coeff[i], &num.assignment)?;
                sum = sum.add(&v.scale(&tk)).map_err(usage)?;
                tk *= t;
            }
            deviation = deviation.max(sum.max_abs_diff(rk4));
        }
        let ok = deviation <= tol;
        writeln!(
            text,
            "{} partial sum of order {order} at t = {} vs RK4: {deviation:e}",
            style.verdict(ok),
            num.t_end
        )
        .unwrap();
        pass &= ok;
        json.insert("deviation".into(), json!(deviation));
    }
    json.insert("pass".into(), json!(pass));
    Ok(Report {
        text,
        json: json.into(),
        csv: None,
        pass,
    })
}

fn run_homogenize(loaded: &Loaded, var: &str) -> Result<Report, CliError> {
    let q = homogenize(&loaded.built.system, var).map_err(usage)?;
    let b = polarize(&q).map_err(usage)?;
    let names: Vec<String> = q.coords.iter().map(Symbol::to_string).collect();
    let copies: Vec<String> = b.copies.iter().map(Symbol::to_string).collect();
    let two_b: Vec<String> = b
        .components
        .iter()
        .map(|p| p.scale(&susyode::coeff::int(2)).to_string())
        .collect();
    let text = format!(
        "coordinates: [{}]\ncopies: [{}]\nQ = {q}\n2B = [{}]\n",
        names.join(", "),
        copies.join(", "),
        two_b.join(", ")
    );
    let json = json!({
        "system": loaded.name,
        "coordinates": names,
        "copies": copies,
        "quadratic": q.rhs.iter().map(GradedPoly::to_string).collect::<Vec<_>>(),
        "product": b.components.iter().map(GradedPoly::to_string).collect::<Vec<_>>(),
    });
    Ok(Report {
        text,
        json,
        csv: None,
        pass: true,
    })
}
