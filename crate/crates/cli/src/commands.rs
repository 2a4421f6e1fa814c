use std::f64::consts::PI;

use mirrorpath::kernels::{isw_image_sum, System, SystemSpec, TimeArgument, UnitSystem};
use mirrorpath::oracle::{grid_eigensolve, GridHamiltonian};
use mirrorpath::specfun::SeriesPolicy;
use mirrorpath::spectral::{isw_greens, poschl_teller_greens, scan_poles, Grid, GreensQuery};
use mirrorpath::susy::{ground_state_residual, isw_limit_check, partner_potentials, Superpotential};
use mirrorpath::trace::{default_ladder, default_quadrature, extract_excited_energies, kernel_trace, trace_curve};
use mirrorpath::verify::{self, Bound, Suite, DEFAULT_SEED};
use serde_json::{json, Map, Value};

use crate::args::{Command, Common, Method, SuiteArg, SystemArg};
use crate::report::{cell, num, Report};

/// Why a run did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad or inconsistent request, or a library error; exit status 2.
    Invalid(String),
    /// The verification suite ran but a check failed; exit status 1.
    Verification(Box<Report>),
}

type Outcome = Result<Report, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn lib<T>(r: mirrorpath::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| invalid(e.to_string()))
}

pub fn run(command: &Command) -> Outcome {
    match command {
        Command::Kernel(c) => kernel(c),
        Command::Trace(c) => trace(c),
        Command::Spectrum(c) => spectrum(c),
        Command::Greens(c) => greens(c),
        Command::Susy(c) => susy(c),
        Command::Verify(c) => verify(c),
    }
}

fn system_name(s: SystemArg) -> &'static str {
    match s {
        SystemArg::Free => "free",
        SystemArg::HalfLine => "half-line",
        SystemArg::Isw => "isw",
        SystemArg::Ho => "ho",
        SystemArg::HalfHo => "half-ho",
        SystemArg::RosenMorse => "rosen-morse",
    }
}

fn request(command: &str, c: &Common) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    if let Some(s) = c.system {
        m.insert("system".into(), json!(system_name(s)));
    }
    let scalars = [
        ("width", c.width),
        ("omega", c.omega),
        ("b", c.b),
        ("s", c.s),
        ("energy", c.energy),
        ("real_tau", c.real_tau),
        ("x_max", c.x_max),
        ("rel_tol", c.rel_tol),
        ("hbar", c.hbar),
        ("mass", c.mass),
    ];
    for (k, v) in scalars {
        if let Some(v) = v {
            m.insert(k.into(), num(v));
        }
    }
    let lists = [("beta", &c.beta), ("x_f", &c.xf), ("x_i", &c.xi), ("scan", &c.scan)];
    for (k, v) in lists {
        if let Some(v) = v {
            m.insert(k.into(), Value::Array(v.iter().map(|x| num(*x)).collect()));
        }
    }
    if let Some(n) = c.grid_points {
        m.insert("grid_points".into(), json!(n));
    }
    if let Some(n) = c.max_terms {
        m.insert("max_terms".into(), json!(n));
    }
    Value::Object(m)
}

fn policy(c: &Common) -> Result<SeriesPolicy, Failure> {
    let d = SeriesPolicy::default();
    lib(SeriesPolicy::new(c.rel_tol.unwrap_or(d.rel_tol()), c.max_terms.unwrap_or(d.max_terms())))
}

fn units(c: &Common, system: SystemArg) -> Result<UnitSystem, Failure> {
    let natural = matches!(system, SystemArg::Isw | SystemArg::RosenMorse);
    let default_mass = if natural { 0.5 } else { 1.0 };
    lib(UnitSystem::new(c.hbar.unwrap_or(1.0), c.mass.unwrap_or(default_mass)))
}

fn units_json(u: UnitSystem) -> Value {
    json!({ "hbar": num(u.hbar()), "mass": num(u.mass()) })
}

fn require<T: Copy>(v: Option<T>, flag: &str, command: &str) -> Result<T, Failure> {
    v.ok_or_else(|| invalid(format!("`{command}` requires --{flag}")))
}

fn system_arg(c: &Common, command: &str) -> Result<SystemArg, Failure> {
    require(c.system, "system", command)
}

fn system_spec(c: &Common, command: &str) -> Result<SystemSpec, Failure> {
    let arg = system_arg(c, command)?;
    let system = match arg {
        SystemArg::Free => System::FreeLine,
        SystemArg::HalfLine => System::HalfLine,
        SystemArg::Isw => System::InfiniteWell { width: require(c.width, "width", command)? },
        SystemArg::Ho => System::Oscillator { omega: require(c.omega, "omega", command)? },
        SystemArg::HalfHo => System::HalfOscillator { omega: require(c.omega, "omega", command)? },
        SystemArg::RosenMorse => {
            return Err(invalid(format!("`{command}` is not available for rosen-morse")));
        }
    };
    lib(SystemSpec::new(system, units(c, arg)?))
}

fn time(c: &Common) -> Result<TimeArgument, Failure> {
    match (c.real_tau, c.beta.as_deref()) {
        (Some(tau), None) => lib(TimeArgument::real(tau)),
        (None, Some([beta])) => lib(TimeArgument::euclidean(*beta)),
        (None, Some(_)) => Err(invalid("--beta takes a single value here")),
        (Some(_), Some(_)) => Err(invalid("--real-tau and --beta are exclusive")),
        (None, None) if c.euclidean => Err(invalid("--euclidean requires --beta")),
        (None, None) => Err(invalid("a time is required: --real-tau T or --euclidean --beta B")),
    }
}

fn positions(c: &Common, command: &str) -> Result<Vec<(f64, f64)>, Failure> {
    let xf = c.xf.as_ref().ok_or_else(|| invalid(format!("`{command}` requires --xf")))?;
    let xi = c.xi.as_ref().ok_or_else(|| invalid(format!("`{command}` requires --xi")))?;
    Ok(xf.iter().flat_map(|&a| xi.iter().map(move |&b| (a, b))).collect())
}

fn kernel(c: &Common) -> Outcome {
    let sys = system_spec(c, "kernel")?;
    let t = time(c)?;
    let policy = policy(c)?;
    let (time_key, time_value) = match t {
        TimeArgument::Euclidean(b) => ("beta", b),
        TimeArgument::Real(tau) => ("tau", tau),
    };
    let mut values = Vec::new();
    let mut rows = Vec::new();
    let mut shells = Vec::new();
    for (a, b) in positions(c, "kernel")? {
        let k = lib(sys.kernel(a, b, t, policy))?;
        if let (System::InfiniteWell { width }, TimeArgument::Euclidean(_)) = (sys.system(), t) {
            shells.push(json!(lib(isw_image_sum(a, b, width, t, sys.units(), policy))?.shells));
        }
        values.push(json!({ "x_f": num(a), "x_i": num(b), "value": num(k.re), "im": num(k.im) }));
        let mut row = vec![cell(a), cell(b), cell(time_value), cell(k.re)];
        if !t.is_euclidean() {
            row.push(cell(k.im));
        }
        rows.push(row);
    }
    let single = values.len() == 1;
    let mut result = Map::new();
    result.insert(time_key.into(), num(time_value));
    if single {
        let v = &values[0];
        result.insert("value".into(), v["value"].clone());
        result.insert("im".into(), v["im"].clone());
    }
    result.insert("points".into(), Value::Array(values));
    let mut diagnostics = json!({
        "units": units_json(sys.units()),
        "rel_tol": num(policy.rel_tol()),
        "max_terms": policy.max_terms(),
    });
    if !shells.is_empty() {
        diagnostics["image_shells"] = Value::Array(shells);
    }
    let header =
        if t.is_euclidean() { vec!["x_f", "x_i", "beta", "value"] } else { vec!["x_f", "x_i", "tau", "re", "im"] };
    Ok(Report {
        request: request("kernel", c),
        result: Value::Object(result),
        diagnostics,
        csv_header: header,
        csv_rows: rows,
    })
}

fn quadrature(c: &Common, sys: SystemSpec, beta: f64) -> Result<Grid, Failure> {
    let base = lib(default_quadrature(sys, beta))?;
    let (lo, hi) = match (sys.system(), c.x_max) {
        (System::InfiniteWell { .. }, _) | (_, None) => (base.x_min(), base.x_max()),
        (System::Oscillator { .. }, Some(x)) => (-x, x),
        (_, Some(x)) => (0.0, x),
    };
    lib(Grid::new(lo, hi, c.grid_points.unwrap_or(base.len())))
}

fn trace(c: &Common) -> Outcome {
    let sys = system_spec(c, "trace")?;
    let betas = c.beta.clone().ok_or_else(|| invalid("`trace` requires --beta"))?;
    if c.real_tau.is_some() {
        return Err(invalid("traces are Euclidean only"));
    }
    let mut values = Vec::new();
    let mut diag = Vec::new();
    let mut rows = Vec::new();
    for &beta in &betas {
        let grid = quadrature(c, sys, beta)?;
        let t = lib(kernel_trace(sys, beta, &grid))?;
        values.push(json!({ "beta": num(beta), "value": num(t.value) }));
        diag.push(json!({
            "beta": num(beta),
            "quadrature": { "x_min": num(grid.x_min()), "x_max": num(grid.x_max()), "points": grid.len() },
            "edge_ratio": num(t.edge_ratio),
            "tail_warning": t.tail_warning,
        }));
        rows.push(vec![cell(beta), cell(t.value)]);
    }
    let mut result = Map::new();
    if values.len() == 1 {
        result.insert("value".into(), values[0]["value"].clone());
    }
    result.insert("traces".into(), Value::Array(values));
    Ok(Report {
        request: request("trace", c),
        result: Value::Object(result),
        diagnostics: json!({ "units": units_json(sys.units()), "traces": diag }),
        csv_header: vec!["beta", "value"],
        csv_rows: rows,
    })
}

fn spectrum(c: &Common) -> Outcome {
    let arg = system_arg(c, "spectrum")?;
    if c.levels == 0 {
        return Err(invalid("--levels must be positive"));
    }
    let (energies, result_extra, diagnostics) = match c.method {
        Method::Grid => {
            let points = c.grid_points.unwrap_or(2000);
            let h = if arg == SystemArg::RosenMorse {
                lib(GridHamiltonian::rosen_morse(require(c.b, "b", "spectrum")?, points))?
            } else {
                let sys = system_spec(c, "spectrum")?;
                let x_max = match (c.x_max, sys.system()) {
                    (Some(x), _) => x,
                    (None, System::Oscillator { omega } | System::HalfOscillator { omega }) => {
                        let u = sys.units();
                        12.0 * (u.hbar() / (u.mass() * omega)).sqrt()
                    }
                    _ => 0.0,
                };
                lib(GridHamiltonian::for_system(sys, x_max, points))?
            };
            let s = lib(grid_eigensolve(&h, c.levels))?;
            let g = h.grid();
            let diag = json!({
                "method": "grid",
                "units": units_json(h.units()),
                "grid": { "x_min": num(g.x_min()), "x_max": num(g.x_max()), "points": g.len() },
            });
            (s.energies().to_vec(), None, diag)
        }
        Method::Trace => {
            let sys = system_spec(c, "spectrum")?;
            let betas = match &c.beta {
                Some(b) => b.clone(),
                None => lib(default_ladder(sys, c.levels))?,
            };
            let curve = lib(trace_curve(sys, &betas))?;
            let ex = lib(extract_excited_energies(&curve, c.levels))?;
            let levels: Vec<Value> = ex
                .levels
                .iter()
                .map(|l| {
                    json!({
                        "energy": num(l.energy),
                        "error": num(l.error),
                        "sequential": [num(l.sequential.0), num(l.sequential.1)],
                        "prony": l.prony.map(|p| json!([num(p.0), num(p.1)])),
                    })
                })
                .collect();
            let diag = json!({
                "method": "trace",
                "units": units_json(sys.units()),
                "betas": betas.iter().map(|b| num(*b)).collect::<Vec<_>>(),
                "routes_agree": ex.routes_agree,
                "levels": levels,
            });
            (ex.spectrum.energies().to_vec(), Some(ex.routes_agree), diag)
        }
    };
    let mut result = json!({ "energies": energies.iter().map(|e| num(*e)).collect::<Vec<_>>() });
    if let Some(agree) = result_extra {
        result["routes_agree"] = json!(agree);
    }
    Ok(Report {
        request: request("spectrum", c),
        result,
        diagnostics,
        csv_header: vec!["n", "energy"],
        csv_rows: energies.iter().enumerate().map(|(n, e)| vec![n.to_string(), cell(*e)]).collect(),
    })
}

fn greens(c: &Common) -> Outcome {
    let policy = policy(c)?;
    let arg = system_arg(c, "greens")?;
    let s = match arg {
        SystemArg::Isw => {
            if c.width.is_some_and(|w| (w - PI).abs() > 1e-12) {
                return Err(invalid("the square-well Green's function is defined on (0, pi)"));
            }
            None
        }
        SystemArg::RosenMorse => match (c.s, c.b) {
            (Some(s), _) => Some(s),
            (None, Some(b)) => Some(b - 0.5),
            (None, None) => return Err(invalid("`greens --system rosen-morse` requires --s or --b")),
        },
        _ => return Err(invalid("`greens` supports --system isw or rosen-morse")),
    };
    let eval = |a: f64, b: f64, e: f64| -> mirrorpath::Result<f64> {
        match s {
            None => isw_greens(a, b, e, policy),
            Some(s) => poschl_teller_greens(GreensQuery::new(s, e, a, b, policy)?),
        }
    };
    let pairs = positions(c, "greens")?;
    let mut result = Map::new();
    let mut rows = Vec::new();
    if let Some(e) = c.energy {
        let mut values = Vec::new();
        for &(a, b) in &pairs {
            let g = lib(eval(a, b, e))?;
            values.push(json!({ "x_f": num(a), "x_i": num(b), "value": num(g) }));
            rows.push(vec![cell(a), cell(b), cell(e), cell(g)]);
        }
        if values.len() == 1 {
            result.insert("value".into(), values[0]["value"].clone());
        }
        result.insert("energy".into(), num(e));
        result.insert("points".into(), Value::Array(values));
    }
    if let Some(window) = &c.scan {
        let [lo, hi] = window[..] else {
            return Err(invalid("--scan takes lo,hi"));
        };
        let (a, b) = pairs[0];
        let poles = lib(scan_poles(|e| eval(a, b, e), lo, hi, 0.05, 1e-10))?;
        if c.energy.is_none() {
            rows = poles.iter().map(|p| vec![cell(a), cell(b), cell(*p), "pole".into()]).collect();
        }
        result.insert("poles".into(), Value::Array(poles.iter().map(|p| num(*p)).collect()));
    }
    if c.energy.is_none() && c.scan.is_none() {
        return Err(invalid("`greens` requires --energy or --scan"));
    }
    Ok(Report {
        request: request("greens", c),
        result: Value::Object(result),
        diagnostics: json!({
            "units": units_json(UnitSystem::natural_susy()),
            "s": s.map_or(Value::Null, num),
            "rel_tol": num(policy.rel_tol()),
            "max_terms": policy.max_terms(),
        }),
        csv_header: vec!["x_f", "x_i", "energy", "value"],
        csv_rows: rows,
    })
}

fn susy(c: &Common) -> Outcome {
    let arg = system_arg(c, "susy")?;
    let w = match arg {
        SystemArg::RosenMorse => lib(Superpotential::rosen_morse(require(c.b, "b", "susy")?))?,
        SystemArg::HalfHo | SystemArg::Ho => lib(Superpotential::oscillator(require(c.omega, "omega", "susy")?))?,
        _ => return Err(invalid("`susy` supports --system rosen-morse, ho or half-ho")),
    };
    let mut result = Map::new();
    let mut rows = Vec::new();
    if let Some(xs) = &c.xf {
        let mut pts = Vec::new();
        for &x in xs {
            let p = lib(partner_potentials(w, x))?;
            let wx = lib(w.w(x))?;
            pts.push(json!({ "x": num(x), "w": num(wx), "v_minus": num(p.v_minus), "v_plus": num(p.v_plus) }));
            rows.push(vec![cell(x), cell(wx), cell(p.v_minus), cell(p.v_plus)]);
        }
        result.insert("potentials".into(), Value::Array(pts));
    }
    let points = c.grid_points.unwrap_or(2001);
    let mut diagnostics = json!({ "grid_points": points });
    if let Superpotential::RosenMorse { b } = w {
        let grid = lib(Grid::new(0.0, PI, points))?;
        result.insert("ground_state_residual".into(), num(lib(ground_state_residual(w, &grid))?));
        let report = lib(isw_limit_check(b, &grid, c.levels, 1e-9))?;
        let checks: Vec<Value> = report
            .checks
            .iter()
            .map(|k| json!({ "name": k.name, "margin": num(k.margin), "tolerance": num(k.tolerance), "passed": k.passed }))
            .collect();
        result.insert("isw_limit".into(), json!({ "passed": report.passed(), "checks": checks }));
        diagnostics["levels"] = json!(c.levels);
    }
    Ok(Report {
        request: request("susy", c),
        result: Value::Object(result),
        diagnostics,
        csv_header: vec!["x", "w", "v_minus", "v_plus"],
        csv_rows: rows,
    })
}

pub fn seed_from_env() -> Result<u64, Failure> {
    match std::env::var("MIRRORPATH_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| invalid(format!("MIRRORPATH_SEED={s} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn verify(c: &Common) -> Outcome {
    let seed = seed_from_env()?;
    let suite = match c.suite {
        SuiteArg::Kernels => Suite::Kernels,
        SuiteArg::Spectra => Suite::Spectra,
        SuiteArg::Greens => Suite::Greens,
        SuiteArg::Susy => Suite::Susy,
        SuiteArg::All => Suite::All,
    };
    let checks = verify::run_suite(suite, seed);
    let failed = checks.iter().filter(|k| !k.passed).count();
    let items: Vec<Value> = checks
        .iter()
        .map(|k| {
            json!({
                "name": k.name,
                "observed": num(k.observed),
                "tolerance": num(k.tolerance),
                "bound": match k.bound { Bound::AtMost => "at_most", Bound::AtLeast => "at_least" },
                "passed": k.passed,
            })
        })
        .collect();
    let report = Report {
        request: {
            let mut r = request("verify", c);
            r["suite"] = json!(format!("{:?}", suite).to_lowercase());
            r
        },
        result: json!({ "passed": failed == 0, "checks": items }),
        diagnostics: json!({ "seed": seed, "total": checks.len(), "failed": failed }),
        csv_header: vec!["name", "observed", "tolerance", "passed"],
        csv_rows: checks
            .iter()
            .map(|k| vec![k.name.clone(), cell(k.observed), cell(k.tolerance), k.passed.to_string()])
            .collect(),
    };
    if failed == 0 {
        Ok(report)
    } else {
        Err(Failure::Verification(Box::new(report)))
    }
}
