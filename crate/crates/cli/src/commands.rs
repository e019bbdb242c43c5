use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sl2h::inequality::Check;
use sl2h::{
    calibrate_eta, cartan, forward_adaptive, gamma_set, global_smallness_check, heat_bound, heat_existence_time,
    iwasawa, lp_norm, multiplier_norm_bound, nonlinear_heat_solve, nonlinear_wave_solve, phi, plancherel_density,
    run_family, spectral_norm_bound, wave_existence_time, CartanCoords, CauchyState, EtaTable, GroupElement,
    MultiplierSymbol, ParityClass, PicardOptions, PsiWeight, RadialProfile, RadialRule, Resolution, SolverMode,
    SpectralData, SpectralEngine, SpectralFunction, SpectralGrid, SphericalParams, TestFamily, TypePair,
    WaveCoefficients,
};

use crate::args::*;
use crate::error::CliError;
use crate::io;

type Outcome = Result<(), CliError>;

pub fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Decompose(a) => decompose(cmd, a),
        Command::Density(a) => density(a),
        Command::Gamma(a) => gamma(a),
        Command::Spherical(a) => spherical(cmd, a),
        Command::Transform(a) => transform(cmd, a),
        Command::Invert(a) => invert(a),
        Command::PlancherelCheck(a) => plancherel(cmd, a),
        Command::Multiplier(a) => multiplier(a),
        Command::Bound(a) => bound(cmd, a),
        Command::InequalityCheck(a) => inequality(cmd, a),
        Command::HeatSolve(a) => heat_solve(cmd, a),
        Command::WaveSolve(a) => wave_solve(cmd, a),
        Command::ExistenceTime(a) => existence_time(cmd, a),
        Command::CalibrateEta(a) => calibrate(cmd, a),
    }
}

/// `value` with the resolved configuration under "config".
fn with_config(cmd: &Command, mut value: Value) -> Value {
    let config = serde_json::to_value(cmd).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut value {
        map.insert("config".into(), config);
    }
    value
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split([',', ':'])
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number '{x}' in {what}")))
        })
        .collect()
}

fn pair_of(a: &PairArgs) -> Result<TypePair, CliError> {
    Ok(TypePair::new(a.l, a.n)?)
}

fn spectral_grid(lambda_max: f64, samples: usize) -> Result<SpectralGrid, CliError> {
    Ok(SpectralGrid::new(lambda_max, samples)?)
}

fn radial_rule(grid: &GridArgs, default_t_max: f64) -> Result<RadialRule, CliError> {
    let t_max = grid.t_max.unwrap_or(default_t_max);
    if !(t_max > 0.0) {
        return usage(format!("t-max must be positive, got {t_max}"));
    }
    Ok(RadialRule::uniform(0.0, t_max.ceil(), 1.0, grid.per_panel)?)
}

fn eta_table(grid: &GridArgs, pair: TypePair) -> Result<EtaTable, CliError> {
    match &grid.eta_table {
        Some(path) => Ok(EtaTable::from_json(&io::read_json(path)?)?),
        None => Ok(EtaTable::for_pair(pair)?),
    }
}

/// Radial profile from `--input` or `--bump`.
fn load_profile(source: &SourceArgs, pair: TypePair, grid: &GridArgs) -> Result<RadialProfile, CliError> {
    match (&source.input, &source.bump) {
        (Some(path), _) => {
            let fallback = radial_rule(grid, 6.0)?;
            io::read_profile(path, pair, &fallback)
        }
        (None, Some(spec)) => {
            let v = parse_floats(spec, "--bump")?;
            if !(2..=4).contains(&v.len()) {
                return usage("--bump takes t0:t1[:omega[:amplitude]]");
            }
            let rule = radial_rule(grid, (v[1].ceil() + 2.0).max(6.0))?;
            let omega = v.get(2).copied().unwrap_or(0.0);
            let amplitude = v.get(3).copied().unwrap_or(1.0);
            Ok(RadialProfile::bump(pair, rule, v[0], v[1], omega, amplitude)?)
        }
        (None, None) => usage("give a profile with --input or --bump"),
    }
}

fn engine_for(f: &RadialProfile, grid: &GridArgs) -> Result<SpectralEngine, CliError> {
    let eta = eta_table(grid, f.pair())?;
    let sgrid = spectral_grid(grid.lambda_max, grid.samples)?;
    Ok(SpectralEngine::new(f.pair(), f.rule().clone(), sgrid, &eta)?)
}

/// Symbol description accepted in JSON files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum SymbolSpec {
    /// `e^{-ts}` of the spectral value.
    Heat {
        t: f64,
    },
    /// `(1 + s)^a`.
    Sobolev {
        a: f64,
    },
    /// `s^a`.
    Power {
        a: f64,
    },
    /// `(1 + λ²)^{-a}` on the principal series, `(1 + m²)^{-a}` at `i·m`.
    Rational {
        a: f64,
    },
    Constant {
        c: f64,
    },
}

enum Symbol {
    Fourier(MultiplierSymbol),
    Spectral(SpectralFunction),
}

impl Symbol {
    fn fourier(&self) -> MultiplierSymbol {
        match self {
            Symbol::Fourier(m) => m.clone(),
            Symbol::Spectral(phi) => phi.to_symbol(),
        }
    }
}

fn symbol_spec(a: &SymbolArgs) -> Result<SymbolSpec, CliError> {
    let path = Path::new(&a.symbol);
    if a.symbol.ends_with(".json") || path.is_file() {
        let v = io::read_json(path)?;
        return serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{}: {e}", a.symbol)));
    }
    let need =
        |x: Option<f64>, flag: &str| x.ok_or_else(|| CliError::Usage(format!("symbol '{}' needs --{flag}", a.symbol)));
    Ok(match a.symbol.as_str() {
        "heat" => SymbolSpec::Heat { t: need(a.t, "t")? },
        "sobolev" => SymbolSpec::Sobolev { a: need(a.a, "a")? },
        "power" => SymbolSpec::Power { a: need(a.a, "a")? },
        "rational" => SymbolSpec::Rational { a: need(a.a, "a")? },
        "constant" => SymbolSpec::Constant { c: need(a.c, "c")? },
        other => return usage(format!("unknown symbol '{other}'")),
    })
}

fn symbol_of(a: &SymbolArgs) -> Result<Symbol, CliError> {
    Ok(match symbol_spec(a)? {
        SymbolSpec::Heat { t } => {
            if !(t > 0.0) {
                return usage("heat symbol needs t > 0");
            }
            Symbol::Spectral(SpectralFunction::heat(t))
        }
        SymbolSpec::Sobolev { a } => Symbol::Spectral(SpectralFunction::sobolev(a)),
        SymbolSpec::Power { a } => Symbol::Spectral(SpectralFunction::power(a)),
        SymbolSpec::Rational { a } => {
            if !(a > 0.0) {
                return usage("rational symbol needs a > 0");
            }
            Symbol::Fourier(MultiplierSymbol::new(
                format!("rational:{a}"),
                move |l| Complex64::new((1.0 + l * l).powf(-a), 0.0),
                move |m| Ok(Complex64::new((1.0 + (m * m) as f64).powf(-a), 0.0)),
            ))
        }
        SymbolSpec::Constant { c } => Symbol::Spectral(SpectralFunction::constant(c)),
    })
}

fn decompose(cmd: &Command, a: &DecomposeArgs) -> Outcome {
    let v = parse_floats(&a.matrix, "--matrix")?;
    if v.len() != 4 {
        return usage("--matrix takes four entries a,b,c,d");
    }
    let x = GroupElement::new(v[0], v[1], v[2], v[3])?;
    let iw = iwasawa(&x);
    let ca = cartan(&x);
    let out = json!({
        "iwasawa": {"theta": iw.theta, "t": iw.t, "v": iw.v},
        "cartan": {"theta1": ca.theta1, "t": ca.t, "theta2": ca.theta2},
        "iwasawa_error": iw.element().distance(&x),
        "cartan_error": ca.element().distance(&x),
    });
    io::write_json(a.out.as_deref(), &with_config(cmd, out))
}

fn density(a: &DensityArgs) -> Outcome {
    let tau: ParityClass = a.tau.parse()?;
    if !a.lambda.is_finite() {
        return usage("lambda must be finite");
    }
    println!("{:?}", plancherel_density(tau, a.lambda));
    Ok(())
}

fn gamma(a: &PairArgs) -> Outcome {
    let g = gamma_set(a.l, a.n)?;
    let items: Vec<String> = g.members().iter().map(|m| m.to_string()).collect();
    println!("{}", items.join(" "));
    Ok(())
}

fn spherical(cmd: &Command, a: &SphericalArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let params = match (a.m, &a.lambda) {
        (Some(m), _) => SphericalParams::discrete(pair, m)?,
        (None, Some(s)) => {
            let v = parse_floats(s, "--lambda")?;
            match v.as_slice() {
                [re] => SphericalParams::principal(pair, *re)?,
                [re, im] => SphericalParams::new(pair, Complex64::new(*re, *im))?,
                _ => return usage("--lambda takes re or re,im"),
            }
        }
        (None, None) => return usage("give --lambda or --m"),
    };
    if let Some(spec) = &a.t_grid {
        let ts = io::read_t_grid(spec)?;
        let values = ts
            .par_iter()
            .map(|&t| {
                let x = CartanCoords {
                    theta1: a.theta1,
                    t,
                    theta2: a.theta2,
                };
                phi(&params, &x)
            })
            .collect::<sl2h::Result<Vec<_>>>()?;
        return io::write_text(a.out.as_deref(), &io::samples_to_csv(ts.iter().copied().zip(&values)));
    }
    if !(a.t >= 0.0) {
        return usage("t must be >= 0");
    }
    let x = CartanCoords {
        theta1: a.theta1,
        t: a.t,
        theta2: a.theta2,
    };
    let v = phi(&params, &x)?;
    io::write_json(a.out.as_deref(), &with_config(cmd, json!({"re": v.re, "im": v.im})))
}

fn transform(cmd: &Command, a: &TransformArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let f = load_profile(&a.source, pair, &a.grid)?;
    let mut value = if a.adaptive {
        let eta = eta_table(&a.grid, pair)?;
        let grid = spectral_grid(a.grid.lambda_max, a.grid.samples)?;
        let res = forward_adaptive(&f, &grid, &eta, a.tail_tol, a.max_doublings)?;
        let mut v = res.data.to_json();
        v["converged"] = json!(res.converged);
        v["tail_fraction"] = json!(res.tail_fraction);
        v
    } else {
        engine_for(&f, &a.grid)?.forward(&f)?.to_json()
    };
    value["t_max"] = json!(f.rule().t_max());
    value["per_panel"] = json!(f.rule().per_panel());
    io::write_json(a.out.as_deref(), &with_config(cmd, value))
}

fn invert(a: &InvertArgs) -> Outcome {
    let v = io::read_json(&a.input)?;
    let data = SpectralData::from_json(&v)?;
    // Radial grid: flags, then what the transform recorded, then defaults.
    let mut grid = a.grid.clone();
    if grid.t_max.is_none() {
        grid.t_max = v.get("t_max").and_then(Value::as_f64);
    }
    if let (64, Some(p)) = (grid.per_panel, v.get("per_panel").and_then(Value::as_u64)) {
        grid.per_panel = p as usize;
    }
    let rule = radial_rule(&grid, 6.0)?;
    let eta = eta_table(&grid, data.pair())?;
    let engine = SpectralEngine::new(data.pair(), rule, data.grid().clone(), &eta)?;
    let text = match &a.t_grid {
        Some(spec) => {
            let ts = io::read_t_grid(spec)?;
            let values = ts
                .par_iter()
                .map(|&t| engine.inverse_at(&data, t))
                .collect::<sl2h::Result<Vec<_>>>()?;
            io::samples_to_csv(ts.iter().copied().zip(&values))
        }
        None => io::profile_to_csv(&engine.inverse(&data)?),
    };
    io::write_text(a.out.as_deref(), &text)
}

fn plancherel(cmd: &Command, a: &PlancherelArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let f = load_profile(&a.source, pair, &a.grid)?;
    let r = engine_for(&f, &a.grid)?.plancherel_check(&f)?;
    let out = json!({"lhs": r.lhs, "rhs": r.rhs, "rel_err": r.rel_err});
    io::write_json(a.out.as_deref(), &with_config(cmd, out))
}

fn multiplier(a: &MultiplierArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let f = load_profile(&a.source, pair, &a.grid)?;
    let symbol = symbol_of(&a.symbol)?.fourier();
    let g = engine_for(&f, &a.grid)?.apply(&symbol, &f)?;
    io::write_text(a.out.as_deref(), &io::profile_to_csv(&g))
}

fn bound(cmd: &Command, a: &BoundArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let report = match a.theorem.as_str() {
        "lp-lq" => {
            let grid = spectral_grid(a.lambda_max, a.samples)?;
            multiplier_norm_bound(&symbol_of(&a.symbol)?.fourier(), a.p, a.q, pair, &grid)?
        }
        "spectral" => match symbol_of(&a.symbol)? {
            Symbol::Spectral(phi) => spectral_norm_bound(&phi, a.p, a.q, pair)?,
            Symbol::Fourier(_) => {
                return usage("the spectral bound needs a spectral symbol (heat, sobolev, power, constant)")
            }
        },
        "heat" => {
            let t = a
                .symbol
                .t
                .ok_or_else(|| CliError::Usage("heat bound needs --t".into()))?;
            heat_bound(t, a.p, a.q, pair)?
        }
        other => return usage(format!("unknown theorem '{other}'")),
    };
    let out = json!({
        "bound": io::float_value(report.bound),
        "terms": {
            "continuous": io::float_value(report.terms.continuous),
            "discrete": io::float_value(report.terms.discrete),
            "exponent": report.terms.exponent,
        },
    });
    io::write_json(a.out.as_deref(), &with_config(cmd, out))
}

fn inequality(cmd: &Command, a: &InequalityArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let psi: PsiWeight = a.psi.parse()?;
    let check = match a.which.as_str() {
        "hy" => Check::Hy { p: a.p },
        "dual-hy" => Check::DualHy { p: a.p },
        "paley" => Check::Paley { p: a.p, psi },
        "hyp" => {
            let b = a.b.ok_or_else(|| CliError::Usage("hyp needs --b".into()))?;
            Check::Hyp { p: a.p, b, psi }
        }
        other => return usage(format!("unknown check '{other}'")),
    };
    let family = if a.family == "default" {
        TestFamily::default_for(pair, a.seed)
    } else {
        let v = io::read_json(Path::new(&a.family))?;
        let fam: TestFamily = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{}: {e}", a.family)))?;
        TestFamily::new(fam.pair, fam.members)?
    };
    let rule = radial_rule(&a.grid, 6.0)?;
    let res = Resolution::new(rule, spectral_grid(a.grid.lambda_max, a.grid.samples)?);
    let report = run_family(check, &family, &res)?;
    let mut out = serde_json::to_value(&report).map_err(|e| CliError::Usage(e.to_string()))?;
    out["family"] = serde_json::to_value(&family).unwrap_or(Value::Null);
    io::write_json(a.out.as_deref(), &with_config(cmd, out))
}

fn picard_options(p: &PicardArgs) -> Result<PicardOptions, CliError> {
    let mode: SolverMode = p.mode.parse()?;
    Ok(PicardOptions {
        mode,
        steps_per_unit: p.steps_per_unit,
        tol: p.tol,
        max_iterations: p.max_iterations,
    })
}

fn state_json(state: &CauchyState, mode: SolverMode) -> Result<Value, CliError> {
    let snapshots: Vec<Value> = state
        .snapshots
        .iter()
        .map(|u| Value::Array(u.values().iter().map(|v| json!([v.re, v.im])).collect()))
        .collect();
    let norms: Vec<f64> = state
        .snapshots
        .iter()
        .map(|u| lp_norm(u, 2.0))
        .collect::<Result<_, _>>()?;
    let pair = state.snapshots.first().map(|u| u.pair());
    let mut out = json!({
        "times": state.times,
        "snapshots": snapshots,
        "residuals": state.residuals,
        "increments": state.increments,
        "iterations": state.iterations(),
        "l2_norms": norms,
        "nodes": state.snapshots.first().map(|u| u.nodes().to_vec()).unwrap_or_default(),
        "mode": mode.to_string(),
        "l": pair.map(|p| p.l()),
        "n": pair.map(|p| p.n()),
    });
    if mode == SolverMode::Relabelled && pair.is_some_and(|p| !p.is_biinvariant()) {
        out["note"] = json!(
            "|Bu|^p is bi-invariant on the group; its samples on the diagonal flow are relabelled with the input type"
        );
    }
    Ok(out)
}

fn heat_solve(cmd: &Command, a: &HeatArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let u0 = load_profile(&a.source, pair, &a.grid)?;
    let engine = engine_for(&u0, &a.grid)?;
    let b = symbol_of(&a.symbol)?.fourier();
    let opts = picard_options(&a.picard)?;
    let state = nonlinear_heat_solve(&engine, &u0, &b, a.picard.p, a.picard.horizon, &opts)?;
    io::write_json(a.out.as_deref(), &with_config(cmd, state_json(&state, opts.mode)?))
}

fn wave_solve(cmd: &Command, a: &WaveArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let u0 = load_profile(&a.source, pair, &a.grid)?;
    let u1 = match &a.u1 {
        Some(path) => {
            let v = io::read_profile(path, pair, u0.rule())?;
            if v.rule().nodes() != u0.rule().nodes() {
                return usage("u1 must be sampled like u0");
            }
            v
        }
        None => RadialProfile::zero(pair, u0.rule().clone()),
    };
    let psi: WaveCoefficients = a.psi.parse()?;
    let engine = engine_for(&u0, &a.grid)?;
    let b = symbol_of(&a.symbol)?.fourier();
    let opts = picard_options(&a.picard)?;
    let state = nonlinear_wave_solve(&engine, &u0, &u1, &psi, &b, a.picard.p, a.picard.horizon, &opts)?;
    io::write_json(a.out.as_deref(), &with_config(cmd, state_json(&state, opts.mode)?))
}

fn existence_time(cmd: &Command, a: &ExistenceArgs) -> Outcome {
    let norms = parse_floats(&a.norms, "--norms")?;
    let out = match (a.problem.as_str(), norms.as_slice()) {
        ("heat", [u0]) => json!({"T_star": io::float_value(heat_existence_time(*u0, a.c, a.p)?)}),
        ("wave", [u0, u1, psi]) => {
            json!({"T_star": io::float_value(wave_existence_time(*u0, *u1, *psi, a.c, a.p)?)})
        }
        ("global", [u0]) => {
            let (Some(g), Some(g0), Some(t)) = (a.gamma, a.gamma0, a.horizon) else {
                return usage("global needs --gamma, --gamma0 and --T");
            };
            json!({"holds": global_smallness_check(g, g0, a.c, a.p, *u0, t)?})
        }
        ("heat" | "global", _) => return usage("--norms takes one value"),
        ("wave", _) => return usage("--norms takes u0,u1,psi"),
        (other, _) => return usage(format!("unknown problem '{other}'")),
    };
    io::write_json(a.out.as_deref(), &with_config(cmd, out))
}

/// Wide bumps whose transforms are resolved at the default grid.
const REFERENCE_BUMPS: [(f64, f64, f64); 3] = [(0.5, 2.5, 0.0), (0.8, 3.2, 1.0), (0.6, 3.6, 2.0)];

fn calibrate(cmd: &Command, a: &CalibrateArgs) -> Outcome {
    let pair = pair_of(&a.pair)?;
    let rule = radial_rule(&GridArgs::from(&a.grid), 6.0)?;
    let grid = spectral_grid(a.grid.lambda_max, a.grid.samples)?;
    let profiles: Vec<RadialProfile> = REFERENCE_BUMPS
        .iter()
        .map(|&(t0, t1, w)| RadialProfile::bump(pair, rule.clone(), t0, t1, w, 1.0))
        .collect::<Result<_, _>>()?;
    let ms: Vec<i64> = match a.m {
        Some(m) => vec![m],
        None => gamma_set(pair.l(), pair.n())?.members().to_vec(),
    };
    if ms.is_empty() {
        return Err(sl2h::Error::NoDiscreteSpectrum {
            l: pair.l(),
            n: pair.n(),
        }
        .into());
    }
    let mut table = match &a.grid.eta_table {
        Some(path) if path.exists() => EtaTable::from_json(&io::read_json(path)?)?,
        _ => EtaTable::new(),
    };
    let mut details = Vec::new();
    for m in ms {
        let c = calibrate_eta(pair, m, &profiles, &grid, a.tol)?;
        table.insert(pair, m, c.eta, a.tol)?;
        details.push(serde_json::to_value(&c).unwrap_or(Value::Null));
    }
    let mut out = table.to_json();
    out["calibrations"] = Value::Array(details);
    io::write_json(a.out.as_deref(), &with_config(cmd, out))
}
