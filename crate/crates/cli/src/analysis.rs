use std::fmt::Display;

use intdyn::covers::{
    complexity_cu, cover_entropy, min_subcover, mixing_certificate, OpenCover, DEFAULT_ELEMENT_BUDGET,
    DEFAULT_NODE_BUDGET, DEFAULT_PART_BUDGET,
};
use intdyn::independence::{
    arithmetic_independence, build_covering_sequences, covering_pair_sequences, default_radii,
    independence_check_budgeted, pair_independence_profile, scrambled_witness_tree, CoveringParams, ProfileThresholds,
    DEFAULT_TIME_BUDGET,
};
use intdyn::map::DEFAULT_PIECE_BUDGET;
use intdyn::orbit::{
    dyadic_periods, entropy_classify_budgeted, omega_approx, orbit, period_spectrum, recurrence_classify,
};
use intdyn::pairs::{
    banach_density_estimate, classify_pair, f_nonseparable_test, kneading_code, n_scrambled_search, proximal_by_code,
    regionally_proximal_test, NonsepParams, ScrambleSearch,
};
use intdyn::pattern::{bound_check, growth_classify, pattern_growth_budgeted, smital_data, DEFAULT_TUPLE_BUDGET};
use intdyn::portion::{compute_portion, verify_portion, OmegaParams};
use intdyn::{
    Dynamics, Error, ExactMap, Interval, IntervalSet, LimitMap, MapHandle, MapSpec, NumericMap, Rational, Result,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::Outcome;
use crate::Analysis;

pub struct Request {
    pub map_spec: MapSpec,
    pub handle: MapHandle,
    pub analysis: Analysis,
    /// Parameters with every default filled in.
    pub params: Value,
}

impl Request {
    pub fn provenance(&self) -> Value {
        json!({
            "exact": !matches!(self.handle, MapHandle::Numeric(_)),
            "budgets": {
                "pieces": DEFAULT_PIECE_BUDGET,
                "cover_elements": DEFAULT_ELEMENT_BUDGET,
                "cover_parts": DEFAULT_PART_BUDGET,
                "subcover_nodes": DEFAULT_NODE_BUDGET,
                "pattern_tuples": DEFAULT_TUPLE_BUDGET,
                "independence_times": DEFAULT_TIME_BUDGET,
            },
        })
    }
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn read_json_arg(arg: &str, what: &str) -> Result<(String, String)> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        Ok((format!("inline {what}"), arg.to_string()))
    } else {
        std::fs::read_to_string(arg)
            .map(|text| (arg.to_string(), text))
            .map_err(|e| Error::input(format!("cannot read {what} {arg}: {e}")))
    }
}

fn parse_json<T: DeserializeOwned>(origin: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))
}

pub fn load_map_spec(arg: &str) -> Result<(MapSpec, MapHandle)> {
    let (origin, text) = read_json_arg(arg, "map spec")?;
    let spec: MapSpec = parse_json(&origin, &text)?;
    let handle = spec.build()?;
    Ok((spec, handle))
}

pub fn load_request(map: &str, analysis: Analysis, params: &str) -> Result<Request> {
    let (map_spec, handle) = load_map_spec(map)?;
    let (origin, text) = read_json_arg(params, "params")?;
    let raw: Value = parse_json(&origin, &text)?;
    let params = match analysis {
        Analysis::Orbit => normalize::<OrbitParams>(&origin, raw)?,
        Analysis::Periodic => normalize::<PeriodicParams>(&origin, raw)?,
        Analysis::EntropyClassify => normalize::<EntropyParams>(&origin, raw)?,
        Analysis::Portion => normalize::<PortionParams>(&origin, raw)?,
        Analysis::Pairs => normalize::<PairsParams>(&origin, raw)?,
        Analysis::Covers => normalize::<CoversParams>(&origin, raw)?,
        Analysis::Independence => normalize::<IndependenceParams>(&origin, raw)?,
        Analysis::Witness => normalize::<WitnessParams>(&origin, raw)?,
        Analysis::Pattern => normalize::<PatternParams>(&origin, raw)?,
    };
    Ok(Request {
        map_spec,
        handle,
        analysis,
        params,
    })
}

/// Round-trips the block through its typed form so defaults are explicit.
fn normalize<T: DeserializeOwned + Serialize>(origin: &str, raw: Value) -> Result<Value> {
    let typed: T = serde_json::from_value(raw).map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
    serde_json::to_value(typed).map_err(|e| Error::Internal(e.to_string()))
}

fn typed<T: DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Internal(e.to_string()))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Internal(e.to_string()))
}

fn parse_set(s: &str) -> Result<IntervalSet> {
    s.parse()
}

fn parse_sets(items: &[String]) -> Result<Vec<IntervalSet>> {
    items.iter().map(|s| parse_set(s)).collect()
}

fn parse_cover(items: &[String]) -> Result<OpenCover> {
    let refs: Vec<&str> = items.iter().map(String::as_str).collect();
    OpenCover::parse(&refs, "U")
}

fn exact_of(handle: &MapHandle) -> Result<&ExactMap> {
    handle
        .exact()
        .ok_or_else(|| Error::precondition("this analysis needs an exact piecewise-linear map"))
}

/// Runs `$body` with `$m` bound to the map orbits are computed on, whose
/// points are rationals: the lazy limit for `use_limit` towers, otherwise the
/// exact map.
macro_rules! with_rational_map {
    ($handle:expr, $m:ident => $body:expr) => {
        match $handle {
            MapHandle::Tower { use_limit: true, .. } => {
                let $m = &LimitMap::default();
                $body
            }
            MapHandle::Numeric(_) => Err(Error::precondition("this analysis needs an exact map")),
            other => {
                let $m = exact_of(other)?;
                $body
            }
        }
    };
}

pub fn run(req: &Request) -> Result<Outcome> {
    let p = &req.params;
    let h = &req.handle;
    match req.analysis {
        Analysis::Orbit => run_orbit(h, typed(p)?),
        Analysis::Periodic => run_periodic(h, typed(p)?),
        Analysis::EntropyClassify => {
            let p: EntropyParams = typed(p)?;
            let cert = entropy_classify_budgeted(exact_of(h)?, p.max_n, p.budget)?;
            plain(to_value(&cert)?)
        }
        Analysis::Portion => run_portion(h, typed(p)?),
        Analysis::Pairs => run_pairs(h, typed(p)?),
        Analysis::Covers => run_covers(h, typed(p)?),
        Analysis::Independence => run_independence(h, typed(p)?),
        Analysis::Witness => run_witness(h, typed(p)?),
        Analysis::Pattern => run_pattern(h, typed(p)?),
    }
}

fn plain(results: Value) -> Result<Outcome> {
    Ok(Outcome {
        results,
        sidecars: vec![],
    })
}

fn default_steps() -> usize {
    64
}
fn default_radius() -> f64 {
    0.01
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct OrbitParams {
    x: String,
    #[serde(default = "default_steps")]
    steps: usize,
    /// Start of the ω-surrogate window; defaults to `steps / 2`.
    #[serde(default)]
    burn: Option<usize>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default = "default_radius")]
    radius: f64,
}

fn orbit_with<M>(map: &M, x: M::Point, p: &OrbitParams) -> Result<Outcome>
where
    M: Dynamics,
    M::Point: Serialize + Display + PartialOrd,
{
    let burn = p.burn.unwrap_or(p.steps / 2);
    let tol = p.tol.unwrap_or_else(|| map.default_tol());
    let orb = orbit(map, &x, p.steps)?;
    let omega = omega_approx(map, &x, burn, p.steps, tol)?;
    let flags = recurrence_classify(map, &x, p.steps, p.radius)?;
    let mut csv = String::from("t,x,coord\n");
    for (t, y) in orb.points.iter().enumerate() {
        csv.push_str(&format!("{t},{y},{}\n", map.coord(y)));
    }
    Ok(Outcome {
        results: json!({ "orbit": orb, "omega": omega, "recurrence": flags }),
        sidecars: vec![("orbit.csv".into(), csv)],
    })
}

fn run_orbit(h: &MapHandle, p: OrbitParams) -> Result<Outcome> {
    match h {
        MapHandle::Numeric(m) => orbit_with::<NumericMap>(m, numeric_point(&p.x)?, &p),
        other => {
            let x: Rational = p.x.parse()?;
            with_rational_map!(other, m => orbit_with(m, x, &p))
        }
    }
}

fn default_max_n() -> usize {
    8
}
fn default_piece_budget() -> usize {
    DEFAULT_PIECE_BUDGET
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PeriodicParams {
    #[serde(default = "default_max_n")]
    max_n: usize,
    /// When set, test exactly the periods `1, 2, …, 2^{dyadic+1}`.
    #[serde(default)]
    dyadic: Option<u32>,
    #[serde(default = "default_piece_budget")]
    budget: usize,
}

fn run_periodic(h: &MapHandle, p: PeriodicParams) -> Result<Outcome> {
    let map = exact_of(h)?;
    match p.dyadic {
        Some(m) => plain(to_value(&dyadic_periods(map, m, p.budget)?)?),
        None => plain(to_value(&period_spectrum(map, p.max_n, p.budget)?)?),
    }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EntropyParams {
    #[serde(default = "default_max_n")]
    max_n: usize,
    #[serde(default = "default_piece_budget")]
    budget: usize,
}

fn zero() -> Rational {
    Rational::zero()
}
fn default_depth() -> usize {
    4
}
fn default_horizon() -> usize {
    4096
}
fn yes() -> bool {
    true
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PortionParams {
    #[serde(default = "zero")]
    base: Rational,
    #[serde(default = "default_depth")]
    depth: usize,
    #[serde(default = "default_horizon")]
    horizon: usize,
    /// Defaults to `horizon / 4`.
    #[serde(default)]
    burn: Option<usize>,
    #[serde(default)]
    tol: Option<f64>,
    /// Check the portion properties exactly on the stage map.
    #[serde(default = "yes")]
    verify: bool,
}

fn run_portion(h: &MapHandle, p: PortionParams) -> Result<Outcome> {
    let mut omega = OmegaParams::for_horizon(p.horizon);
    omega.burn = p.burn.unwrap_or(omega.burn);
    omega.tol = p.tol.unwrap_or(omega.tol);
    let portion = with_rational_map!(h, m => compute_portion(m, &p.base, p.depth, omega))?;
    let verification = if p.verify {
        Some(verify_portion(exact_of(h)?, &portion)?)
    } else {
        None
    };
    plain(json!({ "portion": portion.export(), "verification": verification }))
}

fn default_tol() -> f64 {
    1e-6
}
fn default_delta() -> f64 {
    0.1
}
fn default_p() -> u32 {
    4
}
fn default_code_depth() -> usize {
    8
}
fn default_exponent() -> u32 {
    3
}
fn default_grid() -> Rational {
    Rational::new(1, 16)
}
fn default_scramble_horizon() -> usize {
    1024
}
fn default_scramble_tol() -> f64 {
    1e-4
}
fn default_two() -> usize {
    2
}
fn default_regional_k() -> u32 {
    4
}
fn default_regional_horizon() -> usize {
    256
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct CodeBlock {
    #[serde(default = "zero")]
    base: Rational,
    #[serde(default = "default_code_depth")]
    depth: usize,
    #[serde(default = "default_horizon")]
    horizon: usize,
}

#[derive(Deserialize, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
enum PairsParams {
    /// Window proxies of one pair, optionally with the kneading-code verdict.
    Classify {
        x: String,
        y: String,
        #[serde(default = "default_horizon")]
        horizon: usize,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        code: Option<CodeBlock>,
    },
    Density {
        x: Rational,
        y: Rational,
        #[serde(default = "default_p")]
        p: u32,
        #[serde(default)]
        windows: Option<Vec<(usize, usize)>>,
        #[serde(default = "default_code_depth")]
        depth: usize,
    },
    Nonseparable {
        u: Rational,
        v: Rational,
        #[serde(default = "zero")]
        base: Rational,
        #[serde(default = "default_horizon")]
        horizon: usize,
        #[serde(default = "default_exponent")]
        period_exponent: u32,
    },
    Scrambled {
        #[serde(default = "default_two")]
        n: usize,
        #[serde(default = "default_grid")]
        grid_step: Rational,
        #[serde(default = "default_scramble_horizon")]
        horizon: usize,
        #[serde(default = "default_scramble_tol")]
        tol: f64,
    },
    Regional {
        x: Rational,
        y: Rational,
        #[serde(default = "default_regional_k")]
        k: u32,
        #[serde(default = "default_regional_horizon")]
        horizon: usize,
    },
}

/// A point for the floating-point backend: a decimal or an exact rational.
fn numeric_point(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .or_else(|_| s.parse::<Rational>().map(|q| q.to_f64()))
        .map_err(|_| Error::input(format!("cannot read point {s:?}")))
}

fn run_pairs(h: &MapHandle, p: PairsParams) -> Result<Outcome> {
    match p {
        PairsParams::Classify {
            x,
            y,
            horizon,
            tol,
            delta,
            code,
        } => {
            let mut report = match h {
                MapHandle::Numeric(m) => {
                    let (px, py) = (numeric_point(&x)?, numeric_point(&y)?);
                    to_value(&classify_pair(m, &px, &py, horizon, tol, delta)?)?
                }
                other => {
                    let (px, py): (Rational, Rational) = (x.parse()?, y.parse()?);
                    with_rational_map!(other, m => to_value(&classify_pair(m, &px, &py, horizon, tol, delta)?))?
                }
            };
            if let Some(c) = code {
                let (qx, qy): (Rational, Rational) = (x.parse()?, y.parse()?);
                let verdict = with_rational_map!(h, m => {
                    let portion = compute_portion(m, &c.base, c.depth, OmegaParams { burn: 0, ..OmegaParams::for_horizon(c.horizon) })?;
                    let cx = kneading_code(m, &portion, &qx, c.depth, c.horizon)?;
                    let cy = kneading_code(m, &portion, &qy, c.depth, c.horizon)?;
                    proximal_by_code(&cx, &cy)
                })?;
                report["code_verdict"] = to_value(&verdict)?;
            }
            plain(report)
        }
        PairsParams::Density {
            x,
            y,
            p,
            windows,
            depth,
        } => {
            let windows = windows.unwrap_or_else(|| vec![(0, default_horizon())]);
            let table = with_rational_map!(h, m => banach_density_estimate(m, &x, &y, p, &windows, depth))?;
            plain(to_value(&table)?)
        }
        PairsParams::Nonseparable {
            u,
            v,
            base,
            horizon,
            period_exponent,
        } => {
            let params = NonsepParams::new(base, OmegaParams::for_horizon(horizon), period_exponent);
            plain(to_value(&f_nonseparable_test(exact_of(h)?, &u, &v, &params)?)?)
        }
        PairsParams::Scrambled {
            n,
            grid_step,
            horizon,
            tol,
        } => {
            let params = ScrambleSearch::new(n, grid_step, horizon, tol);
            let res = with_rational_map!(h, m => n_scrambled_search(m, &params))?;
            plain(to_value(&res)?)
        }
        PairsParams::Regional { x, y, k, horizon } => {
            plain(to_value(&regionally_proximal_test(exact_of(h)?, &x, &y, k, horizon)?)?)
        }
    }
}

fn default_cover_n() -> usize {
    8
}
fn default_mixing_n() -> usize {
    32
}

#[derive(Deserialize, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
enum CoversParams {
    Entropy {
        cover: Vec<String>,
        #[serde(default = "default_cover_n")]
        n_max: usize,
    },
    Complexity {
        cover: Vec<String>,
        #[serde(default = "default_cover_n")]
        n_max: usize,
    },
    Subcover {
        cover: Vec<String>,
    },
    Mixing {
        interval: String,
        eps: Rational,
        #[serde(default = "default_mixing_n")]
        n_max: usize,
    },
}

fn run_covers(h: &MapHandle, p: CoversParams) -> Result<Outcome> {
    let map = exact_of(h)?;
    match p {
        CoversParams::Entropy { cover, n_max } => {
            let est = cover_entropy(map, &parse_cover(&cover)?, n_max)?;
            Ok(Outcome {
                results: to_value(&est)?,
                sidecars: vec![("entropy.csv".into(), est.csv())],
            })
        }
        CoversParams::Complexity { cover, n_max } => {
            plain(to_value(&complexity_cu(map, &parse_cover(&cover)?, n_max)?)?)
        }
        CoversParams::Subcover { cover } => {
            let u = parse_cover(&cover)?;
            let s = min_subcover(&u, DEFAULT_NODE_BUDGET)?;
            plain(json!({ "count": s.count, "chosen": s.chosen, "nodes": s.nodes, "elements": u.len() }))
        }
        CoversParams::Mixing { interval, eps, n_max } => {
            let j: Interval = interval.parse()?;
            plain(to_value(&mixing_certificate(map, &j, &eps, n_max)?)?)
        }
    }
}

fn default_time_budget() -> usize {
    DEFAULT_TIME_BUDGET
}
fn default_m() -> usize {
    4
}
fn default_profile_horizon() -> usize {
    128
}

#[derive(Deserialize, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
enum IndependenceParams {
    Certificate {
        targets: Vec<String>,
        times: Vec<usize>,
        #[serde(default = "default_time_budget")]
        time_budget: usize,
    },
    Arithmetic {
        targets: Vec<String>,
        #[serde(default = "default_m")]
        m: usize,
        #[serde(default = "default_max_n")]
        n_budget: usize,
    },
    Profile {
        x: Rational,
        y: Rational,
        /// Defaults to `2^-3, …, 2^-8`.
        #[serde(default)]
        radii: Option<Vec<Rational>>,
        #[serde(default = "default_profile_horizon")]
        horizon: usize,
        #[serde(default)]
        thresholds: Option<ThresholdBlock>,
    },
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ThresholdBlock {
    long: usize,
    density: f64,
    cap: usize,
}

fn run_independence(h: &MapHandle, p: IndependenceParams) -> Result<Outcome> {
    let map = exact_of(h)?;
    match p {
        IndependenceParams::Certificate {
            targets,
            times,
            time_budget,
        } => {
            let cert = independence_check_budgeted(map, &parse_sets(&targets)?, &times, time_budget)?;
            plain(json!({ "certificate": cert, "revalidated": cert.revalidate(map)? }))
        }
        IndependenceParams::Arithmetic { targets, m, n_budget } => plain(to_value(&arithmetic_independence(
            map,
            &parse_sets(&targets)?,
            m,
            n_budget,
        )?)?),
        IndependenceParams::Profile {
            x,
            y,
            radii,
            horizon,
            thresholds,
        } => {
            let radii = radii.unwrap_or_else(default_radii);
            let th = thresholds.map_or_else(ProfileThresholds::default, |t| ProfileThresholds {
                long: t.long,
                density: t.density,
                cap: t.cap,
            });
            plain(to_value(&pair_independence_profile(
                map, &x, &y, &radii, horizon, &th,
            )?)?)
        }
    }
}

fn default_tree_depth() -> usize {
    5
}
fn default_k_max() -> u32 {
    12
}
fn half() -> Rational {
    Rational::new(1, 2)
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct WitnessParams {
    u: Rational,
    v: Rational,
    /// Tree depth `M`; `M + 1` covering stages are built.
    #[serde(default = "default_tree_depth")]
    depth: usize,
    #[serde(default = "zero")]
    base: Rational,
    #[serde(default = "default_horizon")]
    horizon: usize,
    #[serde(default = "default_exponent")]
    period_exponent: u32,
    #[serde(default = "default_k_max")]
    k_max: u32,
    #[serde(default = "half")]
    shrink: Rational,
    #[serde(default)]
    first_radius: Option<Rational>,
    /// Demand NONSEPARABLE evidence for `(u, v)` before building.
    #[serde(default = "yes")]
    require_nonseparable: bool,
}

fn run_witness(h: &MapHandle, p: WitnessParams) -> Result<Outcome> {
    let map = exact_of(h)?;
    let cparams = CoveringParams {
        first_radius: p.first_radius.clone(),
        shrink: p.shrink.clone(),
        k_max: p.k_max,
    };
    let seqs = if p.require_nonseparable {
        let nonsep = NonsepParams::new(p.base.clone(), OmegaParams::for_horizon(p.horizon), p.period_exponent);
        covering_pair_sequences(map, &p.u, &p.v, p.depth + 1, &nonsep, &cparams)?
    } else {
        build_covering_sequences(map, &p.u, &p.v, p.depth + 1, &cparams)?
    };
    let tree = scrambled_witness_tree(map, &seqs, p.depth)?;
    plain(json!({ "leaves": tree.leaves().len(), "tree": tree }))
}

fn default_pattern_n() -> usize {
    6
}
fn default_window() -> usize {
    12
}
fn default_tuple_budget() -> usize {
    DEFAULT_TUPLE_BUDGET
}
fn default_smital_horizon() -> usize {
    256
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SmitalBlock {
    eps: Rational,
    pad: Rational,
    samples: Vec<Rational>,
    #[serde(default = "default_smital_horizon")]
    horizon: usize,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PatternParams {
    cover: Vec<String>,
    #[serde(default = "default_pattern_n")]
    n_max: usize,
    #[serde(default = "default_window")]
    window: usize,
    #[serde(default = "default_tuple_budget")]
    tuple_budget: usize,
    #[serde(default)]
    smital: Option<SmitalBlock>,
}

fn run_pattern(h: &MapHandle, p: PatternParams) -> Result<Outcome> {
    let map = exact_of(h)?;
    let u = parse_cover(&p.cover)?;
    let table = pattern_growth_budgeted(map, &u, p.n_max, p.window, p.tuple_budget)?;
    let growth = if table.rows.len() >= 4 {
        Some(growth_classify(&table)?)
    } else {
        None
    };
    let (data, bound) = match &p.smital {
        Some(s) => {
            let data = smital_data(map, &s.eps, &s.pad, &s.samples, s.horizon)?;
            let bound = bound_check(&table, &data)?;
            (Some(data), Some(bound))
        }
        None => (None, None),
    };
    let csv = table.csv(bound.as_ref());
    Ok(Outcome {
        results: json!({
            "table": table,
            "growth": growth,
            "smital": data,
            "bound": bound,
        }),
        sidecars: vec![("growth.csv".into(), csv)],
    })
}
