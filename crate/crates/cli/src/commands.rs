//! One function per subcommand. Each returns the text for stdout plus the
//! files to write under the output directory.

use serde_json::{json, Value};
use urysohn_ifs::hutchinson::{chaos_game, iterate_to_attractor, HutchinsonError, IfSystem};
use urysohn_ifs::io::{
    coords_to_csv, history_to_json, labels_to_csv, plan_to_json, space_to_json, to_pretty,
    transcript_to_json,
};
use urysohn_ifs::katetov::{
    build_urysohn_approx, extend_map, extend_system, extension_coverage, modulus_excess,
};
use urysohn_ifs::maps::{PointMap, TableMap};
use urysohn_ifs::measure::{verify_measure_contraction, wasserstein1};
use urysohn_ifs::metric::{hausdorff_distance, CompactSet, MetricSpace};
use urysohn_ifs::moduli::classify_modulus;
use urysohn_ifs::{FiniteMetricSpace, Rational, Scalar};

use crate::config::{index, parse_list, table_map, RunConfig, Space};
use crate::error::{CliError, Exit};

#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, String)>,
    /// Set when the run finished with a reportable failure (the files are
    /// still written).
    pub failure: Option<CliError>,
}

impl Output {
    fn json(value: &Value) -> Self {
        Output {
            stdout: to_pretty(value),
            ..Output::default()
        }
    }

    fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.into(), contents));
        self
    }
}

fn lit<S: Scalar>(v: &S) -> Value {
    Value::String(v.to_literal())
}

pub fn validate(cfg: &RunConfig) -> Result<Output, CliError> {
    match cfg.space()? {
        Space::Table(s) => {
            let diameter = CompactSet::new(&s, s.points())?.diameter(&s);
            Ok(Output::json(&json!({
                "valid": true,
                "points": s.len(),
                "diameter": lit(&diameter),
            })))
        }
        Space::Euclidean(e) => Ok(Output::json(&json!({ "valid": true, "dim": e.dim() }))),
    }
}

pub fn classify(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = cfg
        .classify
        .as_ref()
        .ok_or_else(|| CliError::missing("classify"))?;
    let phi = spec.modulus.to_modulus::<Rational>()?;
    let d_max: Rational = spec.d_max.parse("d_max")?;
    let grid: Vec<Rational> = parse_list(&spec.delta_grid, "delta_grid")?;
    let verdict = classify_modulus(&phi, &d_max, &grid)?;
    let value = serde_json::to_value(&verdict).expect("plain record");
    Ok(Output::json(&value).file("classification.json", to_pretty(&value)))
}

fn attractor_run<M, F>(
    space: &M,
    system: &IfSystem<F>,
    start: Vec<M::Point>,
    tol: &M::Scalar,
    max_iter: usize,
    cloud: impl Fn(&[M::Point]) -> String,
) -> Result<Output, CliError>
where
    M: MetricSpace,
    F: PointMap<M::Point>,
{
    let start = CompactSet::new(space, start)?;
    match iterate_to_attractor(space, system, &start, tol, max_iter) {
        Ok(run) => {
            let history = history_to_json(&run.history);
            Ok(Output::json(&json!({
                "converged": true,
                "steps": run.steps(),
                "points": run.set.len(),
                "last_step": run.history.last().map(|d| d.to_f64_lossy()),
            }))
            .file("attractor.csv", cloud(run.set.members()))
            .file("history.json", to_pretty(&history)))
        }
        Err(e @ HutchinsonError::NonConvergence { .. }) => {
            let HutchinsonError::NonConvergence { max_iter, history } = &e else {
                unreachable!()
            };
            let mut out = Output::json(&json!({
                "converged": false,
                "steps": max_iter,
                "last_step": history.last().map(|d| d.to_f64_lossy()),
            }))
            .file("history.json", to_pretty(&history_to_json(history)));
            out.failure = Some(e.into());
            Ok(out)
        }
        Err(e) => Err(e.into()),
    }
}

fn system<F>(maps: Vec<F>) -> Result<IfSystem<F>, CliError> {
    Ok(IfSystem::new::<Rational>(maps)?)
}

pub fn attractor(cfg: &RunConfig) -> Result<Output, CliError> {
    match cfg.space()? {
        Space::Euclidean(e) => {
            let sys = system(cfg.affine_maps(e.dim())?)?;
            let start = cfg.start_coords(e.dim())?;
            attractor_run(&e, &sys, start, &cfg.tol::<f64>()?, cfg.max_iter(), |pts| {
                coords_to_csv(pts)
            })
        }
        Space::Table(s) => {
            let sys = system(cfg.table_maps(&s)?)?;
            let start = cfg.start_labels(&s)?;
            attractor_run(
                &s,
                &sys,
                start,
                &cfg.tol::<Rational>()?,
                cfg.max_iter(),
                |pts| labels_to_csv(&s, pts),
            )
        }
    }
}

pub fn chaos(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = cfg
        .chaos
        .as_ref()
        .ok_or_else(|| CliError::missing("chaos"))?;
    let (csv, points) = match cfg.space()? {
        Space::Euclidean(e) => {
            let sys = system(cfg.affine_maps(e.dim())?)?;
            let x0 = cfg.start_coords(e.dim())?.swap_remove(0);
            let cloud = chaos_game(&e, &sys, &x0, spec.steps, spec.burn_in, cfg.seed())?;
            (coords_to_csv(cloud.members()), cloud.len())
        }
        Space::Table(s) => {
            let sys = system(cfg.table_maps(&s)?)?;
            let x0 = cfg.start_labels(&s)?[0];
            let cloud = chaos_game(&s, &sys, &x0, spec.steps, spec.burn_in, cfg.seed())?;
            (labels_to_csv(&s, cloud.members()), cloud.len())
        }
    };
    Ok(Output::json(&json!({ "points": points, "seed": cfg.seed() })).file("chaos.csv", csv))
}

pub fn wasserstein(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = cfg.table_space()?;
    let spec = cfg
        .wasserstein
        .as_ref()
        .ok_or_else(|| CliError::missing("wasserstein"))?;
    let mu = spec.mu.on_table(&s)?;
    let eta = spec.eta.on_table(&s)?;
    let (w, plan) = wasserstein1(&s, &mu, &eta)?;
    let plan = plan_to_json(&plan);
    Ok(Output::json(&json!({ "distance": lit(&w), "plan": plan }))
        .file("plan.json", to_pretty(&plan)))
}

fn pick<'a, T>(items: &'a [T], i: usize, what: &str) -> Result<&'a T, CliError> {
    items
        .get(i)
        .ok_or_else(|| CliError::malformed("MissingField", format!("no {what} #{i}")))
}

pub fn lift_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = cfg.table_space()?;
    let spec = cfg.lift.clone().unwrap_or(crate::config::LiftSpec {
        map: 0,
        enforce_precondition: true,
    });
    let maps = cfg.table_maps(&s)?;
    let moduli = cfg.moduli()?;
    let f = pick(&maps, spec.map, "map")?;
    let phi = pick(&moduli, spec.map, "modulus")?;
    let report = verify_measure_contraction(
        &s,
        &s.points(),
        f,
        phi,
        cfg.trials(),
        cfg.seed(),
        spec.enforce_precondition,
    )?;
    let summary = json!({
        "trials": report.trials.len(),
        "strict_fraction": report.strict_fraction,
        "max_ratio": lit(&report.max_ratio),
        "coupling_gap_min": lit(&report.coupling_gap_min),
        "chain_holds": report.trials.iter().all(|t| t.chain_holds),
        "marginals_exact": report.trials.iter().all(|t| t.marginals_exact),
    });
    let trials: Vec<Value> = report
        .trials
        .iter()
        .map(|t| {
            json!({
                "before": lit(&t.before),
                "after": lit(&t.after),
                "image_cost": lit(&t.image_cost),
                "phi_cost": lit(&t.phi_cost),
                "x_delta_mass": lit(&t.x_delta_mass),
                "strict": t.strict,
                "chain_holds": t.chain_holds,
                "marginals_exact": t.marginals_exact,
            })
        })
        .collect();
    let full = json!({ "summary": summary, "trials": trials });
    Ok(Output::json(&summary).file("lift.json", to_pretty(&full)))
}

fn pairs_json(
    from: &FiniteMetricSpace<Rational>,
    to: &FiniteMetricSpace<Rational>,
    f: &TableMap,
) -> Value {
    Value::Array(
        (0..from.len())
            .filter_map(|p| f.get(p).map(|q| json!([from.label(p), to.label(q)])))
            .collect(),
    )
}

pub fn extend(cfg: &RunConfig) -> Result<Output, CliError> {
    let ambient = cfg.table_space()?;
    let spec = cfg
        .extend
        .as_ref()
        .ok_or_else(|| CliError::missing("extend"))?;
    let domain = spec.domain.to_space::<Rational>()?;
    let f = table_map(&domain, &ambient, &spec.base)?;
    let phi = spec.modulus.to_modulus::<Rational>()?;
    let order = spec
        .order
        .as_ref()
        .map(|o| {
            o.iter()
                .map(|l| index(&domain, l))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let ext = extend_map(
        &domain,
        &f,
        &phi,
        &ambient,
        order.as_deref(),
        spec.injective,
    )?;
    let excess = modulus_excess(&domain, &ext.ambient, &ext.map, &phi).expect("extension is total");
    Ok(Output::json(&json!({
        "ambient_size": ext.ambient.len(),
        "map": pairs_json(&domain, &ext.ambient, &ext.map),
        "max_excess": lit(&excess),
    }))
    .file(
        "transcript.json",
        to_pretty(&transcript_to_json(&ext.transcript)),
    )
    .file("ambient.json", space_to_json(&ext.ambient)))
}

pub fn realize(cfg: &RunConfig) -> Result<Output, CliError> {
    let x = cfg.table_space()?;
    let spec = cfg
        .realize
        .as_ref()
        .ok_or_else(|| CliError::missing("realize"))?;
    let sys = system(cfg.table_maps(&x)?)?;
    let moduli = cfg.moduli()?;
    let grid: Vec<Rational> = parse_list(&spec.grid, "grid")?;
    let tol: Rational = cfg.tol()?;
    let grown = build_urysohn_approx(&x, spec.rounds, &grid, cfg.seed())?;
    let embedding = x.points();
    let ext = extend_system(
        &x,
        &sys,
        &moduli,
        &grown.space,
        &embedding,
        None,
        spec.max_ambient,
    )?;
    let amb = &ext.ambient;
    let image = urysohn_ifs::hutchinson_image(amb, &ext.system, &ext.embedded)?;
    let fixed = image.same_set(amb, &ext.embedded);
    // farthest ambient point from X, first on ties
    let far = (0..amb.len())
        .map(|p| {
            let d = amb.directed_hausdorff(&[p], ext.embedded.members());
            (p, d)
        })
        .fold(None::<(usize, Rational)>, |best, (p, d)| match best {
            Some((_, ref b)) if *b >= d => best,
            _ => Some((p, d)),
        })
        .expect("ambient is non-empty")
        .0;
    let mut maps_json = Vec::new();
    for f in ext.system.maps() {
        maps_json.push(pairs_json(amb, amb, f));
    }
    let mut out = match iterate_to_attractor(
        amb,
        &ext.system,
        &CompactSet::singleton(far),
        &tol,
        cfg.max_iter(),
    ) {
        Ok(run) => {
            let final_distance = hausdorff_distance(amb, &run.set, &ext.embedded)?;
            Output::json(&json!({
                "ambient_size": amb.len(),
                "grown_size": grown.space.len(),
                "fixed_set": fixed,
                "seed_point": amb.label(far),
                "converged": true,
                "steps": run.steps(),
                "history": history_to_json(&run.history),
                "final_distance": lit(&final_distance),
            }))
        }
        Err(e) => {
            let mut out = Output::json(&json!({
                "ambient_size": amb.len(),
                "fixed_set": fixed,
                "converged": false,
            }));
            out.failure = Some(e.into());
            out
        }
    };
    if !fixed && out.failure.is_none() {
        out.failure = Some(CliError::invalid(
            "NotSelfSimilar: the extended system moves X",
        ));
    }
    Ok(out
        .file("ambient.json", space_to_json(amb))
        .file("maps.json", to_pretty(&Value::Array(maps_json)))
        .file(
            "transcript.json",
            to_pretty(&transcript_to_json(&ext.transcript)),
        ))
}

pub fn urysohn(cfg: &RunConfig) -> Result<Output, CliError> {
    let seed_space = cfg.table_space()?;
    let spec = cfg
        .urysohn
        .as_ref()
        .ok_or_else(|| CliError::missing("urysohn"))?;
    let grid: Vec<Rational> = parse_list(&spec.grid, "grid")?;
    let grown = build_urysohn_approx(&seed_space, spec.rounds, &grid, cfg.seed())?;
    let tolerance: Rational = match &spec.tolerance {
        Some(t) => t.parse("tolerance")?,
        None => grid_resolution(&grid),
    };
    let coverage = extension_coverage(&grown.space, &grid, &tolerance, spec.checks, cfg.seed());
    Ok(Output::json(&json!({
        "size": grown.space.len(),
        "skipped_rounds": grown.skipped_rounds,
        "coverage": coverage,
        "tolerance": lit(&tolerance),
    }))
    .file("urysohn.json", space_to_json(&grown.space)))
}

/// Smallest gap between sorted grid values; the value itself for a
/// one-point grid.
pub fn grid_resolution(grid: &[Rational]) -> Rational {
    let mut sorted = grid.to_vec();
    sorted.sort();
    sorted.dedup();
    sorted
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .min()
        .or_else(|| sorted.first().cloned())
        .unwrap_or_else(|| Rational::from_integer(1.into()))
}

pub fn exit_of(out: &Output) -> Exit {
    out.failure.as_ref().map_or(Exit::Ok, |e| e.exit)
}
