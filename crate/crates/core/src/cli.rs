//! Subcommands behind the `pmsep` binary. Each returns an exit code and a
//! JSON report; printing is left to the caller.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::axioms::{build_farkas_system, check_nias, check_nipmc_with, explain_violation, Lambda, LambdaSelection, NiasReport, NipmcVerdict};
use crate::concavity::{assignment_count, certify_concave, ConcavityStatus};
use crate::error::{Error, Result};
use crate::forward::{generate_dataset, generate_multi_prior_dataset, indirect_utility_function, oracle_value, solve_forward, ForwardProblem};
use crate::io::{self, function_from_json, function_json, sample, scalar_json, Figure, ProblemFile};
use crate::model::{validate_dataset, Dataset};
use crate::piecewise::PiecewiseFunction;
use crate::recovery::{recover, verify_rationalization, RationalizationReport, Recovery};
use crate::revealed::DiscreteCdf;
use crate::scalar::{Float, NumericMode, Rational, Scalar};

pub const EXIT_OK: i32 = 0;
/// An axiom failed, an audit failed, or no certificate was found.
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Points per figure series, besides breakpoints.
const FIGURE_SAMPLES: usize = 201;
/// Default oracle resolution: the grid `i / 100`.
pub const DEFAULT_ORACLE_RESOLUTION: usize = 101;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Validate { dataset: PathBuf },
    Check { dataset: PathBuf, dump_lp: Option<PathBuf> },
    Recover { dataset: PathBuf, flattest: bool, dump_lp: Option<PathBuf> },
    /// `oracle == Some(0)` skips the oracle.
    Solve { problem: PathBuf, refine: usize, oracle: Option<usize> },
    Concavity { dataset: PathBuf, budget: u64 },
    Generate { spec: PathBuf },
    Verify { dataset: PathBuf, report: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Check { .. } => "check",
            Command::Recover { .. } => "recover",
            Command::Solve { .. } => "solve",
            Command::Concavity { .. } => "concavity",
            Command::Generate { .. } => "generate",
            Command::Verify { .. } => "verify",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CmdOutput {
    pub code: i32,
    pub report: Value,
    /// One-line human summary.
    pub summary: String,
    pub figures: Vec<Figure>,
}

impl CmdOutput {
    fn new(code: i32, report: Value, summary: impl Into<String>) -> Self {
        CmdOutput {
            code,
            report,
            summary: summary.into(),
            figures: Vec::new(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Structure(_) => EXIT_INPUT,
        Error::Resource(_) => EXIT_RESOURCE,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

/// Runs a command in the given numeric mode. `notify` receives progress
/// lines meant for the terminal.
pub fn run(cmd: &Command, mode: NumericMode, notify: &mut dyn FnMut(&str)) -> CmdOutput {
    let result = match mode {
        NumericMode::Rational => run_in::<Rational>(cmd, notify),
        NumericMode::Float => run_in::<Float>(cmd, notify),
    };
    let mut out = result.unwrap_or_else(|e| {
        CmdOutput::new(
            exit_code(&e),
            json!({ "status": "error", "error": e.to_string() }),
            format!("error: {e}"),
        )
    });
    // Generated datasets are files, not reports.
    let is_dataset = matches!(cmd, Command::Generate { .. }) && out.code == EXIT_OK;
    if let (Value::Object(map), false) = (&mut out.report, is_dataset) {
        map.insert("command".into(), json!(cmd.name()));
        map.insert("numeric_mode".into(), json!(mode_name(mode)));
        if !out.figures.is_empty() {
            map.insert("figures".into(), Value::Array(out.figures.iter().map(Figure::to_json).collect()));
        }
    }
    out
}

fn mode_name(mode: NumericMode) -> &'static str {
    match mode {
        NumericMode::Rational => "rational",
        NumericMode::Float => "float",
    }
}

fn run_in<S: Scalar>(cmd: &Command, notify: &mut dyn FnMut(&str)) -> Result<CmdOutput> {
    match cmd {
        Command::Validate { dataset } => cmd_validate::<S>(dataset),
        Command::Check { dataset, dump_lp } => cmd_check::<S>(dataset, dump_lp.as_deref()),
        Command::Recover {
            dataset,
            flattest,
            dump_lp,
        } => cmd_recover::<S>(dataset, *flattest, dump_lp.as_deref()),
        Command::Solve { problem, refine, oracle } => cmd_solve::<S>(problem, *refine, *oracle),
        Command::Concavity { dataset, budget } => cmd_concavity::<S>(dataset, *budget, notify),
        Command::Generate { spec } => cmd_generate::<S>(spec),
        Command::Verify { dataset, report } => cmd_verify::<S>(dataset, report),
    }
}

fn load_dataset<S: Scalar>(path: &Path) -> Result<Dataset<S>> {
    io::parse_dataset(&io::read_file(path)?)
}

fn load_valid<S: Scalar>(path: &Path) -> Result<Dataset<S>> {
    let data = load_dataset(path)?;
    data.ensure_valid()?;
    Ok(data)
}

fn dump_system<S: Scalar>(data: &Dataset<S>, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        let system = build_farkas_system(data)?;
        std::fs::write(path, system.lp.to_lp_format())
            .map_err(|e| crate::error::structure(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn cmd_validate<S: Scalar>(path: &Path) -> Result<CmdOutput> {
    let data: Dataset<S> = load_dataset(path)?;
    let report = validate_dataset(&data);
    let valid = report.is_valid();
    let summary = if valid {
        format!("valid: {} observations over {} states", data.len(), data.state_space.len())
    } else {
        format!("invalid: {}", report.violations.join("; "))
    };
    Ok(CmdOutput::new(
        if valid { EXIT_OK } else { EXIT_REJECTED },
        json!({ "status": if valid { "valid" } else { "invalid" }, "violations": report.violations }),
        summary,
    ))
}

fn nias_json<S: Scalar>(data: &Dataset<S>, r: &NiasReport<S>) -> Value {
    json!({
        "passed": r.passed(),
        "violations": r.violations.iter().map(|v| {
            let menu = data.menu_of(v.observation);
            json!({
                "observation": data.observation_label(v.observation),
                "act": menu.acts[v.act].id,
                "better_act": menu.acts[v.deviation].id,
                "revealed_mean": scalar_json(&v.revealed_mean),
                "deficit": scalar_json(&v.deficit),
            })
        }).collect::<Vec<_>>(),
    })
}

fn lambda_json<S: Scalar>(data: &Dataset<S>, lambda: &Lambda<S>) -> Value {
    Value::Array(
        lambda
            .per_obs
            .iter()
            .enumerate()
            .map(|(obs, ms)| {
                json!({
                    "observation": data.observation_label(obs),
                    "multipliers": ms.iter().map(|(z, l)| json!({
                        "zstar": scalar_json(z),
                        "value": scalar_json(l),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn nipmc_json<S: Scalar>(data: &Dataset<S>, verdict: &NipmcVerdict<S>) -> Result<Value> {
    Ok(match verdict {
        NipmcVerdict::Pass { lambda } => json!({ "passed": true, "lambda": lambda_json(data, lambda) }),
        NipmcVerdict::Fail { certificate, rows } => {
            let explanation = explain_violation(verdict, data)?;
            let entries: Vec<Value> = certificate
                .iter()
                .zip(rows)
                .enumerate()
                .filter(|(_, (w, _))| !w.is_zero())
                .map(|(r, (w, label))| {
                    json!({
                        "row": r,
                        "observation": data.observation_label(label.obs_a),
                        "act": data.menu_of(label.obs_a).acts[label.act].id,
                        "other_observation": data.observation_label(label.obs_b),
                        "other_act": data.menu_of(label.obs_b).acts[label.alt].id,
                        "weight": scalar_json(w),
                    })
                })
                .collect();
            json!({
                "passed": false,
                "certificate": entries,
                "aggregate": scalar_json(&explanation.aggregate),
                "cycle": explanation.steps.iter().map(|s| json!({
                    "from": s.from_obs,
                    "to": s.to_obs,
                    "act": s.act,
                    "alt": s.alt,
                    "revealed_mean": scalar_json(&s.revealed_mean),
                    "choice_prob": scalar_json(&s.choice_prob),
                    "weight": scalar_json(&s.weight),
                    "gain": scalar_json(&s.gain),
                })).collect::<Vec<_>>(),
                "explanation": explanation.to_string(),
            })
        }
    })
}

pub fn cmd_check<S: Scalar>(path: &Path, dump_lp: Option<&Path>) -> Result<CmdOutput> {
    let data: Dataset<S> = load_valid(path)?;
    dump_system(&data, dump_lp)?;
    let nias = check_nias(&data)?;
    let nipmc = check_nipmc_with(&data, LambdaSelection::FirstFeasible)?;
    let passed = nias.passed() && nipmc.passed();
    let summary = match (nias.passed(), nipmc.passed()) {
        (true, true) => "pass: NIAS and NIPMC hold".to_string(),
        (false, _) => format!("reject: NIAS fails ({} violations)", nias.violations.len()),
        (true, false) => "reject: NIPMC fails (certificate in report)".to_string(),
    };
    Ok(CmdOutput::new(
        if passed { EXIT_OK } else { EXIT_REJECTED },
        json!({
            "status": if passed { "pass" } else { "fail" },
            "nias": nias_json(&data, &nias),
            "nipmc": nipmc_json(&data, &nipmc)?,
        }),
        summary,
    ))
}

fn audit_json<S: Scalar>(data: &Dataset<S>, audit: &RationalizationReport<S>) -> Value {
    json!({
        "all_true": audit.all_true(),
        "observations": audit.observations.iter().enumerate().map(|(obs, a)| json!({
            "observation": data.observation_label(obs),
            "price_convex": a.price_convex,
            "convex_slack": scalar_json(&a.convex_slack),
            "price_majorizes": a.price_majorizes,
            "majorize_slack": scalar_json(&a.majorize_slack),
            "contact_at_revealed": a.contact_at_revealed,
            "contact_slack": scalar_json(&a.contact_slack),
            "affine_off_binding": a.affine_off_binding,
            "affine_slack": scalar_json(&a.affine_slack),
            "integral_match": a.integral_match,
            "integral_slack": scalar_json(&a.integral_slack),
        })).collect::<Vec<_>>(),
    })
}

fn prices_json<S: Scalar>(data: &Dataset<S>, prices: &[PiecewiseFunction<S>]) -> Value {
    Value::Array(
        prices
            .iter()
            .enumerate()
            .map(|(obs, p)| json!({ "observation": data.observation_label(obs), "function": function_json(p) }))
            .collect(),
    )
}

fn function_figure<S: Scalar>(name: &str, f: &PiecewiseFunction<S>) -> Figure {
    Figure {
        name: name.to_string(),
        x_label: "z".into(),
        y_label: name.to_string(),
        points: sample(|z| f.eval_unchecked(z), f.breakpoints(), FIGURE_SAMPLES),
    }
}

fn rationalization_figures<S: Scalar>(data: &Dataset<S>, cost: &PiecewiseFunction<S>, prices: &[PiecewiseFunction<S>]) -> Vec<Figure> {
    let mut figures = vec![function_figure("cost", cost)];
    for (obs, p) in prices.iter().enumerate() {
        figures.push(function_figure(&format!("price_{}", data.observation_label(obs)), p));
    }
    figures
}

pub fn cmd_recover<S: Scalar>(path: &Path, flattest: bool, dump_lp: Option<&Path>) -> Result<CmdOutput> {
    let data: Dataset<S> = load_valid(path)?;
    dump_system(&data, dump_lp)?;
    let selection = if flattest {
        LambdaSelection::Flattest
    } else {
        LambdaSelection::FirstFeasible
    };
    Ok(match recover(&data, selection)? {
        Recovery::Rationalized(r) => {
            let ok = r.audit.all_true();
            let mut out = CmdOutput::new(
                if ok { EXIT_OK } else { EXIT_INTERNAL },
                json!({
                    "status": if ok { "rationalized" } else { "audit_failed" },
                    "selection": if flattest { "flattest" } else { "first_feasible" },
                    "cost": function_json(&r.cost),
                    "cost_is_concave": r.cost.is_concave(),
                    "prices": prices_json(&data, &r.prices),
                    "lambda": lambda_json(&data, &r.lambda),
                    "audit": audit_json(&data, &r.audit),
                }),
                if ok {
                    format!("rationalized: c = {}", r.cost)
                } else {
                    "recovered cost fails its audit".to_string()
                },
            );
            out.figures = rationalization_figures(&data, &r.cost, &r.prices);
            out
        }
        Recovery::NiasFailed(report) => CmdOutput::new(
            EXIT_REJECTED,
            json!({ "status": "nias_failed", "nias": nias_json(&data, &report), "hint": "run `pmsep check` for details" }),
            "reject: NIAS fails; run `pmsep check` for details",
        ),
        Recovery::NipmcFailed(verdict) => CmdOutput::new(
            EXIT_REJECTED,
            json!({ "status": "nipmc_failed", "nipmc": nipmc_json(&data, &verdict)?, "hint": "run `pmsep check` for details" }),
            "reject: NIPMC fails; run `pmsep check` for details",
        ),
    })
}

fn cdf_json<S: Scalar>(f: &DiscreteCdf<S>) -> Value {
    Value::Array(
        f.atoms()
            .iter()
            .map(|(z, p)| json!({ "z": scalar_json(z), "mass": scalar_json(p) }))
            .collect(),
    )
}

pub fn cmd_solve<S: Scalar>(path: &Path, refine: usize, oracle: Option<usize>) -> Result<CmdOutput> {
    let file: ProblemFile = io::from_json_str(&io::read_file(path)?, "problem")?;
    let parsed = file.parse::<S>()?;
    let prior = DiscreteCdf::from_prior(&parsed.space, &parsed.prior)?;
    let problem = ForwardProblem::new(prior, parsed.menu, parsed.cost)?.refined(refine);
    let sol = solve_forward(&problem)?;

    let resolution = oracle.unwrap_or_else(|| DEFAULT_ORACLE_RESOLUTION.max(problem.grid.len()));
    let oracle_json = if resolution == 0 {
        Value::Null
    } else {
        let v: S = oracle_value(&problem, resolution)?;
        json!({
            "resolution": resolution,
            "value": scalar_json(&v),
            "matches": v.compare(&sol.value).is_eq(),
        })
    };

    let phi = indirect_utility_function(&problem.menu)?;
    let gross = phi.add(&problem.cost);
    let atoms: Vec<Value> = sol
        .f_star
        .atoms()
        .iter()
        .zip(&sol.acts)
        .map(|((z, p), a)| {
            json!({
                "z": scalar_json(z),
                "mass": scalar_json(p),
                "act": problem.menu.acts[*a].id,
                "price_minus_gross": scalar_json(&(sol.price.eval_unchecked(z) - problem.gross_value(z))),
            })
        })
        .collect();
    let summary = format!(
        "value {}; posterior means {}",
        sol.value,
        sol.f_star
            .atoms()
            .iter()
            .map(|(z, p)| format!("{z} w.p. {p}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let mut out = CmdOutput::new(
        EXIT_OK,
        json!({
            "status": "optimal",
            "value": scalar_json(&sol.value),
            "f_star": atoms,
            "price": function_json(&sol.price),
            "gross": function_json(&gross),
            "mass_dual": scalar_json(&sol.mass_dual),
            "mpc_duals": sol.mpc_duals.iter().map(|(s, d)| json!({ "s": scalar_json(s), "dual": scalar_json(d) })).collect::<Vec<_>>(),
            "prior": cdf_json(&problem.prior),
            "grid": sol.grid.iter().map(scalar_json).collect::<Vec<_>>(),
            "refine": refine,
            "oracle": oracle_json,
        }),
        summary,
    );
    out.figures = vec![
        function_figure("phi_plus_c", &gross),
        function_figure("price", &sol.price),
        Figure {
            name: "f_star".into(),
            x_label: "z".into(),
            y_label: "mass".into(),
            points: sol.f_star.atoms().iter().map(|(z, p)| (z.to_f64(), p.to_f64())).collect(),
        },
    ];
    Ok(out)
}

/// The line printed before a concavity search starts.
pub fn concavity_preamble(n: usize, k: usize, budget: u64) -> String {
    let total = assignment_count(n, k);
    let shown = if total == u64::MAX { "more than 2^64".to_string() } else { total.to_string() };
    format!("{n} observations over {k} states: {n}^{k} = {shown} assignments, budget {budget}")
}

pub fn cmd_concavity<S: Scalar>(path: &Path, budget: u64, notify: &mut dyn FnMut(&str)) -> Result<CmdOutput> {
    let data: Dataset<S> = load_valid(path)?;
    notify(&concavity_preamble(data.len(), data.state_space.len(), budget));
    let verdict = certify_concave(&data, budget)?;
    let base = json!({
        "programs_solved": verdict.programs_solved,
        "assignments_total": verdict.assignments_total,
        "budget": budget,
    });
    let mut report = base;
    let map = report.as_object_mut().expect("object");
    Ok(match verdict.status {
        ConcavityStatus::Certified {
            assignment,
            lambda,
            cost,
            prices,
            audit,
        } => {
            map.insert("status".into(), json!("certified"));
            map.insert(
                "assignment".into(),
                Value::Array(
                    data.state_space
                        .states
                        .iter()
                        .zip(&assignment)
                        .map(|(z, &obs)| json!({ "z": scalar_json(z), "observation": data.observation_label(obs) }))
                        .collect(),
                ),
            );
            map.insert("cost".into(), function_json(&cost));
            map.insert("prices".into(), prices_json(&data, &prices));
            map.insert("lambda".into(), lambda_json(&data, &lambda));
            map.insert("audit".into(), audit_json(&data, &audit));
            let mut out = CmdOutput::new(EXIT_OK, report, format!("certified concave: c = {cost}"));
            out.figures = rationalization_figures(&data, &cost, &prices);
            out
        }
        ConcavityStatus::Undetermined => {
            map.insert("status".into(), json!("undetermined"));
            CmdOutput::new(EXIT_REJECTED, report, "undetermined: no assignment admits a concave cost")
        }
        ConcavityStatus::BudgetExceeded => {
            map.insert("status".into(), json!("budget_exceeded"));
            CmdOutput::new(
                EXIT_RESOURCE,
                report,
                format!("budget exceeded after {} programs", verdict.programs_solved),
            )
        }
    })
}

pub fn cmd_generate<S: Scalar>(path: &Path) -> Result<CmdOutput> {
    let file: io::GenerateFile = io::from_json_str(&io::read_file(path)?, "generate spec")?;
    let g = file.parse::<S>()?;
    let data = match &g.pairs {
        None => generate_dataset(&g.space, &g.priors[0], &g.menus, &g.cost, g.tie)?,
        Some(pairs) => generate_multi_prior_dataset(&g.space, &g.priors, &g.menus, pairs, &g.cost, g.tie)?,
    };
    let summary = format!("generated {} observations", data.len());
    Ok(CmdOutput::new(EXIT_OK, io::dataset_to_json(&data), summary))
}

pub fn cmd_verify<S: Scalar>(dataset: &Path, report: &Path) -> Result<CmdOutput> {
    let data: Dataset<S> = load_valid(dataset)?;
    let text = io::read_file(report)?;
    let value: Value = io::from_json_str(&text, "report")?;
    let cost = function_from_json(
        value.get("cost").ok_or_else(|| crate::error::structure("report has no \"cost\""))?,
        "cost",
    )?;
    let prices = value
        .get("prices")
        .and_then(Value::as_array)
        .ok_or_else(|| crate::error::structure("report has no \"prices\""))?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let f = p
                .get("function")
                .ok_or_else(|| crate::error::structure(format!("prices[{i}]: missing \"function\"")))?;
            function_from_json(f, &format!("prices[{i}].function"))
        })
        .collect::<Result<Vec<PiecewiseFunction<S>>>>()?;
    let audit = verify_rationalization(&data, &cost, &prices)?;
    let ok = audit.all_true();
    Ok(CmdOutput::new(
        if ok { EXIT_OK } else { EXIT_REJECTED },
        json!({ "status": if ok { "verified" } else { "not_verified" }, "audit": audit_json(&data, &audit) }),
        if ok { "verified: all conditions hold" } else { "not verified: see audit" },
    ))
}
