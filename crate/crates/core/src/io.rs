//! JSON file formats: datasets, forward problems, generation specs and
//! reports.
//!
//! Numbers may be written as JSON numbers or as strings (`"1/3"`, `"0.25"`).
//! Reports carry every scalar as `{"exact": "p/q", "approx": 0.333..}`; only
//! the exact field is read back.

use std::collections::HashMap;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{structure, Error, Result};
use crate::forward::TieBreak;
use crate::model::{Act, Dataset, Menu, Observation, Prior, PriorMode, StateSpace};
use crate::piecewise::{PiecewiseFunction, Segment};
use crate::recovery::variance_cost;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Text(String),
    Number(serde_json::Number),
}

impl Num {
    pub fn parse<S: Scalar>(&self, path: &str) -> Result<S> {
        let text = match self {
            Num::Text(s) => s.clone(),
            Num::Number(n) => n.to_string(),
        };
        S::parse_str(&text).map_err(|e| structure(format!("{path}: {e}")))
    }
}

fn parse_all<S: Scalar>(xs: &[Num], path: &str) -> Result<Vec<S>> {
    xs.iter()
        .enumerate()
        .map(|(i, x)| x.parse(&format!("{path}[{i}]")))
        .collect()
}

/// Deserializes JSON text, reporting syntax and shape errors with their
/// line and column.
pub fn from_json_str<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        structure(format!(
            "{what}: line {}, column {}: {}",
            e.line(),
            e.column(),
            strip_position(&e.to_string())
        ))
    })
}

fn strip_position(msg: &str) -> &str {
    msg.find(" at line ").map_or(msg, |i| &msg[..i])
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| structure(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Deserialize)]
pub struct PriorFile {
    #[serde(default)]
    pub id: Option<String>,
    pub weights: Vec<Num>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PriorsField {
    Many(Vec<PriorFile>),
    One(PriorFile),
}

/// A prior given either as a bare weight list or as an object.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PriorInput {
    Weights(Vec<Num>),
    Object(PriorFile),
}

impl PriorInput {
    fn into_file(self) -> PriorFile {
        match self {
            PriorInput::Weights(weights) => PriorFile { id: None, weights },
            PriorInput::Object(p) => p,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct ActFile {
    pub id: String,
    #[serde(default)]
    pub u0: Option<Num>,
    #[serde(default)]
    pub u1: Option<Num>,
    /// Payoff per state, as an alternative to `u0`/`u1`.
    #[serde(default)]
    pub payoffs: Option<Vec<Num>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct MenuFile {
    pub id: String,
    pub acts: Vec<ActFile>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ObservationFile {
    #[serde(default)]
    pub prior_ref: Option<String>,
    pub menu_ref: String,
    /// One row per act, one column per state.
    pub sigma: Vec<Vec<Num>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DatasetFile {
    pub states: Vec<Num>,
    pub priors: PriorsField,
    pub menus: Vec<MenuFile>,
    pub observations: Vec<ObservationFile>,
}

fn build_space<S: Scalar>(states: &[Num]) -> Result<StateSpace<S>> {
    StateSpace::new(parse_all(states, "states")?)
}

fn build_prior<S: Scalar>(p: &PriorFile, default_id: &str, path: &str) -> Result<Prior<S>> {
    let id = p.id.clone().unwrap_or_else(|| default_id.to_string());
    Ok(Prior::new(id, parse_all(&p.weights, &format!("{path}.weights"))?))
}

fn build_menu<S: Scalar>(m: &MenuFile, space: &StateSpace<S>, path: &str) -> Result<Menu<S>> {
    let mut acts = Vec::with_capacity(m.acts.len());
    for (i, a) in m.acts.iter().enumerate() {
        let p = format!("{path}.acts[{i}]");
        let act = match (&a.u0, &a.u1, &a.payoffs) {
            (Some(u0), Some(u1), None) => Act::new(a.id.clone(), u0.parse(&format!("{p}.u0"))?, u1.parse(&format!("{p}.u1"))?),
            (None, None, Some(table)) => {
                let payoffs = parse_all(table, &format!("{p}.payoffs"))?;
                Act::from_payoff_table(a.id.clone(), space, &payoffs).map_err(|e| with_path(&p, e))?
            }
            _ => return Err(structure(format!("{p}: give either \"u0\" and \"u1\" or \"payoffs\""))),
        };
        acts.push(act);
    }
    Menu::new(m.id.clone(), acts).map_err(|e| with_path(path, e))
}

fn with_path(path: &str, e: Error) -> Error {
    match e {
        Error::Structure(m) => Error::Structure(format!("{path}: {m}")),
        Error::Domain(m) => Error::Domain(format!("{path}: {m}")),
        other => other,
    }
}

fn build_menus<S: Scalar>(menus: &[MenuFile], space: &StateSpace<S>) -> Result<Vec<Menu<S>>> {
    let menus: Vec<Menu<S>> = menus
        .iter()
        .enumerate()
        .map(|(i, m)| build_menu(m, space, &format!("menus[{i}]")))
        .collect::<Result<_>>()?;
    unique_ids(menus.iter().map(|m| m.id.as_str()), "menu")?;
    Ok(menus)
}

fn unique_ids<'a>(ids: impl Iterator<Item = &'a str>, what: &str) -> Result<HashMap<&'a str, usize>> {
    let mut index = HashMap::new();
    for (i, id) in ids.enumerate() {
        if index.insert(id, i).is_some() {
            return Err(structure(format!("duplicate {what} id '{id}'")));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<&str, usize>, id: &str, what: &str, path: &str) -> Result<usize> {
    index
        .get(id)
        .copied()
        .ok_or_else(|| structure(format!("{path}: unknown {what} '{id}'")))
}

/// Priors plus the resolver for `prior_ref`; a single object means every
/// observation shares it.
fn build_priors<S: Scalar>(field: &PriorsField) -> Result<(Vec<Prior<S>>, PriorMode)> {
    match field {
        PriorsField::One(p) => Ok((vec![build_prior(p, "prior", "priors")?], PriorMode::Single)),
        PriorsField::Many(ps) => {
            if ps.is_empty() {
                return Err(structure("priors: at least one prior is required"));
            }
            let priors: Vec<Prior<S>> = ps
                .iter()
                .enumerate()
                .map(|(i, p)| build_prior(p, &format!("prior{i}"), &format!("priors[{i}]")))
                .collect::<Result<_>>()?;
            Ok((priors, PriorMode::Multi))
        }
    }
}

impl DatasetFile {
    /// Resolves references and parses numbers. Probability constraints are
    /// left to dataset validation.
    pub fn into_dataset<S: Scalar>(&self) -> Result<Dataset<S>> {
        let state_space = build_space(&self.states)?;
        let (priors, mode) = build_priors(&self.priors)?;
        let menus = build_menus(&self.menus, &state_space)?;
        let prior_index = unique_ids(priors.iter().map(|p| p.id.as_str()), "prior")?;
        let menu_index = unique_ids(menus.iter().map(|m| m.id.as_str()), "menu")?;
        let mut observations = Vec::with_capacity(self.observations.len());
        for (k, o) in self.observations.iter().enumerate() {
            let path = format!("observations[{k}]");
            let prior = match &o.prior_ref {
                Some(id) => lookup(&prior_index, id, "prior", &path)?,
                None if priors.len() == 1 => 0,
                None => return Err(structure(format!("{path}: prior_ref is required with several priors"))),
            };
            let menu = lookup(&menu_index, &o.menu_ref, "menu", &path)?;
            let sigma = o
                .sigma
                .iter()
                .enumerate()
                .map(|(a, row)| parse_all(row, &format!("{path}.sigma[{a}]")))
                .collect::<Result<Vec<Vec<S>>>>()?;
            observations.push(Observation { prior, menu, sigma });
        }
        Ok(Dataset {
            state_space,
            priors,
            menus,
            observations,
            mode,
        })
    }
}

pub fn parse_dataset<S: Scalar>(text: &str) -> Result<Dataset<S>> {
    from_json_str::<DatasetFile>(text, "dataset")?.into_dataset()
}

fn exact_list<S: Scalar>(xs: &[S]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(x.exact_string())).collect())
}

fn menu_json<S: Scalar>(m: &Menu<S>) -> Value {
    json!({
        "id": m.id,
        "acts": m.acts.iter().map(|a| json!({
            "id": a.id,
            "u0": a.u0.exact_string(),
            "u1": a.u1.exact_string(),
        })).collect::<Vec<_>>(),
    })
}

fn prior_json<S: Scalar>(p: &Prior<S>) -> Value {
    json!({ "id": p.id, "weights": exact_list(&p.weights) })
}

/// Dataset in the file format, with exact strings throughout.
pub fn dataset_to_json<S: Scalar>(data: &Dataset<S>) -> Value {
    let priors = match data.mode {
        PriorMode::Single if data.priors.len() == 1 => prior_json(&data.priors[0]),
        _ => Value::Array(data.priors.iter().map(prior_json).collect()),
    };
    json!({
        "states": exact_list(&data.state_space.states),
        "priors": priors,
        "menus": data.menus.iter().map(menu_json).collect::<Vec<_>>(),
        "observations": data.observations.iter().map(|o| json!({
            "prior_ref": data.priors[o.prior].id,
            "menu_ref": data.menus[o.menu].id,
            "sigma": o.sigma.iter().map(|row| exact_list(row)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Debug, Deserialize)]
pub struct SegmentFile {
    pub from: Num,
    pub to: Num,
    #[serde(default)]
    pub slope: Option<Num>,
    #[serde(default)]
    pub intercept: Option<Num>,
    #[serde(default)]
    pub a: Option<Num>,
    #[serde(default)]
    pub b: Option<Num>,
    #[serde(default)]
    pub c: Option<Num>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct VarianceFile {
    pub kappa: Num,
    /// Defaults to the prior mean.
    #[serde(default)]
    pub center: Option<Num>,
}

/// A cost derivative: interpolated points, explicit segments, or the
/// variance cost.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostFile {
    Points(Vec<(Num, Num)>),
    Segments(Vec<SegmentFile>),
    Variance(VarianceFile),
}

impl CostFile {
    pub fn build<S: Scalar>(&self, prior_mean: Option<&S>) -> Result<PiecewiseFunction<S>> {
        match self {
            CostFile::Points(points) => {
                let pts = points
                    .iter()
                    .enumerate()
                    .map(|(i, (x, y))| {
                        Ok((x.parse(&format!("cost.points[{i}].x"))?, y.parse(&format!("cost.points[{i}].y"))?))
                    })
                    .collect::<Result<Vec<(S, S)>>>()?;
                PiecewiseFunction::from_points(&pts).map_err(|e| with_path("cost.points", e))
            }
            CostFile::Segments(segs) => segments_from_files(segs, "cost.segments"),
            CostFile::Variance(v) => {
                let kappa = v.kappa.parse("cost.variance.kappa")?;
                let center = match (&v.center, prior_mean) {
                    (Some(c), _) => c.parse("cost.variance.center")?,
                    (None, Some(m)) => m.clone(),
                    (None, None) => return Err(structure("cost.variance: center is required here")),
                };
                variance_cost(&kappa, &center)
            }
        }
    }
}

fn segments_from_files<S: Scalar>(segs: &[SegmentFile], path: &str) -> Result<PiecewiseFunction<S>> {
    if segs.is_empty() {
        return Err(structure(format!("{path}: no segments")));
    }
    let mut breaks = Vec::with_capacity(segs.len() + 1);
    let mut segments = Vec::with_capacity(segs.len());
    for (i, s) in segs.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let from: S = s.from.parse(&format!("{p}.from"))?;
        let to: S = s.to.parse(&format!("{p}.to"))?;
        match breaks.last() {
            None => breaks.push(from),
            Some(prev) if prev.compare(&from).is_eq() => {}
            Some(_) => return Err(structure(format!("{p}: segment does not start where the previous one ends"))),
        }
        breaks.push(to);
        let seg = match (&s.slope, &s.intercept, &s.a, &s.b, &s.c) {
            (Some(m), Some(q), None, None, None) => Segment::Affine {
                slope: m.parse(&format!("{p}.slope"))?,
                intercept: q.parse(&format!("{p}.intercept"))?,
            },
            (None, None, Some(a), Some(b), Some(c)) => Segment::Quadratic {
                a: a.parse(&format!("{p}.a"))?,
                b: b.parse(&format!("{p}.b"))?,
                c: c.parse(&format!("{p}.c"))?,
            },
            _ => return Err(structure(format!("{p}: give \"slope\"/\"intercept\" or \"a\"/\"b\"/\"c\""))),
        };
        segments.push(seg);
    }
    PiecewiseFunction::new(breaks, segments).map_err(|e| with_path(path, e))
}

/// A single-agent problem: prior on the states, one menu, a cost derivative.
#[derive(Clone, Debug, Deserialize)]
pub struct ProblemFile {
    pub states: Vec<Num>,
    pub prior: PriorInput,
    pub menu: MenuFile,
    pub cost: CostFile,
}

pub struct ParsedProblem<S> {
    pub space: StateSpace<S>,
    pub prior: Prior<S>,
    pub menu: Menu<S>,
    pub cost: PiecewiseFunction<S>,
}

impl ProblemFile {
    pub fn parse<S: Scalar>(&self) -> Result<ParsedProblem<S>> {
        let space = build_space(&self.states)?;
        let prior = build_prior(&self.prior.clone().into_file(), "prior", "prior")?;
        let problems = prior.problems(&space);
        if let Some(p) = problems.first() {
            return Err(structure(p.clone()));
        }
        let menu = build_menu(&self.menu, &space, "menu")?;
        let cost = self.cost.build(Some(&prior.mean(&space)))?;
        Ok(ParsedProblem {
            space,
            prior,
            menu,
            cost,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct PairFile {
    #[serde(default)]
    pub prior_ref: Option<String>,
    pub menu_ref: String,
}

/// Instructions for synthesizing a dataset: one prior (or several plus
/// explicit observation pairs), menus, and the cost derivative.
#[derive(Clone, Debug, Deserialize)]
pub struct GenerateFile {
    pub states: Vec<Num>,
    #[serde(default)]
    pub prior: Option<PriorInput>,
    #[serde(default)]
    pub priors: Option<Vec<PriorFile>>,
    pub menus: Vec<MenuFile>,
    pub cost: CostFile,
    #[serde(default)]
    pub observations: Option<Vec<PairFile>>,
    /// `"lowest"` (default) or `"highest"` act index among indifferent acts.
    #[serde(default)]
    pub tie_break: Option<String>,
}

pub struct ParsedGenerate<S> {
    pub space: StateSpace<S>,
    pub priors: Vec<Prior<S>>,
    pub menus: Vec<Menu<S>>,
    /// `None` for one observation per menu under a single prior.
    pub pairs: Option<Vec<(usize, usize)>>,
    pub cost: PiecewiseFunction<S>,
    pub tie: TieBreak,
}

impl GenerateFile {
    pub fn parse<S: Scalar>(&self) -> Result<ParsedGenerate<S>> {
        let space = build_space(&self.states)?;
        let priors: Vec<Prior<S>> = match (&self.prior, &self.priors) {
            (Some(p), None) => vec![build_prior(&p.clone().into_file(), "prior", "prior")?],
            (None, Some(ps)) if !ps.is_empty() => ps
                .iter()
                .enumerate()
                .map(|(i, p)| build_prior(p, &format!("prior{i}"), &format!("priors[{i}]")))
                .collect::<Result<_>>()?,
            _ => return Err(structure("give exactly one of \"prior\" or a nonempty \"priors\"")),
        };
        for p in &priors {
            if let Some(msg) = p.problems(&space).first() {
                return Err(structure(msg.clone()));
            }
        }
        let menus = build_menus(&self.menus, &space)?;
        let pairs = match &self.observations {
            None if priors.len() == 1 => None,
            None => return Err(structure("\"observations\" is required with several priors")),
            Some(list) => {
                let prior_index = unique_ids(priors.iter().map(|p| p.id.as_str()), "prior")?;
                let menu_index = unique_ids(menus.iter().map(|m| m.id.as_str()), "menu")?;
                let mut pairs = Vec::with_capacity(list.len());
                for (k, o) in list.iter().enumerate() {
                    let path = format!("observations[{k}]");
                    let p = match &o.prior_ref {
                        Some(id) => lookup(&prior_index, id, "prior", &path)?,
                        None if priors.len() == 1 => 0,
                        None => return Err(structure(format!("{path}: prior_ref is required with several priors"))),
                    };
                    pairs.push((p, lookup(&menu_index, &o.menu_ref, "menu", &path)?));
                }
                Some(pairs)
            }
        };
        let mean = (priors.len() == 1).then(|| priors[0].mean(&space));
        let cost = self.cost.build(mean.as_ref())?;
        let tie = match self.tie_break.as_deref() {
            None | Some("lowest") => TieBreak::LowestIndex,
            Some("highest") => TieBreak::HighestIndex,
            Some(other) => return Err(structure(format!("tie_break: expected \"lowest\" or \"highest\", got \"{other}\""))),
        };
        Ok(ParsedGenerate {
            space,
            priors,
            menus,
            pairs,
            cost,
            tie,
        })
    }
}

/// `{"exact": .., "approx": ..}`
pub fn scalar_json<S: Scalar>(x: &S) -> Value {
    json!({ "exact": x.exact_string(), "approx": x.to_f64() })
}

/// Reads the exact field of a report scalar (a bare string or number is
/// accepted too).
pub fn scalar_from_json<S: Scalar>(v: &Value, path: &str) -> Result<S> {
    let text = match v {
        Value::Object(map) => match map.get("exact") {
            Some(Value::String(s)) => s.clone(),
            _ => return Err(structure(format!("{path}: missing \"exact\" string"))),
        },
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(structure(format!("{path}: expected a scalar"))),
    };
    S::parse_str(&text).map_err(|e| structure(format!("{path}: {e}")))
}

/// Breakpoint table and segment list of a piecewise function.
pub fn function_json<S: Scalar>(f: &PiecewiseFunction<S>) -> Value {
    let br = f.breakpoints();
    let segments: Vec<Value> = f
        .segments()
        .iter()
        .enumerate()
        .map(|(i, s)| match s {
            Segment::Affine { slope, intercept } => json!({
                "from": scalar_json(&br[i]),
                "to": scalar_json(&br[i + 1]),
                "slope": scalar_json(slope),
                "intercept": scalar_json(intercept),
            }),
            Segment::Quadratic { a, b, c } => json!({
                "from": scalar_json(&br[i]),
                "to": scalar_json(&br[i + 1]),
                "a": scalar_json(a),
                "b": scalar_json(b),
                "c": scalar_json(c),
            }),
        })
        .collect();
    json!({
        "display": f.to_string(),
        "breakpoints": f.table().iter().map(|(x, y)| json!({
            "x": scalar_json(x),
            "y": scalar_json(y),
        })).collect::<Vec<_>>(),
        "segments": segments,
    })
}

/// Inverse of [`function_json`], reading the segment list.
pub fn function_from_json<S: Scalar>(v: &Value, path: &str) -> Result<PiecewiseFunction<S>> {
    let segs = v
        .get("segments")
        .and_then(Value::as_array)
        .ok_or_else(|| structure(format!("{path}: missing \"segments\"")))?;
    if segs.is_empty() {
        return Err(structure(format!("{path}: no segments")));
    }
    let mut breaks = Vec::with_capacity(segs.len() + 1);
    let mut segments = Vec::with_capacity(segs.len());
    for (i, s) in segs.iter().enumerate() {
        let p = format!("{path}.segments[{i}]");
        let field = |name: &str| -> Result<S> {
            let v = s
                .get(name)
                .ok_or_else(|| structure(format!("{p}: missing \"{name}\"")))?;
            scalar_from_json(v, &format!("{p}.{name}"))
        };
        if i == 0 {
            breaks.push(field("from")?);
        }
        breaks.push(field("to")?);
        segments.push(if s.get("slope").is_some() {
            Segment::Affine {
                slope: field("slope")?,
                intercept: field("intercept")?,
            }
        } else {
            Segment::Quadratic {
                a: field("a")?,
                b: field("b")?,
                c: field("c")?,
            }
        });
    }
    PiecewiseFunction::new(breaks, segments).map_err(|e| with_path(path, e))
}

/// Named `(x, y)` series for plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl Figure {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "columns": [self.x_label, self.y_label],
            "rows": self.points.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>(),
            "csv": self.to_csv(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.x_label, self.y_label);
        for (x, y) in &self.points {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

/// Samples `f` at `n` evenly spaced points plus its breakpoints.
pub fn sample<S: Scalar>(f: impl Fn(&S) -> S, breaks: &[S], n: usize) -> Vec<(f64, f64)> {
    let mut xs: Vec<S> = crate::forward::uniform_points(n);
    xs.extend(breaks.iter().cloned());
    xs.sort_by(|a, b| a.compare(b));
    xs.dedup_by(|a, b| a.compare(b).is_eq());
    xs.iter().map(|x| (x.to_f64(), f(x).to_f64())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_dataset;
    use crate::scalar::{Float, Rational};

    const TINY: &str = r#"{
        "states": ["0", "1/2", 1],
        "priors": {"id": "F", "weights": ["1/4", 0.5, "1/4"]},
        "menus": [{"id": "A", "acts": [
            {"id": "left", "u0": 1, "u1": -1},
            {"id": "right", "payoffs": ["-1", "0", "1"]}
        ]}],
        "observations": [{"menu_ref": "A", "sigma": [["1", "1/2", "0"], ["0", "1/2", "1"]]}]
    }"#;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_strings_numbers_and_payoff_tables() {
        let data: Dataset<Rational> = parse_dataset(TINY).unwrap();
        assert_eq!(data.state_space.states, vec![r(0, 1), r(1, 2), r(1, 1)]);
        assert_eq!(data.priors[0].weights[1], r(1, 2));
        assert_eq!(data.menus[0].acts[1].u0, r(-1, 1));
        assert_eq!(data.mode, PriorMode::Single);
        assert!(validate_dataset(&data).is_valid());
    }

    #[test]
    fn decimals_are_exact_in_rational_mode() {
        let data: Dataset<Rational> = parse_dataset(&TINY.replace("\"1/4\", 0.5", "0.25, 0.5")).unwrap();
        assert_eq!(data.priors[0].weights[0], r(1, 4));
    }

    #[test]
    fn dataset_json_roundtrips() {
        let data: Dataset<Rational> = parse_dataset(TINY).unwrap();
        let text = dataset_to_json(&data).to_string();
        let again: Dataset<Rational> = parse_dataset(&text).unwrap();
        assert_eq!(data, again);
        let floats: Dataset<Float> = parse_dataset(&text).unwrap();
        assert_eq!(floats.priors[0].weights[0], Float(0.25));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_dataset::<Rational>("{\n  \"states\": [0, 1,\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn bad_references_and_numbers_are_named() {
        let err = parse_dataset::<Rational>(&TINY.replace("\"menu_ref\": \"A\"", "\"menu_ref\": \"B\"")).unwrap_err();
        assert!(err.to_string().contains("unknown menu 'B'"), "{err}");
        let err = parse_dataset::<Rational>(&TINY.replace("\"1/2\", 1]", "\"1/x\", 1]")).unwrap_err();
        assert!(err.to_string().contains("states[1]"), "{err}");
    }

    #[test]
    fn function_json_roundtrips() {
        let f = PiecewiseFunction::from_points(&[(r(0, 1), r(1, 3)), (r(1, 3), r(0, 1)), (r(1, 1), r(2, 9))]).unwrap();
        let g: PiecewiseFunction<Rational> = function_from_json(&function_json(&f), "f").unwrap();
        assert_eq!(f, g);
        let q = variance_cost(&r(2, 1), &r(1, 3)).unwrap();
        let back: PiecewiseFunction<Rational> = function_from_json(&function_json(&q), "q").unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn cost_segments_must_chain() {
        let text = r#"{"segments": [
            {"from": 0, "to": "1/2", "slope": 1, "intercept": 0},
            {"from": "1/3", "to": 1, "slope": 0, "intercept": "1/2"}]}"#;
        let cost: CostFile = serde_json::from_str(text).unwrap();
        assert!(cost.build::<Rational>(None).is_err());
    }

    #[test]
    fn figure_csv_has_header() {
        let fig = Figure {
            name: "p".into(),
            x_label: "z".into(),
            y_label: "p".into(),
            points: vec![(0.0, 1.0), (1.0, 0.5)],
        };
        assert_eq!(fig.to_csv(), "z,p\n0,1\n1,0.5\n");
    }
}
