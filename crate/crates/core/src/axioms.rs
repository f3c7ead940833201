//! No-improving-action-switches and no-improving-posterior-mean-cycles tests.
//!
//! The cycle condition is decided by a feasibility program over multipliers
//! `lambda[(z*, A)]`, one per observation `A` and per grid state `z*` at which
//! the MPC constraint of `A` binds. With
//! `L_A(z) = lambda[(0, A)] + sum_{z* > 0} lambda[(z*, A)] (z* - z)_+`, each
//! row reads
//!
//! `L_A(z_a) - L_B(z_a) <= u(a, z_a) - u(b, z_a)`
//!
//! for observations `A != B`, chosen acts `a` of `A` and acts `b` of `B`,
//! with both sides weighted by the choice probability of `a`. Multipliers at
//! `z* = 0` and `z* = 1` are free, the others nonnegative.

use std::fmt;

use crate::error::{domain, internal, Result};
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense, VarSign};
use crate::model::Dataset;
use crate::revealed::{binding_set, prior_cdf, revealed_summary, DiscreteCdf, RevealedSummary};
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct NiasViolation<S> {
    pub observation: usize,
    pub act: usize,
    pub deviation: usize,
    pub revealed_mean: S,
    /// `u(deviation, z) - u(act, z) > 0`
    pub deficit: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NiasReport<S> {
    pub violations: Vec<NiasViolation<S>>,
}

impl<S: Scalar> NiasReport<S> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every chosen act must be optimal in its menu at its revealed mean.
pub fn check_nias<S: Scalar>(data: &Dataset<S>) -> Result<NiasReport<S>> {
    data.ensure_valid()?;
    let mut violations = Vec::new();
    for obs in 0..data.len() {
        let summary = revealed_summary(data, obs)?;
        let menu = data.menu_of(obs);
        for a in summary.chosen_acts() {
            let z = &summary.act_means[a];
            let ua = menu.acts[a].utility_unchecked(z);
            for (b, act_b) in menu.acts.iter().enumerate() {
                let deficit = act_b.utility_unchecked(z) - &ua;
                if deficit.is_positive() {
                    violations.push(NiasViolation {
                        observation: obs,
                        act: a,
                        deviation: b,
                        revealed_mean: z.clone(),
                        deficit,
                    });
                }
            }
        }
    }
    Ok(NiasReport { violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowLabel {
    pub obs_a: usize,
    pub obs_b: usize,
    /// Chosen act of `obs_a`.
    pub act: usize,
    /// Act of `obs_b`.
    pub alt: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnLabel<S> {
    pub obs: usize,
    pub zstar: S,
}

/// The multiplier system together with the revealed statistics it was built from.
#[derive(Clone, Debug)]
pub struct FarkasSystem<S> {
    pub lp: LinearProgram<S>,
    pub rows: Vec<RowLabel>,
    pub columns: Vec<ColumnLabel<S>>,
    /// First column of each observation.
    pub column_start: Vec<usize>,
    pub summaries: Vec<RevealedSummary<S>>,
    pub priors: Vec<DiscreteCdf<S>>,
    pub binding: Vec<Vec<S>>,
}

impl<S: Scalar> FarkasSystem<S> {
    pub fn columns_of(&self, obs: usize) -> std::ops::Range<usize> {
        let end = self
            .column_start
            .get(obs + 1)
            .copied()
            .unwrap_or(self.columns.len());
        self.column_start[obs]..end
    }

    pub fn entry(&self, row: usize, col: usize) -> S {
        self.lp.rows()[row]
            .coeffs
            .iter()
            .find(|(j, _)| *j == col)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(S::zero)
    }

    pub fn rhs(&self, row: usize) -> &S {
        &self.lp.rows()[row].rhs
    }

    /// Coefficients of `L_obs(z)` on the observation's columns.
    pub fn envelope_coeffs(&self, obs: usize, z: &S) -> Vec<(usize, S)> {
        self.columns_of(obs)
            .filter_map(|c| {
                let zs = &self.columns[c].zstar;
                if zs.is_zero() {
                    Some((c, S::one()))
                } else if z.compare(zs).is_lt() {
                    Some((c, zs.clone() - z))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Column index of `(z*, obs)` if `z*` binds for that observation.
    pub fn column(&self, obs: usize, zstar: &S) -> Option<usize> {
        self.columns_of(obs)
            .find(|&c| self.columns[c].zstar.compare(zstar).is_eq())
    }
}

/// Builds the multiplier system. Each observation uses its own prior for its
/// binding set, so the same builder serves single- and multi-prior data.
pub fn build_farkas_system<S: Scalar>(data: &Dataset<S>) -> Result<FarkasSystem<S>> {
    data.ensure_valid()?;
    let n = data.len();
    let mut summaries = Vec::with_capacity(n);
    let mut priors = Vec::with_capacity(n);
    let mut binding = Vec::with_capacity(n);
    for obs in 0..n {
        let s = revealed_summary(data, obs)?;
        let p = prior_cdf(data, obs)?;
        binding.push(binding_set(&p, &s.cdf, &data.state_space)?);
        summaries.push(s);
        priors.push(p);
    }

    let mut lp = LinearProgram::new();
    let mut columns = Vec::new();
    let mut column_start = Vec::with_capacity(n);
    for (obs, zs) in binding.iter().enumerate() {
        column_start.push(columns.len());
        let label = data.observation_label(obs);
        for z in zs {
            let sign = if z.is_zero() || z.compare(&S::one()).is_eq() {
                VarSign::Free
            } else {
                VarSign::NonNegative
            };
            lp.add_var(format!("lambda({z},{label})"), sign);
            columns.push(ColumnLabel {
                obs,
                zstar: z.clone(),
            });
        }
    }

    let mut system = FarkasSystem {
        lp,
        rows: Vec::new(),
        columns,
        column_start,
        summaries,
        priors,
        binding,
    };
    for obs_a in 0..n {
        let menu_a = data.menu_of(obs_a);
        let chosen: Vec<usize> = system.summaries[obs_a].chosen_acts().collect();
        for obs_b in 0..n {
            if obs_a == obs_b {
                continue;
            }
            let menu_b = data.menu_of(obs_b);
            for &a in &chosen {
                let z = system.summaries[obs_a].act_means[a].clone();
                let w = system.summaries[obs_a].act_probs[a].clone();
                let mut coeffs: Vec<(usize, S)> = system
                    .envelope_coeffs(obs_a, &z)
                    .into_iter()
                    .map(|(c, v)| (c, v * &w))
                    .collect();
                coeffs.extend(
                    system
                        .envelope_coeffs(obs_b, &z)
                        .into_iter()
                        .map(|(c, v)| (c, -(v * &w))),
                );
                let ua = menu_a.acts[a].utility_unchecked(&z);
                for (b, act_b) in menu_b.acts.iter().enumerate() {
                    let rhs = (ua.clone() - act_b.utility_unchecked(&z)) * &w;
                    system.lp.add_row(coeffs.clone(), Relation::Le, rhs)?;
                    system.rows.push(RowLabel {
                        obs_a,
                        obs_b,
                        act: a,
                        alt: b,
                    });
                }
            }
        }
    }
    Ok(system)
}

/// Feasible multipliers, grouped per observation as `(z*, value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lambda<S> {
    pub per_obs: Vec<Vec<(S, S)>>,
}

impl<S: Scalar> Lambda<S> {
    pub fn from_columns(system: &FarkasSystem<S>, values: &[S]) -> Self {
        let per_obs = (0..system.column_start.len())
            .map(|obs| {
                system
                    .columns_of(obs)
                    .map(|c| (system.columns[c].zstar.clone(), values[c].clone()))
                    .collect()
            })
            .collect();
        Lambda { per_obs }
    }

    pub fn zeros(system: &FarkasSystem<S>) -> Self {
        Self::from_columns(system, &vec![S::zero(); system.columns.len()])
    }

    pub fn get(&self, obs: usize, zstar: &S) -> S {
        self.per_obs[obs]
            .iter()
            .find(|(z, _)| z.compare(zstar).is_eq())
            .map(|(_, v)| v.clone())
            .unwrap_or_else(S::zero)
    }

    pub fn to_columns(&self) -> Vec<S> {
        self.per_obs
            .iter()
            .flat_map(|v| v.iter().map(|(_, x)| x.clone()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NipmcVerdict<S> {
    Pass { lambda: Lambda<S> },
    /// Nonnegative row multipliers proving the system infeasible.
    Fail { certificate: Vec<S>, rows: Vec<RowLabel> },
}

impl<S: Scalar> NipmcVerdict<S> {
    pub fn passed(&self) -> bool {
        matches!(self, NipmcVerdict::Pass { .. })
    }
}

/// Which feasible multiplier vector to report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LambdaSelection {
    /// Whatever vertex the simplex reaches first.
    #[default]
    FirstFeasible,
    /// Minimizes the sum of multipliers at interior binding states.
    Flattest,
}

pub fn check_nipmc<S: Scalar>(data: &Dataset<S>) -> Result<NipmcVerdict<S>> {
    check_nipmc_with(data, LambdaSelection::FirstFeasible)
}

pub fn check_nipmc_with<S: Scalar>(data: &Dataset<S>, selection: LambdaSelection) -> Result<NipmcVerdict<S>> {
    let system = build_farkas_system(data)?;
    solve_system(&system, selection)
}

pub fn solve_system<S: Scalar>(system: &FarkasSystem<S>, selection: LambdaSelection) -> Result<NipmcVerdict<S>> {
    let mut program = system.lp.clone();
    if selection == LambdaSelection::Flattest {
        let interior: Vec<(usize, S)> = program
            .signs()
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == VarSign::NonNegative)
            .map(|(j, _)| (j, S::one()))
            .collect();
        program.set_objective(Sense::Minimize, interior)?;
    }
    let out = lp::solve(&program)?;
    match out.status {
        LpStatus::Feasible | LpStatus::Optimal => {
            let x = out.primal.ok_or_else(|| internal("feasible outcome without a solution"))?;
            if !system.lp.check_primal(&x) {
                return Err(internal("multipliers fail the system they solve"));
            }
            Ok(NipmcVerdict::Pass {
                lambda: Lambda::from_columns(system, &x),
            })
        }
        LpStatus::Infeasible => {
            let y = out
                .certificate
                .ok_or_else(|| internal("infeasible outcome without a certificate"))?;
            system
                .lp
                .verify_certificate(&y)
                .map_err(|e| internal(format!("certificate failed verification: {e}")))?;
            Ok(NipmcVerdict::Fail {
                certificate: y,
                rows: system.rows.clone(),
            })
        }
        LpStatus::Unbounded => Err(internal("minimizing nonnegative multipliers cannot be unbounded")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleStep<S> {
    pub from_obs: String,
    pub to_obs: String,
    pub act: String,
    pub alt: String,
    pub revealed_mean: S,
    pub choice_prob: S,
    /// Normalized multiplier (all weights sum to one).
    pub weight: S,
    /// `u(alt, z) - u(act, z)` per unit of probability.
    pub gain: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceLine<S> {
    pub obs: String,
    /// Weighted probability moved out of the observation.
    pub outflow: S,
    /// Weighted probability moved into the observation.
    pub inflow: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpcLine<S> {
    pub obs: String,
    pub zstar: S,
    /// Combined multiplier weight on the column; must be `>= 0` (and `= 0` at `z* = 1`).
    pub value: S,
}

/// Readable account of a cycle certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct ViolationReport<S> {
    pub steps: Vec<CycleStep<S>>,
    /// `sum weight * choice_prob * (u(act) - u(alt))`, negative.
    pub aggregate: S,
    pub balance: Vec<BalanceLine<S>>,
    pub mpc: Vec<MpcLine<S>>,
}

/// Re-verifies a failing verdict's certificate against the data and renders it.
pub fn explain_violation<S: Scalar>(verdict: &NipmcVerdict<S>, data: &Dataset<S>) -> Result<ViolationReport<S>> {
    let NipmcVerdict::Fail { certificate, .. } = verdict else {
        return Err(domain("the dataset passed; there is no violation to explain"));
    };
    let system = build_farkas_system(data)?;
    system
        .lp
        .verify_certificate(certificate)
        .map_err(|e| domain(format!("invalid certificate: {e}")))?;
    let total = scalar::sum(certificate);
    let beta: Vec<S> = certificate.iter().map(|b| b.clone() / &total).collect();

    let mut steps = Vec::new();
    for (r, w) in beta.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let label = system.rows[r];
        let s = &system.summaries[label.obs_a];
        let z = s.act_means[label.act].clone();
        let act = &data.menu_of(label.obs_a).acts[label.act];
        let alt = &data.menu_of(label.obs_b).acts[label.alt];
        steps.push(CycleStep {
            from_obs: data.observation_label(label.obs_a),
            to_obs: data.observation_label(label.obs_b),
            act: act.id.clone(),
            alt: alt.id.clone(),
            revealed_mean: z.clone(),
            choice_prob: s.act_probs[label.act].clone(),
            weight: w.clone(),
            gain: alt.utility_unchecked(&z) - act.utility_unchecked(&z),
        });
    }
    let aggregate = system
        .lp
        .rows()
        .iter()
        .zip(&beta)
        .fold(S::zero(), |acc, (row, w)| acc + row.rhs.clone() * w);

    let mut balance = Vec::new();
    for obs in 0..data.len() {
        let mut outflow = S::zero();
        let mut inflow = S::zero();
        for (r, w) in beta.iter().enumerate() {
            let label = system.rows[r];
            let mass = system.summaries[label.obs_a].act_probs[label.act].clone() * w;
            if label.obs_a == obs {
                outflow += mass.clone();
            }
            if label.obs_b == obs {
                inflow += mass;
            }
        }
        balance.push(BalanceLine {
            obs: data.observation_label(obs),
            outflow,
            inflow,
        });
    }
    let aty = system.lp.transpose_times(&beta);
    let mpc = system
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.zstar.is_positive())
        .map(|(j, c)| MpcLine {
            obs: data.observation_label(c.obs),
            zstar: c.zstar.clone(),
            value: aty[j].clone(),
        })
        .collect();
    Ok(ViolationReport {
        steps,
        aggregate,
        balance,
        mpc,
    })
}

impl<S: Scalar> fmt::Display for ViolationReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "improving reallocation of posterior means:")?;
        for s in &self.steps {
            writeln!(
                f,
                "  weight {}: mean {} of act '{}' in {} (prob {}) moved to {} with act '{}', payoff change {}",
                s.weight, s.revealed_mean, s.act, s.from_obs, s.choice_prob, s.to_obs, s.alt, s.gain
            )?;
        }
        writeln!(f, "weighted payoff difference u(act) - u(alt): {} (< 0)", self.aggregate)?;
        writeln!(f, "balance (weighted probability out = in):")?;
        for b in &self.balance {
            writeln!(f, "  {}: out {} in {}", b.obs, b.outflow, b.inflow)?;
        }
        writeln!(f, "binding-state conditions (>= 0, = 0 at z* = 1):")?;
        for m in &self.mpc {
            writeln!(f, "  {} at z* = {}: {}", m.obs, m.zstar, m.value)?;
        }
        Ok(())
    }
}
