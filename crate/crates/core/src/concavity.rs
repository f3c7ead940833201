//! Search for multipliers whose recovered cost derivative is concave.
//!
//! For an assignment of one observation `i(z)` to every grid state `z`, the
//! program adds to the multiplier system: no kink of `L_{i(z)}` at `z`
//! (its multiplier at `z` is zero when that column exists) and
//! `L_{i(z)}(z) - L_B(z) <= phi_{i(z)}(z) - phi_B(z)` for every other `B`,
//! so that `i(z)` attains the minimum defining the cost at `z`. A feasible
//! assignment yields a concave cost; exhausting all assignments proves
//! nothing.

use rayon::prelude::*;

use crate::axioms::{build_farkas_system, FarkasSystem, Lambda};
use crate::error::{internal, Result};
use crate::lp::{self, LinearProgram, LpStatus, Relation};
use crate::model::{indirect_utility, Dataset};
use crate::piecewise::PiecewiseFunction;
use crate::recovery::{rationalization_from_lambda, RationalizationReport};
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: u64 = 10_000;

const CHUNK: usize = 32;

pub fn is_concave<S: Scalar>(c: &PiecewiseFunction<S>) -> bool {
    c.is_concave()
}

#[derive(Clone, Debug)]
pub enum ConcavityStatus<S> {
    Certified {
        /// Observation index per grid state.
        assignment: Vec<usize>,
        lambda: Lambda<S>,
        cost: PiecewiseFunction<S>,
        prices: Vec<PiecewiseFunction<S>>,
        audit: RationalizationReport<S>,
    },
    Undetermined,
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct ConcavityVerdict<S> {
    pub status: ConcavityStatus<S>,
    pub programs_solved: u64,
    /// `n^|Z|`, saturating.
    pub assignments_total: u64,
}

/// `n^k`, saturating at `u64::MAX`.
pub fn assignment_count(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, _| acc.saturating_mul(n as u64))
}

/// Assignment with the given rank in lexicographic order (first state most
/// significant).
fn assignment_at(mut rank: u64, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = (rank % n as u64) as usize;
        rank /= n as u64;
    }
    out
}

/// The multiplier system plus the rows imposed by one assignment.
pub fn assignment_program<S: Scalar>(
    data: &Dataset<S>,
    system: &FarkasSystem<S>,
    phis: &[Vec<S>],
    assignment: &[usize],
) -> Result<LinearProgram<S>> {
    let mut prog = system.lp.clone();
    for (k, (z, &gen)) in data.state_space.states.iter().zip(assignment).enumerate() {
        if let Some(col) = system.column(gen, z) {
            prog.add_row(vec![(col, S::one())], Relation::Eq, S::zero())?;
        }
        let own = system.envelope_coeffs(gen, z);
        for other in 0..data.len() {
            if other == gen {
                continue;
            }
            let mut coeffs = own.clone();
            coeffs.extend(
                system
                    .envelope_coeffs(other, z)
                    .into_iter()
                    .map(|(c, v)| (c, -v)),
            );
            let rhs = phis[gen][k].clone() - &phis[other][k];
            prog.add_row(coeffs, Relation::Le, rhs)?;
        }
    }
    Ok(prog)
}

/// Enumerates assignments in lexicographic order and returns the first
/// whose program is feasible, solving at most `budget` programs.
pub fn certify_concave<S: Scalar>(data: &Dataset<S>, budget: u64) -> Result<ConcavityVerdict<S>> {
    let system = build_farkas_system(data)?;
    let n = data.len();
    let k = data.state_space.len();
    let total = assignment_count(n, k);
    let phis: Vec<Vec<S>> = (0..n)
        .map(|obs| {
            data.state_space
                .states
                .iter()
                .map(|z| indirect_utility(data.menu_of(obs), z))
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<_>>()?;

    let limit = budget.min(total);
    let mut solved = 0u64;
    while solved < limit {
        let end = (solved + CHUNK as u64).min(limit);
        let ranks: Vec<u64> = (solved..end).collect();
        let outcomes: Vec<Result<Option<(Vec<usize>, Vec<S>)>>> = ranks
            .par_iter()
            .map(|&rank| {
                let assignment = assignment_at(rank, n, k);
                let prog = assignment_program(data, &system, &phis, &assignment)?;
                let out = lp::solve(&prog)?;
                Ok(match out.status {
                    LpStatus::Feasible | LpStatus::Optimal => out.primal.map(|x| (assignment, x)),
                    _ => None,
                })
            })
            .collect();
        solved = end;
        for outcome in outcomes {
            if let Some((assignment, x)) = outcome? {
                let lambda = Lambda::from_columns(&system, &x[..system.columns.len()]);
                let r = rationalization_from_lambda(data, lambda)?;
                if !r.cost.is_concave() || !r.audit.all_true() {
                    return Err(internal(format!(
                        "assignment {assignment:?} produced a cost that fails its own audit"
                    )));
                }
                return Ok(ConcavityVerdict {
                    status: ConcavityStatus::Certified {
                        assignment,
                        lambda: r.lambda,
                        cost: r.cost,
                        prices: r.prices,
                        audit: r.audit,
                    },
                    programs_solved: solved,
                    assignments_total: total,
                });
            }
        }
    }
    let status = if solved >= total {
        ConcavityStatus::Undetermined
    } else {
        ConcavityStatus::BudgetExceeded
    };
    Ok(ConcavityVerdict {
        status,
        programs_solved: solved,
        assignments_total: total,
    })
}
