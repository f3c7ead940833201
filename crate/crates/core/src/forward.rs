//! Optimal posterior-mean distributions for a menu and cost derivative, and
//! synthetic choice data generated from them.

use rayon::prelude::*;

use crate::error::{domain, internal, structure, Result};
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense, VarSign};
use crate::model::{Dataset, Menu, Observation, Prior, PriorMode, StateSpace};
use crate::piecewise::PiecewiseFunction;
use crate::recovery::lambda_to_envelope;
use crate::revealed::DiscreteCdf;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct ForwardProblem<S> {
    pub prior: DiscreteCdf<S>,
    pub menu: Menu<S>,
    pub cost: PiecewiseFunction<S>,
    /// Candidate posterior means, increasing.
    pub grid: Vec<S>,
}

fn sorted_unique<S: Scalar>(mut xs: Vec<S>) -> Vec<S> {
    xs.sort_by(|a, b| a.compare(b));
    xs.dedup_by(|a, b| a.compare(b).is_eq());
    xs
}

/// `k` evenly spaced points `i / (k - 1)`.
pub fn uniform_points<S: Scalar>(k: usize) -> Vec<S> {
    if k < 2 {
        return vec![S::zero(), S::one()];
    }
    let d = (k - 1) as i64;
    (0..=d).map(|i| S::from_ratio(i, d)).collect()
}

/// Upper envelope of the menu's payoff lines.
pub fn indirect_utility_function<S: Scalar>(menu: &Menu<S>) -> Result<PiecewiseFunction<S>> {
    let lines: Vec<_> = menu
        .acts
        .iter()
        .map(|a| PiecewiseFunction::affine(a.slope(), a.u0.clone()))
        .collect();
    PiecewiseFunction::upper_envelope(&lines)
}

impl<S: Scalar> ForwardProblem<S> {
    /// Grid: 0, 1, the prior support and mean, and the breakpoints of the
    /// indirect utility and of the cost derivative.
    pub fn new(prior: DiscreteCdf<S>, menu: Menu<S>, cost: PiecewiseFunction<S>) -> Result<Self> {
        if menu.acts.is_empty() {
            return Err(structure(format!("menu '{}' has no acts", menu.id)));
        }
        let phi = indirect_utility_function(&menu)?;
        let grid = sorted_unique(
            prior
                .support()
                .into_iter()
                .chain([S::zero(), S::one(), prior.mean().clone()])
                .chain(phi.breakpoints().iter().cloned())
                .chain(cost.breakpoints().iter().cloned())
                .collect(),
        );
        Ok(ForwardProblem {
            prior,
            menu,
            cost,
            grid,
        })
    }

    /// Adds `k` evenly spaced points to the grid.
    pub fn refined(mut self, k: usize) -> Self {
        if k > 0 {
            let mut g = std::mem::take(&mut self.grid);
            g.extend(uniform_points(k));
            self.grid = sorted_unique(g);
        }
        self
    }

    /// `phi(z) + c(z)`.
    pub fn gross_value(&self, z: &S) -> S {
        let a = self.menu.best_act(z);
        self.menu.acts[a].utility_unchecked(z) + self.cost.eval_unchecked(z)
    }

    /// `int (phi + c) dF`.
    pub fn objective(&self, f: &DiscreteCdf<S>) -> S {
        f.atoms()
            .iter()
            .fold(S::zero(), |acc, (z, p)| acc + self.gross_value(z) * p)
    }
}

#[derive(Clone, Debug)]
pub struct ForwardSolution<S> {
    pub f_star: DiscreteCdf<S>,
    pub value: S,
    /// Multiplier of the total-mass row.
    pub mass_dual: S,
    /// `(s, multiplier)` of the MPC row at each prior atom `s > 0`.
    pub mpc_duals: Vec<(S, S)>,
    pub price: PiecewiseFunction<S>,
    /// Chosen act per atom of `f_star`.
    pub acts: Vec<usize>,
    pub grid: Vec<S>,
}

fn mpc_program<S: Scalar>(problem: &ForwardProblem<S>, grid: &[S]) -> Result<LinearProgram<S>> {
    let mut prog = LinearProgram::new();
    for g in grid {
        prog.add_var(format!("f({g})"), VarSign::NonNegative);
    }
    prog.add_row((0..grid.len()).map(|j| (j, S::one())).collect(), Relation::Eq, S::one())?;
    // The gap is concave between consecutive prior atoms, so checking it at
    // the atoms covers the whole interval.
    for gp in problem.prior.support().iter().filter(|g| g.is_positive()) {
        let coeffs = grid
            .iter()
            .enumerate()
            .filter(|(_, g)| g.compare(gp).is_lt())
            .map(|(j, g)| (j, gp.clone() - g))
            .collect();
        let rel = if gp.compare(&S::one()).is_eq() { Relation::Eq } else { Relation::Le };
        prog.add_row(coeffs, rel, problem.prior.integrated_cdf(gp))?;
    }
    let values: Vec<(usize, S)> = grid
        .iter()
        .enumerate()
        .map(|(j, g)| (j, problem.gross_value(g)))
        .collect();
    prog.set_objective(Sense::Maximize, values)?;
    Ok(prog)
}

fn checked_grid<S: Scalar>(problem: &ForwardProblem<S>, grid: &[S]) -> Result<()> {
    let has = |z: &S| grid.iter().any(|g| g.compare(z).is_eq());
    if !has(&S::zero()) || !has(&S::one()) || !problem.prior.support().iter().all(has) {
        return Err(domain("grid must contain 0, 1 and the prior support"));
    }
    Ok(())
}

fn optimum<S: Scalar>(prog: &LinearProgram<S>) -> Result<lp::LpOutcome<S>> {
    let out = lp::solve(prog)?;
    if out.status != LpStatus::Optimal {
        return Err(internal(format!("forward program ended {:?}", out.status)));
    }
    Ok(out)
}

/// Maximizes `int (phi + c) dF` over grid-supported mean-preserving
/// contractions of the prior. Among optimal distributions the one with the
/// smallest second moment (the least informative) is returned.
pub fn solve_forward<S: Scalar>(problem: &ForwardProblem<S>) -> Result<ForwardSolution<S>> {
    let grid = &problem.grid;
    checked_grid(problem, grid)?;
    let mut prog = mpc_program(problem, grid)?;
    let primary = optimum(&prog)?;
    let value = primary.objective_value.clone().expect("optimal");
    let duals = primary.duals.clone().expect("optimal");

    let objective = prog.objective().expect("set").coeffs.clone();
    prog.add_row(objective, Relation::Eq, value.clone())?;
    let second_moment = grid
        .iter()
        .enumerate()
        .map(|(j, g)| (j, g.clone() * g))
        .collect();
    prog.set_objective(Sense::Minimize, second_moment)?;
    let tie_break = optimum(&prog)?;
    let x = tie_break.primal.expect("optimal");

    let f_star = DiscreteCdf::new(grid.iter().cloned().zip(x).collect())?;
    let mass_dual = duals[0].clone();
    let mpc_duals: Vec<(S, S)> = problem
        .prior
        .support()
        .into_iter()
        .filter(|g| g.is_positive())
        .zip(duals[1..].iter().cloned())
        .collect();
    let mut multipliers = vec![(S::zero(), mass_dual.clone())];
    multipliers.extend(mpc_duals.iter().cloned());
    let price = lambda_to_envelope(&multipliers);
    if !price.is_convex() {
        return Err(internal("price function from the MPC duals is not convex"));
    }
    let acts = f_star
        .atoms()
        .iter()
        .map(|(z, _)| problem.menu.best_act(z))
        .collect();
    Ok(ForwardSolution {
        f_star,
        value,
        mass_dual,
        mpc_duals,
        price,
        acts,
        grid: grid.clone(),
    })
}

/// Optimal value on the grid refined by `resolution` evenly spaced points.
pub fn oracle_value<S: Scalar>(problem: &ForwardProblem<S>, resolution: usize) -> Result<S> {
    if resolution < problem.grid.len() {
        return Err(domain(format!(
            "resolution {resolution} is below the grid size {}",
            problem.grid.len()
        )));
    }
    let refined = problem.clone().refined(resolution);
    let prog = mpc_program(&refined, &refined.grid)?;
    Ok(optimum(&prog)?.objective_value.expect("optimal"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    LowestIndex,
    HighestIndex,
}

fn pick_act<S: Scalar>(menu: &Menu<S>, z: &S, tie: TieBreak) -> usize {
    match tie {
        TieBreak::LowestIndex => menu.best_act(z),
        TieBreak::HighestIndex => {
            let best = menu.acts[menu.best_act(z)].utility_unchecked(z);
            (0..menu.acts.len())
                .rev()
                .find(|&a| menu.acts[a].utility_unchecked(z).compare(&best).is_eq())
                .expect("best act exists")
        }
    }
}

/// Splits prior mass across posterior means: `m[z][g] >= 0` with row sums
/// `f0(z)`, column sums `f(g)` and barycenters `g`. Rows follow the state
/// space; zero-weight states get zero rows.
pub fn garbling<S: Scalar>(space: &StateSpace<S>, prior: &Prior<S>, f: &DiscreteCdf<S>) -> Result<Vec<Vec<S>>> {
    let support: Vec<usize> = (0..space.len()).filter(|&j| prior.weights[j].is_positive()).collect();
    let atoms = f.atoms();
    let k = atoms.len();
    let var = |i: usize, g: usize| i * k + g;
    let mut prog = LinearProgram::new();
    for &j in &support {
        for (g, _) in atoms {
            prog.add_var(format!("m({},{g})", space.states[j]), VarSign::NonNegative);
        }
    }
    for (i, &j) in support.iter().enumerate() {
        prog.add_row((0..k).map(|g| (var(i, g), S::one())).collect(), Relation::Eq, prior.weights[j].clone())?;
    }
    for (g, (loc, mass)) in atoms.iter().enumerate() {
        prog.add_row((0..support.len()).map(|i| (var(i, g), S::one())).collect(), Relation::Eq, mass.clone())?;
        let coeffs = support
            .iter()
            .enumerate()
            .map(|(i, &j)| (var(i, g), space.states[j].clone() - loc))
            .collect();
        prog.add_row(coeffs, Relation::Eq, S::zero())?;
    }
    let out = lp::solve(&prog)?;
    if out.status != LpStatus::Feasible {
        return Err(domain("distribution is not a garbling of the prior"));
    }
    let x = out.primal.expect("feasible");
    let mut m = vec![vec![S::zero(); k]; space.len()];
    for (i, &j) in support.iter().enumerate() {
        for g in 0..k {
            m[j][g] = x[var(i, g)].clone();
        }
    }
    Ok(m)
}

fn observation_for<S: Scalar>(
    space: &StateSpace<S>,
    prior: &Prior<S>,
    menu: &Menu<S>,
    c: &PiecewiseFunction<S>,
    tie: TieBreak,
) -> Result<Vec<Vec<S>>> {
    let problem = ForwardProblem::new(DiscreteCdf::from_prior(space, prior)?, menu.clone(), c.clone())?;
    let sol = solve_forward(&problem)?;
    let acts: Vec<usize> = sol
        .f_star
        .atoms()
        .iter()
        .map(|(z, _)| pick_act(menu, z, tie))
        .collect();
    let m = garbling(space, prior, &sol.f_star)?;
    let mut sigma = vec![vec![S::zero(); space.len()]; menu.acts.len()];
    for (j, z) in space.states.iter().enumerate() {
        let w = &prior.weights[j];
        if w.is_positive() {
            for (g, a) in acts.iter().enumerate() {
                sigma[*a][j] += m[j][g].clone() / w;
            }
        } else {
            sigma[pick_act(menu, z, tie)][j] = S::one();
        }
    }
    Ok(sigma)
}

/// Choice data of an agent facing each menu under one prior and cost
/// derivative `c`.
pub fn generate_dataset<S: Scalar>(
    space: &StateSpace<S>,
    prior: &Prior<S>,
    menus: &[Menu<S>],
    c: &PiecewiseFunction<S>,
    tie: TieBreak,
) -> Result<Dataset<S>> {
    let pairs: Vec<(usize, usize)> = (0..menus.len()).map(|m| (0, m)).collect();
    let mut data = generate_multi_prior_dataset(space, std::slice::from_ref(prior), menus, &pairs, c, tie)?;
    data.mode = PriorMode::Single;
    Ok(data)
}

/// As [`generate_dataset`], one observation per `(prior, menu)` index pair.
pub fn generate_multi_prior_dataset<S: Scalar>(
    space: &StateSpace<S>,
    priors: &[Prior<S>],
    menus: &[Menu<S>],
    pairs: &[(usize, usize)],
    c: &PiecewiseFunction<S>,
    tie: TieBreak,
) -> Result<Dataset<S>> {
    if pairs
        .iter()
        .any(|(p, m)| *p >= priors.len() || *m >= menus.len())
    {
        return Err(structure("observation refers to a missing prior or menu"));
    }
    let sigmas: Vec<Result<Vec<Vec<S>>>> = pairs
        .par_iter()
        .map(|(p, m)| observation_for(space, &priors[*p], &menus[*m], c, tie))
        .collect();
    let mut observations = Vec::with_capacity(pairs.len());
    for ((p, m), sigma) in pairs.iter().zip(sigmas) {
        observations.push(Observation {
            prior: *p,
            menu: *m,
            sigma: sigma?,
        });
    }
    let data = Dataset {
        state_space: space.clone(),
        priors: priors.to_vec(),
        menus: menus.to_vec(),
        observations,
        mode: PriorMode::Multi,
    };
    data.ensure_valid()?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{three_act_menu, q, row, space4};
    use crate::model::Act;
    use crate::recovery::variance_cost;
    use crate::revealed::is_mpc;
    use crate::scalar::Rational;

    fn uniform4() -> DiscreteCdf<Rational> {
        DiscreteCdf::from_prior(&space4(), &Prior::new("F0", vec![q(1, 4); 4])).unwrap()
    }

    fn three_act_cost() -> PiecewiseFunction<Rational> {
        PiecewiseFunction::from_points(&[
            (q(0, 1), q(-1, 36)),
            (q(1, 6), q(0, 1)),
            (q(1, 2), q(-10, 1)),
            (q(5, 6), q(0, 1)),
            (q(1, 1), q(-1, 36)),
        ])
        .unwrap()
    }

    #[test]
    fn grid_contains_prior_mean_and_breakpoints() {
        let p = ForwardProblem::new(uniform4(), three_act_menu(), three_act_cost()).unwrap();
        for z in [q(0, 1), q(1, 6), q(1, 4), q(1, 3), q(1, 2), q(2, 3), q(3, 4), q(5, 6), q(1, 1)] {
            assert!(p.grid.contains(&z), "missing {z}");
        }
        assert!(p.grid.windows(2).all(|w| w[0] < w[1]));
        let refined = p.clone().refined(5);
        assert!(!refined.grid.contains(&q(1, 8)) && refined.grid.contains(&q(3, 4)));
    }

    #[test]
    fn three_act_optimum_splits_at_one_sixth_and_five_sixths() {
        let p = ForwardProblem::new(uniform4(), three_act_menu(), three_act_cost()).unwrap();
        let sol = solve_forward(&p).unwrap();
        assert_eq!(sol.f_star.atoms(), &[(q(1, 6), q(1, 2)), (q(5, 6), q(1, 2))]);
        assert_eq!(sol.value, q(1, 6));
        assert_eq!(sol.acts, vec![0, 2]);
        assert!(is_mpc(&p.prior, &sol.f_star));
        assert_eq!(oracle_value(&p, 25).unwrap(), sol.value);
        assert!(oracle_value(&p, 3).is_err());
    }

    #[test]
    fn price_majorizes_gross_value_with_contact_on_the_support() {
        let p = ForwardProblem::new(uniform4(), three_act_menu(), three_act_cost()).unwrap();
        let sol = solve_forward(&p).unwrap();
        assert!(sol.price.is_convex());
        for k in 0..=60 {
            let z = q(k, 60);
            assert!(sol.price.eval(&z).unwrap() >= p.gross_value(&z));
        }
        for (z, _) in sol.f_star.atoms() {
            assert_eq!(sol.price.eval(z).unwrap(), p.gross_value(z));
        }
    }

    #[test]
    fn zero_cost_with_convex_payoffs_reveals_everything() {
        let menu = Menu::new("A", vec![Act::new("l", q(1, 1), q(0, 1)), Act::new("r", q(0, 1), q(1, 1))]).unwrap();
        let p = ForwardProblem::new(uniform4(), menu, PiecewiseFunction::constant(q(0, 1))).unwrap();
        let sol = solve_forward(&p).unwrap();
        assert_eq!(sol.f_star, uniform4());
    }

    #[test]
    fn affine_payoff_without_cost_stays_uninformed() {
        let menu = Menu::new("A", vec![Act::new("only", q(1, 3), q(2, 3))]).unwrap();
        let p = ForwardProblem::new(uniform4(), menu, PiecewiseFunction::constant(q(0, 1))).unwrap();
        let sol = solve_forward(&p).unwrap();
        assert_eq!(sol.value, q(1, 2));
        assert_eq!(sol.f_star, DiscreteCdf::point_mass(q(1, 2)).unwrap());
        assert_eq!(oracle_value(&p, 50).unwrap(), q(1, 2));
    }

    #[test]
    fn variance_cost_without_stakes_chooses_the_null_experiment() {
        let menu = Menu::new("A", vec![Act::new("zero", q(0, 1), q(0, 1))]).unwrap();
        let c = variance_cost(&q(1, 1), &q(1, 2)).unwrap();
        let p = ForwardProblem::new(uniform4(), menu, c).unwrap().refined(7);
        let sol = solve_forward(&p).unwrap();
        assert_eq!(sol.f_star, DiscreteCdf::point_mass(q(1, 2)).unwrap());
        assert_eq!(sol.value, q(0, 1));
    }

    #[test]
    fn garbling_has_the_right_marginals_and_barycenters() {
        let space = space4();
        let prior = Prior::new("F0", vec![q(1, 4); 4]);
        let f = DiscreteCdf::new(vec![(q(1, 6), q(1, 2)), (q(5, 6), q(1, 2))]).unwrap();
        let m = garbling(&space, &prior, &f).unwrap();
        for (j, w) in prior.weights.iter().enumerate() {
            assert_eq!(m[j].iter().fold(q(0, 1), |a, x| a + x), w.clone());
        }
        for (g, (loc, mass)) in f.atoms().iter().enumerate() {
            let col = (0..4).fold(q(0, 1), |a, j| a + m[j][g].clone());
            let moment = (0..4).fold(q(0, 1), |a, j| a + m[j][g].clone() * &space.states[j]);
            assert_eq!(&col, mass);
            assert_eq!(moment, loc.clone() * mass);
        }
        let spread = DiscreteCdf::new(vec![(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]).unwrap();
        assert!(garbling(&StateSpace::new(row(&[(0, 1), (1, 2), (1, 1)])).unwrap(), &Prior::new("p", row(&[(1, 4), (1, 2), (1, 4)])), &spread).is_err());
    }

    #[test]
    fn singleton_menu_generates_certain_choice() {
        let menu = Menu::new("S", vec![Act::new("only", q(1, 1), q(0, 1))]).unwrap();
        let prior = Prior::new("F0", vec![q(1, 4); 4]);
        let data = generate_dataset(&space4(), &prior, &[menu], &three_act_cost(), TieBreak::LowestIndex).unwrap();
        assert_eq!(data.observations[0].sigma, vec![vec![q(1, 1); 4]]);
        assert_eq!(data.mode, PriorMode::Single);
    }

    #[test]
    fn three_act_generation_reproduces_the_split() {
        let prior = Prior::new("F0", vec![q(1, 4); 4]);
        let data = generate_dataset(&space4(), &prior, &[three_act_menu()], &three_act_cost(), TieBreak::LowestIndex).unwrap();
        assert_eq!(
            data.observations[0].sigma,
            vec![row(&[(1, 1), (1, 1), (0, 1), (0, 1)]), vec![q(0, 1); 4], row(&[(0, 1), (0, 1), (1, 1), (1, 1)])]
        );
    }

    #[test]
    fn multi_prior_generation_checks_indices() {
        let prior = Prior::new("F0", vec![q(1, 4); 4]);
        let err = generate_multi_prior_dataset(&space4(), &[prior], &[three_act_menu()], &[(1, 0)], &three_act_cost(), TieBreak::LowestIndex);
        assert!(err.is_err());
    }
}
