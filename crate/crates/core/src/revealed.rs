//! Revealed posterior means, revealed distributions and the MPC gap.

use crate::error::{domain, structure, Result};
use crate::model::{check_unit, Dataset, Prior, StateSpace};
use crate::scalar::Scalar;

/// Finite-support distribution on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCdf<S> {
    atoms: Vec<(S, S)>,
    mean: S,
}

impl<S: Scalar> DiscreteCdf<S> {
    /// Sorts atoms, merges equal locations and drops zero masses. Masses must
    /// be nonnegative and sum to one.
    pub fn new(atoms: Vec<(S, S)>) -> Result<Self> {
        let mut atoms = atoms;
        for (z, p) in &atoms {
            check_unit(z)?;
            if p.is_negative() {
                return Err(domain(format!("negative mass {p} at {z}")));
            }
        }
        atoms.retain(|(_, p)| !p.is_zero());
        atoms.sort_by(|a, b| a.0.compare(&b.0));
        let mut merged: Vec<(S, S)> = Vec::with_capacity(atoms.len());
        for (z, p) in atoms {
            match merged.last_mut() {
                Some((lz, lp)) if lz.compare(&z).is_eq() => *lp += p,
                _ => merged.push((z, p)),
            }
        }
        let total = merged.iter().fold(S::zero(), |acc, (_, p)| acc + p);
        if !total.compare(&S::one()).is_eq() {
            return Err(domain(format!("masses sum to {total}, expected 1")));
        }
        let mean = merged
            .iter()
            .fold(S::zero(), |acc, (z, p)| acc + z.clone() * p);
        Ok(DiscreteCdf { atoms: merged, mean })
    }

    pub fn point_mass(z: S) -> Result<Self> {
        Self::new(vec![(z, S::one())])
    }

    pub fn from_prior(space: &StateSpace<S>, prior: &Prior<S>) -> Result<Self> {
        if prior.weights.len() != space.len() {
            return Err(structure("prior length does not match the state space"));
        }
        Self::new(
            space
                .states
                .iter()
                .cloned()
                .zip(prior.weights.iter().cloned())
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[(S, S)] {
        &self.atoms
    }

    pub fn support(&self) -> Vec<S> {
        self.atoms.iter().map(|(z, _)| z.clone()).collect()
    }

    pub fn mean(&self) -> &S {
        &self.mean
    }

    pub fn mass_at(&self, z: &S) -> S {
        self.atoms
            .iter()
            .find(|(x, _)| x.compare(z).is_eq())
            .map(|(_, p)| p.clone())
            .unwrap_or_else(S::zero)
    }

    /// `sum p(z) (z - center)^2`
    pub fn second_moment_about(&self, center: &S) -> S {
        self.atoms.iter().fold(S::zero(), |acc, (z, p)| {
            let d = z.clone() - center;
            acc + d.clone() * &d * p
        })
    }

    pub fn variance(&self) -> S {
        self.second_moment_about(&self.mean.clone())
    }

    /// `sum p(g) (z - g)_+`, the integral of the CDF from 0 to `z`.
    pub fn integrated_cdf(&self, z: &S) -> S {
        self.atoms
            .iter()
            .take_while(|(g, _)| g.compare(z).is_lt())
            .fold(S::zero(), |acc, (g, p)| acc + (z.clone() - g) * p)
    }
}

/// `I(z) = int_0^z [F0(s) - F(s)] ds`.
pub fn mpc_gap<S: Scalar>(prior: &DiscreteCdf<S>, f: &DiscreteCdf<S>, z: &S) -> S {
    prior.integrated_cdf(z) - f.integrated_cdf(z)
}

fn kink_locations<S: Scalar>(prior: &DiscreteCdf<S>, f: &DiscreteCdf<S>) -> Vec<S> {
    let mut xs: Vec<S> = prior
        .atoms
        .iter()
        .chain(&f.atoms)
        .map(|(z, _)| z.clone())
        .chain([S::zero(), S::one()])
        .collect();
    xs.sort_by(|a, b| a.compare(b));
    xs.dedup_by(|a, b| a.compare(b).is_eq());
    xs
}

/// True iff `f` is a mean-preserving contraction of `prior`.
pub fn is_mpc<S: Scalar>(prior: &DiscreteCdf<S>, f: &DiscreteCdf<S>) -> bool {
    mpc_gap(prior, f, &S::one()).is_zero()
        && kink_locations(prior, f)
            .iter()
            .all(|z| !mpc_gap(prior, f, z).is_negative())
}

/// Grid states at which the MPC constraint binds.
pub fn binding_set<S: Scalar>(
    prior: &DiscreteCdf<S>,
    f: &DiscreteCdf<S>,
    space: &StateSpace<S>,
) -> Result<Vec<S>> {
    if !is_mpc(prior, f) {
        return Err(domain("distribution is not a mean-preserving contraction of the prior"));
    }
    Ok(space
        .states
        .iter()
        .filter(|z| mpc_gap(prior, f, z).is_zero())
        .cloned()
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroSet<S> {
    Point(S),
    Interval(S, S),
}

/// Every real zero of the MPC gap on `[0, 1]`, as points and maximal intervals.
pub fn gap_zeros<S: Scalar>(prior: &DiscreteCdf<S>, f: &DiscreteCdf<S>) -> Vec<ZeroSet<S>> {
    let xs = kink_locations(prior, f);
    let vals: Vec<S> = xs.iter().map(|z| mpc_gap(prior, f, z)).collect();
    let mut out: Vec<ZeroSet<S>> = Vec::new();
    let push_point = |out: &mut Vec<ZeroSet<S>>, z: S| {
        let covered = match out.last() {
            Some(ZeroSet::Point(p)) => p.compare(&z).is_eq(),
            Some(ZeroSet::Interval(_, b)) => b.compare(&z).is_eq(),
            None => false,
        };
        if !covered {
            out.push(ZeroSet::Point(z));
        }
    };
    for i in 0..xs.len() {
        if vals[i].is_zero() {
            push_point(&mut out, xs[i].clone());
        }
        if i + 1 == xs.len() {
            break;
        }
        let (a, b) = (&vals[i], &vals[i + 1]);
        if a.is_zero() && b.is_zero() {
            let start = match out.pop() {
                Some(ZeroSet::Interval(s, _)) => s,
                _ => xs[i].clone(),
            };
            out.push(ZeroSet::Interval(start, xs[i + 1].clone()));
        } else if a.sign() == b.sign().reverse() && !a.is_zero() {
            // Linear piece crosses zero strictly inside.
            let t = a.clone() / (a.clone() - b);
            let z = xs[i].clone() + t * (xs[i + 1].clone() - &xs[i]);
            push_point(&mut out, z);
        }
    }
    out
}

/// Every pair of consecutive support points of `f` encloses a zero of the gap.
pub fn is_monotone_partitional<S: Scalar>(prior: &DiscreteCdf<S>, f: &DiscreteCdf<S>) -> Result<bool> {
    if !is_mpc(prior, f) {
        return Err(domain("distribution is not a mean-preserving contraction of the prior"));
    }
    let zeros = gap_zeros(prior, f);
    Ok(f.atoms.windows(2).all(|w| {
        let (lo, hi) = (&w[0].0, &w[1].0);
        zeros.iter().any(|zs| match zs {
            ZeroSet::Point(p) => lo.compare(p).is_le() && p.compare(hi).is_le(),
            ZeroSet::Interval(a, b) => a.compare(hi).is_le() && lo.compare(b).is_le(),
        })
    }))
}

/// Revealed statistics of one observation.
#[derive(Clone, Debug, PartialEq)]
pub struct RevealedSummary<S> {
    /// Revealed posterior mean per act (prior mean for never-chosen acts).
    pub act_means: Vec<S>,
    /// Unconditional choice probability per act.
    pub act_probs: Vec<S>,
    pub cdf: DiscreteCdf<S>,
    /// Atom index of each chosen act; `None` for never-chosen acts.
    pub atom_of_act: Vec<Option<usize>>,
    /// `decision[k][a]`: probability of act `a` at the `k`-th atom.
    pub decision: Vec<Vec<S>>,
}

impl<S: Scalar> RevealedSummary<S> {
    pub fn chosen_acts(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.act_probs.len()).filter(|&a| self.act_probs[a].is_positive())
    }

    /// Decision weights at `z`; off the revealed support they fall back to
    /// the unconditional choice probabilities.
    pub fn decision_at(&self, z: &S) -> Vec<S> {
        match self.cdf.atoms.iter().position(|(x, _)| x.compare(z).is_eq()) {
            Some(k) => self.decision[k].clone(),
            None => self.act_probs.clone(),
        }
    }
}

fn checked_act<S: Scalar>(data: &Dataset<S>, obs: usize, act: usize) -> Result<()> {
    if obs >= data.observations.len() {
        return Err(domain(format!("no observation {obs}")));
    }
    if act >= data.menu_of(obs).acts.len() {
        return Err(domain(format!(
            "act {act} is not in menu '{}'",
            data.menu_of(obs).id
        )));
    }
    Ok(())
}

fn unconditional<S: Scalar>(data: &Dataset<S>, obs: usize, act: usize) -> (S, S) {
    let prior = data.prior_of(obs);
    let row = &data.observations[obs].sigma[act];
    let mut prob = S::zero();
    let mut moment = S::zero();
    for ((s, w), z) in row.iter().zip(&prior.weights).zip(&data.state_space.states) {
        if s.is_zero() || w.is_zero() {
            continue;
        }
        let m = s.clone() * w;
        moment += m.clone() * z;
        prob += m;
    }
    (prob, moment)
}

/// Bayes-weighted average state conditional on the act being chosen.
pub fn revealed_posterior_mean<S: Scalar>(data: &Dataset<S>, obs: usize, act: usize) -> Result<S> {
    checked_act(data, obs, act)?;
    let (prob, moment) = unconditional(data, obs, act);
    if prob.is_zero() {
        Ok(data.prior_of(obs).mean(&data.state_space))
    } else {
        Ok(moment / prob)
    }
}

pub fn revealed_summary<S: Scalar>(data: &Dataset<S>, obs: usize) -> Result<RevealedSummary<S>> {
    checked_act(data, obs, 0)?;
    let n_acts = data.menu_of(obs).acts.len();
    let z0 = data.prior_of(obs).mean(&data.state_space);
    let mut act_means = Vec::with_capacity(n_acts);
    let mut act_probs = Vec::with_capacity(n_acts);
    for a in 0..n_acts {
        let (p, m) = unconditional(data, obs, a);
        act_means.push(if p.is_zero() { z0.clone() } else { m / &p });
        act_probs.push(p);
    }
    let atoms: Vec<(S, S)> = (0..n_acts)
        .filter(|&a| act_probs[a].is_positive())
        .map(|a| (act_means[a].clone(), act_probs[a].clone()))
        .collect();
    let cdf = DiscreteCdf::new(atoms)?;
    let atom_of_act: Vec<Option<usize>> = (0..n_acts)
        .map(|a| {
            if act_probs[a].is_positive() {
                cdf.atoms.iter().position(|(z, _)| z.compare(&act_means[a]).is_eq())
            } else {
                None
            }
        })
        .collect();
    let decision = cdf
        .atoms
        .iter()
        .enumerate()
        .map(|(k, (_, mass))| {
            (0..n_acts)
                .map(|a| {
                    if atom_of_act[a] == Some(k) {
                        act_probs[a].clone() / mass
                    } else {
                        S::zero()
                    }
                })
                .collect()
        })
        .collect();
    Ok(RevealedSummary {
        act_means,
        act_probs,
        cdf,
        atom_of_act,
        decision,
    })
}

/// Prior of an observation as a distribution.
pub fn prior_cdf<S: Scalar>(data: &Dataset<S>, obs: usize) -> Result<DiscreteCdf<S>> {
    DiscreteCdf::from_prior(&data.state_space, data.prior_of(obs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Act, Menu, Observation, PriorMode};
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn cdf(atoms: &[(Rational, Rational)]) -> DiscreteCdf<Rational> {
        DiscreteCdf::new(atoms.to_vec()).unwrap()
    }

    fn uniform4() -> DiscreteCdf<Rational> {
        cdf(&[(q(0, 1), q(1, 4)), (q(1, 3), q(1, 4)), (q(2, 3), q(1, 4)), (q(1, 1), q(1, 4))])
    }

    fn space4() -> StateSpace<Rational> {
        StateSpace::new(vec![q(0, 1), q(1, 3), q(2, 3), q(1, 1)]).unwrap()
    }

    fn binary_dataset(sigma_a: [Rational; 2]) -> Dataset<Rational> {
        let space = StateSpace::new(vec![q(0, 1), q(1, 1)]).unwrap();
        let menu = Menu::new("M", vec![Act::new("a", q(0, 1), q(0, 1)), Act::new("b", q(0, 1), q(0, 1))]).unwrap();
        let other = [q(1, 1) - &sigma_a[0], q(1, 1) - &sigma_a[1]];
        Dataset {
            state_space: space,
            priors: vec![Prior::new("p", vec![q(1, 2), q(1, 2)])],
            menus: vec![menu],
            observations: vec![Observation { prior: 0, menu: 0, sigma: vec![sigma_a.to_vec(), other.to_vec()] }],
            mode: PriorMode::Single,
        }
    }

    #[test]
    fn revealed_mean_examples() {
        let d = binary_dataset([q(3, 4), q(1, 4)]);
        assert_eq!(revealed_posterior_mean(&d, 0, 0).unwrap(), q(1, 4));
        assert_eq!(revealed_posterior_mean(&d, 0, 1).unwrap(), q(3, 4));
        let flat = binary_dataset([q(2, 5), q(2, 5)]);
        assert_eq!(revealed_posterior_mean(&flat, 0, 0).unwrap(), q(1, 2));
        let never = binary_dataset([q(0, 1), q(0, 1)]);
        assert_eq!(revealed_posterior_mean(&never, 0, 0).unwrap(), q(1, 2));
        assert!(revealed_posterior_mean(&never, 0, 2).is_err());
    }

    #[test]
    fn summary_examples() {
        let full = binary_dataset([q(1, 1), q(0, 1)]);
        let s = revealed_summary(&full, 0).unwrap();
        assert_eq!(s.cdf.atoms(), &[(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]);

        let flat = binary_dataset([q(1, 3), q(1, 3)]);
        let s = revealed_summary(&flat, 0).unwrap();
        assert_eq!(s.cdf.atoms(), &[(q(1, 2), q(1, 1))]);
        assert_eq!(s.decision[0], vec![q(1, 3), q(2, 3)]);
        assert_eq!(s.atom_of_act, vec![Some(0), Some(0)]);
        assert_eq!(s.decision_at(&q(1, 5)), vec![q(1, 3), q(2, 3)]);
    }

    #[test]
    fn gap_examples() {
        let f0 = uniform4();
        for k in 0..=6 {
            assert!(mpc_gap(&f0, &f0, &q(k, 6)).is_zero());
        }
        let delta = DiscreteCdf::point_mass(q(1, 2)).unwrap();
        assert!(mpc_gap(&f0, &delta, &q(1, 1)).is_zero());
        let split = cdf(&[(q(1, 6), q(1, 2)), (q(5, 6), q(1, 2))]);
        assert_eq!(mpc_gap(&f0, &split, &q(1, 6)), q(1, 24));
        assert!(mpc_gap(&f0, &split, &q(1, 3)).is_zero());
    }

    #[test]
    fn mpc_examples() {
        let f0 = uniform4();
        assert!(is_mpc(&f0, &DiscreteCdf::point_mass(q(1, 2)).unwrap()));
        assert!(is_mpc(&f0, &f0));
        let two = cdf(&[(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
        assert!(!is_mpc(&two, &DiscreteCdf::point_mass(q(7, 10)).unwrap()));
        // More spread than the prior.
        assert!(!is_mpc(&f0, &two));
    }

    #[test]
    fn binding_examples() {
        let f0 = uniform4();
        let space = space4();
        assert_eq!(binding_set(&f0, &f0, &space).unwrap(), space.states);
        let delta = DiscreteCdf::point_mass(q(1, 2)).unwrap();
        assert_eq!(binding_set(&f0, &delta, &space).unwrap(), vec![q(0, 1), q(1, 1)]);
        let split = cdf(&[(q(1, 6), q(1, 2)), (q(5, 6), q(1, 2))]);
        assert_eq!(binding_set(&f0, &split, &space).unwrap(), space.states);
        let two = cdf(&[(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
        assert!(binding_set(&f0, &two, &space).is_err());
    }

    #[test]
    fn zeros_and_partitions() {
        let f0 = uniform4();
        let split = cdf(&[(q(1, 6), q(1, 2)), (q(5, 6), q(1, 2))]);
        assert_eq!(
            gap_zeros(&f0, &split),
            vec![ZeroSet::Point(q(0, 1)), ZeroSet::Interval(q(1, 3), q(2, 3)), ZeroSet::Point(q(1, 1))]
        );
        assert!(is_monotone_partitional(&f0, &split).unwrap());
        assert!(is_monotone_partitional(&f0, &DiscreteCdf::point_mass(q(1, 2)).unwrap()).unwrap());
        assert!(is_monotone_partitional(&f0, &f0).unwrap());
        let pooled = cdf(&[(q(0, 1), q(1, 4)), (q(1, 2), q(1, 2)), (q(1, 1), q(1, 4))]);
        assert!(is_monotone_partitional(&f0, &pooled).unwrap());
        // Two posteriors that each mix the middle states with both ends.
        let mixed = cdf(&[(q(1, 3), q(1, 2)), (q(2, 3), q(1, 2))]);
        assert!(is_mpc(&f0, &mixed));
        assert!(!is_monotone_partitional(&f0, &mixed).unwrap());
    }

    // Random decision rules over a random posterior-mean distribution.
    fn garbling_case() -> impl Strategy<Value = (Vec<(i64, i64)>, Vec<Vec<i64>>)> {
        (1usize..5, 1usize..4).prop_flat_map(|(k, n_acts)| {
            (
                proptest::collection::vec((0i64..=12, 1i64..6), k),
                proptest::collection::vec(proptest::collection::vec(0i64..4, n_acts), k),
            )
        })
    }

    proptest! {
        #[test]
        fn bayes_plausibility_and_garbling((post, dec) in garbling_case()) {
            // Posterior means F over a grid of twelfths; states are {0, 1}
            // with the prior induced by F.
            let total_w: i64 = post.iter().map(|(_, w)| w).sum();
            let f = DiscreteCdf::new(post.iter().map(|(z, w)| (q(*z, 12), q(*w, total_w))).collect()).unwrap();
            let z0 = f.mean().clone();
            prop_assume!(z0.is_positive() && z0 < q(1, 1));
            let n_acts = dec[0].len();
            // D(a|g) proportional to dec entries (uniform if all zero).
            let d: Vec<Vec<Rational>> = dec.iter().map(|row| {
                let s: i64 = row.iter().sum();
                if s == 0 { vec![q(1, n_acts as i64); n_acts] } else { row.iter().map(|x| q(*x, s)).collect() }
            }).collect();
            // Merge duplicate locations the same way DiscreteCdf did.
            let mut per_atom: Vec<Vec<Rational>> = vec![vec![q(0, 1); n_acts]; f.atoms().len()];
            for (i, (z, w)) in post.iter().enumerate() {
                let k = f.atoms().iter().position(|(x, _)| *x == q(*z, 12)).unwrap();
                for a in 0..n_acts { per_atom[k][a] += q(*w, total_w) * &d[i][a]; }
            }
            // sigma(a|z) on states {0,1}: P(a, state) = sum_g f(g) D(a|g) P(state|g).
            let f0 = vec![q(1, 1) - &z0, z0.clone()];
            let sigma: Vec<Vec<Rational>> = (0..n_acts).map(|a| {
                let p1 = per_atom.iter().zip(f.atoms()).fold(q(0, 1), |acc, (m, (g, _))| acc + m[a].clone() * g);
                let pa = per_atom.iter().fold(q(0, 1), |acc, m| acc + &m[a]);
                vec![(pa - &p1) / &f0[0], p1 / &f0[1]]
            }).collect();
            let acts = (0..n_acts).map(|a| Act::new(format!("a{a}"), q(0, 1), q(0, 1))).collect();
            let data = Dataset {
                state_space: StateSpace::new(vec![q(0, 1), q(1, 1)]).unwrap(),
                priors: vec![Prior::new("p", f0)],
                menus: vec![Menu::new("M", acts).unwrap()],
                observations: vec![Observation { prior: 0, menu: 0, sigma }],
                mode: PriorMode::Single,
            };
            prop_assert!(crate::model::validate_dataset(&data).is_valid());
            let s = revealed_summary(&data, 0).unwrap();
            prop_assert_eq!(s.cdf.mean().clone(), z0);
            prop_assert_eq!(crate::scalar::sum(&s.act_probs), q(1, 1));
            prop_assert!(mpc_gap(&f, &s.cdf, &q(1, 1)).is_zero());
            for x in 0..=12 { prop_assert!(!mpc_gap(&f, &s.cdf, &q(x, 12)).is_negative()); }
            let p0 = prior_cdf(&data, 0).unwrap();
            prop_assert!(mpc_gap(&p0, &s.cdf, &q(0, 1)).is_zero());
            prop_assert!(mpc_gap(&p0, &s.cdf, &q(1, 1)).is_zero());
            // Each act used at exactly one posterior mean: F is recovered.
            if per_atom.iter().all(|m| m.iter().filter(|x| x.is_positive()).count() <= 1) {
                let distinct: Vec<usize> = (0..n_acts).filter(|a| per_atom.iter().any(|m| m[*a].is_positive())).collect();
                let one_atom_each = distinct.iter().all(|a| per_atom.iter().filter(|m| m[*a].is_positive()).count() == 1);
                if one_atom_each { prop_assert_eq!(s.cdf, f); }
            }
        }
    }
}
