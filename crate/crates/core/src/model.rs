//! States, priors, acts, menus and choice data.

use std::collections::HashSet;
use std::fmt;

use crate::error::{domain, structure, Result};
use crate::scalar::{self, Scalar};

/// Strictly increasing grid of states in `[0, 1]`, starting at 0 and ending at 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace<S> {
    pub states: Vec<S>,
}

impl<S: Scalar> StateSpace<S> {
    pub fn new(states: Vec<S>) -> Result<Self> {
        let space = StateSpace { states };
        let problems = space.problems();
        match problems.first() {
            Some(p) => Err(structure(p.clone())),
            None => Ok(space),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, z: &S) -> Option<usize> {
        self.states.iter().position(|s| s.compare(z).is_eq())
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.states.len() < 2 {
            out.push("state space needs at least the states 0 and 1".to_string());
            return out;
        }
        if !self.states[0].is_zero() {
            out.push(format!("first state must be 0, found {}", self.states[0]));
        }
        let last = self.states.last().expect("nonempty");
        if !last.compare(&S::one()).is_eq() {
            out.push(format!("last state must be 1, found {last}"));
        }
        for w in self.states.windows(2) {
            if !w[0].compare(&w[1]).is_lt() {
                out.push(format!("states must be strictly increasing ({} then {})", w[0], w[1]));
            }
        }
        out
    }
}

/// Prior weights over a state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior<S> {
    pub id: String,
    pub weights: Vec<S>,
}

impl<S: Scalar> Prior<S> {
    pub fn new(id: impl Into<String>, weights: Vec<S>) -> Self {
        Prior {
            id: id.into(),
            weights,
        }
    }

    /// Prior mean `sum z f0(z)`.
    pub fn mean(&self, space: &StateSpace<S>) -> S {
        self.weights
            .iter()
            .zip(&space.states)
            .fold(S::zero(), |acc, (w, z)| acc + w.clone() * z)
    }

    pub(crate) fn problems(&self, space: &StateSpace<S>) -> Vec<String> {
        let mut out = Vec::new();
        if self.weights.len() != space.len() {
            out.push(format!(
                "prior '{}' has {} weights for {} states",
                self.id,
                self.weights.len(),
                space.len()
            ));
            return out;
        }
        for (w, z) in self.weights.iter().zip(&space.states) {
            if w.is_negative() {
                out.push(format!("prior '{}' has negative weight {w} at state {z}", self.id));
            }
        }
        let total = scalar::sum(&self.weights);
        if !total.compare(&S::one()).is_eq() {
            out.push(format!("prior '{}' weights sum to {total}, expected 1", self.id));
        }
        if !self.weights[0].is_positive() {
            out.push(format!("prior '{}': prior must put mass on state 0", self.id));
        }
        if !self.weights.last().expect("nonempty").is_positive() {
            out.push(format!("prior '{}': prior must put mass on state 1", self.id));
        }
        out
    }
}

/// An act, stored by its payoffs at the two extreme states.
#[derive(Clone, Debug, PartialEq)]
pub struct Act<S> {
    pub id: String,
    pub u0: S,
    pub u1: S,
}

impl<S: Scalar> Act<S> {
    pub fn new(id: impl Into<String>, u0: S, u1: S) -> Self {
        Act {
            id: id.into(),
            u0,
            u1,
        }
    }

    /// Builds an act from payoffs listed per state, rejecting tables that are
    /// not affine in the state.
    pub fn from_payoff_table(id: impl Into<String>, space: &StateSpace<S>, payoffs: &[S]) -> Result<Self> {
        let id = id.into();
        if payoffs.len() != space.len() {
            return Err(structure(format!(
                "act '{id}' lists {} payoffs for {} states",
                payoffs.len(),
                space.len()
            )));
        }
        let act = Act::new(id, payoffs[0].clone(), payoffs[payoffs.len() - 1].clone());
        for (z, u) in space.states.iter().zip(payoffs) {
            let expected = act.utility_unchecked(z);
            if !expected.compare(u).is_eq() {
                return Err(domain(format!(
                    "payoffs of act '{}' are not affine in the state: {u} at {z}, expected {expected}",
                    act.id
                )));
            }
        }
        Ok(act)
    }

    /// `z u1 + (1 - z) u0` without the domain check.
    pub fn utility_unchecked(&self, z: &S) -> S {
        z.clone() * &self.u1 + (S::one() - z) * &self.u0
    }

    pub fn slope(&self) -> S {
        self.u1.clone() - &self.u0
    }
}

pub fn utility<S: Scalar>(act: &Act<S>, z: &S) -> Result<S> {
    check_unit(z)?;
    Ok(act.utility_unchecked(z))
}

pub(crate) fn check_unit<S: Scalar>(z: &S) -> Result<()> {
    if z.is_negative() || z.compare(&S::one()).is_gt() {
        Err(domain(format!("{z} lies outside [0, 1]")))
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Menu<S> {
    pub id: String,
    pub acts: Vec<Act<S>>,
}

impl<S: Scalar> Menu<S> {
    pub fn new(id: impl Into<String>, acts: Vec<Act<S>>) -> Result<Self> {
        let menu = Menu { id: id.into(), acts };
        if let Some(p) = menu.problems().first() {
            return Err(structure(p.clone()));
        }
        Ok(menu)
    }

    pub fn act_index(&self, id: &str) -> Option<usize> {
        self.acts.iter().position(|a| a.id == id)
    }

    /// Index of the best act at `z`, lowest index on ties.
    pub fn best_act(&self, z: &S) -> usize {
        let mut best = 0;
        let mut best_value = self.acts[0].utility_unchecked(z);
        for (i, a) in self.acts.iter().enumerate().skip(1) {
            let v = a.utility_unchecked(z);
            if v.compare(&best_value).is_gt() {
                best = i;
                best_value = v;
            }
        }
        best
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.acts.is_empty() {
            out.push(format!("menu '{}' has no acts", self.id));
        }
        let mut seen = HashSet::new();
        for a in &self.acts {
            if !seen.insert(a.id.as_str()) {
                out.push(format!("menu '{}' repeats act id '{}'", self.id, a.id));
            }
        }
        out
    }
}

/// Value of the best act in the menu at posterior mean `z`.
pub fn indirect_utility<S: Scalar>(menu: &Menu<S>, z: &S) -> Result<S> {
    check_unit(z)?;
    if menu.acts.is_empty() {
        return Err(structure(format!("menu '{}' has no acts", menu.id)));
    }
    Ok(menu.acts[menu.best_act(z)].utility_unchecked(z))
}

/// One decision problem: a prior, a menu, and choice probabilities
/// `sigma[a][z]` of each act conditional on each state.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation<S> {
    pub prior: usize,
    pub menu: usize,
    pub sigma: Vec<Vec<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PriorMode {
    /// Every observation shares one prior.
    Single,
    /// Each observation may carry its own prior.
    Multi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<S> {
    pub state_space: StateSpace<S>,
    pub priors: Vec<Prior<S>>,
    pub menus: Vec<Menu<S>>,
    pub observations: Vec<Observation<S>>,
    pub mode: PriorMode,
}

impl<S: Scalar> Dataset<S> {
    pub fn prior_of(&self, obs: usize) -> &Prior<S> {
        &self.priors[self.observations[obs].prior]
    }

    pub fn menu_of(&self, obs: usize) -> &Menu<S> {
        &self.menus[self.observations[obs].menu]
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Label used in reports: the menu id, suffixed when a menu recurs.
    pub fn observation_label(&self, obs: usize) -> String {
        let menu = self.observations[obs].menu;
        let repeats = self.observations.iter().filter(|o| o.menu == menu).count() > 1;
        if repeats || self.mode == PriorMode::Multi {
            format!("{}#{}", self.menus[menu].id, obs)
        } else {
            self.menus[menu].id.clone()
        }
    }

    /// Fails with the first validation problem, if any.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_dataset(self);
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(structure(format!("invalid dataset: {v}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "dataset is valid");
        }
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

/// Lists every violated structural or probabilistic requirement.
pub fn validate_dataset<S: Scalar>(data: &Dataset<S>) -> ValidationReport {
    let mut v = data.state_space.problems();
    let space_ok = v.is_empty();
    if data.priors.is_empty() {
        v.push("dataset has no priors".into());
    }
    if data.mode == PriorMode::Single && data.priors.len() > 1 {
        v.push(format!(
            "single-prior dataset declares {} priors",
            data.priors.len()
        ));
    }
    if space_ok {
        for p in &data.priors {
            v.extend(p.problems(&data.state_space));
        }
    }
    for m in &data.menus {
        v.extend(m.problems());
    }
    if data.observations.is_empty() {
        v.push("dataset has no observations".into());
    }
    let n_states = data.state_space.len();
    for (k, obs) in data.observations.iter().enumerate() {
        let (Some(prior), Some(menu)) = (data.priors.get(obs.prior), data.menus.get(obs.menu)) else {
            v.push(format!("observation {k} refers to a missing prior or menu"));
            continue;
        };
        if obs.sigma.len() != menu.acts.len() {
            v.push(format!(
                "observation {k} (menu '{}'): choice matrix has {} rows for {} acts",
                menu.id,
                obs.sigma.len(),
                menu.acts.len()
            ));
            continue;
        }
        if obs.sigma.iter().any(|row| row.len() != n_states) {
            v.push(format!(
                "observation {k} (menu '{}'): choice matrix rows must have {n_states} entries",
                menu.id
            ));
            continue;
        }
        for (a, row) in obs.sigma.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if p.is_negative() {
                    v.push(format!(
                        "observation {k} (menu '{}'): negative probability {p} for act '{}' at state {}",
                        menu.id, menu.acts[a].id, data.state_space.states[j]
                    ));
                }
            }
        }
        if prior.weights.len() != n_states {
            continue;
        }
        for j in 0..n_states {
            if !prior.weights[j].is_positive() {
                continue;
            }
            let total = obs.sigma.iter().fold(S::zero(), |acc, row| acc + &row[j]);
            if !total.compare(&S::one()).is_eq() {
                v.push(format!(
                    "observation {k} (menu '{}'), state {}: choice probabilities sum to {total}, expected 1",
                    menu.id, data.state_space.states[j]
                ));
            }
        }
    }
    ValidationReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn three_act_menu() -> Menu<Rational> {
        Menu::new(
            "A",
            vec![
                Act::new("a1", q(1, 4), q(-1, 4)),
                Act::new("a2", q(1, 8), q(1, 8)),
                Act::new("a3", q(-1, 4), q(1, 4)),
            ],
        )
        .unwrap()
    }

    fn three_act() -> Dataset<Rational> {
        let space = StateSpace::new(vec![q(0, 1), q(1, 3), q(2, 3), q(1, 1)]).unwrap();
        let prior = Prior::new("F0", vec![q(1, 4); 4]);
        let one = q(1, 1);
        let zero = q(0, 1);
        let sigma = vec![
            vec![one.clone(), one.clone(), zero.clone(), zero.clone()],
            vec![zero.clone(); 4],
            vec![zero.clone(), zero.clone(), one.clone(), one.clone()],
        ];
        Dataset {
            state_space: space,
            priors: vec![prior],
            menus: vec![three_act_menu()],
            observations: vec![Observation { prior: 0, menu: 0, sigma }],
            mode: PriorMode::Single,
        }
    }

    #[test]
    fn utility_examples() {
        let a = Act::new("a1", q(1, 4), q(-1, 4));
        assert_eq!(utility(&a, &q(0, 1)).unwrap(), q(1, 4));
        assert_eq!(utility(&a, &q(1, 6)).unwrap(), q(1, 6));
        assert_eq!(utility(&a, &q(1, 1)).unwrap(), q(-1, 4));
        assert!(utility(&a, &q(3, 2)).is_err());
        assert!(utility(&a, &q(-1, 2)).is_err());
    }

    #[test]
    fn indirect_utility_examples() {
        let m = three_act_menu();
        assert_eq!(indirect_utility(&m, &q(1, 2)).unwrap(), q(1, 8));
        assert_eq!(indirect_utility(&m, &q(0, 1)).unwrap(), q(1, 4));
        let single = Menu::new("S", vec![Act::new("s", q(2, 1), q(-3, 1))]).unwrap();
        assert_eq!(indirect_utility(&single, &q(1, 5)).unwrap(), q(1, 1));
    }

    #[test]
    fn payoff_tables_must_be_affine() {
        let space = StateSpace::new(vec![q(0, 1), q(1, 2), q(1, 1)]).unwrap();
        let ok = Act::from_payoff_table("a", &space, &[q(1, 1), q(2, 1), q(3, 1)]).unwrap();
        assert_eq!((ok.u0, ok.u1), (q(1, 1), q(3, 1)));
        assert!(Act::from_payoff_table("b", &space, &[q(1, 1), q(5, 2), q(3, 1)]).is_err());
    }

    #[test]
    fn state_space_rules() {
        assert!(StateSpace::new(vec![q(0, 1), q(1, 1)]).is_ok());
        assert!(StateSpace::new(vec![q(1, 10), q(1, 1)]).is_err());
        assert!(StateSpace::new(vec![q(0, 1), q(1, 2), q(1, 2), q(1, 1)]).is_err());
        assert!(Menu::new("M", vec![Act::new("x", q(0, 1), q(0, 1)), Act::new("x", q(1, 1), q(0, 1))]).is_err());
    }

    #[test]
    fn validation_reports() {
        let d = three_act();
        assert!(validate_dataset(&d).is_valid());

        let mut bad = d.clone();
        bad.priors[0].weights = vec![q(1, 3), q(1, 3), q(1, 3), q(0, 1)];
        let r = validate_dataset(&bad);
        assert!(r.violations.iter().any(|v| v.contains("prior must put mass on state 1")), "{r}");

        let mut bad = d.clone();
        bad.observations[0].sigma[0][1] = q(9, 10);
        let r = validate_dataset(&bad);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].contains("menu 'A'"));
        assert!(r.violations[0].contains("state 1/3"));
        assert!(r.violations[0].contains("9/10"));

        let mut bad = d;
        bad.observations[0].sigma.pop();
        assert!(!validate_dataset(&bad).is_valid());
    }

    #[test]
    fn prior_mean() {
        let d = three_act();
        assert_eq!(d.priors[0].mean(&d.state_space), q(1, 2));
    }

    fn unit() -> impl Strategy<Value = Rational> {
        (0i64..=60).prop_map(|n| q(n, 60))
    }

    proptest! {
        #[test]
        fn utility_is_affine(u0 in -20i64..20, u1 in -20i64..20, x in unit(), y in unit()) {
            let a = Act::new("a", q(u0, 7), q(u1, 3));
            let mid = (x.clone() + &y) / q(2, 1);
            let lhs = utility(&a, &mid).unwrap();
            let rhs = (utility(&a, &x).unwrap() + utility(&a, &y).unwrap()) / q(2, 1);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn indirect_utility_is_convex_max(
            pays in proptest::collection::vec((-10i64..10, -10i64..10), 1..5),
            x in unit(), y in unit(), alpha in 0i64..=10,
        ) {
            let acts = pays.iter().enumerate().map(|(i, (a, b))| Act::new(format!("a{i}"), q(*a, 3), q(*b, 5))).collect();
            let m = Menu::new("M", acts).unwrap();
            let al = q(alpha, 10);
            let mid = al.clone() * &x + (q(1, 1) - &al) * &y;
            let lhs = indirect_utility(&m, &mid).unwrap();
            let rhs = al.clone() * indirect_utility(&m, &x).unwrap() + (q(1, 1) - &al) * indirect_utility(&m, &y).unwrap();
            prop_assert!(lhs <= rhs);
            let v = indirect_utility(&m, &x).unwrap();
            prop_assert!(m.acts.iter().all(|a| utility(a, &x).unwrap() <= v));
            prop_assert!(m.acts.iter().any(|a| utility(a, &x).unwrap() == v));
        }
    }
}
