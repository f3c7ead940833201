//! Small datasets shared by unit tests.

use crate::model::{Act, Dataset, Menu, Observation, Prior, PriorMode, StateSpace};
use crate::scalar::{Rational, Scalar};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub fn row(xs: &[(i64, i64)]) -> Vec<Rational> {
    xs.iter().map(|&(n, d)| q(n, d)).collect()
}

pub fn three_act_menu() -> Menu<Rational> {
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

pub fn space4() -> StateSpace<Rational> {
    StateSpace::new(row(&[(0, 1), (1, 3), (2, 3), (1, 1)])).unwrap()
}

/// The three-act optimum as data: states 0 and 1/3 choose `a1`, the rest `a3`.
pub fn three_act() -> Dataset<Rational> {
    Dataset {
        state_space: space4(),
        priors: vec![Prior::new("F0", vec![q(1, 4); 4])],
        menus: vec![three_act_menu()],
        observations: vec![Observation {
            prior: 0,
            menu: 0,
            sigma: vec![row(&[(1, 1), (1, 1), (0, 1), (0, 1)]), vec![q(0, 1); 4], row(&[(0, 1), (0, 1), (1, 1), (1, 1)])],
        }],
        mode: PriorMode::Single,
    }
}

fn binary_menu(id: &str, stakes: Rational) -> Menu<Rational> {
    Menu::new(
        id,
        vec![
            Act::new(format!("{id}0"), stakes.clone(), q(0, 1)),
            Act::new(format!("{id}1"), q(0, 1), stakes),
        ],
    )
    .unwrap()
}

/// Two states with equal prior; each observation is `(stakes, sigma)`.
pub fn binary(observations: &[(Rational, [[Rational; 2]; 2])]) -> Dataset<Rational> {
    let menus: Vec<_> = observations
        .iter()
        .enumerate()
        .map(|(i, (k, _))| binary_menu(&format!("m{i}"), k.clone()))
        .collect();
    Dataset {
        state_space: StateSpace::new(row(&[(0, 1), (1, 1)])).unwrap(),
        priors: vec![Prior::new("p", vec![q(1, 2), q(1, 2)])],
        menus,
        observations: observations
            .iter()
            .enumerate()
            .map(|(i, (_, s))| Observation {
                prior: 0,
                menu: i,
                sigma: s.iter().map(|r| r.to_vec()).collect(),
            })
            .collect(),
        mode: PriorMode::Single,
    }
}

pub fn uninformed() -> [[Rational; 2]; 2] {
    [[q(1, 1), q(1, 1)], [q(0, 1), q(0, 1)]]
}

pub fn revealing() -> [[Rational; 2]; 2] {
    [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]]
}

/// High stakes left uninformed, low stakes fully revealed.
pub fn binary_swap() -> Dataset<Rational> {
    binary(&[(q(1, 1), uninformed()), (q(1, 10), revealing())])
}

/// The consistent ordering: high stakes revealed, low stakes uninformed.
pub fn binary_consistent() -> Dataset<Rational> {
    binary(&[(q(1, 1), revealing()), (q(1, 10), uninformed())])
}
