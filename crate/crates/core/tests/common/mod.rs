//! Random instances for the property and acceptance suites.

#![allow(dead_code)]

use pmsep::model::{Act, Menu, Prior, StateSpace};
use pmsep::piecewise::PiecewiseFunction;
use pmsep::{Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub struct Instance {
    pub space: StateSpace<Rational>,
    pub prior: Prior<Rational>,
    pub menus: Vec<Menu<Rational>>,
    pub cost: PiecewiseFunction<Rational>,
}

/// Distinct sorted values `k / den` with `k` in `1..den`.
fn interior(rng: &mut ChaCha8Rng, count: usize, den: i64) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let x = q(rng.gen_range(1..den), den);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort();
    out
}

/// Random concave piecewise-linear function with at most `max_kinks` kinks.
pub fn concave_cost(rng: &mut ChaCha8Rng, max_kinks: usize) -> PiecewiseFunction<Rational> {
    let count = rng.gen_range(0..=max_kinks);
    let kinks = interior(rng, count, 24);
    let mut xs = vec![q(0, 1)];
    xs.extend(kinks);
    xs.push(q(1, 1));
    let mut slope = q(rng.gen_range(-4..5), 2);
    let mut y = q(rng.gen_range(-4..5), 4);
    let mut points = vec![(xs[0].clone(), y.clone())];
    for w in xs.windows(2) {
        y = y + slope.clone() * (w[1].clone() - &w[0]);
        points.push((w[1].clone(), y.clone()));
        slope = slope - q(rng.gen_range(1..6), 2);
    }
    PiecewiseFunction::from_points(&points).unwrap()
}

pub fn instance(seed: u64, max_states: usize, max_menus: usize, max_acts: usize, max_kinks: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_states = rng.gen_range(2..=max_states);
    let mut states = vec![q(0, 1)];
    states.extend(interior(&mut rng, n_states - 2, 12));
    states.push(q(1, 1));
    let weights: Vec<i64> = (0..n_states).map(|_| rng.gen_range(1..6)).collect();
    let total: i64 = weights.iter().sum();
    let prior = Prior::new("F0", weights.iter().map(|w| q(*w, total)).collect());
    let menus = (0..rng.gen_range(1..=max_menus))
        .map(|m| {
            let acts = (0..rng.gen_range(1..=max_acts))
                .map(|a| Act::new(format!("a{a}"), q(rng.gen_range(-8..9), 8), q(rng.gen_range(-8..9), 8)))
                .collect();
            Menu::new(format!("M{m}"), acts).unwrap()
        })
        .collect();
    Instance {
        space: StateSpace::new(states).unwrap(),
        prior,
        menus,
        cost: concave_cost(&mut rng, max_kinks),
    }
}
