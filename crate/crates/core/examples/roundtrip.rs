//! Generate choice data from a known concave cost derivative, test it,
//! recover a cost derivative from it, and confirm the recovered one makes
//! the observed behavior optimal.
//!
//!     cargo run --example roundtrip

use pmsep::axioms::{check_nias, check_nipmc, LambdaSelection};
use pmsep::forward::{generate_dataset, solve_forward, ForwardProblem, TieBreak};
use pmsep::model::{Act, Menu, Prior, StateSpace};
use pmsep::piecewise::PiecewiseFunction;
use pmsep::recovery::{recover, Recovery};
use pmsep::revealed::{prior_cdf, revealed_summary};
use pmsep::{Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pmsep::Result<()> {
    let space = StateSpace::new(vec![q(0, 1), q(1, 4), q(1, 2), q(3, 4), q(1, 1)])?;
    let prior = Prior::new("F0", vec![q(1, 5); 5]);
    let menus = vec![
        Menu::new("bet", vec![Act::new("down", q(1, 1), q(-1, 1)), Act::new("up", q(-1, 1), q(1, 1))])?,
        Menu::new(
            "hedge",
            vec![
                Act::new("down", q(1, 4), q(-1, 4)),
                Act::new("safe", q(1, 10), q(1, 10)),
                Act::new("up", q(-1, 4), q(1, 4)),
            ],
        )?,
    ];
    let true_cost = PiecewiseFunction::from_points(&[(q(0, 1), q(0, 1)), (q(1, 3), q(1, 6)), (q(2, 3), q(1, 6)), (q(1, 1), q(0, 1))])?;
    println!("true cost derivative: {true_cost}");

    let data = generate_dataset(&space, &prior, &menus, &true_cost, TieBreak::LowestIndex)?;
    for obs in 0..data.len() {
        let s = revealed_summary(&data, obs)?;
        let atoms: Vec<String> = s.cdf.atoms().iter().map(|(z, p)| format!("({z}, {p})")).collect();
        println!("{}: revealed means {}", data.observation_label(obs), atoms.join(" "));
    }
    println!("NIAS: {}, NIPMC: {}", check_nias(&data)?.passed(), check_nipmc(&data)?.passed());

    let Recovery::Rationalized(r) = recover(&data, LambdaSelection::Flattest)? else {
        unreachable!("generated data is rationalizable");
    };
    println!("recovered cost derivative: {}", r.cost);
    println!("audit all true: {}", r.audit.all_true());
    for obs in 0..data.len() {
        let problem = ForwardProblem::new(prior_cdf(&data, obs)?, data.menu_of(obs).clone(), r.cost.clone())?;
        let best = solve_forward(&problem)?.value;
        let observed = problem.objective(&revealed_summary(&data, obs)?.cdf);
        println!("{}: optimum {best}, observed behavior {observed}", data.observation_label(obs));
    }
    Ok(())
}
