//! Search for a concave rationalizing cost derivative, one linear program
//! per assignment of observations to states.
//!
//!     cargo run --example concavity_certificate

use pmsep::concavity::{assignment_count, certify_concave, ConcavityStatus, DEFAULT_BUDGET};
use pmsep::forward::{generate_dataset, TieBreak};
use pmsep::model::{Act, Menu, Prior, StateSpace};
use pmsep::piecewise::PiecewiseFunction;
use pmsep::{Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pmsep::Result<()> {
    let space = StateSpace::new(vec![q(0, 1), q(1, 3), q(2, 3), q(1, 1)])?;
    let prior = Prior::new("F0", vec![q(1, 6), q(1, 3), q(1, 3), q(1, 6)]);
    let menus = vec![
        Menu::new("A", vec![Act::new("l", q(1, 2), q(-1, 2)), Act::new("r", q(-1, 2), q(1, 2))])?,
        Menu::new("B", vec![Act::new("l", q(1, 8), q(0, 1)), Act::new("r", q(0, 1), q(1, 8))])?,
    ];
    let cost = PiecewiseFunction::from_points(&[(q(0, 1), q(-1, 4)), (q(1, 2), q(0, 1)), (q(1, 1), q(-1, 4))])?;
    let data = generate_dataset(&space, &prior, &menus, &cost, TieBreak::LowestIndex)?;

    println!("{} assignments to try", assignment_count(data.len(), data.state_space.len()));
    let verdict = certify_concave(&data, DEFAULT_BUDGET)?;
    println!("programs solved: {}", verdict.programs_solved);
    match verdict.status {
        ConcavityStatus::Certified { assignment, cost, audit, .. } => {
            for (z, obs) in data.state_space.states.iter().zip(&assignment) {
                println!("  state {z}: minimum attained by {}", data.observation_label(*obs));
            }
            println!("concave cost derivative: {cost}");
            println!("concave: {}, audit all true: {}", cost.is_concave(), audit.all_true());
        }
        ConcavityStatus::Undetermined => println!("no assignment works; concavity not established"),
        ConcavityStatus::BudgetExceeded => println!("budget exhausted"),
    }
    Ok(())
}
