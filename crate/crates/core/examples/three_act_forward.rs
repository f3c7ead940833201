//! Optimal information for a three-act menu under a nonconcave cost
//! derivative, with the price function and an independent grid check.
//!
//!     cargo run --example three_act_forward

use pmsep::forward::{oracle_value, solve_forward, ForwardProblem};
use pmsep::model::{Act, Menu};
use pmsep::piecewise::PiecewiseFunction;
use pmsep::revealed::DiscreteCdf;
use pmsep::{Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pmsep::Result<()> {
    let prior = DiscreteCdf::new(vec![(q(0, 1), q(1, 4)), (q(1, 3), q(1, 4)), (q(2, 3), q(1, 4)), (q(1, 1), q(1, 4))])?;
    let menu = Menu::new(
        "A",
        vec![
            Act::new("a1", q(1, 4), q(-1, 4)),
            Act::new("a2", q(1, 8), q(1, 8)),
            Act::new("a3", q(-1, 4), q(1, 4)),
        ],
    )?;
    let cost = PiecewiseFunction::from_points(&[
        (q(0, 1), q(-1, 36)),
        (q(1, 6), q(0, 1)),
        (q(1, 2), q(-10, 1)),
        (q(5, 6), q(0, 1)),
        (q(1, 1), q(-1, 36)),
    ])?;
    println!("cost derivative: {cost}");
    println!("concave: {}", cost.is_concave());

    let problem = ForwardProblem::new(prior, menu, cost)?;
    let sol = solve_forward(&problem)?;
    for ((z, p), a) in sol.f_star.atoms().iter().zip(&sol.acts) {
        println!("posterior mean {z} with probability {p}, act {}", problem.menu.acts[*a].id);
    }
    println!("value: {}", sol.value);
    println!("price function: {}", sol.price);

    let oracle = oracle_value(&problem, 101)?;
    println!("value on the grid i/100: {oracle} (equal: {})", oracle.compare(&sol.value).is_eq());
    Ok(())
}
