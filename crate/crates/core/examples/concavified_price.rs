//! The same menu under the concave hull of the cost derivative: full
//! revelation at the extremes, pooling in the middle, and a price function
//! that strictly beats the old optimum.
//!
//!     cargo run --example concavified_price

use pmsep::forward::{solve_forward, ForwardProblem};
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
    let hull = PiecewiseFunction::from_points(&[(q(0, 1), q(-1, 36)), (q(1, 6), q(0, 1)), (q(5, 6), q(0, 1)), (q(1, 1), q(-1, 36))])?;
    let problem = ForwardProblem::new(prior, menu, hull)?;
    let sol = solve_forward(&problem)?;

    let atoms: Vec<String> = sol.f_star.atoms().iter().map(|(z, p)| format!("({z}, {p})")).collect();
    println!("optimal posterior means: {}", atoms.join(" "));
    println!("value: {}", sol.value);
    println!("price function: {}", sol.price);

    let z = q(1, 6);
    let price = sol.price.eval(&z)?;
    let gross = problem.gross_value(&z);
    println!("at z = 1/6: price {price} vs payoff plus cost {gross} (strictly above: {})", price.compare(&gross).is_gt());
    Ok(())
}
