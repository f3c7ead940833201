//! Why moving posterior means between menus is not enough: under a prior
//! with mass only at 0 and 1, pooling at 1/2 is feasible but worse than
//! revealing everything.
//!
//!     cargo run --example reallocation

use pmsep::forward::{solve_forward, ForwardProblem};
use pmsep::model::{Act, Menu};
use pmsep::piecewise::PiecewiseFunction;
use pmsep::revealed::{is_mpc, DiscreteCdf};
use pmsep::{Rational, Scalar};

fn d(s: &str) -> Rational {
    Rational::parse_str(s).expect("literal")
}

fn main() -> pmsep::Result<()> {
    // With a single zero-payoff act the cost derivative is the whole
    // objective.
    let menu = Menu::new("A1", vec![Act::new("stay", d("0"), d("0"))])?;
    let gross = PiecewiseFunction::from_points(&[(d("0"), d("2")), (d("0.3"), d("1")), (d("0.5"), d("1.02")), (d("0.7"), d("1")), (d("1"), d("2"))])?;

    let prior = DiscreteCdf::new(vec![(d("0"), d("0.49")), (d("0.4"), d("0.01")), (d("0.6"), d("0.01")), (d("1"), d("0.49"))])?;
    let sol = solve_forward(&ForwardProblem::new(prior, menu.clone(), gross.clone())?)?;
    println!("four-state prior:");
    for (z, p) in sol.f_star.atoms() {
        println!("  mean {z} with probability {p}");
    }
    println!("  value {} = {}", sol.value, sol.value.to_f64());

    let two_point = DiscreteCdf::new(vec![(d("0"), d("0.5")), (d("1"), d("0.5"))])?;
    let pooled = DiscreteCdf::point_mass(d("0.5"))?;
    let problem = ForwardProblem::new(two_point.clone(), menu, gross)?;
    let best = solve_forward(&problem)?;
    println!("two-point prior:");
    println!("  pooling at 1/2 is feasible: {}", is_mpc(&two_point, &pooled));
    println!("  pooling value {}", problem.objective(&pooled));
    println!("  optimal value {} (full revelation)", best.value);
    Ok(())
}
