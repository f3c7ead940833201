//! The variance cost: total cost of a distribution of posterior means is
//! kappa times its spread around the prior mean, and with nothing at stake
//! the agent learns nothing.
//!
//!     cargo run --example variance_cost

use pmsep::forward::{solve_forward, ForwardProblem};
use pmsep::model::{Act, Menu};
use pmsep::recovery::{total_cost, variance_cost};
use pmsep::revealed::DiscreteCdf;
use pmsep::{Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pmsep::Result<()> {
    let prior = DiscreteCdf::new(vec![(q(0, 1), q(1, 3)), (q(1, 2), q(1, 3)), (q(1, 1), q(1, 3))])?;
    let kappa = q(3, 1);
    let c = variance_cost(&kappa, prior.mean())?;
    println!("c(z) = {c}");

    for f in [
        DiscreteCdf::point_mass(q(1, 2))?,
        DiscreteCdf::new(vec![(q(1, 4), q(1, 2)), (q(3, 4), q(1, 2))])?,
        prior.clone(),
    ] {
        let spread = f.second_moment_about(prior.mean());
        println!("C(F) = {} for spread {spread}", total_cost(&c, &f)?);
    }

    let idle = Menu::new("idle", vec![Act::new("wait", q(0, 1), q(0, 1))])?;
    let sol = solve_forward(&ForwardProblem::new(prior.clone(), idle, c.clone())?.refined(11))?;
    let atoms: Vec<String> = sol.f_star.atoms().iter().map(|(z, p)| format!("({z}, {p})")).collect();
    println!("no stakes: optimum {} with value {}", atoms.join(" "), sol.value);

    let bet = Menu::new("bet", vec![Act::new("down", q(1, 1), q(-1, 1)), Act::new("up", q(-1, 1), q(1, 1))])?;
    let sol = solve_forward(&ForwardProblem::new(prior, bet, c)?.refined(11))?;
    let atoms: Vec<String> = sol.f_star.atoms().iter().map(|(z, p)| format!("({z}, {p})")).collect();
    println!("with stakes: optimum {} with value {}", atoms.join(" "), sol.value);
    Ok(())
}
