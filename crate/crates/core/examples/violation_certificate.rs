//! A dataset where the high-stakes decision is made uninformed while the
//! low-stakes one is fully informed. No cost rationalizes it; the
//! certificate shows the improving swap.
//!
//!     cargo run --example violation_certificate

use pmsep::axioms::{check_nias, check_nipmc, explain_violation, NipmcVerdict};
use pmsep::model::{Act, Dataset, Menu, Observation, Prior, PriorMode, StateSpace};
use pmsep::{Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn main() -> pmsep::Result<()> {
    let one = q(1, 1);
    let zero = q(0, 1);
    let data = Dataset {
        state_space: StateSpace::new(vec![zero.clone(), one.clone()])?,
        priors: vec![Prior::new("p", vec![q(1, 2), q(1, 2)])],
        menus: vec![
            Menu::new("high", vec![Act::new("h0", one.clone(), zero.clone()), Act::new("h1", zero.clone(), one.clone())])?,
            Menu::new("low", vec![Act::new("l0", q(1, 10), zero.clone()), Act::new("l1", zero.clone(), q(1, 10))])?,
        ],
        observations: vec![
            Observation {
                prior: 0,
                menu: 0,
                sigma: vec![vec![one.clone(), one.clone()], vec![zero.clone(), zero.clone()]],
            },
            Observation {
                prior: 0,
                menu: 1,
                sigma: vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
            },
        ],
        mode: PriorMode::Single,
    };

    println!("NIAS holds: {}", check_nias(&data)?.passed());
    let verdict = check_nipmc(&data)?;
    if let NipmcVerdict::Fail { certificate, .. } = &verdict {
        let nonzero = certificate.iter().filter(|y| !y.is_zero()).count();
        println!("NIPMC fails; certificate uses {nonzero} of {} rows", certificate.len());
    }
    print!("{}", explain_violation(&verdict, &data)?);
    Ok(())
}
