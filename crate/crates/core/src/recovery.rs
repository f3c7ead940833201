//! Cost-derivative and price-function construction from feasible multipliers,
//! plus an independent audit of the optimality conditions.

use crate::axioms::{build_farkas_system, check_nias, solve_system, Lambda, LambdaSelection, NiasReport, NipmcVerdict};
use crate::error::{domain, structure, Result};
use crate::model::Dataset;
use crate::piecewise::{PiecewiseFunction, Segment};
use crate::revealed::{mpc_gap, prior_cdf, revealed_summary, DiscreteCdf};
use crate::scalar::{self, Scalar};

/// `L(z) = l(0) + sum_{z* > 0} l(z*) (z* - z)_+` for one observation's multipliers.
pub fn lambda_to_envelope<S: Scalar>(multipliers: &[(S, S)]) -> PiecewiseFunction<S> {
    let value = |z: &S| {
        multipliers.iter().fold(S::zero(), |acc, (zs, l)| {
            if zs.is_zero() {
                acc + l
            } else if z.compare(zs).is_lt() {
                acc + (zs.clone() - z) * l
            } else {
                acc
            }
        })
    };
    let mut xs: Vec<S> = multipliers
        .iter()
        .map(|(z, _)| z.clone())
        .chain([S::zero(), S::one()])
        .collect();
    xs.sort_by(|a, b| a.compare(b));
    xs.dedup_by(|a, b| a.compare(b).is_eq());
    let points: Vec<(S, S)> = xs.iter().map(|x| (x.clone(), value(x))).collect();
    PiecewiseFunction::from_points(&points)
        .expect("grid points start at 0, end at 1 and increase")
        .simplified()
}

/// Price function of observation `obs`.
pub fn price_function<S: Scalar>(lambda: &Lambda<S>, obs: usize) -> PiecewiseFunction<S> {
    lambda_to_envelope(&lambda.per_obs[obs])
}

/// `c(z) = min over observations A and acts a of A of [L_A(z) - u(a, z)]`.
pub fn recover_cost<S: Scalar>(data: &Dataset<S>, lambda: &Lambda<S>) -> Result<PiecewiseFunction<S>> {
    if lambda.per_obs.len() != data.len() {
        return Err(structure(format!(
            "multipliers for {} observations, dataset has {}",
            lambda.per_obs.len(),
            data.len()
        )));
    }
    let mut pieces = Vec::new();
    for obs in 0..data.len() {
        let envelope = price_function(lambda, obs);
        for act in &data.menu_of(obs).acts {
            pieces.push(envelope.add_affine(&-act.slope(), &-act.u0.clone()));
        }
    }
    PiecewiseFunction::lower_envelope(&pieces)
}

/// `c(z) = -kappa (z - z0)^2`.
pub fn variance_cost<S: Scalar>(kappa: &S, z0: &S) -> Result<PiecewiseFunction<S>> {
    if !kappa.is_positive() {
        return Err(domain(format!("variance cost needs kappa > 0, got {kappa}")));
    }
    if !z0.is_positive() || !z0.compare(&S::one()).is_lt() {
        return Err(domain(format!("prior mean {z0} must lie strictly inside (0, 1)")));
    }
    let two = S::from_integer(2);
    Ok(PiecewiseFunction::quadratic(
        -kappa.clone(),
        two * kappa.clone() * z0,
        -(kappa.clone() * z0 * z0),
    ))
}

/// Total cost `c(z0) - int c dF` of a distribution with mean `z0`.
pub fn total_cost<S: Scalar>(c: &PiecewiseFunction<S>, f: &DiscreteCdf<S>) -> Result<S> {
    Ok(c.eval(f.mean())? - c.integrate(f))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservationAudit<S> {
    pub price_convex: bool,
    /// Smallest slope increase across kinks of the price function.
    pub convex_slack: S,
    pub price_majorizes: bool,
    /// `min over z and acts of P(z) - u(a, z) - c(z)`.
    pub majorize_slack: S,
    pub contact_at_revealed: bool,
    /// Largest `|P - u - c|` at a chosen act's revealed mean.
    pub contact_slack: S,
    pub affine_off_binding: bool,
    /// Largest MPC gap at a kink of the price function.
    pub affine_slack: S,
    pub integral_match: bool,
    /// `int P dF_rev - int P dF0`.
    pub integral_slack: S,
}

impl<S: Scalar> ObservationAudit<S> {
    pub fn all_true(&self) -> bool {
        self.price_convex
            && self.price_majorizes
            && self.contact_at_revealed
            && self.affine_off_binding
            && self.integral_match
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalizationReport<S> {
    pub observations: Vec<ObservationAudit<S>>,
}

impl<S: Scalar> RationalizationReport<S> {
    pub fn all_true(&self) -> bool {
        self.observations.iter().all(ObservationAudit::all_true)
    }
}

fn max_of<S: Scalar>(xs: impl IntoIterator<Item = S>) -> S {
    xs.into_iter().fold(S::zero(), scalar::max)
}

/// Checks, from the raw data only, that each price function certifies the
/// revealed distribution as optimal under cost derivative `c`.
pub fn verify_rationalization<S: Scalar>(
    data: &Dataset<S>,
    c: &PiecewiseFunction<S>,
    prices: &[PiecewiseFunction<S>],
) -> Result<RationalizationReport<S>> {
    data.ensure_valid()?;
    if prices.len() != data.len() {
        return Err(structure(format!(
            "{} price functions for {} observations",
            prices.len(),
            data.len()
        )));
    }
    let mut observations = Vec::with_capacity(data.len());
    for (obs, price) in prices.iter().enumerate() {
        let menu = data.menu_of(obs);
        let summary = revealed_summary(data, obs)?;
        let f0 = prior_cdf(data, obs)?;

        let convex_slack = price.min_slope_increase();
        let price_convex = price.is_convex();

        let net = price.sub(c);
        let majorize_slack = menu
            .acts
            .iter()
            .map(|a| net.add_affine(&-a.slope(), &-a.u0.clone()).minimum().0)
            .reduce(scalar::min)
            .expect("menus are nonempty");
        let price_majorizes = !majorize_slack.is_negative();

        let contact_slack = max_of(summary.chosen_acts().map(|a| {
            let z = &summary.act_means[a];
            (price.eval_unchecked(z) - menu.acts[a].utility_unchecked(z) - c.eval_unchecked(z)).abs()
        }));
        let contact_at_revealed = contact_slack.is_zero();

        let gap = |z: &S| mpc_gap(&f0, &summary.cdf, z);
        let mut affine_slack = max_of(price.kinks().iter().map(gap));
        let br = price.breakpoints();
        for (i, seg) in price.segments().iter().enumerate() {
            if let Segment::Quadratic { .. } = seg {
                let mid = (br[i].clone() + &br[i + 1]) / S::from_integer(2);
                affine_slack = scalar::max(affine_slack, gap(&mid));
            }
        }
        let affine_off_binding = affine_slack.is_zero();

        let integral_slack = price.integrate(&summary.cdf) - price.integrate(&f0);
        let integral_match = integral_slack.is_zero();

        observations.push(ObservationAudit {
            price_convex,
            convex_slack,
            price_majorizes,
            majorize_slack,
            contact_at_revealed,
            contact_slack,
            affine_off_binding,
            affine_slack,
            integral_match,
            integral_slack,
        });
    }
    Ok(RationalizationReport { observations })
}

/// A rationalizing cost derivative with its price functions and audit.
#[derive(Clone, Debug)]
pub struct Rationalization<S> {
    pub lambda: Lambda<S>,
    pub cost: PiecewiseFunction<S>,
    pub prices: Vec<PiecewiseFunction<S>>,
    pub audit: RationalizationReport<S>,
}

#[derive(Clone, Debug)]
pub enum Recovery<S> {
    Rationalized(Rationalization<S>),
    NiasFailed(NiasReport<S>),
    NipmcFailed(NipmcVerdict<S>),
}

/// Builds the cost and price functions from multipliers and audits them.
pub fn rationalization_from_lambda<S: Scalar>(data: &Dataset<S>, lambda: Lambda<S>) -> Result<Rationalization<S>> {
    let cost = recover_cost(data, &lambda)?;
    let prices: Vec<_> = (0..data.len()).map(|obs| price_function(&lambda, obs)).collect();
    let audit = verify_rationalization(data, &cost, &prices)?;
    Ok(Rationalization {
        lambda,
        cost,
        prices,
        audit,
    })
}

/// Runs both axiom checks and, when they pass, recovers and audits a cost.
pub fn recover<S: Scalar>(data: &Dataset<S>, selection: LambdaSelection) -> Result<Recovery<S>> {
    let nias = check_nias(data)?;
    if !nias.passed() {
        return Ok(Recovery::NiasFailed(nias));
    }
    let system = build_farkas_system(data)?;
    match solve_system(&system, selection)? {
        NipmcVerdict::Pass { lambda } => Ok(Recovery::Rationalized(rationalization_from_lambda(data, lambda)?)),
        fail => Ok(Recovery::NipmcFailed(fail)),
    }
}
