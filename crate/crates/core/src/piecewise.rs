//! Continuous piecewise functions on `[0, 1]` with affine or quadratic pieces.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{domain, structure, Result};
use crate::model::check_unit;
use crate::revealed::DiscreteCdf;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Segment<S> {
    Affine { slope: S, intercept: S },
    /// `a z^2 + b z + c`
    Quadratic { a: S, b: S, c: S },
}

impl<S: Scalar> Segment<S> {
    fn coefficients(&self) -> (S, S, S) {
        match self {
            Segment::Affine { slope, intercept } => (S::zero(), slope.clone(), intercept.clone()),
            Segment::Quadratic { a, b, c } => (a.clone(), b.clone(), c.clone()),
        }
    }

    fn from_coefficients(a: S, b: S, c: S) -> Self {
        if a.is_zero() {
            Segment::Affine { slope: b, intercept: c }
        } else {
            Segment::Quadratic { a, b, c }
        }
    }

    pub fn eval(&self, z: &S) -> S {
        match self {
            Segment::Affine { slope, intercept } => slope.clone() * z + intercept,
            Segment::Quadratic { a, b, c } => (a.clone() * z + b) * z + c,
        }
    }

    pub fn derivative(&self, z: &S) -> S {
        match self {
            Segment::Affine { slope, .. } => slope.clone(),
            Segment::Quadratic { a, b, .. } => S::from_integer(2) * a.clone() * z + b,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Segment::Affine { .. })
    }

    fn same_as(&self, other: &Self) -> bool {
        let (a0, b0, c0) = self.coefficients();
        let (a1, b1, c1) = other.coefficients();
        a0.compare(&a1).is_eq() && b0.compare(&b1).is_eq() && c0.compare(&c1).is_eq()
    }
}

/// Continuous function on `[0, 1]`: `segments[i]` applies on
/// `[breaks[i], breaks[i + 1]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFunction<S> {
    breaks: Vec<S>,
    segments: Vec<Segment<S>>,
}

impl<S: Scalar> PiecewiseFunction<S> {
    pub fn new(breaks: Vec<S>, segments: Vec<Segment<S>>) -> Result<Self> {
        if breaks.len() < 2 || segments.len() + 1 != breaks.len() {
            return Err(structure(format!(
                "{} breakpoints cannot carry {} segments",
                breaks.len(),
                segments.len()
            )));
        }
        if !breaks[0].is_zero() || !breaks[breaks.len() - 1].compare(&S::one()).is_eq() {
            return Err(domain("breakpoints must start at 0 and end at 1"));
        }
        for w in breaks.windows(2) {
            if !w[0].compare(&w[1]).is_lt() {
                return Err(domain(format!("breakpoints not increasing at {}", w[1])));
            }
        }
        for i in 1..segments.len() {
            let left = segments[i - 1].eval(&breaks[i]);
            let right = segments[i].eval(&breaks[i]);
            if !left.compare(&right).is_eq() {
                return Err(domain(format!(
                    "discontinuity at {}: {left} from the left, {right} from the right",
                    breaks[i]
                )));
            }
        }
        Ok(PiecewiseFunction { breaks, segments })
    }

    pub fn constant(v: S) -> Self {
        Self::affine(S::zero(), v)
    }

    pub fn affine(slope: S, intercept: S) -> Self {
        PiecewiseFunction {
            breaks: vec![S::zero(), S::one()],
            segments: vec![Segment::Affine { slope, intercept }],
        }
    }

    pub fn quadratic(a: S, b: S, c: S) -> Self {
        PiecewiseFunction {
            breaks: vec![S::zero(), S::one()],
            segments: vec![Segment::from_coefficients(a, b, c)],
        }
    }

    /// Linear interpolation through `(x, y)` points whose first `x` is 0 and
    /// last is 1.
    pub fn from_points(points: &[(S, S)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(structure("need at least two points"));
        }
        let breaks: Vec<S> = points.iter().map(|(x, _)| x.clone()).collect();
        for w in breaks.windows(2) {
            if !w[0].compare(&w[1]).is_lt() {
                return Err(domain(format!("points not increasing at x = {}", w[1])));
            }
        }
        let segments = points
            .windows(2)
            .map(|w| {
                let slope = (w[1].1.clone() - &w[0].1) / (w[1].0.clone() - &w[0].0);
                let intercept = w[0].1.clone() - slope.clone() * &w[0].0;
                Segment::Affine { slope, intercept }
            })
            .collect();
        Self::new(breaks, segments)
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breaks
    }

    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    pub fn is_piecewise_linear(&self) -> bool {
        self.segments.iter().all(Segment::is_affine)
    }

    fn segment_index(&self, z: &S) -> usize {
        let k = self.breaks[1..self.breaks.len() - 1]
            .iter()
            .take_while(|b| b.compare(z).is_le())
            .count();
        k.min(self.segments.len() - 1)
    }

    pub fn eval(&self, z: &S) -> Result<S> {
        check_unit(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_unchecked(&self, z: &S) -> S {
        self.segments[self.segment_index(z)].eval(z)
    }

    /// Segment slopes left to right; `None` if a piece is quadratic.
    pub fn slopes(&self) -> Option<Vec<S>> {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Affine { slope, .. } => Some(slope.clone()),
                Segment::Quadratic { .. } => None,
            })
            .collect()
    }

    /// `(x, f(x))` at every breakpoint.
    pub fn table(&self) -> Vec<(S, S)> {
        self.breaks
            .iter()
            .map(|x| (x.clone(), self.eval_unchecked(x)))
            .collect()
    }

    /// Interior breakpoints where the derivative jumps.
    pub fn kinks(&self) -> Vec<S> {
        (1..self.segments.len())
            .filter(|&i| {
                let x = &self.breaks[i];
                !self.segments[i - 1].derivative(x).compare(&self.segments[i].derivative(x)).is_eq()
            })
            .map(|i| self.breaks[i].clone())
            .collect()
    }

    /// Drops breakpoints between identical pieces.
    pub fn simplified(&self) -> Self {
        let mut breaks = vec![self.breaks[0].clone()];
        let mut segments: Vec<Segment<S>> = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            match segments.last() {
                Some(prev) if prev.same_as(seg) => {
                    *breaks.last_mut().expect("nonempty") = self.breaks[i + 1].clone();
                }
                _ => {
                    segments.push(seg.clone());
                    breaks.push(self.breaks[i + 1].clone());
                }
            }
        }
        PiecewiseFunction { breaks, segments }
    }

    fn merged_breaks(&self, other: &Self) -> Vec<S> {
        let mut all: Vec<S> = self.breaks.iter().chain(&other.breaks).cloned().collect();
        sort_dedup(&mut all);
        all
    }

    fn zip_with(&self, other: &Self, op: impl Fn((S, S, S), (S, S, S)) -> (S, S, S)) -> Self {
        let breaks = self.merged_breaks(other);
        let segments = breaks
            .windows(2)
            .map(|w| {
                let mid = (w[0].clone() + &w[1]) / S::from_integer(2);
                let l = self.segments[self.segment_index(&mid)].coefficients();
                let r = other.segments[other.segment_index(&mid)].coefficients();
                let (a, b, c) = op(l, r);
                Segment::from_coefficients(a, b, c)
            })
            .collect();
        PiecewiseFunction { breaks, segments }.simplified()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |(a0, b0, c0), (a1, b1, c1)| (a0 + a1, b0 + b1, c0 + c1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |(a0, b0, c0), (a1, b1, c1)| (a0 - a1, b0 - b1, c0 - c1))
    }

    pub fn scale(&self, k: &S) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let (a, b, c) = s.coefficients();
                Segment::from_coefficients(a * k, b * k, c * k)
            })
            .collect();
        PiecewiseFunction {
            breaks: self.breaks.clone(),
            segments,
        }
        .simplified()
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// Adds `slope * z + intercept`.
    pub fn add_affine(&self, slope: &S, intercept: &S) -> Self {
        self.add(&Self::affine(slope.clone(), intercept.clone()))
    }

    /// Pointwise minimum of piecewise-linear functions.
    pub fn lower_envelope(fns: &[Self]) -> Result<Self> {
        envelope(fns, Ordering::Less)
    }

    /// Pointwise maximum of piecewise-linear functions.
    pub fn upper_envelope(fns: &[Self]) -> Result<Self> {
        envelope(fns, Ordering::Greater)
    }

    /// Exact minimum over `[0, 1]` and a point attaining it.
    pub fn minimum(&self) -> (S, S) {
        let mut best: Option<(S, S)> = None;
        for (i, seg) in self.segments.iter().enumerate() {
            let mut candidates = vec![self.breaks[i].clone(), self.breaks[i + 1].clone()];
            if let Segment::Quadratic { a, b, .. } = seg {
                if a.is_positive() {
                    let v = -b.clone() / (S::from_integer(2) * a.clone());
                    if self.breaks[i].compare(&v).is_lt() && v.compare(&self.breaks[i + 1]).is_lt() {
                        candidates.push(v);
                    }
                }
            }
            for x in candidates {
                let y = seg.eval(&x);
                if best.as_ref().map_or(true, |(_, by)| y.compare(by).is_lt()) {
                    best = Some((x, y));
                }
            }
        }
        let (x, y) = best.expect("at least one segment");
        (y, x)
    }

    pub fn maximum(&self) -> (S, S) {
        let (v, x) = self.neg().minimum();
        (-v, x)
    }

    /// `sum_z p(z) f(z)` over the atoms of `cdf`.
    pub fn integrate(&self, cdf: &DiscreteCdf<S>) -> S {
        cdf.atoms()
            .iter()
            .fold(S::zero(), |acc, (z, p)| acc + self.eval_unchecked(z) * p)
    }

    /// Concave pieces with derivative jumps that never go up.
    pub fn is_concave(&self) -> bool {
        self.curvature_ok(Ordering::Less)
    }

    pub fn is_convex(&self) -> bool {
        self.curvature_ok(Ordering::Greater)
    }

    fn curvature_ok(&self, dir: Ordering) -> bool {
        let pieces_ok = self.segments.iter().all(|s| match s {
            Segment::Affine { .. } => true,
            Segment::Quadratic { a, .. } => a.sign() == dir || a.is_zero(),
        });
        pieces_ok
            && (1..self.segments.len()).all(|i| {
                let x = &self.breaks[i];
                let jump = self.segments[i].derivative(x) - self.segments[i - 1].derivative(x);
                jump.is_zero() || jump.sign() == dir
            })
    }

    /// Smallest derivative increase across kinks (negative if not convex).
    pub fn min_slope_increase(&self) -> S {
        (1..self.segments.len())
            .map(|i| {
                let x = &self.breaks[i];
                self.segments[i].derivative(x) - self.segments[i - 1].derivative(x)
            })
            .fold(None, |acc: Option<S>, v| match acc {
                Some(a) if a.compare(&v).is_le() => Some(a),
                _ => Some(v),
            })
            .unwrap_or_else(S::zero)
    }
}

fn sort_dedup<S: Scalar>(v: &mut Vec<S>) {
    v.sort_by(|a, b| a.compare(b));
    v.dedup_by(|a, b| a.compare(b).is_eq());
}

fn envelope<S: Scalar>(fns: &[PiecewiseFunction<S>], keep: Ordering) -> Result<PiecewiseFunction<S>> {
    if fns.is_empty() {
        return Err(structure("envelope of no functions"));
    }
    if fns.iter().any(|f| !f.is_piecewise_linear()) {
        return Err(domain("envelopes are computed for piecewise-linear functions only"));
    }
    let mut grid: Vec<S> = fns.iter().flat_map(|f| f.breaks.iter().cloned()).collect();
    sort_dedup(&mut grid);
    let two = S::from_integer(2);
    let mut breaks = vec![S::zero()];
    let mut segments = Vec::new();
    for w in grid.windows(2) {
        let mid = (w[0].clone() + &w[1]) / &two;
        let mut lines: Vec<(S, S)> = fns
            .iter()
            .map(|f| match &f.segments[f.segment_index(&mid)] {
                Segment::Affine { slope, intercept } => (slope.clone(), intercept.clone()),
                Segment::Quadratic { .. } => unreachable!("checked above"),
            })
            .collect();
        lines.sort_by(|a, b| a.0.compare(&b.0).then(a.1.compare(&b.1)));
        lines.dedup_by(|a, b| a.0.compare(&b.0).is_eq() && a.1.compare(&b.1).is_eq());
        let mut cuts = vec![w[0].clone(), w[1].clone()];
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let ds = lines[i].0.clone() - &lines[j].0;
                if ds.is_zero() {
                    continue;
                }
                let x = (lines[j].1.clone() - &lines[i].1) / ds;
                if w[0].compare(&x).is_lt() && x.compare(&w[1]).is_lt() {
                    cuts.push(x);
                }
            }
        }
        sort_dedup(&mut cuts);
        for c in cuts.windows(2) {
            let m = (c[0].clone() + &c[1]) / &two;
            let mut best = 0;
            let mut best_val = lines[0].0.clone() * &m + &lines[0].1;
            for (k, (s, b)) in lines.iter().enumerate().skip(1) {
                let v = s.clone() * &m + b;
                if v.compare(&best_val) == keep {
                    best = k;
                    best_val = v;
                }
            }
            breaks.push(c[1].clone());
            segments.push(Segment::Affine {
                slope: lines[best].0.clone(),
                intercept: lines[best].1.clone(),
            });
        }
    }
    Ok(PiecewiseFunction { breaks, segments }.simplified())
}

fn fmt_poly<S: Scalar>(f: &mut fmt::Formatter<'_>, seg: &Segment<S>) -> fmt::Result {
    let (a, b, c) = seg.coefficients();
    let mut terms = Vec::new();
    if !c.is_zero() || (a.is_zero() && b.is_zero()) {
        terms.push(c.to_string());
    }
    if !b.is_zero() {
        terms.push(format!("{b} z"));
    }
    if !a.is_zero() {
        terms.push(format!("{a} z^2"));
    }
    write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
}

impl<S: Scalar> fmt::Display for PiecewiseFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "[{}, {}]: ", self.breaks[i], self.breaks[i + 1])?;
            fmt_poly(f, seg)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn nonconcave_c() -> PiecewiseFunction<Rational> {
        PiecewiseFunction::new(
            vec![q(0, 1), q(1, 6), q(1, 2), q(5, 6), q(1, 1)],
            vec![
                Segment::Affine { slope: q(1, 6), intercept: q(-1, 36) },
                Segment::Affine { slope: q(-30, 1), intercept: q(5, 1) },
                Segment::Affine { slope: q(30, 1), intercept: q(-25, 1) },
                Segment::Affine { slope: q(-1, 6), intercept: q(5, 36) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn evaluation_and_continuity() {
        let c = nonconcave_c();
        assert_eq!(c.eval(&q(1, 6)).unwrap(), q(0, 1));
        assert_eq!(c.eval(&q(1, 2)).unwrap(), q(-10, 1));
        assert_eq!(c.eval(&q(1, 1)).unwrap(), q(-1, 36));
        assert!(c.eval(&q(2, 1)).is_err());
        let broken = PiecewiseFunction::new(
            vec![q(0, 1), q(1, 2), q(1, 1)],
            vec![
                Segment::Affine { slope: q(1, 1), intercept: q(0, 1) },
                Segment::Affine { slope: q(1, 1), intercept: q(1, 1) },
            ],
        );
        assert!(broken.is_err());
    }

    #[test]
    fn concavity_verdicts() {
        assert!(!nonconcave_c().is_concave());
        let tilde = PiecewiseFunction::from_points(&[
            (q(0, 1), q(-1, 36)),
            (q(1, 6), q(0, 1)),
            (q(5, 6), q(0, 1)),
            (q(1, 1), q(-1, 36)),
        ])
        .unwrap();
        assert!(tilde.is_concave());
        assert_eq!(tilde.slopes().unwrap(), vec![q(1, 6), q(0, 1), q(-1, 6)]);
        // -(z - 1/2)^2
        let quad = PiecewiseFunction::quadratic(q(-1, 1), q(1, 1), q(-1, 4));
        assert!(quad.is_concave());
        assert!(!quad.is_convex());
    }

    #[test]
    fn envelopes_and_kinks() {
        let acts = [
            PiecewiseFunction::affine(q(-1, 2), q(1, 4)),
            PiecewiseFunction::constant(q(1, 8)),
            PiecewiseFunction::affine(q(1, 2), q(-1, 4)),
        ];
        let phi = PiecewiseFunction::upper_envelope(&acts).unwrap();
        assert_eq!(phi.breakpoints(), &[q(0, 1), q(1, 4), q(3, 4), q(1, 1)]);
        assert_eq!(phi.kinks(), vec![q(1, 4), q(3, 4)]);
        assert!(phi.is_convex());
        let low = PiecewiseFunction::lower_envelope(&acts).unwrap();
        assert_eq!(low.eval(&q(1, 2)).unwrap(), q(0, 1));
        assert!(low.is_concave());
    }

    #[test]
    fn minimum_of_quadratic() {
        let f = PiecewiseFunction::quadratic(q(1, 1), q(-1, 1), q(0, 1));
        assert_eq!(f.minimum(), (q(-1, 4), q(1, 2)));
        let g = PiecewiseFunction::quadratic(q(-1, 1), q(0, 1), q(0, 1));
        assert_eq!(g.minimum(), (q(-1, 1), q(1, 1)));
    }

    #[test]
    fn display_pieces() {
        let f = PiecewiseFunction::from_points(&[(q(0, 1), q(2, 9)), (q(1, 3), q(1, 8)), (q(1, 1), q(1, 8))]).unwrap();
        assert_eq!(f.to_string(), "[0, 1/3]: 2/9 - 7/24 z; [1/3, 1]: 1/8");
    }

    fn pl() -> impl Strategy<Value = PiecewiseFunction<Rational>> {
        proptest::collection::vec(-20i64..20, 2..6).prop_map(|ys| {
            let k = ys.len() as i64 - 1;
            let pts: Vec<_> = ys.iter().enumerate().map(|(i, y)| (q(i as i64, k), q(*y, 3))).collect();
            PiecewiseFunction::from_points(&pts).unwrap()
        })
    }

    proptest! {
        #[test]
        fn envelope_is_pointwise(fs in proptest::collection::vec(pl(), 1..4), x in 0i64..=24) {
            let z = q(x, 24);
            let lo = PiecewiseFunction::lower_envelope(&fs).unwrap();
            let hi = PiecewiseFunction::upper_envelope(&fs).unwrap();
            let vals: Vec<_> = fs.iter().map(|f| f.eval(&z).unwrap()).collect();
            prop_assert_eq!(lo.eval(&z).unwrap(), vals.iter().min().unwrap().clone());
            prop_assert_eq!(hi.eval(&z).unwrap(), vals.iter().max().unwrap().clone());
        }

        #[test]
        fn arithmetic_is_pointwise(f in pl(), g in pl(), x in 0i64..=24) {
            let z = q(x, 24);
            prop_assert_eq!(f.add(&g).eval(&z).unwrap(), f.eval(&z).unwrap() + g.eval(&z).unwrap());
            prop_assert_eq!(f.sub(&g).eval(&z).unwrap(), f.eval(&z).unwrap() - g.eval(&z).unwrap());
            prop_assert_eq!(f.minimum().0, f.table().into_iter().map(|(_, y)| y).min().unwrap());
        }
    }
}
