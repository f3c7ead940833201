//! Linear programming kernel: two-phase tableau simplex with Bland's rule.
//!
//! Solutions, dual prices and infeasibility certificates are all read off
//! the final tableau, so in rational mode every reported number is exact and
//! can be checked by direct multiplication ([`LinearProgram::check_primal`],
//! [`LinearProgram::verify_certificate`]).
//!
//! Sign conventions for the row multipliers `y` reported by [`solve`]:
//!
//! * infeasible: `y_r >= 0` on `<=` rows, `y_r <= 0` on `>=` rows, free on `=`
//!   rows; `(A^T y)_j >= 0` for nonnegative variables and `= 0` for free ones;
//!   `b . y < 0`.
//! * optimal, maximize: same row signs as above, `A^T y >= c` (`=` on free
//!   variables) and `b . y` equals the optimum.
//! * optimal, minimize: row signs reversed, `A^T y <= c` and `b . y` equals
//!   the optimum.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_PIVOT_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarSign {
    Free,
    NonNegative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
pub struct Constraint<S> {
    /// Sparse coefficients, sorted by variable index, no zero entries.
    pub coeffs: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

#[derive(Clone, Debug)]
pub struct Objective<S> {
    pub sense: Sense,
    pub coeffs: Vec<(usize, S)>,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<S> {
    signs: Vec<VarSign>,
    names: Vec<String>,
    rows: Vec<Constraint<S>>,
    objective: Option<Objective<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpOutcome<S> {
    pub status: LpStatus,
    /// Present for `Optimal` and `Feasible`.
    pub primal: Option<Vec<S>>,
    pub objective_value: Option<S>,
    /// Row multipliers certifying optimality (`Optimal` only).
    pub duals: Option<Vec<S>>,
    /// Farkas multipliers (`Infeasible` only).
    pub certificate: Option<Vec<S>>,
    pub pivots: u64,
}

impl<S: Scalar> Default for LinearProgram<S> {
    fn default() -> Self {
        Self::new()
    }
}

fn normalize<S: Scalar>(n_vars: usize, coeffs: Vec<(usize, S)>) -> Result<Vec<(usize, S)>> {
    let mut coeffs = coeffs;
    if let Some((j, _)) = coeffs.iter().find(|(j, _)| *j >= n_vars) {
        return Err(Error::Structure(format!(
            "coefficient index {j} out of range for {n_vars} variables"
        )));
    }
    coeffs.sort_by_key(|(j, _)| *j);
    let mut out: Vec<(usize, S)> = Vec::with_capacity(coeffs.len());
    for (j, v) in coeffs {
        match out.last_mut() {
            Some((k, acc)) if *k == j => *acc += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    Ok(out)
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new() -> Self {
        LinearProgram {
            signs: Vec::new(),
            names: Vec::new(),
            rows: Vec::new(),
            objective: None,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, sign: VarSign) -> usize {
        self.signs.push(sign);
        self.names.push(name.into());
        self.signs.len() - 1
    }

    /// Adds a row; duplicate indices are summed and zero entries dropped.
    pub fn add_row(&mut self, coeffs: Vec<(usize, S)>, relation: Relation, rhs: S) -> Result<usize> {
        let coeffs = normalize(self.signs.len(), coeffs)?;
        self.rows.push(Constraint { coeffs, relation, rhs });
        Ok(self.rows.len() - 1)
    }

    pub fn set_objective(&mut self, sense: Sense, coeffs: Vec<(usize, S)>) -> Result<()> {
        let coeffs = normalize(self.signs.len(), coeffs)?;
        self.objective = Some(Objective { sense, coeffs });
        Ok(())
    }

    pub fn clear_objective(&mut self) {
        self.objective = None;
    }

    pub fn num_vars(&self) -> usize {
        self.signs.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn signs(&self) -> &[VarSign] {
        &self.signs
    }

    pub fn var_name(&self, j: usize) -> &str {
        &self.names[j]
    }

    pub fn rows(&self) -> &[Constraint<S>] {
        &self.rows
    }

    pub fn objective(&self) -> Option<&Objective<S>> {
        self.objective.as_ref()
    }

    pub fn row_activity(&self, r: usize, x: &[S]) -> S {
        self.rows[r]
            .coeffs
            .iter()
            .fold(S::zero(), |acc, (j, a)| acc + a.clone() * &x[*j])
    }

    pub fn objective_at(&self, x: &[S]) -> S {
        match &self.objective {
            None => S::zero(),
            Some(obj) => obj
                .coeffs
                .iter()
                .fold(S::zero(), |acc, (j, c)| acc + c.clone() * &x[*j]),
        }
    }

    /// `A^T y` as a dense vector over the variables.
    pub fn transpose_times(&self, y: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.num_vars()];
        for (row, yr) in self.rows.iter().zip(y) {
            if yr.is_zero() {
                continue;
            }
            for (j, a) in &row.coeffs {
                out[*j] += a.clone() * yr;
            }
        }
        out
    }

    /// True iff `x` satisfies every row and sign restriction.
    pub fn check_primal(&self, x: &[S]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let signs_ok = self
            .signs
            .iter()
            .zip(x)
            .all(|(s, v)| *s == VarSign::Free || !v.is_negative());
        signs_ok
            && (0..self.rows.len()).all(|r| {
                let ord = self.row_activity(r, x).compare(&self.rows[r].rhs);
                match self.rows[r].relation {
                    Relation::Le => ord != Ordering::Greater,
                    Relation::Ge => ord != Ordering::Less,
                    Relation::Eq => ord == Ordering::Equal,
                }
            })
    }

    /// Checks `y` against the infeasibility conventions in the module docs.
    pub fn verify_certificate(&self, y: &[S]) -> std::result::Result<(), String> {
        if y.len() != self.rows.len() {
            return Err(format!(
                "certificate has {} entries for {} rows",
                y.len(),
                self.rows.len()
            ));
        }
        for (r, (row, yr)) in self.rows.iter().zip(y).enumerate() {
            let bad = match row.relation {
                Relation::Le => yr.is_negative(),
                Relation::Ge => yr.is_positive(),
                Relation::Eq => false,
            };
            if bad {
                return Err(format!("multiplier of row {r} has the wrong sign"));
            }
        }
        let aty = self.transpose_times(y);
        for (j, (v, sign)) in aty.iter().zip(&self.signs).enumerate() {
            match sign {
                VarSign::Free if !v.is_zero() => {
                    return Err(format!("column {j} (free) has nonzero combination {v}"))
                }
                VarSign::NonNegative if v.is_negative() => {
                    return Err(format!("column {j} has negative combination {v}"))
                }
                _ => {}
            }
        }
        let by = self
            .rows
            .iter()
            .zip(y)
            .fold(S::zero(), |acc, (row, yr)| acc + row.rhs.clone() * yr);
        if !by.is_negative() {
            return Err(format!("b.y = {by} is not negative"));
        }
        Ok(())
    }

    /// Writes the program in CPLEX LP text format. Rows are scaled to integer
    /// coefficients in rational mode; the objective is written unscaled.
    pub fn to_lp_format(&self) -> String {
        let name = |j: usize| -> String {
            let raw: String = self.names[j]
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
                .collect();
            format!("x{j}_{raw}")
        };
        let term_list = |coeffs: &[(usize, S)]| -> String {
            let mut s = String::new();
            for (k, (j, v)) in coeffs.iter().enumerate() {
                let (sign, mag) = if v.is_negative() { ("-", -v.clone()) } else { ("+", v.clone()) };
                if k > 0 || sign == "-" {
                    let _ = write!(s, " {sign} ");
                } else {
                    s.push(' ');
                }
                let _ = write!(s, "{} {}", mag.exact_string(), name(*j));
            }
            if coeffs.is_empty() {
                s.push_str(" 0 x0_");
            }
            s
        };
        let mut out = String::new();
        match &self.objective {
            Some(obj) => {
                out.push_str(if obj.sense == Sense::Maximize { "Maximize\n" } else { "Minimize\n" });
                let _ = writeln!(out, " obj:{}", term_list(&obj.coeffs));
            }
            None => {
                out.push_str("Minimize\n obj:\n");
            }
        }
        out.push_str("Subject To\n");
        for (r, row) in self.rows.iter().enumerate() {
            let mut values: Vec<S> = row.coeffs.iter().map(|(_, v)| v.clone()).collect();
            values.push(row.rhs.clone());
            let scaled = S::scale_to_integers(&values);
            let coeffs: Vec<(usize, S)> = row
                .coeffs
                .iter()
                .zip(&scaled)
                .map(|((j, _), v)| (*j, v.clone()))
                .collect();
            let rhs = scaled.last().cloned().unwrap_or_else(S::zero);
            let lhs = if coeffs.is_empty() { " 0 x0_".to_string() } else { term_list(&coeffs) };
            let _ = writeln!(out, " r{r}:{lhs} {} {}", row.relation.symbol(), rhs.exact_string());
        }
        out.push_str("Bounds\n");
        for (j, s) in self.signs.iter().enumerate() {
            if *s == VarSign::Free {
                let _ = writeln!(out, " {} free", name(j));
            }
        }
        out.push_str("End\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Tableau
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    /// Positive or negative part of an original variable.
    Structural { var: usize, negated: bool },
    Slack,
    Artificial,
}

struct Tableau<S> {
    /// `rows` constraint rows followed by the objective row; last column is
    /// the right-hand side.
    t: Vec<Vec<S>>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    /// Column that started as the unit vector of each row.
    identity: Vec<usize>,
    flipped: Vec<bool>,
    pivots: u64,
    limit: u64,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram<S>, limit: u64) -> Self {
        let m = lp.rows.len();
        let mut kinds = Vec::new();
        let mut var_col = vec![(0usize, None::<usize>); lp.num_vars()];
        for (j, sign) in lp.signs.iter().enumerate() {
            let pos = kinds.len();
            kinds.push(ColKind::Structural { var: j, negated: false });
            let neg = if *sign == VarSign::Free {
                kinds.push(ColKind::Structural { var: j, negated: true });
                Some(pos + 1)
            } else {
                None
            };
            var_col[j] = (pos, neg);
        }
        let flipped: Vec<bool> = lp.rows.iter().map(|r| r.rhs.is_negative()).collect();
        let relations: Vec<Relation> = lp
            .rows
            .iter()
            .zip(&flipped)
            .map(|(r, f)| if *f { r.relation.flipped() } else { r.relation })
            .collect();
        let mut slack_col = vec![None; m];
        for (r, rel) in relations.iter().enumerate() {
            if *rel != Relation::Eq {
                slack_col[r] = Some(kinds.len());
                kinds.push(ColKind::Slack);
            }
        }
        let mut art_col = vec![None; m];
        for (r, rel) in relations.iter().enumerate() {
            if *rel != Relation::Le {
                art_col[r] = Some(kinds.len());
                kinds.push(ColKind::Artificial);
            }
        }
        let n = kinds.len();
        let mut t = vec![vec![S::zero(); n + 1]; m + 1];
        let mut basis = vec![0; m];
        let mut identity = vec![0; m];
        for (r, row) in lp.rows.iter().enumerate() {
            let sgn = if flipped[r] { -S::one() } else { S::one() };
            for (j, a) in &row.coeffs {
                let v = a.clone() * &sgn;
                let (pos, neg) = var_col[*j];
                if let Some(neg) = neg {
                    t[r][neg] = -v.clone();
                }
                t[r][pos] = v;
            }
            t[r][n] = row.rhs.clone() * &sgn;
            if let Some(s) = slack_col[r] {
                t[r][s] = if relations[r] == Relation::Le { S::one() } else { -S::one() };
            }
            if let Some(a) = art_col[r] {
                t[r][a] = S::one();
                basis[r] = a;
                identity[r] = a;
            } else {
                let s = slack_col[r].expect("<= row has a slack");
                basis[r] = s;
                identity[r] = s;
            }
        }
        Tableau {
            t,
            basis,
            kinds,
            identity,
            flipped,
            pivots: 0,
            limit,
        }
    }

    fn m(&self) -> usize {
        self.basis.len()
    }

    fn n(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.limit {
            return Err(Error::Resource(format!(
                "simplex exceeded the pivot limit of {}",
                self.limit
            )));
        }
        let width = self.n() + 1;
        let p = self.t[r][c].clone();
        let mut nz = Vec::new();
        for (j, v) in self.t[r].iter_mut().enumerate() {
            if v.is_zero() {
                *v = S::zero();
            } else {
                *v = v.clone() / &p;
                nz.push(j);
            }
        }
        debug_assert!(width == self.t[r].len());
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                let v = row[j].clone() - f.clone() * &pivot_row[j];
                row[j] = if v.is_zero() { S::zero() } else { v };
            }
            row[c] = S::zero();
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Sets the objective row for `maximize sum cost[j] x_j`.
    fn set_costs(&mut self, cost: &[S]) {
        let m = self.m();
        let width = self.n() + 1;
        let mut obj = vec![S::zero(); width];
        for (j, c) in cost.iter().enumerate() {
            obj[j] = -c.clone();
        }
        for r in 0..m {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (j, o) in obj.iter_mut().enumerate() {
                if !self.t[r][j].is_zero() {
                    *o += cb.clone() * &self.t[r][j];
                }
            }
        }
        for o in obj.iter_mut() {
            if o.is_zero() {
                *o = S::zero();
            }
        }
        self.t[m] = obj;
    }

    fn run(&mut self, allow_artificial: bool) -> Result<Step> {
        let m = self.m();
        let n = self.n();
        loop {
            let entering = (0..n).find(|&j| {
                (allow_artificial || self.kinds[j] != ColKind::Artificial)
                    && self.t[m][j].is_negative()
            });
            let Some(c) = entering else {
                return Ok(Step::Optimal);
            };
            let mut best: Option<(usize, S)> = None;
            for r in 0..m {
                let a = &self.t[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.t[r][n].clone() / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => match ratio.compare(&bv) {
                        Ordering::Less => Some((r, ratio)),
                        Ordering::Equal if self.basis[r] < self.basis[br] => Some((r, ratio)),
                        _ => Some((br, bv)),
                    },
                };
            }
            match best {
                None => return Ok(Step::Unbounded),
                Some((r, _)) => self.pivot(r, c)?,
            }
        }
    }

    /// Row multipliers `d_id(r) + cost_id(r)` for the current objective row.
    fn row_prices(&self, cost: &[S]) -> Vec<S> {
        let m = self.m();
        (0..m)
            .map(|r| {
                let id = self.identity[r];
                let pi = self.t[m][id].clone() + &cost[id];
                if self.flipped[r] {
                    -pi
                } else {
                    pi
                }
            })
            .collect()
    }

    fn primal(&self, n_vars: usize) -> Vec<S> {
        let n = self.n();
        let mut x = vec![S::zero(); n_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if let ColKind::Structural { var, negated } = self.kinds[b] {
                let v = self.t[r][n].clone();
                if negated {
                    x[var] -= v;
                } else {
                    x[var] += v;
                }
            }
        }
        x
    }
}

/// Solves with the default pivot limit.
pub fn solve<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpOutcome<S>> {
    solve_with_limit(lp, DEFAULT_PIVOT_LIMIT)
}

pub fn solve_with_limit<S: Scalar>(lp: &LinearProgram<S>, limit: u64) -> Result<LpOutcome<S>> {
    let mut tab = Tableau::build(lp, limit);
    let m = tab.m();
    let n = tab.n();

    let phase1: Vec<S> = tab
        .kinds
        .iter()
        .map(|k| if *k == ColKind::Artificial { -S::one() } else { S::zero() })
        .collect();
    let has_artificial = phase1.iter().any(|c| !c.is_zero());
    if has_artificial {
        tab.set_costs(&phase1);
        match tab.run(true)? {
            Step::Optimal => {}
            Step::Unbounded => return Err(Error::Internal("phase one reported unbounded".into())),
        }
        if tab.t[m][n].is_negative() {
            let certificate = tab.row_prices(&phase1);
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                primal: None,
                objective_value: None,
                duals: None,
                certificate: Some(certificate),
                pivots: tab.pivots,
            });
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if tab.kinds[tab.basis[r]] != ColKind::Artificial {
                continue;
            }
            let col = (0..n).find(|&j| tab.kinds[j] != ColKind::Artificial && !tab.t[r][j].is_zero());
            if let Some(c) = col {
                tab.pivot(r, c)?;
            }
        }
    }

    let Some(obj) = &lp.objective else {
        let x = tab.primal(lp.num_vars());
        return Ok(LpOutcome {
            status: LpStatus::Feasible,
            primal: Some(x),
            objective_value: None,
            duals: None,
            certificate: None,
            pivots: tab.pivots,
        });
    };

    let flip = obj.sense == Sense::Minimize;
    let mut var_cost = vec![S::zero(); lp.num_vars()];
    for (j, c) in &obj.coeffs {
        var_cost[*j] = if flip { -c.clone() } else { c.clone() };
    }
    let cost: Vec<S> = tab
        .kinds
        .iter()
        .map(|k| match k {
            ColKind::Structural { var, negated } => {
                if *negated {
                    -var_cost[*var].clone()
                } else {
                    var_cost[*var].clone()
                }
            }
            _ => S::zero(),
        })
        .collect();
    tab.set_costs(&cost);
    match tab.run(false)? {
        Step::Unbounded => Ok(LpOutcome {
            status: LpStatus::Unbounded,
            primal: None,
            objective_value: None,
            duals: None,
            certificate: None,
            pivots: tab.pivots,
        }),
        Step::Optimal => {
            let x = tab.primal(lp.num_vars());
            let mut duals = tab.row_prices(&cost);
            let mut value = tab.t[m][n].clone();
            if flip {
                value = -value;
                duals = duals.into_iter().map(|d| -d).collect();
            }
            Ok(LpOutcome {
                status: LpStatus::Optimal,
                primal: Some(x),
                objective_value: Some(value),
                duals: Some(duals),
                certificate: None,
                pivots: tab.pivots,
            })
        }
    }
}

/// Solves independent programs concurrently; results keep input order.
pub fn solve_batch<S: Scalar>(lps: &[LinearProgram<S>]) -> Vec<Result<LpOutcome<S>>> {
    lps.par_iter().map(solve).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Float, Rational};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn bounded_maximum() {
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("x", VarSign::NonNegative);
        lp.add_row(vec![(x, int(1))], Relation::Le, int(3)).unwrap();
        lp.set_objective(Sense::Maximize, vec![(x, int(1))]).unwrap();
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.primal.unwrap(), vec![int(3)]);
        assert_eq!(out.objective_value.unwrap(), int(3));
        assert_eq!(out.duals.unwrap(), vec![int(1)]);
    }

    #[test]
    fn one_variable_alternative() {
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("x", VarSign::NonNegative);
        lp.add_row(vec![(x, int(1))], Relation::Le, int(-1)).unwrap();
        lp.add_row(vec![(x, int(1))], Relation::Ge, int(0)).unwrap();
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        assert!(out.primal.is_none());
        let y = out.certificate.unwrap();
        lp.verify_certificate(&y).unwrap();
        let by = y[0].clone() * int(-1);
        assert!(by.is_negative());
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + y, x - y = -2, x + y >= 1, x free, y >= 0
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("x", VarSign::Free);
        let y = lp.add_var("y", VarSign::NonNegative);
        lp.add_row(vec![(x, int(1)), (y, int(-1))], Relation::Eq, int(-2)).unwrap();
        lp.add_row(vec![(x, int(1)), (y, int(1))], Relation::Ge, int(1)).unwrap();
        lp.set_objective(Sense::Minimize, vec![(x, int(1)), (y, int(1))]).unwrap();
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        let sol = out.primal.unwrap();
        assert!(lp.check_primal(&sol));
        assert_eq!(out.objective_value.clone().unwrap(), int(1));
        assert_eq!(sol, vec![q(-1, 2), q(3, 2)]);
        let duals = out.duals.unwrap();
        let by = duals[0].clone() * int(-2) + duals[1].clone() * int(1);
        assert_eq!(by, int(1));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("x", VarSign::NonNegative);
        let y = lp.add_var("y", VarSign::NonNegative);
        lp.add_row(vec![(x, int(1)), (y, int(-1))], Relation::Le, int(1)).unwrap();
        lp.set_objective(Sense::Maximize, vec![(y, int(1))]).unwrap();
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("x", VarSign::NonNegative);
        let y = lp.add_var("y", VarSign::NonNegative);
        lp.add_row(vec![(x, int(1)), (y, int(1))], Relation::Eq, int(1)).unwrap();
        lp.add_row(vec![(x, int(2)), (y, int(2))], Relation::Eq, int(2)).unwrap();
        lp.set_objective(Sense::Maximize, vec![(x, int(2)), (y, int(1))]).unwrap();
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.objective_value.unwrap(), int(2));
    }

    #[test]
    fn rejects_bad_index_and_drops_zeros() {
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("x", VarSign::NonNegative);
        assert!(lp.add_row(vec![(x + 1, int(1))], Relation::Le, int(0)).is_err());
        let r = lp.add_row(vec![(x, int(1)), (x, int(-1))], Relation::Le, int(0)).unwrap();
        assert!(lp.rows()[r].coeffs.is_empty());
    }

    #[test]
    fn feasibility_only() {
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("x", VarSign::Free);
        lp.add_row(vec![(x, int(3))], Relation::Ge, int(-6)).unwrap();
        lp.add_row(vec![(x, int(1))], Relation::Le, int(-1)).unwrap();
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Feasible);
        assert!(lp.check_primal(&out.primal.unwrap()));
    }

    #[test]
    fn pivot_limit_is_a_resource_error() {
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("x", VarSign::NonNegative);
        lp.add_row(vec![(x, int(1))], Relation::Ge, int(1)).unwrap();
        assert!(matches!(solve_with_limit(&lp, 0), Err(Error::Resource(_))));
    }

    #[test]
    fn batch_preserves_order() {
        assert!(solve_batch::<Rational>(&[]).is_empty());
        let lps: Vec<LinearProgram<Rational>> = (0..6)
            .map(|k| {
                let mut lp = LinearProgram::new();
                let x = lp.add_var("x", VarSign::NonNegative);
                lp.add_row(vec![(x, int(1))], Relation::Le, int(k)).unwrap();
                lp.set_objective(Sense::Maximize, vec![(x, int(1))]).unwrap();
                lp
            })
            .collect();
        let outs = solve_batch(&lps);
        for (k, out) in outs.into_iter().enumerate() {
            assert_eq!(out.unwrap().objective_value.unwrap(), int(k as i64));
        }
    }

    #[test]
    fn lp_text_dump() {
        let mut lp = LinearProgram::<Rational>::new();
        let x = lp.add_var("lam(0,A)", VarSign::Free);
        let y = lp.add_var("y", VarSign::NonNegative);
        lp.add_row(vec![(x, q(1, 2)), (y, q(-1, 3))], Relation::Le, q(1, 6)).unwrap();
        lp.set_objective(Sense::Maximize, vec![(y, int(1))]).unwrap();
        let text = lp.to_lp_format();
        assert!(text.contains(" r0: 3 x0_lam_0_A_ - 2 x1_y <= 1"), "{text}");
        assert!(text.contains("x0_lam_0_A_ free"));
        assert!(text.ends_with("End\n"));
    }

    #[test]
    fn float_mode_matches() {
        let mut lp = LinearProgram::<Float>::new();
        let x = lp.add_var("x", VarSign::NonNegative);
        let y = lp.add_var("y", VarSign::NonNegative);
        lp.add_row(vec![(x, Float(1.0)), (y, Float(2.0))], Relation::Le, Float(4.0)).unwrap();
        lp.add_row(vec![(x, Float(3.0)), (y, Float(1.0))], Relation::Le, Float(6.0)).unwrap();
        lp.set_objective(Sense::Maximize, vec![(x, Float(1.0)), (y, Float(1.0))]).unwrap();
        let out = solve(&lp).unwrap();
        assert!((out.objective_value.unwrap().0 - 2.8).abs() < 1e-9);
    }

    fn small_lp() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>, Vec<u8>, Vec<bool>, Vec<i64>)> {
        (1usize..4, 1usize..5).prop_flat_map(|(n, m)| {
            (
                proptest::collection::vec(proptest::collection::vec(-4i64..5, n), m),
                proptest::collection::vec(-6i64..7, m),
                proptest::collection::vec(0u8..3, m),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(-3i64..4, n),
            )
        })
    }

    fn build(a: &[Vec<i64>], b: &[i64], rel: &[u8], free: &[bool], c: &[i64], scale: &[i64]) -> LinearProgram<Rational> {
        let mut lp = LinearProgram::new();
        for (j, f) in free.iter().enumerate() {
            lp.add_var(format!("x{j}"), if *f { VarSign::Free } else { VarSign::NonNegative });
        }
        for (r, row) in a.iter().enumerate() {
            let relation = match rel[r] {
                0 => Relation::Le,
                1 => Relation::Eq,
                _ => Relation::Ge,
            };
            let s = if relation == Relation::Le { scale[r % scale.len()] } else { 1 };
            let coeffs = row.iter().enumerate().map(|(j, v)| (j, int(v * s))).collect();
            lp.add_row(coeffs, relation, int(b[r] * s)).unwrap();
        }
        // Box the variables so the objective stays bounded.
        for j in 0..free.len() {
            lp.add_row(vec![(j, int(1))], Relation::Le, int(10)).unwrap();
            lp.add_row(vec![(j, int(1))], Relation::Ge, int(-10)).unwrap();
        }
        lp.set_objective(Sense::Maximize, c.iter().enumerate().map(|(j, v)| (j, int(*v))).collect())
            .unwrap();
        lp
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn outcomes_are_certified((a, b, rel, free, c) in small_lp(), scale in proptest::collection::vec(1i64..5, 1..3)) {
            let lp = build(&a, &b, &rel, &free, &c, &[1]);
            let out = solve(&lp).unwrap();
            match out.status {
                LpStatus::Optimal => {
                    prop_assert!(out.certificate.is_none());
                    let x = out.primal.clone().unwrap();
                    prop_assert!(lp.check_primal(&x));
                    let y = out.duals.clone().unwrap();
                    let value = out.objective_value.clone().unwrap();
                    prop_assert_eq!(lp.objective_at(&x), value.clone());
                    let by = lp.rows().iter().zip(&y).fold(int(0), |acc, (row, yr)| acc + row.rhs.clone() * yr);
                    prop_assert_eq!(by, value);
                    let aty = lp.transpose_times(&y);
                    for (j, v) in aty.iter().enumerate() {
                        let cj = int(c[j]);
                        if free[j] { prop_assert_eq!(v.clone(), cj); } else { prop_assert!(v.compare(&cj) != Ordering::Less); }
                    }
                }
                LpStatus::Infeasible => {
                    prop_assert!(out.primal.is_none());
                    let y = out.certificate.clone().unwrap();
                    prop_assert!(lp.verify_certificate(&y).is_ok());
                }
                other => prop_assert!(false, "unexpected status {:?}", other),
            }
            // Scaling <= rows by positive constants keeps the status.
            let scaled = build(&a, &b, &rel, &free, &c, &scale);
            prop_assert_eq!(solve(&scaled).unwrap().status, out.status);
        }
    }
}
