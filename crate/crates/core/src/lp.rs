//! Dense two-phase simplex over exact rationals with Bland's anti-cycling rule.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// `maximize c·x` subject to linear constraints; variables are non-negative unless marked free.
#[derive(Debug, Clone)]
pub struct Lp {
    num_vars: usize,
    free: Vec<bool>,
    objective: Vec<Rational>,
    constraints: Vec<(Vec<Rational>, Relation, Rational)>,
}

impl Lp {
    pub fn new(num_vars: usize) -> Lp {
        Lp {
            num_vars,
            free: vec![false; num_vars],
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) {
        self.objective[var] = coeff;
    }

    /// Adds `Σ coeffs[i]·x[i] rel rhs` given as sparse `(var, coeff)` pairs.
    pub fn add(&mut self, terms: &[(usize, Rational)], rel: Relation, rhs: Rational) {
        let mut row = vec![Rational::zero(); self.num_vars];
        for (v, c) in terms {
            row[*v] += c;
        }
        self.constraints.push((row, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
    /// Column of the positive and (for free variables) negative part of each variable.
    var_cols: Vec<(usize, Option<usize>)>,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Tableau {
        let mut var_cols = Vec::with_capacity(lp.num_vars);
        let mut next = 0;
        for i in 0..lp.num_vars {
            let neg = lp.free[i].then(|| next + 1);
            var_cols.push((next, neg));
            next += if lp.free[i] { 2 } else { 1 };
        }
        let structural = next;
        let slacks = lp.constraints.iter().filter(|c| c.1 != Relation::Eq).count();
        let first_artificial = structural + slacks;
        // Normalize to non-negative right-hand sides first to know which rows need artificials.
        let normalized: Vec<(Vec<Rational>, Relation, Rational)> = lp
            .constraints
            .iter()
            .map(|(row, rel, rhs)| {
                if rhs.is_negative() {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (row.iter().map(|c| -c).collect(), flipped, -rhs)
                } else {
                    (row.clone(), *rel, rhs.clone())
                }
            })
            .collect();
        let artificials = normalized.iter().filter(|c| c.1 != Relation::Le).count();
        let ncols = first_artificial + artificials;
        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let mut slack = structural;
        let mut art = first_artificial;
        for (coeffs, rel, rhs) in normalized {
            let mut row = vec![Rational::zero(); ncols + 1];
            for (i, c) in coeffs.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (pos, neg) = var_cols[i];
                if let Some(neg) = neg {
                    row[neg] = -&c;
                }
                row[pos] = c;
            }
            row[ncols] = rhs;
            match rel {
                Relation::Le => {
                    row[slack] = Rational::from_integer(1.into());
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = Rational::from_integer((-1).into());
                    slack += 1;
                    row[art] = Rational::from_integer(1.into());
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = Rational::from_integer(1.into());
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            rows,
            basis,
            ncols,
            var_cols,
            first_artificial,
        }
    }

    fn pivot(&mut self, reduced: &mut [Rational], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut [Rational]| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(reduced);
        self.basis[r] = c;
    }

    /// Reduced-cost row for objective `cost` (indexed by column) in the current basis.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d: Vec<Rational> = cost.to_vec();
        d.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (dj, v) in d.iter_mut().zip(row) {
                if !v.is_zero() {
                    *dj -= cb * v;
                }
            }
        }
        d
    }

    /// Runs Bland-rule pivots over columns `< limit`; returns false when unbounded.
    fn optimize(&mut self, reduced: &mut [Rational], limit: usize) -> bool {
        loop {
            let Some(c) = (0..limit).find(|&j| reduced[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(reduced, r, c);
        }
    }

    fn run(mut self, lp: &Lp) -> LpOutcome {
        if self.first_artificial < self.ncols {
            let mut cost = vec![Rational::zero(); self.ncols];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = Rational::from_integer((-1).into());
            }
            let mut reduced = self.reduced_costs(&cost);
            self.optimize(&mut reduced, self.ncols);
            let infeasibility: Rational = self
                .rows
                .iter()
                .zip(&self.basis)
                .filter(|(_, &b)| b >= self.first_artificial)
                .map(|(row, _)| row[self.ncols].clone())
                .sum();
            if infeasibility.is_positive() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining zero-level artificials out of the basis or drop redundant rows.
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] < self.first_artificial {
                    r += 1;
                    continue;
                }
                match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(c) => {
                        let mut dummy = vec![Rational::zero(); self.ncols + 1];
                        self.pivot(&mut dummy, r, c);
                        r += 1;
                    }
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                }
            }
        }
        let mut cost = vec![Rational::zero(); self.ncols];
        for (i, (pos, neg)) in self.var_cols.iter().enumerate() {
            cost[*pos] = lp.objective[i].clone();
            if let Some(neg) = neg {
                cost[*neg] = -&lp.objective[i];
            }
        }
        let mut reduced = self.reduced_costs(&cost);
        if !self.optimize(&mut reduced, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut col_val = vec![Rational::zero(); self.ncols];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            col_val[b] = row[self.ncols].clone();
        }
        let x: Vec<Rational> = self
            .var_cols
            .iter()
            .map(|(pos, neg)| match neg {
                Some(neg) => &col_val[*pos] - &col_val[*neg],
                None => col_val[*pos].clone(),
            })
            .collect();
        let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { value, x }
    }
}
