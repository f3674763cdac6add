//! Exact solution of zero-sum matrix games. Player R picks rows and maximizes.

use num_traits::{One, Zero};

use crate::lp::{Lp, LpOutcome, Relation};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    z: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub value: Rational,
    pub row_strategy: Vec<Rational>,
    pub col_strategy: Vec<Rational>,
}

fn one() -> Rational {
    Rational::one()
}

fn dirac(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|k| if k == i { one() } else { Rational::zero() }).collect()
}

impl MatrixGame {
    /// Panics unless `z` is a non-empty rectangular matrix.
    pub fn new(z: Vec<Vec<Rational>>) -> MatrixGame {
        assert!(!z.is_empty() && !z[0].is_empty(), "matrix game needs at least one row and column");
        assert!(z.iter().all(|r| r.len() == z[0].len()), "ragged payoff matrix");
        MatrixGame { z }
    }

    pub fn rows(&self) -> usize {
        self.z.len()
    }

    pub fn cols(&self) -> usize {
        self.z[0].len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.z[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.z
    }

    pub fn sub(&self, rows: &[usize], cols: &[usize]) -> MatrixGame {
        MatrixGame::new(rows.iter().map(|&i| cols.iter().map(|&j| self.z[i][j].clone()).collect()).collect())
    }

    /// Expected payoff against each column under row mix `rho`.
    pub fn row_payoffs(&self, rho: &[Rational]) -> Vec<Rational> {
        (0..self.cols())
            .map(|j| rho.iter().zip(&self.z).filter(|(p, _)| !p.is_zero()).map(|(p, row)| p * &row[j]).sum())
            .collect()
    }

    /// Expected payoff of each row under column mix `sigma`.
    pub fn col_payoffs(&self, sigma: &[Rational]) -> Vec<Rational> {
        self.z
            .iter()
            .map(|row| sigma.iter().zip(row).filter(|(q, _)| !q.is_zero()).map(|(q, v)| q * v).sum())
            .collect()
    }

    /// Worst-case payoff R secures with `rho`.
    pub fn row_guarantee(&self, rho: &[Rational]) -> Rational {
        self.row_payoffs(rho).into_iter().min().expect("non-empty")
    }

    /// Worst-case payoff S concedes with `sigma`.
    pub fn col_guarantee(&self, sigma: &[Rational]) -> Rational {
        self.col_payoffs(sigma).into_iter().max().expect("non-empty")
    }

    fn pure_saddle(&self) -> Option<(usize, usize)> {
        let row_mins: Vec<&Rational> = self.z.iter().map(|r| r.iter().min().unwrap()).collect();
        let col_maxs: Vec<&Rational> = (0..self.cols()).map(|j| self.z.iter().map(|r| &r[j]).max().unwrap()).collect();
        let (i, lo) = row_mins.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
        let (j, hi) = col_maxs.iter().enumerate().min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))?;
        (lo == hi).then_some((i, j))
    }

    /// Maximin LP for Player R: `max v` s.t. `Σ_i x_i z_ij >= v` for every column.
    pub fn row_lp(&self) -> (Rational, Vec<Rational>) {
        let m = self.rows();
        let v = m;
        let mut lp = Lp::new(m + 1);
        lp.set_free(v);
        lp.set_objective(v, one());
        for j in 0..self.cols() {
            let mut terms: Vec<(usize, Rational)> = (0..m).map(|i| (i, -&self.z[i][j])).collect();
            terms.push((v, one()));
            lp.add(&terms, Relation::Le, Rational::zero());
        }
        lp.add(&(0..m).map(|i| (i, one())).collect::<Vec<_>>(), Relation::Eq, one());
        match lp.solve() {
            LpOutcome::Optimal { value, mut x } => {
                x.truncate(m);
                (value, x)
            }
            other => unreachable!("matrix game LP is always feasible and bounded: {other:?}"),
        }
    }

    /// Minimax LP for Player S: `min w` s.t. `Σ_j z_ij y_j <= w` for every row.
    pub fn col_lp(&self) -> (Rational, Vec<Rational>) {
        let n = self.cols();
        let w = n;
        let mut lp = Lp::new(n + 1);
        lp.set_free(w);
        lp.set_objective(w, -one());
        for row in &self.z {
            let mut terms: Vec<(usize, Rational)> = row.iter().cloned().enumerate().collect();
            terms.push((w, -one()));
            lp.add(&terms, Relation::Le, Rational::zero());
        }
        lp.add(&(0..n).map(|j| (j, one())).collect::<Vec<_>>(), Relation::Eq, one());
        match lp.solve() {
            LpOutcome::Optimal { value, mut x } => {
                x.truncate(n);
                (-value, x)
            }
            other => unreachable!("matrix game LP is always feasible and bounded: {other:?}"),
        }
    }

    /// Value with one optimal strategy per player; pure saddle points skip the LPs.
    pub fn solve(&self) -> GameSolution {
        if let Some((i, j)) = self.pure_saddle() {
            return GameSolution {
                value: self.z[i][j].clone(),
                row_strategy: dirac(self.rows(), i),
                col_strategy: dirac(self.cols(), j),
            };
        }
        let (value, row_strategy) = self.row_lp();
        let (dual, col_strategy) = self.col_lp();
        debug_assert_eq!(value, dual, "LP duality violated");
        GameSolution {
            value,
            row_strategy,
            col_strategy,
        }
    }

    pub fn value(&self) -> Rational {
        match self.pure_saddle() {
            Some((i, j)) => self.z[i][j].clone(),
            None => self.row_lp().0,
        }
    }

    /// Value of the sub-game on the given rows and columns.
    pub fn restricted_value(&self, rows: &[usize], cols: &[usize]) -> Rational {
        self.sub(rows, cols).value()
    }

    /// Whether some strategy securing `val` has support exactly `support`.
    pub fn optimal_support_exists(&self, val: &Rational, support: &[usize]) -> bool {
        if support.is_empty() {
            return false;
        }
        // max t s.t. x_a >= t on the support, Σx = 1, x secures val.
        let k = support.len();
        let t = k;
        let mut lp = Lp::new(k + 1);
        lp.set_objective(t, one());
        for i in 0..k {
            lp.add(&[(i, one()), (t, -one())], Relation::Ge, Rational::zero());
        }
        lp.add(&[(t, one())], Relation::Le, one());
        lp.add(&(0..k).map(|i| (i, one())).collect::<Vec<_>>(), Relation::Eq, one());
        for j in 0..self.cols() {
            let terms: Vec<(usize, Rational)> = support.iter().enumerate().map(|(i, &a)| (i, self.z[a][j].clone())).collect();
            lp.add(&terms, Relation::Ge, val.clone());
        }
        matches!(lp.solve(), LpOutcome::Optimal { value, .. } if value > Rational::zero())
    }

    /// Largest weight on column `b` among strategies supported on `cols` that concede at most
    /// `val`; `None` if no such strategy exists.
    pub fn max_prob_on_action(&self, val: &Rational, cols: &[usize], b: usize) -> Option<Rational> {
        let lp = self.capped_column_lp(val, cols, cols.iter().position(|&c| c == b));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    fn capped_column_lp(&self, val: &Rational, cols: &[usize], objective: Option<usize>) -> Lp {
        let k = cols.len();
        let mut lp = Lp::new(k);
        if let Some(o) = objective {
            lp.set_objective(o, one());
        }
        lp.add(&(0..k).map(|i| (i, one())).collect::<Vec<_>>(), Relation::Eq, one());
        for row in &self.z {
            let terms: Vec<(usize, Rational)> = cols.iter().enumerate().map(|(i, &b)| (i, row[b].clone())).collect();
            lp.add(&terms, Relation::Le, val.clone());
        }
        lp
    }

    /// Whether some column mix `sigma` has every row of `inner` among its best responses and
    /// every best response inside `outer`. Requires `inner ⊆ outer`.
    pub fn best_responses_between(&self, inner: &[usize], outer: &[usize]) -> bool {
        // Variables: sigma (cols), w (free), d; maximize d <= 1 with rows outside `outer`
        // at least d below w, rows of `outer` at most w and rows of `inner` exactly w.
        let n = self.cols();
        let (w, d) = (n, n + 1);
        let mut lp = Lp::new(n + 2);
        lp.set_free(w);
        lp.set_objective(d, one());
        lp.add(&[(d, one())], Relation::Le, one());
        lp.add(&(0..n).map(|j| (j, one())).collect::<Vec<_>>(), Relation::Eq, one());
        for (i, row) in self.z.iter().enumerate() {
            let mut terms: Vec<(usize, Rational)> = row.iter().cloned().enumerate().collect();
            terms.push((w, -one()));
            if inner.contains(&i) {
                lp.add(&terms, Relation::Eq, Rational::zero());
            } else if outer.contains(&i) {
                lp.add(&terms, Relation::Le, Rational::zero());
            } else {
                terms.push((d, one()));
                lp.add(&terms, Relation::Le, Rational::zero());
            }
        }
        matches!(lp.solve(), LpOutcome::Optimal { value, .. } if value > Rational::zero())
    }

    /// `sup` over row mixes on `rows` of the `inf` over column mixes on `cols` that concede at
    /// most `val`. `None` if no such column mix exists.
    pub fn face_value(&self, val: &Rational, rows: &[usize], cols: &[usize]) -> Option<Rational> {
        if rows.is_empty() || self.capped_column_lp(val, cols, None).solve() == LpOutcome::Infeasible {
            return None;
        }
        // Dualize the inner minimization over the capped face:
        // max mu - val·Σλ s.t. mu - Σ_r λ_r z_rj <= Σ_a ρ_a z_aj for j in cols.
        let k = rows.len();
        let m = self.rows();
        let mu = k;
        let lambda = |r: usize| k + 1 + r;
        let mut lp = Lp::new(k + 1 + m);
        lp.set_free(mu);
        lp.set_objective(mu, one());
        for r in 0..m {
            lp.set_objective(lambda(r), -val);
        }
        lp.add(&(0..k).map(|i| (i, one())).collect::<Vec<_>>(), Relation::Eq, one());
        for &j in cols {
            let mut terms: Vec<(usize, Rational)> = vec![(mu, one())];
            terms.extend((0..m).map(|r| (lambda(r), -&self.z[r][j])));
            terms.extend(rows.iter().enumerate().map(|(i, &a)| (i, -&self.z[a][j])));
            lp.add(&terms, Relation::Le, Rational::zero());
        }
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => Some(value),
            other => unreachable!("face LP is feasible and bounded: {other:?}"),
        }
    }
}
