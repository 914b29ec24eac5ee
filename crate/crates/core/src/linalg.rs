//! Sparse Gaussian elimination over the rationals.

use std::collections::BTreeMap;

use num::Zero;

use crate::jetcore::Rational;

/// One equation `Σ row[j]·x_j = rhs`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearEquation {
    pub row: BTreeMap<usize, Rational>,
    pub rhs: Rational,
}

impl LinearEquation {
    fn is_trivial(&self) -> bool {
        self.row.is_empty()
    }

    /// `self −= c·other`
    fn eliminate(&mut self, c: &Rational, other: &LinearEquation) {
        for (j, a) in &other.row {
            let e = self.row.entry(*j).or_insert_with(Rational::zero);
            *e -= c * a;
            if e.is_zero() {
                self.row.remove(j);
            }
        }
        self.rhs -= c * &other.rhs;
    }
}

/// Solves the system in `unknowns` variables, returning one solution with
/// free variables set to zero, or `None` when the system is inconsistent.
pub fn solve(unknowns: usize, equations: Vec<LinearEquation>) -> Option<Vec<Rational>> {
    // Pivot rows keyed by pivot column; each is normalized to a unit pivot.
    let mut pivots: BTreeMap<usize, LinearEquation> = BTreeMap::new();
    let mut order = Vec::new();
    for mut eq in equations {
        while let Some(col) = eq.row.keys().find(|j| pivots.contains_key(j)).copied() {
            let c = eq.row[&col].clone();
            eq.eliminate(&c, &pivots[&col]);
        }
        if eq.is_trivial() {
            if !eq.rhs.is_zero() {
                return None;
            }
            continue;
        }
        let (&col, lead) = eq.row.iter().next().expect("nontrivial row");
        let inv = lead.recip();
        for a in eq.row.values_mut() {
            *a *= &inv;
        }
        eq.rhs *= &inv;
        pivots.insert(col, eq);
        order.push(col);
    }
    // A row only mentions pivots inserted after it, so solve newest first.
    let mut x = vec![Rational::zero(); unknowns];
    for col in order.into_iter().rev() {
        let eq = &pivots[&col];
        let mut v = eq.rhs.clone();
        for (j, a) in &eq.row {
            if *j != col {
                v -= a * &x[*j];
            }
        }
        x[col] = v;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcore::rat;

    fn eq(row: &[(usize, i64)], rhs: i64) -> LinearEquation {
        LinearEquation {
            row: row.iter().map(|&(j, a)| (j, rat(a, 1))).collect(),
            rhs: rat(rhs, 1),
        }
    }

    fn check(eqs: &[LinearEquation], x: &[Rational]) -> bool {
        eqs.iter().all(|e| {
            let lhs: Rational = e.row.iter().map(|(j, a)| a * &x[*j]).sum();
            lhs == e.rhs
        })
    }

    #[test]
    fn square_system() {
        let eqs = vec![eq(&[(0, 2), (1, 1)], 3), eq(&[(0, 1), (1, -1)], 0)];
        let x = solve(2, eqs.clone()).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(1, 1)]);
        assert!(check(&eqs, &x));
    }

    #[test]
    fn underdetermined_and_inconsistent() {
        let eqs = vec![
            eq(&[(1, 1), (2, 1)], 4),
            eq(&[(2, 2), (0, 1)], 2),
            eq(&[(0, 1), (1, 2), (2, 4)], 10),
        ];
        let x = solve(3, eqs.clone()).unwrap();
        assert!(check(&eqs, &x));
        assert!(solve(2, vec![eq(&[(0, 1), (1, 1)], 1), eq(&[(0, 2), (1, 2)], 3)]).is_none());
    }
}
