//! Determinants and maximal minors of matrices of base functions, and the
//! non-degeneracy policy built on them.

use std::fmt;

use crate::poly::GradedPoly;

/// Laplace expansion along the first row.
pub fn determinant(m: &[Vec<GradedPoly>]) -> GradedPoly {
    let n = m.len();
    assert!(n > 0, "determinant of an empty matrix");
    let ctx = m[0][0].context().clone();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = GradedPoly::zero(&ctx);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<GradedPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = &m[0][j] * &determinant(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Whether a bundle map is injective, following the minors policy.
#[derive(Debug, Clone, PartialEq)]
pub enum Nondegeneracy {
    /// Some maximal minor is a nonzero constant.
    Everywhere,
    /// Some maximal minor is nonzero; the map may drop rank on `{locus = 0}`.
    Generic { locus: GradedPoly },
    /// All maximal minors vanish identically.
    Degenerate,
}

impl Nondegeneracy {
    pub fn is_nondegenerate(&self) -> bool {
        !matches!(self, Nondegeneracy::Degenerate)
    }
}

impl fmt::Display for Nondegeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nondegeneracy::Everywhere => write!(f, "non-degenerate everywhere"),
            Nondegeneracy::Generic { locus } => {
                write!(f, "generically non-degenerate, may degenerate where {locus} = 0")
            }
            Nondegeneracy::Degenerate => write!(f, "degenerate"),
        }
    }
}

/// Classifies whether the rows of `m` are linearly independent, i.e. the
/// map from the row space is injective. An empty row set is injective.
pub fn row_injectivity(m: &[Vec<GradedPoly>]) -> Nondegeneracy {
    let rows = m.len();
    if rows == 0 {
        return Nondegeneracy::Everywhere;
    }
    let cols = m[0].len();
    if cols < rows {
        return Nondegeneracy::Degenerate;
    }
    let mut first: Option<GradedPoly> = None;
    for cs in subsets(cols, rows) {
        let sub: Vec<Vec<GradedPoly>> =
            m.iter().map(|row| cs.iter().map(|&c| row[c].clone()).collect()).collect();
        let det = determinant(&sub);
        if det.is_zero() {
            continue;
        }
        if det.is_constant() {
            return Nondegeneracy::Everywhere;
        }
        if first.is_none() {
            first = Some(det);
        }
    }
    match first {
        Some(locus) => Nondegeneracy::Generic { locus },
        None => Nondegeneracy::Degenerate,
    }
}

/// Rank condition on a square matrix via its determinant.
pub fn square_nondegeneracy(m: &[Vec<GradedPoly>]) -> (Nondegeneracy, Option<GradedPoly>) {
    if m.is_empty() {
        return (Nondegeneracy::Everywhere, None);
    }
    let det = determinant(m);
    let verdict = if det.is_zero() {
        Nondegeneracy::Degenerate
    } else if det.is_constant() {
        Nondegeneracy::Everywhere
    } else {
        Nondegeneracy::Generic { locus: det.clone() }
    };
    (verdict, Some(det))
}

pub fn transpose(m: &[Vec<GradedPoly>]) -> Vec<Vec<GradedPoly>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Adjugate of a square matrix: `adj(m) * m = det(m) * id`.
pub fn adjugate(m: &[Vec<GradedPoly>]) -> Vec<Vec<GradedPoly>> {
    let n = m.len();
    let ctx = m[0][0].context().clone();
    if n == 1 {
        return vec![vec![GradedPoly::one(&ctx)]];
    }
    let mut adj = vec![vec![GradedPoly::zero(&ctx); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<GradedPoly>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
                .collect();
            let d = determinant(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -&d };
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GradedContext;

    #[test]
    fn determinant_and_adjugate() {
        let ctx = GradedContext::builder().bases(["x", "y"]).build().unwrap();
        let x = GradedPoly::var(&ctx, "x").unwrap();
        let one = GradedPoly::one(&ctx);
        let zero = GradedPoly::zero(&ctx);
        let m = vec![vec![x.clone(), one.clone()], vec![zero.clone(), x.clone()]];
        assert_eq!(determinant(&m), &x * &x);
        let adj = adjugate(&m);
        for i in 0..2 {
            for j in 0..2 {
                let mut s = GradedPoly::zero(&ctx);
                for k in 0..2 {
                    s = &s + &(&adj[i][k] * &m[k][j]);
                }
                let expect = if i == j { &x * &x } else { zero.clone() };
                assert_eq!(s, expect);
            }
        }
        assert_eq!(row_injectivity(&[vec![zero.clone(), one.clone()]]), Nondegeneracy::Everywhere);
        assert!(matches!(row_injectivity(&[vec![x.clone(), zero.clone()]]), Nondegeneracy::Generic { .. }));
        assert_eq!(row_injectivity(&[vec![zero.clone(), zero]]), Nondegeneracy::Degenerate);
    }
}
