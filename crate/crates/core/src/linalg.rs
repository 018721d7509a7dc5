//! Small exact rational linear algebra used by the polyhedral routines.

use num::{Signed, Zero};

use crate::lattice::{Int, Rat};

/// Some solution of `A x = b` over the rationals, or `None` if inconsistent.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_rational(a: &[Vec<Rat>], b: &[Rat], cols: usize) -> Option<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`.
pub(crate) fn project_off(v: &[Int], basis: &[Vec<Int>]) -> Vec<Rat> {
    let vr: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
    if basis.is_empty() {
        return vr;
    }
    let k = basis.len();
    let gram: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|j| Rat::from_integer(crate::lattice::dot(&basis[i], &basis[j]))).collect())
        .collect();
    let rhs: Vec<Rat> = basis.iter().map(|b| Rat::from_integer(crate::lattice::dot(b, v))).collect();
    let c = solve_rational(&gram, &rhs, k).expect("Gram matrix of a basis is invertible");
    let mut out = vr;
    for (ci, b) in c.iter().zip(basis) {
        for (o, bj) in out.iter_mut().zip(b) {
            *o -= ci * Rat::from_integer(bj.clone());
        }
    }
    out
}

pub(crate) fn sign(x: &Int) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
