//! Double description: from the inequalities `<a_k, x> >= 0` to a lineality
//! basis plus extreme rays of the cone they cut out.

use num::{Signed, Zero};

use crate::lattice::Primal;
use crate::lattice::{dot, hermite_normal_form, integerize, make_primitive, Int, QuotientLattice, Vector};
use crate::linalg::{project_off, sign};

/// Generators of a polyhedral cone `L + pointed part`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct ConeGenerators {
    /// Canonical (Hermite) basis of the saturated lineality lattice.
    pub lines: Vec<Vec<Int>>,
    /// Primitive extreme rays, orthogonal to `lines`, sorted.
    pub rays: Vec<Vec<Int>>,
}

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn is_superset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    v: Vec<Int>,
    tight: Bits,
}

/// Solve `{x in Q^dim : <a, x> >= 0 for every a in ineqs}`.
pub(crate) fn cone_from_inequalities(dim: usize, ineqs: &[Vec<Int>]) -> ConeGenerators {
    let m = ineqs.len();
    let mut lines: Vec<Vec<Int>> = (0..dim)
        .map(|i| {
            let mut e = vec![Int::zero(); dim];
            e[i] = Int::from(1);
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, a) in ineqs.iter().enumerate() {
        debug_assert_eq!(a.len(), dim);
        if let Some(pi) = lines.iter().position(|l| !dot(a, l).is_zero()) {
            let p = lines.swap_remove(pi);
            let alpha = dot(a, &p);
            let s = Int::from(sign(&alpha));
            for l in lines.iter_mut() {
                let beta = dot(a, l);
                if !beta.is_zero() {
                    let nl: Vec<Int> = l.iter().zip(&p).map(|(x, y)| &alpha * x - &beta * y).collect();
                    *l = make_primitive(nl);
                }
            }
            for r in rays.iter_mut() {
                let beta = dot(a, &r.v);
                if !beta.is_zero() {
                    let nv: Vec<Int> = r.v.iter().zip(&p).map(|(x, y)| (&alpha * x - &beta * y) * &s).collect();
                    r.v = make_primitive(nv);
                }
                r.tight.set(k);
            }
            let mut tight = Bits::new(m);
            for j in 0..k {
                tight.set(j);
            }
            rays.push(Ray { v: p.iter().map(|x| x * &s).collect(), tight });
            continue;
        }

        let vals: Vec<Int> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.tight.set(k);
                }
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].tight.and(&rays[n].tight);
                let adjacent = (0..rays.len()).all(|r| r == p || r == n || !rays[r].tight.is_superset(&common));
                if !adjacent {
                    continue;
                }
                let v: Vec<Int> = rays[n].v.iter().zip(&rays[p].v).map(|(x, y)| &vals[p] * x - &vals[n] * y).collect();
                let mut tight = common;
                tight.set(k);
                next.push(Ray { v: make_primitive(v), tight });
            }
        }
        for (i, r) in rays.into_iter().enumerate() {
            if vals[i].is_positive() {
                next.push(r);
            } else if vals[i].is_zero() {
                let mut r = r;
                r.tight.set(k);
                next.push(r);
            }
        }
        rays = next;
    }

    let lines = canonical_lines(dim, &lines);
    let mut out: Vec<Vec<Int>> =
        rays.into_iter().map(|r| if lines.is_empty() { r.v } else { integerize(&project_off(&r.v, &lines)) }).collect();
    out.sort();
    out.dedup();
    ConeGenerators { lines, rays: out }
}

/// Hermite basis of the saturation of the lattice spanned by `lines`.
pub(crate) fn canonical_lines(dim: usize, lines: &[Vec<Int>]) -> Vec<Vec<Int>> {
    if lines.is_empty() {
        return Vec::new();
    }
    let gens: Vec<Vector<Primal>> = lines.iter().map(|l| Vector::new(l.clone())).collect();
    let q = QuotientLattice::new(dim, &gens).expect("consistent dimensions");
    let basis: Vec<Vec<Int>> = (0..q.sublattice_rank()).map(|j| q.sublattice_basis.column(j)).collect();
    hermite_normal_form(dim, &basis)
}
