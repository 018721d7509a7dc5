//! Contact classification of smooth complete toric varieties of odd
//! dimension `2n+1`: an algebraic contact structure forces `-K = (n+1) L`,
//! and the only toric examples are `P^{2n+1}` and `P(T_{(P^1)^{n+1}})`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num::{Integer, One, Signed, Zero};

use crate::divisor::{canonical_divisor, class_group, ClassElement, TWeilDivisor};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::lattice::{Int, IntMatrix, LatticeVector};

pub const ISOMORPHISM_MAX_RANK: usize = 6;
pub const ISOMORPHISM_MAX_RAYS: usize = 16;

fn require_contact_candidate(f: &Fan) -> Result<usize> {
    if f.rank().is_multiple_of(2) {
        return Err(Error::unsupported(format!("contact structures need odd dimension, got rank {}", f.rank())));
    }
    if !f.is_smooth() || !f.is_complete() {
        return Err(Error::unsupported("contact classification needs a smooth complete fan"));
    }
    Ok(f.rank().div_ceil(2))
}

/// `Some(n+1)` when `[-K]` is divisible by `n+1` in the class group, where
/// the rank is `2n+1`.
pub fn contact_index_check(f: &Fan) -> Result<Option<usize>> {
    let k = require_contact_candidate(f)?;
    let g = class_group(f)?;
    let anti = canonical_divisor(f).scale(&Int::from(-1));
    let class = g.class_of(&anti)?;
    Ok(g.is_divisible(&class, &Int::from(k)).then_some(k))
}

/// A divisor `L` with `(n+1) L ~ -K`, when the index condition holds.
///
/// `L` is always basepoint-free on the two contact models but ample only on
/// projective space.
pub fn contact_divisor(f: &Fan) -> Result<Option<TWeilDivisor>> {
    let Some(k) = contact_index_check(f)? else { return Ok(None) };
    let g = class_group(f)?;
    let anti = g.class_of(&canonical_divisor(f).scale(&Int::from(-1)))?;
    if !anti.torsion.iter().all(Zero::is_zero) {
        return Err(Error::Internal("smooth complete fan with torsion in the class group".into()));
    }
    let k = Int::from(k);
    let third = ClassElement { free: anti.free.iter().map(|x| x / &k).collect(), torsion: anti.torsion.clone() };
    Ok(Some(g.representative(&third)?))
}

/// Fan of `P(⊕_i pr_i^* O(2))` over `(P^1)^m`, rank `2m-1`.
///
/// Base coordinates come first, then fibre coordinates `f_1, …, f_{m-1}`
/// with `f_m = -Σ f_j`. The ray `+e_i` lifts to `(e_i, 2 f_i)`, `-e_i` to
/// `(-e_i, 0)`; maximal cones are a base quadrant plus all fibre rays but one.
pub fn projectivized_tangent_fan(m: usize) -> Result<Fan> {
    if m == 0 {
        return Err(Error::unsupported("projectivized tangent fan needs m >= 1"));
    }
    if m == 1 {
        return Ok(Fan::projective_space(1));
    }
    let n = 2 * m - 1;
    let fibre = |j: usize| -> Vec<i64> {
        let mut v = vec![0i64; m - 1];
        if j < m - 1 {
            v[j] = 1;
        } else {
            v.iter_mut().for_each(|x| *x = -1);
        }
        v
    };
    let mut rays: Vec<LatticeVector> = Vec::new();
    for i in 0..m {
        for sign in [1i64, -1] {
            let mut c = vec![0i64; n];
            c[i] = sign;
            if sign == 1 {
                for (k, x) in fibre(i).into_iter().enumerate() {
                    c[m + k] = 2 * x;
                }
            }
            rays.push(LatticeVector::from_i64(&c));
        }
    }
    for j in 0..m {
        let mut c = vec![0i64; m];
        c.extend(fibre(j));
        rays.push(LatticeVector::from_i64(&c));
    }
    let mut cones = Vec::new();
    for signs in 0..(1usize << m) {
        let base: Vec<usize> = (0..m).map(|i| 2 * i + ((signs >> i) & 1)).collect();
        for skip in 0..m {
            let mut c = base.clone();
            c.extend((0..m).filter(|&j| j != skip).map(|j| 2 * m + j));
            cones.push(c);
        }
    }
    Fan::new(n, rays, cones)
}

fn adjugate(a: &IntMatrix) -> IntMatrix {
    let n = a.nrows();
    let mut adj = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<Vec<Int>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[(r, c)].clone()).collect())
                .collect();
            let minor = if n == 1 { Int::from(1) } else { IntMatrix::from_rows(n - 1, &rows).determinant() };
            adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn cone_sets(f: &Fan, map: impl Fn(usize) -> usize) -> BTreeSet<Vec<usize>> {
    f.max_cone_indices()
        .iter()
        .map(|c| {
            let mut v: Vec<usize> = c.iter().map(|&i| map(i)).collect();
            v.sort();
            v
        })
        .collect()
}

/// A unimodular `A` with `A(f) = g`, or `None`. The search fixes a
/// simplicial full-dimensional cone of `f` and tries every ordered maximal
/// cone of `g` as its image; the first hit in that order is returned.
pub fn fan_isomorphic(f: &Fan, g: &Fan) -> Result<Option<IntMatrix>> {
    for h in [f, g] {
        if h.rank() > ISOMORPHISM_MAX_RANK || h.rays().len() > ISOMORPHISM_MAX_RAYS {
            return Err(Error::unsupported(format!(
                "isomorphism search is limited to rank {ISOMORPHISM_MAX_RANK} and {ISOMORPHISM_MAX_RAYS} rays"
            )));
        }
    }
    let n = f.rank();
    if n != g.rank() || f.rays().len() != g.rays().len() || f.max_cone_indices().len() != g.max_cone_indices().len() {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(IntMatrix::identity(0)));
    }
    let sigma = f
        .max_cone_indices()
        .iter()
        .find(|c| c.len() == n && f.cone(c).dim() == n)
        .ok_or_else(|| Error::unsupported("isomorphism search needs a simplicial full-dimensional cone"))?;
    let bf = IntMatrix::from_columns(n, &sigma.iter().map(|&i| f.rays()[i].coords().to_vec()).collect::<Vec<_>>());
    let det = bf.determinant();
    let adj = adjugate(&bf);
    let g_index: HashMap<&LatticeVector, usize> = g.rays().iter().enumerate().map(|(i, r)| (r, i)).collect();
    let g_cones = cone_sets(g, |i| i);
    for tau in g.max_cone_indices().iter().filter(|c| c.len() == n) {
        for perm in permutations(tau) {
            let bg =
                IntMatrix::from_columns(n, &perm.iter().map(|&i| g.rays()[i].coords().to_vec()).collect::<Vec<_>>());
            let scaled = bg.mul(&adj);
            let mut a = IntMatrix::zeros(n, n);
            let mut integral = true;
            'entries: for r in 0..n {
                for c in 0..n {
                    let (q, rem) = scaled[(r, c)].div_rem(&det);
                    if !rem.is_zero() {
                        integral = false;
                        break 'entries;
                    }
                    a[(r, c)] = q;
                }
            }
            if !integral || !a.determinant().abs().is_one() {
                continue;
            }
            let image: Option<Vec<usize>> =
                f.rays().iter().map(|v| g_index.get(&LatticeVector::new(a.apply(v.coords()))).copied()).collect();
            let Some(image) = image else { continue };
            if cone_sets(f, |i| image[i]) == g_cones {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContactVerdict {
    ProjectiveSpace,
    ProjectivizedTangentBundle,
    NoContactStructure,
    /// The index condition holds but neither model matches.
    IndexPassesClassificationFails,
}

impl fmt::Display for ContactVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContactVerdict::ProjectiveSpace => "projective space",
            ContactVerdict::ProjectivizedTangentBundle => "projectivized tangent bundle",
            ContactVerdict::NoContactStructure => "no contact structure",
            ContactVerdict::IndexPassesClassificationFails => "index passes, classification fails",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ContactReport {
    pub index: Option<usize>,
    pub verdict: ContactVerdict,
    pub witness: Option<IntMatrix>,
}

impl fmt::Display for ContactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(k) => writeln!(f, "index: {k}")?,
            None => writeln!(f, "index: none")?,
        }
        write!(f, "isomorphic_to: {}", self.verdict)?;
        if let Some(w) = &self.witness {
            let rows: Vec<String> = w
                .to_rows()
                .iter()
                .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
                .collect();
            write!(f, "\nwitness_matrix: [{}]", rows.join(", "))?;
        }
        Ok(())
    }
}

/// Both reference models are tested independently of the index, so a
/// passing index without a matching model is reported rather than assumed
/// away.
pub fn classify_contact(f: &Fan) -> Result<ContactReport> {
    let index = contact_index_check(f)?;
    let Some(k) = index else {
        return Ok(ContactReport { index, verdict: ContactVerdict::NoContactStructure, witness: None });
    };
    if let Some(w) = fan_isomorphic(f, &Fan::projective_space(f.rank()))? {
        return Ok(ContactReport { index, verdict: ContactVerdict::ProjectiveSpace, witness: Some(w) });
    }
    if let Some(w) = fan_isomorphic(f, &projectivized_tangent_fan(k)?)? {
        return Ok(ContactReport { index, verdict: ContactVerdict::ProjectivizedTangentBundle, witness: Some(w) });
    }
    Ok(ContactReport { index, verdict: ContactVerdict::IndexPassesClassificationFails, witness: None })
}
