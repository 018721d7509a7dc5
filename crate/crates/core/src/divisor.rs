//! Torus-invariant divisors, their support functions and polytopes.
//!
//! Sign convention: a divisor `D = Σ a_i D_i` has support function with
//! `Ψ_D(v_i) = -a_i` and polytope `P_D = {u : <u, v_i> >= -a_i}`. On a
//! maximal cone σ the local datum `u(σ)` solves `<u(σ), v_i> = -a_i` for the
//! rays of σ, so `D` is locally `div(χ^{-u(σ)})`. With this convention the
//! hyperplane class on `P^2` has the unit simplex as its polytope.
//!
//! ```
//! use toric::divisor::{TWeilDivisor, divisor_polytope};
//! use toric::fan::Fan;
//!
//! let p2 = Fan::projective_space(2);
//! let d = TWeilDivisor::from_i64(&p2, &[0, 0, 1]).unwrap();
//! let c = d.to_cartier().unwrap();
//! assert!(c.is_ample().unwrap());
//! let p = divisor_polytope(&d).unwrap();
//! assert_eq!(p.lattice_points.unwrap().len(), 3);
//! ```

use std::fmt;

use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fan::{Fan, LatticePolytope};
use crate::lattice::solve_integer;
use crate::lattice::{
    dot, dot_rat, smith_normal_form, AbelianGroup, DualVector, Int, IntMatrix, LatticeVector, Rat, SmithForm,
};
use crate::polyhedral::cone_from_inequalities;

/// Most lattice points a bounding box may hold before enumeration refuses.
pub const LATTICE_POINT_LIMIT: u64 = 10_000_000;

/// `Σ a_i D_i`, one coefficient per ray in the fan's ray order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TWeilDivisor {
    fan: Fan,
    coeffs: Vec<Int>,
}

impl TWeilDivisor {
    pub fn new(fan: &Fan, coeffs: Vec<Int>) -> Result<Self> {
        Error::check_dim(fan.rays().len(), coeffs.len())?;
        Ok(TWeilDivisor { fan: fan.clone(), coeffs })
    }

    pub fn from_i64(fan: &Fan, coeffs: &[i64]) -> Result<Self> {
        Self::new(fan, coeffs.iter().map(|&a| Int::from(a)).collect())
    }

    pub fn zero(fan: &Fan) -> Self {
        TWeilDivisor { fan: fan.clone(), coeffs: vec![Int::zero(); fan.rays().len()] }
    }

    /// The prime divisor `D_i`.
    pub fn prime(fan: &Fan, i: usize) -> Self {
        let mut d = Self::zero(fan);
        d.coeffs[i] = Int::one();
        d
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &TWeilDivisor) -> Result<TWeilDivisor> {
        if self.fan != other.fan || self.fan.rays() != other.fan.rays() {
            return Err(Error::unsupported("divisors live on different fans"));
        }
        Ok(TWeilDivisor {
            fan: self.fan.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, k: &Int) -> TWeilDivisor {
        TWeilDivisor { fan: self.fan.clone(), coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn to_cartier(&self) -> Result<TCartierData> {
        cartier_from_weil(self)
    }
}

impl fmt::Display for TWeilDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| format!("{a}*D{}", i + 1))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// `div(χ^u) = Σ <u, v_i> D_i`.
pub fn div_of_character(f: &Fan, u: &DualVector) -> Result<TWeilDivisor> {
    Error::check_dim(f.rank(), u.rank())?;
    let coeffs = f.rays().iter().map(|v| dot(u.coords(), v.coords())).collect();
    TWeilDivisor::new(f, coeffs)
}

/// The all `-1` divisor `K = -Σ D_i`.
pub fn canonical_divisor(f: &Fan) -> TWeilDivisor {
    TWeilDivisor { fan: f.clone(), coeffs: vec![Int::from(-1); f.rays().len()] }
}

/// `Div_T(X) / M`, the cokernel of `u ↦ (<u, v_i>)_i`.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    fan: Fan,
    group: AbelianGroup,
    snf: SmithForm,
    rank: usize,
}

/// A class in the Smith presentation of [`ClassGroup`]: free coordinates,
/// then residues modulo each torsion factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassElement {
    pub free: Vec<Int>,
    pub torsion: Vec<Int>,
}

impl ClassElement {
    pub fn is_zero(&self) -> bool {
        self.free.iter().chain(&self.torsion).all(Zero::is_zero)
    }
}

impl fmt::Display for ClassElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.free.iter().chain(&self.torsion).map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn class_group(f: &Fan) -> Result<ClassGroup> {
    let a = IntMatrix::from_rows(f.rank(), &f.rays().iter().map(|v| v.coords().to_vec()).collect::<Vec<_>>());
    let snf = smith_normal_form(&a);
    let rank = snf.rank();
    if rank != f.rank() {
        return Err(Error::unsupported("class group needs rays spanning N_R"));
    }
    let diag = snf.diagonal();
    let group = AbelianGroup {
        free_rank: f.rays().len() - rank,
        torsion: diag.iter().filter(|d| !d.is_one()).cloned().collect(),
    };
    Ok(ClassGroup { fan: f.clone(), group, snf, rank })
}

impl ClassGroup {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn class_of(&self, d: &TWeilDivisor) -> Result<ClassElement> {
        Error::check_dim(self.snf.u.ncols(), d.coeffs.len())?;
        let y = self.snf.u.apply(&d.coeffs);
        let diag = self.snf.diagonal();
        let torsion = (0..self.rank).filter(|&i| !diag[i].is_one()).map(|i| y[i].mod_floor(&diag[i])).collect();
        Ok(ClassElement { free: y[self.rank..].to_vec(), torsion })
    }

    /// A divisor in the class `c`.
    pub fn representative(&self, c: &ClassElement) -> Result<TWeilDivisor> {
        Error::check_dim(self.group.free_rank, c.free.len())?;
        Error::check_dim(self.group.torsion.len(), c.torsion.len())?;
        let diag = self.snf.diagonal();
        let mut y = vec![Int::zero(); self.snf.u.nrows()];
        let mut t = c.torsion.iter();
        for (i, d) in diag.iter().enumerate().take(self.rank) {
            if !d.is_one() {
                y[i] = t.next().expect("torsion coordinate").clone();
            }
        }
        y[self.rank..].clone_from_slice(&c.free);
        TWeilDivisor::new(&self.fan, self.snf.u_inv.apply(&y))
    }

    /// Is `c = k x` for some class `x`?
    pub fn is_divisible(&self, c: &ClassElement, k: &Int) -> bool {
        c.free.iter().all(|x| x.is_multiple_of(k))
            && c.torsion.iter().zip(&self.group.torsion).all(|(x, d)| x.is_multiple_of(&k.gcd(d)))
    }
}

/// Local characters `u(σ)` of a Cartier divisor, one per maximal cone in
/// the order of [`Fan::max_cone_indices`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TCartierData {
    divisor: TWeilDivisor,
    local: Vec<DualVector>,
}

pub fn cartier_from_weil(d: &TWeilDivisor) -> Result<TCartierData> {
    let f = &d.fan;
    let mut local = Vec::new();
    for cone in f.max_cone_indices() {
        let rows: Vec<Vec<Int>> = cone.iter().map(|&i| f.rays()[i].coords().to_vec()).collect();
        let b: Vec<Int> = cone.iter().map(|&i| -d.coeffs[i].clone()).collect();
        let u = solve_integer(&IntMatrix::from_rows(f.rank(), &rows), &b)
            .ok_or_else(|| Error::NotCartier { cone: cone.clone() })?;
        local.push(DualVector::new(u));
    }
    let data = TCartierData { divisor: d.clone(), local };
    data.check_overlaps()?;
    Ok(data)
}

impl TCartierData {
    pub fn divisor(&self) -> &TWeilDivisor {
        &self.divisor
    }

    pub fn fan(&self) -> &Fan {
        &self.divisor.fan
    }

    pub fn local_data(&self) -> &[DualVector] {
        &self.local
    }

    fn check_overlaps(&self) -> Result<()> {
        let cones = self.fan().max_cone_indices();
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let diff = &self.local[i] - &self.local[j];
                for r in cones[i].iter().filter(|r| cones[j].contains(r)) {
                    if !dot(diff.coords(), self.fan().rays()[*r].coords()).is_zero() {
                        return Err(Error::Internal(format!("local data of cones {i} and {j} disagree")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn support_function(&self) -> SupportFunction<'_> {
        SupportFunction { cartier: self }
    }

    fn require_full_dimensional(&self, what: &str) -> Result<()> {
        if self.fan().max_cones().iter().all(|c| c.is_full_dimensional()) {
            Ok(())
        } else {
            Err(Error::unsupported(format!("{what} needs all maximal cones full-dimensional")))
        }
    }

    /// `<u(σ), v_j> - (-a_j)` for every maximal σ and ray `j`.
    fn slack(&self) -> Vec<Vec<Int>> {
        let f = self.fan();
        self.local
            .iter()
            .map(|u| f.rays().iter().zip(&self.divisor.coeffs).map(|(v, a)| dot(u.coords(), v.coords()) + a).collect())
            .collect()
    }

    /// `Ψ_D` convex, i.e. `u(σ) ∈ P_D` for every maximal σ.
    pub fn is_basepoint_free(&self) -> Result<bool> {
        self.require_full_dimensional("basepoint-freeness")?;
        Ok(self.slack().iter().flatten().all(|s| !s.is_negative()))
    }

    /// Strictly convex: additionally `<u(σ), v_j> > -a_j` for rays off σ.
    pub fn is_ample(&self) -> Result<bool> {
        if !self.fan().is_complete() {
            return Err(Error::unsupported("ampleness test needs a complete fan"));
        }
        let cones = self.fan().max_cone_indices();
        Ok(self.slack().iter().zip(cones).all(|(row, cone)| {
            row.iter().enumerate().all(|(j, s)| if cone.contains(&j) { s.is_zero() } else { s.is_positive() })
        }))
    }

    /// Ample, and on every maximal σ the differences `u - u(σ)`,
    /// `u ∈ P_D ∩ M`, generate `σ^∨ ∩ M`.
    pub fn is_very_ample(&self) -> Result<bool> {
        if !self.is_ample()? {
            return Ok(false);
        }
        let poly = divisor_polytope(&self.divisor)?;
        let points = poly.lattice_points.ok_or_else(|| Error::Internal("ample polytope is unbounded".into()))?;
        for (cone, u) in self.fan().max_cones().iter().zip(&self.local) {
            let diffs: std::collections::BTreeSet<DualVector> = points.iter().map(|p| p - u).collect();
            if !cone.dual().hilbert_basis()?.elements.iter().all(|h| diffs.contains(h)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Card(P_D ∩ M)`, which is both `h^0(O(D))` and `χ(O(D))` when `D` is
    /// basepoint-free on a complete fan.
    pub fn euler_sections_identity(&self) -> Result<SectionsReport> {
        if !self.fan().is_complete() {
            return Err(Error::unsupported("sections identity needs a complete fan"));
        }
        if !self.is_basepoint_free()? {
            return Err(Error::unsupported(
                "higher cohomology is not computed for divisors that are not basepoint-free",
            ));
        }
        let poly = divisor_polytope(&self.divisor)?;
        let n = poly.lattice_points.map(|p| p.len()).ok_or_else(|| Error::Internal("unbounded polytope".into()))?;
        Ok(SectionsReport { h0: n, euler_characteristic: n as i64 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectionsReport {
    pub h0: usize,
    pub euler_characteristic: i64,
}

/// `Ψ_D(v) = <u(σ), v>` for `v ∈ σ`.
#[derive(Clone, Copy, Debug)]
pub struct SupportFunction<'a> {
    cartier: &'a TCartierData,
}

impl SupportFunction<'_> {
    pub fn evaluate(&self, v: &[Rat]) -> Result<Rat> {
        let f = self.cartier.fan();
        let i = f.locate(v)?.ok_or_else(|| Error::OutOfSupport(format!("{v:?}")))?;
        Ok(dot_rat(self.cartier.local[i].coords(), v))
    }

    pub fn evaluate_lattice(&self, v: &LatticeVector) -> Result<Int> {
        let r = self.evaluate(&v.to_rational())?;
        debug_assert!(r.is_integer());
        Ok(r.to_integer())
    }
}

/// `P_D = {u : <u, v_i> >= -a_i}` with its vertices and, when bounded, its
/// lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorPolytope {
    pub rank: usize,
    /// `(v_i, -a_i)`: the constraint `<u, v_i> >= -a_i`.
    pub inequalities: Vec<(LatticeVector, Int)>,
    /// Sorted extreme points.
    pub vertices: Vec<Vec<Rat>>,
    pub bounded: bool,
    /// `None` when unbounded.
    pub lattice_points: Option<Vec<DualVector>>,
}

impl DivisorPolytope {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, u: &[Rat]) -> bool {
        self.inequalities.iter().all(|(v, b)| dot_rat(v.coords(), u) >= Rat::from_integer(b.clone()))
    }

    /// Least slack `<u, v_i> + a_i`, in floating point.
    pub fn min_slack_f64(&self, u: &[f64]) -> f64 {
        self.inequalities
            .iter()
            .map(|(v, b)| {
                let s: f64 = v.coords().iter().zip(u).map(|(x, y)| x.to_f64().unwrap_or(f64::NAN) * y).sum();
                s - b.to_f64().unwrap_or(f64::NAN)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn divisor_polytope(d: &TWeilDivisor) -> Result<DivisorPolytope> {
    let f = &d.fan;
    let n = f.rank();
    let spans = {
        let rows: Vec<Vec<Int>> = f.rays().iter().map(|v| v.coords().to_vec()).collect();
        crate::lattice::rank_of_rows(&rows) == n
    };
    if !spans {
        return Err(Error::unsupported("divisor polytope needs rays spanning N_R"));
    }
    // Homogenize: (u, t) with <u, v_i> + a_i t >= 0 and t >= 0.
    let mut ineqs: Vec<Vec<Int>> = f
        .rays()
        .iter()
        .zip(&d.coeffs)
        .map(|(v, a)| {
            let mut row = v.coords().to_vec();
            row.push(a.clone());
            row
        })
        .collect();
    let mut t = vec![Int::zero(); n + 1];
    t[n] = Int::one();
    ineqs.push(t);
    let gens = cone_from_inequalities(n + 1, &ineqs);
    debug_assert!(gens.lines.is_empty());
    let mut vertices = Vec::new();
    let mut bounded = true;
    for r in &gens.rays {
        if r[n].is_zero() {
            bounded = false;
        } else {
            let den = r[n].clone();
            vertices.push(r[..n].iter().map(|x| Rat::new(x.clone(), den.clone())).collect::<Vec<Rat>>());
        }
    }
    vertices.sort();
    if vertices.is_empty() {
        bounded = true;
    }
    let inequalities: Vec<(LatticeVector, Int)> =
        f.rays().iter().zip(&d.coeffs).map(|(v, a)| (v.clone(), -a.clone())).collect();
    let lattice_points = if bounded { Some(enumerate_lattice_points(n, &inequalities, &vertices)?) } else { None };
    Ok(DivisorPolytope { rank: n, inequalities, vertices, bounded, lattice_points })
}

fn enumerate_lattice_points(
    n: usize,
    ineqs: &[(LatticeVector, Int)],
    vertices: &[Vec<Rat>],
) -> Result<Vec<DualVector>> {
    if vertices.is_empty() {
        return Ok(Vec::new());
    }
    let lo: Vec<Int> = (0..n).map(|j| vertices.iter().map(|v| v[j].ceil().to_integer()).min().unwrap()).collect();
    let hi: Vec<Int> = (0..n).map(|j| vertices.iter().map(|v| v[j].floor().to_integer()).max().unwrap()).collect();
    let mut count: u64 = 1;
    for (a, b) in lo.iter().zip(&hi) {
        if b < a {
            return Ok(Vec::new());
        }
        let width = (b - a + Int::one()).to_u64().unwrap_or(u64::MAX);
        count = count.saturating_mul(width);
    }
    if count > LATTICE_POINT_LIMIT {
        return Err(Error::unsupported(format!("bounding box holds {count} points, above the enumeration limit")));
    }
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        if ineqs.iter().all(|(v, b)| dot(v.coords(), &cur) >= *b) {
            out.push(DualVector::new(cur.clone()));
        }
        let mut j = 0;
        loop {
            if j == n {
                out.sort();
                return Ok(out);
            }
            if cur[j] < hi[j] {
                cur[j] += 1;
                break;
            }
            cur[j] = lo[j].clone();
            j += 1;
        }
    }
}

/// Cartier data of the divisor whose polytope is `p`, read off from `p`'s
/// vertices: `Ψ(v) = min_{u ∈ P} <u, v>`, linear on every cone of `f`.
pub fn psi_from_polytope(p: &LatticePolytope, f: &Fan) -> Result<TCartierData> {
    Error::check_dim(f.rank(), p.rank())?;
    let mins: Vec<Int> = f
        .rays()
        .iter()
        .map(|v| p.vertices().iter().map(|u| dot(u.coords(), v.coords())).min().expect("nonempty polytope"))
        .collect();
    let mut local = Vec::new();
    for cone in f.max_cone_indices() {
        let u = p
            .vertices()
            .iter()
            .find(|u| cone.iter().all(|&i| dot(u.coords(), f.rays()[i].coords()) == mins[i]))
            .ok_or_else(|| Error::IncompatibleFan { cone: cone.clone() })?;
        local.push(u.clone());
    }
    let divisor = TWeilDivisor::new(f, mins.into_iter().map(|m| -m).collect())?;
    Ok(TCartierData { divisor, local })
}

pub fn format_rational(q: &Rat) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
