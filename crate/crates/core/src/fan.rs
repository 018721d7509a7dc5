//! Fans and the combinatorics of the toric varieties they define.
//!
//! A [`Fan`] keeps its rays in the order they were supplied (divisor
//! coefficients are indexed by that order) and its maximal cones as sorted
//! index lists. Equality between fans ignores both orderings: two fans are
//! equal when they have the same set of cones.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::lattice::{
    quotient_group, smith_normal_form, AbelianGroup, DualVector, Int, IntMatrix, LatticeVector, Primal,
    QuotientLattice, Rat,
};
use crate::polyhedral::cone_from_inequalities;

pub type NCone = Cone<Primal>;

#[derive(Clone)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Vec<usize>>,
    all_cones: OnceLock<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotStronglyConvex {
        cone: Vec<usize>,
    },
    /// A listed ray is not an extreme ray of the listed cone.
    RedundantRay {
        cone: Vec<usize>,
        ray: usize,
    },
    /// `σ ∩ τ` is not a face of both.
    BadIntersection {
        first: Vec<usize>,
        second: Vec<usize>,
    },
    /// A face of a listed cone is missing from an explicit cone collection.
    MissingFace {
        cone: Vec<usize>,
        face: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotStronglyConvex { cone } => write!(f, "cone {cone:?} contains a line"),
            Violation::RedundantRay { cone, ray } => write!(f, "ray {ray} is not an extreme ray of cone {cone:?}"),
            Violation::BadIntersection { first, second } => {
                write!(f, "intersection of cones {first:?} and {second:?} is not a face of both")
            }
            Violation::MissingFace { cone, face } => write!(f, "face {face} of cone {cone:?} is missing"),
        }
    }
}

/// Empty report means the cones form a fan.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Check a collection of cones against the fan axioms. With
/// `require_face_closed`, every face of every cone must itself be listed.
pub fn validate_cones(cones: &[NCone], require_face_closed: bool) -> ValidationReport {
    let mut violations = Vec::new();
    let label = |i: usize| vec![i];
    for (i, c) in cones.iter().enumerate() {
        if !c.is_strongly_convex() {
            violations.push(Violation::NotStronglyConvex { cone: label(i) });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    for i in 0..cones.len() {
        for j in i + 1..cones.len() {
            if !intersection_is_common_face(&cones[i], &cones[j]) {
                violations.push(Violation::BadIntersection { first: label(i), second: label(j) });
            }
        }
    }
    if require_face_closed {
        let listed: BTreeSet<&[LatticeVector]> = cones.iter().map(|c| c.rays()).collect();
        for (i, c) in cones.iter().enumerate() {
            for face in c.faces().expect("strongly convex") {
                if !listed.contains(face.rays()) {
                    violations.push(Violation::MissingFace { cone: label(i), face: face.to_string() });
                }
            }
        }
    }
    ValidationReport { violations }
}

fn intersection_is_common_face(a: &NCone, b: &NCone) -> bool {
    let meet = a.intersection(b).expect("equal ranks");
    meet.is_strongly_convex() && a.has_face(&meet).unwrap_or(false) && b.has_face(&meet).unwrap_or(false)
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.canonical_cones() == other.canonical_cones()
    }
}

impl Eq for Fan {}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan")
            .field("rank", &self.rank)
            .field("rays", &self.rays)
            .field("max_cones", &self.max_cones)
            .finish()
    }
}

impl Fan {
    /// Assemble without validating. Rays are made primitive; rays that no
    /// listed cone uses become one-dimensional cones of their own.
    pub fn from_parts(rank: usize, rays: Vec<LatticeVector>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        let mut prim = Vec::with_capacity(rays.len());
        for r in rays {
            Error::check_dim(rank, r.rank())?;
            prim.push(r.primitive()?);
        }
        let distinct: BTreeSet<&LatticeVector> = prim.iter().collect();
        if distinct.len() != prim.len() {
            return Err(Error::unsupported("a fan lists the same ray twice"));
        }
        let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut used = vec![false; prim.len()];
        for mut c in max_cones {
            c.sort();
            c.dedup();
            for &i in &c {
                if i >= prim.len() {
                    return Err(Error::unsupported(format!(
                        "cone refers to ray {i}, but only {} rays exist",
                        prim.len()
                    )));
                }
                used[i] = true;
            }
            cones.insert(c);
        }
        for (i, u) in used.iter().enumerate() {
            if !u {
                cones.insert(vec![i]);
            }
        }
        if cones.len() > 1 {
            cones.remove(&Vec::new());
        }
        if cones.is_empty() {
            cones.insert(Vec::new());
        }
        Ok(Fan { rank, rays: prim, max_cones: cones.into_iter().collect(), all_cones: OnceLock::new() })
    }

    /// Assemble and validate; listed cones that are faces of other listed
    /// cones are folded away.
    pub fn new(rank: usize, rays: Vec<LatticeVector>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        let mut fan = Self::from_parts(rank, rays, max_cones)?;
        let report = fan.validate();
        if !report.is_valid() {
            return Err(Error::InvalidFan(report));
        }
        let keep: Vec<Vec<usize>> = fan
            .max_cones
            .iter()
            .filter(|c| {
                !fan.max_cones.iter().any(|d| d.len() > c.len() && c.iter().all(|i| d.binary_search(i).is_ok()))
            })
            .cloned()
            .collect();
        fan.max_cones = keep;
        Ok(fan)
    }

    pub fn from_i64(rank: usize, rays: &[&[i64]], max_cones: &[&[usize]]) -> Result<Fan> {
        Self::new(
            rank,
            rays.iter().map(|r| LatticeVector::from_i64(r)).collect(),
            max_cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    /// The fan whose maximal cones are `cones`; rays are numbered in order of
    /// first appearance.
    pub fn from_cones(rank: usize, cones: &[NCone]) -> Result<Fan> {
        let mut rays: Vec<LatticeVector> = Vec::new();
        let mut index: HashMap<LatticeVector, usize> = HashMap::new();
        let mut max = Vec::new();
        for c in cones {
            Error::check_dim(rank, c.rank())?;
            if !c.is_strongly_convex() {
                return Err(Error::InvalidFan(ValidationReport {
                    violations: vec![Violation::NotStronglyConvex { cone: vec![] }],
                }));
            }
            let mut idx = Vec::new();
            for r in c.rays() {
                let i = *index.entry(r.clone()).or_insert_with(|| {
                    rays.push(r.clone());
                    rays.len() - 1
                });
                idx.push(i);
            }
            max.push(idx);
        }
        Self::new(rank, rays, max)
    }

    /// The fan `{0}` of the torus.
    pub fn trivial(rank: usize) -> Fan {
        Self::from_parts(rank, Vec::new(), Vec::new()).expect("trivial fan")
    }

    /// Affine space: the cone on the standard basis.
    pub fn affine_space(n: usize) -> Fan {
        let rays = (0..n).map(|i| LatticeVector::unit(n, i)).collect();
        Self::new(n, rays, vec![(0..n).collect()]).expect("affine space fan")
    }

    /// Rays `e_1, …, e_n, -(e_1 + … + e_n)`; maximal cones all `n`-subsets.
    pub fn projective_space(n: usize) -> Fan {
        let mut rays: Vec<LatticeVector> = (0..n).map(|i| LatticeVector::unit(n, i)).collect();
        rays.push(LatticeVector::new(vec![Int::from(-1); n]));
        let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
        Self::new(n, rays, cones).expect("projective space fan")
    }

    /// Hirzebruch surface: rays `(1,0), (0,1), (-1,a), (0,-1)`.
    pub fn hirzebruch(a: i64) -> Fan {
        Self::from_i64(2, &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
            .expect("Hirzebruch fan")
    }

    /// `(P^1)^m`.
    pub fn product_of_lines(m: usize) -> Fan {
        (0..m).fold(Fan::trivial(0), |acc, _| acc.product(&Fan::projective_space(1)))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn max_cone_indices(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn ray_index(&self, v: &LatticeVector) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    pub fn cone(&self, idx: &[usize]) -> NCone {
        Cone::new(self.rank, idx.iter().map(|&i| self.rays[i].clone()).collect()).expect("fan ray ranks agree")
    }

    pub fn max_cones(&self) -> Vec<NCone> {
        self.max_cones.iter().map(|c| self.cone(c)).collect()
    }

    /// Every cone of the fan as a ray index set, sorted by dimension then
    /// indices. `{0}` is the empty set.
    pub fn cone_indices(&self) -> &[Vec<usize>] {
        self.all_cones.get_or_init(|| {
            let mut set: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
            for m in &self.max_cones {
                let c = self.cone(m);
                let local: Vec<usize> = c.rays().iter().map(|r| self.ray_index(r).expect("fan ray")).collect();
                for face in c.face_ray_sets().expect("fan cones are strongly convex") {
                    let mut idx: Vec<usize> = face.iter().map(|&i| local[i]).collect();
                    idx.sort();
                    let dim = self.cone(&idx).dim();
                    set.insert((dim, idx));
                }
            }
            set.into_iter().map(|(_, c)| c).collect()
        })
    }

    pub fn cones(&self) -> Vec<NCone> {
        self.cone_indices().iter().map(|c| self.cone(c)).collect()
    }

    pub fn cones_of_dim(&self, d: usize) -> Vec<Vec<usize>> {
        self.cone_indices().iter().filter(|c| self.cone(c).dim() == d).cloned().collect()
    }

    /// Sorted lists of sorted ray vectors, one per maximal cone.
    pub fn canonical_cones(&self) -> Vec<Vec<LatticeVector>> {
        let mut out: Vec<Vec<LatticeVector>> = self
            .max_cones
            .iter()
            .map(|c| {
                let mut v: Vec<LatticeVector> = c.iter().map(|&i| self.rays[i].clone()).collect();
                v.sort();
                v
            })
            .collect();
        out.sort();
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let cones: Vec<NCone> = self.max_cones.iter().map(|c| self.cone(c)).collect();
        for (c, idx) in cones.iter().zip(&self.max_cones) {
            if !c.is_strongly_convex() {
                violations.push(Violation::NotStronglyConvex { cone: idx.clone() });
                continue;
            }
            for &i in idx {
                if !c.rays().contains(&self.rays[i]) {
                    violations.push(Violation::RedundantRay { cone: idx.clone(), ray: i });
                }
            }
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                if !intersection_is_common_face(&cones[i], &cones[j]) {
                    violations.push(Violation::BadIntersection {
                        first: self.max_cones[i].clone(),
                        second: self.max_cones[j].clone(),
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn is_smooth(&self) -> bool {
        self.max_cones().iter().all(Cone::is_smooth)
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_cones().iter().all(Cone::is_simplicial)
    }

    /// `|Δ| = N_R`, decided combinatorially: pure of full dimension, every
    /// codimension-one cone shared by exactly two maximal cones, and the
    /// maximal cones connected through those walls.
    pub fn is_complete(&self) -> bool {
        let n = self.rank;
        let max = self.max_cones();
        if max.iter().any(|c| c.dim() != n) {
            return false;
        }
        if n == 0 {
            return true;
        }
        let mut walls: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (mi, c) in max.iter().enumerate() {
            let local: Vec<usize> = c.rays().iter().map(|r| self.ray_index(r).expect("fan ray")).collect();
            for face in c.face_ray_sets().expect("strongly convex") {
                let mut f: Vec<usize> = face.iter().map(|&i| local[i]).collect();
                f.sort();
                if self.cone(&f).dim() + 1 == n {
                    walls.entry(f).or_default().push(mi);
                }
            }
        }
        if walls.values().any(|owners| owners.len() != 2) {
            return false;
        }
        // connectivity of the wall-adjacency graph
        let mut seen = vec![false; max.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(m) = stack.pop() {
            for owners in walls.values() {
                if owners.contains(&m) {
                    for &o in owners {
                        if !seen[o] {
                            seen[o] = true;
                            stack.push(o);
                        }
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Is `v` in the support `|Δ|`?
    pub fn support_contains(&self, v: &[Rat]) -> Result<bool> {
        Error::check_dim(self.rank, v.len())?;
        Ok(self.max_cones().iter().any(|c| c.contains(v).unwrap_or(false)))
    }

    /// Index of a maximal cone containing `v`, if any.
    pub fn locate(&self, v: &[Rat]) -> Result<Option<usize>> {
        Error::check_dim(self.rank, v.len())?;
        for (i, c) in self.max_cones().iter().enumerate() {
            if c.contains(v)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn find_cone(&self, tau: &NCone) -> Result<Vec<usize>> {
        let idx: Option<Vec<usize>> = tau.rays().iter().map(|r| self.ray_index(r)).collect();
        let mut idx = idx.ok_or_else(|| Error::UnknownCone(tau.to_string()))?;
        idx.sort();
        if tau.rank() != self.rank || !self.cone_indices().contains(&idx) {
            return Err(Error::UnknownCone(tau.to_string()));
        }
        Ok(idx)
    }

    /// `Star(τ)` as a fan in `N(τ) = N / N_τ`, which is the fan of the orbit
    /// closure `V(τ)`.
    pub fn star(&self, tau: &NCone) -> Result<OrbitRecord> {
        let idx = self.find_cone(tau)?;
        let quotient = QuotientLattice::new(self.rank, tau.rays())?;
        let mut projected = Vec::new();
        for m in &self.max_cones {
            if idx.iter().all(|i| m.binary_search(i).is_ok()) {
                let rays: Vec<LatticeVector> = m
                    .iter()
                    .filter(|i| idx.binary_search(i).is_err())
                    .map(|&i| quotient.project(&self.rays[i]))
                    .collect();
                projected.push(Cone::new(quotient.rank(), rays)?);
            }
        }
        let closure_fan = Fan::from_cones(quotient.rank(), &projected)?;
        Ok(OrbitRecord {
            cone: tau.clone(),
            cone_indices: idx,
            orbit_dim: self.rank - tau.dim(),
            quotient,
            closure_fan,
        })
    }

    /// One record per cone. Re-checks that the orbits in `U_σ` are indexed
    /// by the faces of σ, and those in `V(τ)` by the cones containing τ.
    pub fn orbit_table(&self) -> Result<Vec<OrbitRecord>> {
        use rayon::prelude::*;
        let cones = self.cone_indices().to_vec();
        let records: Vec<OrbitRecord> =
            cones.par_iter().map(|c| self.star(&self.cone(c))).collect::<Result<Vec<_>>>()?;
        for rec in &records {
            let containing = cones.iter().filter(|g| rec.cone_indices.iter().all(|i| g.contains(i))).count();
            if rec.closure_fan.cone_indices().len() != containing {
                return Err(Error::Internal(format!(
                    "orbit closure of {} has {} orbits, expected {containing}",
                    rec.cone,
                    rec.closure_fan.cone_indices().len()
                )));
            }
            let faces_in_fan = cones.iter().filter(|f| f.iter().all(|i| rec.cone_indices.contains(i))).count();
            let faces = rec.cone.face_ray_sets()?.len();
            if faces != faces_in_fan {
                return Err(Error::Internal(format!("chart of {} misses orbits", rec.cone)));
            }
            if rec.orbit_dim != rec.closure_fan.rank() {
                return Err(Error::Internal("orbit dimension mismatch".into()));
            }
        }
        Ok(records)
    }

    /// The cone with `v` in its relative interior: the limit point of
    /// `λ_v(z)` as `z → 0`. `None` when `v ∉ |Δ|`.
    pub fn one_param_limit(&self, v: &LatticeVector) -> Result<Option<NCone>> {
        Error::check_dim(self.rank, v.rank())?;
        let q = v.to_rational();
        for c in self.cone_indices() {
            let cone = self.cone(c);
            if cone.contains_in_relative_interior(&q)? {
                return Ok(Some(cone));
            }
        }
        Ok(None)
    }

    /// `N / N'`, where `N'` is generated by the lattice points of all cones.
    pub fn fundamental_group(&self) -> Result<AbelianGroup> {
        let mut gens = Vec::new();
        for c in self.max_cones() {
            let q = QuotientLattice::new(self.rank, c.rays())?;
            gens.extend((0..q.sublattice_rank()).map(|j| LatticeVector::new(q.sublattice_basis.column(j))));
        }
        quotient_group(self.rank, &gens)
    }

    /// Number of full-dimensional cones; defined for complete fans.
    pub fn euler_characteristic(&self) -> Result<usize> {
        if !self.is_complete() {
            return Err(Error::unsupported("Euler characteristic as a cone count needs a complete fan"));
        }
        Ok(self.max_cones.len())
    }

    /// `Δ × Δ'` in `N ⊕ N'`.
    pub fn product(&self, other: &Fan) -> Fan {
        let n = self.rank + other.rank;
        let mut rays: Vec<LatticeVector> = self
            .rays
            .iter()
            .map(|r| {
                let mut c = r.coords().to_vec();
                c.resize(n, Int::zero());
                LatticeVector::new(c)
            })
            .collect();
        rays.extend(other.rays.iter().map(|r| {
            let mut c = vec![Int::zero(); self.rank];
            c.extend(r.coords().iter().cloned());
            LatticeVector::new(c)
        }));
        let k = self.rays.len();
        let mut cones = Vec::new();
        for a in &self.max_cones {
            for b in &other.max_cones {
                let mut c = a.clone();
                c.extend(b.iter().map(|i| i + k));
                cones.push(c);
            }
        }
        Fan::from_parts(n, rays, cones).expect("product of fans")
    }

    /// Star subdivision at the ray through `v`.
    pub fn subdivide_at(&self, v: &LatticeVector) -> Result<Fan> {
        Error::check_dim(self.rank, v.rank())?;
        let p = v.primitive()?;
        if !self.support_contains(&p.to_rational())? {
            return Err(Error::unsupported(format!("{v} is not in the support of the fan")));
        }
        if self.ray_index(&p).is_some() {
            return Ok(self.clone());
        }
        let mut rays = self.rays.clone();
        rays.push(p.clone());
        let new_index = rays.len() - 1;
        let q = p.to_rational();
        let mut cones = Vec::new();
        for m in &self.max_cones {
            let c = self.cone(m);
            if !c.contains(&q)? {
                cones.push(m.clone());
                continue;
            }
            let d = c.dim();
            for face in c.faces()? {
                if face.dim() + 1 == d && !face.contains(&q)? {
                    let mut idx: Vec<usize> = face.rays().iter().map(|r| self.ray_index(r).expect("fan ray")).collect();
                    idx.push(new_index);
                    cones.push(idx);
                }
            }
        }
        Fan::new(self.rank, rays, cones)
    }

    /// Star subdivisions at the primitive vectors `v`, in order.
    pub fn subdivide_all(&self, vs: &[LatticeVector]) -> Result<Fan> {
        vs.iter().try_fold(self.clone(), |f, v| f.subdivide_at(v))
    }

    /// Does `matrix` (rank(target) x rank(self)) carry every cone of `self`
    /// into some cone of `target`?
    pub fn maps_into(&self, target: &Fan, matrix: &IntMatrix) -> bool {
        if matrix.ncols() != self.rank || matrix.nrows() != target.rank {
            return false;
        }
        let targets = target.max_cones();
        self.max_cones.iter().all(|m| {
            let images: Vec<Vec<Rat>> =
                m.iter().map(|&i| LatticeVector::new(matrix.apply(self.rays[i].coords())).to_rational()).collect();
            targets.iter().any(|t| images.iter().all(|x| t.contains(x).unwrap_or(false)))
        })
    }
}

/// Orbit `O_τ`, its closure `V(τ) = X(Star(τ))` and the quotient `N(τ)`.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub cone: NCone,
    pub cone_indices: Vec<usize>,
    pub orbit_dim: usize,
    pub quotient: QuotientLattice,
    pub closure_fan: Fan,
}

/// A full-dimensional lattice polytope in `M_R`, or a lower-dimensional one
/// with its affine dimension recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    rank: usize,
    vertices: Vec<DualVector>,
    dimension: usize,
}

impl LatticePolytope {
    /// Convex hull of `points`; only the extreme points are kept.
    pub fn new(rank: usize, points: Vec<DualVector>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Degenerate("a polytope needs at least one point".into()));
        }
        for p in &points {
            Error::check_dim(rank, p.rank())?;
        }
        let lifted: Vec<DualVector> = points
            .iter()
            .map(|p| {
                let mut c = p.coords().to_vec();
                c.push(Int::one());
                DualVector::new(c)
            })
            .collect();
        let hull = Cone::new(rank + 1, lifted)?;
        let mut vertices: Vec<DualVector> = hull
            .rays()
            .iter()
            .map(|r| {
                let c = r.coords();
                debug_assert!(c[rank].is_one());
                DualVector::new(c[..rank].to_vec())
            })
            .collect();
        vertices.sort();
        let dimension = hull.dim() - 1;
        Ok(LatticePolytope { rank, vertices, dimension })
    }

    pub fn from_i64(rank: usize, points: &[&[i64]]) -> Result<Self> {
        Self::new(rank, points.iter().map(|p| DualVector::from_i64(p)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[DualVector] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Inner normal fan: the cone of a face `Q` collects the `v` on which
    /// `<·, v>` is minimized along `Q`.
    pub fn normal_fan(&self) -> Result<Fan> {
        if self.dimension != self.rank {
            return Err(Error::unsupported(format!(
                "normal fan needs a full-dimensional polytope, got dimension {} in rank {}",
                self.dimension, self.rank
            )));
        }
        let mut cones = Vec::new();
        for w in &self.vertices {
            let edges: Vec<DualVector> = self.vertices.iter().filter(|u| *u != w).map(|u| u - w).collect();
            cones.push(Cone::new(self.rank, edges)?.dual());
        }
        Fan::from_cones(self.rank, &cones)
    }

    /// The facet inequalities `<u, v> >= b` as `(v, b)`.
    pub fn inequalities(&self) -> Vec<(LatticeVector, Int)> {
        let lifted: Vec<Vec<Int>> = self
            .vertices
            .iter()
            .map(|p| {
                let mut c = p.coords().to_vec();
                c.push(Int::one());
                c
            })
            .collect();
        let dual = cone_from_inequalities(self.rank + 1, &lifted);
        dual.rays.iter().map(|r| (LatticeVector::new(r[..self.rank].to_vec()), -r[self.rank].clone())).collect()
    }
}

fn half(v: &LatticeVector) -> u8 {
    let (x, y) = (&v.coords()[0], &v.coords()[1]);
    if y.is_positive() || (y.is_zero() && x.is_positive()) {
        0
    } else {
        1
    }
}

fn cross(a: &LatticeVector, b: &LatticeVector) -> Int {
    &a.coords()[0] * &b.coords()[1] - &a.coords()[1] * &b.coords()[0]
}

/// Counter-clockwise angular order starting from the positive x-axis.
fn angular_cmp(a: &LatticeVector, b: &LatticeVector) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| {
        let c = cross(a, b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Where the blow-down sequence of a smooth complete toric surface ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinimalSurface {
    ProjectivePlane,
    /// Hirzebruch surface `F_a`.
    Hirzebruch(u64),
}

impl fmt::Display for MinimalSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinimalSurface::ProjectivePlane => write!(f, "P2"),
            MinimalSurface::Hirzebruch(a) => write!(f, "F{a}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceClassification {
    /// Rays removed, in order; each satisfied `v_j = v_{j-1} + v_{j+1}`.
    pub removed: Vec<LatticeVector>,
    pub terminal: MinimalSurface,
    pub terminal_fan: Fan,
}

fn surface_fan(rays: &[LatticeVector]) -> Result<Fan> {
    let d = rays.len();
    Fan::new(2, rays.to_vec(), (0..d).map(|i| vec![i, (i + 1) % d]).collect())
}

/// The integers `a_i` with `v_{i-1} + v_{i+1} = a_i v_i`, cyclic order.
fn self_intersection_data(rays: &[LatticeVector]) -> Vec<Int> {
    let d = rays.len();
    (0..d)
        .map(|i| {
            let s = &rays[(i + d - 1) % d] + &rays[(i + 1) % d];
            let v = &rays[i];
            let k = if v.coords()[0].is_zero() { 1 } else { 0 };
            &s.coords()[k] / &v.coords()[k]
        })
        .collect()
}

impl Fan {
    /// Rays of a rank-2 fan in counter-clockwise order.
    pub fn cyclic_rays(&self) -> Result<Vec<LatticeVector>> {
        if self.rank != 2 {
            return Err(Error::unsupported("cyclic ray order is defined in rank 2"));
        }
        let mut r = self.rays.clone();
        r.sort_by(angular_cmp);
        Ok(r)
    }

    /// Blow down rays with `v_j = v_{j-1} + v_{j+1}` until `P^2` or a
    /// Hirzebruch surface remains. A sequence ending at `P^2` is used when one
    /// exists; otherwise the lexicographically smallest removable ray goes
    /// first at every step.
    pub fn classify_smooth_surface(&self) -> Result<SurfaceClassification> {
        if self.rank != 2 || !self.is_complete() || !self.is_smooth() {
            return Err(Error::unsupported("surface classification needs a smooth complete rank-2 fan"));
        }
        let mut rays = self.cyclic_rays()?;
        let order = match plane_sequence(&rays, &mut HashSet::new()) {
            Some(order) => order,
            None => greedy_sequence(&rays),
        };
        let mut removed = Vec::new();
        for v in order {
            let j = rays.iter().position(|r| *r == v).expect("removed ray is present");
            removed.push(rays.remove(j));
        }
        let terminal = match rays.len() {
            3 => MinimalSurface::ProjectivePlane,
            4 => {
                let a = self_intersection_data(&rays).iter().map(|x| x.abs()).max().expect("four rays");
                MinimalSurface::Hirzebruch(a.to_u64().expect("small"))
            }
            d => return Err(Error::Internal(format!("no removable ray among {d} rays"))),
        };
        Ok(SurfaceClassification { removed, terminal, terminal_fan: surface_fan(&rays)? })
    }
}

/// Indices `j` with `v_j = v_{j-1} + v_{j+1}`, smallest ray first.
fn removable_rays(rays: &[LatticeVector]) -> Vec<usize> {
    let d = rays.len();
    let mut out: Vec<usize> = (0..d).filter(|&j| &rays[(j + d - 1) % d] + &rays[(j + 1) % d] == rays[j]).collect();
    out.sort_by(|&a, &b| rays[a].cmp(&rays[b]));
    out
}

/// A blow-down order reaching three rays, searched depth first with
/// dead ends remembered by ray set.
fn plane_sequence(rays: &[LatticeVector], dead: &mut HashSet<Vec<LatticeVector>>) -> Option<Vec<LatticeVector>> {
    if rays.len() == 3 {
        return Some(Vec::new());
    }
    let mut key = rays.to_vec();
    key.sort();
    if dead.contains(&key) {
        return None;
    }
    for j in removable_rays(rays) {
        let mut next = rays.to_vec();
        let v = next.remove(j);
        if let Some(mut rest) = plane_sequence(&next, dead) {
            rest.insert(0, v);
            return Some(rest);
        }
    }
    dead.insert(key);
    None
}

fn greedy_sequence(rays: &[LatticeVector]) -> Vec<LatticeVector> {
    let mut rays = rays.to_vec();
    let mut out = Vec::new();
    while rays.len() > 3 {
        let Some(&j) = removable_rays(&rays).first() else { break };
        out.push(rays.remove(j));
    }
    out
}

/// Hirzebruch–Jung continued fraction `m/k = a_1 - 1/(a_2 - 1/(…))`,
/// all `a_i >= 2`. Requires `0 < k < m`, `gcd(m, k) = 1`.
pub fn hirzebruch_jung(m: &Int, k: &Int) -> Vec<Int> {
    let (mut m, mut k) = (m.clone(), k.clone());
    let mut out = Vec::new();
    while !k.is_zero() {
        let a = m.div_ceil(&k);
        out.push(a.clone());
        let r = &a * &k - &m;
        m = k;
        k = r;
    }
    out
}

/// Minimal resolution of a two-dimensional cone: the rays
/// `u_{i+1} = a_i u_i - u_{i-1}` from the Hirzebruch–Jung expansion, in the
/// normal form `(e_2, m e_1 - k e_2)`, carried back to the input frame.
pub fn resolve_2d(c: &NCone) -> Result<Fan> {
    if c.rank() != 2 || !c.is_strongly_convex() || !c.is_full_dimensional() {
        return Err(Error::unsupported("resolve_2d needs a strongly convex full-dimensional cone in rank 2"));
    }
    let (mut v1, mut v2) = (c.rays()[0].clone(), c.rays()[1].clone());
    if cross(&v2, &v1).is_negative() {
        std::mem::swap(&mut v1, &mut v2);
    }
    // Frame (w, v1) with det 1, so that v2 = m w - k v1.
    let (x, y) = (v1.coords()[0].clone(), v1.coords()[1].clone());
    let eg = x.extended_gcd(&y);
    let w0 = LatticeVector::new(vec![eg.y.clone(), -eg.x.clone()]);
    debug_assert!(cross(&w0, &v1).is_one());
    let m = cross(&v2, &v1);
    // w -> w + t v1 moves k by t m; bring it into [0, m).
    let k0 = -cross(&w0, &v2);
    let w = &w0 + &v1.scale(&-k0.div_floor(&m));
    let k = -cross(&w, &v2);
    debug_assert!(!k.is_negative() && k < m);
    // frame: e1 -> w, e2 -> v1
    let to_input = |p: &(Int, Int)| {
        LatticeVector::new(vec![
            &p.0 * &w.coords()[0] + &p.1 * &v1.coords()[0],
            &p.0 * &w.coords()[1] + &p.1 * &v1.coords()[1],
        ])
    };
    let mut chain: Vec<(Int, Int)> = vec![(Int::zero(), Int::one()), (Int::one(), Int::zero())];
    for a in hirzebruch_jung(&m, &k) {
        let n = chain.len();
        let (p, q) = (&chain[n - 1], &chain[n - 2]);
        let next = (&a * &p.0 - &q.0, &a * &p.1 - &q.1);
        chain.push(next);
    }
    debug_assert_eq!(chain.last().unwrap(), &(m.clone(), -k.clone()));
    let rays: Vec<LatticeVector> = chain.iter().map(to_input).collect();
    let cones = (0..rays.len() - 1).map(|i| vec![i, i + 1]).collect();
    Fan::new(2, rays, cones)
}

/// `P(d_0, …, d_n)` with its lattice `Z^{n+1} / Z(d_0, …, d_n)` re-embedded
/// as `Z^n` through `projection`.
#[derive(Clone, Debug)]
pub struct WeightedProjectiveSpace {
    pub weights: Vec<u64>,
    pub fan: Fan,
    /// `n x (n+1)`, kernel spanned by the weight vector.
    pub projection: IntMatrix,
}

pub fn weighted_projective_fan(weights: &[u64]) -> Result<WeightedProjectiveSpace> {
    if weights.len() < 2 || weights.contains(&0) {
        return Err(Error::unsupported("weighted projective space needs at least two positive weights"));
    }
    let w: Vec<Int> = weights.iter().map(|&d| Int::from(d)).collect();
    let g = w.iter().fold(Int::zero(), |g, x| g.gcd(x));
    if !g.is_one() {
        return Err(Error::unsupported(format!("weights {weights:?} have common factor {g}")));
    }
    let n = weights.len() - 1;
    let projection = match weights.iter().position(|&d| d == 1) {
        // e_i, i != i0, stay a basis and e_{i0} = -Σ d_i e_i.
        Some(i0) => {
            let mut p = IntMatrix::zeros(n, n + 1);
            let mut row = 0;
            for i in 0..=n {
                if i == i0 {
                    continue;
                }
                p[(row, i)] = Int::one();
                p[(row, i0)] = -w[i].clone();
                row += 1;
            }
            p
        }
        None => {
            let col = IntMatrix::from_columns(n + 1, std::slice::from_ref(&w));
            let snf = smith_normal_form(&col);
            IntMatrix::from_rows(n + 1, &(1..=n).map(|i| snf.u.row(i)).collect::<Vec<_>>())
        }
    };
    debug_assert!(projection.apply(&w).iter().all(Zero::is_zero));
    let rays: Vec<LatticeVector> = (0..=n).map(|i| LatticeVector::new(projection.column(i))).collect();
    let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    let fan = Fan::new(n, rays, cones)?;
    Ok(WeightedProjectiveSpace { weights: weights.to_vec(), fan, projection })
}

/// Interchange document for fans: `rank`, `rays`, `max_cones` (0-based ray
/// indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDocument {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanDocument {
    pub fn to_fan_unchecked(&self) -> Result<Fan> {
        Fan::from_parts(
            self.rank,
            self.rays.iter().map(|r| LatticeVector::from_i64(r)).collect(),
            self.max_cones.clone(),
        )
    }

    pub fn from_fan(f: &Fan) -> Result<Self> {
        let rays = f
            .rays()
            .iter()
            .map(|r| r.to_i64().ok_or_else(|| Error::unsupported("ray coordinate exceeds 64 bits")))
            .collect::<Result<Vec<_>>>()?;
        let max_cones = f.max_cone_indices().iter().filter(|c| !c.is_empty() || f.rays().is_empty()).cloned().collect();
        Ok(FanDocument { rank: f.rank(), rays, max_cones })
    }
}

/// Interchange document for lattice polytopes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDocument {
    pub rank: usize,
    pub vertices: Vec<Vec<i64>>,
}

impl PolytopeDocument {
    pub fn to_polytope(&self) -> Result<LatticePolytope> {
        LatticePolytope::new(self.rank, self.vertices.iter().map(|v| DualVector::from_i64(v)).collect())
    }
}
