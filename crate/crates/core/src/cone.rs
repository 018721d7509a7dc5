//! Rational polyhedral cones, their duals and faces, and the semigroups of
//! lattice points they carry.
//!
//! A [`Cone`] is stored through a canonical minimal generating set, so two
//! cones are equal exactly when they are the same subset of `V`. Strongly
//! convex cones are generated by their primitive extreme rays; a cone that
//! contains a line additionally lists `±b` for a canonical lattice basis `b`
//! of its lineality space.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    dot, dot_rat, integer_kernel, rank_of_rows, smith_normal_form, Int, IntMatrix, QuotientLattice, Rat, Side, Vector,
};
use crate::polyhedral::{cone_from_inequalities, ConeGenerators};

#[derive(Clone)]
pub struct Cone<S: Side> {
    rank: usize,
    rays: Vec<Vector<S>>,
    lineality: Vec<Vector<S>>,
    dual: OnceLock<ConeGenerators>,
}

impl<S: Side> PartialEq for Cone<S> {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays
    }
}

impl<S: Side> Eq for Cone<S> {}

impl<S: Side> Hash for Cone<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.rays.hash(state);
    }
}

impl<S: Side> PartialOrd for Cone<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Side> Ord for Cone<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rank, &self.rays).cmp(&(other.rank, &other.rays))
    }
}

impl<S: Side> fmt::Debug for Cone<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<S: Side> fmt::Display for Cone<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cone{{")?;
        for (i, r) in self.rays.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}")
    }
}

fn independent<S: Side>(vs: &[Vector<S>]) -> bool {
    let rows: Vec<Vec<Int>> = vs.iter().map(|v| v.coords().to_vec()).collect();
    rank_of_rows(&rows) == vs.len()
}

impl<S: Side> Cone<S> {
    /// The cone generated by `generators`; zero generators are ignored and
    /// redundant ones dropped.
    pub fn new(rank: usize, generators: Vec<Vector<S>>) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            Error::check_dim(rank, g.rank())?;
            if !g.is_zero() {
                gens.push(g.primitive()?);
            }
        }
        gens.sort();
        gens.dedup();
        if independent(&gens) {
            return Ok(Self::from_extreme_rays(rank, gens));
        }
        let ineqs: Vec<Vec<Int>> = gens.iter().map(|g| g.coords().to_vec()).collect();
        let dual = cone_from_inequalities(rank, &ineqs);
        let own = cone_from_inequalities(rank, &generator_list(&dual));
        let cone = Self::from_generators(rank, &own);
        let _ = cone.dual.set(dual);
        Ok(cone)
    }

    pub fn from_i64<R: AsRef<[i64]>>(rank: usize, generators: &[R]) -> Result<Self> {
        Self::new(rank, generators.iter().map(|g| Vector::from_i64(g.as_ref())).collect())
    }

    /// The cone `{0}`.
    pub fn zero(rank: usize) -> Self {
        Self::from_extreme_rays(rank, Vec::new())
    }

    pub fn whole_space(rank: usize) -> Self {
        let lines: Vec<Vec<Int>> = (0..rank).map(|i| Vector::<S>::unit(rank, i).into_coords()).collect();
        Self::from_generators(rank, &ConeGenerators { lines, rays: Vec::new() })
    }

    /// Trusted constructor: primitive extreme rays of a strongly convex cone.
    pub(crate) fn from_extreme_rays(rank: usize, mut rays: Vec<Vector<S>>) -> Self {
        rays.sort();
        Cone { rank, rays, lineality: Vec::new(), dual: OnceLock::new() }
    }

    fn from_generators(rank: usize, g: &ConeGenerators) -> Self {
        let mut rays: Vec<Vector<S>> = g.rays.iter().map(|r| Vector::new(r.clone())).collect();
        for l in &g.lines {
            let v = Vector::new(l.clone());
            rays.push(-&v);
            rays.push(v);
        }
        rays.sort();
        let lineality = g.lines.iter().map(|l| Vector::new(l.clone())).collect();
        Cone { rank, rays, lineality, dual: OnceLock::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Canonical minimal generators, sorted lexicographically.
    pub fn rays(&self) -> &[Vector<S>] {
        &self.rays
    }

    pub fn lineality(&self) -> &[Vector<S>] {
        &self.lineality
    }

    pub fn dim(&self) -> usize {
        rank_of_rows(&self.ray_rows())
    }

    fn ray_rows(&self) -> Vec<Vec<Int>> {
        self.rays.iter().map(|r| r.coords().to_vec()).collect()
    }

    /// Extreme rays, excluding the `±b` lineality generators.
    pub fn pointed_rays(&self) -> Vec<Vector<S>> {
        if self.lineality.is_empty() {
            return self.rays.clone();
        }
        self.rays.iter().filter(|r| !self.lineality.iter().any(|l| *r == l || *r == &-l)).cloned().collect()
    }

    fn as_generators(&self) -> ConeGenerators {
        ConeGenerators {
            lines: self.lineality.iter().map(|l| l.coords().to_vec()).collect(),
            rays: self.pointed_rays().into_iter().map(Vector::into_coords).collect(),
        }
    }

    fn dual_generators(&self) -> &ConeGenerators {
        self.dual.get_or_init(|| cone_from_inequalities(self.rank, &self.ray_rows()))
    }

    /// `σ^∨ = {u : <u, v> >= 0 for all v in σ}`, on the opposite side.
    pub fn dual(&self) -> Cone<S::Opposite> {
        let d = Cone::<S::Opposite>::from_generators(self.rank, self.dual_generators());
        let _ = d.dual.set(self.as_generators());
        d
    }

    /// Inner normals of the facets: the extreme rays of the dual modulo its
    /// lineality space.
    pub fn facet_normals(&self) -> Vec<Vector<S::Opposite>> {
        self.dual_generators().rays.iter().map(|r| Vector::new(r.clone())).collect()
    }

    /// Basis of `σ^⊥`, as a lattice in the opposite side.
    pub fn orthogonal_lattice(&self) -> Vec<Vector<S::Opposite>> {
        self.dual_generators().lines.iter().map(|r| Vector::new(r.clone())).collect()
    }

    /// True iff the cone contains no line.
    pub fn is_strongly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.rank
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_strongly_convex() && independent(&self.rays)
    }

    /// Generated by part of a lattice basis.
    pub fn is_smooth(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        let a = IntMatrix::from_columns(self.rank, &self.ray_rows());
        smith_normal_form(&a).diagonal().iter().all(One::is_one)
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        Error::check_dim(self.rank, v.len())?;
        let d = self.dual_generators();
        Ok(d.lines.iter().all(|l| dot_rat(l, v).is_zero()) && d.rays.iter().all(|u| !dot_rat(u, v).is_negative()))
    }

    /// Strict inequality on every facet functional, equality on `σ^⊥`.
    pub fn contains_in_relative_interior(&self, v: &[Rat]) -> Result<bool> {
        Error::check_dim(self.rank, v.len())?;
        let d = self.dual_generators();
        Ok(d.lines.iter().all(|l| dot_rat(l, v).is_zero()) && d.rays.iter().all(|u| dot_rat(u, v).is_positive()))
    }

    pub fn contains_point(&self, v: &Vector<S>) -> bool {
        self.contains_int(v.coords())
    }

    pub(crate) fn contains_int(&self, v: &[Int]) -> bool {
        let d = self.dual_generators();
        d.lines.iter().all(|l| dot(l, v).is_zero()) && d.rays.iter().all(|u| !dot(u, v).is_negative())
    }

    pub fn intersection(&self, other: &Cone<S>) -> Result<Cone<S>> {
        Error::check_dim(self.rank, other.rank)?;
        let mut ineqs = generator_list(self.dual_generators());
        ineqs.extend(generator_list(other.dual_generators()));
        Ok(Self::from_generators(self.rank, &cone_from_inequalities(self.rank, &ineqs)))
    }

    fn require_strongly_convex(&self, what: &str) -> Result<()> {
        if self.is_strongly_convex() {
            Ok(())
        } else {
            Err(Error::unsupported(format!("{what} needs a strongly convex cone, got {self}")))
        }
    }

    /// Faces as index sets into [`Cone::rays`], including `{0}` (the empty
    /// set) and the cone itself.
    pub fn face_ray_sets(&self) -> Result<Vec<Vec<usize>>> {
        self.require_strongly_convex("face enumeration")?;
        let normals = &self.dual_generators().rays;
        let facets: Vec<Vec<usize>> = normals
            .iter()
            .map(|u| (0..self.rays.len()).filter(|&i| dot(u, self.rays[i].coords()).is_zero()).collect())
            .collect();
        let full: Vec<usize> = (0..self.rays.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(full.clone());
        seen.insert(Vec::new());
        let mut queue = vec![full];
        while let Some(s) = queue.pop() {
            for f in &facets {
                let t: Vec<usize> = s.iter().copied().filter(|i| f.binary_search(i).is_ok()).collect();
                if seen.insert(t.clone()) {
                    queue.push(t);
                }
            }
        }
        let mut out: Vec<(usize, Vec<usize>)> = seen
            .into_iter()
            .map(|s| {
                let rows: Vec<Vec<Int>> = s.iter().map(|&i| self.rays[i].coords().to_vec()).collect();
                (rank_of_rows(&rows), s)
            })
            .collect();
        out.sort();
        Ok(out.into_iter().map(|(_, s)| s).collect())
    }

    /// Every face `σ ∩ u^⊥`, sorted by dimension then rays.
    pub fn faces(&self) -> Result<Vec<Cone<S>>> {
        Ok(self.face_ray_sets()?.into_iter().map(|s| self.subcone(&s)).collect())
    }

    pub(crate) fn subcone(&self, idx: &[usize]) -> Cone<S> {
        Self::from_extreme_rays(self.rank, idx.iter().map(|&i| self.rays[i].clone()).collect())
    }

    /// Indices of the rays of the smallest face containing all of `points`.
    pub fn smallest_face_containing(&self, points: &[Vector<S>]) -> Result<Vec<usize>> {
        self.require_strongly_convex("face lookup")?;
        let normals: Vec<&Vec<Int>> = self
            .dual_generators()
            .rays
            .iter()
            .filter(|u| points.iter().all(|p| dot(u, p.coords()).is_zero()))
            .collect();
        Ok((0..self.rays.len()).filter(|&i| normals.iter().all(|u| dot(u, self.rays[i].coords()).is_zero())).collect())
    }

    /// True iff `other` is a face of `self`.
    pub fn has_face(&self, other: &Cone<S>) -> Result<bool> {
        if other.rank != self.rank || !other.rays.iter().all(|r| self.contains_point(r)) {
            return Ok(false);
        }
        let idx = self.smallest_face_containing(&other.rays)?;
        Ok(self.subcone(&idx) == *other)
    }

    /// A triangulation into simplicial cones spanned by rays of `self`,
    /// given as index sets. Pulling triangulation from the first ray.
    pub fn triangulate(&self) -> Result<Vec<Vec<usize>>> {
        self.require_strongly_convex("triangulation")?;
        Ok(triangulate_rays(self.rank, &self.rays))
    }

    /// The unique minimal generating set of `σ ∩ L` for a strongly convex σ.
    pub fn hilbert_basis(&self) -> Result<HilbertBasis<S>> {
        self.require_strongly_convex("Hilbert basis")?;
        let mut candidates: BTreeSet<Vector<S>> = self.rays.iter().cloned().collect();
        for simplex in self.triangulate()? {
            let gens: Vec<Vector<S>> = simplex.iter().map(|&i| self.rays[i].clone()).collect();
            for p in parallelepiped_points(self.rank, &gens) {
                if !p.iter().all(Zero::is_zero) {
                    candidates.insert(Vector::new(p));
                }
            }
        }
        // Order by a functional positive on σ \ {0}: only lower elements can
        // split off from a candidate.
        let height: Vec<Int> = {
            let mut w = vec![Int::zero(); self.rank];
            for u in &self.dual_generators().rays {
                for (a, b) in w.iter_mut().zip(u) {
                    *a += b;
                }
            }
            w
        };
        let mut cands: Vec<(Int, Vector<S>)> = candidates.into_iter().map(|c| (dot(&height, c.coords()), c)).collect();
        cands.sort();
        let mut elements: Vec<Vector<S>> = Vec::new();
        for (h, x) in &cands {
            let reducible = cands.iter().take_while(|(hy, _)| hy < h).any(|(_, y)| self.contains_int((x - y).coords()));
            if !reducible {
                elements.push(x.clone());
            }
        }
        elements.sort();
        Ok(HilbertBasis { cone: self.clone(), elements })
    }

    /// A finite generating set of the semigroup `σ ∩ L` for any cone: the
    /// Hilbert basis when σ is strongly convex, otherwise lifts of the
    /// Hilbert basis of the image modulo the lineality space together with
    /// `±` a basis of the lineality lattice.
    pub fn semigroup_generators(&self) -> Result<Vec<Vector<S>>> {
        if self.is_strongly_convex() {
            return Ok(self.hilbert_basis()?.elements);
        }
        let q = QuotientLattice::new(self.rank, &self.lineality)?;
        let image: Vec<Vector<S>> = self.rays.iter().map(|r| q.project(r)).collect();
        let pointed = Cone::new(q.rank(), image)?;
        let mut out: Vec<Vector<S>> = pointed.hilbert_basis()?.elements.iter().map(|h| q.lift(h)).collect();
        for j in 0..q.sublattice_rank() {
            let b = Vector::new(q.sublattice_basis.column(j));
            out.push(-&b);
            out.push(b);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

fn generator_list(g: &ConeGenerators) -> Vec<Vec<Int>> {
    let mut out = g.rays.clone();
    for l in &g.lines {
        out.push(l.clone());
        out.push(l.iter().map(|x| -x).collect());
    }
    out
}

fn triangulate_rays<S: Side>(rank: usize, rays: &[Vector<S>]) -> Vec<Vec<usize>> {
    if independent(rays) {
        return vec![(0..rays.len()).collect()];
    }
    let cone = Cone::from_extreme_rays(rank, rays.to_vec());
    // from_extreme_rays sorts; keep the caller's indexing.
    let pos: HashMap<&Vector<S>, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let d = cone.dim();
    let apex = &rays[0];
    let mut out = Vec::new();
    for face in cone.face_ray_sets().expect("pointed") {
        let face_rays: Vec<Vector<S>> = face.iter().map(|&i| cone.rays[i].clone()).collect();
        if face_rays.contains(apex) {
            continue;
        }
        let rows: Vec<Vec<Int>> = face_rays.iter().map(|r| r.coords().to_vec()).collect();
        if rank_of_rows(&rows) + 1 != d {
            continue;
        }
        for simplex in triangulate_rays(rank, &face_rays) {
            let mut s: Vec<usize> = simplex.iter().map(|&i| pos[&face_rays[i]]).collect();
            s.push(0);
            s.sort();
            out.push(s);
        }
    }
    out
}

/// Lattice points of `{Σ λ_i w_i : 0 <= λ_i < 1}` for linearly independent
/// `w_i`, with respect to the full lattice `Z^rank`.
pub(crate) fn parallelepiped_points<S: Side>(rank: usize, gens: &[Vector<S>]) -> Vec<Vec<Int>> {
    let k = gens.len();
    let cols: Vec<Vec<Int>> = gens.iter().map(|g| g.coords().to_vec()).collect();
    let w = IntMatrix::from_columns(rank, &cols);
    let snf = smith_normal_form(&w);
    let diag = snf.diagonal();
    let mut out = BTreeSet::new();
    let mut y = vec![Int::zero(); k];
    loop {
        // λ = V μ, μ_i = y_i / d_i; keep fractional parts.
        let lambda: Vec<Rat> = (0..k)
            .map(|i| {
                let s = (0..k).fold(Rat::zero(), |acc, j| acc + Rat::new(&snf.v[(i, j)] * &y[j], diag[j].clone()));
                &s - s.floor()
            })
            .collect();
        let x: Vec<Int> = (0..rank)
            .map(|r| (0..k).fold(Rat::zero(), |acc, j| acc + &lambda[j] * Rat::from_integer(w[(r, j)].clone())))
            .map(|q| {
                debug_assert!(q.is_integer());
                q.to_integer()
            })
            .collect();
        out.insert(x);
        // odometer over y_i in [0, d_i)
        let mut i = 0;
        loop {
            if i == k {
                return out.into_iter().collect();
            }
            y[i] += 1;
            if y[i] < diag[i] {
                break;
            }
            y[i] = Int::zero();
            i += 1;
        }
    }
}

/// The minimal generating set of the semigroup of lattice points of a
/// strongly convex cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertBasis<S: Side> {
    pub cone: Cone<S>,
    pub elements: Vec<Vector<S>>,
}

/// `Y^a - Y^b`, exponents indexed by Hilbert basis elements, with
/// `Σ a_i u_i = Σ b_i u_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialRelation {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

impl BinomialRelation {
    fn from_kernel_vector(c: &[Int]) -> Self {
        use num::ToPrimitive;
        let a = c.iter().map(|x| if x.is_positive() { x.to_u64().expect("small exponent") } else { 0 }).collect();
        let b = c.iter().map(|x| if x.is_negative() { (-x).to_u64().expect("small exponent") } else { 0 }).collect();
        BinomialRelation { a, b }
    }
}

impl fmt::Display for BinomialRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |e: &[u64]| {
            let parts: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { format!("Y{}", i + 1) } else { format!("Y{}^{}", i + 1, x) })
                .collect();
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("*")
            }
        };
        write!(f, "{} - {}", mono(&self.a), mono(&self.b))
    }
}

/// How much of the toric ideal a relation list is known to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdealGeneration {
    /// Generates the ideal itself (the relation lattice has rank at most 1).
    Exact,
    /// Generates an ideal whose saturation by the product of the variables
    /// is the toric ideal.
    UpToSaturation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialRelations {
    pub relations: Vec<BinomialRelation>,
    pub generation: IdealGeneration,
}

impl<S: Side> HilbertBasis<S> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// A lattice basis of `{c : Σ c_i u_i = 0}`, split into binomials.
    pub fn binomial_relations(&self) -> BinomialRelations {
        binomial_relations(self.cone.rank(), &self.elements)
    }
}

pub(crate) fn binomial_relations<S: Side>(rank: usize, elements: &[Vector<S>]) -> BinomialRelations {
    let cols: Vec<Vec<Int>> = elements.iter().map(|e| e.coords().to_vec()).collect();
    let h = IntMatrix::from_columns(rank, &cols);
    let kernel = integer_kernel(&h);
    let generation = if kernel.len() <= 1 { IdealGeneration::Exact } else { IdealGeneration::UpToSaturation };
    BinomialRelations {
        relations: kernel.iter().map(|c| BinomialRelation::from_kernel_vector(c)).collect(),
        generation,
    }
}

/// Express `w` as an integer combination of `gens`, if possible.
pub(crate) fn integer_coefficients<S: Side>(gens: &[Vector<S>], w: &Vector<S>) -> Option<Vec<Int>> {
    let cols: Vec<Vec<Int>> = gens.iter().map(|g| g.coords().to_vec()).collect();
    let a = IntMatrix::from_columns(w.rank(), &cols);
    crate::lattice::solve_integer(&a, w.coords())
}

impl<S: Side> Cone<S> {
    /// Gcd-free test used by callers that hold integer points.
    pub fn contains_lattice_point(&self, v: &[Int]) -> bool {
        self.contains_int(v)
    }

    /// Index of the sublattice generated by the rays inside `span(σ) ∩ L`.
    pub fn multiplicity(&self) -> Int {
        let a = IntMatrix::from_columns(self.rank, &self.ray_rows());
        smith_normal_form(&a).diagonal().iter().filter(|x| !x.is_zero()).fold(Int::one(), |acc, x| acc * x).abs()
    }
}
