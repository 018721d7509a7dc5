//! Points of a toric variety, the nonnegative retraction and the momentum
//! map `μ(x) = Σ ρ_u(x) u` over the lattice points of `P_D`.
//!
//! A point is stored chart-locally as a semigroup homomorphism
//! `S_σ → C`, given by its values on a generating set of `S_σ`. Complex
//! arithmetic is binary64; the polytope side stays exact.
//!
//! ```
//! use toric::divisor::TWeilDivisor;
//! use toric::fan::Fan;
//! use toric::moment::{moment_map, TorusPoint, AlgebraicPoint};
//!
//! let p2 = Fan::projective_space(2);
//! let d = TWeilDivisor::from_i64(&p2, &[0, 0, 1]).unwrap().to_cartier().unwrap();
//! let x = AlgebraicPoint::torus(&TorusPoint::identity(2));
//! let s = moment_map(&x, &d).unwrap();
//! assert!((s.mu[0] - 1.0 / 3.0).abs() < 1e-12 && (s.mu[1] - 1.0 / 3.0).abs() < 1e-12);
//! ```

pub mod contact;

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num::complex::Complex64;
use num::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cone::{binomial_relations, integer_coefficients, Cone};
use crate::divisor::{divisor_polytope, DivisorPolytope, TCartierData};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::lattice::{DualVector, Int, Primal};

pub use crate::divisor::canonical_divisor;
pub use contact::{
    classify_contact, contact_divisor, contact_index_check, fan_isomorphic, projectivized_tangent_fan, ContactReport,
    ContactVerdict,
};

/// Log-radius bound for sampled torus points.
pub const SAMPLE_LOG_RADIUS: f64 = 10.0;
pub const INSIDE_TOLERANCE: f64 = 1e-9;
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// `t = exp(log_radius + i angle)` coordinatewise.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    pub log_radius: Vec<f64>,
    pub angle: Vec<f64>,
}

impl TorusPoint {
    pub fn new(log_radius: Vec<f64>, angle: Vec<f64>) -> Result<Self> {
        Error::check_dim(log_radius.len(), angle.len())?;
        if log_radius.iter().chain(&angle).any(|x| !x.is_finite()) {
            return Err(Error::Degenerate("torus coordinates must be finite".into()));
        }
        let angle = angle.into_iter().map(|a| a.rem_euclid(TAU)).collect();
        Ok(TorusPoint { log_radius, angle })
    }

    pub fn identity(n: usize) -> Self {
        TorusPoint { log_radius: vec![0.0; n], angle: vec![0.0; n] }
    }

    /// An element of the compact torus `S_N`.
    pub fn unit(angle: Vec<f64>) -> Self {
        let n = angle.len();
        TorusPoint::new(vec![0.0; n], angle).expect("finite angles")
    }

    pub fn rank(&self) -> usize {
        self.log_radius.len()
    }

    pub fn compose(&self, other: &TorusPoint) -> Result<TorusPoint> {
        Error::check_dim(self.rank(), other.rank())?;
        TorusPoint::new(
            self.log_radius.iter().zip(&other.log_radius).map(|(a, b)| a + b).collect(),
            self.angle.iter().zip(&other.angle).map(|(a, b)| a + b).collect(),
        )
    }

    /// `χ^u(t) = Π t_j^{u_j}`.
    pub fn character(&self, u: &DualVector) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for ((c, r), a) in u.coords().iter().zip(&self.log_radius).zip(&self.angle) {
            let c = c.to_f64().expect("finite coordinate");
            re += c * r;
            im += c * a;
        }
        Complex64::from_polar(re.exp(), im)
    }
}

#[derive(Debug)]
struct Chart {
    cone: Cone<Primal>,
    generators: Vec<DualVector>,
}

/// A point of `U_σ`: values of the homomorphism on generators of `S_σ`.
#[derive(Clone, Debug)]
pub struct AlgebraicPoint {
    chart: Arc<Chart>,
    values: Vec<Complex64>,
}

impl AlgebraicPoint {
    /// Generators of `S_σ = σ^∨ ∩ M` used as coordinates on `U_σ`.
    pub fn chart_generators(sigma: &Cone<Primal>) -> Result<Vec<DualVector>> {
        sigma.dual().semigroup_generators()
    }

    pub fn new(sigma: &Cone<Primal>, values: Vec<Complex64>) -> Result<Self> {
        let generators = Self::chart_generators(sigma)?;
        Error::check_dim(generators.len(), values.len())?;
        let p = AlgebraicPoint { chart: Arc::new(Chart { cone: sigma.clone(), generators }), values };
        if !p.is_consistent(CONSISTENCY_TOLERANCE) {
            return Err(Error::Degenerate("values do not define a semigroup homomorphism".into()));
        }
        Ok(p)
    }

    fn with_values(&self, values: Vec<Complex64>) -> Self {
        AlgebraicPoint { chart: Arc::clone(&self.chart), values }
    }

    pub fn chart(&self) -> &Cone<Primal> {
        &self.chart.cone
    }

    pub fn generators(&self) -> &[DualVector] {
        &self.chart.generators
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// A point of the torus in the chart `{0}`.
    pub fn torus(t: &TorusPoint) -> Self {
        torus_embed(t, &Cone::zero(t.rank())).expect("torus chart")
    }

    /// `t · x_τ` seen in the chart `U_σ` (τ a face of σ): `t(u)` on
    /// `S_σ ∩ τ^⊥` and `0` elsewhere. With `t = 1` this is `x_τ`.
    pub fn orbit_point(sigma: &Cone<Primal>, tau: &Cone<Primal>, t: &TorusPoint) -> Result<Self> {
        Error::check_dim(sigma.rank(), t.rank())?;
        if !sigma.has_face(tau)? {
            return Err(Error::UnknownCone(format!("{tau} is not a face of {sigma}")));
        }
        let generators = Self::chart_generators(sigma)?;
        let values = generators
            .iter()
            .map(|g| {
                let perp = tau.rays().iter().all(|v| crate::lattice::dot(g.coords(), v.coords()).is_zero());
                if perp {
                    t.character(g)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(AlgebraicPoint { chart: Arc::new(Chart { cone: sigma.clone(), generators }), values })
    }

    /// Every stored binomial relation holds up to relative tolerance `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let rel = binomial_relations(self.chart.cone.rank(), &self.chart.generators);
        rel.relations.iter().all(|r| {
            let side = |e: &[u64]| {
                e.iter().zip(&self.values).fold(Complex64::new(1.0, 0.0), |acc, (&k, v)| acc * v.powi(k as i32))
            };
            let (l, r) = (side(&r.a), side(&r.b));
            (l - r).norm() <= tol * l.norm().max(r.norm()).max(1.0)
        })
    }

    /// `χ^w(x)` for `w ∈ S_σ`.
    pub fn character(&self, w: &DualVector) -> Result<Complex64> {
        let support = self.support();
        match self.character_exponents(w, &support)? {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(c) => Ok(c.iter().zip(&support).fold(Complex64::new(1.0, 0.0), |acc, (k, &i)| {
                acc * self.values[i].powi(k.to_i32().expect("small exponent"))
            })),
        }
    }

    fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i].norm() > 0.0).collect()
    }

    /// Integer exponents of `w` over the generators in `support`, or `None`
    /// when `χ^w` vanishes at this point. On the nonvanishing generators
    /// the homomorphism extends to their group, so any integer expression
    /// gives the same value.
    fn character_exponents(&self, w: &DualVector, support: &[usize]) -> Result<Option<Vec<Int>>> {
        if !self.chart.cone.dual().contains_point(w) {
            return Err(Error::Degenerate(format!("{w} is not in the chart semigroup")));
        }
        let gens: Vec<DualVector> = support.iter().map(|&i| self.chart.generators[i].clone()).collect();
        if gens.is_empty() {
            return Ok(w.is_zero().then(Vec::new));
        }
        Ok(integer_coefficients(&gens, w))
    }
}

/// Distinguished point `x_σ`: `1` on `σ^⊥ ∩ S_σ`, `0` elsewhere.
pub fn distinguished_point(sigma: &Cone<Primal>) -> Result<AlgebraicPoint> {
    AlgebraicPoint::orbit_point(sigma, sigma, &TorusPoint::identity(sigma.rank()))
}

pub fn torus_embed(t: &TorusPoint, sigma: &Cone<Primal>) -> Result<AlgebraicPoint> {
    Error::check_dim(sigma.rank(), t.rank())?;
    let generators = AlgebraicPoint::chart_generators(sigma)?;
    let values = generators.iter().map(|g| t.character(g)).collect();
    Ok(AlgebraicPoint { chart: Arc::new(Chart { cone: sigma.clone(), generators }), values })
}

/// `(t · x)(u) = t(u) x(u)`.
pub fn torus_act(t: &TorusPoint, x: &AlgebraicPoint) -> Result<AlgebraicPoint> {
    Error::check_dim(x.chart().rank(), t.rank())?;
    Ok(x.with_values(x.generators().iter().zip(&x.values).map(|(g, v)| t.character(g) * v).collect()))
}

/// `x ↦ |x|`, the retraction onto `(U_σ)_{>=0}`.
pub fn retract(x: &AlgebraicPoint) -> AlgebraicPoint {
    x.with_values(x.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect())
}

fn normalized(weights: Vec<f64>) -> Result<Vec<f64>> {
    let s: f64 = weights.iter().sum();
    if s == 0.0 {
        return Err(Error::Degenerate("all homogeneous coordinates vanish".into()));
    }
    Ok(weights.into_iter().map(|w| w / s).collect())
}

/// `(x_0 : … : x_n) ↦ (|x_i| / Σ|x_j|)`.
pub fn projective_retraction(x: &[Complex64]) -> Result<Vec<f64>> {
    normalized(x.iter().map(|z| z.norm()).collect())
}

/// `(x_1 : … : x_r) ↦ (|x_i|^2 / Σ|x_j|^2)`.
pub fn fulton_moment(x: &[Complex64]) -> Result<Vec<f64>> {
    normalized(x.iter().map(|z| z.norm_sqr()).collect())
}

/// Softmax of `logs`; `-inf` entries get weight exactly `0`.
fn softmax(logs: &[f64]) -> Option<Vec<f64>> {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return None;
    }
    let e: Vec<f64> = logs.iter().map(|l| if *l == f64::NEG_INFINITY { 0.0 } else { (l - m).exp() }).collect();
    let s: f64 = e.iter().sum();
    Some(e.into_iter().map(|x| x / s).collect())
}

fn weighted_mean(points: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let n = points.first().map_or(0, Vec::len);
    let mut mu = vec![0.0; n];
    for (p, w) in points.iter().zip(weights) {
        for (m, x) in mu.iter_mut().zip(p) {
            *m += w * x;
        }
    }
    mu
}

/// `log Σ ε_i exp(<u_i, x>)`.
pub fn legendre_potential(us: &[DualVector], eps: &[f64], x: &[f64]) -> f64 {
    let logs: Vec<f64> = us.iter().zip(eps).map(|(u, e)| e.ln() + dot_f64(u, x)).collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

fn dot_f64(u: &DualVector, x: &[f64]) -> f64 {
    u.coords().iter().zip(x).map(|(a, b)| a.to_f64().expect("finite") * b).sum()
}

/// `ρ_i(x) = ε_i e^{<u_i,x>} / Σ ε_j e^{<u_j,x>}`. Every weight is
/// positive, so `μ(x)` lies in the interior of the hull even where binary64
/// rounds the mean onto a vertex.
pub fn legendre_weights(us: &[DualVector], eps: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    Error::check_dim(us.len(), eps.len())?;
    if us.is_empty() || us.iter().any(|u| u.rank() != n) {
        return Err(Error::unsupported("legendre_map needs points of the same rank as x"));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::unsupported("weights must be positive"));
    }
    let diffs: Vec<Vec<Int>> = us.iter().map(|u| (u - &us[0]).into_coords()).collect();
    if crate::lattice::rank_of_rows(&diffs) != n {
        return Err(Error::unsupported("convex hull of the points is not full-dimensional"));
    }
    let logs: Vec<f64> = us.iter().zip(eps).map(|(u, e)| e.ln() + dot_f64(u, x)).collect();
    Ok(softmax(&logs).expect("finite logs"))
}

/// `μ(x) = Σ ρ_i(x) u_i`, the gradient of [`legendre_potential`].
pub fn legendre_map(us: &[DualVector], eps: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let rho = legendre_weights(us, eps, x)?;
    Ok(weighted_mean(&us.iter().map(DualVector::to_f64).collect::<Vec<_>>(), &rho))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SampleKind {
    Torus,
    Distinguished,
}

impl fmt::Display for SampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleKind::Torus => "torus",
            SampleKind::Distinguished => "distinguished",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSample {
    pub point_id: usize,
    pub kind: SampleKind,
    /// Orbit cone as ray indices: `[]` for the torus.
    pub orbit_cone: Vec<usize>,
    /// Cone of the chart the point was evaluated in.
    pub chart_cone: Vec<usize>,
    pub mu: Vec<f64>,
    pub inside: bool,
    /// `ρ_u`, aligned with the lattice points of `P_D`.
    pub weights: Vec<f64>,
}

/// The ingredients of `h_u = χ^{u - u(σ)}` for one chart and one pattern of
/// vanishing generators, reused across points that share them.
struct Evaluator {
    lattice_points: Vec<Vec<f64>>,
    /// Per lattice point: exponents over the supported generators, or
    /// `None` when `h_u` vanishes identically on the pattern.
    exponents: Vec<Option<Vec<f64>>>,
    support: Vec<usize>,
}

impl Evaluator {
    fn new(x: &AlgebraicPoint, cartier: &TCartierData, poly: &DivisorPolytope) -> Result<Self> {
        let points = poly.lattice_points.as_ref().ok_or_else(|| Error::unsupported("P_D is unbounded"))?;
        let u_sigma = chart_character(x.chart(), cartier)?;
        let support = x.support();
        let exponents = points
            .iter()
            .map(|u| {
                let c = x.character_exponents(&(u - &u_sigma), &support)?;
                Ok(c.map(|c| c.iter().map(|k| k.to_f64().expect("finite")).collect()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Evaluator { lattice_points: points.iter().map(DualVector::to_f64).collect(), exponents, support })
    }

    fn weights(&self, x: &AlgebraicPoint) -> Result<Vec<f64>> {
        let logs: Vec<f64> = self.support.iter().map(|&i| x.values[i].norm().ln()).collect();
        let h: Vec<f64> = self
            .exponents
            .iter()
            .map(|e| match e {
                None => f64::NEG_INFINITY,
                Some(c) => c.iter().zip(&logs).map(|(k, l)| k * l).sum(),
            })
            .collect();
        softmax(&h).ok_or_else(|| Error::Degenerate("every section vanishes at the point".into()))
    }
}

/// `u(σ')` for a maximal cone σ' containing the chart cone.
fn chart_character(chart: &Cone<Primal>, cartier: &TCartierData) -> Result<DualVector> {
    let f = cartier.fan();
    let idx: Option<Vec<usize>> = chart.rays().iter().map(|r| f.ray_index(r)).collect();
    let idx = idx.ok_or_else(|| Error::UnknownCone(chart.to_string()))?;
    f.max_cone_indices()
        .iter()
        .position(|m| idx.iter().all(|i| m.contains(i)))
        .map(|i| cartier.local_data()[i].clone())
        .ok_or_else(|| Error::UnknownCone(chart.to_string()))
}

fn require_basepoint_free(cartier: &TCartierData) -> Result<()> {
    if cartier.is_basepoint_free()? {
        Ok(())
    } else {
        Err(Error::unsupported("the momentum map needs a basepoint-free divisor"))
    }
}

/// `μ(x) = Σ ρ_u u` over `u ∈ P_D ∩ M`, with `ρ_u ∝ |χ^{u - u(σ)}(x)|`.
pub fn moment_map(x: &AlgebraicPoint, cartier: &TCartierData) -> Result<MomentSample> {
    require_basepoint_free(cartier)?;
    let poly = divisor_polytope(cartier.divisor())?;
    let ev = Evaluator::new(x, cartier, &poly)?;
    let weights = ev.weights(x)?;
    let mu = weighted_mean(&ev.lattice_points, &weights);
    let inside = poly.min_slack_f64(&mu) >= -INSIDE_TOLERANCE;
    Ok(MomentSample {
        point_id: 0,
        kind: SampleKind::Torus,
        orbit_cone: vec![],
        chart_cone: vec![],
        mu,
        inside,
        weights,
    })
}

/// Deterministic torus sample `index` for `seed`.
pub fn sample_torus_point(n: usize, seed: u64, index: u64) -> TorusPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let log_radius = (0..n).map(|_| rng.gen_range(-SAMPLE_LOG_RADIUS..=SAMPLE_LOG_RADIUS)).collect();
    let angle = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
    TorusPoint { log_radius, angle }
}

/// Distinguished points of every cone (in the fan's cone order), then
/// `count` seeded torus points.
pub fn sample_moment_image(f: &Fan, cartier: &TCartierData, count: usize, seed: u64) -> Result<Vec<MomentSample>> {
    if !cartier.is_ample()? {
        return Err(Error::unsupported("sampling the momentum image needs an ample divisor"));
    }
    if cartier.fan() != f {
        return Err(Error::unsupported("divisor lives on a different fan"));
    }
    let poly = divisor_polytope(cartier.divisor())?;
    let n = f.rank();
    let mut out = Vec::new();
    for (id, tau_idx) in f.cone_indices().iter().enumerate() {
        let tau = f.cone(tau_idx);
        let sigma_idx = f
            .max_cone_indices()
            .iter()
            .find(|m| tau_idx.iter().all(|i| m.contains(i)))
            .expect("every cone lies in a maximal cone");
        let x = AlgebraicPoint::orbit_point(&f.cone(sigma_idx), &tau, &TorusPoint::identity(n))?;
        let ev = Evaluator::new(&x, cartier, &poly)?;
        let weights = ev.weights(&x)?;
        let mu = weighted_mean(&ev.lattice_points, &weights);
        let inside = poly.min_slack_f64(&mu) >= -INSIDE_TOLERANCE;
        out.push(MomentSample {
            point_id: id,
            kind: SampleKind::Distinguished,
            orbit_cone: tau_idx.clone(),
            chart_cone: sigma_idx.clone(),
            mu,
            inside,
            weights,
        });
    }
    let offset = out.len();
    let base = AlgebraicPoint::torus(&TorusPoint::identity(n));
    let ev = Evaluator::new(&base, cartier, &poly)?;
    let torus: Vec<MomentSample> = (0..count)
        .into_par_iter()
        .map(|i| {
            let t = sample_torus_point(n, seed, i as u64);
            let x = torus_act(&t, &base)?;
            let weights = ev.weights(&x)?;
            let mu = weighted_mean(&ev.lattice_points, &weights);
            let inside = poly.min_slack_f64(&mu) >= -INSIDE_TOLERANCE;
            Ok(MomentSample {
                point_id: offset + i,
                kind: SampleKind::Torus,
                orbit_cone: vec![],
                chart_cone: vec![],
                mu,
                inside,
                weights,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.extend(torus);
    Ok(out)
}

/// Containment, vertex attainment and hull coverage of a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityReport {
    pub sample_count: usize,
    pub inside_fraction: f64,
    pub vertices: Vec<Vec<f64>>,
    /// Per vertex: is it `μ` of some distinguished point (to 1e-9)?
    pub attained: Vec<bool>,
    /// Upper bound on the largest distance from a vertex of `P` to the
    /// convex hull of the samples.
    pub hull_gap: f64,
}

impl ConvexityReport {
    pub fn all_inside(&self) -> bool {
        self.inside_fraction == 1.0
    }

    pub fn all_vertices_attained(&self) -> bool {
        self.attained.iter().all(|&a| a)
    }
}

impl fmt::Display for ConvexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples: {}", self.sample_count)?;
        writeln!(f, "inside_fraction: {}", self.inside_fraction)?;
        writeln!(f, "vertices_attained: {}/{}", self.attained.iter().filter(|&&a| a).count(), self.attained.len())?;
        write!(f, "hull_gap: {:.3e}", self.hull_gap)
    }
}

pub fn convexity_report(samples: &[MomentSample], poly: &DivisorPolytope) -> ConvexityReport {
    convexity_report_with_tolerance(samples, poly, INSIDE_TOLERANCE)
}

/// As [`convexity_report`], re-deciding containment and vertex attainment
/// at tolerance `tol`.
pub fn convexity_report_with_tolerance(samples: &[MomentSample], poly: &DivisorPolytope, tol: f64) -> ConvexityReport {
    let vertices: Vec<Vec<f64>> =
        poly.vertices.iter().map(|v| v.iter().map(|q| q.to_f64().expect("finite")).collect()).collect();
    let inside = samples.iter().filter(|s| poly.min_slack_f64(&s.mu) >= -tol).count();
    let inside_fraction = if samples.is_empty() { 1.0 } else { inside as f64 / samples.len() as f64 };
    let attained = vertices
        .iter()
        .map(|v| {
            samples
                .iter()
                .filter(|s| s.kind == SampleKind::Distinguished)
                .any(|s| s.mu.iter().zip(v).all(|(a, b)| (a - b).abs() <= tol))
        })
        .collect();
    let points: Vec<&[f64]> = samples.iter().map(|s| s.mu.as_slice()).collect();
    let hull_gap = vertices.iter().map(|v| hull_distance(&points, v)).fold(0.0, f64::max);
    ConvexityReport { sample_count: samples.len(), inside_fraction, vertices, attained, hull_gap }
}

/// Frank–Wolfe with exact line search on `|x - p|^2` over `conv(points)`;
/// the returned distance is that of a feasible iterate, hence an upper
/// bound.
fn hull_distance(points: &[&[f64]], p: &[f64]) -> f64 {
    let dist2 = |x: &[f64]| x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let Some(start) = points.iter().min_by(|a, b| dist2(a).total_cmp(&dist2(b))) else {
        return f64::INFINITY;
    };
    let mut x = start.to_vec();
    for _ in 0..500 {
        let g: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let score = |s: &[f64]| s.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
        let s = points.iter().min_by(|a, b| score(a).total_cmp(&score(b))).expect("nonempty");
        let d: Vec<f64> = s.iter().zip(&x).map(|(a, b)| a - b).collect();
        let gap = -d.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
        let dd = d.iter().map(|a| a * a).sum::<f64>();
        if gap <= 1e-18 || dd == 0.0 {
            break;
        }
        let step = (gap / dd).clamp(0.0, 1.0);
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += step * di;
        }
    }
    dist2(&x).sqrt()
}
