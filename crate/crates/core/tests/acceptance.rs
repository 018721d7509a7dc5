//! Acceptance criteria, one line of output each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use toric::cone::Cone;
use toric::divisor::{class_group, divisor_polytope, TWeilDivisor};
use toric::fan::{resolve_2d, Fan, MinimalSurface};
use toric::lattice::{AbelianGroup, DualVector, IntMatrix, LatticeVector, Primal, Rat};
use toric::moment::{
    classify_contact, contact_index_check, convexity_report, legendre_map, moment_map, projective_retraction,
    projectivized_tangent_fan, sample_moment_image, sample_torus_point, torus_act, AlgebraicPoint, ContactVerdict,
    SampleKind, TorusPoint,
};
use toric::Error;

const EXACT_MOMENT: f64 = 1e-9;
const INVARIANCE: f64 = 1e-9;
const GRADIENT: f64 = 1e-6;
const RETRACTION: f64 = 1e-12;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn rat(p: i64, q: i64) -> Rat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xC0DE + stream)
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    v.iter().map(|x| x / g).collect()
}

fn duality_involution() -> Outcome {
    let mut r = rng(1);
    let mut accepted = 0;
    let mut tried = 0;
    while accepted < 200 {
        tried += 1;
        let n = r.gen_range(2..=4);
        let k = r.gen_range(n..=n + 2);
        let gens: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| r.gen_range(-5..=5)).collect()).collect();
        if gens.iter().any(|g| g.iter().all(|&x| x == 0)) {
            continue;
        }
        let c = Cone::<Primal>::from_i64(n, &gens).map_err(|e| e.to_string())?;
        if !c.is_strongly_convex() || !c.is_full_dimensional() {
            continue;
        }
        accepted += 1;
        let back = c.dual().dual();
        ensure!(back == c, "dual of dual differs for generators {gens:?}");
        let prim: Vec<Vec<i64>> = gens.iter().map(|g| primitive(g)).collect();
        for ray in c.rays() {
            let ray = ray.to_i64().unwrap();
            ensure!(prim.contains(&ray), "canonical ray {ray:?} is not an input generator of {gens:?}");
        }
    }
    Ok(format!("200 cones in ranks 2-4 ({tried} drawn)"))
}

fn hilbert_oracle_criterion() -> Outcome {
    let mut r = rng(2);
    let mut checked = [0usize; 2];
    for (slot, n, count, max) in [(0usize, 2usize, 50usize, 5i64), (1, 3, 20, 3)] {
        while checked[slot] < count {
            let k = if n == 2 { 2 } else { r.gen_range(3..=4) };
            let gens: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| r.gen_range(0..=max)).collect()).collect();
            if gens.iter().any(|g| g.iter().all(|&x| x == 0)) {
                continue;
            }
            let c = Cone::<Primal>::from_i64(n, &gens).map_err(|e| e.to_string())?;
            if !c.is_full_dimensional() {
                continue;
            }
            checked[slot] += 1;
            let rays: Vec<Vec<i64>> = c.rays().iter().map(|v| v.to_i64().unwrap()).collect();
            let mut hb: Vec<Vec<i64>> =
                c.hilbert_basis().map_err(|e| e.to_string())?.elements.iter().map(|v| v.to_i64().unwrap()).collect();
            hb.sort();
            ensure!(hb.iter().flatten().all(|&x| (0..=10).contains(&x)), "Hilbert basis of {rays:?} leaves the box");
            let oracle = hilbert_oracle(&rays, 10);
            ensure!(hb == oracle, "cone {rays:?}: library {hb:?} vs oracle {oracle:?}");
        }
    }
    Ok("50 rank-2 and 20 rank-3 cones, box [0,10]^n".into())
}

fn a1_chart() -> Outcome {
    let c = Cone::<Primal>::from_i64(2, &[[1, 0], [1, 2]]).map_err(|e| e.to_string())?;
    let dual = c.dual();
    let expected = Cone::from_i64(2, &[[0, 1], [2, -1]]).map_err(|e| e.to_string())?;
    ensure!(dual == expected, "dual cone is {:?}", dual.rays());
    let hb = dual.hilbert_basis().map_err(|e| e.to_string())?;
    let elems: Vec<Vec<i64>> = hb.elements.iter().map(|v| v.to_i64().unwrap()).collect();
    let mut sorted = elems.clone();
    sorted.sort();
    ensure!(sorted == vec![vec![0, 1], vec![1, 0], vec![2, -1]], "Hilbert basis {elems:?}");
    let rel = hb.binomial_relations();
    ensure!(rel.relations.len() == 1, "expected one relation, got {}", rel.relations.len());
    let pos = |v: [i64; 2]| elems.iter().position(|e| e == &v).unwrap();
    let mut y1y3 = vec![0u64; 3];
    y1y3[pos([0, 1])] = 1;
    y1y3[pos([2, -1])] = 1;
    let mut y2sq = vec![0u64; 3];
    y2sq[pos([1, 0])] = 2;
    let r0 = &rel.relations[0];
    ensure!(
        (r0.a == y1y3 && r0.b == y2sq) || (r0.a == y2sq && r0.b == y1y3),
        "relation is {r0}, expected Y1*Y3 = Y2^2 in the basis order (0,1),(1,0),(2,-1)"
    );
    Ok(format!("dual {{(0,1),(2,-1)}}, basis {{(0,1),(1,0),(2,-1)}}, relation {r0}"))
}

fn zoo_invariants() -> Outcome {
    let expected: [(&str, bool, usize, AbelianGroup); 6] = [
        ("p1", true, 2, AbelianGroup::free(1)),
        ("p2", true, 3, AbelianGroup::free(1)),
        ("p1xp1", true, 4, AbelianGroup::free(2)),
        ("f1", true, 4, AbelianGroup::free(2)),
        ("p3", true, 4, AbelianGroup::free(1)),
        ("p112", false, 3, AbelianGroup::free(1)),
    ];
    for (name, smooth, chi, cl) in expected {
        let f = zoo(name);
        ensure!(f.is_complete(), "{name} not complete");
        ensure!(f.is_smooth() == smooth, "{name}: smooth = {}", f.is_smooth());
        ensure!(f.is_simplicial(), "{name} not simplicial");
        let e = f.euler_characteristic().map_err(|e| e.to_string())?;
        ensure!(e == chi && f.max_cone_indices().len() == chi, "{name}: chi = {e}");
        let pi1 = f.fundamental_group().map_err(|e| e.to_string())?;
        ensure!(pi1.is_trivial(), "{name}: pi1 = {pi1}");
        let g = class_group(&f).map_err(|e| e.to_string())?;
        ensure!(*g.group() == cl, "{name}: class group {}", g.group());
    }
    Ok("P1 P2 P1xP1 F1 P3 P(1,1,2): chi (2,3,4,4,4,3), class groups (Z,Z,Z^2,Z^2,Z,Z)".into())
}

fn pi1_torsion() -> Outcome {
    let f = load_fan("torsion.json");
    let pi1 = f.fundamental_group().map_err(|e| e.to_string())?;
    let (d1, d2) = invariant_factors_2x2([[0, 2], [1, 1]]);
    ensure!((d1, d2) == (1, 2), "oracle invariant factors ({d1}, {d2})");
    let oracle = AbelianGroup { free_rank: 0, torsion: vec![BigInt::from(d2)] };
    ensure!(pi1 == oracle, "pi1 = {pi1}, oracle {oracle}");
    Ok(format!("rays (0,1),(2,1): pi1 = {pi1}"))
}

fn divisor_suite() -> Outcome {
    let p2 = zoo("p2");
    let d3 = TWeilDivisor::from_i64(&p2, &[0, 0, 1]).map_err(|e| e.to_string())?;
    let c = d3.to_cartier().map_err(|e| e.to_string())?;
    for (cone, u) in p2.max_cone_indices().iter().zip(c.local_data()) {
        let want: &[i64] = match cone.as_slice() {
            [0, 1] => &[0, 0],
            [1, 2] => &[1, 0],
            [0, 2] => &[0, 1],
            other => return Err(format!("unexpected cone {other:?}")),
        };
        ensure!(u.to_i64().unwrap() == want, "u({cone:?}) = {u}, expected {want:?}");
    }
    ensure!(c.is_basepoint_free().map_err(|e| e.to_string())?, "D3 not basepoint-free");
    ensure!(c.is_ample().map_err(|e| e.to_string())?, "D3 not ample");
    ensure!(c.is_very_ample().map_err(|e| e.to_string())?, "D3 not very ample");
    let p = divisor_polytope(&d3).map_err(|e| e.to_string())?;
    let simplex = vec![vec![rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]];
    ensure!(p.vertices == simplex, "P_D vertices {:?}", p.vertices);
    let rays = i64_rays(&p2);
    for (k, want) in [(1i64, 3usize), (2, 6)] {
        let d = d3.scale(&BigInt::from(k));
        let pts = divisor_polytope(&d).map_err(|e| e.to_string())?.lattice_points.ok_or("unbounded")?;
        let oracle = polytope_points(&rays, &[0, 0, k], 5);
        ensure!(pts.len() == want && oracle.len() == want, "{k}D3: {} points, oracle {}", pts.len(), oracle.len());
        let h0 = d.to_cartier().and_then(|c| c.euler_sections_identity()).map_err(|e| e.to_string())?.h0;
        ensure!(h0 == want, "{k}D3: h0 = {h0}");
    }
    let p112 = zoo("p112");
    let i = p112.ray_index(&LatticeVector::from_i64(&[1, 0])).ok_or("no ray (1,0)")?;
    let d1 = TWeilDivisor::prime(&p112, i);
    match d1.to_cartier() {
        Err(Error::NotCartier { .. }) => {}
        other => return Err(format!("D1 on P(1,1,2): {other:?}")),
    }
    ensure!(d1.scale(&BigInt::from(2)).to_cartier().is_ok(), "2 D1 not Cartier");
    Ok("P2/D3 ample, very ample, simplex, 3 and 6 points; P(1,1,2): D1 not Cartier, 2D1 Cartier".into())
}

fn support_function_laws() -> Outcome {
    let mut r = rng(7);
    let mut evaluations = 0;
    for name in ["p2", "p1xp1"] {
        let f = zoo(name);
        let k = f.rays().len();
        for _ in 0..10 {
            let mut div = || {
                let c: Vec<i64> = (0..k).map(|_| r.gen_range(-4..=4)).collect();
                TWeilDivisor::from_i64(&f, &c).unwrap()
            };
            let (d, e) = (div(), div());
            let m = BigInt::from(r.gen_range(-5..=5));
            let sum = d.add(&e).map_err(|x| x.to_string())?;
            let cart = |x: &TWeilDivisor| x.to_cartier().map_err(|e| e.to_string());
            let (cd, ce, cs, cm) = (cart(&d)?, cart(&e)?, cart(&sum)?, cart(&d.scale(&m))?);
            let (pd, pe, ps, pm) =
                (cd.support_function(), ce.support_function(), cs.support_function(), cm.support_function());
            for _ in 0..100 {
                let v: Vec<Rat> = (0..2).map(|_| rat(r.gen_range(-20..=20), r.gen_range(1..=9))).collect();
                let ev = |p: &toric::divisor::SupportFunction<'_>| p.evaluate(&v).map_err(|e| e.to_string());
                ensure!(ev(&ps)? == ev(&pd)? + ev(&pe)?, "{name}: additivity fails at {v:?}");
                ensure!(ev(&pm)? == BigRational::from(m.clone()) * ev(&pd)?, "{name}: homogeneity fails at {v:?}");
                evaluations += 1;
            }
        }
    }
    Ok(format!("{evaluations} rational points over 20 divisor pairs"))
}

fn moment_convexity() -> Outcome {
    let mut lines = Vec::new();
    for (name, coeffs) in [("p2", vec![0, 0, 1]), ("p1xp1", vec![0, 0, 1, 1])] {
        let f = zoo(name);
        let d = TWeilDivisor::from_i64(&f, &coeffs).map_err(|e| e.to_string())?;
        let c = d.to_cartier().map_err(|e| e.to_string())?;
        let samples = sample_moment_image(&f, &c, 10_000, 0).map_err(|e| e.to_string())?;
        let poly = divisor_polytope(&d).map_err(|e| e.to_string())?;
        let report = convexity_report(&samples, &poly);
        ensure!(report.all_inside(), "{name}: inside fraction {}", report.inside_fraction);
        ensure!(report.all_vertices_attained(), "{name}: attained {:?}", report.attained);
        let points = polytope_points(&i64_rays(&f), &coeffs, 3);
        let offset = samples.iter().filter(|s| s.kind == SampleKind::Distinguished).count();
        for s in &samples {
            match s.kind {
                SampleKind::Torus => {
                    let t = sample_torus_point(f.rank(), 0, (s.point_id - offset) as u64);
                    let want = torus_moment(&points, &t.log_radius);
                    let gap = s.mu.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    ensure!(gap < EXACT_MOMENT, "{name}: sample {} off the oracle by {gap:e}", s.point_id);
                }
                SampleKind::Distinguished if s.orbit_cone.len() == f.rank() => {
                    let vertex =
                        c.local_data()[f.max_cone_indices().iter().position(|m| *m == s.orbit_cone).unwrap()].to_f64();
                    ensure!(s.mu == vertex, "{name}: fixed point of {:?} maps to {:?}", s.orbit_cone, s.mu);
                }
                SampleKind::Distinguished => {}
            }
        }
        lines.push(format!("{name} {} samples, {} vertices", samples.len(), report.vertices.len()));
    }
    Ok(lines.join("; "))
}

fn sn_invariance() -> Outcome {
    let mut r = rng(9);
    let f = zoo("p2");
    let c = TWeilDivisor::from_i64(&f, &[0, 0, 1]).unwrap().to_cartier().unwrap();
    let g = zoo("p1xp1");
    let cg = TWeilDivisor::from_i64(&g, &[0, 0, 1, 1]).unwrap().to_cartier().unwrap();
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let (fan, cart) = if i % 2 == 0 { (&f, &c) } else { (&g, &cg) };
        let n = fan.rank();
        let x0 = TorusPoint::new(
            (0..n).map(|_| r.gen_range(-10.0..10.0)).collect(),
            (0..n).map(|_| r.gen_range(0.0..std::f64::consts::TAU)).collect(),
        )
        .unwrap();
        let cones = fan.cone_indices();
        let tau_idx = &cones[r.gen_range(0..cones.len())];
        let sigma_idx = fan.max_cone_indices().iter().find(|m| tau_idx.iter().all(|j| m.contains(j))).unwrap();
        let x =
            AlgebraicPoint::orbit_point(&fan.cone(sigma_idx), &fan.cone(tau_idx), &x0).map_err(|e| e.to_string())?;
        let t = TorusPoint::unit((0..n).map(|_| r.gen_range(0.0..std::f64::consts::TAU)).collect());
        let tx = torus_act(&t, &x).map_err(|e| e.to_string())?;
        let a = moment_map(&x, cart).map_err(|e| e.to_string())?.mu;
        let b = moment_map(&tx, cart).map_err(|e| e.to_string())?.mu;
        let gap = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        worst = worst.max(gap);
        ensure!(gap < INVARIANCE, "pair {i}: |mu(t.x) - mu(x)| = {gap:e}");
    }
    Ok(format!("1000 pairs on P2 and P1xP1 orbits, max deviation {worst:.1e}"))
}

fn log_sum_exp(us: &[Vec<i64>], eps: &[f64], x: &[f64]) -> f64 {
    us.iter()
        .zip(eps)
        .map(|(u, e)| e * u.iter().zip(x).map(|(&a, b)| a as f64 * b).sum::<f64>().exp())
        .sum::<f64>()
        .ln()
}

fn legendre_gradient() -> Outcome {
    let mut r = rng(10);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let mut us: Vec<Vec<i64>> = vec![vec![0; n]];
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            us.push(e);
        }
        for _ in 0..r.gen_range(0..4) {
            us.push((0..n).map(|_| r.gen_range(-3..=3)).collect());
        }
        let eps: Vec<f64> = us.iter().map(|_| r.gen_range(0.5..2.0)).collect();
        let x: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
        let duals: Vec<DualVector> = us.iter().map(|u| DualVector::from_i64(u)).collect();
        let mu = legendre_map(&duals, &eps, &x).map_err(|e| e.to_string())?;
        for i in 0..n {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += h;
            xm[i] -= h;
            let fd = (log_sum_exp(&us, &eps, &xp) - log_sum_exp(&us, &eps, &xm)) / (2.0 * h);
            worst = worst.max((fd - mu[i]).abs());
            ensure!((fd - mu[i]).abs() < GRADIENT, "trial {trial}: coordinate {i} {fd} vs {}", mu[i]);
        }
    }
    let us = [DualVector::from_i64(&[0]), DualVector::from_i64(&[1]), DualVector::from_i64(&[3])];
    let mut prev = f64::NEG_INFINITY;
    for i in 0..1000 {
        let x = -10.0 + 20.0 * i as f64 / 999.0;
        let m = legendre_map(&us, &[1.0; 3], &[x]).map_err(|e| e.to_string())?[0];
        ensure!(m > prev, "not strictly increasing at x = {x}");
        prev = m;
    }
    Ok(format!("100 points in ranks 1-3, max gap {worst:.1e}; 1000-point grid strictly increasing"))
}

fn retraction() -> Outcome {
    let x: Vec<Complex64> = [3.0, 4.0, 0.0].iter().map(|&a| Complex64::new(a, 0.0)).collect();
    let y = projective_retraction(&x).map_err(|e| e.to_string())?;
    let want = [3.0 / 7.0, 4.0 / 7.0, 0.0];
    ensure!(y.iter().zip(want).all(|(a, b)| (a - b).abs() < RETRACTION), "(3:4:0) -> {y:?}");
    let mut r = rng(11);
    for _ in 0..100 {
        let n = r.gen_range(2..=5);
        let x: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0))).collect();
        let lambda = Complex64::from_polar(r.gen_range(0.1..10.0), r.gen_range(0.0..std::f64::consts::TAU));
        let a = projective_retraction(&x).map_err(|e| e.to_string())?;
        let b = projective_retraction(&x.iter().map(|z| z * lambda).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
        let gap = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        ensure!(gap < RETRACTION, "rescaling moved the image by {gap:e}");
    }
    Ok("(3:4:0) -> (3/7, 4/7, 0); 100 rescalings invariant".into())
}

fn contact_classification() -> Outcome {
    let p3 = zoo("p3");
    let tangent = projectivized_tangent_fan(2).map_err(|e| e.to_string())?;
    let p1xp2 = load_fan("p1xp2.json");
    // P^5 in sheared coordinates so the isomorphism search has work to do.
    let shear = IntMatrix::from_i64(&[
        &[1, 2, 0, 0, 0],
        &[-3, 1, 0, -1, 0],
        &[0, 0, 1, 0, 0],
        &[3, 0, 0, 1, 0],
        &[0, 0, 1, 0, 1],
    ]);
    ensure!(shear.determinant().abs().is_one(), "shear not unimodular");
    let p5 = Fan::projective_space(5);
    let rays = p5.rays().iter().map(|r| LatticeVector::new(shear.apply(r.coords()))).collect();
    let p5 = Fan::new(5, rays, p5.max_cone_indices().to_vec()).map_err(|e| e.to_string())?;
    let cases = [
        ("P3", &p3, ContactVerdict::ProjectiveSpace, Some(2)),
        ("P(T(P1xP1))", &tangent, ContactVerdict::ProjectivizedTangentBundle, Some(2)),
        ("P1xP2", &p1xp2, ContactVerdict::NoContactStructure, None),
        ("P5", &p5, ContactVerdict::ProjectiveSpace, Some(3)),
    ];
    for (name, f, verdict, index) in cases {
        let rep = classify_contact(f).map_err(|e| e.to_string())?;
        ensure!(rep.verdict == verdict, "{name}: {}", rep.verdict);
        ensure!(rep.index == index, "{name}: index {:?}", rep.index);
        let rays = i64_rays(f);
        let k = index.unwrap_or(2) as i64;
        ensure!(anticanonical_divisible(&rays, k) == index.is_some(), "{name}: divisibility oracle disagrees");
        if let Some(a) = &rep.witness {
            ensure!(a.determinant().abs().is_one(), "{name}: witness not unimodular");
        }
    }
    ensure!(tangent.rays().len() == 6, "tangent fan has {} rays", tangent.rays().len());
    ensure!(tangent.is_smooth() && tangent.is_complete(), "tangent fan not smooth complete");
    ensure!(tangent.euler_characteristic().map_err(|e| e.to_string())? == 8, "tangent fan chi");
    let g = class_group(&tangent).map_err(|e| e.to_string())?;
    ensure!(*g.group() == AbelianGroup::free(3), "tangent fan class group {}", g.group());
    ensure!(contact_index_check(&tangent).map_err(|e| e.to_string())? == Some(2), "tangent fan index");
    Ok("P3, P(T(P1xP1)) index 2, P1xP2 none, P5 index 3; tangent fan 6 rays, chi 8, Pic Z^3".into())
}

fn surface_classification() -> Outcome {
    let f1 = zoo("f1");
    let cls = f1.classify_smooth_surface().map_err(|e| e.to_string())?;
    ensure!(cls.terminal == MinimalSurface::ProjectivePlane, "F1 ends at {}", cls.terminal);
    ensure!(cls.removed.len() == 1, "F1 needed {} blow-downs", cls.removed.len());
    let order = angular_order(&i64_rays(&f1));
    let gone = cls.removed[0].to_i64().unwrap();
    let j = order.iter().position(|v| *v == gone).unwrap();
    let (prev, next) = (&order[(j + 3) % 4], &order[(j + 1) % 4]);
    ensure!(prev.iter().zip(next).map(|(a, b)| a + b).collect::<Vec<_>>() == gone, "{gone:?} is not v_(j-1)+v_(j+1)");

    let mut r = rng(13);
    let mut steps = 0;
    for trial in 0..20 {
        let mut f = Fan::projective_space(2);
        let blowups = r.gen_range(1..=6);
        for _ in 0..blowups {
            let two = f.cones_of_dim(2);
            let c = &two[r.gen_range(0..two.len())];
            let v = &f.rays()[c[0]] + &f.rays()[c[1]];
            f = f.subdivide_at(&v).map_err(|e| e.to_string())?;
        }
        ensure!(f.is_smooth() && f.is_complete(), "trial {trial}: blow-up not smooth complete");
        let cls = f.classify_smooth_surface().map_err(|e| e.to_string())?;
        ensure!(cls.terminal == MinimalSurface::ProjectivePlane, "trial {trial}: ends at {}", cls.terminal);
        let mut current = angular_order(&i64_rays(&f));
        for v in &cls.removed {
            let v = v.to_i64().unwrap();
            let d = current.len();
            let j = current.iter().position(|w| *w == v).ok_or(format!("trial {trial}: {v:?} missing"))?;
            let (p, q) = (&current[(j + d - 1) % d], &current[(j + 1) % d]);
            ensure!(p[0] + q[0] == v[0] && p[1] + q[1] == v[1], "trial {trial}: {v:?} is not a blow-down");
            current.remove(j);
            steps += 1;
        }
        ensure!(current.len() == 3, "trial {trial}: {} rays left", current.len());
    }
    Ok(format!("F1 -> P2 in one step; 20 iterated blow-ups of P2 return to P2 in {steps} verified steps"))
}

fn hirzebruch_jung_criterion() -> Outcome {
    let mut count = 0;
    for m in 2..=7i64 {
        for k in 1..m {
            if gcd(m, k) != 1 {
                continue;
            }
            count += 1;
            let c = Cone::<Primal>::from_i64(2, &[[0, 1], [m, -k]]).map_err(|e| e.to_string())?;
            let f = resolve_2d(&c).map_err(|e| e.to_string())?;
            ensure!(f.is_smooth(), "{m}/{k}: not smooth");
            let normals = facet_normals(&[vec![0, 1], vec![m, -k]]);
            let rays = i64_rays(&f);
            ensure!(rays.iter().all(|v| in_cone(&normals, v)), "{m}/{k}: ray outside the cone");
            // Clockwise from (0,1) towards (m,-k).
            let mut ordered = rays.clone();
            ordered.sort_by(|a, b| (a[0] * b[1] - a[1] * b[0]).cmp(&0));
            ensure!(
                ordered.first() == Some(&vec![0, 1]) && ordered.last() == Some(&vec![m, -k]),
                "{m}/{k}: ends {ordered:?}"
            );
            let mut cones: Vec<Vec<Vec<i64>>> = ordered.windows(2).map(|w| vec![w[0].clone(), w[1].clone()]).collect();
            let mut got: Vec<Vec<Vec<i64>>> = f
                .max_cone_indices()
                .iter()
                .map(|c| {
                    let mut pair: Vec<Vec<i64>> = c.iter().map(|&i| f.rays()[i].to_i64().unwrap()).collect();
                    pair.sort_by_key(|v| ordered.iter().position(|w| w == v));
                    pair
                })
                .collect();
            cones.sort();
            got.sort();
            ensure!(cones == got, "{m}/{k}: maximal cones do not tile the cone");
            for w in ordered.windows(2) {
                ensure!((w[0][0] * w[1][1] - w[0][1] * w[1][0]).abs() == 1, "{m}/{k}: cone {w:?} not unimodular");
            }
            let cf = continued_fraction(m, k);
            ensure!(ordered.len() == cf.len() + 2, "{m}/{k}: {} new rays, fraction {cf:?}", ordered.len() - 2);
            for (i, a) in cf.iter().enumerate() {
                let (p, u, q) = (&ordered[i], &ordered[i + 1], &ordered[i + 2]);
                ensure!(p[0] + q[0] == a * u[0] && p[1] + q[1] == a * u[1], "{m}/{k}: relation {i} fails for a = {a}");
            }
        }
    }
    Ok(format!("{count} cones with 2 <= m <= 7 match the continued-fraction oracle"))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let divisor = data("p2_d3.json");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}.csv"));
        let args = [
            "toric",
            "moment",
            "--divisor",
            divisor.to_str().unwrap(),
            "--seed",
            "7",
            "--samples",
            "1000",
            "--out",
            out.to_str().unwrap(),
        ];
        let (mut so, mut se) = (Vec::new(), Vec::new());
        let code = toric::cli::run(args, &mut so, &mut se);
        ensure!(code == 0, "run {run} exited {code}: {}", String::from_utf8_lossy(&se));
        outputs.push((std::fs::read(&out).map_err(|e| e.to_string())?, so));
    }
    ensure!(outputs[0] == outputs[1], "two seeded runs differ");
    let rows = outputs[0].0.iter().filter(|&&b| b == b'\n').count();
    ensure!(rows == 1 + 7 + 1000, "CSV has {rows} lines");
    for name in ZOO {
        let args = ["toric", "check", "--fan"];
        let path = data(&format!("zoo/{name}.json"));
        let (mut so, mut se) = (Vec::new(), Vec::new());
        let code =
            toric::cli::run(args.iter().map(|s| s.to_string()).chain([path.display().to_string()]), &mut so, &mut se);
        ensure!(code == 0, "check {name} exited {code}");
        let golden = std::fs::read(data(&format!("golden/check_{name}.txt"))).map_err(|e| e.to_string())?;
        ensure!(so == golden, "check {name} differs from its golden file");
    }
    Ok("moment --seed 7 --samples 1000 byte-identical twice; 6 check goldens match".into())
}

const CRITERIA: [Criterion; 15] = [
    Criterion { id: 1, name: "duality involution", limit: Some(Duration::from_secs(10)), run: duality_involution },
    Criterion {
        id: 2,
        name: "Hilbert basis oracle",
        limit: Some(Duration::from_secs(60)),
        run: hilbert_oracle_criterion,
    },
    Criterion { id: 3, name: "A1 chart regression", limit: None, run: a1_chart },
    Criterion { id: 4, name: "fan invariants on the zoo", limit: Some(Duration::from_secs(5)), run: zoo_invariants },
    Criterion { id: 5, name: "fundamental group torsion", limit: None, run: pi1_torsion },
    Criterion { id: 6, name: "divisor suite", limit: None, run: divisor_suite },
    Criterion { id: 7, name: "support function laws", limit: None, run: support_function_laws },
    Criterion { id: 8, name: "moment map convexity", limit: Some(Duration::from_secs(30)), run: moment_convexity },
    Criterion { id: 9, name: "compact torus invariance", limit: None, run: sn_invariance },
    Criterion { id: 10, name: "Legendre gradient and monotonicity", limit: None, run: legendre_gradient },
    Criterion { id: 11, name: "projective retraction", limit: None, run: retraction },
    Criterion {
        id: 12,
        name: "contact classification",
        limit: Some(Duration::from_secs(60)),
        run: contact_classification,
    },
    Criterion { id: 13, name: "surface blow-downs", limit: None, run: surface_classification },
    Criterion { id: 14, name: "Hirzebruch-Jung resolutions", limit: None, run: hirzebruch_jung_criterion },
    Criterion { id: 15, name: "CLI determinism and goldens", limit: None, run: cli_determinism },
];

fn main() {
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!("{tag} [{:02}] {}: {detail} ({:.2?})", c.id, c.name, elapsed);
        if outcome.is_err() {
            failed.push(c.id);
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed.len(), CRITERIA.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
