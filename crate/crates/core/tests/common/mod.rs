//! Independent oracles and fixtures shared by the integration tests.
//!
//! Nothing here calls into the library's algorithms; the oracles work on
//! plain `i64`/`f64` data by brute force.

#![allow(dead_code)]

use std::path::PathBuf;

use toric::fan::{Fan, FanDocument};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub const ZOO: [&str; 6] = ["p1", "p2", "p1xp1", "f1", "p3", "p112"];

pub fn load_fan(name: &str) -> Fan {
    let text = std::fs::read_to_string(data(name)).unwrap();
    let doc: FanDocument = serde_json::from_str(&text).unwrap();
    let f = doc.to_fan_unchecked().unwrap();
    Fan::new(f.rank(), f.rays().to_vec(), f.max_cone_indices().to_vec()).unwrap()
}

pub fn zoo(name: &str) -> Fan {
    load_fan(&format!("zoo/{name}.json"))
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross(a: &[i64], b: &[i64]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Inward facet normals of a full-dimensional cone in rank 2 or 3.
pub fn facet_normals(rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = rays[0].len();
    let mut candidates = Vec::new();
    for (i, a) in rays.iter().enumerate() {
        if n == 2 {
            candidates.push(vec![-a[1], a[0]]);
            continue;
        }
        for b in &rays[i + 1..] {
            candidates.push(cross(a, b).to_vec());
        }
    }
    let mut out = Vec::new();
    for c in candidates {
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        for s in [1, -1] {
            let c: Vec<i64> = c.iter().map(|x| s * x).collect();
            if rays.iter().all(|r| dot(&c, r) >= 0) && !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

pub fn in_cone(normals: &[Vec<i64>], p: &[i64]) -> bool {
    normals.iter().all(|c| dot(c, p) >= 0)
}

/// Irreducible nonzero lattice points of a cone inside the positive
/// orthant, among the points of `[0, side]^n`.
pub fn hilbert_oracle(rays: &[Vec<i64>], side: i64) -> Vec<Vec<i64>> {
    let n = rays[0].len();
    let normals = facet_normals(rays);
    let mut pts = Vec::new();
    let mut p = vec![0i64; n];
    loop {
        if p.iter().any(|&x| x != 0) && in_cone(&normals, &p) {
            pts.push(p.clone());
        }
        let mut i = 0;
        while i < n && p[i] == side {
            p[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        p[i] += 1;
    }
    let set: std::collections::HashSet<Vec<i64>> = pts.iter().cloned().collect();
    let mut out: Vec<Vec<i64>> = pts
        .iter()
        .filter(|p| {
            !pts.iter().any(|q| {
                let d: Vec<i64> = p.iter().zip(q.iter()).map(|(a, b)| a - b).collect();
                q != *p && set.contains(&d)
            })
        })
        .cloned()
        .collect();
    out.sort();
    out
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Invariant factors of a 2x2 integer matrix from its determinantal divisors.
pub fn invariant_factors_2x2(m: [[i64; 2]; 2]) -> (i64, i64) {
    let d1 = m.iter().flatten().fold(0, |g, &x| gcd(g, x));
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
    if d1 == 0 {
        (0, 0)
    } else {
        (d1, det / d1)
    }
}

/// `m/k = a_1 - 1/(a_2 - …)` by repeated ceiling on exact fractions.
pub fn continued_fraction(m: i64, k: i64) -> Vec<i64> {
    let (mut p, mut q) = (m, k);
    let mut out = Vec::new();
    loop {
        let a = (p + q - 1) / q;
        out.push(a);
        // p/q <- 1 / (a - p/q) = q / (a q - p)
        let r = a * q - p;
        if r == 0 {
            return out;
        }
        (p, q) = (q, r);
    }
}

/// `Σ |χ^u(t)| u / Σ |χ^u(t)|` for a torus point with the given log radii.
pub fn torus_moment(points: &[Vec<i64>], log_radius: &[f64]) -> Vec<f64> {
    let n = log_radius.len();
    let logs: Vec<f64> = points.iter().map(|u| u.iter().zip(log_radius).map(|(&a, r)| a as f64 * r).sum()).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    (0..n).map(|i| points.iter().zip(&w).map(|(u, wi)| u[i] as f64 * wi).sum::<f64>() / total).collect()
}

/// Lattice points of `{u : <u, v_i> >= -a_i}` inside `[-r, r]^n`.
pub fn polytope_points(rays: &[Vec<i64>], coeffs: &[i64], r: i64) -> Vec<Vec<i64>> {
    let n = rays[0].len();
    let mut out = Vec::new();
    let mut p = vec![-r; n];
    loop {
        if rays.iter().zip(coeffs).all(|(v, a)| dot(&p, v) >= -a) {
            out.push(p.clone());
        }
        let mut i = 0;
        while i < n && p[i] == r {
            p[i] = -r;
            i += 1;
        }
        if i == n {
            break;
        }
        p[i] += 1;
    }
    out
}

/// Is `[-K]` divisible by `k` in the class group? True iff some `u` pairs
/// to `1 mod k` with every ray; only `u mod k` matters.
pub fn anticanonical_divisible(rays: &[Vec<i64>], k: i64) -> bool {
    let n = rays[0].len();
    let mut u = vec![0i64; n];
    loop {
        if rays.iter().all(|v| dot(&u, v).rem_euclid(k) == 1) {
            return true;
        }
        let mut i = 0;
        while i < n && u[i] == k - 1 {
            u[i] = 0;
            i += 1;
        }
        if i == n {
            return false;
        }
        u[i] += 1;
    }
}

/// Rays of a complete rank-2 fan in counterclockwise order from angle 0.
pub fn angular_order(rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = rays.to_vec();
    out.sort_by(|a, b| {
        let ta = (a[1] as f64).atan2(a[0] as f64).rem_euclid(std::f64::consts::TAU);
        let tb = (b[1] as f64).atan2(b[0] as f64).rem_euclid(std::f64::consts::TAU);
        ta.partial_cmp(&tb).unwrap()
    });
    out
}

pub fn i64_rays(f: &Fan) -> Vec<Vec<i64>> {
    f.rays().iter().map(|r| r.to_i64().unwrap()).collect()
}
