//! Exact integer-lattice arithmetic.
//!
//! Vectors of the lattice `N` and its dual `M` are distinguished at the type
//! level through the [`Side`] marker, so a pairing can only be formed between
//! a [`DualVector`] and a [`LatticeVector`]. Everything here works over
//! arbitrary-precision integers; there is no floating point in this module.

use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Which of the two mutually dual lattices a vector or cone lives in.
pub trait Side: Copy + Clone + fmt::Debug + PartialEq + Eq + PartialOrd + Ord + Hash + Send + Sync + 'static {
    type Opposite: Side<Opposite = Self>;
    const NAME: &'static str;
}

/// Marker for the lattice `N` of one-parameter subgroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Primal {}

/// Marker for the character lattice `M = Hom(N, Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dual {}

impl Side for Primal {
    type Opposite = Dual;
    const NAME: &'static str = "N";
}

impl Side for Dual {
    type Opposite = Primal;
    const NAME: &'static str = "M";
}

/// An integer point of `Z^n`, tagged with the lattice it belongs to.
///
/// Ordering is lexicographic on coordinates; that ordering is the canonical
/// one used whenever sets of vectors are compared.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vector<S: Side> {
    coords: Vec<Int>,
    _side: PhantomData<S>,
}

pub type LatticeVector = Vector<Primal>;
pub type DualVector = Vector<Dual>;

impl<S: Side> Vector<S> {
    pub fn new(coords: Vec<Int>) -> Self {
        Vector { coords, _side: PhantomData }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(vec![Int::zero(); rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.coords[i] = Int::one();
        v
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Int> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn content(&self) -> Int {
        gcd_all(&self.coords)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// The first lattice point on the ray through `self`.
    pub fn primitive(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Degenerate("the zero vector has no primitive generator".into()));
        }
        let g = self.content();
        Ok(Self::new(self.coords.iter().map(|c| c / &g).collect()))
    }

    pub fn scale(&self, k: &Int) -> Self {
        Self::new(self.coords.iter().map(|c| c * k).collect())
    }

    pub fn to_rational(&self) -> Vec<Rat> {
        self.coords.iter().map(|c| Rat::from_integer(c.clone())).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Reinterpret the coordinates on the other side of the duality.
    pub fn transpose(&self) -> Vector<S::Opposite> {
        Vector::new(self.coords.clone())
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(|c| c.to_i64()).collect()
    }
}

impl<S: Side> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", S::NAME, self)
    }
}

impl<S: Side> fmt::Display for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<S: Side> Add for &Vector<S> {
    type Output = Vector<S>;
    fn add(self, rhs: Self) -> Vector<S> {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch in vector addition");
        Vector::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect())
    }
}

impl<S: Side> Sub for &Vector<S> {
    type Output = Vector<S>;
    fn sub(self, rhs: Self) -> Vector<S> {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch in vector subtraction");
        Vector::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect())
    }
}

impl<S: Side> Neg for &Vector<S> {
    type Output = Vector<S>;
    fn neg(self) -> Vector<S> {
        Vector::new(self.coords.iter().map(|c| -c).collect())
    }
}

/// The dual pairing `<u, v>`.
pub fn pairing(u: &DualVector, v: &LatticeVector) -> Result<Int> {
    Error::check_dim(u.rank(), v.rank())?;
    Ok(dot(u.coords(), v.coords()))
}

pub(crate) fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dot_rat(a: &[Int], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + y * x)
}

pub(crate) fn gcd_all(xs: &[Int]) -> Int {
    xs.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Divide by the content; zero stays zero.
pub(crate) fn make_primitive(v: Vec<Int>) -> Vec<Int> {
    let g = gcd_all(&v);
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|c| c / &g).collect()
    }
}

/// Clear denominators of a rational vector and return the primitive integer
/// vector pointing the same way.
pub(crate) fn integerize(v: &[Rat]) -> Vec<Int> {
    let l = v.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
    make_primitive(v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect())
}

/// A dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    /// Build from explicit rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<Int>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix row");
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[Vec<Int>]) -> Self {
        Self::from_rows(rows, cols).transpose()
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect();
        Self::from_rows(cols, &rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.to_rows();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(&self.to_rows())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += k * row[source]
    fn add_row(&mut self, target: usize, source: usize, k: &Int) {
        for j in 0..self.cols {
            let d = k * &self[(source, j)];
            self[(target, j)] += d;
        }
    }

    /// col[target] += k * col[source]
    fn add_col(&mut self, target: usize, source: usize, k: &Int) {
        for i in 0..self.rows {
            let d = k * &self[(i, source)];
            self[(i, target)] += d;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i).iter().map(ToString::to_string).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with
/// nonnegative entries forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `u`, maintained alongside it.
    pub u_inv: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.nrows().min(self.d.ncols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    // Row operations are mirrored on u (left) and, inverted, on u_inv (right).
    macro_rules! swap_rows {
        ($i:expr, $j:expr) => {{
            d.swap_rows($i, $j);
            u.swap_rows($i, $j);
            u_inv.swap_cols($i, $j);
        }};
    }
    macro_rules! add_row {
        ($t:expr, $s:expr, $k:expr) => {{
            let k: Int = $k;
            d.add_row($t, $s, &k);
            u.add_row($t, $s, &k);
            u_inv.add_col($s, $t, &-k);
        }};
    }
    macro_rules! swap_cols {
        ($i:expr, $j:expr) => {{
            d.swap_cols($i, $j);
            v.swap_cols($i, $j);
        }};
    }

    for t in 0..m.min(n) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows!(t, pi);
        swap_cols!(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    add_row!(i, t, -q);
                    if !d[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    d.add_col(j, t, &-&q);
                    v.add_col(j, t, &-q);
                    if !d[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // A remainder smaller than the pivot survived; promote it.
                let mut best = (t, t);
                for i in t + 1..m {
                    if !d[(i, t)].is_zero() && d[(i, t)].abs() < d[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !d[(t, j)].is_zero() && d[(t, j)].abs() < d[best].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    swap_rows!(t, best.0);
                }
                if best.1 != t {
                    swap_cols!(t, best.1);
                }
                continue;
            }
            // Divisibility chain: the pivot must divide the whole trailing block.
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&d[(i, j)] % &d[(t, t)]).is_zero()));
            match offender {
                Some(i) => add_row!(t, i, Int::one()),
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    SmithForm { u, d, v, u_inv }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`: upper
/// echelon, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`, zero rows dropped. Two generating sets of the same lattice
/// give identical output.
#[allow(clippy::needless_range_loop)]
pub fn hermite_normal_form(cols: usize, rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let mut a: Vec<Vec<Int>> = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        // Euclid down column c over rows r..
        loop {
            let mut piv: Option<usize> = None;
            for i in r..a.len() {
                if !a[i][c].is_zero() && piv.is_none_or(|p| a[i][c].abs() < a[p][c].abs()) {
                    piv = Some(i);
                }
            }
            let Some(p) = piv else { break };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    let pivot_row = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -&*x;
                }
            }
            let pivot_row = a[r].clone();
            for i in 0..r {
                let q = a[i][c].div_floor(&pivot_row[c]);
                if !q.is_zero() {
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// Rank over Q of the given integer rows.
pub(crate) fn rank_of_rows(rows: &[Vec<Int>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut a = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if !a[i][c].is_zero() {
                let (x, y) = (a[r][c].clone(), a[i][c].clone());
                let pivot_row = a[r].clone();
                for (e, pr) in a[i].iter_mut().zip(&pivot_row) {
                    *e = &*e * &x - pr * &y;
                }
                let row = std::mem::take(&mut a[i]);
                a[i] = make_primitive(row);
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// A basis (in Hermite normal form) of the integer kernel `{x : A x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<Int>> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let basis: Vec<Vec<Int>> = (r..a.ncols()).map(|j| snf.v.column(j)).collect();
    hermite_normal_form(a.ncols(), &basis)
}

/// Some integer solution of `A x = b`, or `None` when there is none.
pub fn solve_integer(a: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    assert_eq!(a.nrows(), b.len());
    let snf = smith_normal_form(a);
    let c = snf.u.apply(b);
    let diag = snf.diagonal();
    let r = snf.rank();
    let mut y = vec![Int::zero(); a.ncols()];
    for i in 0..a.nrows() {
        if i < r {
            let (q, rem) = c[i].div_rem(&diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.apply(&y))
}

/// A finitely generated abelian group `Z^r + Z/d_1 + ... + Z/d_k`
/// with `d_1 | d_2 | ... | d_k` and every `d_j >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<Int> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Read off the cokernel of a matrix from its invariant factors: `rows`
    /// is the rank of the target lattice.
    fn from_invariants(rows: usize, diag: &[Int]) -> Self {
        let nonzero: Vec<&Int> = diag.iter().filter(|x| !x.is_zero()).collect();
        AbelianGroup {
            free_rank: rows - nonzero.len(),
            torsion: nonzero.into_iter().filter(|x| !x.is_one()).cloned().collect(),
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Z^rank / <generators>`.
pub fn quotient_group<S: Side>(rank: usize, generators: &[Vector<S>]) -> Result<AbelianGroup> {
    for g in generators {
        Error::check_dim(rank, g.rank())?;
    }
    let cols: Vec<Vec<Int>> = generators.iter().map(|g| g.coords().to_vec()).collect();
    let a = IntMatrix::from_columns(rank, &cols);
    let snf = smith_normal_form(&a);
    Ok(AbelianGroup::from_invariants(rank, &snf.diagonal()))
}

/// The quotient of `Z^n` by the saturation of a sublattice, presented as
/// `Z^q` together with an explicit projection.
///
/// Rows of `projection` form a basis of the annihilator of the sublattice in
/// the dual lattice, which is how `M(tau) = tau^perp ∩ M` is read off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientLattice {
    pub ambient_rank: usize,
    /// Columns: a basis of the saturated sublattice.
    pub sublattice_basis: IntMatrix,
    /// `q x n`, surjective, kills the sublattice.
    pub projection: IntMatrix,
    /// `n x q` with `projection * section = I`.
    pub section: IntMatrix,
}

impl QuotientLattice {
    pub fn new<S: Side>(ambient_rank: usize, generators: &[Vector<S>]) -> Result<Self> {
        for g in generators {
            Error::check_dim(ambient_rank, g.rank())?;
        }
        let cols: Vec<Vec<Int>> = generators.iter().map(|g| g.coords().to_vec()).collect();
        let a = IntMatrix::from_columns(ambient_rank, &cols);
        let snf = smith_normal_form(&a);
        let r = snf.rank();
        let n = ambient_rank;
        let sub: Vec<Vec<Int>> = (0..r).map(|j| snf.u_inv.column(j)).collect();
        let proj: Vec<Vec<Int>> = (r..n).map(|i| snf.u.row(i)).collect();
        let sect: Vec<Vec<Int>> = (r..n).map(|j| snf.u_inv.column(j)).collect();
        Ok(QuotientLattice {
            ambient_rank: n,
            sublattice_basis: IntMatrix::from_columns(n, &sub),
            projection: IntMatrix::from_rows(n, &proj),
            section: IntMatrix::from_columns(n, &sect),
        })
    }

    pub fn rank(&self) -> usize {
        self.projection.nrows()
    }

    pub fn sublattice_rank(&self) -> usize {
        self.sublattice_basis.ncols()
    }

    pub fn project<S: Side>(&self, v: &Vector<S>) -> Vector<S> {
        Vector::new(self.projection.apply(v.coords()))
    }

    pub fn lift<S: Side>(&self, v: &Vector<S>) -> Vector<S> {
        Vector::new(self.section.apply(v.coords()))
    }

    /// Basis of the annihilator of the sublattice, in the opposite lattice.
    pub fn annihilator<S: Side>(&self) -> Vec<Vector<S>> {
        (0..self.rank()).map(|i| Vector::new(self.projection.row(i))).collect()
    }
}
