//! Dense exact linear algebra: rational elimination, Laurent adjugates,
//! integer Hermite and Smith forms, and elimination over the local ring
//! `Z_(q)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::primesym::{FamilyId, LaurentScalar};
use crate::qmath::{self, Q};

/// Minimal commutative ring interface used by the dense matrix type.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero_elt() -> Self;
    fn one_elt() -> Self;
    fn is_zero_elt(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
}

impl Scalar for Q {
    fn zero_elt() -> Self {
        Zero::zero()
    }
    fn one_elt() -> Self {
        One::one()
    }
    fn is_zero_elt(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self.clone()
    }
}

impl Scalar for LaurentScalar {
    fn zero_elt() -> Self {
        LaurentScalar::zero()
    }
    fn one_elt() -> Self {
        LaurentScalar::one()
    }
    fn is_zero_elt(&self) -> bool {
        LaurentScalar::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type QMat = Mat<Q>;
pub type LMat = Mat<LaurentScalar>;

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero_elt(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one_elt();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero_elt() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero_elt() {
                        out[(i, j)] = out[(i, j)].plus(&a.times(b));
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(T::zero_elt(), |acc, (a, b)| {
                    if a.is_zero_elt() || b.is_zero_elt() {
                        acc
                    } else {
                        acc.plus(&a.times(b))
                    }
                })
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.times(c))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero_elt)
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let mut out = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                out[(a.rows + i, a.cols + j)] = b[(i, j)].clone();
            }
        }
        out
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Determinant by expansion along rows with memoised column subsets;
    /// division free, so it works over any commutative ring.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return T::one_elt();
        }
        // dp[mask] = det of rows (n - popcount(mask))..n restricted to columns in mask
        let mut dp: BTreeMap<u32, T> = BTreeMap::new();
        dp.insert(0, T::one_elt());
        for k in (0..n).rev() {
            let size = n - k;
            let mut next = BTreeMap::new();
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let mut acc = T::zero_elt();
                let mut sign_pos = 0;
                for j in 0..n {
                    if mask & (1 << j) == 0 {
                        continue;
                    }
                    let a = &self[(k, j)];
                    if !a.is_zero_elt() {
                        if let Some(minor) = dp.get(&(mask & !(1 << j))) {
                            if !minor.is_zero_elt() {
                                let term = a.times(minor);
                                acc = if sign_pos % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
                            }
                        }
                    }
                    sign_pos += 1;
                }
                next.insert(mask, acc);
            }
            dp = next;
        }
        dp.remove(&((1u32 << n) - 1)).unwrap_or_else(T::zero_elt)
    }

    /// Classical adjugate: `adj · A = det(A) · I`.
    pub fn adjugate(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return Self::identity(1);
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let m = self.select(&rows, &cols).det();
                out[(i, j)] = if (i + j) % 2 == 0 { m } else { m.negated() };
            }
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl LMat {
    /// Inverse of a Laurent matrix whose determinant is a monomial `c p^k`.
    pub fn inverse_monomial_det(&self) -> Option<LMat> {
        let d = self.det();
        if d.terms().len() != 1 {
            return None;
        }
        let adj = self.adjugate();
        let mut out = LMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = adj[(i, j)].div_monomial(&d)?;
            }
        }
        Some(out)
    }

    pub fn eval(&self, p: u64) -> QMat {
        self.map(|x| x.eval(p))
    }

    pub fn family(&self) -> Option<&FamilyId> {
        self.entries().find_map(|x| x.family())
    }

    /// The rational matrix when no entry involves the family symbol.
    pub fn as_rational(&self) -> Option<QMat> {
        if self.entries().all(|x| x.as_rational().is_some()) {
            Some(self.map(|x| x.as_rational().unwrap()))
        } else {
            None
        }
    }

    /// `M = Σ p^e M_e` with rational `M_e`.
    pub fn components(&self) -> BTreeMap<i64, QMat> {
        let mut out: BTreeMap<i64, QMat> = BTreeMap::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (e, c) in self[(i, j)].terms() {
                    out.entry(*e).or_insert_with(|| QMat::zeros(self.rows, self.cols))[(i, j)] = c.clone();
                }
            }
        }
        out
    }

    /// `c p^e M` in `family`.
    pub fn monomial(family: Option<&FamilyId>, e: i64, m: &QMat) -> LMat {
        m.map(|x| LaurentScalar::monomial(family.cloned(), e, x.clone()))
    }

    pub fn try_add(&self, o: &LMat) -> crate::Result<LMat> {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&o.data) {
            *a = a.try_add(b)?;
        }
        Ok(out)
    }

    pub fn try_mul(&self, o: &LMat) -> crate::Result<LMat> {
        let mut out = LMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = LaurentScalar::zero();
                for k in 0..self.cols {
                    acc = acc.try_add(&self[(i, k)].try_mul(&o[(k, j)])?)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    pub fn from_rational(m: &QMat) -> LMat {
        m.map(|x| LaurentScalar::constant(x.clone()))
    }
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..m.cols {
                let tmp = m[(p, j)].clone();
                m[(p, j)] = m[(r, j)].clone();
                m[(r, j)] = tmp;
            }
        }
        let inv = m[(r, c)].recip();
        for j in c..m.cols {
            m[(r, j)] = &m[(r, j)] * &inv;
        }
        for i in 0..m.rows {
            if i != r && !m[(i, c)].is_zero() {
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let delta = &f * &m[(r, j)];
                    m[(i, j)] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMat) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of `{ v : m v = 0 }`, one vector per free column, free entry 1.
pub fn nullspace(m: &QMat) -> Vec<Vec<Q>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); m.cols];
            v[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -w[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Affine solution set of `m x = b`: particular solution with free
/// variables set to zero, plus a kernel basis.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub particular: Vec<Q>,
    pub kernel: Vec<Vec<Q>>,
}

pub fn solve(m: &QMat, b: &[Q]) -> Option<AffineSolution> {
    assert_eq!(m.rows, b.len());
    let mut aug = QMat::from_fn(m.rows, m.cols + 1, |i, j| if j < m.cols { m[(i, j)].clone() } else { b[i].clone() });
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut particular = vec![Q::zero(); m.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        particular[pc] = aug[(r, m.cols)].clone();
    }
    Some(AffineSolution {
        particular,
        kernel: nullspace(m),
    })
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    assert!(m.is_square());
    let n = m.rows;
    let mut aug = QMat::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m[(i, j)].clone()
        } else if j - n == i {
            Q::one()
        } else {
            Q::zero()
        }
    });
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(QMat::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
}

pub fn det_q(m: &QMat) -> Q {
    assert!(m.is_square());
    let n = m.rows;
    let mut w = m.clone();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !w[(i, c)].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            for j in 0..n {
                let tmp = w[(p, j)].clone();
                w[(p, j)] = w[(c, j)].clone();
                w[(c, j)] = tmp;
            }
            det = -det;
        }
        let piv = w[(c, c)].clone();
        det *= &piv;
        for i in c + 1..n {
            if !w[(i, c)].is_zero() {
                let f = &w[(i, c)] / &piv;
                for j in c..n {
                    let delta = &f * &w[(c, j)];
                    w[(i, j)] -= delta;
                }
            }
        }
    }
    det
}

/// Integer matrix as rows of `BigInt`.
pub type ZMat = Vec<Vec<BigInt>>;

/// Row-style Hermite normal form: returns `(h, u)` with `u` unimodular and
/// `u · a = h`, `h` upper triangular with positive pivots and reduced
/// entries above each pivot.
pub fn hermite_normal_form(a: &ZMat) -> (ZMat, ZMat) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut u: ZMat = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        // gcd-reduce column c below row r
        loop {
            let nz: Vec<usize> = (r..m).filter(|&i| !h[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| h[i][c].abs()).unwrap();
            h.swap(r, piv);
            u.swap(r, piv);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let f = h[i][c].div_floor(&h[r][c]);
                for j in 0..n {
                    let d = &f * &h[r][j];
                    h[i][j] -= d;
                }
                for j in 0..m {
                    let d = &f * &u[r][j];
                    u[i][j] -= d;
                }
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for j in 0..n {
                h[r][j] = -h[r][j].clone();
            }
            for j in 0..m {
                u[r][j] = -u[r][j].clone();
            }
        }
        for i in 0..r {
            let f = h[i][c].div_floor(&h[r][c]);
            if f.is_zero() {
                continue;
            }
            for j in 0..n {
                let d = &f * &h[r][j];
                h[i][j] -= d;
            }
            for j in 0..m {
                let d = &f * &u[r][j];
                u[i][j] -= d;
            }
        }
        r += 1;
    }
    (h, u)
}

/// Nonzero Smith invariants `d_1 | d_2 | …` of an integer matrix.
pub fn smith_invariants(a: &ZMat) -> Vec<BigInt> {
    let mut w = a.clone();
    let m = w.len();
    let n = w.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !w[i][j].is_zero() && best.is_none_or(|(bi, bj)| w[i][j].abs() < w[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap(t, pi);
        for row in w.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..m {
            let f = w[i][t].div_floor(&w[t][t]);
            for j in t..n {
                let d = &f * &w[t][j];
                w[i][j] -= d;
            }
            if !w[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..n {
            let f = w[t][j].div_floor(&w[t][t]);
            for i in t..m {
                let d = &f * &w[i][t];
                w[i][j] -= d;
            }
            if !w[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility condition
        let piv = w[t][t].clone();
        let mut fixed = true;
        'outer: for i in t + 1..m {
            for j in t + 1..n {
                if !(&w[i][j] % &piv).is_zero() {
                    for k in t..n {
                        let v = w[i][k].clone();
                        w[t][k] += v;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if fixed {
            out.push(piv.abs());
            t += 1;
        }
    }
    out
}

/// Clears denominators row by row.
pub fn to_integer_rows(m: &QMat) -> ZMat {
    (0..m.rows())
        .map(|i| {
            let d = qmath::lcm_denoms(m.row(i));
            m.row(i).iter().map(|x| (x * Q::from_integer(d.clone())).to_integer()).collect()
        })
        .collect()
}

/// Outcome of solving `w·t + b ∈ Z_(q)^m` for `t ∈ Q_q^s`.
#[derive(Debug, Clone)]
pub struct LocalSolution {
    /// A rational solution.
    pub t: Vec<Q>,
    /// Any `t'` with `v_q(t' - t) >= tolerance` coordinatewise is also a solution.
    pub tolerance: i64,
}

/// Solves `w t + b ≡ 0 mod Z_(q)^m` by Smith-style elimination over the
/// local ring `Z_(q)` (pivots of minimal `q`-valuation). `None` means the
/// congruence has no `q`-adic solution.
pub fn local_solve(w: &QMat, b: &[Q], q: u64) -> Option<LocalSolution> {
    let m = w.rows();
    let s = w.cols();
    let mut a = w.clone();
    let mut rhs = b.to_vec();
    // column transform: t = colop · u
    let mut colop = QMat::identity(s);
    let mut diag: Vec<Q> = Vec::new();
    let mut k = 0;
    while k < m.min(s) {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in k..m {
            for j in k..s {
                if !a[(i, j)].is_zero() {
                    let v = qmath::val(&a[(i, j)], q);
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        if pi != k {
            for j in 0..s {
                let tmp = a[(pi, j)].clone();
                a[(pi, j)] = a[(k, j)].clone();
                a[(k, j)] = tmp;
            }
            rhs.swap(pi, k);
        }
        if pj != k {
            for i in 0..m {
                let tmp = a[(i, pj)].clone();
                a[(i, pj)] = a[(i, k)].clone();
                a[(i, k)] = tmp;
            }
            for i in 0..s {
                let tmp = colop[(i, pj)].clone();
                colop[(i, pj)] = colop[(i, k)].clone();
                colop[(i, k)] = tmp;
            }
        }
        let piv = a[(k, k)].clone();
        for i in k + 1..m {
            if a[(i, k)].is_zero() {
                continue;
            }
            let f = &a[(i, k)] / &piv;
            for j in k..s {
                let d = &f * &a[(k, j)];
                a[(i, j)] -= d;
            }
            let d = &f * &rhs[k];
            rhs[i] -= d;
        }
        for j in k + 1..s {
            if a[(k, j)].is_zero() {
                continue;
            }
            let f = &a[(k, j)] / &piv;
            for i in 0..m {
                let d = &f * &a[(i, k)];
                a[(i, j)] -= d;
            }
            for i in 0..s {
                let d = &f * &colop[(i, k)];
                colop[(i, j)] -= d;
            }
        }
        diag.push(piv);
        k += 1;
    }
    let rank = diag.len();
    for r in &rhs[rank..] {
        if !qmath::is_local_integral(r, q) {
            return None;
        }
    }
    let mut u = vec![Q::zero(); s];
    let mut tolerance = 0i64;
    for (i, d) in diag.iter().enumerate() {
        u[i] = -(&rhs[i] / d);
        tolerance = tolerance.max(-qmath::val(d, q));
    }
    let t = colop.apply(&u);
    Some(LocalSolution { t, tolerance })
}

/// Rank over `F_q` of rational vectors that are `q`-integral.
pub fn rank_mod_p(vectors: &[Vec<Q>], q: u64) -> usize {
    let qb = BigInt::from(q);
    let mut rows: Vec<Vec<u64>> = vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    let r = qmath::residue(x, &qb);
                    u64::try_from(r).expect("residue fits")
                })
                .collect()
        })
        .collect();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = mod_pow(rows[rank][c], q - 2, q);
        for j in 0..ncols {
            rows[rank][j] = rows[rank][j] * inv % q;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..ncols {
                    rows[i][j] = (rows[i][j] + q * q - f * rows[rank][j] % q) % q;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{q, qf};

    fn qm(rows: &[&[i64]]) -> QMat {
        QMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    fn zm(rows: &[&[i64]]) -> ZMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn det_and_inverse() {
        let m = qm(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det(), q(18));
        assert_eq!(det_q(&m), q(18));
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(3));
        let adj = m.adjugate();
        assert_eq!(adj.mul(&m), QMat::identity(3).scale(&q(18)));
        assert!(inverse(&qm(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn solve_and_nullspace() {
        let m = qm(&[&[1, 1, 0], &[0, 0, 1]]);
        let sol = solve(&m, &[q(3), q(2)]).unwrap();
        assert_eq!(sol.particular, vec![q(3), q(0), q(2)]);
        assert_eq!(sol.kernel, vec![vec![q(-1), q(1), q(0)]]);
        assert!(solve(&qm(&[&[1], &[1]]), &[q(1), q(2)]).is_none());
    }

    #[test]
    fn hnf_is_unimodular_transform() {
        let a = zm(&[&[2], &[3]]);
        let (h, u) = hermite_normal_form(&a);
        assert_eq!(h, zm(&[&[1], &[0]]));
        let uq = QMat::from_rows(u.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect());
        assert!(det_q(&uq).abs() == q(1));
    }

    #[test]
    fn smith() {
        let a = zm(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let inv: Vec<i64> = smith_invariants(&a).iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(inv, vec![2, 6, 12]);
    }

    #[test]
    fn local_solutions() {
        // 5 t + 1/2 ∈ Z_(5): solvable; t + 1/5 ∈ Z_(5): t = -1/5
        let w = qm(&[&[5]]);
        let s = local_solve(&w, &[qf(1, 2)], 5).unwrap();
        assert!(qmath::is_local_integral(&(&s.t[0] * q(5) + qf(1, 2)), 5));
        // 0·t + 1/5 never integral
        let z = qm(&[&[0]]);
        assert!(local_solve(&z, &[qf(1, 5)], 5).is_none());
        let s = local_solve(&qm(&[&[1], &[5]]), &[qf(1, 5), q(0)], 5).unwrap();
        assert_eq!(s.t[0], qf(-1, 5));
    }

    #[test]
    fn mod_p_rank() {
        let v = vec![vec![q(1), q(2)], vec![q(3), q(6)]];
        assert_eq!(rank_mod_p(&v, 5), 1);
        let v = vec![vec![q(1), q(2)], vec![q(3), q(4)]];
        assert_eq!(rank_mod_p(&v, 5), 2);
        assert_eq!(rank_mod_p(&v, 2), 1);
    }
}

/// `[a b; c d]` rendering.
pub fn fmt_mat(m: &QMat) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(crate::qmath::fmt_rational).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

/// `fmt_mat` for Laurent entries; the family is named once at the end.
pub fn fmt_lmat(m: &LMat) -> String {
    if let Some(r) = m.as_rational() {
        return fmt_mat(&r);
    }
    let entry = |x: &LaurentScalar| {
        let parts: Vec<String> = x
            .terms()
            .iter()
            .map(|(e, c)| match e {
                0 => crate::qmath::fmt_rational(c),
                _ => format!("{}*p^{e}", crate::qmath::fmt_rational(c)),
            })
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    };
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(entry).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}] @{}", rows.join("; "), m.family().map(|f| f.to_string()).unwrap_or_default())
}
