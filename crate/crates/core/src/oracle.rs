//! Brute-force reference computations on realized groups, where every
//! nontrivial local datum sits at one of finitely many explicit primes.
//!
//! Membership here does not use local bases or valuations of `B⁻¹x`. The
//! group is rebuilt as the integer span of `Z^n` and finitely many
//! generators (divisible directions truncated at a depth fitted to the
//! query), and membership is decided by reducing against the Hermite form
//! of that span.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog;
use crate::chartype::HeightValue;
use crate::error::{Error, Result};
use crate::group::{FRGroup, LocalData};
use crate::linalg::{self, LMat, QMat, ZMat};
use crate::primesym::{ClassKey, FamilyId, Registry};
use crate::qmath::{self, q, Q};

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Generators of the `p`-part of a realized group.
#[derive(Debug, Clone)]
struct PrimePart {
    /// Non-divisible local basis vectors, scaled to `p`-power denominators.
    gens: Vec<Vec<Q>>,
    /// Directions along which the group is `p`-divisible.
    divisible: Vec<Vec<Q>>,
}

/// A realized group given by generators.
#[derive(Debug, Clone)]
pub struct RealizedGroup {
    rank: usize,
    parts: BTreeMap<u64, PrimePart>,
}

/// Scales `v` by the part of its denominator prime to `p`.
fn p_scaled(v: &[Q], p: u64) -> Vec<Q> {
    let d = qmath::lcm_denoms(v);
    let pp = BigInt::from(p).pow(qmath::int_valuation(&d, p) as u32);
    let m = Q::from_integer(d / pp);
    v.iter().map(|x| x * &m).collect()
}

fn max_p_exponent(vs: &[Vec<Q>], p: u64) -> u32 {
    vs.iter()
        .map(|v| qmath::int_valuation(&qmath::lcm_denoms(v), p) as u32)
        .max()
        .unwrap_or(0)
}

/// Reduces `v` modulo the row lattice of an upper-triangular Hermite basis.
fn reduce(h: &ZMat, v: &mut [BigInt]) {
    for row in h {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let k = v[c].div_floor(&row[c]);
        if !k.is_zero() {
            for (a, b) in v.iter_mut().zip(row) {
                *a -= &k * b;
            }
        }
    }
}

/// Integer lattice `Δ·Λ` with `Δ` a common denominator; contains `Δ·Z^n`.
#[derive(Debug, Clone)]
struct ScaledLattice {
    delta: BigInt,
    hermite: ZMat,
}

impl ScaledLattice {
    fn new(n: usize, gens: &[Vec<Q>]) -> Self {
        let delta = gens.iter().fold(BigInt::one(), |acc, g| acc.lcm(&qmath::lcm_denoms(g)));
        let mut rows: ZMat = (0..n)
            .map(|i| (0..n).map(|j| if i == j { delta.clone() } else { BigInt::zero() }).collect())
            .collect();
        for g in gens {
            rows.push(g.iter().map(|x| (x * Q::from_integer(delta.clone())).to_integer()).collect());
        }
        let (h, _) = linalg::hermite_normal_form(&rows);
        let hermite = h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        ScaledLattice { delta, hermite }
    }

    /// The same lattice over the common denominator `lcm(Δ, d)`.
    fn widened(mut self, d: &BigInt) -> Self {
        let delta = self.delta.lcm(d);
        let f = &delta / &self.delta;
        for row in &mut self.hermite {
            for x in row.iter_mut() {
                *x *= &f;
            }
        }
        self.delta = delta;
        self
    }

    /// Canonical representative of `Δ·x` modulo the lattice, or `None` when
    /// `x` has denominators outside `Δ`.
    fn residue(&self, x: &[Q]) -> Option<Vec<BigInt>> {
        let d = Q::from_integer(self.delta.clone());
        let mut v = Vec::with_capacity(x.len());
        for c in x {
            let s = c * &d;
            if !s.is_integer() {
                return None;
            }
            v.push(s.to_integer());
        }
        reduce(&self.hermite, &mut v);
        Some(v)
    }

    fn contains(&self, x: &[Q]) -> bool {
        self.residue(x).is_some_and(|r| r.iter().all(Zero::is_zero))
    }
}

impl RealizedGroup {
    /// Requires a registry without families and trivial data at the rest.
    pub fn from_group(g: &FRGroup) -> Result<Self> {
        if g.registry().families().next().is_some() {
            return Err(Error::Precondition("group still has symbolic families".into()));
        }
        if !g.local(&ClassKey::Rest).is_identity() {
            return Err(Error::Precondition("group has nontrivial data at the rest".into()));
        }
        let mut parts = BTreeMap::new();
        for (k, l) in g.locals() {
            let ClassKey::Explicit(p) = k else { continue };
            if l.is_identity() {
                continue;
            }
            let b = l.basis().eval(*p);
            let mut part = PrimePart {
                gens: vec![],
                divisible: vec![],
            };
            for j in 0..g.rank() {
                let col = p_scaled(&b.col(j), *p);
                if l.divisible().contains(&j) {
                    part.divisible.push(col);
                } else {
                    part.gens.push(col);
                }
            }
            parts.insert(*p, part);
        }
        Ok(RealizedGroup { rank: g.rank(), parts })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn primes(&self) -> BTreeSet<u64> {
        self.parts.keys().copied().collect()
    }

    /// Generators with divisible directions divided by `p^depth[p]`.
    fn generators(&self, depth: &BTreeMap<u64, u32>) -> Vec<Vec<Q>> {
        let mut out = Vec::new();
        for (p, part) in &self.parts {
            out.extend(part.gens.iter().cloned());
            let d = depth.get(p).copied().unwrap_or(0);
            let s = qmath::qpow(*p, -(d as i64));
            out.extend(part.divisible.iter().map(|v| v.iter().map(|x| x * &s).collect()));
        }
        out
    }

    fn lattice_for(&self, vs: &[Vec<Q>]) -> ScaledLattice {
        let depth = self.primes().into_iter().map(|p| (p, max_p_exponent(vs, p))).collect();
        ScaledLattice::new(self.rank, &self.generators(&depth))
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        if x.len() != self.rank {
            return false;
        }
        let d = qmath::lcm_denoms(x);
        if qmath::prime_factors(&d).iter().any(|p| !self.parts.contains_key(p)) {
            return false;
        }
        self.lattice_for(&[x.to_vec()]).contains(x)
    }
}

/// A brute-force height: exact, or at least the search limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightBound {
    Exact(u64),
    AtLeast(u64),
}

impl HeightBound {
    /// Agreement with a symbolic height.
    pub fn agrees_with(self, h: HeightValue) -> bool {
        match (self, h) {
            (HeightBound::Exact(k), HeightValue::Finite(j)) => k == j,
            (HeightBound::AtLeast(k), HeightValue::Finite(j)) => j >= k,
            (HeightBound::AtLeast(_), HeightValue::Inf) => true,
            (HeightBound::Exact(_), HeightValue::Inf) => false,
        }
    }
}

/// Largest `k ≤ k_max` with `x / p^k` in the group.
pub fn brute_force_height(g: &RealizedGroup, x: &[Q], p: u64, k_max: u64) -> Result<HeightBound> {
    if !g.contains(x) {
        return Err(Error::NotMember);
    }
    if x.iter().all(Zero::is_zero) {
        return Ok(HeightBound::AtLeast(k_max));
    }
    let mut k = 0;
    while k < k_max {
        let s = qmath::qpow(p, -(k as i64 + 1));
        let y: Vec<Q> = x.iter().map(|c| c * &s).collect();
        if !g.contains(&y) {
            return Ok(HeightBound::Exact(k));
        }
        k += 1;
    }
    Ok(HeightBound::AtLeast(k_max))
}

/// Rationals `a/d` with `|a| ≤ num_bound` and `d ≤ den_bound` a product of
/// the given primes.
fn box_values(num_bound: u64, den_bound: u64, primes: &BTreeSet<u64>) -> Vec<Q> {
    let dens: Vec<u64> = (1..=den_bound.max(1))
        .filter(|&d| qmath::prime_factors(&BigInt::from(d)).is_subset(primes))
        .collect();
    let mut set = BTreeSet::new();
    for d in dens {
        for a in -(num_bound as i64)..=(num_bound as i64) {
            set.insert(Q::new(a.into(), (d as i64).into()));
        }
    }
    set.into_iter().collect()
}

fn product_count(sizes: &[usize]) -> u128 {
    sizes.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128))
}

/// All matrices with entries `a/d` (`|a| ≤ num_bound`, `d ≤ den_bound` built
/// from the group's primes) mapping every generator into the group, sorted.
///
/// Columns are filtered first (`M e_i ∈ G`); the remaining conditions are
/// additive in the columns and are matched through their residues modulo
/// the generator lattice. `budget` bounds the number of partial column
/// tuples visited, not the size of the box.
pub fn brute_force_end(g: &RealizedGroup, num_bound: u64, den_bound: u64, budget: u128) -> Result<Vec<QMat>> {
    let n = g.rank;
    let values = box_values(num_bound, den_bound, &g.primes());
    let box_cols = product_count(&vec![values.len(); n]);
    if box_cols.saturating_mul(n as u128) > budget {
        return Err(Error::Budget {
            needed: box_cols.saturating_mul(n as u128),
            budget,
        });
    }
    // divisible directions are tested at a depth exceeding any finite height
    // an image could have
    let max_num = values.iter().map(|v| v.numer().abs()).max().unwrap_or_else(BigInt::one);
    let mut depth = BTreeMap::new();
    for (p, part) in &g.parts {
        let all: Vec<Vec<Q>> = part.gens.iter().chain(&part.divisible).cloned().collect();
        let size: BigInt = all
            .iter()
            .flatten()
            .map(|x| x.numer().abs() + BigInt::one())
            .fold(BigInt::one(), |a, b| a * b);
        let bound = &max_num * BigInt::from(n as u64 + 1) * size;
        let mut k = 1u32;
        let pb = BigInt::from(*p);
        while pb.pow(k) <= bound {
            k += 1;
        }
        depth.insert(*p, k + 1);
    }
    let tests = g.generators(&depth);
    // target lattice deep enough for every image M·t
    let mut deep = depth.clone();
    let den_exp: BTreeMap<u64, u32> = g
        .primes()
        .into_iter()
        .map(|p| (p, max_p_exponent(&[values.clone()], p) + max_p_exponent(&tests, p)))
        .collect();
    for (p, d) in deep.iter_mut() {
        *d = (*d).max(den_exp[p]);
    }
    let products =
        values.iter().fold(BigInt::one(), |a, v| a.lcm(v.denom())) * tests.iter().fold(BigInt::one(), |a, t| a.lcm(&qmath::lcm_denoms(t)));
    let target = ScaledLattice::new(n, &g.generators(&deep)).widened(&products);
    // candidate columns with v ∈ G
    let mut cols: Vec<Vec<Q>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(cols.len() * values.len());
        for c in &cols {
            for v in &values {
                let mut c2 = c.clone();
                c2.push(v.clone());
                next.push(c2);
            }
        }
        cols = next;
    }
    let cols: Vec<Vec<Q>> = cols.into_iter().filter(|c| target.contains(c)).collect();
    // contributions of column `i` to the residues of M·t over all tests t
    let key = |i: usize, c: &[Q]| -> Option<Vec<BigInt>> {
        let mut out = Vec::with_capacity(tests.len() * n);
        for t in &tests {
            let v: Vec<Q> = c.iter().map(|x| x * &t[i]).collect();
            out.extend(target.residue(&v)?);
        }
        Some(out)
    };
    let keyed: Vec<Vec<(Vec<BigInt>, usize)>> = (0..n)
        .map(|i| cols.iter().enumerate().filter_map(|(j, c)| key(i, c).map(|k| (k, j))).collect())
        .collect();
    let sizes: Vec<usize> = keyed.iter().map(Vec::len).collect();
    let visits = product_count(&sizes[..n - 1]) + sizes[n - 1] as u128;
    if visits > budget {
        return Err(Error::Budget { needed: visits, budget });
    }
    let add = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut s: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        for chunk in s.chunks_mut(n) {
            reduce(&target.hermite, chunk);
        }
        s
    };
    let neg = |a: &[BigInt]| -> Vec<BigInt> {
        let mut s: Vec<BigInt> = a.iter().map(|x| -x).collect();
        for chunk in s.chunks_mut(n) {
            reduce(&target.hermite, chunk);
        }
        s
    };
    // partial sums over the first n-1 columns
    let zero = vec![BigInt::zero(); tests.len() * n];
    let mut partial: Vec<(Vec<BigInt>, Vec<usize>)> = vec![(zero, vec![])];
    for list in &keyed[..n - 1] {
        let mut next = Vec::with_capacity(partial.len() * list.len());
        for (s, idx) in &partial {
            for (k, j) in list {
                let mut idx2 = idx.clone();
                idx2.push(*j);
                next.push((add(s, k), idx2));
            }
        }
        partial = next;
    }
    let mut by_key: HashMap<Vec<BigInt>, Vec<Vec<usize>>> = HashMap::new();
    for (s, idx) in partial {
        by_key.entry(s).or_default().push(idx);
    }
    let mut out = Vec::new();
    for (k, j) in &keyed[n - 1] {
        if let Some(prefixes) = by_key.get(&neg(k)) {
            for idx in prefixes {
                let mut chosen: Vec<&Vec<Q>> = idx.iter().map(|&i| &cols[i]).collect();
                chosen.push(&cols[*j]);
                out.push(QMat::from_fn(n, n, |r, c| chosen[c][r].clone()));
            }
        }
    }
    out.sort_by(|a, b| a.entries().cmp(b.entries()));
    Ok(out)
}

/// All matrices of the box lying in the symbolic endomorphism module.
///
/// Box members of the module's rational span are determined by their
/// entries at pivot positions, so only those are enumerated.
pub fn symbolic_end_in_box(g: &FRGroup, num_bound: u64, den_bound: u64, budget: u128) -> Result<Vec<QMat>> {
    let mut primes = g.registry().explicit_primes();
    primes.extend(g.exceptional_rest_primes());
    let values = box_values(num_bound, den_bound, &primes);
    let allowed: BTreeSet<&Q> = values.iter().collect();
    let module = crate::endoring::end_ring(g);
    let r = module.generators.len();
    let mut gt = QMat::from_rows(module.generators.iter().map(|m| m.matrix.entries().cloned().collect()).collect());
    let pivots = linalg::rref(&mut gt);
    let total = product_count(&vec![values.len(); pivots.len()]);
    if total > budget {
        return Err(Error::Budget { needed: total, budget });
    }
    // coefficient t with (Σ t_i M_i)[pivot_k] = prescribed value
    let sub = QMat::from_fn(r, r, |k, i| module.generators[i].matrix.entries().nth(pivots[k]).unwrap().clone());
    let sub_inv = linalg::inverse(&sub).ok_or_else(|| Error::Precondition("degenerate module basis".into()))?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; r];
    loop {
        let target: Vec<Q> = idx.iter().map(|&i| values[i].clone()).collect();
        let t = sub_inv.apply(&target);
        let m = module.combine(&t);
        if m.entries().all(|e| allowed.contains(e)) && crate::endoring::is_endomorphism(g, &m)? {
            out.push(m);
        }
        let mut i = 0;
        loop {
            if i == r {
                out.sort_by(|a, b| a.entries().cmp(b.entries()));
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < values.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Fresh primes for each family: larger than 7, outside the registry's
/// used primes, the family's exclusions and the group data.
pub fn realize_families(g: &FRGroup, per_family: usize) -> Result<FRGroup> {
    let mut taken: BTreeSet<u64> = g.registry().used_primes().clone();
    taken.extend(g.data_primes());
    let mut samples: BTreeMap<FamilyId, Vec<u64>> = BTreeMap::new();
    let mut p = 11u64;
    for f in g.registry().families() {
        let mut ps = Vec::new();
        while ps.len() < per_family {
            if qmath::is_prime(p) && !taken.contains(&p) && !f.excluded.contains(&p) {
                ps.push(p);
                taken.insert(p);
            }
            p += 1;
        }
        samples.insert(f.id.clone(), ps);
    }
    g.realize(&samples)
}

/// Finite approximation: the rest data is kept only at the given primes,
/// which become explicit; every other rest prime becomes trivial.
pub fn approximate_rest(g: &FRGroup, primes: &[u64]) -> Result<FRGroup> {
    let mut explicit: Vec<u64> = g.registry().explicit_primes().into_iter().collect();
    for &p in primes {
        if !explicit.contains(&p) {
            explicit.push(p);
        }
    }
    let fams = g.registry().families().cloned().collect();
    let reg = Arc::new(Registry::from_parts(&explicit, fams, &[])?);
    let widened = g.with_registry(reg.clone())?;
    let mut locals: BTreeMap<ClassKey, LocalData> = widened.locals().clone();
    locals.insert(ClassKey::Rest, LocalData::identity(g.rank()));
    FRGroup::new(format!("{}@approx", g.name()), reg, g.rank(), locals)
}

/// A random realized group: rank `≤ max_rank`, explicit primes from
/// `{2, 3, 5, 7}`, local bases `U·diag(p^-e_i)` with `e_i ≤ 2`, some
/// columns divisible.
pub fn random_realized_group(rng: &mut ChaCha8Rng, max_rank: usize) -> Result<FRGroup> {
    let n = rng.gen_range(1..=max_rank);
    let primes: Vec<u64> = [2u64, 3, 5, 7].into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    let reg = Arc::new(Registry::new(&primes, &[])?);
    let mut locals = BTreeMap::new();
    for &p in &primes {
        // a unimodular change of basis
        let mut u = QMat::identity(n);
        for _ in 0..n {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                let c = q(rng.gen_range(-2..=2));
                u = QMat::from_fn(n, n, |r, s| if r == i { &u[(r, s)] + &c * &u[(j, s)] } else { u[(r, s)].clone() });
            }
        }
        let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let divisible: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.15)).collect();
        let b = QMat::from_fn(n, n, |r, s| &u[(r, s)] * qmath::qpow(p, -exps[s]));
        locals.insert(ClassKey::Explicit(p), LocalData::new(LMat::from_rational(&b), divisible)?);
    }
    FRGroup::new("random", reg, n, locals)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of the finite scalar-matrix check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarLemmaReport {
    pub dim: usize,
    pub trials: usize,
    /// Trials where a matrix with every sample as eigenvector was scalar.
    pub scalar_confirmed: usize,
    /// Trials where a random non-scalar matrix moved some sample off its line.
    pub contrapositive_confirmed: usize,
    pub failures: Vec<String>,
}

impl ScalarLemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.scalar_confirmed == self.trials && self.contrapositive_confirmed == self.trials
    }
}

fn is_scalar(m: &QMat) -> bool {
    let c = m[(0, 0)].clone();
    *m == QMat::identity(m.rows()).scale(&c)
}

fn on_line(w: &[Q], v: &[Q]) -> bool {
    linalg::rank(&QMat::from_rows(vec![w.to_vec(), v.to_vec()])) < 2
}

/// Random trials: for a vector `v` and samples `w ∉ Qv` forming a rigid
/// set, every matrix having each `w` as an eigenvector is scalar, and each
/// random non-scalar matrix moves some `w` off its line.
pub fn scalar_lemma_check(dim: usize, trials: usize, seed: u64) -> Result<ScalarLemmaReport> {
    if dim < 2 {
        return Err(Error::Precondition("dimension must be at least 2".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut rep = ScalarLemmaReport {
        dim,
        trials,
        scalar_confirmed: 0,
        contrapositive_confirmed: 0,
        failures: vec![],
    };
    let rand_vec = |rng: &mut ChaCha8Rng| -> Vec<i64> { (0..dim).map(|_| rng.gen_range(-5..=5)).collect() };
    for t in 0..trials {
        let v = rand_vec(&mut rng);
        let vq: Vec<Q> = v.iter().map(|&x| q(x)).collect();
        let samples = loop {
            let s: Vec<Vec<i64>> = (0..dim + 2)
                .map(|_| rand_vec(&mut rng))
                .filter(|w| w.iter().any(|&x| x != 0))
                .map(|w| {
                    let g = w.iter().fold(0i64, |a, x| a.gcd(x));
                    w.iter().map(|x| x / g).collect()
                })
                .collect();
            let off_v = s.iter().all(|w| !on_line(&w.iter().map(|&x| q(x)).collect::<Vec<_>>(), &vq));
            if s.len() == dim + 2 && off_v && catalog::is_eigen_rigid(&s) {
                break s;
            }
        };
        // a random matrix with every sample as eigenvector
        let k = samples.len();
        let mut rows = Vec::new();
        for (l, a) in samples.iter().enumerate() {
            for i in 0..dim {
                let mut r = vec![Q::zero(); dim * dim + k];
                for (j, &aj) in a.iter().enumerate() {
                    r[i * dim + j] = q(aj);
                }
                r[dim * dim + l] = -q(a[i]);
                rows.push(r);
            }
        }
        let kernel = linalg::nullspace(&QMat::from_rows(rows));
        let mut phi = QMat::zeros(dim, dim);
        for b in &kernel {
            let c = q(rng.gen_range(-4..=4));
            phi = phi.add(&QMat::from_fn(dim, dim, |i, j| &b[i * dim + j] * &c));
        }
        if is_scalar(&phi) {
            rep.scalar_confirmed += 1;
        } else {
            rep.failures.push(format!("trial {t}: eigen-solution is not scalar"));
        }
        // a random non-scalar matrix violates the hypothesis somewhere
        let psi = loop {
            let vals: Vec<Q> = (0..dim * dim).map(|_| q(rng.gen_range(-3..=3))).collect();
            let m = QMat::from_fn(dim, dim, |i, j| vals[i * dim + j].clone());
            if !is_scalar(&m) {
                break m;
            }
        };
        let moved = samples.iter().any(|w| {
            let wq: Vec<Q> = w.iter().map(|&x| q(x)).collect();
            !on_line(&psi.apply(&wq), &wq)
        });
        if moved {
            rep.contrapositive_confirmed += 1;
        } else {
            rep.failures
                .push(format!("trial {t}: non-scalar matrix keeps every sample on its line"));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::qf;

    fn zq(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn free_heights_and_end() {
        let reg = Arc::new(Registry::new(&[], &[]).unwrap());
        let g = FRGroup::free("Z2", reg, 2).unwrap();
        let r = RealizedGroup::from_group(&g).unwrap();
        assert_eq!(brute_force_height(&r, &zq(&[2, 4]), 2, 10).unwrap(), HeightBound::Exact(1));
        assert_eq!(brute_force_end(&r, 2, 1, DEFAULT_BUDGET).unwrap().len(), 5usize.pow(4));
    }

    #[test]
    fn realized_lines() {
        let e = catalog::example3_default().unwrap();
        let g = realize_families(&e.group, 2).unwrap();
        let r = RealizedGroup::from_group(&g).unwrap();
        let a2 = zq(&[0, 1, 0]);
        let p = *g.registry().explicit_primes().iter().next().unwrap();
        assert_eq!(brute_force_height(&r, &a2, p, 5).unwrap(), HeightBound::Exact(1));
        assert_eq!(brute_force_height(&r, &zq(&[1, 0, 0]), p, 5).unwrap(), HeightBound::Exact(0));
        let ends = brute_force_end(&r, 3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(ends.len(), 7);
        assert!(ends.iter().all(is_scalar));
        assert_eq!(symbolic_end_in_box(&e.group, 3, 2, DEFAULT_BUDGET).unwrap(), ends);
    }

    #[test]
    fn membership_matches_local_method() {
        let mut rng = seeded_rng(3);
        for _ in 0..20 {
            let g = random_realized_group(&mut rng, 3).unwrap();
            let r = RealizedGroup::from_group(&g).unwrap();
            for _ in 0..20 {
                let d = [1i64, 2, 3, 4, 5, 7, 9, 25, 49][rng.gen_range(0..9)];
                let x: Vec<Q> = (0..g.rank()).map(|_| qf(rng.gen_range(-6..=6), d)).collect();
                let symbolic = g.contains(&crate::group::Element::from_rationals(x.clone())).unwrap();
                assert_eq!(r.contains(&x), symbolic, "{g:?} {x:?}");
            }
        }
    }

    #[test]
    fn random_end_boxes() {
        let mut rng = seeded_rng(5);
        for _ in 0..8 {
            let g = random_realized_group(&mut rng, 3).unwrap();
            let r = RealizedGroup::from_group(&g).unwrap();
            let (nb, db) = if g.rank() < 3 { (2, 4) } else { (1, 1) };
            let oracle = brute_force_end(&r, nb, db, DEFAULT_BUDGET).unwrap();
            assert_eq!(symbolic_end_in_box(&g, nb, db, DEFAULT_BUDGET).unwrap(), oracle, "{g:?}");
        }
    }

    #[test]
    fn half_integral_endomorphisms_survive() {
        let reg = Arc::new(Registry::new(&[2], &[]).unwrap());
        let b = QMat::from_rows(vec![vec![q(1), qmath::qf(1, 2)], vec![q(0), qmath::qf(1, 2)]]);
        let mut locals = BTreeMap::new();
        locals.insert(
            ClassKey::Explicit(2),
            LocalData::new(LMat::from_rational(&b), BTreeSet::new()).unwrap(),
        );
        let g = FRGroup::new("lattice", reg, 2, locals).unwrap();
        let r = RealizedGroup::from_group(&g).unwrap();
        let brute = brute_force_end(&r, 2, 2, DEFAULT_BUDGET).unwrap();
        let half = QMat::from_rows(vec![vec![qmath::qf(1, 2); 2]; 2]);
        assert!(brute.contains(&half));
        assert_eq!(brute, symbolic_end_in_box(&g, 2, 2, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn scalar_lemma() {
        for dim in 2..=4 {
            let rep = scalar_lemma_check(dim, 10, 11).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn budget_guard() {
        let reg = Arc::new(Registry::new(&[], &[]).unwrap());
        let g = FRGroup::free("Z3", reg, 3).unwrap();
        let r = RealizedGroup::from_group(&g).unwrap();
        assert!(matches!(brute_force_end(&r, 3, 1, 1000), Err(Error::Budget { .. })));
    }
}
