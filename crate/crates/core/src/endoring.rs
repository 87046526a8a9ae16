//! Endomorphisms as rational matrices acting on column vectors.
//!
//! A matrix `M` is an endomorphism when, at every class, the conjugate
//! `N = B⁻¹ M B` by the local basis keeps the divisible columns divisible
//! and is integral on the remaining block. The linear part of these
//! conditions (vanishing blocks, vanishing negative powers of the generic
//! prime) cuts out a rational space `V`; the rest are congruences at
//! finitely many concrete primes, which the solvers handle exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::chartype::{Characteristic, HeightValue};
use crate::error::{Error, Result};
use crate::group::{Element, FRGroup, LocalData};
use crate::linalg::{self, LMat, QMat};
use crate::primesym::{ClassKey, LaurentScalar};
use crate::qmath::{self, Q};
use crate::transit::{Certificate, Verdict};

pub type EndoMatrix = QMat;

/// One direction of the endomorphism module with the heights its
/// coefficient may have at each prime.
#[derive(Debug, Clone)]
pub struct EndGenerator {
    pub matrix: QMat,
    pub kappa: Characteristic,
}

/// `End(G) = { Σ c_i M_i : c_i ∈ Q_{κ_i} }`. When `presentation_exact` is
/// false the κ description is only a lower bound; membership tests are
/// exact either way.
#[derive(Debug, Clone)]
pub struct EndModule {
    pub rank: usize,
    pub generators: Vec<EndGenerator>,
    pub presentation_exact: bool,
}

impl fmt::Display for EndModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.generators.iter().enumerate() {
            let rows: Vec<String> = g
                .matrix
                .to_rows()
                .iter()
                .map(|r| r.iter().map(qmath::fmt_rational).collect::<Vec<_>>().join(" "))
                .collect();
            writeln!(f, "M{}: [{}]  kappa {}", i + 1, rows.join("; "), g.kappa)?;
        }
        Ok(())
    }
}

impl EndModule {
    pub fn matrices(&self) -> Vec<QMat> {
        self.generators.iter().map(|g| g.matrix.clone()).collect()
    }

    /// True when End is `Z·I`.
    pub fn is_integer_scalars(&self) -> bool {
        self.generators.len() == 1 && self.presentation_exact && self.generators[0].kappa.is_zero() && {
            let m = &self.generators[0].matrix;
            let id = QMat::identity(self.rank);
            *m == id || *m == id.scale(&-Q::one())
        }
    }

    /// Coordinates of `m` in the generator basis, if it lies in their span.
    pub fn coordinates(&self, m: &QMat) -> Option<Vec<Q>> {
        let n2 = self.rank * self.rank;
        let cols: Vec<Vec<Q>> = self.generators.iter().map(|g| flatten(&g.matrix)).collect();
        let a = QMat::from_fn(n2, cols.len(), |i, j| cols[j][i].clone());
        let sol = linalg::solve(&a, &flatten(m))?;
        Some(sol.particular)
    }

    pub fn combine(&self, t: &[Q]) -> QMat {
        let mut m = QMat::zeros(self.rank, self.rank);
        for (g, c) in self.generators.iter().zip(t) {
            if !c.is_zero() {
                m = m.add(&g.matrix.scale(c));
            }
        }
        m
    }
}

fn flatten(m: &QMat) -> Vec<Q> {
    m.entries().cloned().collect()
}

fn conj(l: &LocalData, m: &QMat) -> LMat {
    l.inverse().mul(&LMat::from_rational(m)).mul(l.basis())
}

fn check_dims(g: &FRGroup, m: &QMat) -> Result<()> {
    if m.rows() != g.rank() || m.cols() != g.rank() {
        return Err(Error::Dimension {
            expected: g.rank(),
            found: m.rows().max(m.cols()),
        });
    }
    Ok(())
}

/// Local conditions at one class for the conjugate `n = B⁻¹ M B`.
fn local_ok(g: &FRGroup, key: &ClassKey, l: &LocalData, n: &LMat) -> bool {
    let nd = l.non_divisible();
    for &i in &nd {
        if l.divisible().iter().any(|&j| !n[(i, j)].is_zero()) {
            return false;
        }
    }
    let block: Vec<&LaurentScalar> = nd.iter().flat_map(|&i| nd.iter().map(move |&j| (i, j))).map(|ij| &n[ij]).collect();
    match key {
        ClassKey::Explicit(q) => block.iter().all(|e| qmath::is_local_integral(&e.eval(*q), *q)),
        ClassKey::Family(_) => block.iter().all(|e| e.is_integral_on_family()),
        ClassKey::Rest => {
            let explicit = g.registry().explicit_primes();
            block.iter().all(|e| e.is_integral_on_family()) && {
                let primes: BTreeSet<u64> = block.iter().flat_map(|e| e.support()).filter(|q| !explicit.contains(q)).collect();
                primes
                    .into_iter()
                    .all(|q| block.iter().all(|e| qmath::is_local_integral(&e.eval(q), q)))
            }
        }
    }
}

/// Decides `M G ⊆ G`.
pub fn is_endomorphism(g: &FRGroup, m: &QMat) -> Result<bool> {
    check_dims(g, m)?;
    Ok(g.locals().iter().all(|(key, l)| local_ok(g, key, l, &conj(l, m))))
}

pub fn is_automorphism(g: &FRGroup, m: &QMat) -> Result<bool> {
    if !is_endomorphism(g, m)? {
        return Ok(false);
    }
    match linalg::inverse(m) {
        Some(inv) => is_endomorphism(g, &inv),
        None => Ok(false),
    }
}

/// First class at which `M = Σ p^e M_e` fails to be an endomorphism. At the
/// class of its own symbol `M` is conjugated as a whole; elsewhere `p` is a
/// unit and each `M_e` must pass on its own.
fn laurent_failure(g: &FRGroup, m: &LMat) -> Result<Option<ClassKey>> {
    if m.rows() != g.rank() || m.cols() != g.rank() {
        return Err(Error::Dimension {
            expected: g.rank(),
            found: m.rows().max(m.cols()),
        });
    }
    let fam = m.family().cloned();
    let comps = m.components();
    for (key, l) in g.locals() {
        let ok = match (&fam, key.family_id()) {
            (Some(f), Some(k)) if f == k => local_ok(g, key, l, &l.inverse().try_mul(m)?.try_mul(l.basis())?),
            _ => comps.values().all(|c| local_ok(g, key, l, &conj(l, c))),
        };
        if !ok {
            return Ok(Some(key.clone()));
        }
    }
    Ok(None)
}

/// `is_endomorphism` for matrices in the generic prime of a family.
pub fn is_endomorphism_laurent(g: &FRGroup, m: &LMat) -> Result<bool> {
    Ok(laurent_failure(g, m)?.is_none())
}

/// Invertible in `End(G)`; the inverse must again be a Laurent matrix.
pub fn is_automorphism_laurent(g: &FRGroup, m: &LMat) -> Result<bool> {
    if let Some(r) = m.as_rational() {
        return is_automorphism(g, &r);
    }
    if !is_endomorphism_laurent(g, m)? {
        return Ok(false);
    }
    match m.inverse_monomial_det() {
        Some(inv) => is_endomorphism_laurent(g, &inv),
        None => Ok(false),
    }
}

/// Linear constraints on the row-major entries of `M`.
fn linear_constraints(g: &FRGroup) -> Vec<Vec<Q>> {
    let n = g.rank();
    let mut rows = Vec::new();
    for (key, l) in g.locals() {
        let generic = key.is_generic();
        for i in 0..n {
            if l.divisible().contains(&i) {
                continue;
            }
            for j in 0..n {
                let div_col = l.divisible().contains(&j);
                if !div_col && !generic {
                    continue;
                }
                // coefficient of p^e in N_ij, as a linear form in M
                let mut forms: BTreeMap<i64, Vec<Q>> = BTreeMap::new();
                for k in 0..n {
                    for c in 0..n {
                        let prod = &l.inverse()[(i, k)] * &l.basis()[(c, j)];
                        for (e, v) in prod.terms() {
                            forms.entry(*e).or_insert_with(|| vec![Q::zero(); n * n])[k * n + c] += v;
                        }
                    }
                }
                for (e, form) in forms {
                    if div_col || e < 0 {
                        rows.push(form);
                    }
                }
            }
        }
    }
    rows
}

/// Primitive integer multiple of a nonzero rational vector.
fn primitive(v: &[Q]) -> Vec<Q> {
    let d = qmath::lcm_denoms(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(d.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = ints
        .iter()
        .find(|x| !x.is_zero())
        .map_or(BigInt::one(), |x| if x.is_negative() { -BigInt::one() } else { BigInt::one() });
    ints.into_iter().map(|x| Q::from_integer(x * &sign / &g)).collect()
}

/// Primitive integer basis of the space cut out by the linear conditions.
fn linear_basis(g: &FRGroup) -> Vec<QMat> {
    let n = g.rank();
    let rows = linear_constraints(g);
    let basis: Vec<Vec<Q>> = if rows.is_empty() {
        (0..n * n)
            .map(|k| (0..n * n).map(|i| if i == k { Q::one() } else { Q::zero() }).collect())
            .collect()
    } else {
        let a = QMat::from_rows(rows);
        linalg::nullspace(&a)
    };
    basis
        .iter()
        .map(|v| {
            let p = primitive(v);
            QMat::from_fn(n, n, |i, j| p[i * n + j].clone())
        })
        .collect()
}

/// Valuation data of one direction at a concrete prime: entries of the
/// non-divisible block of `N(q)`.
fn concrete_block(l: &LocalData, m: &QMat, q: u64) -> Vec<Q> {
    let n = conj(l, m);
    let nd = l.non_divisible();
    nd.iter()
        .flat_map(|&i| nd.iter().map(move |&j| (i, j)))
        .map(|ij| n[ij].eval(q))
        .collect()
}

fn generic_block(l: &LocalData, m: &QMat) -> Vec<LaurentScalar> {
    let n = conj(l, m);
    let nd = l.non_divisible();
    nd.iter()
        .flat_map(|&i| nd.iter().map(move |&j| (i, j)))
        .map(|ij| n[ij].clone())
        .collect()
}

fn min_val(block: &[Q], q: u64) -> Option<i64> {
    block.iter().filter(|x| !x.is_zero()).map(|x| qmath::val(x, q)).min()
}

/// Concrete primes at which the local conditions must be examined
/// individually for the given directions.
fn concrete_sites(g: &FRGroup, dirs: &[QMat]) -> BTreeSet<u64> {
    let mut s = g.registry().explicit_primes();
    s.extend(g.exceptional_rest_primes());
    let rest = g.local(&ClassKey::Rest);
    for m in dirs {
        for e in generic_block(rest, m) {
            s.extend(e.support());
        }
    }
    s
}

/// Local data used at a concrete prime.
fn site_local(g: &FRGroup, q: u64) -> LocalData {
    match g.registry().class_of_prime(q) {
        ClassKey::Rest => g.local(&ClassKey::Rest).eval(q),
        k => g.local(&k).clone(),
    }
}

/// Computes the endomorphism module.
pub fn end_ring(g: &FRGroup) -> Arc<EndModule> {
    g.end_cache.get_or_init(|| Arc::new(compute_end_ring(g))).clone()
}

fn compute_end_ring(g: &FRGroup) -> EndModule {
    let n = g.rank();
    let reg = g.registry().clone();
    let mut dirs = linear_basis(g);
    let mut exact = true;

    // generic heights and leading coefficients
    let mut generic_k: Vec<BTreeMap<ClassKey, Option<i64>>> = vec![BTreeMap::new(); dirs.len()];
    let mut extra_sites = BTreeSet::new();
    for (key, l) in g.locals() {
        if !key.is_generic() {
            continue;
        }
        let mut leading_rows = Vec::new();
        for (i, m) in dirs.iter().enumerate() {
            let block = generic_block(l, m);
            let k = block.iter().filter_map(LaurentScalar::generic_valuation).min();
            generic_k[i].insert(key.clone(), k);
            if let Some(k) = k {
                leading_rows.push(block.iter().map(|e| e.coeff(k)).collect::<Vec<Q>>());
            }
        }
        if leading_rows.is_empty() {
            continue;
        }
        let lead = QMat::from_rows(leading_rows.clone());
        if linalg::rank(&lead) < leading_rows.len() {
            exact = false;
        } else if *key == ClassKey::Rest {
            let z = linalg::to_integer_rows(&lead);
            for d in linalg::smith_invariants(&z) {
                extra_sites.extend(qmath::prime_factors(&d));
            }
        }
    }

    let explicit = reg.explicit_primes();
    let mut sites = concrete_sites(g, &dirs);
    sites.extend(extra_sites.into_iter().filter(|q| !explicit.contains(q)));

    // concrete heights; rescale directions so that they are non-negative
    let mut concrete_k: Vec<BTreeMap<u64, Option<i64>>> = vec![BTreeMap::new(); dirs.len()];
    for &q in &sites {
        let l = site_local(g, q);
        for (i, m) in dirs.iter_mut().enumerate() {
            let mut k = min_val(&concrete_block(&l, m, q), q);
            if let Some(kv) = k {
                if kv < 0 {
                    *m = m.scale(&qmath::qpow(q, -kv));
                    k = Some(0);
                }
            }
            concrete_k[i].insert(q, k);
        }
    }
    for &q in &sites {
        let l = site_local(g, q);
        let mut vecs = Vec::new();
        for (i, m) in dirs.iter().enumerate() {
            if let Some(k) = concrete_k[i][&q] {
                let scale = qmath::qpow(q, -k);
                vecs.push(concrete_block(&l, m, q).iter().map(|x| x * &scale).collect::<Vec<Q>>());
            }
        }
        if !vecs.is_empty() && linalg::rank_mod_p(&vecs, q) < vecs.len() {
            exact = false;
        }
    }

    let to_h = |k: Option<i64>| match k {
        None => HeightValue::Inf,
        Some(v) => HeightValue::Finite(v.max(0) as u64),
    };
    let generators = dirs
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let mut kappa = Characteristic::zero(&reg);
            for (key, k) in &generic_k[i] {
                kappa.set_class(key, to_h(*k)).expect("registry class");
            }
            for (&q, k) in &concrete_k[i] {
                kappa.set_prime(q, to_h(*k)).expect("prime");
            }
            EndGenerator { matrix: m, kappa }
        })
        .collect();
    EndModule {
        rank: n,
        generators,
        presentation_exact: exact,
    }
}

/// Exact membership in `End(G)`.
pub fn end_contains(g: &FRGroup, m: &QMat) -> Result<bool> {
    is_endomorphism(g, m)
}

/// Why no endomorphism maps `x` to `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapCertificate {
    /// The linear system `Σ t_i M_i x = y` has no rational solution; ranks of
    /// the coefficient and augmented matrices and the Smith invariants of the
    /// integerised augmented matrix.
    Inconsistent {
        rank: usize,
        augmented_rank: usize,
        invariants: Vec<BigInt>,
    },
    /// No solution even with coefficients rational functions of `p`.
    NoFamilySolution,
    /// The only solution over `Q(p)` is not a Laurent polynomial in `p`.
    NotLaurent,
    /// Solutions exist but none is integral at the primes of this family.
    FamilyObstruction { family: String },
    /// Rational solutions exist but none is integral at this prime.
    LocalObstruction { prime: u64 },
    /// `y` involves a different generic prime than `x`.
    SymbolMismatch,
}

impl fmt::Display for MapCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapCertificate::Inconsistent {
                rank,
                augmented_rank,
                invariants,
            } => {
                let inv: Vec<String> = invariants.iter().map(|d| d.to_string()).collect();
                write!(
                    f,
                    "no rational solution (rank {rank}, augmented rank {augmented_rank}, invariants [{}])",
                    inv.join(", ")
                )
            }
            MapCertificate::NoFamilySolution => write!(f, "no solution with coefficients in Q(p)"),
            MapCertificate::NotLaurent => write!(f, "the unique solution over Q(p) is not a Laurent polynomial"),
            MapCertificate::FamilyObstruction { family } => write!(f, "no solution is integral at the primes of {family}"),
            MapCertificate::LocalObstruction { prime } => write!(f, "no solution is integral at {prime}"),
            MapCertificate::SymbolMismatch => write!(f, "elements use different prime symbols"),
        }
    }
}

/// Maps `x ↦ y` inside the module, as combinations `Σ u_k D_k` of the
/// directions `D_k = p^e M_i`. Pairs free of family symbols use `e = 0`
/// only.
#[derive(Debug, Clone)]
pub struct MappingSolution {
    pub module: Arc<EndModule>,
    pub directions: Vec<LMat>,
    /// Coefficients of a particular solution of the linear conditions.
    pub particular: Vec<Q>,
    pub kernel: Vec<Vec<Q>>,
    /// Primes at which local conditions were solved.
    pub sites: BTreeSet<u64>,
    /// Kernel parameters of an endomorphic solution and the modulus of the
    /// valid parameter lattice (`s + step·Z^d` stays valid).
    pub parameters: Option<(Vec<Q>, BigInt)>,
    pub witness: Option<LMat>,
    pub certificate: Option<MapCertificate>,
    /// Whether the directions capture every solution. When false, a missing
    /// witness is undecided and carries no certificate.
    pub complete: bool,
}

impl MappingSolution {
    fn empty(module: Arc<EndModule>, directions: Vec<LMat>, complete: bool, cert: Option<MapCertificate>) -> Self {
        let k = directions.len();
        MappingSolution {
            module,
            directions,
            particular: vec![Q::zero(); k],
            kernel: vec![],
            sites: BTreeSet::new(),
            parameters: None,
            witness: None,
            certificate: if complete { cert } else { None },
            complete,
        }
    }

    pub fn decided(&self) -> bool {
        self.witness.is_some() || self.certificate.is_some()
    }

    /// The combination at kernel parameters `s`.
    pub fn point(&self, s: &[Q]) -> LMat {
        let n = self.module.rank;
        let mut m = LMat::zeros(n, n);
        for (k, dir) in self.directions.iter().enumerate() {
            let c = s
                .iter()
                .zip(&self.kernel)
                .fold(self.particular[k].clone(), |acc, (sj, kj)| acc + sj * &kj[k]);
            if !c.is_zero() {
                m = m.try_add(&dir.map(|x| x.scale(&c))).expect("directions share one symbol");
            }
        }
        m
    }
}

fn coefficient_rows(images: &[Element], y: &Element) -> (QMat, Vec<Q>) {
    let mut keys: BTreeSet<(i64, usize)> = BTreeSet::new();
    for e in images.iter().chain(std::iter::once(y)) {
        for (j, c) in e.coords().iter().enumerate() {
            for exp in c.terms().keys() {
                keys.insert((*exp, j));
            }
        }
    }
    let keys: Vec<(i64, usize)> = keys.into_iter().collect();
    let a = QMat::from_fn(keys.len(), images.len(), |r, i| images[i].coords()[keys[r].1].coeff(keys[r].0));
    let b = keys.iter().map(|&(e, j)| y.coords()[j].coeff(e)).collect();
    (a, b)
}

/// Vanishing of the negative powers of `p` (and of the divisible block) in
/// `B⁻¹ (Σ u_k D_k) B` at the class of the family.
fn family_rows(g: &FRGroup, key: &ClassKey, dirs: &[LMat]) -> Result<Vec<Vec<Q>>> {
    let l = g.local(key);
    let conjs: Vec<LMat> = dirs
        .iter()
        .map(|d| l.inverse().try_mul(d)?.try_mul(l.basis()))
        .collect::<Result<_>>()?;
    let div = l.divisible();
    let mut forms: BTreeMap<(usize, usize, i64), Vec<Q>> = BTreeMap::new();
    for i in l.non_divisible() {
        for j in 0..g.rank() {
            for (k, c) in conjs.iter().enumerate() {
                for (e, v) in c[(i, j)].terms() {
                    if *e < 0 || div.contains(&j) {
                        forms.entry((i, j, *e)).or_insert_with(|| vec![Q::zero(); dirs.len()])[k] += v;
                    }
                }
            }
        }
    }
    Ok(forms.into_values().collect())
}

fn inconsistency(a: &QMat, b: &[Q]) -> MapCertificate {
    let aug = QMat::from_fn(
        a.rows(),
        a.cols() + 1,
        |i, j| if j < a.cols() { a[(i, j)].clone() } else { b[i].clone() },
    );
    MapCertificate::Inconsistent {
        rank: linalg::rank(a),
        augmented_rank: linalg::rank(&aug),
        invariants: linalg::smith_invariants(&linalg::to_integer_rows(&aug)),
    }
}

/// CRT: an integer congruent to `r_i` modulo `m_i` (pairwise coprime).
fn crt(res: &[(BigInt, BigInt)]) -> BigInt {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (r, mi) in res {
        let inv = qmath::mod_inverse(&m.mod_floor(mi), mi).unwrap_or_else(BigInt::zero);
        let k = ((r - &x) * inv).mod_floor(mi);
        x += &m * k;
        m *= mi;
    }
    x
}

/// Outcome of solving `Σ t_i M_i x = y` over `Q(p)`.
enum Generic {
    NoSolution,
    NotLaurent,
    /// The unique solution, as Laurent coefficients.
    Unique(Vec<LaurentScalar>),
    Underdetermined,
}

/// Primes far beyond any data, used as evaluation points for `p`.
const PROBES: [u64; 3] = [1_000_003, 1_000_033, 1_000_037];

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Every `k × k` minor is zero as a Laurent polynomial, so the rank over
/// `Q(p)` is below `k`.
fn minors_vanish(a: &LMat, k: usize) -> bool {
    let cols = subsets(a.cols(), k);
    subsets(a.rows(), k).iter().all(|rs| {
        cols.iter()
            .all(|cs| LMat::from_fn(k, k, |i, j| a[(rs[i], cs[j])].clone()).det().is_zero())
    })
}

fn generic_solution(mats: &[QMat], x: &Element, y: &Element) -> Result<Generic> {
    let r = mats.len();
    let images: Vec<Element> = mats.iter().map(|m| x.apply(m)).collect();
    let n = x.rank();
    let lmat = LMat::from_fn(n, r, |i, k| images[k].coords()[i].clone());
    for p0 in PROBES {
        let a0 = QMat::from_fn(n, r, |i, k| images[k].coords()[i].eval(p0));
        let rho = linalg::rank(&a0);
        if rho < r {
            let aug = QMat::from_fn(n, r + 1, |i, k| if k < r { a0[(i, k)].clone() } else { y.coords()[i].eval(p0) });
            if linalg::rank(&aug) > rho && minors_vanish(&lmat, rho + 1) {
                return Ok(Generic::NoSolution);
            }
            continue;
        }
        // r independent rows, then Cramer's rule over Q[p, 1/p]
        let pivots = {
            let mut t = a0.transpose();
            linalg::rref(&mut t)
        };
        let col = |k: usize, i: usize| images[k].coords()[i].clone();
        let a_s = LMat::from_fn(r, r, |ii, k| col(k, pivots[ii]));
        let d = a_s.det();
        let nums: Vec<LaurentScalar> = (0..r)
            .map(|k| {
                LMat::from_fn(r, r, |ii, kk| {
                    if kk == k {
                        y.coords()[pivots[ii]].clone()
                    } else {
                        col(kk, pivots[ii])
                    }
                })
                .det()
            })
            .collect();
        // Σ N_k c_k = D y on every row
        for i in 0..n {
            let mut lhs = LaurentScalar::zero();
            for (k, nk) in nums.iter().enumerate() {
                lhs = lhs.try_add(&nk.try_mul(&col(k, i))?)?;
            }
            if lhs != d.try_mul(&y.coords()[i])? {
                return Ok(Generic::NoSolution);
            }
        }
        let t: Option<Vec<LaurentScalar>> = nums.iter().map(|nk| nk.div_exact(&d)).collect();
        return Ok(t.map_or(Generic::NotLaurent, Generic::Unique));
    }
    Ok(Generic::Underdetermined)
}

/// Solves `M x = y` with `M ∈ End(G)`.
///
/// Without family symbols the coefficients are rational and the answer is
/// exact. With a family symbol the coefficients are Laurent polynomials in
/// its prime: when the solution over `Q(p)` is unique the answer is exact,
/// otherwise a window of exponents is searched and a failure stays
/// undecided.
pub fn solve_mapping(g: &FRGroup, x: &Element, y: &Element) -> Result<MappingSolution> {
    let module = end_ring(g);
    if x.rank() != g.rank() || y.rank() != g.rank() {
        return Err(Error::Dimension {
            expected: g.rank(),
            found: x.rank().max(y.rank()),
        });
    }
    if let (Some(a), Some(b)) = (x.family(), y.family()) {
        if a != b {
            return Ok(MappingSolution::empty(module, vec![], true, Some(MapCertificate::SymbolMismatch)));
        }
    }
    let mats = module.matrices();
    let Some(fam) = x.family().or(y.family()).cloned() else {
        let dirs = mats.iter().map(LMat::from_rational).collect();
        return solve_in(g, x, y, module, dirs, true);
    };
    let (dirs, complete) = match generic_solution(&mats, x, y)? {
        Generic::NoSolution => return Ok(MappingSolution::empty(module, vec![], true, Some(MapCertificate::NoFamilySolution))),
        Generic::NotLaurent => return Ok(MappingSolution::empty(module, vec![], true, Some(MapCertificate::NotLaurent))),
        Generic::Unique(t) => {
            let mut dirs = Vec::new();
            for (m, ti) in mats.iter().zip(&t) {
                for e in ti.terms().keys() {
                    dirs.push(LMat::monomial(Some(&fam), *e, m));
                }
            }
            (dirs, true)
        }
        Generic::Underdetermined => {
            let span = |z: &Element| {
                let c = z.components();
                (*c.keys().next().unwrap(), *c.keys().next_back().unwrap())
            };
            let ((a1, a2), (b1, b2)) = (span(x), span(y));
            let mut dirs = Vec::new();
            for e in (b1 - a2).min(0) - 1..=(b2 - a1).max(0) + 1 {
                dirs.extend(mats.iter().map(|m| LMat::monomial(Some(&fam), e, m)));
            }
            (dirs, false)
        }
    };
    solve_in(g, x, y, module, dirs, complete)
}

fn solve_in(g: &FRGroup, x: &Element, y: &Element, module: Arc<EndModule>, dirs: Vec<LMat>, complete: bool) -> Result<MappingSolution> {
    let fail = |cert| Ok(MappingSolution::empty(module.clone(), dirs.clone(), complete, Some(cert)));
    let images: Vec<Element> = dirs.iter().map(|d| x.apply_laurent(d)).collect::<Result<_>>()?;
    let (mut a, mut b) = coefficient_rows(&images, y);
    let Some(mut sol) = linalg::solve(&a, &b) else {
        return fail(inconsistency(&a, &b));
    };
    if let Some(fam) = dirs.iter().find_map(|d| d.family()).cloned() {
        let rows = family_rows(g, &ClassKey::family(&fam), &dirs)?;
        if !rows.is_empty() {
            let k = dirs.len();
            a = QMat::from_fn(a.rows() + rows.len(), k, |i, j| {
                if i < a.rows() {
                    a[(i, j)].clone()
                } else {
                    rows[i - a.rows()][j].clone()
                }
            });
            b.extend(std::iter::repeat_n(Q::zero(), rows.len()));
            match linalg::solve(&a, &b) {
                Some(s) => sol = s,
                None => return fail(MapCertificate::FamilyObstruction { family: fam.to_string() }),
            }
        }
    }
    let t0 = sol.particular.clone();
    let kernel = sol.kernel.clone();
    let d = kernel.len();
    let r = dirs.len();

    let mats = module.matrices();
    let mut sites = concrete_sites(g, &mats);
    for v in std::iter::once(&t0).chain(kernel.iter()) {
        for c in v {
            sites.extend(qmath::prime_factors(c.denom()));
        }
    }
    let exps: BTreeSet<i64> = dirs.iter().flat_map(|m| m.components().into_keys()).collect();
    let comps: Vec<BTreeMap<i64, QMat>> = dirs.iter().map(LMat::components).collect();

    // per-site local solutions in kernel coordinates, one block per exponent
    let mut local: Vec<(u64, Vec<Q>, i64)> = Vec::new();
    for &q in &sites {
        let l = site_local(g, q);
        let zero = QMat::zeros(g.rank(), g.rank());
        let blocks: Vec<Vec<Q>> = comps
            .iter()
            .map(|c| exps.iter().flat_map(|e| concrete_block(&l, c.get(e).unwrap_or(&zero), q)).collect())
            .collect();
        let rows = blocks.first().map_or(0, Vec::len);
        let w = QMat::from_fn(rows, d, |e, j| (0..r).fold(Q::zero(), |acc, i| acc + &kernel[j][i] * &blocks[i][e]));
        let rhs: Vec<Q> = (0..rows)
            .map(|e| (0..r).fold(Q::zero(), |acc, i| acc + &t0[i] * &blocks[i][e]))
            .collect();
        match linalg::local_solve(&w, &rhs, q) {
            Some(s) => local.push((q, s.t, s.tolerance)),
            None => {
                let mut out = MappingSolution::empty(
                    module.clone(),
                    dirs.clone(),
                    complete,
                    Some(MapCertificate::LocalObstruction { prime: q }),
                );
                out.particular = t0;
                out.kernel = kernel;
                out.sites = sites;
                return Ok(out);
            }
        }
    }

    // zero parameters first, then a CRT combination of the local solutions
    let valid_at = |s: &[Q], q: u64, sq: &[Q], e: i64| {
        s.iter().zip(sq).all(|(a, b)| {
            let diff = a - b;
            diff.is_zero() || qmath::val(&diff, q) >= e
        })
    };
    let zero = vec![Q::zero(); d];
    let s = if local.iter().all(|(q, sq, e)| valid_at(&zero, *q, sq, *e)) {
        zero
    } else {
        let mut denom = BigInt::one();
        for (q, sq, _) in &local {
            let a = sq
                .iter()
                .filter(|x| !x.is_zero())
                .map(|x| -qmath::val(x, *q))
                .max()
                .unwrap_or(0)
                .max(0);
            denom *= num_traits::pow(BigInt::from(*q), a as usize);
        }
        (0..d)
            .map(|j| {
                let res: Vec<(BigInt, BigInt)> = local
                    .iter()
                    .map(|(q, sq, e)| {
                        let a = qmath::int_valuation(&denom, *q);
                        let modulus = num_traits::pow(BigInt::from(*q), (e.max(&0) + a) as usize);
                        let target = &sq[j] * Q::from_integer(denom.clone());
                        (qmath::residue(&target, &modulus), modulus)
                    })
                    .collect();
                Q::new(crt(&res), denom.clone())
            })
            .collect()
    };
    let step = local.iter().fold(BigInt::one(), |acc, (q, _, e)| {
        acc * num_traits::pow(BigInt::from(*q), (*e).max(0) as usize)
    });
    let mut out = MappingSolution {
        module,
        directions: dirs,
        particular: t0,
        kernel,
        sites,
        parameters: None,
        witness: None,
        certificate: None,
        complete,
    };
    let m = out.point(&s);
    if !is_endomorphism_laurent(g, &m)? || x.apply_laurent(&m)? != *y {
        return Err(Error::Precondition("mapping solver produced an invalid witness".into()));
    }
    out.parameters = Some((s, step));
    out.witness = Some(m);
    Ok(out)
}

/// Some endomorphism with `φ(x) = y`, `None` if there is none or the search
/// is undecided (see [`solve_mapping`]).
pub fn endo_mapping_exists(g: &FRGroup, x: &Element, y: &Element) -> Result<Option<LMat>> {
    Ok(solve_mapping(g, x, y)?.witness)
}

fn det_polynomial(m0: &QMat, m1: &QMat) -> Vec<Q> {
    let n = m0.rows();
    let pts: Vec<(Q, Q)> = (0..=n as i64)
        .map(|s| {
            let sq = qmath::q(s);
            (sq.clone(), linalg::det_q(&m0.add(&m1.scale(&sq))))
        })
        .collect();
    // Newton interpolation, then expand to monomial coefficients
    let k = pts.len();
    let mut coef: Vec<Q> = pts.iter().map(|p| p.1.clone()).collect();
    for j in 1..k {
        for i in (j..k).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&pts[i].0 - &pts[i - j].0);
        }
    }
    let mut poly = vec![Q::zero(); k];
    for i in (0..k).rev() {
        // poly = poly * (s - x_i) + coef[i]
        let mut next = vec![Q::zero(); k];
        for (d, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if d + 1 < k {
                next[d + 1] += c;
            }
            next[d] -= c * &pts[i].0;
        }
        next[0] += &coef[i];
        poly = next;
    }
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    poly
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut divs = vec![BigInt::one()];
    for p in qmath::prime_factors(&n) {
        let e = qmath::int_valuation(&n, p);
        let mut next = Vec::new();
        for d in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pw);
                pw *= p;
            }
        }
        divs = next;
    }
    divs
}

/// Rational roots of a polynomial given by coefficients from degree 0 up.
pub fn rational_roots(poly: &[Q]) -> Vec<Q> {
    let den = qmath::lcm_denoms(poly);
    let mut c: Vec<BigInt> = poly.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
    let mut roots = BTreeSet::new();
    while c.len() > 1 && c[0].is_zero() {
        roots.insert(Q::zero());
        c.remove(0);
    }
    if c.len() <= 1 {
        return roots.into_iter().collect();
    }
    let lead = c.last().unwrap().clone();
    for p in divisors(&c[0]) {
        for q in divisors(&lead) {
            for sign in [1, -1] {
                let cand = Q::new(&p * sign, q.clone());
                let v = c.iter().rev().fold(Q::zero(), |acc, ci| acc * &cand + Q::from_integer(ci.clone()));
                if v.is_zero() {
                    roots.insert(cand);
                }
            }
        }
    }
    roots.into_iter().collect()
}

/// Decides, or bounds the search for, an automorphism with `φ(x) = y`.
pub fn auto_mapping_exists(g: &FRGroup, x: &Element, y: &Element, bound: u64) -> Result<Verdict> {
    let sol = solve_mapping(g, x, y)?;
    let Some(witness) = sol.witness.clone() else {
        return Ok(match &sol.certificate {
            Some(c) => Verdict::Fails(Certificate::NoEndomorphism(c.clone())),
            None => Verdict::Unknown("no endomorphism found among the searched powers of p".into()),
        });
    };
    let d = sol.kernel.len();
    if d == 0 {
        return Ok(if is_automorphism_laurent(g, &witness)? {
            Verdict::Holds(witness)
        } else if sol.complete {
            Verdict::Fails(Certificate::UniqueEndomorphismNotInvertible { endomorphism: witness })
        } else {
            Verdict::Unknown("the endomorphism found is not invertible and the search was not exhaustive".into())
        });
    }
    let rational = |s: &[Q]| sol.point(s).as_rational();
    if d == 1 && sol.complete && !g.has_divisible_part() {
        if let (Some(m0), Some(p1)) = (rational(&[Q::zero()]), rational(&[Q::one()])) {
            let m1 = p1.sub(&m0);
            let poly = det_polynomial(&m0, &m1);
            if poly.len() == 1 {
                return Ok(if poly[0].abs().is_one() && is_automorphism_laurent(g, &witness)? {
                    Verdict::Holds(witness)
                } else {
                    Verdict::Fails(Certificate::DeterminantObstruction {
                        polynomial: poly,
                        candidates: vec![],
                    })
                });
            }
            let mut candidates = Vec::new();
            for target in [Q::one(), -Q::one()] {
                let mut shifted = poly.clone();
                shifted[0] -= &target;
                candidates.extend(rational_roots(&shifted));
            }
            for s in &candidates {
                let m = sol.point(std::slice::from_ref(s));
                if is_automorphism_laurent(g, &m)? {
                    return Ok(Verdict::Holds(m));
                }
            }
            return Ok(Verdict::Fails(Certificate::DeterminantObstruction {
                polynomial: poly,
                candidates,
            }));
        }
    }
    if is_automorphism_laurent(g, &witness)? {
        return Ok(Verdict::Holds(witness));
    }
    let (base, step) = sol.parameters.clone().expect("parameters");
    let step = Q::from_integer(step);
    let b = bound as i64;
    let width = (2 * b + 1) as u128;
    let total = width.checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > 2_000_000 {
        return Ok(Verdict::Unknown(format!(
            "{d} free parameters; {total} candidates exceed the search cap"
        )));
    }
    let mut u = vec![-b; d];
    loop {
        let s: Vec<Q> = base.iter().zip(&u).map(|(s0, k)| s0 + &step * qmath::q(*k)).collect();
        let m = sol.point(&s);
        if is_automorphism_laurent(g, &m)? && x.apply_laurent(&m)? == *y {
            return Ok(Verdict::Holds(m));
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(Verdict::Unknown(format!(
                    "no automorphism with {d} parameters within bound {bound}"
                )));
            }
            u[i] += 1;
            if u[i] > b {
                u[i] = -b;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// Block matrix `[[I + βα, β], [α, I]]` on `A ⊕ B`, where `α: A → B` is an
/// `n_B × n_A` matrix and `β: B → A` is `n_A × n_B`.
pub fn lemma3_automorphism(g: &FRGroup, n_a: usize, alpha: &QMat, beta: &QMat) -> Result<QMat> {
    let n = g.rank();
    if n_a > n {
        return Err(Error::Dimension { expected: n, found: n_a });
    }
    let n_b = n - n_a;
    if (alpha.rows(), alpha.cols()) != (n_b, n_a) || (beta.rows(), beta.cols()) != (n_a, n_b) {
        return Err(Error::Dimension {
            expected: n_b,
            found: alpha.rows(),
        });
    }
    let lower = QMat::from_fn(n, n, |i, j| {
        if i >= n_a && j < n_a {
            alpha[(i - n_a, j)].clone()
        } else {
            Q::zero()
        }
    });
    let upper = QMat::from_fn(n, n, |i, j| {
        if i < n_a && j >= n_a {
            beta[(i, j - n_a)].clone()
        } else {
            Q::zero()
        }
    });
    if !is_endomorphism(g, &lower)? || !is_endomorphism(g, &upper)? {
        return Err(Error::Precondition("blocks do not extend to endomorphisms".into()));
    }
    let ba = beta.mul(alpha);
    Ok(QMat::from_fn(n, n, |i, j| match (i < n_a, j < n_a) {
        (true, true) => {
            let id = if i == j { Q::one() } else { Q::zero() };
            id + &ba[(i, j)]
        }
        (true, false) => beta[(i, j - n_a)].clone(),
        (false, true) => alpha[(i - n_a, j)].clone(),
        (false, false) => {
            if i == j {
                Q::one()
            } else {
                Q::zero()
            }
        }
    }))
}

/// Block inverse `[[I, −β], [−α, I + αβ]]`.
pub fn lemma3_inverse(n_a: usize, alpha: &QMat, beta: &QMat) -> QMat {
    let n_b = alpha.rows();
    let n = n_a + n_b;
    let ab = alpha.mul(beta);
    QMat::from_fn(n, n, |i, j| match (i < n_a, j < n_a) {
        (true, true) => {
            if i == j {
                Q::one()
            } else {
                Q::zero()
            }
        }
        (true, false) => -beta[(i, j - n_a)].clone(),
        (false, true) => -alpha[(i - n_a, j)].clone(),
        (false, false) => {
            let id = if i == j { Q::one() } else { Q::zero() };
            id + &ab[(i - n_a, j - n_a)]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::chartype::HeightValue;
    use crate::primesym::Registry;
    use crate::qmath::{q, qf};

    fn m2(r: [[i64; 2]; 2]) -> QMat {
        QMat::from_rows(r.iter().map(|row| row.iter().map(|&v| q(v)).collect()).collect())
    }

    #[test]
    fn free_group_has_full_matrix_ring() {
        let reg = Arc::new(Registry::new(&[3], &["P"]).unwrap());
        let g = FRGroup::free("Z2", reg, 2).unwrap();
        let e = end_ring(&g);
        assert_eq!(e.generators.len(), 4);
        assert!(e.presentation_exact);
        assert!(e.generators.iter().all(|g| g.kappa.is_zero()));
        assert!(is_endomorphism(&g, &m2([[1, 7], [-3, 2]])).unwrap());
        assert!(!is_endomorphism(&g, &QMat::from_rows(vec![vec![qf(1, 3), q(0)], vec![q(0), q(1)]])).unwrap());
        assert!(is_automorphism(&g, &m2([[2, 1], [1, 1]])).unwrap());
        assert!(!is_automorphism(&g, &m2([[2, 0], [0, 1]])).unwrap());
    }

    #[test]
    fn triangular_ring_of_z_plus_h() {
        let e = catalog::example6().unwrap();
        let g = &e.group;
        let (a, b) = catalog::example6_mutual_endomorphisms();
        assert!(is_endomorphism(g, &a).unwrap());
        assert!(is_endomorphism(g, &b).unwrap());
        // the corner maps Z into H and may carry any element of H
        let corner = |h: Q| QMat::from_rows(vec![vec![q(0), q(0)], vec![h, q(0)]]);
        assert!(is_endomorphism(g, &corner(qf(1, 7))).unwrap());
        assert!(!is_endomorphism(g, &corner(qf(1, 5))).unwrap());
        assert!(!is_endomorphism(g, &corner(qf(1, 49))).unwrap());
        assert!(!is_endomorphism(g, &m2([[0, 1], [0, 0]])).unwrap());
        let module = end_ring(g);
        assert_eq!(module.generators.len(), 3);
        let x = Element::from_ints(&[5, 1]);
        let sol = solve_mapping(g, &x, &Element::from_ints(&[5, 2])).unwrap();
        assert!(sol.witness.is_some());
        let v = auto_mapping_exists(g, &x, &Element::from_ints(&[5, 2]), 5).unwrap();
        assert!(v.is_fails(), "{v:?}");
        assert!(endo_mapping_exists(g, &x, &Element::from_ints(&[1, 1])).unwrap().is_none());
        let back = auto_mapping_exists(g, &x, &Element::from_ints(&[5, 6]), 5).unwrap();
        assert!(back.is_holds(), "{back:?}");
    }

    #[test]
    fn incomparable_summands_are_diagonal() {
        let e = catalog::example5_default().unwrap();
        let module = end_ring(&e.group);
        for m in module.matrices() {
            assert!(m[(0, 1)].is_zero() && m[(1, 0)].is_zero());
        }
        let sol = solve_mapping(&e.group, e.element("x").unwrap(), e.element("y").unwrap()).unwrap();
        assert_eq!(sol.certificate, Some(MapCertificate::LocalObstruction { prime: 2 }));
    }

    #[test]
    fn rank1_kappa() {
        let reg = Arc::new(Registry::new(&[2], &["P"]).unwrap());
        let mut chi = Characteristic::zero(&reg);
        chi.set_class(&ClassKey::Explicit(2), HeightValue::Inf).unwrap();
        chi.set_class(&ClassKey::family("P"), HeightValue::Finite(2)).unwrap();
        let g = crate::group::rank1("A", &chi).unwrap();
        let e = end_ring(&g);
        assert_eq!(e.generators.len(), 1);
        let k = &e.generators[0].kappa;
        assert_eq!(k.at_class(&ClassKey::Explicit(2)), HeightValue::Inf);
        assert_eq!(k.at_class(&ClassKey::family("P")), HeightValue::Finite(0));
        assert!(end_contains(&g, &QMat::from_rows(vec![vec![qf(3, 8)]])).unwrap());
        assert!(!end_contains(&g, &QMat::from_rows(vec![vec![qf(1, 3)]])).unwrap());
    }

    #[test]
    fn block_automorphism() {
        let reg = Arc::new(Registry::new(&[], &[]).unwrap());
        let g = FRGroup::free("Z2", reg, 2).unwrap();
        let alpha = QMat::from_rows(vec![vec![q(2)]]);
        let beta = QMat::from_rows(vec![vec![q(0)]]);
        let phi = lemma3_automorphism(&g, 1, &alpha, &beta).unwrap();
        assert_eq!(phi, m2([[1, 0], [2, 1]]));
        assert_eq!(Element::from_ints(&[1, 0]).apply(&phi), Element::from_ints(&[1, 2]));
        let beta = QMat::from_rows(vec![vec![q(-3)]]);
        let phi = lemma3_automorphism(&g, 1, &alpha, &beta).unwrap();
        assert!(is_automorphism(&g, &phi).unwrap());
        assert_eq!(phi.mul(&lemma3_inverse(1, &alpha, &beta)), QMat::identity(2));
        let zero = QMat::from_rows(vec![vec![q(0)]]);
        assert_eq!(lemma3_automorphism(&g, 1, &zero, &zero).unwrap(), QMat::identity(2));
    }

    #[test]
    fn family_dependent_coefficients() {
        let e = catalog::example_complementary_default().unwrap();
        let g = &e.group;
        let lit = |s: &str| crate::spec::parse_element_literal(s).unwrap();
        let sol = solve_mapping(g, &lit("(1,1)"), &lit("(1,0) + (0,1)*p^-1 @P")).unwrap();
        assert!(sol.complete);
        let w = sol.witness.unwrap();
        assert!(w.as_rational().is_none());
        assert!(is_automorphism_laurent(g, &w).unwrap());
        let sol = solve_mapping(g, &lit("(0,-10)@P"), &lit("(0,-10)*p^-2 @P")).unwrap();
        assert!(!sol.complete && sol.witness.is_some());
        let sol = solve_mapping(g, &lit("(1,0)"), &lit("(1,0)*p^-2 @P")).unwrap();
        assert!(!sol.decided());
        let sol = solve_mapping(g, &lit("(1,1)"), &lit("(1,0)*p^-2 + (0,1) @P")).unwrap();
        assert_eq!(sol.certificate, Some(MapCertificate::FamilyObstruction { family: "P".into() }));
        let sol = solve_mapping(g, &lit("(1,0)"), &lit("(0,1)*p^-2 @P")).unwrap();
        assert_eq!(sol.certificate, Some(MapCertificate::NoFamilySolution));
    }

    #[test]
    fn det_polynomial_roots() {
        assert_eq!(rational_roots(&[q(-2), q(0), q(2)]), vec![q(-1), q(1)]);
        assert!(rational_roots(&[q(1), q(0), q(1)]).is_empty());
    }
}
