//! One PASS/FAIL line per acceptance criterion, with timings. Exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use tfag::catalog::{self, CatalogEntry};
use tfag::chartype;
use tfag::endoring;
use tfag::group::{Element, FRGroup};
use tfag::linalg::QMat;
use tfag::oracle::{self, HeightBound, RealizedGroup};
use tfag::qmath::q;
use tfag::transit::{self, Flag, Property, Sampler, Verdict};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T>(r: tfag::Result<T>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn criterion_1() -> Outcome {
    let ex = e(catalog::example3_default())?;
    ensure(ex.elements.len() == 7 && ex.group.rank() == 3, "expected seven lines in rank 3")?;
    let chi = e(ex.group.characteristic_of(ex.element("a1").unwrap()))?;
    ensure(chi.is_zero(), format!("chi(a1) = {chi}"))?;
    for key in ex.group.registry().keys() {
        ensure(chi.at_class(&key) == chartype::HeightValue::Finite(0), format!("nonzero at {key}"))?;
    }
    Ok(format!("chi(a1) = {chi}"))
}

fn criterion_2() -> Outcome {
    let ex = e(catalog::example3_default())?;
    let types: Vec<_> = ex
        .elements
        .iter()
        .map(|(_, a)| ex.group.type_of_element(a))
        .collect::<tfag::Result<_>>()
        .map_err(|x| x.to_string())?;
    let mut pairs = 0;
    for j in 1..types.len() {
        for k in 1..types.len() {
            if j != k {
                ensure(
                    e(chartype::incomparable(&types[j], &types[k]))?,
                    format!("a{} and a{} comparable", j + 1, k + 1),
                )?;
                pairs += 1;
            }
        }
        let below = e(chartype::type_le(&types[0], &types[j]))? && !e(chartype::type_le(&types[j], &types[0]))?;
        ensure(below, format!("type(a1) not strictly below type(a{})", j + 1))?;
    }
    Ok(format!("{pairs} ordered pairs incomparable, a1 strictly below all"))
}

fn criterion_3() -> Outcome {
    let ex = e(catalog::example3_default())?;
    let m = endoring::end_ring(&ex.group);
    ensure(m.generators.len() == 1, format!("{} generators", m.generators.len()))?;
    ensure(m.generators[0].matrix == QMat::identity(3), "generator is not the identity")?;
    ensure(m.generators[0].kappa.is_zero(), format!("kappa = {}", m.generators[0].kappa))?;
    let realized = e(oracle::realize_families(&ex.group, 2))?;
    let r = e(RealizedGroup::from_group(&realized))?;
    let brute = e(oracle::brute_force_end(&r, 3, 2, oracle::DEFAULT_BUDGET))?;
    let symbolic = e(oracle::symbolic_end_in_box(&ex.group, 3, 2, oracle::DEFAULT_BUDGET))?;
    ensure(
        brute == symbolic,
        format!("brute force {} vs symbolic {}", brute.len(), symbolic.len()),
    )?;
    Ok(format!(
        "End = Z·I; box (3,2) over {} primes: {} matrices on both sides",
        r.primes().len(),
        brute.len()
    ))
}

fn block_unit(n: usize, bi: usize, bj: usize) -> QMat {
    QMat::from_fn(
        2 * n,
        2 * n,
        |i, j| if i / n == bi && j / n == bj && i % n == j % n { q(1) } else { q(0) },
    )
}

fn criterion_4() -> Outcome {
    let ex = e(catalog::theorem15_group())?;
    let g = &ex.group;
    let n = g.rank();
    let single = endoring::end_ring(g);
    ensure(single.is_integer_scalars(), "End(G) is not Z·I")?;
    let (sq, x, y) = e(catalog::theorem15_square_witness(&ex))?;
    let square = endoring::end_ring(&sq);
    ensure(
        square.generators.len() == 4,
        format!("End(G+G) has {} generators", square.generators.len()),
    )?;
    for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        ensure(e(endoring::end_contains(&sq, &block_unit(n, bi, bj)))?, "block unit missing")?;
    }
    for gen in &square.generators {
        ensure(gen.kappa.is_zero(), "nonzero generator characteristic")?;
        let m = &gen.matrix;
        let scalar = (0..2 * n).all(|i| {
            (0..2 * n).all(|j| (i % n == j % n && m[(i, j)] == m[(i / n * n, j / n * n)]) || (i % n != j % n && m[(i, j)] == q(0)))
        });
        ensure(
            scalar && m.entries().all(|v| v.is_integer()),
            "generator not an integer block scalar",
        )?;
    }
    let (cx, cy) = (e(sq.characteristic_of(&x))?, e(sq.characteristic_of(&y))?);
    ensure(cx.is_zero() && cy.is_zero(), "characteristics not zero")?;
    match e(transit::check_pair_krylov(&sq, &x, &y))? {
        Verdict::Fails(c) => {
            ensure(e(c.recheck(&sq, &x, &y))?, "certificate does not recheck")?;
            Ok(format!("Krylov fails: {c}"))
        }
        v => Err(format!("Krylov verdict {}", v.label())),
    }
}

fn criterion_5() -> Outcome {
    let ex = e(catalog::example6())?;
    let g = &ex.group;
    let (x, y, z) = (
        Element::from_ints(&[5, 1]),
        Element::from_ints(&[1, 1]),
        Element::from_ints(&[5, 2]),
    );
    let kt = e(transit::check_pair_krylov(g, &x, &y))?;
    ensure(kt.is_fails(), format!("Krylov (5,1)->(1,1): {}", kt.label()))?;
    let (a, b) = catalog::example6_mutual_endomorphisms();
    ensure(
        e(endoring::is_endomorphism(g, &a))? && e(endoring::is_endomorphism(g, &b))?,
        "mutual endomorphisms rejected",
    )?;
    ensure(
        x.apply(&a) == z && z.apply(&b) == Element::from_ints(&[5, 1]),
        "mutual endomorphisms do not swap the pair",
    )?;
    match e(transit::check_pair_weak(g, &x, &z, 3))? {
        Verdict::Fails(c) => {
            let text = c.to_string();
            ensure(
                text.contains("[1, -1]") && text.contains("invertible"),
                format!("unexpected certificate: {text}"),
            )?;
            ensure(e(c.recheck(g, &x, &z))?, "certificate does not recheck")?;
            Ok(format!("KT fails, endomorphisms verified, WT fails: {text}"))
        }
        v => Err(format!("weak (5,1)->(5,2): {}", v.label())),
    }
}

fn criterion_6() -> Outcome {
    let ex = e(catalog::example5_default())?;
    let g = &ex.group;
    let (x, y) = (Element::from_ints(&[2, 1]), Element::from_ints(&[1, 1]));
    ensure(
        e(g.characteristic_of(&x))? == e(g.characteristic_of(&y))?,
        "witness pair has different characteristics",
    )?;
    ensure(
        e(transit::check_pair_transitive(g, &x, &y, 3))?.is_fails(),
        "transitive witness does not fail",
    )?;
    let mut pairs = Vec::new();
    let mut seed = 0;
    while pairs.len() < 100 && seed < 50 {
        pairs.extend(Sampler::new(seed, 100).pairs(g, Property::Weak));
        seed += 1;
    }
    pairs.truncate(100);
    ensure(pairs.len() == 100, format!("only {} mutual-endomorphism pairs", pairs.len()))?;
    for (x, y) in &pairs {
        let v = e(transit::check_pair_weak(g, x, y, 3))?;
        ensure(v.is_holds(), format!("weak {x} -> {y}: {}", v.label()))?;
    }
    let r = e(ex.classify(6, 30, 3))?;
    ensure(r.region == Some(5) && r.violations.is_empty(), format!("region {:?}", r.region))?;
    for p in [Property::Fully, Property::Transitive, Property::Krylov] {
        ensure(matches!(r.flags[&p], Flag::Refuted { .. }), format!("{} not refuted", p.name()))?;
    }
    ensure(
        matches!(r.flags[&Property::Weak], Flag::HoldsOnSample { .. }),
        "weak flag not sampled-holds",
    )?;
    Ok(format!("100 weak pairs hold; region 5; weak: {}", r.flags[&Property::Weak].scope()))
}

fn criterion_7() -> Outcome {
    let ex = e(catalog::example_complementary_default())?;
    let g = &ex.group;
    for p in [Property::Transitive, Property::Fully] {
        let pairs = Sampler::new(21, 100).pairs(g, p);
        ensure(pairs.len() >= 100, format!("only {} {} pairs", pairs.len(), p.name()))?;
        for (x, y) in pairs.iter().take(100) {
            let v = e(transit::check_pair(g, p, x, y, 3))?;
            ensure(v.is_holds(), format!("{} {x} -> {y}: {}", p.name(), v.label()))?;
        }
    }
    let r = e(ex.classify(21, 20, 3))?;
    ensure(r.region == Some(1), format!("region {:?}", r.region))?;
    Ok("100 pairs each hold for T and FT; region 1".into())
}

fn criterion_8() -> Outcome {
    let entries = e(catalog::all())?;
    let per = 500 / entries.len() + 1;
    let mut checked = 0;
    for ex in &entries {
        let mut pairs = Vec::new();
        let mut seed = 100;
        while pairs.len() < per && seed < 140 {
            let mut s = Sampler::new(seed, per);
            s.same_line = ex.same_line_scope;
            pairs.extend(s.pairs(&ex.group, Property::Krylov));
            seed += 1;
        }
        pairs.truncate(per);
        for (x, y) in &pairs {
            let v = e(transit::venn_check_pair(&ex.group, x, y, 3))?;
            ensure(v.is_empty(), format!("{}: {}", ex.name, v.join("; ")))?;
            checked += 1;
        }
    }
    ensure(checked >= 500, format!("only {checked} pairs"))?;
    Ok(format!("{checked} pairs over {} entries, no violations", entries.len()))
}

fn sub(m: &QMat, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> QMat {
    let (r0, c0) = (rows.start, cols.start);
    QMat::from_fn(rows.len(), cols.len(), |i, j| m[(i + r0, j + c0)].clone())
}

fn projection(n: usize, lo: usize, hi: usize) -> QMat {
    QMat::from_fn(n, n, |i, j| if i == j && (lo..hi).contains(&i) { q(1) } else { q(0) })
}

fn lemma3_sums() -> Result<Vec<(String, FRGroup, usize)>, String> {
    let mut sums = Vec::new();
    for name in ["example5", "complementary", "example6", "composed"] {
        let ex = e(catalog::by_name(name))?;
        sums.push((name.to_string(), ex.group.clone(), 1));
    }
    let ex1 = e(catalog::example1())?;
    sums.push(("example1²".into(), e(ex1.group.direct_sum(&ex1.group))?, 1));
    let ex3 = e(catalog::example3_default())?;
    sums.push(("example3²".into(), e(ex3.group.direct_sum(&ex3.group))?, 3));
    let t15 = e(catalog::theorem15_group())?;
    let (sq, _, _) = e(catalog::theorem15_square_witness(&t15))?;
    sums.push(("theorem15²".into(), sq, 3));
    Ok(sums)
}

fn criterion_9() -> Outcome {
    let sums = lemma3_sums()?;
    let mut done = 0;
    let mut nontrivial = 0;
    for (name, g, n_a) in &sums {
        let n = g.rank();
        let (pa, pb) = (projection(n, 0, *n_a), projection(n, *n_a, n));
        ensure(
            e(endoring::is_endomorphism(g, &pa))? && e(endoring::is_endomorphism(g, &pb))?,
            format!("{name} is not split"),
        )?;
    }
    let mut seed = 0u64;
    while done < 200 {
        let (name, g, n_a) = &sums[(seed as usize) % sums.len()];
        let (n, n_a) = (g.rank(), *n_a);
        let s = Sampler::new(seed, 1);
        let mut rng = s.rng(9);
        seed += 1;
        let f = s.random_endomorphism(g, &mut rng);
        let h = s.random_endomorphism(g, &mut rng);
        let alpha = sub(&f, n_a..n, 0..n_a);
        let beta = sub(&h, 0..n_a, n_a..n);
        let Some(x) = s.random_element(g, &mut rng) else { continue };
        let a = x.apply(&projection(n, 0, n_a));
        let b = x.apply(&projection(n, n_a, n));
        let phi = e(endoring::lemma3_automorphism(g, n_a, &alpha, &beta))?;
        let pad = |m: &QMat, r0: usize, c0: usize| {
            QMat::from_fn(n, n, |i, j| {
                if i >= r0 && i < r0 + m.rows() && j >= c0 && j < c0 + m.cols() {
                    m[(i - r0, j - c0)].clone()
                } else {
                    q(0)
                }
            })
        };
        let b1 = e(b.try_add(&a.apply(&pad(&alpha, n_a, 0))))?;
        let a1 = e(a.try_add(&b1.apply(&pad(&beta, 0, n_a))))?;
        ensure(
            e(endoring::is_automorphism(g, &phi))?,
            format!("{name}: phi is not an automorphism"),
        )?;
        let image = e(a.try_add(&b))?.apply(&phi);
        ensure(image == e(a1.try_add(&b1))?, format!("{name}: phi(a+b) != a1+b1"))?;
        let inv = endoring::lemma3_inverse(n_a, &alpha, &beta);
        ensure(
            phi.mul(&inv) == QMat::identity(n) && inv.mul(&phi) == QMat::identity(n),
            format!("{name}: block inverse wrong"),
        )?;
        if alpha.entries().any(|v| *v != q(0)) || beta.entries().any(|v| *v != q(0)) {
            nontrivial += 1;
        }
        done += 1;
    }
    Ok(format!(
        "200 instances over {} sums, {nontrivial} with nonzero off-diagonal blocks",
        sums.len()
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = oracle::seeded_rng(10);
    let mut heights = 0;
    let mut members = 0;
    for i in 0..50 {
        let g = e(oracle::random_realized_group(&mut rng, 3))?;
        ensure(
            g.rank() <= 3 && g.registry().explicit_primes().iter().all(|p| [2, 3, 5, 7].contains(p)),
            "generator out of range",
        )?;
        let r = e(RealizedGroup::from_group(&g))?;
        let s = Sampler::new(i, 6);
        for x in s.elements(&g, 6, 0) {
            let coords = x.rational_coords().ok_or("non-rational sample")?;
            ensure(r.contains(&coords), format!("group {i}: {x} not in realization"))?;
            let half = x.scale(&tfag::qmath::qf(1, 2));
            ensure(
                r.contains(&half.rational_coords().unwrap()) == e(g.contains(&half))?,
                format!("group {i}: membership differs at {half}"),
            )?;
            members += 2;
            for p in r.primes() {
                let b = e(oracle::brute_force_height(&r, &coords, p, 6))?;
                let h = e(g.height_at_prime(&x, p))?;
                ensure(b.agrees_with(h), format!("group {i}: height of {x} at {p}: {b:?} vs {h}"))?;
                if let HeightBound::Exact(_) = b {
                    heights += 1;
                }
            }
        }
        let (num, den) = if g.rank() < 3 { (2, 2) } else { (1, 1) };
        let brute = e(oracle::brute_force_end(&r, num, den, oracle::DEFAULT_BUDGET))?;
        let sym = e(oracle::symbolic_end_in_box(&g, num, den, oracle::DEFAULT_BUDGET))?;
        ensure(brute == sym, format!("group {i}: end box {} vs {}", brute.len(), sym.len()))?;
    }
    Ok(format!(
        "50 groups: {members} membership checks, {heights} exact heights, end boxes equal"
    ))
}

fn criterion_11() -> Outcome {
    let entries: Vec<CatalogEntry> = e(catalog::all())?;
    let mut scaled = 0;
    let mut seed = 0u64;
    while scaled < 500 {
        let ex = &entries[(seed as usize) % entries.len()];
        let s = Sampler::new(seed, 1);
        let mut rng = s.rng(11);
        seed += 1;
        let Some(a) = s.random_element(&ex.group, &mut rng) else { continue };
        let n = [2i64, -3, 5, 6, -10, 12, 49, 7, 1, -1][(seed % 10) as usize] * (1 + (seed / 10 % 3) as i64);
        let lhs = e(ex.group.characteristic_of(&a.scale(&q(n))))?;
        let rhs = e(chartype::scale_i(n, &e(ex.group.characteristic_of(&a))?))?;
        ensure(lhs == rhs, format!("{}: chi({n}·{a}) = {lhs}, scaled {rhs}", ex.name))?;
        scaled += 1;
    }
    let mut triples = 0;
    seed = 0;
    while triples < 500 {
        let ex = &entries[(seed as usize) % entries.len()];
        let s = Sampler::new(seed + 7000, 3);
        seed += 1;
        let xs = s.elements(&ex.group, 3, 0);
        if xs.len() < 3 {
            continue;
        }
        let c: Vec<_> = xs
            .iter()
            .map(|x| ex.group.characteristic_of(x))
            .collect::<tfag::Result<_>>()
            .map_err(|x| x.to_string())?;
        let m = e(chartype::meet(&c[0], &c[1]))?;
        ensure(
            e(chartype::chi_le(&m, &c[0]))? && e(chartype::chi_le(&m, &c[1]))?,
            "meet is not a lower bound",
        )?;
        let below = e(chartype::chi_le(&c[2], &c[0]))? && e(chartype::chi_le(&c[2], &c[1]))?;
        ensure(below == e(chartype::chi_le(&c[2], &m))?, "meet is not greatest")?;
        triples += 1;
    }
    Ok("500 scalings and 500 meet triples".into())
}

fn criterion_12() -> Outcome {
    let mut total = 0;
    for dim in 2..=4 {
        let r = e(oracle::scalar_lemma_check(dim, 100, 12 + dim as u64))?;
        ensure(r.passed(), format!("dim {dim}: {:?}", r.failures))?;
        total += r.trials;
    }
    Ok(format!("{total} trials in dims 2-4"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("characteristic of a1 is zero", criterion_1, 1),
        ("line types incomparable, a1 below", criterion_2, 1),
        ("End of the seven-line group is Z", criterion_3, 60),
        ("square of a rigid group is not Krylov transitive", criterion_4, 30),
        ("Z + H: Krylov and weak failures", criterion_5, 5),
        ("incomparable sum is weakly transitive only", criterion_6, 30),
        ("complementary divisibility is fully transitive", criterion_7, 30),
        ("implications between the four notions", criterion_8, 120),
        ("block automorphisms of direct sums", criterion_9, 30),
        ("symbolic results match brute force", criterion_10, 300),
        ("height laws", criterion_11, 30),
        ("matrices fixing a rigid line set are scalar", criterion_12, 10),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let out = match out {
            Ok(m) if took > Duration::from_secs(*limit) => Err(format!("{m}; took {took:.2?}, limit {limit}s")),
            o => o,
        };
        match out {
            Ok(m) => println!("PASS {:>2} {name} ({took:.2?}): {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({took:.2?}): {m}", i + 1);
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
