//! Acceptance suite. Runs as a plain binary and prints one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{ctx, random_set, Mix, SMALL_FIELDS};
use ffgeom::certify::exact::{floor_power, int, rat};
use ffgeom::certify::audit::{cube_le_fourth, triple_premise};
use ffgeom::certify::{
    audit_bisector_bound, audit_incidence_bound, audit_k_constant, audit_triple_bound, certify_tree, check_certificate,
    popular_pins, AuditId, CertifyParams, Regime, Restriction, SizeRange,
};
use ffgeom::experiment::{
    export, run_experiment, run_on_sets, with_threads, ExperimentConfig, Format, GenKind, Report, Row, Statistic,
};
use ffgeom::field::{is_prime, FieldCtx};
use ffgeom::plane::{circle_points, Domain, LineF, LineMultiset, PlanePoint, PointSet};
use ffgeom::stats::{
    bisector_energy, isosceles_triples, pinned_nonzero_distances, sphere_histogram, square_sums, BisectorVariant,
    TripleMode,
};
use ffgeom::trees::{count_distinct_pinned_trees, CountMode, SplitStrategy, TreeSpec};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn small_field(mix: &mut Mix) -> FieldCtx {
    let (p, e) = SMALL_FIELDS[mix.below(SMALL_FIELDS.len() as u64) as usize];
    ctx(p, e)
}

fn random_lines(ctx: &FieldCtx, mix: &mut Mix, count: u64) -> LineMultiset {
    let q = ctx.q() as u64;
    let mut lines = LineMultiset::new();
    while lines.distinct() < count.min(q * q + q) as usize {
        let [a, b, c] = [0; 3].map(|_| ctx.from_rank(mix.below(q) as u32).unwrap());
        if let Ok(l) = LineF::new(ctx, a, b, c) {
            lines.insert(l, mix.range(1, 4));
        }
    }
    lines
}

fn criterion_1() -> Outcome {
    const N: u64 = 500;
    let mut mix = Mix::new(1);
    for i in 0..N {
        let ctx = small_field(&mut mix);
        let e = random_set(&ctx, mix.range(1, 60), 10_000 + i);
        let f = random_set(&ctx, mix.range(1, 60), 20_000 + i);
        for (mode, strict) in [(TripleMode::Paper, false), (TripleMode::Strict, true)] {
            let fast = isosceles_triples(&f, &e, mode).value;
            let slow = common::triples(&f, &e, strict);
            ensure(fast == slow, || format!("triples instance {i} {mode}: {fast} vs oracle {slow}"))?;
        }
    }
    for i in 0..N {
        let ctx = small_field(&mut mix);
        let e = random_set(&ctx, mix.range(1, 30), 30_000 + i);
        for (variant, symmetric) in [(BisectorVariant::Paper, false), (BisectorVariant::Symmetric, true)] {
            let fast = bisector_energy(&e, variant);
            let slow = common::bisector_energy(&e, symmetric);
            ensure(fast == slow, || format!("bisector energy instance {i} {variant}: {fast} vs oracle {slow}"))?;
        }
    }
    for i in 0..N {
        let ctx = small_field(&mut mix);
        let f = random_set(&ctx, mix.range(1, 60), 40_000 + i);
        let lines = if i % 2 == 0 {
            LineMultiset::nonzero_bisectors(&random_set(&ctx, mix.range(2, 20), 50_000 + i))
        } else {
            let count = mix.range(1, 40);
            random_lines(&ctx, &mut mix, count)
        };
        let fast = ffgeom::plane::incidences(&f, &lines);
        let slow = common::incidences(&f, &lines);
        ensure(fast == slow, || format!("incidences instance {i}: {fast} vs oracle {slow}"))?;
    }
    let trees = common::small_trees();
    for i in 0..N {
        let ctx = small_field(&mut mix);
        let pool = random_set(&ctx, mix.range(1, 25), 60_000 + i);
        let tree = &trees[mix.below(trees.len() as u64) as usize];
        let pin = if mix.below(2) == 0 {
            pool.points()[0]
        } else {
            PlanePoint::from_index(&ctx, mix.below(ctx.q() as u64 * ctx.q() as u64))
        };
        for (mode, nonzero) in [(CountMode::All, false), (CountMode::Nonzero, true)] {
            let fast = count_distinct_pinned_trees(&ctx, tree, pin, &pool, mode, u64::MAX).unwrap();
            let slow = common::tree_count(&ctx, tree, pin, &pool, nonzero);
            ensure(fast == slow, || format!("trees instance {i} ({tree}, {mode}): {fast} vs oracle {slow}"))?;
        }
    }
    Ok(format!("{N} instances each of T* (both modes), Q (both variants), I, and tree counts (both modes); 0 mismatches"))
}

fn criterion_2() -> Outcome {
    let f3 = ctx(3, 1);
    let plane = PointSet::full_plane(&f3);
    let t = isosceles_triples(&plane, &plane, TripleMode::Paper).value;
    ensure(t == 216 && common::triples(&plane, &plane, false) == 216, || format!("T*(F_3^2) = {t}"))?;
    let origin = PlanePoint::from_ints(&f3, 0, 0);
    let d: Vec<u32> = pinned_nonzero_distances(origin, &plane).into_iter().map(|d| d.rank()).collect();
    let oracle: std::collections::BTreeSet<u32> = common::pinned_nonzero(&f3, origin, &plane).into_iter().map(|d| d.rank()).collect();
    ensure(d == [1, 2] && oracle.into_iter().collect::<Vec<_>>() == d, || format!("D*_(0,0) = {d:?}"))?;
    let f5 = ctx(5, 1);
    let line = PointSet::from_ints(&f5, &[(0, 0), (0, 1), (0, 2)]);
    let q = bisector_energy(&line, BisectorVariant::Paper);
    ensure(q == 12 && common::bisector_energy(&line, false) == 12, || format!("Q = {q}"))?;

    let mut fields = 0;
    for q in 3u64..=49 {
        let Some((p, e)) = (2..=q).find(|&p| is_prime(p) && q % p == 0).and_then(|p| {
            let e = (1..=6).find(|&e| p.pow(e) == q)?;
            Some((p, e))
        }) else {
            continue;
        };
        if p == 2 {
            continue;
        }
        let ctx = ctx(p, e);
        let eta = ctx.eta_minus_one() as i64;
        for center in [PlanePoint::from_ints(&ctx, 0, 0), PlanePoint::from_ints(&ctx, 1, 2)] {
            for delta in ctx.elements() {
                let expected = if !delta.is_zero() {
                    q as i64 - eta
                } else if eta == 1 {
                    2 * q as i64 - 1
                } else {
                    1
                };
                let fast = circle_points(&ctx, center, delta, Domain::FullPlane).len();
                let scan = common::circle_size(&ctx, center, delta);
                ensure(fast as i64 == expected && scan as i64 == expected, || {
                    format!("F_{q} radius {}: formula {expected}, fast {fast}, scan {scan}", ctx.format_elem(delta))
                })?;
            }
        }
        fields += 1;
    }
    Ok(format!("T* = 216, D* = {{1,2}}, Q = 12, circle sizes over {fields} fields with q <= 49"))
}

fn criterion_3() -> Outcome {
    const N: u64 = 500;
    let mut mix = Mix::new(3);
    for i in 0..N {
        let ctx = small_field(&mut mix);
        let e = random_set(&ctx, mix.range(1, 60), 70_000 + i);
        let f = if i % 3 == 0 { e.clone() } else { random_set(&ctx, mix.range(1, 60), 80_000 + i) };
        let (all, zero_base) = common::equal_distance_triples(&f, &e);
        let hist: u64 = f.iter().map(|x| sphere_histogram(x, &e).counts.values().map(|c| c * c).sum::<u64>()).sum();
        let sums = square_sums(&f, &e);
        ensure(hist == all && sums.all == all, || format!("instance {i}: histogram squares {hist} / {} vs {all}", sums.all))?;
        let t = isosceles_triples(&f, &e, TripleMode::Paper).value;
        ensure(t == all - zero_base, || format!("instance {i}: T* {t} vs {all} - {zero_base}"))?;
        let lhs: u64 = f
            .iter()
            .map(|x| {
                pinned_nonzero_distances(x, &e)
                    .into_iter()
                    .map(|d| circle_points(&ctx, x, d, Domain::Set(&e)).len() as u64)
                    .sum::<u64>()
            })
            .sum();
        let rhs = f.iter().map(|x| e.iter().filter(|&y| !common::dist(&ctx, x, y).is_zero()).count() as u64).sum::<u64>();
        ensure(lhs == rhs && sums.nonzero_pairs == rhs, || format!("instance {i}: circle sum {lhs} vs pairs {rhs}"))?;
    }
    Ok(format!("{N} instances; both identities exact"))
}

fn criterion_4() -> Outcome {
    const N: u64 = 1000;
    let primes = [5u64, 7, 11, 13, 17];
    let mut mix = Mix::new(4);
    let mut tightest = 0.0f64;
    for i in 0..N {
        let ctx = ctx(primes[(i % 5) as usize], 1);
        let f = random_set(&ctx, mix.range(1, 60), 90_000 + i);
        let lines = match i % 3 {
            0 => LineMultiset::nonzero_bisectors(&random_set(&ctx, mix.range(2, 30), 100_000 + i)),
            1 => LineMultiset::nonzero_bisectors(&f),
            _ => {
                let count = mix.range(1, 60);
                random_lines(&ctx, &mut mix, count)
            }
        };
        let r = audit_incidence_bound(&f, &lines).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("violation: {}", r.witness.clone().unwrap_or_default()))?;
        let oracle = common::incidences(&f, &lines);
        ensure(r.lhs == oracle.into(), || format!("instance {i}: lhs {} vs oracle {oracle}", r.lhs))?;
        if lines.total() > 0 {
            tightest = tightest.max(oracle as f64 / r.rhs.to_f64());
        }
    }
    Ok(format!("{N} instances, 0 violations, largest I/bound = {tightest:.3}"))
}

fn criterion_5() -> Outcome {
    let primes = [5u64, 7, 11, 13];
    let mut mix = Mix::new(5);
    let k = int(4);
    let (mut reports, mut findings, mut k_in_range) = (0, Vec::new(), 0);
    for i in 0..300u64 {
        let ctx = ctx(primes[(i % 4) as usize], 1);
        let e = random_set(&ctx, mix.range(1, 40), 110_000 + i);
        let rs = [
            audit_triple_bound(&e),
            audit_bisector_bound(&e),
            audit_k_constant(&e, &k, Restriction::Record),
        ];
        for r in rs {
            let r = r.map_err(|e| e.to_string())?;
            reports += 1;
            if r.id == AuditId::TripleBound || r.id == AuditId::KConstant {
                let t = common::triples(&e, &e, false);
                ensure(r.lhs == t.into(), || format!("{} lhs {} vs oracle {t}", r.id, r.lhs))?;
            }
            match r.id {
                AuditId::TripleBound => ensure(!r.premise_in_range, || format!("triple premise in range on instance {i}"))?,
                AuditId::KConstant => k_in_range += r.premise_in_range as u32,
                _ => {}
            }
            if !r.holds {
                findings.push(format!("{} on instance {i}", r.id));
            }
        }
    }

    // Exit-status path: a planted isotropic line breaks the M condition.
    let mut cfg = ExperimentConfig::new(5, 1, GenKind::IsotropicLine { size: 5, offset: 0 });
    cfg.audits = vec![AuditId::MCondition];
    let planted = run_experiment(&cfg).map_err(|e| e.to_string())?;
    ensure(planted.exit_code() == 2, || "planted M-condition violation did not give exit 2".into())?;
    let mut stub = Report::default();
    stub.rows.push(Row {
        run_id: 0,
        seed: 0,
        p: 5,
        e: 1,
        n_e: 1,
        n_f: 1,
        statistic: "triple-bound".into(),
        mode: "exact".into(),
        value: "1".into(),
        bound: "0".into(),
        holds: Some(false),
        borderline: Some(false),
        premise_in_range: Some(false),
        elapsed_ms: 0,
    });
    ensure(stub.exit_code() == 2, || "stub violation did not give exit 2".into())?;

    // The triple premise 5 p^(5/4) <= n <= p^(4/3) is empty for every p < 5^12.
    let mut primes_checked = 0;
    for p in (3u64..200_000).filter(|&p| is_prime(p)) {
        let top = floor_power(p, 4, 3);
        ensure(cube_le_fourth(top, p) && !cube_le_fourth(top + 1, p), || format!("floor(p^(4/3)) wrong at p = {p}"))?;
        ensure(!triple_premise(top, p), || format!("triple premise nonempty at p = {p}"))?;
        // Medium window of the tree theorems is empty up to n = p^2.
        for k in 1..=3 {
            for n in [top, top + 1, p * p] {
                let r = SizeRange::classify(n as usize, p, k);
                ensure(r != SizeRange::Medium && r != SizeRange::Large, || format!("p = {p}, n = {n}, k = {k}: {r:?}"))?;
            }
        }
        primes_checked += 1;
    }
    let edge = 5u64.pow(12);
    ensure(triple_premise(5u64.pow(16), edge), || "premise should open at p = 5^12, n = 5^16".into())?;
    ensure(!triple_premise(5u64.pow(16), edge - 1) && !triple_premise(5u64.pow(16) - 1, edge), || {
        "premise boundary at 5^12 off by one".into()
    })?;
    Ok(format!(
        "{reports} reports record premise_in_range ({k_in_range} K-constant reports in range), {} findings{}, exit 2 path ok, empty ranges confirmed for {primes_checked} primes",
        findings.len(),
        findings.first().map(|f| format!(" (e.g. {f})")).unwrap_or_default()
    ))
}

fn criterion_6() -> Outcome {
    const N: u64 = 200;
    let mut mix = Mix::new(6);
    let trees = common::small_trees();
    let (mut mutations, mut pins) = (0, 0);
    for i in 0..N {
        let ctx = small_field(&mut mix);
        let size = mix.range(2, 25);
        let e = random_set(&ctx, size, 120_000 + i);
        let f = if i % 2 == 0 { e.clone() } else { random_set(&ctx, size, 130_000 + i) };
        let tree = &trees[mix.below(trees.len() as u64) as usize];
        let regimes: &[Regime] = if ctx.is_prime_field() { &Regime::ALL } else { &[Regime::LargeQ, Regime::Arbitrary] };
        let mut params = CertifyParams::new(regimes[mix.below(regimes.len() as u64) as usize]);
        if i % 3 == 0 {
            params = params.with_threshold(rat(mix.range(0, 8) as i64, 1));
        }
        if i % 5 == 0 {
            params.split = SplitStrategy::Contiguous;
        }
        let c = certify_tree(&e, &f, tree, &params).map_err(|err| format!("instance {i}: {err}"))?;
        ensure(check_certificate(&c, &e, &f, tree), || format!("instance {i}: honest certificate rejected"))?;
        for b in &c.pin_bounds {
            let exact = count_distinct_pinned_trees(&ctx, tree, b.pin, &f, CountMode::Nonzero, u64::MAX).unwrap();
            ensure(b.bound <= exact && c.per_pin_bound <= b.bound, || {
                format!("instance {i}: bound {} exceeds exact {exact}", b.bound)
            })?;
            pins += 1;
        }
        if c.pin_bounds.is_empty() {
            continue;
        }
        let mut bad = c.clone();
        bad.per_pin_bound += 1;
        ensure(!check_certificate(&bad, &e, &f, tree), || format!("instance {i}: inflated per-pin bound accepted"))?;
        let mut bad = c.clone();
        bad.pin_bounds[0].bound += 1;
        ensure(!check_certificate(&bad, &e, &f, tree), || format!("instance {i}: inflated pin bound accepted"))?;
        mutations += 2;
        if let Some(node) = c.recursion.iter().position(|n| n.pool_halves.len() == 2 && !n.pool_halves[0].is_empty()) {
            let mut bad = c.clone();
            let extra = bad.recursion[node].pool_halves[0].points()[0];
            let grown = bad.recursion[node].pool_halves[1].union(&PointSet::new(&ctx, [extra]));
            bad.recursion[node].pool_halves[1] = grown;
            ensure(!check_certificate(&bad, &e, &f, tree), || format!("instance {i}: overlapping pools accepted"))?;
            mutations += 1;
        }
        let trace = &c.pin_bounds[0].trace;
        if trace.sub_pools.len() == 2 && !trace.sub_pools[0].is_empty() {
            let mut bad = c.clone();
            let t = &mut bad.pin_bounds[0].trace;
            let extra = t.sub_pools[0].points()[0];
            t.sub_pools[1] = t.sub_pools[1].union(&PointSet::new(&ctx, [extra]));
            ensure(!check_certificate(&bad, &e, &f, tree), || format!("instance {i}: overlapping trace pools accepted"))?;
            mutations += 1;
        }
    }
    Ok(format!("{N} certificates verified, {pins} pin bounds <= exact counts, {mutations} mutations rejected"))
}

fn criterion_7() -> Outcome {
    const N: u64 = 200;
    let mut mix = Mix::new(7);
    let edge = TreeSpec::path(1, 1).unwrap();
    let mut above_min = 0;
    for i in 0..N {
        let ctx = small_field(&mut mix);
        let e = random_set(&ctx, mix.range(2, 40), 140_000 + i);
        let min = e.iter().map(|x| pinned_nonzero_distances(x, &e).len()).min().unwrap() as u64;
        let mut ts = vec![min, mix.range(0, min)];
        if mix.below(2) == 0 {
            ts.push(min + mix.range(1, 3));
            above_min += 1;
        }
        for t in ts {
            let t = int(t);
            let regime = if ctx.is_prime_field() { Regime::MediumPrime } else { Regime::LargeQ };
            let c = certify_tree(&e, &e, &edge, &CertifyParams::new(regime).with_threshold(t.clone()))
                .map_err(|err| err.to_string())?;
            let popular = popular_pins(&e, &e, &t);
            ensure(c.pins == popular, || format!("instance {i}, t = {t}: {} pins vs {} popular", c.pins.len(), popular.len()))?;
        }
    }
    Ok(format!("{N} instances, pins = popular_pins at t = min and below ({above_min} also above min)"))
}

fn sweep_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(7, 1, GenKind::Random { size: 20 });
    cfg.f_set = Some(GenKind::Random { size: 20 });
    cfg.seed = 42;
    cfg.runs = 24;
    cfg.statistics = vec![Statistic::Triples, Statistic::BisectorEnergy, Statistic::Incidences, Statistic::Trees];
    cfg.audits = vec![AuditId::TripleBound, AuditId::IncidenceBound, AuditId::KConstant];
    cfg.certify = vec![Regime::Arbitrary];
    cfg.tree = Some("vertices=3 edges=1-2,2-3 pin=2".into());
    cfg
}

fn csv_without_timing(threads: usize) -> Result<Vec<u8>, String> {
    let cfg = sweep_config();
    let mut report = with_threads(Some(threads), || run_experiment(&cfg)).map_err(|e| e.to_string())?;
    report.strip_timing();
    export(&report, Format::Csv).map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let first = csv_without_timing(1)?;
    let second = csv_without_timing(1)?;
    let wide = std::thread::available_parallelism().map_or(4, |n| n.get().max(2));
    let parallel = csv_without_timing(wide)?;
    ensure(first == second, || "two consecutive runs differ".into())?;
    ensure(first == parallel, || format!("1 and {wide} workers differ"))?;
    let f7 = ctx(7, 1);
    let e = random_set(&f7, 15, 9);
    let cfg = sweep_config();
    let a = run_on_sets(&cfg, &e, &e).map_err(|e| e.to_string())?;
    let b = with_threads(Some(wide), || run_on_sets(&cfg, &e, &e)).map_err(|e| e.to_string())?;
    let strip = |mut r: Report| {
        r.strip_timing();
        r
    };
    ensure(strip(a) == strip(b), || "explicit-set run differs across workers".into())?;
    Ok(format!("{} CSV bytes identical across 2 runs and 1 vs {wide} workers", first.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", criterion_1),
        ("exact anchors", criterion_2),
        ("identity suite", criterion_3),
        ("unconditional incidence audit", criterion_4),
        ("conditional audits", criterion_5),
        ("certificate soundness", criterion_6),
        ("popular pins at k = 1", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {} ({name}): {msg} [{secs:.1}s]", n + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {msg} [{secs:.1}s]", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
