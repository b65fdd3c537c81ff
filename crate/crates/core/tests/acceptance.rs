//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stseq::bench::{run_benchmark, BenchmarkConfig, SweepVar};
use stseq::datagen::{generate, verify_planted, GeneratorParams};
use stseq::join::{SweepStats, TargetSet};
use stseq::sample::worked_example;
use stseq::{
    build_index, build_index_capped, mine_baseline, mine_micro, EmbeddingSpace, EventDataset, EventInstance,
    MicroclusterIndex, MinerConfig, NeighborhoodParams, NormalizationParams, PatternResult, StPoint,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// Independent oracles

fn neighbor_oracle(a: &StPoint, p: &StPoint, r: f64, t: f64) -> bool {
    let dt = p.time - a.time;
    let d2: f64 = a.loc.iter().zip(&p.loc).map(|(x, y)| (x - y) * (x - y)).sum();
    dt > 0.0 && dt <= t && d2.sqrt() <= r
}

fn cylinder_volume(dim: usize, r: f64, t: f64) -> f64 {
    if dim == 1 {
        2.0 * r * t
    } else {
        PI * r * r * t
    }
}

fn box_volume(space: &EmbeddingSpace) -> f64 {
    space.spatial.iter().map(|iv| iv.hi - iv.lo).product::<f64>() * (space.temporal.hi - space.temporal.lo)
}

/// Every type sequence of length 2..=max_len with its index, computed
/// directly from the definitions without pruning.
fn enumerate_all(ds: &EventDataset, r: f64, t: f64, max_len: usize) -> BTreeMap<Vec<String>, f64> {
    let types = ds.event_types().to_vec();
    let pts: Vec<StPoint> = (0..ds.len()).map(|i| ds.point(i)).collect();
    let members: Vec<Vec<usize>> = types
        .iter()
        .map(|t| (0..ds.len()).filter(|&i| &ds.instances()[i].event_type == t).collect())
        .collect();
    let of_type = |k: usize| members[k].iter().copied();
    let vol_n = cylinder_volume(ds.dim(), r, t);
    let vol = box_volume(ds.space());
    let in_space: Vec<usize> = (0..types.len())
        .map(|k| of_type(k).filter(|&i| ds.space().contains(&pts[i])).count())
        .collect();

    let mut out = BTreeMap::new();
    let mut stack: Vec<(Vec<usize>, Vec<usize>, f64)> =
        (0..types.len()).map(|k| (vec![k], of_type(k).collect(), f64::INFINITY)).collect();
    while let Some((seq, tail, index)) = stack.pop() {
        if seq.len() == max_len {
            continue;
        }
        #[allow(clippy::needless_range_loop)]
        for f in 0..types.len() {
            let mut next = BTreeSet::new();
            let mut total = 0usize;
            for &a in &tail {
                for j in of_type(f) {
                    if neighbor_oracle(&pts[a], &pts[j], r, t) {
                        total += 1;
                        next.insert(j);
                    }
                }
            }
            let ratio = if tail.is_empty() || in_space[f] == 0 {
                0.0
            } else {
                (total as f64 / tail.len() as f64 / vol_n) / (in_space[f] as f64 / vol)
            };
            let idx = index.min(ratio);
            let mut s = seq.clone();
            s.push(f);
            out.insert(s.iter().map(|&k| types[k].clone()).collect(), idx);
            stack.push((s, next.into_iter().collect(), idx));
        }
    }
    out
}

fn rms_diameter(ds: &EventDataset, members: &[usize], norm: &NormalizationParams) -> f64 {
    let m = members.len();
    if m < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            let (p, q) = (ds.point(i), ds.point(j));
            let mut d2 = ((p.time - q.time) / norm.temporal).powi(2);
            for k in 0..ds.dim() {
                d2 += ((p.loc[k] - q.loc[k]) / norm.spatial).powi(2);
            }
            sum += d2;
        }
    }
    (2.0 * sum / (m * (m - 1)) as f64).sqrt()
}

/// Partition, representative and diameter checks for an index.
fn index_violations(ds: &EventDataset, idx: &MicroclusterIndex, d: f64, cap: Option<usize>) -> Vec<String> {
    let norm = idx.params().norm;
    let mut errs = Vec::new();
    let mut seen = vec![0usize; ds.len()];
    for c in idx.clusters() {
        for &m in &c.members {
            seen[m] += 1;
            if ds.instances()[m].event_type != c.event_type {
                errs.push(format!("cid {} mixes types", c.cid));
            }
        }
        let n = c.members.len() as f64;
        for k in 0..ds.dim() {
            let mean = c.members.iter().map(|&m| ds.instances()[m].location[k]).sum::<f64>() / n;
            if (mean - c.rep_location[k]).abs() > 1e-9 * mean.abs().max(1.0) {
                errs.push(format!("cid {} rep axis {k}: {} vs {mean}", c.cid, c.rep_location[k]));
            }
        }
        let mean_t = c.members.iter().map(|&m| ds.instances()[m].time).sum::<f64>() / n;
        if (mean_t - c.rep_time).abs() > 1e-9 * mean_t.abs().max(1.0) {
            errs.push(format!("cid {} rep time", c.cid));
        }
        let diam = rms_diameter(ds, &c.members, &norm);
        if diam > d * (1.0 + 1e-9) {
            errs.push(format!("cid {} diameter {diam} > {d}", c.cid));
        }
        if let Some(k) = cap {
            if c.members.len() > k {
                errs.push(format!("cid {} count {} > {k}", c.cid, c.members.len()));
            }
        }
    }
    if let Some(i) = seen.iter().position(|&s| s != 1) {
        errs.push(format!("instance {i} covered {} times", seen[i]));
    }
    errs
}

// ---------------------------------------------------------------------------
// Random datasets

fn random_dataset(rng: &mut ChaCha8Rng, dim: usize, n: usize, n_types: usize, edge: f64, duration: f64) -> EventDataset {
    let types: Vec<String> = (0..n_types).map(|k| format!("T{k}")).collect();
    let mut instances = Vec::with_capacity(n);
    // A share of instances follow an earlier one closely so that some
    // ratios exceed 1.
    for i in 0..n {
        let ty = &types[rng.gen_range(0..n_types)];
        let (loc, time): (Vec<f64>, f64) = if i > 0 && rng.gen_bool(0.4) {
            let parent: &EventInstance = &instances[rng.gen_range(0..i)];
            let loc = parent.location.iter().map(|c| c + rng.gen_range(-8.0..8.0)).collect();
            (loc, parent.time + rng.gen_range(0.1..9.0))
        } else {
            ((0..dim).map(|_| rng.gen_range(0.0..edge)).collect(), rng.gen_range(0.0..duration))
        };
        instances.push(EventInstance::new(format!("i{i}"), ty.as_str(), &loc, time));
    }
    EventDataset::new(dim, types, instances, EmbeddingSpace::cube(dim, edge, duration + 10.0).unwrap()).unwrap()
}

fn pattern_map(ps: &[PatternResult]) -> BTreeMap<Vec<String>, f64> {
    ps.iter().map(|p| (p.types.clone(), p.index_value)).collect()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

// ---------------------------------------------------------------------------
// Criteria

fn c1_worked_example() -> Outcome {
    let start = Instant::now();
    let ds = worked_example();
    let cfg = MinerConfig::new(NeighborhoodParams::new(10.0, 10.0).unwrap(), 1.0, 20).unwrap();
    let expected: BTreeSet<String> = ["AB", "ABC", "ABCD", "BC", "BCD", "CD"].map(String::from).into();
    let names = |ps: &[PatternResult]| ps.iter().map(|p| p.types.concat()).collect::<BTreeSet<_>>();
    let base = names(&mine_baseline(&ds, cfg).unwrap().patterns);
    let idx = build_index(&ds, 20.0, NormalizationParams::IDENTITY).unwrap();
    let micro = names(&mine_micro(&ds, &idx, cfg).unwrap().patterns);
    let elapsed = start.elapsed();
    check(
        base == expected && micro == expected && elapsed < Duration::from_secs(1),
        format!("baseline {base:?}, micro {micro:?}, {elapsed:.2?}"),
    )
}

fn c2_join_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut pairs = 0usize;
    for case in 0..200 {
        let dim = 1 + case % 2;
        let n = rng.gen_range(1..=2000);
        let edge = rng.gen_range(20.0..500.0);
        let pts: Vec<StPoint> = (0..n)
            .map(|_| {
                let loc: Vec<f64> = (0..dim).map(|_| rng.gen_range(-edge..edge)).collect();
                StPoint::new(&loc, rng.gen_range(0.0..200.0))
            })
            .collect();
        let split = rng.gen_range(0..=n);
        let (anchors, targets) = pts.split_at(split);
        let params = NeighborhoodParams::new(rng.gen_range(1.0..40.0), rng.gen_range(0.5..20.0)).unwrap();
        let set = TargetSet::new(dim, targets.iter().copied().enumerate());
        let got = set.neighbors(anchors, &params, &mut SweepStats::default());
        for (a, row) in anchors.iter().zip(&got) {
            let want: Vec<usize> = (0..targets.len())
                .filter(|&j| neighbor_oracle(a, &targets[j], params.radius, params.interval))
                .collect();
            let mut row = row.clone();
            row.sort_unstable();
            pairs += want.len();
            if row != want {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        mismatches == 0 && elapsed < Duration::from_secs(60),
        format!("200 datasets, {pairs} neighbor pairs, {mismatches} mismatched anchors, {elapsed:.2?}"),
    )
}

fn c3_singleton_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut compared = 0;
    for case in 0..50 {
        let dim = 1 + case % 2;
        let n = rng.gen_range(2..=500);
        let n_types = rng.gen_range(2..=5);
        let ds = random_dataset(&mut rng, dim, n, n_types, 100.0, 100.0);
        let mut min_d = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let (p, q) = (ds.point(i), ds.point(j));
                let d2 = (0..dim).map(|k| (p.loc[k] - q.loc[k]).powi(2)).sum::<f64>() + (p.time - q.time).powi(2);
                min_d = min_d.min(d2.sqrt());
            }
        }
        let idx = build_index(&ds, min_d * 0.5, NormalizationParams::IDENTITY).unwrap();
        let theta = [0.5, 1.0, 2.0][case % 3];
        let cfg = MinerConfig::new(NeighborhoodParams::new(10.0, 10.0).unwrap(), theta, 5).unwrap();
        let base = pattern_map(&mine_baseline(&ds, cfg).unwrap().patterns);
        let micro = pattern_map(&mine_micro(&ds, &idx, cfg).unwrap().patterns);
        compared += base.len();
        let same_keys = base.keys().eq(micro.keys());
        let close = same_keys && base.iter().all(|(k, v)| rel_close(*v, micro[k], 1e-9));
        if idx.len() != n || !close {
            failures.push(format!("case {case}: index {} of {n}, {} vs {} patterns", idx.len(), base.len(), micro.len()));
        }
    }
    check(failures.is_empty(), format!("50 datasets, {compared} patterns compared {failures:?}"))
}

fn c4_pruning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut significant = 0;
    for case in 0..12 {
        let dim = 1 + case % 2;
        let n = rng.gen_range(20..=300);
        let n_types = rng.gen_range(2..=6);
        let ds = random_dataset(&mut rng, dim, n, n_types, 60.0, 60.0);
        let all = enumerate_all(&ds, 10.0, 10.0, 4);
        for theta in [0.5, 1.0, 2.0] {
            let cfg = MinerConfig::new(NeighborhoodParams::new(10.0, 10.0).unwrap(), theta, 4).unwrap();
            let mined = pattern_map(&mine_baseline(&ds, cfg).unwrap().patterns);
            // Indexes within rounding of θ may land on either side
            // depending on operation order; those may be reported or not.
            let tie = |v: f64| rel_close(v, theta, 1e-9);
            let want: BTreeMap<_, _> = all.iter().filter(|(_, &v)| v >= theta).map(|(k, v)| (k.clone(), *v)).collect();
            significant += want.len();
            let missing = want.iter().filter(|(k, v)| !mined.contains_key(*k) && !tie(**v)).count();
            let wrong = mined
                .iter()
                .filter(|(k, v)| match all.get(*k) {
                    Some(&o) => !rel_close(o, **v, 1e-9) || (o < theta && !tie(o)),
                    None => true,
                })
                .count();
            if missing + wrong > 0 {
                failures.push(format!("case {case} θ={theta}: {missing} missing, {wrong} wrong"));
            }
        }
    }
    check(failures.is_empty(), format!("36 runs, {significant} significant sequences {failures:?}"))
}

fn table4(ni: usize, ps: usize) -> GeneratorParams {
    GeneratorParams { ni, ps, ..GeneratorParams::default() }
}

fn c5_c6_compression() -> (Outcome, Outcome) {
    let start = Instant::now();
    let seeds: Vec<u64> = (0..5).collect();
    let sweep = |base: GeneratorParams, var: SweepVar, values: Vec<usize>| {
        let mut cfg = BenchmarkConfig::new(base, var, values);
        cfg.seeds = seeds.clone();
        run_benchmark(&cfg).unwrap()
    };
    let ni = sweep(table4(100, 5), SweepVar::Ni, vec![100, 160]);
    let ratio = |rep: &stseq::bench::BenchmarkReport, v: usize, d: f64| {
        rep.rows.iter().find(|r| r.value == v && r.diameter == d).unwrap().compression_ratio
    };
    let (a, b, c) = (ratio(&ni, 100, 40.0), ratio(&ni, 100, 100.0), ratio(&ni, 160, 100.0));
    let c5 = check(
        (a - 1.38).abs() <= 0.15 && (b - 2.25).abs() <= 0.25 && (c - 2.76).abs() <= 0.30 && start.elapsed() < Duration::from_secs(300),
        format!("Ni=100 d=40: {a:.3} (1.38±0.15), Ni=100 d=100: {b:.3} (2.25±0.25), Ni=160 d=100: {c:.3} (2.76±0.30), {:.2?}", start.elapsed()),
    );

    let mut violations = Vec::new();
    for v in [100, 160] {
        for &s in &seeds {
            let sizes: Vec<usize> = ni.runs.iter().filter(|r| r.value == v && r.seed == s).map(|r| r.index_size).collect();
            if sizes.windows(2).any(|w| w[1] > w[0]) {
                violations.push(format!("Ni={v} seed={s}: {sizes:?}"));
            }
        }
    }
    let ps = sweep(table4(100, 5), SweepVar::Ps, vec![2, 4, 6, 8, 10]);
    let by_ps: Vec<f64> = [2, 4, 6, 8, 10].iter().map(|&v| ratio(&ps, v, 100.0)).collect();
    let increasing = by_ps.windows(2).all(|w| w[1] > w[0]);
    let (lo, hi) = (by_ps[0], by_ps[4]);
    let c6 = check(
        violations.is_empty() && increasing && (lo - 1.52).abs() <= 0.2 * 1.52 && (hi - 3.33).abs() <= 0.2 * 3.33,
        format!("index sizes non-increasing in d {violations:?}; d=100 ratio by Ps 2..10: {by_ps:.3?} (1.52 and 3.33 ±20%)"),
    );
    (c5, c6)
}

fn c7_recovery() -> Outcome {
    let cfg = MinerConfig::new(NeighborhoodParams::new(10.0, 10.0).unwrap(), 1.0, 20).unwrap();
    let mut per_seed = Vec::new();
    for seed in 0..5 {
        let g = generate(&GeneratorParams { seed, ..table4(100, 5) }).unwrap();
        let idx = build_index(&g.dataset, 40.0, NormalizationParams::IDENTITY).unwrap();
        let out = mine_micro(&g.dataset, &idx, cfg).unwrap();
        per_seed.push(verify_planted(&out.patterns, &g.planted).maximal);
    }
    let mean = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
    check(mean >= 0.9, format!("maximal recovery per seed {per_seed:?}, mean {mean:.3} (≥ 0.9)"))
}

/// Weather-station style data: few distinct locations, each observed on
/// many days, so many instances share coordinates.
fn grid_dataset() -> EventDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut instances = Vec::new();
    for gx in 0..6 {
        for gy in 0..6 {
            for day in 0..400 {
                if rng.gen_bool(0.3) {
                    let ty = if rng.gen_bool(0.5) { "High" } else { "Low" };
                    let id = format!("g{}", instances.len());
                    instances.push(EventInstance::new(id, ty, &[gx as f64 * 25.0, gy as f64 * 25.0], (day / 4) as f64));
                }
            }
        }
    }
    EventDataset::from_instances(2, instances).unwrap()
}

fn c8_capped() -> Outcome {
    let ds = grid_dataset();
    let mut details = Vec::new();
    let mut errs = Vec::new();
    for k in [20, 100] {
        for d in [40.0, 100.0] {
            let idx = build_index_capped(&ds, d, k, NormalizationParams::IDENTITY).unwrap();
            let max = idx.clusters().iter().map(|c| c.count()).max().unwrap();
            details.push(format!("K={k} d={d}: {} clusters, largest {max}", idx.len()));
            errs.extend(index_violations(&ds, &idx, d, Some(k)));
        }
    }
    check(errs.is_empty(), format!("{} instances; {} {}", ds.len(), details.join("; "), errs.join(", ")))
}

fn c9_structure() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    let strategy = (any::<u64>(), 1usize..=2, 1usize..=200, 0.5f64..60.0, prop::option::of(1usize..30), prop::bool::ANY);
    let builds = std::cell::Cell::new(0);
    let result = runner.run(&strategy, |(seed, dim, n, d, cap, normalized)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = random_dataset(&mut rng, dim, n, 3, 200.0, 200.0);
        let norm = if normalized { NormalizationParams::new(20.0, 5.0).unwrap() } else { NormalizationParams::IDENTITY };
        let d = if normalized { d / 20.0 } else { d };
        let idx = match cap {
            Some(k) => build_index_capped(&ds, d, k, norm).unwrap(),
            None => build_index(&ds, d, norm).unwrap(),
        };
        builds.set(builds.get() + 1);
        let errs = index_violations(&ds, &idx, d, cap);
        prop_assert!(errs.is_empty(), "{:?}", errs);
        Ok(())
    });
    check(result.is_ok(), format!("{} random builds {}", builds.get(), result.err().map(|e| e.to_string()).unwrap_or_default()))
}

fn c10_speedup() -> Outcome {
    let g = generate(&table4(100, 5)).unwrap();
    let cfg = MinerConfig::new(NeighborhoodParams::new(10.0, 10.0).unwrap(), 1.0, 20).unwrap();
    let start = Instant::now();
    let idx = build_index(&g.dataset, 40.0, NormalizationParams::IDENTITY).unwrap();
    let micro = mine_micro(&g.dataset, &idx, cfg).unwrap();
    let t_micro = start.elapsed();
    let start = Instant::now();
    let base = mine_baseline(&g.dataset, cfg).unwrap();
    let t_base = start.elapsed();
    let speedup = t_base.as_secs_f64() / t_micro.as_secs_f64();
    check(
        speedup >= 5.0 && t_base + t_micro < Duration::from_secs(600),
        format!(
            "Ti={}: micro {t_micro:.2?} ({} patterns, index build included), baseline {t_base:.2?} ({} patterns), speedup {speedup:.1}x",
            g.dataset.len(),
            micro.patterns.len(),
            base.patterns.len()
        ),
    )
}

fn main() {
    // `cargo test -- --list` and filters are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let report = |name: &str, outcome: &Outcome| match outcome {
        Ok(detail) => println!("PASS criterion {name}: {detail}"),
        Err(detail) => println!("FAIL criterion {name}: {detail}"),
    };
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let singles: [Criterion; 4] = [
        ("1 worked example", c1_worked_example),
        ("2 join oracle", c2_join_oracle),
        ("3 singleton limit", c3_singleton_limit),
        ("4 pruning soundness", c4_pruning),
    ];
    for (name, f) in singles {
        results.push((name, f()));
        report(name, &results.last().unwrap().1);
    }
    let (c5, c6) = c5_c6_compression();
    report("5 compression ratios", &c5);
    report("6 monotone trends", &c6);
    results.push(("5 compression ratios", c5));
    results.push(("6 monotone trends", c6));
    let rest: [Criterion; 4] = [
        ("7 planted recovery", c7_recovery),
        ("8 capped index", c8_capped),
        ("9 microcluster structure", c9_structure),
        ("10 speedup", c10_speedup),
    ];
    for (name, f) in rest {
        results.push((name, f()));
        report(name, &results.last().unwrap().1);
    }
    let failed = results.iter().filter(|(_, o)| o.is_err()).count();
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
