//! The ten acceptance criteria. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

mod common;

use std::time::Instant;

use hellylab::compression::trials::{run_scheme_trials, SchemeKind, TrialSettings};
use hellylab::compression::{block_family, generalization_bound};
use hellylab::concept_class::{generate_class, ClassFamily, LabeledSample};
use hellylab::learners::{algorithm_a, algorithm_a_erm, Erm};
use hellylab::parameters::{
    dual_helly_number, hollow_star_number, projection_check, star_number, vc_dimension,
    ProjectionVerdict, SearchCaps, StarNumber,
};
use hellylab::simulation::{
    coupon_collector, hollow_star_experiment, svm_bench, trial_rng, SvmBenchConfig,
};
use hellylab::svm::hard_margin_svm;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn grid(n: usize) -> Vec<f64> {
    (1..=n).map(|v| v as f64).collect()
}

fn no_three_collinear(points: &[Vec<f64>]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&points[i], &points[j], &points[k]);
                let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
                if cross.abs() < 1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

fn criterion_1() -> Outcome {
    let caps = SearchCaps::default();
    let start = Instant::now();
    let iv = generate_class(&ClassFamily::Intervals {
        grid: grid(8),
        include_empty: true,
    })
    .map_err(e2s)?;
    let (d, ko, kw) = (
        vc_dimension(&iv, &caps).map_err(e2s)?,
        hollow_star_number(&iv, &caps).map_err(e2s)?,
        dual_helly_number(&iv, &caps).map_err(e2s)?,
    );
    ensure((d, ko, kw) == (2, 3, 3), || {
        format!("intervals: d={d} k_o={ko} k_w={kw}")
    })?;

    let s8 = generate_class(&ClassFamily::Singletons {
        n: 8,
        augment_all_negative: false,
    })
    .map_err(e2s)?;
    let (ko, kw) = (
        hollow_star_number(&s8, &caps).map_err(e2s)?,
        dual_helly_number(&s8, &caps).map_err(e2s)?,
    );
    ensure((ko, kw) == (8, 8), || {
        format!("singletons: k_o={ko} k_w={kw}")
    })?;
    let s8a = generate_class(&ClassFamily::Singletons {
        n: 8,
        augment_all_negative: true,
    })
    .map_err(e2s)?;
    let kw = dual_helly_number(&s8a, &caps).map_err(e2s)?;
    ensure(kw == 2, || format!("augmented singletons: k_w={kw}"))?;

    let th = generate_class(&ClassFamily::Thresholds {
        grid: grid(8),
        augment_all_negative: true,
    })
    .map_err(e2s)?;
    let kw = dual_helly_number(&th, &caps).map_err(e2s)?;
    ensure(kw == 2, || format!("thresholds: k_w={kw}"))?;
    let verdict = projection_check(&th, 2, 500, 1, &caps).map_err(e2s)?;
    ensure(!verdict.is_refuted(), || {
        format!("thresholds refuted at k=2: {verdict:?}")
    })?;

    let pts = vec![
        vec![0.0, 0.0],
        vec![6.0, 0.0],
        vec![0.0, 6.0],
        vec![2.0, 2.0],
        vec![5.0, 4.0],
        vec![-1.0, 3.0],
        vec![3.0, -2.0],
    ];
    ensure(no_three_collinear(&pts), || {
        "configuration has collinear triple".into()
    })?;
    let hs = generate_class(&ClassFamily::HalfspaceDichotomies { points: pts }).map_err(e2s)?;
    let (d, ko, kw) = (
        vc_dimension(&hs, &caps).map_err(e2s)?,
        hollow_star_number(&hs, &caps).map_err(e2s)?,
        dual_helly_number(&hs, &caps).map_err(e2s)?,
    );
    ensure((d, ko, kw) == (3, 4, 4), || {
        format!("halfspaces: d={d} k_o={ko} k_w={kw}")
    })?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("all five classes exact in {secs:.2}s"))
}

fn criterion_2() -> Outcome {
    let caps = SearchCaps::default();
    let mut rng = trial_rng(2024, 0);
    let mut tested = 0;
    let mut refuted_checks = 0;
    while tested < 60 {
        let points = rng.gen_range(3..=8);
        let hyps = rng.gen_range(3..=16usize.min(1 << points));
        let Some(class) = common::random_class(&mut rng, points, hyps) else {
            continue;
        };
        let ko = hollow_star_number(&class, &caps).map_err(e2s)?;
        let kw = dual_helly_number(&class, &caps).map_err(e2s)?;
        ensure(ko == kw, || format!("class {tested}: k_o={ko} k_w={kw}"))?;
        let star = match star_number(&class, &caps, points + 1).map_err(e2s)? {
            StarNumber::Exact(s) => s,
            StarNumber::CapExceeded { cap } => return Err(format!("star cap {cap} exceeded")),
        };
        ensure(ko - 1 <= star, || {
            format!("class {tested}: k_o={ko} star={star}")
        })?;
        let at_kw = projection_check(&class, kw, 200, tested as u64, &caps).map_err(e2s)?;
        ensure(!at_kw.is_refuted(), || {
            format!("class {tested}: refuted at k_w: {at_kw:?}")
        })?;
        if ko >= 3 {
            match projection_check(&class, ko - 1, 0, 0, &caps).map_err(e2s)? {
                ProjectionVerdict::Refuted {
                    from_hollow_star: true,
                    ..
                } => refuted_checks += 1,
                other => return Err(format!("class {tested}: k_o - 1 not refuted: {other:?}")),
            }
        }
        tested += 1;
    }
    Ok(format!(
        "{tested} random classes, {refuted_checks} hollow-star refutations"
    ))
}

fn criterion_3() -> Outcome {
    let mut report = Vec::new();
    for (d, kw) in [(1, 4), (2, 4), (2, 5), (3, 6)] {
        let class = generate_class(&ClassFamily::Hard { d, k_w: kw }).map_err(e2s)?;
        let caps = SearchCaps::with_points(class.domain_size());
        let vc = vc_dimension(&class, &caps).map_err(e2s)?;
        let dh = dual_helly_number(&class, &caps).map_err(e2s)?;
        ensure((vc, dh) == (d, kw), || {
            format!("hard({d},{kw}): vc={vc} k_w={dh}")
        })?;
        report.push(format!("({d},{kw})"));
    }
    Ok(format!("VC and dual Helly exact for {}", report.join(" ")))
}

fn criterion_4() -> Outcome {
    let caps = SearchCaps::default();
    let classes = vec![
        generate_class(&ClassFamily::Thresholds {
            grid: grid(10),
            augment_all_negative: true,
        }),
        generate_class(&ClassFamily::Intervals {
            grid: grid(7),
            include_empty: true,
        }),
        generate_class(&ClassFamily::Hard { d: 2, k_w: 4 }),
        generate_class(&ClassFamily::Singletons {
            n: 6,
            augment_all_negative: true,
        }),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(e2s)?;
    let ks: Vec<usize> = classes
        .iter()
        .map(|c| dual_helly_number(c, &caps).map(|k| k.max(2)))
        .collect::<Result<_, _>>()
        .map_err(e2s)?;
    for run in 0..1000u64 {
        let mut rng = trial_rng(4, run);
        let ci = (run % classes.len() as u64) as usize;
        let (class, k) = (&classes[ci], ks[ci]);
        let target = rng.gen_range(0..class.len());
        let s_len = rng.gen_range(0..=40);
        let t_len = rng.gen_range(0..=5);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng, len: usize| -> Vec<usize> {
            (0..len)
                .map(|_| rng.gen_range(0..class.domain_size()))
                .collect()
        };
        let s = LabeledSample::labeled_by(class, target, &draw(&mut rng, s_len));
        let t = LabeledSample::labeled_by(class, target, &draw(&mut rng, t_len));
        let seed: u64 = rng.gen();
        let a =
            algorithm_a(class, &s, &t, k, seed).map_err(|e| format!("run {run}: A failed: {e}"))?;
        ensure(a < class.len() && class.agrees(a, &t), || {
            format!("run {run}: A wrong on T")
        })?;
        let again = algorithm_a(class, &s, &t, k, seed).map_err(e2s)?;
        ensure(a == again, || format!("run {run}: A not reproducible"))?;
        // A_ERM recurses on k + 1 samples only slightly smaller than S, so
        // its cost grows like |S|^(k log k); keep its samples moderate.
        let s_erm = LabeledSample::new(s.entries()[..s.len().min(24)].to_vec());
        let b = algorithm_a_erm(class, &s_erm, k)
            .map_err(|e| format!("run {run}: A_ERM failed: {e}"))?;
        ensure(b < class.len() && class.agrees(b, &s_erm), || {
            format!("run {run}: A_ERM inconsistent")
        })?;
        ensure(b == algorithm_a_erm(class, &s_erm, k).map_err(e2s)?, || {
            format!("run {run}: A_ERM not deterministic")
        })?;
    }
    Ok("1000 runs: A correct on T, A_ERM consistent on S, both reproducible".into())
}

fn criterion_5() -> Outcome {
    let settings = TrialSettings::default();
    let mut parts = Vec::new();
    for (kind, l) in [
        (SchemeKind::Singleton, 1),
        (SchemeKind::Closure, 2),
        (SchemeKind::Svm, settings.svm_dim + 1),
    ] {
        let s = run_scheme_trials(kind, 1000, 5, &settings).map_err(e2s)?;
        ensure(s.declared_size == l, || {
            format!("{kind:?}: declared size {}", s.declared_size)
        })?;
        ensure(s.all_pass(), || format!("{kind:?}: {s:?}"))?;
        parts.push(format!("{kind:?} max|kappa|={}<= {l}", s.max_kappa_size));
    }
    Ok(format!("1000 samples each: {}", parts.join(", ")))
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn for_each_subset(m: usize, size: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        start: usize,
        m: usize,
        left: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if left == 0 {
            return f(cur);
        }
        for i in start..=m - left {
            cur.push(i);
            let ok = rec(i + 1, m, left - 1, cur, f);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    rec(0, m, size, &mut Vec::new(), f)
}

fn criterion_6() -> Outcome {
    let mut cases = 0;
    for m in 4..=40 {
        for l in 1..=4 {
            if 2 * l > m {
                continue;
            }
            let f = block_family(m, l).map_err(e2s)?;
            ensure(f.t_m == l * (m / (2 * l)), || {
                format!("m={m} l={l}: T_m={}", f.t_m)
            })?;
            ensure(f.family.len() == binom(2 * l, l), || {
                format!("m={m} l={l}: |family|={}", f.family.len())
            })?;
            ensure(f.family.iter().all(|mem| mem.len() <= m - f.t_m), || {
                format!("m={m} l={l}: property (i) fails")
            })?;
            let covered = for_each_subset(m, l, &mut |idx| {
                f.family
                    .iter()
                    .any(|mem| idx.iter().all(|i| mem.contains(i)))
            });
            ensure(covered, || format!("m={m} l={l}: property (ii) fails"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (m, l) pairs verified exhaustively"))
}

fn criterion_7() -> Outcome {
    let bound = generalization_bound(3, 300, 0.05).map_err(e2s)?;
    ensure((bound - 0.048671).abs() <= 1e-6, || {
        format!("bound {bound}")
    })?;
    let r = svm_bench(&SvmBenchConfig {
        dimension: 2,
        support_size: 200,
        m: 300,
        delta: 0.05,
        trials: 2000,
        seed: 7,
    })
    .map_err(e2s)?;
    ensure(r.wilson_95.1 <= 0.05, || {
        format!("exceed upper {} > 0.05", r.wilson_95.1)
    })?;
    Ok(format!(
        "bound={:.6}, exceed {}/2000, Wilson upper {:.4}, mean error {:.4}",
        r.bound, r.exceed_count, r.wilson_95.1, r.mean_error
    ))
}

fn criterion_8() -> Outcome {
    let r = hollow_star_experiment(32, 1.0 / 32.0, 13, 2000, 8, &Erm).map_err(e2s)?;
    ensure(r.failure_rate >= 0.15, || {
        format!("failure rate {}", r.failure_rate)
    })?;
    Ok(format!(
        "ERM failure rate {:.4} (Wilson {:.4}..{:.4})",
        r.failure_rate, r.wilson_95.0, r.wilson_95.1
    ))
}

fn criterion_9() -> Outcome {
    let r = coupon_collector(100, 10, 4000, 9).map_err(e2s)?;
    ensure(r.median >= 85.537, || {
        format!("median {} below bound {}", r.median, r.lemma_bound)
    })?;
    Ok(format!(
        "median Z = {}, bound = {:.3}",
        r.median, r.lemma_bound
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = trial_rng(10, 0);
    let mut removals = 0;
    for inst in 0..200 {
        let dim = if inst % 2 == 0 { 2 } else { 3 };
        let count = rng.gen_range(2..=8);
        let (pts, labels) = common::random_separable(&mut rng, count, dim, 1e-3);
        let sol = hard_margin_svm(&pts, &labels).map_err(|e| format!("instance {inst}: {e}"))?;
        let (_, _, oracle) = common::brute_force_svm(&pts, &labels)
            .ok_or(format!("instance {inst}: oracle found nothing"))?;
        let rel = (sol.margin - oracle).abs() / oracle;
        ensure(rel <= 1e-6, || {
            format!("instance {inst}: margin {} vs {oracle}", sol.margin)
        })?;
        for drop in (0..count).filter(|i| !sol.support_indices.contains(i)) {
            let keep: Vec<usize> = (0..count).filter(|&i| i != drop).collect();
            let p2: Vec<Vec<f64>> = keep.iter().map(|&i| pts[i].clone()).collect();
            let l2: Vec<_> = keep.iter().map(|&i| labels[i]).collect();
            let s2 = hard_margin_svm(&p2, &l2).map_err(e2s)?;
            let same = s2
                .hypothesis
                .weights
                .iter()
                .zip(&sol.hypothesis.weights)
                .all(|(a, b)| (a - b).abs() <= 1e-6)
                && (s2.hypothesis.threshold - sol.hypothesis.threshold).abs() <= 1e-6
                && (s2.margin - sol.margin).abs() <= 1e-6 * sol.margin;
            ensure(same, || {
                format!("instance {inst}: removing {drop} changed the solution")
            })?;
            removals += 1;
        }
    }
    Ok(format!(
        "200 instances match the active-set optimum; {removals} non-support removals stable"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("parameter exactness on named classes", criterion_1),
        (
            "hollow star equals dual Helly on random classes",
            criterion_2,
        ),
        ("hard class VC and dual Helly", criterion_3),
        ("recursive learner invariants", criterion_4),
        ("compression validity and stability", criterion_5),
        ("block family properties", criterion_6),
        ("SVM compression bound benchmark", criterion_7),
        ("hollow star failure floor", criterion_8),
        ("coupon collector median", criterion_9),
        ("SVM solver certification", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:6.2}s] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:6.2}s] {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
