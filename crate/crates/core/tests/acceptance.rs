//! Acceptance gate. Runs every criterion, prints one line each, and exits
//! nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use projclass_core::classify::{self, Bound, Certificate, Classification, Label};
use projclass_core::endo::{self, DEFAULT_ENTRY_CAP};
use projclass_core::family::{FiniteFamily, IndexSet, ProjectionFamily, TailRule};
use projclass_core::hall::{self, BipartiteIncidence};
use projclass_core::oracle::{self, CaseOutcome};

const RANDOM_SEED: u64 = 0x5eed_2024;
const RANDOM_CASES: usize = 1_000;
const RANDOM_MAX_SETS: usize = 12;
const RANDOM_MAX_GROUND: usize = 10;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn corpus() -> Vec<FiniteFamily> {
    // Every list of up to 4 subsets of {1..4}; contains all 15^4 = 50,625
    // lists of four nonempty subsets.
    let mut all: Vec<FiniteFamily> = oracle::exhaustive_families(4, 4).collect();
    all.extend(oracle::random_families(RANDOM_CASES, RANDOM_MAX_SETS, RANDOM_MAX_GROUND, RANDOM_SEED));
    all
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let tri = ProjectionFamily::triangular();
    for m in 1..=8usize {
        let expected = m * (m - 1) / 2 + 1;
        let got = classify::compute_n(&tri, m).map_err(|e| e.to_string())?;
        check(got == Bound::Finite(expected), || format!("N({m}) = {got:?}, expected {expected}"))?;

        let attained = [m - 1, m].into_iter().any(|size| {
            let w = tri.window(size).expect("infinite family");
            let positions: Vec<usize> = (1..=size).collect();
            m * size == w.union_of(&positions).len() + (expected - 1)
        });
        check(attained, || format!("N({m}) - 1 not attained at |F| in {{m-1, m}}"))?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("N(m) = m(m-1)/2 + 1 for m = 1..8, minimal, in {:?}", start.elapsed()))
}

fn criterion_2(corpus: &[FiniteFamily]) -> Outcome {
    let start = Instant::now();
    let mut bad = 0;
    for fam in corpus {
        let size = hall::max_matching(&BipartiteIncidence::from_family(fam)).size;
        if size != fam.len() - oracle::brute_max_surplus(fam, 1) {
            bad += 1;
        }
    }
    check(bad == 0, || format!("{bad} defect-identity disagreements"))?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("defect identity on {} families, 0 disagreements, in {:?}", corpus.len(), start.elapsed()))
}

fn criterion_3(corpus: &[FiniteFamily]) -> Outcome {
    let mut equivalence_bad = 0;
    let mut permanent_checked = 0;
    let mut permanent_bad = 0;
    for fam in corpus {
        let out = CaseOutcome::evaluate(fam);
        equivalence_bad += !out.equivalence_ok() as usize;
        if let Some(p) = &out.permanent {
            permanent_checked += 1;
            permanent_bad += (*p != out.sdr_count) as usize;
        }
    }
    check(equivalence_bad == 0, || format!("{equivalence_bad} equivalence disagreements"))?;
    check(permanent_bad == 0, || format!("{permanent_bad} permanent mismatches"))?;
    check(permanent_checked > 0, || "no permanent comparisons ran".into())?;
    Ok(format!(
        "sdr_exists <=> euler != 0 <=> sdr_count > 0 on {} families, permanent checked on {permanent_checked}",
        corpus.len()
    ))
}

fn unbounded_samples(c: &Classification) -> Option<&[(usize, usize)]> {
    match &c.certificate {
        Certificate::Unbounded { surplus_samples, .. } => Some(surplus_samples),
        _ => None,
    }
}

fn same_up_to_permutation(a: &Classification, b: &Classification, perm: &[usize]) -> bool {
    match (&a.certificate, &b.certificate) {
        (Certificate::NTable { n_table: ta, k: ka, f0: fa }, Certificate::NTable { n_table: tb, k: kb, f0: fb }) => {
            // position p of the permuted prefix holds original position perm[p-1]+1
            let mapped: BTreeSet<usize> =
                fb.iter().map(|&p| if p <= perm.len() { perm[p - 1] + 1 } else { p }).collect();
            a.label == b.label && ta == tb && ka == kb && mapped == fa.iter().copied().collect()
        }
        _ => a == b,
    }
}

fn criterion_4() -> Outcome {
    let classify = |f: &ProjectionFamily| classify::classify(f, 6).map_err(|e| e.to_string());

    let tri = classify(&ProjectionFamily::triangular())?;
    check(tri.label == Label::NonFullStablyFinite, || "triangular family not classified non-full".into())?;

    let singles = ProjectionFamily::with_blocks(vec![], 0, 1, 1).map_err(|e| e.to_string())?;
    let constant = ProjectionFamily::new(vec![], TailRule::Constant(IndexSet::from([1]))).map_err(|e| e.to_string())?;
    for (name, fam) in [("I_j = {j}", &singles), ("constant {1}", &constant)] {
        let c = classify(fam)?;
        check(c.label == Label::FullStablyProperlyInfinite, || format!("{name} not classified full"))?;
        let samples = unbounded_samples(&c).ok_or_else(|| format!("{name}: missing unboundedness certificate"))?;
        let ts: Vec<usize> = samples.iter().map(|s| s.0).collect();
        check(ts == (1..=10).collect::<Vec<_>>(), || format!("{name}: samples over windows {ts:?}"))?;
        check(samples.windows(2).all(|w| w[0].1 < w[1].1), || format!("{name}: samples {samples:?} not increasing"))?;
    }

    let with_prefix = |tail: TailRule| {
        let prefix = [&[1u64][..], &[1], &[2, 3], &[2], &[3], &[4, 5, 6]];
        ProjectionFamily::new(prefix.iter().map(|s| s.iter().copied().collect()).collect(), tail)
    };
    let block_tail = |a, b| TailRule::DisjointBlocks {
        sizes: projclass_core::family::BlockSizes { a, b },
        start: 10,
        stride: 1,
    };
    let families = [
        ProjectionFamily::triangular(),
        singles.clone(),
        constant.clone(),
        with_prefix(block_tail(1, 0)).map_err(|e| e.to_string())?,
        with_prefix(block_tail(2, 1)).map_err(|e| e.to_string())?,
        with_prefix(block_tail(0, 2)).map_err(|e| e.to_string())?,
        with_prefix(TailRule::Constant(IndexSet::from([7, 8]))).map_err(|e| e.to_string())?,
        with_prefix(TailRule::None).map_err(|e| e.to_string())?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let mut permutations = 0;
    for fam in &families {
        let base = classify(fam)?;
        check(classify(&fam.reindex_to_odd())? == base, || format!("reindexing changed classification of {fam:?}"))?;
        if fam.prefix().is_empty() {
            continue;
        }
        for _ in 0..100 {
            let mut perm: Vec<usize> = (0..fam.prefix().len()).collect();
            perm.shuffle(&mut rng);
            let permuted = classify(&fam.permute_prefix(&perm))?;
            check(same_up_to_permutation(&base, &permuted, &perm), || {
                format!("prefix permutation {perm:?} changed classification of {fam:?}")
            })?;
            permutations += 1;
        }
    }
    Ok(format!(
        "dichotomy holds; invariant under odd reindexing ({} families) and {permutations} prefix permutations",
        families.len()
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let doubled = ProjectionFamily::with_blocks(vec![IndexSet::from([1]), IndexSet::from([1])], 1, 0, 2)
        .map_err(|e| e.to_string())?;
    let doubled_tight = classify::find_tight_set(&doubled).map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (fam, expected_k, min_depth) in [(ProjectionFamily::triangular(), 0, 0), (doubled.clone(), 1, 1)] {
        let k = classify::max_trivial_multiplicity(&fam).map_err(|e| e.to_string())?;
        check(k == Bound::Finite(expected_k), || format!("k = {k:?}, expected {expected_k}"))?;
        let tight = classify::find_tight_set(&fam).map_err(|e| e.to_string())?;
        for depth in min_depth..=3 {
            for window in 0..=2 {
                for t in 1..=6 {
                    let ctx = || format!("k={expected_k} depth={depth} w={window} t={t}");
                    let gamma = endo::gamma_iterate(&fam, t, window, depth, expected_k, DEFAULT_ENTRY_CAP)
                        .map_err(|e| format!("{}: {e}", ctx()))?;
                    let trans =
                        endo::build_transversal(&gamma, &fam, expected_k, &tight).map_err(|e| format!("{}: {e}", ctx()))?;
                    check(endo::verify_transversal(&gamma, &trans), || format!("{}: transversal invalid", ctx()))?;
                    check(endo::hall_check_gamma(&gamma), || format!("{}: matching finds Hall violation", ctx()))?;
                    runs += 1;
                }
            }
        }
    }
    // With k = 1 the undisturbed family already contains g, so its depth-0
    // layer must fail Hall exactly when the window has no SDR.
    let mut depth0 = 0;
    for window in 0..=2 {
        for t in 1..=6 {
            let gamma = endo::gamma_iterate(&doubled, t, window, 0, 1, DEFAULT_ENTRY_CAP).map_err(|e| e.to_string())?;
            let sdr = hall::sdr_exists(&doubled.window(t).expect("infinite family"));
            check(endo::hall_check_gamma(&gamma) == sdr, || format!("k=1 depth=0 w={window} t={t}: Hall check disagrees"))?;
            check(endo::build_transversal(&gamma, &doubled, 1, &doubled_tight).is_ok() == sdr, || {
                format!("k=1 depth=0 w={window} t={t}: transversal disagrees with sdr_exists")
            })?;
            depth0 += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{runs} simulations: transversal and independent matching agree; {depth0} k=1 depth-0 layers match sdr_exists; in {:?}",
        start.elapsed()
    ))
}

fn criterion_6() -> Outcome {
    let rows = classify::minorization_pattern(&ProjectionFamily::triangular(), 4, classify::DEFAULT_L_BOUND)
        .map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for row in &rows {
        check(row.blocked_at_m, || format!("N({})·g is below {}·Q", row.m, row.m))?;
        check(row.l > row.m, || format!("l = {} not above m = {}", row.l, row.m))?;
        check(row.witness.max_surplus >= row.n_of_m, || format!("witness for m={} too weak", row.m))?;
        summary.push(format!("m={}:N={},l={}", row.m, row.n_of_m, row.l));
    }
    check(rows.len() == 4, || "missing rows".into())?;
    Ok(summary.join(" "))
}

fn main() -> ExitCode {
    let corpus = corpus();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 N(m) formula and minimality", criterion_1()),
        ("2 defect-formula equivalence", criterion_2(&corpus)),
        ("3 triple-oracle agreement", criterion_3(&corpus)),
        ("4 classifier dichotomy and invariance", criterion_4()),
        ("5 endomorphism simulation", criterion_5()),
        ("6 minorization gap pattern", criterion_6()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {name}: {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: {} of {} criteria passed", results.len(), results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", results.len());
        ExitCode::FAILURE
    }
}
