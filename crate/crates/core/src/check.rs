//! Seeded property suites cross-checking every decision procedure against
//! its oracle or against the structural theorem it relies on.
//!
//! Every trial draws from its own ChaCha stream keyed by (seed, suite,
//! trial), so suites are reproducible and trials can run in any order.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ballean::{
    ball_preserving_bijection, enumerate_balls, hasse_diagram, hasse_digraph_iso, verify_ball_preserving,
    verify_digraph_iso, HasseDiagram,
};
use crate::canon::{canon_code_labeled, canon_code_unlabeled};
use crate::classification::{adversarial_relabeling, shape_classes, witness_from_unlabeled_iso, UnlabeledIsoOutcome};
use crate::diametrical::{diametrical_graph, multipartite_parts};
use crate::error::{Error, Result};
use crate::generators::{
    integer_pool, oracle_ball_preserving, oracle_isometry, oracle_weak_similarity, point_names, random_labels,
    random_semimetric_with, random_shape, ShapeClass, ORACLE_BALL_LIMIT, ORACLE_ISOMETRY_LIMIT,
};
use crate::parallel::{map_trials, Exec};
use crate::rational::Rational;
use crate::similarity::{decide_isometry, decide_weak_similarity, verify_isometry, verify_weak_similarity};
use crate::space::{SemimetricSpace, Spectrum};
use crate::tree::{build_tree, space_from_tree, strip_labels, RepTree};

pub const SUITES: [SuiteInfo; 10] = [
    SuiteInfo::new(1, "roundtrip", 500, 12),
    SuiteInfo::new(2, "multipartite", 500, 12),
    SuiteInfo::new(3, "isometry", 200, 7),
    SuiteInfo::new(4, "weak-similarity", 200, 6),
    SuiteInfo::new(5, "unlabeled-iso-rtilde", 100, 10),
    SuiteInfo::new(6, "unlabeled-iso-dt", 100, 10),
    SuiteInfo::new(7, "hasse-weak-similarity", 200, 6),
    SuiteInfo::new(8, "ball-preserving", 150, 6),
    SuiteInfo::new(9, "ball-preserving-corollaries", 200, 6),
    SuiteInfo::new(10, "hasse-tree-shape", 500, 12),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteInfo {
    pub id: u8,
    pub name: &'static str,
    pub default_trials: usize,
    pub default_max_n: usize,
}

impl SuiteInfo {
    const fn new(id: u8, name: &'static str, default_trials: usize, default_max_n: usize) -> Self {
        SuiteInfo {
            id,
            name,
            default_trials,
            default_max_n,
        }
    }

    pub fn by_id(id: u8) -> Option<SuiteInfo> {
        SUITES.iter().copied().find(|s| s.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Trials {
    #[default]
    Default,
    Count(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    pub seed: u64,
    pub trials: Trials,
    pub max_n: Option<usize>,
    pub exec: Exec,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0,
            trials: Trials::Default,
            max_n: None,
            exec: Exec::default(),
        }
    }
}

impl CheckConfig {
    fn trials(&self, info: &SuiteInfo) -> usize {
        match self.trials {
            Trials::Default => info.default_trials,
            Trials::Count(n) => n,
        }
    }

    fn max_n(&self, info: &SuiteInfo, limit: Option<usize>) -> usize {
        let n = self.max_n.unwrap_or(info.default_max_n).max(1);
        limit.map_or(n, |l| n.min(l))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub id: u8,
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
    /// Trials that do not apply (e.g. a one-point space has no diametrical
    /// graph, or a pair that is not weakly similar in the Hasse suite).
    pub skipped: usize,
    pub failed: usize,
    /// Trials whose decision came out positive, to show both outcomes occur.
    pub positives: usize,
    pub failures: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

const MAX_REPORTED_FAILURES: usize = 10;

enum Outcome {
    Pass { positive: bool },
    Skip,
    Fail(String),
}

fn pass(positive: bool) -> Result<Outcome> {
    Ok(Outcome::Pass { positive })
}

fn fail(msg: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Fail(msg.into()))
}

fn trial_rng(seed: u64, stream: u8, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(stream) << 32) | trial as u64);
    rng
}

/// Runs the given suites in order.
pub fn run_check(config: &CheckConfig, ids: &[u8]) -> Result<CheckReport> {
    let suites = ids
        .iter()
        .map(|&id| run_suite(id, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport {
        seed: config.seed,
        passed: suites.iter().all(SuiteReport::ok),
        suites,
    })
}

pub fn run_suite(id: u8, config: &CheckConfig) -> Result<SuiteReport> {
    let info = SuiteInfo::by_id(id).ok_or_else(|| Error::Inapplicable(format!("no suite numbered {id}")))?;
    let trials = config.trials(&info);
    let seed = config.seed;
    let start = Instant::now();
    let outcomes: Vec<(usize, Result<Outcome>)> = match id {
        1 => {
            let max_n = config.max_n(&info, None);
            run(config.exec, trials, |i| roundtrip(seed, i, max_n))
        }
        2 => {
            let max_n = config.max_n(&info, None);
            run(config.exec, trials, |i| multipartite(seed, i, max_n))
        }
        3 => {
            let max_n = config.max_n(&info, Some(ORACLE_ISOMETRY_LIMIT));
            run(config.exec, trials, |i| isometry(seed, i, max_n))
        }
        4 => {
            let max_n = config.max_n(&info, Some(ORACLE_ISOMETRY_LIMIT));
            run(config.exec, trials, |i| weak_similarity(seed, i, max_n))
        }
        5 => {
            let max_n = config.max_n(&info, None);
            run(config.exec, trials, |i| unlabeled_iso_rtilde(seed, i, max_n))
        }
        6 => {
            let max_n = config.max_n(&info, None);
            run(config.exec, trials, |i| unlabeled_iso_dt(seed, i, max_n))
        }
        7 => {
            let max_n = config.max_n(&info, Some(ORACLE_ISOMETRY_LIMIT));
            run(config.exec, trials, |i| hasse_of_weak_similarity(seed, i, max_n))
        }
        8 => {
            let max_n = config.max_n(&info, Some(ORACLE_BALL_LIMIT));
            run(config.exec, trials, |i| ball_preserving(seed, i, max_n))
        }
        9 => {
            let max_n = config.max_n(&info, Some(ORACLE_ISOMETRY_LIMIT));
            run(config.exec, trials, |i| corollaries(seed, i, max_n))
        }
        10 => {
            let max_n = config.max_n(&info, None);
            // the extra last trial is the fixed non-ultrametric example
            run(config.exec, trials + 1, |i| {
                if i == trials {
                    hasse_of_s3()
                } else {
                    hasse_tree_shape(seed, i, max_n)
                }
            })
        }
        _ => unreachable!("suite ids are checked above"),
    };
    let mut report = SuiteReport {
        id,
        name: info.name,
        trials: outcomes.len(),
        passed: 0,
        skipped: 0,
        failed: 0,
        positives: 0,
        failures: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for (i, outcome) in outcomes {
        let outcome = outcome.unwrap_or_else(|e| Outcome::Fail(format!("error: {e}")));
        match outcome {
            Outcome::Pass { positive } => {
                report.passed += 1;
                report.positives += usize::from(positive);
            }
            Outcome::Skip => report.skipped += 1,
            Outcome::Fail(msg) => {
                report.failed += 1;
                if report.failures.len() < MAX_REPORTED_FAILURES {
                    report.failures.push(format!("trial {i}: {msg}"));
                }
            }
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

fn run<F>(exec: Exec, trials: usize, f: F) -> Vec<(usize, Result<Outcome>)>
where
    F: Fn(usize) -> Result<Outcome> + Sync + Send,
{
    map_trials(exec, trials, |i| (i, f(i)))
}

// ---- instance construction ------------------------------------------------

fn any_class(rng: &mut impl Rng) -> ShapeClass {
    [
        ShapeClass::Any,
        ShapeClass::Any,
        ShapeClass::T,
        ShapeClass::RTilde,
        ShapeClass::R,
    ][rng.random_range(0..5)]
}

/// A random labeling of `shape`, from a small pool (to provoke repeated
/// labels and coincidences) or a roomy one; falls back to the roomy pool
/// when the small one cannot fit the tree.
fn label_randomly(shape: &crate::tree::Shape, injective: bool, rng: &mut impl Rng) -> Result<RepTree> {
    let n = shape.leaf_count().max(1) as i64;
    let roomy = integer_pool(1..=2 * n);
    let pool = if rng.random_bool(0.5) {
        integer_pool(1..=rng.random_range(1..=n))
    } else {
        roomy.clone()
    };
    match random_labels(shape, &pool, injective, rng) {
        Err(Error::InfeasibleConstraints(_)) => random_labels(shape, &roomy, injective, rng),
        other => other,
    }
}

fn random_ultra(n: usize, class: ShapeClass, injective: bool, rng: &mut impl Rng) -> Result<SemimetricSpace> {
    let shape = random_shape(&point_names("x", n), class, rng);
    space_from_tree(&label_randomly(&shape, injective, rng)?)
}

/// Same unlabeled tree as `x`, fresh random labels.
fn same_shape_relabel(x: &SemimetricSpace, rng: &mut impl Rng) -> Result<SemimetricSpace> {
    let shape = strip_labels(&build_tree(x)?);
    space_from_tree(&label_randomly(&shape, false, rng)?)
}

/// The same space with points renamed to `y1, y2, ...` in shuffled order
/// and listed in name order.
fn disguise(x: &SemimetricSpace, rng: &mut impl Rng) -> Result<SemimetricSpace> {
    let names = point_names("y", x.len());
    let mut shuffled = names.clone();
    shuffled.shuffle(rng);
    x.with_points(shuffled)?.reordered(&names)
}

/// A random spectrum with `len` values, positive ones drawn from multiples
/// of `1/d` for a random small `d`.
fn random_spectrum(len: usize, rng: &mut impl Rng) -> Result<Spectrum> {
    let denom = rng.random_range(1..=3);
    let mut picks = rand::seq::index::sample(rng, 10 * len, len - 1).into_vec();
    picks.sort_unstable();
    let mut values = vec![Rational::zero()];
    values.extend(picks.into_iter().map(|k| Rational::new(k as i64 + 1, denom)));
    Spectrum::new(values)
}

fn rescaled(x: &SemimetricSpace, rng: &mut impl Rng) -> Result<SemimetricSpace> {
    x.rank_relabel(&random_spectrum(x.spectrum().len(), rng)?)
}

fn show(x: &SemimetricSpace) -> String {
    x.to_json().trim_end().to_string()
}

fn pair_context(x: &SemimetricSpace, y: &SemimetricSpace) -> String {
    format!("X={} Y={}", show(x), show(y))
}

fn hasse(x: &SemimetricSpace) -> HasseDiagram {
    hasse_diagram(&enumerate_balls(x))
}

// ---- suites 1, 2, 10: single ultrametric spaces -------------------------

/// The seeded space behind trial `trial` of the round-trip suite, shared by
/// the multipartite and Hasse-shape suites.
pub fn roundtrip_space(seed: u64, trial: usize, max_n: usize) -> Result<SemimetricSpace> {
    let mut rng = trial_rng(seed, 1, trial);
    let n = rng.random_range(1..=max_n);
    let class = any_class(&mut rng);
    let injective = rng.random_bool(0.5);
    random_ultra(n, class, injective, &mut rng)
}

fn roundtrip(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let x = roundtrip_space(seed, trial, max_n)?;
    let back = space_from_tree(&build_tree(&x)?)?;
    if back.points() != x.points() || back.matrix() != x.matrix() {
        return fail(format!(
            "round trip changed the space: X={} back={}",
            show(&x),
            show(&back)
        ));
    }
    pass(true)
}

fn multipartite(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let x = roundtrip_space(seed, trial, max_n)?;
    if x.len() < 2 {
        return Ok(Outcome::Skip);
    }
    let graph = diametrical_graph(&x)?;
    let parts = multipartite_parts(&graph)?;
    let mut rebuilt = parts.rebuild_edges();
    rebuilt.sort_unstable();
    if parts.parts().len() < 2 || rebuilt != graph.edges() {
        return fail(format!(
            "partition does not rebuild the diametrical graph: X={}",
            show(&x)
        ));
    }
    pass(true)
}

fn hasse_tree_shape(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let x = roundtrip_space(seed, trial, max_n)?;
    let h = hasse(&x);
    match h.reversed_tree_root() {
        Some(root) if h.balls()[root].len() == x.len() => pass(true),
        Some(_) => fail(format!("reversed Hasse diagram is rooted away from X: X={}", show(&x))),
        None => fail(format!("reversed Hasse diagram is not a rooted tree: X={}", show(&x))),
    }
}

fn hasse_of_s3() -> Result<Outcome> {
    let r = Rational::from;
    let s3 = SemimetricSpace::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![r(0), r(1), r(3)], vec![r(1), r(0), r(1)], vec![r(3), r(1), r(0)]],
    )?;
    let h = hasse(&s3);
    let b = h
        .balls()
        .iter()
        .position(|ball| ball.names(&s3) == ["b"])
        .expect("{b} is a ball");
    if h.reversed_tree_root().is_some() || h.outdegree(b) != 2 {
        return fail("S3 diagram should not be a tree and {b} should have outdegree 2");
    }
    pass(false)
}

// ---- suite 3: isometry --------------------------------------------------

fn isometry(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let mut rng = trial_rng(seed, 3, trial);
    let n = rng.random_range(1..=max_n);
    let x = random_ultra(n, any_class(&mut rng), rng.random_bool(0.3), &mut rng)?;
    let y = match trial % 3 {
        0 => x.clone(),
        1 => random_ultra(n, any_class(&mut rng), false, &mut rng)?,
        _ => same_shape_relabel(&x, &mut rng)?,
    };
    let y = disguise(&y, &mut rng)?;

    let fast = decide_isometry(&x, &y)?;
    let oracle = oracle_isometry(&x, &y)?;
    let codes_equal = canon_code_labeled(&build_tree(&x)?) == canon_code_labeled(&build_tree(&y)?);
    if fast.is_some() != oracle.is_some() || codes_equal != oracle.is_some() {
        return fail(format!(
            "disagreement: fast={} oracle={} labeled codes equal={codes_equal}; {}",
            fast.is_some(),
            oracle.is_some(),
            pair_context(&x, &y)
        ));
    }
    if let Some(w) = &fast {
        if !verify_isometry(&x, &y, &w.phi)? {
            return fail(format!("isometry witness fails; {}", pair_context(&x, &y)));
        }
    }
    if let Some(phi) = &oracle {
        if !verify_isometry(&x, &y, phi)? {
            return fail(format!("oracle witness fails; {}", pair_context(&x, &y)));
        }
    }
    pass(fast.is_some())
}

// ---- suites 4, 7, 9: weak similarity ------------------------------------

/// The seeded pair behind trial `trial` of the weak-similarity suite. Even
/// trials are ultrametric, odd ones general semimetric.
pub fn weak_similarity_pair(seed: u64, trial: usize, max_n: usize) -> Result<(SemimetricSpace, SemimetricSpace)> {
    let mut rng = trial_rng(seed, 4, trial);
    let n = rng.random_range(1..=max_n);
    let ultrametric = trial.is_multiple_of(2);
    let fresh = |rng: &mut ChaCha8Rng| -> Result<SemimetricSpace> {
        if ultrametric {
            random_ultra(n, any_class(rng), false, rng)
        } else {
            let top = rng.random_range(1..=3);
            random_semimetric_with(n, Some(&integer_pool(1..=top)), rng)
        }
    };
    let x = fresh(&mut rng)?;
    let y = match (trial / 2) % 3 {
        0 => rescaled(&x, &mut rng)?,
        1 => fresh(&mut rng)?,
        _ if ultrametric => rescaled(&same_shape_relabel(&x, &mut rng)?, &mut rng)?,
        _ => {
            // one entry moved to another spectrum value
            let y = rescaled(&x, &mut rng)?;
            if n < 2 {
                y
            } else {
                let (i, j) = (rng.random_range(0..n), rng.random_range(0..n - 1));
                let j = if j >= i { j + 1 } else { j };
                let values = &y.spectrum().values()[1..];
                let v = values[rng.random_range(0..values.len())].clone();
                let mut m = y.matrix();
                m[i][j] = v.clone();
                m[j][i] = v;
                SemimetricSpace::new(y.points().to_vec(), m)?
            }
        }
    };
    Ok((x, disguise(&y, &mut rng)?))
}

fn weak_similarity(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let (x, y) = weak_similarity_pair(seed, trial, max_n)?;
    let fast = decide_weak_similarity(&x, &y)?;
    let oracle = oracle_weak_similarity(&x, &y)?;
    if fast.is_some() != oracle.is_some() {
        return fail(format!(
            "disagreement: fast={} oracle={}; {}",
            fast.is_some(),
            oracle.is_some(),
            pair_context(&x, &y)
        ));
    }
    for w in fast.iter().chain(&oracle) {
        if !verify_weak_similarity(&x, &y, w)? {
            return fail(format!("witness fails f(d(x,y)) = ρ(Φx,Φy); {}", pair_context(&x, &y)));
        }
    }
    pass(fast.is_some())
}

fn hasse_of_weak_similarity(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let (x, y) = weak_similarity_pair(seed, trial, max_n)?;
    if decide_weak_similarity(&x, &y)?.is_none() {
        return Ok(Outcome::Skip);
    }
    let (hx, hy) = (hasse(&x), hasse(&y));
    match hasse_digraph_iso(&hx, &hy) {
        Some(iso) if verify_digraph_iso(&hx, &hy, &iso) => pass(true),
        Some(_) => fail(format!(
            "Hasse isomorphism fails verification; {}",
            pair_context(&x, &y)
        )),
        None => fail(format!(
            "weakly similar but Hasse diagrams not isomorphic; {}",
            pair_context(&x, &y)
        )),
    }
}

fn corollaries(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    // every weak-similarity witness is ball-preserving
    let (x, y) = weak_similarity_pair(seed, trial, max_n)?;
    if let Some(w) = decide_weak_similarity(&x, &y)? {
        if let Some(v) = verify_ball_preserving(&x, &y, &w.phi)? {
            return fail(format!(
                "witness is not ball-preserving ({v:?}); {}",
                pair_context(&x, &y)
            ));
        }
    }

    // for ultrametric pairs, unlabeled tree isomorphism iff a ball-preserving
    // bijection exists
    let mut rng = trial_rng(seed, 9, trial);
    let n = rng.random_range(1..=max_n.max(2));
    let x = random_ultra(n, any_class(&mut rng), false, &mut rng)?;
    let y = if trial.is_multiple_of(2) {
        same_shape_relabel(&x, &mut rng)?
    } else {
        random_ultra(n, any_class(&mut rng), false, &mut rng)?
    };
    let y = disguise(&y, &mut rng)?;
    let shapes_equal = canon_code_unlabeled(&build_tree(&x)?) == canon_code_unlabeled(&build_tree(&y)?);
    let bijection = ball_preserving_bijection(&x, &y)?;
    if shapes_equal != bijection.is_some() {
        return fail(format!(
            "unlabeled codes equal={shapes_equal} but ball-preserving bijection found={}; {}",
            bijection.is_some(),
            pair_context(&x, &y)
        ));
    }
    pass(shapes_equal)
}

// ---- suites 5, 6: weak similarity from unlabeled isomorphism ----------

fn unlabeled_iso_rtilde(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let mut rng = trial_rng(seed, 5, trial);

    // forward: X in R̃, Y any relabeling of the same tree
    let n = rng.random_range(1..=max_n);
    let class = if rng.random_bool(0.5) {
        ShapeClass::RTilde
    } else {
        ShapeClass::R
    };
    let x = random_ultra(n, class, false, &mut rng)?;
    let y = disguise(&rescaled(&same_shape_relabel(&x, &mut rng)?, &mut rng)?, &mut rng)?;
    match witness_from_unlabeled_iso(&x, &y)? {
        UnlabeledIsoOutcome::Witness(w) if verify_weak_similarity(&x, &y, &w)? => {}
        other => return fail(format!("forward direction gave {other:?}; {}", pair_context(&x, &y))),
    }

    // converse: X outside R̃ admits a relabeling that breaks weak similarity
    let n = rng.random_range(4..=max_n.max(4));
    let mut x = None;
    for _ in 0..64 {
        let candidate = random_ultra(n, ShapeClass::Any, false, &mut rng)?;
        if !shape_classes(&build_tree(&candidate)?).r_tilde {
            x = Some(candidate);
            break;
        }
    }
    let Some(x) = x else {
        return fail(format!("no tree outside R̃ sampled for n = {n}"));
    };
    let y = disguise(&adversarial_relabeling(&x)?, &mut rng)?;
    let same_shape = canon_code_unlabeled(&build_tree(&x)?) == canon_code_unlabeled(&build_tree(&y)?);
    let similar = decide_weak_similarity(&x, &y)?.is_some();
    if !same_shape || similar {
        return fail(format!(
            "adversarial relabeling: same shape={same_shape}, weakly similar={similar}; {}",
            pair_context(&x, &y)
        ));
    }
    pass(true)
}

fn unlabeled_iso_dt(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let mut rng = trial_rng(seed, 6, trial);
    let n = rng.random_range(1..=max_n);
    let shape = random_shape(&point_names("x", n), ShapeClass::T, &mut rng);
    let x = space_from_tree(&label_randomly(&shape, true, &mut rng)?)?;
    let y = space_from_tree(&label_randomly(&strip_labels(&build_tree(&x)?), true, &mut rng)?)?;
    let y = disguise(&rescaled(&y, &mut rng)?, &mut rng)?;
    let w = match witness_from_unlabeled_iso(&x, &y)? {
        UnlabeledIsoOutcome::Witness(w) => w,
        other => return fail(format!("construction gave {other:?}; {}", pair_context(&x, &y))),
    };
    if !verify_weak_similarity(&x, &y, &w)? || decide_weak_similarity(&x, &y)?.is_none() {
        return fail(format!(
            "witness not confirmed by decide_weak_similarity; {}",
            pair_context(&x, &y)
        ));
    }
    pass(true)
}

// ---- suite 8: ball-preserving bijections --------------------------------

fn ball_preserving(seed: u64, trial: usize, max_n: usize) -> Result<Outcome> {
    let mut rng = trial_rng(seed, 8, trial);
    let n = rng.random_range(1..=max_n);
    let semimetric = |rng: &mut ChaCha8Rng| {
        let top = rng.random_range(1..=3);
        random_semimetric_with(n, Some(&integer_pool(1..=top)), rng)
    };
    let (x, y) = match trial % 4 {
        0 => {
            let x = semimetric(&mut rng)?;
            let y = rescaled(&x, &mut rng)?;
            (x, y)
        }
        1 => (semimetric(&mut rng)?, semimetric(&mut rng)?),
        2 => (
            random_ultra(n, any_class(&mut rng), false, &mut rng)?,
            random_ultra(n, any_class(&mut rng), false, &mut rng)?,
        ),
        _ => {
            let x = random_ultra(n, any_class(&mut rng), false, &mut rng)?;
            let y = same_shape_relabel(&x, &mut rng)?;
            (x, y)
        }
    };
    let y = disguise(&y, &mut rng)?;

    let fast = ball_preserving_bijection(&x, &y)?;
    let oracle = oracle_ball_preserving(&x, &y)?;
    let diagrams = hasse_digraph_iso(&hasse(&x), &hasse(&y)).is_some();
    if fast.is_some() != oracle.is_some() || diagrams != fast.is_some() {
        return fail(format!(
            "disagreement: extracted={} oracle={} diagrams isomorphic={diagrams}; {}",
            fast.is_some(),
            oracle.is_some(),
            pair_context(&x, &y)
        ));
    }
    for f in fast.iter().chain(&oracle) {
        if let Some(v) = verify_ball_preserving(&x, &y, f)? {
            return fail(format!(
                "bijection is not ball-preserving ({v:?}); {}",
                pair_context(&x, &y)
            ));
        }
    }
    pass(fast.is_some())
}
