//! Seeded random instances and exhaustive oracles.
//!
//! Ultrametric spaces are generated from random labeled trees, which keeps
//! every output valid and gives direct control over its class. The oracles
//! try every bijection and exist only to cross-check the fast procedures.

use itertools::Itertools;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ballean::{ball_violation, enumerate_balls};
use crate::error::{Error, Result};
use crate::mapping::PointMap;
use crate::rational::Rational;
use crate::similarity::{forced_scaling, WeakSimWitness};
use crate::space::SemimetricSpace;
use crate::tree::{space_from_tree, Node, RepTree, Shape, Tree};

pub const ORACLE_ISOMETRY_LIMIT: usize = 8;
pub const ORACLE_BALL_LIMIT: usize = 6;

/// Shape constraint on generated representing trees. Each variant implies
/// the ones after it: `R ⊂ R̃ ⊂ T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShapeClass {
    R,
    RTilde,
    T,
    #[default]
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub n: usize,
    /// Candidate distances; `None` picks a default suited to the generator.
    pub pool: Option<Vec<Rational>>,
    pub shape: ShapeClass,
    /// Distinct inner labels (class `D`).
    pub injective: bool,
}

impl GenConfig {
    pub fn new(seed: u64, n: usize) -> Self {
        GenConfig {
            seed,
            n,
            pool: None,
            shape: ShapeClass::Any,
            injective: false,
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// `x1, x2, ...` zero-padded to a common width so name order is index order.
pub fn point_names(prefix: &str, n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

fn normalize_pool(pool: &[Rational]) -> Result<Vec<Rational>> {
    if let Some(bad) = pool.iter().find(|v| !v.is_positive()) {
        return Err(Error::InfeasibleConstraints(format!(
            "pool value {bad} is not positive"
        )));
    }
    let mut pool = pool.to_vec();
    pool.sort();
    pool.dedup();
    if pool.is_empty() {
        return Err(Error::InfeasibleConstraints("empty distance pool".into()));
    }
    Ok(pool)
}

pub fn integer_pool(range: std::ops::RangeInclusive<i64>) -> Vec<Rational> {
    range.map(Rational::from).collect()
}

/// Splits `m` into `k` positive parts uniformly over compositions.
fn composition(m: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut cuts = index::sample(rng, m - 1, k - 1).into_vec();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts {
        parts.push(c + 1 - prev);
        prev = c + 1;
    }
    parts.push(m - prev);
    parts
}

fn leaves(names: &mut Vec<String>, k: usize) -> Vec<Node<()>> {
    (0..k)
        .map(|_| Node::leaf(names.pop().expect("enough names"), ()))
        .collect()
}

fn any_shape(m: usize, names: &mut Vec<String>, rng: &mut impl Rng) -> Node<()> {
    if m == 1 {
        return leaves(names, 1).pop().expect("one leaf");
    }
    let k = rng.random_range(2..=m.min(4));
    let children = composition(m, k, rng)
        .into_iter()
        .map(|p| any_shape(p, names, rng))
        .collect();
    Node::inner((), children)
}

/// One inner node per level: each node keeps some leaves and passes the
/// rest down to a single inner child.
fn chain_shape(m: usize, binary: bool, names: &mut Vec<String>, rng: &mut impl Rng) -> Node<()> {
    if m == 1 {
        return leaves(names, 1).pop().expect("one leaf");
    }
    if m == 2 || (!binary && (m == 3 || rng.random_bool(0.25))) {
        return Node::inner((), leaves(names, m));
    }
    let keep = if binary { 1 } else { rng.random_range(1..=m - 2) };
    let mut children = leaves(names, keep);
    children.push(chain_shape(m - keep, binary, names, rng));
    Node::inner((), children)
}

/// A chain of single inner nodes ending in `q` sibling inner nodes with `c`
/// leaves each.
fn t_shape(m: usize, names: &mut Vec<String>, rng: &mut impl Rng) -> Node<()> {
    if m <= 3 {
        return chain_shape(m, false, names, rng);
    }
    let q = rng.random_range(1..=m / 2);
    let c = rng.random_range(2..=m / q);
    let spare = m - q * c;
    let fan =
        |names: &mut Vec<String>| -> Vec<Node<()>> { (0..q).map(|_| Node::inner((), leaves(names, c))).collect() };
    if spare == 0 {
        return if q == 1 {
            Node::inner((), leaves(names, c))
        } else {
            Node::inner((), fan(names))
        };
    }
    // chain nodes above the bottom one need a leaf each; the bottom one
    // needs a leaf only when it would otherwise have a single child
    let bottom_min = usize::from(q == 1);
    let length = rng.random_range(1..=spare - bottom_min + 1);
    let mut extra = spare - (length - 1) - bottom_min;
    let mut node = {
        let k = if length == 1 {
            extra
        } else {
            rng.random_range(0..=extra)
        };
        extra -= k;
        let mut children = fan(names);
        children.extend(leaves(names, bottom_min + k));
        Node::inner((), children)
    };
    for level in (0..length - 1).rev() {
        let k = if level == 0 { extra } else { rng.random_range(0..=extra) };
        extra -= k;
        let mut children = leaves(names, 1 + k);
        children.push(node);
        node = Node::inner((), children);
    }
    node
}

/// A random unlabeled tree on the given points in the requested class.
pub fn random_shape(names: &[String], class: ShapeClass, rng: &mut impl Rng) -> Shape {
    let mut pool = names.to_vec();
    pool.shuffle(rng);
    let m = pool.len();
    let root = match class {
        ShapeClass::Any => any_shape(m, &mut pool, rng),
        ShapeClass::RTilde => chain_shape(m, false, &mut pool, rng),
        ShapeClass::R => chain_shape(m, true, &mut pool, rng),
        ShapeClass::T => t_shape(m, &mut pool, rng),
    };
    Tree::new(root)
}

/// Labels the inner nodes of `shape` with values from `pool` so that labels
/// strictly decrease toward the leaves.
///
/// Non-injective labels are drawn top-down, each node uniformly among the
/// values that leave room for its deepest descendant chain. Injective labels
/// take a random subset of the pool and hand it out in decreasing order
/// along a random root-first traversal.
pub fn random_labels(shape: &Shape, pool: &[Rational], injective: bool, rng: &mut impl Rng) -> Result<RepTree> {
    let pool = normalize_pool(pool)?;
    let flat = shape.flatten();
    let mut height = vec![0usize; flat.len()];
    for id in (0..flat.len()).rev() {
        if !flat[id].children.is_empty() {
            height[id] = 1 + flat[id].children.iter().map(|&c| height[c]).max().expect("inner node");
        }
    }
    let inner: Vec<usize> = (0..flat.len()).filter(|&i| !flat[i].children.is_empty()).collect();
    let mut rank = vec![usize::MAX; flat.len()];
    if injective {
        if pool.len() < inner.len() {
            return Err(Error::InfeasibleConstraints(format!(
                "{} distinct labels needed, pool has {}",
                inner.len(),
                pool.len()
            )));
        }
        let mut chosen = index::sample(rng, pool.len(), inner.len()).into_vec();
        chosen.sort_unstable_by(|a, b| b.cmp(a));
        let mut frontier = if inner.is_empty() { vec![] } else { vec![0] };
        let mut next = chosen.into_iter();
        while !frontier.is_empty() {
            let v = frontier.swap_remove(rng.random_range(0..frontier.len()));
            rank[v] = next.next().expect("one value per inner node");
            frontier.extend(flat[v].children.iter().filter(|&&c| !flat[c].children.is_empty()));
        }
    } else {
        if pool.len() < height[0] {
            return Err(Error::InfeasibleConstraints(format!(
                "tree needs {} nested labels, pool has {}",
                height[0],
                pool.len()
            )));
        }
        for &v in &inner {
            let top = flat[v].parent.map_or(pool.len() - 1, |p| rank[p] - 1);
            rank[v] = rng.random_range(height[v] - 1..=top);
        }
    }
    let mut id = 0;
    Ok(shape.map_labels(|_| {
        let label = if rank[id] == usize::MAX {
            Rational::zero()
        } else {
            pool[rank[id]].clone()
        };
        id += 1;
        label
    }))
}

/// Random tree per `config`, before conversion to a space.
pub fn random_tree(config: &GenConfig, rng: &mut impl Rng) -> Result<RepTree> {
    if config.n == 0 {
        return Err(Error::EmptySpace);
    }
    let pool = match &config.pool {
        Some(p) => p.clone(),
        None => integer_pool(1..=2 * config.n as i64),
    };
    let shape = random_shape(&point_names("x", config.n), config.shape, rng);
    random_labels(&shape, &pool, config.injective, rng)
}

pub fn random_ultrametric(config: &GenConfig) -> Result<SemimetricSpace> {
    let mut rng = config.rng();
    space_from_tree(&random_tree(config, &mut rng)?)
}

/// Symmetric matrix with entries drawn independently from the pool
/// (default `{1, 2, 3}`); no triangle inequality is imposed.
pub fn random_semimetric(config: &GenConfig) -> Result<SemimetricSpace> {
    let mut rng = config.rng();
    random_semimetric_with(config.n, config.pool.as_deref(), &mut rng)
}

pub fn random_semimetric_with(n: usize, pool: Option<&[Rational]>, rng: &mut impl Rng) -> Result<SemimetricSpace> {
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let pool = match pool {
        Some(p) => normalize_pool(p)?,
        None => integer_pool(1..=3),
    };
    let mut matrix = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = pool[rng.random_range(0..pool.len())].clone();
            matrix[i][j] = v.clone();
            matrix[j][i] = v;
        }
    }
    SemimetricSpace::new(point_names("x", n), matrix)
}

fn guard(x: &SemimetricSpace, y: &SemimetricSpace, limit: usize) -> Result<()> {
    let n = x.len().max(y.len());
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    Ok(())
}

/// First bijection, in lexicographic order, that preserves every distance.
pub fn oracle_isometry(x: &SemimetricSpace, y: &SemimetricSpace) -> Result<Option<PointMap>> {
    guard(x, y, ORACLE_ISOMETRY_LIMIT)?;
    let n = x.len();
    if n != y.len() {
        return Ok(None);
    }
    let found = (0..n)
        .permutations(n)
        .find(|p| (0..n).all(|i| (0..n).all(|j| x.dist(i, j) == y.dist(p[i], p[j]))));
    Ok(found.map(|p| PointMap::from_indices(x, y, &p)))
}

/// The forced rank scaling followed by exhaustive isometry search.
pub fn oracle_weak_similarity(x: &SemimetricSpace, y: &SemimetricSpace) -> Result<Option<WeakSimWitness>> {
    guard(x, y, ORACLE_ISOMETRY_LIMIT)?;
    if x.len() != y.len() {
        return Ok(None);
    }
    let Some(scaling) = forced_scaling(x, y) else {
        return Ok(None);
    };
    let scaled = x.rank_relabel(y.spectrum())?;
    let phi = oracle_isometry(&scaled, y)?;
    Ok(phi.map(|phi| WeakSimWitness { scaling, phi }))
}

/// First bijection, in lexicographic order, that is ball-preserving.
pub fn oracle_ball_preserving(x: &SemimetricSpace, y: &SemimetricSpace) -> Result<Option<PointMap>> {
    guard(x, y, ORACLE_BALL_LIMIT)?;
    let n = x.len();
    if n != y.len() {
        return Ok(None);
    }
    let (bx, by) = (enumerate_balls(x), enumerate_balls(y));
    if bx.len() != by.len() {
        return Ok(None);
    }
    let found = (0..n)
        .permutations(n)
        .find(|p| ball_violation(x, y, &bx, &by, p).is_none());
    Ok(found.map(|p| PointMap::from_indices(x, y, &p)))
}
