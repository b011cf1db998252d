//! Exact decision procedures for finite semimetric and ultrametric spaces:
//! isometry, weak similarity and ball-preserving bijections, built on
//! diametrical graphs, representing trees, and Hasse diagrams of balleans.

#![allow(clippy::needless_range_loop)]

pub mod ballean;
pub mod canon;
pub mod check;
pub mod classification;
pub mod cli;
pub mod diametrical;
pub mod error;
pub mod generators;
pub mod mapping;
pub mod parallel;
pub mod rational;
pub mod similarity;
pub mod space;
pub mod tree;

pub use ballean::{
    ball_preserving_bijection, enumerate_balls, hasse_diagram, hasse_digraph_iso, verify_ball_preserving, Ball,
    BallViolation, Ballean, DigraphIso, HasseDiagram,
};
pub use canon::{canon_code_labeled, canon_code_unlabeled, rooted_tree_iso_map, CanonCode, TreeIso};
pub use classification::{adversarial_relabeling, classify_space, witness_from_unlabeled_iso, ClassReport};
pub use diametrical::{diametrical_graph, multipartite_parts, DiametricalGraph, MultipartitePartition};
pub use error::{Error, Result};
pub use mapping::PointMap;
pub use rational::Rational;
pub use similarity::{
    decide_isometry, decide_weak_similarity, forced_scaling, IsometryWitness, Scaling, WeakSimWitness,
};
pub use space::{validate_semimetric, SemimetricSpace, Spectrum};
pub use tree::{build_tree, space_from_tree, RepTree};
