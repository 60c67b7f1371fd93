//! Max-valued measures on finite binary trees.
//!
//! A [`TreeMeasure`] is a finite complete binary tree whose leaves carry
//! ordinal labels. Leaves stand for clopen cylinders of the Cantor set, a
//! *region* is a finite union of node cylinders, and the measure of a region
//! is the maximum label below it, with a bottom element [`MeasureValue::O`]
//! reserved for the empty region. Values live in the monoid of countable
//! ordinals extended by `o`, where addition is `max` and `o` is the unit, so
//! the two measure axioms (additivity over disjoint unions, `o` exactly on
//! the empty region) hold by construction.
//!
//! The module decides the measure-theoretic relations that matter for these
//! step measures: measure-preserving isomorphism of regions, self-similarity
//! at a point, pseudo-indecomposability, and the decomposition of the whole
//! tree into indecomposable parts. Points are infinite bit strings; a leaf
//! path identifies the cylinder containing a point, and the rank of a point
//! is its leaf's label ([`TreeMeasure::rank_of_point`]), inverse to building
//! the measure from a rank function.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::ordinal::{parse_ordinal, Ordinal};
use crate::parse::{ParseError, Scanner};

/// A measure value: the bottom element `o` or an ordinal rank.
///
/// `o` is below every ordinal, and the monoid operation is `max`, making
/// `o` the unique unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureValue {
    O,
    Rank(Ordinal),
}

impl MeasureValue {
    pub fn is_o(&self) -> bool {
        matches!(self, MeasureValue::O)
    }

    /// The monoid operation: the larger of the two values.
    pub fn join(&self, other: &MeasureValue) -> MeasureValue {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::O => write!(f, "o"),
            MeasureValue::Rank(a) => write!(f, "{a}"),
        }
    }
}

/// A region: a set of node paths (strings over `0`/`1`; `""` is the root).
/// The denoted set is the union of the node cylinders, so overlapping or
/// nested paths are harmless.
pub type Region = BTreeSet<String>;

/// Convenience constructor for a region from path literals.
pub fn region<const N: usize>(paths: [&str; N]) -> Region {
    paths.iter().map(|p| (*p).to_owned()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("path {path:?} does not address a node of the tree")]
    RegionNotInTree { path: String },
    #[error("path {path:?} ends above a leaf")]
    PathTooShort { path: String },
    #[error("the region is empty")]
    EmptyRegion,
    #[error("the regions are not measure-isomorphic")]
    NotIsomorphic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Leaf(Ordinal),
    Branch(Box<Node>, Box<Node>),
}

/// A finite complete binary tree with an ordinal label on every leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeMeasure {
    root: Node,
}

impl TreeMeasure {
    pub fn leaf(label: Ordinal) -> TreeMeasure {
        TreeMeasure { root: Node::Leaf(label) }
    }

    pub fn branch(left: TreeMeasure, right: TreeMeasure) -> TreeMeasure {
        TreeMeasure { root: Node::Branch(Box::new(left.root), Box::new(right.root)) }
    }

    pub fn depth(&self) -> usize {
        fn go(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 0,
                Node::Branch(l, r) => 1 + go(l).max(go(r)),
            }
        }
        go(&self.root)
    }

    /// All `(leaf path, label)` pairs in left-to-right order.
    pub fn leaves(&self) -> Vec<(String, &Ordinal)> {
        let mut out = Vec::new();
        fn go<'a>(n: &'a Node, path: String, out: &mut Vec<(String, &'a Ordinal)>) {
            match n {
                Node::Leaf(a) => out.push((path, a)),
                Node::Branch(l, r) => {
                    go(l, format!("{path}0"), out);
                    go(r, format!("{path}1"), out);
                }
            }
        }
        go(&self.root, String::new(), &mut out);
        out
    }

    fn node(&self, path: &str) -> Result<&Node, MeasureError> {
        let mut cur = &self.root;
        for c in path.chars() {
            match (cur, c) {
                (Node::Branch(l, _), '0') => cur = l,
                (Node::Branch(_, r), '1') => cur = r,
                _ => return Err(MeasureError::RegionNotInTree { path: path.to_owned() }),
            }
        }
        Ok(cur)
    }

    pub fn contains_node(&self, path: &str) -> bool {
        self.node(path).is_ok()
    }

    /// All node paths of the tree (internal nodes and leaves).
    pub fn all_nodes(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn go(n: &Node, path: String, out: &mut Vec<String>) {
            out.push(path.clone());
            if let Node::Branch(l, r) = n {
                go(l, format!("{path}0"), out);
                go(r, format!("{path}1"), out);
            }
        }
        go(&self.root, String::new(), &mut out);
        out
    }

    /// Leaf cylinders under one path. A path that descends below a leaf
    /// denotes a sub-cylinder of that leaf and resolves to itself with the
    /// leaf's (constant) label.
    pub fn leaves_under(&self, path: &str) -> Result<Vec<(String, &Ordinal)>, MeasureError> {
        let mut cur = &self.root;
        let mut chars = path.chars();
        loop {
            match (cur, chars.next()) {
                (Node::Branch(l, _), Some('0')) => cur = l,
                (Node::Branch(_, r), Some('1')) => cur = r,
                (Node::Leaf(a), Some(c)) if c == '0' || c == '1' => {
                    return if chars.all(|c| c == '0' || c == '1') {
                        Ok(vec![(path.to_owned(), a)])
                    } else {
                        Err(MeasureError::RegionNotInTree { path: path.to_owned() })
                    };
                }
                (node, None) => {
                    let sub = TreeRef { root: node };
                    return Ok(sub
                        .leaves()
                        .into_iter()
                        .map(|(p, a)| (format!("{path}{p}"), a))
                        .collect());
                }
                _ => return Err(MeasureError::RegionNotInTree { path: path.to_owned() }),
            }
        }
    }

    /// Distinct leaf cylinders under a whole region, deduplicated.
    pub fn region_leaves(&self, region: &Region) -> Result<Vec<(String, &Ordinal)>, MeasureError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for path in region {
            for (p, a) in self.leaves_under(path)? {
                if seen.insert(p.clone()) {
                    out.push((p, a));
                }
            }
        }
        out.sort_by(|(p, _), (q, _)| p.cmp(q));
        Ok(out)
    }

    /// Measure of a region: the maximum leaf label under it, `o` if empty.
    pub fn sigma_eval(&self, region: &Region) -> Result<MeasureValue, MeasureError> {
        let leaves = self.region_leaves(region)?;
        Ok(leaves
            .into_iter()
            .map(|(_, a)| MeasureValue::Rank(a.clone()))
            .fold(MeasureValue::O, |acc, v| acc.join(&v)))
    }

    /// Rank of the point addressed by an infinite bit string: the label of
    /// the leaf whose cylinder contains it. `path` must be a prefix of the
    /// point long enough to reach a leaf; surplus bits are ignored.
    pub fn rank_of_point(&self, path: &str) -> Result<&Ordinal, MeasureError> {
        let mut cur = &self.root;
        let mut chars = path.chars();
        loop {
            match cur {
                Node::Leaf(a) => return Ok(a),
                Node::Branch(l, r) => match chars.next() {
                    Some('0') => cur = l,
                    Some('1') => cur = r,
                    Some(_) => {
                        return Err(MeasureError::RegionNotInTree { path: path.to_owned() })
                    }
                    None => return Err(MeasureError::PathTooShort { path: path.to_owned() }),
                },
            }
        }
    }

    /// Distinct leaf labels under a region.
    pub fn value_set(&self, region: &Region) -> Result<BTreeSet<Ordinal>, MeasureError> {
        Ok(self
            .region_leaves(region)?
            .into_iter()
            .map(|(_, a)| a.clone())
            .collect())
    }

    /// Leaves at whose points the region is self-similar: leaves whose label
    /// is the region's entire value set. All leaves qualify when the region
    /// has a single value, none otherwise.
    pub fn self_similar_points(&self, region: &Region) -> Result<Vec<String>, MeasureError> {
        let leaves = self.region_leaves(region)?;
        if leaves.is_empty() {
            return Err(MeasureError::EmptyRegion);
        }
        let values = self.value_set(region)?;
        Ok(leaves
            .into_iter()
            .filter(|(_, a)| values.len() == 1 && values.contains(a))
            .map(|(p, _)| p)
            .collect())
    }

    /// A region is pseudo-indecomposable iff it is self-similar somewhere,
    /// which for a step measure means its value set is a singleton.
    pub fn sigma_pi_decide(&self, region: &Region) -> Result<bool, MeasureError> {
        Ok(!self.self_similar_points(region)?.is_empty())
    }

    /// Split the whole tree into maximal constant-label node groups: one
    /// part per distinct label, each part pseudo-indecomposable. Every step
    /// measure admits such a decomposition, so the decision is always
    /// `true`; the parts are returned as the witness.
    pub fn sigma_primitive_decide(&self) -> (bool, Vec<Region>) {
        let mut by_label: Vec<(Ordinal, Region)> = Vec::new();
        for (path, label) in self.leaves() {
            match by_label.iter_mut().find(|(a, _)| a == label) {
                Some((_, part)) => {
                    part.insert(path);
                }
                None => {
                    by_label.push((label.clone(), region([path.as_str()])));
                }
            }
        }
        by_label.sort_by(|(a, _), (b, _)| a.cmp(b));
        (true, by_label.into_iter().map(|(_, part)| merge_nodes(part)).collect())
    }
}

struct TreeRef<'a> {
    root: &'a Node,
}

impl<'a> TreeRef<'a> {
    fn leaves(&self) -> Vec<(String, &'a Ordinal)> {
        let mut out = Vec::new();
        fn go<'a>(n: &'a Node, path: String, out: &mut Vec<(String, &'a Ordinal)>) {
            match n {
                Node::Leaf(a) => out.push((path, a)),
                Node::Branch(l, r) => {
                    go(l, format!("{path}0"), out);
                    go(r, format!("{path}1"), out);
                }
            }
        }
        go(self.root, String::new(), &mut out);
        out
    }
}

/// Replace sibling pairs by their parent until no pair remains, producing
/// the canonical maximal-node form of a region.
pub fn merge_nodes(mut region: Region) -> Region {
    loop {
        let mut merged = false;
        let paths: Vec<String> = region.iter().cloned().collect();
        for p in paths {
            if p.ends_with('0') {
                let stem = &p[..p.len() - 1];
                let sibling = format!("{stem}1");
                if region.contains(&sibling) {
                    region.remove(&p);
                    region.remove(&sibling);
                    region.insert(stem.to_owned());
                    merged = true;
                }
            }
        }
        if !merged {
            return region;
        }
    }
}

/// Are two regions measure-isomorphic? For step measures this holds exactly
/// when they attain the same set of values.
pub fn sigma_iso_decide(
    m1: &TreeMeasure,
    r1: &Region,
    m2: &TreeMeasure,
    r2: &Region,
) -> Result<bool, MeasureError> {
    let v1 = m1.value_set(r1)?;
    let v2 = m2.value_set(r2)?;
    if v1.is_empty() || v2.is_empty() {
        return Err(MeasureError::EmptyRegion);
    }
    Ok(v1 == v2)
}

/// Build an explicit measure-preserving correspondence between two regions:
/// a bijective pairing of constant-label cylinders covering each side, with
/// equal labels in every pair. Leaves are split further where the two sides
/// disagree in count, so the correspondence always exists when the regions
/// attain the same values.
pub fn build_sigma_iso(
    m1: &TreeMeasure,
    r1: &Region,
    m2: &TreeMeasure,
    r2: &Region,
) -> Result<Vec<(String, String)>, MeasureError> {
    if !sigma_iso_decide(m1, r1, m2, r2)? {
        return Err(MeasureError::NotIsomorphic);
    }
    let values = m1.value_set(r1)?;
    let leaves1 = m1.region_leaves(r1)?;
    let leaves2 = m2.region_leaves(r2)?;
    let mut pairs = Vec::new();
    for a in &values {
        let group1: Vec<String> = leaves1
            .iter()
            .filter(|(_, l)| *l == a)
            .map(|(p, _)| p.clone())
            .collect();
        let group2: Vec<String> = leaves2
            .iter()
            .filter(|(_, l)| *l == a)
            .map(|(p, _)| p.clone())
            .collect();
        let target = group1.len().max(group2.len());
        let g1 = split_to(group1, target);
        let g2 = split_to(group2, target);
        pairs.extend(g1.into_iter().zip(g2));
    }
    Ok(pairs)
}

/// Grow a list of cylinders to exactly `target` pieces by repeatedly
/// splitting its last piece into its two halves.
fn split_to(mut pieces: Vec<String>, target: usize) -> Vec<String> {
    while pieces.len() < target {
        let p = pieces.pop().expect("groups are nonempty before splitting");
        pieces.push(format!("{p}0"));
        pieces.push(format!("{p}1"));
    }
    pieces
}

fn parse_tree(sc: &mut Scanner) -> Result<Node, ParseError> {
    if sc.eat(b'[') {
        let left = parse_tree(sc)?;
        sc.expect(b',')?;
        let right = parse_tree(sc)?;
        sc.expect(b']')?;
        Ok(Node::Branch(Box::new(left), Box::new(right)))
    } else {
        Ok(Node::Leaf(parse_ordinal(sc)?))
    }
}

impl FromStr for TreeMeasure {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut sc = Scanner::new(s);
        let root = parse_tree(&mut sc)?;
        sc.finish()?;
        Ok(TreeMeasure { root })
    }
}

impl fmt::Display for TreeMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match n {
                Node::Leaf(a) => write!(f, "{a}"),
                Node::Branch(l, r) => {
                    write!(f, "[")?;
                    go(l, f)?;
                    write!(f, ",")?;
                    go(r, f)?;
                    write!(f, "]")
                }
            }
        }
        go(&self.root, f)
    }
}

/// Random tree of depth at most `max_depth` with labels drawn from `labels`.
pub fn random_tree<R: rand::Rng + ?Sized>(
    rng: &mut R,
    max_depth: usize,
    labels: &[Ordinal],
) -> TreeMeasure {
    assert!(!labels.is_empty(), "need at least one label to draw from");
    if max_depth > 0 && rng.gen_bool(0.6) {
        TreeMeasure::branch(
            random_tree(rng, max_depth - 1, labels),
            random_tree(rng, max_depth - 1, labels),
        )
    } else {
        TreeMeasure::leaf(labels[rng.gen_range(0..labels.len())].clone())
    }
}
