//! Fragmentation trees: recursive set-labeled hierarchies.
//!
//! A fragmentation of a finite label set `B` is the tree of subsets obtained
//! by recursively partitioning `B` into `k >= 2` blocks until every block is
//! a singleton. Each vertex *is* its block, so the label sets encode the tree
//! structure. Values are immutable after construction and all operations are
//! pure.

use crate::error::{Error, Result};
use crate::labels::LabelSet;
use std::cmp::Ordering;
use std::fmt;

/// First violated structural clause, reported by [`FragTree::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeDefect {
    #[error("vertex {0} has an empty label set")]
    EmptyLabel(String),
    #[error("leaf {0} is not a singleton")]
    NonSingletonLeaf(String),
    #[error("vertex {0} has one child; k >= 2 violated")]
    SingleChild(String),
    #[error("children of {0} have overlapping label sets")]
    OverlappingChildren(String),
    #[error("children of {0} do not partition it")]
    IncompletePartition(String),
    #[error("children of {0} are not in canonical order (ascending minimum)")]
    NonCanonicalOrder(String),
}

/// A fragmentation tree. Children are kept in canonical order (ascending
/// minimum label), making structural equality decide tree equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FragTree {
    label: LabelSet,
    children: Vec<FragTree>,
}

impl FragTree {
    pub fn leaf(label: u32) -> Self {
        FragTree {
            label: LabelSet::singleton(label),
            children: Vec::new(),
        }
    }

    /// Build an internal vertex from child subtrees. The vertex label is the
    /// union of the children's labels; children are sorted into canonical
    /// order and the partition invariants are checked.
    pub fn node(children: Vec<FragTree>) -> Result<Self> {
        let mut label = LabelSet::EMPTY;
        for c in &children {
            if !label.is_disjoint(c.label) {
                return Err(TreeDefect::OverlappingChildren(format!(
                    "{}",
                    label.union(c.label)
                ))
                .into());
            }
            label = label.union(c.label);
        }
        let mut children = children;
        children.sort_by_key(|c| c.label.min_label());
        let t = FragTree { label, children };
        t.validate()?;
        Ok(t)
    }

    /// Assemble a tree without checking any invariant. Useful for parsers and
    /// adversarial tests; run [`validate`](Self::validate) afterwards.
    pub fn from_raw(label: LabelSet, children: Vec<FragTree>) -> Self {
        FragTree { label, children }
    }

    pub fn label(&self) -> LabelSet {
        self.label
    }

    pub fn children(&self) -> &[FragTree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Number of labels at the root (= number of leaves for a valid tree).
    pub fn size(&self) -> u32 {
        self.label.len()
    }

    /// Checks every structural invariant, reporting the first violation:
    /// children partition their parent into `k >= 2` non-empty disjoint
    /// blocks, leaves are singletons, and children are canonically ordered.
    pub fn validate(&self) -> std::result::Result<(), TreeDefect> {
        let here = || self.label.to_string();
        if self.label.is_empty() {
            return Err(TreeDefect::EmptyLabel(here()));
        }
        if self.children.is_empty() {
            if self.label.len() != 1 {
                return Err(TreeDefect::NonSingletonLeaf(here()));
            }
            return Ok(());
        }
        if self.children.len() == 1 {
            return Err(TreeDefect::SingleChild(here()));
        }
        let mut seen = LabelSet::EMPTY;
        let mut prev_min = 0u32;
        for c in &self.children {
            if c.label.is_empty() {
                return Err(TreeDefect::EmptyLabel(c.label.to_string()));
            }
            if !seen.is_disjoint(c.label) {
                return Err(TreeDefect::OverlappingChildren(here()));
            }
            seen = seen.union(c.label);
            let m = c.label.min_label();
            if m < prev_min {
                return Err(TreeDefect::NonCanonicalOrder(here()));
            }
            prev_min = m;
        }
        if seen != self.label {
            return Err(TreeDefect::IncompletePartition(here()));
        }
        for c in &self.children {
            c.validate()?;
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Restriction to a non-empty subset `a` of the root label set: intersect
    /// every block with `a`, drop empty intersections, and collapse the
    /// duplicate sets that arise when only one child survives.
    pub fn restrict(&self, a: LabelSet) -> Result<FragTree> {
        if a.is_empty() || !a.is_subset(self.label) {
            return Err(Error::BadRestriction);
        }
        Ok(self.restrict_unchecked(a))
    }

    fn restrict_unchecked(&self, a: LabelSet) -> FragTree {
        debug_assert!(!a.is_empty() && a.is_subset(self.label));
        if a.len() == 1 {
            return FragTree {
                label: a,
                children: Vec::new(),
            };
        }
        let mut kept: Vec<FragTree> = Vec::with_capacity(self.children.len());
        for c in &self.children {
            let ca = c.label.intersection(a);
            if !ca.is_empty() {
                kept.push(c.restrict_unchecked(ca));
            }
        }
        if kept.len() == 1 {
            // Single surviving child means C \cap a == a: same set, collapse.
            return kept.pop().unwrap();
        }
        // dropping labels can change which child holds the minimum
        kept.sort_by_key(|c| c.label.min_label());
        FragTree {
            label: a,
            children: kept,
        }
    }

    /// Preorder iterator over all vertices (blocks) of the tree.
    pub fn vertices(&self) -> Vertices<'_> {
        Vertices { stack: vec![self] }
    }

    /// The signature: counts of vertices by block size.
    pub fn signature(&self) -> Signature {
        let n = self.size() as usize;
        let mut counts = vec![0u32; n];
        for v in self.vertices() {
            counts[v.size() as usize - 1] += 1;
        }
        Signature(counts)
    }

    /// The combinatorial shape: the tree with labels forgotten, in canonical
    /// form (children sorted by the total order on shapes), so that two trees
    /// related by a label bijection map to equal shapes.
    pub fn shape(&self) -> TreeShape {
        let mut children: Vec<TreeShape> = self.children.iter().map(|c| c.shape()).collect();
        children.sort();
        TreeShape {
            leaves: self.size(),
            children,
        }
    }
}

pub struct Vertices<'a> {
    stack: Vec<&'a FragTree>,
}

impl<'a> Iterator for Vertices<'a> {
    type Item = &'a FragTree;

    fn next(&mut self) -> Option<&'a FragTree> {
        let v = self.stack.pop()?;
        // Reverse keeps preorder left-to-right.
        for c in v.children.iter().rev() {
            self.stack.push(c);
        }
        Some(v)
    }
}

impl fmt::Display for FragTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            write!(f, "{}", self.label.min_label())
        } else {
            write!(f, "(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Debug for FragTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Count vector `sigma(j)` = number of blocks of size `j`, for `j = 1..=n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(Vec<u32>);

impl Signature {
    pub fn from_counts(counts: Vec<u32>) -> Self {
        Signature(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// Size of the underlying label set.
    pub fn n(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn count(&self, size: u32) -> u32 {
        self.0.get(size as usize - 1).copied().unwrap_or(0)
    }

    /// Total number of vertices.
    pub fn vertex_count(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Unlabeled rooted shape with per-subtree leaf counts, unique per
/// isomorphism class. The total order is (leaf count, then children
/// lexicographically); children are stored sorted by it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeShape {
    leaves: u32,
    children: Vec<TreeShape>,
}

impl TreeShape {
    pub fn leaf() -> Self {
        TreeShape {
            leaves: 1,
            children: Vec::new(),
        }
    }

    pub fn node(children: Vec<TreeShape>) -> Self {
        assert!(children.len() >= 2, "shape vertex needs k >= 2 children");
        let mut children = children;
        children.sort();
        TreeShape {
            leaves: children.iter().map(|c| c.leaves).sum(),
            children,
        }
    }

    pub fn leaves(&self) -> u32 {
        self.leaves
    }

    pub fn children(&self) -> &[TreeShape] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Signature shared by every labeling of this shape.
    pub fn signature(&self) -> Signature {
        fn walk(s: &TreeShape, counts: &mut [u32]) {
            counts[s.leaves as usize - 1] += 1;
            for c in &s.children {
                walk(c, counts);
            }
        }
        let mut counts = vec![0u32; self.leaves as usize];
        walk(self, &mut counts);
        Signature(counts)
    }

    /// Number of distinct leaf labelings of this shape: n! divided by the
    /// automorphism count, which is the product over vertices of m! for each
    /// group of m identical child shapes.
    pub fn labeling_count(&self) -> u64 {
        fn aut(s: &TreeShape) -> u64 {
            let mut a = 1u64;
            let mut i = 0;
            while i < s.children.len() {
                let mut j = i + 1;
                while j < s.children.len() && s.children[j] == s.children[i] {
                    j += 1;
                }
                // children are sorted, so equal shapes are adjacent
                let m = (j - i) as u64;
                for q in 2..=m {
                    a *= q;
                }
                i = j;
            }
            for c in &s.children {
                a *= aut(c);
            }
            a
        }
        let mut fact = 1u64;
        for q in 2..=self.leaves as u64 {
            fact *= q;
        }
        fact / aut(self)
    }
}

impl PartialOrd for TreeShape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TreeShape {
    fn cmp(&self, other: &Self) -> Ordering {
        self.leaves
            .cmp(&other.leaves)
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            write!(f, "1")
        } else {
            write!(f, "(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Debug for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The comb {{1..n},{1..n-1},...,{1,2},{1},...,{n}}.
    pub(crate) fn comb(n: u32) -> FragTree {
        let mut t = FragTree::leaf(1);
        for l in 2..=n {
            t = FragTree::node(vec![t, FragTree::leaf(l)]).unwrap();
        }
        t
    }

    #[test]
    fn validate_examples() {
        assert!(FragTree::leaf(1).is_valid());

        // root {1,2,3} with one child {1,2,3}
        let bad = FragTree::from_raw(
            LabelSet::full(3),
            vec![FragTree::from_raw(LabelSet::full(3), vec![])],
        );
        match bad.validate() {
            Err(TreeDefect::SingleChild(_)) => {}
            other => panic!("expected SingleChild, got {other:?}"),
        }

        let pair = FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(2)]).unwrap();
        assert!(pair.is_valid());
    }

    #[test]
    fn validate_defect_variants() {
        let l1 = FragTree::leaf(1);
        let l2 = FragTree::leaf(2);
        // leaf with 2 labels
        let fat_leaf = FragTree::from_raw(LabelSet::full(2), vec![]);
        assert!(matches!(
            fat_leaf.validate(),
            Err(TreeDefect::NonSingletonLeaf(_))
        ));
        // overlapping children
        let overlap = FragTree::from_raw(
            LabelSet::full(2),
            vec![l1.clone(), FragTree::from_raw(LabelSet::full(2), vec![])],
        );
        assert!(matches!(
            overlap.validate(),
            Err(TreeDefect::OverlappingChildren(_))
        ));
        // children do not cover the root
        let gap = FragTree::from_raw(LabelSet::full(3), vec![l1.clone(), l2.clone()]);
        assert!(matches!(
            gap.validate(),
            Err(TreeDefect::IncompletePartition(_))
        ));
        // non-canonical order
        let misordered = FragTree::from_raw(LabelSet::full(2), vec![l2, l1]);
        assert!(matches!(
            misordered.validate(),
            Err(TreeDefect::NonCanonicalOrder(_))
        ));
        // node() rejects overlapping children outright
        assert!(FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(1)]).is_err());
    }

    #[test]
    fn restrict_examples() {
        let t = comb(3);
        // identity
        assert_eq!(t.restrict(t.label()).unwrap(), t);
        // {1,2,3}-comb restricted to {1,3}: the {1,2} block collapses
        let a = LabelSet::from_labels([1, 3]).unwrap();
        let r = t.restrict(a).unwrap();
        let expected = FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(3)]).unwrap();
        assert_eq!(r, expected);
        assert!(r.is_valid());
        // singleton restriction
        let s = t.restrict(LabelSet::singleton(2)).unwrap();
        assert_eq!(s, FragTree::leaf(2));
        // errors
        assert_eq!(t.restrict(LabelSet::EMPTY), Err(Error::BadRestriction));
        assert_eq!(
            t.restrict(LabelSet::singleton(9)),
            Err(Error::BadRestriction)
        );
    }

    #[test]
    fn restrict_tower() {
        let t = comb(5);
        let a = LabelSet::from_labels([1, 2, 4, 5]).unwrap();
        let a2 = LabelSet::from_labels([2, 5]).unwrap();
        let lhs = t.restrict(a).unwrap().restrict(a2).unwrap();
        let rhs = t.restrict(a2).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn signature_examples() {
        assert_eq!(comb(3).signature().counts(), &[3, 1, 1]);

        // two-cherry tree on [4]
        let c12 = FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(2)]).unwrap();
        let c34 = FragTree::node(vec![FragTree::leaf(3), FragTree::leaf(4)]).unwrap();
        let t = FragTree::node(vec![c12, c34]).unwrap();
        assert_eq!(t.signature().counts(), &[4, 2, 0, 1]);

        for n in 2..=6 {
            let s = comb(n).signature();
            assert_eq!(s.count(1), n);
            assert_eq!(s.count(n), 1);
        }
    }

    #[test]
    fn shape_is_relabeling_invariant() {
        // the three binary fragmentations of [3] share the unique shape
        let mk = |a: u32, b: u32, c: u32| {
            FragTree::node(vec![
                FragTree::node(vec![FragTree::leaf(a), FragTree::leaf(b)]).unwrap(),
                FragTree::leaf(c),
            ])
            .unwrap()
        };
        let s1 = mk(1, 2, 3).shape();
        let s2 = mk(1, 3, 2).shape();
        let s3 = mk(2, 3, 1).shape();
        assert_eq!(s1, s2);
        assert_eq!(s2, s3);
        assert_eq!(s1.leaves(), 3);
    }

    #[test]
    fn labeling_counts_on_four_leaves() {
        let comb4 = comb(4).shape();
        assert_eq!(comb4.labeling_count(), 12);
        let cherry = TreeShape::node(vec![TreeShape::leaf(), TreeShape::leaf()]);
        let balanced = TreeShape::node(vec![cherry.clone(), cherry.clone()]);
        assert_eq!(balanced.labeling_count(), 3);
        // multifurcating: root (cherry, leaf, leaf) has C(4,2) = 6 labelings
        let mixed = TreeShape::node(vec![cherry, TreeShape::leaf(), TreeShape::leaf()]);
        assert_eq!(mixed.labeling_count(), 6);
        // flat split into four singletons
        let flat = TreeShape::node(vec![TreeShape::leaf(); 4]);
        assert_eq!(flat.labeling_count(), 1);
    }

    #[test]
    fn shape_signature_matches_tree_signature() {
        let t = comb(5);
        assert_eq!(t.shape().signature(), t.signature());
    }
}
