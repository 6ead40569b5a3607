//! Exhaustive generation of fragmentations, set partitions, shapes and
//! signature tables.
//!
//! Enumeration fixes the block containing the smallest label at each split,
//! so every unordered partition is produced exactly once and children come
//! out in canonical order. Generators stream through a callback; nothing is
//! materialized unless the caller collects.

use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::model::GibbsModel;
use crate::scalar::Scalar;
use crate::tree::{FragTree, Signature, TreeShape};
use std::collections::BTreeMap;

/// Default cap for binary enumeration (#trees grows like (2n-3)!!).
pub const BINARY_CAP: u32 = 12;
/// Default cap for enumeration over all arities.
pub const GENERAL_CAP: u32 = 9;
/// Size up to which signature tables are built by direct enumeration with the
/// dual labeling count; beyond it, shapes are enumerated directly.
const DIRECT_TABLE_LIMIT: u32 = 9;

/// Visit every binary fragmentation of `{1..n}` exactly once.
pub fn for_each_binary(n: u32, f: &mut dyn FnMut(&FragTree)) -> Result<()> {
    for_each_binary_capped(n, BINARY_CAP, f)
}

pub fn for_each_binary_capped(n: u32, cap: u32, f: &mut dyn FnMut(&FragTree)) -> Result<()> {
    if n < 1 {
        return Err(Error::OutOfRange("enumeration needs n >= 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    gen_binary(LabelSet::full(n), &mut |t| f(&t));
    Ok(())
}

fn gen_binary(labels: LabelSet, f: &mut dyn FnMut(FragTree)) {
    if labels.len() == 1 {
        f(FragTree::from_raw(labels, Vec::new()));
        return;
    }
    let min = labels.min_label();
    let rest: Vec<u32> = labels.difference(LabelSet::singleton(min)).labels().collect();
    // subsets of `rest` joined with the minimum, excluding the full set
    let full_mask = (1u64 << rest.len()) - 1;
    for mask in 0..full_mask {
        let mut left_labels = LabelSet::singleton(min);
        for (idx, &lab) in rest.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                left_labels = left_labels.union(LabelSet::singleton(lab));
            }
        }
        let right_labels = labels.difference(left_labels);
        gen_binary(left_labels, &mut |left| {
            gen_binary(right_labels, &mut |right| {
                // left holds the minimum, so the order is canonical
                f(FragTree::from_raw(labels, vec![left.clone(), right]));
            });
        });
    }
}

/// Visit every fragmentation of `{1..n}` (all arities >= 2) exactly once.
pub fn for_each_fragmentation(n: u32, f: &mut dyn FnMut(&FragTree)) -> Result<()> {
    for_each_fragmentation_capped(n, GENERAL_CAP, f)
}

pub fn for_each_fragmentation_capped(
    n: u32,
    cap: u32,
    f: &mut dyn FnMut(&FragTree),
) -> Result<()> {
    if n < 1 {
        return Err(Error::OutOfRange("enumeration needs n >= 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    gen_frag(LabelSet::full(n), &mut |t| f(&t));
    Ok(())
}

fn gen_frag(labels: LabelSet, f: &mut dyn FnMut(FragTree)) {
    if labels.len() == 1 {
        f(FragTree::from_raw(labels, Vec::new()));
        return;
    }
    for_each_set_partition(labels, 2, &mut |blocks| {
        compose_blocks(labels, blocks, Vec::new(), f);
    });
}

/// Cartesian product of the sub-fragmentations of each block.
fn compose_blocks(
    labels: LabelSet,
    blocks: &[LabelSet],
    acc: Vec<FragTree>,
    f: &mut dyn FnMut(FragTree),
) {
    if blocks.is_empty() {
        f(FragTree::from_raw(labels, acc));
        return;
    }
    gen_frag(blocks[0], &mut |sub| {
        let mut next = acc.clone();
        next.push(sub);
        compose_blocks(labels, &blocks[1..], next, f);
    });
}

/// Visit every set partition of `labels` with at least `min_blocks` blocks,
/// blocks ordered by ascending minimum element.
pub fn for_each_set_partition(
    labels: LabelSet,
    min_blocks: usize,
    f: &mut dyn FnMut(&[LabelSet]),
) {
    let mut acc: Vec<LabelSet> = Vec::new();
    partition_rec(labels, &mut acc, min_blocks, f);
}

fn partition_rec(
    remaining: LabelSet,
    acc: &mut Vec<LabelSet>,
    min_blocks: usize,
    f: &mut dyn FnMut(&[LabelSet]),
) {
    if remaining.is_empty() {
        if acc.len() >= min_blocks {
            f(acc);
        }
        return;
    }
    let min = remaining.min_label();
    let rest: Vec<u32> = remaining
        .difference(LabelSet::singleton(min))
        .labels()
        .collect();
    // the next block is the one containing the smallest remaining label
    for mask in 0..(1u64 << rest.len()) {
        let mut block = LabelSet::singleton(min);
        for (idx, &lab) in rest.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                block = block.union(LabelSet::singleton(lab));
            }
        }
        acc.push(block);
        partition_rec(remaining.difference(block), acc, min_blocks, f);
        acc.pop();
    }
}

/// Number of binary fragmentations of `{1..n}`: the generation recursion
/// (split off the subsets containing the minimum, recurse on both blocks)
/// counted with per-size caching instead of materializing trees. No closed
/// forms are involved; agreement with streamed generation is tested.
pub fn count_binary(n: u32) -> Result<u64> {
    if n < 1 {
        return Err(Error::OutOfRange("counting needs n >= 1".into()));
    }
    if n > 19 {
        // 37!! overflows u64
        return Err(Error::CapExceeded {
            requested: n,
            cap: 19,
        });
    }
    let mut memo = vec![0u64; n as usize + 1];
    memo[1] = 1;
    for m in 2..=n as usize {
        let full_mask = (1u64 << (m - 1)) - 1;
        let mut total = 0u64;
        for mask in 0..full_mask {
            let s = mask.count_ones() as usize + 1;
            total += memo[s] * memo[m - s];
        }
        memo[m] = total;
    }
    Ok(memo[n as usize])
}

/// Number of fragmentations of `{1..n}` over all arities, by the same
/// partition recursion as the generator with per-size caching.
pub fn count_all(n: u32) -> Result<u64> {
    if n < 1 {
        return Err(Error::OutOfRange("counting needs n >= 1".into()));
    }
    if n > 12 {
        return Err(Error::CapExceeded {
            requested: n,
            cap: 12,
        });
    }
    let mut memo = vec![0u64; n as usize + 1];
    memo[1] = 1;
    for m in 2..=n {
        let mut total = 0u64;
        for_each_set_partition(LabelSet::full(m), 2, &mut |blocks| {
            total += blocks
                .iter()
                .map(|b| memo[b.len() as usize])
                .product::<u64>();
        });
        memo[m as usize] = total;
    }
    Ok(memo[n as usize])
}

/// All binary shapes with `n` leaves, in canonical order.
pub fn binary_shapes(n: u32) -> Vec<TreeShape> {
    fn build(n: u32, memo: &mut Vec<Vec<TreeShape>>) {
        while (memo.len() as u32) <= n {
            let m = memo.len() as u32;
            if m == 0 {
                memo.push(Vec::new());
                continue;
            }
            if m == 1 {
                memo.push(vec![TreeShape::leaf()]);
                continue;
            }
            let mut out = Vec::new();
            for i in 1..=m / 2 {
                for si in 0..memo[i as usize].len() {
                    for sj in 0..memo[(m - i) as usize].len() {
                        let a = &memo[i as usize][si];
                        let b = &memo[(m - i) as usize][sj];
                        if i == m - i && a > b {
                            continue; // unordered pair
                        }
                        out.push(TreeShape::node(vec![a.clone(), b.clone()]));
                    }
                }
            }
            out.sort();
            memo.push(out);
        }
    }
    let mut memo: Vec<Vec<TreeShape>> = Vec::new();
    build(n, &mut memo);
    memo.swap_remove(n as usize)
}

/// Shapes grouped under one signature, with per-shape labeling counts.
#[derive(Debug, Clone)]
pub struct ShapeEntry {
    pub shape: TreeShape,
    pub labelings: u64,
}

/// For each signature realized by a binary fragmentation of `{1..n}`: the
/// shapes carrying it and `Q_sigma`, the number of fragmentations with that
/// signature.
#[derive(Debug, Clone)]
pub struct SignatureTable {
    pub n: u32,
    entries: BTreeMap<Signature, Vec<ShapeEntry>>,
}

impl SignatureTable {
    pub fn entries(&self) -> impl Iterator<Item = (&Signature, &[ShapeEntry])> {
        self.entries.iter().map(|(s, v)| (s, v.as_slice()))
    }

    pub fn shapes_for(&self, sig: &Signature) -> Option<&[ShapeEntry]> {
        self.entries.get(sig).map(|v| v.as_slice())
    }

    /// `Q_sigma = sum of labeling counts over the shapes with signature sigma`.
    pub fn q_sigma(&self, sig: &Signature) -> u64 {
        self.entries
            .get(sig)
            .map(|v| v.iter().map(|e| e.labelings).sum())
            .unwrap_or(0)
    }

    /// Total number of fragmentations accounted for (= #binary trees on [n]).
    pub fn total(&self) -> u64 {
        self.entries
            .values()
            .flat_map(|v| v.iter().map(|e| e.labelings))
            .sum()
    }

    pub fn signature_count(&self) -> usize {
        self.entries.len()
    }

    /// Signatures carried by two or more shapes.
    pub fn collisions(&self) -> Vec<(Signature, Vec<ShapeEntry>)> {
        self.entries
            .iter()
            .filter(|(_, v)| v.len() >= 2)
            .map(|(s, v)| (s.clone(), v.clone()))
            .collect()
    }
}

/// Build the signature table for binary fragmentations of `{1..n}`.
///
/// Up to n = 9 this enumerates all trees, groups them by (signature, shape),
/// and checks the directly counted labelings of every shape against the
/// automorphism formula n!/|Aut|. For larger n (where full enumeration is out
/// of desk-scale reach) shapes are enumerated directly and labelings come
/// from the automorphism formula alone.
pub fn signature_table(n: u32) -> Result<SignatureTable> {
    signature_table_capped(n, BINARY_CAP)
}

pub fn signature_table_capped(n: u32, cap: u32) -> Result<SignatureTable> {
    if n < 1 {
        return Err(Error::OutOfRange("signature table needs n >= 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    let mut entries: BTreeMap<Signature, Vec<ShapeEntry>> = BTreeMap::new();
    if n <= DIRECT_TABLE_LIMIT {
        let mut counts: BTreeMap<(Signature, TreeShape), u64> = BTreeMap::new();
        for_each_binary_capped(n, cap, &mut |t| {
            *counts.entry((t.signature(), t.shape())).or_insert(0) += 1;
        })?;
        for ((sig, shape), direct) in counts {
            let by_formula = shape.labeling_count();
            assert_eq!(
                direct, by_formula,
                "labeling count mismatch for shape {shape} (direct {direct}, formula {by_formula})"
            );
            entries.entry(sig).or_default().push(ShapeEntry {
                shape,
                labelings: direct,
            });
        }
    } else {
        for shape in binary_shapes(n) {
            let labelings = shape.labeling_count();
            entries
                .entry(shape.signature())
                .or_default()
                .push(ShapeEntry { shape, labelings });
        }
    }
    Ok(SignatureTable { n, entries })
}

/// All signatures at size `n` carried by at least two distinct shapes.
pub fn find_collisions(n: u32) -> Result<Vec<(Signature, Vec<ShapeEntry>)>> {
    Ok(signature_table(n)?.collisions())
}

/// Check the signature expansion of the tree-probability normalizer:
/// `sum_sigma Q_sigma * prod_j psi(j)^sigma(j) = w(n)` exactly.
pub fn verify_w_expansion<S: Scalar>(model: &GibbsModel<S>, n: u32) -> Result<bool> {
    if !S::EXACT {
        return Err(Error::RequiresExactMode);
    }
    if n > 10 {
        return Err(Error::CapExceeded {
            requested: n,
            cap: 10,
        });
    }
    let table = signature_table(n)?;
    let mut total = S::zero();
    for (sig, _) in table.entries() {
        let mut term = S::from_int(table.q_sigma(sig) as i64);
        for j in 2..=n {
            let e = sig.count(j);
            if e > 0 {
                term = term * model.psi(j)?.pow_u(e);
            }
        }
        total = total + term;
    }
    Ok(total == model.weight_w(n)?)
}
