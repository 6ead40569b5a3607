//! Random generation of fragmentation trees.
//!
//! Two exact samplers:
//!
//! - [`sample_branching`]: top-down Markov branching (binary models). The
//!   root split is drawn by first picking the size `i` of the block holding
//!   the smallest label with probability `C(n-1, i-1) p(i, n-i)`, then its
//!   companions uniformly, recursing on both blocks.
//! - [`sample_growth`]: sequential leaf insertion. Given the tree on `[n]`,
//!   leaf `n+1` either attaches *below* a vertex `A` (new vertex `A u {n+1}`
//!   with children `{n+1}` and `A`) or, in multifurcating regimes, attaches
//!   *to* an internal vertex as an extra singleton block. For consistent
//!   models the chain realizes the Markov branching law.
//!
//! The attachment masses are computed by path products: walking from the
//! root to the site multiplies one ratio of split probabilities per edge
//! (`W_{n_child}/C_{n_vertex}` in Gibbs-table form) and a terminal factor at
//! the site. In exact mode masses are rationals and sampling clears
//! denominators, so the draw is unbiased by construction.
//!
//! Randomness comes from ChaCha12 (`rand_chacha`), a published seedable
//! generator with identical streams on every platform. Parallel workers
//! should derive per-worker generators with [`rng_for_worker`].

use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::model::{GibbsModel, Regime};
use crate::scalar::Scalar;
use crate::tree::FragTree;
use num_integer::binomial;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Deterministic generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Split a seed into independent per-worker streams: worker `i` gets the
/// same keyed generator on stream `i`.
pub fn rng_for_worker(seed: u64, worker: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng
}

/// Where leaf `n+1` lands when growing a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttachSite {
    /// Insert a new parent above this vertex; the new leaf becomes its
    /// sibling.
    Below(LabelSet),
    /// Append the new leaf as an extra child block of this internal vertex.
    To(LabelSet),
}

/// Exact per-site attachment probabilities for one growth step.
#[derive(Debug, Clone)]
pub struct AttachmentDistribution<S> {
    /// Mass of attaching below each vertex, in preorder.
    pub below: Vec<(LabelSet, S)>,
    /// Mass of attaching to each internal vertex able to take another block.
    pub to: Vec<(LabelSet, S)>,
}

impl<S: Scalar> AttachmentDistribution<S> {
    pub fn total_mass(&self) -> S {
        let mut acc = S::zero();
        for (_, m) in self.below.iter().chain(self.to.iter()) {
            acc = acc + m.clone();
        }
        acc
    }

    pub fn mass_of(&self, site: &AttachSite) -> Option<S> {
        match site {
            AttachSite::Below(l) => self
                .below
                .iter()
                .find(|(v, _)| v == l)
                .map(|(_, m)| m.clone()),
            AttachSite::To(l) => self.to.iter().find(|(v, _)| v == l).map(|(_, m)| m.clone()),
        }
    }

    fn sample_site<R: Rng + ?Sized>(&self, rng: &mut R) -> AttachSite {
        let weights: Vec<S> = self
            .below
            .iter()
            .map(|(_, m)| m.clone())
            .chain(self.to.iter().map(|(_, m)| m.clone()))
            .collect();
        let idx = S::sample_index(&weights, rng);
        if idx < self.below.len() {
            AttachSite::Below(self.below[idx].0)
        } else {
            AttachSite::To(self.to[idx - self.below.len()].0)
        }
    }
}

/// Exact attachment distribution of the next leaf given the current tree.
/// The tree must have positive probability under the model.
pub fn attachment_distribution<S: Scalar>(
    model: &GibbsModel<S>,
    t: &FragTree,
) -> Result<AttachmentDistribution<S>> {
    if !(model.tree_prob(t)? > S::zero()) {
        return Err(Error::ZeroProbabilityTree(t.to_string()));
    }
    let mut dist = AttachmentDistribution {
        below: Vec::new(),
        to: Vec::new(),
    };
    match model.regime() {
        Regime::Comb => walk_ratio(model, t, S::one(), &mut dist)?,
        _ => walk_gibbs(model, t, S::one(), &mut dist)?,
    }
    Ok(dist)
}

/// Same distribution computed from ratios of split probabilities instead of
/// the Gibbs tables; works for any binary model and cross-checks the table
/// form.
pub fn attachment_distribution_by_ratio<S: Scalar>(
    model: &GibbsModel<S>,
    t: &FragTree,
) -> Result<AttachmentDistribution<S>> {
    if !model.is_binary() {
        return Err(Error::Unsupported(
            "ratio-form attachment applies to binary models".into(),
        ));
    }
    if !(model.tree_prob(t)? > S::zero()) {
        return Err(Error::ZeroProbabilityTree(t.to_string()));
    }
    let mut dist = AttachmentDistribution {
        below: Vec::new(),
        to: Vec::new(),
    };
    walk_ratio(model, t, S::one(), &mut dist)?;
    Ok(dist)
}

fn walk_gibbs<S: Scalar>(
    model: &GibbsModel<S>,
    v: &FragTree,
    prefix: S,
    dist: &mut AttachmentDistribution<S>,
) -> Result<()> {
    let n = v.size();
    // below: a(2) w(n) w(1) / c(n+1)
    let below = prefix.clone()
        * model.factor_a(2)?
        * model.weight_w(n)?
        * model.weight_w(1)?
        / model.norm(n + 1)?;
    dist.below.push((v.label(), below));
    if v.is_leaf() {
        return Ok(());
    }
    let k = v.children().len() as u32;
    // to: A_k w(1) / C_n, when a (k+1)-block split is possible at all
    if model.max_blocks().is_none_or(|m| k < m) {
        let to = prefix.clone() * model.a_ratio(k)? * model.weight_w(1)? / model.c_ratio(n)?;
        dist.to.push((v.label(), to));
    }
    for child in v.children() {
        let edge = model.w_ratio(child.size())? / model.c_ratio(n)?;
        walk_gibbs(model, child, prefix.clone() * edge, dist)?;
    }
    Ok(())
}

fn walk_ratio<S: Scalar>(
    model: &GibbsModel<S>,
    v: &FragTree,
    prefix: S,
    dist: &mut AttachmentDistribution<S>,
) -> Result<()> {
    let n = v.size();
    let below = prefix.clone() * model.split_prob(&[n, 1])?;
    dist.below.push((v.label(), below));
    if v.is_leaf() {
        return Ok(());
    }
    debug_assert_eq!(v.children().len(), 2);
    for (idx, child) in v.children().iter().enumerate() {
        let other = v.children()[1 - idx].size();
        let denom = model.split_prob(&[child.size(), other])?;
        debug_assert!(denom > S::zero());
        let edge = model.split_prob(&[child.size() + 1, other])? / denom;
        walk_ratio(model, child, prefix.clone() * edge, dist)?;
    }
    Ok(())
}

/// Rebuild the tree with `new_label` attached at `site`. The new label joins
/// every vertex on the path from the root to the site.
pub fn apply_attachment(t: &FragTree, site: &AttachSite, new_label: u32) -> Result<FragTree> {
    let new_leaf_set = LabelSet::checked_singleton(new_label)?;
    if !t.label().is_disjoint(new_leaf_set) {
        return Err(Error::OutOfRange(format!(
            "label {new_label} already present in the tree"
        )));
    }
    let target = match site {
        AttachSite::Below(l) | AttachSite::To(l) => *l,
    };
    if !target.is_subset(t.label()) {
        return Err(Error::OutOfRange(format!("site {target} is not a vertex")));
    }
    fn rebuild(
        v: &FragTree,
        site: &AttachSite,
        target: LabelSet,
        new_leaf: LabelSet,
    ) -> FragTree {
        let grown_label = v.label().union(new_leaf);
        if v.label() == target {
            return match site {
                AttachSite::Below(_) => {
                    FragTree::from_raw(grown_label, vec![v.clone(), leaf_of(new_leaf)])
                }
                AttachSite::To(_) => {
                    let mut children = v.children().to_vec();
                    children.push(leaf_of(new_leaf));
                    children.sort_by_key(|c| c.label().min_label());
                    FragTree::from_raw(grown_label, children)
                }
            };
        }
        let mut children: Vec<FragTree> = v
            .children()
            .iter()
            .map(|c| {
                if target.is_subset(c.label()) {
                    rebuild(c, site, target, new_leaf)
                } else {
                    c.clone()
                }
            })
            .collect();
        children.sort_by_key(|c| c.label().min_label());
        FragTree::from_raw(grown_label, children)
    }
    fn leaf_of(l: LabelSet) -> FragTree {
        FragTree::from_raw(l, Vec::new())
    }
    let grown = rebuild(t, site, target, new_leaf_set);
    debug_assert!(grown.is_valid());
    Ok(grown)
}

/// One growth step: sample an attachment site for the next leaf and apply it.
pub fn grow<S: Scalar, R: Rng + ?Sized>(
    model: &GibbsModel<S>,
    t: &FragTree,
    rng: &mut R,
) -> Result<FragTree> {
    let next = max_label(t) + 1;
    if next > crate::labels::MAX_LABEL {
        return Err(Error::LabelOutOfRange(next));
    }
    let dist = attachment_distribution(model, t)?;
    let site = dist.sample_site(rng);
    apply_attachment(t, &site, next)
}

fn max_label(t: &FragTree) -> u32 {
    t.label().labels().last().unwrap()
}

/// Grow a tree on `{1..n}` from the single leaf `{1}`. For consistent models
/// the resulting law equals the Markov branching law.
pub fn sample_growth<S: Scalar, R: Rng + ?Sized>(
    model: &GibbsModel<S>,
    n: u32,
    rng: &mut R,
) -> Result<FragTree> {
    if !(1..=crate::labels::MAX_LABEL).contains(&n) {
        return Err(Error::OutOfRange(format!("n = {n} outside 1..=64")));
    }
    let mut t = FragTree::leaf(1);
    for _ in 1..n {
        t = grow(model, &t, rng)?;
    }
    Ok(t)
}

/// Draw a tree on `{1..n}` by top-down Markov branching (binary models).
pub fn sample_branching<S: Scalar, R: Rng + ?Sized>(
    model: &GibbsModel<S>,
    n: u32,
    rng: &mut R,
) -> Result<FragTree> {
    if !model.is_binary() {
        return Err(Error::Unsupported(
            "top-down branching sampling applies to binary models; use growth".into(),
        ));
    }
    if !(2..=crate::labels::MAX_LABEL).contains(&n) {
        return Err(Error::OutOfRange(format!("n = {n} outside 2..=64")));
    }
    split_rec(model, LabelSet::full(n), rng)
}

fn split_rec<S: Scalar, R: Rng + ?Sized>(
    model: &GibbsModel<S>,
    labels: LabelSet,
    rng: &mut R,
) -> Result<FragTree> {
    let n = labels.len();
    if n == 1 {
        return Ok(FragTree::from_raw(labels, Vec::new()));
    }
    // size of the block containing the smallest label
    let mut weights = Vec::with_capacity(n as usize - 1);
    for i in 1..n {
        let c = S::from_int(binomial((n - 1) as u64, (i - 1) as u64) as i64);
        weights.push(c * model.split_prob(&[i, n - i])?);
    }
    let i = S::sample_index(&weights, rng) as u32 + 1;
    // choose the i-1 companions uniformly
    let min = labels.min_label();
    let mut rest: Vec<u32> = labels.difference(LabelSet::singleton(min)).labels().collect();
    let mut left = LabelSet::singleton(min);
    for pick in 0..(i - 1) as usize {
        let j = rng.gen_range(pick..rest.len());
        rest.swap(pick, j);
        left = left.union(LabelSet::singleton(rest[pick]));
    }
    let right = labels.difference(left);
    let lt = split_rec(model, left, rng)?;
    let rt = split_rec(model, right, rng)?;
    Ok(FragTree::from_raw(labels, vec![lt, rt]))
}

/// Exact probability that the growth chain produces `t` (labels `{1..n}`):
/// the product over growth steps of the attachment mass of the unique site
/// turning the restriction to `[m-1]` into the restriction to `[m]`.
pub fn growth_prob<S: Scalar>(model: &GibbsModel<S>, t: &FragTree) -> Result<S> {
    let n = t.size();
    if t.label() != LabelSet::full(n) {
        return Err(Error::OutOfRange(
            "growth chains are defined for trees labeled 1..n".into(),
        ));
    }
    let mut prob = S::one();
    let mut prev = t.restrict(LabelSet::full(1))?;
    for m in 2..=n {
        let cur = t.restrict(LabelSet::full(m))?;
        let site = locate_attachment(&cur, m)?;
        let dist = attachment_distribution(model, &prev)?;
        let mass = dist
            .mass_of(&site)
            .ok_or_else(|| Error::ZeroProbabilityTree(format!("no site {site:?}")))?;
        prob = prob * mass;
        prev = cur;
    }
    Ok(prob)
}

/// Identify the attachment that produced leaf `new_label`: its parent with
/// two children means it attached below its sibling, more children mean it
/// attached to the remaining block.
fn locate_attachment(cur: &FragTree, new_label: u32) -> Result<AttachSite> {
    let leaf = LabelSet::singleton(new_label);
    let parent = find_parent(cur, leaf)
        .ok_or_else(|| Error::OutOfRange(format!("leaf {new_label} not found")))?;
    let rest = parent.label().difference(leaf);
    if parent.children().len() == 2 {
        Ok(AttachSite::Below(rest))
    } else {
        Ok(AttachSite::To(rest))
    }
}

fn find_parent(v: &FragTree, leaf: LabelSet) -> Option<&FragTree> {
    for c in v.children() {
        if c.label() == leaf {
            return Some(v);
        }
        if leaf.is_subset(c.label()) {
            return find_parent(c, leaf);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{for_each_binary, for_each_fragmentation};
    use crate::{ExactModel, FloatModel, Rational};
    use num_traits::{One, Zero};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn pair() -> FragTree {
        FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(2)]).unwrap()
    }

    #[test]
    fn growth_step_one_to_two_is_deterministic() {
        let models: Vec<ExactModel> = vec![
            ExactModel::beta_split(rat(0, 1)).unwrap(),
            ExactModel::comb(),
            ExactModel::ewens_pitman(rat(1, 2), rat(1, 2)).unwrap(),
            ExactModel::singleton_split(),
        ];
        for m in &models {
            let mut rng = rng_from_seed(1);
            let t = sample_growth(m, 2, &mut rng).unwrap();
            assert_eq!(t, pair(), "{}", m.describe());
        }
    }

    #[test]
    fn branching_n2_is_deterministic() {
        let m = ExactModel::beta_split(rat(-3, 2)).unwrap();
        let mut rng = rng_from_seed(9);
        assert_eq!(sample_branching(&m, 2, &mut rng).unwrap(), pair());
    }

    #[test]
    fn attachment_on_pair_is_one_third_for_binary_models() {
        for m in [
            ExactModel::beta_split(rat(-3, 2)).unwrap(),
            ExactModel::beta_split(rat(4, 1)).unwrap(),
            ExactModel::beta_split_infinite(),
            ExactModel::comb(),
        ] {
            let d = attachment_distribution(&m, &pair()).unwrap();
            assert!(d.to.is_empty());
            assert_eq!(d.below.len(), 3);
            for (_, mass) in &d.below {
                assert_eq!(*mass, rat(1, 3), "{}", m.describe());
            }
        }
    }

    #[test]
    fn uniform_model_attaches_at_rate_one_over_2n_minus_1() {
        let u = ExactModel::beta_split(rat(-3, 2)).unwrap();
        for n in 2..=6 {
            let expected = rat(1, 2 * n as i64 - 1);
            for_each_binary(n, &mut |t| {
                let d = attachment_distribution(&u, t).unwrap();
                assert_eq!(d.below.len() as u32, 2 * n - 1);
                for (_, mass) in &d.below {
                    assert_eq!(*mass, expected);
                }
            })
            .unwrap();
        }
    }

    #[test]
    fn ewens_pitman_pair_attachment() {
        let ep = ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap();
        let d = attachment_distribution(&ep, &pair()).unwrap();
        assert_eq!(d.below.len(), 3);
        for (_, mass) in &d.below {
            assert_eq!(*mass, rat(1, 5));
        }
        assert_eq!(d.to.len(), 1);
        assert_eq!(d.to[0].1, rat(2, 5));
        assert_eq!(d.to[0].0, LabelSet::full(2));
    }

    #[test]
    fn attachment_masses_sum_to_one_exactly() {
        let binary: Vec<ExactModel> = vec![
            ExactModel::beta_split(rat(-3, 2)).unwrap(),
            ExactModel::beta_split(rat(-1, 1)).unwrap(),
            ExactModel::beta_split(rat(0, 1)).unwrap(),
            ExactModel::beta_split(rat(7, 2)).unwrap(),
            ExactModel::beta_split_infinite(),
        ];
        for m in &binary {
            for n in 1..=5 {
                for_each_binary(n, &mut |t| {
                    let d = attachment_distribution(m, t).unwrap();
                    assert!(d.total_mass().is_one(), "{} on {t}", m.describe());
                })
                .unwrap();
            }
        }
        let multi: Vec<ExactModel> = vec![
            ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap(),
            ExactModel::ewens_pitman(rat(1, 2), rat(1, 2)).unwrap(),
            ExactModel::ewens_pitman(rat(-1, 2), rat(3, 2)).unwrap(),
            ExactModel::coupon_collector(3).unwrap(),
            ExactModel::singleton_split(),
        ];
        for m in &multi {
            for n in 1..=5 {
                for_each_fragmentation(n, &mut |t| {
                    if m.tree_prob(t).unwrap().is_zero() {
                        return;
                    }
                    let d = attachment_distribution(m, t).unwrap();
                    assert!(d.total_mass().is_one(), "{} on {t}", m.describe());
                })
                .unwrap();
            }
        }
        // comb: masses over comb-shaped trees
        let comb = ExactModel::comb();
        for n in 1..=6 {
            for_each_binary(n, &mut |t| {
                if comb.tree_prob(t).unwrap().is_zero() {
                    return;
                }
                let d = attachment_distribution(&comb, t).unwrap();
                assert!(d.total_mass().is_one(), "comb on {t}");
            })
            .unwrap();
        }
    }

    #[test]
    fn ratio_form_matches_gibbs_form_on_binary_models() {
        let models: Vec<ExactModel> = vec![
            ExactModel::beta_split(rat(-3, 2)).unwrap(),
            ExactModel::beta_split(rat(2, 1)).unwrap(),
            ExactModel::beta_split_infinite(),
            ExactModel::ewens_pitman(rat(1, 2), rat(-1, 1)).unwrap(),
        ];
        for m in &models {
            for n in 2..=6 {
                for_each_binary(n, &mut |t| {
                    let a = attachment_distribution(m, t).unwrap();
                    let b = attachment_distribution_by_ratio(m, t).unwrap();
                    assert_eq!(a.below, b.below, "{} on {t}", m.describe());
                    assert!(b.to.is_empty());
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn zero_probability_tree_is_rejected() {
        let comb = ExactModel::comb();
        let balanced = FragTree::node(vec![
            FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(2)]).unwrap(),
            FragTree::node(vec![FragTree::leaf(3), FragTree::leaf(4)]).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            attachment_distribution(&comb, &balanced),
            Err(Error::ZeroProbabilityTree(_))
        ));
        // singleton-split model only ever sees stars
        let ss = ExactModel::singleton_split();
        assert!(attachment_distribution(&ss, &balanced).is_err());
        let star = FragTree::node((1..=4).map(FragTree::leaf).collect()).unwrap();
        let d = attachment_distribution(&ss, &star).unwrap();
        assert!(d.total_mass().is_one());
        assert_eq!(d.to.len(), 1);
        assert!(d.to[0].1.is_one());
    }

    #[test]
    fn grow_preserves_restriction_and_validity() {
        let m = FloatModel::ewens_pitman(0.5, 0.5).unwrap();
        let mut rng = rng_from_seed(42);
        let mut failures = 0;
        for _ in 0..2_000 {
            let n = rng.gen_range(1..=8u32);
            let t = sample_growth(&m, n, &mut rng).unwrap();
            let grown = grow(&m, &t, &mut rng).unwrap();
            if !grown.is_valid() || grown.restrict(t.label()).unwrap() != t {
                failures += 1;
            }
        }
        assert_eq!(failures, 0);
    }

    #[test]
    fn growth_chain_matches_tree_probability_exactly() {
        let binary: Vec<ExactModel> = vec![
            ExactModel::beta_split(rat(0, 1)).unwrap(),
            ExactModel::beta_split(rat(-3, 2)).unwrap(),
            ExactModel::comb(),
        ];
        for m in &binary {
            for n in 1..=5 {
                for_each_binary(n, &mut |t| {
                    let expected = m.tree_prob(t).unwrap();
                    if expected.is_zero() {
                        return;
                    }
                    assert_eq!(
                        growth_prob(m, t).unwrap(),
                        expected,
                        "{} on {t}",
                        m.describe()
                    );
                })
                .unwrap();
            }
        }
        let ep = ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap();
        for n in 1..=5 {
            for_each_fragmentation(n, &mut |t| {
                let expected = ep.tree_prob(t).unwrap();
                if expected.is_zero() {
                    return;
                }
                assert_eq!(growth_prob(&ep, t).unwrap(), expected, "on {t}");
            })
            .unwrap();
        }
    }

    #[test]
    fn determinism_per_seed() {
        let m = FloatModel::beta_split(0.0).unwrap();
        let a: Vec<FragTree> = {
            let mut rng = rng_from_seed(1234);
            (0..50)
                .map(|_| sample_growth(&m, 10, &mut rng).unwrap())
                .collect()
        };
        let b: Vec<FragTree> = {
            let mut rng = rng_from_seed(1234);
            (0..50)
                .map(|_| sample_growth(&m, 10, &mut rng).unwrap())
                .collect()
        };
        assert_eq!(a, b);
        // distinct worker streams differ
        let mut w0 = rng_for_worker(1234, 0);
        let mut w1 = rng_for_worker(1234, 1);
        let t0 = sample_growth(&m, 10, &mut w0).unwrap();
        let t1 = sample_growth(&m, 10, &mut w1).unwrap();
        assert_ne!(t0, t1);
    }

    #[test]
    fn branching_frequencies_uniform_model() {
        // beta = -3/2 on [4]: all 15 trees equally likely
        let m = FloatModel::beta_split(-1.5).unwrap();
        let mut rng = rng_from_seed(2024);
        let samples = 150_000usize;
        let mut counts: std::collections::HashMap<FragTree, u32> = Default::default();
        for _ in 0..samples {
            *counts
                .entry(sample_branching(&m, 4, &mut rng).unwrap())
                .or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 15);
        let p = 1.0 / 15.0;
        let sd = (samples as f64 * p * (1.0 - p)).sqrt();
        for (t, c) in counts {
            let dev = (c as f64 - samples as f64 * p).abs();
            assert!(dev < 4.0 * sd, "tree {t}: count {c}");
        }
    }

    #[test]
    fn branching_three_leaves_thirds() {
        let m = FloatModel::beta_split(0.0).unwrap();
        let mut rng = rng_from_seed(77);
        let samples = 90_000usize;
        let mut counts: std::collections::HashMap<FragTree, u32> = Default::default();
        for _ in 0..samples {
            *counts
                .entry(sample_branching(&m, 3, &mut rng).unwrap())
                .or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 3);
        let sd = (samples as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for (_, c) in counts {
            assert!((c as f64 - samples as f64 / 3.0).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn growth_star_frequency_ewens_pitman() {
        // EP(1/2, 0) on [3]: the star has probability 2/5
        let m = FloatModel::ewens_pitman(0.5, 0.0).unwrap();
        let star = FragTree::node(vec![
            FragTree::leaf(1),
            FragTree::leaf(2),
            FragTree::leaf(3),
        ])
        .unwrap();
        let mut rng = rng_from_seed(5);
        let samples = 200_000usize;
        let mut hits = 0u32;
        for _ in 0..samples {
            if sample_growth(&m, 3, &mut rng).unwrap() == star {
                hits += 1;
            }
        }
        let p = 0.4;
        let sd = (samples as f64 * p * (1.0 - p)).sqrt();
        assert!((hits as f64 - samples as f64 * p).abs() < 4.0 * sd, "{hits}");
    }

    #[test]
    fn branching_rejects_multifurcating_models() {
        let ep = ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap();
        let mut rng = rng_from_seed(0);
        assert!(matches!(
            sample_branching(&ep, 4, &mut rng),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn exact_growth_sampling_runs() {
        let m = ExactModel::ewens_pitman(rat(1, 2), rat(1, 2)).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let t = sample_growth(&m, 8, &mut rng).unwrap();
            assert!(t.is_valid());
            assert_eq!(t.size(), 8);
        }
    }

    #[test]
    fn attachment_masses_sum_to_one_on_grown_trees() {
        // up to ten leaves, along random exact growth paths
        let models: Vec<ExactModel> = vec![
            ExactModel::beta_split(rat(-4, 3)).unwrap(),
            ExactModel::ewens_pitman(rat(1, 2), rat(1, 2)).unwrap(),
            ExactModel::ewens_pitman(rat(-1, 2), rat(3, 2)).unwrap(),
            ExactModel::coupon_collector(3).unwrap(),
        ];
        for (i, m) in models.iter().enumerate() {
            let mut rng = rng_from_seed(600 + i as u64);
            for _ in 0..3 {
                let mut t = FragTree::leaf(1);
                for _ in 1..10u32 {
                    let d = attachment_distribution(m, &t).unwrap();
                    assert!(d.total_mass().is_one(), "{} on {t}", m.describe());
                    t = grow(m, &t, &mut rng).unwrap();
                }
            }
        }
    }
}
