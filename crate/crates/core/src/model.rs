//! Gibbs-type splitting models and their weight tables.
//!
//! A splitting rule assigns to each composition of block sizes the
//! probability that the root of the tree splits into a fixed labeled
//! partition with those sizes. The Gibbs form factorizes it as
//! `p(n_1..n_k) = a(k) * prod_i w(n_i) / c(n)`: one weight per block, one
//! weight per arity, normalized per total size. The families:
//!
//! - [`GibbsModel::beta_split`]: binary, weight products
//!   `w(j) = prod_{q<j} (q + 1 + beta)` for `beta > -2`, or `w == 1` at
//!   `beta = inf` (symmetric trie); `beta = -3/2` is the uniform model and
//!   `beta = 0` the Yule model.
//! - [`GibbsModel::comb`]: the `beta = -2` boundary. Not of Gibbs form; only
//!   splits that break off a single leaf have positive probability.
//! - [`GibbsModel::ewens_pitman`]: multifurcating, `w(n) = prod_{q<n} (q - alpha)`
//!   and `a(k) = prod_{2<=i<k} (theta + i*alpha)`, over the extended
//!   admissible range (see [`EpClass`]).
//! - [`GibbsModel::coupon_collector`]: the `alpha = -inf` boundary with
//!   `theta = m`: each element picks one of `m` coupons uniformly,
//!   conditioned on at least two distinct coupons.
//! - [`GibbsModel::singleton_split`]: the `alpha = 1` boundary, deterministic
//!   split into singleton blocks.
//! - [`GibbsModel::raw_binary`]: an arbitrary positive weight table, for
//!   adversarial consistency tests.
//!
//! Weight tables are memoized per model behind a mutex, so concurrent readers
//! see a consistent memo; models are cheap to clone (the cache is shared) and
//! safe to send across threads.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::FragTree;
use num_integer::binomial;
use std::fmt;
use std::sync::{Arc, Mutex};

/// Beta-splitting parameter: a rational/float in `(-2, inf)` or the infinite
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaParam<S> {
    Finite(S),
    Infinite,
}

/// Ewens-Pitman admissibility class, derived from `(alpha, theta)` at
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpClass {
    /// `0 <= alpha < 1`, `theta > -2*alpha`: arbitrarily high block numbers.
    Unbounded,
    /// `alpha < 0`, `theta = -m*alpha` for an integer `m >= 3`: at most `m`
    /// blocks.
    Bounded { m: u32 },
    /// `alpha < 1`, `theta = -2*alpha`: binary.
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Regime<S> {
    BetaSplit(BetaParam<S>),
    Comb,
    EwensPitman { alpha: S, theta: S, class: EpClass },
    CouponCollector { m: u32 },
    SingletonSplit,
    RawBinary { weights: Vec<S> },
}

/// An admissible splitting model together with its memoized weight tables.
pub struct GibbsModel<S: Scalar> {
    regime: Regime<S>,
    tables: Arc<Mutex<Tables<S>>>,
}

impl<S: Scalar> Clone for GibbsModel<S> {
    fn clone(&self) -> Self {
        GibbsModel {
            regime: self.regime.clone(),
            tables: Arc::clone(&self.tables),
        }
    }
}

impl<S: Scalar> fmt::Debug for GibbsModel<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GibbsModel({})", self.describe())
    }
}

fn nearly_zero<S: Scalar>(x: &S, scale: f64) -> bool {
    if S::EXACT {
        x.is_zero()
    } else {
        x.to_f64().abs() <= 1e-12 * (1.0 + scale)
    }
}

impl<S: Scalar> GibbsModel<S> {
    fn with_regime(regime: Regime<S>) -> Self {
        GibbsModel {
            regime,
            tables: Arc::new(Mutex::new(Tables::new())),
        }
    }

    /// Binary beta-splitting model, `beta > -2`.
    pub fn beta_split(beta: S) -> Result<Self> {
        if !(beta > S::from_int(-2)) {
            return Err(Error::InadmissibleModel(format!(
                "beta must be > -2, got {beta}"
            )));
        }
        Ok(Self::with_regime(Regime::BetaSplit(BetaParam::Finite(beta))))
    }

    /// Binary model at the `beta = inf` boundary (`w == 1`).
    pub fn beta_split_infinite() -> Self {
        Self::with_regime(Regime::BetaSplit(BetaParam::Infinite))
    }

    /// The `beta = -2` comb boundary: pure erosion, splits only break off
    /// single leaves. Consistent but not of Gibbs form.
    pub fn comb() -> Self {
        Self::with_regime(Regime::Comb)
    }

    /// Two-parameter Ewens-Pitman model. Accepted parameter combinations are
    /// exactly the enumerated admissibility classes of [`EpClass`]; the
    /// boundary families `alpha = -inf` and `alpha = 1` have their own
    /// constructors.
    pub fn ewens_pitman(alpha: S, theta: S) -> Result<Self> {
        let scale = alpha.to_f64().abs() + theta.to_f64().abs();
        let two_alpha_plus_theta = theta.clone() + alpha.clone() + alpha.clone();
        let class = if alpha < S::one() && nearly_zero(&two_alpha_plus_theta, scale) {
            EpClass::Binary
        } else if alpha >= S::zero() && alpha < S::one() && two_alpha_plus_theta > S::zero() {
            EpClass::Unbounded
        } else if alpha < S::zero() {
            let ratio = -theta.clone() / alpha.clone();
            match ratio.as_integer() {
                Some(m) if m >= 3 => EpClass::Bounded { m: m as u32 },
                _ => {
                    return Err(Error::InadmissibleModel(format!(
                        "alpha < 0 requires theta = -m*alpha for an integer m >= 3; \
                         got alpha = {alpha}, theta = {theta}"
                    )))
                }
            }
        } else {
            return Err(Error::InadmissibleModel(format!(
                "no admissible regime for alpha = {alpha}, theta = {theta}"
            )));
        };
        Ok(Self::with_regime(Regime::EwensPitman {
            alpha,
            theta,
            class,
        }))
    }

    /// Recursive coupon collector on `m >= 2` coupons.
    pub fn coupon_collector(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InadmissibleModel(format!(
                "coupon collector needs m >= 2, got {m}"
            )));
        }
        Ok(Self::with_regime(Regime::CouponCollector { m }))
    }

    /// Deterministic split into singleton blocks.
    pub fn singleton_split() -> Self {
        Self::with_regime(Regime::SingletonSplit)
    }

    /// Binary Gibbs model from a raw weight table `w(1), w(2), ...`. All
    /// entries must be positive; probabilities are defined for total sizes up
    /// to `len + 1`. No consistency is implied; this exists to feed the
    /// checkers adversarial tables.
    pub fn raw_binary(weights: Vec<S>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InadmissibleModel(
                "raw weight table needs at least w(1), w(2)".into(),
            ));
        }
        if weights.iter().any(|w| !(w > &S::zero())) {
            return Err(Error::InadmissibleModel(
                "raw weights must be positive".into(),
            ));
        }
        Ok(Self::with_regime(Regime::RawBinary { weights }))
    }

    pub fn regime(&self) -> &Regime<S> {
        &self.regime
    }

    /// Upper bound on the number of blocks in a split, if any. `Some(2)` for
    /// structurally binary regimes, `Some(m)` for the bounded families,
    /// `None` when arbitrarily many blocks are possible.
    pub fn max_blocks(&self) -> Option<u32> {
        match &self.regime {
            Regime::BetaSplit(_) | Regime::Comb | Regime::RawBinary { .. } => Some(2),
            Regime::EwensPitman { class, .. } => match class {
                EpClass::Binary => Some(2),
                EpClass::Bounded { m } => Some(*m),
                EpClass::Unbounded => None,
            },
            Regime::CouponCollector { m } => Some(*m),
            Regime::SingletonSplit => None,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.max_blocks() == Some(2)
    }

    /// Every regime except the comb has Gibbs (product) form.
    pub fn is_gibbs(&self) -> bool {
        !matches!(self.regime, Regime::Comb)
    }

    pub fn numeric_mode(&self) -> &'static str {
        if S::EXACT {
            "exact"
        } else {
            "float"
        }
    }

    pub fn describe(&self) -> String {
        let mode = self.numeric_mode();
        match &self.regime {
            Regime::BetaSplit(BetaParam::Finite(b)) => format!("beta-split(beta={b}) [{mode}]"),
            Regime::BetaSplit(BetaParam::Infinite) => format!("beta-split(beta=inf) [{mode}]"),
            Regime::Comb => format!("comb [{mode}]"),
            Regime::EwensPitman { alpha, theta, .. } => {
                format!("ewens-pitman(alpha={alpha}, theta={theta}) [{mode}]")
            }
            Regime::CouponCollector { m } => format!("coupon-collector(m={m}) [{mode}]"),
            Regime::SingletonSplit => format!("singleton-split [{mode}]"),
            Regime::RawBinary { weights } => format!("raw-binary({} weights) [{mode}]", weights.len()),
        }
    }

    fn with_tables<T>(&self, f: impl FnOnce(&mut Tables<S>, &Regime<S>) -> T) -> T {
        let mut guard = self.tables.lock().unwrap();
        f(&mut guard, &self.regime)
    }

    /// Block weight `w(j)`, canonically normalized to `w(1) = 1`.
    pub fn weight_w(&self, j: u32) -> Result<S> {
        if j < 1 {
            return Err(Error::OutOfRange("w(j) needs j >= 1".into()));
        }
        if matches!(self.regime, Regime::Comb) {
            return Err(Error::Unsupported(
                "the comb model has no Gibbs weight table".into(),
            ));
        }
        self.with_tables(|t, r| {
            t.ensure_w(r, j)?;
            Ok(t.w[j as usize - 1].clone())
        })
    }

    /// Arity weight `a(k)`, canonically normalized to `a(2) = 1`. Binary
    /// regimes yield `a(2) = 1` and `a(k) = 0` for `k >= 3`.
    pub fn factor_a(&self, k: u32) -> Result<S> {
        if k < 2 {
            return Err(Error::OutOfRange("a(k) needs k >= 2".into()));
        }
        if matches!(self.regime, Regime::Comb) {
            return Err(Error::Unsupported(
                "the comb model has no Gibbs weight table".into(),
            ));
        }
        self.with_tables(|t, r| {
            t.ensure_a(r, k)?;
            Ok(t.a[k as usize - 2].clone())
        })
    }

    /// Normalization constant for total size `n >= 2`: the binary `Z(n)` or
    /// the multifurcating `c(n)`, computed as `sum_k a(k) B_{n,k}(w)` over
    /// partial Bell polynomials in the block weights.
    pub fn norm(&self, n: u32) -> Result<S> {
        if n < 2 {
            return Err(Error::OutOfRange("normalization needs n >= 2".into()));
        }
        if matches!(self.regime, Regime::Comb) {
            return Err(Error::Unsupported(
                "the comb model has no Gibbs normalization".into(),
            ));
        }
        self.with_tables(|t, r| {
            t.ensure_norm(r, n)?;
            Ok(t.norm[n as usize - 2].clone())
        })
    }

    /// Per-vertex weight `psi(n) = w(n)/Z(n)` (`psi(1) = 1`) in the
    /// tree-probability factorization of binary Gibbs models.
    pub fn psi(&self, n: u32) -> Result<S> {
        if !self.is_binary() || !self.is_gibbs() {
            return Err(Error::Unsupported(
                "psi is defined for binary Gibbs models only".into(),
            ));
        }
        if n < 1 {
            return Err(Error::OutOfRange("psi(n) needs n >= 1".into()));
        }
        if n == 1 {
            return Ok(S::one());
        }
        Ok(self.weight_w(n)? / self.norm(n)?)
    }

    /// Probability that the root partition equals a *fixed* labeled partition
    /// with the given block sizes. Symmetric in its arguments; zero when the
    /// number of blocks exceeds the regime bound.
    pub fn split_prob(&self, sizes: &[u32]) -> Result<S> {
        if sizes.len() < 2 {
            return Err(Error::OutOfRange(
                "a split needs at least two blocks".into(),
            ));
        }
        if sizes.iter().any(|&s| s < 1) {
            return Err(Error::OutOfRange("block sizes must be >= 1".into()));
        }
        let k = sizes.len() as u32;
        let n: u32 = sizes.iter().sum();
        match &self.regime {
            Regime::Comb => {
                if k != 2 {
                    return Ok(S::zero());
                }
                let (i, j) = (sizes[0], sizes[1]);
                if n == 2 {
                    Ok(S::one())
                } else if i == 1 || j == 1 {
                    Ok(S::one() / S::from_int(n as i64))
                } else {
                    Ok(S::zero())
                }
            }
            _ => {
                if let Some(m) = self.max_blocks() {
                    if k > m {
                        return Ok(S::zero());
                    }
                }
                let mut p = self.factor_a(k)?;
                if p.is_zero() {
                    return Ok(p);
                }
                for &s in sizes {
                    p = p * self.weight_w(s)?;
                    if p.is_zero() {
                        return Ok(p);
                    }
                }
                Ok(p / self.norm(n)?)
            }
        }
    }

    /// Probability of a fixed fragmentation tree: the product over internal
    /// vertices of the splitting probability of the child-size composition.
    ///
    /// Structurally binary families (beta split, comb, raw tables) reject
    /// multifurcating trees outright; in the bounded Gibbs regimes an
    /// over-wide vertex just has probability zero through `a(k) = 0`.
    pub fn tree_prob(&self, t: &FragTree) -> Result<S> {
        let hard_binary = matches!(
            self.regime,
            Regime::BetaSplit(_) | Regime::Comb | Regime::RawBinary { .. }
        );
        let mut p = S::one();
        for v in t.vertices() {
            if v.is_leaf() {
                continue;
            }
            if hard_binary && v.children().len() > 2 {
                return Err(Error::Unsupported(format!(
                    "binary model applied to a vertex with {} children",
                    v.children().len()
                )));
            }
            let sizes: Vec<u32> = v.children().iter().map(|c| c.size()).collect();
            p = p * self.split_prob(&sizes)?;
            if p.is_zero() {
                return Ok(p);
            }
        }
        Ok(p)
    }

    /// Probability of a binary tree via the per-vertex factorization
    /// `(1/w(n)) * prod_{A in t} psi(#A)`. Agrees exactly with
    /// [`tree_prob`](Self::tree_prob) on binary Gibbs models.
    pub fn tree_prob_psi(&self, t: &FragTree) -> Result<S> {
        let mut p = S::one() / self.weight_w(t.size())?;
        for v in t.vertices() {
            p = p * self.psi(v.size())?;
        }
        Ok(p)
    }

    /// `W_n = w(n+1)/w(n)`; errors when `w(n) = 0` (the ratio is then
    /// meaningless, e.g. growth through a zero-probability tree).
    pub(crate) fn w_ratio(&self, n: u32) -> Result<S> {
        let wn = self.weight_w(n)?;
        if wn.is_zero() {
            return Err(Error::ZeroProbabilityTree(format!(
                "w({n}) = 0 in this regime"
            )));
        }
        Ok(self.weight_w(n + 1)? / wn)
    }

    /// `C_n = c(n+1)/c(n)`.
    pub(crate) fn c_ratio(&self, n: u32) -> Result<S> {
        Ok(self.norm(n + 1)? / self.norm(n)?)
    }

    /// `A_k = a(k+1)/a(k)`; errors when `a(k) = 0`.
    pub(crate) fn a_ratio(&self, k: u32) -> Result<S> {
        let ak = self.factor_a(k)?;
        if ak.is_zero() {
            return Err(Error::ZeroProbabilityTree(format!(
                "a({k}) = 0 in this regime"
            )));
        }
        Ok(self.factor_a(k + 1)? / ak)
    }
}

/// Memoized sequences for one model.
struct Tables<S> {
    /// `w[j-1] = w(j)`, `j >= 1`.
    w: Vec<S>,
    /// `a[k-2] = a(k)`, `k >= 2`.
    a: Vec<S>,
    /// `norm[n-2] = Z(n)` or `c(n)`, `n >= 2`.
    norm: Vec<S>,
    /// Partial Bell polynomial rows `bell[n][k] = B_{n,k}(w)` (multifurcating
    /// regimes only).
    bell: Vec<Vec<S>>,
}

impl<S: Scalar> Tables<S> {
    fn new() -> Self {
        Tables {
            w: Vec::new(),
            a: Vec::new(),
            norm: Vec::new(),
            bell: Vec::new(),
        }
    }

    fn ensure_w(&mut self, regime: &Regime<S>, j_max: u32) -> Result<()> {
        if let Regime::RawBinary { weights } = regime {
            if j_max as usize > weights.len() {
                return Err(Error::OutOfRange(format!(
                    "raw weight table has {} entries, needs w({j_max})",
                    weights.len()
                )));
            }
            if self.w.len() < weights.len() {
                self.w = weights.clone();
            }
            return Ok(());
        }
        if self.w.is_empty() {
            self.w.push(S::one()); // w(1) = 1 canonical
        }
        while (self.w.len() as u32) < j_max {
            let j = self.w.len() as u32; // computing w(j+1) = W_j * w(j)
            let next = match regime {
                Regime::BetaSplit(BetaParam::Finite(beta)) => {
                    self.w[j as usize - 1].clone() * (S::from_int(j as i64 + 1) + beta.clone())
                }
                Regime::BetaSplit(BetaParam::Infinite) | Regime::CouponCollector { .. } => {
                    S::one()
                }
                Regime::EwensPitman { alpha, .. } => {
                    self.w[j as usize - 1].clone() * (S::from_int(j as i64) - alpha.clone())
                }
                Regime::SingletonSplit => S::zero(),
                Regime::Comb | Regime::RawBinary { .. } => unreachable!(),
            };
            self.w.push(next);
        }
        Ok(())
    }

    fn ensure_a(&mut self, regime: &Regime<S>, k_max: u32) -> Result<()> {
        if self.a.is_empty() {
            self.a.push(S::one()); // a(2) = 1 canonical
        }
        while (self.a.len() as u32) + 1 < k_max {
            let k = self.a.len() as u32 + 1; // computing a(k+1) = A_k * a(k)
            let next = match regime {
                Regime::EwensPitman { alpha, theta, .. } => {
                    self.a[k as usize - 2].clone()
                        * (theta.clone() + S::from_int(k as i64) * alpha.clone())
                }
                Regime::CouponCollector { m } => {
                    self.a[k as usize - 2].clone() * (S::from_int(*m as i64) - S::from_int(k as i64))
                }
                // deterministic singleton split: a cancels from every
                // probability, fix a == 1
                Regime::SingletonSplit => S::one(),
                // structurally binary regimes
                Regime::BetaSplit(_) | Regime::RawBinary { .. } => S::zero(),
                Regime::Comb => unreachable!(),
            };
            self.a.push(next);
        }
        Ok(())
    }

    fn ensure_norm(&mut self, regime: &Regime<S>, n_max: u32) -> Result<()> {
        let binary = matches!(
            regime,
            Regime::BetaSplit(_)
                | Regime::RawBinary { .. }
                | Regime::EwensPitman {
                    class: EpClass::Binary,
                    ..
                }
        ) || matches!(regime, Regime::CouponCollector { m: 2 });
        while (self.norm.len() as u32) + 1 < n_max {
            let n = self.norm.len() as u32 + 2; // computing Z(n) / c(n)
            // the Bell recurrence needs w up to n (its k = 1 row); the
            // binary sum only w(n-1), which matters for short raw tables
            self.ensure_w(regime, if binary { n - 1 } else { n })?;
            let value = if binary {
                // Z(n) = sum_{k=1}^{n-1} C(n-1, k-1) w(k) w(n-k)
                let mut z = S::zero();
                for k in 1..n {
                    let c = S::from_int(binomial((n - 1) as u64, (k - 1) as u64) as i64);
                    z = z + c * self.w[k as usize - 1].clone() * self.w[(n - k) as usize - 1].clone();
                }
                z
            } else {
                self.ensure_a(regime, n)?;
                self.ensure_bell(n);
                // c(n) = sum_{k=2}^{n} a(k) B_{n,k}(w)
                let mut c = S::zero();
                for k in 2..=n {
                    c = c + self.a[k as usize - 2].clone()
                        * self.bell[n as usize][k as usize].clone();
                }
                c
            };
            self.norm.push(value);
        }
        Ok(())
    }

    /// Fill Bell rows up to `n` with the block-of-the-last-element recurrence
    /// `B_{n,k} = sum_j C(n-1, j-1) w(j) B_{n-j, k-1}`.
    fn ensure_bell(&mut self, n_max: u32) {
        if self.bell.is_empty() {
            self.bell.push(vec![S::one()]); // B_{0,0} = 1
        }
        while (self.bell.len() as u32) <= n_max {
            let n = self.bell.len() as u32;
            let mut row = vec![S::zero(); n as usize + 1];
            for k in 1..=n {
                let mut acc = S::zero();
                for j in 1..=(n - k + 1) {
                    let c = S::from_int(binomial((n - 1) as u64, (j - 1) as u64) as i64);
                    acc = acc
                        + c * self.w[j as usize - 1].clone()
                            * self.bell[(n - j) as usize][k as usize - 1].clone();
                }
                row[k as usize] = acc;
            }
            self.bell.push(row);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::LabelSet;
    use crate::{ExactModel, Rational};
    use num_traits::{One, Zero};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn beta(n: i64, d: i64) -> ExactModel {
        ExactModel::beta_split(rat(n, d)).unwrap()
    }

    /// Independent oracle: normalization as a brute-force sum over all set
    /// partitions of [n] with at least two blocks of a(k) * prod w(#block).
    fn norm_by_partitions(model: &ExactModel, n: u32) -> Rational {
        let mut total = Rational::zero();
        crate::enumerate::for_each_set_partition(LabelSet::full(n), 2, &mut |blocks| {
            let mut term = model.factor_a(blocks.len() as u32).unwrap();
            for b in blocks {
                term *= model.weight_w(b.len()).unwrap();
            }
            total += term;
        });
        total
    }

    #[test]
    fn admissibility() {
        assert!(ExactModel::beta_split(rat(-2, 1)).is_err());
        assert!(ExactModel::beta_split(rat(-5, 2)).is_err());
        assert!(ExactModel::beta_split(rat(-3, 2)).is_ok());
        assert!(ExactModel::coupon_collector(1).is_err());
        assert!(ExactModel::coupon_collector(2).is_ok());

        // EP classes
        let m = ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap();
        assert!(matches!(
            m.regime(),
            Regime::EwensPitman {
                class: EpClass::Unbounded,
                ..
            }
        ));
        let m = ExactModel::ewens_pitman(rat(-1, 2), rat(3, 2)).unwrap();
        assert!(matches!(
            m.regime(),
            Regime::EwensPitman {
                class: EpClass::Bounded { m: 3 },
                ..
            }
        ));
        let m = ExactModel::ewens_pitman(rat(1, 2), rat(-1, 1)).unwrap();
        assert!(matches!(
            m.regime(),
            Regime::EwensPitman {
                class: EpClass::Binary,
                ..
            }
        ));
        assert!(m.is_binary());
        // theta = -2*alpha with alpha < 0 is the m = 2 boundary: binary
        let m = ExactModel::ewens_pitman(rat(-1, 1), rat(2, 1)).unwrap();
        assert!(m.is_binary());
        // rejected: alpha < 0 with non-integer -theta/alpha
        assert!(ExactModel::ewens_pitman(rat(-1, 2), rat(5, 4)).is_err());
        // rejected: 0 <= alpha < 1 with theta < -2*alpha
        assert!(ExactModel::ewens_pitman(rat(1, 2), rat(-3, 2)).is_err());
        // rejected: alpha >= 1
        assert!(ExactModel::ewens_pitman(rat(3, 2), rat(1, 1)).is_err());
    }

    #[test]
    fn weight_w_examples() {
        // beta = -3/2, j = 4: 15/8
        assert_eq!(beta(-3, 2).weight_w(4).unwrap(), rat(15, 8));
        // beta = 0, j = 5: 120
        assert_eq!(beta(0, 1).weight_w(5).unwrap(), rat(120, 1));
        // w(1) = 1 everywhere
        for m in [
            beta(-3, 2),
            ExactModel::beta_split_infinite(),
            ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap(),
            ExactModel::coupon_collector(3).unwrap(),
            ExactModel::singleton_split(),
        ] {
            assert!(m.weight_w(1).unwrap().is_one());
        }
        // singleton split kills all larger blocks
        let s = ExactModel::singleton_split();
        assert!(s.weight_w(2).unwrap().is_zero());
        assert!(s.weight_w(5).unwrap().is_zero());
    }

    #[test]
    fn factor_a_examples() {
        // EP(1/2, 0): a(3) = theta + 2 alpha = 1
        let ep = ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap();
        assert_eq!(ep.factor_a(3).unwrap(), rat(1, 1));
        // coupon m = 3: a(3) = 1, a(4) = 0
        let cc = ExactModel::coupon_collector(3).unwrap();
        assert_eq!(cc.factor_a(3).unwrap(), rat(1, 1));
        assert!(cc.factor_a(4).unwrap().is_zero());
        // a(2) = 1 everywhere
        for m in [beta(5, 1), ep, cc, ExactModel::singleton_split()] {
            assert!(m.factor_a(2).unwrap().is_one());
        }
        // binary: a(k >= 3) = 0
        assert!(beta(0, 1).factor_a(3).unwrap().is_zero());
    }

    #[test]
    fn theorem8_regime_boundary() {
        // a(m+1) = 0 exactly when theta = -m alpha, alpha < 0
        let m3 = ExactModel::ewens_pitman(rat(-1, 2), rat(3, 2)).unwrap();
        assert!(!m3.factor_a(3).unwrap().is_zero());
        assert!(m3.factor_a(4).unwrap().is_zero());
        assert!(m3.factor_a(5).unwrap().is_zero());
        let m4 = ExactModel::ewens_pitman(rat(-1, 2), rat(2, 1)).unwrap();
        assert!(!m4.factor_a(4).unwrap().is_zero());
        assert!(m4.factor_a(5).unwrap().is_zero());
    }

    #[test]
    fn norm_examples() {
        // beta = inf, n = 6: 2^5 - 1 = 31
        assert_eq!(
            ExactModel::beta_split_infinite().norm(6).unwrap(),
            rat(31, 1)
        );
        // beta = -1, n = 4: 3! * (1 + 1/2 + 1/3) = 11
        assert_eq!(beta(-1, 1).norm(4).unwrap(), rat(11, 1));
        // EP(1/2, 0): c(3) = 5/2
        let ep = ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap();
        assert_eq!(ep.norm(3).unwrap(), rat(5, 2));
        // singleton split: c(n) = 1
        assert_eq!(ExactModel::singleton_split().norm(5).unwrap(), rat(1, 1));
    }

    #[test]
    fn norm_matches_partition_oracle() {
        let models = [
            beta(-3, 2),
            beta(0, 1),
            ExactModel::beta_split_infinite(),
            ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap(),
            ExactModel::ewens_pitman(rat(-1, 2), rat(3, 2)).unwrap(),
            ExactModel::coupon_collector(3).unwrap(),
            ExactModel::singleton_split(),
        ];
        for m in &models {
            for n in 2..=7 {
                assert_eq!(
                    m.norm(n).unwrap(),
                    norm_by_partitions(m, n),
                    "model {} at n = {n}",
                    m.describe()
                );
            }
        }
    }

    #[test]
    fn psi_examples() {
        // psi(2) = 2 + beta
        for (num, den) in [(-3i64, 2i64), (-1, 1), (0, 1), (7, 3)] {
            let m = beta(num, den);
            assert_eq!(m.psi(2).unwrap(), rat(2 * den + num, den));
        }
        // psi(3) = (3 + beta)/3 and psi(4) = (3+beta)(4+beta)/(18+7beta)
        let b = rat(7, 3);
        let m = ExactModel::beta_split(b.clone()).unwrap();
        let three = Rational::from_int(3);
        let four = Rational::from_int(4);
        assert_eq!(
            m.psi(3).unwrap(),
            (three.clone() + b.clone()) / three.clone()
        );
        assert_eq!(
            m.psi(4).unwrap(),
            (three + b.clone()) * (four + b.clone())
                / (Rational::from_int(18) + Rational::from_int(7) * b)
        );
        // beta = -3/2: psi == 1/2 for n >= 2
        let u = beta(-3, 2);
        for n in 2..=10 {
            assert_eq!(u.psi(n).unwrap(), rat(1, 2));
        }
        // beta = inf: psi(4) = 1/7
        assert_eq!(ExactModel::beta_split_infinite().psi(4).unwrap(), rat(1, 7));
        // psi(1) = 1
        assert!(beta(0, 1).psi(1).unwrap().is_one());
        // multifurcating regime refuses
        let ep = ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap();
        assert!(matches!(ep.psi(3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn split_prob_examples() {
        // any binary model: p(1,1) = 1
        for m in [
            beta(-3, 2),
            beta(5, 1),
            ExactModel::beta_split_infinite(),
            ExactModel::comb(),
        ] {
            assert!(m.split_prob(&[1, 1]).unwrap().is_one());
        }
        // beta = 0: p(1,2) = 1/3
        assert_eq!(beta(0, 1).split_prob(&[1, 2]).unwrap(), rat(1, 3));
        // EP(1/2,0): p(1,1,1) = 2/5, p(1,2) = 1/5
        let ep = ExactModel::ewens_pitman(rat(1, 2), rat(0, 1)).unwrap();
        assert_eq!(ep.split_prob(&[1, 1, 1]).unwrap(), rat(2, 5));
        assert_eq!(ep.split_prob(&[1, 2]).unwrap(), rat(1, 5));
        // coupon m = 3: p(1,1,1) = 1/4
        let cc = ExactModel::coupon_collector(3).unwrap();
        assert_eq!(cc.split_prob(&[1, 1, 1]).unwrap(), rat(1, 4));
        // comb: p(1, n-1) = 1/n for n >= 3, p(i,j) = 0 off the comb
        let comb = ExactModel::comb();
        assert_eq!(comb.split_prob(&[1, 4]).unwrap(), rat(1, 5));
        assert!(comb.split_prob(&[2, 3]).unwrap().is_zero());
        // block count beyond the regime bound: zero, not an error
        assert!(beta(0, 1).split_prob(&[1, 1, 1]).unwrap().is_zero());
        assert!(cc.split_prob(&[1, 1, 1, 1]).unwrap().is_zero());
        // singleton split
        let ss = ExactModel::singleton_split();
        assert!(ss.split_prob(&[1, 1, 1, 1, 1]).unwrap().is_one());
        assert!(ss.split_prob(&[2, 3]).unwrap().is_zero());
        // errors
        assert!(beta(0, 1).split_prob(&[3]).is_err());
        assert!(beta(0, 1).split_prob(&[0, 2]).is_err());
    }

    #[test]
    fn split_prob_is_symmetric() {
        let ep = ExactModel::ewens_pitman(rat(1, 3), rat(1, 6)).unwrap();
        let p1 = ep.split_prob(&[1, 3, 2]).unwrap();
        let p2 = ep.split_prob(&[3, 2, 1]).unwrap();
        let p3 = ep.split_prob(&[2, 1, 3]).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(p2, p3);
    }

    #[test]
    fn forced_p12_is_one_third() {
        // normalization at n = 3 with symmetry forces p(1,2) = 1/3 for every
        // binary model
        let models = [
            beta(-3, 2),
            beta(-1, 1),
            beta(0, 1),
            beta(17, 5),
            ExactModel::beta_split_infinite(),
            ExactModel::comb(),
            ExactModel::ewens_pitman(rat(1, 2), rat(-1, 1)).unwrap(),
            ExactModel::coupon_collector(2).unwrap(),
            ExactModel::raw_binary(vec![rat(1, 1), rat(1, 1), rat(2, 1), rat(3, 1)]).unwrap(),
        ];
        for m in models {
            assert_eq!(m.split_prob(&[1, 2]).unwrap(), rat(1, 3), "{}", m.describe());
        }
    }

    #[test]
    fn reparameterization_invariance() {
        // scaling w(k) by a * b^k leaves every split probability unchanged
        let base: Vec<Rational> = (1..=6).map(|j| beta(0, 1).weight_w(j).unwrap()).collect();
        let a = rat(5, 7);
        let b = rat(3, 2);
        let scaled: Vec<Rational> = base
            .iter()
            .enumerate()
            .map(|(i, w)| a.clone() * b.pow_u(i as u32 + 1) * w.clone())
            .collect();
        let m0 = ExactModel::raw_binary(base).unwrap();
        let m1 = ExactModel::raw_binary(scaled).unwrap();
        for i in 1..=3u32 {
            for j in i..=3u32 {
                assert_eq!(
                    m0.split_prob(&[i, j]).unwrap(),
                    m1.split_prob(&[i, j]).unwrap()
                );
            }
        }
    }

    #[test]
    fn tree_prob_examples() {
        use crate::enumerate::for_each_binary;
        // beta = -3/2: uniform 1/15 on all binary fragmentations of [4]
        let u = beta(-3, 2);
        let mut count = 0;
        for_each_binary(4, &mut |t| {
            assert_eq!(u.tree_prob(t).unwrap(), rat(1, 15));
            count += 1;
        })
        .unwrap();
        assert_eq!(count, 15);

        // beta = 0, comb on [3]: p(1,2) * p(1,1) = 1/3
        let comb3 = FragTree::node(vec![
            FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(2)]).unwrap(),
            FragTree::leaf(3),
        ])
        .unwrap();
        assert_eq!(beta(0, 1).tree_prob(&comb3).unwrap(), rat(1, 3));

        // n = 2 tree has probability 1 under every model
        let pair = FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(2)]).unwrap();
        for m in [
            beta(0, 1),
            ExactModel::comb(),
            ExactModel::ewens_pitman(rat(1, 2), rat(1, 2)).unwrap(),
            ExactModel::singleton_split(),
        ] {
            assert!(m.tree_prob(&pair).unwrap().is_one());
        }
    }

    #[test]
    fn tree_prob_psi_equals_split_product() {
        use crate::enumerate::for_each_binary;
        for m in [
            beta(-3, 2),
            beta(-1, 1),
            beta(0, 1),
            beta(2, 1),
            ExactModel::beta_split_infinite(),
        ] {
            for n in 2..=6 {
                for_each_binary(n, &mut |t| {
                    assert_eq!(
                        m.tree_prob(t).unwrap(),
                        m.tree_prob_psi(t).unwrap(),
                        "model {} tree {t}",
                        m.describe()
                    );
                })
                .unwrap();
            }
        }
        // full sweep to n = 8 for one model
        let m = beta(0, 1);
        for n in 7..=8 {
            for_each_binary(n, &mut |t| {
                assert_eq!(m.tree_prob(t).unwrap(), m.tree_prob_psi(t).unwrap());
            })
            .unwrap();
        }
    }

    #[test]
    fn op_domain_errors() {
        let m = beta(0, 1);
        assert!(m.weight_w(0).is_err());
        assert!(m.factor_a(1).is_err());
        assert!(m.norm(1).is_err());
        assert!(m.psi(0).is_err());
        let comb = ExactModel::comb();
        assert!(comb.weight_w(2).is_err());
        assert!(comb.factor_a(2).is_err());
        assert!(comb.norm(3).is_err());
        assert!(comb.psi(3).is_err());
    }

    #[test]
    fn binary_model_rejects_multifurcating_tree() {
        let star = FragTree::node(vec![FragTree::leaf(1), FragTree::leaf(2), FragTree::leaf(3)])
            .unwrap();
        assert!(beta(0, 1).tree_prob(&star).is_err());
        // bounded EP regime: zero, not an error
        let ep = ExactModel::ewens_pitman(rat(-1, 2), rat(3, 2)).unwrap();
        let star5 = FragTree::node((1..=5).map(FragTree::leaf).collect()).unwrap();
        assert!(ep.tree_prob(&star5).unwrap().is_zero());
    }

    #[test]
    fn coupon_m2_matches_beta_infinite() {
        let cc = ExactModel::coupon_collector(2).unwrap();
        let bi = ExactModel::beta_split_infinite();
        for n in 2..=10u32 {
            for i in 1..n {
                assert_eq!(
                    cc.split_prob(&[i, n - i]).unwrap(),
                    bi.split_prob(&[i, n - i]).unwrap()
                );
            }
        }
    }

    #[test]
    fn raw_table_rejects_bad_input() {
        assert!(ExactModel::raw_binary(vec![rat(1, 1)]).is_err());
        assert!(ExactModel::raw_binary(vec![rat(1, 1), rat(0, 1)]).is_err());
        assert!(ExactModel::raw_binary(vec![rat(1, 1), rat(-1, 2)]).is_err());
        // beyond the table: error, not silence
        let m = ExactModel::raw_binary(vec![rat(1, 1), rat(1, 1), rat(2, 1)]).unwrap();
        assert!(m.weight_w(4).is_err());
    }

    #[test]
    fn float_mode_basics() {
        let m = crate::FloatModel::beta_split(2.7).unwrap();
        let p = m.split_prob(&[1, 2]).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.numeric_mode(), "float");
        let ep = crate::FloatModel::ewens_pitman(-0.5, 1.5).unwrap();
        assert!(matches!(
            ep.regime(),
            Regime::EwensPitman {
                class: EpClass::Bounded { m: 3 },
                ..
            }
        ));
    }
}
