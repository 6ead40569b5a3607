//! Split-rate sequences for the continuous-time embedding.
//!
//! A consistent model carries independent exponential edge lengths: the edge
//! below a block of size `m` has rate `lambda_m`, with `lambda_1 = 0`,
//! `lambda_2` free, and the rest forced by the thinning relation
//! `lambda_{n+1} (1 - p(n,1)) = lambda_n`. For the finite beta family the
//! recursion has the closed form
//! `lambda_n = lambda_2 Z(n) / prod_{j=0}^{n-3} (2 beta + 4 + j)`,
//! implemented as a rational product and checked against the recursion.
//!
//! The converse direction recovers the splitting rule from the rates by an
//! alternating binomial sum; a candidate sequence is accepted only if every
//! recovered probability is non-negative and every row normalizes to one.
//! Valid sequences have completely alternating finite differences (a
//! necessary condition only; the inversion is the real gate), and arise
//! exactly from mixtures `lambda_n = n c + int (1 - x^n - (1-x)^n) nu(dx)`;
//! [`lambda_from_measure`] evaluates that integral for the beta measures by
//! adaptive quadrature.

use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::model::{BetaParam, GibbsModel, Regime};
use crate::sample::sample_growth;
use crate::scalar::Scalar;
use crate::tree::FragTree;
use num_integer::binomial;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use std::collections::BTreeMap;

/// Memoized rates `lambda_2 .. lambda_n` for one model.
#[derive(Debug, Clone)]
pub struct RateTable<S> {
    lambda2: S,
    /// `values[i] = lambda_{i+2}`.
    values: Vec<S>,
}

impl<S: Scalar> RateTable<S> {
    /// Rates from the thinning recursion `lambda_{j+1} = lambda_j / (1 - p(j,1))`.
    pub fn for_model(model: &GibbsModel<S>, lambda2: S, n_max: u32) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::OutOfRange("rates start at n = 2".into()));
        }
        if !(lambda2 > S::zero()) {
            return Err(Error::OutOfRange("lambda_2 must be positive".into()));
        }
        let mut values = vec![lambda2.clone()];
        for j in 2..n_max {
            let p = model.split_prob(&[j, 1])?;
            let prev = values.last().unwrap().clone();
            values.push(prev / (S::one() - p));
        }
        Ok(RateTable { lambda2, values })
    }

    pub fn lambda2(&self) -> &S {
        &self.lambda2
    }

    pub fn max_n(&self) -> u32 {
        self.values.len() as u32 + 1
    }

    /// `lambda_n` for `2 <= n <= max_n`; `lambda_1 = 0`.
    pub fn lambda(&self, n: u32) -> S {
        if n == 1 {
            return S::zero();
        }
        self.values[n as usize - 2].clone()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}

/// Convenience: a single rate by the recursion.
pub fn rate_lambda<S: Scalar>(model: &GibbsModel<S>, n: u32, lambda2: S) -> Result<S> {
    Ok(RateTable::for_model(model, lambda2, n)?.lambda(n))
}

/// Closed-form rate for the finite beta family, as a rational product.
pub fn rate_lambda_closed<S: Scalar>(model: &GibbsModel<S>, n: u32, lambda2: S) -> Result<S> {
    let beta = match model.regime() {
        Regime::BetaSplit(BetaParam::Finite(b)) => b.clone(),
        _ => {
            return Err(Error::Unsupported(
                "closed-form rates are for the finite beta family".into(),
            ))
        }
    };
    if n < 2 {
        return Err(Error::OutOfRange("rates start at n = 2".into()));
    }
    let mut denom = S::one();
    if n >= 3 {
        for j in 0..=(n - 3) {
            denom = denom * (beta.clone() + beta.clone() + S::from_int(4 + j as i64));
        }
    }
    Ok(lambda2 * model.norm(n)? / denom)
}

/// Splitting rule recovered from a rate sequence.
#[derive(Debug, Clone)]
pub struct InvertedRates<S> {
    /// `rows[r][k-1] = p(k, n-k)` for `n = r + 2`, `1 <= k <= n-1`.
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> InvertedRates<S> {
    pub fn max_n(&self) -> u32 {
        self.rows.len() as u32 + 1
    }

    pub fn p(&self, i: u32, j: u32) -> &S {
        &self.rows[(i + j) as usize - 2][i as usize - 1]
    }

    pub fn row(&self, n: u32) -> &[S] {
        &self.rows[n as usize - 2]
    }
}

/// Recover the unique exchangeable splitting rule consistent with the rates
/// `lambda = [lambda_2, lambda_3, ...]` via
/// `p(k, n-k) = (1/lambda_n) sum_{j=0}^{k} (-1)^(k-j+1) C(k,j) lambda_{n-j}`
/// for `k <= n/2` (symmetry fills the rest). Rejects the sequence with a
/// witness if any entry is negative or a row fails to normalize; in float
/// mode both checks use the absolute tolerance `tol`.
pub fn invert_rates<S: Scalar>(lambda: &[S], tol: f64) -> Result<InvertedRates<S>> {
    if lambda.len() < 2 {
        return Err(Error::OutOfRange(
            "need at least lambda_2 and lambda_3".into(),
        ));
    }
    for (i, l) in lambda.iter().enumerate() {
        if !(l > &S::zero()) {
            return Err(Error::InvalidRateSequence(format!(
                "lambda_{} = {l} is not positive",
                i + 2
            )));
        }
    }
    let lam = |n: u32| -> S {
        if n == 1 {
            S::zero()
        } else {
            lambda[n as usize - 2].clone()
        }
    };
    let n_max = lambda.len() as u32 + 1;
    let mut rows = Vec::new();
    for n in 2..=n_max {
        let mut row = vec![S::zero(); n as usize - 1];
        for k in 1..=n / 2 {
            let mut acc = S::zero();
            for j in 0..=k {
                let c = S::from_int(binomial(k as u64, j as u64) as i64);
                let term = c * lam(n - j);
                if (k - j + 1) % 2 == 1 {
                    acc = acc - term;
                } else {
                    acc = acc + term;
                }
            }
            let p = acc / lam(n);
            let negative = if S::EXACT {
                p < S::zero()
            } else {
                p.to_f64() < -tol
            };
            if negative {
                return Err(Error::InvalidRateSequence(format!(
                    "p({k},{}) = {p} < 0 at n = {n}",
                    n - k
                )));
            }
            row[k as usize - 1] = p.clone();
            row[(n - k) as usize - 1] = p;
        }
        // row normalization: sum_k C(n-1,k-1) p(k,n-k) must be 1
        let mut total = S::zero();
        for k in 1..n {
            let c = S::from_int(binomial((n - 1) as u64, (k - 1) as u64) as i64);
            total = total + c * row[k as usize - 1].clone();
        }
        let normalized = if S::EXACT {
            total.is_one()
        } else {
            (total.to_f64() - 1.0).abs() <= tol
        };
        if !normalized {
            return Err(Error::InvalidRateSequence(format!(
                "row n = {n} sums to {total}, not 1 \
                 (exchangeability forces lambda_3 = (3/2) lambda_2)"
            )));
        }
        rows.push(row);
    }
    Ok(InvertedRates { rows })
}

/// Result of the alternating-differences check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CmReport {
    pub order: u32,
    pub pass: bool,
    /// First violation as (difference order, offset in the sequence).
    pub violation: Option<(u32, usize)>,
}

/// Check discrete complete alternation: the k-th forward differences of
/// `lambda = [lambda_2, lambda_3, ...]` carry sign `(-1)^(k+1)` (zeros
/// allowed) for `k = 1..=order`.
pub fn check_complete_monotonicity<S: Scalar>(lambda: &[S], order: u32) -> CmReport {
    let mut diffs: Vec<S> = lambda.to_vec();
    for k in 1..=order {
        if diffs.len() < 2 {
            break;
        }
        diffs = diffs
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .collect();
        for (i, d) in diffs.iter().enumerate() {
            let ok = if k % 2 == 1 {
                !(d < &S::zero())
            } else {
                !(d > &S::zero())
            };
            if !ok {
                return CmReport {
                    order,
                    pass: false,
                    violation: Some((k, i)),
                };
            }
        }
    }
    CmReport {
        order,
        pass: true,
        violation: None,
    }
}

/// Rate of a size-n block under the beta split measure `x^beta (1-x)^beta dx`:
/// numerically integrates `(1 - x^n - (1-x)^n)` against it and rescales so
/// that `n = 2` gives `lambda2`. Matches the recursion rates of the same
/// beta model.
pub fn lambda_from_measure(beta: f64, n: u32, lambda2: f64) -> Result<f64> {
    if !(beta > -2.0) || !beta.is_finite() {
        return Err(Error::OutOfRange(format!("beta = {beta} outside (-2, inf)")));
    }
    if n < 2 {
        return Err(Error::OutOfRange("rates start at n = 2".into()));
    }
    if n == 2 {
        return Ok(lambda2);
    }
    Ok(lambda2 * split_rate_integral(beta, n)? / split_rate_integral(beta, 2)?)
}

/// `2 int_0^(1/2) (1 - x^m - (1-x)^m) x^beta (1-x)^beta dx`, with a power
/// substitution at the origin taming the `x^(beta+1)` behavior of the
/// integrand.
fn split_rate_integral(beta: f64, m: u32) -> Result<f64> {
    let g = move |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        (1.0 - x.powi(m as i32) - (1.0 - x).powi(m as i32)) * x.powf(beta) * (1.0 - x).powf(beta)
    };
    // integrand ~ m x^(beta+1) near 0; substitute x = u^q so the transformed
    // integrand has at least two continuous derivatives at the origin
    let q = sub_exponent(beta + 2.0);
    let f = move |u: f64| {
        let x = u.powi(q as i32);
        q as f64 * u.powi(q as i32 - 1) * g(x)
    };
    let upper = 0.5f64.powf(1.0 / q as f64);
    let rough = crate::measures::adaptive_simpson(&f, 0.0, upper, 1e-6, 30)?;
    let tight =
        crate::measures::adaptive_simpson(&f, 0.0, upper, 1e-12 * rough.abs().max(1e-3), 52)?;
    Ok(2.0 * tight)
}

/// Smallest integer q with q * a >= 3 (and q >= 1).
pub(crate) fn sub_exponent(a: f64) -> u32 {
    if a >= 3.0 {
        1
    } else {
        (3.0 / a).ceil() as u32
    }
}

/// A fragmentation tree with exponential edge lengths: the edge below each
/// vertex `A` with `#A >= 2` (the branch joining it to its parent; a stem for
/// the root) gets an independent `Exp(lambda_{#A})` length. Leaf edges have
/// rate `lambda_1 = 0` and carry no length.
#[derive(Debug, Clone)]
pub struct TimedTree {
    pub tree: FragTree,
    lengths: BTreeMap<LabelSet, f64>,
}

impl TimedTree {
    pub fn length_below(&self, vertex: LabelSet) -> Option<f64> {
        self.lengths.get(&vertex).copied()
    }

    pub fn lengths(&self) -> impl Iterator<Item = (&LabelSet, &f64)> {
        self.lengths.iter()
    }
}

/// Sample a tree by growth and attach exponential edge lengths with rates
/// `lambda2 * lambda_{#A}` (table computed at `lambda_2 = 1` and scaled).
pub fn sample_timed<S: Scalar, R: Rng + ?Sized>(
    model: &GibbsModel<S>,
    n: u32,
    lambda2: f64,
    rng: &mut R,
) -> Result<TimedTree> {
    if !(lambda2 > 0.0) {
        return Err(Error::OutOfRange("lambda_2 must be positive".into()));
    }
    let tree = sample_growth(model, n, rng)?;
    let table = RateTable::for_model(model, S::one(), n.max(2))?;
    let mut lengths = BTreeMap::new();
    for v in tree.vertices() {
        if v.size() < 2 {
            continue;
        }
        let rate = lambda2 * table.lambda(v.size()).to_f64();
        let exp = Exp::new(rate).map_err(|_| Error::OutOfRange(format!("bad rate {rate}")))?;
        lengths.insert(v.label(), exp.sample(rng));
    }
    Ok(TimedTree { tree, lengths })
}
