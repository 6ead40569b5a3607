//! Integral representations of splitting rules: beta moments, factorization
//! structure, and paintbox Monte Carlo.
//!
//! Every consistent binary splitting rule is a normalized mixture
//! `p(i,j) ~ int x^i (1-x)^j nu(dx)` for a symmetric measure `nu` on (0,1);
//! the beta family takes `nu(dx) = x^beta (1-x)^beta dx` (a point mass at 1/2
//! for `beta = inf`). This module evaluates the moments `M(i,j)` in closed
//! form via log-gamma, cross-checks them by adaptive quadrature with an
//! endpoint power substitution, and tests whether a given measure's moment
//! matrix has the product structure `M(i,j) = u(i) u(j) g(i+j)` that a Gibbs
//! rule requires.
//!
//! The factorization test works on cross-ratios: with
//! `R(i,j) = M(i+1,j)/M(i,j+1)` (a ratio of same-total entries, so any
//! total-size factor cancels), product structure holds iff
//! `R(i,j) R(j,k) = R(i,k)` for all indices. A second, stricter test checks
//! the literal rank-one identity `M(i,j) M(i',j') = M(i,j') M(i',j)` with
//! free indices, which only degenerate measures like the point mass at 1/2
//! satisfy; reports carry both results.
//!
//! For the multifurcating families the mixing measure lives on ranked mass
//! partitions; [`paintbox_moment`] estimates the mixture integrand
//! `E[sum over distinct indices of prod_j s_{i_j}^{n_j}]` by Monte Carlo:
//! stick-breaking for the `0 <= alpha < 1, theta > -alpha` range (using the
//! size-biased form of the distinct-index sum, which needs only the first k
//! sticks and is unbiased), a symmetric Dirichlet on `m` parts for
//! `alpha < 0, theta = -m alpha`, and the exact finite computation for the
//! uniform m-point paintbox of the coupon collector.

use crate::error::{Error, Result};
use crate::model::{EpClass, GibbsModel, Regime};
use crate::scalar::Scalar;
use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, Gamma};

/// Log of the gamma function for x > 0 (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Moment `int_0^1 x^(i+beta) (1-x)^(j+beta) dx` of the beta split measure,
/// in closed form via log-gamma; `beta = f64::INFINITY` gives the point mass
/// at 1/2, i.e. `2^-(i+j)`.
pub fn beta_moment(beta: f64, i: u32, j: u32) -> Result<f64> {
    if i < 1 || j < 1 {
        return Err(Error::OutOfRange("moments need i, j >= 1".into()));
    }
    if beta == f64::INFINITY {
        return Ok(0.5f64.powi((i + j) as i32));
    }
    if !(beta > -2.0) || !beta.is_finite() {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} outside (-2, inf]"
        )));
    }
    let a = i as f64 + beta + 1.0;
    let b = j as f64 + beta + 1.0;
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

/// Adaptive Simpson quadrature with Richardson correction; `eps` is an
/// absolute tolerance for the whole interval.
pub(crate) fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    eps: f64,
    max_depth: u32,
) -> Result<f64> {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64> {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * eps {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::QuadratureDivergence);
        }
        let l = rec(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1)?;
        let r = rec(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1)?;
        Ok(l + r)
    }
    if !(b > a) {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, eps, max_depth)
}

/// The same beta moment by adaptive quadrature. The integrand is split at
/// 1/2 and each half is regularized by the power substitution `x = u^q`
/// (q chosen so the transformed integrand is at least C^2 at the endpoint),
/// which tames the `x^beta` singularity for `beta <= -1`. The result agrees
/// with [`beta_moment`] to relative accuracy `tol`.
pub fn quad_moment(beta: f64, i: u32, j: u32, tol: f64) -> Result<f64> {
    if !(beta > -2.0) || !beta.is_finite() {
        return Err(Error::OutOfRange(format!(
            "quadrature needs finite beta > -2, got {beta}"
        )));
    }
    if i < 1 || j < 1 {
        return Err(Error::OutOfRange("moments need i, j >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange("tolerance must be positive".into()));
    }
    let a = i as f64 + beta + 1.0;
    let b = j as f64 + beta + 1.0;
    let left = half_moment(a, b, tol)?;
    let right = half_moment(b, a, tol)?;
    Ok(left + right)
}

/// `int_0^(1/2) x^(a-1) (1-x)^(b-1) dx` via `x = u^q`.
fn half_moment(a: f64, b: f64, tol: f64) -> Result<f64> {
    let q = crate::rates::sub_exponent(a);
    let qa = q as f64;
    let f = move |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = u.powi(q as i32);
        qa * u.powf(qa * a - 1.0) * (1.0 - x).powf(b - 1.0)
    };
    let upper = 0.5f64.powf(1.0 / qa);
    let rough = adaptive_simpson(&f, 0.0, upper, 1e-4, 24)?.abs().max(1e-12);
    adaptive_simpson(&f, 0.0, upper, 0.05 * tol * rough, 52)
}

/// A symmetric split measure on (0, 1).
#[derive(Debug, Clone)]
pub enum MeasureSpec {
    /// `x^beta (1-x)^beta dx`, `beta > -2`.
    Beta(f64),
    /// Point mass at 1/2.
    PointMassHalf,
    /// Finite measure `sum w_i delta_{x_i}`; must be symmetric about 1/2.
    Discrete(Vec<(f64, f64)>),
}

impl MeasureSpec {
    fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::Beta(beta) => {
                if !(*beta > -2.0) || !beta.is_finite() {
                    return Err(Error::OutOfRange(format!("beta = {beta} outside (-2, inf)")));
                }
            }
            MeasureSpec::PointMassHalf => {}
            MeasureSpec::Discrete(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::OutOfRange("discrete measure has no atoms".into()));
                }
                for &(x, w) in atoms {
                    if !(x > 0.0 && x < 1.0) || !(w > 0.0) {
                        return Err(Error::OutOfRange(format!("bad atom ({x}, {w})")));
                    }
                    // symmetry about 1/2
                    let mirrored = atoms
                        .iter()
                        .any(|&(y, v)| (y - (1.0 - x)).abs() < 1e-12 && (v - w).abs() < 1e-12);
                    if !mirrored {
                        return Err(Error::OutOfRange(format!(
                            "measure not symmetric: atom at {x} lacks a mirror at {}",
                            1.0 - x
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `M(i,j) = int x^i (1-x)^j d(nu)`.
    pub fn moment(&self, i: u32, j: u32) -> Result<f64> {
        self.validate()?;
        match self {
            MeasureSpec::Beta(beta) => beta_moment(*beta, i, j),
            MeasureSpec::PointMassHalf => Ok(0.5f64.powi((i + j) as i32)),
            MeasureSpec::Discrete(atoms) => Ok(atoms
                .iter()
                .map(|&(x, w)| w * x.powi(i as i32) * (1.0 - x).powi(j as i32))
                .sum()),
        }
    }
}

/// Dense moment matrix `M(i,j)`, `1 <= i, j <= i_max`.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub i_max: u32,
    entries: Vec<Vec<f64>>,
}

impl MomentMatrix {
    pub fn build(spec: &MeasureSpec, i_max: u32) -> Result<Self> {
        if i_max < 2 {
            return Err(Error::OutOfRange("moment matrix needs i_max >= 2".into()));
        }
        let mut entries = Vec::with_capacity(i_max as usize);
        for i in 1..=i_max {
            let mut row = Vec::with_capacity(i_max as usize);
            for j in 1..=i_max {
                row.push(spec.moment(i, j)?);
            }
            entries.push(row);
        }
        Ok(MomentMatrix { i_max, entries })
    }

    pub fn get(&self, i: u32, j: u32) -> f64 {
        self.entries[i as usize - 1][j as usize - 1]
    }

    /// Largest relative asymmetry |M(i,j) - M(j,i)| / M(i,j).
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..=self.i_max {
            for j in 1..=self.i_max {
                let d = (self.get(i, j) - self.get(j, i)).abs() / self.get(i, j).abs();
                worst = worst.max(d);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FactorizationReport {
    pub i_max: u32,
    pub tol: f64,
    /// Worst violation of the cross-ratio (product-up-to-total-size) test.
    pub gibbs_violation: f64,
    pub gibbs_pass: bool,
    /// Worst violation of the literal rank-one test with free indices.
    pub literal_violation: f64,
    pub literal_pass: bool,
}

/// Test whether the measure's moments factorize as `u(i) u(j) g(i+j)` (the
/// structure a Gibbs splitting rule needs), via the chain cross-ratio
/// identity on `R(i,j) = M(i+1,j)/M(i,j+1)`. Also reports the literal
/// rank-one cross-ratio with free indices, which additionally demands no
/// total-size coupling.
pub fn factorization_check(
    spec: &MeasureSpec,
    i_max: u32,
    tol: f64,
) -> Result<FactorizationReport> {
    if i_max < 3 {
        return Err(Error::OutOfRange("factorization needs i_max >= 3".into()));
    }
    let m = MomentMatrix::build(spec, i_max)?;
    let r = |i: u32, j: u32| m.get(i + 1, j) / m.get(i, j + 1);
    let mut gibbs: f64 = 0.0;
    for i in 1..i_max {
        for j in 1..i_max {
            let v = (r(i, j) * r(j, 1) / r(i, 1) - 1.0).abs();
            gibbs = gibbs.max(v);
        }
    }
    let mut literal: f64 = 0.0;
    for i in 1..=i_max {
        for j in 1..=i_max {
            for ip in 1..=i_max {
                for jp in 1..=i_max {
                    let v = (m.get(i, j) * m.get(ip, jp) / (m.get(i, jp) * m.get(ip, j)) - 1.0)
                        .abs();
                    literal = literal.max(v);
                }
            }
        }
    }
    Ok(FactorizationReport {
        i_max,
        tol,
        gibbs_violation: gibbs,
        gibbs_pass: gibbs <= tol,
        literal_violation: literal,
        literal_pass: literal <= tol,
    })
}

/// Running mean and variance (Welford). Parallel workers each keep one and
/// [`merge`](RunningMoments::merge) their accumulators afterwards.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningMoments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    pub fn merge(&mut self, other: &RunningMoments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let total = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / total as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64 / total as f64);
        self.n = total;
    }
}

/// Monte Carlo estimate of the paintbox integrand expectation
/// `E[sum over distinct (i_1..i_k) of prod_j s_{i_j}^{n_j}]` for the model's
/// mixing measure. Compositions may have `k = 1` (useful as the monochrome
/// normalizer). Exact finite paintboxes return `exact = true` with zero
/// standard error.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PaintboxEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub exact: bool,
}

pub fn paintbox_moment<S: Scalar, R: Rng + ?Sized>(
    model: &GibbsModel<S>,
    composition: &[u32],
    samples: u64,
    rng: &mut R,
) -> Result<PaintboxEstimate> {
    if composition.is_empty() || composition.iter().any(|&c| c < 1) {
        return Err(Error::OutOfRange("composition parts must be >= 1".into()));
    }
    let k = composition.len() as u32;
    match model.regime() {
        Regime::CouponCollector { m } => {
            // uniform paintbox on m colors: exact
            let m = *m;
            let n: u32 = composition.iter().sum();
            if k > m {
                return Ok(PaintboxEstimate {
                    mean: 0.0,
                    stderr: 0.0,
                    samples: 0,
                    exact: true,
                });
            }
            let falling: f64 = (0..k).map(|i| (m - i) as f64).product();
            Ok(PaintboxEstimate {
                mean: falling / (m as f64).powi(n as i32),
                stderr: 0.0,
                samples: 0,
                exact: true,
            })
        }
        Regime::EwensPitman {
            alpha,
            theta,
            class: EpClass::Bounded { m },
        } => {
            // symmetric Dirichlet(-alpha, ..., -alpha) on m parts
            let a = -alpha.to_f64();
            let _ = theta;
            let m = *m as usize;
            if k as usize > m {
                return Ok(PaintboxEstimate {
                    mean: 0.0,
                    stderr: 0.0,
                    samples: 0,
                    exact: true,
                });
            }
            let gamma = Gamma::new(a, 1.0)
                .map_err(|_| Error::OutOfRange(format!("bad Dirichlet parameter {a}")))?;
            let mut acc = RunningMoments::default();
            let mut s = vec![0.0f64; m];
            for _ in 0..samples {
                let mut total = 0.0;
                for v in s.iter_mut() {
                    *v = gamma.sample(rng);
                    total += *v;
                }
                for v in s.iter_mut() {
                    *v /= total;
                }
                acc.push(distinct_tuple_sum(&s, composition));
            }
            Ok(PaintboxEstimate {
                mean: acc.mean(),
                stderr: acc.stderr(),
                samples: acc.count(),
                exact: false,
            })
        }
        Regime::EwensPitman {
            alpha,
            theta,
            class: EpClass::Unbounded,
        } => {
            let a = alpha.to_f64();
            let t = theta.to_f64();
            if !(t > -a) {
                return Err(Error::Unsupported(
                    "stick-breaking needs theta > -alpha; the extended range has no \
                     classical sampling construction"
                        .into(),
                ));
            }
            // size-biased form of the distinct-index sum: only the first k
            // sticks of the stick-breaking representation enter, and the
            // estimator prod_j W_j^(n_j - 1) * prod_{j<k} (1 - W_1 - .. - W_j)
            // is unbiased for the full sum
            let mut acc = RunningMoments::default();
            let betas: Vec<BetaDist<f64>> = (1..=k)
                .map(|j| {
                    BetaDist::new(1.0 - a, t + j as f64 * a).map_err(|_| {
                        Error::OutOfRange(format!("bad stick parameters at level {j}"))
                    })
                })
                .collect::<Result<_>>()?;
            for _ in 0..samples {
                let mut remaining = 1.0f64;
                let mut est = 1.0f64;
                let mut cum = 0.0f64;
                for (idx, dist) in betas.iter().enumerate() {
                    let v = dist.sample(rng);
                    let w = v * remaining;
                    remaining *= 1.0 - v;
                    let e = composition[idx] - 1;
                    if e > 0 {
                        est *= w.powi(e as i32);
                    }
                    cum += w;
                    if idx + 1 < composition.len() {
                        est *= 1.0 - cum;
                    }
                }
                acc.push(est);
            }
            Ok(PaintboxEstimate {
                mean: acc.mean(),
                stderr: acc.stderr(),
                samples: acc.count(),
                exact: false,
            })
        }
        _ => Err(Error::Unsupported(
            "no paintbox sampling construction for this regime".into(),
        )),
    }
}

/// `sum over ordered distinct index tuples of prod_j s[i_j]^comp[j]`.
fn distinct_tuple_sum(s: &[f64], comp: &[u32]) -> f64 {
    fn rec(s: &[f64], comp: &[u32], pos: usize, used: u64) -> f64 {
        if pos == comp.len() {
            return 1.0;
        }
        let mut acc = 0.0;
        for (i, &si) in s.iter().enumerate() {
            if used & (1 << i) != 0 {
                continue;
            }
            acc += si.powi(comp[pos] as i32) * rec(s, comp, pos + 1, used | (1 << i));
        }
        acc
    }
    assert!(s.len() <= 64);
    rec(s, comp, 0, 0)
}
