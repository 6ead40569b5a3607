//! Scalar abstraction over the numeric mode.
//!
//! All model arithmetic (weights, normalization constants, probabilities,
//! rates) is generic over [`Scalar`]. Two instantiations are provided:
//! [`Rational`](crate::Rational) for exact arithmetic, where every identity
//! check is an equality of arbitrary-precision rationals, and `f64` for
//! approximate work with irrational parameters. Exactness is a property of
//! the type, not of individual values: mixing modes is a compile error, and
//! operations that only make sense exactly refuse `f64` via [`Scalar::EXACT`].

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Zero
    + One
    + Signed
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic in this type is exact. Identity checks refuse to
    /// run when this is false.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// If the value is (within mode tolerance) an integer, return it.
    /// Exact mode decides exactly; float mode uses a 1e-9 tolerance.
    fn as_integer(&self) -> Option<i64>;

    fn pow_u(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Draw an index with probability proportional to `weights[i]`.
    ///
    /// Exact mode clears denominators and draws a uniform big integer below
    /// the total, so the selection is unbiased by construction. Float mode
    /// walks the cumulative sum of a total-normalized uniform draw; ties at
    /// cell boundaries (measure zero up to f64 rounding) go to the earlier
    /// index.
    fn sample_index<R: Rng + ?Sized>(weights: &[Self], rng: &mut R) -> usize;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn sample_index<R: Rng + ?Sized>(weights: &[Self], rng: &mut R) -> usize {
        assert!(!weights.is_empty());
        // Common denominator, then an exact uniform draw below the total.
        let mut denom = num_bigint::BigInt::one();
        for w in weights {
            denom = num_integer::lcm(denom, w.denom().clone());
        }
        let scaled: Vec<BigUint> = weights
            .iter()
            .map(|w| {
                let v = w.numer() * (&denom / w.denom());
                assert!(!v.is_negative(), "negative sampling weight");
                v.to_biguint().unwrap()
            })
            .collect();
        let total: BigUint = scaled.iter().sum();
        assert!(!total.is_zero(), "all sampling weights are zero");
        let draw = uniform_biguint_below(&total, rng);
        let mut acc = BigUint::zero();
        for (i, w) in scaled.iter().enumerate() {
            acc += w;
            if draw < acc {
                return i;
            }
        }
        weights.len() - 1
    }
}

/// Uniform draw in `[0, bound)` by rejection on the top limb.
fn uniform_biguint_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let bits = bound.bits();
    let limbs = bits.div_ceil(32) as usize;
    loop {
        let mut digits = Vec::with_capacity(limbs);
        for _ in 0..limbs {
            digits.push(rng.gen::<u32>());
        }
        // Mask excess bits in the top limb so the rejection rate stays < 1/2.
        let excess = (limbs as u64) * 32 - bits;
        if excess > 0 {
            let last = digits.last_mut().unwrap();
            *last >>= excess;
        }
        let candidate = BigUint::new(digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn as_integer(&self) -> Option<i64> {
        let r = self.round();
        if (self - r).abs() <= 1e-9 * (1.0 + self.abs()) {
            Some(r as i64)
        } else {
            None
        }
    }

    fn sample_index<R: Rng + ?Sized>(weights: &[Self], rng: &mut R) -> usize {
        assert!(!weights.is_empty());
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "all sampling weights are zero");
        let u = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        weights.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use rand::SeedableRng;

    #[test]
    fn rational_basics() {
        let x = Rational::from_ratio(-3, 2);
        assert_eq!(Scalar::to_f64(&x), -1.5);
        assert_eq!(Rational::from_int(7).as_integer(), Some(7));
        assert_eq!(x.as_integer(), None);
        assert_eq!(x.pow_u(2), Rational::from_ratio(9, 4));
        assert_eq!(x.pow_u(0), Rational::one());
    }

    #[test]
    fn float_integer_detection() {
        assert_eq!(3.0f64.as_integer(), Some(3));
        assert_eq!((3.0f64 + 1e-12).as_integer(), Some(3));
        assert_eq!(2.5f64.as_integer(), None);
    }

    #[test]
    fn exact_sampling_is_unbiased_in_distribution() {
        // weights 1/3, 2/3: frequencies should track the masses.
        let w = vec![Rational::from_ratio(1, 3), Rational::from_ratio(2, 3)];
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let n = 30_000;
        let mut hits = [0u32; 2];
        for _ in 0..n {
            hits[Rational::sample_index(&w, &mut rng)] += 1;
        }
        let f = hits[1] as f64 / n as f64;
        // 5 sigma band around 2/3.
        let sd = (2.0 / 9.0 / n as f64).sqrt();
        assert!((f - 2.0 / 3.0).abs() < 5.0 * sd, "freq {f}");
    }

    #[test]
    fn float_sampling_matches_masses() {
        let w = vec![0.25f64, 0.25, 0.5];
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let n = 30_000;
        let mut hits = [0u32; 3];
        for _ in 0..n {
            hits[f64::sample_index(&w, &mut rng)] += 1;
        }
        let f = hits[2] as f64 / n as f64;
        let sd = (0.25 / n as f64).sqrt();
        assert!((f - 0.5).abs() < 5.0 * sd);
    }

    #[test]
    fn uniform_biguint_below_is_in_range() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let bound = BigUint::from(1_000_000_007u64) * BigUint::from(97u64);
        for _ in 0..1000 {
            assert!(uniform_biguint_below(&bound, &mut rng) < bound);
        }
    }
}
