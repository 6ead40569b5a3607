//! Closed-form parameter tables for the classical beta-splitting special
//! cases, used as an independent verification route against the generic
//! recurrence pipeline.
//!
//! | beta  | w(n)                      | Z(n)                        | psi(n)          | lambda_n (lambda_2 = 1)        |
//! |-------|---------------------------|-----------------------------|-----------------|--------------------------------|
//! | -3/2  | (2n-2)!/(2^(2n-2) (n-1)!) | (2n-2)!/(2^(2n-3) (n-1)!)   | 1/2             | (n-1) C(2n-2, n-1) / 2^(2n-3)  |
//! | -1    | (n-1)!                    | (n-1)! H_{n-1}              | 1/H_{n-1}       | H_{n-1}                        |
//! | 0     | n!                        | (n-1) n!/2                  | 2/(n-1)         | 3(n-1)/(n+1)                   |
//! | inf   | 1                         | 2^(n-1) - 1                 | 1/(2^(n-1) - 1) | 2(1 - 2^(-(n-1)))              |
//!
//! (`H_m` is the m-th harmonic number.)

use crate::model::{BetaParam, GibbsModel, Regime};
use crate::scalar::Scalar;
use crate::Rational;
use num_bigint::BigInt;

/// The four classical beta values with fully explicit tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialBeta {
    /// beta = -3/2: the uniform model.
    MinusThreeHalves,
    /// beta = -1.
    MinusOne,
    /// beta = 0: the Yule model.
    Zero,
    /// beta = inf: the symmetric binary trie.
    Infinite,
}

impl SpecialBeta {
    pub const ALL: [SpecialBeta; 4] = [
        SpecialBeta::MinusThreeHalves,
        SpecialBeta::MinusOne,
        SpecialBeta::Zero,
        SpecialBeta::Infinite,
    ];

    /// Matching exact model.
    pub fn model(self) -> GibbsModel<Rational> {
        match self {
            SpecialBeta::MinusThreeHalves => {
                GibbsModel::beta_split(Rational::from_ratio(-3, 2)).unwrap()
            }
            SpecialBeta::MinusOne => GibbsModel::beta_split(Rational::from_int(-1)).unwrap(),
            SpecialBeta::Zero => GibbsModel::beta_split(Rational::from_int(0)).unwrap(),
            SpecialBeta::Infinite => GibbsModel::beta_split_infinite(),
        }
    }

    /// Detect whether a model is one of the special cases.
    pub fn of_model(model: &GibbsModel<Rational>) -> Option<SpecialBeta> {
        match model.regime() {
            Regime::BetaSplit(BetaParam::Infinite) => Some(SpecialBeta::Infinite),
            Regime::BetaSplit(BetaParam::Finite(b)) => {
                if *b == Rational::from_ratio(-3, 2) {
                    Some(SpecialBeta::MinusThreeHalves)
                } else if *b == Rational::from_int(-1) {
                    Some(SpecialBeta::MinusOne)
                } else if *b == Rational::from_int(0) {
                    Some(SpecialBeta::Zero)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

fn factorial(n: u32) -> BigInt {
    let mut f = BigInt::from(1);
    for q in 2..=n as u64 {
        f *= q;
    }
    f
}

fn pow2(e: u32) -> BigInt {
    BigInt::from(1) << e
}

fn big_binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// m-th harmonic number `1 + 1/2 + ... + 1/m`.
pub fn harmonic(m: u32) -> Rational {
    let mut h = Rational::from_int(0);
    for j in 1..=m as i64 {
        h += Rational::from_ratio(1, j);
    }
    h
}

/// Closed-form block weight `w(n)`, `n >= 1`.
pub fn weight_closed(sb: SpecialBeta, n: u32) -> Rational {
    match sb {
        SpecialBeta::MinusThreeHalves => {
            Rational::new(factorial(2 * n - 2), pow2(2 * n - 2) * factorial(n - 1))
        }
        SpecialBeta::MinusOne => Rational::from_integer(factorial(n - 1)),
        SpecialBeta::Zero => Rational::from_integer(factorial(n)),
        SpecialBeta::Infinite => Rational::from_int(1),
    }
}

/// Closed-form normalization `Z(n)`, `n >= 2`.
pub fn norm_closed(sb: SpecialBeta, n: u32) -> Rational {
    assert!(n >= 2);
    match sb {
        SpecialBeta::MinusThreeHalves => {
            Rational::new(factorial(2 * n - 2), pow2(2 * n - 3) * factorial(n - 1))
        }
        SpecialBeta::MinusOne => Rational::from_integer(factorial(n - 1)) * harmonic(n - 1),
        SpecialBeta::Zero => {
            Rational::from_integer(BigInt::from(n - 1) * factorial(n)) / Rational::from_int(2)
        }
        SpecialBeta::Infinite => Rational::from_integer(pow2(n - 1) - 1),
    }
}

/// Closed-form vertex weight `psi(n)`, `n >= 2` (`psi(1) = 1`).
pub fn psi_closed(sb: SpecialBeta, n: u32) -> Rational {
    assert!(n >= 2);
    match sb {
        SpecialBeta::MinusThreeHalves => Rational::from_ratio(1, 2),
        SpecialBeta::MinusOne => Rational::from_int(1) / harmonic(n - 1),
        SpecialBeta::Zero => Rational::from_ratio(2, n as i64 - 1),
        SpecialBeta::Infinite => Rational::from_int(1) / Rational::from_integer(pow2(n - 1) - 1),
    }
}

/// Closed-form split rate `lambda_n` with `lambda_2 = 1`, `n >= 2`.
pub fn rate_closed(sb: SpecialBeta, n: u32) -> Rational {
    assert!(n >= 2);
    match sb {
        SpecialBeta::MinusThreeHalves => {
            Rational::new(BigInt::from(n - 1) * big_binomial(2 * n - 2, n - 1), pow2(2 * n - 3))
        }
        SpecialBeta::MinusOne => harmonic(n - 1),
        SpecialBeta::Zero => Rational::from_ratio(3 * (n as i64 - 1), n as i64 + 1),
        SpecialBeta::Infinite => Rational::new(pow2(n) - 2, pow2(n - 1)),
    }
}

/// Number of binary fragmentations of an n-set:
/// `(2n-2)! / (2^(n-1) (n-1)!)`.
pub fn binary_tree_count(n: u32) -> u64 {
    use num_traits::ToPrimitive;
    let v = factorial(2 * n - 2) / (pow2(n - 1) * factorial(n - 1));
    v.to_u64().expect("count exceeds u64")
}
