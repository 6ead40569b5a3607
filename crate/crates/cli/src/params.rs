//! Parameter parsing: rational strings keep exact mode, decimals force float
//! mode.

use crate::ModelArgs;
use fragtree::{ExactModel, FloatModel, Rational, Scalar};

/// One parsed numeric parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Exact(Rational),
    Float(f64),
    Infinite,
}

impl Param {
    pub fn is_float(&self) -> bool {
        matches!(self, Param::Float(_))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Param::Exact(r) => Scalar::to_f64(r),
            Param::Float(f) => *f,
            Param::Infinite => f64::INFINITY,
        }
    }
}

pub fn parse_param(s: &str) -> Result<Param, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty numeric parameter".into());
    }
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(Param::Infinite);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad rational numerator in {s:?}"))?;
        let den: i64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad rational denominator in {s:?}"))?;
        if den == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Param::Exact(Rational::from_ratio(num, den)));
    }
    if s.contains('.') || s.contains('e') || s.contains('E') {
        let f: f64 = s.parse().map_err(|_| format!("bad decimal {s:?}"))?;
        return Ok(Param::Float(f));
    }
    let v: i64 = s.parse().map_err(|_| format!("bad number {s:?}"))?;
    Ok(Param::Exact(Rational::from_int(v)))
}

/// A model in whichever numeric mode the parameters selected.
pub enum AnyModel {
    Exact(ExactModel),
    Float(FloatModel),
}

impl AnyModel {
    pub fn describe(&self) -> String {
        match self {
            AnyModel::Exact(m) => m.describe(),
            AnyModel::Float(m) => m.describe(),
        }
    }

    /// Rebuild the model in float mode (used by the statistical suites).
    pub fn to_float(&self) -> Result<FloatModel, String> {
        let build = |m: &dyn Fn() -> fragtree::Result<FloatModel>| m().map_err(|e| e.to_string());
        match self {
            AnyModel::Float(m) => Ok(m.clone()),
            AnyModel::Exact(m) => {
                use fragtree::{BetaParam, Regime};
                match m.regime() {
                    Regime::BetaSplit(BetaParam::Finite(b)) => {
                        let b = Scalar::to_f64(b);
                        build(&|| FloatModel::beta_split(b))
                    }
                    Regime::BetaSplit(BetaParam::Infinite) => {
                        Ok(FloatModel::beta_split_infinite())
                    }
                    Regime::Comb => Ok(FloatModel::comb()),
                    Regime::EwensPitman { alpha, theta, .. } => {
                        let (a, t) = (Scalar::to_f64(alpha), Scalar::to_f64(theta));
                        build(&|| FloatModel::ewens_pitman(a, t))
                    }
                    Regime::CouponCollector { m } => {
                        let m = *m;
                        build(&|| FloatModel::coupon_collector(m))
                    }
                    Regime::SingletonSplit => Ok(FloatModel::singleton_split()),
                    Regime::RawBinary { weights } => {
                        let w: Vec<f64> = weights.iter().map(Scalar::to_f64).collect();
                        build(&|| FloatModel::raw_binary(w.clone()))
                    }
                }
            }
        }
    }
}

impl ModelArgs {
    fn selected(&self) -> usize {
        [
            self.beta.is_some(),
            self.alpha.is_some(),
            self.coupon.is_some(),
            self.singleton,
            self.comb,
            self.raw_weights.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count()
    }

    /// Build the model, choosing the numeric mode from the parameter syntax.
    pub fn build(&self) -> Result<AnyModel, String> {
        if self.selected() != 1 {
            return Err(
                "select exactly one model: --beta, --alpha/--theta, --coupon, --singleton, \
                 --comb or --raw-weights"
                    .into(),
            );
        }
        let lib = |e: fragtree::Error| e.to_string();
        if let Some(beta) = &self.beta {
            return match parse_param(beta)? {
                Param::Infinite => Ok(AnyModel::Exact(ExactModel::beta_split_infinite())),
                Param::Exact(b) => Ok(AnyModel::Exact(ExactModel::beta_split(b).map_err(lib)?)),
                Param::Float(b) => {
                    warn_float();
                    Ok(AnyModel::Float(FloatModel::beta_split(b).map_err(lib)?))
                }
            };
        }
        if let (Some(alpha), Some(theta)) = (&self.alpha, &self.theta) {
            let a = parse_param(alpha)?;
            let t = parse_param(theta)?;
            if matches!(a, Param::Infinite) || matches!(t, Param::Infinite) {
                return Err("alpha/theta must be finite; the infinite boundary is --coupon".into());
            }
            return if a.is_float() || t.is_float() {
                warn_float();
                Ok(AnyModel::Float(
                    FloatModel::ewens_pitman(a.as_f64(), t.as_f64()).map_err(lib)?,
                ))
            } else {
                let (Param::Exact(a), Param::Exact(t)) = (a, t) else {
                    unreachable!()
                };
                Ok(AnyModel::Exact(ExactModel::ewens_pitman(a, t).map_err(lib)?))
            };
        }
        if let Some(m) = self.coupon {
            return Ok(AnyModel::Exact(
                ExactModel::coupon_collector(m).map_err(lib)?,
            ));
        }
        if self.singleton {
            return Ok(AnyModel::Exact(ExactModel::singleton_split()));
        }
        if self.comb {
            return Ok(AnyModel::Exact(ExactModel::comb()));
        }
        if let Some(ws) = &self.raw_weights {
            let parsed: Vec<Param> = ws
                .iter()
                .map(|w| parse_param(w))
                .collect::<Result<_, _>>()?;
            if parsed.iter().any(|p| matches!(p, Param::Infinite)) {
                return Err("raw weights must be finite".into());
            }
            return if parsed.iter().any(Param::is_float) {
                warn_float();
                let w: Vec<f64> = parsed.iter().map(Param::as_f64).collect();
                Ok(AnyModel::Float(FloatModel::raw_binary(w).map_err(lib)?))
            } else {
                let w: Vec<Rational> = parsed
                    .into_iter()
                    .map(|p| match p {
                        Param::Exact(r) => r,
                        _ => unreachable!(),
                    })
                    .collect();
                Ok(AnyModel::Exact(ExactModel::raw_binary(w).map_err(lib)?))
            };
        }
        unreachable!()
    }
}

fn warn_float() {
    eprintln!(
        "warning: decimal parameter(s); running in float mode \
         (use p/q rationals for exact arithmetic)"
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_floats_and_inf() {
        assert_eq!(
            parse_param("-3/2").unwrap(),
            Param::Exact(Rational::from_ratio(-3, 2))
        );
        assert_eq!(parse_param("5").unwrap(), Param::Exact(Rational::from_int(5)));
        assert_eq!(parse_param("inf").unwrap(), Param::Infinite);
        assert!(matches!(parse_param("2.7").unwrap(), Param::Float(_)));
        assert!(parse_param("1/0").is_err());
        assert!(parse_param("abc").is_err());
    }

    #[test]
    fn model_modes() {
        let args = ModelArgs {
            beta: Some("-3/2".into()),
            ..Default::default()
        };
        assert!(matches!(args.build().unwrap(), AnyModel::Exact(_)));
        let args = ModelArgs {
            beta: Some("-1.5".into()),
            ..Default::default()
        };
        assert!(matches!(args.build().unwrap(), AnyModel::Float(_)));
        let args = ModelArgs {
            alpha: Some("1/2".into()),
            theta: Some("0".into()),
            ..Default::default()
        };
        assert!(matches!(args.build().unwrap(), AnyModel::Exact(_)));
        // exactly one model required
        let args = ModelArgs {
            beta: Some("0".into()),
            comb: true,
            ..Default::default()
        };
        assert!(args.build().is_err());
        assert!(ModelArgs::default().build().is_err());
    }
}
