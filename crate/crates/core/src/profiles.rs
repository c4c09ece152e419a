//! A closed family of named initial profiles, parseable from short strings
//! such as `gaussian(1)`, `sech(0.5)`, `box(2, 0.25)` or `zero`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::eval::Evaluable;

/// A named initial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `exp(-x²/(4b)) / √(2b)`; its Fourier transform is `exp(-b ξ²)`.
    Gaussian { b: f64 },
    /// `sech(x / width)`
    Sech { width: f64 },
    /// `(tanh((x + a)/e) - tanh((x - a)/e)) / 2`: a plateau of half-width `a`
    /// with smooth edges of width `e`.
    SmoothBox { half_width: f64, edge: f64 },
    /// Identically zero.
    Zero,
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Gaussian { b } => (-x * x / (4.0 * b)).exp() / (2.0 * b).sqrt(),
            Profile::Sech { width } => 1.0 / (x / width).cosh(),
            Profile::SmoothBox { half_width, edge } => 0.5 * (((x + half_width) / edge).tanh() - ((x - half_width) / edge).tanh()),
            Profile::Zero => 0.0,
        }
    }
}

impl Evaluable for Profile {
    fn eval(&self, t: f64) -> Complex64 {
        Complex64::new(self.value(t), 0.0)
    }
}

/// Why a profile string was rejected.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("unknown profile `{0}` (expected gaussian(b), sech(w), box(a, e) or zero)")]
    Unknown(String),
    #[error("profile `{name}` takes {expected} parameter(s), got {got}")]
    Arity { name: &'static str, expected: usize, got: usize },
    #[error("profile parameter `{0}` is not a number")]
    Number(String),
    #[error("profile parameter `{name}` must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, ProfileError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ProfileError::NonPositive { name, value })
    }
}

impl FromStr for Profile {
    type Err = ProfileError;

    /// Accepts `name`, `name()` or `name(p1, p2)`; parameters may be written
    /// as `key=value`, in which case the key is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) if s.ends_with(')') => (&s[..open], &s[open + 1..s.len() - 1]),
            Some(_) => return Err(ProfileError::Unknown(s.to_string())),
            None => (s, ""),
        };
        let params = args
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(|a| {
                let v = a.rsplit('=').next().unwrap_or(a).trim();
                v.parse::<f64>().map_err(|_| ProfileError::Number(a.to_string()))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let arity = |name: &'static str, expected: usize| {
            if params.len() == expected {
                Ok(())
            } else {
                Err(ProfileError::Arity {
                    name,
                    expected,
                    got: params.len(),
                })
            }
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "gaussian" => {
                arity("gaussian", 1)?;
                Ok(Profile::Gaussian { b: positive("b", params[0])? })
            }
            "sech" => {
                arity("sech", 1)?;
                Ok(Profile::Sech {
                    width: positive("width", params[0])?,
                })
            }
            "box" => {
                arity("box", 2)?;
                Ok(Profile::SmoothBox {
                    half_width: positive("half_width", params[0])?,
                    edge: positive("edge", params[1])?,
                })
            }
            "zero" => {
                arity("zero", 0)?;
                Ok(Profile::Zero)
            }
            _ => Err(ProfileError::Unknown(s.to_string())),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Gaussian { b } => write!(f, "gaussian({b})"),
            Profile::Sech { width } => write!(f, "sech({width})"),
            Profile::SmoothBox { half_width, edge } => write!(f, "box({half_width}, {edge})"),
            Profile::Zero => write!(f, "zero"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!("gaussian(1)".parse::<Profile>().unwrap(), Profile::Gaussian { b: 1.0 });
        assert_eq!(" Gaussian( b = 2.5 ) ".parse::<Profile>().unwrap(), Profile::Gaussian { b: 2.5 });
        assert_eq!("sech(0.5)".parse::<Profile>().unwrap(), Profile::Sech { width: 0.5 });
        assert_eq!(
            "box(2, 0.25)".parse::<Profile>().unwrap(),
            Profile::SmoothBox { half_width: 2.0, edge: 0.25 }
        );
        assert_eq!("zero".parse::<Profile>().unwrap(), Profile::Zero);
        assert_eq!("zero()".parse::<Profile>().unwrap(), Profile::Zero);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("cauchy(1)".parse::<Profile>(), Err(ProfileError::Unknown(_))));
        assert!(matches!("gaussian".parse::<Profile>(), Err(ProfileError::Arity { .. })));
        assert!(matches!("gaussian(x)".parse::<Profile>(), Err(ProfileError::Number(_))));
        assert!(matches!("gaussian(-1)".parse::<Profile>(), Err(ProfileError::NonPositive { .. })));
        assert!("gaussian(1".parse::<Profile>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for p in [
            Profile::Gaussian { b: 1.5 },
            Profile::Sech { width: 2.0 },
            Profile::SmoothBox { half_width: 1.0, edge: 0.1 },
            Profile::Zero,
        ] {
            assert_eq!(p.to_string().parse::<Profile>().unwrap(), p);
        }
    }

    #[test]
    fn values() {
        assert!((Profile::Gaussian { b: 1.0 }.value(0.0) - 0.5f64.sqrt()).abs() < 2e-16);
        assert_eq!(Profile::Sech { width: 1.0 }.value(0.0), 1.0);
        assert!((Profile::SmoothBox { half_width: 2.0, edge: 0.1 }.value(0.0) - 1.0).abs() < 1e-15);
        assert_eq!(Profile::Zero.value(3.0), 0.0);
    }
}
