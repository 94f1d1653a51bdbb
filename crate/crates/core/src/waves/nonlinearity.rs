use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The nonlinearity `f` of `i ψ_t + ψ_xx + f(|ψ|²) ψ = 0`, as a function of `r = φ²`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `f(r) = r^p`
    Power { p: f64 },
    /// `f(r) = r`
    CubicFocusing,
    /// `f(r) = -r`
    CubicDefocusing,
    Custom(CustomNonlinearity),
}

/// A user supplied `f` with its exact derivative.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub f: RealFn,
    pub df: RealFn,
}

impl CustomNonlinearity {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), f: Arc::new(f), df: Arc::new(df) }
    }
}

impl Serialize for CustomNonlinearity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CustomNonlinearity", 1)?;
        st.serialize_field("name", &self.name)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CustomNonlinearity {
    fn deserialize<D: Deserializer<'de>>(_: D) -> std::result::Result<Self, D::Error> {
        Err(serde::de::Error::custom("custom nonlinearities are code, not data; build them with CustomNonlinearity::new"))
    }
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { p } => write!(f, "Power({p})"),
            Self::CubicFocusing => f.write_str("CubicFocusing"),
            Self::CubicDefocusing => f.write_str("CubicDefocusing"),
            Self::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

impl Nonlinearity {
    pub fn f(&self, r: f64) -> f64 {
        match self {
            Self::Power { p } => r.powf(*p),
            Self::CubicFocusing => r,
            Self::CubicDefocusing => -r,
            Self::Custom(c) => (c.f)(r),
        }
    }

    pub fn df(&self, r: f64) -> f64 {
        match self {
            Self::Power { p } => {
                if *p == 1.0 {
                    1.0
                } else {
                    p * r.powf(p - 1.0)
                }
            }
            Self::CubicFocusing => 1.0,
            Self::CubicDefocusing => -1.0,
            Self::Custom(c) => (c.df)(r),
        }
    }

    /// `F(r) = ∫_0^r f`.
    pub fn antiderivative(&self, r: f64) -> f64 {
        match self {
            Self::Power { p } => r.powf(p + 1.0) / (p + 1.0),
            Self::CubicFocusing => 0.5 * r * r,
            Self::CubicDefocusing => -0.5 * r * r,
            Self::Custom(c) => {
                let n = 400;
                let h = r / n as f64;
                let vals: Vec<f64> = (0..=n).map(|i| (c.f)(i as f64 * h)).collect();
                crate::grid::simpson(&vals, h)
            }
        }
    }

    /// `G(r) = 2 f'(r) r + f(r) + β`, so that `g(x) = G(φ(x)²)`.
    pub fn g_of_r(&self, r: f64, beta: f64) -> f64 {
        2.0 * self.df(r) * r + self.f(r) + beta
    }

    /// `G'(r) = 2 f''(r) r + 3 f'(r)`.
    pub fn dg_dr(&self, r: f64) -> f64 {
        match self {
            Self::Power { p } => {
                if *p == 1.0 {
                    3.0
                } else {
                    p * (2.0 * p + 1.0) * r.powf(p - 1.0)
                }
            }
            Self::CubicFocusing => 3.0,
            Self::CubicDefocusing => -3.0,
            Self::Custom(c) => {
                let d = 1e-6 * r.abs().max(1e-3);
                let lo = (r - d).max(0.0);
                let d2f = ((c.df)(r + d) - (c.df)(lo)) / (r + d - lo);
                2.0 * d2f * r + 3.0 * (c.df)(r)
            }
        }
    }

    /// The cubic sign `σ` when `f(r) = σ r`.
    pub fn cubic_sign(&self) -> Option<f64> {
        match self {
            Self::Power { p } if *p == 1.0 => Some(1.0),
            Self::CubicFocusing => Some(1.0),
            Self::CubicDefocusing => Some(-1.0),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Power { p } if !(p.is_finite() && *p > 0.0) => {
                Err(Error::InvalidInput(format!("power nonlinearity needs p > 0, got {p}")))
            }
            _ => Ok(()),
        }
    }

    /// Compare `f'` with central differences of `f` on `[0, r_max]`.
    pub fn check_derivative(&self, r_max: f64) -> Result<()> {
        let Self::Custom(c) = self else { return Ok(()) };
        for i in 1..=64 {
            let r = r_max * i as f64 / 64.0;
            let d = 1e-5 * r.max(1e-3);
            let fd = ((c.f)(r + d) - (c.f)(r - d)) / (2.0 * d);
            let exact = (c.df)(r);
            if !fd.is_finite() || !exact.is_finite() {
                return Err(Error::InvalidInput(format!("{}: f or f' not finite at r={r}", c.name)));
            }
            if (fd - exact).abs() > 1e-6 * exact.abs().max(fd.abs()).max(1e-8) {
                return Err(Error::InvalidInput(format!(
                    "{}: f' disagrees with differences of f at r={r} ({exact} vs {fd})",
                    c.name
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_one_is_cubic_focusing() {
        let a = Nonlinearity::Power { p: 1.0 };
        let b = Nonlinearity::CubicFocusing;
        for r in [0.0, 0.3, 1.0, 7.5] {
            assert_eq!(a.f(r), b.f(r));
            assert_eq!(a.df(r), b.df(r));
            assert_eq!(a.g_of_r(r, -2.0), b.g_of_r(r, -2.0));
            assert_eq!(a.dg_dr(r), b.dg_dr(r));
        }
    }

    #[test]
    fn power_three_potentials() {
        let n = Nonlinearity::Power { p: 3.0 };
        for phi in [0.2f64, 0.9, 1.1] {
            let r = phi * phi;
            assert!((n.g_of_r(r, -2.0) - (7.0 * phi.powi(6) - 2.0)).abs() < 1e-13);
            let d = 1e-6;
            let fd = (n.g_of_r(r + d, 0.0) - n.g_of_r(r - d, 0.0)) / (2.0 * d);
            assert!((fd - n.dg_dr(r)).abs() < 1e-6);
            let fdf = (n.f(r + d) - n.f(r - d)) / (2.0 * d);
            assert!((fdf - n.df(r)).abs() < 1e-7);
        }
    }

    #[test]
    fn custom_derivative_check() {
        let good = Nonlinearity::Custom(CustomNonlinearity::new("sat", |r| r / (1.0 + r), |r| 1.0 / (1.0 + r).powi(2)));
        good.check_derivative(4.0).unwrap();
        let bad = Nonlinearity::Custom(CustomNonlinearity::new("bad", |r| r * r, |r| r));
        assert!(bad.check_derivative(4.0).is_err());
        let f = Nonlinearity::Custom(CustomNonlinearity::new("quad", |r| r * r, |r| 2.0 * r));
        assert!((f.antiderivative(2.0) - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let n = Nonlinearity::Power { p: 3.0 };
        let s = serde_json::to_string(&n).unwrap();
        assert_eq!(s, r#"{"kind":"power","p":3.0}"#);
        let back: Nonlinearity = serde_json::from_str(&s).unwrap();
        assert_eq!(back.f(2.0), 8.0);
        let c: Nonlinearity = serde_json::from_str(r#"{"kind":"cubic_focusing"}"#).unwrap();
        assert_eq!(c.f(2.0), 2.0);
    }
}
