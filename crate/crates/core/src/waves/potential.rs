use std::fmt;
use std::sync::Arc;

use super::StandingWave;

type Eval = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// A real potential `q(x)` together with its derivative.
#[derive(Clone)]
pub struct Scalar {
    eval: Eval,
    constant: Option<f64>,
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constant {
            Some(c) => write!(f, "Scalar::constant({c})"),
            None => f.write_str("Scalar(<fn>)"),
        }
    }
}

impl Scalar {
    /// `eval` returns `(q(x), q'(x))`.
    pub fn new(eval: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), constant: None }
    }

    pub fn constant(c: f64) -> Self {
        Self { eval: Arc::new(move |_| (c, 0.0)), constant: Some(c) }
    }

    /// `c[0] + c[1] x + c[2] x² + ...`
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        if coeffs.iter().skip(1).all(|&c| c == 0.0) {
            return Self::constant(coeffs.first().copied().unwrap_or(0.0));
        }
        Self::new(move |x| {
            let mut v = 0.0;
            let mut d = 0.0;
            for &c in coeffs.iter().rev() {
                d = d * x + v;
                v = v * x + c;
            }
            (v, d)
        })
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.constant
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x).0
    }

    #[inline]
    pub fn value_and_derivative(&self, x: f64) -> (f64, f64) {
        (self.eval)(x)
    }

    /// `x ↦ s² q(s x)`.
    pub fn rescaled(&self, s: f64) -> Self {
        if let Some(c) = self.constant {
            return Self::constant(s * s * c);
        }
        let inner = self.eval.clone();
        Self::new(move |x| {
            let (q, dq) = inner(s * x);
            (s * s * q, s * s * s * dq)
        })
    }

    pub fn sup_norm_on(&self, ell: f64) -> f64 {
        if let Some(c) = self.constant {
            return c.abs();
        }
        (0..=512).map(|i| self.value(ell * i as f64 / 512.0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub enum Provenance {
    Explicit { label: String },
    FromWave(Box<StandingWave>),
}

/// The potentials of `L₊ = -∂ₓₓ - g` and `L₋ = -∂ₓₓ - h` on `[0, ell]`.
///
/// `reach ≥ ell` is how far the potentials can be evaluated; rescalings
/// `s > 1` need `s·ell ≤ reach`.
#[derive(Debug, Clone)]
pub struct PotentialPair {
    pub g: Scalar,
    pub h: Scalar,
    pub ell: f64,
    pub reach: f64,
    pub provenance: Provenance,
}

impl PotentialPair {
    pub fn explicit(g: Scalar, h: Scalar, ell: f64, label: impl Into<String>) -> Self {
        Self { g, h, ell, reach: f64::INFINITY, provenance: Provenance::Explicit { label: label.into() } }
    }

    pub fn constant(g: f64, h: f64, ell: f64) -> Self {
        Self::explicit(Scalar::constant(g), Scalar::constant(h), ell, format!("constant g={g} h={h}"))
    }

    pub fn free(ell: f64) -> Self {
        Self::explicit(Scalar::constant(0.0), Scalar::constant(0.0), ell, "free")
    }

    pub fn label(&self) -> String {
        match &self.provenance {
            Provenance::Explicit { label } => label.clone(),
            Provenance::FromWave(w) => format!("wave beta={} ell={} {:?}", w.beta, w.ell, w.bc),
        }
    }

    pub fn wave(&self) -> Option<&StandingWave> {
        match &self.provenance {
            Provenance::FromWave(w) => Some(w),
            Provenance::Explicit { .. } => None,
        }
    }

    pub fn max_rescaling(&self) -> f64 {
        self.reach / self.ell
    }

    /// Largest absolute potential value on `[0, ell]`.
    pub fn sup_norm(&self) -> f64 {
        self.g.sup_norm_on(self.ell).max(self.h.sup_norm_on(self.ell))
    }
}
