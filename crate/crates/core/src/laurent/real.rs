use super::LaurentPolynomial;
use num_complex::Complex64;
use std::fmt;

/// Polynomial with real coefficients in ascending powers, trimmed so the
/// last coefficient is nonzero (the zero polynomial is `[0]`).
#[derive(Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        RealPolynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `a + b x`
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> RealPolynomial {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &RealPolynomial) -> RealPolynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> RealPolynomial {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &RealPolynomial) -> RealPolynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, n: u32) -> RealPolynomial {
        (0..n).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }

    /// `p(a + b x)`, by Horner in the polynomial ring.
    pub fn compose_affine(&self, a: f64, b: f64) -> RealPolynomial {
        let inner = RealPolynomial::linear(a, b);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| acc.mul(&inner).add(&Self::constant(c)))
    }

    /// `p(t(z))` for a Laurent polynomial `t`, by Horner in the Laurent ring.
    pub fn compose_laurent(&self, t: &LaurentPolynomial) -> LaurentPolynomial {
        self.coeffs
            .iter()
            .rev()
            .fold(LaurentPolynomial::zero(), |acc, &c| {
                &acc.multiply(t) + &LaurentPolynomial::constant(c)
            })
    }

    /// Real polynomial `lead · Π (x − r)^mult`; imaginary round-off from
    /// conjugate pairs is dropped.
    pub fn from_roots(lead: f64, roots: &[(Complex64, usize)]) -> RealPolynomial {
        let mut acc = vec![Complex64::new(lead, 0.0)];
        for &(r, mult) in roots {
            for _ in 0..mult {
                let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
                for (i, &c) in acc.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * r;
                }
                acc = next;
            }
        }
        Self::new(acc.into_iter().map(|c| c.re).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Coefficient-wise sup distance relative to the larger of the two
    /// coefficient magnitudes.
    pub fn relative_distance(&self, other: &RealPolynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let diff = (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).abs())
            .fold(0.0, f64::max);
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

impl fmt::Debug for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

/// `Q̃` with `Q̃(cos ω) = Q(sin²(ω/2))`, i.e. `Q̃(c) = Q((1 − c)/2)`.
pub fn cos_substitute(q: &RealPolynomial) -> RealPolynomial {
    q.compose_affine(0.5, -0.5)
}
