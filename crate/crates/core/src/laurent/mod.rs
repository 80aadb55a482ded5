//! Polynomial substrate: two-sided Laurent polynomials, ordinary polynomials
//! in the monomial basis, and a simultaneous-iteration root finder.

mod real;
mod roots;

pub use real::{cos_substitute, RealPolynomial};
pub use roots::{roots, roots_with, ComplexRootSet, RootFinderOptions};

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Finitely supported two-sided sequence `Σ c_j z^j`, stored as the lowest
/// exponent plus a dense coefficient run.
///
/// Values are kept in trimmed form: the first and last coefficients are
/// nonzero, except for the zero polynomial which is `lo = 0, coeffs = [0]`.
#[derive(Clone, PartialEq)]
pub struct LaurentPolynomial {
    lo: i64,
    coeffs: Vec<f64>,
}

impl LaurentPolynomial {
    pub fn new(lo: i64, coeffs: Vec<f64>) -> Self {
        let mut p = LaurentPolynomial { lo, coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        LaurentPolynomial {
            lo: 0,
            coeffs: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(0, vec![c])
    }

    /// `c · z^exp`
    pub fn monomial(c: f64, exp: i64) -> Self {
        Self::new(exp, vec![c])
    }

    /// Symmetric polynomial `c₀ + Σ_{j≥1} c_j (z^j + z^{-j})` from its
    /// nonnegative half.
    pub fn symmetric(half: &[f64]) -> Self {
        if half.is_empty() {
            return Self::zero();
        }
        let n = half.len() as i64 - 1;
        let mut coeffs: Vec<f64> = half.iter().rev().copied().collect();
        coeffs.extend(half.iter().skip(1).copied());
        Self::new(-n, coeffs)
    }

    fn trim(&mut self) {
        if self.coeffs.is_empty() {
            *self = Self::zero();
            return;
        }
        let first = self.coeffs.iter().position(|&c| c != 0.0);
        match first {
            None => *self = Self::zero(),
            Some(first) => {
                let last = self.coeffs.iter().rposition(|&c| c != 0.0).unwrap();
                if first > 0 || last + 1 < self.coeffs.len() {
                    self.coeffs = self.coeffs[first..=last].to_vec();
                    self.lo += first as i64;
                }
            }
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> (i64, Vec<f64>) {
        (self.lo, self.coeffs)
    }

    /// Coefficient of `z^j`; zero outside the stored range.
    pub fn coeff(&self, j: i64) -> f64 {
        let idx = j - self.lo;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.lo + i as i64, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn multiply(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPolynomial::new(self.lo + other.lo, out)
    }

    pub fn pow(&self, n: u32) -> LaurentPolynomial {
        let mut acc = LaurentPolynomial::constant(1.0);
        for _ in 0..n {
            acc = acc.multiply(self);
        }
        acc
    }

    pub fn scale(&self, s: f64) -> LaurentPolynomial {
        LaurentPolynomial::new(self.lo, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: i64) -> LaurentPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPolynomial {
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `p(z⁻¹)`: the coefficient of `z^j` moves to `z^{-j}`.
    pub fn reflect_conjugate(&self) -> LaurentPolynomial {
        let coeffs: Vec<f64> = self.coeffs.iter().rev().copied().collect();
        LaurentPolynomial::new(-self.hi(), coeffs)
    }

    /// `Σ c_j e^{ijω}`.
    pub fn eval_circle(&self, omega: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.terms() {
            let angle = j as f64 * omega;
            acc += Complex64::new(c * angle.cos(), c * angle.sin());
        }
        debug_assert!(
            !self.is_exactly_symmetric() || acc.im.abs() <= 1e-12 * self.abs_sum().max(1e-300),
            "symmetric Laurent polynomial has non-real circle value {acc}"
        );
        acc
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner in z, then rescale by z^lo.
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo as i32)
    }

    fn is_exactly_symmetric(&self) -> bool {
        self.lo == -self.hi()
            && self
                .coeffs
                .iter()
                .zip(self.coeffs.iter().rev())
                .all(|(a, b)| a == b)
    }

    /// `max_j |c_j − c_{-j}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let span = self.lo.abs().max(self.hi().abs());
        (0..=span)
            .map(|j| (self.coeff(j) - self.coeff(-j)).abs())
            .fold(0.0, f64::max)
    }

    /// Coefficient-wise sup distance, treating missing entries as zero.
    pub fn max_abs_diff(&self, other: &LaurentPolynomial) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi)
            .map(|j| (self.coeff(j) - other.coeff(j)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent[lo={}; {:?}]", self.lo, self.coeffs)
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        let coeffs = (lo..=hi).map(|j| self.coeff(j) + rhs.coeff(j)).collect();
        LaurentPolynomial::new(lo, coeffs)
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(-1.0)
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.multiply(rhs)
    }
}
