//! Non-stationary interpolatory subdivision symbols.
//!
//! For a frequency vector `Λ = {±λ_j}` and level `k` the symbol is
//! `a^[k](z) = 2 d(z) b(z)` where `d(e^{iω}) = P(sin²(ω/2))` carries the
//! exponential factors and `b(e^{iω}) = Q(sin²(ω/2))` with `Q` the
//! minimal-degree solution of `P(x)Q(x) + P(1−x)Q(1−x) = 1`.
//!
//! Two construction paths are provided: [`general_symbol`] solves the Bezout
//! identity numerically for any `Λ`, and [`a_symbol`] uses the closed form
//! of `Q` for the polyharmonic vector `λ_j = ξ`.

use crate::error::{Error, Result};
use crate::laurent::{roots, ComplexRootSet, LaurentPolynomial, RealPolynomial};
use crate::linalg;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest order for which every binomial in `R_N` is exact in binary64.
pub const MAX_ORDER: usize = 16;

/// Upper half `0 ≤ λ_1 ≤ … ≤ λ_N` of a symmetric frequency vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyVector {
    lambdas: Vec<f64>,
}

impl FrequencyVector {
    /// Sorts the input; rejects empty, negative or non-finite entries.
    pub fn new(mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidParameter("frequency vector is empty".into()));
        }
        if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidParameter(
                "frequencies must be finite and nonnegative".into(),
            ));
        }
        lambdas.sort_by(f64::total_cmp);
        Ok(FrequencyVector { lambdas })
    }

    /// `λ_1 = … = λ_N = ξ`.
    pub fn polyharmonic(order: usize, xi: f64) -> Result<Self> {
        Self::new(vec![xi; order])
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn order(&self) -> usize {
        self.lambdas.len()
    }

    /// Number of entries equal to `lambda`.
    pub fn multiplicity(&self, lambda: f64) -> usize {
        self.lambdas.iter().filter(|&&l| l == lambda).count()
    }

    /// The common value when all entries coincide.
    pub fn common_value(&self) -> Option<f64> {
        let first = self.lambdas[0];
        self.lambdas.iter().all(|&l| l == first).then_some(first)
    }
}

/// Parameters `(N, ξ, k)` of one polyharmonic symbol with the derived
/// `x₀ = e^{−ξ/2^{k+1}}` and `η = 4x₀/(1+x₀)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolContext {
    order: usize,
    xi: f64,
    level: u32,
    x0: f64,
    eta: f64,
    one_minus_eta: f64,
}

impl SymbolContext {
    pub fn new(order: usize, xi: f64, level: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("order N must be at least 1".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::OrderTooLarge(order));
        }
        if !xi.is_finite() || xi < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "frequency xi must be finite and nonnegative, got {xi}"
            )));
        }
        let u = scaled_frequency(xi, level);
        let half = 0.5 * u;
        // η = sech²(u/2) and 1 − η = tanh²(u/2), both without cancellation.
        let eta = 1.0 / half.cosh().powi(2);
        let one_minus_eta = half.tanh().powi(2);
        let x0 = (-u).exp();
        if !(x0 > 0.0 && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "xi / 2^(level+1) = {u} is too large for binary64"
            )));
        }
        Ok(SymbolContext {
            order,
            xi,
            level,
            x0,
            eta,
            one_minus_eta,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `1 − η`, computed directly.
    pub fn one_minus_eta(&self) -> f64 {
        self.one_minus_eta
    }

    /// `ξ / 2^{k+1}`.
    pub fn scaled_frequency(&self) -> f64 {
        scaled_frequency(self.xi, self.level)
    }

    pub fn frequencies(&self) -> FrequencyVector {
        FrequencyVector {
            lambdas: vec![self.xi; self.order],
        }
    }

    pub fn with_level(&self, level: u32) -> Result<Self> {
        Self::new(self.order, self.xi, level)
    }
}

fn scaled_frequency(lambda: f64, level: u32) -> f64 {
    lambda / 2f64.powi(level as i32 + 1)
}

/// `x/(1+x)²` for `x = e^{−u}`, i.e. `1/(2 + 2cosh u)`.
fn factor_weight(u: f64) -> f64 {
    1.0 / (2.0 + 2.0 * u.cosh())
}

/// `(z + x)(z⁻¹ + x)/(1 + x)²` for `x = e^{−u}`.
fn d_factor(u: f64) -> LaurentPolynomial {
    let w = factor_weight(u);
    LaurentPolynomial::new(-1, vec![w, 1.0 - 2.0 * w, w])
}

/// `x = sin²(ω/2) = 1/2 − (z + z⁻¹)/4` as a Laurent polynomial.
pub fn half_angle_variable() -> LaurentPolynomial {
    LaurentPolynomial::new(-1, vec![-0.25, 0.5, -0.25])
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// `R_N(y) = Σ_{j<N} C(N+j−1, j) y^j`.
pub fn daubechies_polynomial(order: usize) -> Result<RealPolynomial> {
    if order == 0 {
        return Err(Error::InvalidParameter("order N must be at least 1".into()));
    }
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    Ok(RealPolynomial::new(
        (0..order)
            .map(|j| binomial(order + j - 1, j) as f64)
            .collect(),
    ))
}

/// Zeros `c_j^D` of `R_N`; empty for `N = 1`.
pub fn daubechies_zeros(order: usize) -> Result<ComplexRootSet> {
    let r = daubechies_polynomial(order)?;
    if r.degree() == 0 {
        Ok(ComplexRootSet::empty())
    } else {
        roots(&r, 1e-12)
    }
}

/// `d^[k](z) = Π_j (z + x_j)(z⁻¹ + x_j)/(1 + x_j)²`, `x_j = e^{−λ_j/2^{k+1}}`.
pub fn d_symbol(lams: &FrequencyVector, level: u32) -> LaurentPolynomial {
    lams.lambdas()
        .iter()
        .fold(LaurentPolynomial::constant(1.0), |acc, &l| {
            acc.multiply(&d_factor(scaled_frequency(l, level)))
        })
}

/// `P(x) = Π_j (1 − 4x_j/(1+x_j)² · x)`.
pub fn p_polynomial(lams: &FrequencyVector, level: u32) -> RealPolynomial {
    lams.lambdas()
        .iter()
        .fold(RealPolynomial::constant(1.0), |acc, &l| {
            let w = 4.0 * factor_weight(scaled_frequency(l, level));
            acc.mul(&RealPolynomial::linear(1.0, -w))
        })
}

/// Minimal-degree `Q` with `P(x)Q(x) + P(1−x)Q(1−x) = 1`.
///
/// The identity is matched coefficient-wise with independent unknowns for
/// `Q(x)` and `Q(1−x)`, giving a square `2N × 2N` system.
pub fn bezout_solve(p: &RealPolynomial) -> Result<RealPolynomial> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "Bezout solve needs deg P >= 1".into(),
        ));
    }
    let reflected = p.compose_affine(1.0, -1.0);
    let size = 2 * n;
    let mut a = vec![vec![0.0; size]; size];
    for (row, a_row) in a.iter_mut().enumerate() {
        for i in 0..n {
            if row >= i {
                a_row[i] = p.coeff(row - i);
                a_row[n + i] = reflected.coeff(row - i);
            }
        }
    }
    let mut rhs = vec![0.0; size];
    rhs[0] = 1.0;
    let x = linalg::solve(a, rhs, 1e-12)?;
    Ok(RealPolynomial::new(x[..n].to_vec()))
}

/// `max |P(x)Q(x) + P(1−x)Q(1−x) − 1|` on `samples` equispaced points of `[0, 1]`.
pub fn bezout_residual(p: &RealPolynomial, q: &RealPolynomial, samples: usize) -> f64 {
    (0..samples)
        .map(|i| {
            let x = i as f64 / (samples - 1).max(1) as f64;
            (p.eval(x) * q.eval(x) + p.eval(1.0 - x) * q.eval(1.0 - x) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// `P(x) = (1 − ηx)^N` for the polyharmonic vector.
pub fn polyharmonic_p(ctx: &SymbolContext) -> RealPolynomial {
    RealPolynomial::linear(1.0, -ctx.eta()).pow(ctx.order() as u32)
}

/// Closed-form Bezout solution `Q(x) = (2−η)^{−N} R_N((1 − η(1−x))/(2−η))`.
pub fn q_polynomial_closed_form(ctx: &SymbolContext) -> RealPolynomial {
    let r = daubechies_polynomial(ctx.order()).expect("order validated by SymbolContext");
    let eps = ctx.one_minus_eta();
    let two_minus_eta = 1.0 + eps;
    r.compose_affine(eps / two_minus_eta, ctx.eta() / two_minus_eta)
        .scale(two_minus_eta.powi(-(ctx.order() as i32)))
}

/// Leading coefficient of `Q`: `(2−η)^{−2N+1} η^{N−1} (2N−2)!/((N−1)!)²`.
pub fn q_leading_coefficient(ctx: &SymbolContext) -> f64 {
    let n = ctx.order();
    let central = binomial(2 * n - 2, n - 1) as f64;
    (1.0 + ctx.one_minus_eta()).powi(1 - 2 * n as i32) * ctx.eta().powi(n as i32 - 1) * central
}

/// Zeros `C_j = (c_j^D (2−η) + η − 1)/η` of `Q`.
pub fn q_zeros(ctx: &SymbolContext) -> Result<ComplexRootSet> {
    let dz = daubechies_zeros(ctx.order())?;
    let eps = ctx.one_minus_eta();
    let eta = ctx.eta();
    Ok(dz.map(|c| (c * (1.0 + eps) - eps) / eta))
}

/// Symbol `a^[k]` of a subdivision scheme reproducing the exponential
/// polynomials of a frequency vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SubdivisionSymbol {
    pub frequencies: FrequencyVector,
    pub level: u32,
    pub a: LaurentPolynomial,
}

impl SubdivisionSymbol {
    pub fn order(&self) -> usize {
        self.frequencies.order()
    }

    /// `ξ` for polyharmonic symbols.
    pub fn xi(&self) -> Option<f64> {
        self.frequencies.common_value()
    }
}

fn assemble(d: &LaurentPolynomial, q: &RealPolynomial) -> LaurentPolynomial {
    let b = q.compose_laurent(&half_angle_variable());
    d.multiply(&b).scale(2.0)
}

/// Polyharmonic symbol from the closed-form `Q`.
///
/// On the circle `d = cos²(ω/2) + ε sin²(ω/2)` and `Q(sin²(ω/2))` has
/// positive coefficients, so `a = 2dQ` is sampled without cancellation at
/// `4N` points and the `4N − 1` coefficients are recovered by an exact-size
/// cosine transform. Expanding `Q ∘ x` in the Laurent ring instead produces
/// alternating coefficients of size `~R_N(1)` and loses the sign of `a`
/// near `z = −1` for `N ≳ 8`.
pub fn a_symbol(ctx: &SymbolContext) -> SubdivisionSymbol {
    let n = ctx.order();
    let eps = ctx.one_minus_eta();
    let q = q_polynomial_closed_form(ctx);
    let m = 4 * n;
    let angle = |i: usize| 2.0 * PI * (i % m) as f64 / m as f64;
    let samples: Vec<f64> = (0..m)
        .map(|k| {
            let half = angle(k) / 2.0;
            let (s, c) = (half.sin().powi(2), half.cos().powi(2));
            2.0 * (c + eps * s).powi(n as i32) * q.eval(s)
        })
        .collect();
    let half: Vec<f64> = (0..2 * n)
        .map(|j| {
            let sum: f64 = samples
                .iter()
                .enumerate()
                .map(|(k, &v)| v * angle(j * k).cos())
                .sum();
            sum / m as f64
        })
        .collect();
    SubdivisionSymbol {
        frequencies: ctx.frequencies(),
        level: ctx.level(),
        a: LaurentPolynomial::symmetric(&half),
    }
}

/// Symbol for an arbitrary frequency vector via the numeric Bezout solve.
pub fn general_symbol(lams: &FrequencyVector, level: u32) -> Result<SubdivisionSymbol> {
    let d = d_symbol(lams, level);
    let q = bezout_solve(&p_polynomial(lams, level))?;
    Ok(SubdivisionSymbol {
        frequencies: lams.clone(),
        level,
        a: assemble(&d, &q),
    })
}

/// Structural diagnostics of a symbol on an equispaced circle grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolReport {
    /// `max_j |a_j − a_{−j}|`
    pub symmetry_defect: f64,
    /// `min_ω a(e^{iω})`
    pub min_circle_value: f64,
    /// `max_ω |a(z) + a(−z) − 2|`
    pub interpolatory_defect: f64,
    /// `max_j |a_{2j} − δ_{j0}|`
    pub even_coefficient_defect: f64,
}

impl SymbolReport {
    pub const DEFECT_TOL: f64 = 1e-10;
    pub const MIN_VALUE_TOL: f64 = -1e-12;

    pub fn passes(&self) -> bool {
        self.symmetry_defect <= Self::DEFECT_TOL
            && self.interpolatory_defect <= Self::DEFECT_TOL
            && self.even_coefficient_defect <= Self::DEFECT_TOL
            && self.min_circle_value >= Self::MIN_VALUE_TOL
    }
}

pub fn verify_symbol(s: &SubdivisionSymbol, grid_size: usize) -> SymbolReport {
    let grid_size = grid_size.max(64);
    let a = &s.a;
    let mut min_value = f64::INFINITY;
    let mut interp: f64 = 0.0;
    for k in 0..grid_size {
        let w = 2.0 * PI * k as f64 / grid_size as f64;
        let v = a.eval_circle(w).re;
        min_value = min_value.min(v);
        interp = interp.max((v + a.eval_circle(w + PI).re - 2.0).abs());
    }
    let span = a.lo().abs().max(a.hi().abs());
    let even = (-span..=span)
        .filter(|j| j % 2 == 0)
        .map(|j| (a.coeff(j) - if j == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    SymbolReport {
        symmetry_defect: a.symmetry_defect(),
        min_circle_value: min_value,
        interpolatory_defect: interp,
        even_coefficient_defect: even,
    }
}

/// `a(e^{iω})` evaluated pointwise from the product definition, without
/// forming any Laurent coefficients.
pub fn symbol_value_direct(lams: &FrequencyVector, level: u32, q: &RealPolynomial, omega: f64) -> f64 {
    let z = Complex64::from_polar(1.0, omega);
    let d: Complex64 = lams
        .lambdas()
        .iter()
        .map(|&l| {
            let x = (-scaled_frequency(l, level)).exp();
            (z + x) * (z.inv() + x) / ((1.0 + x) * (1.0 + x))
        })
        .product();
    2.0 * d.re * q.eval((omega / 2.0).sin().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    const US: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];

    fn ctx(n: usize, xi: f64, k: u32) -> SymbolContext {
        SymbolContext::new(n, xi, k).unwrap()
    }

    /// Level-0 context with `ξ/2 = u`.
    fn ctx_u(n: usize, u: f64) -> SymbolContext {
        ctx(n, 2.0 * u, 0)
    }

    fn poly(c: &[f64]) -> RealPolynomial {
        RealPolynomial::new(c.to_vec())
    }

    #[test]
    fn context_derived_values() {
        let c = ctx(3, 0.0, 4);
        assert_eq!((c.x0(), c.eta(), c.one_minus_eta()), (1.0, 1.0, 0.0));
        let c = ctx(1, 2.0 * 2f64.ln(), 0);
        assert!((c.x0() - 0.5).abs() < 1e-15);
        assert!((c.eta() - 8.0 / 9.0).abs() < 1e-15);
        let c = ctx(2, 3.0, 1);
        let direct = 4.0 * c.x0() / (1.0 + c.x0()).powi(2);
        assert!((c.eta() - direct).abs() < 1e-15);
        assert!((c.eta() + c.one_minus_eta() - 1.0).abs() < 1e-15);
        assert!(c.eta() < 1.0 && c.x0() < 1.0);
        assert!(SymbolContext::new(0, 1.0, 0).is_err());
        assert!(SymbolContext::new(2, -1.0, 0).is_err());
        assert!(matches!(SymbolContext::new(17, 1.0, 0), Err(Error::OrderTooLarge(17))));
    }

    #[test]
    fn daubechies_polynomial_examples() {
        assert_eq!(daubechies_polynomial(1).unwrap(), poly(&[1.0]));
        assert_eq!(daubechies_polynomial(2).unwrap(), poly(&[1.0, 2.0]));
        let r3 = daubechies_polynomial(3).unwrap();
        assert_eq!(r3, poly(&[1.0, 3.0, 6.0]));
        // (2N−2)!/((N−1)!)² = 4!/(2!)² = 6
        assert_eq!(r3.leading(), 24.0 / 4.0);
        for n in 1..=16 {
            let r = daubechies_polynomial(n).unwrap();
            assert_eq!(r.degree(), n - 1);
            assert_eq!(r.leading(), binomial(2 * n - 2, n - 1) as f64);
            assert!(r.coeffs().iter().all(|&c| c > 0.0 && c.fract() == 0.0));
        }
        assert!(matches!(daubechies_polynomial(17), Err(Error::OrderTooLarge(17))));
    }

    #[test]
    fn d_symbol_examples() {
        let zero = FrequencyVector::new(vec![0.0]).unwrap();
        assert_eq!(d_symbol(&zero, 0), LaurentPolynomial::new(-1, vec![0.25, 0.5, 0.25]));

        let lams = FrequencyVector::new(vec![0.3, 1.1, 2.5]).unwrap();
        let d = d_symbol(&lams, 2);
        assert!((d.eval_circle(0.0).re - 1.0).abs() < 1e-15);
        assert!(d.symmetry_defect() < 1e-16);
        assert_eq!((d.lo(), d.hi()), (-3, 3));

        // x₁ = 1/2: d(−1) = (1/2)²/(3/2)² = 1/9
        let half = FrequencyVector::new(vec![2.0 * 2f64.ln()]).unwrap();
        assert!((d_symbol(&half, 0).eval_circle(PI).re - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn p_polynomial_examples() {
        let zeros = FrequencyVector::new(vec![0.0; 3]).unwrap();
        assert_eq!(p_polynomial(&zeros, 0), poly(&[1.0, -1.0]).pow(3));

        let c = ctx(4, 1.7, 1);
        let p = p_polynomial(&c.frequencies(), c.level());
        assert!(p.relative_distance(&polyharmonic_p(&c)) < 1e-15);

        let half = FrequencyVector::new(vec![2.0 * 2f64.ln()]).unwrap();
        let p = p_polynomial(&half, 0);
        assert!((p.coeff(0) - 1.0).abs() < 1e-15 && (p.coeff(1) + 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn p_matches_d_on_circle() {
        let lams = FrequencyVector::new(vec![0.0, 0.4, 0.4, 3.0]).unwrap();
        for level in [0, 2] {
            let d = d_symbol(&lams, level);
            let p = p_polynomial(&lams, level);
            assert_eq!(p.degree(), 4);
            assert_eq!(p.coeff(0), 1.0);
            for k in 0..100 {
                let w = 2.0 * PI * k as f64 / 100.0;
                let diff = d.eval_circle(w).re - p.eval((w / 2.0).sin().powi(2));
                assert!(diff.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn bezout_examples() {
        assert!(bezout_solve(&poly(&[1.0, -1.0])).unwrap().relative_distance(&poly(&[1.0])) < 1e-15);
        let q2 = bezout_solve(&poly(&[1.0, -1.0]).pow(2)).unwrap();
        assert!(q2.relative_distance(&poly(&[1.0, 2.0])) < 1e-14);

        let c = ctx(2, 2.0 * 2f64.ln(), 0); // η = 8/9
        let numeric = bezout_solve(&polyharmonic_p(&c)).unwrap();
        assert!(numeric.relative_distance(&q_polynomial_closed_form(&c)) <= 1e-12);
    }

    #[test]
    fn bezout_rejects_shared_zero() {
        // P(x) = x − 1/2 vanishes at 1/2 together with P(1 − x).
        assert!(matches!(
            bezout_solve(&poly(&[-0.5, 1.0])),
            Err(Error::SingularSystem { .. })
        ));
        assert!(bezout_solve(&poly(&[2.0])).is_err());
    }

    #[test]
    fn closed_form_examples() {
        for n in 1..=8 {
            assert_eq!(q_polynomial_closed_form(&ctx(n, 0.0, 3)), daubechies_polynomial(n).unwrap());
        }
        for u in US {
            let c = ctx_u(1, u);
            let q = q_polynomial_closed_form(&c);
            assert_eq!(q.degree(), 0);
            assert!((q.coeff(0) - 1.0 / (2.0 - c.eta())).abs() < 1e-15);
            assert!(bezout_residual(&polyharmonic_p(&c), &q, 200) < 1e-14);
        }
        for n in 1..=8 {
            for u in US {
                let c = ctx_u(n, u);
                let q = q_polynomial_closed_form(&c);
                let p = polyharmonic_p(&c);
                assert!((q.eval(0.5) - 1.0 / (2.0 * p.eval(0.5))).abs() < 1e-12 * q.eval(0.5));
            }
        }
    }

    #[test]
    fn bezout_sweep_and_closed_form_agreement() {
        for n in 1..=8 {
            for u in US {
                let c = ctx_u(n, u);
                let p = polyharmonic_p(&c);
                let closed = q_polynomial_closed_form(&c);
                let numeric = bezout_solve(&p).unwrap();
                assert!(bezout_residual(&p, &closed, 200) <= 1e-10, "N={n} u={u}");
                assert!(bezout_residual(&p, &numeric, 200) <= 1e-10, "N={n} u={u}");
                assert!(closed.relative_distance(&numeric) <= 1e-9, "N={n} u={u}");
                assert!(closed.degree() == n - 1);
                for i in 1..200 {
                    assert!(closed.eval(i as f64 / 200.0) > 0.0);
                }
            }
        }
    }

    #[test]
    fn q_zero_examples() {
        let z = q_zeros(&ctx(2, 0.0, 0)).unwrap();
        assert_eq!(z.roots(), &[(Complex64::new(-0.5, 0.0), 1)]);

        // η = 8/9: C = ((−1/2)(10/9) − 1/9)/(8/9) = −3/4, which is also the
        // root of the closed-form Q = (2−η)^{−2}(1 + 2(1 − η + ηx)/(2−η)).
        let c = ctx(2, 2.0 * 2f64.ln(), 0);
        let z = q_zeros(&c).unwrap();
        assert_eq!(z.degree(), 1);
        assert!((z.roots()[0].0 - Complex64::new(-0.75, 0.0)).norm() < 1e-14);
        assert!(q_polynomial_closed_form(&c).eval(-0.75).abs() < 1e-14);

        assert!(q_zeros(&ctx(1, 1.0, 0)).unwrap().is_empty());
    }

    #[test]
    fn q_rebuilt_from_zeros() {
        for n in 1..=8 {
            for u in US {
                let c = ctx_u(n, u);
                let rebuilt = q_zeros(&c).unwrap().to_polynomial(q_leading_coefficient(&c));
                let closed = q_polynomial_closed_form(&c);
                assert!(rebuilt.relative_distance(&closed) <= 1e-8, "N={n} u={u}");
            }
        }
    }

    #[test]
    fn n1_symbol_closed_form() {
        for (xi, k) in [(0.0, 0), (1.0, 0), (3.0, 2), (0.5, 5)] {
            let c = ctx(1, xi, k);
            let s = a_symbol(&c);
            let side = 1.0 / (2.0 * c.scaled_frequency().cosh());
            assert_eq!((s.a.lo(), s.a.hi()), (-1, 1));
            assert!((s.a.coeff(-1) - side).abs() < 1e-15);
            assert!((s.a.coeff(0) - 1.0).abs() < 1e-15);
            assert!((s.a.coeff(1) - side).abs() < 1e-15);
        }
    }

    #[test]
    fn symbol_matches_pointwise_product() {
        for n in [1, 2, 5] {
            let c = ctx(n, 1.3, 1);
            let s = a_symbol(&c);
            let q = q_polynomial_closed_form(&c);
            for k in 0..64 {
                let w = 2.0 * PI * k as f64 / 64.0;
                let direct = symbol_value_direct(&c.frequencies(), c.level(), &q, w);
                assert!((s.a.eval_circle(w).re - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn deslauriers_dubuc_four_point() {
        let s = a_symbol(&ctx(2, 0.0, 0));
        let dd = [-1.0 / 16.0, 0.0, 9.0 / 16.0, 1.0, 9.0 / 16.0, 0.0, -1.0 / 16.0];
        assert_eq!((s.a.lo(), s.a.hi()), (-3, 3));
        for (j, e) in (-3..=3).zip(dd) {
            assert!((s.a.coeff(j) - e).abs() < 1e-15, "j={j}");
        }
        // Same through the Bezout path.
        let g = general_symbol(&FrequencyVector::new(vec![0.0, 0.0]).unwrap(), 0).unwrap();
        assert!(g.a.max_abs_diff(&s.a) < 1e-14);
    }

    #[test]
    fn symbol_at_one() {
        for n in 1..=6 {
            let c = ctx(n, 2.2, 1);
            let a1 = a_symbol(&c).a.eval_circle(0.0).re;
            assert!((a1 - 2.0 * q_polynomial_closed_form(&c).eval(0.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn symbol_structure_sweep() {
        for n in 1..=8 {
            for u in US {
                let c = ctx_u(n, u);
                let s = a_symbol(&c);
                assert_eq!((s.a.lo(), s.a.hi()), (1 - 2 * n as i64, 2 * n as i64 - 1));
                let rep = verify_symbol(&s, 512);
                assert!(rep.passes(), "N={n} u={u}: {rep:?}");
            }
        }
    }

    #[test]
    fn verify_symbol_examples() {
        let rep = verify_symbol(&a_symbol(&ctx(2, 0.0, 0)), 512);
        assert!(rep.passes());
        assert!(rep.min_circle_value.abs() < 1e-15);

        let mut s = a_symbol(&ctx(2, 1.0, 0));
        let (lo, mut c) = s.a.clone().into_coeffs();
        c[(-lo) as usize] += 1e-6;
        s.a = LaurentPolynomial::new(lo, c);
        let rep = verify_symbol(&s, 512);
        assert!(!rep.passes());
        assert!(rep.interpolatory_defect > 1e-7);

        assert!(verify_symbol(&a_symbol(&ctx(1, 1.0, 0)), 64).passes());
    }

    #[test]
    fn classical_degeneration() {
        for n in 1..=8 {
            let classical = bezout_solve(&poly(&[1.0, -1.0]).pow(n as u32)).unwrap();
            let expected = assemble(&d_factor(0.0).pow(n as u32), &classical);
            let s = a_symbol(&ctx(n, 0.0, 0));
            assert!(s.a.max_abs_diff(&expected) <= 1e-10, "N={n}");
        }
    }

    #[test]
    fn deep_levels_approach_classical() {
        for n in 1..=8 {
            let deep = a_symbol(&ctx(n, 1.0, 20));
            let flat = a_symbol(&ctx(n, 0.0, 0));
            assert!(deep.a.max_abs_diff(&flat.a) <= 1e-8, "N={n}");
        }
    }

    #[test]
    fn general_path_distinct_frequencies() {
        let lams = FrequencyVector::new(vec![0.0, 0.7, 1.9]).unwrap();
        for level in 0..3 {
            let s = general_symbol(&lams, level).unwrap();
            assert_eq!((s.a.lo(), s.a.hi()), (-5, 5));
            assert!(verify_symbol(&s, 256).passes());
            let q = bezout_solve(&p_polynomial(&lams, level)).unwrap();
            for i in 1..50 {
                assert!(q.eval(i as f64 / 50.0) > 0.0);
            }
        }
        // Polyharmonic input through the general path agrees with the closed form.
        let c = ctx(4, 2.5, 1);
        let g = general_symbol(&c.frequencies(), 1).unwrap();
        assert!(g.a.max_abs_diff(&a_symbol(&c).a) < 1e-10);
    }
}
