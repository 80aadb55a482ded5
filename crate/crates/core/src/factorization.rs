//! Spectral factorization of the subdivision symbol into orthonormal
//! refinement masks `g^[m]` with `a^[m](e^{iω}) = ½|g^[m](e^{iω})|²`.
//!
//! `g = M₁ M₂` where `M₁(z) = ((z + x₀)/(1 + x₀))^N` is the square root of
//! `d`, and `M₂` is the square root of `4·Q(sin²(ω/2))`, built from the zeros
//! of the Daubechies polynomial `R_N` mapped through the affine change of
//! variable that relates `Q` to `R_N`.

use crate::error::{Error, Result};
use crate::laurent::{cos_substitute, roots, LaurentPolynomial, RealPolynomial};
use crate::symbols::{self, a_symbol, SubdivisionSymbol, SymbolContext};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Grid used by the mask self-checks.
pub const DEFAULT_GRID: usize = 512;

/// Level-`m` low-pass filter of the non-stationary father wavelet, with
/// support on exponents `0 … 2N−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementMask {
    pub context: SymbolContext,
    pub g: LaurentPolynomial,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaskDiagnostics {
    /// `max_l |Σ_j g_j g_{j+2l} − 2δ_{l0}|`
    pub qmf_residual: f64,
    /// `max_ω |½|g|² − a|`
    pub factorization_residual: f64,
    /// `max_ω ||g(z)|² + |g(−z)|² − 4|`
    pub complementarity_residual: f64,
}

impl MaskDiagnostics {
    pub const TOL: f64 = 1e-9;

    pub fn passes(&self) -> bool {
        self.qmf_residual <= Self::TOL
            && self.factorization_residual <= Self::TOL
            && self.complementarity_residual <= Self::TOL
    }
}

impl RefinementMask {
    pub fn order(&self) -> usize {
        self.context.order()
    }

    pub fn level(&self) -> u32 {
        self.context.level()
    }

    /// Coefficients `g_0 … g_{2N−1}`, zero-padded to the full support.
    pub fn taps(&self) -> Vec<f64> {
        (0..2 * self.order() as i64).map(|j| self.g.coeff(j)).collect()
    }

    /// `h_j = (−1)^j g_{1−j}`, supported on `2−2N … 1`.
    pub fn highpass(&self) -> LaurentPolynomial {
        let lo = 2 - 2 * self.order() as i64;
        let coeffs = (lo..=1)
            .map(|j| {
                let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                sign * self.g.coeff(1 - j)
            })
            .collect();
        LaurentPolynomial::new(lo, coeffs)
    }

    pub fn qmf_residual(&self) -> f64 {
        qmf_residual(&self.g)
    }

    pub fn factorization_residual(&self, symbol: &SubdivisionSymbol, grid: usize) -> f64 {
        factorization_residual(&self.g, &symbol.a, grid)
    }

    pub fn complementarity_residual(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|k| {
                let w = 2.0 * PI * k as f64 / grid as f64;
                (self.g.eval_circle(w).norm_sqr() + self.g.eval_circle(w + PI).norm_sqr() - 4.0)
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn diagnostics(&self, grid: usize) -> MaskDiagnostics {
        let symbol = a_symbol(&self.context);
        MaskDiagnostics {
            qmf_residual: self.qmf_residual(),
            factorization_residual: self.factorization_residual(&symbol, grid),
            complementarity_residual: self.complementarity_residual(grid),
        }
    }
}

/// `max_l |Σ_j g_j g_{j+2l} − 2δ_{l0}|`.
pub fn qmf_residual(g: &LaurentPolynomial) -> f64 {
    let span = g.hi() - g.lo();
    (-(span / 2) - 1..=span / 2 + 1)
        .map(|l| {
            let s: f64 = g.terms().map(|(j, c)| c * g.coeff(j + 2 * l)).sum();
            (s - if l == 0 { 2.0 } else { 0.0 }).abs()
        })
        .fold(0.0, f64::max)
}

/// `max_ω |½|g(e^{iω})|² − a(e^{iω})|` on an equispaced grid.
pub fn factorization_residual(g: &LaurentPolynomial, a: &LaurentPolynomial, grid: usize) -> f64 {
    (0..grid)
        .map(|k| {
            let w = 2.0 * PI * k as f64 / grid as f64;
            (0.5 * g.eval_circle(w).norm_sqr() - a.eval_circle(w).re).abs()
        })
        .fold(0.0, f64::max)
}

/// `M₁(z) = (z + x₀)^N / (1 + x₀)^N`.
pub fn m1_factor(ctx: &SymbolContext) -> LaurentPolynomial {
    let x0 = ctx.x0();
    LaurentPolynomial::new(0, vec![x0 / (1.0 + x0), 1.0 / (1.0 + x0)]).pow(ctx.order() as u32)
}

fn expand_real(lead: f64, factors: impl Iterator<Item = (Complex64, Complex64)>) -> (Vec<f64>, f64) {
    // Π (u + v z) with complex u, v; returns real parts and the largest
    // imaginary residue relative to the coefficient scale.
    let mut acc = vec![Complex64::new(lead, 0.0)];
    for (u, v) in factors {
        let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            next[i] += c * u;
            next[i + 1] += c * v;
        }
        acc = next;
    }
    let scale = acc.iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
    let imag = acc.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    (
        acc.iter().map(|c| c.re).collect(),
        if scale > 0.0 { imag / scale } else { imag },
    )
}

/// The root of `z² − 2cz + 1` with modulus `≤ 1`, as `1/(c ± √(c²−1))`.
fn inner_reciprocal_root(c: Complex64) -> Complex64 {
    let s = (c * c - 1.0).sqrt();
    let big = if (c + s).norm() >= (c - s).norm() { c + s } else { c - s };
    big.inv()
}

const INTERVAL_TOL: f64 = 1e-6;

/// Square root of a trigonometric polynomial given in the cosine variable:
/// returns real `q` of degree `deg Q̃` with
/// `|q(e^{iω})|² = scale_target · Q̃(cos ω)` and `q(1) > 0`.
///
/// From each reciprocal pair of zeros the one inside the closed unit disk is
/// kept. Zeros of `Q̃` inside `(−1, 1)` must have even multiplicity; their
/// unit-circle images are split evenly.
pub fn riesz_factor(qtilde: &RealPolynomial, scale_target: f64) -> Result<LaurentPolynomial> {
    if !(scale_target > 0.0 && scale_target.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scale target must be positive, got {scale_target}"
        )));
    }
    let coeff_scale: f64 = qtilde.coeffs().iter().map(|c| c.abs()).sum();
    let min = (0..DEFAULT_GRID)
        .map(|k| qtilde.eval((2.0 * PI * k as f64 / DEFAULT_GRID as f64).cos()))
        .fold(f64::INFINITY, f64::min);
    if min < -1e-10 * coeff_scale.max(1.0) {
        return Err(Error::NegativeOnCircle(min));
    }
    if qtilde.degree() == 0 {
        return Ok(LaurentPolynomial::constant((scale_target * qtilde.coeff(0)).sqrt()));
    }

    let zeros = roots(qtilde, 1e-12)?.expanded();
    let mut interior: Vec<f64> = Vec::new();
    let mut picked: Vec<Complex64> = Vec::new();
    for c in zeros {
        let on_axis = c.im.abs() <= INTERVAL_TOL;
        if on_axis && (c.re.abs() - 1.0).abs() <= INTERVAL_TOL {
            picked.push(Complex64::new(c.re.signum(), 0.0));
        } else if on_axis && c.re.abs() < 1.0 {
            interior.push(c.re);
        } else {
            picked.push(inner_reciprocal_root(c));
        }
    }
    if interior.len() % 2 == 1 {
        return Err(Error::NegativeOnCircle(min));
    }
    interior.sort_by(f64::total_cmp);
    for (i, c) in interior.iter().enumerate() {
        let theta = c.clamp(-1.0, 1.0).acos();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        picked.push(Complex64::from_polar(1.0, sign * theta));
    }

    let denom: f64 = picked.iter().map(|r| 2.0 * r.norm()).product();
    let gain = (scale_target * qtilde.leading().abs() / denom).sqrt();
    let (coeffs, _) = expand_real(gain, picked.iter().map(|&r| (-r, Complex64::new(1.0, 0.0))));
    let q = LaurentPolynomial::new(0, coeffs);
    Ok(if q.eval_circle(0.0).re < 0.0 { q.scale(-1.0) } else { q })
}

/// Builds refinement masks for one order, caching the zeros of `R_N`.
#[derive(Clone, Debug)]
pub struct MaskBuilder {
    order: usize,
    daubechies_zeros: Vec<Complex64>,
}

impl MaskBuilder {
    pub fn new(order: usize) -> Result<Self> {
        Ok(MaskBuilder {
            order,
            daubechies_zeros: symbols::daubechies_zeros(order)?.expanded(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `M₂` with `|M₂(e^{iω})|² = 4 Q(sin²(ω/2))`, zeros outside the disk.
    ///
    /// With `α_j = 1/2 − c_j^D` and `β = η/(2(2−η))` each factor of `Q` in
    /// the cosine variable is `α_j − β cos ω = (|α_j + s_j|/2)·|1 − ρ_j z|²`,
    /// `s_j = √(α_j² − β²)`, `ρ_j = β/(α_j + s_j)`. Nothing here divides by η,
    /// so the construction stays well scaled for large `ξ`.
    pub fn m2_factor(&self, ctx: &SymbolContext) -> (LaurentPolynomial, f64) {
        assert_eq!(ctx.order(), self.order, "context order differs from builder");
        let n = self.order;
        let eps = ctx.one_minus_eta();
        let beta = ctx.eta() / (2.0 * (1.0 + eps));
        let central = symbols::q_leading_coefficient(&SymbolContext::new(n, 0.0, 0).unwrap());
        let mut gain = 2.0 * (1.0 + eps).powf(-(n as f64) / 2.0) * central.sqrt();
        let mut factors = Vec::with_capacity(n.saturating_sub(1));
        for &cd in &self.daubechies_zeros {
            let alpha = Complex64::new(0.5, 0.0) - cd;
            let s = (alpha * alpha - beta * beta).sqrt();
            let big = if (alpha + s).norm() >= (alpha - s).norm() { alpha + s } else { alpha - s };
            let rho = beta / big;
            gain *= (big.norm() / 2.0).sqrt();
            factors.push((Complex64::new(1.0, 0.0), -rho));
        }
        let (coeffs, imag) = expand_real(gain, factors.into_iter());
        (LaurentPolynomial::new(0, coeffs), imag)
    }

    pub fn mask(&self, ctx: &SymbolContext) -> RefinementMask {
        let (m2, _) = self.m2_factor(ctx);
        let g = m1_factor(ctx).multiply(&m2);
        let g = if g.eval_circle(0.0).re < 0.0 { g.scale(-1.0) } else { g };
        RefinementMask {
            context: *ctx,
            g,
        }
    }

    pub fn family(&self, xi: f64, base_level: u32, levels: u32) -> Result<Vec<RefinementMask>> {
        (base_level..base_level + levels)
            .map(|m| Ok(self.mask(&SymbolContext::new(self.order, xi, m)?)))
            .collect()
    }
}

pub fn refinement_mask(ctx: &SymbolContext) -> Result<RefinementMask> {
    Ok(MaskBuilder::new(ctx.order())?.mask(ctx))
}

/// Masks `g^[m]` for `m = 0 … levels−1`.
pub fn mask_family(order: usize, xi: f64, levels: u32) -> Result<Vec<RefinementMask>> {
    if levels == 0 {
        return Err(Error::InvalidParameter("mask family needs levels >= 1".into()));
    }
    MaskBuilder::new(order)?.family(xi, 0, levels)
}

/// Classical Daubechies low-pass filter of order `N` (`Σ g_j = 2`), built
/// through the numeric Bezout solve of `P = (1 − x)^N` and a Riesz
/// factorization of the resulting `Q̃`.
pub fn classical_mask(order: usize) -> Result<LaurentPolynomial> {
    let p = RealPolynomial::linear(1.0, -1.0).pow(order as u32);
    let q = symbols::bezout_solve(&p)?;
    let inner = riesz_factor(&cos_substitute(&q), 4.0)?;
    // Reverse so the zeros of M₂ lie outside the disk, as in MaskBuilder.
    let m2 = inner.reflect_conjugate().shift(order as i64 - 1);
    let m1 = LaurentPolynomial::new(0, vec![0.5, 0.5]).pow(order as u32);
    let g = m1.multiply(&m2);
    Ok(if g.eval_circle(0.0).re < 0.0 { g.scale(-1.0) } else { g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{q_polynomial_closed_form, verify_symbol};

    fn ctx(n: usize, xi: f64, k: u32) -> SymbolContext {
        SymbolContext::new(n, xi, k).unwrap()
    }

    fn grid_max(f: impl Fn(f64) -> f64, grid: usize) -> f64 {
        (0..grid)
            .map(|k| f(2.0 * PI * k as f64 / grid as f64).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn m1_examples() {
        assert_eq!(m1_factor(&ctx(2, 0.0, 0)), LaurentPolynomial::new(0, vec![0.25, 0.5, 0.25]));
        let c = ctx(1, 2.0 * 2f64.ln(), 0);
        let m1 = m1_factor(&c);
        assert!((m1.coeff(0) - 0.5 / 1.5).abs() < 1e-15 && (m1.coeff(1) - 1.0 / 1.5).abs() < 1e-15);
        for (n, xi, k) in [(1, 0.3, 0), (4, 2.0, 1), (7, 5.0, 3)] {
            let c = ctx(n, xi, k);
            let m1 = m1_factor(&c);
            assert!((m1.eval_circle(0.0).re - 1.0).abs() < 1e-14);
            let d = symbols::d_symbol(&c.frequencies(), k);
            assert!(grid_max(|w| m1.eval_circle(w).norm_sqr() - d.eval_circle(w).re, 512) <= 1e-10);
        }
    }

    #[test]
    fn riesz_constant() {
        let q = riesz_factor(&RealPolynomial::constant(1.0), 4.0).unwrap();
        assert_eq!(q, LaurentPolynomial::constant(2.0));
    }

    #[test]
    fn riesz_linear() {
        // Q̃(c) = 2 − c: zero of z² − 4z + 1 inside the disk is r = 2 − √3, and
        // q(z) = √(2/r)(z − r).
        let q = riesz_factor(&RealPolynomial::linear(2.0, -1.0), 4.0).unwrap();
        let r = 2.0 - 3f64.sqrt();
        let gain = (2.0 / r).sqrt();
        let expected = LaurentPolynomial::new(0, vec![-gain * r, gain]).scale(-1.0);
        // q(1) > 0 fixes the sign: gain(1 − r) > 0, so no flip is needed.
        let expected = if expected.eval_circle(0.0).re < 0.0 { expected.scale(-1.0) } else { expected };
        assert!(q.max_abs_diff(&expected) < 1e-14, "{q:?}");
        assert!(grid_max(|w| q.eval_circle(w).norm_sqr() - 4.0 * (2.0 - w.cos()), 512) < 1e-12);
    }

    #[test]
    fn riesz_interior_double_zero_and_endpoints() {
        // (c − 0.3)² (c + 2): double interior zero.
        let qt = RealPolynomial::new(vec![0.09, -0.6, 1.0]).mul(&RealPolynomial::linear(2.0, 1.0));
        let q = riesz_factor(&qt, 3.0).unwrap();
        assert_eq!(q.hi(), 3);
        assert!(grid_max(|w| q.eval_circle(w).norm_sqr() - 3.0 * qt.eval(w.cos()), 512) <= 1e-9);

        // (1 − c)(1 + c)² (c + 3): zeros at both endpoints.
        let qt = RealPolynomial::linear(1.0, -1.0)
            .mul(&RealPolynomial::linear(1.0, 1.0).pow(2))
            .mul(&RealPolynomial::linear(3.0, 1.0));
        let q = riesz_factor(&qt, 1.0).unwrap();
        assert_eq!(q.hi(), 4);
        assert!(grid_max(|w| q.eval_circle(w).norm_sqr() - qt.eval(w.cos()), 512) <= 1e-9);
    }

    #[test]
    fn riesz_rejects_negative() {
        assert!(matches!(
            riesz_factor(&RealPolynomial::linear(0.0, 1.0), 1.0),
            Err(Error::NegativeOnCircle(_))
        ));
        assert!(riesz_factor(&RealPolynomial::constant(1.0), 0.0).is_err());
    }

    #[test]
    fn haar_and_n1_closed_form() {
        let m = refinement_mask(&ctx(1, 0.0, 0)).unwrap();
        assert!(m.g.max_abs_diff(&LaurentPolynomial::new(0, vec![1.0, 1.0])) < 1e-15);
        for (xi, k) in [(0.5, 0), (1.0, 0), (4.0, 1), (9.0, 0)] {
            let c = ctx(1, xi, k);
            let x0 = c.x0();
            let norm = (1.0 + x0 * x0).sqrt();
            let m = refinement_mask(&c).unwrap();
            assert!((m.g.coeff(0) - 2f64.sqrt() * x0 / norm).abs() < 1e-12);
            assert!((m.g.coeff(1) - 2f64.sqrt() / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn daubechies_four() {
        let s3 = 3f64.sqrt();
        let expected = [(1.0 + s3) / 4.0, (3.0 + s3) / 4.0, (3.0 - s3) / 4.0, (1.0 - s3) / 4.0];
        let m = refinement_mask(&ctx(2, 0.0, 0)).unwrap();
        for (a, b) in m.taps().iter().zip(expected) {
            assert!((a - b).abs() < 1e-10);
        }
        let classical = classical_mask(2).unwrap();
        for (j, b) in expected.iter().enumerate() {
            assert!((classical.coeff(j as i64) - b).abs() < 1e-10);
        }
    }

    #[test]
    fn factorization_sweep() {
        for n in 1..=8 {
            let builder = MaskBuilder::new(n).unwrap();
            for xi in [0.0, 1.0, 4.0] {
                for m in [0, 1, 4] {
                    let c = ctx(n, xi, m);
                    let mask = builder.mask(&c);
                    assert_eq!((mask.g.lo(), mask.g.hi()), (0, 2 * n as i64 - 1));
                    let diag = mask.diagnostics(512);
                    assert!(diag.passes(), "N={n} xi={xi} m={m}: {diag:?}");
                    let q0 = q_polynomial_closed_form(&c).eval(0.0);
                    assert!((mask.g.eval_circle(0.0).re - 2.0 * q0.sqrt()).abs() < 1e-10);
                    let (_, imag) = builder.m2_factor(&c);
                    assert!(imag <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn m2_agrees_with_generic_riesz_route() {
        for n in 2..=6 {
            for xi in [0.5, 3.0] {
                let c = ctx(n, xi, 0);
                let (m2, _) = MaskBuilder::new(n).unwrap().m2_factor(&c);
                let q = q_polynomial_closed_form(&c);
                let inner = riesz_factor(&cos_substitute(&q), 4.0).unwrap();
                let reversed = inner.reflect_conjugate().shift(n as i64 - 1);
                let reversed = if reversed.eval_circle(0.0).re * m2.eval_circle(0.0).re < 0.0 {
                    reversed.scale(-1.0)
                } else {
                    reversed
                };
                assert!(m2.max_abs_diff(&reversed) < 1e-9 * m2.max_abs(), "N={n} xi={xi}");
            }
        }
    }

    #[test]
    fn classical_limit() {
        for n in 1..=6 {
            let classical = classical_mask(n).unwrap();
            assert!((classical.eval_circle(0.0).re - 2.0).abs() < 1e-12);
            let flat = refinement_mask(&ctx(n, 0.0, 0)).unwrap();
            assert!(flat.g.max_abs_diff(&classical) <= 1e-9, "N={n}");
        }
    }

    #[test]
    fn deep_levels_converge_at_first_order() {
        // M₁ depends on x₀ = e^{−ξ/2^{m+1}} linearly, so the distance to the
        // classical mask halves with each level.
        for n in 1..=6 {
            let classical = classical_mask(n).unwrap();
            for xi in [1.0, 4.0] {
                let dist = |m| refinement_mask(&ctx(n, xi, m)).unwrap().g.max_abs_diff(&classical);
                let (d10, d20) = (dist(10), dist(20));
                assert!(d20 < d10);
                let ratio = d10 / d20;
                assert!((ratio / 1024.0 - 1.0).abs() < 0.01, "N={n} xi={xi} ratio={ratio}");
                assert!(d20 <= 2.0 * xi * n as f64 / 2f64.powi(21));
            }
        }
    }

    #[test]
    fn family_examples() {
        let fam = mask_family(2, 0.0, 3).unwrap();
        assert_eq!(fam.len(), 3);
        assert!(fam.iter().all(|m| m.g == fam[0].g));

        let fam = mask_family(1, 1.0, 2).unwrap();
        assert!((fam[0].context.x0() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((fam[1].context.x0() - (-0.25f64).exp()).abs() < 1e-15);
        for m in &fam {
            let x0 = m.context.x0();
            assert!((m.g.coeff(1) - (2.0 / (1.0 + x0 * x0)).sqrt()).abs() < 1e-12);
        }

        let single = mask_family(3, 2.0, 1).unwrap();
        assert_eq!(single[0], refinement_mask(&ctx(3, 2.0, 0)).unwrap());
        assert!(mask_family(3, 2.0, 0).is_err());
    }

    #[test]
    fn determinism() {
        let a = refinement_mask(&ctx(6, 2.5, 1)).unwrap();
        let b = refinement_mask(&ctx(6, 2.5, 1)).unwrap();
        let bits = |m: &RefinementMask| m.taps().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn highpass_alternating_flip() {
        for (n, xi) in [(1, 0.0), (3, 1.0), (5, 4.0)] {
            let m = refinement_mask(&ctx(n, xi, 0)).unwrap();
            let h = m.highpass();
            assert_eq!((h.lo(), h.hi()), (2 - 2 * n as i64, 1));
            for l in -(n as i64) - 1..=n as i64 + 1 {
                let cross: f64 = h.terms().map(|(j, c)| c * m.g.coeff(j + 2 * l)).sum();
                assert!(cross.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn large_frequency_masks_stay_orthonormal() {
        for xi in [16.0, 32.0, 64.0] {
            for n in [2, 6] {
                let c = ctx(n, xi, 0);
                let s = a_symbol(&c);
                assert!(verify_symbol(&s, 256).passes());
                let m = MaskBuilder::new(n).unwrap().mask(&c);
                assert!(m.diagnostics(256).passes(), "N={n} xi={xi}");
            }
        }
    }
}
