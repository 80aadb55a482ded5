//! Non-stationary subdivision and cascade tabulation.
//!
//! Grid functions produced here live on the dyadic grid `(lo + i)/2^{m+L}`
//! of level `m` refined `L` times. Inner products, Gram matrices and
//! Riemann sums are taken in the level-normalized variable `s = 2^m t`, in
//! which the integer translates `φ_m(· − j)` are orthonormal and the mask
//! relation reads `φ_m(s) = Σ_j g_j φ_{m+1}(2s − j)`.

use crate::error::{Error, Result};
use crate::factorization::MaskBuilder;
use crate::laurent::LaurentPolynomial;
use crate::linalg;
use crate::symbols::{a_symbol, general_symbol, FrequencyVector, SubdivisionSymbol, SymbolContext};
use std::fmt::Write as _;
use std::ops::RangeInclusive;

/// Values `f_j^k` at `j/2^k` for `j = lo, lo+1, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSequence {
    pub level: u32,
    pub lo: i64,
    pub values: Vec<f64>,
}

impl SampleSequence {
    pub fn delta(level: u32) -> Self {
        SampleSequence {
            level,
            lo: 0,
            values: vec![1.0],
        }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn get(&self, j: i64) -> f64 {
        let idx = j - self.lo;
        if idx < 0 || idx >= self.values.len() as i64 {
            0.0
        } else {
            self.values[idx as usize]
        }
    }

    /// Restriction to `[lo, hi]` (clamped to the stored range).
    pub fn window(&self, lo: i64, hi: i64) -> SampleSequence {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi());
        SampleSequence {
            level: self.level,
            lo,
            values: (lo..=hi).map(|j| self.get(j)).collect(),
        }
    }
}

/// `f^{k+1}_{j'} = Σ_j mask_{j'−2j} f^k_j` over the whole support.
pub fn refine_by_convolution(s: &SampleSequence, mask: &LaurentPolynomial) -> SampleSequence {
    let lo = 2 * s.lo + mask.lo();
    let hi = 2 * s.hi() + mask.hi();
    let mut values = vec![0.0; (hi - lo + 1) as usize];
    for (i, &f) in s.values.iter().enumerate() {
        if f == 0.0 {
            continue;
        }
        let base = 2 * (s.lo + i as i64);
        for (e, c) in mask.terms() {
            values[(base + e - lo) as usize] += c * f;
        }
    }
    SampleSequence {
        level: s.level + 1,
        lo,
        values,
    }
}

/// One step of the interpolatory scheme. Odd outputs are mask combinations
/// of the input; even outputs are copied from the input unchanged.
pub fn subdivide_once(s: &SampleSequence, symbol: &SubdivisionSymbol) -> Result<SampleSequence> {
    if symbol.level != s.level {
        return Err(Error::LevelMismatch {
            symbol: symbol.level,
            sequence: s.level,
        });
    }
    let a = &symbol.a;
    let lo = 2 * s.lo + a.lo();
    let hi = 2 * s.hi() + a.hi();
    let mut values = vec![0.0; (hi - lo + 1) as usize];
    for (idx, slot) in values.iter_mut().enumerate() {
        let jp = lo + idx as i64;
        if jp.rem_euclid(2) == 0 {
            *slot = s.get(jp / 2);
        } else {
            // Contributing coarse indices j with jp − 2j in [a.lo, a.hi].
            let jmin = (jp - a.hi()).div_euclid(2) + ((jp - a.hi()).rem_euclid(2) != 0) as i64;
            let jmax = (jp - a.lo()).div_euclid(2);
            let mut acc = 0.0;
            for j in jmin.max(s.lo)..=jmax.min(s.hi()) {
                acc += a.coeff(jp - 2 * j) * s.get(j);
            }
            *slot = acc;
        }
    }
    Ok(SampleSequence {
        level: s.level + 1,
        lo,
        values,
    })
}

fn symbol_for(lams: &FrequencyVector, level: u32) -> Result<SubdivisionSymbol> {
    match lams.common_value() {
        Some(xi) => Ok(a_symbol(&SymbolContext::new(lams.order(), xi, level)?)),
        None => general_symbol(lams, level),
    }
}

/// Multiplicity of `λ` as a root pair of the operator: `λ = 0` contributes
/// both `±0`, so its solution space has twice the count.
fn operator_multiplicity(lams: &FrequencyVector, lambda: f64) -> usize {
    let m = lams.multiplicity(lambda);
    if lambda == 0.0 {
        2 * m
    } else {
        m
    }
}

fn validate_terms(lams: &FrequencyVector, powers: &[u32], signs: &[i8]) -> Result<()> {
    if powers.len() != signs.len() || powers.len() > lams.order() {
        return Err(Error::ShapeMismatch(format!(
            "{} powers and {} signs for {} frequencies",
            powers.len(),
            signs.len(),
            lams.order()
        )));
    }
    for (i, (&p, &s)) in powers.iter().zip(signs).enumerate() {
        if s != 1 && s != -1 {
            return Err(Error::InvalidParameter(format!("sign must be ±1, got {s}")));
        }
        let lambda = lams.lambdas()[i];
        let multiplicity = operator_multiplicity(lams, lambda);
        if p as usize >= multiplicity {
            return Err(Error::PowerExceedsMultiplicity {
                lambda,
                power: p,
                multiplicity,
            });
        }
    }
    Ok(())
}

/// `Σ_i t^{powers[i]} e^{signs[i]·λ_i t}`.
pub fn exponential_value(lams: &FrequencyVector, powers: &[u32], signs: &[i8], t: f64) -> f64 {
    powers
        .iter()
        .zip(signs)
        .zip(lams.lambdas())
        .map(|((&p, &s), &l)| t.powi(p as i32) * (s as f64 * l * t).exp())
        .sum()
}

/// Samples at `j/2^k`, `j ∈ window`, of the solution
/// `Σ_i t^{powers[i]} e^{±λ_i t}` of `Π (d²/dt² − λ_j²) f = 0`.
pub fn exponential_samples(
    lams: &FrequencyVector,
    powers: &[u32],
    signs: &[i8],
    level: u32,
    window: RangeInclusive<i64>,
) -> Result<SampleSequence> {
    validate_terms(lams, powers, signs)?;
    let h = 2f64.powi(-(level as i32));
    Ok(SampleSequence {
        level,
        lo: *window.start(),
        values: window
            .map(|j| exponential_value(lams, powers, signs, j as f64 * h))
            .collect(),
    })
}

/// Refines exact samples of an exponential polynomial `steps` times from
/// level `k0` and returns `max |subdivided − exact| / max |exact|` over the
/// points whose whole stencil history lies inside the initial window.
pub fn reproduction_error(
    lams: &FrequencyVector,
    powers: &[u32],
    signs: &[i8],
    k0: u32,
    steps: u32,
) -> Result<f64> {
    subdivision_error(lams, lams, powers, signs, k0, steps)
}

/// As [`reproduction_error`], but the samples come from the exponential
/// polynomial `Σ t^{powers[i]} e^{±μ_i t}` of `source` while the scheme uses
/// the symbols of `lams`. With `source ≠ lams` this measures how far a
/// function outside the reproduced space is from being reproduced.
pub fn subdivision_error(
    lams: &FrequencyVector,
    source: &FrequencyVector,
    powers: &[u32],
    signs: &[i8],
    k0: u32,
    steps: u32,
) -> Result<f64> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let span = 2 * lams.order() as i64 - 1;
    let half_width = span + 2;
    let mut seq = exponential_samples(source, powers, signs, k0, -half_width..=half_width)?;
    let (mut lo, mut hi) = (-half_width, half_width);
    for step in 0..steps {
        let symbol = symbol_for(lams, k0 + step)?;
        seq = subdivide_once(&seq, &symbol)?;
        lo = 2 * lo + span;
        hi = 2 * hi - span;
        seq = seq.window(lo, hi);
    }
    let exact = exponential_samples(source, powers, signs, k0 + steps, lo..=hi)?;
    let scale = exact.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = seq
        .values
        .iter()
        .zip(&exact.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(if scale > 0.0 { err / scale } else { err })
}

/// Samples of a compactly supported function of level `m` on the grid
/// `(lo + i)/2^{m+L}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicGridFunction {
    pub base_level: u32,
    pub resolution: u32,
    pub lo: i64,
    pub values: Vec<f64>,
}

impl DyadicGridFunction {
    fn from_sequence(base_level: u32, resolution: u32, s: SampleSequence) -> Self {
        DyadicGridFunction {
            base_level,
            resolution,
            lo: s.lo,
            values: s.values,
        }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    /// Value at grid index `n` (zero outside the stored window).
    pub fn at(&self, n: i64) -> f64 {
        let idx = n - self.lo;
        if idx < 0 || idx >= self.values.len() as i64 {
            0.0
        } else {
            self.values[idx as usize]
        }
    }

    /// Physical abscissa of grid index `n`.
    pub fn t(&self, n: i64) -> f64 {
        n as f64 / 2f64.powi((self.base_level + self.resolution) as i32)
    }

    /// Grid points per unit of the level-normalized variable.
    pub fn points_per_unit(&self) -> i64 {
        1i64 << self.resolution
    }

    /// `Σ f(s_n) · 2^{−L}` in the normalized variable.
    pub fn riemann_sum(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.points_per_unit() as f64
    }

    /// Riemann-sum `∫ f(s) g(s − shift) ds` in the normalized variable.
    pub fn shifted_inner(&self, other: &DyadicGridFunction, shift: i64) -> f64 {
        assert_eq!(self.resolution, other.resolution, "resolution mismatch");
        let offset = shift * self.points_per_unit();
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| v * other.at(self.lo + i as i64 - offset))
            .sum();
        sum / self.points_per_unit() as f64
    }

    /// Gram matrix of the translates `f(· − j)`, `j ∈ shifts`.
    pub fn gram(&self, shifts: RangeInclusive<i64>) -> Vec<Vec<f64>> {
        let shifts: Vec<i64> = shifts.collect();
        shifts
            .iter()
            .map(|&i| shifts.iter().map(|&j| self.shifted_inner(self, j - i)).collect())
            .collect()
    }

    /// Largest absolute second difference, an empirical smoothness gauge.
    pub fn max_second_difference(&self) -> f64 {
        self.values
            .windows(3)
            .map(|w| (w[0] - 2.0 * w[1] + w[2]).abs())
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV with header `t,value`, both at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (i, &v) in self.values.iter().enumerate() {
            let n = self.lo + i as i64;
            let _ = writeln!(out, "{},{}", crate::io::fmt17(self.t(n)), crate::io::fmt17(v));
        }
        out
    }
}

/// `max_n |coarse(s_n) − Σ_j mask_j · fine(2 s_n − j)|` for two tables of
/// the same resolution, `fine` one level above `coarse`.
pub fn refinement_residual(
    coarse: &DyadicGridFunction,
    fine: &DyadicGridFunction,
    mask: &LaurentPolynomial,
) -> f64 {
    assert_eq!(coarse.resolution, fine.resolution, "resolution mismatch");
    let per = coarse.points_per_unit();
    let lo = coarse.lo.min((fine.lo + mask.lo() * per).div_euclid(2)) - 1;
    let hi = coarse.hi().max((fine.hi() + mask.hi() * per).div_euclid(2)) + 1;
    (lo..=hi)
        .map(|n| {
            let rhs: f64 = mask.terms().map(|(j, c)| c * fine.at(2 * n - j * per)).sum();
            (coarse.at(n) - rhs).abs()
        })
        .fold(0.0, f64::max)
}

fn check_depth(depth: u32) -> Result<()> {
    if depth == 0 || depth > 24 {
        return Err(Error::InvalidParameter(format!(
            "cascade depth L must be in 1..=24, got {depth}"
        )));
    }
    Ok(())
}

/// `Φ_m` by interpolatory subdivision from `δ` at level `m` through the
/// symbols `a^[m] … a^[m+L−1]`.
pub fn fundamental_function(order: usize, xi: f64, m: u32, depth: u32) -> Result<DyadicGridFunction> {
    check_depth(depth)?;
    let mut seq = SampleSequence::delta(m);
    for level in m..m + depth {
        seq = subdivide_once(&seq, &a_symbol(&SymbolContext::new(order, xi, level)?))?;
    }
    Ok(DyadicGridFunction::from_sequence(m, depth, seq))
}

/// Levels below the first one at which `ξ/2^{k+1}` is negligible and the
/// mask is classical to rounding.
fn tail_level(xi: f64, from: u32) -> u32 {
    let extra = if xi > 1.0 { xi.log2().ceil() as u32 } else { 0 };
    from + 60 + extra
}

/// Samples `φ_M(0), …, φ_M(2N−1)` at the integers.
///
/// Deep levels use the classical fixed point `v = T v`, `T_{kl} = g_{2k−l}`,
/// `Σ v = 1`; the transition `v_M[k] = Σ_l g^[M]_{2k−l} v_{M+1}[l]` then
/// carries it down to level `M`, so the samples are consistent with every
/// mask of the family.
pub fn integer_samples(builder: &MaskBuilder, xi: f64, level: u32) -> Result<Vec<f64>> {
    let n = builder.order();
    let size = 2 * n;
    let far = tail_level(xi, level);
    let deep = builder.mask(&SymbolContext::new(n, xi, far)?);
    let mut v = if n == 1 {
        // Right-continuous box: φ(0) = 1, φ(1) = 0.
        vec![1.0, 0.0]
    } else {
        let inner: Vec<i64> = (1..size as i64 - 1).collect();
        let mut a: Vec<Vec<f64>> = inner
            .iter()
            .map(|&k| {
                inner
                    .iter()
                    .map(|&l| deep.g.coeff(2 * k - l) - if k == l { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut rhs = vec![0.0; inner.len()];
        *a.last_mut().unwrap() = vec![1.0; inner.len()];
        *rhs.last_mut().unwrap() = 1.0;
        let solved = linalg::solve(a, rhs, 1e-13)?;
        let mut v = vec![0.0; size];
        v[1..size - 1].copy_from_slice(&solved);
        v
    };
    for lvl in (level..far).rev() {
        let g = builder.mask(&SymbolContext::new(n, xi, lvl)?).g;
        v = (0..size as i64)
            .map(|k| (0..size as i64).map(|l| g.coeff(2 * k - l) * v[l as usize]).sum())
            .collect();
    }
    Ok(v)
}

fn father_table(builder: &MaskBuilder, xi: f64, m: u32, depth: u32) -> Result<DyadicGridFunction> {
    let n = builder.order();
    let mut seq = SampleSequence::delta(m);
    for level in m..m + depth {
        let mask = builder.mask(&SymbolContext::new(n, xi, level)?);
        seq = refine_by_convolution(&seq, &mask.g);
    }
    let v = integer_samples(builder, xi, m + depth)?;
    let mut values = vec![0.0; seq.values.len() + v.len() - 1];
    for (i, &c) in seq.values.iter().enumerate() {
        for (k, &w) in v.iter().enumerate() {
            values[i + k] += c * w;
        }
    }
    Ok(DyadicGridFunction {
        base_level: m,
        resolution: depth,
        lo: seq.lo,
        values,
    })
}

/// Father wavelet `φ_m` on spacing `2^{−(m+L)}`: `L` cascade steps with the
/// masks `g^[m] … g^[m+L−1]` from the unit pulse, convolved with the integer
/// samples of `φ_{m+L}`. No renormalization is applied: the translates are
/// orthonormal and `∫ φ_m = Π_{i≥m} √Q^[i](0)` (equal to 1 at `ξ = 0`).
pub fn cascade_father(order: usize, xi: f64, m: u32, depth: u32) -> Result<DyadicGridFunction> {
    check_depth(depth)?;
    father_table(&MaskBuilder::new(order)?, xi, m, depth)
}

/// Mother wavelet `ψ_m(s) = Σ_j (−1)^j g^[m]_{1−j} φ_{m+1}(2s − j)` on
/// spacing `2^{−(m+L)}`.
pub fn mother_wavelet(order: usize, xi: f64, m: u32, depth: u32) -> Result<DyadicGridFunction> {
    check_depth(depth)?;
    let builder = MaskBuilder::new(order)?;
    let father = father_table(&builder, xi, m + 1, depth - 1)?;
    let h = builder.mask(&SymbolContext::new(order, xi, m)?).highpass();
    let step = 1i64 << (depth - 1);
    let lo = father.lo + h.lo() * step;
    let hi = father.hi() + h.hi() * step;
    let values = (lo..=hi)
        .map(|n| h.terms().map(|(j, c)| c * father.at(n - j * step)).sum())
        .collect();
    Ok(DyadicGridFunction {
        base_level: m,
        resolution: depth,
        lo,
        values,
    })
}
