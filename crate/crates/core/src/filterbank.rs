//! Orthogonal non-stationary discrete wavelet transform (periodic
//! boundary) and the per-frequency assembly for images.
//!
//! Stage `s = 0` acts on the input signal with the mask of level
//! `m₀ + J − 1`; the coarsest stage uses level `m₀`.

use crate::error::{Error, Result};
use crate::factorization::{MaskBuilder, RefinementMask};
use crate::image::ImageBuffer;
use crate::laurent::LaurentPolynomial;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

#[derive(Clone, Debug)]
pub struct FilterBankPlan {
    order: usize,
    xi: f64,
    base_level: u32,
    /// `masks[i]` has level `base_level + i`.
    masks: Vec<RefinementMask>,
    highpass: Vec<LaurentPolynomial>,
}

impl FilterBankPlan {
    pub fn new(order: usize, xi: f64, base_level: u32, depth: u32) -> Result<Self> {
        Self::with_builder(&MaskBuilder::new(order)?, xi, base_level, depth)
    }

    /// Reuses the Daubechies zeros held by `builder`.
    pub fn with_builder(builder: &MaskBuilder, xi: f64, base_level: u32, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidParameter("depth J must be >= 1".into()));
        }
        let masks = builder.family(xi, base_level, depth)?;
        let highpass = masks.iter().map(RefinementMask::highpass).collect();
        Ok(FilterBankPlan {
            order: builder.order(),
            xi,
            base_level,
            masks,
            highpass,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn base_level(&self) -> u32 {
        self.base_level
    }

    pub fn depth(&self) -> u32 {
        self.masks.len() as u32
    }

    pub fn masks(&self) -> &[RefinementMask] {
        &self.masks
    }

    /// Low-pass and high-pass filters of stage `s` (0 = finest).
    fn stage(&self, s: usize) -> (&LaurentPolynomial, &LaurentPolynomial) {
        let i = self.masks.len() - 1 - s;
        (&self.masks[i].g, &self.highpass[i])
    }

    fn check_length(&self, length: usize) -> Result<()> {
        let block = 1usize << self.depth();
        if length == 0 || length % block != 0 {
            return Err(Error::BadLength {
                length,
                depth: self.depth(),
            });
        }
        Ok(())
    }
}

/// Coarsest approximation plus detail bands, finest first.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientPyramid {
    pub approx: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub length: usize,
}

impl CoefficientPyramid {
    pub fn zeros(length: usize, depth: u32) -> Self {
        CoefficientPyramid {
            approx: vec![0.0; length >> depth],
            details: (1..=depth).map(|s| vec![0.0; length >> s]).collect(),
            length,
        }
    }

    pub fn depth(&self) -> u32 {
        self.details.len() as u32
    }

    pub fn coefficient_count(&self) -> usize {
        self.approx.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn energy(&self) -> f64 {
        self.approx
            .iter()
            .chain(self.details.iter().flatten())
            .map(|c| c * c)
            .sum()
    }

    fn check_shape(&self, depth: u32) -> Result<()> {
        let ok = self.depth() == depth
            && self.length % (1usize << depth) == 0
            && self.length > 0
            && self.approx.len() == self.length >> depth
            && self
                .details
                .iter()
                .enumerate()
                .all(|(s, d)| d.len() == self.length >> (s + 1));
        if ok {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "pyramid of length {} with {} detail bands does not fit a depth-{depth} plan",
                self.length,
                self.details.len()
            )))
        }
    }
}

fn analysis_step(x: &[f64], g: &LaurentPolynomial, h: &LaurentPolynomial) -> (Vec<f64>, Vec<f64>) {
    let n = x.len() as i64;
    let filter = |f: &LaurentPolynomial| -> Vec<f64> {
        (0..n / 2)
            .map(|k| {
                f.terms()
                    .map(|(j, c)| c * x[(2 * k + j).rem_euclid(n) as usize])
                    .sum::<f64>()
                    * FRAC_1_SQRT_2
            })
            .collect()
    };
    (filter(g), filter(h))
}

fn synthesis_step(approx: &[f64], detail: &[f64], g: &LaurentPolynomial, h: &LaurentPolynomial) -> Vec<f64> {
    let n = 2 * approx.len() as i64;
    let mut x = vec![0.0; n as usize];
    for (k, (&a, &d)) in approx.iter().zip(detail).enumerate() {
        let base = 2 * k as i64;
        for (j, c) in g.terms() {
            x[(base + j).rem_euclid(n) as usize] += c * a * FRAC_1_SQRT_2;
        }
        for (j, c) in h.terms() {
            x[(base + j).rem_euclid(n) as usize] += c * d * FRAC_1_SQRT_2;
        }
    }
    x
}

pub fn analyze_1d(signal: &[f64], plan: &FilterBankPlan) -> Result<CoefficientPyramid> {
    plan.check_length(signal.len())?;
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite sample at index {i}")));
    }
    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(plan.depth() as usize);
    for s in 0..plan.depth() as usize {
        let (g, h) = plan.stage(s);
        let (a, d) = analysis_step(&approx, g, h);
        approx = a;
        details.push(d);
    }
    Ok(CoefficientPyramid {
        approx,
        details,
        length: signal.len(),
    })
}

pub fn synthesize_1d(pyr: &CoefficientPyramid, plan: &FilterBankPlan) -> Result<Vec<f64>> {
    pyr.check_shape(plan.depth())?;
    let mut x = pyr.approx.clone();
    for s in (0..plan.depth() as usize).rev() {
        let (g, h) = plan.stage(s);
        x = synthesis_step(&x, &pyr.details[s], g, h);
    }
    Ok(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdMode {
    Hard,
    Soft,
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hard" => Ok(ThresholdMode::Hard),
            "soft" => Ok(ThresholdMode::Soft),
            _ => Err(Error::InvalidParameter(format!("mode must be hard or soft, got {s:?}"))),
        }
    }
}

impl ThresholdMode {
    /// Gain applied to a coefficient of magnitude `m`.
    fn gain(self, m: f64, tau: f64) -> f64 {
        match self {
            _ if m <= tau => 0.0,
            ThresholdMode::Hard => 1.0,
            ThresholdMode::Soft if tau.is_infinite() => 0.0,
            ThresholdMode::Soft => (m - tau) / m,
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {tau}")));
    }
    Ok(())
}

/// Shrinks every detail coefficient; the approximation band is kept.
pub fn threshold_denoise(pyr: &CoefficientPyramid, tau: f64, mode: ThresholdMode) -> Result<CoefficientPyramid> {
    check_tau(tau)?;
    let mut out = pyr.clone();
    for c in out.details.iter_mut().flatten() {
        *c *= mode.gain(c.abs(), tau);
    }
    Ok(out)
}

/// Per-frequency pyramids of an image. Row `r` holds the transform of
/// column `r` of the unitary width-DFT for `r = 0 ..= W/2`, computed with the
/// plan for `ξ = r`; the remaining frequencies follow by conjugate symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPyramid {
    pub width: usize,
    pub height: usize,
    pub order: usize,
    pub base_level: u32,
    pub depth: u32,
    pub real: Vec<CoefficientPyramid>,
    pub imag: Vec<CoefficientPyramid>,
}

impl SpectralPyramid {
    pub fn frequencies(&self) -> usize {
        self.width / 2 + 1
    }

    /// Multiplicity of frequency row `r` in the full spectrum.
    pub fn fold_weight(&self, r: usize) -> f64 {
        if r == 0 || 2 * r == self.width {
            1.0
        } else {
            2.0
        }
    }

    /// Total energy counted over the full (unfolded) spectrum.
    pub fn energy(&self) -> f64 {
        (0..self.real.len())
            .map(|r| self.fold_weight(r) * (self.real[r].energy() + self.imag[r].energy()))
            .sum()
    }

    fn check_shape(&self) -> Result<()> {
        if self.width == 0
            || self.real.len() != self.frequencies()
            || self.imag.len() != self.frequencies()
        {
            return Err(Error::ShapeMismatch(format!(
                "{} real and {} imaginary rows for width {}",
                self.real.len(),
                self.imag.len(),
                self.width
            )));
        }
        for p in self.real.iter().chain(&self.imag) {
            p.check_shape(self.depth)?;
            if p.length != self.height {
                return Err(Error::ShapeMismatch(format!(
                    "pyramid length {} for image height {}",
                    p.length, self.height
                )));
            }
        }
        Ok(())
    }
}

fn plans(order: usize, base_level: u32, depth: u32, frequencies: usize) -> Result<Vec<FilterBankPlan>> {
    let builder = MaskBuilder::new(order)?;
    (0..frequencies)
        .map(|r| FilterBankPlan::with_builder(&builder, r as f64, base_level, depth))
        .collect()
}

/// `analyze_2d_at` with `m₀ = 0`.
pub fn analyze_2d(img: &ImageBuffer, order: usize, depth: u32) -> Result<SpectralPyramid> {
    analyze_2d_at(img, order, 0, depth)
}

pub fn analyze_2d_at(img: &ImageBuffer, order: usize, base_level: u32, depth: u32) -> Result<SpectralPyramid> {
    let (w, h) = (img.width(), img.height());
    if depth == 0 {
        return Err(Error::InvalidParameter("depth J must be >= 1".into()));
    }
    if h % (1usize << depth) != 0 {
        return Err(Error::BadLength { length: h, depth });
    }
    let fft = FftPlanner::new().plan_fft_forward(w);
    let norm = 1.0 / (w as f64).sqrt();
    let freqs = w / 2 + 1;
    // columns[r][y] = unitary DFT of row y at frequency r.
    let mut columns = vec![vec![Complex64::new(0.0, 0.0); h]; freqs];
    let mut buf = vec![Complex64::new(0.0, 0.0); w];
    for y in 0..h {
        for (b, &p) in buf.iter_mut().zip(img.row(y)) {
            *b = Complex64::new(p, 0.0);
        }
        fft.process(&mut buf);
        for (r, col) in columns.iter_mut().enumerate() {
            col[y] = buf[r] * norm;
        }
    }
    let plans = plans(order, base_level, depth, freqs)?;
    let mut real = Vec::with_capacity(freqs);
    let mut imag = Vec::with_capacity(freqs);
    for (col, plan) in columns.iter().zip(&plans) {
        let re: Vec<f64> = col.iter().map(|c| c.re).collect();
        let im: Vec<f64> = col.iter().map(|c| c.im).collect();
        real.push(analyze_1d(&re, plan)?);
        imag.push(analyze_1d(&im, plan)?);
    }
    Ok(SpectralPyramid {
        width: w,
        height: h,
        order,
        base_level,
        depth,
        real,
        imag,
    })
}

/// Inverse of `analyze_2d`, also returning the largest imaginary part of
/// the reconstructed pixels before it is discarded.
pub fn synthesize_2d_with_residue(coeffs: &SpectralPyramid) -> Result<(ImageBuffer, f64)> {
    coeffs.check_shape()?;
    let (w, h) = (coeffs.width, coeffs.height);
    let plans = plans(coeffs.order, coeffs.base_level, coeffs.depth, coeffs.frequencies())?;
    let mut spectrum = vec![vec![Complex64::new(0.0, 0.0); w]; h];
    for (r, plan) in plans.iter().enumerate() {
        let re = synthesize_1d(&coeffs.real[r], plan)?;
        let im = synthesize_1d(&coeffs.imag[r], plan)?;
        for y in 0..h {
            let c = Complex64::new(re[y], im[y]);
            spectrum[y][r] = c;
            if r != 0 && 2 * r != w {
                spectrum[y][w - r] = c.conj();
            }
        }
    }
    let ifft = FftPlanner::new().plan_fft_inverse(w);
    let norm = 1.0 / (w as f64).sqrt();
    let mut pixels = Vec::with_capacity(w * h);
    let mut residue = 0.0f64;
    for mut row in spectrum {
        ifft.process(&mut row);
        for c in row {
            pixels.push(c.re * norm);
            residue = residue.max((c.im * norm).abs());
        }
    }
    Ok((ImageBuffer::new(w, h, pixels)?, residue))
}

/// Inverse of `analyze_2d`. Fails if the reconstruction has an imaginary
/// part above `1e-8` relative to its magnitude.
pub fn synthesize_2d(coeffs: &SpectralPyramid) -> Result<ImageBuffer> {
    let (img, residue) = synthesize_2d_with_residue(coeffs)?;
    let scale = img.pixels().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if residue > 1e-8 * scale {
        return Err(Error::ShapeMismatch(format!(
            "coefficients are not conjugate-symmetric (imaginary residue {residue:e})"
        )));
    }
    Ok(img)
}

/// Shrinks complex detail coefficients by modulus.
pub fn threshold_denoise_2d(coeffs: &SpectralPyramid, tau: f64, mode: ThresholdMode) -> Result<SpectralPyramid> {
    check_tau(tau)?;
    let mut out = coeffs.clone();
    for (re, im) in out.real.iter_mut().zip(out.imag.iter_mut()) {
        for (dr, di) in re.details.iter_mut().zip(im.details.iter_mut()) {
            for (a, b) in dr.iter_mut().zip(di.iter_mut()) {
                let gain = mode.gain(a.hypot(*b), tau);
                *a *= gain;
                *b *= gain;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn haar_constant() {
        let plan = FilterBankPlan::new(1, 0.0, 0, 1).unwrap();
        let pyr = analyze_1d(&[3.0; 8], &plan).unwrap();
        assert!(pyr.details[0].iter().all(|&d| d.abs() < 1e-15));
        assert!(pyr.approx.iter().all(|&a| (a - 3.0 * 2f64.sqrt()).abs() < 1e-14));
    }

    #[test]
    fn energy_and_roundtrip() {
        let x = random_signal(256, 7);
        let plan = FilterBankPlan::new(2, 1.0, 0, 3).unwrap();
        let pyr = analyze_1d(&x, &plan).unwrap();
        assert_eq!(pyr.coefficient_count(), 256);
        let e: f64 = x.iter().map(|v| v * v).sum();
        assert!((pyr.energy() / e - 1.0).abs() <= 1e-9);
        let back = synthesize_1d(&pyr, &plan).unwrap();
        assert!(sup_diff(&x, &back) <= 1e-9);
    }

    #[test]
    fn perfect_reconstruction_sweep() {
        for n in 1..=6 {
            for xi in [0.0, 1.0, 4.0] {
                for j in 1..=4 {
                    let plan = FilterBankPlan::new(n, xi, 0, j).unwrap();
                    let x = random_signal(256, (n * 100 + j as usize) as u64);
                    let back = synthesize_1d(&analyze_1d(&x, &plan).unwrap(), &plan).unwrap();
                    assert!(sup_diff(&x, &back) <= 1e-9, "N={n} xi={xi} J={j}");
                }
            }
        }
    }

    #[test]
    fn delta_and_zero() {
        let plan = FilterBankPlan::new(3, 4.0, 2, 4).unwrap();
        let mut delta = vec![0.0; 64];
        delta[5] = 1.0;
        let back = synthesize_1d(&analyze_1d(&delta, &plan).unwrap(), &plan).unwrap();
        assert!(sup_diff(&delta, &back) <= 1e-9);
        let zero = synthesize_1d(&CoefficientPyramid::zeros(64, 4), &plan).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_detail_atom_has_unit_norm() {
        let plan = FilterBankPlan::new(2, 1.0, 0, 3).unwrap();
        for band in 0..3 {
            let mut pyr = CoefficientPyramid::zeros(64, 3);
            pyr.details[band][1] = 1.0;
            let atom = synthesize_1d(&pyr, &plan).unwrap();
            let norm: f64 = atom.iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn bad_length_and_shape() {
        let plan = FilterBankPlan::new(2, 1.0, 0, 3).unwrap();
        let err = analyze_1d(&vec![0.0; 63], &plan).unwrap_err();
        assert!(err.to_string().contains("length not divisible by 2^J"));
        assert!(matches!(
            synthesize_1d(&CoefficientPyramid::zeros(64, 2), &plan),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(FilterBankPlan::new(2, 1.0, 0, 0).is_err());
        assert!(analyze_1d(&[f64::NAN; 8], &plan).is_err());
    }

    #[test]
    fn stage_filters_follow_level_order() {
        let plan = FilterBankPlan::new(2, 4.0, 1, 3).unwrap();
        assert_eq!(plan.masks()[0].level(), 1);
        assert_eq!(plan.masks()[2].level(), 3);
        let (finest, _) = plan.stage(0);
        assert_eq!(finest, &plan.masks()[2].g);
        // Non-stationarity is visible at ξ = 4.
        let p = FilterBankPlan::new(2, 4.0, 0, 3).unwrap();
        assert!(p.masks()[0].g.max_abs_diff(&p.masks()[2].g) > 1e-3);
    }

    #[test]
    fn alternating_flip_orthogonality() {
        let plan = FilterBankPlan::new(4, 1.0, 0, 2).unwrap();
        for s in 0..2 {
            let (g, h) = plan.stage(s);
            for l in -4..=4i64 {
                let dot: f64 = h.terms().map(|(j, c)| c * g.coeff(j + 2 * l)).sum();
                assert!(dot.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn thresholding() {
        let pyr = CoefficientPyramid {
            approx: vec![0.1, -0.1],
            details: vec![vec![0.5, -2.0, 1.0, -0.2], vec![3.0, -0.4]],
            length: 8,
        };
        assert_eq!(threshold_denoise(&pyr, 0.0, ThresholdMode::Soft).unwrap(), pyr);
        let hard = threshold_denoise(&pyr, 1.0, ThresholdMode::Hard).unwrap();
        assert_eq!(hard.details, vec![vec![0.0, -2.0, 0.0, 0.0], vec![3.0, 0.0]]);
        assert_eq!(hard.approx, pyr.approx);
        let soft = threshold_denoise(&pyr, 1.0, ThresholdMode::Soft).unwrap();
        assert_eq!(soft.details, vec![vec![0.0, -1.0, 0.0, 0.0], vec![2.0, 0.0]]);
        let all = threshold_denoise(&pyr, f64::INFINITY, ThresholdMode::Soft).unwrap();
        assert!(all.details.iter().flatten().all(|&c| c == 0.0));
        assert_eq!(all.approx, pyr.approx);
        assert!(threshold_denoise(&pyr, -1.0, ThresholdMode::Hard).is_err());
        assert_eq!("soft".parse::<ThresholdMode>().unwrap(), ThresholdMode::Soft);
        assert!("medium".parse::<ThresholdMode>().is_err());
    }

    fn random_image(w: usize, h: usize, seed: u64) -> ImageBuffer {
        ImageBuffer::new(w, h, random_signal(w * h, seed).iter().map(|v| 128.0 + 100.0 * v).collect()).unwrap()
    }

    #[test]
    fn image_roundtrip_and_energy() {
        for (w, h) in [(64, 64), (7, 8), (10, 16)] {
            let img = random_image(w, h, 11);
            let coeffs = analyze_2d(&img, 2, 2).unwrap();
            let e: f64 = img.pixels().iter().map(|v| v * v).sum();
            assert!((coeffs.energy() / e - 1.0).abs() <= 1e-8);
            let (back, residue) = synthesize_2d_with_residue(&coeffs).unwrap();
            assert!(back.max_abs_diff(&img) <= 1e-8, "{w}x{h}");
            assert!(residue <= 1e-8);
            let same = synthesize_2d(&threshold_denoise_2d(&coeffs, 0.0, ThresholdMode::Hard).unwrap()).unwrap();
            assert!(same.max_abs_diff(&img) <= 1e-8);
        }
    }

    #[test]
    fn constant_image_only_zero_frequency() {
        let img = ImageBuffer::new(8, 8, vec![5.0; 64]).unwrap();
        let coeffs = analyze_2d(&img, 2, 2).unwrap();
        for (r, (re, im)) in coeffs.real.iter().zip(&coeffs.imag).enumerate() {
            let details = re.details.iter().chain(&im.details).flatten();
            assert!(details.fold(0.0f64, |m, c| m.max(c.abs())) <= 1e-9);
            if r > 0 {
                assert!(re.energy() + im.energy() <= 1e-18);
            }
        }
        let zero = SpectralPyramid {
            real: vec![CoefficientPyramid::zeros(8, 2); 5],
            imag: vec![CoefficientPyramid::zeros(8, 2); 5],
            ..coeffs
        };
        assert!(synthesize_2d(&zero).unwrap().pixels().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn separable_frequency_isolated() {
        let (w, h, r0) = (16usize, 8usize, 3usize);
        let v: Vec<f64> = (0..h).map(|y| 1.0 + y as f64).collect();
        let px = (0..h)
            .flat_map(|y| {
                let vy = v[y];
                (0..w).map(move |x| vy * (2.0 * std::f64::consts::PI * (x * r0) as f64 / w as f64).cos())
            })
            .collect();
        let coeffs = analyze_2d(&ImageBuffer::new(w, h, px).unwrap(), 2, 1).unwrap();
        for r in 0..coeffs.frequencies() {
            let e = coeffs.real[r].energy() + coeffs.imag[r].energy();
            if r == r0 {
                assert!(e > 1.0);
            } else {
                assert!(e <= 1e-20, "r={r}: {e}");
            }
        }
    }

    #[test]
    fn image_validation() {
        let img = random_image(8, 12, 1);
        assert!(matches!(analyze_2d(&img, 2, 3), Err(Error::BadLength { .. })));
        let mut coeffs = analyze_2d(&img, 2, 2).unwrap();
        coeffs.real.pop();
        assert!(matches!(synthesize_2d(&coeffs), Err(Error::ShapeMismatch(_))));
        let mut coeffs = analyze_2d(&img, 2, 2).unwrap();
        coeffs.imag[0].approx[0] = 1.0;
        assert!(synthesize_2d(&coeffs).is_err());
    }

    #[test]
    fn complex_threshold_uses_modulus() {
        let img = random_image(8, 8, 3);
        let coeffs = analyze_2d(&img, 1, 1).unwrap();
        let out = threshold_denoise_2d(&coeffs, 5.0, ThresholdMode::Hard).unwrap();
        for r in 0..coeffs.frequencies() {
            for (i, (&a, &b)) in coeffs.real[r].details[0].iter().zip(&coeffs.imag[r].details[0]).enumerate() {
                let kept = a.hypot(b) > 5.0;
                assert_eq!(out.real[r].details[0][i], if kept { a } else { 0.0 });
                assert_eq!(out.imag[r].details[0][i], if kept { b } else { 0.0 });
            }
        }
    }
}
