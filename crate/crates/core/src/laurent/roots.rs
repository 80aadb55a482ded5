use super::RealPolynomial;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::f64::consts::PI;

/// Zeros of a real polynomial with multiplicities.
///
/// Non-real zeros come in exact conjugate pairs (the imaginary parts are
/// bitwise negations of each other) and the list is sorted by
/// `(re, im)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRootSet {
    roots: Vec<(Complex64, usize)>,
}

impl ComplexRootSet {
    pub fn empty() -> Self {
        ComplexRootSet { roots: Vec::new() }
    }

    /// Builds a set from raw values, applying the same pairing and ordering
    /// normalization as the root finder.
    pub fn from_values(values: Vec<Complex64>) -> Self {
        ComplexRootSet {
            roots: normalize(values),
        }
    }

    pub fn roots(&self) -> &[(Complex64, usize)] {
        &self.roots
    }

    /// Each root repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|&(r, m)| std::iter::repeat(r).take(m))
            .collect()
    }

    /// Sum of multiplicities.
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|&(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexRootSet {
        let values = self.expanded().into_iter().map(f).collect();
        Self::from_values(values)
    }

    /// `lead · Π (x − r)`.
    pub fn to_polynomial(&self, lead: f64) -> RealPolynomial {
        RealPolynomial::from_roots(lead, &self.roots)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RootFinderOptions {
    pub max_iterations: usize,
    pub tol: f64,
}

impl Default for RootFinderOptions {
    fn default() -> Self {
        RootFinderOptions {
            max_iterations: 500,
            tol: 1e-12,
        }
    }
}

/// All complex zeros of `p` by Aberth–Ehrlich simultaneous iteration.
pub fn roots(p: &RealPolynomial, tol: f64) -> Result<ComplexRootSet> {
    roots_with(
        p,
        RootFinderOptions {
            tol,
            ..RootFinderOptions::default()
        },
    )
}

pub fn roots_with(p: &RealPolynomial, opts: RootFinderOptions) -> Result<ComplexRootSet> {
    let degree = p.degree();
    if degree == 0 {
        return Err(Error::InvalidParameter(
            "root finding needs a polynomial of degree >= 1".into(),
        ));
    }
    let coeffs = p.coeffs();
    let zeros_at_origin = coeffs.iter().take_while(|&&c| c == 0.0).count();
    let lead = p.leading();
    let monic: Vec<f64> = coeffs[zeros_at_origin..].iter().map(|c| c / lead).collect();
    let n = monic.len() - 1;

    let mut found: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if n > 0 {
        found.extend(aberth(&monic, opts)?);
    }
    let mut set = normalize(found);
    polish_multiple(p, &mut set);
    Ok(ComplexRootSet { roots: set })
}

/// Simultaneous iteration resolves an `m`-fold zero only to about
/// `ε^{1/m}`; a few Newton steps on `p^{(m−1)}`, where the zero is simple,
/// recover full accuracy.
fn polish_multiple(p: &RealPolynomial, set: &mut [(Complex64, usize)]) {
    for i in 0..set.len() {
        let (z, m) = set[i];
        if m < 2 || z.im < 0.0 {
            continue;
        }
        let mut d = p.clone();
        for _ in 0..m - 1 {
            d = d.derivative();
        }
        let dd = d.derivative();
        let mut best = z;
        let mut best_val = d.eval_complex(z).norm();
        let mut cur = z;
        for _ in 0..8 {
            let slope = dd.eval_complex(cur);
            if slope.norm() == 0.0 {
                break;
            }
            cur -= d.eval_complex(cur) / slope;
            if z.im == 0.0 {
                cur.im = 0.0;
            }
            let val = d.eval_complex(cur).norm();
            if val < best_val {
                best = cur;
                best_val = val;
            }
        }
        // Only accept a polished value that stays inside the cluster.
        if (best - z).norm() <= CLUSTER_TOL * z.norm().max(1.0) * 10.0 {
            set[i].0 = best;
            if z.im > 0.0 {
                if let Some(partner) = set
                    .iter_mut()
                    .find(|(w, k)| *k == m && w.im < 0.0 && (w.conj() - z).norm() == 0.0)
                {
                    partner.0 = best.conj();
                }
            }
        }
    }
    set.sort_by(|a, b| cmp_complex(&a.0, &b.0));
}

/// Fujiwara's bound on the moduli of the zeros of a monic polynomial.
fn fujiwara_bound(monic: &[f64]) -> f64 {
    let n = monic.len() - 1;
    let mut bound: f64 = 0.0;
    for i in 1..=n {
        let mut c = monic[n - i].abs();
        if i == n {
            c /= 2.0;
        }
        bound = bound.max(c.powf(1.0 / i as f64));
    }
    2.0 * bound
}

fn eval_with_derivative(monic: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let r = z.norm();
    for &c in monic.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        scale = scale * r + c.abs();
    }
    (p, dp, scale)
}

fn aberth(monic: &[f64], opts: RootFinderOptions) -> Result<Vec<Complex64>> {
    let n = monic.len() - 1;
    if n == 1 {
        return Ok(vec![Complex64::new(-monic[0], 0.0)]);
    }
    let radius = fujiwara_bound(monic).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / n as f64 + 0.4;
            let r = radius * (1.0 + 0.05 * k as f64 / n as f64);
            Complex64::from_polar(r, angle)
        })
        .collect();

    let eps = 4.0 * f64::EPSILON;
    let mut settled = vec![false; n];
    for _ in 0..opts.max_iterations {
        let mut all_settled = true;
        for k in 0..n {
            if settled[k] {
                continue;
            }
            let (p, dp, scale) = eval_with_derivative(monic, z[k]);
            if p.norm() <= eps * scale {
                settled[k] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        s += diff.inv();
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            if step.norm() <= eps * z[k].norm() {
                settled[k] = true;
            } else {
                all_settled = false;
            }
        }
        if all_settled {
            return Ok(z);
        }
    }

    // Iteration cap reached: accept only if every residual is within tol.
    let ok = z.iter().all(|&zk| {
        let (p, _, scale) = eval_with_derivative(monic, zk);
        p.norm() <= opts.tol * scale
    });
    if ok {
        Ok(z)
    } else {
        Err(Error::NonConvergence {
            degree: n,
            iterations: opts.max_iterations,
        })
    }
}

const REAL_AXIS_TOL: f64 = 1e-10;
const CLUSTER_TOL: f64 = 1e-7;

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Snap near-real roots onto the axis, pair the rest into exact conjugates,
/// merge clusters into multiplicities, and sort.
fn normalize(values: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in values {
        if z.im.abs() <= REAL_AXIS_TOL * z.norm().max(1.0) {
            real.push(Complex64::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    upper.sort_by(cmp_complex);
    lower.sort_by(cmp_complex);

    let mut paired = Vec::new();
    for u in upper {
        let best = lower
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (u - a.conj()).norm().total_cmp(&(u - b.conj()).norm()))
            .map(|(i, _)| i);
        match best {
            Some(i) => {
                let l = lower.remove(i);
                let re = 0.5 * (u.re + l.re);
                let im = 0.5 * (u.im - l.im);
                if im <= CLUSTER_TOL * u.norm().max(1.0) {
                    // A real multiple root split into a narrow conjugate pair.
                    real.push(Complex64::new(re, 0.0));
                    real.push(Complex64::new(re, 0.0));
                } else {
                    paired.push(Complex64::new(re, im));
                }
            }
            None => real.push(Complex64::new(u.re, 0.0)),
        }
    }
    real.extend(lower.into_iter().map(|l| Complex64::new(l.re, 0.0)));

    // Merge clusters, separately on the axis and in the upper half plane.
    let mut out = Vec::new();
    for (group, conjugate) in [(real, false), (paired, true)] {
        for (z, m) in cluster(group) {
            out.push((z, m));
            if conjugate {
                out.push((z.conj(), m));
            }
        }
    }
    out.sort_by(|a, b| cmp_complex(&a.0, &b.0));
    out
}

fn cluster(mut values: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    values.sort_by(cmp_complex);
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for z in values {
        if let Some((center, m)) = groups.iter_mut().find(|(c, m)| {
            let mean = *c / *m as f64;
            (z - mean).norm() <= CLUSTER_TOL * mean.norm().max(1.0)
        }) {
            *center += z;
            *m += 1;
        } else {
            groups.push((z, 1));
        }
    }
    groups
        .into_iter()
        .map(|(sum, m)| (sum / m as f64, m))
        .collect()
}
