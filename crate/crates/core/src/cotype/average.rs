//! Sign and gaussian averages `(E‖Σ v_j x_j‖_E²)^{1/2}` and the ascent on
//! `(Σ‖x_j‖_E^q)^{1/q} / average`.

use rayon::prelude::*;

use super::{CotypeParams, EmbeddedNorm, VariableKind};
use crate::ascent::{maximize, AscentConfig, HomogeneousRatio};
use crate::enumerate::{gray, gray_chunks};
use crate::error::{Error, Result};
use crate::estimate::{NormEstimate, Witness};
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::norms::{dual_vector, p_norm};
use crate::random::{gaussian_vec, random_sign, seeded_rng, sub_seed};
use crate::scalar::Scalar;

const SIGN_CAP: usize = 22;
/// Largest `k` whose sign patterns are materialized during ascent.
const ASCENT_SIGN_CAP: usize = 16;
/// Fixed draws per ascent objective in Monte-Carlo mode.
const ASCENT_DRAWS: usize = 2000;
const MIN_SAMPLES: usize = 100;
const DRAW_CHUNK: usize = 512;
const STREAM_FIT: u64 = 0xC0_7F17;
const STREAM_CERT: u64 = 0xC0_CE27;

fn embedded_images<T: Scalar>(family: &VectorFamily<T>, e: &EmbeddedNorm<T>) -> Vec<Vec<T>> {
    family.vectors().iter().map(|x| e.embed().apply_unchecked(x)).collect()
}

/// Exact `(2^{−(k−1)} Σ_ε ‖Σ ε_j x_j‖_E²)^{1/2}` with `ε_1 = +1` fixed.
pub fn rademacher_average<T: Scalar>(family: &VectorFamily<T>, e: &EmbeddedNorm<T>) -> Result<T> {
    e.check(family)?;
    let k = family.len();
    if k == 0 {
        return Ok(T::zero());
    }
    if k > SIGN_CAP {
        return Err(Error::InvalidParameter(format!(
            "exact Rademacher average of {k} vectors exceeds the cap of {SIGN_CAP}; use the Monte-Carlo average instead"
        )));
    }
    let y = embedded_images(family, e);
    let v = e.exponent();
    let free = (k - 1) as u32;
    let partial: Vec<T> = gray_chunks(free)
        .into_par_iter()
        .map(|(lo, hi)| {
            let g = gray(lo);
            let mut signs: Vec<T> = (0..k).map(|j| if j > 0 && (g >> (j - 1)) & 1 == 1 { -T::one() } else { T::one() }).collect();
            let mut z = vec![T::zero(); y[0].len()];
            for (yj, s) in y.iter().zip(&signs) {
                z.iter_mut().zip(yj).for_each(|(a, b)| *a = *a + *s * *b);
            }
            let mut acc = p_norm(&z, v).powi(2);
            for i in lo + 1..hi {
                let j = i.trailing_zeros() as usize + 1;
                let two_s = signs[j] + signs[j];
                z.iter_mut().zip(&y[j]).for_each(|(a, b)| *a = *a - two_s * *b);
                signs[j] = -signs[j];
                acc = acc + p_norm(&z, v).powi(2);
            }
            acc
        })
        .collect();
    let total: T = partial.into_iter().fold(T::zero(), |a, b| a + b);
    Ok((total / T::of((1u64 << free) as f64)).sqrt())
}

fn draws<T: Scalar>(k: usize, samples: usize, seed: u64, kind: VariableKind) -> Vec<Vec<T>> {
    let chunks = samples.div_ceil(DRAW_CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = seeded_rng(sub_seed(seed, c as u64));
            let len = DRAW_CHUNK.min(samples - c * DRAW_CHUNK);
            (0..len)
                .map(|_| match kind {
                    VariableKind::Gaussian => gaussian_vec(&mut rng, k),
                    VariableKind::Rademacher => (0..k).map(|_| random_sign(&mut rng)).collect(),
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn combine<T: Scalar>(y: &[Vec<T>], c: &[T]) -> Vec<T> {
    let mut z = vec![T::zero(); y[0].len()];
    for (yj, cj) in y.iter().zip(c) {
        z.iter_mut().zip(yj).for_each(|(a, b)| *a = *a + *cj * *b);
    }
    z
}

/// Monte-Carlo mean of `(E‖Σ v_j x_j‖²)^{1/2}` and its standard error, the
/// error of the squared-norm mean carried through the square root.
fn monte_carlo<T: Scalar>(family: &VectorFamily<T>, e: &EmbeddedNorm<T>, samples: usize, seed: u64, kind: VariableKind) -> Result<(T, T)> {
    e.check(family)?;
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    if family.is_empty() {
        return Ok((T::zero(), T::zero()));
    }
    let y = embedded_images(family, e);
    let v = e.exponent();
    let sq: Vec<T> = draws::<T>(family.len(), samples, seed, kind).par_iter().map(|c| p_norm(&combine(&y, c), v).powi(2)).collect();
    let n = T::of(samples as f64);
    let m2 = sq.iter().fold(T::zero(), |a, b| a + *b) / n;
    let var = sq.iter().fold(T::zero(), |a, b| a + (*b - m2).powi(2)) / T::of((samples - 1) as f64);
    let se2 = (var / n).sqrt();
    let mean = m2.sqrt();
    let stderr = if mean > T::zero() { se2 / (mean + mean) } else { T::zero() };
    Ok((mean, stderr))
}

pub fn gaussian_average<T: Scalar>(family: &VectorFamily<T>, e: &EmbeddedNorm<T>, samples: usize, seed: u64) -> Result<(T, T)> {
    monte_carlo(family, e, samples, seed, VariableKind::Gaussian)
}

/// Sign-sampling counterpart of [`rademacher_average`] for large `k`.
pub fn rademacher_average_mc<T: Scalar>(family: &VectorFamily<T>, e: &EmbeddedNorm<T>, samples: usize, seed: u64) -> Result<(T, T)> {
    monte_carlo(family, e, samples, seed, VariableKind::Rademacher)
}

/// `(Σ‖x_j‖_E^q)^{1/q} / (mean_s ‖Σ c_sj x_j‖_E²)^{1/2}` over fixed coefficient rows `c_s`.
pub struct CotypeObjective<'a, T> {
    norm: &'a EmbeddedNorm<T>,
    q: Exponent,
    k: usize,
    coeffs: Vec<Vec<T>>,
}

impl<'a, T: Scalar> CotypeObjective<'a, T> {
    pub fn new(norm: &'a EmbeddedNorm<T>, q: Exponent, k: usize, coeffs: Vec<Vec<T>>) -> Self {
        CotypeObjective { norm, q, k, coeffs }
    }

    /// All `2^{k−1}` sign patterns with the first sign `+1`.
    pub fn all_signs(norm: &'a EmbeddedNorm<T>, q: Exponent, k: usize) -> Self {
        let coeffs = (0..1u64 << (k - 1))
            .map(|b| (0..k).map(|j| if j > 0 && (b >> (j - 1)) & 1 == 1 { -T::one() } else { T::one() }).collect())
            .collect();
        Self::new(norm, q, k, coeffs)
    }

    pub fn family(&self, x: &[T]) -> VectorFamily<T> {
        VectorFamily::from_flat(x, self.k, self.norm.dim(), self.norm.exponent())
    }

    fn images(&self, x: &[T]) -> Vec<Vec<T>> {
        x.chunks(self.norm.dim()).map(|c| self.norm.embed().apply_unchecked(c)).collect()
    }

    fn numerator(&self, y: &[Vec<T>]) -> (T, Vec<T>) {
        let norms: Vec<T> = y.iter().map(|yj| p_norm(yj, self.norm.exponent())).collect();
        (p_norm(&norms, self.q), norms)
    }

    pub fn log_gradient(&self, x: &[T]) -> Vec<T> {
        self.value_and_log_gradient(x).1
    }
}

impl<T: Scalar> HomogeneousRatio<T> for CotypeObjective<'_, T> {
    fn value(&self, x: &[T]) -> T {
        let y = self.images(x);
        let (num, _) = self.numerator(&y);
        let v = self.norm.exponent();
        let d2 =
            self.coeffs.iter().map(|c| p_norm(&combine(&y, c), v).powi(2)).fold(T::zero(), |a, b| a + b) / T::of(self.coeffs.len() as f64);
        if d2 > T::zero() {
            num / d2.sqrt()
        } else {
            T::zero()
        }
    }

    fn value_and_log_gradient(&self, x: &[T]) -> (T, Vec<T>) {
        let y = self.images(x);
        let v = self.norm.exponent();
        let (num, norms) = self.numerator(&y);
        let rows = y[0].len();
        let cn = dual_vector(&norms, self.q);
        // Gradients are first accumulated in the embedding space, then pulled back by Aᵀ.
        let mut g: Vec<Vec<T>> = y.iter().zip(&cn).map(|(yj, c)| dual_vector(yj, v).into_iter().map(|a| a * *c / num).collect()).collect();
        let s = T::of(self.coeffs.len() as f64);
        let mut d2 = T::zero();
        let mut gd = vec![vec![T::zero(); rows]; self.k];
        for c in &self.coeffs {
            let z = combine(&y, c);
            let zn = p_norm(&z, v);
            d2 = d2 + zn * zn;
            let dz = dual_vector(&z, v);
            for (gj, cj) in gd.iter_mut().zip(c) {
                gj.iter_mut().zip(&dz).for_each(|(a, b)| *a = *a + zn * *cj * *b);
            }
        }
        d2 = d2 / s;
        if !(d2 > T::zero()) || !(num > T::zero()) {
            return (T::zero(), vec![T::zero(); x.len()]);
        }
        for (gj, dj) in g.iter_mut().zip(&gd) {
            gj.iter_mut().zip(dj).for_each(|(a, b)| *a = *a - *b / (s * d2));
        }
        let grad = g.iter().flat_map(|gj| self.norm.embed().apply_transpose_unchecked(gj)).collect();
        (num / d2.sqrt(), grad)
    }
}

/// Lower estimate of `C_q^k(Id_E)` (Rademacher) or its gaussian variant.
///
/// Rademacher ascent uses all sign patterns for `k ≤ 16`; otherwise the ascent
/// runs on fixed draws and the winner is re-evaluated on fresh samples
/// (`prm.mc_samples`), with the standard error reported as the tolerance.
pub fn cotype_estimate<T: Scalar>(e: &EmbeddedNorm<T>, prm: CotypeParams, cfg: &AscentConfig) -> Result<NormEstimate<T>> {
    cotype_estimate_from(e, prm, cfg, &[])
}

/// [`cotype_estimate`] with extra warm-start families of at most `k` vectors,
/// zero-padded to `k`.
pub fn cotype_estimate_from<T: Scalar>(
    e: &EmbeddedNorm<T>,
    prm: CotypeParams,
    cfg: &AscentConfig,
    warm: &[VectorFamily<T>],
) -> Result<NormEstimate<T>> {
    let CotypeParams { q, k, kind, mc_samples } = prm;
    CotypeParams::new(q, k, kind)?;
    let n = e.dim();
    for f in warm {
        e.check(f)?;
        if f.len() > k {
            return Err(Error::InvalidParameter(format!("warm start has {} vectors, budget is {k}", f.len())));
        }
    }
    let exact_fit = kind == VariableKind::Rademacher && k <= ASCENT_SIGN_CAP;
    let obj = if exact_fit {
        CotypeObjective::all_signs(e, q, k)
    } else {
        let fit = mc_samples.clamp(MIN_SAMPLES, ASCENT_DRAWS);
        CotypeObjective::new(e, q, k, draws(k, fit, sub_seed(cfg.seed, STREAM_FIT), kind))
    };

    let mut starts: Vec<Vec<T>> = Vec::new();
    let mut single = vec![T::zero(); k * n];
    single[0] = T::one();
    starts.push(single);
    let mut basis = vec![T::zero(); k * n];
    for j in 0..k.min(n) {
        basis[j * n + j] = T::one();
    }
    starts.push(basis);
    for s in 0..cfg.starts {
        let mut rng = seeded_rng(sub_seed(cfg.seed, s as u64));
        starts.push(gaussian_vec(&mut rng, k * n));
    }
    for f in warm {
        starts.push(f.padded(k - f.len()).vectors().concat());
    }
    let best = maximize(&obj, starts, cfg).expect("at least the single-vector start");
    let fam = obj.family(&best.point);
    let (num, _) = obj.numerator(&embedded_images(&fam, e));

    let (avg, tol, method) = if kind == VariableKind::Rademacher && k <= SIGN_CAP {
        (rademacher_average(&fam, e)?, T::of(cfg.tol), "rademacher-ascent")
    } else {
        let cert = sub_seed(cfg.seed, STREAM_CERT);
        let (mean, se) = monte_carlo(&fam, e, mc_samples.max(MIN_SAMPLES), cert, kind)?;
        let label = if kind == VariableKind::Gaussian { "gaussian-mc-ascent" } else { "rademacher-mc-ascent" };
        (mean, if mean > T::zero() { num * se / (mean * mean) } else { T::zero() }, label)
    };
    if !(avg > T::zero()) {
        return Ok(NormEstimate::lower(T::zero(), method, tol, Some(Witness::Family(fam))));
    }
    Ok(NormEstimate::lower(num / avg, method, tol, Some(Witness::Family(fam.scaled(avg.recip())))))
}
