//! Lower estimates of `π_pq^k(T)` by multi-start ascent on the ratio
//! `strong_norm / weak_norm`.
//!
//! Three ascent schemes are used, chosen by the domain exponent `u`:
//!
//! * `u = ∞`: the weak norm is the largest row `ℓ_q` norm of the `m × k`
//!   matrix `[x_1 … x_k]`, so the weak unit ball is a product of row balls and
//!   the linear step over it is exact row by row ("power-rows"). For `q = 1`
//!   the iterates are disjoint `±1` families and a 1-opt move search over
//!   (row, vector, sign) follows.
//! * `u = q = 2`: the weak norm is the spectral norm and the linear step is
//!   the polar factor of the gradient ("power-polar").
//! * otherwise: normalized gradient ascent on `log(S/W)` with Danskin
//!   gradients of the inner weak norm ("gradient-ascent").
//!
//! The strong norm `S` is convex, so each linear step over the weak ball
//! never lowers `S`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::exact::{partition_configurations, pi_exact_linf_q1};
use super::{weak_norm_with, SummingParams};
use crate::ascent::{best_of, maximize, AscentConfig, HomogeneousRatio};
use crate::error::{Error, Result};
use crate::estimate::{NormEstimate, Witness};
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::norms::{dot, dual_vector, linear_maximizer, p_norm};
use crate::operators::MatrixOperator;
use crate::random::{gaussian_vec, seeded_rng, sub_seed};
use crate::scalar::Scalar;

/// `S = (Σ‖Tx_j‖_v^p)^{1/p}` and a supergradient `∂S/∂x_j`.
pub fn strong_gradient<T: Scalar>(op: &MatrixOperator<T>, vectors: &[Vec<T>], p: Exponent) -> (T, Vec<Vec<T>>) {
    let v = op.codomain();
    let images: Vec<Vec<T>> = vectors.iter().map(|x| op.apply_unchecked(x)).collect();
    let norms: Vec<T> = images.iter().map(|y| p_norm(y, v)).collect();
    let s = p_norm(&norms, p);
    let c = dual_vector(&norms, p);
    let grads = images
        .iter()
        .zip(&c)
        .map(|(y, cj)| {
            if *cj == T::zero() {
                return vec![T::zero(); op.cols()];
            }
            op.apply_transpose_unchecked(&dual_vector(y, v)).into_iter().map(|g| g * *cj).collect()
        })
        .collect();
    (s, grads)
}

/// Weak norm of a family and its Danskin gradient at the maximizing functional.
///
/// With `x*` norming `V α` for the weak-norm witness `α`, the active branch is
/// `‖(⟨x_j, x*⟩)_j‖_q`, whose gradient in `x_j` is `c_j x*`.
pub fn weak_gradient<T: Scalar>(family: &VectorFamily<T>, q: Exponent, cfg: &AscentConfig) -> (T, Vec<Vec<T>>) {
    let m = family.dim();
    let zero = || vec![vec![T::zero(); m]; family.len()];
    let est = weak_norm_with(family, q, cfg);
    let Some(alpha) = est.vector() else { return (est.value, zero()) };
    let v = family.column_operator(q);
    let xstar = dual_vector(&v.apply_unchecked(alpha), family.ambient());
    let a: Vec<T> = family.vectors().iter().map(|x| dot(x, &xstar)).collect();
    let c = dual_vector(&a, q);
    let grads = c.iter().map(|cj| xstar.iter().map(|s| *s * *cj).collect()).collect();
    (est.value, grads)
}

/// The ratio `S/W` as a function of the `k·m` flattened family entries.
pub struct PiObjective<'a, T> {
    op: &'a MatrixOperator<T>,
    p: Exponent,
    q: Exponent,
    k: usize,
    inner: AscentConfig,
}

impl<'a, T: Scalar> PiObjective<'a, T> {
    pub fn new(op: &'a MatrixOperator<T>, p: Exponent, q: Exponent, k: usize, cfg: &AscentConfig) -> Self {
        let inner = AscentConfig { starts: cfg.inner_starts, ..cfg.clone() };
        PiObjective { op, p, q, k, inner }
    }

    pub fn family(&self, x: &[T]) -> VectorFamily<T> {
        VectorFamily::from_flat(x, self.k, self.op.cols(), self.op.domain())
    }

    /// Gradient of `log(S/W)`, exposed for finite-difference checks.
    pub fn log_gradient(&self, x: &[T]) -> Vec<T> {
        self.value_and_log_gradient(x).1
    }
}

impl<T: Scalar> HomogeneousRatio<T> for PiObjective<'_, T> {
    fn value(&self, x: &[T]) -> T {
        let fam = self.family(x);
        let s =
            p_norm(&fam.images(self.op).expect("shape checked").iter().map(|y| p_norm(y, self.op.codomain())).collect::<Vec<_>>(), self.p);
        let w = weak_norm_with(&fam, self.q, &self.inner).value;
        if w > T::zero() {
            s / w
        } else {
            T::zero()
        }
    }

    fn value_and_log_gradient(&self, x: &[T]) -> (T, Vec<T>) {
        let fam = self.family(x);
        let (s, gs) = strong_gradient(self.op, fam.vectors(), self.p);
        let (w, gw) = weak_gradient(&fam, self.q, &self.inner);
        if w <= T::zero() || s <= T::zero() {
            return (T::zero(), vec![T::zero(); x.len()]);
        }
        let g = gs.iter().flatten().zip(gw.iter().flatten()).map(|(a, b)| *a / s - *b / w).collect();
        (s / w, g)
    }
}

/// `π_pq^k(T)` from the default starts.
pub fn pi_estimate<T: Scalar>(op: &MatrixOperator<T>, prm: SummingParams, cfg: &AscentConfig) -> Result<NormEstimate<T>> {
    pi_estimate_from(op, prm, cfg, &[])
}

/// `π_pq^k(T)` with extra warm-start families (at most `k` vectors each,
/// zero-padded to `k`).
pub fn pi_estimate_from<T: Scalar>(
    op: &MatrixOperator<T>,
    prm: SummingParams,
    cfg: &AscentConfig,
    warm: &[VectorFamily<T>],
) -> Result<NormEstimate<T>> {
    let SummingParams { p, q, k } = SummingParams::new(prm.p, prm.q, prm.k)?;
    let (m, u) = (op.cols(), op.domain());
    for f in warm {
        if f.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, found: f.dim() });
        }
        if f.ambient() != u {
            return Err(Error::ExponentMismatch { left: u.to_string(), right: f.ambient().to_string() });
        }
        if f.len() > k {
            return Err(Error::InvalidParameter(format!("warm start has {} vectors, budget is {k}", f.len())));
        }
    }
    if m == 0 || op.rows() == 0 || op.is_zero() {
        let fam = if m == 0 { VectorFamily::empty(0, u) } else { VectorFamily::basis(m, u).select(&[0]).padded(k - 1) };
        return Ok(NormEstimate::exact(T::zero(), "zero-operator", Some(Witness::Family(fam))));
    }
    // The search runs on T/max|t_ij| so that the estimate is positively homogeneous in T.
    let scale = op.entries().iter().fold(T::zero(), |a, x| a.max(x.abs()));
    if scale != T::one() {
        let unit = MatrixOperator::new(op.rows(), m, op.entries().iter().map(|x| *x / scale).collect(), u, op.codomain())?;
        let est = pi_estimate_from(&unit, prm, cfg, warm)?;
        return Ok(NormEstimate { value: est.value * scale, ..est });
    }
    if cfg.exact_oracle && u.is_infinite() && q.is_one() && partition_configurations(m, k) <= cfg.partition_cap {
        return pi_exact_linf_q1(op, p, k, cfg);
    }

    let mut starts: Vec<Vec<Vec<T>>> = Vec::new();
    starts.push(
        (0..k)
            .map(|j| {
                let mut e = vec![T::zero(); m];
                if j < m {
                    e[j] = T::one();
                }
                e
            })
            .collect(),
    );
    for s in 0..cfg.starts {
        let mut rng = seeded_rng(sub_seed(cfg.seed, s as u64));
        starts.push((0..k).map(|_| gaussian_vec(&mut rng, m)).collect());
    }
    for f in warm {
        starts.push(f.padded(k - f.len()).vectors().to_vec());
    }

    let (method, fam) = if u.is_infinite() {
        ("power-rows", run_starts(starts, |s| power_rows(op, s, p, q, cfg)))
    } else if u.is_two() && q.is_two() {
        ("power-polar", run_starts(starts, |s| power_polar(op, s, p, cfg)))
    } else {
        let obj = PiObjective::new(op, p, q, k, cfg);
        let flat: Vec<Vec<T>> = starts.into_iter().map(|s| s.concat()).collect();
        let best = maximize(&obj, flat, cfg).expect("at least the basis start");
        ("gradient-ascent", best.point.chunks(m).map(|c| c.to_vec()).collect())
    };
    certify(op, fam, p, q, cfg, method)
}

/// Re-evaluates the best family with a stronger weak-norm pass and rescales it
/// to weak norm 1.
fn certify<T: Scalar>(
    op: &MatrixOperator<T>,
    vectors: Vec<Vec<T>>,
    p: Exponent,
    q: Exponent,
    cfg: &AscentConfig,
    method: &str,
) -> Result<NormEstimate<T>> {
    let fam = VectorFamily::new(vectors, op.domain())?;
    let cert = AscentConfig { starts: cfg.starts.max(4 * cfg.inner_starts), ..cfg.clone() };
    let w = weak_norm_with(&fam, q, &cert).value;
    let s = super::strong_norm(&fam, op, p)?;
    if !(w > T::zero()) {
        return Ok(NormEstimate::lower(T::zero(), method, T::of(cfg.tol), Some(Witness::Family(fam))));
    }
    let fam = fam.scaled(w.recip());
    Ok(NormEstimate::lower(s / w, method, T::of(cfg.tol), Some(Witness::Family(fam))))
}

fn run_starts<T: Scalar>(starts: Vec<Vec<Vec<T>>>, f: impl Fn(Vec<Vec<T>>) -> (T, Vec<Vec<T>>) + Sync + Send) -> Vec<Vec<T>> {
    let results: Vec<(T, Vec<Vec<T>>)> = starts.into_par_iter().map(f).collect();
    best_of(results, |r| r.0).expect("at least the basis start").1
}

fn strong_value<T: Scalar>(op: &MatrixOperator<T>, vectors: &[Vec<T>], p: Exponent) -> T {
    let norms: Vec<T> = vectors.iter().map(|x| p_norm(&op.apply_unchecked(x), op.codomain())).collect();
    p_norm(&norms, p)
}

/// Largest row `ℓ_q` norm of `[x_1 … x_k]`, the weak norm when `u = ∞`.
fn max_row_norm<T: Scalar>(vectors: &[Vec<T>], q: Exponent) -> T {
    let m = vectors[0].len();
    (0..m).map(|i| p_norm(&vectors.iter().map(|x| x[i]).collect::<Vec<_>>(), q)).fold(T::zero(), T::max)
}

fn rescale<T: Scalar>(vectors: &mut [Vec<T>], w: T) -> bool {
    if !(w > T::zero()) || !w.is_finite() {
        return false;
    }
    vectors.iter_mut().flatten().for_each(|a| *a = *a / w);
    true
}

/// Runs linear steps `next` while they improve `S` by more than `tol`.
fn climb<T: Scalar>(
    op: &MatrixOperator<T>,
    mut x: Vec<Vec<T>>,
    p: Exponent,
    cfg: &AscentConfig,
    next: impl Fn(&[Vec<T>], &[Vec<T>]) -> Vec<Vec<T>>,
) -> (T, Vec<Vec<T>>) {
    let tol = T::of(cfg.tol);
    let mut val = strong_value(op, &x, p);
    for _ in 0..cfg.iterations {
        let (_, grads) = strong_gradient(op, &x, p);
        let xn = next(&x, &grads);
        let vn = strong_value(op, &xn, p);
        if !(vn > val * (T::one() + tol)) {
            if vn > val {
                x = xn;
                val = vn;
            }
            break;
        }
        x = xn;
        val = vn;
    }
    (val, x)
}

fn power_rows<T: Scalar>(op: &MatrixOperator<T>, mut x: Vec<Vec<T>>, p: Exponent, q: Exponent, cfg: &AscentConfig) -> (T, Vec<Vec<T>>) {
    let w = max_row_norm(&x, q);
    if !rescale(&mut x, w) {
        return (T::zero(), x);
    }
    let (k, m) = (x.len(), op.cols());
    let step = |x: &[Vec<T>], g: &[Vec<T>]| {
        let mut out = x.to_vec();
        for i in 0..m {
            let gi: Vec<T> = g.iter().map(|gj| gj[i]).collect();
            let row = if gi.iter().all(|a| *a == T::zero()) {
                if !q.is_one() {
                    continue;
                }
                let mut e = vec![T::zero(); k];
                e[0] = T::one();
                e
            } else {
                linear_maximizer(&gi, q)
            };
            for (j, r) in row.into_iter().enumerate() {
                out[j][i] = r;
            }
        }
        out
    };
    let (mut val, mut x) = climb(op, x, p, cfg, step);
    if q.is_one() {
        for _ in 0..cfg.iterations.max(1) {
            let (pv, px) = polish_vertices(op, &x, p);
            if !(pv > val * (T::one() + T::of(cfg.tol))) {
                break;
            }
            let (cv, cx) = climb(op, px, p, cfg, step);
            val = cv;
            x = cx;
        }
    }
    (val, x)
}

/// 1-opt search over disjoint `±1` families: move one coordinate to another
/// vector and/or flip its sign while that increases `S`.
/// `(value, vector, sign, new image of the old vector, new image of the target)`.
type Move<T> = (T, usize, T, Vec<T>, Vec<T>);

fn polish_vertices<T: Scalar>(op: &MatrixOperator<T>, x: &[Vec<T>], p: Exponent) -> (T, Vec<Vec<T>>) {
    let (k, m, v) = (x.len(), op.cols(), op.codomain());
    let cols = op.columns();
    let mut assign: Vec<(usize, T)> = (0..m)
        .map(|i| {
            let row: Vec<T> = x.iter().map(|xj| xj[i]).collect();
            let j = crate::norms::argmax_abs(&row).unwrap_or(0);
            (j, if row[j] < T::zero() { -T::one() } else { T::one() })
        })
        .collect();
    let mut images = vec![vec![T::zero(); op.rows()]; k];
    for (i, (j, s)) in assign.iter().enumerate() {
        for (y, c) in images[*j].iter_mut().zip(&cols[i]) {
            *y = *y + *s * *c;
        }
    }
    let mut norms: Vec<T> = images.iter().map(|y| p_norm(y, v)).collect();
    let mut val = p_norm(&norms, p);
    let thresh = T::one() + T::of(1e-12);
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..m {
            let (j0, s0) = assign[i];
            let mut best: Option<Move<T>> = None;
            for j1 in 0..k {
                for s1 in [T::one(), -T::one()] {
                    if j1 == j0 && s1 == s0 {
                        continue;
                    }
                    let y0: Vec<T> = images[j0].iter().zip(&cols[i]).map(|(y, c)| *y - s0 * *c).collect();
                    let (y0, y1) = if j1 == j0 {
                        (y0.iter().zip(&cols[i]).map(|(y, c)| *y + s1 * *c).collect(), Vec::new())
                    } else {
                        (y0, images[j1].iter().zip(&cols[i]).map(|(y, c)| *y + s1 * *c).collect())
                    };
                    let mut trial = norms.clone();
                    trial[j0] = p_norm(&y0, v);
                    if j1 != j0 {
                        trial[j1] = p_norm(&y1, v);
                    }
                    let tv = p_norm(&trial, p);
                    let bar = best.as_ref().map_or(val * thresh, |b| b.0);
                    if tv > bar {
                        best = Some((tv, j1, s1, y0, y1));
                    }
                }
            }
            if let Some((tv, j1, s1, y0, y1)) = best {
                images[j0] = y0;
                norms[j0] = p_norm(&images[j0], v);
                if j1 != j0 {
                    images[j1] = y1;
                    norms[j1] = p_norm(&images[j1], v);
                }
                assign[i] = (j1, s1);
                val = tv;
                improved = true;
            }
        }
    }
    let mut out = vec![vec![T::zero(); m]; k];
    for (i, (j, s)) in assign.into_iter().enumerate() {
        out[j][i] = s;
    }
    (p_norm(&norms, p), out)
}

fn to_matrix<T: Scalar>(vectors: &[Vec<T>]) -> DMatrix<f64> {
    let m = vectors[0].len();
    DMatrix::from_fn(m, vectors.len(), |i, j| vectors[j][i].to_f64_lossy())
}

fn power_polar<T: Scalar>(op: &MatrixOperator<T>, x: Vec<Vec<T>>, p: Exponent, cfg: &AscentConfig) -> (T, Vec<Vec<T>>) {
    let (k, m) = (x.len(), op.cols());
    let spectral = to_matrix(&x).singular_values().max();
    let mut x = x;
    let w = T::of(spectral);
    if !rescale(&mut x, w) {
        return (T::zero(), x);
    }
    let step = |_: &[Vec<T>], g: &[Vec<T>]| {
        let svd = to_matrix(g).svd(true, true);
        let (Some(u), Some(vt)) = (svd.u, svd.v_t) else { return g.to_vec() };
        let polar = u * vt;
        (0..k).map(|j| (0..m).map(|i| T::of(polar[(i, j)])).collect()).collect()
    };
    climb(op, x, p, cfg, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::inclusion;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn hadamard(u: &str, v: &str) -> MatrixOperator<f64> {
        MatrixOperator::<f64>::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]], e(u), e(v)).unwrap()
    }

    #[test]
    fn identity_on_l2_with_two_vectors() {
        let id = MatrixOperator::<f64>::identity(3, Exponent::TWO);
        let est = pi_estimate(&id, SummingParams::new(e("2"), e("2"), 2).unwrap(), &AscentConfig::default()).unwrap();
        assert!((est.value - 2f64.sqrt()).abs() < 1e-9, "{}", est.value);
        assert_eq!(est.method, "power-polar");
    }

    #[test]
    fn inclusion_into_l2() {
        let iota = inclusion::<f64>(4, Exponent::INF, Exponent::TWO);
        let est = pi_estimate(&iota, SummingParams::new(e("2"), e("2"), 4).unwrap(), &AscentConfig::default()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn hadamard_p2_q1() {
        let a = hadamard("inf", "2");
        let est = pi_estimate(&a, SummingParams::new(e("2"), e("1"), 2).unwrap(), &AscentConfig::default()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9, "{}", est.value);
        let fam = est.family().unwrap();
        assert!((weak_norm_with(fam, e("1"), &AscentConfig::default()).value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_regime_is_sound_and_reasonable() {
        let a = hadamard("3", "3/2");
        let cfg = AscentConfig::default().with_starts(8);
        let est = pi_estimate(&a, SummingParams::new(e("2"), e("3/2"), 2).unwrap(), &cfg).unwrap();
        assert_eq!(est.method, "gradient-ascent");
        let single = pi_estimate(&a, SummingParams::new(e("2"), e("3/2"), 1).unwrap(), &cfg).unwrap();
        let norm = a.operator_norm().value;
        assert!((single.value - norm).abs() < 1e-6 * norm, "{} vs {}", single.value, norm);
        assert!(est.value >= single.value * (1.0 - 1e-9));
        let fam = est.family().unwrap();
        let s = super::super::strong_norm(fam, &a, e("2")).unwrap();
        assert!((s - est.value).abs() < 1e-9);
    }

    #[test]
    fn exact_oracle_is_used_when_selected() {
        let a = hadamard("inf", "2");
        let cfg = AscentConfig::default().with_exact_oracle(true);
        let est = pi_estimate(&a, SummingParams::new(e("2"), e("1"), 2).unwrap(), &cfg).unwrap();
        assert!(est.is_exact());
        assert_eq!(est.value, 2.0);
    }

    #[test]
    fn zero_operator_gives_zero() {
        let z = MatrixOperator::<f64>::zeros(2, 3, Exponent::INF, Exponent::TWO);
        let est = pi_estimate(&z, SummingParams::new(e("2"), e("1"), 2).unwrap(), &AscentConfig::default()).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.is_exact());
    }

    #[test]
    fn log_gradient_matches_finite_differences() {
        let a = MatrixOperator::<f64>::from_rows(&[vec![1.0, 0.3, -0.2], vec![0.5, -1.0, 0.7]], e("3"), e("3/2")).unwrap();
        let obj = PiObjective::new(&a, e("2"), e("3/2"), 2, &AscentConfig::default());
        let x: Vec<f64> = vec![0.4, -0.7, 0.2, 0.9, 0.1, -0.3];
        let g = obj.log_gradient(&x);
        let h = 1e-6;
        for i in 0..x.len() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += h;
            xm[i] -= h;
            let fd = (obj.value(&xp).ln() - obj.value(&xm).ln()) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-4 * g[i].abs().max(1.0), "i={i}: {fd} vs {}", g[i]);
        }
    }
}
