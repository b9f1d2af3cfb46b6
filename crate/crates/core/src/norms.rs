//! Vector-level ℓ_e norms and their norming functionals.

use crate::exponent::Exponent;
use crate::scalar::Scalar;

/// `ℓ_e` norm of `x`.
///
/// Exact summation for `e ∈ {1, 2, ∞}`. For `e > 64` the sum is taken in the
/// max-factored form `max·(Σ(|x_i|/max)^e)^{1/e}` so large exponents never overflow.
pub fn p_norm<T: Scalar>(x: &[T], e: Exponent) -> T {
    match e {
        Exponent::Infinite => max_abs(x),
        e if e.is_one() => x.iter().map(|v| v.abs()).sum(),
        e if e.is_two() => x.iter().map(|v| *v * *v).sum::<T>().sqrt(),
        e => {
            let p: T = e.value();
            if p > T::of(64.0) {
                let m = max_abs(x);
                if m == T::zero() {
                    return T::zero();
                }
                let s: T = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
                m * s.powf(p.recip())
            } else {
                x.iter().map(|v| v.abs().powf(p)).sum::<T>().powf(p.recip())
            }
        }
    }
}

pub fn max_abs<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(a, b)| *a * *b).sum()
}

fn signum0<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Index of the first entry of maximal modulus.
pub fn argmax_abs<T: Scalar>(x: &[T]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in x.iter().enumerate() {
        match best {
            Some((_, b)) if v.abs() <= b => {}
            _ => best = Some((i, v.abs())),
        }
    }
    best.map(|(i, _)| i)
}

/// Norming functional of `y` in `ℓ_e`: the `z` with `‖z‖_{e'} = 1` and
/// `⟨z, y⟩ = ‖y‖_e`. It is also the (sub)gradient of `‖·‖_e` at `y`.
/// Returns the zero vector for `y = 0`. At `e = ∞` the first maximizing
/// index wins.
pub fn dual_vector<T: Scalar>(y: &[T], e: Exponent) -> Vec<T> {
    let mut z = vec![T::zero(); y.len()];
    match e {
        Exponent::Infinite => {
            if let Some(i) = argmax_abs(y) {
                z[i] = signum0(y[i]);
            }
        }
        e if e.is_one() => {
            for (zi, yi) in z.iter_mut().zip(y) {
                *zi = signum0(*yi);
            }
        }
        e => {
            let norm = p_norm(y, e);
            if norm == T::zero() || !norm.is_finite() {
                return z;
            }
            let pm1 = e.value::<T>() - T::one();
            for (zi, yi) in z.iter_mut().zip(y) {
                *zi = signum0(*yi) * (yi.abs() / norm).powf(pm1);
            }
        }
    }
    z
}

/// A maximizer of `⟨w, x⟩` over the unit ball of `ℓ_u`.
///
/// Same as [`dual_vector`] with respect to `u'`, except that for `u = ∞`
/// zero entries of `w` get sign `+1`, so the result is always a vertex of the cube.
pub fn linear_maximizer<T: Scalar>(w: &[T], u: Exponent) -> Vec<T> {
    if u.is_infinite() {
        return w.iter().map(|v| if *v < T::zero() { -T::one() } else { T::one() }).collect();
    }
    dual_vector(w, u.conjugate())
}

/// Rescales `x` to unit `ℓ_e` norm in place; returns the old norm.
pub fn normalize<T: Scalar>(x: &mut [T], e: Exponent) -> T {
    let n = p_norm(x, e);
    if n > T::zero() && n.is_finite() {
        for v in x.iter_mut() {
            *v = *v / n;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn p_norm_examples() {
        assert_eq!(p_norm(&[3.0, 4.0], e("2")), 5.0);
        assert_eq!(p_norm(&[1.0, -2.0], Exponent::INF), 2.0);
        assert_eq!(p_norm(&[1.0, 1.0, 1.0], e("1")), 3.0);
        assert_eq!(p_norm::<f64>(&[], e("3")), 0.0);
    }

    #[test]
    fn large_exponent_does_not_overflow() {
        let x = [1e10f64, 2e10, -3e10];
        let v = p_norm(&x, e("200"));
        assert!(v.is_finite());
        assert!((v - 3e10).abs() / 3e10 < 1e-2);
        assert!(v >= 3e10);
    }

    #[test]
    fn f32_works_too() {
        let v: f32 = p_norm(&[3.0f32, 4.0], e("2"));
        assert_eq!(v, 5.0);
    }

    #[test]
    fn dual_vector_norms_y() {
        let y = [0.3f64, -1.2, 2.0, 0.0];
        for s in ["1", "3/2", "2", "3", "inf"] {
            let z = dual_vector(&y, e(s));
            assert!((dot(&z, &y) - p_norm(&y, e(s))).abs() < 1e-12, "e={s}");
            assert!((p_norm(&z, e(s).conjugate()) - 1.0).abs() < 1e-12, "e={s}");
        }
        assert_eq!(dual_vector(&[0.0, 0.0], e("3")), vec![0.0, 0.0]);
    }

    #[test]
    fn linear_maximizer_on_cube_is_a_vertex() {
        let x = linear_maximizer(&[0.0, -2.0, 1.0], Exponent::INF);
        assert_eq!(x, vec![1.0, -1.0, 1.0]);
        let x = linear_maximizer(&[0.5, -2.0, 1.0], Exponent::ONE);
        assert_eq!(x, vec![0.0, -1.0, 0.0]);
    }
}
