//! Deterministic randomness: every random object is derived from a master
//! seed plus a stream index, so results do not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::exponent::Exponent;
use crate::norms::normalize;
use crate::scalar::Scalar;

pub type SeededRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `stream`-th independent sub-computation of `seed`.
pub fn sub_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(0xA5A5_5A5A)))
}

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec<T: Scalar, R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<T> {
    (0..len)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            T::of(g)
        })
        .collect()
}

pub fn random_sign<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    if rng.random::<bool>() {
        T::one()
    } else {
        -T::one()
    }
}

/// Sample from the cone measure of the unit sphere of `ℓ_e^len`
/// (coordinates with density ∝ exp(−|t|^e), then normalized).
pub fn sphere_point<T: Scalar, R: Rng + ?Sized>(rng: &mut R, len: usize, e: Exponent) -> Vec<T> {
    let mut x: Vec<T> = match e {
        Exponent::Infinite => (0..len).map(|_| T::of(rng.random_range(-1.0..=1.0))).collect(),
        e => {
            let p = e.to_f64();
            let gamma = Gamma::new(1.0 / p, 1.0).expect("positive shape");
            (0..len)
                .map(|_| {
                    let g: f64 = gamma.sample(rng);
                    random_sign::<T, R>(rng) * T::of(g.powf(1.0 / p))
                })
                .collect()
        }
    };
    if normalize(&mut x, e) == T::zero() && len > 0 {
        x[0] = T::one();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::p_norm;

    #[test]
    fn sub_seeds_differ_and_are_stable() {
        assert_eq!(sub_seed(7, 3), sub_seed(7, 3));
        assert_ne!(sub_seed(7, 3), sub_seed(7, 4));
        assert_ne!(sub_seed(7, 3), sub_seed(8, 3));
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut rng = seeded_rng(1);
        for s in ["1", "3/2", "2", "5", "inf"] {
            let e: Exponent = s.parse().unwrap();
            let x: Vec<f64> = sphere_point(&mut rng, 6, e);
            assert!((p_norm(&x, e) - 1.0).abs() < 1e-12);
        }
    }
}
