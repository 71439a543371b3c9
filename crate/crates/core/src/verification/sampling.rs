//! Seeded random states, rates and rotations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kinematics::{MaterialState, ReferentialRates, SpatialRates};
use crate::tensor::{Mat3, Vec3};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a label into a seed so that different checks draw different streams.
pub fn sub_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

pub fn uniform_vec(rng: &mut SampleRng, lo: f64, hi: f64) -> Vec3 {
    Vec3::from_fn(|_| rng.random_range(lo..=hi))
}

pub fn uniform_mat(rng: &mut SampleRng, lo: f64, hi: f64) -> Mat3 {
    Mat3::from_fn(|_, _| rng.random_range(lo..=hi))
}

/// `F = I + U`, `U_ij ∈ [−0.3, 0.3]`, redrawn until `det F > 0.5`.
pub fn random_deformation(rng: &mut SampleRng) -> Mat3 {
    loop {
        let f = Mat3::identity() + uniform_mat(rng, -0.3, 0.3);
        if f.det() > 0.5 {
            return f;
        }
    }
}

/// `θ ∈ [θ₀/2, 3θ₀/2]`, `Eᴹ` and `g` components in `[−1, 1]`.
pub fn random_state(rng: &mut SampleRng, theta0: f64) -> MaterialState {
    let f = random_deformation(rng);
    let theta = rng.random_range(0.5 * theta0..=1.5 * theta0);
    let em = uniform_vec(rng, -1.0, 1.0);
    let g = uniform_vec(rng, -1.0, 1.0);
    MaterialState { f, theta, em, g }
}

/// Every rate component drawn from `[−1, 1]`.
pub fn random_rates(rng: &mut SampleRng) -> SpatialRates {
    SpatialRates {
        f_dot: uniform_mat(rng, -1.0, 1.0),
        theta_dot: rng.random_range(-1.0..=1.0),
        em_dot: uniform_vec(rng, -1.0, 1.0),
        g_dot: uniform_vec(rng, -1.0, 1.0),
    }
}

/// Rates with a symmetric velocity gradient: `Ḟ = D F`, `D = Dᵀ`.
pub fn random_spin_free_rates(rng: &mut SampleRng, f: &Mat3) -> SpatialRates {
    let d = uniform_mat(rng, -1.0, 1.0).symmetric_part();
    SpatialRates {
        f_dot: d.matmul(f),
        ..random_rates(rng)
    }
}

/// Referential rates with `Ẇ` and `Ġ` drawn independently of `Ḟ`.
pub fn random_referential_rates(rng: &mut SampleRng) -> ReferentialRates {
    ReferentialRates {
        f_dot: uniform_mat(rng, -1.0, 1.0),
        theta_dot: rng.random_range(-1.0..=1.0),
        w_dot: uniform_vec(rng, -1.0, 1.0),
        g_ref_dot: uniform_vec(rng, -1.0, 1.0),
    }
}

/// Uniformly distributed proper rotation from a normalized Gaussian
/// quaternion.
pub fn random_rotation(rng: &mut SampleRng) -> Mat3 {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|c| c / n);
    Mat3([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_lie_in_range() {
        let mut r = rng(7);
        for _ in 0..500 {
            let s = random_state(&mut r, 2.0);
            assert!(s.f.det() > 0.5);
            assert!((1.0..=3.0).contains(&s.theta));
            assert!(s.em.max_abs() <= 1.0 && s.g.max_abs() <= 1.0);
            assert!((s.f - Mat3::identity()).max_abs() <= 0.3);
        }
    }

    #[test]
    fn rotations_are_proper() {
        let mut r = rng(3);
        for _ in 0..200 {
            let q = random_rotation(&mut r);
            assert!((q.matmul(&q.transpose()) - Mat3::identity()).max_abs() < 1e-14);
            assert!((q.det() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn spin_free_rates_have_symmetric_gradient() {
        let mut r = rng(11);
        let f = random_deformation(&mut r);
        let rates = random_spin_free_rates(&mut r, &f);
        let l = crate::kinematics::velocity_gradient(&f, &rates.f_dot).unwrap();
        assert!(l.antisymmetric_part().max_abs() < 1e-14);
    }

    #[test]
    fn same_seed_same_stream() {
        let a = random_state(&mut rng(5), 1.0);
        let b = random_state(&mut rng(5), 1.0);
        assert_eq!(a, b);
        assert_ne!(sub_seed(5, "a"), sub_seed(5, "b"));
    }
}
