use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::data::{stacked_norm, NoiseRecord, NOISE_RNG};
use super::CauchyData;
use crate::{ComplexVec3, Error, Result};

/// Relative noise on both data channels:
/// `E_δ = E + δ₁ ‖E‖₂ N₁/‖N₁‖₂` and likewise for `curl E × ν` with `δ₂` and
/// an independent `N₂`. Entries of `N₁`, `N₂` are `a + ib` with `a, b`
/// uniform on `[-1, 1)`; `N₁` is drawn in full before `N₂`.
pub fn add_noise(data: &CauchyData, delta1: f64, delta2: f64, seed: u64) -> Result<CauchyData> {
    for (name, d) in [("noise.delta1", delta1), ("noise.delta2", delta2)] {
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::config(name, format!("must be a nonnegative fraction, got {d}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n1 = draw(&mut rng, data.e.len());
    let n2 = draw(&mut rng, data.curl_e_cross_nu.len());
    let mut out = data.clone();
    perturb(&mut out.e, &n1, delta1);
    perturb(&mut out.curl_e_cross_nu, &n2, delta2);
    out.provenance.noise = Some(NoiseRecord {
        delta1,
        delta2,
        seed,
        rng: NOISE_RNG.into(),
    });
    Ok(out)
}

fn draw(rng: &mut ChaCha8Rng, n: usize) -> Vec<ComplexVec3> {
    (0..n)
        .map(|_| {
            ComplexVec3::from_fn(|_, _| {
                let a = rng.random_range(-1.0..1.0);
                let b = rng.random_range(-1.0..1.0);
                Complex64::new(a, b)
            })
        })
        .collect()
}

fn perturb(values: &mut [ComplexVec3], noise: &[ComplexVec3], delta: f64) {
    let scale = stacked_norm(values);
    let n = stacked_norm(noise);
    if delta == 0.0 || scale == 0.0 || n == 0.0 {
        return;
    }
    let f = delta * scale / n;
    for (v, e) in values.iter_mut().zip(noise) {
        *v += e * Complex64::from(f);
    }
}
