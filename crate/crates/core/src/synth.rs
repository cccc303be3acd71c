//! Synthetic smooth fields for property tests and measured-constant probes.

use crate::grid::{Field, RadialGrid};
use crate::scalar::Real;
use num_complex::Complex;
use rand::Rng;
use std::sync::Arc;

/// Random smooth real field: a low-mode sine series in the u-representation,
/// u(r) = Σ_k c_k k^{−3} sin(kπ r/W) with W the Dirichlet wall. Exactly
/// compatible with the boundary conditions and spectrally concentrated, so
/// second-order operators see it as smooth.
pub fn random_smooth_field<T: Real>(
    grid: &Arc<RadialGrid<T>>,
    rng: &mut impl Rng,
    modes: usize,
) -> Field<T> {
    let wall = grid.spacing() * T::of(grid.n_points() as f64 + 1.0);
    let coeffs: Vec<T> = (0..modes)
        .map(|k| {
            let c: f64 = rng.gen_range(-1.0..1.0);
            T::of(c) / T::of(((k + 1) as f64).powi(3))
        })
        .collect();
    let u = grid
        .nodes()
        .iter()
        .map(|&r| {
            let mut s = T::zero();
            for (k, &c) in coeffs.iter().enumerate() {
                let kk = T::of((k + 1) as f64) * T::PI() / wall;
                s += c * (kk * r).sin();
            }
            Complex::new(s, T::zero())
        })
        .collect();
    Field::from_u(grid, u).expect("finite synthetic field")
}

/// Random complex smooth field (independent sine series in Re and Im).
pub fn random_smooth_complex<T: Real>(
    grid: &Arc<RadialGrid<T>>,
    rng: &mut impl Rng,
    modes: usize,
) -> Field<T> {
    let re = random_smooth_field(grid, rng, modes);
    let im = random_smooth_field(grid, rng, modes);
    let u = re
        .u()
        .iter()
        .zip(im.u())
        .map(|(a, b)| Complex::new(a.re, b.re))
        .collect();
    Field::from_u(grid, u).expect("finite synthetic field")
}

/// Radial Gaussian bump ψ(r) = a·exp(−((r−c)/w)²), smooth and localized.
pub fn gaussian_bump<T: Real>(
    grid: &Arc<RadialGrid<T>>,
    amplitude: T,
    center: T,
    width: T,
) -> Field<T> {
    Field::from_real_fn(grid, |r| {
        let x = (r - center) / width;
        amplitude * (-x * x).exp()
    })
}

/// Random localized bump with seeded parameters, for locality/decay probes.
pub fn random_bump_field<T: Real>(grid: &Arc<RadialGrid<T>>, rng: &mut impl Rng) -> Field<T> {
    let r_max = grid.r_max().to_f64().unwrap();
    let c = T::of(rng.gen_range(1.0..r_max * 0.4));
    let w = T::of(rng.gen_range(0.5..2.0));
    let a = T::of(rng.gen_range(0.2..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
    gaussian_bump(grid, a, c, w)
}
