//! Slowly varying radial potential wells. The family is Gaussian in r with
//! depth and width following quadratic paths in the slow time s ∈ [0, 1], which
//! is rich enough to exercise both a generic branch (∂ₛV ≠ 0 at s = 0) and a
//! degenerate one (∂ₛV|₀ = 0) while keeping every s-derivative analytic.

use crate::grid::RadialGrid;
use crate::scalar::Real;

/// q(s) = c0 + c1·s + c2·s².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic<T> {
    pub c0: T,
    pub c1: T,
    pub c2: T,
}

impl<T: Real> Quadratic<T> {
    pub fn constant(c: T) -> Self {
        Self { c0: c, c1: T::zero(), c2: T::zero() }
    }

    pub fn eval(&self, s: T) -> T {
        self.c0 + s * (self.c1 + s * self.c2)
    }

    pub fn d1(&self, s: T) -> T {
        self.c1 + T::of(2.0) * self.c2 * s
    }

    pub fn d2(&self) -> T {
        T::of(2.0) * self.c2
    }
}

/// V_s(r) = −a(s)·exp(−(r/w(s))²) with a, w > 0 along the whole path.
#[derive(Clone, Copy, Debug)]
pub struct PotentialPath<T> {
    pub depth: Quadratic<T>,
    pub width: Quadratic<T>,
}

impl<T: Real> PotentialPath<T> {
    pub fn new(depth: Quadratic<T>, width: Quadratic<T>) -> Self {
        Self { depth, width }
    }

    /// Frozen well at a single parameter value (no s-dependence).
    pub fn frozen(depth: T, width: T) -> Self {
        Self {
            depth: Quadratic::constant(depth),
            width: Quadratic::constant(width),
        }
    }

    pub fn is_autonomous(&self) -> bool {
        self.depth.c1 == T::zero()
            && self.depth.c2 == T::zero()
            && self.width.c1 == T::zero()
            && self.width.c2 == T::zero()
    }

    /// The path traversed backwards over [0, s_end]: V'_s = V_{s_end − s}.
    pub fn reversed(&self, s_end: T) -> Self {
        let flip = |q: Quadratic<T>| Quadratic {
            c0: q.eval(s_end),
            c1: -q.c1 - T::of(2.0) * q.c2 * s_end,
            c2: q.c2,
        };
        Self { depth: flip(self.depth), width: flip(self.width) }
    }

    pub fn value_at(&self, s: T, r: T) -> T {
        let a = self.depth.eval(s);
        let w = self.width.eval(s);
        -a * (-(r / w) * (r / w)).exp()
    }

    /// Potential values at the grid nodes.
    pub fn sample(&self, grid: &RadialGrid<T>, s: T) -> Vec<T> {
        grid.nodes().iter().map(|&r| self.value_at(s, r)).collect()
    }

    /// Analytic ∂ₛV at the grid nodes.
    pub fn sample_ds(&self, grid: &RadialGrid<T>, s: T) -> Vec<T> {
        let a = self.depth.eval(s);
        let ap = self.depth.d1(s);
        let w = self.width.eval(s);
        let wp = self.width.d1(s);
        grid.nodes()
            .iter()
            .map(|&r| {
                let g = (-(r / w) * (r / w)).exp();
                let q = T::of(2.0) * r * r * wp / (w * w * w);
                -(ap + a * q) * g
            })
            .collect()
    }

    /// Analytic ∂²ₛV at the grid nodes.
    pub fn sample_d2s(&self, grid: &RadialGrid<T>, s: T) -> Vec<T> {
        let a = self.depth.eval(s);
        let ap = self.depth.d1(s);
        let app = self.depth.d2();
        let w = self.width.eval(s);
        let wp = self.width.d1(s);
        let wpp = self.width.d2();
        grid.nodes()
            .iter()
            .map(|&r| {
                let g = (-(r / w) * (r / w)).exp();
                let r2 = r * r;
                let q = T::of(2.0) * r2 * wp / (w * w * w);
                let qp = T::of(2.0) * r2 * (wpp / (w * w * w) - T::of(3.0) * wp * wp / (w * w * w * w));
                -g * (app + T::of(2.0) * ap * q + a * q * q + a * qp)
            })
            .collect()
    }

    /// True when the depth path has vanishing slope at s = 0 while the width
    /// is constant, so ∂ₛV|₀ ≡ 0 (the degenerate branch).
    pub fn is_degenerate_at_start(&self) -> bool {
        self.depth.c1 == T::zero() && self.width.c1 == T::zero() && self.width.c2 == T::zero()
    }

    /// |V| at the outermost node: a proxy for how far into the numerical
    /// vacuum the domain wall sits.
    pub fn tail_magnitude(&self, grid: &RadialGrid<T>, s: T) -> T {
        self.value_at(s, grid.r_max() - grid.spacing()).abs()
    }

    /// Positivity of depth and width along a sampled path.
    pub fn path_is_admissible(&self) -> bool {
        let m = 64;
        (0..=m).all(|k| {
            let s = T::of(k as f64 / m as f64);
            self.depth.eval(s) > T::zero() && self.width.eval(s) > T::zero()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_path() -> PotentialPath<f64> {
        PotentialPath::new(
            Quadratic { c0: 1.3, c1: 0.2, c2: -0.15 },
            Quadratic { c0: 2.0, c1: -0.1, c2: 0.08 },
        )
    }

    #[test]
    fn derivative_paths_match_finite_differences() {
        let grid = RadialGrid::new(20.0, 128).unwrap();
        let p = test_path();
        let ds = 1e-5;
        for &s in &[0.0, 0.3, 0.9] {
            let d1 = p.sample_ds(&grid, s);
            let d2 = p.sample_d2s(&grid, s);
            let vp = p.sample(&grid, s + ds);
            let vm = p.sample(&grid, s - ds);
            let v0 = p.sample(&grid, s);
            for i in 0..grid.n_points() {
                let fd1 = (vp[i] - vm[i]) / (2.0 * ds);
                let fd2 = (vp[i] - 2.0 * v0[i] + vm[i]) / (ds * ds);
                assert_relative_eq!(d1[i], fd1, epsilon = 1e-8, max_relative = 1e-6);
                assert_relative_eq!(d2[i], fd2, epsilon = 1e-4, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn degenerate_branch_has_zero_initial_slope() {
        let grid = RadialGrid::new(24.0, 96).unwrap();
        let p = PotentialPath::new(
            Quadratic { c0: 1.1, c1: 0.0, c2: 0.4 },
            Quadratic::constant(2.0),
        );
        assert!(p.is_degenerate_at_start());
        let d1 = p.sample_ds(&grid, 0.0);
        assert!(d1.iter().all(|&x| x == 0.0));
        // but the slope is alive away from s = 0
        let d1 = p.sample_ds(&grid, 0.5);
        assert!(d1.iter().any(|&x: &f64| x.abs() > 1e-3));
        assert!(!test_path().is_degenerate_at_start());
    }

    #[test]
    fn well_is_negative_monotone_and_decaying() {
        let grid = RadialGrid::new(32.0, 256).unwrap();
        let p = test_path();
        let v = p.sample(&grid, 0.4);
        assert!(v.iter().all(|&x| x < 0.0));
        for i in 1..v.len() {
            assert!(v[i] >= v[i - 1]);
        }
        assert!(p.tail_magnitude(&grid, 0.4) < 1e-30);
        assert!(p.path_is_admissible());
    }

    #[test]
    fn inadmissible_path_is_flagged() {
        let p = PotentialPath::new(
            Quadratic { c0: 0.5, c1: -1.2, c2: 0.0 },
            Quadratic::constant(2.0),
        );
        assert!(!p.path_is_admissible());
    }
}
