//! Radial reduction of ℝ³ to a uniform 1-D grid.
//!
//! A radially symmetric ψ(x) is stored through u(r) = r·ψ(r) at the nodes
//! r_i = i·h, i = 1..n. With homogeneous Dirichlet values u(0) = 0 and
//! u(r_max + h) = 0 (the wall sits one spacing outside the last stored node,
//! so every stored node is a genuine degree of freedom), the 3-D radial
//! Laplacian Δψ = (1/r)∂²_r(rψ) becomes the plain second difference of u.
//! Quadrature is the 3-D volume rule with weights 4πr²Δr, which on the
//! u-representation collapses to 4πΔr·Σ|u_i|² for the L² pairing.

use crate::scalar::Real;
use num_complex::Complex;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("grids differ (n or spacing mismatch)")]
    GridMismatch,
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("invalid grid: {0}")]
    BadGrid(String),
}

/// Uniform radial grid on (0, r_max] with 3-D volume quadrature weights.
#[derive(Debug)]
pub struct RadialGrid<T> {
    n: usize,
    h: T,
    r: Vec<T>,
    w: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    /// Build a grid with `n_points` nodes at spacing `r_max / n_points`.
    pub fn new(r_max: T, n_points: usize) -> Result<Arc<Self>, DomainError> {
        if n_points < 16 {
            return Err(DomainError::BadGrid(format!(
                "need at least 16 nodes, got {n_points}"
            )));
        }
        if !(r_max > T::zero()) || !r_max.is_finite() {
            return Err(DomainError::BadGrid(format!("r_max = {r_max} not positive")));
        }
        let h = r_max / T::of(n_points as f64);
        let fourpi = T::of(4.0) * T::PI();
        let r: Vec<T> = (1..=n_points).map(|i| h * T::of(i as f64)).collect();
        let w: Vec<T> = r.iter().map(|&ri| fourpi * ri * ri * h).collect();
        Ok(Arc::new(Self { n: n_points, h, r, w }))
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> T {
        self.h
    }

    pub fn r_max(&self) -> T {
        self.h * T::of(self.n as f64)
    }

    /// Node positions r_i = i·h, i = 1..n.
    pub fn nodes(&self) -> &[T] {
        &self.r
    }

    /// 3-D volume quadrature weights 4πr_i²·h.
    pub fn quadrature_weights(&self) -> &[T] {
        &self.w
    }

    /// 4π·h, the prefactor of the u-representation L² pairing.
    pub fn pairing_factor(&self) -> T {
        T::of(4.0) * T::PI() * self.h
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && self.h == other.h
    }
}

/// Which norm to evaluate; weighted variants take the exponent l of ⟨r⟩^l.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind<T> {
    L2,
    H2,
    H2Weighted(T),
    W21,
    H2CapW21,
}

impl<T: Real> NormKind<T> {
    /// Weighted norms enter the decay hypotheses only for exponents > 2.
    pub fn is_hypothesis_grade(&self) -> bool {
        match self {
            NormKind::H2Weighted(l) => *l > T::of(2.0),
            _ => true,
        }
    }
}

/// Complex radial field stored as u(r) = r·ψ(r).
#[derive(Clone, Debug)]
pub struct Field<T> {
    grid: Arc<RadialGrid<T>>,
    u: Vec<Complex<T>>,
}

impl<T: Real> Field<T> {
    pub fn zero(grid: &Arc<RadialGrid<T>>) -> Self {
        Self {
            grid: grid.clone(),
            u: vec![Complex::new(T::zero(), T::zero()); grid.n],
        }
    }

    /// Sample ψ(r) at the nodes.
    pub fn from_radial_fn(grid: &Arc<RadialGrid<T>>, mut psi: impl FnMut(T) -> Complex<T>) -> Self {
        let u = grid.r.iter().map(|&r| psi(r) * r).collect();
        Self { grid: grid.clone(), u }
    }

    pub fn from_real_fn(grid: &Arc<RadialGrid<T>>, mut psi: impl FnMut(T) -> T) -> Self {
        Self::from_radial_fn(grid, |r| Complex::new(psi(r), T::zero()))
    }

    pub fn from_u(grid: &Arc<RadialGrid<T>>, u: Vec<Complex<T>>) -> Result<Self, DomainError> {
        if u.len() != grid.n {
            return Err(DomainError::GridMismatch);
        }
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DomainError::NonFinite("field values"));
        }
        Ok(Self { grid: grid.clone(), u })
    }

    pub fn from_real_u(grid: &Arc<RadialGrid<T>>, u: Vec<T>) -> Result<Self, DomainError> {
        Self::from_u(grid, u.into_iter().map(|x| Complex::new(x, T::zero())).collect())
    }

    /// Internal constructor for values produced by this crate's own numerics,
    /// where length and finiteness are already guaranteed.
    pub(crate) fn from_u_unchecked(grid: &Arc<RadialGrid<T>>, u: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(u.len(), grid.n);
        Self { grid: grid.clone(), u }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    /// u-representation values (u_i = r_i · ψ(r_i)).
    pub fn u(&self) -> &[Complex<T>] {
        &self.u
    }

    #[cfg(test)]
    pub(crate) fn u_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.u
    }

    /// Real parts of u, for fields known to be real-valued.
    pub fn u_re(&self) -> Vec<T> {
        self.u.iter().map(|z| z.re).collect()
    }

    /// ψ values at the nodes.
    pub fn psi(&self) -> Vec<Complex<T>> {
        self.u
            .iter()
            .zip(&self.grid.r)
            .map(|(z, &r)| *z / r)
            .collect()
    }

    /// |ψ_i|² at the nodes.
    pub fn abs2_psi(&self) -> Vec<T> {
        self.u
            .iter()
            .zip(&self.grid.r)
            .map(|(z, &r)| z.norm_sqr() / (r * r))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Discrete 3-D radial Laplacian: u″ with Dirichlet values beyond both ends.
    pub fn laplacian3(&self) -> Self {
        let n = self.grid.n;
        let inv_h2 = (T::one() / self.grid.h) * (T::one() / self.grid.h);
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; n];
        for i in 0..n {
            let left = if i == 0 { zero } else { self.u[i - 1] };
            let right = if i + 1 == n { zero } else { self.u[i + 1] };
            out[i] = (left - self.u[i] - self.u[i] + right) * inv_h2;
        }
        Self { grid: self.grid.clone(), u: out }
    }

    /// Pointwise multiplication by ⟨r⟩^exponent, ⟨r⟩ = √(1+r²).
    pub fn weight_apply(&self, exponent: T) -> Self {
        let half = T::of(0.5);
        let u = self
            .u
            .iter()
            .zip(&self.grid.r)
            .map(|(z, &r)| {
                let w = (T::one() + r * r).powf(half * exponent);
                Complex::new(z.re * w, z.im * w)
            })
            .collect();
        Self { grid: self.grid.clone(), u }
    }

    fn l2(&self) -> T {
        let s = self
            .u
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        (self.grid.pairing_factor() * s).sqrt()
    }

    fn l1(&self) -> T {
        let s = self
            .u
            .iter()
            .zip(&self.grid.r)
            .fold(T::zero(), |acc, (z, &r)| acc + r * z.norm());
        self.grid.pairing_factor() * s
    }

    /// Evaluate a norm. H² := ‖ψ‖₂+‖Δψ‖₂, H^{2,l} := ‖⟨r⟩^lψ‖₂+‖⟨r⟩^lΔψ‖₂,
    /// W^{2,1} := ‖ψ‖₁+‖Δψ‖₁, and H²∩W^{2,1} is the sum of the last two.
    pub fn norm(&self, kind: NormKind<T>) -> Result<T, DomainError> {
        if !self.is_finite() {
            return Err(DomainError::NonFinite("norm input"));
        }
        Ok(match kind {
            NormKind::L2 => self.l2(),
            NormKind::H2 => self.l2() + self.laplacian3().l2(),
            NormKind::H2Weighted(l) => {
                self.weight_apply(l).l2() + self.laplacian3().weight_apply(l).l2()
            }
            NormKind::W21 => self.l1() + self.laplacian3().l1(),
            NormKind::H2CapW21 => {
                let lap = self.laplacian3();
                self.l2() + lap.l2() + self.l1() + lap.l1()
            }
        })
    }

    /// L²(ℝ³) pairing, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>, DomainError> {
        if !self.grid.same_grid(&other.grid) {
            return Err(DomainError::GridMismatch);
        }
        let zero = Complex::new(T::zero(), T::zero());
        let s = self
            .u
            .iter()
            .zip(&other.u)
            .fold(zero, |acc, (a, b)| acc + a.conj() * *b);
        Ok(s * Complex::new(self.grid.pairing_factor(), T::zero()))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(self.grid.same_grid(&other.grid));
        let u = self.u.iter().zip(&other.u).map(|(a, b)| *a + *b).collect();
        Self { grid: self.grid.clone(), u }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert!(self.grid.same_grid(&other.grid));
        let u = self.u.iter().zip(&other.u).map(|(a, b)| *a - *b).collect();
        Self { grid: self.grid.clone(), u }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let u = self.u.iter().map(|a| *a * c).collect();
        Self { grid: self.grid.clone(), u }
    }

    pub fn scale_re(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    /// self + c·other.
    pub fn axpy(&self, c: T, other: &Self) -> Self {
        debug_assert!(self.grid.same_grid(&other.grid));
        let cc = Complex::new(c, T::zero());
        let u = self
            .u
            .iter()
            .zip(&other.u)
            .map(|(a, b)| *a + *b * cc)
            .collect();
        Self { grid: self.grid.clone(), u }
    }

    pub fn conj(&self) -> Self {
        let u = self.u.iter().map(|a| a.conj()).collect();
        Self { grid: self.grid.clone(), u }
    }

    /// Pointwise product of the ψ-values: u_{fg} = u_f·u_g/r.
    pub fn pointwise_mul(&self, other: &Self) -> Self {
        debug_assert!(self.grid.same_grid(&other.grid));
        let u = self
            .u
            .iter()
            .zip(&other.u)
            .zip(&self.grid.r)
            .map(|((a, b), &r)| *a * *b / r)
            .collect();
        Self { grid: self.grid.clone(), u }
    }

    /// Real part as a field (imaginary part dropped).
    pub fn re_part(&self) -> Self {
        let u = self.u.iter().map(|z| Complex::new(z.re, T::zero())).collect();
        Self { grid: self.grid.clone(), u }
    }

    /// Imaginary part as a real-valued field.
    pub fn im_part(&self) -> Self {
        let u = self.u.iter().map(|z| Complex::new(z.im, T::zero())).collect();
        Self { grid: self.grid.clone(), u }
    }
}

/// Real/imaginary stacking (φ₁, φ₂) of a complex field, the vector convention
/// of the linearized problem. Components are real-valued fields.
#[derive(Clone, Debug)]
pub struct PairField<T> {
    pub re: Field<T>,
    pub im: Field<T>,
}

impl<T: Real> PairField<T> {
    pub fn new(re: Field<T>, im: Field<T>) -> Result<Self, DomainError> {
        if !re.grid.same_grid(&im.grid) {
            return Err(DomainError::GridMismatch);
        }
        Ok(Self { re, im })
    }

    pub fn zero(grid: &Arc<RadialGrid<T>>) -> Self {
        Self { re: Field::zero(grid), im: Field::zero(grid) }
    }

    /// Split a complex field into its (Re, Im) stack.
    pub fn from_complex(f: &Field<T>) -> Self {
        Self { re: f.re_part(), im: f.im_part() }
    }

    /// Reassemble the complex field φ₁ + iφ₂.
    pub fn to_complex(&self) -> Field<T> {
        let u = self
            .re
            .u
            .iter()
            .zip(&self.im.u)
            .map(|(a, b)| Complex::new(a.re, b.re))
            .collect();
        Field { grid: self.re.grid.clone(), u }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.re.grid
    }

    /// The symplectic rotation J(φ₁, φ₂) = (−φ₂, φ₁).
    pub fn j_apply(&self) -> Self {
        Self {
            re: self.im.scale_re(-T::one()),
            im: self.re.clone(),
        }
    }

    /// Root-sum-square of component norms for the L²/H² family, sum for the
    /// L¹ family, and the corresponding mix for H²∩W^{2,1}.
    pub fn norm(&self, kind: NormKind<T>) -> Result<T, DomainError> {
        let rss = |a: T, b: T| (a * a + b * b).sqrt();
        Ok(match kind {
            NormKind::L2 | NormKind::H2 | NormKind::H2Weighted(_) => {
                rss(self.re.norm(kind)?, self.im.norm(kind)?)
            }
            NormKind::W21 => self.re.norm(kind)? + self.im.norm(kind)?,
            NormKind::H2CapW21 => {
                rss(self.re.norm(NormKind::H2)?, self.im.norm(NormKind::H2)?)
                    + self.re.norm(NormKind::W21)?
                    + self.im.norm(NormKind::W21)?
            }
        })
    }

    /// Real pairing ⟨v, w⟩ = ⟨v₁,w₁⟩ + ⟨v₂,w₂⟩.
    pub fn inner_real(&self, other: &Self) -> Result<T, DomainError> {
        Ok(self.re.inner(&other.re)?.re + self.im.inner(&other.im)?.re)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { re: self.re.sub(&other.re), im: self.im.sub(&other.im) }
    }

    pub fn scale_re(&self, c: T) -> Self {
        Self { re: self.re.scale_re(c), im: self.im.scale_re(c) }
    }

    pub fn axpy(&self, c: T, other: &Self) -> Self {
        Self { re: self.re.axpy(c, &other.re), im: self.im.axpy(c, &other.im) }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Real inner product ⟨f, g⟩ for real-valued fields (imaginary parts ignored).
pub fn inner_re<T: Real>(f: &Field<T>, g: &Field<T>) -> T {
    debug_assert!(f.grid.same_grid(&g.grid));
    let s = f
        .u
        .iter()
        .zip(&g.u)
        .fold(T::zero(), |acc, (a, b)| acc + a.re * b.re);
    f.grid.pairing_factor() * s
}
