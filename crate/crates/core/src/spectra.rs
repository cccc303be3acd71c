//! Linear Schrödinger operators −Δ + V on the radial grid: bound states with
//! spectral gaps, Birman–Schwinger resonance margins, projections onto and off
//! the discrete state, and unitary propagation by two independent routes.

use crate::grid::{DomainError, Field, RadialGrid};
use crate::scalar::Real;
use crate::tridiag::{solve_tridiag, PivLu, SymTridiag, TridiagError};
use num_complex::Complex;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("no bound state: {negatives} negative eigenvalues")]
    NoBoundState { negatives: usize },
    #[error("expected a unique bound state, found {negatives} negative eigenvalues")]
    ExtraBoundStates { negatives: usize },
    #[error("spectral gap {gap:e} below required floor {floor:e}")]
    GapBelowFloor { gap: f64, floor: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Numerical(#[from] TridiagError),
}

/// Lowest eigenstate of −Δ + V, L²-normalized, with its distance to the rest
/// of the spectrum.
pub struct BoundState<T: Real> {
    pub energy: T,
    pub gap: T,
    pub field: Field<T>,
}

/// H = −Δ + ℓ(ℓ+1)/r² + V acting on u = r·ψ with Dirichlet walls.
pub struct SchrodingerOperator<T: Real> {
    grid: Arc<RadialGrid<T>>,
    v: Vec<T>,
    ell: u32,
    mat: SymTridiag<T>,
}

impl<T: Real> SchrodingerOperator<T> {
    pub fn new(grid: &Arc<RadialGrid<T>>, v: Vec<T>) -> Result<Self, DomainError> {
        Self::with_angular(grid, v, 0)
    }

    pub fn with_angular(
        grid: &Arc<RadialGrid<T>>,
        v: Vec<T>,
        ell: u32,
    ) -> Result<Self, DomainError> {
        if v.len() != grid.n_points() {
            return Err(DomainError::GridMismatch);
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(DomainError::NonFinite("potential"));
        }
        let mat = assemble(grid, &v, ell);
        Ok(Self { grid: Arc::clone(grid), v, ell, mat })
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn potential(&self) -> &[T] {
        &self.v
    }

    pub fn matrix(&self) -> &SymTridiag<T> {
        &self.mat
    }

    /// Hφ as a field (complex apply in the u-representation).
    pub fn apply(&self, phi: &Field<T>) -> Field<T> {
        let u = self.mat.apply_complex(phi.u());
        Field::from_u_unchecked(phi.grid(), u)
    }

    /// Number of eigenvalues strictly below zero.
    pub fn negative_count(&self) -> usize {
        self.mat.count_below(T::zero())
    }

    pub fn eigenvalue(&self, k: usize) -> T {
        self.mat.eigenvalue(k)
    }

    /// The unique bound state, normalized to unit L² mass and positive sign.
    /// Errors if the negative spectrum is empty or not a single point.
    pub fn bound_state(&self) -> Result<BoundState<T>, SpectraError> {
        let negatives = self.negative_count();
        if negatives == 0 {
            return Err(SpectraError::NoBoundState { negatives });
        }
        if negatives > 1 {
            return Err(SpectraError::ExtraBoundStates { negatives });
        }
        let (energy, mut q) = self.mat.eigenpair(0)?;
        let lam1 = self.mat.eigenvalue(1);
        let gap = lam1.min(T::zero()) - energy;
        let total: T = q.iter().fold(T::zero(), |s, &x| s + x);
        if total < T::zero() {
            for x in q.iter_mut() {
                *x = -*x;
            }
        }
        let mut field = Field::from_real_u(&self.grid, q)?;
        let mass = field.norm(crate::grid::NormKind::L2)?;
        field = field.scale_re(T::one() / mass);
        Ok(BoundState { energy, gap, field })
    }

    /// Component of φ along the bound state (spectral projection P_d φ).
    pub fn project_discrete(&self, bs: &BoundState<T>, phi: &Field<T>) -> Field<T> {
        let c = bs.field.inner(phi).expect("bound state shares the field's grid");
        bs.field.scale(c)
    }

    /// P_c φ = φ − P_d φ: the part coupled to the continuum.
    pub fn project_continuous(&self, bs: &BoundState<T>, phi: &Field<T>) -> Field<T> {
        phi.sub(&self.project_discrete(bs, phi))
    }

    /// Crank–Nicolson stepper for i∂_tφ = Hφ with a fixed step (factored once).
    pub fn cn_propagator(&self, dt: T) -> Result<CnPropagator<'_, T>, TridiagError> {
        CnPropagator::new(self, dt)
    }

    /// Evolve φ to each requested time (ascending, starting from t = 0),
    /// subdividing so every sample is hit exactly with steps ≤ dt_max.
    pub fn propagate_cn(
        &self,
        phi0: &Field<T>,
        times: &[T],
        dt_max: T,
    ) -> Result<Vec<Field<T>>, TridiagError> {
        let mut out = Vec::with_capacity(times.len());
        let mut phi = phi0.clone();
        let mut t = T::zero();
        for &target in times {
            let span = target - t;
            if span > T::zero() {
                let steps = (span / dt_max).ceil().to_usize().unwrap_or(1).max(1);
                let dt = span / T::of(steps as f64);
                let prop = self.cn_propagator(dt)?;
                for _ in 0..steps {
                    phi = prop.step(&phi);
                }
            }
            t = target;
            out.push(phi.clone());
        }
        Ok(out)
    }

    /// Evolve by synthesis in the full eigenbasis: exact up to the
    /// diagonalization, independent of any time stepper.
    pub fn propagate_eigen(&self, phi0: &Field<T>, t: T) -> Result<Field<T>, TridiagError> {
        let eig = self.mat.eigen_full()?;
        let mut coeffs = eig.analyze(phi0.u());
        for (c, &lam) in coeffs.iter_mut().zip(&eig.values) {
            let phase = -lam * t;
            *c *= Complex::new(phase.cos(), phase.sin());
        }
        Ok(Field::from_u_unchecked(phi0.grid(), eig.synthesize(&coeffs)))
    }

    /// Largest eigenvalues of the Birman–Schwinger kernel
    /// |V|^{1/2} (−Δ)⁻¹ |V|^{1/2}, whose crossings of 1 mark zero-energy
    /// resonances as the well deepens.
    pub fn birman_schwinger_top(&self, k: usize) -> Result<Vec<T>, TridiagError> {
        let n = self.grid.n_points();
        let free = assemble(&self.grid, &vec![T::zero(); n], self.ell);
        let sqrt_v: Vec<T> = self.v.iter().map(|x| x.abs().sqrt()).collect();
        let apply = |x: &[T]| -> Result<Vec<T>, TridiagError> {
            let y: Vec<T> = x.iter().zip(&sqrt_v).map(|(&a, &b)| a * b).collect();
            let z = solve_tridiag(&free, &y)?;
            Ok(z.iter().zip(&sqrt_v).map(|(&a, &b)| a * b).collect())
        };
        let m = (4 * k + 24).min(n);
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(m);
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut v: Vec<T> = (0..n)
            .map(|i| T::of(((i * 2654435761 + 12345) % 1000) as f64 / 500.0 - 1.0))
            .collect();
        norm_unit(&mut v);
        for j in 0..m {
            basis.push(v.clone());
            let mut w = apply(&v)?;
            let a = dot(&w, &v);
            alpha.push(a);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= a * *vi;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, pi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= b * *pi;
                }
            }
            // full reorthogonalization keeps the Ritz extremes trustworthy
            for p in &basis {
                let c = dot(&w, p);
                for (wi, pi) in w.iter_mut().zip(p) {
                    *wi -= c * *pi;
                }
            }
            let b = dot(&w, &w).sqrt();
            if b < T::epsilon() * T::of(100.0) || j + 1 == m {
                break;
            }
            beta.push(b);
            for wi in w.iter_mut() {
                *wi /= b;
            }
            v = w;
        }
        let small = SymTridiag::new(alpha, beta);
        let eig = small.eigen_full()?;
        let mut vals = eig.values;
        vals.reverse();
        vals.truncate(k);
        Ok(vals)
    }

    /// Distance from the Birman–Schwinger spectrum to the resonant value 1.
    pub fn resonance_margin(&self) -> Result<T, TridiagError> {
        let top = self.birman_schwinger_top(4)?;
        Ok(top
            .iter()
            .map(|&mu| (mu - T::one()).abs())
            .fold(T::infinity(), |a, b| a.min(b)))
    }

    /// ‖φ‖₂ + ‖Hφ‖₂, the graph norm the propagation leaves flat.
    pub fn graph_norm(&self, phi: &Field<T>) -> Result<T, DomainError> {
        let a = phi.norm(crate::grid::NormKind::L2)?;
        let b = self.apply(phi).norm(crate::grid::NormKind::L2)?;
        Ok(a + b)
    }
}

fn assemble<T: Real>(grid: &RadialGrid<T>, v: &[T], ell: u32) -> SymTridiag<T> {
    let n = grid.n_points();
    let h = grid.spacing();
    let inv_h2 = T::one() / (h * h);
    let l2 = T::of(ell as f64 * (ell as f64 + 1.0));
    let diag: Vec<T> = (0..n)
        .map(|i| {
            let r = grid.nodes()[i];
            T::of(2.0) * inv_h2 + v[i] + l2 / (r * r)
        })
        .collect();
    let off = vec![-inv_h2; n - 1];
    SymTridiag::new(diag, off)
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

fn norm_unit<T: Real>(v: &mut [T]) {
    let n = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// One Crank–Nicolson step: (I + i·dt/2·H)φ⁺ = (I − i·dt/2·H)φ.
/// Unitary in the discrete L², so mass is conserved to round-off.
pub struct CnPropagator<'a, T: Real> {
    op: &'a SchrodingerOperator<T>,
    half: T,
    lu: PivLu<Complex<T>, T>,
}

impl<'a, T: Real> CnPropagator<'a, T> {
    fn new(op: &'a SchrodingerOperator<T>, dt: T) -> Result<Self, TridiagError> {
        let half = dt * T::of(0.5);
        let diag: Vec<Complex<T>> = op
            .mat
            .diag
            .iter()
            .map(|&d| Complex::new(T::one(), half * d))
            .collect();
        let off: Vec<Complex<T>> = op
            .mat
            .off
            .iter()
            .map(|&e| Complex::new(T::zero(), half * e))
            .collect();
        let lu = PivLu::factor(&diag, &off)?;
        Ok(Self { op, half, lu })
    }

    pub fn step(&self, phi: &Field<T>) -> Field<T> {
        let h_phi = self.op.mat.apply_complex(phi.u());
        let rhs: Vec<Complex<T>> = phi
            .u()
            .iter()
            .zip(&h_phi)
            .map(|(&p, &hp)| p - Complex::new(T::zero(), self.half) * hp)
            .collect();
        Field::from_u_unchecked(phi.grid(), self.lu.solve(&rhs))
    }
}
