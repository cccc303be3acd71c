//! Symmetric tridiagonal linear algebra: the u-representation turns every
//! operator in this crate into `SymTridiag` plus diagonal terms, so one careful
//! module covers factorizations, spectra, and the bordered (constrained) solves.

use crate::scalar::Real;
use num_complex::Complex;
use std::ops::{Add, Div, Mul, Sub};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TridiagError {
    #[error("matrix is numerically singular at elimination step {0}")]
    Singular(usize),
    #[error("eigensolver failed to converge (index {0})")]
    NoConvergence(usize),
    #[error("dimension mismatch")]
    Dimension,
}

/// Scalar element usable by the pivoted LU (real or complex).
pub(crate) trait Elem<T>:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn zero() -> Self;
    fn mag2(&self) -> T;
}

impl<T: Real> Elem<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn mag2(&self) -> T {
        *self * *self
    }
}

impl<T: Real> Elem<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn mag2(&self) -> T {
        self.norm_sqr()
    }
}

/// Symmetric tridiagonal matrix: `diag` of length n, `off` of length n−1.
#[derive(Clone, Debug)]
pub struct SymTridiag<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> SymTridiag<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.n();
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    pub fn apply_complex(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n();
        let mut y = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let mut v = x[i] * self.diag[i];
            if i > 0 {
                v += x[i - 1] * self.off[i - 1];
            }
            if i + 1 < n {
                v += x[i + 1] * self.off[i];
            }
            y[i] = v;
        }
        y
    }

    /// Add `w` to the diagonal, returning a new matrix.
    pub fn with_added_diagonal(&self, w: &[T]) -> Self {
        assert_eq!(w.len(), self.n());
        let diag = self.diag.iter().zip(w).map(|(&d, &v)| d + v).collect();
        Self { diag, off: self.off.clone() }
    }

    pub fn shifted(&self, mu: T) -> Self {
        let diag = self.diag.iter().map(|&d| d - mu).collect();
        Self { diag, off: self.off.clone() }
    }

    fn gershgorin(&self) -> (T, T) {
        let n = self.n();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut radius = T::zero();
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    fn pivmin(&self) -> T {
        let emax = self
            .off
            .iter()
            .fold(T::zero(), |acc, e| acc.max(e.abs()));
        let base = (emax * T::epsilon()).max(T::min_positive_value());
        base * base
    }

    /// Number of eigenvalues strictly below `lambda` (Sturm sequence count).
    pub fn count_below(&self, lambda: T) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0usize;
        let mut q = self.diag[0] - lambda;
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q < T::zero() {
            count += 1;
        }
        for i in 1..self.n() {
            let e2 = self.off[i - 1] * self.off[i - 1];
            q = self.diag[i] - lambda - e2 / q;
            if q.abs() <= pivmin {
                q = -pivmin;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// k-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> T {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(T::one());
        let tol = T::epsilon() * T::of(4.0) * scale;
        while hi - lo > tol {
            let mid = (lo + hi) * T::of(0.5);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) * T::of(0.5)
    }

    /// Eigenvalue and eigenvector for index k, via bisection plus inverse
    /// iteration. The vector is returned with unit Euclidean norm.
    pub fn eigenpair(&self, k: usize) -> Result<(T, Vec<T>), TridiagError> {
        let n = self.n();
        let lambda = self.eigenvalue(k);
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(T::zero(), |a, x| a.max(x.abs()));
        // detune slightly so the shifted matrix is invertible
        let shift = lambda + scale * T::epsilon() * T::of(32.0);
        let lu = PivLu::factor_perturbed(&self.shifted(shift), scale);
        let mut v: Vec<T> = (0..n)
            .map(|i| {
                // deterministic quasi-random start
                let x = (T::of(i as f64) * T::of(0.7548776662466927)).fract() - T::of(0.5);
                x + T::of(0.25)
            })
            .collect();
        normalize(&mut v);
        let mut last_res = T::infinity();
        for _ in 0..10 {
            let mut w = lu.solve(&v);
            normalize(&mut w);
            let aw = self.apply(&w);
            let res: T = aw
                .iter()
                .zip(&w)
                .map(|(&a, &x)| (a - lambda * x) * (a - lambda * x))
                .fold(T::zero(), |s, t| s + t)
                .sqrt();
            v = w;
            if res < scale * T::epsilon() * T::of(64.0) || res >= last_res * T::of(0.9) {
                last_res = res;
                break;
            }
            last_res = res;
        }
        if !last_res.is_finite() {
            return Err(TridiagError::NoConvergence(k));
        }
        Ok((lambda, v))
    }

    /// Full eigendecomposition by implicit QL with Wilkinson shifts.
    /// Eigenvalues ascending; eigenvector j occupies `vectors[j*n..(j+1)*n]`.
    pub fn eigen_full(&self) -> Result<FullEigen<T>, TridiagError> {
        let n = self.n();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(T::zero());
        // column-major identity; rotations mix adjacent columns
        let mut z = vec![T::zero(); n * n];
        for j in 0..n {
            z[j * n + j] = T::one();
        }
        for l in 0..n {
            let mut iter = 0usize;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= T::epsilon() * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 60 {
                    return Err(TridiagError::NoConvergence(l));
                }
                let mut g = (d[l + 1] - d[l]) / (e[l] * T::of(2.0));
                let mut r = g.hypot(T::one());
                let sign_r = if g >= T::zero() { r.abs() } else { -r.abs() };
                g = d[m] - d[l] + e[l] / (g + sign_r);
                let (mut s, mut c) = (T::one(), T::one());
                let mut p = T::zero();
                let mut early = false;
                for i in (l..m).rev() {
                    let mut f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == T::zero() {
                        d[i + 1] -= p;
                        e[m] = T::zero();
                        early = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + c * b * T::of(2.0);
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    // rotate eigenvector columns i, i+1
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let col_i = &mut lo[i * n..(i + 1) * n];
                    let col_j = &mut hi[..n];
                    for k in 0..n {
                        f = col_j[k];
                        col_j[k] = s * col_i[k] + c * f;
                        col_i[k] = c * col_i[k] - s * f;
                    }
                }
                if early {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = T::zero();
            }
        }
        // ascending order
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
        let values: Vec<T> = idx.iter().map(|&j| d[j]).collect();
        let mut vectors = vec![T::zero(); n * n];
        for (jnew, &jold) in idx.iter().enumerate() {
            vectors[jnew * n..(jnew + 1) * n].copy_from_slice(&z[jold * n..(jold + 1) * n]);
        }
        Ok(FullEigen { n, values, vectors })
    }
}

fn normalize<T: Real>(v: &mut [T]) {
    let n2 = v.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    if n2 > T::zero() {
        for x in v.iter_mut() {
            *x /= n2;
        }
    }
}

/// Dense eigendecomposition of a symmetric tridiagonal matrix.
pub struct FullEigen<T> {
    pub n: usize,
    pub values: Vec<T>,
    vectors: Vec<T>,
}

impl<T: Real> FullEigen<T> {
    pub fn vector(&self, j: usize) -> &[T] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }

    /// Coefficients ⟨q_j, x⟩ in the eigenbasis (plain Euclidean pairing).
    pub fn analyze(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|j| {
                let q = self.vector(j);
                x.iter()
                    .zip(q)
                    .fold(Complex::new(T::zero(), T::zero()), |s, (&xi, &qi)| {
                        s + xi * qi
                    })
            })
            .collect()
    }

    pub fn synthesize(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.n];
        for (j, &cj) in coeffs.iter().enumerate() {
            let q = self.vector(j);
            for i in 0..self.n {
                out[i] += cj * q[i];
            }
        }
        out
    }
}

/// Tridiagonal LU with partial pivoting (LAPACK gttrf layout), generic over
/// real and complex elements.
pub(crate) struct PivLu<E, T> {
    n: usize,
    dl: Vec<E>,
    d: Vec<E>,
    du: Vec<E>,
    du2: Vec<E>,
    swapped: Vec<bool>,
    _t: std::marker::PhantomData<T>,
}

impl<T: Real, E: Elem<T>> PivLu<E, T> {
    pub fn factor(diag: &[E], off: &[E]) -> Result<Self, TridiagError> {
        let n = diag.len();
        assert_eq!(off.len() + 1, n);
        let mut d = diag.to_vec();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![E::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].mag2() >= dl[i].mag2() {
                if d[i].mag2() == T::zero() {
                    return Err(TridiagError::Singular(i));
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] = d[i + 1] - fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = E::zero() - fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].mag2() == T::zero() {
            return Err(TridiagError::Singular(n - 1));
        }
        Ok(Self { n, dl, d, du, du2, swapped, _t: std::marker::PhantomData })
    }

    pub fn solve(&self, rhs: &[E]) -> Vec<E> {
        let n = self.n;
        let mut x = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            let xi = x[i];
            x[i + 1] = x[i + 1] - self.dl[i] * xi;
        }
        x[n - 1] = x[n - 1] / self.d[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            let mut v = x[i] - self.du[i] * x[i + 1];
            v = v - self.du2[i] * x[i + 2];
            x[i] = v / self.d[i];
        }
        x
    }
}

impl<T: Real> PivLu<T, T> {
    /// Factor, nudging exact zero pivots by a relative perturbation (used for
    /// inverse iteration at a computed eigenvalue).
    fn factor_perturbed(a: &SymTridiag<T>, scale: T) -> Self {
        let eps = scale.max(T::one()) * T::epsilon() * T::of(16.0);
        let mut diag = a.diag.clone();
        loop {
            match Self::factor(&diag, &a.off) {
                Ok(lu) => return lu,
                Err(TridiagError::Singular(_)) => {
                    for d in diag.iter_mut() {
                        *d += eps;
                    }
                }
                Err(_) => unreachable!(),
            }
        }
    }
}

/// Solve a real symmetric tridiagonal system with partial pivoting.
pub fn solve_tridiag<T: Real>(a: &SymTridiag<T>, rhs: &[T]) -> Result<Vec<T>, TridiagError> {
    Ok(PivLu::<T, T>::factor(&a.diag, &a.off)?.solve(rhs))
}

/// Solve (diag, off) with complex entries (symmetric pattern, not Hermitian).
pub fn solve_complex_tridiag<T: Real>(
    diag: &[Complex<T>],
    off: &[Complex<T>],
    rhs: &[Complex<T>],
) -> Result<Vec<Complex<T>>, TridiagError> {
    Ok(PivLu::<Complex<T>, T>::factor(diag, off)?.solve(rhs))
}

/// Factorization of the symmetric arrowhead system
///
///   [ A  c ] [x]   [rhs₀..rhs_{n−1}]
///   [ cᵀ 0 ] [λ] = [rhs_n]
///
/// with A symmetric tridiagonal. Partial pivoting acts between adjacent band
/// rows; the border row is eliminated last through a fully pivoted 2×2 block,
/// which is where a simple kernel of A safely lands.
pub struct BorderedTridiag<T> {
    n: usize,
    du0: Vec<T>,
    du1: Vec<T>,
    du2: Vec<T>,
    bc: Vec<T>,
    m1: Vec<T>,
    mb: Vec<T>,
    swapped: Vec<bool>,
    fin: [T; 4],
    norm_inf: T,
}

impl<T: Real> BorderedTridiag<T> {
    pub fn factor(a: &SymTridiag<T>, border: &[T]) -> Result<Self, TridiagError> {
        let n = a.n();
        if border.len() != n {
            return Err(TridiagError::Dimension);
        }
        if n < 3 {
            return Err(TridiagError::Dimension);
        }
        let norm_inf = {
            let mut m = border.iter().fold(T::zero(), |s, b| s + b.abs());
            for i in 0..n {
                let mut row = a.diag[i].abs() + border[i].abs();
                if i > 0 {
                    row += a.off[i - 1].abs();
                }
                if i + 1 < n {
                    row += a.off[i].abs();
                }
                m = m.max(row);
            }
            m
        };

        // working rows: band part (du0 diag, du1 super, du2 second super), border column bc
        let mut du0 = a.diag.clone();
        let mut du1 = a.off.clone();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut bc = border.to_vec();
        let mut sub: Vec<T> = a.off.clone();
        let mut br = border.to_vec();
        let mut corner = T::zero();
        let mut m1 = vec![T::zero(); n - 1];
        let mut mb = vec![T::zero(); n - 1];
        let mut swapped = vec![false; n - 1];

        for i in 0..n - 1 {
            if sub[i].abs() > du0[i].abs() {
                swapped[i] = true;
                std::mem::swap(&mut du0[i], &mut sub[i]);
                // row i+1's diagonal swaps with row i's superdiagonal entry
                std::mem::swap(&mut du1[i], &mut du0[i + 1]);
                if i + 1 < n - 1 {
                    // row i+1 has a superdiagonal entry at column i+2
                    std::mem::swap(&mut du2[i], &mut du1[i + 1]);
                }
                bc.swap(i, i + 1);
            }
            if du0[i] == T::zero() {
                return Err(TridiagError::Singular(i));
            }
            let f = sub[i] / du0[i];
            m1[i] = f;
            du0[i + 1] -= f * du1[i];
            if i + 1 < n - 1 {
                du1[i + 1] -= f * du2[i];
            }
            let bci = bc[i];
            bc[i + 1] -= f * bci;

            let g = br[i] / du0[i];
            mb[i] = g;
            br[i + 1] -= g * du1[i];
            if i + 2 < n {
                br[i + 2] -= g * du2[i];
            }
            corner -= g * bc[i];
        }
        let fin = [du0[n - 1], bc[n - 1], br[n - 1], corner];
        let det = fin[0] * fin[3] - fin[1] * fin[2];
        let fin_scale = fin.iter().fold(T::zero(), |s, x| s.max(x.abs()));
        if det.abs() <= fin_scale * fin_scale * T::epsilon() * T::of(8.0)
            || fin_scale == T::zero()
        {
            return Err(TridiagError::Singular(n - 1));
        }
        Ok(Self { n, du0, du1, du2, bc, m1, mb, swapped, fin, norm_inf })
    }

    /// Solve for (x, λ) given the padded right-hand side [rhs_band…, rhs_border].
    pub fn solve(&self, rhs_band: &[T], rhs_border: T) -> (Vec<T>, T) {
        let n = self.n;
        let mut y = rhs_band.to_vec();
        let mut yb = rhs_border;
        for i in 0..n - 1 {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            let yi = y[i];
            y[i + 1] -= self.m1[i] * yi;
            yb -= self.mb[i] * yi;
        }
        let [a, b, c, d] = self.fin;
        let det = a * d - b * c;
        let lam = (a * yb - c * y[n - 1]) / det;
        let mut x = vec![T::zero(); n];
        x[n - 1] = (d * y[n - 1] - b * yb) / det;
        for i in (0..n - 1).rev() {
            let mut v = y[i] - self.du1[i] * x[i + 1] - self.bc[i] * lam;
            if i + 2 < n {
                v -= self.du2[i] * x[i + 2];
            }
            x[i] = v / self.du0[i];
        }
        (x, lam)
    }

    /// Rough ∞-norm condition estimate from a handful of probe solves.
    pub fn cond_estimate(&self) -> T {
        let n = self.n;
        let mut inv_norm = T::zero();
        for probe in 0..3u64 {
            let e: Vec<T> = (0..n)
                .map(|i| {
                    let bit = (i as u64)
                        .wrapping_mul(0x9e3779b97f4a7c15)
                        .wrapping_add(probe.wrapping_mul(0x853c49e6748fea9b))
                        >> 61;
                    if bit & 1 == 0 {
                        T::one()
                    } else {
                        -T::one()
                    }
                })
                .collect();
            let (x, lam) = self.solve(&e, if probe == 2 { T::one() } else { T::zero() });
            let xmax = x
                .iter()
                .fold(lam.abs(), |s, v| s.max(v.abs()));
            inv_norm = inv_norm.max(xmax);
        }
        self.norm_inf * inv_norm
    }
}
