//! Quotients of a quadric in `K^{m+1}` by right multiplication with the unit
//! elements of a subalgebra `S ⊂ K`.
//!
//! Real coordinates are component-major: `(z_0^1, …, z_m^1, …, z_0^d, …, z_m^d)`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{inner_raw, AlgebraTag};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::scalar::{Real, Sign};
use crate::spaces::{trig_pair, PseudoHyperbolicSpace};

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientModel {
    pub algebra: AlgebraTag,
    pub group: AlgebraTag,
    pub m: usize,
    pub t: usize,
}

impl QuotientModel {
    pub fn new(algebra: AlgebraTag, group: AlgebraTag, m: usize, t: usize) -> Result<Self> {
        use AlgebraTag::*;
        let ok = matches!(
            (algebra, group),
            (C, C) | (H, H) | (A, A) | (B, B) | (H, C) | (B, C) | (B, A)
        );
        if !ok {
            return Err(Error::InvalidParameters(format!(
                "no quotient of {} by units of {}",
                algebra.name(),
                group.name()
            )));
        }
        if m == 0 {
            return Err(Error::InvalidParameters("m must be positive".into()));
        }
        let t = if algebra.is_division() { t } else { m };
        if t > m {
            return Err(Error::InvalidParameters(format!("t = {t} exceeds m = {m}")));
        }
        Ok(QuotientModel { algebra, group, m, t })
    }

    pub fn d(&self) -> usize {
        self.algebra.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.d() * (self.m + 1)
    }

    fn slot(&self, i: usize, k: usize) -> usize {
        k * (self.m + 1) + i
    }

    /// Positions of the basis of `S` inside `K`.
    pub fn group_indices(&self) -> Vec<usize> {
        use AlgebraTag::*;
        match (self.algebra, self.group) {
            (B, A) => vec![0, 2],
            (_, C) => vec![0, 1],
            _ => (0..self.d()).collect(),
        }
    }

    /// Element `b` with `K = S ⊕ b S`, when `S ≠ K`.
    fn module_generator(&self) -> Option<usize> {
        use AlgebraTag::*;
        match (self.algebra, self.group) {
            (H, C) | (B, C) => Some(2),
            (B, A) => Some(1),
            _ => None,
        }
    }

    pub fn fibre_dim(&self) -> usize {
        self.group.dim() - 1
    }

    pub fn signs(&self) -> Vec<Sign> {
        let nd = self.algebra.norm_diagonal();
        let mut out = vec![Sign::Plus; self.ambient_dim()];
        for k in 0..self.d() {
            for i in 0..=self.m {
                out[self.slot(i, k)] = if self.algebra.is_division() {
                    if i <= self.t {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                } else {
                    -nd[k]
                };
            }
        }
        out
    }

    pub fn space<T: Real>(&self) -> PseudoHyperbolicSpace<T> {
        PseudoHyperbolicSpace::with_metric(&self.signs(), -T::one()).expect("valid quotient total")
    }

    pub fn component<T: Real>(&self, z: &DVector<T>, i: usize) -> Vec<T> {
        (0..self.d()).map(|k| z[self.slot(i, k)]).collect()
    }

    fn assemble<T: Real>(&self, comps: &[Vec<T>]) -> DVector<T> {
        let mut out = DVector::zeros(self.ambient_dim());
        for (i, c) in comps.iter().enumerate() {
            for k in 0..self.d() {
                out[self.slot(i, k)] = c[k];
            }
        }
        out
    }

    /// `z ↦ z·a` with `a` given by its coefficients in `K`.
    pub fn right_mul<T: Real>(&self, z: &DVector<T>, a: &[T]) -> DVector<T> {
        let table = self.algebra.table();
        let comps: Vec<Vec<T>> = (0..=self.m)
            .map(|i| table.apply(&self.component(z, i), a))
            .collect();
        self.assemble(&comps)
    }

    /// Coefficients in `K` of the `j`-th basis element of `S`.
    pub fn group_basis<T: Real>(&self, j: usize) -> Vec<T> {
        let mut a = vec![T::zero(); self.d()];
        a[self.group_indices()[j]] = T::one();
        a
    }

    pub fn embed_group<T: Real>(&self, s: &[T]) -> Vec<T> {
        let mut a = vec![T::zero(); self.d()];
        for (j, &idx) in self.group_indices().iter().enumerate() {
            a[idx] = s[j];
        }
        a
    }

    /// `N(a)` for the imaginary unit `a` of `S` at position `j ≥ 1`.
    pub fn group_norm_sign(&self, j: usize) -> Sign {
        self.algebra.norm_diagonal()[self.group_indices()[j]]
    }

    /// `{z·a}` for the imaginary basis of `S`.
    pub fn vertical_spanning<T: Real>(&self, z: &DVector<T>) -> Vec<DVector<T>> {
        (1..self.group.dim())
            .map(|j| self.right_mul(z, &self.group_basis::<T>(j)))
            .collect()
    }

    /// `{z·b}` for the imaginary basis of `K`.
    pub fn full_vertical_spanning<T: Real>(&self, z: &DVector<T>) -> Vec<DVector<T>> {
        (1..self.d())
            .map(|k| {
                let mut a = vec![T::zero(); self.d()];
                a[k] = T::one();
                self.right_mul(z, &a)
            })
            .collect()
    }

    /// Coordinates of `z` as a right `S`-module: each `z_i = s_0 + b s_1`.
    /// Returned in `S` coefficients.
    pub fn s_coordinates<T: Real>(&self, z: &DVector<T>) -> Vec<Vec<T>> {
        let gi = self.group_indices();
        let mut out = Vec::new();
        for i in 0..=self.m {
            let zi = self.component(z, i);
            match self.module_generator() {
                None => out.push(zi),
                Some(b) => {
                    let table = self.algebra.table();
                    let s0: Vec<T> = gi.iter().map(|&g| zi[g]).collect();
                    // b·e_g = σ e_l is a signed permutation, inverted by reading back
                    let s1: Vec<T> = gi
                        .iter()
                        .map(|&g| {
                            let (l, s) = table.basis_product(b, g);
                            s.apply(zi[l])
                        })
                        .collect();
                    out.push(s0);
                    out.push(s1);
                }
            }
        }
        out
    }

    /// Polar form of `Φ(z) = w w*`, `w` the `S`-coordinates of `z`
    /// (upper triangle, flattened in `S` coefficients).
    pub fn bilinear<T: Real>(&self, z: &DVector<T>, y: &DVector<T>) -> DVector<T> {
        let wz = self.s_coordinates(z);
        let wy = self.s_coordinates(y);
        let table = self.group.table();
        let ds = self.group.dim();
        let n = wz.len();
        let mut out = Vec::with_capacity(n * (n + 1) / 2 * ds);
        for a in 0..n {
            for b in a..n {
                let conj: Vec<T> = wy[b]
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| if k == 0 { v } else { -v })
                    .collect();
                out.extend(table.apply(&wz[a], &conj));
            }
        }
        DVector::from_vec(out)
    }

    pub fn eval<T: Real>(&self, z: &DVector<T>) -> DVector<T> {
        self.bilinear(z, z)
    }

    /// Solves `q = p·u` over `u ∈ S`; returns `(u in K coefficients, residual)`.
    pub fn orbit_solve<T: Real>(&self, p: &DVector<T>, q: &DVector<T>) -> (Vec<T>, T) {
        let ds = self.group.dim();
        let mut a = DMatrix::zeros(self.ambient_dim(), ds);
        for j in 0..ds {
            a.set_column(j, &self.right_mul(p, &self.group_basis::<T>(j)));
        }
        let (x, r) = least_squares(&a, q);
        (self.embed_group(x.as_slice()), r)
    }

    /// Residual of fibre membership: linear solve plus the unit condition.
    pub fn orbit_residual<T: Real>(&self, p: &DVector<T>, q: &DVector<T>) -> T {
        let (u, r) = self.orbit_solve(p, q);
        let n = inner_raw(self.algebra, &u, &u);
        r + (n - T::one()).abs()
    }

    /// `p·exp(s a)` for an imaginary unit `a ∈ S` (index `j ≥ 1`).
    pub fn fibre_point<T: Real>(&self, p: &DVector<T>, j: usize, s: T) -> DVector<T> {
        let kappa = -self.group_norm_sign(j).value::<T>();
        let (c, sn) = trig_pair(kappa, s);
        let mut u = self.group_basis::<T>(j);
        for v in u.iter_mut() {
            *v *= sn;
        }
        u[0] += c;
        self.right_mul(p, &u)
    }
}
