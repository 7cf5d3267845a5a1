//! The maps `φ₁(x,y) = ((|x|²−|y|²)/2, x̄y)` and `φ₂(x,y) = ((|x|²+|y|²)/2, x̄y)`
//! on `F × F ≅ ℝ^{2d}` with interleaved coordinates `(x¹,y¹,…,x^d,y^d)`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algebra::{inner_raw, AlgebraTag};
use crate::error::{Error, Result};
use crate::scalar::{Real, Sign};
use crate::spaces::PseudoHyperbolicSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Phi1,
    Phi2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HopfMap {
    pub algebra: AlgebraTag,
    pub variant: Variant,
}

impl HopfMap {
    pub fn new(algebra: AlgebraTag, variant: Variant) -> Result<Self> {
        if algebra == AlgebraTag::R {
            return Err(Error::InvalidParameters("the real line has no Hopf map".into()));
        }
        if !algebra.is_division() && variant == Variant::Phi2 {
            return Err(Error::InvalidParameters(format!(
                "{} uses the first map on its split domain",
                algebra.name()
            )));
        }
        Ok(HopfMap { algebra, variant })
    }

    pub fn d(&self) -> usize {
        self.algebra.dim()
    }

    /// Metric signs on the interleaved domain.
    pub fn domain_signs(&self) -> Vec<Sign> {
        let n = self.algebra.norm_diagonal();
        let mut out = Vec::with_capacity(2 * self.d());
        for nk in n {
            let (sx, sy) = match (self.algebra.is_division(), self.variant) {
                (true, Variant::Phi1) => (Sign::Minus, Sign::Minus),
                (true, Variant::Phi2) => (Sign::Minus, Sign::Plus),
                (false, _) => (-nk, -nk),
            };
            out.push(sx);
            out.push(sy);
        }
        out
    }

    /// Metric signs on the target `(t, w¹, …, w^d)`.
    pub fn target_signs(&self) -> Vec<Sign> {
        let mut out = vec![Sign::Minus];
        match (self.algebra.is_division(), self.variant) {
            (true, Variant::Phi1) => out.extend(std::iter::repeat(Sign::Minus).take(self.d())),
            (true, Variant::Phi2) => out.extend(std::iter::repeat(Sign::Plus).take(self.d())),
            (false, _) => out.extend(self.algebra.norm_diagonal().into_iter().map(|s| -s)),
        }
        out
    }

    pub fn domain<T: Real>(&self) -> PseudoHyperbolicSpace<T> {
        PseudoHyperbolicSpace::with_metric(&self.domain_signs(), -T::one()).expect("valid domain")
    }

    pub fn target<T: Real>(&self) -> PseudoHyperbolicSpace<T> {
        PseudoHyperbolicSpace::with_metric(&self.target_signs(), T::lit(-4.0)).expect("valid target")
    }

    fn split<T: Real>(&self, p: &DVector<T>) -> (Vec<T>, Vec<T>) {
        let d = self.d();
        ((0..d).map(|k| p[2 * k]).collect(), (0..d).map(|k| p[2 * k + 1]).collect())
    }

    /// Polar form `B(p,q)` of the quadratic map, with `B(p,p) = φ(p)`.
    pub fn bilinear<T: Real>(&self, p: &DVector<T>, q: &DVector<T>) -> DVector<T> {
        let (x, y) = self.split(p);
        let (x2, y2) = self.split(q);
        let tag = self.algebra;
        let half = T::lit(0.5);
        let nx = inner_raw(tag, &x, &x2);
        let ny = inner_raw(tag, &y, &y2);
        let t = match self.variant {
            Variant::Phi1 => (nx - ny) * half,
            Variant::Phi2 => (nx + ny) * half,
        };
        let xc: Vec<T> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| if i == 0 { v } else { -v })
            .collect();
        let w = tag.table().apply(&xc, &y2);
        let mut out = DVector::zeros(self.d() + 1);
        out[0] = t;
        for k in 0..self.d() {
            out[k + 1] = w[k];
        }
        out
    }

    pub fn eval<T: Real>(&self, p: &DVector<T>) -> DVector<T> {
        self.bilinear(p, p)
    }
}

/// One monomial `sign · x_i y_j` (1-based indices as displayed).
type Mono = (i8, u8, u8);

const PI9_W: [&[Mono]; 8] = [
    &[(1, 1, 1), (1, 2, 2), (1, 3, 3), (1, 4, 4), (-1, 5, 5), (-1, 6, 6), (-1, 7, 7), (-1, 8, 8)],
    &[(-1, 2, 1), (1, 1, 2), (1, 4, 3), (-1, 3, 4), (-1, 6, 5), (1, 5, 6), (1, 8, 7), (-1, 7, 8)],
    &[(-1, 3, 1), (-1, 4, 2), (1, 1, 3), (1, 2, 4), (-1, 7, 5), (-1, 8, 6), (1, 5, 7), (1, 6, 8)],
    &[(-1, 4, 1), (1, 3, 2), (-1, 2, 3), (1, 1, 4), (-1, 8, 5), (1, 7, 6), (-1, 6, 7), (1, 5, 8)],
    &[(-1, 5, 1), (-1, 6, 2), (-1, 7, 3), (-1, 8, 4), (1, 1, 5), (1, 2, 6), (1, 3, 7), (1, 4, 8)],
    &[(-1, 6, 1), (1, 5, 2), (-1, 8, 3), (1, 7, 4), (-1, 2, 5), (1, 1, 6), (-1, 4, 7), (1, 3, 8)],
    &[(-1, 7, 1), (1, 8, 2), (1, 5, 3), (-1, 6, 4), (-1, 3, 5), (1, 4, 6), (1, 1, 7), (-1, 2, 8)],
    &[(-1, 8, 1), (-1, 7, 2), (1, 6, 3), (1, 5, 4), (-1, 4, 5), (-1, 3, 6), (1, 2, 7), (1, 1, 8)],
];

/// Signs of `x_k²` in the first component (those of `y_k²` are opposite).
const PI9_T: [i8; 8] = [1, 1, 1, 1, -1, -1, -1, -1];

/// The split-octonion map written out as explicit polynomials in
/// `(x_1, y_1, …, x_8, y_8)`.
pub fn pi9_polynomial<T: Real>(p: &DVector<T>) -> DVector<T> {
    let x = |k: u8| p[2 * (k as usize - 1)];
    let y = |k: u8| p[2 * (k as usize - 1) + 1];
    let mut out = DVector::zeros(9);
    let mut t = T::zero();
    for (k, &s) in PI9_T.iter().enumerate() {
        let k = k as u8 + 1;
        let term = x(k) * x(k) - y(k) * y(k);
        t += if s > 0 { term } else { -term };
    }
    out[0] = t * T::lit(0.5);
    for (c, monos) in PI9_W.iter().enumerate() {
        let mut acc = T::zero();
        for &(s, i, j) in monos.iter() {
            let v = x(i) * y(j);
            acc += if s > 0 { v } else { -v };
        }
        out[c + 1] = acc;
    }
    out
}

/// Scale used for the relative comparison of a quadratic component at `p`.
pub fn quadratic_scale<T: Real>(value: T, p: &DVector<T>) -> T {
    let s = p.norm_squared();
    if value.abs() > s {
        value.abs()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complex_phi1_at_unit() {
        let h = HopfMap::new(AlgebraTag::C, Variant::Phi1).unwrap();
        let p = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0]);
        let img = h.eval(&p);
        assert_eq!(img.as_slice(), &[0.5, 0.0, 0.0]);
    }

    #[test]
    fn pi9_polynomial_at_first_axis() {
        let mut p = DVector::zeros(16);
        p[0] = 1.0;
        let img = pi9_polynomial(&p);
        assert_eq!(img[0], 0.5);
        assert!(img.iter().skip(1).all(|&v| v == 0.0));
    }

    #[test]
    fn pi9_matches_multiplication() {
        let h = HopfMap::new(AlgebraTag::Oprime, Variant::Phi1).unwrap();
        let dom = h.domain::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = dom.sample_point(&mut rng, 1.0);
            let a = h.eval(&p);
            let b = pi9_polynomial(&p);
            for k in 0..9 {
                assert!((a[k] - b[k]).abs() <= 1e-12 * quadratic_scale(b[k], &p));
            }
        }
    }

    #[test]
    fn split_phi2_rejected() {
        assert!(HopfMap::new(AlgebraTag::B, Variant::Phi2).is_err());
        assert!(HopfMap::new(AlgebraTag::R, Variant::Phi1).is_err());
    }

    #[test]
    fn domain_and_target_indices() {
        let cases = [
            (AlgebraTag::C, Variant::Phi1, 3, 3, 2, 2),
            (AlgebraTag::H, Variant::Phi2, 7, 3, 4, 0),
            (AlgebraTag::O, Variant::Phi2, 15, 7, 8, 0),
            (AlgebraTag::A, Variant::Phi1, 3, 1, 2, 1),
            (AlgebraTag::B, Variant::Phi1, 7, 3, 4, 2),
            (AlgebraTag::Oprime, Variant::Phi1, 15, 7, 8, 4),
        ];
        for (tag, var, m, t, n, s) in cases {
            let h = HopfMap::new(tag, var).unwrap();
            let dom = h.domain::<f64>();
            let tar = h.target::<f64>();
            assert_eq!((dom.m, dom.t), (m, t), "{tag:?}");
            assert_eq!((tar.m, tar.t), (n, s), "{tag:?}");
        }
    }
}
