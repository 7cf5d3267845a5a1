//! Levi-Civita connection on quadrics, curvature, and the O'Neill tensors of
//! the catalogued submersions.
//!
//! Derivatives are taken along geodesics by central differences with one
//! Richardson step; the connection is the tangential part of the flat
//! ambient derivative.

pub mod clifford;
pub mod jacobi;
pub mod lift;
pub mod oneill;
pub mod special_basis;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fibrations::{Construction, FibrationSpec, TargetKind};
use crate::scalar::{Real, Sign};
use crate::spaces::{DiagonalMetric, OrthonormalFrame, PseudoHyperbolicSpace};

pub use clifford::{clifford_structure_check, CliffordStructure};
pub use jacobi::{jacobi_operator, special_osserman_check, JacobiOperator};
pub use lift::{holonomy_check, horizontal_lift_curve, LiftedCurve};
pub use oneill::{nested_checks, oneill_residuals, BaseCurvature};
pub use special_basis::{special_basis, special_basis_check, SpecialBasis};

pub const FD_STEP: f64 = 1e-4;

/// `(4 D(h) − D(2h)) / 3` with `D(h) = (f(h) − f(−h)) / 2h`.
pub fn richardson_vec<T: Real, F: Fn(T) -> DVector<T>>(f: F, h: T) -> DVector<T> {
    let two = T::lit(2.0);
    let d1 = (f(h) - f(-h)) / (two * h);
    let d2 = (f(two * h) - f(-two * h)) / (T::lit(4.0) * h);
    (d1 * T::lit(4.0) - d2) / T::lit(3.0)
}

pub fn richardson_mat<T: Real, F: Fn(T) -> DMatrix<T>>(f: F, h: T) -> DMatrix<T> {
    let two = T::lit(2.0);
    let d1 = (f(h) - f(-h)) / (two * h);
    let d2 = (f(two * h) - f(-two * h)) / (T::lit(4.0) * h);
    (d1 * T::lit(4.0) - d2) / T::lit(3.0)
}

pub fn richardson_scalar<T: Real, F: Fn(T) -> T>(f: F, h: T) -> T {
    let two = T::lit(2.0);
    let d1 = (f(h) - f(-h)) / (two * h);
    let d2 = (f(two * h) - f(-two * h)) / (T::lit(4.0) * h);
    (d1 * T::lit(4.0) - d2) / T::lit(3.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    BasicExtension,
    FibreTangent,
    Custom,
}

/// A tangent vector field on the total quadric.
pub struct FieldEvaluator<'a, T: Real> {
    pub kind: FieldKind,
    pub anchor: String,
    f: Box<dyn Fn(&DVector<T>) -> DVector<T> + Send + Sync + 'a>,
}

impl<'a, T: Real> FieldEvaluator<'a, T> {
    pub fn new(
        kind: FieldKind,
        anchor: impl Into<String>,
        f: impl Fn(&DVector<T>) -> DVector<T> + Send + Sync + 'a,
    ) -> Self {
        FieldEvaluator {
            kind,
            anchor: anchor.into(),
            f: Box::new(f),
        }
    }

    pub fn eval(&self, q: &DVector<T>) -> DVector<T> {
        (self.f)(q)
    }

    /// `q ↦ P_q w`.
    pub fn projected_constant(space: &'a PseudoHyperbolicSpace<T>, w: DVector<T>) -> Self {
        FieldEvaluator::new(FieldKind::Custom, "tangential part of a constant vector", move |q| {
            space.project_tangent(q, &w)
        })
    }

    /// Horizontal field along the fibre through `p` with constant pushforward `dπ_p x`.
    pub fn basic_extension(spec: &'a FibrationSpec<T>, p: &DVector<T>, x: &DVector<T>) -> Result<Self> {
        let anchor = format!("basic extension along the fibre of {}", spec.label());
        match (&spec.construction, spec.target_kind) {
            (Construction::Hopf(_), TargetKind::Explicit) => {
                let w = spec.push(p, x);
                Ok(FieldEvaluator::new(FieldKind::BasicExtension, anchor, move |q| {
                    lift_unchecked(spec, q, &w)
                }))
            }
            (Construction::Quotient(m), _) => {
                let p = p.clone();
                let x = x.clone();
                let m = m.clone();
                Ok(FieldEvaluator::new(FieldKind::BasicExtension, anchor, move |q| {
                    let (u, _) = m.orbit_solve(&p, q);
                    spec.horizontal_projector(q) * m.right_mul(&x, &u)
                }))
            }
            _ => Err(Error::InvalidParameters(format!(
                "no basic extension for {}",
                spec.label()
            ))),
        }
    }

    /// `q ↦ v_q w`.
    pub fn fibre_tangent(spec: &'a FibrationSpec<T>, w: DVector<T>) -> Self {
        FieldEvaluator::new(FieldKind::FibreTangent, "vertical part of a constant vector", move |q| {
            spec.vertical_projector(q) * &w
        })
    }
}

/// Horizontal `X` at `q` with `dπ_q X = w`, by least squares over the
/// `n` largest singular directions of `J h`.
fn lift_unchecked<T: Real>(spec: &FibrationSpec<T>, q: &DVector<T>, w: &DVector<T>) -> DVector<T> {
    let h = spec.horizontal_projector(q);
    // rank is exactly n on the quadric; off it spurious small singular values appear
    let m = spec.differential(q) * &h;
    &h * crate::linalg::truncated_solve(&m, w, spec.n())
}

/// `∇_E F` at `p`: tangential part of `d/dt F(γ_E(t))` at `t = 0`.
pub fn covariant_derivative<T: Real>(
    space: &PseudoHyperbolicSpace<T>,
    field: &FieldEvaluator<'_, T>,
    p: &DVector<T>,
    e: &DVector<T>,
) -> DVector<T> {
    let d = richardson_vec(|t| field.eval(&space.geodesic_unchecked(p, e, t)), T::lit(FD_STEP));
    space.project_tangent(p, &d)
}

/// Directional derivative of a scalar function along the geodesic `γ_E`.
pub fn directional_derivative<T: Real>(
    space: &PseudoHyperbolicSpace<T>,
    f: impl Fn(&DVector<T>) -> T,
    p: &DVector<T>,
    e: &DVector<T>,
) -> T {
    richardson_scalar(|t| f(&space.geodesic_unchecked(p, e, t)), T::lit(FD_STEP))
}

/// Curvature tensor of a space of constant curvature `c`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantCurvature<'a, T: Real> {
    pub c: T,
    pub metric: &'a DiagonalMetric<T>,
}

impl<'a, T: Real> ConstantCurvature<'a, T> {
    pub fn of(space: &'a PseudoHyperbolicSpace<T>) -> Self {
        ConstantCurvature {
            c: space.c,
            metric: &space.metric,
        }
    }

    /// `R(X,Y,Z,W) = c(g(X,Z)g(Y,W) − g(Y,Z)g(X,W))`.
    pub fn r4(&self, x: &DVector<T>, y: &DVector<T>, z: &DVector<T>, w: &DVector<T>) -> T {
        let g = |a: &DVector<T>, b: &DVector<T>| self.metric.ip(a, b);
        self.c * (g(x, z) * g(y, w) - g(y, z) * g(x, w))
    }

    /// `R(X,Y)Z = c(g(Y,Z)X − g(X,Z)Y)`.
    pub fn r_vec(&self, x: &DVector<T>, y: &DVector<T>, z: &DVector<T>) -> DVector<T> {
        (x * self.metric.ip(y, z) - y * self.metric.ip(x, z)) * self.c
    }
}

pub fn constant_curvature_r<T: Real>(
    space: &PseudoHyperbolicSpace<T>,
    x: &DVector<T>,
    y: &DVector<T>,
    z: &DVector<T>,
    w: &DVector<T>,
) -> T {
    ConstantCurvature::of(space).r4(x, y, z, w)
}

/// Frames and derivatives of the vertical projector at one point.
///
/// `A_E F = (h − v)(D_{hE} v) F` and `T_E F = (h − v)(D_{vE} v) F` for
/// tangent `E, F`, where `D v` is the derivative of the vertical projector
/// along geodesics.
pub struct LocalGeometry<'a, T: Real> {
    pub spec: &'a FibrationSpec<T>,
    pub p: DVector<T>,
    pub tangent: DMatrix<T>,
    pub v: DMatrix<T>,
    pub h: DMatrix<T>,
    pub vertical: OrthonormalFrame<T>,
    pub horizontal: OrthonormalFrame<T>,
    h_minus_v: DMatrix<T>,
    dv_h: Vec<DMatrix<T>>,
    dv_v: Vec<DMatrix<T>>,
}

impl<'a, T: Real> LocalGeometry<'a, T> {
    pub fn new(spec: &'a FibrationSpec<T>, p: &DVector<T>) -> Result<Self> {
        if !spec.total_is_quadric() || matches!(spec.construction, Construction::Composed { .. }) {
            return Err(Error::InvalidParameters(format!(
                "{} has no model with a quadric total space and a direct vertical splitting",
                spec.label()
            )));
        }
        let tangent = spec.tangent_projector(p);
        let v = spec.vertical_projector(p);
        let h = &tangent - &v;
        let vertical = spec.vertical_frame(p)?;
        let horizontal = spec.horizontal_frame(p)?;
        // differentiate along the Euclidean unit direction so the step does not grow with ‖e‖
        let dv = |e: &DVector<T>| {
            let s = e.norm();
            let u = e / s;
            richardson_mat(
                |t| spec.vertical_projector(&spec.total.geodesic_unchecked(p, &u, t)),
                T::lit(FD_STEP),
            ) * s
        };
        let dv_h = horizontal.vectors.iter().map(dv).collect();
        let dv_v = vertical.vectors.iter().map(dv).collect();
        Ok(LocalGeometry {
            spec,
            p: p.clone(),
            h_minus_v: &h - &v,
            tangent,
            v,
            h,
            vertical,
            horizontal,
            dv_h,
            dv_v,
        })
    }

    pub fn metric(&self) -> &DiagonalMetric<T> {
        &self.spec.total.metric
    }

    pub fn g(&self, a: &DVector<T>, b: &DVector<T>) -> T {
        self.spec.total.ip(a, b)
    }

    pub fn n(&self) -> usize {
        self.horizontal.len()
    }

    pub fn r(&self) -> usize {
        self.vertical.len()
    }

    fn combine(&self, frame: &OrthonormalFrame<T>, cache: &[DMatrix<T>], e: &DVector<T>) -> DMatrix<T> {
        let n = self.p.len();
        let mut out = DMatrix::zeros(n, n);
        for (c, m) in frame.coefficients(self.metric(), e).into_iter().zip(cache) {
            out += m * c;
        }
        out
    }

    /// `D_E v` for tangent `E`, from the cached frame derivatives.
    pub fn dv(&self, e: &DVector<T>) -> DMatrix<T> {
        self.combine(&self.horizontal, &self.dv_h, e) + self.combine(&self.vertical, &self.dv_v, e)
    }

    /// Ambient matrix of `F ↦ A_E F` on the tangent space.
    pub fn a_matrix(&self, e: &DVector<T>) -> DMatrix<T> {
        &self.h_minus_v * self.combine(&self.horizontal, &self.dv_h, e) * &self.tangent
    }

    pub fn t_matrix(&self, e: &DVector<T>) -> DMatrix<T> {
        &self.h_minus_v * self.combine(&self.vertical, &self.dv_v, e) * &self.tangent
    }

    pub fn a(&self, e: &DVector<T>, f: &DVector<T>) -> DVector<T> {
        self.a_matrix(e) * f
    }

    pub fn t(&self, e: &DVector<T>, f: &DVector<T>) -> DVector<T> {
        self.t_matrix(e) * f
    }

    /// Random horizontal vector with Gaussian frame coefficients of variance `1/n`.
    pub fn random_horizontal<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<T> {
        random_combination(rng, &self.horizontal, self.p.len())
    }

    pub fn random_vertical<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<T> {
        random_combination(rng, &self.vertical, self.p.len())
    }

    pub fn random_tangent<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<T> {
        self.random_horizontal(rng) + self.random_vertical(rng)
    }

    /// Random horizontal vector with `g(X,X) = sign`, if that causal type exists.
    pub fn random_unit_horizontal<R: Rng + ?Sized>(&self, rng: &mut R, sign: Sign) -> Option<DVector<T>> {
        random_unit(rng, &self.horizontal, self.metric(), sign)
    }
}

/// `|v| / Π‖a_i‖`, the size of a multilinear residual in the arguments' own units.
pub fn relative<T: Real>(v: T, args: &[&DVector<T>]) -> f64 {
    let scale = args.iter().fold(T::one(), |acc, a| acc * a.norm());
    (v.abs() / scale).to_f64()
}

pub fn random_combination<T: Real, R: Rng + ?Sized>(rng: &mut R, frame: &OrthonormalFrame<T>, dim: usize) -> DVector<T> {
    let mut out = DVector::zeros(dim);
    if frame.is_empty() {
        return out;
    }
    let s = 1.0 / (frame.len() as f64).sqrt();
    for e in &frame.vectors {
        let c: f64 = rng.sample(StandardNormal);
        out += e * T::lit(c * s);
    }
    out
}

/// Unit vector of the given causal type in the span of `frame`.
pub fn random_unit<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    frame: &OrthonormalFrame<T>,
    metric: &DiagonalMetric<T>,
    sign: Sign,
) -> Option<DVector<T>> {
    let members: Vec<usize> = (0..frame.len()).filter(|&i| frame.signs[i] == sign).collect();
    if members.is_empty() {
        return None;
    }
    let dim = frame.vectors[0].len();
    for _ in 0..64 {
        let x = random_combination(rng, frame, dim);
        let g = metric.norm2(&x);
        let coeff2: T = frame.coefficients(metric, &x).iter().fold(T::zero(), |a, &c| a + c * c);
        if sign.value::<T>() * g > T::lit(0.05) * coeff2 {
            return Some(x / g.abs().sqrt());
        }
    }
    let k = members[rng.random_range(0..members.len())];
    Some(frame.vectors[k].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations::build;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projected_constant_matches_closed_form() {
        let sp = PseudoHyperbolicSpace::<f64>::new(2, 1, -1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = sp.sample_point(&mut rng, 0.7);
        let e = sp.sample_tangent(&mut rng, &p);
        let w = DVector::from_column_slice(&[0.3, -1.2, 0.8]);
        let f = FieldEvaluator::projected_constant(&sp, w.clone());
        let d = covariant_derivative(&sp, &f, &p, &e);
        let exact = &e * (-sp.c * sp.ip(&p, &w));
        assert!((d - exact).norm() < 1e-9);
    }

    #[test]
    fn metric_compatibility() {
        let sp = PseudoHyperbolicSpace::<f64>::new(3, 1, -1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = sp.sample_point(&mut rng, 0.7);
        let e = sp.sample_tangent(&mut rng, &p);
        let a = DVector::from_column_slice(&[1.0, 0.2, -0.4, 0.9]);
        let b = DVector::from_column_slice(&[-0.3, 0.5, 1.1, 0.0]);
        let f = FieldEvaluator::projected_constant(&sp, a);
        let g = FieldEvaluator::projected_constant(&sp, b);
        let lhs = directional_derivative(&sp, |q| sp.ip(&f.eval(q), &g.eval(q)), &p, &e);
        let rhs = sp.ip(&covariant_derivative(&sp, &f, &p, &e), &g.eval(&p))
            + sp.ip(&f.eval(&p), &covariant_derivative(&sp, &g, &p, &e));
        assert!((lhs - rhs).abs() < 1e-8);
    }

    #[test]
    fn position_field_derivative_is_zero_tangentially() {
        let sp = PseudoHyperbolicSpace::<f64>::new(2, 1, -1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = sp.sample_point(&mut rng, 0.5);
        let e = sp.sample_tangent(&mut rng, &p);
        let pos = FieldEvaluator::new(FieldKind::Custom, "position", |q: &DVector<f64>| q.clone());
        let raw = richardson_vec(|t| pos.eval(&sp.geodesic_unchecked(&p, &e, t)), FD_STEP);
        assert!((&raw - &e).norm() < 1e-9);
    }

    #[test]
    fn constant_curvature_values() {
        let sp = PseudoHyperbolicSpace::<f64>::new(3, 0, -1.0).unwrap();
        let x = DVector::from_column_slice(&[0.0, 1.0, 0.0, 0.0]);
        let y = DVector::from_column_slice(&[0.0, 0.0, 1.0, 0.0]);
        let u = DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(constant_curvature_r(&sp, &x, &y, &x, &y), -1.0);
        assert_eq!(constant_curvature_r(&sp, &x, &y, &x, &u), 0.0);
        assert_eq!(constant_curvature_r(&sp, &x, &(&x * 2.0), &x, &(&x * 2.0)), 0.0);
    }

    #[test]
    fn a_tensor_alternates_on_pi_c() {
        let f = build::<f64>("pi_C", &[2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        let x = lg.random_horizontal(&mut rng);
        let y = lg.random_horizontal(&mut rng);
        assert!(lg.a(&x, &x).norm() < 1e-7);
        assert!((lg.a(&x, &y) + lg.a(&y, &x)).norm() < 1e-7);
        let v = lg.random_vertical(&mut rng);
        let w = lg.random_vertical(&mut rng);
        assert!(lg.t(&v, &w).norm() < 1e-7);
    }

    #[test]
    fn dual_route_matches_projector_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for name in ["pi2", "pi_H"] {
            let f = crate::fibrations::resolve::<f64>(name).unwrap().remove(0);
            let p = f.sample_point(&mut rng);
            let lg = LocalGeometry::new(&f, &p).unwrap();
            let x = lg.random_horizontal(&mut rng);
            let v = lg.random_vertical(&mut rng);
            let xt = FieldEvaluator::basic_extension(&f, &p, &x).unwrap();
            assert!((xt.eval(&p) - &x).norm() < 1e-9);
            let route = &lg.h * covariant_derivative(&f.total, &xt, &p, &v);
            assert!((route - lg.a(&x, &v)).norm() < 1e-6, "{name}");
        }
    }
}
