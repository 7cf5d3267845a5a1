//! Residuals of the structure equations of a submersion with totally
//! geodesic fibres, for constant-curvature totals.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{
    covariant_derivative, directional_derivative, richardson_mat, richardson_vec, ConstantCurvature, FieldEvaluator,
    relative, LocalGeometry, FD_STEP,
};
use crate::error::Result;
use crate::fibrations::{Construction, FibrationSpec};
use crate::linalg::{columns, smallest_singular_value};
use crate::report::{CheckSet, Tolerances};
use crate::scalar::{Real, Sign};
use crate::spaces::DiagonalMetric;

/// An independent model of the base curvature `R'`, lifted to `ℋ_p`.
pub enum BaseCurvature<T: Real> {
    /// Constant curvature on an explicit target, evaluated on pushforwards.
    Constant { c: T, target: DiagonalMetric<T> },
    /// Clifford-type formula: `λ0 (g(y,w)x − g(x,w)y) + Σ ε_s(λ_s − λ0)/3 (…)`.
    Clifford {
        lambda0: T,
        lambda: T,
        structures: Vec<(DMatrix<T>, T)>,
    },
}

impl<T: Real> BaseCurvature<T> {
    /// Target metric for explicit quadrics; otherwise the structures
    /// `J_a X = h(X·a)` for the imaginary units `a` of `K`, with `ε = N(a)`.
    pub fn at(lg: &LocalGeometry<'_, T>) -> Option<Self> {
        match &lg.spec.construction {
            Construction::Hopf(_) => Some(BaseCurvature::Constant {
                c: lg.spec.target.as_ref()?.c,
                target: lg.spec.target.as_ref()?.metric.clone(),
            }),
            Construction::Quotient(m) => {
                let n = lg.p.len();
                let nd = m.algebra.norm_diagonal();
                let structures = (1..m.d())
                    .map(|k| {
                        let mut a = vec![T::zero(); m.d()];
                        a[k] = T::one();
                        let mut mat = DMatrix::zeros(n, n);
                        for j in 0..n {
                            let mut e = DVector::zeros(n);
                            e[j] = T::one();
                            mat.set_column(j, &m.right_mul(&e, &a));
                        }
                        (&lg.h * mat * &lg.h, nd[k].value::<T>())
                    })
                    .collect();
                Some(BaseCurvature::Clifford {
                    lambda0: -T::one(),
                    lambda: T::lit(-4.0),
                    structures,
                })
            }
            _ => None,
        }
    }

    /// `R'(X,Y,Z,W)` for horizontal arguments.
    pub fn r4(&self, lg: &LocalGeometry<'_, T>, x: &DVector<T>, y: &DVector<T>, z: &DVector<T>, w: &DVector<T>) -> T {
        match self {
            BaseCurvature::Constant { c, target } => {
                let px = lg.spec.push(&lg.p, x);
                let py = lg.spec.push(&lg.p, y);
                let pz = lg.spec.push(&lg.p, z);
                let pw = lg.spec.push(&lg.p, w);
                let g = |a: &DVector<T>, b: &DVector<T>| target.ip(a, b);
                *c * (g(&px, &pz) * g(&py, &pw) - g(&py, &pz) * g(&px, &pw))
            }
            BaseCurvature::Clifford {
                lambda0,
                lambda,
                structures,
            } => clifford_r4(lg.metric(), *lambda0, *lambda, structures, x, y, z, w),
        }
    }
}

/// `g(R(X,Y)W, Z)` for the Clifford curvature formula.
#[allow(clippy::too_many_arguments)]
pub fn clifford_r4<T: Real>(
    metric: &DiagonalMetric<T>,
    lambda0: T,
    lambda: T,
    structures: &[(DMatrix<T>, T)],
    x: &DVector<T>,
    y: &DVector<T>,
    z: &DVector<T>,
    w: &DVector<T>,
) -> T {
    let g = |a: &DVector<T>, b: &DVector<T>| metric.ip(a, b);
    let mut r = x * g(y, w) - y * g(x, w);
    r *= lambda0;
    for (j, eps) in structures {
        let coef = *eps * (lambda - lambda0) / T::lit(3.0);
        let jx = j * x;
        let jy = j * y;
        let jw = j * w;
        r += (&jx * g(&jy, w) - &jy * g(&jx, w) - &jw * (T::lit(2.0) * g(&jx, y))) * coef;
    }
    g(&r, z)
}

/// `R'(X,Y,Z,Z')` obtained from the total curvature and the computed `A`.
pub fn base_curvature_from_a<T: Real>(
    lg: &LocalGeometry<'_, T>,
    x: &DVector<T>,
    y: &DVector<T>,
    z: &DVector<T>,
    w: &DVector<T>,
) -> T {
    let r = ConstantCurvature::of(&lg.spec.total);
    let g = |a: &DVector<T>, b: &DVector<T>| lg.g(a, b);
    r.r4(x, y, z, w) + T::lit(2.0) * g(&lg.a(x, y), &lg.a(z, w)) - g(&lg.a(y, z), &lg.a(x, w))
        + g(&lg.a(x, z), &lg.a(y, w))
}

/// Samples `frames` frames at the point of `lg` and records the worst
/// residual of every structure equation.
pub fn oneill_residuals<T: Real, R: Rng + ?Sized>(
    lg: &LocalGeometry<'_, T>,
    rng: &mut R,
    frames: usize,
    tols: &Tolerances,
    out: &mut CheckSet,
) -> Result<()> {
    let space = &lg.spec.total;
    let c = space.c;
    let rc = ConstantCurvature::of(space);
    let base = BaseCurvature::at(lg);
    let g = |a: &DVector<T>, b: &DVector<T>| lg.g(a, b);

    // connection and curvature self-audits at this point
    {
        let e = lg.random_tangent(rng);
        let w = space.sample_tangent(rng, &lg.p) + &lg.p * T::lit(0.3);
        let fld = FieldEvaluator::projected_constant(space, w.clone());
        let d = covariant_derivative(space, &fld, &lg.p, &e);
        let exact = &e * (-c * space.ip(&lg.p, &w));
        out.observe("connection.audit", tols, relative((d - exact).norm(), &[&e, &w]));
        let w2 = space.sample_tangent(rng, &lg.p);
        let fld2 = FieldEvaluator::projected_constant(space, w2.clone());
        let lhs = directional_derivative(space, |q| space.ip(&fld.eval(q), &fld2.eval(q)), &lg.p, &e);
        let rhs = space.ip(&covariant_derivative(space, &fld, &lg.p, &e), &fld2.eval(&lg.p))
            + space.ip(&fld.eval(&lg.p), &covariant_derivative(space, &fld2, &lg.p, &e));
        out.observe("connection.metric", tols, relative(lhs - rhs, &[&e, &w, &w2]));

        let (a, b, cc, dd) = (lg.random_tangent(rng), lg.random_tangent(rng), lg.random_tangent(rng), lg.random_tangent(rng));
        let s1 = rc.r4(&a, &b, &cc, &dd) + rc.r4(&b, &a, &cc, &dd);
        let s2 = rc.r4(&a, &b, &cc, &dd) + rc.r4(&a, &b, &dd, &cc);
        let bianchi = rc.r4(&a, &b, &cc, &dd) + rc.r4(&b, &cc, &a, &dd) + rc.r4(&cc, &a, &b, &dd);
        out.observe("curvature.symmetry", tols, [s1, s2, bianchi].iter().map(|&t| relative(t, &[&a, &b, &cc, &dd])).fold(0.0, f64::max));

        let x = lg.random_horizontal(rng);
        let v = lg.random_vertical(rng);
        if let Ok(xt) = FieldEvaluator::basic_extension(lg.spec, &lg.p, &x) {
            let route = &lg.h * covariant_derivative(space, &xt, &lg.p, &v);
            out.observe("a.dual_route", tols, relative((route - lg.a(&x, &v)).norm(), &[&x, &v]));
        }
    }

    for _ in 0..frames {
        let x = lg.random_horizontal(rng);
        let y = lg.random_horizontal(rng);
        let z = lg.random_horizontal(rng);
        let z2 = lg.random_horizontal(rng);
        let u = lg.random_vertical(rng);
        let v = lg.random_vertical(rng);
        let w = lg.random_vertical(rng);
        let w2 = lg.random_vertical(rng);

        if let Some(base) = &base {
            let rhs = base.r4(lg, &x, &y, &z, &z2) - T::lit(2.0) * g(&lg.a(&x, &y), &lg.a(&z, &z2))
                + g(&lg.a(&y, &z), &lg.a(&x, &z2))
                - g(&lg.a(&x, &z), &lg.a(&y, &z2));
            out.observe("oneill.a", tols, relative(rc.r4(&x, &y, &z, &z2) - rhs, &[&x, &y, &z, &z2]));
            let axy = lg.a(&x, &y);
            let cor = base.r4(lg, &x, &y, &x, &y) - T::lit(3.0) * g(&axy, &axy);
            out.observe("oneill.cor_a", tols, relative(rc.r4(&x, &y, &x, &y) - cor, &[&x, &y, &x, &y]));
        }

        let r_hat = rc.r4(&u, &v, &w, &w2) - g(&lg.t(&u, &w), &lg.t(&v, &w2)) + g(&lg.t(&u, &w2), &lg.t(&v, &w));
        let model = c * (g(&u, &w) * g(&v, &w2) - g(&v, &w) * g(&u, &w2));
        out.observe("oneill.d", tols, relative(r_hat - model, &[&u, &v, &w, &w2]));
        out.observe("oneill.e", tols, relative(rc.r4(&u, &v, &w, &x), &[&u, &v, &w, &x]));
        let axu = lg.a(&x, &u);
        out.observe("oneill.cor_b", tols, relative(rc.r4(&x, &u, &x, &u) - g(&axu, &axu), &[&x, &u, &x, &u]));

        let axv = lg.a(&x, &v);
        let anti = lg.a(&axv, &u) + lg.a(&axu, &v);
        out.observe("ranjan", tols, relative(g(&anti, &y) + T::lit(2.0) * c * g(&u, &v) * g(&x, &y), &[&x, &u, &v, &y]));

        out.observe("a.self", tols, relative(lg.a(&x, &x).norm(), &[&x, &x]));
        out.observe("a.alternating", tols, relative((lg.a(&x, &y) + lg.a(&y, &x)).norm(), &[&x, &y]));
        let (e1, e2, e3) = (lg.random_tangent(rng), lg.random_tangent(rng), lg.random_tangent(rng));
        out.observe("a.skew", tols, relative(g(&lg.a(&e1, &e2), &e3) + g(&e2, &lg.a(&e1, &e3)), &[&e1, &e2, &e3]));
        out.observe("t.vanishing", tols, relative(lg.t(&u, &w).norm(), &[&u, &w]).max(relative(lg.t(&e1, &e2).norm(), &[&e1, &e2])));

        for (sign, id) in [(Sign::Plus, "a.axaxv_spacelike"), (Sign::Minus, "a.axaxv_timelike")] {
            out.entry(id, tols);
            if let Some(xu) = lg.random_unit_horizontal(rng, sign) {
                let eps = g(&xu, &xu);
                let res = lg.a(&xu, &lg.a(&xu, &v)) + &v * (c * eps);
                out.observe(id, tols, relative(res.norm(), &[&xu, &xu, &v]));
                if lg.r() > 0 {
                    let cols: Vec<DVector<T>> = lg.vertical.vectors.iter().map(|vi| lg.a(&xu, vi)).collect();
                    let m = columns(&cols, lg.p.len());
                    out.observe("a.injective", tols, smallest_singular_value(&m).to_f64());
                }
            }
        }
    }
    Ok(())
}

/// `A_E F` at an arbitrary point, differentiating the vertical projector
/// along the single geodesic of `hE`.
pub fn a_direct<T: Real>(spec: &FibrationSpec<T>, q: &DVector<T>, e: &DVector<T>, f: &DVector<T>) -> DVector<T> {
    let v = spec.vertical_projector(q);
    let h = spec.tangent_projector(q) - &v;
    let he = &h * e;
    let dv = richardson_mat(
        |t| spec.vertical_projector(&spec.total.geodesic_unchecked(q, &he, t)),
        T::lit(FD_STEP),
    );
    (&h - &v) * dv * spec.total.project_tangent(q, f)
}

/// `(∇_Z A)_X Y` at `p`, using the fields `q ↦ P_q X` and `q ↦ P_q Y`,
/// whose covariant derivatives vanish at `p`.
pub fn nabla_a<T: Real>(spec: &FibrationSpec<T>, p: &DVector<T>, z: &DVector<T>, x: &DVector<T>, y: &DVector<T>) -> DVector<T> {
    let d = richardson_vec(
        |t| {
            let q = spec.total.geodesic_unchecked(p, z, t);
            a_direct(spec, &q, x, y)
        },
        T::lit(1e-3),
    );
    spec.total.project_tangent(p, &d)
}

/// The structure equations involving `∇A`, by nested differentiation.
pub fn nested_checks<T: Real, R: Rng + ?Sized>(
    lg: &LocalGeometry<'_, T>,
    rng: &mut R,
    tols: &Tolerances,
    out: &mut CheckSet,
) {
    let rc = ConstantCurvature::of(&lg.spec.total);
    let g = |a: &DVector<T>, b: &DVector<T>| lg.g(a, b);
    let x = lg.random_horizontal(rng);
    let y = lg.random_horizontal(rng);
    let z = lg.random_horizontal(rng);
    let u = lg.random_vertical(rng);
    let v = lg.random_vertical(rng);
    let b = g(&nabla_a(lg.spec, &lg.p, &z, &x, &y), &u);
    out.observe("oneill.b", tols, relative(rc.r4(&x, &y, &z, &u) - b, &[&x, &y, &z, &u]));
    let cterm = g(&nabla_a(lg.spec, &lg.p, &u, &x, &y), &v) + g(&lg.a(&x, &u), &lg.a(&y, &v));
    out.observe("oneill.c", tols, relative(rc.r4(&x, &u, &y, &v) - cterm, &[&x, &u, &y, &v]));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations::build;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(name: &str, ps: &[usize]) -> CheckSet {
        let f = build::<f64>(name, ps).unwrap();
        let tols = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut out = CheckSet::new();
        for _ in 0..3 {
            let p = f.sample_point(&mut rng);
            let lg = LocalGeometry::new(&f, &p).unwrap();
            oneill_residuals(&lg, &mut rng, 4, &tols, &mut out).unwrap();
        }
        out
    }

    #[test]
    fn structure_equations_hold() {
        for (name, ps) in [("pi1", vec![]), ("pi8", vec![]), ("pi_C", vec![2, 1]), ("pi_B", vec![2])] {
            let out = run(name, &ps);
            for c in out.iter() {
                assert!(c.pass, "{name} {} {} > {}", c.id, c.max_residual, c.tolerance);
            }
        }
    }

    #[test]
    fn wrong_base_model_is_detected() {
        let f = build::<f64>("pi_C", &[2, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        let x = lg.random_horizontal(&mut rng);
        let y = lg.random_horizontal(&mut rng);
        let from_a = base_curvature_from_a(&lg, &x, &y, &x, &y);
        let flat = BaseCurvature::Clifford {
            lambda0: -1.0,
            lambda: -1.0,
            structures: vec![],
        };
        let model = BaseCurvature::at(&lg).unwrap();
        assert!((from_a - model.r4(&lg, &x, &y, &x, &y)).abs() < 1e-6);
        assert!((from_a - flat.r4(&lg, &x, &y, &x, &y)).abs() > 1e-3);
    }

    #[test]
    fn nested_identities_on_pi_c() {
        let f = build::<f64>("pi_C", &[1, 0]).unwrap();
        let tols = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut out = CheckSet::new();
        let p = f.sample_point(&mut rng);
        let lg = LocalGeometry::new(&f, &p).unwrap();
        nested_checks(&lg, &mut rng, &tols, &mut out);
        for c in out.iter() {
            assert!(c.pass, "{} {}", c.id, c.max_residual);
        }
    }
}
