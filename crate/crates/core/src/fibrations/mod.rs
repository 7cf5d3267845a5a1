//! The catalogued submersions: explicit Hopf maps onto quadrics of curvature
//! −4, quotients by unit groups, and their two-step composites.

pub mod composite;
pub mod hopf;
pub mod quotient;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraTag;
use crate::error::{Error, Result};
use crate::linalg::{columns, least_squares, numerical_rank, projector_onto};
use crate::scalar::Real;
use crate::spaces::{indefinite_gram_schmidt, OrthonormalFrame, PseudoHyperbolicSpace, TRANSPORT_TOL};

pub use composite::{compose, CompositeModel};
pub use hopf::{HopfMap, Variant};
pub use quotient::QuotientModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BaseDescriptor {
    ExplicitQuadric { dim: usize, index: usize, curvature: f64 },
    QuotientBase { algebra: AlgebraTag, m: usize, t: usize },
}

impl BaseDescriptor {
    pub fn name(&self) -> String {
        match self {
            BaseDescriptor::ExplicitQuadric { dim, index, curvature } => {
                if *index == 0 {
                    format!("H^{dim}({curvature})")
                } else {
                    format!("H^{dim}_{index}({curvature})")
                }
            }
            BaseDescriptor::QuotientBase { algebra, m, t } => match algebra {
                AlgebraTag::A | AlgebraTag::B => format!("{}P^{m}", algebra.name()),
                _ if *t == 0 => format!("{}H^{m}", algebra.name()),
                _ => format!("{}H^{m}_{t}", algebra.name()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibreDescriptor {
    pub dim: usize,
    pub index: usize,
    pub model: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Explicit,
    Quotient,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Construction {
    Hopf(HopfMap),
    Quotient(QuotientModel),
    Composite(CompositeModel),
    Composed { outer: CompositeModel, inner: QuotientModel },
}

/// A catalogued submersion together with the data needed to evaluate it.
#[derive(Clone, Debug)]
pub struct FibrationSpec<T: Real> {
    pub id: String,
    pub params: Vec<usize>,
    pub construction: Construction,
    /// Quadric carrying the points. For composites these are representatives
    /// of points of the quotient total space.
    pub total: PseudoHyperbolicSpace<T>,
    pub total_dims: (usize, usize),
    pub total_name: String,
    pub base: BaseDescriptor,
    pub base_dims: (usize, usize),
    pub fibre: FibreDescriptor,
    pub target_kind: TargetKind,
    pub target: Option<PseudoHyperbolicSpace<T>>,
}

fn quadric_name(dim: usize, index: usize) -> String {
    if index == 0 {
        format!("H^{dim}")
    } else {
        format!("H^{dim}_{index}")
    }
}

fn fibre_model(dim: usize, index: usize) -> String {
    quadric_name(dim, index)
}

impl<T: Real> FibrationSpec<T> {
    pub fn hopf(id: &str, algebra: AlgebraTag, variant: Variant) -> Result<Self> {
        let map = HopfMap::new(algebra, variant)?;
        let total = map.domain::<T>();
        let target = map.target::<T>();
        let (n, s) = (target.m, target.t);
        let (a, l) = (total.m, total.t);
        let r = a - n;
        Ok(FibrationSpec {
            id: id.to_string(),
            params: vec![],
            construction: Construction::Hopf(map),
            total_dims: (a, l),
            total_name: quadric_name(a, l),
            base: BaseDescriptor::ExplicitQuadric {
                dim: n,
                index: s,
                curvature: -4.0,
            },
            base_dims: (n, s),
            fibre: FibreDescriptor {
                dim: r,
                index: l - s,
                model: fibre_model(r, l - s),
            },
            target_kind: TargetKind::Explicit,
            target: Some(target),
            total,
        })
    }

    pub fn quotient(algebra: AlgebraTag, m: usize, t: usize) -> Result<Self> {
        let model = QuotientModel::new(algebra, algebra, m, t)?;
        let total = model.space::<T>();
        let d = algebra.dim();
        let (n, s) = match algebra {
            AlgebraTag::C | AlgebraTag::H => (d * m, d * model.t),
            AlgebraTag::A | AlgebraTag::B => (d * m, d * m / 2),
            _ => return Err(Error::InvalidParameters(format!("no quotient family for {}", algebra.name()))),
        };
        let (a, l) = (total.m, total.t);
        let id = format!("pi_{}", algebra.name());
        let params = if algebra.is_division() { vec![m, model.t] } else { vec![m] };
        Ok(FibrationSpec {
            id,
            params,
            total_dims: (a, l),
            total_name: quadric_name(a, l),
            base: BaseDescriptor::QuotientBase { algebra, m, t: model.t },
            base_dims: (n, s),
            fibre: FibreDescriptor {
                dim: d - 1,
                index: l - s,
                model: fibre_model(d - 1, l - s),
            },
            construction: Construction::Quotient(model),
            target_kind: TargetKind::Quotient,
            target: None,
            total,
        })
    }

    /// Pseudo-hyperbolic ambient quadric of the catalogued total space.
    pub fn total_is_quadric(&self) -> bool {
        matches!(self.construction, Construction::Hopf(_) | Construction::Quotient(_) | Construction::Composed { .. })
    }

    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.id.clone()
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            format!("{}[{}]", self.id, ps.join(","))
        }
    }

    pub fn r(&self) -> usize {
        self.fibre.dim
    }

    pub fn n(&self) -> usize {
        self.base_dims.0
    }

    pub fn ambient_dim(&self) -> usize {
        self.total.ambient_dim()
    }

    /// Polar form of the defining quadratic map.
    pub fn bilinear(&self, p: &DVector<T>, q: &DVector<T>) -> DVector<T> {
        match &self.construction {
            Construction::Hopf(h) => h.bilinear(p, q),
            Construction::Quotient(qm) => qm.bilinear(p, q),
            Construction::Composite(c) | Construction::Composed { outer: c, .. } => c.full.bilinear(p, q),
        }
    }

    /// Image point (explicit targets) or orbit invariants (quotient targets).
    pub fn eval(&self, p: &DVector<T>) -> DVector<T> {
        self.bilinear(p, p)
    }

    pub fn evaluate(&self, p: &DVector<T>) -> Result<DVector<T>> {
        self.total.point(p.clone())?;
        Ok(self.eval(p))
    }

    /// Exact Jacobian `v ↦ B(p,v) + B(v,p)`.
    pub fn differential(&self, p: &DVector<T>) -> DMatrix<T> {
        let n = self.ambient_dim();
        let rows = self.eval(p).len();
        let mut j = DMatrix::zeros(rows, n);
        for k in 0..n {
            let mut e = DVector::zeros(n);
            e[k] = T::one();
            let col = self.bilinear(p, &e) + self.bilinear(&e, p);
            j.set_column(k, &col);
        }
        j
    }

    pub fn push(&self, p: &DVector<T>, v: &DVector<T>) -> DVector<T> {
        self.bilinear(p, v) + self.bilinear(v, p)
    }

    /// Rank of the differential restricted to the tangent space.
    pub fn rank(&self, p: &DVector<T>) -> usize {
        let j = self.differential(p) * self.tangent_projector(p);
        numerical_rank(&j, 1e-6)
    }

    pub fn tangent_projector(&self, p: &DVector<T>) -> DMatrix<T> {
        if let Construction::Composite(c) = &self.construction {
            return c.inner_horizontal_projector(&self.total, p);
        }
        self.total.tangent_projector(p)
    }

    /// Vectors spanning the vertical space at `p`.
    pub fn vertical_spanning(&self, p: &DVector<T>) -> Vec<DVector<T>> {
        match &self.construction {
            Construction::Hopf(_) => {
                let v = self.vertical_projector(p);
                (0..self.ambient_dim()).map(|k| v.column(k).into_owned()).collect()
            }
            Construction::Quotient(q) => q.vertical_spanning(p),
            Construction::Composite(c) => c.vertical_spanning(&self.total, p),
            Construction::Composed { inner, .. } => inner.full_vertical_spanning(p),
        }
    }

    /// Metric projector of the ambient space onto the vertical space at `p`.
    pub fn vertical_projector(&self, p: &DVector<T>) -> DMatrix<T> {
        let metric = &self.total.metric;
        match &self.construction {
            Construction::Hopf(h) => {
                let j = self.differential(p);
                let tsigns = h.target_signs();
                let eta = metric.matrix();
                let mut jt = j.transpose();
                for (c, s) in tsigns.iter().enumerate() {
                    if s.is_negative() {
                        jt.column_mut(c).neg_mut();
                    }
                }
                let wh = eta * jt;
                let q = projector_onto(metric, &wh).expect("complement of the kernel is non-degenerate");
                let n = self.ambient_dim();
                DMatrix::identity(n, n) - q
            }
            _ => {
                let w = columns(&self.vertical_spanning(p), self.ambient_dim());
                projector_onto(metric, &w).expect("fibre metric is non-degenerate")
            }
        }
    }

    pub fn horizontal_projector(&self, p: &DVector<T>) -> DMatrix<T> {
        self.tangent_projector(p) - self.vertical_projector(p)
    }

    pub fn vertical_frame(&self, p: &DVector<T>) -> Result<OrthonormalFrame<T>> {
        let f = indefinite_gram_schmidt(&self.total.metric, &self.vertical_spanning(p))?;
        if f.len() != self.fibre.dim {
            return Err(Error::Degenerate(format!(
                "vertical space has dimension {} instead of {}",
                f.len(),
                self.fibre.dim
            )));
        }
        Ok(f)
    }

    pub fn horizontal_frame(&self, p: &DVector<T>) -> Result<OrthonormalFrame<T>> {
        let h = self.horizontal_projector(p);
        let cols: Vec<DVector<T>> = (0..self.ambient_dim()).map(|k| h.column(k).into_owned()).collect();
        let f = indefinite_gram_schmidt(&self.total.metric, &cols)?;
        if f.len() != self.n() {
            return Err(Error::Degenerate(format!(
                "horizontal space has dimension {} instead of {}",
                f.len(),
                self.n()
            )));
        }
        Ok(f)
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<T> {
        self.total.sample_point(rng, 0.8)
    }

    /// Tangent vector of the total space (composites: tangent to the quotient).
    pub fn sample_tangent<R: Rng + ?Sized>(&self, rng: &mut R, p: &DVector<T>) -> DVector<T> {
        let v = self.total.sample_tangent(rng, p);
        self.tangent_projector(p) * v
    }

    pub fn sample_horizontal<R: Rng + ?Sized>(&self, rng: &mut R, p: &DVector<T>) -> DVector<T> {
        let v = self.total.sample_tangent(rng, p);
        self.horizontal_projector(p) * v
    }

    pub fn sample_vertical<R: Rng + ?Sized>(&self, rng: &mut R, p: &DVector<T>) -> DVector<T> {
        let v = self.total.sample_tangent(rng, p);
        self.vertical_projector(p) * v
    }

    /// Residual of `q ∈ π⁻¹(π(p))`.
    pub fn same_fibre_residual(&self, p: &DVector<T>, q: &DVector<T>) -> T {
        match &self.construction {
            Construction::Hopf(_) => (self.eval(q) - self.eval(p)).norm(),
            Construction::Quotient(m) => m.orbit_residual(p, q),
            Construction::Composite(c) | Construction::Composed { outer: c, .. } => c.full.orbit_residual(p, q),
        }
    }

    /// Point on the fibre through `p` reached by the geodesic with vertical
    /// initial velocity `v`.
    pub fn fibre_geodesic(&self, p: &DVector<T>, v: &DVector<T>, s: T) -> DVector<T> {
        self.total.geodesic_unchecked(p, v, s)
    }

    /// Horizontal lift at `p` of a tangent vector of the explicit target.
    pub fn horizontal_lift(&self, p: &DVector<T>, w: &DVector<T>) -> Result<DVector<T>> {
        let TargetKind::Explicit = self.target_kind else {
            return Err(Error::InvalidParameters("lift of a base vector needs an explicit target".into()));
        };
        let hf = self.horizontal_frame(p)?;
        let hm = columns(&hf.vectors, self.ambient_dim());
        let a = self.differential(p) * &hm;
        let (c, r) = least_squares(&a, w);
        if r > T::lit(TRANSPORT_TOL) * (T::one() + w.norm()) {
            return Err(Error::NotInImage(r.to_f64()));
        }
        Ok(hm * c)
    }

    /// Horizontal vector at `q` with the same pushforward as the horizontal
    /// `x` at `p`, where `q` lies on the fibre through `p`.
    pub fn transport_horizontal(&self, p: &DVector<T>, x: &DVector<T>, q: &DVector<T>) -> Result<DVector<T>> {
        let res = self.same_fibre_residual(p, q);
        if res > T::lit(1e-8) {
            return Err(Error::NotOnFibre(res.to_f64()));
        }
        match &self.construction {
            Construction::Hopf(_) => self.horizontal_lift(q, &self.push(p, x)),
            Construction::Quotient(m) => {
                let (u, _) = m.orbit_solve(p, q);
                Ok(self.horizontal_projector(q) * m.right_mul(x, &u))
            }
            Construction::Composite(c) | Construction::Composed { outer: c, .. } => {
                let (u, _) = c.full.orbit_solve(p, q);
                Ok(self.horizontal_projector(q) * c.full.right_mul(x, &u))
            }
        }
    }

    /// Residual of the target quadric equation at the image of `p`.
    pub fn target_residual(&self, p: &DVector<T>) -> Option<T> {
        self.target.as_ref().map(|t| t.membership_residual(&self.eval(p)))
    }
}

/// Parses `pi3`, `pi_H`, `pi_H[2,1]` or `all`.
pub fn resolve<T: Real>(id: &str) -> Result<Vec<FibrationSpec<T>>> {
    let id = id.trim();
    if id == "all" {
        return Ok(default_instances());
    }
    let (name, params) = match id.find('[') {
        Some(k) => {
            let inner = id[k + 1..]
                .strip_suffix(']')
                .ok_or_else(|| Error::UnknownFibration(id.to_string()))?;
            let ps: std::result::Result<Vec<usize>, _> = inner.split(',').map(|s| s.trim().parse()).collect();
            (&id[..k], Some(ps.map_err(|_| Error::UnknownFibration(id.to_string()))?))
        }
        None => (id, None),
    };
    let defaults = default_params(name).ok_or_else(|| Error::UnknownFibration(id.to_string()))?;
    match params {
        None => defaults.iter().map(|ps| build(name, ps)).collect(),
        Some(ps) => Ok(vec![build(name, &ps)?]),
    }
}

fn default_params(name: &str) -> Option<Vec<Vec<usize>>> {
    Some(match name {
        "pi1" | "pi2" | "pi3" | "pi4" | "pi5" | "pi6" | "pi7" | "pi8" | "pi9" => vec![vec![]],
        "pi_C" | "pi_H" => vec![vec![2, 0], vec![2, 1], vec![2, 2]],
        "pi_A" | "pi_B" => vec![vec![2]],
        "pi_CH" => vec![vec![1, 0]],
        "pi_CB" | "pi_AB" => vec![vec![1]],
        _ => return None,
    })
}

fn arity(name: &str) -> usize {
    match name {
        "pi_C" | "pi_H" | "pi_CH" => 2,
        "pi_A" | "pi_B" | "pi_CB" | "pi_AB" => 1,
        _ => 0,
    }
}

pub fn build<T: Real>(name: &str, ps: &[usize]) -> Result<FibrationSpec<T>> {
    use AlgebraTag::*;
    if ps.len() != arity(name) {
        return Err(Error::InvalidParameters(format!(
            "{name} takes {} parameter(s), got {}",
            arity(name),
            ps.len()
        )));
    }
    match name {
        "pi1" => FibrationSpec::hopf(name, C, Variant::Phi1),
        "pi2" => FibrationSpec::hopf(name, H, Variant::Phi1),
        "pi3" => FibrationSpec::hopf(name, O, Variant::Phi1),
        "pi4" => FibrationSpec::hopf(name, C, Variant::Phi2),
        "pi5" => FibrationSpec::hopf(name, H, Variant::Phi2),
        "pi6" => FibrationSpec::hopf(name, O, Variant::Phi2),
        "pi7" => FibrationSpec::hopf(name, A, Variant::Phi1),
        "pi8" => FibrationSpec::hopf(name, B, Variant::Phi1),
        "pi9" => FibrationSpec::hopf(name, Oprime, Variant::Phi1),
        "pi_C" => FibrationSpec::quotient(C, ps[0], ps[1]),
        "pi_H" => FibrationSpec::quotient(H, ps[0], ps[1]),
        "pi_A" => FibrationSpec::quotient(A, ps[0], 0),
        "pi_B" => FibrationSpec::quotient(B, ps[0], 0),
        "pi_CH" => CompositeModel::new(H, C, ps[0], ps[1])?.spec(),
        "pi_CB" => CompositeModel::new(B, C, ps[0], 0)?.spec(),
        "pi_AB" => CompositeModel::new(B, A, ps[0], 0)?.spec(),
        _ => Err(Error::UnknownFibration(name.to_string())),
    }
}

pub const FAMILY_ORDER: [&str; 16] = [
    "pi1", "pi2", "pi3", "pi4", "pi5", "pi6", "pi7", "pi8", "pi9", "pi_C", "pi_A", "pi_H", "pi_B", "pi_CH", "pi_CB",
    "pi_AB",
];

/// Every family at its default parameters, in catalog order.
pub fn default_instances<T: Real>() -> Vec<FibrationSpec<T>> {
    FAMILY_ORDER
        .iter()
        .flat_map(|name| {
            default_params(name)
                .unwrap()
                .into_iter()
                .map(move |ps| build::<T>(name, &ps).expect("default parameters are valid"))
        })
        .collect()
}
