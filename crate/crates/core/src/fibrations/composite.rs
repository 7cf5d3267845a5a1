//! Two-step quotients `K^{m+1} ⊃ H → H/S → H/K` for `S ⊂ K`.
//!
//! Points of the intermediate space `H/S` are carried by representatives in
//! `H`; its tangent vectors are the `S`-horizontal vectors there.

use nalgebra::{DMatrix, DVector};

use super::{
    quadric_name, BaseDescriptor, Construction, FibrationSpec, FibreDescriptor, QuotientModel, TargetKind,
};
use crate::algebra::AlgebraTag;
use crate::error::{Error, Result};
use crate::linalg::{columns, projector_onto};
use crate::scalar::Real;
use crate::spaces::PseudoHyperbolicSpace;

#[derive(Clone, Debug, PartialEq)]
pub struct CompositeModel {
    pub full: QuotientModel,
    pub inner: QuotientModel,
}

impl CompositeModel {
    pub fn new(algebra: AlgebraTag, group: AlgebraTag, m: usize, t: usize) -> Result<Self> {
        if algebra == group {
            return Err(Error::IncompatibleComposition("the subgroup must be proper".into()));
        }
        Ok(CompositeModel {
            full: QuotientModel::new(algebra, algebra, m, t)?,
            inner: QuotientModel::new(algebra, group, m, t)?,
        })
    }

    pub fn id(&self) -> String {
        format!("pi_{}{}", self.inner.group.name(), self.full.algebra.name())
    }

    fn m(&self) -> usize {
        self.full.m
    }

    /// `(dim, index)` of the intermediate space `H/S`.
    pub fn middle_dims(&self) -> (usize, usize) {
        let m = self.m();
        let t = self.full.t;
        use AlgebraTag::*;
        match (self.full.algebra, self.inner.group) {
            (H, C) => (4 * m + 2, 4 * t + 2),
            (B, C) => (4 * m + 2, 2 * m),
            (B, A) => (4 * m + 2, 2 * m + 1),
            _ => unreachable!("validated in new"),
        }
    }

    pub fn middle_name(&self) -> String {
        let m = self.m();
        let mm = 2 * m + 1;
        use AlgebraTag::*;
        match (self.full.algebra, self.inner.group) {
            (H, C) => format!("CH^{mm}_{}", 2 * self.full.t + 1),
            (B, C) => format!("CH^{mm}_{m}"),
            (B, A) => format!("AP^{mm}"),
            _ => unreachable!("validated in new"),
        }
    }

    pub fn fibre_descriptor(&self) -> FibreDescriptor {
        use AlgebraTag::*;
        let (index, model) = match (self.full.algebra, self.inner.group) {
            (H, C) => (2, "CH^1_1"),
            (B, C) => (0, "CH^1"),
            (B, A) => (1, "AP^1"),
            _ => unreachable!("validated in new"),
        };
        FibreDescriptor {
            dim: 2,
            index,
            model: model.to_string(),
        }
    }

    fn base(&self) -> (BaseDescriptor, (usize, usize)) {
        let m = self.m();
        let algebra = self.full.algebra;
        let s = if algebra == AlgebraTag::H { 4 * self.full.t } else { 2 * m };
        (
            BaseDescriptor::QuotientBase {
                algebra,
                m,
                t: self.full.t,
            },
            (4 * m, s),
        )
    }

    fn params(&self) -> Vec<usize> {
        if self.full.algebra.is_division() {
            vec![self.m(), self.full.t]
        } else {
            vec![self.m()]
        }
    }

    pub fn spec<T: Real>(&self) -> Result<FibrationSpec<T>> {
        let (base, base_dims) = self.base();
        Ok(FibrationSpec {
            id: self.id(),
            params: self.params(),
            construction: Construction::Composite(self.clone()),
            total: self.full.space(),
            total_dims: self.middle_dims(),
            total_name: self.middle_name(),
            base,
            base_dims,
            fibre: self.fibre_descriptor(),
            target_kind: TargetKind::Quotient,
            target: None,
        })
    }

    /// The first step `H → H/S`, itself a quotient by a circle or a hyperbola.
    pub fn inner_spec<T: Real>(&self) -> Result<FibrationSpec<T>> {
        let total: PseudoHyperbolicSpace<T> = self.inner.space();
        let (a, l) = (total.m, total.t);
        let (n, s) = self.middle_dims();
        let group = self.inner.group;
        let mm = 2 * self.m() + 1;
        let tt = match (self.full.algebra, group) {
            (AlgebraTag::H, _) => 2 * self.full.t + 1,
            (_, AlgebraTag::C) => self.m(),
            _ => mm,
        };
        let params = if group.is_division() { vec![mm, tt] } else { vec![mm] };
        Ok(FibrationSpec {
            id: format!("pi_{}", group.name()),
            params,
            construction: Construction::Quotient(self.inner.clone()),
            total_dims: (a, l),
            total_name: quadric_name(a, l),
            base: BaseDescriptor::QuotientBase {
                algebra: group,
                m: mm,
                t: tt,
            },
            base_dims: (n, s),
            fibre: FibreDescriptor {
                dim: 1,
                index: l - s,
                model: quadric_name(1, l - s),
            },
            target_kind: TargetKind::Quotient,
            target: None,
            total,
        })
    }

    /// Tangent projector of `H/S` at a representative: `P − v_S`.
    pub fn inner_horizontal_projector<T: Real>(&self, total: &PseudoHyperbolicSpace<T>, p: &DVector<T>) -> DMatrix<T> {
        let w = columns(&self.inner.vertical_spanning(p), p.len());
        let v = projector_onto(&total.metric, &w).expect("inner fibres are non-degenerate");
        total.tangent_projector(p) - v
    }

    /// `h^S(z·b)` for the imaginary units `b ∈ K` outside `S`.
    pub fn vertical_spanning<T: Real>(&self, total: &PseudoHyperbolicSpace<T>, p: &DVector<T>) -> Vec<DVector<T>> {
        let gi = self.inner.group_indices();
        let h = self.inner_horizontal_projector(total, p);
        (1..self.full.d())
            .filter(|k| !gi.contains(k))
            .map(|k| {
                let mut a = vec![T::zero(); self.full.d()];
                a[k] = T::one();
                &h * self.full.right_mul(p, &a)
            })
            .collect()
    }
}

/// `outer ∘ inner` where `inner` is the first step of the composite `outer`.
pub fn compose<T: Real>(outer: &FibrationSpec<T>, inner: &FibrationSpec<T>) -> Result<FibrationSpec<T>> {
    let Construction::Composite(c) = &outer.construction else {
        return Err(Error::IncompatibleComposition(format!("{} is not a two-step quotient", outer.label())));
    };
    let Construction::Quotient(q) = &inner.construction else {
        return Err(Error::IncompatibleComposition(format!("{} is not a quotient", inner.label())));
    };
    if q != &c.inner {
        return Err(Error::IncompatibleComposition(format!(
            "base of {} is not the total space of {}",
            inner.label(),
            outer.label()
        )));
    }
    let dim = outer.fibre.dim + inner.fibre.dim;
    let index = outer.fibre.index + inner.fibre.index;
    Ok(FibrationSpec {
        id: format!("{}.{}", outer.id, inner.id),
        params: outer.params.clone(),
        construction: Construction::Composed {
            outer: c.clone(),
            inner: q.clone(),
        },
        total: inner.total.clone(),
        total_dims: inner.total_dims,
        total_name: inner.total_name.clone(),
        base: outer.base.clone(),
        base_dims: outer.base_dims,
        fibre: FibreDescriptor {
            dim,
            index,
            model: quadric_name(dim, index),
        },
        target_kind: TargetKind::Quotient,
        target: None,
    })
}
