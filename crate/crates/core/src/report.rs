//! Per-identity residual records and the per-fibration verification report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether the observed quantity must stay below or above its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Max,
    Min,
}

/// `(id, anchor, default tolerance, bound)` for every identity the suite knows.
/// Residuals of tensorial identities are divided by the product of the
/// Euclidean norms of their arguments.
pub const IDENTITIES: &[(&str, &str, f64, Bound)] = &[
    ("algebra.composition", "N(xy) = N(x) N(y)", 1e-12, Bound::Max),
    ("algebra.table", "table product = doubling recursion (a,b)(c,d) = (ac + γ d̄ b, d a + b c̄)", 1e-12, Bound::Max),
    ("membership.total", "<p,p> = 1/c on the total quadric", 1e-12, Bound::Max),
    ("membership.target", "<π(p),π(p)> = -1/4 on the target quadric", 1e-10, Bound::Max),
    ("pi9.polynomial", "x̄y on split octonions = expanded 9-component polynomial", 1e-12, Bound::Max),
    ("submersion.rank", "rank dπ_p = dim B", 0.5, Bound::Max),
    ("submersion.isometry", "g'(dπX, dπY) = g(X,Y) for horizontal X, Y", 1e-9, Bound::Max),
    ("vertical.signature", "index of the vertical space = fibre index", 0.5, Bound::Max),
    ("fibre.geodesic", "geodesics with vertical initial velocity stay in the fibre", 1e-8, Bound::Max),
    ("connection.audit", "∇_E(Pw) = -c<p,w> E", 1e-8, Bound::Max),
    ("connection.metric", "E<F,G> = <∇_E F, G> + <F, ∇_E G>", 1e-6, Bound::Max),
    ("curvature.symmetry", "R(E,F,G,H) = -R(F,E,G,H) = -R(E,F,H,G) and first Bianchi", 1e-12, Bound::Max),
    ("t.vanishing", "T_E F = 0", 1e-6, Bound::Max),
    ("a.self", "A_X X = 0", 1e-7, Bound::Max),
    ("a.alternating", "A_X Y = -A_Y X", 1e-7, Bound::Max),
    ("a.skew", "g(A_E F, G) = -g(F, A_E G)", 1e-7, Bound::Max),
    ("a.dual_route", "A_X V = h ∇_V X̃ for the basic extension X̃", 1e-6, Bound::Max),
    ("a.axaxv_spacelike", "A_X A_X V = -c g(X,X) V, g(X,X) = 1", 1e-6, Bound::Max),
    ("a.axaxv_timelike", "A_X A_X V = -c g(X,X) V, g(X,X) = -1", 1e-6, Bound::Max),
    ("a.injective", "smallest singular value of V -> A_X V", 1e-6, Bound::Min),
    ("oneill.a", "R(X,Y,Z,Z') = R'(X,Y,Z,Z') - 2g(A_XY,A_ZZ') + g(A_YZ,A_XZ') - g(A_XZ,A_YZ')", 1e-6, Bound::Max),
    ("oneill.b", "R(X,Y,Z,U) = g((∇_Z A)_X Y, U)", 1e-4, Bound::Max),
    ("oneill.c", "R(X,U,Y,V) = g((∇_U A)_X Y, V) + g(A_X U, A_Y V)", 1e-4, Bound::Max),
    ("oneill.d", "R(U,V,W,W') = R̂(U,V,W,W')", 1e-6, Bound::Max),
    ("oneill.e", "R(U,V,W,X) = 0", 1e-6, Bound::Max),
    ("oneill.cor_a", "R(X,Y,X,Y) = R'(X,Y,X,Y) - 3g(A_XY,A_XY)", 1e-6, Bound::Max),
    ("oneill.cor_b", "R(X,U,X,U) = g(A_XU,A_XU)", 1e-6, Bound::Max),
    ("ranjan", "A^v A^w + A^w A^v = -2c g(v,w) Id", 1e-6, Bound::Max),
    ("jacobi.self_adjoint", "g(R'_X Z, W) = g(Z, R'_X W)", 1e-6, Bound::Max),
    ("jacobi.clusters", "number of distinct eigenvalues of R'_X", 0.5, Bound::Max),
    ("jacobi.multiplicities", "multiplicities (r, n-1-r)", 0.5, Bound::Max),
    ("jacobi.eigenvalues", "spec R'_X ⊂ {-4ε_X, -ε_X}", 1e-6, Bound::Max),
    ("jacobi.ratio", "λ/μ = 4", 1e-5, Bound::Max),
    ("jacobi.diagonalizable", "(R'_X + 4ε_X)(R'_X + ε_X) = 0", 1e-6, Bound::Max),
    ("osserman.lambda", "X = bY + A_Y W for Y ∈ E_λ(X)", 1e-6, Bound::Max),
    ("osserman.mu_kernel", "A_X Y = 0 for Y ∈ E_μ(X)", 1e-6, Bound::Max),
    ("osserman.mu_reciprocity", "R'_Y X = -ε_Y X for Y ∈ E_μ(X)", 1e-6, Bound::Max),
    ("clifford.anticommutation", "J_s J_t + J_t J_s = -2ε_s δ_st Id", 1e-6, Bound::Max),
    ("clifford.skew", "g(J_s X, Y) = -g(X, J_s Y)", 1e-6, Bound::Max),
    ("clifford.curvature", "R' = λ0 R_1 + Σ ε_s(λ_s - λ0)/3 R_{J_s}, λ0 = -1, λ_s = -4", 1e-6, Bound::Max),
    ("clifford.signs", "ε_s = c g(v_s,v_s) matches the fibre signature", 0.5, Bound::Max),
    ("special_basis.orthonormal", "special basis is orthonormal, relative to the Euclidean norms", 1e-8, Bound::Max),
    ("special_basis.a_blocks", "A_{L_α} L_β = 0, relative to the Euclidean norms", 1e-6, Bound::Max),
    ("special_basis.index", "n = k(r+1), s = q1(r'+1) + q2(r-r')", 0.5, Bound::Max),
    ("special_basis.basic", "π_* of each basis member is constant along the fibre", 1e-7, Bound::Max),
    ("special_basis.fibre_signature", "fibre signature forced by the base index", 0.5, Bound::Max),
    ("holonomy.isometry", "transport around a closed base loop preserves fibre inner products, relative to the point norms", 1e-6, Bound::Max),
    ("holonomy.retrace", "π(horizontal lift) = base curve, relative to the squared point norm", 1e-7, Bound::Max),
    ("composite.fibre", "fibre of a composition has dim r1 + r2 and index r1' + r2'", 0.5, Bound::Max),
    ("composite.orbit", "fibres of the composition are orbits of the unit group of K", 1e-8, Bound::Max),
];

pub fn identity(id: &str) -> Option<(&'static str, &'static str, f64, Bound)> {
    IDENTITIES.iter().copied().find(|(i, ..)| *i == id)
}

/// Tolerances indexed by identity id, defaults overridable per identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances(pub BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(IDENTITIES.iter().map(|(id, _, t, _)| (id.to_string(), *t)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, id: &str) -> f64 {
        self.0[id]
    }

    pub fn set(&mut self, id: &str, value: f64) -> Result<()> {
        if !self.0.contains_key(id) {
            return Err(Error::UnknownIdentity(id.to_string()));
        }
        if !(value > 0.0) {
            return Err(Error::InvalidParameters(format!("tolerance for {id} must be positive")));
        }
        self.0.insert(id.to_string(), value);
        Ok(())
    }

    /// Parses `id=value`.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (id, v) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameters(format!("expected id=value, got {spec}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameters(format!("bad tolerance value in {spec}")))?;
        self.set(id.trim(), v)
    }
}

fn null_as_infinity<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// Worst residual observed for one identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub samples: usize,
    /// Non-finite values are written as `null` and read back as infinity.
    #[serde(deserialize_with = "null_as_infinity")]
    pub max_residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    pub reprojections: usize,
}

impl Check {
    pub fn new(id: &str, tols: &Tolerances) -> Self {
        let (_, anchor, _, bound) = identity(id).unwrap_or_else(|| panic!("unregistered identity {id}"));
        Check {
            id: id.to_string(),
            anchor: anchor.to_string(),
            samples: 0,
            max_residual: match bound {
                Bound::Max => 0.0,
                Bound::Min => f64::INFINITY,
            },
            tolerance: tols.get(id),
            bound,
            pass: true,
            reprojections: 0,
        }
    }

    /// Records one residual; a NaN poisons the check.
    pub fn observe(&mut self, r: f64) {
        self.samples += 1;
        let worse = match self.bound {
            Bound::Max => !(r <= self.max_residual),
            Bound::Min => !(r >= self.max_residual),
        };
        if worse && !self.max_residual.is_nan() {
            self.max_residual = r;
        }
        self.update();
    }

    pub fn merge(&mut self, other: &Check) {
        debug_assert_eq!(self.id, other.id);
        if other.samples > 0 {
            self.samples += other.samples - 1;
            self.observe(other.max_residual);
        }
        self.reprojections += other.reprojections;
        self.update();
    }

    fn update(&mut self) {
        self.pass = match self.bound {
            Bound::Max => self.max_residual <= self.tolerance,
            Bound::Min => self.max_residual >= self.tolerance,
        };
    }
}

/// Ordered collection of checks keyed by id; merging follows insertion order.
#[derive(Clone, Debug, Default)]
pub struct CheckSet {
    checks: Vec<Check>,
}

impl CheckSet {
    pub fn new() -> Self {
        CheckSet::default()
    }

    pub fn entry(&mut self, id: &str, tols: &Tolerances) -> &mut Check {
        if let Some(k) = self.checks.iter().position(|c| c.id == id) {
            &mut self.checks[k]
        } else {
            self.checks.push(Check::new(id, tols));
            self.checks.last_mut().unwrap()
        }
    }

    pub fn observe(&mut self, id: &str, tols: &Tolerances, r: f64) {
        self.entry(id, tols).observe(r);
    }

    pub fn merge(&mut self, other: CheckSet, tols: &Tolerances) {
        for c in other.checks {
            self.entry(&c.id, tols).merge(&c);
        }
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn into_vec(self) -> Vec<Check> {
        self.checks
    }

    pub fn iter(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter()
    }
}

pub const CURVATURE_CONVENTION: &str =
    "R(E,F) = ∇_E∇_F - ∇_F∇_E - ∇_[E,F]; R(X,Y,Z,W) = g(R(X,Y)W, Z), so R(X,Y,X,Y) = c(g(X,X)g(Y,Y) - g(X,Y)^2)";

/// Parameters at which fibre geodesics were sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibreCoverage {
    /// Half-width of the sampled interval `[-range, range]`.
    pub range: f64,
    pub samples: usize,
    pub t_min: f64,
    pub t_max: f64,
}

impl FibreCoverage {
    pub fn new(range: f64) -> Self {
        FibreCoverage {
            range,
            samples: 0,
            t_min: f64::INFINITY,
            t_max: f64::NEG_INFINITY,
        }
    }

    pub fn record(&mut self, t: f64) {
        self.samples += 1;
        self.t_min = self.t_min.min(t);
        self.t_max = self.t_max.max(t);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub fibration: String,
    pub total: String,
    pub base: String,
    pub fibre: String,
    pub seed: u64,
    pub samples: usize,
    pub expensive: bool,
    pub convention: String,
    pub finite_difference_step: f64,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibre_coverage: Option<FibreCoverage>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "## {}\n\n{} → {}, fibre {}; seed {}, {} samples\n\n",
            self.fibration, self.total, self.base, self.fibre, self.seed, self.samples
        );
        s.push_str("| identity | samples | worst | tolerance | pass |\n|---|---|---|---|---|\n");
        for c in &self.checks {
            let cmp = match c.bound {
                Bound::Max => "≤",
                Bound::Min => "≥",
            };
            s.push_str(&format!(
                "| `{}` {} | {} | {:.3e} | {} {:.1e} | {} |\n",
                c.id,
                c.anchor,
                c.samples,
                c.max_residual,
                cmp,
                c.tolerance,
                if c.pass { "yes" } else { "NO" }
            ));
        }
        if let Some(fc) = &self.fibre_coverage {
            s.push_str(&format!(
                "\nfibre geodesics: {} parameters in [{:.3}, {:.3}] of [-{}, {}]\n",
                fc.samples, fc.t_min, fc.t_max, fc.range, fc.range
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<&str> = IDENTITIES.iter().map(|x| x.0).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), IDENTITIES.len());
    }

    #[test]
    fn observe_and_merge() {
        let t = Tolerances::default();
        let mut a = Check::new("a.self", &t);
        a.observe(1e-9);
        let mut b = Check::new("a.self", &t);
        b.observe(1e-3);
        b.observe(1e-10);
        a.merge(&b);
        assert_eq!(a.samples, 3);
        assert_eq!(a.max_residual, 1e-3);
        assert!(!a.pass);
        let mut n = Check::new("a.self", &t);
        n.observe(f64::NAN);
        n.observe(0.0);
        assert!(!n.pass);
    }

    #[test]
    fn min_bound() {
        let t = Tolerances::default();
        let mut c = Check::new("a.injective", &t);
        c.observe(0.5);
        c.observe(0.9);
        assert_eq!(c.max_residual, 0.5);
        assert!(c.pass);
        c.observe(1e-9);
        assert!(!c.pass);
    }

    #[test]
    fn overrides() {
        let mut t = Tolerances::default();
        t.apply_override("oneill.a=1e-3").unwrap();
        assert_eq!(t.get("oneill.a"), 1e-3);
        assert!(matches!(t.apply_override("nope=1"), Err(Error::UnknownIdentity(_))));
        assert!(t.apply_override("oneill.a=-1").is_err());
        assert!(t.apply_override("oneill.a").is_err());
    }

    #[test]
    fn infinite_residuals_survive_json() {
        let t = Tolerances::default();
        let mut c = Check::new("special_basis.orthonormal", &t);
        c.observe(f64::INFINITY);
        let r = VerificationReport {
            fibration: "pi1".into(),
            total: "H^3_3".into(),
            base: "H^2_2(-4)".into(),
            fibre: "H^1_1".into(),
            seed: 1,
            samples: 1,
            expensive: false,
            convention: CURVATURE_CONVENTION.into(),
            finite_difference_step: 1e-4,
            checks: vec![c],
            fibre_coverage: None,
            pass: false,
        };
        let json = r.to_json();
        assert!(json.contains("null"));
        assert_eq!(VerificationReport::from_json(&json).unwrap(), r);
    }
}
