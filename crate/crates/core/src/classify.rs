//! Dimension and index bookkeeping for submersions `H^a_l → B^n_s` with
//! totally geodesic fibres `H^r_{r′}`, and the catalog of the known ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibrations::{build, FibrationSpec};
use crate::scalar::Real;

/// Solutions `(k, q1, q2)` of `n = k(r+1)`, `q1 + q2 = k` and
/// `s = q1(r′+1) + q2(r−r′)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityInstance {
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub r_prime: usize,
    pub solutions: Vec<(usize, usize, usize)>,
}

impl AdmissibilityInstance {
    pub fn is_admissible(&self) -> bool {
        !self.solutions.is_empty()
    }
}

pub fn admissible(n: usize, s: usize, r: usize, r_prime: usize) -> AdmissibilityInstance {
    let mut solutions = Vec::new();
    if r_prime <= r && s <= n && n % (r + 1) == 0 {
        let k = n / (r + 1);
        for q1 in 0..=k {
            let q2 = k - q1;
            if q1 * (r_prime + 1) + q2 * (r - r_prime) == s {
                solutions.push((k, q1, q2));
            }
        }
    }
    AdmissibilityInstance {
        n,
        s,
        r,
        r_prime,
        solutions,
    }
}

/// Fibre indices allowed by parallelizability of the fibre's spacelike sphere
/// factor. Indices `0` and `1` are not constrained.
pub fn fibre_parallelizability_filter(r_prime: usize) -> bool {
    r_prime < 2 || r_prime == 3 || r_prime == 7
}

/// Dimension data of one row: total `H^a_l`, base `(n, s)`, fibre `H^r_{r′}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DimRow {
    pub a: usize,
    pub l: usize,
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub r_prime: usize,
}

impl DimRow {
    pub fn new(n: usize, s: usize, r: usize, r_prime: usize) -> Self {
        DimRow {
            a: n + r,
            l: s + r_prime,
            n,
            s,
            r,
            r_prime,
        }
    }

    pub fn key(&self) -> (usize, usize, usize, usize) {
        (self.n, self.s, self.r, self.r_prime)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    Yes,
    No,
    OutOfScopeProof,
}

/// How the dimensions of a row depend on its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `H^{d(m+1)−1}_l → K^m` over the algebra `K` of dimension `d`.
    Quotient { algebra: String },
    Fixed { row: DimRow },
    /// Two-step quotient with a non-quadric total space.
    Composite { total_algebra: String, base_algebra: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub row: String,
    pub total: String,
    pub base: String,
    pub fibre: String,
    pub params: Vec<String>,
    pub range: String,
    pub exists: Existence,
    pub shape: Shape,
    pub notes: String,
}

impl CatalogEntry {
    /// Parameter tuples with `n ≤ n_max` for which the entry is defined.
    pub fn parameter_values(&self, n_max: usize) -> Vec<Vec<usize>> {
        match &self.shape {
            Shape::Fixed { .. } => vec![vec![]],
            Shape::Quotient { algebra } => {
                let d = quotient_dim(algebra);
                let mut out = Vec::new();
                for m in 1..=n_max / d {
                    if self.params.len() == 2 {
                        out.extend((0..=m).map(|t| vec![m, t]));
                    } else {
                        out.push(vec![m]);
                    }
                }
                out
            }
            Shape::Composite { total_algebra, .. } => {
                let mut out = Vec::new();
                for m in 1..=n_max / 4 {
                    if total_algebra == "H" {
                        out.extend((0..=m).map(|t| vec![m, t]));
                    } else {
                        out.push(vec![m]);
                    }
                }
                out
            }
        }
    }

    /// Dimensions at the given parameters. Composite rows have no quadric
    /// total space and give `None`.
    pub fn dims(&self, params: &[usize]) -> Option<DimRow> {
        match &self.shape {
            Shape::Fixed { row } => Some(*row),
            Shape::Quotient { algebra } => {
                let m = *params.first()?;
                if m == 0 {
                    return None;
                }
                Some(match algebra.as_str() {
                    "C" => DimRow::new(2 * m, 2 * params.get(1)?, 1, 1),
                    "A" => DimRow::new(2 * m, m, 1, 0),
                    "H" => DimRow::new(4 * m, 4 * params.get(1)?, 3, 3),
                    "B" => DimRow::new(4 * m, 2 * m, 3, 1),
                    _ => return None,
                })
                .filter(|_| params.len() < 2 || params[1] <= m)
            }
            Shape::Composite { .. } => None,
        }
    }

    /// Rows with `n ≤ n_max`.
    pub fn rows(&self, n_max: usize) -> Vec<(Vec<usize>, DimRow)> {
        self.parameter_values(n_max)
            .into_iter()
            .filter_map(|ps| self.dims(&ps).map(|d| (ps, d)))
            .filter(|(_, d)| d.n <= n_max)
            .collect()
    }

    /// A concrete submersion realizing the entry.
    pub fn instantiate<T: Real>(&self, params: &[usize]) -> Result<FibrationSpec<T>> {
        if self.exists != Existence::Yes {
            return Err(Error::InvalidParameters(format!("{} does not exist", self.id)));
        }
        match self.id.as_str() {
            "pi_O1" => build("pi3", params),
            "pi_Oprime" => build("pi9", params),
            "pi_O2" => build("pi6", params),
            id => build(id, params),
        }
    }
}

fn quotient_dim(algebra: &str) -> usize {
    match algebra {
        "C" | "A" => 2,
        _ => 4,
    }
}

fn entry(
    id: &str,
    row: &str,
    total: &str,
    base: &str,
    fibre: &str,
    params: &[&str],
    range: &str,
    exists: Existence,
    shape: Shape,
    notes: &str,
) -> CatalogEntry {
    CatalogEntry {
        id: id.into(),
        row: row.into(),
        total: total.into(),
        base: base.into(),
        fibre: fibre.into(),
        params: params.iter().map(|s| s.to_string()).collect(),
        range: range.into(),
        exists,
        shape,
        notes: notes.into(),
    }
}

fn quotient(algebra: &str) -> Shape {
    Shape::Quotient { algebra: algebra.into() }
}

fn fixed(n: usize, s: usize, r: usize, r_prime: usize) -> Shape {
    Shape::Fixed {
        row: DimRow::new(n, s, r, r_prime),
    }
}

/// The classified submersions from quadrics, the composites between their
/// bases, and dimension rows known not to be realized.
pub fn catalog() -> Vec<CatalogEntry> {
    use Existence::*;
    vec![
        entry("pi_C", "a", "H^{2m+1}_{2t+1}", "CH^m_t", "H^1_1", &["m", "t"], "m ≥ 1, 0 ≤ t ≤ m", Yes, quotient("C"),
            "m = 1 gives pi1 (t = 1) and pi4 (t = 0)"),
        entry("pi_A", "b", "H^{2m+1}_m", "AP^m", "H^1", &["m"], "m ≥ 1", Yes, quotient("A"), "m = 1 gives pi7"),
        entry("pi_H", "c", "H^{4m+3}_{4t+3}", "HH^m_t", "H^3_3", &["m", "t"], "m ≥ 1, 0 ≤ t ≤ m", Yes, quotient("H"),
            "m = 1 gives pi2 (t = 1) and pi5 (t = 0)"),
        entry("pi_B", "d", "H^{4m+3}_{2m+1}", "BP^m", "H^3_1", &["m"], "m ≥ 1", Yes, quotient("B"), "m = 1 gives pi8"),
        entry("pi_O1", "e", "H^15_15", "H^8_8(-4)", "H^7_7", &[], "", Yes, fixed(8, 8, 7, 7), "realized by pi3"),
        entry("pi_Oprime", "f", "H^15_7", "H^8_4(-4)", "H^7_3", &[], "", Yes, fixed(8, 4, 7, 3), "realized by pi9"),
        entry("pi_O2", "g", "H^15_7", "H^8(-4)", "H^7_7", &[], "", Yes, fixed(8, 0, 7, 7), "realized by pi6"),
        entry("pi_CH", "i", "CH^{2m+1}_{2t+1}", "HH^m_t", "CH^1_1", &["m", "t"], "m ≥ 1, 0 ≤ t ≤ m", Yes,
            Shape::Composite { total_algebra: "H".into(), base_algebra: "C".into() }, "total space is not a quadric"),
        entry("pi_CB", "ii", "CH^{2m+1}_m", "BP^m", "CH^1", &["m"], "m ≥ 1", Yes,
            Shape::Composite { total_algebra: "B".into(), base_algebra: "C".into() }, "total space is not a quadric"),
        entry("pi_AB", "iii", "AP^{2m+1}", "BP^m", "AP^1", &["m"], "m ≥ 1", Yes,
            Shape::Composite { total_algebra: "B".into(), base_algebra: "A".into() }, "total space is not a quadric"),
        entry("none_H31", "-", "H^31_15", "H^16_8(-4)", "H^15_7", &[], "", No, fixed(16, 8, 15, 7),
            "excluded: an indefinite base of dimension r + 1 forces r′ ∈ {0, 1, 3}"),
        entry("none_OH2", "-", "H^23_7", "OH^2", "H^7_7", &[], "", No, fixed(16, 0, 7, 7),
            "excluded: no Clifford structure of rank 7 on the Cayley plane"),
        entry("none_OH2_1", "-", "H^23_15", "OH^2_1", "H^7_7", &[], "", No, fixed(16, 8, 7, 7),
            "excluded: no Clifford structure of rank 7 on the Cayley plane"),
        entry("none_OH2_2", "-", "H^23_23", "OH^2_2", "H^7_7", &[], "", No, fixed(16, 16, 7, 7),
            "excluded: no Clifford structure of rank 7 on the Cayley plane; the para-octonionic plane likewise"),
    ]
}

/// Entries with a quadric total space `H^a_l`, with the parameters realizing it.
pub fn lookup(a: usize, l: usize) -> Vec<(CatalogEntry, Vec<usize>)> {
    let mut out = Vec::new();
    for e in catalog() {
        for (ps, d) in e.rows(a) {
            if d.a == a && d.l == l {
                out.push((e.clone(), ps));
            }
        }
    }
    out
}

/// Catalog entry and parameters describing a concrete submersion.
pub fn entry_for<T: Real>(spec: &FibrationSpec<T>) -> Option<(CatalogEntry, Vec<usize>)> {
    let cat = catalog();
    if !spec.total_is_quadric() {
        return cat
            .into_iter()
            .find(|e| e.id == spec.id)
            .map(|e| (e, spec.params.clone()));
    }
    let row = DimRow::new(spec.n(), spec.base_dims.1, spec.r(), spec.fibre.index);
    cat.into_iter()
        .filter(|e| e.exists == Existence::Yes)
        .flat_map(|e| e.rows(row.n).into_iter().map(move |(ps, d)| (e.clone(), ps, d)))
        .find(|(_, _, d)| *d == row)
        .map(|(e, ps, _)| (e, ps))
}

/// Why a dimension row survives the structural constraints, if it does.
pub fn structural_case(d: &DimRow) -> Option<&'static str> {
    let DimRow { n, s, r, r_prime, .. } = *d;
    if !admissible(n, s, r, r_prime).is_admissible() {
        return None;
    }
    if n == r + 1 {
        if s == 0 || s == n {
            return (r_prime == r && matches!(r, 1 | 3 | 7)).then_some("definite quadric base");
        }
        let ok = r == 2 * r_prime + 1 && s == r_prime + 1 && fibre_parallelizability_filter(r_prime);
        return ok.then_some("indefinite quadric base");
    }
    let m = n / (r + 1);
    match r {
        1 if m >= 2 && r_prime == 1 && s % 2 == 0 => Some("complex hyperbolic base"),
        1 if m >= 2 && r_prime == 0 && s == m => Some("para-complex base"),
        3 if m >= 2 && r_prime == 3 && s % 4 == 0 => Some("quaternionic hyperbolic base"),
        3 if m >= 2 && r_prime == 1 && s == 2 * m => Some("para-quaternionic base"),
        7 if m == 2 && r_prime == 7 && s % 8 == 0 => Some("Cayley plane base"),
        _ => None,
    }
}

/// All rows with fibre dimension in `fibre_dims` and `n ≤ n_max` passing
/// [`structural_case`].
pub fn enumerate(fibre_dims: &[usize], n_max: usize) -> Vec<(DimRow, &'static str)> {
    let mut out = Vec::new();
    for &r in fibre_dims {
        for n in (r + 1..=n_max).step_by(r + 1) {
            for s in 0..=n {
                for rp in 0..=r {
                    let d = DimRow::new(n, s, r, rp);
                    if let Some(why) = structural_case(&d) {
                        out.push((d, why));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Catalog rows with a quadric total space and `n ≤ n_max`, sorted.
pub fn catalog_rows(n_max: usize) -> Vec<(DimRow, String, Existence)> {
    let mut out: Vec<_> = catalog()
        .into_iter()
        .flat_map(|e| {
            e.rows(n_max)
                .into_iter()
                .map(move |(_, d)| (d, e.id.clone(), e.exists))
        })
        .collect();
    out.sort_by_key(|x| x.0);
    out
}

pub fn to_json(entries: &[CatalogEntry]) -> String {
    serde_json::to_string_pretty(entries).expect("catalog entries serialize")
}

pub fn from_json(s: &str) -> Result<Vec<CatalogEntry>> {
    serde_json::from_str(s).map_err(|e| Error::InvalidParameters(format!("catalog json: {e}")))
}

pub fn to_markdown(entries: &[CatalogEntry]) -> String {
    let (realized, excluded): (Vec<_>, Vec<_>) = entries.iter().partition(|e| e.exists == Existence::Yes);
    let mut s = String::from("| row | id | total | base | fibre | parameters |\n|---|---|---|---|---|---|\n");
    for e in realized {
        s.push_str(&format!("| {} | {} | {} | {} | {} | {} |\n", e.row, e.id, e.total, e.base, e.fibre, e.range));
    }
    if !excluded.is_empty() {
        s.push_str("\nNot realized:\n\n| id | total | base | fibre | status | reason |\n|---|---|---|---|---|---|\n");
        for e in excluded {
            let status = match e.exists {
                Existence::No => "nonexistent",
                _ => "open",
            };
            s.push_str(&format!("| {} | {} | {} | {} | {} | {} |\n", e.id, e.total, e.base, e.fibre, status, e.notes));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_small_cases() {
        assert_eq!(admissible(4, 2, 1, 0).solutions, vec![(2, 0, 2), (2, 1, 1), (2, 2, 0)]);
        assert_eq!(admissible(8, 4, 7, 3).solutions, vec![(1, 0, 1), (1, 1, 0)]);
        assert!(!admissible(5, 2, 1, 0).is_admissible());
        assert!(!admissible(4, 1, 1, 1).is_admissible());
        assert!(!admissible(4, 2, 1, 2).is_admissible());
    }

    #[test]
    fn parallelizability() {
        let kept: Vec<usize> = (0..16).filter(|r| fibre_parallelizability_filter(*r)).collect();
        assert_eq!(kept, vec![0, 1, 3, 7]);
    }

    #[test]
    fn lookup_fifteen_seven() {
        let ids: Vec<String> = lookup(15, 7).into_iter().map(|(e, ps)| format!("{}{ps:?}", e.id)).collect();
        assert_eq!(
            ids,
            vec!["pi_C[7, 3]", "pi_A[7]", "pi_H[3, 1]", "pi_B[3]", "pi_Oprime[]", "pi_O2[]"]
        );
        assert!(lookup(6, 2).is_empty());
    }

    #[test]
    fn hopf_maps_map_to_rows() {
        for (name, id, ps) in [
            ("pi1", "pi_C", vec![1, 1]),
            ("pi4", "pi_C", vec![1, 0]),
            ("pi2", "pi_H", vec![1, 1]),
            ("pi5", "pi_H", vec![1, 0]),
            ("pi7", "pi_A", vec![1]),
            ("pi8", "pi_B", vec![1]),
            ("pi3", "pi_O1", vec![]),
            ("pi9", "pi_Oprime", vec![]),
            ("pi6", "pi_O2", vec![]),
        ] {
            let f = build::<f64>(name, &[]).unwrap();
            let (e, got) = entry_for(&f).unwrap();
            assert_eq!((e.id.as_str(), got), (id, ps), "{name}");
        }
    }

    #[test]
    fn enumeration_matches_catalog() {
        let found: Vec<_> = enumerate(&[1, 3, 7, 15], 32).into_iter().map(|(d, _)| d).collect();
        let listed: Vec<_> = catalog_rows(32).into_iter().map(|(d, _, _)| d).collect();
        assert_eq!(found, listed);
    }

    #[test]
    fn json_round_trip() {
        let c = catalog();
        assert_eq!(from_json(&to_json(&c)).unwrap(), c);
        let md = to_markdown(&c);
        let first: Vec<&str> = md.split("\n\n").next().unwrap().lines().collect();
        // 7 families and 3 composites
        assert_eq!(first.len(), 12);
        assert_eq!(md.lines().filter(|l| l.starts_with("| ")).count(), c.len() + 2);
    }
}
