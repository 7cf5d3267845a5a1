use hopf_submersions::classify::{
    admissible, catalog, catalog_rows, entry_for, from_json, lookup, structural_case, to_json, DimRow, Existence,
};
use hopf_submersions::fibrations::default_instances;
use proptest::prelude::*;

proptest! {
    #[test]
    fn admissible_solutions_solve_the_index_equations(n in 1usize..40, s in 0usize..40, r in 1usize..16, rp in 0usize..16) {
        let a = admissible(n, s, r, rp);
        for &(k, q1, q2) in &a.solutions {
            prop_assert_eq!(k * (r + 1), n);
            prop_assert_eq!(q1 + q2, k);
            prop_assert_eq!(q1 * (rp + 1) + q2 * (r - rp), s);
        }
        // brute force over every split of k
        if rp <= r && s <= n && n % (r + 1) == 0 {
            let k = n / (r + 1);
            let count = (0..=k).filter(|q1| q1 * (rp + 1) + (k - q1) * (r - rp) == s).count();
            prop_assert_eq!(a.solutions.len(), count);
        } else {
            prop_assert!(!a.is_admissible());
        }
    }

    #[test]
    fn structural_rows_are_admissible(n in 1usize..33, s in 0usize..33, r in prop::sample::select(vec![1usize, 3, 7]), rp in 0usize..8) {
        let d = DimRow::new(n, s, r, rp);
        if structural_case(&d).is_some() {
            prop_assert!(admissible(n, s, r, rp).is_admissible());
            prop_assert_eq!(n % (r + 1), 0);
        }
    }
}

#[test]
fn every_existing_row_is_admissible() {
    for (d, id, e) in catalog_rows(32) {
        if e == Existence::Yes {
            assert!(admissible(d.n, d.s, d.r, d.r_prime).is_admissible(), "{id} {d:?}");
            assert!(structural_case(&d).is_some(), "{id} {d:?}");
        }
    }
}

#[test]
fn no_row_is_both_existent_and_nonexistent() {
    let rows = catalog_rows(32);
    for (d, id, e) in &rows {
        for (d2, id2, e2) in &rows {
            if d == d2 && e != e2 {
                panic!("{id} and {id2} disagree on {d:?}");
            }
        }
    }
}

#[test]
fn catalog_json_round_trip() {
    let c = catalog();
    assert_eq!(from_json(&to_json(&c)).unwrap(), c);
    assert!(from_json("{").is_err());
}

#[test]
fn lookup_finds_the_complex_and_para_complex_quotients() {
    let ids: Vec<(String, Vec<usize>)> = lookup(3, 1).into_iter().map(|(e, ps)| (e.id, ps)).collect();
    assert!(ids.contains(&("pi_C".to_string(), vec![1, 0])));
    assert!(ids.contains(&("pi_A".to_string(), vec![1])));
    assert!(lookup(4, 0).is_empty());
    let ids: Vec<String> = lookup(5, 2).into_iter().map(|(e, _)| e.id).collect();
    assert_eq!(ids, vec!["pi_A"]);
}

#[test]
fn default_instances_are_catalogued() {
    for f in default_instances::<f64>() {
        let (e, ps) = entry_for(&f).unwrap_or_else(|| panic!("{} missing", f.label()));
        assert_eq!(e.exists, Existence::Yes);
        if f.total_is_quadric() {
            let d = DimRow::new(f.n(), f.base_dims.1, f.r(), f.fibre.index);
            assert!(e.rows(32).contains(&(ps, d)), "{}", f.label());
        }
    }
}
