use std::collections::HashSet;

use proptest::prelude::*;
use tandem_core::bipolar::{EdgeKind, Signature};
use tandem_core::kmsw::{
    bipolar_to_excursion, excursion_to_bipolar, phi, phi_inverse, rho_on_walks, sigma_on_walks,
};
use tandem_core::oracle::{exhaustive_walks, visit_walks};
use tandem_core::steps::{walk_stats, Region, Step, TandemWalk, WeightSpec};

fn all_walks(max_len: usize) -> Vec<TandemWalk> {
    let spec = WeightSpec::all_ones(3);
    let mut out = Vec::new();
    for n in 0..=max_len {
        visit_walks(&spec, n, (0, 0), Region::None, |w| out.push(w.clone())).unwrap();
    }
    out
}

fn sig_of(w: &TandemWalk) -> Signature {
    let s = walk_stats(w);
    Signature::new(s.a, s.b, s.c, s.d)
}

fn plain_vertices(o: &tandem_core::MarkedBipolarOrientation) -> usize {
    o.checked().unwrap().plain_vertex_count(o.vertices)
}

#[test]
fn dictionary_and_round_trip_up_to_length_five() {
    let mut codes = HashSet::new();
    for w in all_walks(5) {
        let o = phi(&w);
        assert!(o.validate().unwrap().is_pass(), "{w}: {:?}", o.validate());
        assert_eq!(phi_inverse(&o).unwrap(), w, "round trip of {w}");
        assert_eq!(o.plain_edge_count(), w.len() + 1);
        assert_eq!(plain_vertices(&o), w.se_count(), "{w}");
        assert_eq!(o.signature().unwrap(), sig_of(&w));
        let census = o.face_census().unwrap();
        let mut expected: Vec<(u32, u32)> = w
            .steps
            .iter()
            .filter_map(|s| match *s {
                Step::Face(i, j) => Some((i, j)),
                Step::SE => None,
            })
            .collect();
        expected.sort_unstable();
        assert_eq!(census.types, expected, "{w}");
        assert!(codes.insert(o.canonical_code()), "phi not injective at {w}");
    }
}

#[test]
fn involutions_up_to_length_five() {
    for w in all_walks(5) {
        let o = phi(&w);
        let r = o.rho().unwrap();
        let s = o.sigma().unwrap();
        assert!(r.validate().unwrap().is_pass(), "rho({w})");
        assert!(
            s.validate().unwrap().is_pass(),
            "sigma({w}): {:?}",
            s.validate()
        );
        for m in [&r, &s] {
            let mut n = m.clone();
            n.normalize_sink();
            assert_eq!(&n, m, "sink rotation not normalized at {w}");
        }
        assert!(r.rho().unwrap().isomorphic(&o));
        assert!(s.sigma().unwrap().isomorphic(&o));
        assert!(r.sigma().unwrap().isomorphic(&s.rho().unwrap()));
        let g = sig_of(&w);
        assert_eq!(r.signature().unwrap(), Signature::new(g.d, g.c, g.b, g.a));
        assert_eq!(s.signature().unwrap(), Signature::new(g.d, g.b, g.c, g.a));
        assert_eq!(s.plain_edge_count(), o.plain_edge_count());
        let (cr, co) = (r.face_census().unwrap(), o.face_census().unwrap());
        assert_eq!(cr.degrees, co.degrees);
        let mut swapped: Vec<_> = co.types.iter().map(|&(i, j)| (j, i)).collect();
        swapped.sort_unstable();
        assert_eq!(cr.types, swapped);
        assert!(phi(&rho_on_walks(&w)).isomorphic(&r), "rho commutes at {w}");
        let sw = sigma_on_walks(&w);
        assert_eq!(sigma_on_walks(&sw), w);
        let st = walk_stats(&sw);
        assert_eq!((st.a, st.b, st.c, st.d), (g.d, g.b, g.c, g.a));
        assert_eq!(sw.len(), w.len());
        assert_eq!(sw.se_count(), w.se_count());
        assert_eq!(sw.level_counts(), w.level_counts());
    }
}

#[test]
fn baxter_orientations_from_excursions() {
    let spec = WeightSpec::all_ones(3);
    let exc: Vec<_> = exhaustive_walks(&spec, 4, (0, 0), Region::Quadrant)
        .unwrap()
        .into_iter()
        .filter(|w| w.displacement() == (0, 0))
        .collect();
    assert_eq!(exc.len(), 6);
    let mut codes = HashSet::new();
    for w in &exc {
        let o = excursion_to_bipolar(w).unwrap();
        assert_eq!(o.edges.len(), 3);
        assert!(o.edges.iter().all(|e| e.kind == EdgeKind::Plain));
        assert!(o.validate().unwrap().is_pass());
        assert_eq!(&bipolar_to_excursion(&o).unwrap(), w);
        codes.insert(o.canonical_code());
    }
    assert_eq!(codes.len(), 6);
    assert!(excursion_to_bipolar(&TandemWalk::default()).is_err());
    let tri = WeightSpec::from_ints(&[0, 1]);
    let exc3 = exhaustive_walks(&tri, 3, (0, 0), Region::Quadrant)
        .unwrap()
        .into_iter()
        .filter(|w| w.displacement() == (0, 0))
        .count();
    assert_eq!(exc3, 1);
}

#[test]
fn excursions_have_unmarked_signature() {
    let spec = WeightSpec::all_ones(2);
    for w in exhaustive_walks(&spec, 6, (0, 0), Region::Quadrant).unwrap() {
        if w.displacement() == (0, 0) {
            let s = phi(&w).signature().unwrap();
            assert_eq!((s.a, s.d), (0, 0));
        }
    }
}

fn step_strategy() -> impl Strategy<Value = Step> {
    prop_oneof![
        2 => Just(Step::SE),
        3 => (0u32..4, 0u32..4).prop_map(|(i, j)| Step::Face(i, j)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_round_trip(steps in prop::collection::vec(step_strategy(), 0..30)) {
        let w = TandemWalk::new(steps);
        let o = phi(&w);
        prop_assert!(o.validate().unwrap().is_pass());
        prop_assert_eq!(phi_inverse(&o).unwrap(), w.clone());
        prop_assert_eq!(o.signature().unwrap(), sig_of(&w));
        let s = o.sigma().unwrap();
        prop_assert!(s.sigma().unwrap().isomorphic(&o));
        prop_assert!(phi(&rho_on_walks(&w)).isomorphic(&o.rho().unwrap()));
    }

    #[test]
    fn json_round_trip(steps in prop::collection::vec(step_strategy(), 0..12)) {
        let w = TandemWalk::new(steps);
        let o = phi(&w);
        let text = serde_json::to_string(&o).unwrap();
        let back: tandem_core::MarkedBipolarOrientation = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, o);
        let wt = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<TandemWalk>(&wt).unwrap(), w);
    }
}
