use khslice_core::braid::{parse_braid, MarkovMove};
use khslice_core::curves::{intersection, standard_matching, Half};
use khslice_core::diagram::braid_closure_diagram;
use khslice_core::homology::{collapse, jones, kauffman_jones, khovanov, khovanov_cube, Group};
use khslice_core::slice::{adjoint_quotient, cstar_action, SliceMatrix, C64};
use khslice_core::transport::{maslov_markov, MarkovSign};

const BRAIDS: [&str; 7] = ["2: 1 1 1", "2: -1 -1", "3: 1 -2 1 -2", "3: 1 1 2 -1 2", "3: 1 2 1 2", "4: 1 -2 3 -2", "4: 1 3"];

#[test]
fn both_homology_routes_agree_and_give_jones() {
    for s in BRAIDS {
        let d = braid_closure_diagram(&parse_braid(s).unwrap());
        let kh = khovanov(&d);
        assert_eq!(kh, khovanov_cube(&d).unwrap(), "{s}");
        assert_eq!(jones(&kh).unwrap(), kauffman_jones(&d), "{s}");
    }
}

#[test]
fn markov_moves_keep_homology() {
    let b = parse_braid("3: 1 -2 1").unwrap();
    let base = khovanov(&braid_closure_diagram(&b));
    let moves = [
        MarkovMove::Conjugate { index: 2, sign: 1 },
        MarkovMove::Stabilize(-1),
        MarkovMove::Conjugate { index: 1, sign: -1 },
        MarkovMove::Stabilize(1),
    ];
    let mut w = b;
    for mv in moves {
        w = w.markov_move(mv).unwrap();
        assert_eq!(khovanov(&braid_closure_diagram(&w)), base, "after {mv}");
    }
}

#[test]
fn trefoil_collapses_with_two_torsion() {
    let kh = khovanov(&braid_closure_diagram(&parse_braid("2: 1 1 1").unwrap()));
    let c = collapse(&kh);
    assert_eq!(c.get(5), Group { rank: 0, torsion: vec![2] });
    assert_eq!(c.euler().abs(), 2);
}

#[test]
fn braid_then_inverse_fixes_a_matching() {
    let up = standard_matching(3, Half::Upper);
    let b = parse_braid("6: 1 -2 3 4 -5 2 2").unwrap();
    let there = up.act(&b).unwrap();
    assert_ne!(there.system().arcs(), up.system().arcs());
    assert_eq!(there.act(&b.inverse()).unwrap().system().arcs(), up.system().arcs());
    let x = intersection(there.system(), standard_matching(3, Half::Lower).system());
    let y = intersection(standard_matching(3, Half::Lower).system(), there.system());
    assert_eq!((x.endpoints, x.interior), (y.endpoints, y.interior));
}

#[test]
fn scaling_the_slice_scales_eigenvalues() {
    let coords: Vec<C64> = (0..SliceMatrix::dimension(3)).map(|k| C64::new(0.3 * k as f64 - 1.0, 0.1 * (k % 4) as f64)).collect();
    let y = SliceMatrix::from_coordinates(3, &coords).unwrap();
    let r = C64::new(1.7, 0.0);
    let before = adjoint_quotient(&y).unwrap().scaled(r * r);
    let after = adjoint_quotient(&cstar_action(r, &y).unwrap()).unwrap();
    assert!(before.matches(&after, 1e-8), "{:?}", before.distance(&after));
}

#[test]
fn markov_signs_give_maslov_zero_and_two() {
    assert_eq!(maslov_markov(MarkovSign::Plus).unwrap().index, 0);
    assert_eq!(maslov_markov(MarkovSign::Minus).unwrap().index, 2);
}
