//! Rank-two exercises: the same machinery on sl3, plus serialization round
//! trips for layered truncations.

use std::sync::Arc;

use affinerep::affine::PointConfiguration;
use affinerep::analysis::{classify_nplus_module, is_irreducible, whittaker_vectors};
use affinerep::lie::rep::GenLabel;
use affinerep::lie::{build_simple_lie_algebra, Series, Weight};
use affinerep::modules::{
    build_evaluation_module, build_s_module, build_whittaker_truncation, EtaHom,
    TruncatedInducedModule,
};
use affinerep::rational::{qi, Q};
use num::Zero;

fn sl3() -> Arc<affinerep::lie::LieAlgebraData> {
    build_simple_lie_algebra(Series::A, 2).unwrap()
}

#[test]
fn sl3_evaluation_module_is_irreducible() {
    let g = sl3();
    let pc = PointConfiguration::new(vec![qi(2)]).unwrap();
    let e = build_evaluation_module(Arc::clone(&g), &[Weight::from_integers(&[1, 0])], &pc, None)
        .unwrap();
    assert_eq!(e.dim(), 3);
    assert!(e.rep.check_bracket_compatibility().unwrap() > 0);
    let cert = is_irreducible(&e.rep).unwrap();
    assert!(cert.irreducible);
    assert_eq!(cert.algebra_dim, Some(9));
}

#[test]
fn sl3_whittaker_truncation_and_vectors() {
    let g = sl3();
    let eta = EtaHom {
        simple_values: vec![qi(1), qi(2)],
        affine_value: qi(1),
    };
    assert!(eta.is_nondegenerate());
    let m = build_whittaker_truncation(Arc::clone(&g), &eta, 1).unwrap();
    // Layer zero is the eta line; the Chevalley generators act by their
    // character values there.
    let simples = g.simple_root_indices();
    let e1 = m
        .action(&GenLabel::loop_gen(g.e_index(simples[0]), 0))
        .unwrap();
    assert_eq!(e1.matrix.column(0)[0], qi(1));
    let e2 = m
        .action(&GenLabel::loop_gen(g.e_index(simples[1]), 0))
        .unwrap();
    assert_eq!(e2.matrix.column(0)[0], qi(2));
    let aff = m
        .action(&GenLabel::loop_gen(g.f_index(g.theta), 1))
        .unwrap();
    assert_eq!(aff.matrix.column(0)[0], qi(1));
    assert!(m.check_bracket_compatibility_on_domain().unwrap() > 0);

    let vectors = whittaker_vectors(&m, &eta).unwrap();
    let mut u = vec![Q::zero(); m.dim];
    u[m.cyclic_index] = num::One::one();
    assert!(vectors.contains(&u));
}

#[test]
fn sl3_classification_round_trip() {
    let g = sl3();
    let eta = EtaHom {
        simple_values: vec![qi(1), qi(0)],
        affine_value: qi(1),
    };
    let lambdas = vec![Weight::from_integers(&[1, 0])];
    let pc = PointConfiguration::new(vec![qi(2)]).unwrap();
    let s = build_s_module(Arc::clone(&g), &eta, &lambdas, &pc, None).unwrap();
    let f = pc.vanishing_poly().shift(1);
    let result = classify_nplus_module(&s, &f).unwrap();
    assert_eq!(result.eta, eta);
    assert_eq!(result.lambdas, lambdas);
    assert_eq!(result.points, vec![qi(2)]);
}

#[test]
fn truncation_serialization_round_trip() {
    let g = build_simple_lie_algebra(Series::A, 1).unwrap();
    let eta = EtaHom {
        simple_values: vec![qi(1)],
        affine_value: qi(2),
    };
    let m = build_whittaker_truncation(Arc::clone(&g), &eta, 1).unwrap();
    let back = TruncatedInducedModule::from_json(&m.to_json()).unwrap();
    assert_eq!(back.dim, m.dim);
    assert_eq!(back.layer_of, m.layer_of);
    assert_eq!(back.descriptor, m.descriptor);
    for (label, action) in m.actions() {
        let other = back.action(label).unwrap();
        assert_eq!(&other.matrix, &action.matrix);
        assert_eq!(other.domain, action.domain);
    }
}
