use std::path::Path;

use hooley_core::characters::{CharacterLabel, DirichletCharacter};
use hooley_core::zeros::{find_zero_pair, ingest_zeros, verify_pair, ZeroConfig, ZeroStatus};

#[test]
fn independent_table_matches_local_zeros() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/zeros_q5_external.csv");
    let sets = ingest_zeros(&path).unwrap();
    assert_eq!(sets.len(), 2);
    assert!(sets.iter().all(|s| s.status == ZeroStatus::Ingested));

    let chi = DirichletCharacter::from_label(&CharacterLabel::parse(5, "1").unwrap()).unwrap();
    let (own, conj) = find_zero_pair(&chi, 30.0, 20, &ZeroConfig::default()).unwrap();
    let conj = conj.unwrap();
    for local in [&own, &conj] {
        let ext = sets.iter().find(|s| s.label == local.label).unwrap();
        assert_eq!(ext.len(), local.len(), "{}", local.label);
        for (a, b) in ext.zeros.iter().zip(&local.zeros) {
            assert!((a.value - b.value).abs() < 1e-6, "{} vs {}", a.gamma, b.gamma);
            // both carry 20 correct places
            assert!((a.gamma_float() - b.gamma_float()).abs() < 1e-18);
        }
    }

    let mut a = sets.iter().find(|s| s.label == own.label).unwrap().clone();
    let mut b = sets.iter().find(|s| s.label == conj.label).unwrap().clone();
    a.height = 30.0;
    b.height = 30.0;
    assert!(verify_pair(&chi, &mut a, Some(&mut b), 30.0).unwrap());
    assert_eq!(a.status, ZeroStatus::Verified);
}

#[test]
fn truncated_table_fails_verification() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/zeros_q5_external.csv");
    let sets = ingest_zeros(&path).unwrap();
    let chi = DirichletCharacter::from_label(&CharacterLabel::parse(5, "1").unwrap()).unwrap();
    let mut a = sets[0].clone();
    let mut b = sets[1].clone();
    a.zeros.pop();
    a.height = 30.0;
    b.height = 30.0;
    assert!(!verify_pair(&chi, &mut a, Some(&mut b), 30.0).unwrap());
    assert_eq!(a.status, ZeroStatus::Unverified);
    assert!(a.require_verified(false).is_err());
}
