use std::collections::BTreeMap;

use gpi_core::algebra::{build_grassmann, GrassmannGrading, GrassmannSpec};
use gpi_core::identities::{
    all_signatures, identities_by_evaluation, identities_by_fast_rows, membership, tideal_product,
    tideal_product_bordered, ComponentProvider, ConsequenceProvider, FastRowsProvider, GrassmannHandle,
    TIdealPresentation, TruncationPolicy,
};
use gpi_core::linalg::GuardLimits;
use gpi_core::relfree::GradingMode;
use gpi_core::{CoreError, GroupSpec, MultidegreeSignature};

fn confirmed(grading: GrassmannGrading) -> FastRowsProvider {
    FastRowsProvider::new(
        GrassmannHandle::plain(GrassmannSpec::new(4, grading)),
        TruncationPolicy::Confirmed,
        GuardLimits::default(),
    )
}

#[test]
fn route_agreement_natural_and_ungraded() {
    let cases = [
        (Some(GradingMode::Natural), GrassmannGrading::Natural),
        (None, GrassmannGrading::Trivial),
    ];
    for (mode, grading) in cases {
        let pres = TIdealPresentation::grassmann(mode);
        let group = pres.group().clone();
        let cons = ConsequenceProvider::new(pres, GuardLimits::default());
        let eval = confirmed(grading.clone());
        for n in 1..=4 {
            for sig in all_signatures(&group, n) {
                assert_eq!(cons.component(&sig).unwrap(), eval.component(&sig).unwrap(), "{grading:?} {sig}");
            }
        }
    }
}

#[test]
fn fast_rows_match_full_enumeration_on_e4() {
    for grading in [GrassmannGrading::Trivial, GrassmannGrading::Natural, GrassmannGrading::Infty, GrassmannGrading::KStar(1)]
    {
        let spec = GrassmannSpec::new(4, grading.clone());
        let e = build_grassmann(&spec).unwrap();
        for n in 1..=3 {
            for sig in all_signatures(&spec.group(), n) {
                match identities_by_fast_rows(&GrassmannHandle::plain(spec.clone()), &sig, GuardLimits::default()) {
                    Ok(fast) => assert_eq!(fast, identities_by_evaluation(&e, &sig).unwrap(), "{grading:?} {sig}"),
                    Err(CoreError::TruncationTooSmall(_)) => {}
                    Err(err) => panic!("{err}"),
                }
            }
        }
    }
}

#[test]
fn relabeling_equal_degrees_preserves_the_space() {
    for grading in [GrassmannGrading::Natural, GrassmannGrading::Infty, GrassmannGrading::KStar(1)] {
        let p = confirmed(grading.clone());
        for sig in all_signatures(&GroupSpec::z2(), 4) {
            let space = p.component(&sig).unwrap();
            let d = sig.degrees();
            for i in 0..4 {
                for j in i + 1..4 {
                    if d[i] != d[j] {
                        continue;
                    }
                    let map: BTreeMap<u32, u32> =
                        [(i as u32 + 1, j as u32 + 1), (j as u32 + 1, i as u32 + 1)].into_iter().collect();
                    for f in space.basis_polynomials().unwrap() {
                        let g = f.rename(&map).unwrap();
                        assert!(membership(&g, &space).unwrap(), "{grading:?} {sig}: {f} -> {g}");
                    }
                }
            }
        }
    }
}

#[test]
fn product_formula_matches_bordered_version() {
    for grading in [GrassmannGrading::Natural, GrassmannGrading::Infty, GrassmannGrading::KStar(1)] {
        let p = confirmed(grading.clone());
        for n in 2..=4 {
            for sig in all_signatures(&GroupSpec::z2(), n) {
                let a = tideal_product(&p, &p, &sig, GuardLimits::default()).unwrap();
                let b = tideal_product_bordered(&p, &p, &sig, GuardLimits::default()).unwrap();
                assert_eq!(a, b, "{grading:?} {sig}");
            }
        }
    }
}

#[test]
fn stable_dims_of_ungraded_e() {
    let p = confirmed(GrassmannGrading::Trivial);
    let t = GroupSpec::trivial();
    let dims: Vec<usize> =
        (1..=5).map(|n| p.component(&MultidegreeSignature::uniform(&t, n).unwrap()).unwrap().dim()).collect();
    assert_eq!(dims, vec![0, 0, 2, 16, 104]);
}
