use gpi_core::linalg::{
    kernel_basis, rref, subspace_cmp, subspace_sum, Echelon, GuardLimits, SparseMatrix, SubspaceRelation,
};
use gpi_core::Q;
use proptest::prelude::*;

fn q(x: i64) -> Q {
    Q::from_integer(x.into())
}

fn matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=7, 1usize..=6).prop_flat_map(|(cols, rows)| {
        (Just(cols), prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -4i64..=4], cols), rows))
    })
}

fn build(cols: usize, rows: &[Vec<i64>]) -> SparseMatrix {
    let dense: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    SparseMatrix::from_dense(cols, &dense).unwrap()
}

proptest! {
    #[test]
    fn rank_nullity((cols, rows) in matrix()) {
        let m = build(cols, &rows);
        let r = rref(&m);
        let k = kernel_basis(&m);
        prop_assert_eq!(r.dim() + k.dim(), cols);
        for v in k.basis() {
            let mut x = vec![q(0); cols];
            for (j, c) in v {
                x[*j] = c.clone();
            }
            prop_assert!(m.mul_vec(&x).iter().all(|y| *y == q(0)));
        }
    }

    #[test]
    fn rref_is_canonical((cols, rows) in matrix(), perm_seed in any::<u64>(), scale in 1i64..=5) {
        let m = build(cols, &rows);
        let mut shuffled = rows.clone();
        let len = shuffled.len();
        shuffled.rotate_left((perm_seed as usize) % len);
        let mut scaled: Vec<Vec<i64>> = shuffled.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
        // append a combination of the first two rows
        if len >= 2 {
            let extra: Vec<i64> = scaled[0].iter().zip(&scaled[1]).map(|(a, b)| a - 2 * b).collect();
            scaled.push(extra);
        }
        prop_assert_eq!(rref(&build(cols, &scaled)), rref(&m));
    }

    #[test]
    fn echelon_matches_rref((cols, rows) in matrix()) {
        let m = build(cols, &rows);
        let mut e = Echelon::new(cols, GuardLimits::default());
        for r in m.rows() {
            e.insert_rational(r).unwrap();
        }
        prop_assert_eq!(e.rank(), rref(&m).dim());
        prop_assert_eq!(e.into_subspace(), rref(&m));
    }

    #[test]
    fn containment_relations((cols, a) in matrix(), extra in prop::collection::vec(-3i64..=3, 1..=7)) {
        let sa = rref(&build(cols, &a));
        let mut b = a.clone();
        b.push(extra.iter().cycle().take(cols).copied().collect());
        let sb = rref(&build(cols, &b));
        let rel = subspace_cmp(&sa, &sb).unwrap();
        prop_assert!(matches!(rel, SubspaceRelation::Equal | SubspaceRelation::AStrictlyInsideB));
        prop_assert_eq!(rel == SubspaceRelation::Equal, sa.dim() == sb.dim());
        prop_assert_eq!(subspace_sum(&sa, &sb).unwrap(), sb);
    }
}
