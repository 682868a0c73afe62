use num_bigint::BigInt;
use num_rational::BigRational;

use principal_core::fermionic::georgiev_char;
use principal_core::lattice::principal_subspace_dims;
use principal_core::quasiparticle::{char_from_basis, AdmissibilityContext};
use principal_core::TruncatedSeries;

fn table(n: usize, cutoff: i64, rows: &[(&[i64], i64, i64)]) -> TruncatedSeries {
    let terms = rows.iter().map(|(r, s, c)| (r.to_vec(), *s, BigRational::from_integer(BigInt::from(*c))));
    TruncatedSeries::from_terms(n, cutoff, terms).unwrap()
}

fn all_routes(n: usize, i: usize, cutoff: i64) -> Vec<TruncatedSeries> {
    let (k0, j) = if i == 0 { (1, 0) } else { (0, i) };
    let ctx = AdmissibilityContext::new(n, 1, k0, j).unwrap();
    vec![
        georgiev_char(n, 1, k0, j, cutoff).unwrap(),
        char_from_basis(&ctx, cutoff).unwrap(),
        principal_subspace_dims(n, i, cutoff).unwrap(),
    ]
}

#[test]
fn vacuum_rank_two_through_q3() {
    let want = table(
        2,
        3,
        &[
            (&[0, 0], 0, 1),
            (&[1, 0], 1, 1),
            (&[0, 1], 1, 1),
            (&[1, 1], 1, 1),
            (&[1, 0], 2, 1),
            (&[0, 1], 2, 1),
            (&[1, 1], 2, 2),
            (&[1, 0], 3, 1),
            (&[0, 1], 3, 1),
            (&[1, 1], 3, 3),
            (&[1, 2], 3, 1),
            (&[2, 1], 3, 1),
        ],
    );
    for got in all_routes(2, 0, 3) {
        assert!(got.equal_upto(&want, 3).unwrap().equal);
    }
}

#[test]
fn first_fundamental_rank_two_through_q3() {
    let want = table(
        2,
        3,
        &[
            (&[0, 0], 0, 1),
            (&[0, 1], 1, 1),
            (&[1, 0], 2, 1),
            (&[0, 1], 2, 1),
            (&[1, 1], 2, 1),
            (&[1, 0], 3, 1),
            (&[0, 1], 3, 1),
            (&[1, 1], 3, 2),
        ],
    );
    for got in all_routes(2, 1, 3) {
        assert!(got.equal_upto(&want, 3).unwrap().equal);
    }
    let mirrored = all_routes(2, 2, 3);
    assert!(mirrored[0].reverse_vars().equal_upto(&want, 3).unwrap().equal);
}

#[test]
fn level_two_low_orders() {
    let s = georgiev_char(2, 2, 1, 1, 3).unwrap();
    let c = |r: &[i64], q: i64| s.coeff(r, q).to_integer();
    assert_eq!(c(&[0, 0], 0), BigInt::from(1));
    assert_eq!(c(&[0, 2], 2), BigInt::from(1));
    assert_eq!(c(&[1, 2], 3), BigInt::from(3));
    assert_eq!(c(&[2, 2], 3), BigInt::from(1));
    let ctx = AdmissibilityContext::new(2, 2, 1, 1).unwrap();
    assert!(char_from_basis(&ctx, 3).unwrap().equal_upto(&s, 3).unwrap().equal);
}

#[test]
fn rank_three_level_one_sectors_have_expected_size() {
    let sectors = principal_core::lattice::principal_subspace_sectors(3, 0, 8, principal_core::lattice::Generators::Simple).unwrap();
    let total: usize = sectors.values().map(Vec::len).sum();
    let largest = sectors.values().map(Vec::len).max().unwrap();
    assert_eq!((sectors.len(), total, largest), (209, 1297, 50));
}
