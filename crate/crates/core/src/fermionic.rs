//! Fermionic sum formulas for principal-subspace characters and the
//! identities relating them.
//!
//! Every formula is a sum over integer sectors of
//! `q^E (1 − q^R)^ε x^c / ∏ (q)_p`, where `E` is a positive-definite
//! quadratic energy plus linear terms. Sectors come from
//! [`QuadraticForm::enumerate`]; each sector's `q`-series is expanded in
//! machine integers and the results are merged.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lie::cartan_matrix;
use crate::quadratic::QuadraticForm;
use crate::series::{Comparison, TruncatedSeries};

/// Which display of the `k_1Λ_1 + k_2Λ_2` family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Display {
    /// `W(k_1Λ_1 + k_2Λ_2)`.
    First,
    /// `W(k_{n−1}Λ_{n−1} + k_nΛ_n)`.
    Second,
}

/// Sector enumeration settings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Enumeration {
    /// Extra room added to the sector box and energy threshold.
    pub slack: i64,
}

struct SectorTerm {
    x: Vec<i64>,
    e: i64,
    kill: Option<i64>,
    pochs: Vec<i64>,
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidRank(n as i64));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("level k must be at least 1".into()));
    }
    Ok(())
}

/// `½ Σ_t r^(t)ᵀ A r^(t)` on color-major variables `(i, t)`, with `r_i^(t) ≤ r_i^(t−1)`.
fn rform(n: usize, k: usize, linear: Vec<i64>) -> Result<QuadraticForm> {
    let a = cartan_matrix(n as i64)?;
    let d = n * k;
    let mut m = vec![vec![0i64; d]; d];
    for i in 0..n {
        for j in 0..n {
            for t in 0..k {
                m[i * k + t][j * k + t] = a[i][j];
            }
        }
    }
    let parent = (0..d).map(|v| if v % k == 0 { None } else { Some(v - 1) }).collect();
    QuadraticForm::new(m, linear, parent)
}

/// `½ Σ A_lm min(s,t) p_l^(s) p_m^(t)` on color-major variables `(l, s)`.
fn pform_quadratic(n: usize, k: usize, linear: Vec<i64>) -> Result<QuadraticForm> {
    let a = cartan_matrix(n as i64)?;
    let d = n * k;
    let mut m = vec![vec![0i64; d]; d];
    for l in 0..n {
        for mm in 0..n {
            for s in 0..k {
                for t in 0..k {
                    m[l * k + s][mm * k + t] = a[l][mm] * (s.min(t) as i64 + 1);
                }
            }
        }
    }
    QuadraticForm::new(m, linear, vec![None; d])
}

fn r_pochs(r: &[i64], n: usize, k: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(n * k);
    for i in 0..n {
        for t in 0..k {
            let next = if t + 1 < k { r[i * k + t + 1] } else { 0 };
            out.push(r[i * k + t] - next);
        }
    }
    out
}

fn r_charges(r: &[i64], n: usize, k: usize) -> Vec<i64> {
    (0..n).map(|i| r[i * k..(i + 1) * k].iter().sum()).collect()
}

/// Expands `q^e (1 − q^R) / ∏ (q)_p` up to `cutoff`.
fn sector_series(term: &SectorTerm, cutoff: i64) -> Result<Vec<i128>> {
    let len = (cutoff - term.e) as usize + 1;
    let mut c = vec![0i128; len];
    c[0] = 1;
    let mut mult = vec![0usize; len];
    for &p in &term.pochs {
        for m in mult.iter_mut().take((p as usize).min(len - 1) + 1).skip(1) {
            *m += 1;
        }
    }
    for (i, &times) in mult.iter().enumerate().skip(1) {
        for _ in 0..times {
            for d in i..len {
                c[d] = c[d].checked_add(c[d - i]).ok_or_else(overflow)?;
            }
        }
    }
    if let Some(r) = term.kill {
        let r = r as usize;
        for d in (r..len).rev() {
            c[d] = c[d].checked_sub(c[d - r]).ok_or_else(overflow)?;
        }
    }
    Ok(c)
}

fn overflow() -> Error {
    Error::Resource("coefficient overflow in sector expansion".into())
}

fn sum_sectors<F>(n: usize, cutoff: i64, sectors: &[(Vec<i64>, i64)], eval: F) -> Result<TruncatedSeries>
where
    F: Fn(&[i64], i64) -> Option<SectorTerm> + Sync,
{
    type Acc = HashMap<(Vec<i64>, i64), i128>;
    let merged: Acc = sectors
        .par_iter()
        .try_fold(Acc::new, |mut acc, (v, e)| -> Result<Acc> {
            let Some(term) = eval(v, *e) else { return Ok(acc) };
            if term.e > cutoff {
                return Ok(acc);
            }
            let coeffs = sector_series(&term, cutoff)?;
            for (d, c) in coeffs.into_iter().enumerate() {
                if c != 0 {
                    let slot = acc.entry((term.x.clone(), term.e + d as i64)).or_insert(0);
                    *slot = slot.checked_add(c).ok_or_else(overflow)?;
                }
            }
            Ok(acc)
        })
        .try_reduce(Acc::new, |mut a, b| {
            for (k, v) in b {
                let slot = a.entry(k).or_insert(0);
                *slot = slot.checked_add(v).ok_or_else(overflow)?;
            }
            Ok(a)
        })?;
    TruncatedSeries::from_terms(
        n,
        cutoff,
        merged.into_iter().map(|((x, s), c)| (x, s, BigRational::from_integer(BigInt::from(c)))),
    )
}

/// `s ≥ c_i r_i^2` for every term of a level-`k` character: `c_i = (n+1) / (2k · i(n+1−i))`.
pub fn charge_envelope(n: usize, k: usize) -> Vec<BigRational> {
    (1..=n)
        .map(|i| BigRational::new(BigInt::from(n as i64 + 1), BigInt::from((2 * k * i * (n + 1 - i)) as i64)))
        .collect()
}

impl Enumeration {
    /// `χ′_{W(k_0Λ_0 + k_jΛ_j)}`; `j` is ignored when `k_0 = k`.
    pub fn georgiev(&self, n: usize, k: usize, k0: usize, j: usize, cutoff: i64) -> Result<TruncatedSeries> {
        check_nk(n, k)?;
        if k0 > k {
            return Err(Error::InvalidParameter(format!("k0 = {k0} exceeds level {k}")));
        }
        if k0 < k && (j == 0 || j > n) {
            return Err(Error::InvalidParameter(format!("color {j} outside 1..={n}")));
        }
        let mut linear = vec![0i64; n * k];
        if k0 < k {
            for t in k0..k {
                linear[(j - 1) * k + t] = 1;
            }
        }
        let form = rform(n, k, linear)?;
        let sectors = form.enumerate(cutoff, self.slack);
        let out = sum_sectors(n, cutoff, &sectors, |r, e| {
            Some(SectorTerm { x: r_charges(r, n, k), e, kill: None, pochs: r_pochs(r, n, k) })
        })?;
        out.with_charge_envelope(&charge_envelope(n, k))
    }

    /// r-form of `χ′_{W(k_1Λ_1 + k_2Λ_2)}` (first) or `χ′_{W(k_{n−1}Λ_{n−1} + k_nΛ_n)}` (second).
    pub fn gdim(&self, which: Display, n: usize, k: usize, kk: usize, cutoff: i64) -> Result<TruncatedSeries> {
        check_nk(n, k)?;
        if n < 2 {
            return Err(Error::InvalidParameter("this family needs n ≥ 2".into()));
        }
        if kk < 1 || kk > k {
            return Err(Error::InvalidParameter(format!("k1 = {kk} must lie in 1..={k}")));
        }
        let (main, side) = match which {
            Display::First => (0, 1),
            Display::Second => (n - 1, n - 2),
        };
        let mut linear = vec![0i64; n * k];
        for t in 0..k {
            linear[main * k + t] += (t >= kk) as i64 - 1;
            linear[side * k + t] += 1;
        }
        let form = rform(n, k, linear)?;
        let sectors = form.enumerate(cutoff, self.slack);
        sum_sectors(n, cutoff, &sectors, |r, e| {
            let kill = r[main * k + kk - 1];
            if kill == 0 {
                return None;
            }
            let mut x = r_charges(r, n, k);
            x[main] -= kk as i64;
            Some(SectorTerm { x, e, kill: Some(kill), pochs: r_pochs(r, n, k) })
        })
    }

    /// p-form of the same two characters.
    pub fn pform(&self, which: Display, n: usize, k: usize, kk: usize, cutoff: i64) -> Result<TruncatedSeries> {
        check_nk(n, k)?;
        if n < 2 {
            return Err(Error::InvalidParameter("this family needs n ≥ 2".into()));
        }
        if kk < 1 || kk > k {
            return Err(Error::InvalidParameter(format!("k1 = {kk} must lie in 1..={k}")));
        }
        let (main, side) = match which {
            Display::First => (0, 1),
            Display::Second => (n - 1, n - 2),
        };
        let mut linear = vec![0i64; n * k];
        for s in 1..=k {
            if s > kk {
                linear[main * k + s - 1] += (s - kk) as i64;
            }
            linear[side * k + s - 1] += s as i64;
            linear[main * k + s - 1] -= s as i64;
        }
        let form = pform_quadratic(n, k, linear)?;
        let sectors = form.enumerate(cutoff, self.slack);
        sum_sectors(n, cutoff, &sectors, |p, e| {
            let kill: i64 = p[main * k + kk - 1..(main + 1) * k].iter().sum();
            if kill == 0 {
                return None;
            }
            let mut x: Vec<i64> =
                (0..n).map(|i| (0..k).map(|s| (s as i64 + 1) * p[i * k + s]).sum()).collect();
            x[main] -= kk as i64;
            Some(SectorTerm { x, e, kill: Some(kill), pochs: p.to_vec() })
        })
    }
}

pub fn georgiev_char(n: usize, k: usize, k0: usize, j: usize, cutoff: i64) -> Result<TruncatedSeries> {
    Enumeration::default().georgiev(n, k, k0, j, cutoff)
}

pub fn char_w_k1l1_k2l2(n: usize, k: usize, k1: usize, cutoff: i64) -> Result<TruncatedSeries> {
    Enumeration::default().gdim(Display::First, n, k, k1, cutoff)
}

pub fn char_w_kn1ln1_knln(n: usize, k: usize, kn: usize, cutoff: i64) -> Result<TruncatedSeries> {
    Enumeration::default().gdim(Display::Second, n, k, kn, cutoff)
}

pub fn char_pform(which: Display, n: usize, k: usize, kk: usize, cutoff: i64) -> Result<TruncatedSeries> {
    Enumeration::default().pform(which, n, k, kk, cutoff)
}

/// Smallest source cutoff whose image under `x ↦ x q^e` is exact through `target`.
pub fn source_cutoff(n: usize, k: usize, shifts: &[i64], target: i64) -> Result<i64> {
    let bounds = charge_envelope(n, k);
    let mut src = target.max(0);
    loop {
        let probe = TruncatedSeries::zero(n, src).with_charge_envelope(&bounds)?;
        if probe.substitute(shifts)?.cutoff() >= target {
            return Ok(src);
        }
        src += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub comparison: Comparison,
    /// Cutoff used for the characters that get substituted.
    pub source_cutoff: i64,
    /// Exactness horizon of the substituted side.
    pub horizon: i64,
}

/// Both sides of the recursion: the r-form at `kk_lhs` against
/// `x^{−k}[χ′(k Λ_0 + …) − χ′((k−1)Λ_0 + …)]` substituted, built from `kk_rhs`.
pub fn recursion_sides(
    which: Display,
    n: usize,
    k: usize,
    kk_lhs: usize,
    kk_rhs: usize,
    cutoff: i64,
) -> Result<(TruncatedSeries, TruncatedSeries, i64)> {
    if n < 2 {
        return Err(Error::InvalidParameter("recursion needs n ≥ 2".into()));
    }
    if kk_rhs < 1 || kk_rhs > k {
        return Err(Error::InvalidParameter(format!("k1 = {kk_rhs} must lie in 1..={k}")));
    }
    let (main, side) = match which {
        Display::First => (0, 1),
        Display::Second => (n - 1, n - 2),
    };
    let mut shifts = vec![0i64; n];
    shifts[main] = -1;
    shifts[side] = 1;
    let src = source_cutoff(n, k, &shifts, cutoff)?;
    let a = georgiev_char(n, k, kk_rhs, main + 1, src)?;
    let b = georgiev_char(n, k, kk_rhs - 1, main + 1, src)?;
    let mut xshift = vec![0i64; n];
    xshift[main] = -(kk_rhs as i64);
    let rhs = a.sub(&b)?.substitute(&shifts)?.monomial_shift(&xshift, 0)?;
    let lhs = Enumeration::default().gdim(which, n, k, kk_lhs, cutoff)?;
    Ok((lhs, rhs, src))
}

pub fn verify_recursion(which: Display, n: usize, k: usize, kk: usize, cutoff: i64) -> Result<IdentityReport> {
    let (lhs, rhs, src) = recursion_sides(which, n, k, kk, kk, cutoff)?;
    let comparison = lhs.equal_upto(&rhs, cutoff)?;
    Ok(IdentityReport { comparison, source_cutoff: src, horizon: rhs.cutoff() })
}

/// `χ′(Λ_0)` against `x_i q^{w} χ′(Λ_i)(x_i q, x_{i±1} q^{−1}) + χ′(Λ_i)` at level one.
pub fn level1_sequence_sides(n: usize, i: usize, cutoff: i64, weight_shift: i64) -> Result<(TruncatedSeries, TruncatedSeries, i64)> {
    if i == 0 || i > n {
        return Err(Error::InvalidParameter(format!("color {i} outside 1..={n}")));
    }
    let mut shifts = vec![0i64; n];
    shifts[i - 1] = 1;
    if i >= 2 {
        shifts[i - 2] = -1;
    }
    if i < n {
        shifts[i] = -1;
    }
    let src = source_cutoff(n, 1, &shifts, cutoff)?;
    let wi = georgiev_char(n, 1, 0, i, src)?;
    let mut xshift = vec![0i64; n];
    xshift[i - 1] = 1;
    let image = wi.substitute(&shifts)?.monomial_shift(&xshift, weight_shift)?;
    let rhs = image.add(&wi)?;
    let lhs = georgiev_char(n, 1, 1, 0, cutoff)?;
    Ok((lhs, rhs, src))
}

pub fn verify_level1_sequence_dims(n: usize, i: usize, cutoff: i64) -> Result<IdentityReport> {
    let (lhs, rhs, src) = level1_sequence_sides(n, i, cutoff, 1)?;
    let comparison = lhs.equal_upto(&rhs, cutoff)?;
    Ok(IdentityReport { comparison, source_cutoff: src, horizon: rhs.cutoff() })
}

/// `∏_{m ≥ 1, m ≢ 0, ±(k+1) mod 2k+3} (1 − q^m)^{−1}`.
pub fn andrews_gordon_product(k: usize, cutoff: i64) -> Result<TruncatedSeries> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let modulus = 2 * k as i64 + 3;
    let len = cutoff.max(0) as usize + 1;
    let mut c = vec![BigInt::from(0); len];
    c[0] = BigInt::from(1);
    for m in 1..len {
        let res = m as i64 % modulus;
        if res == 0 || res == k as i64 + 1 || res == k as i64 + 2 {
            continue;
        }
        for d in m..len {
            let t = c[d - m].clone();
            c[d] += t;
        }
    }
    let terms = c.into_iter().enumerate().map(|(s, v)| (vec![], s as i64, BigRational::from_integer(v)));
    let out = TruncatedSeries::from_terms(0, cutoff, terms)?;
    out.with_envelope(0, vec![])
}

/// Sum side at `n = 1` with `x ↦ 1`.
pub fn andrews_gordon_sum(k: usize, cutoff: i64) -> Result<TruncatedSeries> {
    Ok(georgiev_char(1, k, k, 0, cutoff)?.specialize_x())
}

/// `georgiev(j_left)` with variables reversed against `georgiev(j_right)`.
pub fn dynkin_compare(n: usize, k: usize, k0: usize, j_left: usize, j_right: usize, cutoff: i64) -> Result<Comparison> {
    let a = georgiev_char(n, k, k0, j_left, cutoff)?.reverse_vars();
    let b = georgiev_char(n, k, k0, j_right, cutoff)?;
    a.equal_upto(&b, cutoff)
}

pub fn dynkin_flip_check(n: usize, k: usize, k0: usize, j: usize, cutoff: i64) -> Result<Comparison> {
    let mirror = if k0 == k { j } else { n + 1 - j };
    dynkin_compare(n, k, k0, j, mirror, cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn vacuum_low_order() {
        let s = georgiev_char(2, 1, 1, 0, 3).unwrap();
        assert_eq!(s.coeff(&[0, 0], 0), int(1));
        assert_eq!(s.coeff(&[1, 0], 1), int(1));
        assert_eq!(s.coeff(&[1, 1], 2), int(2));
        assert_eq!(s.coeff(&[1, 1], 3), int(3));
        assert_eq!(s.coeff(&[0, 0], 2), int(0));
        assert!(s.is_nonneg_integral());
    }

    #[test]
    fn vacuum_ignores_color() {
        let a = georgiev_char(3, 2, 2, 1, 6).unwrap();
        let b = georgiev_char(3, 2, 2, 3, 6).unwrap();
        assert!(a.equal_upto(&b, 6).unwrap().equal);
    }

    #[test]
    fn parameter_checks() {
        assert!(georgiev_char(2, 1, 2, 1, 3).is_err());
        assert!(georgiev_char(2, 2, 1, 3, 3).is_err());
        assert!(georgiev_char(0, 1, 1, 0, 3).is_err());
        assert!(char_w_k1l1_k2l2(1, 1, 1, 3).is_err());
        assert!(char_w_k1l1_k2l2(2, 2, 0, 3).is_err());
    }

    #[test]
    fn sector_expansion() {
        let t = SectorTerm { x: vec![], e: 1, kill: Some(1), pochs: vec![1] };
        // q (1 − q) / (1 − q) = q
        assert_eq!(sector_series(&t, 4).unwrap(), vec![1, 0, 0, 0]);
        let t = SectorTerm { x: vec![], e: 0, kill: None, pochs: vec![2] };
        assert_eq!(sector_series(&t, 4).unwrap(), vec![1, 1, 2, 2, 3]);
    }

    #[test]
    fn single_pform_sector() {
        // n = 2, k = 1, k1 = 1: p = (1, 0) gives q^{1−1}(1 − q) x_1^0 / (q)_1 = 1
        let s = char_pform(Display::First, 2, 1, 1, 4).unwrap();
        assert_eq!(s.coeff(&[0, 0], 0), int(1));
    }

    #[test]
    fn first_recursion_small() {
        let r = verify_recursion(Display::First, 2, 1, 1, 6).unwrap();
        assert!(r.comparison.equal, "{}", r.comparison);
        assert!(r.horizon >= 6);
    }

    #[test]
    fn level1_sequence_small() {
        let r = verify_level1_sequence_dims(2, 1, 6).unwrap();
        assert!(r.comparison.equal, "{}", r.comparison);
    }

    #[test]
    fn andrews_gordon_examples() {
        let p = andrews_gordon_product(1, 4).unwrap();
        let want = [1, 1, 1, 1, 2];
        for (s, w) in want.iter().enumerate() {
            assert_eq!(p.coeff(&[], s as i64), int(*w));
        }
        assert_eq!(andrews_gordon_product(2, 3).unwrap().coeff(&[], 1), int(1));
        let sum = andrews_gordon_sum(1, 12).unwrap();
        assert!(sum.equal_upto(&andrews_gordon_product(1, 12).unwrap(), 12).unwrap().equal);
    }
}
