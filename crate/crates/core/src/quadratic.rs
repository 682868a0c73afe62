//! Enumeration of nonnegative integer vectors under a positive-definite
//! quadratic energy `E(v) = ½ vᵀMv + l·v`.
//!
//! Pruning uses the exact real minimum of `E` over the unfixed tail, which
//! is a lower bound for every integer completion. Coordinates may be tied
//! by chain constraints `v[j] ≤ v[parent(j)]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct QuadraticForm {
    dim: usize,
    m: Vec<Vec<i64>>,
    l: Vec<i64>,
    parent: Vec<Option<usize>>,
    /// Per prefix length `j`: determinant and adjugate of the tail block `M[j.., j..]`.
    tails: Vec<(i128, Vec<Vec<i128>>)>,
    lambda: BigRational,
}

impl QuadraticForm {
    pub fn new(m: Vec<Vec<i64>>, l: Vec<i64>, parent: Vec<Option<usize>>) -> Result<Self> {
        let dim = m.len();
        if l.len() != dim || parent.len() != dim || m.iter().any(|row| row.len() != dim) {
            return Err(Error::Malformed("quadratic form dimensions disagree".into()));
        }
        for i in 0..dim {
            if m[i][i] % 2 != 0 {
                return Err(Error::Malformed("diagonal must be even".into()));
            }
            for j in 0..dim {
                if m[i][j] != m[j][i] {
                    return Err(Error::Malformed("matrix is not symmetric".into()));
                }
            }
            if let Some(p) = parent[i] {
                if p >= i {
                    return Err(Error::Malformed("chain parent must precede its child".into()));
                }
            }
        }
        let big: Vec<Vec<BigRational>> = m.iter().map(|row| row.iter().map(|&x| rat(x)).collect()).collect();
        if !positive_definite(&big, &BigRational::zero()) {
            return Err(Error::InvalidParameter("quadratic form is not positive definite".into()));
        }
        let tails = (0..=dim).map(|j| tail_adjugate(&big, j)).collect::<Result<Vec<_>>>()?;
        let lambda = lambda_lower_bound(&big);
        Ok(QuadraticForm { dim, m, l, parent, tails, lambda })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Certified lower bound for the smallest eigenvalue of `M`.
    pub fn lambda_lower(&self) -> &BigRational {
        &self.lambda
    }

    pub fn energy(&self, v: &[i64]) -> i64 {
        let mut e2 = 0i64;
        for i in 0..self.dim {
            if v[i] == 0 {
                continue;
            }
            e2 += 2 * self.l[i] * v[i];
            for j in 0..self.dim {
                e2 += v[i] * self.m[i][j] * v[j];
            }
        }
        e2 / 2
    }

    /// Largest coordinate value any vector with `E ≤ threshold` can have.
    pub fn box_cap(&self, threshold: i64) -> i64 {
        // E ≥ ½λ|v|² − |l⁻||v| for v ≥ 0
        let neg2: i64 = self.l.iter().filter(|&&x| x < 0).map(|x| x * x).sum();
        let mut lneg = (neg2 as f64).sqrt() as i64;
        while lneg * lneg < neg2 {
            lneg += 1;
        }
        let half = &self.lambda / rat(2);
        let mut x = 0i64;
        loop {
            let next = x + 1;
            let e = &half * rat(next * next) - rat(lneg * next);
            if e > rat(threshold) {
                return x;
            }
            x = next;
        }
    }

    /// All admissible `v ≥ 0` with `E(v) ≤ threshold`, paired with their energies.
    ///
    /// `slack` widens both the box cap and the threshold; results with `E ≤ threshold`
    /// are unaffected by it when the pruning is sound.
    pub fn enumerate(&self, threshold: i64, slack: i64) -> Vec<(Vec<i64>, i64)> {
        let limit = threshold + slack;
        let cap = self.box_cap(limit) + slack;
        let mut out = Vec::new();
        let mut v = vec![0i64; self.dim];
        self.descend(0, &mut v, cap, limit, &mut out);
        out.retain(|(_, e)| *e <= threshold);
        out
    }

    fn descend(&self, j: usize, v: &mut Vec<i64>, cap: i64, limit: i64, out: &mut Vec<(Vec<i64>, i64)>) {
        if j == self.dim {
            let e = self.energy(v);
            if e <= limit {
                out.push((v.clone(), e));
            }
            return;
        }
        let top = match self.parent[j] {
            Some(p) => v[p].min(cap),
            None => cap,
        };
        let mut prev: Option<i128> = None;
        for x in 0..=top {
            v[j] = x;
            let b = self.scaled_bound(j + 1, v);
            let (det, _) = &self.tails[j + 1];
            let over = b > 2 * (limit as i128) * det;
            if !over {
                self.descend(j + 1, v, cap, limit, out);
            } else if prev.is_some_and(|p| b >= p) {
                break;
            }
            prev = Some(b);
        }
        v[j] = 0;
    }

    /// `det · min_y 2E(v[..j], y)` over real tails.
    fn scaled_bound(&self, j: usize, v: &[i64]) -> i128 {
        let (det, adj) = &self.tails[j];
        let mut head = 0i128;
        for a in 0..j {
            if v[a] == 0 {
                continue;
            }
            head += 2 * (self.l[a] as i128) * (v[a] as i128);
            for c in 0..j {
                head += (v[a] as i128) * (self.m[a][c] as i128) * (v[c] as i128);
            }
        }
        let t = self.dim - j;
        if t == 0 {
            return head;
        }
        let b: Vec<i128> = (j..self.dim)
            .map(|row| (0..j).map(|c| (self.m[row][c] as i128) * (v[c] as i128)).sum::<i128>() + self.l[row] as i128)
            .collect();
        let mut quad = 0i128;
        for a in 0..t {
            if b[a] == 0 {
                continue;
            }
            for c in 0..t {
                quad += b[a] * adj[a][c] * b[c];
            }
        }
        det * head - quad
    }
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Whether `M − shift·I` is positive definite, by exact `LDLᵀ` pivots.
fn positive_definite(m: &[Vec<BigRational>], shift: &BigRational) -> bool {
    let d = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= shift;
    }
    for k in 0..d {
        if !a[k][k].is_positive() {
            return false;
        }
        for i in k + 1..d {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &a[k][k];
            for j in k..d {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    true
}

fn lambda_lower_bound(m: &[Vec<BigRational>]) -> BigRational {
    let mut lo = BigRational::zero();
    let mut hi = m.iter().enumerate().map(|(i, r)| r[i].clone()).min().unwrap_or_else(BigRational::one);
    for _ in 0..24 {
        let mid = (&lo + &hi) / rat(2);
        if positive_definite(m, &mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Determinant and adjugate of `M[j.., j..]` as integers.
fn tail_adjugate(m: &[Vec<BigRational>], j: usize) -> Result<(i128, Vec<Vec<i128>>)> {
    let d = m.len() - j;
    if d == 0 {
        return Ok((1, vec![]));
    }
    let mut a: Vec<Vec<BigRational>> = (j..m.len()).map(|r| m[r][j..].to_vec()).collect();
    let mut inv: Vec<Vec<BigRational>> =
        (0..d).map(|r| (0..d).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let mut det = BigRational::one();
    for k in 0..d {
        let p = (k..d).find(|&r| !a[r][k].is_zero()).ok_or_else(|| Error::Malformed("singular block".into()))?;
        if p != k {
            a.swap(p, k);
            inv.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det *= &piv;
        for c in 0..d {
            a[k][c] /= &piv;
            inv[k][c] /= &piv;
        }
        for r in 0..d {
            if r == k || a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone();
            for c in 0..d {
                let t = &f * &a[k][c];
                a[r][c] -= t;
                let t = &f * &inv[k][c];
                inv[r][c] -= t;
            }
        }
    }
    let to = |q: BigRational| -> Result<i128> {
        if !q.is_integer() {
            return Err(Error::Malformed("adjugate is not integral".into()));
        }
        q.to_integer().to_i128().ok_or_else(|| Error::Resource("adjugate overflows i128".into()))
    };
    let adj = inv.into_iter().map(|row| row.into_iter().map(|x| to(x * &det)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    Ok((to(det)?, adj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Vec<Vec<i64>> {
        vec![vec![2, -1], vec![-1, 2]]
    }

    fn brute(f: &QuadraticForm, threshold: i64, cap: i64) -> Vec<(Vec<i64>, i64)> {
        let mut out = Vec::new();
        let d = f.dim();
        let mut v = vec![0i64; d];
        loop {
            let ok = (0..d).all(|j| f.parent[j].is_none_or(|p| v[j] <= v[p]));
            if ok {
                let e = f.energy(&v);
                if e <= threshold {
                    out.push((v.clone(), e));
                }
            }
            let mut i = 0;
            loop {
                if i == d {
                    return out;
                }
                v[i] += 1;
                if v[i] <= cap {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        assert!(QuadraticForm::new(vec![vec![2, -3], vec![-3, 2]], vec![0, 0], vec![None, None]).is_err());
    }

    #[test]
    fn lambda_bound_is_below_spectrum() {
        let f = QuadraticForm::new(a2(), vec![0, 0], vec![None, None]).unwrap();
        let l = f.lambda_lower().clone();
        assert!(l <= rat(1) && l > BigRational::new(99.into(), 100.into()));
    }

    #[test]
    fn matches_brute_force() {
        let f = QuadraticForm::new(a2(), vec![-1, 1], vec![None, None]).unwrap();
        let mut got = f.enumerate(12, 0);
        let mut want = brute(&f, 12, 20);
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn chain_constraints() {
        // two levels of a rank-one r-form: r1 ≥ r2
        let m = vec![vec![2, 0], vec![0, 2]];
        let f = QuadraticForm::new(m, vec![0, 0], vec![None, Some(0)]).unwrap();
        let mut got = f.enumerate(9, 2);
        let mut want = brute(&f, 9, 10);
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert!(got.iter().all(|(v, _)| v[1] <= v[0]));
    }
}
