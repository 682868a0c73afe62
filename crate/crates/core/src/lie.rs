//! Type-A root and weight lattice data.
//!
//! Roots and weights are written in the simple-root basis. A positive root
//! of `A_n` is an interval `α_lo + … + α_hi`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positive root `α_lo + … + α_hi`, 1-based and inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PositiveRoot {
    pub lo: usize,
    pub hi: usize,
}

impl PositiveRoot {
    pub fn simple(i: usize) -> Self {
        PositiveRoot { lo: i, hi: i }
    }

    pub fn new(lo: usize, hi: usize) -> Self {
        PositiveRoot { lo, hi }
    }

    pub fn height(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn contains(&self, i: usize) -> bool {
        self.lo <= i && i <= self.hi
    }

    /// 0/1 coordinates in the simple-root basis.
    pub fn coords(&self, n: usize) -> Vec<i64> {
        (1..=n).map(|i| self.contains(i) as i64).collect()
    }
}

impl fmt::Display for PositiveRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

pub fn cartan_matrix(n: i64) -> Result<Vec<Vec<i64>>> {
    if n < 1 {
        return Err(Error::InvalidRank(n));
    }
    let n = n as usize;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystemA {
    n: usize,
    cartan: Vec<Vec<i64>>,
    positive_roots: Vec<PositiveRoot>,
    epsilon_table: Vec<Vec<i64>>,
}

impl RootSystemA {
    pub fn new(n: i64) -> Result<Self> {
        let cartan = cartan_matrix(n)?;
        let n = n as usize;
        // simple roots first, then by height
        let mut positive_roots = Vec::with_capacity(n * (n + 1) / 2);
        for h in 1..=n {
            for lo in 1..=n + 1 - h {
                positive_roots.push(PositiveRoot::new(lo, lo + h - 1));
            }
        }
        let epsilon_table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i <= j || cartan[i][j] % 2 == 0 { 1 } else { -1 })
                    .collect()
            })
            .collect();
        Ok(RootSystemA { n, cartan, positive_roots, epsilon_table })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[PositiveRoot] {
        &self.positive_roots
    }

    pub fn epsilon_table(&self) -> &[Vec<i64>] {
        &self.epsilon_table
    }

    pub fn num_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn root(&self, idx: usize) -> PositiveRoot {
        self.positive_roots[idx]
    }

    pub fn check_root(&self, a: PositiveRoot) -> Result<()> {
        if a.lo >= 1 && a.lo <= a.hi && a.hi <= self.n {
            Ok(())
        } else {
            Err(Error::NotARoot(format!("{a:?} at rank {}", self.n)))
        }
    }

    pub fn root_index(&self, a: PositiveRoot) -> Result<usize> {
        self.check_root(a)?;
        let h = a.height();
        // roots of height < h come first
        let before: usize = (1..h).map(|g| self.n + 1 - g).sum();
        Ok(before + a.lo - 1)
    }

    /// `α + β` when it is a positive root.
    pub fn root_sum(&self, a: PositiveRoot, b: PositiveRoot) -> Option<PositiveRoot> {
        if a.hi + 1 == b.lo {
            Some(PositiveRoot::new(a.lo, b.hi))
        } else if b.hi + 1 == a.lo {
            Some(PositiveRoot::new(b.lo, a.hi))
        } else {
            None
        }
    }

    /// `C_{α,β}` in `[x_α, x_β] = C_{α,β} x_{α+β}`.
    pub fn structure_constant(&self, a: PositiveRoot, b: PositiveRoot) -> Result<i64> {
        self.check_root(a)?;
        self.check_root(b)?;
        Ok(match self.root_sum(a, b) {
            Some(_) => self.epsilon_q(&a.coords(self.n), &b.coords(self.n)),
            None => 0,
        })
    }

    /// Integer form on the root lattice.
    pub fn form(&self, u: &[i64], v: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                s += u[i] * self.cartan[i][j] * v[j];
            }
        }
        s
    }

    /// Bimultiplicative cocycle on `Q × Q`.
    pub fn epsilon_q(&self, mu: &[i64], nu: &[i64]) -> i64 {
        // only entries below the diagonal with odd A_ij contribute
        let mut odd = 0i64;
        for i in 1..self.n {
            odd += mu[i] * nu[i - 1];
        }
        if odd.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Cocycle extended to `Q × P` through the coset representative `λ_c` of `ν`.
    pub fn epsilon(&self, mu: &[i64], nu: &Weight) -> Result<i64> {
        if mu.len() != self.n || nu.rank() != self.n {
            return Err(Error::RankMismatch(mu.len(), nu.rank()));
        }
        let c = self.coset_class(nu)?;
        let rest = nu.sub(&self.fundamental_or_zero(c));
        let rest = rest.integer_coords().expect("coset representative leaves a root-lattice point");
        Ok(self.epsilon_q(mu, &rest))
    }

    pub fn inverse_cartan(&self, i: usize, j: usize) -> BigRational {
        let (i, j) = (i as i64, j as i64);
        let n1 = self.n as i64 + 1;
        BigRational::new(BigInt::from(i.min(j) * n1 - i * j), BigInt::from(n1))
    }

    /// Fundamental weight `λ_i` (1-based).
    pub fn fundamental(&self, i: usize) -> Weight {
        Weight { coords: (1..=self.n).map(|j| self.inverse_cartan(i, j)).collect() }
    }

    /// `λ_c`, with `λ_0 = 0`.
    pub fn fundamental_or_zero(&self, c: usize) -> Weight {
        if c == 0 {
            Weight::zero(self.n)
        } else {
            self.fundamental(c)
        }
    }

    /// Index `c ∈ {0..n}` with `ν − λ_c ∈ Q`.
    pub fn coset_class(&self, nu: &Weight) -> Result<usize> {
        let fund = nu.to_fundamental(self)?;
        let s: i64 = fund.iter().enumerate().map(|(j, a)| (j as i64 + 1) * a).sum();
        Ok(s.rem_euclid(self.n as i64 + 1) as usize)
    }

    pub fn inner_product(&self, u: &Weight, v: &Weight) -> Result<BigRational> {
        if u.rank() != self.n || v.rank() != self.n {
            return Err(Error::RankMismatch(u.rank(), v.rank()));
        }
        let mut s = BigRational::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self.cartan[i][j];
                if a != 0 {
                    s += &u.coords[i] * &v.coords[j] * BigInt::from(a);
                }
            }
        }
        Ok(s)
    }

    /// `⟨μ, λ⟩` for `μ ∈ Q` given by integer coordinates.
    pub fn pair(&self, mu: &[i64], lambda: &Weight) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..self.n {
            if mu[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                let a = self.cartan[i][j];
                if a != 0 {
                    s += &lambda.coords[j] * BigInt::from(a * mu[i]);
                }
            }
        }
        s
    }
}

/// Element of `P ⊗ ℚ` in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub coords: Vec<BigRational>,
}

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight { coords: vec![BigRational::zero(); n] }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn from_root(coords: &[i64]) -> Self {
        Weight { coords: coords.iter().map(|&c| BigRational::from_integer(c.into())).collect() }
    }

    /// Builds `Σ a_i λ_i`.
    pub fn from_fundamental(rs: &RootSystemA, a: &[i64]) -> Result<Self> {
        if a.len() != rs.rank() {
            return Err(Error::RankMismatch(a.len(), rs.rank()));
        }
        let n = rs.rank();
        let coords = (1..=n)
            .map(|j| {
                a.iter()
                    .enumerate()
                    .fold(BigRational::zero(), |acc, (i, &ai)| acc + rs.inverse_cartan(i + 1, j) * BigInt::from(ai))
            })
            .collect();
        Ok(Weight { coords })
    }

    /// Coordinates `⟨ν, α_j⟩`; errors when they are not integral.
    pub fn to_fundamental(&self, rs: &RootSystemA) -> Result<Vec<i64>> {
        if self.rank() != rs.rank() {
            return Err(Error::RankMismatch(self.rank(), rs.rank()));
        }
        let n = rs.rank();
        (0..n)
            .map(|j| {
                let mut s = BigRational::zero();
                for i in 0..n {
                    s += &self.coords[i] * BigInt::from(rs.cartan()[i][j]);
                }
                to_i64(&s).ok_or_else(|| Error::Malformed(format!("weight {self:?} is not integral")))
            })
            .collect()
    }

    pub fn integer_coords(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(to_i64).collect()
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Weight {
        Weight { coords: self.coords.iter().map(|a| -a).collect() }
    }
}

pub(crate) fn to_i64(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        i64::try_from(q.to_integer()).ok()
    } else {
        None
    }
}

/// `k_0 Λ_0 + … + k_n Λ_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DominantAffineWeight {
    coeffs: Vec<u32>,
}

impl DominantAffineWeight {
    pub fn new(coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidRank(coeffs.len() as i64 - 1));
        }
        if coeffs.iter().all(|&c| c == 0) {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        Ok(DominantAffineWeight { coeffs })
    }

    /// `k_0 Λ_0 + k_j Λ_j` at level `k`.
    pub fn two_term(n: usize, k: u32, k0: u32, j: usize) -> Result<Self> {
        if k0 > k {
            return Err(Error::InvalidParameter(format!("k0 = {k0} exceeds level {k}")));
        }
        let mut coeffs = vec![0; n + 1];
        coeffs[0] = k0;
        if k0 < k {
            if j == 0 || j > n {
                return Err(Error::InvalidParameter(format!("color {j} outside 1..={n}")));
            }
            coeffs[j] = k - k0;
        }
        Self::new(coeffs)
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn level(&self) -> u32 {
        self.coeffs.iter().sum()
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// `(k_0, j)` when the weight is `k_0 Λ_0 + k_j Λ_j`; `j = 0` for `kΛ_0`.
    pub fn as_two_term(&self) -> Option<(u32, usize)> {
        let nz: Vec<usize> = (1..self.coeffs.len()).filter(|&i| self.coeffs[i] != 0).collect();
        match nz.as_slice() {
            [] => Some((self.coeffs[0], 0)),
            [j] => Some((self.coeffs[0], *j)),
            _ => None,
        }
    }
}

impl fmt::Display for DominantAffineWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| format!("{c}*L{i}"))
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn cartan_small_ranks() {
        assert_eq!(cartan_matrix(2).unwrap(), vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(cartan_matrix(1).unwrap(), vec![vec![2]]);
        assert_eq!(cartan_matrix(4).unwrap()[1][2], -1);
        assert_eq!(cartan_matrix(0), Err(Error::InvalidRank(0)));
    }

    #[test]
    fn inner_products() {
        let rs = RootSystemA::new(2).unwrap();
        let a1 = Weight::from_root(&[1, 0]);
        let a2 = Weight::from_root(&[0, 1]);
        assert_eq!(rs.inner_product(&a1, &a2).unwrap(), rat(-1));
        let l1 = rs.fundamental(1);
        assert_eq!(rs.inner_product(&l1, &l1).unwrap(), BigRational::new(2.into(), 3.into()));
        let rs3 = RootSystemA::new(3).unwrap();
        assert_eq!(rs3.inner_product(&rs3.fundamental(1), &Weight::from_root(&[1, 0, 0])).unwrap(), rat(1));
    }

    #[test]
    fn fundamental_gram_matches_inverse_cartan() {
        for n in 1..=6 {
            let rs = RootSystemA::new(n).unwrap();
            for i in 1..=n as usize {
                for j in 1..=n as usize {
                    let got = rs.inner_product(&rs.fundamental(i), &rs.fundamental(j)).unwrap();
                    let n1 = n + 1;
                    let want = BigRational::new(
                        BigInt::from((i.min(j) as i64) * n1 - (i * j) as i64),
                        BigInt::from(n1),
                    );
                    assert_eq!(got, want);
                    let d = rs.inner_product(&rs.fundamental(i), &Weight::from_root(&PositiveRoot::simple(j).coords(n as usize))).unwrap();
                    assert_eq!(d, rat((i == j) as i64));
                }
            }
        }
    }

    #[test]
    fn epsilon_commutator_identity() {
        for n in 1..=6 {
            let rs = RootSystemA::new(n).unwrap();
            let n = n as usize;
            for i in 1..=n {
                for j in 1..=n {
                    let a = PositiveRoot::simple(i).coords(n);
                    let b = PositiveRoot::simple(j).coords(n);
                    let lhs = rs.epsilon_q(&a, &b) * rs.epsilon_q(&b, &a);
                    let want = if rs.form(&a, &b).rem_euclid(2) == 0 { 1 } else { -1 };
                    assert_eq!(lhs, want);
                }
            }
        }
        let rs = RootSystemA::new(2).unwrap();
        assert_eq!(rs.epsilon_q(&[1, 0], &[1, 0]), 1);
        assert_eq!(rs.epsilon_q(&[1, 0], &[0, 1]) * rs.epsilon_q(&[0, 1], &[1, 0]), -1);
        assert_eq!(rs.epsilon(&[0, 0], &rs.fundamental(1)).unwrap(), 1);
    }

    #[test]
    fn structure_constants() {
        let rs = RootSystemA::new(2).unwrap();
        assert_ne!(rs.structure_constant(PositiveRoot::simple(1), PositiveRoot::simple(2)).unwrap(), 0);
        assert_eq!(rs.structure_constant(PositiveRoot::simple(1), PositiveRoot::simple(1)).unwrap(), 0);
        let rs3 = RootSystemA::new(3).unwrap();
        assert_ne!(rs3.structure_constant(PositiveRoot::new(1, 2), PositiveRoot::simple(3)).unwrap(), 0);
        assert!(rs3.structure_constant(PositiveRoot::new(1, 4), PositiveRoot::simple(1)).is_err());
    }

    #[test]
    fn root_indexing() {
        for n in 1..=5 {
            let rs = RootSystemA::new(n).unwrap();
            assert_eq!(rs.num_roots(), (n * (n + 1) / 2) as usize);
            for (idx, &r) in rs.positive_roots().iter().enumerate() {
                assert_eq!(rs.root_index(r).unwrap(), idx);
            }
        }
    }

    #[test]
    fn fundamental_round_trip_and_classes() {
        let rs = RootSystemA::new(3).unwrap();
        let w = Weight::from_fundamental(&rs, &[2, -1, 3]).unwrap();
        assert_eq!(w.to_fundamental(&rs).unwrap(), vec![2, -1, 3]);
        for c in 0..=3 {
            assert_eq!(rs.coset_class(&rs.fundamental_or_zero(c)).unwrap(), c);
        }
        let shifted = rs.fundamental(2).add(&Weight::from_root(&[1, -2, 5]));
        assert_eq!(rs.coset_class(&shifted).unwrap(), 2);
    }

    #[test]
    fn affine_weights() {
        let w = DominantAffineWeight::two_term(3, 2, 1, 2).unwrap();
        assert_eq!(w.coeffs(), &[1, 0, 1, 0]);
        assert_eq!(w.level(), 2);
        assert_eq!(w.as_two_term(), Some((1, 2)));
        assert!(DominantAffineWeight::new(vec![0, 1, 1, 1]).unwrap().as_two_term().is_none());
        assert!(DominantAffineWeight::two_term(3, 2, 1, 4).is_err());
    }
}
