//! Quasiparticle basis of `W(k_0Λ_0 + k_jΛ_j)` and its character.
//!
//! A monomial lists, per color, particles `(charge, energy)` with weakly
//! decreasing charges. Each particle's energy is bounded above by an
//! expression in the charges of the previous color and of the earlier
//! particles of its own color; equal-charge neighbours must also satisfy
//! `m_{p+1} ≤ m_p − 2 n_p`. The weight of a monomial is `−Σ m`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lie::cartan_matrix;
use crate::quadratic::QuadraticForm;
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Particle {
    pub charge: i64,
    pub energy: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPMonomial {
    /// `colors[i - 1]` holds the color-`i` particles, largest charge first.
    pub colors: Vec<Vec<Particle>>,
}

impl QPMonomial {
    pub fn empty(n: usize) -> Self {
        QPMonomial { colors: vec![Vec::new(); n] }
    }

    pub fn weight(&self) -> i64 {
        self.colors.iter().flatten().map(|p| -p.energy).sum()
    }

    pub fn charges(&self) -> Vec<i64> {
        self.colors.iter().map(|c| c.iter().map(|p| p.charge).sum()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdmissibilityContext {
    pub n: usize,
    pub k: usize,
    pub k0: usize,
    pub j: usize,
}

impl AdmissibilityContext {
    pub fn new(n: usize, k: usize, k0: usize, j: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidRank(n as i64));
        }
        if k < 1 || k0 > k {
            return Err(Error::InvalidParameter(format!("need 1 ≤ k and k0 ≤ k, got k = {k}, k0 = {k0}")));
        }
        if k0 < k && (j == 0 || j > n) {
            return Err(Error::InvalidParameter(format!("color {j} outside 1..={n}")));
        }
        Ok(AdmissibilityContext { n, k, k0, j: if k0 == k { 0 } else { j } })
    }

    pub fn vacuum(n: usize, k: usize) -> Self {
        AdmissibilityContext { n, k, k0: k, j: 0 }
    }

    /// `j_t`: 0 for `t ≤ k_0`, `j` afterwards.
    pub fn j_t(&self, t: usize) -> usize {
        if t <= self.k0 {
            0
        } else {
            self.j
        }
    }

    /// `#{t ≤ charge : j_t = i}`.
    fn shift(&self, i: usize, charge: i64) -> i64 {
        (1..=charge as usize).filter(|&t| self.j_t(t) == i).count() as i64
    }

    /// Energy bound of particle `p` (0-based) of color `i` (1-based), from charges alone.
    fn bound(&self, charges: &[Vec<i64>], i: usize, p: usize) -> i64 {
        let np = charges[i - 1][p];
        let from_prev: i64 = if i >= 2 { charges[i - 2].iter().map(|&c| c.min(np)).sum() } else { 0 };
        let own: i64 = charges[i - 1][..p].iter().map(|&c| 2 * c.min(np)).sum();
        from_prev - self.shift(i, np) - own - np
    }
}

fn check_shape(m: &QPMonomial, ctx: &AdmissibilityContext) -> Result<()> {
    if m.colors.len() != ctx.n {
        return Err(Error::RankMismatch(m.colors.len(), ctx.n));
    }
    for (i, color) in m.colors.iter().enumerate() {
        for (p, part) in color.iter().enumerate() {
            if part.charge < 1 || part.charge > ctx.k as i64 {
                return Err(Error::Malformed(format!("color {} particle {} has charge {}", i + 1, p + 1, part.charge)));
            }
            if p > 0 && color[p - 1].charge < part.charge {
                return Err(Error::Malformed(format!("color {} charges are not weakly decreasing", i + 1)));
            }
        }
    }
    Ok(())
}

pub fn is_admissible(m: &QPMonomial, ctx: &AdmissibilityContext) -> Result<bool> {
    check_shape(m, ctx)?;
    let charges: Vec<Vec<i64>> = m.colors.iter().map(|c| c.iter().map(|p| p.charge).collect()).collect();
    for (i, color) in m.colors.iter().enumerate() {
        for (p, part) in color.iter().enumerate() {
            if part.energy > ctx.bound(&charges, i + 1, p) {
                return Ok(false);
            }
            if p > 0 && color[p - 1].charge == part.charge && part.energy > color[p - 1].energy - 2 * part.charge {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Flattened particle data for one charge configuration.
struct Layout {
    charges: Vec<i64>,
    bounds: Vec<i64>,
    /// Whether particle `q` continues an equal-charge block of the same color.
    chained: Vec<bool>,
    /// Minimal total weight of particles `q..`, each block at its maximal energies.
    rest_min: Vec<i64>,
}

impl Layout {
    fn new(ctx: &AdmissibilityContext, config: &[Vec<i64>]) -> Self {
        let mut charges = Vec::new();
        let mut bounds = Vec::new();
        let mut chained = Vec::new();
        for (i, color) in config.iter().enumerate() {
            for (p, &c) in color.iter().enumerate() {
                charges.push(c);
                bounds.push(ctx.bound(config, i + 1, p));
                chained.push(p > 0 && color[p - 1] == c);
            }
        }
        let len = charges.len();
        let mut rest_min = vec![0i64; len + 1];
        let mut top = vec![0i64; len];
        for q in 0..len {
            top[q] = if chained[q] { bounds[q].min(top[q - 1] - 2 * charges[q - 1]) } else { bounds[q] };
        }
        for q in (0..len).rev() {
            rest_min[q] = rest_min[q + 1] - top[q];
        }
        Layout { charges, bounds, chained, rest_min }
    }

    fn min_weight(&self) -> i64 {
        self.rest_min[0]
    }

    /// Calls `leaf` with the energies of every admissible filling of weight ≤ `budget`.
    fn fill<F: FnMut(&[i64])>(&self, budget: i64, leaf: &mut F) {
        let mut energies = vec![0i64; self.charges.len()];
        self.descend(0, 0, budget, &mut energies, leaf);
    }

    fn descend<F: FnMut(&[i64])>(&self, q: usize, used: i64, budget: i64, energies: &mut Vec<i64>, leaf: &mut F) {
        if q == self.charges.len() {
            leaf(energies);
            return;
        }
        let top = if self.chained[q] { self.bounds[q].min(energies[q - 1] - 2 * self.charges[q - 1]) } else { self.bounds[q] };
        // rest of this block, run at maximal energies below `m`
        let block_end = (q + 1..self.charges.len()).find(|&u| !self.chained[u]).unwrap_or(self.charges.len());
        let mut m = top;
        loop {
            let mut w = used - m;
            let mut prev = m;
            for u in q + 1..block_end {
                let e = self.bounds[u].min(prev - 2 * self.charges[u - 1]);
                w -= e;
                prev = e;
            }
            if w + self.rest_min[block_end] > budget {
                break;
            }
            energies[q] = m;
            self.descend(q + 1, used - m, budget, energies, leaf);
            m -= 1;
        }
    }
}

fn partitions(total: i64, largest: i64) -> Vec<Vec<i64>> {
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=largest.min(total)).rev() {
        for mut rest in partitions(total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn configurations(ctx: &AdmissibilityContext, r: &[i64]) -> Vec<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<Vec<i64>>> = vec![vec![]];
    for &ri in r {
        let parts = partitions(ri, ctx.k as i64);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                parts.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn monomial_from(config: &[Vec<i64>], energies: &[i64]) -> QPMonomial {
    let mut it = energies.iter();
    QPMonomial {
        colors: config
            .iter()
            .map(|color| color.iter().map(|&charge| Particle { charge, energy: *it.next().unwrap() }).collect())
            .collect(),
    }
}

/// All admissible monomials with charge vector `r` and weight ≤ `cutoff`.
pub fn enumerate_sector(ctx: &AdmissibilityContext, r: &[i64], cutoff: i64) -> Result<Vec<QPMonomial>> {
    if r.len() != ctx.n {
        return Err(Error::RankMismatch(r.len(), ctx.n));
    }
    if r.iter().any(|&v| v < 0) {
        return Err(Error::InvalidParameter("charges must be nonnegative".into()));
    }
    let mut out = Vec::new();
    for config in configurations(ctx, r) {
        let layout = Layout::new(ctx, &config);
        layout.fill(cutoff, &mut |e| out.push(monomial_from(&config, e)));
    }
    out.sort();
    Ok(out)
}

/// Charge configuration from r-form variables: `r_i^(t)` counts color-`i` particles of charge ≥ `t`.
fn config_from_r(r: &[i64], n: usize, k: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            let mut color = Vec::new();
            for t in (1..=k).rev() {
                let next = if t < k { r[i * k + t] } else { 0 };
                for _ in 0..(r[i * k + t - 1] - next) {
                    color.push(t as i64);
                }
            }
            color
        })
        .collect()
}

/// Charge configurations whose fermionic exponent is at most `cutoff`, paired with that exponent.
pub fn candidate_configurations(ctx: &AdmissibilityContext, cutoff: i64, slack: i64) -> Result<Vec<(Vec<Vec<i64>>, i64)>> {
    let (n, k) = (ctx.n, ctx.k);
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
    let mut linear = vec![0i64; d];
    for t in ctx.k0..k {
        linear[(ctx.j - 1) * k + t] = 1;
    }
    let parent = (0..d).map(|v| if v % k == 0 { None } else { Some(v - 1) }).collect();
    let form = QuadraticForm::new(m, linear, parent)?;
    Ok(form.enumerate(cutoff, slack).into_iter().map(|(r, e)| (config_from_r(&r, n, k), e)).collect())
}

/// Minimal weight of any admissible monomial with the given charges.
pub fn configuration_min_weight(ctx: &AdmissibilityContext, config: &[Vec<i64>]) -> i64 {
    Layout::new(ctx, config).min_weight()
}

/// `Σ x^{charges} q^{weight}` over admissible monomials, through `cutoff`.
pub fn char_from_basis(ctx: &AdmissibilityContext, cutoff: i64) -> Result<TruncatedSeries> {
    char_from_basis_with(ctx, cutoff, 0)
}

pub fn char_from_basis_with(ctx: &AdmissibilityContext, cutoff: i64, slack: i64) -> Result<TruncatedSeries> {
    let configs = candidate_configurations(ctx, cutoff, slack)?;
    type Acc = HashMap<(Vec<i64>, i64), u64>;
    let merged: Acc = configs
        .par_iter()
        .fold(Acc::new, |mut acc, (config, _)| {
            let layout = Layout::new(ctx, config);
            let charges: Vec<i64> = config.iter().map(|c| c.iter().sum()).collect();
            layout.fill(cutoff, &mut |e| {
                let w: i64 = -e.iter().sum::<i64>();
                *acc.entry((charges.clone(), w)).or_insert(0) += 1;
            });
            acc
        })
        .reduce(Acc::new, |mut a, b| {
            for (key, v) in b {
                *a.entry(key).or_insert(0) += v;
            }
            a
        });
    TruncatedSeries::from_terms(
        ctx.n,
        cutoff,
        merged.into_iter().map(|((r, s), c)| (r, s, BigRational::from_integer(BigInt::from(c)))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(colors: Vec<Vec<(i64, i64)>>) -> QPMonomial {
        QPMonomial {
            colors: colors
                .into_iter()
                .map(|c| c.into_iter().map(|(charge, energy)| Particle { charge, energy }).collect())
                .collect(),
        }
    }

    #[test]
    fn admissibility_examples() {
        let ctx = AdmissibilityContext::vacuum(2, 1);
        assert!(is_admissible(&mono(vec![vec![(1, -1)], vec![]]), &ctx).unwrap());
        assert!(!is_admissible(&mono(vec![vec![(1, 0)], vec![]]), &ctx).unwrap());
        assert!(is_admissible(&mono(vec![vec![(1, -1)], vec![(1, 0)]]), &ctx).unwrap());
        assert!(is_admissible(&mono(vec![vec![(2, -1)], vec![]]), &ctx).is_err());
        let ctx2 = AdmissibilityContext::vacuum(1, 2);
        assert!(is_admissible(&mono(vec![vec![(1, -1), (2, -5)]]), &ctx2).is_err());
    }

    #[test]
    fn sector_examples() {
        let ctx = AdmissibilityContext::vacuum(2, 1);
        let s = enumerate_sector(&ctx, &[1, 0], 3).unwrap();
        let energies: Vec<i64> = s.iter().map(|m| m.colors[0][0].energy).collect();
        assert_eq!(energies, vec![-3, -2, -1]);
        assert_eq!(enumerate_sector(&ctx, &[0, 0], 3).unwrap(), vec![QPMonomial::empty(2)]);
        let s = enumerate_sector(&ctx, &[1, 1], 1).unwrap();
        assert_eq!(s, vec![mono(vec![vec![(1, -1)], vec![(1, 0)]])]);
    }

    #[test]
    fn shifted_color_bound() {
        let ctx = AdmissibilityContext::new(2, 1, 0, 1).unwrap();
        let s = char_from_basis(&ctx, 3).unwrap();
        assert_eq!(s.coeff(&[1, 0], 1), BigRational::from_integer(0.into()));
        assert_eq!(s.coeff(&[1, 0], 2), BigRational::from_integer(1.into()));
        assert_eq!(s.coeff(&[0, 1], 1), BigRational::from_integer(1.into()));
    }

    #[test]
    fn enumerated_monomials_are_admissible_and_distinct() {
        let ctx = AdmissibilityContext::new(2, 2, 1, 2).unwrap();
        let s = enumerate_sector(&ctx, &[3, 2], 9).unwrap();
        assert!(!s.is_empty());
        for m in &s {
            assert!(is_admissible(m, &ctx).unwrap());
            assert!(m.weight() <= 9);
            assert_eq!(m.charges(), vec![3, 2]);
        }
        let mut d = s.clone();
        d.dedup();
        assert_eq!(d.len(), s.len());
    }

    #[test]
    fn minimal_weight_matches_exponent() {
        for (n, k, k0, j) in [(2, 2, 0, 1), (3, 2, 1, 2), (2, 3, 1, 2), (3, 1, 0, 3)] {
            let ctx = AdmissibilityContext::new(n, k, k0, j).unwrap();
            for (config, e) in candidate_configurations(&ctx, 9, 0).unwrap() {
                assert_eq!(configuration_min_weight(&ctx, &config), e, "{config:?}");
            }
        }
    }
}
