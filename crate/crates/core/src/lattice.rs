//! Level-1 lattice realization `V_Q e^{λ_i} = M(1) ⊗ ℂ[Q]e^{λ_i}`.
//!
//! Basis vectors are a Heisenberg monomial `∏ h_j(−m)` together with the
//! root-lattice offset `β = μ − λ_i`. Vertex operator modes are expanded
//! from `Y(e^α, x) = E⁻(−α,x) E⁺(−α,x) e_α x^α` and the principal subspace
//! is obtained as the span of iterated simple-root modes, sector by sector.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::envelope::{Envelope, Generator, PBWElement};
use crate::error::{Error, Result};
use crate::fermionic::charge_envelope;
use crate::lie::{PositiveRoot, RootSystemA};
use crate::series::TruncatedSeries;

/// `∏ h_j(−m)` as a sorted list of `(color, m)` with repetition, tensored with `e^{λ_i + lattice}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockBasisVector {
    pub lattice: Vec<i64>,
    pub heisenberg: Vec<(usize, i64)>,
}

impl FockBasisVector {
    pub fn highest(n: usize) -> Self {
        FockBasisVector { lattice: vec![0; n], heisenberg: vec![] }
    }
}

pub type FockVector = BTreeMap<FockBasisVector, BigRational>;

type Heis = BTreeMap<Vec<(usize, i64)>, BigRational>;

/// Sectors larger than this abort the closure.
pub const MAX_SECTOR_DIM: usize = 20_000;

fn add_into<K: Ord>(map: &mut BTreeMap<K, BigRational>, key: K, c: BigRational) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn vector_add(a: &FockVector, b: &FockVector) -> FockVector {
    let mut out = a.clone();
    for (k, c) in b {
        add_into(&mut out, k.clone(), c.clone());
    }
    out
}

pub fn vector_scale(a: &FockVector, c: &BigRational) -> FockVector {
    if c.is_zero() {
        return FockVector::new();
    }
    a.iter().map(|(k, v)| (k.clone(), v * c)).collect()
}

/// The module `V_Q e^{λ_i}` truncated at weight `cutoff`.
pub struct FockSpace {
    rs: RootSystemA,
    sector: usize,
    cutoff: i64,
    cache: Mutex<HashMap<(usize, i64, FockBasisVector), FockVector>>,
}

impl std::fmt::Debug for FockSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FockSpace").field("n", &self.rs.rank()).field("i", &self.sector).field("cutoff", &self.cutoff).finish()
    }
}

impl FockSpace {
    pub fn new(n: i64, i: usize, cutoff: i64) -> Result<Self> {
        let rs = RootSystemA::new(n)?;
        if i > rs.rank() {
            return Err(Error::InvalidParameter(format!("sector {i} outside 0..={n}")));
        }
        Ok(FockSpace { rs, sector: i, cutoff, cache: Mutex::new(HashMap::new()) })
    }

    pub fn root_system(&self) -> &RootSystemA {
        &self.rs
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn highest_weight_vector(&self) -> FockVector {
        FockVector::from([(FockBasisVector::highest(self.rs.rank()), BigRational::one())])
    }

    /// `⟨λ_i, β⟩`.
    fn lambda_pair(&self, beta: &[i64]) -> i64 {
        if self.sector == 0 {
            0
        } else {
            beta[self.sector - 1]
        }
    }

    /// `⟨μ, μ⟩/2 − ⟨λ_i, λ_i⟩/2 + Σ m`.
    pub fn weight(&self, v: &FockBasisVector) -> i64 {
        self.lambda_pair(&v.lattice) + self.rs.form(&v.lattice, &v.lattice) / 2 + v.heisenberg.iter().map(|h| h.1).sum::<i64>()
    }

    /// `⟨α, μ⟩` for `μ = λ_i + β`.
    fn root_pair(&self, alpha: &[i64], beta: &[i64]) -> i64 {
        self.lambda_pair(alpha) + self.rs.form(alpha, beta)
    }

    fn check_color(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.rs.rank() {
            return Err(Error::InvalidParameter(format!("color {j} outside 1..={}", self.rs.rank())));
        }
        Ok(())
    }

    /// `h_j(m)`.
    pub fn heisenberg_act(&self, j: usize, m: i64, v: &FockVector) -> Result<FockVector> {
        self.check_color(j)?;
        let mut out = FockVector::new();
        for (b, c) in v {
            if m == 0 {
                let e = int(self.root_pair(&PositiveRoot::simple(j).coords(self.rs.rank()), &b.lattice));
                add_into(&mut out, b.clone(), c * e);
                continue;
            }
            if m < 0 && self.weight(b) - m > self.cutoff {
                continue;
            }
            for (h, c2) in self.heis_mode(j, m, &b.heisenberg) {
                add_into(&mut out, FockBasisVector { lattice: b.lattice.clone(), heisenberg: h }, c * c2);
            }
        }
        Ok(out)
    }

    /// `h_j(m)` on `M(1)` for `m ≠ 0`.
    fn heis_mode(&self, j: usize, m: i64, h: &[(usize, i64)]) -> Heis {
        let mut out = Heis::new();
        if m < 0 {
            let mut g = h.to_vec();
            let pos = g.partition_point(|&x| x <= (j, -m));
            g.insert(pos, (j, -m));
            out.insert(g, BigRational::one());
            return out;
        }
        for (idx, &(l, mode)) in h.iter().enumerate() {
            if mode != m {
                continue;
            }
            let a = self.rs.cartan()[j - 1][l - 1];
            if a == 0 {
                continue;
            }
            let mut g = h.to_vec();
            g.remove(idx);
            add_into(&mut out, g, int(m * a));
        }
        out
    }

    /// `α(m) = Σ_{j ∈ α} h_j(m)` on a Heisenberg vector.
    fn root_mode(&self, alpha: PositiveRoot, m: i64, v: &Heis) -> Heis {
        let mut out = Heis::new();
        for (h, c) in v {
            for j in alpha.lo..=alpha.hi {
                for (g, c2) in self.heis_mode(j, m, h) {
                    add_into(&mut out, g, c * c2);
                }
            }
        }
        out
    }

    /// `x_α(m)` on a single basis vector, uncached.
    fn x_basis(&self, alpha: PositiveRoot, m: i64, b: &FockBasisVector) -> FockVector {
        let n = self.rs.rank();
        let mut out = FockVector::new();
        let w = self.weight(b) - m;
        if w > self.cutoff || w < 0 {
            return out;
        }
        let a_coords = alpha.coords(n);
        let s = self.root_pair(&a_coords, &b.lattice);
        let sign = int(self.rs.epsilon_q(&a_coords, &b.lattice));
        let lattice: Vec<i64> = b.lattice.iter().zip(&a_coords).map(|(x, y)| x + y).collect();
        let degree: i64 = b.heisenberg.iter().map(|h| h.1).sum();
        // E⁺: P_b = (1/b) Σ_{k=1}^{b} −α(k) P_{b−k}
        let mut plus: Vec<Heis> = vec![Heis::from([(b.heisenberg.clone(), BigRational::one())])];
        for bb in 1..=degree {
            let mut acc = Heis::new();
            for k in 1..=bb {
                for (h, c) in self.root_mode(alpha, k, &plus[(bb - k) as usize]) {
                    add_into(&mut acc, h, -c);
                }
            }
            let inv = BigRational::new(BigInt::one(), BigInt::from(bb));
            plus.push(acc.into_iter().map(|(h, c)| (h, c * &inv)).collect());
        }
        for (bb, p) in plus.iter().enumerate() {
            let a = bb as i64 - s - m - 1;
            if a < 0 || p.is_empty() {
                continue;
            }
            // E⁻: Q_a = (1/a) Σ_{k=1}^{a} α(−k) Q_{a−k}
            let mut minus: Vec<Heis> = vec![p.clone()];
            for aa in 1..=a {
                let mut acc = Heis::new();
                for k in 1..=aa {
                    for (h, c) in self.root_mode(alpha, -k, &minus[(aa - k) as usize]) {
                        add_into(&mut acc, h, c);
                    }
                }
                let inv = BigRational::new(BigInt::one(), BigInt::from(aa));
                minus.push(acc.into_iter().map(|(h, c)| (h, c * &inv)).collect());
            }
            for (h, c) in minus.pop().unwrap() {
                add_into(&mut out, FockBasisVector { lattice: lattice.clone(), heisenberg: h }, c * &sign);
            }
        }
        out
    }

    /// `x_α(m)`, the `x^{−m−1}` coefficient of `Y(e^α, x)`, truncated at the cutoff.
    pub fn x_alpha_act(&self, alpha: PositiveRoot, m: i64, v: &FockVector) -> Result<FockVector> {
        let idx = self.rs.root_index(alpha)?;
        let mut out = FockVector::new();
        for (b, c) in v {
            let key = (idx, m, b.clone());
            let hit = self.cache.lock().unwrap().get(&key).cloned();
            let image = match hit {
                Some(img) => img,
                None => {
                    let img = self.x_basis(alpha, m, b);
                    self.cache.lock().unwrap().insert(key, img.clone());
                    img
                }
            };
            for (b2, c2) in image {
                add_into(&mut out, b2, c * c2);
            }
        }
        Ok(out)
    }

    /// PBW element acting on `v`, rightmost factor first.
    pub fn act(&self, env: &Envelope, u: &PBWElement, v: &FockVector) -> Result<FockVector> {
        let mut out = FockVector::new();
        for (mono, c) in u {
            let mut w = v.clone();
            for g in mono.iter().rev() {
                w = self.x_alpha_act(env.root_system().root(g.root), g.mode, &w)?;
            }
            out = vector_add(&out, &vector_scale(&w, c));
        }
        Ok(out)
    }

    /// `[x_α(m), x_β(p)]·v = C_{α,β} x_{α+β}(m+p)·v`.
    pub fn bracket_check(&self, alpha: PositiveRoot, beta: PositiveRoot, m: i64, p: i64, sample: &FockVector) -> Result<bool> {
        let ab = self.x_alpha_act(alpha, m, &self.x_alpha_act(beta, p, sample)?)?;
        let ba = self.x_alpha_act(beta, p, &self.x_alpha_act(alpha, m, sample)?)?;
        let lhs = vector_add(&ab, &vector_scale(&ba, &-BigRational::one()));
        let rhs = match self.rs.root_sum(alpha, beta) {
            Some(sum) => vector_scale(&self.x_alpha_act(sum, m + p, sample)?, &int(self.rs.structure_constant(alpha, beta)?)),
            None => FockVector::new(),
        };
        Ok(lhs == rhs)
    }
}

/// Row-reduced echelon basis of one sector.
#[derive(Default)]
struct Echelon {
    rows: BTreeMap<FockBasisVector, FockVector>,
}

impl Echelon {
    fn insert(&mut self, mut v: FockVector) -> bool {
        for (p, row) in &self.rows {
            if let Some(c) = v.get(p).cloned() {
                for (k, x) in row {
                    add_into(&mut v, k.clone(), -(&c * x));
                }
            }
        }
        let Some((p, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = c.recip();
        let v: FockVector = v.into_iter().map(|(k, x)| (k, x * &inv)).collect();
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&p).cloned() {
                for (k, x) in &v {
                    add_into(row, k.clone(), -(&c * x));
                }
            }
        }
        self.rows.insert(p, v);
        true
    }
}

/// Which root vectors generate the closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generators {
    Simple,
    All,
}

type SectorKey = (Vec<i64>, i64);

/// Spanning vectors of every sector `(charge, weight)` of `W(Λ_i) = U(n̄)·v_{Λ_i}` up to weight `cutoff`.
///
/// Modes `m ≤ 0` suffice: they generate `n ⊗ t^{≤0}` and never lower the weight.
pub fn principal_subspace_sectors(n: usize, i: usize, cutoff: i64, gens: Generators) -> Result<BTreeMap<SectorKey, Vec<FockVector>>> {
    let space = FockSpace::new(n as i64, i, cutoff)?;
    let roots: Vec<PositiveRoot> = match gens {
        Generators::Simple => (1..=n).map(PositiveRoot::simple).collect(),
        Generators::All => space.rs.positive_roots().to_vec(),
    };
    let max_height = roots.iter().map(|r| r.height()).max().unwrap_or(1);
    let mut levels: Vec<BTreeMap<SectorKey, Vec<FockVector>>> = Vec::new();
    let mut top = BTreeMap::new();
    if cutoff >= 0 {
        top.insert((vec![0; n], 0), vec![space.highest_weight_vector()]);
    }
    levels.push(top);
    let mut last_nonempty = 0;
    let mut level = 1;
    while level <= last_nonempty + max_height {
        // target sector -> list of (source level, source key, root, mode)
        let mut plan: BTreeMap<SectorKey, Vec<(usize, SectorKey, PositiveRoot, i64)>> = BTreeMap::new();
        for &root in &roots {
            let h = root.height();
            if h > level {
                continue;
            }
            let coords = root.coords(n);
            for key in levels[level - h].keys() {
                let (beta, s) = key;
                for m in -(cutoff - s)..=0 {
                    let target: Vec<i64> = beta.iter().zip(&coords).map(|(x, y)| x + y).collect();
                    plan.entry((target, s - m)).or_default().push((level - h, key.clone(), root, m));
                }
            }
        }
        let built: Vec<(SectorKey, Result<Vec<FockVector>>)> = plan
            .into_par_iter()
            .map(|(target, sources)| {
                let mut ech = Echelon::default();
                for (lvl, key, root, m) in sources {
                    for v in &levels[lvl][&key] {
                        let image = match space.x_alpha_act(root, m, v) {
                            Ok(x) => x,
                            Err(e) => return (target, Err(e)),
                        };
                        ech.insert(image);
                        if ech.rows.len() > MAX_SECTOR_DIM {
                            return (target, Err(Error::Resource(format!("sector dimension exceeds {MAX_SECTOR_DIM}"))));
                        }
                    }
                }
                (target, Ok(ech.rows.into_values().collect()))
            })
            .collect();
        let mut next = BTreeMap::new();
        for (key, rows) in built {
            let rows = rows?;
            if !rows.is_empty() {
                next.insert(key, rows);
            }
        }
        if !next.is_empty() {
            last_nonempty = level;
        }
        levels.push(next);
        level += 1;
    }
    Ok(levels.into_iter().flatten().collect())
}

/// `χ′_{W(Λ_i)}` through `cutoff`, by exact rank in every sector.
pub fn principal_subspace_dims(n: usize, i: usize, cutoff: i64) -> Result<TruncatedSeries> {
    principal_subspace_dims_with(n, i, cutoff, Generators::Simple)
}

pub fn principal_subspace_dims_with(n: usize, i: usize, cutoff: i64, gens: Generators) -> Result<TruncatedSeries> {
    let sectors = principal_subspace_sectors(n, i, cutoff, gens)?;
    let terms = sectors.into_iter().map(|((r, s), rows)| (r, s, int(rows.len() as i64)));
    TruncatedSeries::from_terms(n, cutoff, terms)?.with_charge_envelope(&charge_envelope(n, 1))
}

/// `x_α(−1)² v_{Λ_0} = 0` for all positive `α`, and `x_{α_i}(−1) v_{Λ_i} = 0` for all `i`.
pub fn level1_relations(n: usize) -> Result<bool> {
    let vac = FockSpace::new(n as i64, 0, 2)?;
    for &alpha in vac.rs.positive_roots() {
        let once = vac.x_alpha_act(alpha, -1, &vac.highest_weight_vector())?;
        if once.is_empty() || !vac.x_alpha_act(alpha, -1, &once)?.is_empty() {
            return Ok(false);
        }
    }
    for i in 1..=n {
        let space = FockSpace::new(n as i64, i, 2)?;
        if !space.x_alpha_act(PositiveRoot::simple(i), -1, &space.highest_weight_vector())?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// PBW monomials of degree `≤ 2` with negative modes of total depth `≤ depth`.
fn small_elements(env: &Envelope, depth: i64) -> Vec<PBWElement> {
    let nr = env.root_system().num_roots();
    let mut gens = Vec::new();
    for m in 1..=depth {
        for root in 0..nr {
            gens.push(Generator { mode: -m, root });
        }
    }
    let mut out = vec![crate::envelope::pbw_one()];
    for (a, &g) in gens.iter().enumerate() {
        out.push(PBWElement::from([(vec![g], BigRational::one())]));
        for &h in &gens[a..] {
            if -g.mode - h.mode <= depth {
                out.push(PBWElement::from([(vec![g, h], BigRational::one())]));
            }
        }
    }
    out
}

/// `e_λ (a·v_{Λ_i}) = τ_{λ,ν}(a)·e_λ v_{Λ_i}` for every fundamental `λ` and small `a` of depth `≤ depth`.
pub fn e_lambda_shift_check(n: usize, i: usize, depth: i64) -> Result<bool> {
    let env = Envelope::new(n as i64)?;
    let rs = env.root_system().clone();
    if i > n {
        return Err(Error::InvalidParameter(format!("sector {i} outside 0..={n}")));
    }
    let elements = small_elements(&env, depth);
    for j in 1..=n {
        let lambda = rs.fundamental(j);
        let shifted = rs.fundamental_or_zero(i).add(&lambda);
        let target = rs.coset_class(&shifted)?;
        let delta = shifted.sub(&rs.fundamental_or_zero(target)).integer_coords().expect("difference lies in Q");
        let nu: Vec<BigRational> = (1..=n).map(|l| int(rs.epsilon_q(&PositiveRoot::simple(l).coords(n), &delta))).collect();
        let source = FockSpace::new(n as i64, i, depth)?;
        let start = FockBasisVector { lattice: delta.clone(), heisenberg: vec![] };
        let probe = FockSpace::new(n as i64, target, 0)?;
        let dest = FockSpace::new(n as i64, target, probe.weight(&start) + depth * (1 + rs.rank() as i64))?;
        let shifted_v = FockVector::from([(start, BigRational::one())]);
        for a in &elements {
            let left: FockVector = source
                .act(&env, a, &source.highest_weight_vector())?
                .into_iter()
                .map(|(b, c)| {
                    let lattice = b.lattice.iter().zip(&delta).map(|(x, y)| x + y).collect();
                    (FockBasisVector { lattice, heisenberg: b.heisenberg }, c)
                })
                .collect();
            let image = env.tau_automorphism(&lambda, &nu, a)?;
            let right = dest.act(&env, &image, &shifted_v)?;
            if left != right {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
