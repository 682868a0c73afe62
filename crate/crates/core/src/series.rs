//! Truncated series in charge variables `x_1..x_n` and the weight variable `q`.
//!
//! A [`TruncatedSeries`] stands for a possibly infinite series `F` of which
//! every term with `s ≤ cutoff` is stored. Two pieces of side information
//! about the unseen tail are carried along:
//!
//! * `q_floor`: every term of `F` has `s ≥ q_floor`;
//! * per-variable [`VarBound`]s: every term of `F` satisfies the charge bounds
//!   and the quadratic bound `s ≥ c (r_i − z)^2 + o`.
//!
//! The bounds are what make substitutions `x_i ↦ x_i q^e` with `e < 0`
//! rigorous: they give an exactness horizon below which no unseen term can
//! land.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Term key, ordered by `(s, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub s: i64,
    pub r: Vec<i64>,
}

/// `s ≥ c (r − center)^2 + offset` for every term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadBound {
    pub c: BigRational,
    pub center: BigRational,
    pub offset: BigRational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarBound {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
    pub quad: Option<QuadBound>,
}

impl VarBound {
    pub fn pinned(v: i64) -> Self {
        VarBound { lo: Some(v), hi: Some(v), quad: None }
    }

    fn pinned_value(&self) -> Option<i64> {
        match (self.lo, self.hi) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }

    /// Integer range of `r` admissible at weight `s`; `None` if empty.
    fn range_at(&self, s: i64) -> Option<(Option<i64>, Option<i64>)> {
        let (mut lo, mut hi) = (self.lo, self.hi);
        if let Some(qb) = &self.quad {
            let x = (rat(s) - &qb.offset) / &qb.c;
            if x.is_negative() {
                return None;
            }
            let u = ceil_sqrt(&x);
            let fits = |r: i64| &qb.c * sq(&(rat(r) - &qb.center)) + &qb.offset <= rat(s);
            let mut top = floor_i64(&qb.center) + u;
            while !fits(top) {
                top -= 1;
                if rat(top) < &qb.center - rat(u) - rat(1) {
                    return None;
                }
            }
            let mut bot = ceil_i64(&qb.center) - u;
            while !fits(bot) {
                bot += 1;
            }
            hi = Some(hi.map_or(top, |h| h.min(top)));
            lo = Some(lo.map_or(bot, |l| l.max(bot)));
        }
        match (lo, hi) {
            (Some(l), Some(h)) if l > h => None,
            _ => Some((lo, hi)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    n: usize,
    cutoff: i64,
    q_floor: i64,
    terms: BTreeMap<Key, BigRational>,
    bounds: Vec<VarBound>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub r: Vec<i64>,
    pub s: i64,
    pub left: BigRational,
    pub right: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub equal: bool,
    pub order: i64,
    pub witness: Option<Discrepancy>,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "equal up to q^{}", self.order),
            Some(d) => write!(f, "differ at x^{:?} q^{}: {} vs {}", d.r, d.s, d.left, d.right),
        }
    }
}

impl TruncatedSeries {
    /// The zero series, known exactly up to `cutoff`.
    pub fn zero(n: usize, cutoff: i64) -> Self {
        TruncatedSeries { n, cutoff, q_floor: cutoff + 1, terms: BTreeMap::new(), bounds: vec![VarBound::default(); n] }
    }

    pub fn one(n: usize, cutoff: i64) -> Self {
        Self::monomial(n, &vec![0; n], 0, BigRational::one(), cutoff)
    }

    /// The single term `coeff · x^r q^s`, complete as a series.
    pub fn monomial(n: usize, r: &[i64], s: i64, coeff: BigRational, cutoff: i64) -> Self {
        let mut out = Self::zero(n, cutoff);
        out.bounds = r.iter().map(|&v| VarBound::pinned(v)).collect();
        out.q_floor = s;
        if s <= cutoff && !coeff.is_zero() {
            out.terms.insert(Key { s, r: r.to_vec() }, coeff);
        }
        out
    }

    /// Terms below `cutoff`; nothing is assumed about the unseen part beyond `s > cutoff`.
    pub fn from_terms<I>(n: usize, cutoff: i64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, i64, BigRational)>,
    {
        let mut out = Self::zero(n, cutoff);
        for (r, s, c) in terms {
            if r.len() != n {
                return Err(Error::RankMismatch(r.len(), n));
            }
            if s <= cutoff {
                out.add_term(Key { s, r }, c);
            }
        }
        out.q_floor = out.min_s().unwrap_or(cutoff + 1);
        Ok(out)
    }

    /// Finite series whose listed terms are all there is.
    pub fn polynomial<I>(n: usize, cutoff: i64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, i64, BigRational)>,
    {
        let mut out = Self::zero(n, cutoff);
        let mut all = Vec::new();
        for (r, s, c) in terms {
            if r.len() != n {
                return Err(Error::RankMismatch(r.len(), n));
            }
            if !c.is_zero() {
                all.push((r, s, c));
            }
        }
        if let Some(m) = all.iter().map(|t| t.1).min() {
            out.q_floor = m;
        }
        for i in 0..n {
            let lo = all.iter().map(|t| t.0[i]).min();
            let hi = all.iter().map(|t| t.0[i]).max();
            out.bounds[i] = VarBound { lo: lo.or(Some(0)), hi: hi.or(Some(0)), quad: None };
        }
        for (r, s, c) in all {
            if s <= cutoff {
                out.add_term(Key { s, r }, c);
            }
        }
        Ok(out)
    }

    fn add_term(&mut self, key: Key, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
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

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn q_floor(&self) -> i64 {
        self.q_floor
    }

    pub fn bounds(&self) -> &[VarBound] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], i64, &BigRational)> {
        self.terms.iter().map(|(k, c)| (k.r.as_slice(), k.s, c))
    }

    pub fn coeff(&self, r: &[i64], s: i64) -> BigRational {
        self.terms.get(&Key { s, r: r.to_vec() }).cloned().unwrap_or_else(BigRational::zero)
    }

    fn min_s(&self) -> Option<i64> {
        self.terms.keys().next().map(|k| k.s)
    }

    /// Replaces the recorded floor and bounds; the caller vouches for them.
    pub fn with_envelope(mut self, q_floor: i64, bounds: Vec<VarBound>) -> Result<Self> {
        if bounds.len() != self.n {
            return Err(Error::RankMismatch(bounds.len(), self.n));
        }
        self.q_floor = q_floor;
        self.bounds = bounds;
        Ok(self)
    }

    /// Charge envelope `s ≥ c_i r_i^2`, `r_i ≥ 0`, `s ≥ 0`.
    pub fn with_charge_envelope(self, c: &[BigRational]) -> Result<Self> {
        let bounds = c
            .iter()
            .map(|ci| VarBound {
                lo: Some(0),
                hi: None,
                quad: Some(QuadBound { c: ci.clone(), center: BigRational::zero(), offset: BigRational::zero() }),
            })
            .collect();
        self.with_envelope(0, bounds)
    }

    /// Lowers the cutoff.
    pub fn truncate(&self, cutoff: i64) -> Self {
        let mut out = self.clone();
        if cutoff < out.cutoff {
            out.cutoff = cutoff;
            out.terms.retain(|k, _| k.s <= cutoff);
        }
        out
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::RankMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let cutoff = self.cutoff.min(other.cutoff);
        let mut out = self.truncate(cutoff);
        for (k, c) in &other.terms {
            if k.s <= cutoff {
                out.add_term(k.clone(), c.clone());
            }
        }
        out.q_floor = self.q_floor.min(other.q_floor);
        out.bounds = self.bounds.iter().zip(&other.bounds).map(|(a, b)| join_bounds(a, b)).collect();
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            out.terms.clear();
        } else {
            for v in out.terms.values_mut() {
                *v *= c;
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let cutoff = (self.cutoff.saturating_add(other.q_floor)).min(other.cutoff.saturating_add(self.q_floor));
        let mut acc: BTreeMap<Key, BigRational> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let s = ka.s + kb.s;
                if s > cutoff {
                    break;
                }
                let r = ka.r.iter().zip(&kb.r).map(|(x, y)| x + y).collect();
                *acc.entry(Key { s, r }).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        let bounds = self
            .bounds
            .iter()
            .zip(&other.bounds)
            .map(|(a, b)| product_bound(a, self.q_floor, b, other.q_floor))
            .collect();
        Ok(TruncatedSeries { n: self.n, cutoff, q_floor: self.q_floor + other.q_floor, terms: acc, bounds })
    }

    /// Inverse of a series whose `q^0` part is a nonzero constant and which has no negative `q` powers.
    pub fn invert_unit(&self) -> Result<Self> {
        if self.q_floor < 0 {
            return Err(Error::NotAUnit);
        }
        let zero_r = vec![0; self.n];
        let c0 = self.coeff(&zero_r, 0);
        if c0.is_zero() || self.terms.keys().any(|k| k.s == 0 && k.r != zero_r) {
            return Err(Error::NotAUnit);
        }
        let inv0 = c0.recip();
        let tail: Vec<(&Key, &BigRational)> = self.terms.iter().filter(|(k, _)| k.s >= 1).collect();
        let mut levels: Vec<BTreeMap<Vec<i64>, BigRational>> = vec![BTreeMap::new(); (self.cutoff.max(0) + 1) as usize];
        levels[0].insert(zero_r.clone(), inv0.clone());
        for s in 1..=self.cutoff.max(0) {
            let mut cur: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
            for (ka, ca) in &tail {
                if ka.s > s {
                    break;
                }
                for (rb, cb) in &levels[(s - ka.s) as usize] {
                    let r: Vec<i64> = ka.r.iter().zip(rb).map(|(x, y)| x + y).collect();
                    *cur.entry(r).or_insert_with(BigRational::zero) -= *ca * cb;
                }
            }
            cur.retain(|_, v| {
                *v *= &inv0;
                !v.is_zero()
            });
            levels[s as usize] = cur;
        }
        let mut out = Self::zero(self.n, self.cutoff);
        out.q_floor = 0;
        for (s, lvl) in levels.into_iter().enumerate() {
            for (r, c) in lvl {
                out.terms.insert(Key { s: s as i64, r }, c);
            }
        }
        out.bounds = self
            .bounds
            .iter()
            .map(|b| VarBound { lo: if b.lo == Some(0) { Some(0) } else { None }, hi: if b.pinned_value() == Some(0) { Some(0) } else { None }, quad: None })
            .collect();
        Ok(out)
    }

    /// Multiplies by `x^c q^d`.
    pub fn monomial_shift(&self, c: &[i64], d: i64) -> Result<Self> {
        if c.len() != self.n {
            return Err(Error::RankMismatch(c.len(), self.n));
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (Key { s: k.s + d, r: k.r.iter().zip(c).map(|(a, b)| a + b).collect() }, v.clone()))
            .collect();
        let bounds = self
            .bounds
            .iter()
            .zip(c)
            .map(|(b, &ci)| VarBound {
                lo: b.lo.map(|v| v + ci),
                hi: b.hi.map(|v| v + ci),
                quad: b.quad.as_ref().map(|qb| QuadBound {
                    c: qb.c.clone(),
                    center: &qb.center + rat(ci),
                    offset: &qb.offset + rat(d),
                }),
            })
            .collect();
        Ok(TruncatedSeries { n: self.n, cutoff: self.cutoff + d, q_floor: self.q_floor + d, terms, bounds })
    }

    /// `x_i ↦ x_i q^e` with `i` 1-based.
    pub fn substitute_scale(&self, i: usize, e: i64) -> Result<Self> {
        if i == 0 || i > self.n {
            return Err(Error::InvalidParameter(format!("variable index {i} outside 1..={}", self.n)));
        }
        let mut shifts = vec![0; self.n];
        shifts[i - 1] = e;
        self.substitute(&shifts)
    }

    /// Joint substitution `x_j ↦ x_j q^{e_j}`.
    pub fn substitute(&self, e: &[i64]) -> Result<Self> {
        if e.len() != self.n {
            return Err(Error::RankMismatch(e.len(), self.n));
        }
        if e.iter().all(|&v| v == 0) {
            return Ok(self.clone());
        }
        let shift = |k: &Key| k.s + k.r.iter().zip(e).map(|(a, b)| a * b).sum::<i64>();
        let beyond = self.horizon(e)?;
        let cutoff = beyond.map_or(i64::MAX / 4, |h| h - 1);
        let mut terms = BTreeMap::new();
        let mut known_min: Option<i64> = None;
        for (k, c) in &self.terms {
            let s = shift(k);
            known_min = Some(known_min.map_or(s, |m| m.min(s)));
            if s <= cutoff {
                terms.insert(Key { s, r: k.r.clone() }, c.clone());
            }
        }
        let q_floor = match (known_min, beyond) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => cutoff + 1,
        };
        let mut bounds = self.bounds.clone();
        for (i, &ei) in e.iter().enumerate() {
            if ei != 0 {
                bounds = shift_bounds(&bounds, i, ei);
            }
        }
        Ok(TruncatedSeries { n: self.n, cutoff, q_floor, terms, bounds })
    }

    /// Smallest image weight of an unseen term under the substitution, if any term can exist.
    fn horizon(&self, e: &[i64]) -> Result<Option<i64>> {
        let start = self.cutoff + 1;
        for (j, &ej) in e.iter().enumerate() {
            let b = &self.bounds[j];
            let ok = b.quad.is_some() || if ej > 0 { b.lo.is_some() } else if ej < 0 { b.hi.is_some() } else { true };
            if !ok {
                return Err(Error::NoHorizon(j + 1));
            }
        }
        let total: i64 = e.iter().map(|v| v.abs()).sum();
        // past `vertex` the continuous lower bound is nondecreasing
        let mut vertex = rat(start);
        for (j, &ej) in e.iter().enumerate() {
            if ej == 0 {
                continue;
            }
            if let Some(qb) = &self.bounds[j].quad {
                let v = &qb.offset + rat(total * total) / (rat(4) * &qb.c);
                if v > vertex {
                    vertex = v;
                }
            }
        }
        let mut best: Option<i64> = None;
        let mut s = start;
        let limit = start.saturating_add(10_000_000);
        loop {
            if let Some(h) = self.image_floor_at(e, s) {
                best = Some(best.map_or(h, |b| b.min(h)));
            }
            if rat(s) >= vertex {
                if let Some(b) = best {
                    if self.continuous_floor(e, s) >= rat(b) {
                        return Ok(Some(b));
                    }
                }
            }
            s += 1;
            if s > limit {
                return Err(Error::Resource("exactness horizon search did not settle".into()));
            }
        }
    }

    fn image_floor_at(&self, e: &[i64], s: i64) -> Option<i64> {
        let mut h = s;
        for (j, b) in self.bounds.iter().enumerate() {
            let range = b.range_at(s)?;
            match e[j].cmp(&0) {
                std::cmp::Ordering::Greater => h += e[j] * range.0?,
                std::cmp::Ordering::Less => h += e[j] * range.1?,
                std::cmp::Ordering::Equal => {}
            }
        }
        Some(h)
    }

    /// Lower bound, nondecreasing in `s` past the vertex, for the image weight of any term at weight ≥ `s`.
    fn continuous_floor(&self, e: &[i64], s: i64) -> BigRational {
        let mut g = rat(s);
        for (j, b) in self.bounds.iter().enumerate() {
            if e[j] == 0 {
                continue;
            }
            match &b.quad {
                Some(qb) => {
                    let x = (rat(s) - &qb.offset) / &qb.c;
                    let u = if x.is_negative() { 0 } else { ceil_sqrt(&x) };
                    g -= rat(e[j].abs()) * (qb.center.abs() + rat(u));
                }
                None => {
                    let cap = if e[j] > 0 { b.lo.unwrap() } else { b.hi.unwrap() };
                    g += rat(e[j] * cap);
                }
            }
        }
        g
    }

    /// Sets every `x_i` to 1.
    pub fn specialize_x(&self) -> Self {
        let mut out = Self::zero(0, self.cutoff);
        out.q_floor = self.q_floor;
        for (k, c) in &self.terms {
            out.add_term(Key { s: k.s, r: vec![] }, c.clone());
        }
        out
    }

    /// Views a `q`-only series as a series in `n` charge variables.
    pub fn embed(&self, n: usize) -> Result<Self> {
        if self.n != 0 {
            return Err(Error::RankMismatch(self.n, 0));
        }
        let mut out = Self::zero(n, self.cutoff);
        out.q_floor = self.q_floor;
        out.bounds = vec![VarBound::pinned(0); n];
        for (k, c) in &self.terms {
            out.terms.insert(Key { s: k.s, r: vec![0; n] }, c.clone());
        }
        Ok(out)
    }

    /// Reverses the order of the charge variables.
    pub fn reverse_vars(&self) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(k, c)| (Key { s: k.s, r: k.r.iter().rev().cloned().collect() }, c.clone()))
            .collect();
        out.bounds.reverse();
        out
    }

    pub fn equal_upto(&self, other: &Self, order: i64) -> Result<Comparison> {
        self.check_rank(other)?;
        let horizon = self.cutoff.min(other.cutoff);
        if order > horizon {
            return Err(Error::BeyondHorizon { requested: order, horizon });
        }
        let mut a = self.terms.iter().filter(|(k, _)| k.s <= order).peekable();
        let mut b = other.terms.iter().filter(|(k, _)| k.s <= order).peekable();
        let zero = BigRational::zero();
        loop {
            let step = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some((ka, ca)), None) => Some((ka.to_owned().clone(), (*ca).clone(), zero.clone())),
                (None, Some((kb, cb))) => Some((kb.to_owned().clone(), zero.clone(), (*cb).clone())),
                (Some((ka, ca)), Some((kb, cb))) => match ka.cmp(kb) {
                    std::cmp::Ordering::Less => Some(((*ka).clone(), (*ca).clone(), zero.clone())),
                    std::cmp::Ordering::Greater => Some(((*kb).clone(), zero.clone(), (*cb).clone())),
                    std::cmp::Ordering::Equal => {
                        if ca != cb {
                            Some(((*ka).clone(), (*ca).clone(), (*cb).clone()))
                        } else {
                            a.next();
                            b.next();
                            None
                        }
                    }
                },
            };
            if let Some((k, left, right)) = step {
                return Ok(Comparison { equal: false, order, witness: Some(Discrepancy { r: k.r, s: k.s, left, right }) });
            }
        }
        Ok(Comparison { equal: true, order, witness: None })
    }

    /// True when every coefficient is a nonnegative integer.
    pub fn is_nonneg_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer() && !c.is_negative())
    }

    pub fn to_json_value(&self) -> SeriesJson {
        SeriesJson {
            n: self.n,
            cutoff: self.cutoff,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermJson { x: k.r.clone(), q: k.s, coeff: c.to_string() })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: SeriesJson = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let terms = v
            .terms
            .into_iter()
            .map(|t| {
                let c: BigRational = t.coeff.parse().map_err(|_| Error::Malformed(format!("coefficient {:?}", t.coeff)))?;
                Ok((t.x, t.q, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(v.n, v.cutoff, terms)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = (1..=self.n).map(|i| format!("r{i}")).collect();
        header.push("s".into());
        header.push("coeff".into());
        out.push_str(&header.join(","));
        out.push('\n');
        for (k, c) in &self.terms {
            for r in &k.r {
                out.push_str(&r.to_string());
                out.push(',');
            }
            out.push_str(&format!("{},{}\n", k.s, c));
        }
        out
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in &self.terms {
            let mut mono: Vec<String> = Vec::new();
            for (i, &r) in k.r.iter().enumerate() {
                match r {
                    0 => {}
                    1 => mono.push(format!("x{}", i + 1)),
                    _ => mono.push(format!("x{}^{}", i + 1, r)),
                }
            }
            match k.s {
                0 => {}
                1 => mono.push("q".into()),
                _ => mono.push(format!("q^{}", k.s)),
            }
            let (neg, mag) = (c.is_negative(), c.abs());
            let sep = match (first, neg) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            write!(f, "{sep}")?;
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, mono.join("*"))?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.cutoff + 1)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeriesJson {
    pub n: usize,
    pub cutoff: i64,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub x: Vec<i64>,
    pub q: i64,
    pub coeff: String,
}

/// `(q)_r = ∏_{i=1}^r (1 − q^i)` as a `q`-only series.
pub fn pochhammer(r: i64, cutoff: i64) -> Result<TruncatedSeries> {
    if r < 0 {
        return Err(Error::InvalidParameter(format!("pochhammer index {r} is negative")));
    }
    let top = cutoff.max(0) as usize;
    let mut poly = vec![BigInt::zero(); top + 1];
    poly[0] = BigInt::one();
    for i in 1..=r as usize {
        if i > top {
            break;
        }
        for d in (i..=top).rev() {
            let t = poly[d - i].clone();
            poly[d] -= t;
        }
    }
    let terms = poly.into_iter().enumerate().map(|(s, c)| (vec![], s as i64, BigRational::from_integer(c)));
    let mut out = TruncatedSeries::from_terms(0, cutoff, terms)?;
    out.q_floor = 0;
    Ok(out)
}

fn join_bounds(a: &VarBound, b: &VarBound) -> VarBound {
    let lo = match (a.lo, b.lo) {
        (Some(x), Some(y)) => Some(x.min(y)),
        _ => None,
    };
    let hi = match (a.hi, b.hi) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    };
    let quad = match (&a.quad, &b.quad) {
        (Some(x), Some(y)) if x.center == y.center => Some(QuadBound {
            c: x.c.clone().min(y.c.clone()),
            center: x.center.clone(),
            offset: x.offset.clone().min(y.offset.clone()),
        }),
        _ => None,
    };
    VarBound { lo, hi, quad }
}

fn product_bound(a: &VarBound, fa: i64, b: &VarBound, fb: i64) -> VarBound {
    let lo = a.lo.zip(b.lo).map(|(x, y)| x + y);
    let hi = a.hi.zip(b.hi).map(|(x, y)| x + y);
    let quad = match (&a.quad, &b.quad, a.pinned_value(), b.pinned_value()) {
        (Some(x), Some(y), _, _) => Some(QuadBound {
            c: &x.c * &y.c / (&x.c + &y.c),
            center: &x.center + &y.center,
            offset: &x.offset + &y.offset,
        }),
        (Some(x), None, _, Some(v)) => Some(QuadBound { c: x.c.clone(), center: &x.center + rat(v), offset: &x.offset + rat(fb) }),
        (None, Some(y), Some(v), _) => Some(QuadBound { c: y.c.clone(), center: &y.center + rat(v), offset: &y.offset + rat(fa) }),
        _ => None,
    };
    VarBound { lo, hi, quad }
}

/// Bounds after `x_i ↦ x_i q^e` (0-based `i`).
fn shift_bounds(bounds: &[VarBound], i: usize, e: i64) -> Vec<VarBound> {
    let cap = if e > 0 { bounds[i].lo } else { bounds[i].hi };
    bounds
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let quad = if j == i {
                b.quad.as_ref().map(|qb| {
                    let er = rat(e);
                    QuadBound {
                        c: qb.c.clone(),
                        center: &qb.center - &er / (rat(2) * &qb.c),
                        offset: &qb.offset + &er * &qb.center - &er * &er / (rat(4) * &qb.c),
                    }
                })
            } else {
                match (&b.quad, cap) {
                    (Some(qb), Some(v)) => Some(QuadBound { c: qb.c.clone(), center: qb.center.clone(), offset: &qb.offset + rat(e * v) }),
                    _ => None,
                }
            };
            VarBound { lo: b.lo, hi: b.hi, quad }
        })
        .collect()
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn sq(x: &BigRational) -> BigRational {
    x * x
}

fn floor_i64(x: &BigRational) -> i64 {
    x.floor().to_integer().to_i64().expect("bound fits in i64")
}

fn ceil_i64(x: &BigRational) -> i64 {
    x.ceil().to_integer().to_i64().expect("bound fits in i64")
}

/// Smallest integer `u ≥ 0` with `u^2 ≥ x`, for `x ≥ 0`.
fn ceil_sqrt(x: &BigRational) -> i64 {
    let t = x.ceil().to_integer();
    let mut u = t.sqrt();
    if &u * &u < t {
        u += 1;
    }
    u.to_i64().expect("bound fits in i64")
}
