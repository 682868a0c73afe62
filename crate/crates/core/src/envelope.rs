//! `U(n̄)` for `n̄ = n ⊗ ℂ[t, t⁻¹]` in PBW form, the free algebra on mode
//! generators, and window truncations of the completion used to check the
//! null-vector identities.
//!
//! Generators `x_β(m)` are ordered by mode first and root index second, so
//! a PBW monomial lies in `U(n̄)n̄₊` exactly when its last factor has a
//! nonnegative mode.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lie::{PositiveRoot, RootSystemA, Weight};

/// `x_β(m)`; `root` indexes [`RootSystemA::positive_roots`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub mode: i64,
    pub root: usize,
}

/// Element of the free monoid on `ℤ × Δ₊`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn modes(&self) -> Vec<i64> {
        self.0.iter().map(|g| g.mode).collect()
    }

    pub fn roots(&self) -> Vec<usize> {
        self.0.iter().map(|g| g.root).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn compose(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).cloned().collect())
    }
}

pub type FreeElement = BTreeMap<Word, BigRational>;
pub type Monomial = Vec<Generator>;
pub type PBWElement = BTreeMap<Monomial, BigRational>;

/// Window truncation of a completion element: exactly the monomials with every suffix sum `≤ window`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedElement {
    pub window: i64,
    pub body: PBWElement,
}

impl WindowedElement {
    pub fn restrict(&self, window: i64) -> WindowedElement {
        WindowedElement { window, body: window_part(&self.body, window) }
    }
}

/// `(i_1 + … + i_k, i_2 + … + i_k, …, i_k)`.
pub fn tau_suffix(m: &[i64]) -> Vec<i64> {
    let mut out = vec![0; m.len()];
    let mut acc = 0;
    for (slot, v) in out.iter_mut().zip(m).rev() {
        acc += v;
        *slot = acc;
    }
    out
}

pub fn word_leq(a: &Word, i: i64) -> bool {
    tau_suffix(&a.modes()).iter().all(|&s| s <= i)
}

pub fn supp_window(mu: &FreeElement, i: i64) -> BTreeSet<Word> {
    mu.keys().filter(|w| word_leq(w, i)).cloned().collect()
}

pub fn free_mul(a: &FreeElement, b: &FreeElement) -> FreeElement {
    let mut out = FreeElement::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            add_into(&mut out, wa.compose(wb), ca * cb);
        }
    }
    out
}

pub fn free_generator(g: Generator) -> FreeElement {
    FreeElement::from([(Word(vec![g]), BigRational::one())])
}

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

pub fn pbw_add(a: &PBWElement, b: &PBWElement) -> PBWElement {
    let mut out = a.clone();
    for (m, c) in b {
        add_into(&mut out, m.clone(), c.clone());
    }
    out
}

pub fn pbw_scale(a: &PBWElement, c: &BigRational) -> PBWElement {
    if c.is_zero() {
        return PBWElement::new();
    }
    a.iter().map(|(m, v)| (m.clone(), v * c)).collect()
}

pub fn pbw_sub(a: &PBWElement, b: &PBWElement) -> PBWElement {
    pbw_add(a, &pbw_scale(b, &-BigRational::one()))
}

pub fn pbw_one() -> PBWElement {
    PBWElement::from([(vec![], BigRational::one())])
}

pub fn pbw_generator(g: Generator) -> PBWElement {
    PBWElement::from([(vec![g], BigRational::one())])
}

/// Splits into the part with all modes `≤ −1` and the part in `U(n̄)n̄₊`.
pub fn decompose(u: &PBWElement) -> (PBWElement, PBWElement) {
    let mut minus = PBWElement::new();
    let mut plus = PBWElement::new();
    for (m, c) in u {
        if m.last().is_some_and(|g| g.mode >= 0) {
            plus.insert(m.clone(), c.clone());
        } else {
            minus.insert(m.clone(), c.clone());
        }
    }
    (minus, plus)
}

pub fn minus_part(u: &PBWElement) -> PBWElement {
    decompose(u).0
}

pub fn window_part(u: &PBWElement, window: i64) -> PBWElement {
    u.iter()
        .filter(|(m, _)| tau_suffix(&m.iter().map(|g| g.mode).collect::<Vec<_>>()).iter().all(|&s| s <= window))
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect()
}

/// `(k+1)! / ∏ n_j!` over the multiplicities `n_j` of the distinct entries.
pub fn multinomial_c(m: &[i64]) -> BigInt {
    let mut counts: HashMap<i64, u64> = HashMap::new();
    for &v in m {
        *counts.entry(v).or_insert(0) += 1;
    }
    let fact = |n: u64| (1..=n).fold(BigInt::one(), |acc, v| acc * BigInt::from(v));
    counts.values().fold(fact(m.len() as u64), |acc, &c| acc / fact(c))
}

/// All tuples of `len` integers in `[lo, hi]` summing to `total`.
fn tuples(len: usize, lo: i64, hi: i64, total: i64) -> Vec<Vec<i64>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let rest = (len - 1) as i64;
    for first in lo..=hi {
        let remaining = total - first;
        if remaining < rest * lo || remaining > rest * hi {
            continue;
        }
        for mut tail in tuples(len - 1, lo, hi, remaining) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Weakly increasing tuples of `len` integers in `[lo, hi]` summing to `total`.
fn sorted_tuples(len: usize, lo: i64, hi: i64, total: i64) -> Vec<Vec<i64>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let rest = (len - 1) as i64;
    for first in lo..=hi {
        let remaining = total - first;
        if remaining < rest * first || remaining > rest * hi {
            continue;
        }
        for mut tail in sorted_tuples(len - 1, first, hi, remaining) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

type Cache = Mutex<HashMap<(Monomial, Generator), PBWElement>>;

/// Result of a commutator-lemma instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub holds: bool,
    pub window_used: i64,
    pub residual: PBWElement,
}

/// Membership certificate `Σ u_j R^i_{−1,s_j}` for `𝓡^i_t a` modulo `Ũ(n̄)n̄₊`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub terms: BTreeMap<i64, PBWElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryReport {
    pub holds: bool,
    pub window_used: i64,
    pub certificate: Certificate,
    pub residual: PBWElement,
}

pub struct Envelope {
    rs: RootSystemA,
    right: Cache,
    left: Cache,
}

impl fmt::Debug for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Envelope").field("n", &self.rs.rank()).finish()
    }
}

impl Envelope {
    pub fn new(n: i64) -> Result<Self> {
        Ok(Envelope { rs: RootSystemA::new(n)?, right: Mutex::new(HashMap::new()), left: Mutex::new(HashMap::new()) })
    }

    pub fn root_system(&self) -> &RootSystemA {
        &self.rs
    }

    pub fn generator(&self, root: PositiveRoot, mode: i64) -> Result<Generator> {
        Ok(Generator { mode, root: self.rs.root_index(root)? })
    }

    pub fn word(&self, modes: &[i64], roots: &[PositiveRoot]) -> Result<Word> {
        if modes.len() != roots.len() {
            return Err(Error::Malformed("word modes and roots differ in length".into()));
        }
        modes.iter().zip(roots).map(|(&m, &r)| self.generator(r, m)).collect::<Result<Vec<_>>>().map(Word)
    }

    /// `[a, b] = C · x_{α+β}(m+p)`, if nonzero.
    pub fn bracket(&self, a: Generator, b: Generator) -> Option<(i64, Generator)> {
        let (ra, rb) = (self.rs.root(a.root), self.rs.root(b.root));
        let sum = self.rs.root_sum(ra, rb)?;
        let c = self.rs.structure_constant(ra, rb).expect("indexed roots are valid");
        Some((c, Generator { mode: a.mode + b.mode, root: self.rs.root_index(sum).expect("sum is a root") }))
    }

    /// `mono · g` in PBW form.
    fn mul_mono_gen(&self, mono: &[Generator], g: Generator) -> PBWElement {
        match mono.last() {
            None => return PBWElement::from([(vec![g], BigRational::one())]),
            Some(&y) if y <= g => {
                let mut m = mono.to_vec();
                m.push(g);
                return PBWElement::from([(m, BigRational::one())]);
            }
            _ => {}
        }
        let key = (mono.to_vec(), g);
        if let Some(hit) = self.right.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let y = *mono.last().unwrap();
        let prefix = &mono[..mono.len() - 1];
        let mut out = PBWElement::new();
        // prefix·y·g = (prefix·g)·y + prefix·[y, g]
        for (m, c) in self.mul_mono_gen(prefix, g) {
            for (m2, c2) in self.mul_mono_gen(&m, y) {
                add_into(&mut out, m2, &c * c2);
            }
        }
        if let Some((c, z)) = self.bracket(y, g) {
            for (m2, c2) in self.mul_mono_gen(prefix, z) {
                add_into(&mut out, m2, c2 * BigInt::from(c));
            }
        }
        self.right.lock().unwrap().insert(key, out.clone());
        out
    }

    /// `g · mono` in PBW form, rewriting from the left.
    fn mul_gen_mono(&self, g: Generator, mono: &[Generator]) -> PBWElement {
        match mono.first() {
            None => return PBWElement::from([(vec![g], BigRational::one())]),
            Some(&y) if g <= y => {
                let mut m = vec![g];
                m.extend_from_slice(mono);
                return PBWElement::from([(m, BigRational::one())]);
            }
            _ => {}
        }
        let key = (mono.to_vec(), g);
        if let Some(hit) = self.left.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let y = mono[0];
        let rest = &mono[1..];
        let mut out = PBWElement::new();
        // g·y·rest = y·(g·rest) + [g, y]·rest
        for (m, c) in self.mul_gen_mono(g, rest) {
            for (m2, c2) in self.mul_gen_mono(y, &m) {
                add_into(&mut out, m2, &c * c2);
            }
        }
        if let Some((c, z)) = self.bracket(g, y) {
            for (m2, c2) in self.mul_gen_mono(z, rest) {
                add_into(&mut out, m2, c2 * BigInt::from(c));
            }
        }
        self.left.lock().unwrap().insert(key, out.clone());
        out
    }

    /// `u · g`.
    pub fn mul_gen(&self, u: &PBWElement, g: Generator) -> PBWElement {
        let mut out = PBWElement::new();
        for (m, c) in u {
            for (m2, c2) in self.mul_mono_gen(m, g) {
                add_into(&mut out, m2, c * c2);
            }
        }
        out
    }

    /// `g · u`.
    pub fn gen_mul(&self, g: Generator, u: &PBWElement) -> PBWElement {
        let mut out = PBWElement::new();
        for (m, c) in u {
            for (m2, c2) in self.mul_gen_mono(g, m) {
                add_into(&mut out, m2, c * c2);
            }
        }
        out
    }

    pub fn mul(&self, a: &PBWElement, b: &PBWElement) -> PBWElement {
        let mut out = PBWElement::new();
        for (mb, cb) in b {
            let mut acc = a.clone();
            for &g in mb {
                acc = self.mul_gen(&acc, g);
            }
            for (m, c) in acc {
                add_into(&mut out, m, c * cb);
            }
        }
        out
    }

    pub fn straighten_word(&self, w: &Word) -> PBWElement {
        w.0.iter().fold(pbw_one(), |acc, &g| self.mul_gen(&acc, g))
    }

    /// Canonical PBW form, multiplying generators in from the right.
    pub fn straighten(&self, mu: &FreeElement) -> PBWElement {
        let mut out = PBWElement::new();
        for (w, c) in mu {
            for (m, c2) in self.straighten_word(w) {
                add_into(&mut out, m, c * c2);
            }
        }
        out
    }

    /// Same normal form computed by multiplying generators in from the left.
    pub fn straighten_left(&self, mu: &FreeElement) -> PBWElement {
        let mut out = PBWElement::new();
        for (w, c) in mu {
            let v = w.0.iter().rev().fold(pbw_one(), |acc, &g| self.gen_mul(g, &acc));
            for (m, c2) in v {
                add_into(&mut out, m, c * c2);
            }
        }
        out
    }

    fn simple(&self, i: usize) -> Result<usize> {
        self.rs.root_index(PositiveRoot::simple(i))
    }

    /// `R^i_{M,t}`: the `k+1`-fold products of `x_{α_i}` with modes `≤ M` summing to `−t`.
    pub fn truncated_r(&self, i: usize, t: i64, big_m: i64, k: usize) -> Result<PBWElement> {
        let root = self.simple(i)?;
        let lo = -t - (k as i64) * big_m;
        let mut mu = FreeElement::new();
        if lo <= big_m {
            for tup in tuples(k + 1, lo, big_m, -t) {
                let w = Word(tup.into_iter().map(|mode| Generator { mode, root }).collect());
                add_into(&mut mu, w, BigRational::one());
            }
        }
        Ok(self.straighten(&mu))
    }

    /// Window-`w` truncation of `𝓡^i_t`, assembled from `R^i_{M,t}` and its sorted tail.
    pub fn representative_r_via(&self, i: usize, t: i64, k: usize, window: i64, big_m: i64) -> Result<WindowedElement> {
        let root = self.simple(i)?;
        let mut body = window_part(&self.truncated_r(i, t, big_m, k)?, window);
        let len = k + 1;
        let lo = -t - (k as i64) * window.max(big_m + 1);
        let hi = window.max(big_m + 1);
        for tup in sorted_tuples(len, lo, hi, -t) {
            if *tup.last().unwrap() < big_m + 1 || tau_suffix(&tup).iter().any(|&s| s > window) {
                continue;
            }
            let c = BigRational::from_integer(multinomial_c(&tup));
            let mono: Monomial = tup.into_iter().map(|mode| Generator { mode, root }).collect();
            add_into(&mut body, mono, c);
        }
        Ok(WindowedElement { window, body })
    }

    pub fn representative_r(&self, i: usize, t: i64, k: usize, window: i64) -> Result<WindowedElement> {
        if window < -1 {
            return Err(Error::WindowTooSmall { window, needed: -1 });
        }
        let out = self.representative_r_via(i, t, k, window, -1)?;
        debug_assert_eq!(out, self.representative_r_via(i, t, k, window, window)?);
        Ok(out)
    }

    /// `minus[𝓡_t x_α(−m) − x_α(−m) 𝓡_t + sign · x_α(0) R_{t+m}]`.
    #[allow(clippy::too_many_arguments)]
    pub fn lemma_residual(&self, i: usize, t: i64, alpha: PositiveRoot, m: i64, window: i64, k: usize, sign: i64) -> Result<(PBWElement, i64)> {
        if m < 1 {
            return Err(Error::InvalidParameter(format!("mode depth m = {m} must be positive")));
        }
        let w = window.max(m - 1).max(-1);
        let x_neg = self.generator(alpha, -m)?;
        let x_zero = self.generator(alpha, 0)?;
        let rep = self.representative_r(i, t, k, w)?.body;
        let lhs = minus_part(&self.mul_gen(&rep, x_neg));
        let first = minus_part(&self.gen_mul(x_neg, &rep));
        let shifted = self.representative_r(i, t + m, k, -1)?.body;
        let second = minus_part(&self.gen_mul(x_zero, &shifted));
        let residual = pbw_add(&pbw_sub(&lhs, &first), &pbw_scale(&second, &BigRational::from_integer(sign.into())));
        Ok((residual, w))
    }

    /// Checks `𝓡_t x_α(−m) ≡ x_α(−m)𝓡_t − x_α(0)R_{t+m}` modulo `Ũ(n̄)n̄₊`.
    pub fn lemma_commutator_check(&self, i: usize, t: i64, alpha: PositiveRoot, m: i64, window: i64, k: usize) -> Result<LemmaReport> {
        let (residual, w) = self.lemma_residual(i, t, alpha, m, window, k, 1)?;
        Ok(LemmaReport { holds: residual.is_empty(), window_used: w, residual })
    }

    /// `R_s · (a · 1)` in `U(n̄)/U(n̄)n̄₊`, as a combination of `u R^i_{−1,s'}`.
    pub fn certificate(&self, i: usize, s: i64, a: &PBWElement, k: usize) -> Result<Certificate> {
        let mut terms: BTreeMap<i64, PBWElement> = BTreeMap::new();
        for (mono, c) in a {
            if mono.iter().any(|g| g.mode >= 0) {
                return Err(Error::InvalidParameter("certificate input must have negative modes only".into()));
            }
            for (s2, u) in self.certificate_mono(i, s, mono, k)?.terms {
                let slot = terms.entry(s2).or_default();
                *slot = pbw_add(slot, &pbw_scale(&u, c));
            }
        }
        terms.retain(|_, u| !u.is_empty());
        Ok(Certificate { terms })
    }

    fn certificate_mono(&self, i: usize, s: i64, mono: &[Generator], k: usize) -> Result<Certificate> {
        let Some((&g, rest)) = mono.split_first() else {
            return Ok(Certificate { terms: BTreeMap::from([(s, pbw_one())]) });
        };
        let m = -g.mode;
        let rest_el = PBWElement::from([(rest.to_vec(), BigRational::one())]);
        let zero = Generator { mode: 0, root: g.root };
        let mut terms: BTreeMap<i64, PBWElement> = BTreeMap::new();
        let mut push = |s2: i64, u: PBWElement| {
            let slot = terms.entry(s2).or_default();
            *slot = pbw_add(slot, &u);
        };
        // x_β(−m) · F(s, w')
        for (s2, u) in self.certificate_mono(i, s, rest, k)?.terms {
            push(s2, self.gen_mul(g, &u));
        }
        // F(s+m, minus[x_β(0) w'])
        let moved = minus_part(&self.gen_mul(zero, &rest_el));
        for (s2, u) in self.certificate(i, s + m, &moved, k)?.terms {
            push(s2, u);
        }
        // − x_β(0) · F(s+m, w')
        for (s2, u) in self.certificate_mono(i, s + m, rest, k)?.terms {
            push(s2, pbw_scale(&self.gen_mul(zero, &u), &-BigRational::one()));
        }
        Ok(Certificate { terms })
    }

    /// Evaluates `Σ minus[u R^i_{−1,s}]`.
    pub fn evaluate_certificate(&self, i: usize, cert: &Certificate, k: usize) -> Result<PBWElement> {
        let mut out = PBWElement::new();
        for (&s, u) in &cert.terms {
            let r = self.truncated_r(i, s, -1, k)?;
            out = pbw_add(&out, &minus_part(&self.mul(u, &r)));
        }
        Ok(out)
    }

    /// Checks `𝓡^i_t a ∈ I_{kΛ_0} + Ũ(n̄)n̄₊` by exhibiting the certificate and comparing minus parts.
    pub fn corollary_ideal_check(&self, i: usize, t: i64, a: &PBWElement, window: i64, k: usize) -> Result<CorollaryReport> {
        let depth = a.keys().map(|m| -m.iter().map(|g| g.mode).sum::<i64>()).max().unwrap_or(0);
        let w = window.max(depth - 1).max(-1);
        let rep = self.representative_r(i, t, k, w)?.body;
        let direct = minus_part(&self.mul(&rep, a));
        let certificate = self.certificate(i, t, a, k)?;
        let via = self.evaluate_certificate(i, &certificate, k)?;
        let residual = pbw_sub(&direct, &via);
        Ok(CorollaryReport { holds: residual.is_empty(), window_used: w, certificate, residual })
    }

    /// `τ_{λ,ν}: x_β(m) ↦ ν(β) x_β(m − ⟨λ, β⟩)`, with `ν` given on simple roots.
    pub fn tau_automorphism(&self, lambda: &Weight, nu: &[BigRational], u: &PBWElement) -> Result<PBWElement> {
        let n = self.rs.rank();
        if nu.len() != n || lambda.rank() != n {
            return Err(Error::RankMismatch(nu.len(), n));
        }
        if nu.iter().any(|v| v.is_zero()) {
            return Err(Error::InvalidParameter("character values must be nonzero".into()));
        }
        let mut images: HashMap<usize, (i64, BigRational)> = HashMap::new();
        for (idx, root) in self.rs.positive_roots().iter().enumerate() {
            let shift = self.rs.pair(&root.coords(n), lambda);
            if !shift.is_integer() {
                return Err(Error::InvalidParameter("λ must pair integrally with roots".into()));
            }
            let scale = (root.lo..=root.hi).fold(BigRational::one(), |acc, j| acc * &nu[j - 1]);
            images.insert(idx, (i64::try_from(shift.to_integer()).expect("small shift"), scale));
        }
        let mut out = PBWElement::new();
        for (mono, c) in u {
            let mut coeff = c.clone();
            let mut word = Vec::with_capacity(mono.len());
            for g in mono {
                let (shift, scale) = &images[&g.root];
                coeff *= scale;
                word.push(Generator { mode: g.mode - shift, root: g.root });
            }
            for (m, c2) in self.straighten_word(&Word(word)) {
                add_into(&mut out, m, &coeff * c2);
            }
        }
        Ok(out)
    }

    pub fn render_monomial(&self, m: &[Generator]) -> String {
        if m.is_empty() {
            return "1".into();
        }
        m.iter().map(|g| format!("x_{{{}}}({})", self.rs.root(g.root), g.mode)).collect::<Vec<_>>().join(" ")
    }

    pub fn render(&self, u: &PBWElement) -> String {
        if u.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in u.iter().enumerate() {
            let (neg, mag) = (c.is_negative(), c.abs());
            match (idx, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if !mag.is_one() {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(&self.render_monomial(m));
        }
        out
    }
}
