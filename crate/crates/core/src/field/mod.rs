//! Coefficient domains and their element arithmetic.
//!
//! Exports:
//! * [`FieldDesc`]: immutable description of a prime field F_p, an
//!   extension field F_{p^e}, the ring Z/p^k, or the p-adic rationals
//!   (exact rationals tagged with a prime and a working precision).
//! * [`FieldElement`]: plain canonical values; all arithmetic goes
//!   through the describing [`FieldDesc`], e.g. `field.mul(&a, &b)`.
//! * [`MatrixF`]: dense exact matrices with row reduction and solving.
//! * [`f2`]: bit-packed vectors and forms over F_2 used by the
//!   enumeration and subspace fast paths.
//!
//! Elements do not carry a back reference to their field; containers
//! (matrices, forms, systems) carry the `FieldDesc` and validate entries
//! at their boundaries, reporting `FieldMismatch` when representations
//! are incompatible.

mod matrix;

pub mod f2;

pub use matrix::{LinearSolution, MatrixF, Reduced};

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::fmt::Write as _;

/// Largest admissible prime (exclusive bound 2^31).
pub const MAX_PRIME: u64 = 1 << 31;
/// Largest admissible extension field order.
pub const MAX_EXT_ORDER: u64 = 1 << 16;
/// Largest admissible extension degree.
pub const MAX_EXT_DEGREE: u32 = 8;

/// The four supported coefficient domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    /// F_p, p prime.
    Prime,
    /// F_{p^e} with an explicit irreducible modulus over F_p.
    Extension,
    /// The ring Z/p^k (not a field for k >= 2).
    ModPk,
    /// Exact rationals viewed inside Q_p: a prime together with a
    /// working precision used by solvers and serializers.
    PadicRational,
}

/// Immutable domain description.  Cheap to clone; equality is
/// structural, so two descriptions of the same domain compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDesc {
    kind: FieldKind,
    p: u64,
    e: u32,
    /// Extension modulus, ascending coefficients, monic, length e + 1.
    modulus: Vec<u64>,
    /// ModPk: the exponent k.  PadicRational: the working precision.
    k: u32,
    /// Cached residue modulus: p for Prime, p^k for ModPk.
    m: BigUint,
}

/// A value in canonical form.
///
/// `Res` holds residues in `[0, m)` for prime fields and Z/p^k, `Ext`
/// holds coefficient vectors over F_p of length e, and `Rat` holds
/// exact reduced rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Res(BigUint),
    Ext(Vec<u64>),
    Rat(BigRational),
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = 37u64;
    while d.checked_mul(d).map_or(false, |s| s <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Remainder of `a` divided by monic `b` over F_p (ascending coeffs).
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let idx = shift + i;
                let sub = (lead * (bc % p)) % p;
                r[idx] = (r[idx] + p * p - sub) % p;
            }
        }
        r.pop();
    }
    while r.len() > 1 && *r.last().unwrap() == 0 {
        r.pop();
    }
    r
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

impl FieldDesc {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime_u64(p) {
            return Err(Error::BadField(format!("p = {p} is not a prime below 2^31")));
        }
        Ok(FieldDesc {
            kind: FieldKind::Prime,
            p,
            e: 1,
            modulus: Vec::new(),
            k: 1,
            m: BigUint::from(p),
        })
    }

    /// The extension field F_{p^e} presented by an irreducible modulus
    /// over F_p, given as ascending coefficients `c0..ce`.  The modulus
    /// is normalised to be monic; reducible moduli are rejected.
    pub fn extension(p: u64, modulus: &[u64]) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::BadField(format!("p = {p} is not prime")));
        }
        let mut m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        while m.len() > 1 && *m.last().unwrap() == 0 {
            m.pop();
        }
        let e = m.len().saturating_sub(1) as u32;
        if e < 1 || e > MAX_EXT_DEGREE {
            return Err(Error::BadField(format!(
                "modulus degree {e} outside 1..={MAX_EXT_DEGREE}"
            )));
        }
        let order = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
        if order > MAX_EXT_ORDER as u128 {
            return Err(Error::BadField(format!(
                "field order p^e = {p}^{e} exceeds 2^16"
            )));
        }
        // Make monic.
        let lead = *m.last().unwrap();
        if lead != 1 {
            let inv = mod_inverse_u64(lead, p).ok_or(Error::ZeroInverse)?;
            for c in m.iter_mut() {
                *c = (*c * inv) % p;
            }
        }
        // Irreducible iff no monic divisor of degree 1..=e/2.
        for d in 1..=(e / 2) {
            let count = (p as u128).pow(d);
            let mut idx = 0u128;
            while idx < count {
                let mut cand = Vec::with_capacity(d as usize + 1);
                let mut t = idx;
                for _ in 0..d {
                    cand.push((t % p as u128) as u64);
                    t /= p as u128;
                }
                cand.push(1);
                if poly_is_zero(&poly_rem(&m, &cand, p)) {
                    return Err(Error::BadField(format!(
                        "modulus is reducible over F_{p}"
                    )));
                }
                idx += 1;
            }
        }
        Ok(FieldDesc {
            kind: FieldKind::Extension,
            p,
            e,
            modulus: m,
            k: 1,
            m: BigUint::from(p),
        })
    }

    /// The residue ring Z/p^k.
    pub fn mod_pk(p: u64, k: u32) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime_u64(p) {
            return Err(Error::BadField(format!("p = {p} is not a prime below 2^31")));
        }
        if k < 1 {
            return Err(Error::BadField("k must be at least 1".into()));
        }
        Ok(FieldDesc {
            kind: FieldKind::ModPk,
            p,
            e: 1,
            modulus: Vec::new(),
            k,
            m: BigUint::from(p).pow(k),
        })
    }

    /// Exact rationals tagged with a prime and a working precision.
    pub fn padic(p: u64, precision: u32) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime_u64(p) {
            return Err(Error::BadField(format!("p = {p} is not a prime below 2^31")));
        }
        if precision < 1 {
            return Err(Error::BadField("precision must be at least 1".into()));
        }
        Ok(FieldDesc {
            kind: FieldKind::PadicRational,
            p,
            e: 1,
            modulus: Vec::new(),
            k: precision,
            m: BigUint::from(p),
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree (1 unless `Extension`).
    pub fn ext_degree(&self) -> u32 {
        self.e
    }

    /// Modulus coefficients for extension fields, ascending.
    pub fn modulus_coeffs(&self) -> &[u64] {
        &self.modulus
    }

    /// Exponent k for ModPk, working precision for PadicRational.
    pub fn precision(&self) -> u32 {
        self.k
    }

    /// True for the three kinds with finitely many elements.
    pub fn is_finite(&self) -> bool {
        self.kind != FieldKind::PadicRational
    }

    /// True when every nonzero element is invertible.
    pub fn is_field(&self) -> bool {
        match self.kind {
            FieldKind::Prime | FieldKind::Extension | FieldKind::PadicRational => true,
            FieldKind::ModPk => self.k == 1,
        }
    }

    /// Characteristic: p for finite kinds, 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match self.kind {
            FieldKind::PadicRational => 0,
            _ => self.p,
        }
    }

    /// Number of elements, when finite and representable in u64.
    pub fn order(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Prime => Some(self.p),
            FieldKind::Extension => (self.p as u128)
                .checked_pow(self.e)
                .and_then(|q| u64::try_from(q).ok()),
            FieldKind::ModPk => (self.p as u128)
                .checked_pow(self.k)
                .filter(|&q| q <= u64::MAX as u128)
                .map(|q| q as u64),
            FieldKind::PadicRational => None,
        }
    }

    /// Residue modulus p (Prime) or p^k (ModPk).
    pub fn residue_modulus(&self) -> &BigUint {
        &self.m
    }

    /// Checks that an element is a canonical value of this domain.
    pub fn check_element(&self, x: &FieldElement) -> Result<()> {
        let ok = match (self.kind, x) {
            (FieldKind::Prime | FieldKind::ModPk, FieldElement::Res(v)) => v < &self.m,
            (FieldKind::Extension, FieldElement::Ext(c)) => {
                c.len() == self.e as usize && c.iter().all(|&v| v < self.p)
            }
            (FieldKind::PadicRational, FieldElement::Rat(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!(
                "element {x:?} does not belong to {}",
                self.name()
            )))
        }
    }

    /// Short human-readable domain name, e.g. `F_9`, `Z/2^4`, `Q_3`.
    pub fn name(&self) -> String {
        match self.kind {
            FieldKind::Prime => format!("F_{}", self.p),
            FieldKind::Extension => format!("F_{}", self.order().unwrap_or(0)),
            FieldKind::ModPk => format!("Z/{}^{}", self.p, self.k),
            FieldKind::PadicRational => format!("Q_{}", self.p),
        }
    }

    pub fn zero(&self) -> FieldElement {
        match self.kind {
            FieldKind::Prime | FieldKind::ModPk => FieldElement::Res(BigUint::zero()),
            FieldKind::Extension => FieldElement::Ext(vec![0; self.e as usize]),
            FieldKind::PadicRational => FieldElement::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> FieldElement {
        match self.kind {
            FieldKind::Prime | FieldKind::ModPk => FieldElement::Res(BigUint::one()),
            FieldKind::Extension => {
                let mut c = vec![0; self.e as usize];
                c[0] = 1;
                FieldElement::Ext(c)
            }
            FieldKind::PadicRational => FieldElement::Rat(BigRational::one()),
        }
    }

    pub fn from_int(&self, v: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> FieldElement {
        match self.kind {
            FieldKind::Prime | FieldKind::ModPk => {
                let m = BigInt::from(self.m.clone());
                let r = v.mod_floor(&m);
                FieldElement::Res(r.to_biguint().unwrap())
            }
            FieldKind::Extension => {
                let p = BigInt::from(self.p);
                let r = v.mod_floor(&p).to_u64().unwrap();
                let mut c = vec![0; self.e as usize];
                c[0] = r;
                FieldElement::Ext(c)
            }
            FieldKind::PadicRational => FieldElement::Rat(BigRational::from(v.clone())),
        }
    }

    /// Interprets `num/den`; the denominator must be invertible.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<FieldElement> {
        if den.is_zero() {
            return Err(Error::ZeroInverse);
        }
        if self.kind == FieldKind::PadicRational {
            return Ok(FieldElement::Rat(BigRational::new(num.clone(), den.clone())));
        }
        let d = self.from_bigint(den);
        let inv = self.inverse(&d)?;
        Ok(self.mul(&self.from_bigint(num), &inv))
    }

    /// Builds an extension element from ascending coefficients over F_p.
    pub fn from_ext_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if self.kind != FieldKind::Extension {
            if coeffs.len() <= 1 {
                return Ok(self.from_int(coeffs.first().copied().unwrap_or(0) as i64));
            }
            return Err(Error::FieldMismatch(format!(
                "polynomial literal over {}",
                self.name()
            )));
        }
        let reduced = poly_rem(
            &coeffs.iter().map(|c| c % self.p).collect::<Vec<_>>(),
            &self.modulus,
            self.p,
        );
        let mut c = vec![0; self.e as usize];
        c[..reduced.len()].copy_from_slice(&reduced);
        Ok(FieldElement::Ext(c))
    }

    /// Wraps an exact rational (PadicRational only).
    pub fn from_rational(&self, r: BigRational) -> Result<FieldElement> {
        match self.kind {
            FieldKind::PadicRational => Ok(FieldElement::Rat(r)),
            _ => {
                let (num, den) = (r.numer().clone(), r.denom().clone());
                self.from_ratio(&num, &den)
            }
        }
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        match x {
            FieldElement::Res(v) => v.is_zero(),
            FieldElement::Ext(c) => poly_is_zero(c),
            FieldElement::Rat(r) => r.is_zero(),
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::Res(x), FieldElement::Res(y)) => FieldElement::Res((x + y) % &self.m),
            (FieldElement::Ext(x), FieldElement::Ext(y)) => FieldElement::Ext(
                x.iter()
                    .zip(y.iter())
                    .map(|(&u, &v)| (u + v) % self.p)
                    .collect(),
            ),
            (FieldElement::Rat(x), FieldElement::Rat(y)) => FieldElement::Rat(x + y),
            _ => panic!("mixed element representations in add"),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        match a {
            FieldElement::Res(x) => {
                if x.is_zero() {
                    a.clone()
                } else {
                    FieldElement::Res(&self.m - x)
                }
            }
            FieldElement::Ext(c) => {
                FieldElement::Ext(c.iter().map(|&v| (self.p - v) % self.p).collect())
            }
            FieldElement::Rat(r) => FieldElement::Rat(-r),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::Res(x), FieldElement::Res(y)) => FieldElement::Res((x * y) % &self.m),
            (FieldElement::Ext(x), FieldElement::Ext(y)) => {
                let mut prod = vec![0u64; x.len() + y.len()];
                for (i, &u) in x.iter().enumerate() {
                    if u == 0 {
                        continue;
                    }
                    for (j, &v) in y.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + u * v) % self.p;
                    }
                }
                let reduced = poly_rem(&prod, &self.modulus, self.p);
                let mut c = vec![0; self.e as usize];
                c[..reduced.len()].copy_from_slice(&reduced);
                FieldElement::Ext(c)
            }
            (FieldElement::Rat(x), FieldElement::Rat(y)) => FieldElement::Rat(x * y),
            _ => panic!("mixed element representations in mul"),
        }
    }

    /// Multiplicative inverse.  Errors: `ZeroInverse` on zero, `NonUnit`
    /// on a non-invertible residue in Z/p^k.
    pub fn inverse(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return Err(Error::ZeroInverse);
        }
        match a {
            FieldElement::Res(x) => {
                if self.kind == FieldKind::ModPk && (x % self.p).is_zero() {
                    return Err(Error::NonUnit);
                }
                let xi = BigInt::from(x.clone());
                let mi = BigInt::from(self.m.clone());
                let ext = xi.extended_gcd(&mi);
                debug_assert!(ext.gcd.is_one());
                let inv = ext.x.mod_floor(&mi);
                Ok(FieldElement::Res(inv.to_biguint().unwrap()))
            }
            FieldElement::Ext(c) => {
                // Extended Euclid in F_p[t] against the modulus.
                let p = self.p;
                let mut r0: Vec<u64> = self.modulus.clone();
                let mut r1: Vec<u64> = {
                    let mut v = c.clone();
                    while v.len() > 1 && *v.last().unwrap() == 0 {
                        v.pop();
                    }
                    v
                };
                let mut s0: Vec<u64> = vec![0];
                let mut s1: Vec<u64> = vec![1];
                while !poly_is_zero(&r1) {
                    let (q, r) = poly_divmod(&r0, &r1, p);
                    let s = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
                    r0 = r1;
                    r1 = r;
                    s0 = s1;
                    s1 = s;
                }
                if r0.len() != 1 {
                    return Err(Error::ZeroInverse);
                }
                let lead_inv = mod_inverse_u64(r0[0], p).ok_or(Error::ZeroInverse)?;
                let inv = poly_rem(
                    &s0.iter().map(|&v| (v * lead_inv) % p).collect::<Vec<_>>(),
                    &self.modulus,
                    p,
                );
                let mut out = vec![0; self.e as usize];
                out[..inv.len()].copy_from_slice(&inv);
                Ok(FieldElement::Ext(out))
            }
            FieldElement::Rat(r) => Ok(FieldElement::Rat(r.recip())),
        }
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inverse(b)?))
    }

    pub fn pow(&self, a: &FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Canonical index of an element of a finite domain, in `[0, order)`.
    pub fn element_index(&self, x: &FieldElement) -> u64 {
        match x {
            FieldElement::Res(v) => v.to_u64().expect("residue fits u64"),
            FieldElement::Ext(c) => {
                let mut idx = 0u64;
                for &v in c.iter().rev() {
                    idx = idx * self.p + v;
                }
                idx
            }
            FieldElement::Rat(_) => panic!("no canonical index over the rationals"),
        }
    }

    /// Inverse of [`Self::element_index`].
    pub fn element_from_index(&self, idx: u64) -> FieldElement {
        match self.kind {
            FieldKind::Prime | FieldKind::ModPk => FieldElement::Res(BigUint::from(idx)),
            FieldKind::Extension => {
                let mut c = vec![0u64; self.e as usize];
                let mut t = idx;
                for slot in c.iter_mut() {
                    *slot = t % self.p;
                    t /= self.p;
                }
                FieldElement::Ext(c)
            }
            FieldKind::PadicRational => panic!("no canonical index over the rationals"),
        }
    }

    /// p-adic valuation.  `None` encodes the infinite valuation of zero.
    /// For Z/p^k this is the valuation of the canonical residue.
    pub fn valuation(&self, x: &FieldElement) -> Option<i64> {
        if self.is_zero(x) {
            return None;
        }
        match x {
            FieldElement::Res(v) => {
                let mut v = v.clone();
                let p = BigUint::from(self.p);
                let mut val = 0i64;
                while (&v % &p).is_zero() {
                    v /= &p;
                    val += 1;
                }
                Some(val)
            }
            FieldElement::Ext(_) => Some(0),
            FieldElement::Rat(r) => Some(rational_valuation(r, self.p).expect("nonzero")),
        }
    }

    /// Uniform random element (finite kinds); small random integer for
    /// the rationals.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> FieldElement {
        match self.kind {
            FieldKind::PadicRational => self.from_int(rng.gen_range(-50i64..=50)),
            _ => {
                let q = self.order().expect("finite order fits u64");
                self.element_from_index(rng.gen_range(0..q))
            }
        }
    }

    /// Quadratic character on F_q^* for odd q: `1` for squares, `-1`
    /// for non-squares, `0` on zero.
    pub fn quadratic_character(&self, x: &FieldElement) -> i32 {
        debug_assert!(matches!(self.kind, FieldKind::Prime | FieldKind::Extension));
        debug_assert!(self.p != 2);
        if self.is_zero(x) {
            return 0;
        }
        let q = self.order().expect("finite");
        let v = self.pow(x, (q - 1) / 2);
        if v == self.one() {
            1
        } else {
            -1
        }
    }

    /// Square root in characteristic 2 (Frobenius inverse): x^(q/2).
    pub fn sqrt_char2(&self, x: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.characteristic(), 2);
        let q = self.order().expect("finite");
        self.pow(x, q / 2)
    }

    /// Absolute trace to F_2 in characteristic 2.
    pub fn trace_to_f2(&self, x: &FieldElement) -> bool {
        debug_assert_eq!(self.characteristic(), 2);
        let e = self.e;
        let mut acc = self.zero();
        let mut t = x.clone();
        for _ in 0..e {
            acc = self.add(&acc, &t);
            t = self.mul(&t, &t);
        }
        !self.is_zero(&acc)
    }

    /// Canonical display: decimal residues, `t`-polynomials with
    /// descending powers for extensions, `a/b` for rationals.
    pub fn fmt_element(&self, x: &FieldElement) -> String {
        match x {
            FieldElement::Res(v) => v.to_string(),
            FieldElement::Rat(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            FieldElement::Ext(c) => {
                let mut parts: Vec<String> = Vec::new();
                for (i, &v) in c.iter().enumerate().rev() {
                    if v == 0 {
                        continue;
                    }
                    let mut s = String::new();
                    match i {
                        0 => write!(s, "{v}").unwrap(),
                        1 => {
                            if v == 1 {
                                s.push('t');
                            } else {
                                write!(s, "{v}*t").unwrap()
                            }
                        }
                        _ => {
                            if v == 1 {
                                write!(s, "t^{i}").unwrap()
                            } else {
                                write!(s, "{v}*t^{i}").unwrap()
                            }
                        }
                    }
                    parts.push(s);
                }
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join("+")
                }
            }
        }
    }

    /// Rational content of an element (PadicRational only).
    pub fn as_rational<'a>(&self, x: &'a FieldElement) -> Result<&'a BigRational> {
        match x {
            FieldElement::Rat(r) => Ok(r),
            _ => Err(Error::FieldMismatch("expected a rational element".into())),
        }
    }
}

/// p-adic valuation of an exact rational; `None` for zero.
pub fn rational_valuation(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |mut v: BigInt| -> i64 {
        let mut c = 0i64;
        v = v.abs();
        while (&v % &p).is_zero() {
            v /= &p;
            c += 1;
        }
        c
    };
    Some(count(r.numer().clone()) - count(r.denom().clone()))
}

/// Inverse of `a` modulo `m` for u64 operands, when it exists.
pub fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(((t % m as i128 + m as i128) % m as i128) as u64)
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if poly_is_zero(a) || poly_is_zero(b) {
        return vec![0];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &u) in a.iter().enumerate() {
        if u == 0 {
            continue;
        }
        for (j, &v) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + u * v) % p;
        }
    }
    out
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let u = a.get(i).copied().unwrap_or(0) % p;
        let v = b.get(i).copied().unwrap_or(0) % p;
        out[i] = (u + p - v) % p;
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn poly_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

/// Quotient and remainder of `a / b` over F_p; `b` need not be monic.
fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r: Vec<u64> = a.iter().map(|&c| c % p).collect();
    poly_trim(&mut r);
    let mut b: Vec<u64> = b.iter().map(|&c| c % p).collect();
    poly_trim(&mut b);
    debug_assert!(!poly_is_zero(&b));
    let db = b.len() - 1;
    let lead_inv = mod_inverse_u64(*b.last().unwrap(), p).expect("nonzero lead");
    if r.len() - 1 < db || poly_is_zero(&r) {
        return (vec![0], r);
    }
    let mut q = vec![0u64; r.len() - db];
    while !poly_is_zero(&r) && r.len() - 1 >= db {
        let coef = (*r.last().unwrap() * lead_inv) % p;
        let shift = r.len() - 1 - db;
        q[shift] = coef;
        for (i, &bc) in b.iter().enumerate() {
            let idx = shift + i;
            let sub = (coef * bc) % p;
            r[idx] = (r[idx] + p * p - sub) % p;
        }
        poly_trim(&mut r);
    }
    poly_trim(&mut q);
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> FieldDesc {
        FieldDesc::prime(5).unwrap()
    }

    fn f4() -> FieldDesc {
        FieldDesc::extension(2, &[1, 1, 1]).unwrap()
    }

    #[test]
    fn prime_field_inverse_small_values() {
        let f = f5();
        assert_eq!(f.inverse(&f.from_int(1)).unwrap(), f.from_int(1));
        assert_eq!(f.inverse(&f.from_int(2)).unwrap(), f.from_int(3));
        assert_eq!(f.inverse(&f.from_int(0)), Err(Error::ZeroInverse));
    }

    #[test]
    fn extension_inverse_matches_multiplication_table() {
        // Oracle: exhaustive multiplication table over the 4 elements.
        let f = f4();
        let t = f.element_from_index(2); // the class of t
        let mut found = None;
        for i in 0..4 {
            let cand = f.element_from_index(i);
            if f.mul(&t, &cand) == f.one() {
                found = Some(cand);
            }
        }
        let inv = f.inverse(&t).unwrap();
        assert_eq!(Some(inv.clone()), found);
        assert_eq!(inv, f.element_from_index(3)); // t + 1
    }

    #[test]
    fn modpk_units_and_nonunits() {
        let z9 = FieldDesc::mod_pk(3, 2).unwrap();
        assert_eq!(z9.inverse(&z9.from_int(3)), Err(Error::NonUnit));
        let i = z9.inverse(&z9.from_int(2)).unwrap();
        assert_eq!(z9.mul(&i, &z9.from_int(2)), z9.one());
        let z16 = FieldDesc::mod_pk(2, 4).unwrap();
        let i = z16.inverse(&z16.from_int(7)).unwrap();
        assert_eq!(z16.mul(&i, &z16.from_int(7)), z16.one());
    }

    #[test]
    fn construction_rejects_bad_descriptions() {
        assert!(FieldDesc::prime(6).is_err());
        assert!(FieldDesc::prime(1 << 31).is_err());
        // t^2 + 1 = (t + 1)^2 over F_2.
        assert!(FieldDesc::extension(2, &[1, 0, 1]).is_err());
        // Degree cap e <= 8.
        let deg17: Vec<u64> = std::iter::once(1).chain(std::iter::repeat(0).take(16)).chain(std::iter::once(1)).collect();
        assert!(FieldDesc::extension(2, &deg17).is_err());
        // Order cap: 263^2 > 2^16 (rejected before irreducibility).
        assert!(FieldDesc::extension(263, &[1, 0, 1]).is_err());
        assert!(FieldDesc::mod_pk(4, 2).is_err());
        assert!(FieldDesc::padic(10, 4).is_err());
    }

    #[test]
    fn f9_is_accepted_and_arithmetic_closes() {
        // t^2 + 1 is irreducible over F_3.
        let f9 = FieldDesc::extension(3, &[1, 0, 1]).unwrap();
        assert_eq!(f9.order(), Some(9));
        for i in 0..9 {
            for j in 0..9 {
                let a = f9.element_from_index(i);
                let b = f9.element_from_index(j);
                let s = f9.add(&a, &b);
                let m = f9.mul(&a, &b);
                f9.check_element(&s).unwrap();
                f9.check_element(&m).unwrap();
            }
        }
    }

    #[test]
    fn valuations_of_rationals() {
        let q3 = FieldDesc::padic(3, 8).unwrap();
        assert_eq!(q3.valuation(&q3.from_int(9)), Some(2));
        assert_eq!(q3.valuation(&q3.from_ratio(&1.into(), &3.into()).unwrap()), Some(-1));
        assert_eq!(q3.valuation(&q3.from_int(0)), None);
        let q5 = FieldDesc::padic(5, 8).unwrap();
        assert_eq!(
            q5.valuation(&q5.from_ratio(&12.into(), &25.into()).unwrap()),
            Some(-2)
        );
    }

    #[test]
    fn modpk_valuation_uses_canonical_residue() {
        let z27 = FieldDesc::mod_pk(3, 3).unwrap();
        assert_eq!(z27.valuation(&z27.from_int(18)), Some(2));
        assert_eq!(z27.valuation(&z27.from_int(27)), None);
    }

    #[test]
    fn char2_square_roots_and_trace() {
        let f = f4();
        for i in 0..4 {
            let a = f.element_from_index(i);
            let r = f.sqrt_char2(&a);
            assert_eq!(f.mul(&r, &r), a);
        }
        // Trace on F_4: 0 on F_2, 1 on the two generators.
        assert!(!f.trace_to_f2(&f.zero()));
        assert!(!f.trace_to_f2(&f.one()));
        assert!(f.trace_to_f2(&f.element_from_index(2)));
        assert!(f.trace_to_f2(&f.element_from_index(3)));
    }

    #[test]
    fn element_display_is_canonical() {
        let f = f4();
        assert_eq!(f.fmt_element(&f.zero()), "0");
        assert_eq!(f.fmt_element(&f.element_from_index(3)), "t+1");
        let q3 = FieldDesc::padic(3, 8).unwrap();
        assert_eq!(
            q3.fmt_element(&q3.from_ratio(&(-1).into(), &3.into()).unwrap()),
            "-1/3"
        );
    }

    fn small_fields() -> Vec<FieldDesc> {
        vec![
            FieldDesc::prime(2).unwrap(),
            FieldDesc::prime(3).unwrap(),
            FieldDesc::prime(5).unwrap(),
            FieldDesc::prime(61).unwrap(),
            FieldDesc::extension(2, &[1, 1, 1]).unwrap(),
            FieldDesc::extension(2, &[1, 1, 0, 1]).unwrap(),
            FieldDesc::extension(3, &[1, 0, 1]).unwrap(),
            FieldDesc::extension(5, &[2, 0, 1]).unwrap(),
        ]
    }

    #[test]
    fn every_nonzero_element_has_a_working_inverse() {
        for f in small_fields() {
            let q = f.order().unwrap();
            for i in 1..q {
                let a = f.element_from_index(i);
                let inv = f.inverse(&a).unwrap();
                assert_eq!(f.mul(&a, &inv), f.one(), "inverse failed in {}", f.name());
            }
        }
    }

    #[test]
    fn large_prime_field_inverse_spot_checks() {
        let p = 2147483629u64; // largest prime below 2^31
        let f = FieldDesc::prime(p).unwrap();
        let mut rng = crate::seeded_rng(7);
        for _ in 0..200 {
            let a = f.random_element(&mut rng);
            if f.is_zero(&a) {
                continue;
            }
            assert_eq!(f.mul(&a, &f.inverse(&a).unwrap()), f.one());
        }
    }

    proptest! {
        #[test]
        fn field_axioms_hold_on_random_triples(fi in 0usize..8, xs in prop::array::uniform3(0u64..65536)) {
            let f = small_fields()[fi].clone();
            let q = f.order().unwrap();
            let a = f.element_from_index(xs[0] % q);
            let b = f.element_from_index(xs[1] % q);
            let c = f.element_from_index(xs[2] % q);
            prop_assert_eq!(f.add(&a, &b), f.add(&b, &a));
            prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            prop_assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
        }

        #[test]
        fn rational_valuation_is_additive(n1 in 1i64..5000, d1 in 1i64..5000, n2 in 1i64..5000, d2 in 1i64..5000) {
            let p = 3u64;
            let a = BigRational::new(n1.into(), d1.into());
            let b = BigRational::new(n2.into(), d2.into());
            let va = rational_valuation(&a, p).unwrap();
            let vb = rational_valuation(&b, p).unwrap();
            prop_assert_eq!(rational_valuation(&(a * b), p).unwrap(), va + vb);
        }

        #[test]
        fn element_index_roundtrips(fi in 0usize..8, i in 0u64..65536) {
            let f = small_fields()[fi].clone();
            let q = f.order().unwrap();
            let x = f.element_from_index(i % q);
            prop_assert_eq!(f.element_from_index(f.element_index(&x)), x);
        }
    }
}
