//! Finite fields F_{p^k} of odd characteristic.
//!
//! Elements are stored as integer codes `sum c_i p^i` of their coefficient
//! vectors in F_p[t]/(modulus). Multiplication and addition go through
//! discrete log and Zech log tables, so every field op is a few lookups.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Polynomial;

/// Largest field the tables are built for.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

/// Fields up to this size take square roots from an exhaustive table.
const SQRT_TABLE_LIMIT: u32 = 1024;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
    /// Monic, low-to-high, length k+1.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn prime(p: u32) -> FieldSpec {
        FieldSpec { p, k: 1, modulus: vec![0, 1] }
    }

    /// F_{p^k} with the first irreducible monic modulus.
    pub fn with_degree(p: u32, k: u32) -> Result<FieldSpec> {
        check_prime(p)?;
        Ok(FieldSpec { p, k, modulus: first_irreducible(p, k) })
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }
}

/// Field element code. Only meaningful together with its [`Field`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fe(pub u32);

struct FieldData {
    spec: FieldSpec,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// zech[n] = log(1 + g^n), NONE when 1 + g^n = 0.
    zech: Vec<u32>,
    half: u32,
    sqrt: Option<Vec<u32>>,
}

#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p(), self.k())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field> {
        check_prime(spec.p)?;
        if spec.k == 0 || spec.modulus.len() != spec.k as usize + 1 {
            return Err(Error::InvalidField("modulus must have degree k".into()));
        }
        if spec.modulus[spec.k as usize] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if spec.modulus.iter().any(|&c| c >= spec.p) {
            return Err(Error::InvalidField("modulus coefficients must lie in [0, p)".into()));
        }
        if spec.order() > MAX_FIELD_SIZE {
            return Err(Error::SizeGuard(format!("field of order {} too large", spec.order())));
        }
        let p = spec.p as u64;
        let m: Vec<u64> = spec.modulus.iter().map(|&c| c as u64).collect();
        if !is_irreducible(&m, p) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        let q = spec.order() as u32;
        let k = spec.k as usize;
        let to_poly = |code: u32| -> Vec<u64> {
            let mut c = code as u64;
            (0..k)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    d
                })
                .collect()
        };
        let to_code = |v: &[u64]| -> u32 {
            let mut c = 0u64;
            for &d in v.iter().rev() {
                c = c * p + d;
            }
            c as u32
        };
        let mul = |a: u32, b: u32| -> u32 { to_code(&pmulmod(&to_poly(a), &to_poly(b), &m, p)) };
        let order = (q - 1) as u64;
        let prime_factors = factor(order);
        let powc = |mut b: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    r = mul(r, b);
                }
                b = mul(b, b);
                e >>= 1;
            }
            r
        };
        let g = (2..q)
            .find(|&g| prime_factors.iter().all(|&l| powc(g, order / l) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![NONE; q as usize];
        let mut x = 1u32;
        for (i, e) in exp.iter_mut().enumerate() {
            *e = x;
            log[x as usize] = i as u32;
            x = mul(x, g);
        }
        let add_codes = |a: u32, b: u32| -> u32 {
            let (pa, pb) = (to_poly(a), to_poly(b));
            to_code(&pa.iter().zip(&pb).map(|(x, y)| (x + y) % p).collect::<Vec<_>>())
        };
        let zech = exp
            .iter()
            .map(|&e| {
                let s = add_codes(1, e);
                if s == 0 { NONE } else { log[s as usize] }
            })
            .collect();
        let mut data = FieldData { spec, q, exp, log, zech, half: (q - 1) / 2, sqrt: None };
        if q <= SQRT_TABLE_LIMIT {
            let field = Field(Arc::new(data));
            let table = sqrt_table(&field);
            data = Arc::try_unwrap(field.0).ok().expect("sole owner");
            data.sqrt = Some(table);
        }
        Ok(Field(Arc::new(data)))
    }

    pub fn prime(p: u32) -> Result<Field> {
        Field::new(FieldSpec::prime(p))
    }

    pub fn with_degree(p: u32, k: u32) -> Result<Field> {
        Field::new(FieldSpec::with_degree(p, k)?)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }
    pub fn p(&self) -> u32 {
        self.0.spec.p
    }
    pub fn k(&self) -> u32 {
        self.0.spec.k
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }
    pub fn one(&self) -> Fe {
        Fe(1)
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_code(&self, c: u32) -> Result<Fe> {
        if c < self.q() {
            Ok(Fe(c))
        } else {
            Err(Error::InvalidInput(format!("element code {c} out of range for q = {}", self.q())))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q()).map(Fe)
    }

    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let p = self.p();
        let mut c = a.0;
        (0..self.k())
            .map(|_| {
                let d = c % p;
                c /= p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, cs: &[u32]) -> Fe {
        let p = self.p();
        let mut c = 0u32;
        for &d in cs.iter().take(self.k() as usize).rev() {
            c = c * p + d % p;
        }
        Fe(c)
    }

    /// Ordering key comparing coefficient vectors low-to-high lexicographically.
    pub fn lex_key(&self, a: Fe) -> u32 {
        let p = self.p();
        self.coeffs(a).iter().fold(0, |acc, &d| acc * p + d)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let d = &self.0;
        let (la, lb) = (d.log[a.0 as usize], d.log[b.0 as usize]);
        let n = q1_sub(lb, la, d.q - 1);
        let z = d.zech[n as usize];
        if z == NONE {
            Fe(0)
        } else {
            Fe(d.exp[q1_add(la, z, d.q - 1) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            return a;
        }
        let d = &self.0;
        Fe(d.exp[q1_add(d.log[a.0 as usize], d.half, d.q - 1) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe(0);
        }
        let d = &self.0;
        Fe(d.exp[q1_add(d.log[a.0 as usize], d.log[b.0 as usize], d.q - 1) as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let d = &self.0;
        let l = d.log[a.0 as usize];
        Ok(Fe(d.exp[((d.q - 1 - l) % (d.q - 1)) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe(1);
        }
        if a.0 == 0 {
            return Fe(0);
        }
        let d = &self.0;
        let m = (d.q - 1) as u64;
        Fe(d.exp[((d.log[a.0 as usize] as u64 * (e % m)) % m) as usize])
    }

    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p() as u64)
    }

    pub fn is_square(&self, a: Fe) -> bool {
        a.0 == 0 || self.0.log[a.0 as usize] % 2 == 0
    }

    /// Square root with the lexicographically smaller coefficient vector.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        let s = match &self.0.sqrt {
            Some(t) => {
                let s = t[a.0 as usize];
                if s == NONE {
                    return None;
                }
                Fe(s)
            }
            None => tonelli_shanks(self, a)?,
        };
        Some(self.canonical_sign(s))
    }

    /// Chooses between s and -s by lex_key.
    pub fn canonical_sign(&self, s: Fe) -> Fe {
        let n = self.neg(s);
        if self.lex_key(n) < self.lex_key(s) { n } else { s }
    }

    pub fn fq(&self, a: Fe) -> Fq {
        Fq { field: self.clone(), v: a }
    }

    pub fn fmt_elem(&self, a: Fe) -> String {
        if self.k() == 1 {
            a.0.to_string()
        } else {
            format!("{:?}", self.coeffs(a))
        }
    }
}

#[inline]
fn q1_add(a: u32, b: u32, m: u32) -> u32 {
    let s = a + b;
    if s >= m { s - m } else { s }
}

#[inline]
fn q1_sub(a: u32, b: u32, m: u32) -> u32 {
    if a >= b { a - b } else { a + m - b }
}

fn sqrt_table(f: &Field) -> Vec<u32> {
    let mut t = vec![NONE; f.q() as usize];
    for x in f.elements() {
        let s = f.mul(x, x);
        let cur = t[s.0 as usize];
        if cur == NONE || f.lex_key(x) < f.lex_key(Fe(cur)) {
            t[s.0 as usize] = x.0;
        }
    }
    t
}

/// Tonelli-Shanks over F_q; returns some root, sign not normalized.
pub fn tonelli_shanks(f: &Field, a: Fe) -> Option<Fe> {
    if a.0 == 0 {
        return Some(a);
    }
    let q1 = (f.q() - 1) as u64;
    if f.pow(a, q1 / 2) != f.one() {
        return None;
    }
    let mut s = 0;
    let mut t = q1;
    while t % 2 == 0 {
        t /= 2;
        s += 1;
    }
    let z = f.elements().find(|&z| z.0 != 0 && f.pow(z, q1 / 2) != f.one())?;
    let mut m = s;
    let mut c = f.pow(z, t);
    let mut r = f.pow(a, (t + 1) / 2);
    let mut tt = f.pow(a, t);
    while tt != f.one() {
        let mut i = 0;
        let mut x = tt;
        while x != f.one() {
            x = f.mul(x, x);
            i += 1;
        }
        let b = f.pow(c, 1 << (m - i - 1));
        r = f.mul(r, b);
        c = f.mul(b, b);
        tt = f.mul(tt, c);
        m = i;
    }
    Some(r)
}

/// A field element bundled with its field, for the checked public API.
#[derive(Clone, Debug)]
pub struct Fq {
    pub field: Field,
    pub v: Fe,
}

impl PartialEq for Fq {
    fn eq(&self, o: &Fq) -> bool {
        self.field == o.field && self.v == o.v
    }
}
impl Eq for Fq {}

impl Fq {
    fn same(&self, o: &Fq) -> Result<()> {
        if self.field == o.field { Ok(()) } else { Err(Error::FieldMismatch) }
    }
    pub fn add(&self, o: &Fq) -> Result<Fq> {
        self.same(o)?;
        Ok(self.field.fq(self.field.add(self.v, o.v)))
    }
    pub fn sub(&self, o: &Fq) -> Result<Fq> {
        self.same(o)?;
        Ok(self.field.fq(self.field.sub(self.v, o.v)))
    }
    pub fn mul(&self, o: &Fq) -> Result<Fq> {
        self.same(o)?;
        Ok(self.field.fq(self.field.mul(self.v, o.v)))
    }
    pub fn neg(&self) -> Fq {
        self.field.fq(self.field.neg(self.v))
    }
    pub fn inv(&self) -> Result<Fq> {
        Ok(self.field.fq(self.field.inv(self.v)?))
    }
    pub fn sqrt(&self) -> Option<Fq> {
        self.field.sqrt(self.v).map(|s| self.field.fq(s))
    }
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.v)
    }
}

/// Ring embedding of a subfield into a larger field.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub from: Field,
    pub to: Field,
    image: Vec<Fe>,
}

impl Embedding {
    pub fn identity(f: &Field) -> Embedding {
        Embedding { from: f.clone(), to: f.clone(), image: f.elements().collect() }
    }

    /// Sends the generator t of `from` to the smallest root of its modulus in `to`.
    pub fn new(from: &Field, to: &Field) -> Result<Embedding> {
        if from == to {
            return Ok(Embedding::identity(from));
        }
        if from.p() != to.p() || to.k() % from.k() != 0 {
            return Err(Error::FieldMismatch);
        }
        let m: Vec<Fe> = from.spec().modulus.iter().map(|&c| to.from_int(c as i64)).collect();
        let eval = |x: Fe| m.iter().rev().fold(Fe(0), |acc, &c| to.add(to.mul(acc, x), c));
        let theta = to
            .elements()
            .find(|&x| eval(x).0 == 0)
            .ok_or_else(|| Error::InvalidField("subfield generator has no root".into()))?;
        let mut powers = vec![to.one()];
        for _ in 1..from.k() {
            let last = *powers.last().unwrap();
            powers.push(to.mul(last, theta));
        }
        let image = from
            .elements()
            .map(|a| {
                from.coeffs(a)
                    .iter()
                    .zip(&powers)
                    .fold(Fe(0), |acc, (&c, &pw)| to.add(acc, to.mul(to.from_int(c as i64), pw)))
            })
            .collect();
        Ok(Embedding { from: from.clone(), to: to.clone(), image })
    }

    pub fn map(&self, a: Fe) -> Fe {
        self.image[a.0 as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.from == self.to
    }

    /// Inverse image of an element lying in the subfield.
    pub fn preimage(&self, b: Fe) -> Option<Fe> {
        self.image.iter().position(|&x| x == b).map(|i| Fe(i as u32))
    }

    pub fn map_poly(&self, f: &Polynomial) -> Polynomial {
        Polynomial::new(&self.to, f.coeffs().iter().map(|&c| self.map(c)).collect())
    }
}

/// Smallest extension over which `f` splits into linear factors.
pub fn extend_to_split(field: &Field, f: &Polynomial) -> Result<(Field, Embedding)> {
    if f.is_zero() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    let mut d = 1u32;
    loop {
        let big = if d == 1 { field.clone() } else { Field::with_degree(field.p(), field.k() * d)? };
        let emb = Embedding::new(field, &big)?;
        let g = emb.map_poly(f);
        let count: usize = g.roots().iter().map(|r| r.1).sum();
        if count == g.degree().unwrap_or(0) {
            return Ok((big, emb));
        }
        d += 1;
    }
}

/// Smallest extension in which every value is a square.
pub fn extend_for_sqrts(field: &Field, values: &[Fe]) -> Result<(Field, Embedding)> {
    if values.iter().all(|&v| field.is_square(v)) {
        return Ok((field.clone(), Embedding::identity(field)));
    }
    // every element of F_q is a square in F_{q^2}
    let big = Field::with_degree(field.p(), field.k() * 2)?;
    let emb = Embedding::new(field, &big)?;
    Ok((big, emb))
}

fn check_prime(p: u32) -> Result<()> {
    if p < 3 || p % 2 == 0 || (3..).step_by(2).take_while(|d| d * d <= p).any(|d| p % d == 0) {
        return Err(Error::InvalidField(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn factor(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// First irreducible monic polynomial of degree k, counting through
/// coefficient vectors with c_0 least significant.
pub fn first_irreducible(p: u32, k: u32) -> Vec<u32> {
    let pp = p as u64;
    let total = pp.pow(k);
    for code in 0..total {
        let mut c = code;
        let mut m: Vec<u64> = (0..k)
            .map(|_| {
                let d = c % pp;
                c /= pp;
                d
            })
            .collect();
        m.push(1);
        if is_irreducible(&m, pp) {
            return m.iter().map(|&x| x as u32).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn ptrim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn prem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = ptrim(a.to_vec());
    let m = ptrim(m.to_vec());
    let dm = m.len() - 1;
    let inv_lead = modpow(m[dm], p - 2, p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * inv_lead % p;
        for (i, &mc) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mc % p) % p;
        }
        r = ptrim(r);
    }
    r
}

fn pmulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![0; m.len() - 1];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    let mut r = prem(&r, m, p);
    r.resize(m.len() - 1, 0);
    r
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (ptrim(a.to_vec()), ptrim(b.to_vec()));
    while !b.is_empty() {
        let r = prem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn modpow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Rabin's test.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    let frob = |h: &[u64]| -> Vec<u64> {
        let mut acc = {
            let mut one = vec![0; k];
            one[0] = 1;
            one
        };
        let mut base = h.to_vec();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = pmulmod(&acc, &base, m, p);
            }
            base = pmulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    };
    let mut x = vec![0u64; k];
    x[1] = 1;
    let mut powers = vec![x.clone()];
    let mut h = x.clone();
    for _ in 0..k {
        h = frob(&h);
        powers.push(h.clone());
    }
    if ptrim(powers[k].clone()) != ptrim(x.clone()) {
        return false;
    }
    for l in factor(k as u64) {
        let mut d = powers[k / l as usize].clone();
        d[1] = (d[1] + p - 1) % p;
        let g = pgcd(&d, m, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}
