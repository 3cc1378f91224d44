//! Factorization over Q: squarefree decomposition followed by a
//! Zassenhaus factorization of each squarefree part (modular factorization,
//! Hensel lifting, recombination of lifted factors).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::RatPoly;
use super::rational::Rational;

/// `p = unit * prod factor^multiplicity` with monic irreducible factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub unit: Rational,
    pub factors: Vec<(RatPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> RatPoly {
        self.factors
            .iter()
            .fold(RatPoly::constant(self.unit.clone()), |acc, (f, m)| &acc * &f.pow(*m))
    }

    /// Irreducible factors without multiplicity.
    pub fn irreducible_factors(&self) -> Vec<RatPoly> {
        self.factors.iter().map(|(f, _)| f.clone()).collect()
    }
}

/// Yun's squarefree decomposition: monic `a_i` with `p = lc * prod a_i^i`.
pub fn squarefree_decomposition(p: &RatPoly) -> Vec<(RatPoly, usize)> {
    let mut out = Vec::new();
    if p.deg() == 0 {
        return out;
    }
    let f = p.monic();
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.exact_div(&a0).unwrap();
    let mut c = df.exact_div(&a0).unwrap();
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.deg() > 0 {
        let a = b.gcd(&d);
        let nb = b.exact_div(&a).unwrap();
        c = d.exact_div(&a).unwrap();
        d = &c - &nb.derivative();
        if a.deg() > 0 {
            out.push((a, i));
        }
        b = nb;
        i += 1;
    }
    out
}

/// Complete factorization into monic irreducibles over Q.
pub fn factor_over_q(p: &RatPoly) -> Factorization {
    assert!(!p.is_zero(), "cannot factor the zero polynomial");
    let unit = p.lc();
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(p) {
        let (_, prim) = part.primitive_part();
        for f in factor_squarefree_primitive(&prim) {
            factors.push((RatPoly::from_bigints(&f).monic(), mult));
        }
    }
    factors.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then_with(|| cmp_coeffs(&a.0, &b.0)));
    Factorization { unit, factors }
}

fn cmp_coeffs(a: &RatPoly, b: &RatPoly) -> std::cmp::Ordering {
    a.coeffs().iter().rev().cmp(b.coeffs().iter().rev())
}

/// Monic irreducible factors of a squarefree polynomial.
pub fn irreducible_factors(p: &RatPoly) -> Vec<RatPoly> {
    factor_over_q(p).irreducible_factors()
}

pub fn is_irreducible(p: &RatPoly) -> bool {
    if p.deg() == 0 {
        return false;
    }
    let f = factor_over_q(p);
    f.factors.len() == 1 && f.factors[0].1 == 1
}

type ZPoly = Vec<BigInt>;
type PPoly = Vec<u64>;

fn ztrim(mut v: ZPoly) -> ZPoly {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    ztrim(out)
}

fn zmod(a: &ZPoly, m: &BigInt) -> ZPoly {
    ztrim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m / 2;
    ztrim(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn to_ppoly(a: &ZPoly, p: u64) -> PPoly {
    let pb = BigInt::from(p);
    ptrim(a.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect())
}

fn to_zpoly(a: &PPoly) -> ZPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Exact division over Z; `None` when `b` does not divide `a`.
fn zdiv_exact(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let mut r = a.clone();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return if r.is_empty() { Some(Vec::new()) } else { None };
    }
    let lb = b.last().unwrap();
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + db].div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, bc) in b.iter().enumerate() {
                r[k + j] -= &c * bc;
            }
        }
        q[k] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(ztrim(q))
}

fn ptrim(mut v: PPoly) -> PPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn pinv(a: u64, p: u64) -> u64 {
    powmod_u64(a, p - 2, p)
}

fn powmod_u64(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
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

fn padd(a: &PPoly, b: &PPoly, p: u64) -> PPoly {
    let n = a.len().max(b.len());
    ptrim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect())
}

fn psub(a: &PPoly, b: &PPoly, p: u64) -> PPoly {
    let n = a.len().max(b.len());
    ptrim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn pmul(a: &PPoly, b: &PPoly, p: u64) -> PPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    ptrim(out)
}

fn pdivrem(a: &PPoly, b: &PPoly, p: u64) -> (PPoly, PPoly) {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let inv = pinv(*b.last().unwrap(), p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db] * inv % p;
        if c != 0 {
            for (j, &bc) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - c * bc % p) % p;
            }
        }
        q[k] = c;
    }
    r.truncate(db);
    (ptrim(q), ptrim(r))
}

fn prem(a: &PPoly, b: &PPoly, p: u64) -> PPoly {
    pdivrem(a, b, p).1
}

fn pmonic(a: &PPoly, p: u64) -> PPoly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = pinv(l, p);
            a.iter().map(|c| c * inv % p).collect()
        }
    }
}

fn pgcd(a: &PPoly, b: &PPoly, p: u64) -> PPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = prem(&x, &y, p);
        x = y;
        y = r;
    }
    pmonic(&x, p)
}

/// Returns `(s, t)` with `s a + t b = 1 (mod p)` for coprime inputs.
fn pxgcd(a: &PPoly, b: &PPoly, p: u64) -> (PPoly, PPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = pdivrem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let s = psub(&s0, &pmul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, s);
        let t = psub(&t0, &pmul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = pinv(r0[0], p);
    let scale = |v: &PPoly| ptrim(v.iter().map(|c| c * inv % p).collect());
    (scale(&s0), scale(&t0))
}

fn pderiv(a: &PPoly, p: u64) -> PPoly {
    ptrim(a.iter().enumerate().skip(1).map(|(k, c)| (k as u64 % p) * c % p).collect())
}

fn ppowmod(base: &PPoly, e: &BigUint, m: &PPoly, p: u64) -> PPoly {
    let mut result = vec![1u64];
    let b = prem(base, m, p);
    for i in (0..e.bits()).rev() {
        result = prem(&pmul(&result, &result, p), m, p);
        if e.bit(i) {
            result = prem(&pmul(&result, &b, p), m, p);
        }
    }
    result
}

/// Distinct-degree factorization of a monic squarefree polynomial mod p.
fn ddf(f: &PPoly, p: u64) -> Vec<(PPoly, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let pe = BigUint::from(p);
    let mut d = 1;
    while f.len() - 1 >= 2 * d {
        h = ppowmod(&h, &pe, &f, p);
        let g = pgcd(&f, &psub(&h, &x, p), p);
        if g.len() > 1 {
            out.push((g.clone(), d));
            f = pdivrem(&f, &g, p).0;
            h = prem(&h, &f, p);
        }
        d += 1;
    }
    if f.len() > 1 {
        let deg = f.len() - 1;
        out.push((f, deg));
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting (odd p).
fn edf(f: &PPoly, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<PPoly> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.clone()];
    }
    let e = (num_traits::pow(BigUint::from(p), d) - BigUint::one()) / BigUint::from(2u32);
    loop {
        let a: PPoly = ptrim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() < 2 {
            continue;
        }
        let b = psub(&ppowmod(&a, &e, f, p), &vec![1], p);
        let g = pgcd(f, &b, p);
        if g.len() > 1 && g.len() < f.len() {
            let h = pmonic(&pdivrem(f, &g, p).0, p);
            let mut out = edf(&g, d, p, rng);
            out.extend(edf(&h, d, p, rng));
            return out;
        }
    }
}

fn factor_mod_p(f: &PPoly, p: u64) -> Vec<PPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
    let mut out = Vec::new();
    for (g, d) in ddf(&pmonic(f, p), p) {
        out.extend(edf(&g, d, p, &mut rng));
    }
    out.sort();
    out
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn zinv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    e.x.mod_floor(m)
}

/// Lifts `f = G * H (mod p)` with `G` monic to modulus `p^k`.
fn hensel_two(f: &ZPoly, g0: &PPoly, h0: &PPoly, p: u64, k: u32) -> (ZPoly, ZPoly) {
    let (s, t) = pxgcd(g0, h0, p);
    let pb = BigInt::from(p);
    let mut g = to_zpoly(g0);
    let mut h = to_zpoly(h0);
    let lc = f.last().unwrap().clone();
    let mut q = pb.clone();
    for _ in 1..k {
        let qp = &q * &pb;
        // keep h's leading coefficient equal to lc(f) modulo the new modulus
        let hl = h.len() - 1;
        h[hl] = lc.mod_floor(&qp);
        let gh = zmul(&g, &h);
        let n = f.len().max(gh.len());
        let diff: ZPoly = (0..n)
            .map(|i| f.get(i).cloned().unwrap_or_default() - gh.get(i).cloned().unwrap_or_default())
            .collect();
        let e: ZPoly = diff.iter().map(|c| (c / &q).mod_floor(&pb)).collect();
        let e = to_ppoly(&e, p);
        let (quot, dg) = pdivrem(&pmul(&e, &t, p), g0, p);
        let dh = padd(&pmul(&e, &s, p), &pmul(&quot, h0, p), p);
        let add = |a: &ZPoly, d: &PPoly| -> ZPoly {
            let n = a.len().max(d.len());
            let v: ZPoly = (0..n)
                .map(|i| a.get(i).cloned().unwrap_or_default() + &q * BigInt::from(d.get(i).copied().unwrap_or(0)))
                .collect();
            zmod(&v, &qp)
        };
        g = add(&g, &dg);
        h = add(&h, &dh);
        q = qp;
    }
    let hl = h.len() - 1;
    h[hl] = lc.mod_floor(&q);
    (g, h)
}

/// Lifts the factorization `f = lc(f) * prod factors (mod p)` to monic factors mod `p^k`.
fn multi_lift(f: &ZPoly, factors: &[PPoly], p: u64, k: u32, m: &BigInt) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let inv = zinv_mod(f.last().unwrap(), m);
        return vec![zmod(&f.iter().map(|c| c * &inv).collect(), m)];
    }
    let (a, b) = factors.split_at(factors.len() / 2);
    let g0 = a.iter().fold(vec![1u64], |acc, x| pmul(&acc, x, p));
    let lc = to_ppoly(&vec![f.last().unwrap().clone()], p);
    let h0 = b.iter().fold(lc, |acc, x| pmul(&acc, x, p));
    let (g, h) = hensel_two(f, &g0, &h0, p, k);
    let mut out = multi_lift(&g, a, p, k, m);
    out.extend(multi_lift(&h, b, p, k, m));
    out
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Irreducible factors over Z of a primitive squarefree integer polynomial.
fn factor_squarefree_primitive(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    // strip a factor x
    if f[0].is_zero() {
        let mut out = vec![vec![BigInt::zero(), BigInt::one()]];
        out.extend(factor_squarefree_primitive(&ztrim(f[1..].to_vec())));
        return out;
    }
    let lc = f.last().unwrap().clone();
    // choose the prime with the fewest modular factors among a few candidates
    let mut best: Option<(u64, Vec<PPoly>)> = None;
    let mut tried = 0;
    for p in (3u64..).filter(|&p| is_prime(p)) {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = to_ppoly(f, p);
        if fp.len() != f.len() || pgcd(&fp, &pderiv(&fp, p), p).len() > 1 {
            continue;
        }
        let facs = factor_mod_p(&fp, p);
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 5 || best.as_ref().unwrap().1.len() == 1 {
            break;
        }
    }
    let (p, modular) = best.unwrap();
    if modular.len() == 1 {
        return vec![f.clone()];
    }
    // Mignotte-type bound on coefficients of lc * factor
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let bound = (norm2.sqrt() + BigInt::one()) * (BigInt::one() << n) * lc.abs() * 2;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut m = pb.clone();
    while m <= bound {
        m *= &pb;
        k += 1;
    }
    let mut lifted = multi_lift(f, &modular, p, k, &m);
    let mut rest = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut hit = None;
        for s in subsets(lifted.len(), size) {
            let lcr = rest.last().unwrap().clone();
            let cand = s.iter().fold(vec![lcr], |acc, &i| zmod(&zmul(&acc, &lifted[i]), &m));
            let cand = symmetric(&cand, &m);
            let g = cand.iter().fold(BigInt::zero(), |a, c| a.gcd(c));
            let cand: ZPoly = cand.iter().map(|c| c / &g).collect();
            if let Some(q) = zdiv_exact(&rest, &cand) {
                hit = Some((s, cand, q));
                break;
            }
        }
        match hit {
            Some((s, cand, q)) => {
                found.push(cand);
                rest = q;
                lifted = lifted.into_iter().enumerate().filter(|(i, _)| !s.contains(i)).map(|(_, v)| v).collect();
            }
            None => size += 1,
        }
    }
    found.push(rest);
    found
        .into_iter()
        .map(|v| if v.last().unwrap().is_negative() { v.iter().map(|c| -c).collect() } else { v })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors_of(c: &[i64]) -> Vec<(RatPoly, usize)> {
        factor_over_q(&RatPoly::from_ints(c)).factors
    }

    #[test]
    fn x4_minus_4_splits_into_quadratics() {
        let f = factors_of(&[-4, 0, 0, 0, 1]);
        assert_eq!(f.len(), 2);
        assert!(f.contains(&(RatPoly::from_ints(&[-2, 0, 1]), 1)));
        assert!(f.contains(&(RatPoly::from_ints(&[2, 0, 1]), 1)));
    }

    #[test]
    fn irreducible_quadratic() {
        assert_eq!(factors_of(&[-2, 0, 1]), vec![(RatPoly::from_ints(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn multiplicities() {
        // (x-1)^2 (x+3)
        let p = RatPoly::from_ints(&[3, -5, 1, 1]);
        let f = factor_over_q(&p);
        assert!(f.factors.contains(&(RatPoly::from_ints(&[-1, 1]), 2)));
        assert!(f.factors.contains(&(RatPoly::from_ints(&[3, 1]), 1)));
        assert_eq!(f.expand(), p);
    }

    #[test]
    fn swinnerton_dyer_like_needs_recombination() {
        // x^4 - 10x^2 + 1 is irreducible but splits modulo every prime
        assert!(is_irreducible(&RatPoly::from_ints(&[1, 0, -10, 0, 1])));
        // cyclotomic x^4 + x^3 + x^2 + x + 1
        assert!(is_irreducible(&RatPoly::from_ints(&[1, 1, 1, 1, 1])));
    }

    #[test]
    fn non_monic_rational_input() {
        let p = &RatPoly::from_ints(&[1, 2]) * &RatPoly::from_ints(&[-3, 0, 5]);
        let f = factor_over_q(&p.scale(&Rational::new(7.into(), 3.into())));
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.expand(), p.scale(&Rational::new(7.into(), 3.into())));
    }

    #[test]
    fn x8_minus_1() {
        let f = factors_of(&[-1, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(f.len(), 4);
    }
}
