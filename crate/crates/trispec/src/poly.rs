//! Dense integer polynomials with exact root isolation.
//!
//! Everything here is exact: coefficients are `BigInt`, evaluation points are
//! `BigRational`, and root isolation is certified by Sturm sequences. The two
//! special constructions are cyclotomic polynomials (by exact divisor
//! recursion, no tables) and the `2cos(k*theta)` basis polynomials used to
//! move between roots of unity and the real subfield.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

pub type Rat = BigRational;

/// Integer polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZPoly(Vec<BigInt>);

impl std::fmt::Debug for ZPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.display_var("x"))
    }
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly(coeffs)
    }

    pub fn zero() -> Self {
        ZPoly(Vec::new())
    }

    pub fn one() -> Self {
        ZPoly(vec![BigInt::one()])
    }

    pub fn x() -> Self {
        ZPoly(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        ZPoly::new(vec![c.into()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        ZPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; zero polynomial reports degree 0 for convenience.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.0.last().map_or(false, |c| c.is_one())
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.0.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        ZPoly::new(out)
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - other.coeff(k));
        }
        ZPoly::new(out)
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> ZPoly {
        ZPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    /// Exact division; panics if the division is not exact. Used only where
    /// exactness is a theorem (cyclotomic recursion, subfield checks).
    pub fn div_exact(&self, divisor: &ZPoly) -> ZPoly {
        let (q, r) = self.div_rem_rat(divisor);
        assert!(r.iter().all(|c| c.is_zero()), "inexact polynomial division");
        let mut out = Vec::with_capacity(q.len());
        for c in q {
            assert!(c.is_integer(), "non-integer quotient coefficient");
            out.push(c.to_integer());
        }
        ZPoly::new(out)
    }

    /// Remainder of self mod divisor, exact over the rationals.
    pub fn rem_rat(&self, divisor: &ZPoly) -> Vec<Rat> {
        self.div_rem_rat(divisor).1
    }

    fn div_rem_rat(&self, divisor: &ZPoly) -> (Vec<Rat>, Vec<Rat>) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem: Vec<Rat> = self.0.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let dd = divisor.degree();
        let lead = Rat::from_integer(divisor.leading());
        let mut quo = vec![Rat::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1;
            let factor = rem[k].clone() / lead.clone();
            if !factor.is_zero() {
                for (j, c) in divisor.0.iter().enumerate() {
                    let idx = k - dd + j;
                    let delta = &factor * Rat::from_integer(c.clone());
                    rem[idx] -= delta;
                }
                quo[k - dd] = factor;
            }
            rem.pop();
        }
        while rem.last().map_or(false, |c| c.is_zero()) {
            rem.pop();
        }
        (quo, rem)
    }

    /// Whether divisor divides self exactly.
    pub fn divisible_by(&self, divisor: &ZPoly) -> bool {
        self.rem_rat(divisor).iter().all(|c| c.is_zero())
    }

    pub fn derivative(&self) -> ZPoly {
        if self.0.len() <= 1 {
            return ZPoly::zero();
        }
        ZPoly::new(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i + 1))
                .collect(),
        )
    }

    /// Exact sign of p(a/b), computed as sign of sum a_k * num^k * den^(d-k).
    pub fn sign_at(&self, point: &Rat) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let num = point.numer();
        let den = point.denom();
        let d = self.degree();
        let mut num_pow = BigInt::one();
        // den_pows[k] = den^(d-k)
        let mut acc = BigInt::zero();
        let mut den_pows = vec![BigInt::one(); d + 1];
        for k in (0..d).rev() {
            den_pows[k] = &den_pows[k + 1] * den;
        }
        for (k, c) in self.0.iter().enumerate() {
            if !c.is_zero() {
                acc += c * &num_pow * &den_pows[k];
            }
            if k < d {
                num_pow *= num;
            }
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Exact value p(q).
    pub fn eval_rat(&self, point: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * point + Rat::from_integer(c.clone());
        }
        acc
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
        }
        g
    }

    /// Primitive part with the sign of the leading coefficient preserved.
    pub fn primitive(&self) -> ZPoly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        ZPoly::new(self.0.iter().map(|c| c / &g).collect())
    }

    /// Cauchy root bound: all real roots lie in (-B, B).
    pub fn root_bound(&self) -> Rat {
        let lead = Rat::from_integer(self.leading()).abs();
        let mut m = Rat::zero();
        for c in &self.0[..self.0.len() - 1] {
            let a = Rat::from_integer(c.clone()).abs();
            if a > m {
                m = a;
            }
        }
        Rat::one() + m / lead
    }

    pub fn display_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let term = if k == 0 {
                format!("{mag}")
            } else {
                let pow = if k == 1 { var.to_string() } else { format!("{var}^{k}") };
                if mag.is_one() {
                    pow
                } else {
                    format!("{mag}*{pow}")
                }
            };
            if parts.is_empty() {
                if c.is_negative() {
                    parts.push(format!("-{term}"));
                } else {
                    parts.push(term);
                }
            } else if c.is_negative() {
                parts.push(format!(" - {term}"));
            } else {
                parts.push(format!(" + {term}"));
            }
        }
        parts.concat()
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// n-th cyclotomic polynomial by the exact divisor recursion
/// Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d.
pub fn cyclotomic(n: u64, memo: &mut HashMap<u64, ZPoly>) -> ZPoly {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut coeffs = vec![BigInt::zero(); n as usize + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[n as usize] = BigInt::one();
    let mut p = ZPoly::new(coeffs);
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic(d, memo);
            p = p.div_exact(&phi_d);
        }
    }
    memo.insert(n, p.clone());
    p
}

/// Basis polynomials for 2cos: s_k(2cos t) = 2cos(k t).
/// s_0 = 2, s_1 = x, s_{k+1} = x*s_k - s_{k-1}.
pub fn two_cos_multiple(k: u64) -> ZPoly {
    let mut prev = ZPoly::constant(2);
    if k == 0 {
        return prev;
    }
    let mut cur = ZPoly::x();
    let x = ZPoly::x();
    for _ in 1..k {
        let next = x.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Minimal polynomial of 2cos(pi/N): monic, integer, irreducible, degree
/// phi(2N)/2 for N >= 2 (and x + 2 for N = 1).
///
/// Built by folding the palindromic cyclotomic polynomial Phi_{2N}(y) through
/// x = y + 1/y, writing y^k + y^{-k} in the s_k basis.
pub fn min_poly_two_cos_pi_over(n: u64) -> ZPoly {
    assert!(n >= 1);
    if n == 1 {
        // 2cos(pi) = -2
        return ZPoly::from_i64(&[2, 1]);
    }
    let mut memo = HashMap::new();
    let phi = cyclotomic(2 * n, &mut memo);
    let big_d = phi.degree();
    assert!(big_d % 2 == 0 && big_d >= 2);
    let d = big_d / 2;
    // palindrome check: a_i = a_{D-i}
    for i in 0..=big_d {
        assert_eq!(phi.coeff(i), phi.coeff(big_d - i), "cyclotomic not palindromic");
    }
    let mut result = ZPoly::constant(phi.coeff(d));
    for k in 1..=d {
        result = result.add(&two_cos_multiple(k as u64).scale(&phi.coeff(d + k)));
    }
    debug_assert!(result.is_monic());
    debug_assert_eq!(result.degree(), d);
    result
}

/// Sturm chain of a squarefree polynomial, primitive-scaled with signs intact.
pub struct SturmChain(Vec<ZPoly>);

impl SturmChain {
    pub fn new(p: &ZPoly) -> SturmChain {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let k = chain.len();
            if chain[k - 1].is_zero() {
                chain.pop();
                break;
            }
            if chain[k - 1].degree() == 0 {
                break;
            }
            let rem = chain[k - 2].rem_rat(&chain[k - 1]);
            if rem.iter().all(|c| c.is_zero()) {
                break;
            }
            // negate and clear denominators by a positive factor
            let mut den_lcm = BigInt::one();
            for c in &rem {
                den_lcm = den_lcm.lcm(c.denom());
            }
            let ints: Vec<BigInt> = rem
                .iter()
                .map(|c| -(c.numer() * (&den_lcm / c.denom())))
                .collect();
            chain.push(ZPoly::new(ints).primitive());
        }
        SturmChain(chain)
    }

    /// Is the base polynomial squarefree (chain terminates in a constant)?
    pub fn is_squarefree(&self) -> bool {
        self.0.last().map_or(false, |p| p.degree() == 0 && !p.is_zero())
    }

    fn variations_at(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.0 {
            let s = p.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in (lo, hi].
    pub fn count_roots(&self, lo: &Rat, hi: &Rat) -> usize {
        self.variations_at(lo) - self.variations_at(hi)
    }
}

/// Isolating intervals for all real roots of a squarefree polynomial with no
/// rational roots of degree >= 2 (degree <= 1 handled exactly). Returned
/// sorted ascending, pairwise disjoint, endpoints never roots.
pub fn isolate_real_roots(p: &ZPoly) -> Vec<(Rat, Rat)> {
    if p.is_zero() || p.degree() == 0 {
        return Vec::new();
    }
    if p.degree() == 1 {
        let root = -Rat::new(p.coeff(0), p.coeff(1));
        return vec![(root.clone(), root)];
    }
    let chain = SturmChain::new(p);
    assert!(chain.is_squarefree(), "root isolation requires a squarefree polynomial");
    let bound = p.root_bound();
    let lo = -bound.clone();
    let hi = bound;
    let total = chain.count_roots(&lo, &hi);
    let mut stack = vec![(lo, hi, total)];
    let mut found = Vec::new();
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    while let Some((a, b, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        if count == 1 {
            found.push((a, b));
            continue;
        }
        let mut mid = (&a + &b) * &half;
        // nudge off a root (cannot occur for irreducible inputs of degree >= 2,
        // but stay safe for general squarefree inputs)
        let mut offset = Rat::new(BigInt::one(), BigInt::from(1u64 << 20)) * (&b - &a);
        while p.sign_at(&mid) == 0 {
            mid += &offset;
            offset = offset * &half;
        }
        let left = chain.count_roots(&a, &mid);
        stack.push((a, mid.clone(), left));
        stack.push((mid, b, count - left));
    }
    found.sort_by(|x, y| x.0.cmp(&y.0));
    // shrink until strictly disjoint
    loop {
        let mut overlapping = false;
        for i in 1..found.len() {
            if found[i - 1].1 >= found[i].0 {
                overlapping = true;
            }
        }
        if !overlapping {
            break;
        }
        for iv in found.iter_mut() {
            let (a, b) = iv.clone();
            *iv = bisect_step(p, &a, &b);
        }
    }
    found
}

/// One bisection refinement step preserving the sign-change bracket.
pub fn bisect_step(p: &ZPoly, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    if lo == hi {
        return (lo.clone(), hi.clone());
    }
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let mut mid = (lo + hi) * &half;
    let s_lo = p.sign_at(lo);
    debug_assert!(s_lo != 0 && p.sign_at(hi) != 0 && s_lo != p.sign_at(hi));
    let mut s_mid = p.sign_at(&mid);
    if s_mid == 0 {
        // perturb; exact rational roots do not occur for irreducible inputs
        let mut offset = (hi - lo) * Rat::new(BigInt::one(), BigInt::from(1u64 << 20));
        while s_mid == 0 {
            mid += &offset;
            offset = offset * &half;
            s_mid = p.sign_at(&mid);
        }
    }
    if s_mid == s_lo {
        (mid, hi.clone())
    } else {
        (lo.clone(), mid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(v: &[i64]) -> ZPoly {
        ZPoly::from_i64(v)
    }

    #[test]
    fn cyclotomic_small() {
        let mut memo = HashMap::new();
        assert_eq!(cyclotomic(1, &mut memo), zp(&[-1, 1]));
        assert_eq!(cyclotomic(2, &mut memo), zp(&[1, 1]));
        assert_eq!(cyclotomic(4, &mut memo), zp(&[1, 0, 1]));
        assert_eq!(cyclotomic(10, &mut memo), zp(&[1, -1, 1, -1, 1]));
        assert_eq!(cyclotomic(12, &mut memo), zp(&[1, 0, -1, 0, 1]));
        // degree is phi(n)
        for n in 1..60u64 {
            assert_eq!(cyclotomic(n, &mut memo).degree() as u64, euler_phi(n));
        }
    }

    #[test]
    fn two_cos_basis() {
        // s_2 = x^2 - 2, s_3 = x^3 - 3x
        assert_eq!(two_cos_multiple(0), zp(&[2]));
        assert_eq!(two_cos_multiple(2), zp(&[-2, 0, 1]));
        assert_eq!(two_cos_multiple(3), zp(&[0, -3, 0, 1]));
    }

    #[test]
    fn min_poly_examples() {
        // frozen expected values: N=1 -> x+2, N=2 -> x, N=3 -> x-1,
        // N=5 -> x^2-x-1, N=7 -> x^3-x^2-2x+1
        assert_eq!(min_poly_two_cos_pi_over(1), zp(&[2, 1]));
        assert_eq!(min_poly_two_cos_pi_over(2), zp(&[0, 1]));
        assert_eq!(min_poly_two_cos_pi_over(3), zp(&[-1, 1]));
        assert_eq!(min_poly_two_cos_pi_over(5), zp(&[-1, -1, 1]));
        assert_eq!(min_poly_two_cos_pi_over(7), zp(&[1, -2, -1, 1]));
    }

    #[test]
    fn min_poly_degree_and_divisibility() {
        for n in 2..=30u64 {
            let p = min_poly_two_cos_pi_over(n);
            assert_eq!(p.degree() as u64, euler_phi(2 * n) / 2, "degree for N={n}");
            assert!(p.is_monic());
            // 2cos(N t) = -2 at t = pi/N, so the minimal polynomial divides s_N + 2
            let s_n_plus_2 = two_cos_multiple(n).add(&ZPoly::constant(2));
            assert!(s_n_plus_2.divisible_by(&p), "s_N + 2 divisible for N={n}");
            // numeric root check at f64 precision
            let root = 2.0 * (std::f64::consts::PI / n as f64).cos();
            let mut val = 0.0f64;
            for c in p.coeffs().iter().rev() {
                let cf: f64 = c.to_string().parse().unwrap();
                val = val * root + cf;
            }
            assert!(val.abs() < 1e-9, "residual {val} for N={n}");
        }
    }

    #[test]
    fn sturm_isolates_quadratic() {
        // x^2 - x - 1: roots 1.618..., -0.618...
        let p = zp(&[-1, -1, 1]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 2);
        let phi = 1.618033988749895f64;
        let approx: Vec<f64> = roots
            .iter()
            .map(|(a, b)| {
                let (mut a, mut b) = (a.clone(), b.clone());
                for _ in 0..60 {
                    let r = bisect_step(&p, &a, &b);
                    a = r.0;
                    b = r.1;
                }
                crate::interval::rat_to_f64(&((&a + &b) / Rat::from_integer(2.into())))
            })
            .collect();
        assert!((approx[0] + (phi - 1.0)).abs() < 1e-12);
        assert!((approx[1] - phi).abs() < 1e-12);
    }

    #[test]
    fn isolation_matches_degree() {
        // minimal polynomials are totally real: d isolated roots
        for n in [5u64, 7, 12, 15, 30] {
            let p = min_poly_two_cos_pi_over(n);
            let roots = isolate_real_roots(&p);
            assert_eq!(roots.len(), p.degree());
            for w in roots.windows(2) {
                assert!(w[0].1 < w[1].0, "intervals disjoint");
            }
        }
    }
}
