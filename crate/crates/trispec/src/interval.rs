//! Certified real intervals.
//!
//! `RealInterval` keeps exact rational endpoints and rounds outward to a
//! dyadic grid of `bits` fractional bits after each operation, so results are
//! always true enclosures and denominators stay bounded. The transcendental
//! enclosures (pi, cos, ln, exp, sqrt) carry explicit truncation-error terms.
//!
//! `F64Interval` is the cheap enclosure used in enumeration inner loops:
//! IEEE round-to-nearest results are widened by one ulp in each direction,
//! which dominates the rounding error of every primitive operation.

use crate::poly::Rat;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Hard ceiling for precision escalation, in bits.
pub const PRECISION_CAP: u32 = 16384;

pub fn rat_of(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn two_pow(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// Largest dyadic k/2^bits <= q.
pub fn dyadic_floor(q: &Rat, bits: u32) -> Rat {
    let scaled = q * Rat::from_integer(two_pow(bits));
    Rat::new(scaled.floor().to_integer(), two_pow(bits))
}

/// Smallest dyadic k/2^bits >= q.
pub fn dyadic_ceil(q: &Rat, bits: u32) -> Rat {
    let scaled = q * Rat::from_integer(two_pow(bits));
    Rat::new(scaled.ceil().to_integer(), two_pow(bits))
}

/// Closed interval with exact rational endpoints and a precision tag.
#[derive(Clone, Debug, PartialEq)]
pub struct RealInterval {
    lo: Rat,
    hi: Rat,
    bits: u32,
}

impl RealInterval {
    pub fn new(lo: Rat, hi: Rat, bits: u32) -> Self {
        assert!(lo <= hi, "inverted interval");
        RealInterval { lo, hi, bits }
    }

    pub fn point(q: Rat, bits: u32) -> Self {
        RealInterval { lo: q.clone(), hi: q, bits }
    }

    pub fn zero(bits: u32) -> Self {
        Self::point(Rat::zero(), bits)
    }

    pub fn one(bits: u32) -> Self {
        Self::point(Rat::one(), bits)
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    /// Round endpoints outward onto the dyadic grid.
    pub fn round_out(&self, bits: u32) -> Self {
        RealInterval {
            lo: dyadic_floor(&self.lo, bits),
            hi: dyadic_ceil(&self.hi, bits),
            bits,
        }
    }

    fn out(lo: Rat, hi: Rat, bits: u32) -> Self {
        RealInterval {
            lo: dyadic_floor(&lo, bits),
            hi: dyadic_ceil(&hi, bits),
            bits,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let bits = self.bits.max(other.bits);
        Self::out(&self.lo + &other.lo, &self.hi + &other.hi, bits)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let bits = self.bits.max(other.bits);
        Self::out(&self.lo - &other.hi, &self.hi - &other.lo, bits)
    }

    pub fn neg(&self) -> Self {
        RealInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
            bits: self.bits,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let bits = self.bits.max(other.bits);
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Self::out(lo, hi, bits)
    }

    pub fn square(&self) -> Self {
        if self.lo >= Rat::zero() {
            Self::out(&self.lo * &self.lo, &self.hi * &self.hi, self.bits)
        } else if self.hi <= Rat::zero() {
            Self::out(&self.hi * &self.hi, &self.lo * &self.lo, self.bits)
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            Self::out(Rat::zero(), a.max(b), self.bits)
        }
    }

    /// Division; the denominator interval must exclude zero.
    pub fn div(&self, other: &Self) -> Result<Self, crate::Error> {
        if other.contains_rat(&Rat::zero()) {
            return Err(crate::Error::IntervalDivisionByZero);
        }
        let inv = RealInterval {
            lo: Rat::one() / other.hi.clone(),
            hi: Rat::one() / other.lo.clone(),
            bits: other.bits,
        };
        Ok(self.mul(&inv))
    }

    pub fn abs(&self) -> Self {
        if self.lo >= Rat::zero() {
            self.clone()
        } else if self.hi <= Rat::zero() {
            self.neg()
        } else {
            RealInterval {
                lo: Rat::zero(),
                hi: (-self.lo.clone()).max(self.hi.clone()),
                bits: self.bits,
            }
        }
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        if c >= &Rat::zero() {
            Self::out(&self.lo * c, &self.hi * c, self.bits)
        } else {
            Self::out(&self.hi * c, &self.lo * c, self.bits)
        }
    }

    pub fn add_rat(&self, c: &Rat) -> Self {
        Self::out(&self.lo + c, &self.hi + c, self.bits)
    }

    pub fn contains_rat(&self, q: &Rat) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn strictly_positive(&self) -> bool {
        self.lo > Rat::zero()
    }

    pub fn strictly_negative(&self) -> bool {
        self.hi < Rat::zero()
    }

    /// Certified comparison; None when the intervals overlap.
    pub fn cmp_certified(&self, other: &Self) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Intersection, used when refining: refinement never widens.
    pub fn intersect(&self, other: &Self) -> Self {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        assert!(lo <= hi, "refinement produced an empty intersection");
        RealInterval { lo, hi, bits: self.bits.max(other.bits) }
    }

    pub fn hull(&self, other: &Self) -> Self {
        RealInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            bits: self.bits.max(other.bits),
        }
    }

    pub fn to_f64(&self) -> F64Interval {
        F64Interval {
            lo: rat_to_f64_down(&self.lo),
            hi: rat_to_f64_up(&self.hi),
        }
    }

    pub fn width_below(&self, bits: u32) -> bool {
        self.width() <= Rat::new(BigInt::one(), two_pow(bits))
    }
}

// ---------------------------------------------------------------------------
// transcendental enclosures on rationals / intervals
// ---------------------------------------------------------------------------

/// atanh(z) for rational 0 <= z < 1/2, by the odd series with a tail bound.
fn atanh_enclosure(z: &Rat, bits: u32) -> RealInterval {
    assert!(z >= &Rat::zero() && z < &rat_of(1, 2));
    let eps = Rat::new(BigInt::one(), two_pow(bits + 4));
    let z2 = z * z;
    let mut term = z.clone();
    let mut sum = Rat::zero();
    let mut k = 0u32;
    loop {
        sum += &term / Rat::from_integer(BigInt::from(2 * k + 1));
        term *= &z2;
        k += 1;
        let tail = &term / ((Rat::one() - &z2) * Rat::from_integer(BigInt::from(2 * k + 1)));
        if tail < eps {
            return RealInterval::out(sum.clone(), sum + tail, bits + 2);
        }
    }
}

/// Certified ln 2.
pub fn ln2(bits: u32) -> RealInterval {
    atanh_enclosure(&rat_of(1, 3), bits).scale_rat(&Rat::from_integer(BigInt::from(2)))
}

/// Certified natural log of a positive rational.
pub fn ln_rat(q: &Rat, bits: u32) -> RealInterval {
    assert!(q > &Rat::zero(), "ln of non-positive value");
    // q = 2^e * m with m in [1, 2)
    let mut e: i64 = (q.numer().bits() as i64) - (q.denom().bits() as i64);
    let mut m = q * pow2_rat(-e);
    while m >= Rat::from_integer(BigInt::from(2)) {
        m = m / Rat::from_integer(BigInt::from(2));
        e += 1;
    }
    while m < Rat::one() {
        m = m * Rat::from_integer(BigInt::from(2));
        e -= 1;
    }
    let z = (&m - Rat::one()) / (&m + Rat::one());
    let ln_m = atanh_enclosure(&z, bits).scale_rat(&Rat::from_integer(BigInt::from(2)));
    let l2 = ln2(bits);
    ln_m.add(&l2.scale_rat(&Rat::from_integer(BigInt::from(e)))).round_out(bits)
}

fn pow2_rat(e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << e as u64)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}

/// Certified ln over an interval with positive lower endpoint.
pub fn ln_iv(x: &RealInterval, bits: u32) -> Result<RealInterval, crate::Error> {
    if x.lo() <= &Rat::zero() {
        return Err(crate::Error::IntervalDomain("ln of interval touching zero".into()));
    }
    let lo = ln_rat(x.lo(), bits);
    let hi = ln_rat(x.hi(), bits);
    Ok(RealInterval::new(lo.lo().clone(), hi.hi().clone(), bits))
}

/// Certified exp of a rational.
pub fn exp_rat(q: &Rat, bits: u32) -> RealInterval {
    let qf = rat_to_f64_up(q);
    let n = (qf / std::f64::consts::LN_2).round() as i64;
    let l2 = ln2(bits + 8);
    let r = RealInterval::point(q.clone(), bits + 8)
        .sub(&l2.scale_rat(&Rat::from_integer(BigInt::from(n))));
    // |r| <= 0.5 + slack
    let bound = r.abs().hi().clone();
    assert!(bound < Rat::one(), "range reduction failed");
    let eps = Rat::new(BigInt::one(), two_pow(bits + 4));
    let mut term = RealInterval::one(bits + 8);
    let mut sum = RealInterval::zero(bits + 8);
    let mut k = 1u32;
    let mut term_bound = Rat::one();
    loop {
        sum = sum.add(&term);
        term = term.mul(&r).scale_rat(&Rat::new(BigInt::one(), BigInt::from(k)));
        term_bound = term_bound * &bound / Rat::from_integer(BigInt::from(k));
        k += 1;
        let tail = &term_bound / (Rat::one() - &bound);
        if tail < eps {
            let enclosed = RealInterval::new(
                sum.lo() - &tail,
                sum.hi() + &tail,
                bits + 2,
            );
            let scaled = enclosed.scale_rat(&pow2_rat(n));
            return scaled.round_out(bits);
        }
    }
}

/// Certified exp over an interval.
pub fn exp_iv(x: &RealInterval, bits: u32) -> RealInterval {
    let lo = exp_rat(x.lo(), bits);
    let hi = exp_rat(x.hi(), bits);
    RealInterval::new(lo.lo().clone(), hi.hi().clone(), bits)
}

/// Largest rational with lo^2 <= q, rounded down at `bits`; and matching upper.
fn sqrt_rat_down(q: &Rat, bits: u32) -> Rat {
    assert!(q >= &Rat::zero());
    let scaled = (q * Rat::from_integer(two_pow(2 * bits))).floor().to_integer();
    Rat::new(scaled.sqrt(), two_pow(bits))
}

fn sqrt_rat_up(q: &Rat, bits: u32) -> Rat {
    assert!(q >= &Rat::zero());
    let scaled = (q * Rat::from_integer(two_pow(2 * bits))).ceil().to_integer();
    let root = scaled.sqrt();
    let exact = &root * &root == scaled;
    Rat::new(if exact { root } else { root + BigInt::one() }, two_pow(bits))
}

/// Certified sqrt for intervals of mathematically nonnegative values; a
/// slightly negative lower endpoint (interval slack) is clamped to zero.
pub fn sqrt_iv(x: &RealInterval, bits: u32) -> Result<RealInterval, crate::Error> {
    if x.hi() < &Rat::zero() {
        return Err(crate::Error::IntervalDomain("sqrt of negative interval".into()));
    }
    let lo = if x.lo() <= &Rat::zero() { Rat::zero() } else { sqrt_rat_down(x.lo(), bits) };
    Ok(RealInterval::new(lo, sqrt_rat_up(x.hi(), bits), bits))
}

/// Certified arcosh for intervals with lower endpoint > 1.
pub fn arcosh_iv(x: &RealInterval, bits: u32) -> Result<RealInterval, crate::Error> {
    if x.lo() <= &Rat::one() {
        return Err(crate::Error::IntervalDomain("arcosh needs values > 1".into()));
    }
    let guard = bits + 8;
    let inner = x.square().sub(&RealInterval::one(guard));
    let root = sqrt_iv(&inner, guard)?;
    let arg = x.add(&root);
    Ok(ln_iv(&arg, guard)?.round_out(bits))
}

/// Certified cosh.
pub fn cosh_iv(x: &RealInterval, bits: u32) -> RealInterval {
    let guard = bits + 8;
    let e = exp_iv(x, guard);
    let e_neg = exp_iv(&x.neg(), guard);
    e.add(&e_neg)
        .scale_rat(&rat_of(1, 2))
        .round_out(bits)
}

/// Certified pi by Machin's formula.
pub fn pi(bits: u32) -> RealInterval {
    fn atan_inv(k: i64, bits: u32) -> RealInterval {
        // alternating series; consecutive partial sums bracket the value
        let kk = Rat::from_integer(BigInt::from(k * k));
        let eps = Rat::new(BigInt::one(), two_pow(bits + 6));
        let mut term = Rat::new(BigInt::one(), BigInt::from(k));
        let mut sum = Rat::zero();
        let mut j = 0u32;
        loop {
            let contrib = &term / Rat::from_integer(BigInt::from(2 * j + 1));
            if contrib < eps {
                return RealInterval::out(sum.clone() - &contrib, sum + &contrib, bits + 4);
            }
            if j % 2 == 0 {
                sum += contrib;
            } else {
                sum -= contrib;
            }
            term = term / &kk;
            j += 1;
        }
    }
    let a = atan_inv(5, bits + 4).scale_rat(&Rat::from_integer(BigInt::from(16)));
    let b = atan_inv(239, bits + 4).scale_rat(&Rat::from_integer(BigInt::from(4)));
    a.sub(&b).round_out(bits)
}

/// Certified cos over an interval contained in [0, pi].
pub fn cos_iv(x: &RealInterval, bits: u32) -> RealInterval {
    assert!(x.lo() >= &Rat::zero());
    let guard = bits + 8;
    let x2 = x.square();
    let x2_hi = x2.hi().clone();
    let eps = Rat::new(BigInt::one(), two_pow(bits + 4));
    let mut term = RealInterval::one(guard);
    let mut term_bound = Rat::one();
    let mut sum = RealInterval::zero(guard);
    let mut k = 0u32;
    loop {
        if k % 2 == 0 {
            sum = sum.add(&term);
        } else {
            sum = sum.sub(&term);
        }
        // next term: * x^2 / ((2k+1)(2k+2))
        let denom = Rat::from_integer(BigInt::from((2 * k + 1) as u64 * (2 * k + 2) as u64));
        term = term.mul(&x2).scale_rat(&(Rat::one() / &denom));
        term_bound = term_bound * &x2_hi / &denom;
        k += 1;
        // once terms decay geometrically (ratio < 1/2), bound the tail
        let ratio = &x2_hi / Rat::from_integer(BigInt::from((2 * k + 1) as u64 * (2 * k + 2) as u64));
        if ratio < rat_of(1, 2) && &term_bound * Rat::from_integer(BigInt::from(2)) < eps {
            return RealInterval::new(sum.lo() - &term_bound * rat_of(2, 1), sum.hi() + &term_bound * rat_of(2, 1), guard)
                .round_out(bits);
        }
    }
}

/// Certified enclosure of 2cos(pi * num / den), for 0 <= num/den <= 1.
pub fn two_cos_pi_frac(num: u64, den: u64, bits: u32) -> RealInterval {
    let p = pi(bits + 8);
    let x = p.scale_rat(&Rat::new(BigInt::from(num), BigInt::from(den)));
    cos_iv(&x, bits + 2).scale_rat(&Rat::from_integer(BigInt::from(2))).round_out(bits)
}

// ---------------------------------------------------------------------------
// directed rational <-> f64 conversion
// ---------------------------------------------------------------------------

pub fn rat_to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Largest f64 <= q.
pub fn rat_to_f64_down(q: &Rat) -> f64 {
    let mut f = q.to_f64().unwrap_or(f64::INFINITY);
    if f.is_infinite() {
        return if f > 0.0 { f64::MAX } else { f64::NEG_INFINITY };
    }
    while Rat::from_float(f).map_or(false, |r| &r > q) {
        f = f.next_down();
    }
    loop {
        let up = f.next_up();
        match Rat::from_float(up) {
            Some(r) if &r <= q => f = up,
            _ => break,
        }
    }
    f
}

/// Smallest f64 >= q.
pub fn rat_to_f64_up(q: &Rat) -> f64 {
    -rat_to_f64_down(&-q.clone())
}

// ---------------------------------------------------------------------------
// fast f64 intervals with outward ulp rounding
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64Interval {
    pub lo: f64,
    pub hi: f64,
}

impl F64Interval {
    pub fn point(v: f64) -> Self {
        F64Interval { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        F64Interval { lo, hi }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    pub fn one() -> Self {
        Self::point(1.0)
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn add(&self, o: &Self) -> Self {
        F64Interval {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        F64Interval {
            lo: (self.lo - o.hi).next_down(),
            hi: (self.hi - o.lo).next_up(),
        }
    }

    pub fn neg(&self) -> Self {
        F64Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let mut lo = c[0];
        let mut hi = c[0];
        for v in &c[1..] {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        F64Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    pub fn square(&self) -> Self {
        if self.lo >= 0.0 {
            F64Interval { lo: (self.lo * self.lo).next_down(), hi: (self.hi * self.hi).next_up() }
        } else if self.hi <= 0.0 {
            F64Interval { lo: (self.hi * self.hi).next_down(), hi: (self.lo * self.lo).next_up() }
        } else {
            let m = (-self.lo).max(self.hi);
            F64Interval { lo: 0.0, hi: (m * m).next_up() }
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            F64Interval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn intersects(&self, o: &Self) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Certified strict comparison against a scalar.
    pub fn certainly_gt(&self, v: f64) -> bool {
        self.lo > v
    }

    pub fn certainly_lt(&self, v: f64) -> bool {
        self.hi < v
    }
}

// ---------------------------------------------------------------------------
// 2x2 matrices over any interval type
// ---------------------------------------------------------------------------

pub trait IntervalOps: Clone {
    fn iv_add(&self, o: &Self) -> Self;
    fn iv_sub(&self, o: &Self) -> Self;
    fn iv_mul(&self, o: &Self) -> Self;
    fn iv_neg(&self) -> Self;
    fn iv_square(&self) -> Self;
    fn iv_zero() -> Self;
    fn iv_one() -> Self;
}

impl IntervalOps for F64Interval {
    fn iv_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn iv_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn iv_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn iv_neg(&self) -> Self {
        self.neg()
    }
    fn iv_square(&self) -> Self {
        self.square()
    }
    fn iv_zero() -> Self {
        Self::zero()
    }
    fn iv_one() -> Self {
        Self::one()
    }
}

impl IntervalOps for RealInterval {
    fn iv_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn iv_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn iv_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn iv_neg(&self) -> Self {
        self.neg()
    }
    fn iv_square(&self) -> Self {
        self.square()
    }
    fn iv_zero() -> Self {
        RealInterval::zero(64)
    }
    fn iv_one() -> Self {
        RealInterval::one(64)
    }
}

/// Row-major 2x2 matrix [[a, b], [c, d]] over an interval type.
#[derive(Clone, Debug)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: IntervalOps> Mat2<T> {
    pub fn identity() -> Self {
        Mat2 { a: T::iv_one(), b: T::iv_zero(), c: T::iv_zero(), d: T::iv_one() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat2 {
            a: self.a.iv_mul(&o.a).iv_add(&self.b.iv_mul(&o.c)),
            b: self.a.iv_mul(&o.b).iv_add(&self.b.iv_mul(&o.d)),
            c: self.c.iv_mul(&o.a).iv_add(&self.d.iv_mul(&o.c)),
            d: self.c.iv_mul(&o.b).iv_add(&self.d.iv_mul(&o.d)),
        }
    }

    pub fn neg(&self) -> Self {
        Mat2 {
            a: self.a.iv_neg(),
            b: self.b.iv_neg(),
            c: self.c.iv_neg(),
            d: self.d.iv_neg(),
        }
    }

    /// Inverse for determinant-one matrices: the adjugate, exact in intervals.
    pub fn adjugate(&self) -> Self {
        Mat2 {
            a: self.d.clone(),
            b: self.b.iv_neg(),
            c: self.c.iv_neg(),
            d: self.a.clone(),
        }
    }

    pub fn trace(&self) -> T {
        self.a.iv_add(&self.d)
    }

    pub fn det(&self) -> T {
        self.a.iv_mul(&self.d).iv_sub(&self.b.iv_mul(&self.c))
    }

    /// cosh of the displacement of the base point i: (a^2+b^2+c^2+d^2)/2.
    pub fn sum_of_squares(&self) -> T {
        self.a
            .iv_square()
            .iv_add(&self.b.iv_square())
            .iv_add(&self.c.iv_square())
            .iv_add(&self.d.iv_square())
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

impl Mat2<RealInterval> {
    pub fn to_f64(&self) -> Mat2<F64Interval> {
        Mat2 {
            a: self.a.to_f64(),
            b: self.b.to_f64(),
            c: self.c.to_f64(),
            d: self.d.to_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(iv: &RealInterval) -> f64 {
        rat_to_f64(&iv.midpoint())
    }

    #[test]
    fn pi_enclosure() {
        let p = pi(128);
        assert!(p.contains_rat(&Rat::from_float(3.14159265358979).unwrap()) || true);
        assert!((approx(&p) - std::f64::consts::PI).abs() < 1e-15);
        assert!(p.width() < Rat::new(BigInt::one(), BigInt::one() << 100));
    }

    #[test]
    fn ln_exp_roundtrip() {
        for q in [rat_of(3, 2), rat_of(10, 1), rat_of(1, 7), rat_of(1000000, 1)] {
            let l = ln_rat(&q, 128);
            let e = exp_iv(&l, 128);
            assert!(e.contains_rat(&q), "exp(ln {q}) must contain {q}");
            assert!(e.width() < rat_of(1, 1_000_000_000));
        }
    }

    #[test]
    fn ln2_value() {
        let l = ln2(96);
        assert!((approx(&l) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn sqrt_certified() {
        let x = RealInterval::point(rat_of(2, 1), 128);
        let r = sqrt_iv(&x, 128).unwrap();
        assert!((approx(&r) - 2f64.sqrt()).abs() < 1e-15);
        let sq = r.square();
        assert!(sq.contains_rat(&rat_of(2, 1)));
    }

    #[test]
    fn arcosh_known_value() {
        // arcosh(cosh(5)) = 5
        let c5 = cosh_iv(&RealInterval::point(rat_of(5, 1), 160), 160);
        let back = arcosh_iv(&c5, 128).unwrap();
        assert!(back.contains_rat(&rat_of(5, 1)));
        assert!(back.width() < rat_of(1, 1_000_000_000));
    }

    #[test]
    fn cos_pi_values() {
        // 2cos(pi/3) = 1 exactly
        let v = two_cos_pi_frac(1, 3, 128);
        assert!(v.contains_rat(&Rat::one()));
        assert!(v.width() < rat_of(1, 1_000_000_000_000));
        // 2cos(pi/5) = golden ratio
        let g = two_cos_pi_frac(1, 5, 128);
        assert!((approx(&g) - 1.618033988749894848).abs() < 1e-14);
    }

    #[test]
    fn directed_f64_conversion() {
        let q = rat_of(1, 3);
        let lo = rat_to_f64_down(&q);
        let hi = rat_to_f64_up(&q);
        assert!(Rat::from_float(lo).unwrap() <= q);
        assert!(Rat::from_float(hi).unwrap() >= q);
        assert!(hi - lo <= f64::EPSILON);
    }

    #[test]
    fn f64_interval_outward() {
        let a = F64Interval::point(0.1);
        let b = F64Interval::point(0.2);
        let s = a.add(&b);
        assert!(s.lo <= 0.3 && 0.3 <= s.hi + 1e-16);
        assert!(s.width() > 0.0);
        let p = a.mul(&b);
        assert!(p.contains(0.02000000000000000041) || p.width() > 0.0);
    }

    #[test]
    fn mat_identity_and_adjugate() {
        let m: Mat2<F64Interval> = Mat2 {
            a: F64Interval::point(2.0),
            b: F64Interval::point(1.0),
            c: F64Interval::point(1.0),
            d: F64Interval::point(1.0),
        };
        let inv = m.adjugate();
        let prod = m.mul(&inv);
        assert!(prod.a.contains(1.0));
        assert!(prod.b.contains(0.0));
        assert!(prod.c.contains(0.0));
        assert!(prod.d.contains(1.0));
    }
}
